use ncerg::algebra::{random_operator, AlgebraShape, Operator, OperatorKind};
use ncerg::ergodic::{cesaro, mean_limit};
use ncerg::kernels::random::{random_kernel, KernelFamily};
use ncerg::rearrangement::{majorization_check, mu, norm_eval, NormId, OrliczFunction};
use proptest::prelude::*;

fn shape_strategy() -> impl Strategy<Value = AlgebraShape> {
    prop::collection::vec((1usize..=3, prop_oneof![Just(0.125), Just(0.5), Just(1.0), Just(2.0), 0.05f64..4.0]), 1..=3)
        .prop_map(|b| AlgebraShape::new(b).unwrap())
}

fn all_norms() -> Vec<NormId> {
    let mut v = NormId::BASIC.to_vec();
    v.push(NormId::Orlicz(OrliczFunction::power(2.5).unwrap()));
    v.push(NormId::Orlicz(OrliczFunction::t_log_one_plus_t()));
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn norms_are_unitarily_invariant_and_homogeneous(s in shape_strategy(), seed in 0u64..10_000, c in 0.01f64..50.0) {
        let x = random_operator(&s, OperatorKind::General, seed).unwrap();
        let u = ncerg::algebra::random_unitary(&s, seed + 1);
        let ux = u.mul(&x).unwrap();
        for n in all_norms() {
            let a = norm_eval(&n, &x).unwrap();
            prop_assert!((norm_eval(&n, &ux).unwrap() - a).abs() <= 1e-9 * a.max(1.0));
            prop_assert!((norm_eval(&n, &x.scale_real(c)).unwrap() - c * a).abs() <= 1e-9 * (c * a).max(1.0));
        }
    }

    #[test]
    fn triangle_inequality(s in shape_strategy(), seed in 0u64..10_000) {
        let x = random_operator(&s, OperatorKind::General, seed).unwrap();
        let y = random_operator(&s, OperatorKind::General, seed + 7).unwrap();
        let xy = x.add(&y).unwrap();
        for n in all_norms() {
            let lhs = norm_eval(&n, &xy).unwrap();
            let rhs = norm_eval(&n, &x).unwrap() + norm_eval(&n, &y).unwrap();
            prop_assert!(lhs <= rhs * (1.0 + 1e-9), "{}: {} > {}", n, lhs, rhs);
        }
    }

    #[test]
    fn mu_is_non_increasing_with_total_mass_tau_one(s in shape_strategy(), seed in 0u64..10_000) {
        let x = random_operator(&s, OperatorKind::General, seed).unwrap();
        let m = mu(&x).unwrap();
        prop_assert!(m.steps().windows(2).all(|w| w[0].0 > w[1].0));
        let len: f64 = m.steps().iter().map(|st| st.1).sum();
        prop_assert!(len <= s.total_trace() * (1.0 + 1e-12));
        prop_assert!((m.integral() - norm_eval(&NormId::L1, &x).unwrap()).abs() < 1e-12 * m.integral().max(1.0));
    }

    #[test]
    fn certified_kernels_contract_and_submajorize(s in shape_strategy(), seed in 0u64..10_000, fam in 0usize..7) {
        let fams = KernelFamily::applicable(&s);
        let k = random_kernel(&s, fams[fam % fams.len()], seed).unwrap();
        prop_assert!(k.certify().passed());
        let x = random_operator(&s, OperatorKind::General, seed + 3).unwrap();
        let tx = k.apply(&x).unwrap();
        for n in all_norms() {
            prop_assert!(norm_eval(&n, &tx).unwrap() <= norm_eval(&n, &x).unwrap() * (1.0 + 1e-9));
        }
        prop_assert!(majorization_check(&tx, &x).unwrap().holds);
    }

    #[test]
    fn limit_is_fixed_and_averages_shrink_toward_it(s in shape_strategy(), seed in 0u64..10_000) {
        let fams = KernelFamily::applicable(&s);
        let k = random_kernel(&s, fams[seed as usize % fams.len()], seed).unwrap();
        let x = random_operator(&s, OperatorKind::General, seed + 5).unwrap();
        let lim = mean_limit(&k, &x).unwrap();
        prop_assert!(k.apply(&lim).unwrap().sub(&lim).unwrap().max_abs() < 1e-8 * (1.0 + x.max_abs()));
        let t = cesaro(&k, &x, &[1, 1024]).unwrap();
        let far = norm_eval(&NormId::L1plusLinf, &x.sub(&lim).unwrap()).unwrap();
        let near = norm_eval(&NormId::L1plusLinf, &t.last().1.sub(&lim).unwrap()).unwrap();
        prop_assert!(near <= far * (1.0 + 1e-9) + 1e-12);
    }

    #[test]
    fn json_round_trip(s in shape_strategy(), seed in 0u64..10_000) {
        let x = random_operator(&s, OperatorKind::General, seed).unwrap();
        prop_assert_eq!(Operator::from_json(&x.to_json().unwrap()).unwrap(), x);
    }
}
