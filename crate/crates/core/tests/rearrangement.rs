use ncerg::algebra::{random_operator, AlgebraShape, Operator, OperatorKind};
use ncerg::rearrangement::{
    delta2_check, embedding_probe, k_decomposition, majorization_check, mu, norm_axiom_suite, norm_eval,
    GrowthRegime, NormId, OrliczFunction,
};

fn shape() -> AlgebraShape {
    AlgebraShape::new([(2, 0.5), (3, 1.5)]).unwrap()
}

#[test]
fn mu_of_a_diagonal_operator() {
    let s = AlgebraShape::diagonal(&[1.0, 0.5, 2.0]).unwrap();
    let x = Operator::from_real_diagonal(&s, &[-3.0, 5.0, 1.0]).unwrap();
    let m = mu(&x).unwrap();
    assert_eq!(m.steps(), &[(5.0, 0.5), (3.0, 1.0), (1.0, 2.0)]);
    assert_eq!(m.eval(0.25), 5.0);
    assert_eq!(m.eval(0.5), 3.0);
    assert_eq!(m.eval(10.0), 0.0);
    assert_eq!(m.integral_to(1.0), 2.5 + 1.5);
    assert_eq!(norm_eval(&NormId::L1plusLinf, &x).unwrap(), 4.0);
    assert_eq!(norm_eval(&NormId::L1, &x).unwrap(), 7.5);
    assert_eq!(norm_eval(&NormId::L1capLinf, &x).unwrap(), 7.5);
}

#[test]
fn zero_operator_has_zero_norms() {
    let z = Operator::zeros(&shape());
    assert!(mu(&z).unwrap().is_zero());
    for n in NormId::BASIC {
        assert_eq!(norm_eval(&n, &z).unwrap(), 0.0);
    }
    assert_eq!(norm_eval(&NormId::Orlicz(OrliczFunction::exp_minus_one()), &z).unwrap(), 0.0);
}

#[test]
fn k_decomposition_attains_the_norm() {
    for seed in 0..20 {
        let x = random_operator(&shape(), OperatorKind::General, seed).unwrap();
        let (x1, x2) = k_decomposition(&x).unwrap();
        let cost = norm_eval(&NormId::L1, &x1).unwrap() + norm_eval(&NormId::Linf, &x2).unwrap();
        let r0 = norm_eval(&NormId::L1plusLinf, &x).unwrap();
        assert!((cost - r0).abs() <= 1e-12 * r0.max(1.0), "{cost} vs {r0}");
        assert!(x1.add(&x2).unwrap().sub(&x).unwrap().max_abs() < 1e-12);
    }
}

#[test]
fn axioms_hold_for_every_norm() {
    let norms = [
        NormId::L1,
        NormId::Linf,
        NormId::L1capLinf,
        NormId::L1plusLinf,
        NormId::Orlicz(OrliczFunction::power(1.5).unwrap()),
        NormId::Orlicz(OrliczFunction::t_log_one_plus_t()),
        NormId::Orlicz(OrliczFunction::exp_minus_one()),
    ];
    for n in &norms {
        let r = norm_axiom_suite(n, &shape(), 3, 15).unwrap();
        assert!(r.all_passed(), "{n}: {r:?}");
    }
}

#[test]
fn embedding_constants_bracket_one_for_the_r0_norm() {
    let e = embedding_probe(&NormId::L1plusLinf, &shape(), 5, 20).unwrap();
    assert!(e.c_lower <= 1.0 + 1e-12 && e.c_upper <= 1.0 + 1e-12, "{e:?}");
}

#[test]
fn majorization_detects_a_larger_operator() {
    let x = random_operator(&shape(), OperatorKind::General, 9).unwrap();
    let big = x.scale_real(1.1);
    assert!(majorization_check(&x, &big).unwrap().holds);
    let r = majorization_check(&big, &x).unwrap();
    assert!(!r.holds && r.worst_margin < 0.0, "{r:?}");
}

#[test]
fn growth_conditions() {
    let exp = OrliczFunction::exp_minus_one();
    assert!(delta2_check(&exp, GrowthRegime::NearZero).passes);
    assert!(!delta2_check(&exp, GrowthRegime::NearInfinity).passes);
    let tlog = OrliczFunction::t_log_one_plus_t();
    assert!(delta2_check(&tlog, GrowthRegime::NearInfinity).passes);
    assert!(OrliczFunction::power(0.5).is_err());
    assert!(NormId::Orlicz(OrliczFunction::power(2.0).unwrap()).declared_minimal());
    assert!(!NormId::Orlicz(exp).declared_minimal());
}

#[test]
fn norm_names_round_trip() {
    for name in ["L1", "Linf", "L1capLinf", "L1plusLinf", "orlicz:power:2", "orlicz:exp", "orlicz:tlog"] {
        let n: NormId = name.parse().unwrap();
        assert_eq!(n.to_string(), name);
    }
    assert_eq!("R0".parse::<NormId>().unwrap(), NormId::L1plusLinf);
    assert!("L3".parse::<NormId>().is_err());
}
