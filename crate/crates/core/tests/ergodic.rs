use ncerg::algebra::{random_operator, random_unitary, AlgebraShape, Operator, OperatorKind};
use ncerg::ergodic::{
    cesaro, cesaro_direct, dsae_check, geometric_schedule, maximal_projection, mean_limit, replicate_prop1,
    replicate_theorem, ProjectionWitness, ReplicationReport,
};
use ncerg::kernels::random::{random_kernel, KernelFamily};
use ncerg::kernels::KernelRep;
use ncerg::linalg::svd;
use ncerg::Error;

fn shape() -> AlgebraShape {
    AlgebraShape::new([(3, 1.0), (2, 0.5)]).unwrap()
}

fn opnorm(x: &Operator) -> f64 {
    x.blocks().iter().map(|b| svd(b).unwrap().sigma[0]).fold(0.0, f64::max)
}

#[test]
fn recurrence_matches_the_direct_sum() {
    let s = shape();
    let k = random_kernel(&s, KernelFamily::UnitaryMixture, 1).unwrap();
    let x = random_operator(&s, OperatorKind::General, 2).unwrap();
    let t = cesaro(&k, &x, &[1, 3, 10, 37]).unwrap();
    for &(n, ref avg) in t.points() {
        let d = cesaro_direct(&k, &x, n).unwrap();
        assert!(avg.sub(&d).unwrap().max_abs() < 1e-12, "n = {n}");
    }
    assert_eq!(t.average(1).unwrap(), &x);
}

#[test]
fn pinching_averages_are_exact() {
    // s_n = (x + (n − 1) P x) / n for an idempotent P
    let s = shape();
    let p = KernelRep::full_pinch(&s);
    let x = random_operator(&s, OperatorKind::General, 3).unwrap();
    let px = mean_limit(&p, &x).unwrap();
    let t = cesaro(&p, &x, &[16]).unwrap();
    let want = x.add(&px.scale_real(15.0)).unwrap().scale_real(1.0 / 16.0);
    assert!(t.last().1.sub(&want).unwrap().max_abs() < 1e-14);
}

#[test]
fn averages_are_stable_under_conjugation() {
    let s = shape();
    let k = random_kernel(&s, KernelFamily::Convex, 4).unwrap();
    let u = random_unitary(&s, 5);
    let ku = k.conjugate(&u).unwrap();
    let x = random_operator(&s, OperatorKind::General, 6).unwrap();
    let ux = u.mul(&x).unwrap().mul(&u.adjoint()).unwrap();
    let sched = geometric_schedule(12);
    let a = cesaro(&k, &x, &sched).unwrap();
    let b = cesaro(&ku, &ux, &sched).unwrap();
    for ((_, sa), (_, sb)) in a.points().iter().zip(b.points()) {
        let back = u.adjoint().mul(sb).unwrap().mul(&u).unwrap();
        assert!(back.sub(sa).unwrap().max_abs() < 1e-8);
    }
}

#[test]
fn valid_witnesses_are_sound() {
    let s = AlgebraShape::new([(3, 1.0), (2, 0.01)]).unwrap();
    for seed in 0..6 {
        let k = random_kernel(&s, KernelFamily::Convex, seed).unwrap();
        let x = random_operator(&s, OperatorKind::General, 50 + seed).unwrap();
        let sched: Vec<u64> = geometric_schedule(12).into_iter().filter(|&l| l >= 32).collect();
        let avgs = cesaro(&k, &x, &sched).unwrap().averages();
        let lim = mean_limit(&k, &x).unwrap();
        let w = dsae_check(&avgs, &lim, 0.05, 0.2).unwrap();
        if !w.valid {
            continue;
        }
        let e = &w.projection;
        assert!(e.defect() < 0.05);
        for a in &avgs {
            let c = e.compress(&a.sub(&lim).unwrap()).unwrap();
            assert!(opnorm(&c) <= 0.2 * (1.0 + 1e-12));
        }
        w.audit(&ProjectionWitness::differences(&avgs, &lim).unwrap()).unwrap();
    }
}

#[test]
fn tampered_witness_fails_its_audit() {
    let s = shape();
    let xs: Vec<Operator> = (1..5).map(|n| Operator::identity(&s).scale_real(1.0 / n as f64)).collect();
    let zero = Operator::zeros(&s);
    let mut w = dsae_check(&xs, &zero, 0.4, 2.0).unwrap();
    assert!(w.valid);
    w.achieved_bound *= 0.5;
    assert!(w.audit(&ProjectionWitness::differences(&xs, &zero).unwrap()).is_err());
}

#[test]
fn maximal_projection_respects_its_estimate() {
    let s = shape();
    let k = KernelRep::full_pinch(&s);
    let y = random_operator(&s, OperatorKind::Psd, 7).unwrap().scale_real(3.0);
    let w = maximal_projection(&k, &y, 0.3, &geometric_schedule(6)).unwrap();
    assert!(w.valid);
    assert!(w.defect <= w.budget * (1.0 + 1e-9));
    assert!(maximal_projection(&k, &random_operator(&s, OperatorKind::Hermitian, 8).unwrap(), 0.3, &[1, 2]).is_err());
}

#[test]
fn prop1_report_survives_serialization() {
    let s = shape();
    let k = random_kernel(&s, KernelFamily::Pinching, 9).unwrap();
    let x = random_operator(&s, OperatorKind::General, 10).unwrap();
    let r = replicate_prop1(&k, &x, 5, 1e-9).unwrap();
    assert!(r.passed());
    let back = ReplicationReport::from_json(&r.to_json().unwrap()).unwrap();
    assert_eq!(back, r);
    back.audit().unwrap();
    assert!(r.to_csv().unwrap().starts_with("n,check,budget,achieved,verdict"));
}

#[test]
fn prop1_audit_catches_a_changed_piece() {
    let s = shape();
    let k = KernelRep::full_pinch(&s);
    let x = random_operator(&s, OperatorKind::General, 11).unwrap();
    let mut r = replicate_prop1(&k, &x, 3, 1e-9).unwrap();
    let piece = r.levels[1].pieces.get_mut("x1").unwrap();
    *piece = piece.scale_real(1.0 + 1e-6);
    assert!(r.audit().is_err());
}

#[test]
fn theorem_refuses_small_algebras() {
    let s = shape();
    let k = KernelRep::full_pinch(&s);
    let x = random_operator(&s, OperatorKind::General, 12).unwrap();
    match replicate_theorem(&k, &x, 2, 1e-9) {
        Err(Error::InfeasibleBudget { step, .. }) => assert_eq!(step, "trace"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn theorem_levels_nest_their_projections() {
    let s = AlgebraShape::new([(3, 16384.0), (2, 2f64.powi(-30))]).unwrap();
    let k = random_kernel(&s, KernelFamily::Pinching, 13).unwrap();
    let x = random_operator(&s, OperatorKind::General, 14).unwrap();
    let r = replicate_theorem(&k, &x, 3, 1e-9).unwrap();
    assert!(r.passed(), "{:?}", r.first_failure());
    for w in r.levels.windows(2) {
        let (a, b) = (&w[0].projections["E2n"], &w[1].projections["E2n"]);
        assert!(a.order_gap(b).unwrap() < 1e-9);
    }
}
