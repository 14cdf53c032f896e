use ncerg::algebra::{
    eigh, meet_projections, random_operator, random_unitary, spectral_projection, spectral_truncate, svd,
    AlgebraShape, Operator, OperatorKind, Projection,
};
use ncerg::linalg::{CMat, C64};

fn mixed() -> AlgebraShape {
    AlgebraShape::new([(3, 1.0), (2, 0.25), (1, 4.0)]).unwrap()
}

#[test]
fn trace_is_weighted_and_tracial() {
    let s = mixed();
    assert_eq!(s.total_trace(), 3.0 + 0.5 + 4.0);
    assert_eq!(Operator::identity(&s).trace(), C64::new(7.5, 0.0));
    for seed in 0..10 {
        let x = random_operator(&s, OperatorKind::General, seed).unwrap();
        let y = random_operator(&s, OperatorKind::General, seed + 100).unwrap();
        let d = x.mul(&y).unwrap().trace() - y.mul(&x).unwrap().trace();
        assert!(d.norm() < 1e-12, "{d}");
    }
}

#[test]
fn vectorization_round_trips_block_by_block_row_major() {
    let s = AlgebraShape::new([(2, 1.0), (1, 0.5)]).unwrap();
    let b0 = CMat::from_rows(vec![
        vec![C64::new(1.0, 0.0), C64::new(2.0, 0.0)],
        vec![C64::new(3.0, 0.0), C64::new(4.0, 0.0)],
    ])
    .unwrap();
    let b1 = CMat::from_rows(vec![vec![C64::new(5.0, 0.0)]]).unwrap();
    let x = Operator::from_blocks(&s, vec![b0, b1]).unwrap();
    let v: Vec<f64> = x.to_vec().iter().map(|c| c.re).collect();
    assert_eq!(v, [1.0, 2.0, 3.0, 4.0, 5.0]);
    assert_eq!(Operator::from_vec(&s, &x.to_vec()).unwrap(), x);
}

#[test]
fn json_round_trip_is_exact() {
    let x = random_operator(&mixed(), OperatorKind::General, 4).unwrap();
    assert_eq!(Operator::from_json(&x.to_json().unwrap()).unwrap(), x);
}

#[test]
fn spectral_calculus_reconstructs() {
    let s = mixed();
    let h = random_operator(&s, OperatorKind::Hermitian, 2).unwrap();
    let e = eigh(&h).unwrap();
    assert!(e.reconstruct().sub(&h).unwrap().max_abs() < 1e-12);
    let x = random_operator(&s, OperatorKind::General, 3).unwrap();
    assert!(svd(&x).unwrap().apply(|t| t).sub(&x).unwrap().max_abs() < 1e-12);
}

#[test]
fn truncation_splits_at_the_level() {
    let x = random_operator(&mixed(), OperatorKind::General, 6).unwrap();
    let (tall, flat) = spectral_truncate(&x, 0.7).unwrap();
    assert!(tall.add(&flat).unwrap().sub(&x).unwrap().max_abs() < 1e-12);
    assert!(svd(&flat).unwrap().max_value() <= 0.7 + 1e-12);
}

#[test]
fn projections_and_meets() {
    let s = mixed();
    let h = random_operator(&s, OperatorKind::Hermitian, 8).unwrap();
    let p = spectral_projection(&h, 0.0, f64::INFINITY).unwrap();
    let q = spectral_projection(&h, -0.5, 0.5).unwrap();
    let m = meet_projections(&[p.clone(), q.clone()]).unwrap();
    assert!(m.defect() <= p.defect() + q.defect() + 1e-12);
    assert!(m.order_gap(&p).unwrap() < 1e-9 && m.order_gap(&q).unwrap() < 1e-9);
    assert_eq!(Projection::identity(&s).defect(), 0.0);
    assert_eq!(Projection::zero(&s).defect(), s.total_trace());
    let u = random_unitary(&s, 1);
    let uu = u.adjoint().mul(&u).unwrap().sub(&Operator::identity(&s)).unwrap();
    assert!(uu.max_abs() < 1e-12);
}

#[test]
fn malformed_shapes_are_rejected() {
    assert!(AlgebraShape::new([(0, 1.0)]).is_err());
    assert!(AlgebraShape::new([(2, 0.0)]).is_err());
    assert!(AlgebraShape::new([(2, f64::NAN)]).is_err());
    assert!(AlgebraShape::new(Vec::<(usize, f64)>::new()).is_err());
    let a = Operator::identity(&mixed());
    let b = Operator::identity(&AlgebraShape::single(2, 1.0).unwrap());
    assert!(a.add(&b).is_err());
}
