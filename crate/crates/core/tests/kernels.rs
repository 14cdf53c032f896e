use ncerg::algebra::{random_operator, random_unitary, AlgebraShape, Operator, OperatorKind};
use ncerg::kernels::random::{random_kernel, KernelFamily};
use ncerg::kernels::{AutomorphismTerm, CombineMode, KernelRep, Recipe};
use ncerg::linalg::C64;

fn shape() -> AlgebraShape {
    AlgebraShape::new([(2, 1.0), (2, 1.0), (3, 0.5)]).unwrap()
}

#[test]
fn identity_and_pinching_fixed_spaces() {
    let s = shape();
    assert_eq!(KernelRep::identity(&s).fixed_space().unwrap().dim(), 4 + 4 + 9);
    // full pinching fixes the diagonal
    assert_eq!(KernelRep::full_pinch(&s).fixed_space().unwrap().dim(), 2 + 2 + 3);
}

#[test]
fn pinching_is_idempotent_and_trace_preserving() {
    let s = shape();
    let p = KernelRep::full_pinch(&s);
    let x = random_operator(&s, OperatorKind::General, 1).unwrap();
    let px = p.apply(&x).unwrap();
    assert!(p.apply(&px).unwrap().sub(&px).unwrap().max_abs() < 1e-15);
    assert!((px.trace() - x.trace()).norm() < 1e-12);
}

#[test]
fn cyclic_shift_has_a_nontrivial_peripheral_spectrum() {
    let s = AlgebraShape::diagonal(&[1.0; 4]).unwrap();
    let k = KernelRep::cyclic_shift(&s).unwrap();
    assert!(k.certify().passed());
    assert!(!k.spectral_gap().unwrap().peripheral_trivial);
    assert_eq!(k.fixed_space().unwrap().dim(), 1);
}

#[test]
fn conjugation_preserves_certification_and_fixed_dimension() {
    let s = shape();
    let k = random_kernel(&s, KernelFamily::Convex, 4).unwrap();
    let u = random_unitary(&s, 5);
    let c = k.conjugate(&u).unwrap();
    assert!(c.certify().passed());
    assert_eq!(c.fixed_space().unwrap().dim(), k.fixed_space().unwrap().dim());
    let x = random_operator(&s, OperatorKind::General, 6).unwrap();
    let lhs = c.apply(&x).unwrap();
    let rhs = u.mul(&k.apply(&u.adjoint().mul(&x).unwrap().mul(&u).unwrap()).unwrap()).unwrap().mul(&u.adjoint()).unwrap();
    assert!(lhs.sub(&rhs).unwrap().max_abs() < 1e-12);
}

#[test]
fn json_recipes_rebuild_bit_identical_kernels() {
    let s = shape();
    for fam in KernelFamily::applicable(&s) {
        let k = random_kernel(&s, fam, 9).unwrap();
        let back = KernelRep::from_json(&k.to_json().unwrap()).unwrap();
        assert_eq!(back.superoperator(), k.superoperator(), "{fam:?}");
        assert_eq!(back.recipe(), k.recipe());
    }
}

#[test]
fn invalid_recipes_are_rejected() {
    let s = shape();
    assert!(KernelRep::from_markov(&AlgebraShape::diagonal(&[1.0, 1.0]).unwrap(), vec![vec![1.0]]).is_err());
    let bad = Operator::identity(&s).scale_real(2.0);
    let term = AutomorphismTerm { weight: 1.0, unitary: bad, block_map: None };
    assert!(KernelRep::from_automorphisms(&s, vec![term]).is_err());
    assert!(KernelRep::combine(&[], CombineMode::Compose).is_err());
    assert!(KernelRep::from_recipe(&s, Recipe::Raw).is_err());
}

#[test]
fn scaling_breaks_the_contraction_checks() {
    let s = shape();
    let k = KernelRep::full_pinch(&s);
    let half = KernelRep::from_superoperator(&s, k.superoperator().scale(C64::new(0.5, 0.0))).unwrap();
    assert!(half.certify().passed());
    let neg = KernelRep::from_superoperator(&s, k.superoperator().scale(C64::new(-1.0, 0.0))).unwrap();
    assert!(neg.certify().failed_checks().contains(&"choi"));
}
