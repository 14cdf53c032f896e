//! Randomized probes of the symmetric-norm axioms and of the embeddings
//! `L₁∩L∞ ⊆ L ⊆ L₁+L∞`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::norms::{norm_eval, NormId};
use crate::algebra::random::rng;
use crate::algebra::{random_operator, random_unitary, svd, AlgebraShape, Operator, OperatorKind};
use crate::error::{Error, Result};
use crate::linalg::C64;

/// Relative violation tolerated by [`norm_axiom_suite`].
pub const AXIOM_TOLERANCE: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxiomOutcome {
    pub name: String,
    pub passed: bool,
    pub worst_violation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub norm: NormId,
    pub trials: usize,
    pub axioms: Vec<AxiomOutcome>,
}

impl AxiomReport {
    pub fn all_passed(&self) -> bool {
        self.axioms.iter().all(|a| a.passed)
    }

    pub fn axiom(&self, name: &str) -> Option<&AxiomOutcome> {
        self.axioms.iter().find(|a| a.name == name)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingReport {
    pub norm: NormId,
    pub trials: usize,
    /// `max ‖x‖_{L₁+L∞} / ‖x‖_L` over the sample.
    pub c_lower: f64,
    /// `max ‖x‖_L / ‖x‖_{L₁∩L∞}` over the sample.
    pub c_upper: f64,
}

fn check_trials(trials: usize) -> Result<()> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be ≥ 1".into()));
    }
    Ok(())
}

/// Random element with a random overall magnitude in `[1e−2, 1e2]`.
fn sample(shape: &AlgebraShape, r: &mut impl Rng) -> Result<Operator> {
    let x = random_operator(shape, OperatorKind::General, r.random())?;
    Ok(x.scale_real(10f64.powf(r.random_range(-2.0..2.0))))
}

/// `y = phase(x) · (|x| + Δ)` with `Δ ≥ 0` diagonal in the singular basis of
/// `x`, so `μ(x) ≤ μ(y)` pointwise.
fn dominating(x: &Operator, r: &mut impl Rng) -> Result<Operator> {
    let mut sd = svd(x)?;
    let scale = sd.max_value().max(1e-300);
    for s in sd.sigma.iter_mut().flatten() {
        *s += scale * r.random::<f64>();
    }
    Ok(sd.apply(|s| s))
}

/// Checks homogeneity, the triangle inequality, unitary invariance and
/// symmetry (`μ(x) ≤ μ(y) ⇒ ‖x‖ ≤ ‖y‖`) on `trials` random samples.
///
/// Violations are relative to the size of the quantities compared.
pub fn norm_axiom_suite(n: &NormId, shape: &AlgebraShape, seed: u64, trials: usize) -> Result<AxiomReport> {
    check_trials(trials)?;
    let mut r = rng(seed);
    let mut worst = [0.0f64; 4];
    for t in 0..trials {
        let x = sample(shape, &mut r)?;
        let y = sample(shape, &mut r)?;
        let nx = norm_eval(n, &x)?;
        let ny = norm_eval(n, &y)?;

        let c = if t == 0 {
            C64::new(-2.0, 0.0)
        } else {
            C64::new(r.random_range(-3.0..3.0), r.random_range(-3.0..3.0))
        };
        let lhs = norm_eval(n, &x.scale(c))?;
        let rhs = c.norm() * nx;
        worst[0] = worst[0].max((lhs - rhs).abs() / rhs.max(f64::MIN_POSITIVE));

        let nsum = norm_eval(n, &x.add(&y)?)?;
        worst[1] = worst[1].max((nsum - nx - ny).max(0.0) / (nx + ny));

        let u = random_unitary(shape, r.random());
        let v = random_unitary(shape, r.random());
        let nuxv = norm_eval(n, &u.mul(&x)?.mul(&v)?)?;
        worst[2] = worst[2].max((nuxv - nx).abs() / nx);

        let z = dominating(&x, &mut r)?;
        let nz = norm_eval(n, &z)?;
        worst[3] = worst[3].max((nx - nz).max(0.0) / nz);
    }
    let names = ["homogeneity", "triangle", "unitary_invariance", "symmetry"];
    let axioms = names
        .iter()
        .zip(worst)
        .map(|(name, w)| AxiomOutcome {
            name: name.to_string(),
            passed: w <= AXIOM_TOLERANCE,
            worst_violation: w,
        })
        .collect();
    Ok(AxiomReport { norm: *n, trials, axioms })
}

/// Empirical embedding constants of `n` between `L₁∩L∞` and `L₁+L∞`.
pub fn embedding_probe(n: &NormId, shape: &AlgebraShape, seed: u64, trials: usize) -> Result<EmbeddingReport> {
    check_trials(trials)?;
    let mut r = rng(seed);
    let (mut lower, mut upper) = (0.0f64, 0.0f64);
    for _ in 0..trials {
        let x = sample(shape, &mut r)?;
        let nl = norm_eval(n, &x)?;
        upper = upper.max(nl / norm_eval(&NormId::L1capLinf, &x)?);
        lower = lower.max(norm_eval(&NormId::L1plusLinf, &x)? / nl);
    }
    Ok(EmbeddingReport { norm: *n, trials, c_lower: lower, c_upper: upper })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn l1_axioms_hold() {
        let s = AlgebraShape::new([(3, 0.5), (2, 2.0)]).unwrap();
        let rep = norm_axiom_suite(&NormId::L1, &s, 1, 20).unwrap();
        assert!(rep.all_passed(), "{rep:?}");
        assert_eq!(rep.axioms.len(), 4);
    }

    #[test]
    fn self_embeddings_are_exact() {
        let s = AlgebraShape::new([(2, 0.3), (2, 1.7)]).unwrap();
        let cap = embedding_probe(&NormId::L1capLinf, &s, 2, 10).unwrap();
        assert!((cap.c_upper - 1.0).abs() < 1e-12);
        let sum = embedding_probe(&NormId::L1plusLinf, &s, 2, 10).unwrap();
        assert!((sum.c_lower - 1.0).abs() < 1e-12);
        assert!(embedding_probe(&NormId::L1, &s, 2, 0).is_err());
    }
}
