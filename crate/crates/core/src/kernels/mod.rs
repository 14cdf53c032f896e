//! Positive Dunford–Schwartz kernels as dense superoperators.
//!
//! An operator is vectorized block by block, each block row-major (the order
//! of [`Operator::to_vec`]); a kernel is the `D × D` matrix acting on that
//! vector, `D = Σ dim_k²`.

mod certify;
mod fixed;
pub mod random;
mod recipe;

use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

pub use certify::{Certification, Verdict, CERTIFY_TOLERANCE};
pub use fixed::{FixedSpace, GapDiagnostic, FIXED_TOLERANCE, GAP_SQUARINGS};
pub use recipe::{AutomorphismTerm, Recipe, PSD_TOLERANCE, UNITARY_TOLERANCE, WEIGHT_TOLERANCE};

use crate::algebra::{AlgebraShape, Operator};
use crate::error::{Error, Result};
use crate::linalg::CMat;

#[derive(Clone, Debug, PartialEq)]
pub enum CombineMode {
    /// `kernels[0] ∘ kernels[1] ∘ …`.
    Compose,
    Convex(Vec<f64>),
}

/// A kernel on a fixed shape. Immutable; certification and the fixed space
/// are computed once on first use.
#[derive(Clone, Debug)]
pub struct KernelRep {
    shape: AlgebraShape,
    matrix: Arc<CMat>,
    recipe: Recipe,
    cert: Arc<OnceLock<Certification>>,
    fixed: Arc<OnceLock<std::result::Result<FixedSpace, String>>>,
}

#[derive(Serialize, Deserialize)]
struct KernelJson {
    shape: AlgebraShape,
    recipe: Recipe,
}

impl KernelRep {
    fn assemble(shape: &AlgebraShape, matrix: CMat, recipe: Recipe) -> Self {
        Self {
            shape: shape.clone(),
            matrix: Arc::new(matrix),
            recipe,
            cert: Arc::default(),
            fixed: Arc::default(),
        }
    }

    pub fn from_recipe(shape: &AlgebraShape, recipe: Recipe) -> Result<Self> {
        let m = recipe.build(shape)?;
        Ok(Self::assemble(shape, m, recipe))
    }

    pub fn identity(shape: &AlgebraShape) -> Self {
        Self::assemble(shape, CMat::identity(shape.vec_dim()), Recipe::Identity)
    }

    /// `Σ wᵢ αᵢ` for automorphisms `αᵢ(x) = uᵢ πᵢ(x) uᵢ*`.
    pub fn from_automorphisms(shape: &AlgebraShape, terms: Vec<AutomorphismTerm>) -> Result<Self> {
        Self::from_recipe(shape, Recipe::Automorphisms { terms })
    }

    /// `x ↦ Σ wᵢ uᵢ x uᵢ*` for block-diagonal unitaries.
    pub fn from_unitary_mixture(weights: &[f64], unitaries: &[Operator]) -> Result<Self> {
        let shape = unitaries
            .first()
            .ok_or_else(|| Error::InvalidKernel("empty unitary mixture".into()))?
            .shape()
            .clone();
        if weights.len() != unitaries.len() {
            return Err(Error::InvalidKernel(format!(
                "{} weights for {} unitaries",
                weights.len(),
                unitaries.len()
            )));
        }
        let terms = weights
            .iter()
            .zip(unitaries)
            .map(|(&weight, u)| AutomorphismTerm { weight, unitary: u.clone(), block_map: None })
            .collect();
        Self::from_automorphisms(&shape, terms)
    }

    /// Block `k` moves to block `k + 1 (mod N)`; all blocks must share
    /// dimension and weight.
    pub fn cyclic_shift(shape: &AlgebraShape) -> Result<Self> {
        let n = shape.num_blocks();
        let term = AutomorphismTerm {
            weight: 1.0,
            unitary: Operator::identity(shape),
            block_map: Some((0..n).map(|k| (k + 1) % n).collect()),
        };
        Self::from_automorphisms(shape, vec![term])
    }

    /// Conditional expectation zeroing entries that straddle two cells.
    pub fn from_pinching(shape: &AlgebraShape, partition: Vec<Vec<Vec<usize>>>) -> Result<Self> {
        Self::from_recipe(shape, Recipe::Pinching { partition })
    }

    /// Pinching onto the diagonal.
    pub fn full_pinch(shape: &AlgebraShape) -> Self {
        let partition = shape.dims().map(|d| (0..d).map(|i| vec![i]).collect()).collect();
        Self::from_pinching(shape, partition).expect("singletons partition every block")
    }

    /// `(Tf)ᵢ = Σⱼ Kᵢⱼ fⱼ` on a diagonal shape.
    pub fn from_markov(shape: &AlgebraShape, matrix: Vec<Vec<f64>>) -> Result<Self> {
        Self::from_recipe(shape, Recipe::Markov { matrix })
    }

    /// Entrywise multiplication `x ↦ m ∘ x` on a single block.
    pub fn from_schur(shape: &AlgebraShape, multiplier: CMat) -> Result<Self> {
        Self::from_recipe(shape, Recipe::Schur { multiplier })
    }

    /// Composition or convex combination. When every input certifies, the
    /// output is certified too (checked, not assumed).
    pub fn combine(kernels: &[KernelRep], mode: CombineMode) -> Result<Self> {
        let first = kernels
            .first()
            .ok_or_else(|| Error::InvalidKernel("combine of no kernels".into()))?;
        let shape = first.shape.clone();
        if let Some(k) = kernels.iter().find(|k| k.shape != shape) {
            return Err(Error::mismatch(&shape, &k.shape));
        }
        let recipes: Vec<Recipe> = kernels.iter().map(|k| k.recipe.clone()).collect();
        let (matrix, recipe) = match mode {
            CombineMode::Compose => {
                let mut m = (*first.matrix).clone();
                for k in &kernels[1..] {
                    m = m.matmul(&k.matrix);
                }
                (m, Recipe::Compose { kernels: recipes })
            }
            CombineMode::Convex(weights) => {
                recipe::check_probabilities(&weights, kernels.len())?;
                let mut m = CMat::zeros(shape.vec_dim());
                for (w, k) in weights.iter().zip(kernels) {
                    m = m.add(&k.matrix.scale((*w).into()));
                }
                (m, Recipe::Convex { weights, kernels: recipes })
            }
        };
        let recipe = if recipe.is_raw() { Recipe::Raw } else { recipe };
        let out = Self::assemble(&shape, matrix, recipe);
        if kernels.iter().all(|k| k.certify().passed()) && !out.certify().passed() {
            return Err(Error::InvalidKernel(format!(
                "combination of certified kernels failed certification: {:?}",
                out.certify().failed_checks()
            )));
        }
        Ok(out)
    }

    /// Wraps an arbitrary superoperator (used for adversarial checks).
    pub fn from_superoperator(shape: &AlgebraShape, matrix: CMat) -> Result<Self> {
        if matrix.dim() != shape.vec_dim() {
            return Err(Error::InvalidKernel(format!(
                "superoperator is {}×{0}, shape {shape} needs {}",
                matrix.dim(),
                shape.vec_dim()
            )));
        }
        if !matrix.is_finite() {
            return Err(Error::NonFinite("superoperator".into()));
        }
        Ok(Self::assemble(shape, matrix, Recipe::Raw))
    }

    /// `x ↦ u T(u* x u) u*`.
    pub fn conjugate(&self, u: &Operator) -> Result<Self> {
        let ad = |v: &Operator| {
            KernelRep::from_automorphisms(
                &self.shape,
                vec![AutomorphismTerm { weight: 1.0, unitary: v.clone(), block_map: None }],
            )
        };
        KernelRep::combine(&[ad(u)?, self.clone(), ad(&u.adjoint())?], CombineMode::Compose)
    }

    pub fn shape(&self) -> &AlgebraShape {
        &self.shape
    }

    pub fn recipe(&self) -> &Recipe {
        &self.recipe
    }

    pub fn superoperator(&self) -> &CMat {
        &self.matrix
    }

    pub fn apply(&self, x: &Operator) -> Result<Operator> {
        if x.shape() != &self.shape {
            return Err(Error::mismatch(&self.shape, x.shape()));
        }
        Operator::from_vec(&self.shape, &self.matrix.matvec(&x.to_vec()))
    }

    /// The trace adjoint `T†`, `τ(T(x) y*) = τ(x T†(y)*)`.
    pub fn apply_adjoint(&self, y: &Operator) -> Result<Operator> {
        if y.shape() != &self.shape {
            return Err(Error::mismatch(&self.shape, y.shape()));
        }
        let adj = certify::trace_adjoint(&self.shape, &self.matrix);
        Operator::from_vec(&self.shape, &adj.matvec(&y.to_vec()))
    }

    pub fn certify(&self) -> &Certification {
        self.cert.get_or_init(|| certify::certify(&self.shape, &self.matrix))
    }

    /// `Err(Uncertified)` naming the failed checks.
    pub fn require_certified(&self) -> Result<()> {
        let c = self.certify();
        if c.passed() {
            Ok(())
        } else {
            Err(Error::Uncertified(c.failed_checks().join(", ")))
        }
    }

    pub fn fixed_space(&self) -> Result<&FixedSpace> {
        self.require_certified()?;
        self.fixed
            .get_or_init(|| fixed::fixed_space(&self.shape, &self.matrix).map_err(|e| e.to_string()))
            .as_ref()
            .map_err(|e| Error::InvalidKernel(format!("fixed space: {e}")))
    }

    pub fn spectral_gap(&self) -> Result<GapDiagnostic> {
        let f = self.fixed_space()?;
        Ok(fixed::gap_diagnostic(&self.shape, &self.matrix, f))
    }

    /// `{"shape": …, "recipe": …}`; raw superoperators are refused.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&self.to_json_value()?)?)
    }

    pub fn to_json_value(&self) -> Result<serde_json::Value> {
        if self.recipe.is_raw() {
            return Err(Error::RawKernel);
        }
        Ok(serde_json::to_value(KernelJson { shape: self.shape.clone(), recipe: self.recipe.clone() })?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let k: KernelJson = serde_json::from_str(text)?;
        Self::from_recipe(&k.shape, k.recipe)
    }

    pub fn from_json_value(v: serde_json::Value) -> Result<Self> {
        let k: KernelJson = serde_json::from_value(v)?;
        Self::from_recipe(&k.shape, k.recipe)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{random_operator, random_unitary, OperatorKind};
    use crate::linalg::C64;

    fn mixed() -> AlgebraShape {
        AlgebraShape::new([(2, 0.5), (3, 2.0), (2, 0.5)]).unwrap()
    }

    #[test]
    fn identity_certifies_with_zero_defects() {
        let k = KernelRep::identity(&mixed());
        let c = k.certify();
        assert!(c.passed());
        assert_eq!(c.unital_defect.abs(), 0.0);
        assert!(c.subtrace_defect.abs() < 1e-15);
        assert!((c.l2_opnorm - 1.0).abs() < 1e-12);
        assert!(c.choi_min_eig.abs() < 1e-12);
    }

    #[test]
    fn doubling_fails_subtrace_and_unital() {
        let s = mixed();
        let m = CMat::identity(s.vec_dim()).scale(C64::new(2.0, 0.0));
        let k = KernelRep::from_superoperator(&s, m).unwrap();
        let c = k.certify();
        assert!((c.subtrace_defect - 1.0).abs() < 1e-12);
        assert_eq!(c.failed_checks(), vec!["unital", "subtrace"]);
        assert!(k.to_json().is_err());
        assert!(k.fixed_space().is_err());
    }

    #[test]
    fn unitary_mixture_round_trip() {
        let s = mixed();
        let us = [random_unitary(&s, 1), random_unitary(&s, 2)];
        let k = KernelRep::from_unitary_mixture(&[0.3, 0.7], &us).unwrap();
        assert!(k.certify().passed());
        let t1 = k.apply(&Operator::identity(&s)).unwrap();
        assert!(t1.sub(&Operator::identity(&s)).unwrap().max_abs() < 1e-14);
        let back = KernelRep::from_json(&k.to_json().unwrap()).unwrap();
        assert_eq!(back.superoperator(), k.superoperator());
        let x = random_operator(&s, OperatorKind::General, 3).unwrap();
        let direct = us[0]
            .mul(&x)
            .unwrap()
            .mul(&us[0].adjoint())
            .unwrap()
            .scale_real(0.3)
            .add(&us[1].mul(&x).unwrap().mul(&us[1].adjoint()).unwrap().scale_real(0.7))
            .unwrap();
        assert!(k.apply(&x).unwrap().sub(&direct).unwrap().max_abs() < 1e-13);
    }

    #[test]
    fn block_map_must_respect_weights() {
        let s = mixed();
        let term = |map: Vec<usize>| AutomorphismTerm {
            weight: 1.0,
            unitary: Operator::identity(&s),
            block_map: Some(map),
        };
        assert!(KernelRep::from_automorphisms(&s, vec![term(vec![2, 1, 0])]).is_ok());
        assert!(KernelRep::from_automorphisms(&s, vec![term(vec![1, 0, 2])]).is_err());
        assert!(KernelRep::from_automorphisms(&s, vec![term(vec![0, 0, 2])]).is_err());
    }

    #[test]
    fn shift_on_diagonal_shape() {
        let s = AlgebraShape::diagonal(&[1.0; 4]).unwrap();
        let k = KernelRep::cyclic_shift(&s).unwrap();
        let x = Operator::from_real_diagonal(&s, &[1.0, 2.0, 3.0, 4.0]).unwrap();
        let y = k.apply(&x).unwrap();
        assert_eq!(y, Operator::from_real_diagonal(&s, &[4.0, 1.0, 2.0, 3.0]).unwrap());
        assert_eq!(k.fixed_space().unwrap().dim(), 1);
        assert!(!k.spectral_gap().unwrap().peripheral_trivial);
    }

    #[test]
    fn pinching_and_fixed_space() {
        let s = AlgebraShape::single(3, 1.0).unwrap();
        let p = KernelRep::full_pinch(&s);
        let x = random_operator(&s, OperatorKind::General, 4).unwrap();
        let px = p.apply(&x).unwrap();
        assert_eq!(p.apply(&px).unwrap(), px);
        let f = p.fixed_space().unwrap();
        assert_eq!(f.dim(), 3);
        assert!(f.project(&x).unwrap().sub(&px).unwrap().max_abs() < 1e-12);
        assert!(p.spectral_gap().unwrap().peripheral_trivial);
        let triv = KernelRep::from_pinching(&s, vec![vec![vec![0, 1, 2]]]).unwrap();
        assert_eq!(triv.superoperator(), &CMat::identity(9));
        assert!(KernelRep::from_pinching(&s, vec![vec![vec![0, 1]]]).is_err());
        assert!(KernelRep::from_pinching(&s, vec![vec![vec![0, 1], vec![1, 2]]]).is_err());
    }

    #[test]
    fn markov_conditions() {
        let s = AlgebraShape::diagonal(&[1.0, 1.0, 1.0]).unwrap();
        let ds = vec![vec![0.5, 0.5, 0.0], vec![0.0, 0.5, 0.5], vec![0.5, 0.0, 0.5]];
        let k = KernelRep::from_markov(&s, ds).unwrap();
        assert!(k.certify().passed());
        assert_eq!(k.fixed_space().unwrap().dim(), 1);
        let bad_row = vec![vec![0.7, 0.5, 0.0], vec![0.0, 0.5, 0.5], vec![0.3, 0.0, 0.5]];
        let err = KernelRep::from_markov(&s, bad_row).unwrap_err().to_string();
        assert!(err.contains("row 0"), "{err}");
        let bad_col = vec![vec![1.0, 0.0, 0.0], vec![1.0, 0.0, 0.0], vec![0.0, 0.0, 1.0]];
        let err = KernelRep::from_markov(&s, bad_col).unwrap_err().to_string();
        assert!(err.contains("column 0"), "{err}");
        assert!(KernelRep::from_markov(&mixed(), vec![]).is_err());
    }

    #[test]
    fn schur_examples() {
        let s = AlgebraShape::single(3, 0.5).unwrap();
        let ones = CMat::from_fn(3, |_, _| C64::new(1.0, 0.0));
        assert_eq!(KernelRep::from_schur(&s, ones).unwrap().superoperator(), &CMat::identity(9));
        let id = KernelRep::from_schur(&s, CMat::identity(3)).unwrap();
        assert_eq!(id.superoperator(), KernelRep::full_pinch(&s).superoperator());
        let neg = CMat::from_fn(3, |i, j| C64::new(if i == j { 1.0 } else { -0.9 }, 0.0));
        assert!(matches!(KernelRep::from_schur(&s, neg), Err(Error::NotPositive { .. })));
        assert!(KernelRep::from_schur(&s, CMat::identity(3).scale(C64::new(1.5, 0.0))).is_err());
    }

    #[test]
    fn combine_examples() {
        let s = mixed();
        let t = KernelRep::from_unitary_mixture(&[1.0], &[random_unitary(&s, 9)]).unwrap();
        let id = KernelRep::identity(&s);
        let c = KernelRep::combine(&[t.clone(), id], CombineMode::Compose).unwrap();
        assert_eq!(c.superoperator(), t.superoperator());
        let v = KernelRep::combine(std::slice::from_ref(&t), CombineMode::Convex(vec![1.0])).unwrap();
        assert_eq!(v.superoperator(), t.superoperator());
        assert!(KernelRep::combine(&[t.clone(), t], CombineMode::Convex(vec![0.5, 0.6])).is_err());
        let other = KernelRep::identity(&AlgebraShape::single(2, 1.0).unwrap());
        assert!(KernelRep::combine(&[other, KernelRep::identity(&s)], CombineMode::Compose).is_err());
    }

    #[test]
    fn adjoint_duality() {
        let s = mixed();
        let k = KernelRep::combine(
            &[
                KernelRep::from_unitary_mixture(&[1.0], &[random_unitary(&s, 5)]).unwrap(),
                KernelRep::full_pinch(&s),
            ],
            CombineMode::Compose,
        )
        .unwrap();
        let x = random_operator(&s, OperatorKind::General, 6).unwrap();
        let y = random_operator(&s, OperatorKind::General, 7).unwrap();
        // τ(T(x) y*) = ⟨T x, y⟩ and τ(x T†(y)*) = ⟨x, T† y⟩
        let lhs = k.apply(&x).unwrap().inner(&y).unwrap();
        let rhs = x.inner(&k.apply_adjoint(&y).unwrap()).unwrap();
        assert!((lhs - rhs).norm() < 1e-12);
    }
}
