use serde::{Deserialize, Serialize};

use super::certify::{balanced, entry_weights};
use crate::algebra::{AlgebraShape, Operator};
use crate::error::{Error, Result};
use crate::linalg::{eigh, CMat, C64};

/// Distance from 1 below which an eigenvalue counts as fixed.
pub const FIXED_TOLERANCE: f64 = 1e-9;
/// `(T − P)^m` is examined at `m = 2^GAP_SQUARINGS`.
pub const GAP_SQUARINGS: u32 = 20;

/// `ker(1 − T)` with a `τ`-orthonormal basis and the orthogonal projector.
#[derive(Clone, Debug)]
pub struct FixedSpace {
    shape: AlgebraShape,
    basis: Vec<Operator>,
    /// Superoperator of the projector in the vectorized coordinates.
    projector: CMat,
}

impl FixedSpace {
    pub fn basis(&self) -> &[Operator] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn projector(&self) -> &CMat {
        &self.projector
    }

    /// `τ`-orthogonal projection of `x` onto the fixed space.
    pub fn project(&self, x: &Operator) -> Result<Operator> {
        if x.shape() != &self.shape {
            return Err(Error::mismatch(&self.shape, x.shape()));
        }
        Operator::from_vec(&self.shape, &self.projector.matvec(&x.to_vec()))
    }
}

/// Whether the only unimodular eigenvalue of `T` is 1, judged from the decay
/// of `(T − P)^m` in Frobenius norm of the balanced superoperator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapDiagnostic {
    pub power: u64,
    /// `‖(T − P)^power‖_F`.
    pub residual: f64,
    /// Spectral radius of `T − P`, estimated from the last power that did not
    /// underflow.
    pub radius_estimate: f64,
    /// `residual ≤ 0.5`.
    pub peripheral_trivial: bool,
}

/// For a contraction on `L₂(τ)`, `Tv = v` iff `Re⟨Tv, v⟩ = ‖v‖²`, so the
/// fixed space is the top eigenspace of the Hermitian part of the balanced
/// superoperator.
pub(crate) fn fixed_space(shape: &AlgebraShape, m: &CMat) -> Result<FixedSpace> {
    let b = balanced(shape, m);
    let h = b.add(&b.adjoint()).scale(C64::new(0.5, 0.0)).hermitian_part();
    let e = eigh(&h)?;
    let keep: Vec<usize> = (0..e.values.len())
        .filter(|&i| (e.values[i] - 1.0).abs() <= FIXED_TOLERANCE)
        .collect();
    let w = entry_weights(shape);
    let n = m.dim();
    let mut basis = Vec::with_capacity(keep.len());
    for &c in &keep {
        let v: Vec<C64> = (0..n).map(|i| e.vectors[(i, c)] / w[i].sqrt()).collect();
        basis.push(Operator::from_vec(shape, &v)?);
    }
    let coeffs: Vec<(usize, f64)> = keep.iter().map(|&c| (c, 1.0)).collect();
    let p_bal = CMat::weighted_outer_sum(&e.vectors, &coeffs);
    let projector = CMat::from_fn(n, |i, j| p_bal[(i, j)] * (w[j] / w[i]).sqrt());
    Ok(FixedSpace { shape: shape.clone(), basis, projector })
}

pub(crate) fn gap_diagnostic(shape: &AlgebraShape, m: &CMat, fixed: &FixedSpace) -> GapDiagnostic {
    let w = entry_weights(shape);
    let p_bal = CMat::from_fn(m.dim(), |i, j| fixed.projector[(i, j)] * (w[i] / w[j]).sqrt());
    let mut q = balanced(shape, m).sub(&p_bal);
    let mut radius = q.frobenius_norm();
    let mut power = 1u64;
    for j in 1..=GAP_SQUARINGS {
        q = q.matmul(&q);
        power *= 2;
        let f = q.frobenius_norm();
        if f > 1e-200 && f.is_finite() {
            radius = f.powf(0.5f64.powi(j as i32));
        } else if f <= 1e-200 {
            // already negligible; further squaring only underflows
            break;
        }
    }
    let residual = q.frobenius_norm();
    GapDiagnostic {
        power,
        residual,
        radius_estimate: radius,
        peripheral_trivial: residual <= 0.5,
    }
}
