use serde::{Deserialize, Serialize};

use super::step::mu;
use crate::algebra::Operator;
use crate::error::{Error, Result};

/// Relative tolerance on the partial-integral inequality.
pub const MAJORIZATION_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MajorizationReport {
    pub holds: bool,
    /// `min_s (∫₀ˢ μ(y) − ∫₀ˢ μ(x))` over all breakpoints, including `s = 0`.
    pub worst_margin: f64,
}

/// Submajorization `x ≺≺ y`: `∫₀ˢ μ_t(x) dt ≤ ∫₀ˢ μ_t(y) dt` for all `s`.
///
/// Both sides are piecewise linear in `s`, so it suffices to test the union
/// of breakpoints plus `s = ∞`.
pub fn majorization_check(x: &Operator, y: &Operator) -> Result<MajorizationReport> {
    if x.shape() != y.shape() {
        return Err(Error::mismatch(x.shape(), y.shape()));
    }
    let (mx, my) = (mu(x)?, mu(y)?);
    let mut points = vec![0.0];
    points.extend(mx.breakpoints());
    points.extend(my.breakpoints());
    let mut worst = 0.0f64;
    for s in points {
        worst = worst.min(my.integral_to(s) - mx.integral_to(s));
    }
    worst = worst.min(my.integral() - mx.integral());
    let scale = 1.0 + mx.integral().max(my.integral());
    Ok(MajorizationReport { holds: worst >= -MAJORIZATION_TOLERANCE * scale, worst_margin: worst })
}
