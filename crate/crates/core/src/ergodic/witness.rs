//! Projections witnessing bilateral almost-everywhere convergence.
//!
//! Given differences `d_n`, the aggregated defect `h = Σ α_n d_n* d_n` is
//! positive and `‖d_n E‖² ≤ ‖E h E‖ / α_n`, so cutting the top of the
//! spectrum of `h` controls every `‖E d_n E‖∞` at once.

use serde::{Deserialize, Serialize};

use super::cesaro::{cesaro, check_schedule};
use crate::algebra::{eigh, svd, AlgebraShape, Operator, Projection, SpectralDecomposition};
use crate::error::{Error, Result};
use crate::kernels::KernelRep;
use crate::rearrangement::{norm_eval, NormId};

/// Eigenvalues closer than this (relative to the largest) form one group.
pub const GROUP_TOLERANCE: f64 = 1e-12;
/// Relative slack on the Chebyshev estimate, which is attained exactly when
/// a single eigenvalue of a trace-preserving average is excluded.
pub const ESTIMATE_SLACK: f64 = 1e-9;
/// Tolerance on the positivity of the input to [`maximal_projection`].
pub const PSD_INPUT_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessKind {
    /// From [`dsae_check`]: valid iff `defect < budget` and the bound is met.
    Dsae,
    /// From [`maximal_projection`]: valid iff `defect ≤ budget` (the
    /// Chebyshev estimate, up to [`ESTIMATE_SLACK`]) and the bound is met.
    Maximal,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectionWitness {
    pub kind: WitnessKind,
    pub projection: Projection,
    /// `τ(1 − E)`.
    pub defect: f64,
    /// `ε` for d.s.a.e. witnesses, `‖y‖₁ / λ_excluded` for maximal ones.
    pub budget: f64,
    /// Requested uniform bound.
    pub bound: f64,
    /// Largest retained eigenvalue of the aggregated defect.
    pub level: f64,
    /// Aggregation weights `α_n`.
    pub weights: Vec<f64>,
    /// `‖E d_n E‖∞` computed directly.
    pub uniform_norms: Vec<f64>,
    /// `√(level / α_n)`; only meaningful for d.s.a.e. witnesses.
    pub apriori_bounds: Vec<f64>,
    pub achieved_bound: f64,
    pub valid: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

/// Groups of eigenvalues (descending) with their total trace mass.
struct Groups {
    /// `(largest value, smallest value, mass)`.
    groups: Vec<(f64, f64, f64)>,
    zero_tol: f64,
}

fn groups(sd: &SpectralDecomposition) -> Groups {
    let mut vals = sd.weighted_values();
    vals.sort_by(|a, b| b.0.total_cmp(&a.0));
    let top = vals.first().map_or(0.0, |v| v.0).abs();
    let tol = GROUP_TOLERANCE * top.max(f64::MIN_POSITIVE);
    let mut out: Vec<(f64, f64, f64)> = Vec::new();
    for (v, m) in vals {
        match out.last_mut() {
            Some(g) if g.1 - v <= tol => {
                g.1 = v;
                g.2 += m;
            }
            _ => out.push((v, v, m)),
        }
    }
    Groups { groups: out, zero_tol: tol }
}

impl Groups {
    fn is_zero_group(&self, i: usize) -> bool {
        self.groups[i].1 <= self.zero_tol
    }

    /// Projection keeping groups `excluded..`.
    fn keep_from(&self, sd: &SpectralDecomposition, excluded: usize) -> (Projection, f64) {
        match self.groups.get(excluded) {
            Some(&(level, _, _)) => (sd.projection_where(|l| l <= level), level),
            None => (Projection::zero(&sd.shape), 0.0),
        }
    }
}

fn linf(x: &Operator) -> Result<f64> {
    Ok(svd(x)?.max_value())
}

fn dyadic_weights(n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|i| 0.5f64.powi((i as i32 + 1).min(1000))).collect();
    let s: f64 = raw.iter().sum();
    raw.into_iter().map(|v| v / s).collect()
}

fn aggregate(diffs: &[Operator], weights: &[f64], shape: &AlgebraShape) -> Result<Operator> {
    let mut h = Operator::zeros(shape);
    for (d, &a) in diffs.iter().zip(weights) {
        h = h.add(&d.adjoint().mul(d)?.scale_real(a))?;
    }
    // exact Hermitian symmetrization before the eigensolver
    Operator::from_blocks(shape, h.blocks().iter().map(|b| b.hermitian_part()).collect())
}

fn compressed_norms(e: &Projection, diffs: &[Operator]) -> Result<Vec<f64>> {
    diffs.iter().map(|d| linf(&e.compress(d)?)).collect()
}

fn differences(xs: &[Operator], x0: &Operator) -> Result<Vec<Operator>> {
    xs.iter()
        .map(|x| {
            if x.shape() != x0.shape() {
                return Err(Error::mismatch(x0.shape(), x.shape()));
            }
            x.sub(x0)
        })
        .collect()
}

fn finish(mut w: ProjectionWitness) -> ProjectionWitness {
    w.achieved_bound = w.uniform_norms.iter().copied().fold(0.0, f64::max);
    let budget_ok = match w.kind {
        WitnessKind::Dsae => w.defect < w.budget,
        WitnessKind::Maximal => w.defect <= w.budget * (1.0 + ESTIMATE_SLACK),
    };
    let bound_ok = w.achieved_bound <= w.bound;
    w.valid = budget_ok && bound_ok;
    w.failure = match (budget_ok, bound_ok) {
        (true, true) => None,
        (false, _) => Some(format!("defect {:e} exceeds the budget {:e}", w.defect, w.budget)),
        (true, false) => Some(format!(
            "uniform norm {:e} exceeds the bound {:e} within the trace budget {:e}",
            w.achieved_bound, w.bound, w.budget
        )),
    };
    w
}

/// Searches for `E` with `τ(1 − E) < ε` and `‖E(x_n − x₀)E‖∞ ≤ bound` for all
/// `n`, using `α_n ∝ 2^{−n}`.
///
/// Eigenvalue groups of the aggregated defect are cut from the top while the
/// removed trace stays below `ε`; the zero group is never removed. `E` is the
/// spectral projection onto `[0, level]`, `level` the largest retained
/// eigenvalue. When the bound is not met the witness is returned with
/// `valid = false` and a reason.
pub fn dsae_check(xs: &[Operator], x0: &Operator, epsilon: f64, bound: f64) -> Result<ProjectionWitness> {
    let shape = x0.shape();
    if xs.is_empty() {
        return Err(Error::InvalidArgument("dsae_check needs at least one element".into()));
    }
    if !(epsilon > 0.0 && epsilon < shape.total_trace()) {
        return Err(Error::InvalidArgument(format!(
            "epsilon {epsilon} must lie in (0, τ(1) = {})",
            shape.total_trace()
        )));
    }
    if !(bound > 0.0) {
        return Err(Error::InvalidArgument(format!("bound {bound} must be > 0")));
    }
    let diffs = differences(xs, x0)?;
    let weights = dyadic_weights(diffs.len());
    let h = aggregate(&diffs, &weights, shape)?;
    let sd = eigh(&h)?;
    let g = groups(&sd);
    let mut excluded = 0;
    let mut mass = 0.0;
    while excluded < g.groups.len()
        && !g.is_zero_group(excluded)
        && mass + g.groups[excluded].2 < epsilon
    {
        mass += g.groups[excluded].2;
        excluded += 1;
    }
    let (e, level) = g.keep_from(&sd, excluded);
    let uniform_norms = compressed_norms(&e, &diffs)?;
    let apriori_bounds = weights.iter().map(|a| (level.max(0.0) / a).sqrt()).collect();
    Ok(finish(ProjectionWitness {
        kind: WitnessKind::Dsae,
        defect: e.defect(),
        projection: e,
        budget: epsilon,
        bound,
        level,
        weights,
        uniform_norms,
        apriori_bounds,
        achieved_bound: 0.0,
        valid: false,
        failure: None,
    }))
}

/// Finite-dimensional surrogate of the maximal ergodic inequality: the
/// largest spectral cut `E` of `h = mean_l s_l(y)` with
/// `‖E s_l(y) E‖∞ ≤ bound` for every scheduled `l`.
///
/// Cuts are scanned from `E = 1` downward; `E = ker h` always qualifies since
/// every `s_l(y)` is positive. The budget records the Chebyshev estimate
/// `τ(1 − E) ≤ τ(h)/λ ≤ ‖y‖₁/λ`, `λ` the smallest excluded eigenvalue.
pub fn maximal_projection(
    kernel: &KernelRep,
    y: &Operator,
    bound: f64,
    schedule: &[u64],
) -> Result<ProjectionWitness> {
    check_schedule(schedule)?;
    if !(bound > 0.0) {
        return Err(Error::InvalidArgument(format!("bound {bound} must be > 0")));
    }
    let ysd = eigh(y)?;
    if ysd.min_value() < -PSD_INPUT_TOLERANCE * ysd.max_value().abs().max(1.0) {
        return Err(Error::NotPositive { min_eigenvalue: ysd.min_value() });
    }
    let traj = cesaro(kernel, y, schedule)?;
    let averages = traj.averages();
    maximal_from_averages(y, &averages, bound)
}

pub(crate) fn maximal_from_averages(y: &Operator, averages: &[Operator], bound: f64) -> Result<ProjectionWitness> {
    let shape = y.shape();
    let weights = vec![1.0 / averages.len() as f64; averages.len()];
    let mut h = Operator::zeros(shape);
    for (s, &a) in averages.iter().zip(&weights) {
        h = h.add(&s.scale_real(a))?;
    }
    let h = Operator::from_blocks(shape, h.blocks().iter().map(|b| b.hermitian_part()).collect())?;
    let sd = eigh(&h)?;
    let g = groups(&sd);
    let y_l1 = norm_eval(&NormId::L1, y)?;
    let mut excluded = 0;
    loop {
        let (e, level) = g.keep_from(&sd, excluded);
        let uniform_norms = compressed_norms(&e, averages)?;
        let met = uniform_norms.iter().all(|&u| u <= bound);
        let exhausted = excluded >= g.groups.len() || g.is_zero_group(excluded);
        if met || exhausted {
            let budget = if excluded == 0 { 0.0 } else { y_l1 / g.groups[excluded - 1].1 };
            return Ok(finish(ProjectionWitness {
                kind: WitnessKind::Maximal,
                defect: e.defect(),
                projection: e,
                budget,
                bound,
                level,
                apriori_bounds: Vec::new(),
                weights,
                uniform_norms,
                achieved_bound: 0.0,
                valid: false,
                failure: None,
            }));
        }
        excluded += 1;
    }
}

impl ProjectionWitness {
    /// Recomputes every recorded quantity from the stored projection and the
    /// supplied differences (`x_n − x₀`, or the averages for maximal
    /// witnesses) and demands bitwise agreement.
    pub fn audit(&self, diffs: &[Operator]) -> Result<()> {
        let p = Projection::new(self.projection.operator().clone())?;
        if p.ranks() != self.projection.ranks() {
            return Err(Error::InvalidArgument("projection ranks changed on re-validation".into()));
        }
        let same = |item: &str, recorded: f64, recomputed: f64| -> Result<()> {
            if recorded.to_bits() == recomputed.to_bits() {
                Ok(())
            } else {
                Err(Error::AuditMismatch { item: item.into(), recorded, recomputed })
            }
        };
        same("defect", self.defect, p.defect())?;
        if diffs.len() != self.uniform_norms.len() {
            return Err(Error::InvalidArgument(format!(
                "{} differences supplied for {} recorded norms",
                diffs.len(),
                self.uniform_norms.len()
            )));
        }
        let norms = compressed_norms(&p, diffs)?;
        for (i, (&r, &c)) in self.uniform_norms.iter().zip(&norms).enumerate() {
            same(&format!("uniform_norms[{i}]"), r, c)?;
        }
        for (i, (&a, &b)) in self.weights.iter().zip(&self.apriori_bounds).enumerate() {
            same(&format!("apriori_bounds[{i}]"), b, (self.level.max(0.0) / a).sqrt())?;
            if self.kind == WitnessKind::Dsae && norms[i] > b * (1.0 + 1e-9) + 1e-12 {
                return Err(Error::AuditMismatch {
                    item: format!("apriori bound {i} violated"),
                    recorded: b,
                    recomputed: norms[i],
                });
            }
        }
        let again = finish(ProjectionWitness { achieved_bound: 0.0, valid: false, failure: None, ..self.clone() });
        same("achieved_bound", self.achieved_bound, again.achieved_bound)?;
        if again.valid != self.valid {
            return Err(Error::InvalidArgument(format!(
                "recorded validity {} disagrees with recomputed {}",
                self.valid, again.valid
            )));
        }
        Ok(())
    }

    /// Differences `x_n − x₀` in the form [`ProjectionWitness::audit`] expects.
    pub fn differences(xs: &[Operator], x0: &Operator) -> Result<Vec<Operator>> {
        differences(xs, x0)
    }
}
