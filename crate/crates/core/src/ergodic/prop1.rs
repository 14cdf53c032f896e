//! Norm convergence of Cesàro averages in `L₁ + L∞`, level by level.
//!
//! At level `n` the element splits as `x = x₁ + x₂` with `‖x₂‖∞ < 2^{−n}`.
//! The averages of `x₁` converge in `L₁`, those of `x₂` stay within
//! `2·2^{−n}` of each other in `L∞`, and together the averages of `x` are
//! `4·2^{−n}`-Cauchy in `L₁ + L∞` from `l(n)` on.

use std::collections::BTreeMap;

use super::cesaro::{check_schedule, default_schedule, mean_limit};
use super::report::{pair_max, pow2, Check, Context, LevelRecord, ReplicationKind, ReplicationReport};
use crate::algebra::{spectral_truncate, Operator};
use crate::error::{Error, Result};
use crate::kernels::KernelRep;
use crate::rearrangement::{norm_eval, NormId};

/// Runs levels `1..=n_max` over the default schedule `1, 2, …, 2^14`.
pub fn replicate_prop1(kernel: &KernelRep, x: &Operator, n_max: u32, tol: f64) -> Result<ReplicationReport> {
    replicate_prop1_with(kernel, x, n_max, tol, &default_schedule())
}

pub fn replicate_prop1_with(
    kernel: &KernelRep,
    x: &Operator,
    n_max: u32,
    tol: f64,
    schedule: &[u64],
) -> Result<ReplicationReport> {
    kernel.require_certified()?;
    check_schedule(schedule)?;
    if n_max == 0 {
        return Err(Error::InvalidArgument("n_max must be ≥ 1".into()));
    }
    if !(tol >= 0.0) {
        return Err(Error::InvalidArgument(format!("tol {tol} must be ≥ 0")));
    }
    if x.shape() != kernel.shape() {
        return Err(Error::mismatch(kernel.shape(), x.shape()));
    }
    let limit = mean_limit(kernel, x)?;
    let gap = kernel.spectral_gap()?;
    let ctx = Context { kernel, x, limit: &limit, schedule, tol };
    let mut levels = Vec::with_capacity(n_max as usize);
    for n in 1..=n_max {
        let (x1, x2) = spectral_truncate(x, pow2(-(n as i32)) / 2.0)?;
        let x1_limit = mean_limit(kernel, &x1)?;
        let dists = ctx
            .averages(&x1, schedule)?
            .iter()
            .map(|s| norm_eval(&NormId::L1, &s.sub(&x1_limit)?))
            .collect::<Result<Vec<f64>>>()?;
        let threshold = pow2(-(n as i32)) / 2.0;
        let first = (0..dists.len()).find(|&i| dists[i..].iter().all(|&d| d < threshold));
        let failure = first.is_none().then(|| {
            format!(
                "schedule exhausted before the L1 threshold {threshold:e}: final distance {:e}, \
                 gap residual {:e} at power {} (peripheral spectrum trivial: {})",
                dists.last().copied().unwrap_or(f64::NAN),
                gap.residual,
                gap.power,
                gap.peripheral_trivial
            )
        });
        let mut level = LevelRecord {
            n,
            l_n: first.map(|i| schedule[i]),
            checks: Vec::new(),
            pieces: BTreeMap::from([("x1".to_string(), x1), ("x2".to_string(), x2)]),
            projections: BTreeMap::new(),
            failure,
        };
        level.checks = evaluate_level(&ctx, &level)?;
        levels.push(level);
    }
    Ok(ReplicationReport {
        kind: ReplicationKind::Prop1,
        kernel: kernel.to_json_value().ok(),
        element: x.clone(),
        limit,
        schedule: schedule.to_vec(),
        n_max,
        tol,
        levels,
        gap,
    })
}

/// Recomputes the checks of one level from its stored pieces.
pub(crate) fn evaluate_level(ctx: &Context<'_>, level: &LevelRecord) -> Result<Vec<Check>> {
    let b = pow2(-(level.n as i32));
    let x1 = level.piece("x1")?;
    let x2 = level.piece("x2")?;
    let linf = |y: &Operator| norm_eval(&NormId::Linf, y);
    let l1 = |y: &Operator| norm_eval(&NormId::L1, y);
    let r0 = |y: &Operator| norm_eval(&NormId::L1plusLinf, y);
    let x_linf = linf(ctx.x)?;
    let mut checks = vec![
        Check::new("x2_linf", linf(x2)?, b, true),
        Check::new("reassembly", linf(&ctx.x.sub(x1)?.sub(x2)?)?, ctx.tol * (1.0 + x_linf), false),
    ];
    let Some(l_n) = level.l_n else {
        return Ok(checks);
    };
    let tail = ctx.tail(l_n);
    let x1_limit = mean_limit(ctx.kernel, x1)?;
    let a1 = ctx.averages(x1, &tail)?;
    let a2 = ctx.averages(x2, &tail)?;
    let ax = ctx.averages(ctx.x, &tail)?;
    let mut to_x1 = 0.0f64;
    for s in &a1 {
        to_x1 = to_x1.max(l1(&s.sub(&x1_limit)?)?);
    }
    let mut to_x = 0.0f64;
    for s in &ax {
        to_x = to_x.max(r0(&s.sub(ctx.limit)?)?);
    }
    checks.push(Check::new("x1_limit_l1", to_x1, b / 2.0, true));
    checks.push(Check::new("x1_cauchy_l1", pair_max(&a1, l1)?, b, true));
    checks.push(Check::new("x2_cauchy_linf", pair_max(&a2, linf)?, 2.0 * b, false));
    checks.push(Check::new("assembled", pair_max(&ax, r0)?, 4.0 * b + ctx.tol, false));
    checks.push(Check::new("to_limit", to_x, 4.0 * b + ctx.tol, false));
    Ok(checks)
}
