//! Bilateral almost-everywhere convergence of Cesàro averages, level by level.
//!
//! At level `n` the element is split as `x = x₁₁ + x₁₂ + x₂` where
//! `‖x₂‖∞ < 2^{−4n}`, `x₁₂` is a tail of small `L₁` mass sliced into shells,
//! and `x₁₁` carries the rest. Maximal projections tame the averages of the
//! shells, a d.s.a.e. witness tames those of `x₁₁`, and the meet of all these
//! over the levels `≥ n` is `E(2,n)`.

use std::collections::BTreeMap;

use super::cesaro::{check_schedule, default_schedule, mean_limit};
use super::report::{pair_max, pow2, Check, Context, LevelRecord, ReplicationKind, ReplicationReport};
use super::witness::{dsae_check, maximal_projection};
use crate::algebra::spectral::positive_pieces;
use crate::algebra::{meet_projections, spectral_truncate, svd, Operator, Projection};
use crate::error::{Error, Result};
use crate::kernels::KernelRep;
use crate::linalg::CMat;
use crate::rearrangement::{norm_eval, NormId};

/// `x₁₂` collects singular components of total `L₁` mass below
/// `TAIL_FRACTION · 2^{−8n}`, so that it fits in the first shell.
pub const TAIL_FRACTION: f64 = 1.0 / 512.0;
/// Hard stop on the number of shells.
pub const MAX_SHELLS: usize = 64;

/// Runs levels `1..=n_max` over the default schedule `1, 2, …, 2^14`.
pub fn replicate_theorem(kernel: &KernelRep, x: &Operator, n_max: u32, tol: f64) -> Result<ReplicationReport> {
    replicate_theorem_with(kernel, x, n_max, tol, &default_schedule())
}

pub fn replicate_theorem_with(
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
    let total = x.shape().total_trace();
    let need = pow2(4 * n_max as i32);
    if total < need {
        return Err(Error::InfeasibleBudget {
            step: "trace".into(),
            detail: format!("τ(1) = {total} is below 2^(4·{n_max}) = {need}"),
        });
    }
    let limit = mean_limit(kernel, x)?;
    let gap = kernel.spectral_gap()?;
    let ctx = Context { kernel, x, limit: &limit, schedule, tol };
    let stages = (1..=n_max).map(|n| stage_level(&ctx, n)).collect::<Result<Vec<_>>>()?;
    let e2 = tail_meets(&stages.iter().map(|s| (&s.projections["E1n"], &s.projections["En"])).collect::<Vec<_>>())?;
    let mut levels: Vec<LevelRecord> = stages
        .into_iter()
        .zip(e2)
        .map(|(s, e)| {
            let mut projections = s.projections;
            projections.insert("E2n".into(), e);
            LevelRecord {
                n: s.n,
                l_n: s.l_n,
                checks: Vec::new(),
                pieces: s.pieces,
                projections,
                failure: (!s.failures.is_empty()).then(|| s.failures.join("; ")),
            }
        })
        .collect();
    for i in 0..levels.len() {
        let checks = evaluate_level(&ctx, &levels, i)?;
        levels[i].checks = checks;
    }
    Ok(ReplicationReport {
        kind: ReplicationKind::Theorem,
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

/// Everything at one level except `E(2,n)`, which needs the later levels.
struct Stage {
    n: u32,
    l_n: Option<u64>,
    pieces: BTreeMap<String, Operator>,
    projections: BTreeMap<String, Projection>,
    failures: Vec<String>,
}

fn shell_key(k: usize) -> String {
    format!("shell_{k}")
}

fn e1nk_key(k: usize) -> String {
    format!("E1nk_{k}")
}

/// A singular component `σ u_i v_i*` of block `k`, possibly a fraction of it.
#[derive(Clone, Copy)]
struct Component {
    block: usize,
    index: usize,
    sigma: f64,
    weight: f64,
}

fn assemble(x: &Operator, u: &[CMat], v: &[CMat], comps: &[Component]) -> Result<Operator> {
    let mut blocks: Vec<CMat> = x.shape().dims().map(CMat::zeros).collect();
    for c in comps {
        let (uk, vk, m) = (&u[c.block], &v[c.block], &mut blocks[c.block]);
        let d = uk.dim();
        for i in 0..d {
            let ui = uk[(i, c.index)] * c.sigma;
            for j in 0..d {
                m[(i, j)] += ui * vk[(j, c.index)].conj();
            }
        }
    }
    Operator::from_blocks(x.shape(), blocks)
}

/// `x₁ₙ = x₁₁ + x₁₂` and the shells of `x₁₂`.
fn split_tail(x1n: &Operator, n: u32) -> Result<(Operator, Operator, Vec<Operator>)> {
    let sd = svd(x1n)?;
    let mut comps: Vec<Component> = Vec::new();
    for (block, (b, sig)) in x1n.shape().blocks().iter().zip(&sd.sigma).enumerate() {
        for (index, &sigma) in sig.iter().enumerate() {
            if sigma > 0.0 {
                comps.push(Component { block, index, sigma, weight: b.weight });
            }
        }
    }
    comps.sort_by(|a, b| (a.sigma * a.weight).total_cmp(&(b.sigma * b.weight)));
    let budget = TAIL_FRACTION * pow2(-8 * n as i32);
    let mut mass = 0.0;
    let mut tail = Vec::new();
    for c in comps {
        let m = c.sigma * c.weight;
        if mass + m >= budget {
            break;
        }
        mass += m;
        tail.push(c);
    }
    let x12 = assemble(x1n, &sd.u, &sd.v, &tail)?;
    let x11 = x1n.sub(&x12)?;
    // greedy fill of shell k up to half its budget 2^{−8(n+k)}
    let mut shells: Vec<Vec<Component>> = vec![Vec::new()];
    let mut room = pow2(-8 * (n as i32 + 1)) / 2.0;
    for c in &tail {
        let mut left = c.sigma * c.weight;
        while left > 0.0 {
            if room <= 0.0 {
                if shells.len() == MAX_SHELLS {
                    return Err(Error::InfeasibleBudget {
                        step: "shells".into(),
                        detail: format!("x12 at level {n} does not fit in {MAX_SHELLS} shells"),
                    });
                }
                shells.push(Vec::new());
                room = pow2(-8 * (n as i32 + shells.len() as i32)) / 2.0;
            }
            let take = left.min(room);
            shells.last_mut().expect("nonempty").push(Component { sigma: take / c.weight, ..*c });
            left -= take;
            room -= take;
        }
    }
    let mut ops = Vec::with_capacity(shells.len());
    if shells.len() == 1 {
        ops.push(x12.clone());
    } else {
        let mut acc = Operator::zeros(x1n.shape());
        for s in &shells[..shells.len() - 1] {
            let op = assemble(x1n, &sd.u, &sd.v, s)?;
            acc = acc.add(&op)?;
            ops.push(op);
        }
        ops.push(x12.sub(&acc)?);
    }
    Ok((x11, x12, ops))
}

fn stage_level(ctx: &Context<'_>, n: u32) -> Result<Stage> {
    let shape = ctx.x.shape();
    let ni = n as i32;
    let (x1n, x2n) = spectral_truncate(ctx.x, pow2(-4 * ni) / 2.0)?;
    let (x11, x12, shells) = split_tail(&x1n, n)?;
    let mut failures = Vec::new();
    let mut projections = BTreeMap::new();
    let mut e1nk = Vec::with_capacity(shells.len());
    for (i, shell) in shells.iter().enumerate() {
        let k = i + 1;
        let bound = pow2(-4 * (ni + k as i32));
        let mut ps = Vec::with_capacity(4);
        for piece in positive_pieces(shell)? {
            let w = maximal_projection(ctx.kernel, &piece, bound, ctx.schedule)?;
            if let Some(f) = &w.failure {
                failures.push(format!("step E(1,n,{k}): {f}"));
            }
            ps.push(w.projection);
        }
        let e = meet_projections(&ps)?;
        projections.insert(e1nk_key(k), e.clone());
        e1nk.push(e);
    }
    let e1n = if e1nk.is_empty() { Projection::identity(shape) } else { meet_projections(&e1nk)? };
    projections.insert("E1n".into(), e1n);

    let x11_limit = mean_limit(ctx.kernel, &x11)?;
    let avgs = ctx.averages(&x11, ctx.schedule)?;
    let epsilon = pow2(-4 * ni) / 4.0;
    let mut found = None;
    let mut last = None;
    for i in 0..avgs.len() {
        let w = dsae_check(&avgs[i..], &x11_limit, epsilon, pow2(-ni))?;
        if w.valid {
            found = Some((ctx.schedule[i], w.projection));
            break;
        }
        last = Some(w);
    }
    let l_n = found.as_ref().map(|f| f.0);
    let en = match found {
        Some((_, e)) => e,
        None => {
            let w = last.expect("schedule is nonempty");
            failures.push(format!(
                "step E(n): schedule exhausted; last witness: {}",
                w.failure.as_deref().unwrap_or("invalid")
            ));
            w.projection
        }
    };
    projections.insert("En".into(), en);
    if let Some(l) = l_n {
        let ax = ctx.averages(ctx.x, &ctx.tail(l))?;
        let w = dsae_check(&ax, ctx.limit, pow2(-4 * ni), 8.0 * pow2(-ni))?;
        projections.insert("E_limit".into(), w.projection);
    }

    let mut pieces = BTreeMap::from([
        ("x1n".to_string(), x1n),
        ("x2n".to_string(), x2n),
        ("x11n".to_string(), x11),
        ("x12n".to_string(), x12),
    ]);
    for (i, s) in shells.into_iter().enumerate() {
        pieces.insert(shell_key(i + 1), s);
    }
    Ok(Stage { n, l_n, pieces, projections, failures })
}

/// `E(2,n) = ⋀_{n' ≥ n} E(1,n') ∧ E(n')`.
fn tail_meets(per_level: &[(&Projection, &Projection)]) -> Result<Vec<Projection>> {
    (0..per_level.len())
        .map(|i| {
            let ps: Vec<Projection> =
                per_level[i..].iter().flat_map(|(a, b)| [(*a).clone(), (*b).clone()]).collect();
            meet_projections(&ps)
        })
        .collect()
}

fn shell_count(level: &LevelRecord) -> usize {
    (1..).take_while(|&k| level.pieces.contains_key(&shell_key(k))).count()
}

/// Recomputes the checks of level `idx` from the stored operators.
pub(crate) fn evaluate_level(ctx: &Context<'_>, levels: &[LevelRecord], idx: usize) -> Result<Vec<Check>> {
    let level = &levels[idx];
    let ni = level.n as i32;
    let b4 = pow2(-4 * ni);
    let b1 = pow2(-ni);
    let linf = |y: &Operator| norm_eval(&NormId::Linf, y);
    let l1 = |y: &Operator| norm_eval(&NormId::L1, y);
    let (x1n, x2n) = (level.piece("x1n")?, level.piece("x2n")?);
    let (x11, x12) = (level.piece("x11n")?, level.piece("x12n")?);
    let recon = ctx.tol * (1.0 + linf(ctx.x)?);
    let mut checks = vec![
        Check::new("x2n_linf", linf(x2n)?, b4, true),
        Check::new("split_x", linf(&ctx.x.sub(x1n)?.sub(x2n)?)?, recon, false),
        Check::new("split_x1n", linf(&x1n.sub(x11)?.sub(x12)?)?, recon, false),
        Check::new("x12n_l1", l1(x12)?, pow2(-8 * ni), true),
    ];
    let k_max = shell_count(level);
    let mut shell_sum = Operator::zeros(ctx.x.shape());
    let mut t2_bound = 0.0;
    for k in 1..=k_max {
        let ki = k as i32;
        let shell = level.piece(&shell_key(k))?;
        shell_sum = shell_sum.add(shell)?;
        let e = level.projection(&e1nk_key(k))?;
        let bound = pow2(-4 * (ni + ki));
        t2_bound += 8.0 * bound;
        let mut uniform = 0.0f64;
        for piece in positive_pieces(shell)? {
            for s in ctx.averages(&piece, ctx.schedule)? {
                uniform = uniform.max(linf(&e.compress(&s)?)?);
            }
        }
        checks.push(Check::new(format!("shell_{k}_l1"), l1(shell)?, pow2(-8 * (ni + ki)), true));
        checks.push(Check::new(format!("E1nk_{k}_defect"), e.defect(), bound, true));
        checks.push(Check::new(format!("E1nk_{k}_uniform"), uniform, bound, false));
    }
    checks.push(Check::new("shells_sum", linf(&x12.sub(&shell_sum)?)?, recon, false));

    let e1n = level.projection("E1n")?;
    let mut e1n_uniform = 0.0f64;
    for s in ctx.averages(x12, ctx.schedule)? {
        e1n_uniform = e1n_uniform.max(linf(&e1n.compress(&s)?)?);
    }
    checks.push(Check::new("E1n_defect", e1n.defect(), b4, true));
    checks.push(Check::new("E1n_uniform", e1n_uniform, b4, true));

    let en = level.projection("En")?;
    checks.push(Check::new("En_defect", en.defect(), b4 / 4.0, true));
    let e2 = level.projection("E2n")?;
    checks.push(Check::new("E2n_defect", e2.defect(), b4, true));
    let mut order = 0.0f64;
    for later in &levels[idx..] {
        for p in [later.projection("E1n")?, later.projection("En")?] {
            order = order.max(-e2.order_gap(p)?);
        }
    }
    checks.push(Check::new("E2n_order", order, ctx.tol.max(1e-9), false));

    let Some(l_n) = level.l_n else {
        return Ok(checks);
    };
    let tail = ctx.tail(l_n);
    let x11_limit = mean_limit(ctx.kernel, x11)?;
    let mut en_uniform = 0.0f64;
    for s in ctx.averages(x11, &tail)? {
        en_uniform = en_uniform.max(linf(&en.compress(&s.sub(&x11_limit)?)?)?);
    }
    checks.push(Check::new("En_uniform", en_uniform, b1, false));
    let on_e2 = |y: &Operator| linf(&e2.compress(y)?);
    let t1 = pair_max(&ctx.averages(x2n, &tail)?, on_e2)?;
    let t2 = pair_max(&ctx.averages(x12, &tail)?, on_e2)?;
    let t3 = pair_max(&ctx.averages(x11, &tail)?, on_e2)?;
    let ax = ctx.averages(ctx.x, &tail)?;
    let fin = pair_max(&ax, on_e2)?;
    checks.push(Check::new("t1_x2n", t1, 2.0 * b4 + ctx.tol, false));
    checks.push(Check::new("t2_x12n", t2, t2_bound + ctx.tol, false));
    checks.push(Check::new("t3_x11n", t3, 2.0 * b1 + ctx.tol, false));
    checks.push(Check::new("final", fin, 8.0 * b1 + ctx.tol, false));

    let el = level.projection("E_limit")?;
    let mut lim_uniform = 0.0f64;
    for s in &ax {
        lim_uniform = lim_uniform.max(linf(&el.compress(&s.sub(ctx.limit)?)?)?);
    }
    let r0_last = norm_eval(&NormId::L1plusLinf, &ax.last().expect("tail is nonempty").sub(ctx.limit)?)?;
    checks.push(Check::new("limit_r0", r0_last, 8.0 * b1 + ctx.tol, false));
    checks.push(Check::new("limit_dsae_defect", el.defect(), b4, true));
    checks.push(Check::new("limit_dsae_uniform", lim_uniform, 8.0 * b1, false));
    Ok(checks)
}

/// Reruns every construction step from the element and compares the stored
/// pieces and projections exactly.
pub(crate) fn audit_intermediates(ctx: &Context<'_>, levels: &[LevelRecord]) -> Result<()> {
    let mut stages = Vec::with_capacity(levels.len());
    for level in levels {
        let s = stage_level(ctx, level.n)?;
        if s.l_n != level.l_n {
            return Err(Error::InvalidArgument(format!(
                "level {}: l(n) recorded {:?}, recomputed {:?}",
                level.n, level.l_n, s.l_n
            )));
        }
        if s.pieces != level.pieces {
            return Err(Error::InvalidArgument(format!("level {}: stored pieces differ from recomputation", level.n)));
        }
        for (name, p) in &s.projections {
            if level.projections.get(name) != Some(p) {
                return Err(Error::InvalidArgument(format!("level {}: projection {name} differs", level.n)));
            }
        }
        stages.push(s);
    }
    let pairs = levels
        .iter()
        .map(|l| Ok((l.projection("E1n")?, l.projection("En")?)))
        .collect::<Result<Vec<_>>>()?;
    for (level, e2) in levels.iter().zip(tail_meets(&pairs)?) {
        if level.projection("E2n")? != &e2 {
            return Err(Error::InvalidArgument(format!("level {}: E2n is not the meet of the later levels", level.n)));
        }
    }
    if levels.iter().zip(&stages).any(|(l, s)| l.projections.len() != s.projections.len() + 1) {
        return Err(Error::InvalidArgument("unexpected extra projections in the report".into()));
    }
    Ok(())
}
