use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::{parse_config, ExperimentConfig};
use super::rows::{from_csv, to_csv, ResultRow, RowVerdict};
use crate::algebra::Operator;
use crate::ergodic::{
    cauchy_profile, cesaro, cesaro_direct, dsae_check, mean_limit, replicate_prop1_with, replicate_theorem_with,
    ProjectionWitness, ReplicationReport,
};
use crate::error::{Error, Result};
use crate::kernels::KernelRep;
use crate::rearrangement::{
    delta2_check, embedding_probe, majorization_check, norm_axiom_suite, norm_eval, GrowthRegime, NormId,
};

/// Relative slack on `‖Tx‖ ≤ ‖x‖`.
pub const CONTRACTION_TOLERANCE: f64 = 1e-9;
/// Allowed distance between the recurrence and a direct Cesàro sum.
pub const RECURRENCE_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::Subcommand)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// Certify the kernel as a positive Dunford–Schwartz map.
    Certify,
    /// Evaluate norms, probe their axioms and the contraction property.
    Norms,
    /// Cesàro averages and their Cauchy profile in each norm.
    Cesaro,
    /// Projection witness for the averages against their limit.
    Dsae,
    /// Level-by-level norm convergence in L1 + Linf.
    Prop1,
    /// Level-by-level bilateral almost-everywhere convergence.
    Theorem,
    /// Empirical embedding constants between L1 ∩ Linf and L1 + Linf.
    Embed,
}

impl Command {
    pub const ALL: [Command; 7] = [
        Command::Certify,
        Command::Norms,
        Command::Cesaro,
        Command::Dsae,
        Command::Prop1,
        Command::Theorem,
        Command::Embed,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Certify => "certify",
            Command::Norms => "norms",
            Command::Cesaro => "cesaro",
            Command::Dsae => "dsae",
            Command::Prop1 => "prop1",
            Command::Theorem => "theorem",
            Command::Embed => "embed",
        }
    }
}

impl std::str::FromStr for Command {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown command `{s}`")))
    }
}

/// Rows plus the named intermediate artifacts they were computed from.
#[derive(Clone, Debug, Default)]
pub struct RunOutput {
    pub rows: Vec<ResultRow>,
    pub artifacts: Vec<(String, String)>,
}

impl RunOutput {
    pub fn any_fail(&self) -> bool {
        self.rows.iter().any(|r| r.verdict == RowVerdict::Fail)
    }
}

struct Rows<'a> {
    id: &'a str,
    command: &'a str,
    rows: Vec<ResultRow>,
}

impl Rows<'_> {
    fn push(&mut self, level: Option<u64>, metric: impl Into<String>, value: f64, verdict: RowVerdict) {
        self.rows.push(ResultRow::new(self.id, self.command, level, metric, value, verdict));
    }

    fn info(&mut self, level: Option<u64>, metric: impl Into<String>, value: f64) {
        self.push(level, metric, value, RowVerdict::NotApplicable);
    }

    fn check(&mut self, level: Option<u64>, metric: impl Into<String>, value: f64, pass: bool) {
        self.push(level, metric, value, RowVerdict::from_bool(pass));
    }
}

fn flag(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

fn json<T: Serialize>(v: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)?)
}

/// Runs one command on a validated configuration.
///
/// Budget infeasibility and schedule exhaustion become `fail` rows; other
/// errors propagate.
pub fn run(config: &ExperimentConfig, command: Command) -> Result<RunOutput> {
    config.validate()?;
    let shape = config.algebra_shape()?;
    let kernel = config.kernel(&shape)?;
    let x = config.element(&shape)?;
    let mut out = Rows { id: &config.id, command: command.name(), rows: Vec::new() };
    let mut artifacts = vec![("kernel.json".to_string(), kernel.to_json()?), ("element.json".to_string(), x.to_json()?)];
    if command != Command::Certify && command != Command::Embed && command != Command::Norms {
        if let Err(e) = kernel.require_certified() {
            out.check(None, "certified", 0.0, false);
            artifacts.push(("error.txt".into(), e.to_string()));
            return Ok(RunOutput { rows: out.rows, artifacts });
        }
    }
    let schedule = config.schedule();
    let b = &config.budgets;
    match command {
        Command::Certify => {
            let c = kernel.certify();
            let failed = c.failed_checks();
            let ok = |name: &str| !failed.contains(&name);
            out.check(None, "choi_negativity", (-c.choi_min_eig).max(0.0), ok("choi"));
            out.check(None, "choi_hermiticity_defect", c.choi_hermiticity_defect, ok("choi"));
            out.check(None, "unital_defect", c.unital_defect.max(0.0), ok("unital"));
            out.check(None, "subtrace_defect", c.subtrace_defect.max(0.0), ok("subtrace"));
            out.info(None, "l2_opnorm", c.l2_opnorm);
            out.check(None, "certified", flag(c.passed()), c.passed());
            if c.passed() {
                let f = kernel.fixed_space()?;
                let g = kernel.spectral_gap()?;
                out.info(None, "fixed_space_dim", f.dim() as f64);
                out.info(None, "gap_residual", g.residual);
                out.info(None, "gap_radius_estimate", g.radius_estimate);
                out.info(None, "peripheral_trivial", flag(g.peripheral_trivial));
            }
            artifacts.push(("certification.json".into(), json(c)?));
        }
        Command::Norms => {
            let norms = config.norm_ids()?;
            let tx = kernel.apply(&x)?;
            for (i, n) in norms.iter().enumerate() {
                let nx = norm_eval(n, &x)?;
                let ntx = norm_eval(n, &tx)?;
                out.info(None, format!("{n}:value"), nx);
                out.check(
                    None,
                    format!("{n}:contraction_ratio"),
                    if nx > 0.0 { ntx / nx } else { 0.0 },
                    ntx <= nx * (1.0 + CONTRACTION_TOLERANCE),
                );
                let suite = norm_axiom_suite(n, &shape, config.seed.wrapping_add(i as u64), b.trials())?;
                for a in &suite.axioms {
                    out.check(None, format!("{n}:axiom:{}", a.name), a.worst_violation, a.passed);
                }
                if let NormId::Orlicz(psi) = n {
                    for (tag, regime) in [("delta2", GrowthRegime::NearZero), ("Delta2", GrowthRegime::NearInfinity)] {
                        let d = delta2_check(psi, regime);
                        out.check(None, format!("{n}:{tag}_ratio"), d.worst_ratio, d.passes);
                    }
                }
            }
            let m = majorization_check(&tx, &x)?;
            out.check(None, "majorization_margin", m.worst_margin, m.holds);
        }
        Command::Cesaro => {
            let traj = cesaro(&kernel, &x, &schedule)?;
            let (last_n, last) = traj.last().clone();
            let direct = cesaro_direct(&kernel, &x, last_n)?;
            let rec = last.sub(&direct)?.max_abs();
            out.check(Some(last_n), "recurrence_defect", rec, rec <= RECURRENCE_TOLERANCE);
            for n in config.norm_ids()? {
                let p = cauchy_profile(&traj, &n)?;
                for (l, d) in p.indices.iter().zip(&p.to_limit) {
                    out.info(Some(*l), format!("{n}:to_limit"), *d);
                }
                for (l, d) in p.indices.iter().zip(&p.tail_envelope) {
                    out.info(Some(*l), format!("{n}:tail_envelope"), *d);
                }
                let tv = p.triangle_violations();
                out.check(None, format!("{n}:triangle_violations"), tv as f64, tv == 0);
                let env = p.envelope_non_increasing();
                out.check(None, format!("{n}:envelope_non_increasing"), flag(env), env);
                out.info(Some(last_n), format!("{n}:final_to_limit"), p.final_to_limit());
            }
            let g = kernel.spectral_gap()?;
            out.info(None, "gap_residual", g.residual);
            out.info(None, "peripheral_trivial", flag(g.peripheral_trivial));
            artifacts.push(("averages.json".into(), json(&traj.points())?));
        }
        Command::Dsae => {
            let traj = cesaro(&kernel, &x, &schedule)?;
            let avgs = traj.averages();
            let limit = mean_limit(&kernel, &x)?;
            let w = dsae_check(&avgs, &limit, b.epsilon(), b.bound())?;
            for (l, (u, a)) in schedule.iter().zip(w.uniform_norms.iter().zip(&w.apriori_bounds)) {
                out.check(Some(*l), "uniform_norm", *u, *u <= a * (1.0 + 1e-9) + 1e-12);
                out.info(Some(*l), "apriori_bound", *a);
            }
            out.check(None, "defect", w.defect, w.defect < w.budget);
            out.check(None, "achieved_bound", w.achieved_bound, w.achieved_bound <= w.bound);
            out.info(None, "level", w.level);
            out.check(None, "valid", flag(w.valid), w.valid);
            let audit = w.audit(&ProjectionWitness::differences(&avgs, &limit)?);
            out.check(None, "audit", flag(audit.is_ok()), audit.is_ok());
            artifacts.push(("witness.json".into(), json(&w)?));
            artifacts.push(("limit.json".into(), limit.to_json()?));
            artifacts.push(("averages.json".into(), json(&traj.points())?));
        }
        Command::Prop1 | Command::Theorem => {
            let result = if command == Command::Prop1 {
                replicate_prop1_with(&kernel, &x, b.n_max(), b.tol(), &schedule)
            } else {
                replicate_theorem_with(&kernel, &x, b.n_max(), b.tol(), &schedule)
            };
            match result {
                Ok(report) => {
                    report_rows(&mut out, &report, &kernel);
                    artifacts.push(("report.json".into(), report.to_json()?));
                    artifacts.push(("report.csv".into(), report.to_csv()?));
                }
                Err(Error::InfeasibleBudget { step, detail }) => {
                    out.check(None, format!("infeasible_budget:{step}"), 0.0, false);
                    artifacts.push(("error.txt".into(), detail));
                }
                Err(e) => return Err(e),
            }
        }
        Command::Embed => {
            for (i, n) in config.norm_ids()?.iter().enumerate() {
                let e = embedding_probe(n, &shape, config.seed.wrapping_add(i as u64), b.trials())?;
                out.check(None, format!("{n}:c_lower"), e.c_lower, e.c_lower.is_finite());
                out.check(None, format!("{n}:c_upper"), e.c_upper, e.c_upper.is_finite());
                out.info(None, format!("{n}:declared_minimal"), flag(n.declared_minimal()));
            }
        }
    }
    Ok(RunOutput { rows: out.rows, artifacts })
}

fn report_rows(out: &mut Rows<'_>, report: &ReplicationReport, kernel: &KernelRep) {
    for level in &report.levels {
        let n = Some(level.n as u64);
        if let Some(l) = level.l_n {
            out.info(n, "l_n", l as f64);
        }
        for c in &level.checks {
            out.check(n, c.name.clone(), c.achieved, c.pass);
        }
        if let Some(f) = &level.failure {
            let step = f.split(':').next().unwrap_or("failure");
            out.check(n, format!("failure:{step}"), 0.0, false);
        }
    }
    let audit = report.audit_with(kernel);
    out.check(None, "audit", flag(audit.is_ok()), audit.is_ok());
    out.check(None, "verdict", flag(report.passed()), report.passed());
}

#[derive(Serialize, Deserialize)]
struct Manifest {
    command: Command,
    files: Vec<String>,
}

fn write(dir: &Path, name: &str, text: &str) -> Result<()> {
    let p = dir.join(name);
    fs::write(&p, text).map_err(|source| Error::Io { path: p, source })
}

fn read(dir: &Path, name: &str) -> Result<String> {
    let p = dir.join(name);
    fs::read_to_string(&p).map_err(|source| Error::Io { path: p, source })
}

/// Writes the resolved configuration, every artifact and the rows to `dir`.
pub fn dump(dir: &Path, config: &ExperimentConfig, command: Command, output: &RunOutput) -> Result<()> {
    fs::create_dir_all(dir).map_err(|source| Error::Io { path: dir.to_path_buf(), source })?;
    write(dir, "config.toml", &config.resolved()?.to_toml()?)?;
    write(dir, "rows.csv", &to_csv(&output.rows)?)?;
    for (name, text) in &output.artifacts {
        write(dir, name, text)?;
    }
    let manifest = Manifest { command, files: output.artifacts.iter().map(|a| a.0.clone()).collect() };
    write(dir, "manifest.json", &json(&manifest)?)
}

/// Recomputes every row from a dump directory and checks it against the
/// stored rows; replication reports are additionally audited on their own.
pub fn replay_dump(dir: &Path) -> Result<Vec<ResultRow>> {
    let manifest: Manifest = serde_json::from_str(&read(dir, "manifest.json")?)?;
    let config = parse_config(&read(dir, "config.toml")?)?;
    let stored = from_csv(&read(dir, "rows.csv")?)?;
    let shape = config.algebra_shape()?;
    if KernelRep::from_json(&read(dir, "kernel.json")?)?.superoperator() != config.kernel(&shape)?.superoperator() {
        return Err(Error::InvalidArgument("kernel.json disagrees with config.toml".into()));
    }
    if Operator::from_json(&read(dir, "element.json")?)? != config.element(&shape)? {
        return Err(Error::InvalidArgument("element.json disagrees with config.toml".into()));
    }
    if manifest.files.iter().any(|f| f == "report.json") {
        ReplicationReport::from_json(&read(dir, "report.json")?)?.audit()?;
    }
    let rows = run(&config, manifest.command)?.rows;
    if rows != stored {
        return Err(Error::InvalidArgument("recomputed rows differ from rows.csv".into()));
    }
    Ok(rows)
}
