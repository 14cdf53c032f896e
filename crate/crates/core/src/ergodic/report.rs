use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::cesaro::cesaro;
use super::{prop1, theorem};
use crate::algebra::{Operator, Projection};
use crate::error::{Error, Result};
use crate::kernels::{GapDiagnostic, KernelRep};

/// One budget comparison. `strict` checks demand `achieved < limit`, the
/// others `achieved ≤ limit`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub limit: f64,
    pub achieved: f64,
    pub strict: bool,
    pub pass: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, achieved: f64, limit: f64, strict: bool) -> Self {
        let pass = if strict { achieved < limit } else { achieved <= limit };
        Self { name: name.into(), limit, achieved, strict, pass }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReplicationKind {
    Prop1,
    Theorem,
}

impl std::fmt::Display for ReplicationKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ReplicationKind::Prop1 => "prop1",
            ReplicationKind::Theorem => "theorem",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelRecord {
    pub n: u32,
    /// First scheduled index from which the Cauchy estimates are certified.
    pub l_n: Option<u64>,
    pub checks: Vec<Check>,
    /// Decomposition pieces of the element at this level.
    pub pieces: BTreeMap<String, Operator>,
    pub projections: BTreeMap<String, Projection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

impl LevelRecord {
    pub fn passed(&self) -> bool {
        self.failure.is_none() && self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub(crate) fn piece(&self, name: &str) -> Result<&Operator> {
        self.pieces
            .get(name)
            .ok_or_else(|| Error::InvalidArgument(format!("level {} has no piece `{name}`", self.n)))
    }

    pub(crate) fn projection(&self, name: &str) -> Result<&Projection> {
        self.projections
            .get(name)
            .ok_or_else(|| Error::InvalidArgument(format!("level {} has no projection `{name}`", self.n)))
    }
}

/// Everything a replication computed, with enough stored operators to
/// recompute every check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReplicationReport {
    pub kind: ReplicationKind,
    /// Kernel as `{shape, recipe}`; `None` for raw superoperators.
    pub kernel: Option<serde_json::Value>,
    pub element: Operator,
    pub limit: Operator,
    pub schedule: Vec<u64>,
    pub n_max: u32,
    pub tol: f64,
    pub levels: Vec<LevelRecord>,
    pub gap: GapDiagnostic,
}

/// Inputs shared by every level of a replication.
pub(crate) struct Context<'a> {
    pub kernel: &'a KernelRep,
    pub x: &'a Operator,
    pub limit: &'a Operator,
    pub schedule: &'a [u64],
    pub tol: f64,
}

impl Context<'_> {
    /// Scheduled indices `≥ from`.
    pub fn tail(&self, from: u64) -> Vec<u64> {
        self.schedule.iter().copied().filter(|&l| l >= from).collect()
    }

    pub fn averages(&self, y: &Operator, schedule: &[u64]) -> Result<Vec<Operator>> {
        if schedule.is_empty() {
            return Ok(Vec::new());
        }
        Ok(cesaro(self.kernel, y, schedule)?.averages())
    }
}

/// `max_{i<j} f(a_i − a_j)`, 0 with fewer than two averages.
pub(crate) fn pair_max(avgs: &[Operator], f: impl Fn(&Operator) -> Result<f64>) -> Result<f64> {
    let mut m = 0.0f64;
    for i in 0..avgs.len() {
        for j in (i + 1)..avgs.len() {
            m = m.max(f(&avgs[i].sub(&avgs[j])?)?);
        }
    }
    Ok(m)
}

pub(crate) fn pow2(e: i32) -> f64 {
    2f64.powi(e)
}

impl ReplicationReport {
    pub fn passed(&self) -> bool {
        !self.levels.is_empty() && self.levels.iter().all(LevelRecord::passed)
    }

    pub fn level(&self, n: u32) -> Option<&LevelRecord> {
        self.levels.iter().find(|l| l.n == n)
    }

    /// First level that did not pass.
    pub fn first_failure(&self) -> Option<&LevelRecord> {
        self.levels.iter().find(|l| !l.passed())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// `n,check,budget,achieved,verdict`, one row per check plus one row per
    /// recorded failure.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["n", "check", "budget", "achieved", "verdict"])?;
        for level in &self.levels {
            for c in &level.checks {
                w.write_record([
                    level.n.to_string(),
                    c.name.clone(),
                    c.limit.to_string(),
                    c.achieved.to_string(),
                    if c.pass { "pass" } else { "fail" }.to_string(),
                ])?;
            }
            if let Some(f) = &level.failure {
                w.write_record([level.n.to_string(), "failure".into(), String::new(), f.clone(), "fail".into()])?;
            }
        }
        let bytes = w.into_inner().map_err(|e| Error::InvalidArgument(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }

    /// Rebuilds the kernel from its recipe and audits against it.
    pub fn audit(&self) -> Result<()> {
        let v = self.kernel.clone().ok_or(Error::RawKernel)?;
        self.audit_with(&KernelRep::from_json_value(v)?)
    }

    /// Serializes and reparses the report, then recomputes every check from
    /// the stored operators and demands bitwise agreement with the record.
    pub fn audit_with(&self, kernel: &KernelRep) -> Result<()> {
        let parsed = Self::from_json(&self.to_json()?)?;
        if &parsed != self {
            return Err(Error::InvalidArgument("report does not survive a JSON round trip".into()));
        }
        let recomputed_limit = super::mean_limit(kernel, &parsed.element)?;
        if recomputed_limit != parsed.limit {
            return Err(Error::InvalidArgument("stored limit differs from the recomputed one".into()));
        }
        let ctx = Context {
            kernel,
            x: &parsed.element,
            limit: &parsed.limit,
            schedule: &parsed.schedule,
            tol: parsed.tol,
        };
        if parsed.kind == ReplicationKind::Theorem {
            theorem::audit_intermediates(&ctx, &parsed.levels)?;
        }
        for (i, level) in parsed.levels.iter().enumerate() {
            let checks = match parsed.kind {
                ReplicationKind::Prop1 => prop1::evaluate_level(&ctx, level)?,
                ReplicationKind::Theorem => theorem::evaluate_level(&ctx, &parsed.levels, i)?,
            };
            if checks.len() != level.checks.len() {
                return Err(Error::InvalidArgument(format!(
                    "level {}: {} checks recorded, {} recomputed",
                    level.n,
                    level.checks.len(),
                    checks.len()
                )));
            }
            for (r, c) in level.checks.iter().zip(&checks) {
                let item = format!("level {} {}", level.n, r.name);
                if r.name != c.name || r.strict != c.strict || r.pass != c.pass {
                    return Err(Error::InvalidArgument(format!("{item}: recorded {r:?}, recomputed {c:?}")));
                }
                for (what, a, b) in [("achieved", r.achieved, c.achieved), ("limit", r.limit, c.limit)] {
                    if a.to_bits() != b.to_bits() {
                        return Err(Error::AuditMismatch { item: format!("{item} {what}"), recorded: a, recomputed: b });
                    }
                }
            }
        }
        Ok(())
    }
}
