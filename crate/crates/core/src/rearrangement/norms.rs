use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::orlicz::{delta2_check, luxemburg, GrowthRegime, OrliczFunction};
use super::step::{mu, StepFunction};
use crate::algebra::{spectral_truncate, Operator};
use crate::error::{Error, Result};

/// A rearrangement-invariant norm.
///
/// Textual form (configs, CSV): `L1`, `Linf`, `L1capLinf`, `L1plusLinf`
/// (alias `R0`), `orlicz:power:<p>`, `orlicz:exp`, `orlicz:tlog`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NormId {
    L1,
    Linf,
    /// `max(‖x‖₁, ‖x‖∞)`.
    L1capLinf,
    /// `∫₀¹ μ_t(x) dt`, the K-functional at `t = 1`.
    L1plusLinf,
    Orlicz(OrliczFunction),
}

impl NormId {
    /// The four non-Orlicz norms.
    pub const BASIC: [NormId; 4] = [NormId::L1, NormId::Linf, NormId::L1capLinf, NormId::L1plusLinf];

    /// Minimality is automatic in finite dimension; this is the attribute the
    /// norm would carry on a diffuse algebra, used for reporting only.
    pub fn declared_minimal(&self) -> bool {
        match self {
            NormId::L1 | NormId::L1capLinf => true,
            NormId::Linf | NormId::L1plusLinf => false,
            NormId::Orlicz(psi) => {
                delta2_check(psi, GrowthRegime::NearZero).passes
                    && delta2_check(psi, GrowthRegime::NearInfinity).passes
            }
        }
    }

    /// Evaluates the norm of a rearrangement.
    pub fn eval_steps(&self, m: &StepFunction) -> Result<f64> {
        Ok(match self {
            NormId::L1 => m.integral(),
            NormId::Linf => m.sup(),
            NormId::L1capLinf => m.integral().max(m.sup()),
            NormId::L1plusLinf => m.integral_to(1.0),
            NormId::Orlicz(psi) => luxemburg(psi, m)?,
        })
    }
}

impl fmt::Display for NormId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormId::L1 => f.write_str("L1"),
            NormId::Linf => f.write_str("Linf"),
            NormId::L1capLinf => f.write_str("L1capLinf"),
            NormId::L1plusLinf => f.write_str("L1plusLinf"),
            NormId::Orlicz(psi) => write!(f, "orlicz:{psi}"),
        }
    }
}

impl FromStr for NormId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "L1" => Ok(NormId::L1),
            "Linf" => Ok(NormId::Linf),
            "L1capLinf" => Ok(NormId::L1capLinf),
            "L1plusLinf" | "R0" => Ok(NormId::L1plusLinf),
            _ => match s.strip_prefix("orlicz:") {
                Some(rest) => Ok(NormId::Orlicz(rest.parse()?)),
                None => Err(Error::InvalidArgument(format!("unknown norm `{s}`"))),
            },
        }
    }
}

impl Serialize for NormId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for NormId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub fn norm_eval(n: &NormId, x: &Operator) -> Result<f64> {
    n.eval_steps(&mu(x)?)
}

/// Optimal split `x = x₁ + x₂` for the `L₁ + L∞` norm.
///
/// Cuts at the level `μ_1(x)` (zero when the total mass is at most 1), so
/// `‖x₁‖₁ + ‖x₂‖∞ = ∫₀¹ μ_t(x) dt`.
pub fn k_decomposition(x: &Operator) -> Result<(Operator, Operator)> {
    let m = mu(x)?;
    let level = if m.total_mass() <= 1.0 { 0.0 } else { m.eval(1.0) };
    spectral_truncate(x, level)
}
