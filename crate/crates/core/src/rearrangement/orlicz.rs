//! Orlicz functions, the Luxemburg gauge, and grid certification of the
//! `δ₂` (near zero) and `Δ₂` (near infinity) growth conditions.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::step::{mu, StepFunction};
use crate::algebra::Operator;
use crate::error::{Error, Result};

/// Grid used to certify monotonicity and convexity on construction.
const CERT_GRID_POINTS: usize = 1024;
const CERT_GRID_RANGE: (f64, f64) = (1e-6, 1e3);
const CONVEXITY_TOLERANCE: f64 = 1e-9;

/// The concrete function families that can be named in configs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum OrliczKind {
    /// `t^p`, `p ≥ 1`.
    Power(f64),
    /// `e^t − 1`.
    ExpMinusOne,
    /// `t · ln(1 + t)`.
    TLogOnePlusT,
}

/// A certified Orlicz function `Ψ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrliczFunction {
    kind: OrliczKind,
}

impl OrliczFunction {
    pub fn new(kind: OrliczKind) -> Result<Self> {
        let f = Self { kind };
        f.certify()?;
        Ok(f)
    }

    pub fn power(p: f64) -> Result<Self> {
        Self::new(OrliczKind::Power(p))
    }

    pub fn exp_minus_one() -> Self {
        Self { kind: OrliczKind::ExpMinusOne }
    }

    pub fn t_log_one_plus_t() -> Self {
        Self { kind: OrliczKind::TLogOnePlusT }
    }

    pub fn kind(&self) -> OrliczKind {
        self.kind
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self.kind {
            OrliczKind::Power(p) => t.powf(p),
            OrliczKind::ExpMinusOne => t.exp_m1(),
            OrliczKind::TLogOnePlusT => t * t.ln_1p(),
        }
    }

    fn certify(&self) -> Result<()> {
        if let OrliczKind::Power(p) = self.kind {
            if !(p.is_finite() && p > 0.0) {
                return Err(Error::Orlicz(format!("power exponent {p} must be finite and > 0")));
            }
        }
        if self.eval(0.0) != 0.0 {
            return Err(Error::Orlicz(format!("Ψ(0) = {} ≠ 0", self.eval(0.0))));
        }
        let grid = log_grid(CERT_GRID_RANGE.0, CERT_GRID_RANGE.1, CERT_GRID_POINTS);
        let vals: Vec<f64> = grid.iter().map(|&t| self.eval(t)).collect();
        if vals.iter().any(|v| v.is_nan()) {
            return Err(Error::Orlicz("Ψ is NaN on the certification grid".into()));
        }
        if let Some(i) = (1..vals.len()).find(|&i| vals[i] < vals[i - 1]) {
            return Err(Error::Orlicz(format!("Ψ decreases near t = {}", grid[i])));
        }
        for i in 1..grid.len() {
            let (a, b) = (grid[i - 1], grid[i]);
            let mid = self.eval(0.5 * (a + b));
            let chord = 0.5 * (vals[i - 1] + vals[i]);
            if mid > chord + CONVEXITY_TOLERANCE * chord.abs().max(1e-300) {
                return Err(Error::Orlicz(format!("Ψ fails midpoint convexity near t = {a}")));
            }
        }
        Ok(())
    }
}

impl fmt::Display for OrliczFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            OrliczKind::Power(p) => write!(f, "power:{p}"),
            OrliczKind::ExpMinusOne => write!(f, "exp"),
            OrliczKind::TLogOnePlusT => write!(f, "tlog"),
        }
    }
}

impl FromStr for OrliczFunction {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exp" => Ok(Self::exp_minus_one()),
            "tlog" => Ok(Self::t_log_one_plus_t()),
            _ => {
                let p = s
                    .strip_prefix("power:")
                    .and_then(|p| p.parse::<f64>().ok())
                    .ok_or_else(|| Error::Orlicz(format!("unknown Orlicz function `{s}`")))?;
                Self::power(p)
            }
        }
    }
}

impl Serialize for OrliczFunction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for OrliczFunction {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub(crate) fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

fn modular(psi: &OrliczFunction, steps: &StepFunction, lambda: f64) -> Result<f64> {
    let s: f64 = steps.steps().iter().map(|&(v, m)| m * psi.eval(v / lambda)).sum();
    if s.is_nan() {
        return Err(Error::Orlicz(format!("Ψ evaluation is NaN at scale λ = {lambda}")));
    }
    Ok(s)
}

/// Luxemburg norm of a rearrangement: `inf{λ > 0 : Σ mass·Ψ(value/λ) ≤ 1}`.
///
/// Bisection runs until the bracket can no longer shrink in `f64`, which is
/// well inside a relative width of 1e−10. Returns the upper end of the
/// bracket, so the modular at the returned value is ≤ 1.
pub fn luxemburg(psi: &OrliczFunction, steps: &StepFunction) -> Result<f64> {
    if steps.is_zero() {
        return Ok(0.0);
    }
    let start = steps.sup();
    let mut hi = start;
    let mut guard = 0;
    while modular(psi, steps, hi)? > 1.0 {
        hi *= 2.0;
        guard += 1;
        if guard > 2100 || !hi.is_finite() {
            return Err(Error::Orlicz("could not bracket the Luxemburg norm from above".into()));
        }
    }
    let mut lo = hi;
    guard = 0;
    while modular(psi, steps, lo)? <= 1.0 {
        lo *= 0.5;
        guard += 1;
        if guard > 2100 || lo == 0.0 {
            return Err(Error::Orlicz("could not bracket the Luxemburg norm from below".into()));
        }
    }
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if modular(psi, steps, mid)? > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

/// Luxemburg norm of `x` under `Ψ`.
pub fn orlicz_norm(psi: &OrliczFunction, x: &Operator) -> Result<f64> {
    luxemburg(psi, &mu(x)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GrowthRegime {
    /// `δ₂`: `sup_{0<t≤1} Ψ(2t)/Ψ(t) < ∞`.
    NearZero,
    /// `Δ₂`: `sup_{t≥1} Ψ(2t)/Ψ(t) < ∞`.
    NearInfinity,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Delta2Report {
    pub regime: GrowthRegime,
    pub passes: bool,
    /// Supremum of `Ψ(2t)/Ψ(t)` on the finest grid (`∞` when it diverges).
    pub worst_ratio: f64,
}

/// Ratios above this count as divergence.
pub const DELTA2_RATIO_CAP: f64 = 1e6;

/// Grid certification of the doubling condition in the given regime.
///
/// The supremum of `Ψ(2t)/Ψ(t)` is sampled on log grids of 256, 512 and 1024
/// points over `(1e−8, 1]` or `[1, 1e8)`. The condition passes iff the finest
/// supremum is below [`DELTA2_RATIO_CAP`] and agrees with the next coarser
/// one to relative 1e−6.
pub fn delta2_check(psi: &OrliczFunction, regime: GrowthRegime) -> Delta2Report {
    let (lo, hi) = match regime {
        GrowthRegime::NearZero => (1e-8, 1.0),
        GrowthRegime::NearInfinity => (1.0, 1e8),
    };
    let sup_on = |n: usize| -> f64 {
        log_grid(lo, hi, n)
            .into_iter()
            .filter_map(|t| {
                let base = psi.eval(t);
                if base == 0.0 {
                    return None;
                }
                let r = psi.eval(2.0 * t) / base;
                Some(if r.is_finite() { r } else { f64::INFINITY })
            })
            .fold(0.0, f64::max)
    };
    let sups: Vec<f64> = [256, 512, 1024].into_iter().map(sup_on).collect();
    let (mid, fine) = (sups[1], sups[2]);
    let stable = fine.is_finite() && (fine - mid).abs() <= 1e-6 * fine;
    Delta2Report { regime, passes: fine < DELTA2_RATIO_CAP && stable, worst_ratio: fine }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn certificate_rejects_concave_power() {
        assert!(OrliczFunction::power(0.5).is_err());
        assert!(OrliczFunction::power(1.0).is_ok());
        assert!(OrliczFunction::new(OrliczKind::ExpMinusOne).is_ok());
        assert!(OrliczFunction::new(OrliczKind::TLogOnePlusT).is_ok());
    }

    #[test]
    fn single_step_closed_form() {
        let psi = OrliczFunction::power(2.0).unwrap();
        let f = StepFunction::new(vec![(2.0, 0.25)]).unwrap();
        assert!((luxemburg(&psi, &f).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(luxemburg(&psi, &StepFunction::zero()).unwrap(), 0.0);
    }

    #[test]
    fn growth_conditions() {
        let sq = OrliczFunction::power(2.0).unwrap();
        for regime in [GrowthRegime::NearZero, GrowthRegime::NearInfinity] {
            let r = delta2_check(&sq, regime);
            assert!(r.passes);
            assert!((r.worst_ratio - 4.0).abs() < 1e-12);
            let r = delta2_check(&OrliczFunction::power(1.0).unwrap(), regime);
            assert!(r.passes && (r.worst_ratio - 2.0).abs() < 1e-12);
        }
        let e = OrliczFunction::exp_minus_one();
        assert!(delta2_check(&e, GrowthRegime::NearZero).passes);
        let r = delta2_check(&e, GrowthRegime::NearInfinity);
        assert!(!r.passes);
        assert!(r.worst_ratio > DELTA2_RATIO_CAP);
    }

    #[test]
    fn parse_round_trip() {
        for s in ["power:2", "power:1.5", "exp", "tlog"] {
            assert_eq!(s.parse::<OrliczFunction>().unwrap().to_string(), s);
        }
        assert!("power:x".parse::<OrliczFunction>().is_err());
    }
}
