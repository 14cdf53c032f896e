use serde::{Deserialize, Serialize};

use crate::algebra::{svd, Operator};
use crate::error::{Error, Result};

/// A non-increasing, right-continuous step function on `[0, ∞)` given as
/// `(value, mass)` pairs: `value_0` on `[0, mass_0)`, `value_1` on the next
/// `mass_1`, and so on; zero beyond the total mass.
///
/// Serialized as a JSON array of `[value, mass]` pairs, values descending.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(f64, f64)>", into = "Vec<(f64, f64)>")]
pub struct StepFunction {
    steps: Vec<(f64, f64)>,
}

impl TryFrom<Vec<(f64, f64)>> for StepFunction {
    type Error = Error;
    fn try_from(steps: Vec<(f64, f64)>) -> Result<Self> {
        StepFunction::new(steps)
    }
}

impl From<StepFunction> for Vec<(f64, f64)> {
    fn from(s: StepFunction) -> Self {
        s.steps
    }
}

impl StepFunction {
    pub fn new(steps: Vec<(f64, f64)>) -> Result<Self> {
        for (i, &(v, m)) in steps.iter().enumerate() {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidArgument(format!("step {i} has value {v}")));
            }
            if !(m.is_finite() && m > 0.0) {
                return Err(Error::InvalidArgument(format!("step {i} has mass {m}")));
            }
        }
        if steps.windows(2).any(|w| w[1].0 > w[0].0) {
            return Err(Error::InvalidArgument("step values must be non-increasing".into()));
        }
        Ok(Self { steps })
    }

    /// Sorts `(value, mass)` pairs descending, merges equal values and drops
    /// zero values.
    pub fn from_weighted_values(mut pairs: Vec<(f64, f64)>) -> Result<Self> {
        pairs.retain(|&(v, _)| v != 0.0);
        pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
        let mut steps: Vec<(f64, f64)> = Vec::with_capacity(pairs.len());
        for (v, m) in pairs {
            match steps.last_mut() {
                Some(last) if last.0 == v => last.1 += m,
                _ => steps.push((v, m)),
            }
        }
        Self::new(steps)
    }

    pub fn zero() -> Self {
        Self { steps: Vec::new() }
    }

    pub fn steps(&self) -> &[(f64, f64)] {
        &self.steps
    }

    pub fn is_zero(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.steps.iter().map(|s| s.1).sum()
    }

    /// `μ_0`, the supremum.
    pub fn sup(&self) -> f64 {
        self.steps.first().map_or(0.0, |s| s.0)
    }

    /// Value at `t` (right-continuous).
    pub fn eval(&self, t: f64) -> f64 {
        let mut start = 0.0;
        for &(v, m) in &self.steps {
            if t < start + m {
                return v;
            }
            start += m;
        }
        0.0
    }

    /// `∫_0^s μ_t dt`.
    pub fn integral_to(&self, s: f64) -> f64 {
        let mut acc = 0.0;
        let mut start = 0.0;
        for &(v, m) in &self.steps {
            if s <= start {
                break;
            }
            acc += v * m.min(s - start);
            start += m;
        }
        acc
    }

    /// `∫_0^∞ μ_t dt`.
    pub fn integral(&self) -> f64 {
        self.steps.iter().map(|&(v, m)| v * m).sum()
    }

    /// Cumulative masses at the end of each step.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut acc = 0.0;
        self.steps
            .iter()
            .map(|&(_, m)| {
                acc += m;
                acc
            })
            .collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }
}

/// Generalized singular value function `t ↦ μ_t(x)`.
///
/// Singular values of all blocks are pooled, each carrying its block weight
/// as mass, then sorted and merged.
pub fn mu(x: &Operator) -> Result<StepFunction> {
    StepFunction::from_weighted_values(svd(x)?.weighted_values())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::AlgebraShape;

    #[test]
    fn mu_examples() {
        let s = AlgebraShape::new([(2, 1.5), (1, 0.5)]).unwrap();
        assert_eq!(mu(&Operator::identity(&s)).unwrap().steps(), &[(1.0, 3.5)]);
        let s = AlgebraShape::single(2, 1.0).unwrap();
        let x = Operator::from_real_diagonal(&s, &[3.0, -1.0]).unwrap();
        assert_eq!(mu(&x).unwrap().steps(), &[(3.0, 1.0), (1.0, 1.0)]);
        assert!(mu(&Operator::zeros(&s)).unwrap().is_zero());
    }

    #[test]
    fn evaluation_and_integrals() {
        let f = StepFunction::new(vec![(3.0, 1.0), (1.0, 1.0)]).unwrap();
        assert_eq!(f.eval(0.0), 3.0);
        assert_eq!(f.eval(1.0), 1.0);
        assert_eq!(f.eval(2.0), 0.0);
        assert_eq!(f.integral_to(1.5), 3.5);
        assert_eq!(f.integral(), 4.0);
        assert_eq!(f.breakpoints(), vec![1.0, 2.0]);
        assert!(StepFunction::new(vec![(1.0, 1.0), (2.0, 1.0)]).is_err());
        assert!(StepFunction::new(vec![(1.0, 0.0)]).is_err());
    }

    #[test]
    fn json_is_pair_array() {
        let f = StepFunction::new(vec![(2.0, 0.25), (1.0, 0.25)]).unwrap();
        assert_eq!(f.to_json().unwrap(), "[[2.0,0.25],[1.0,0.25]]");
    }
}
