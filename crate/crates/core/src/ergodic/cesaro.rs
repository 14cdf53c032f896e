use serde::{Deserialize, Serialize};

use crate::algebra::Operator;
use crate::error::{Error, Result};
use crate::kernels::KernelRep;
use crate::linalg::C64;
use crate::rearrangement::{norm_eval, NormId};

/// Largest exponent of the default schedule `1, 2, 4, …, 2^14`.
pub const DEFAULT_SCHEDULE_EXP: u32 = 14;

/// `[1, 2, 4, …, 2^max_exp]`.
pub fn geometric_schedule(max_exp: u32) -> Vec<u64> {
    (0..=max_exp).map(|e| 1u64 << e).collect()
}

pub fn default_schedule() -> Vec<u64> {
    geometric_schedule(DEFAULT_SCHEDULE_EXP)
}

pub(crate) fn check_schedule(schedule: &[u64]) -> Result<()> {
    if schedule.is_empty() {
        return Err(Error::InvalidArgument("empty schedule".into()));
    }
    if schedule[0] == 0 {
        return Err(Error::InvalidArgument("schedule entries must be ≥ 1".into()));
    }
    if schedule.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument(format!("schedule {schedule:?} is not strictly increasing")));
    }
    Ok(())
}

/// Cesàro averages `s_n = (1/n) Σ_{k<n} T^k x` recorded along a schedule.
#[derive(Clone, Debug)]
pub struct Trajectory {
    kernel: KernelRep,
    seed: Operator,
    points: Vec<(u64, Operator)>,
}

impl Trajectory {
    pub fn kernel(&self) -> &KernelRep {
        &self.kernel
    }

    pub fn seed(&self) -> &Operator {
        &self.seed
    }

    pub fn points(&self) -> &[(u64, Operator)] {
        &self.points
    }

    pub fn schedule(&self) -> Vec<u64> {
        self.points.iter().map(|p| p.0).collect()
    }

    pub fn averages(&self) -> Vec<Operator> {
        self.points.iter().map(|p| p.1.clone()).collect()
    }

    pub fn average(&self, n: u64) -> Option<&Operator> {
        self.points.iter().find(|p| p.0 == n).map(|p| &p.1)
    }

    pub fn last(&self) -> &(u64, Operator) {
        self.points.last().expect("nonempty schedule")
    }
}

/// Runs the recurrence `s_n = ((n−1) s_{n−1} + T^{n−1} x) / n` up to the last
/// scheduled `n`, recording the requested averages.
pub fn cesaro(kernel: &KernelRep, x: &Operator, schedule: &[u64]) -> Result<Trajectory> {
    kernel.require_certified()?;
    check_schedule(schedule)?;
    if x.shape() != kernel.shape() {
        return Err(Error::mismatch(kernel.shape(), x.shape()));
    }
    let shape = kernel.shape();
    let m = kernel.superoperator();
    let mut s = x.to_vec();
    let mut power = m.matvec(&s);
    let mut points = Vec::with_capacity(schedule.len());
    let mut next = schedule.iter().peekable();
    let last = *schedule.last().expect("checked nonempty");
    for n in 1..=last {
        if n > 1 {
            let a = (n - 1) as f64 / n as f64;
            let b = 1.0 / n as f64;
            for (si, pi) in s.iter_mut().zip(&power) {
                *si = *si * a + *pi * b;
            }
            if n < last {
                power = m.matvec(&power);
            }
        }
        if next.peek() == Some(&&n) {
            next.next();
            let op = if n == 1 { x.clone() } else { Operator::from_vec(shape, &s)? };
            points.push((n, op));
        }
    }
    Ok(Trajectory { kernel: kernel.clone(), seed: x.clone(), points })
}

/// `(1/n) Σ_{k<n} T^k x` summed directly, for cross-checking the recurrence.
pub fn cesaro_direct(kernel: &KernelRep, x: &Operator, n: u64) -> Result<Operator> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be ≥ 1".into()));
    }
    let m = kernel.superoperator();
    let mut acc = vec![C64::new(0.0, 0.0); x.shape().vec_dim()];
    let mut p = x.to_vec();
    for k in 0..n {
        for (a, v) in acc.iter_mut().zip(&p) {
            *a += v;
        }
        if k + 1 < n {
            p = m.matvec(&p);
        }
    }
    let inv = 1.0 / n as f64;
    Operator::from_vec(x.shape(), &acc.iter().map(|a| a * inv).collect::<Vec<_>>())
}

/// `x̃`, the `τ`-orthogonal projection of `x` onto the fixed space of `T`.
pub fn mean_limit(kernel: &KernelRep, x: &Operator) -> Result<Operator> {
    kernel.fixed_space()?.project(x)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CauchyProfile {
    pub norm: NormId,
    pub indices: Vec<u64>,
    /// `pairwise[i][j] = ‖s_{n_i} − s_{n_j}‖`.
    pub pairwise: Vec<Vec<f64>>,
    /// `‖s_{n_i} − x̃‖`.
    pub to_limit: Vec<f64>,
    /// `max_{j ≥ i} to_limit[j]`.
    pub tail_envelope: Vec<f64>,
}

impl CauchyProfile {
    /// Pairs violating `‖s_l − s_m‖ ≤ ‖s_l − x̃‖ + ‖s_m − x̃‖` beyond a relative 1e−12.
    pub fn triangle_violations(&self) -> usize {
        let n = self.indices.len();
        let mut bad = 0;
        for i in 0..n {
            for j in 0..n {
                let rhs = self.to_limit[i] + self.to_limit[j];
                if self.pairwise[i][j] > rhs + 1e-12 * (1.0 + rhs) {
                    bad += 1;
                }
            }
        }
        bad
    }

    pub fn envelope_non_increasing(&self) -> bool {
        self.tail_envelope.windows(2).all(|w| w[1] <= w[0])
    }

    pub fn final_to_limit(&self) -> f64 {
        *self.to_limit.last().expect("≥ 2 points")
    }
}

pub fn cauchy_profile(traj: &Trajectory, norm: &NormId) -> Result<CauchyProfile> {
    if traj.points.len() < 2 {
        return Err(Error::InvalidArgument("Cauchy profile needs at least two recorded averages".into()));
    }
    let limit = mean_limit(&traj.kernel, &traj.seed)?;
    let n = traj.points.len();
    let mut pairwise = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let v = norm_eval(norm, &traj.points[i].1.sub(&traj.points[j].1)?)?;
            pairwise[i][j] = v;
            pairwise[j][i] = v;
        }
    }
    let to_limit = traj
        .points
        .iter()
        .map(|(_, s)| norm_eval(norm, &s.sub(&limit)?))
        .collect::<Result<Vec<f64>>>()?;
    let mut tail_envelope = to_limit.clone();
    for i in (0..n.saturating_sub(1)).rev() {
        tail_envelope[i] = tail_envelope[i].max(tail_envelope[i + 1]);
    }
    Ok(CauchyProfile { norm: *norm, indices: traj.schedule(), pairwise, to_limit, tail_envelope })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{random_operator, AlgebraShape, OperatorKind};
    use crate::kernels::random::{random_kernel, KernelFamily};

    #[test]
    fn identity_keeps_x() {
        let s = AlgebraShape::new([(2, 1.0), (1, 0.5)]).unwrap();
        let x = random_operator(&s, OperatorKind::General, 1).unwrap();
        let t = cesaro(&KernelRep::identity(&s), &x, &[1, 3, 8]).unwrap();
        assert_eq!(t.average(1).unwrap(), &x);
        for (_, sn) in t.points() {
            assert!(sn.sub(&x).unwrap().max_abs() < 1e-15);
        }
    }

    #[test]
    fn recurrence_matches_direct_sum() {
        let s = AlgebraShape::new([(2, 0.5), (2, 0.5), (1, 2.0)]).unwrap();
        let k = random_kernel(&s, KernelFamily::Convex, 3).unwrap();
        let x = random_operator(&s, OperatorKind::General, 2).unwrap();
        let t = cesaro(&k, &x, &[1, 2, 5, 64]).unwrap();
        for &(n, ref sn) in t.points() {
            let d = cesaro_direct(&k, &x, n).unwrap();
            assert!(sn.sub(&d).unwrap().max_abs() < 1e-12);
        }
    }

    #[test]
    fn full_cycle_averages_to_constant() {
        let s = AlgebraShape::diagonal(&[1.0; 5]).unwrap();
        let k = KernelRep::cyclic_shift(&s).unwrap();
        let x = Operator::from_real_diagonal(&s, &[1.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        let t = cesaro(&k, &x, &[5]).unwrap();
        assert_eq!(t.average(5).unwrap(), &Operator::identity(&s).scale_real(0.2));
    }

    #[test]
    fn schedule_validation() {
        let s = AlgebraShape::single(1, 1.0).unwrap();
        let k = KernelRep::identity(&s);
        let x = Operator::identity(&s);
        assert!(cesaro(&k, &x, &[]).is_err());
        assert!(cesaro(&k, &x, &[4, 2]).is_err());
        assert!(cesaro(&k, &x, &[0, 2]).is_err());
        assert_eq!(geometric_schedule(3), vec![1, 2, 4, 8]);
    }

    #[test]
    fn profile_of_pinching() {
        let s = AlgebraShape::single(3, 1.0).unwrap();
        let k = KernelRep::full_pinch(&s);
        let x = random_operator(&s, OperatorKind::General, 9).unwrap();
        let t = cesaro(&k, &x, &geometric_schedule(6)).unwrap();
        let p = cauchy_profile(&t, &NormId::L1plusLinf).unwrap();
        assert_eq!(p.triangle_violations(), 0);
        assert!(p.envelope_non_increasing());
        // s_n − Px = (x − Px)/n exactly
        let px = mean_limit(&k, &x).unwrap();
        let expect = norm_eval(&NormId::L1plusLinf, &x.sub(&px).unwrap()).unwrap() / 64.0;
        assert!((p.final_to_limit() - expect).abs() < 1e-12);
    }
}
