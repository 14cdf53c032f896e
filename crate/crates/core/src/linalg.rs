//! Dense square complex matrices and the two Jacobi-type solvers everything
//! else is built on: a cyclic two-sided Jacobi eigensolver for Hermitian
//! matrices and a one-sided (Hestenes) Jacobi SVD.
//!
//! Both solvers use the fixed row-cyclic sweep order `(0,1), (0,2), ...,
//! (n-2,n-1)`, so results are a deterministic function of the input bits.

use std::ops::{Index, IndexMut};

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Off-diagonal Frobenius threshold, relative to the full Frobenius norm.
pub const JACOBI_TOLERANCE: f64 = 1e-13;
/// Sweep budget for both Jacobi solvers.
pub const JACOBI_MAX_SWEEPS: usize = 100;
/// Tolerance on `‖A − A*‖` (entrywise, relative to `max(1, max|a_ij|)`)
/// below which a matrix is accepted as Hermitian.
pub const HERMITIAN_TOLERANCE: f64 = 1e-10;

/// Square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CMat {
    n: usize,
    data: Vec<C64>,
}

impl CMat {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![C64::new(0.0, 0.0); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    pub fn from_real_diagonal(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = C64::new(v, 0.0);
        }
        m
    }

    /// Builds from nested rows. Fails if the rows are ragged or non-square.
    pub fn from_rows(rows: Vec<Vec<C64>>) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidArgument(format!(
                    "matrix row {i} has length {} but the matrix has {n} rows",
                    row.len()
                )));
            }
            data.extend(row);
        }
        Ok(Self { n, data })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn rows(&self) -> Vec<Vec<C64>> {
        self.data.chunks(self.n.max(1)).map(|r| r.to_vec()).take(self.n).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "matmul dimension mismatch");
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            let row = &mut out.data[i * n..(i + 1) * n];
            for k in 0..n {
                let a = self.data[i * n + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let brow = &other.data[k * n..(k + 1) * n];
                for (o, b) in row.iter_mut().zip(brow) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.n, v.len(), "matvec dimension mismatch");
        self.data
            .chunks(self.n.max(1))
            .take(self.n)
            .map(|row| row.iter().zip(v).fold(C64::new(0.0, 0.0), |acc, (a, b)| acc + a * b))
            .collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        Self { n: self.n, data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        Self { n: self.n, data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect() }
    }

    pub fn scale(&self, c: C64) -> Self {
        Self { n: self.n, data: self.data.iter().map(|a| a * c).collect() }
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        Self { n: self.n, data: self.data.iter().map(|&a| f(a)).collect() }
    }

    pub fn trace(&self) -> C64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|a| a.re.is_finite() && a.im.is_finite())
    }

    /// `max |a_ij − conj(a_ji)|`.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for j in i..self.n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// `(A + A*) / 2`.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.n, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }

    /// Column `j` as a vector.
    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.n).map(|i| self[(i, j)]).collect()
    }

    /// `Σ_j c_j · v_j v_j*` over the given columns of `vectors`.
    pub fn weighted_outer_sum(vectors: &Self, coeffs: &[(usize, f64)]) -> Self {
        let n = vectors.n;
        let mut out = Self::zeros(n);
        for &(col, c) in coeffs {
            if c == 0.0 {
                continue;
            }
            for i in 0..n {
                let vi = vectors[(i, col)] * c;
                for j in 0..n {
                    out[(i, j)] += vi * vectors[(j, col)].conj();
                }
            }
        }
        out
    }
}

impl Index<(usize, usize)> for CMat {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for CMat {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.n + j]
    }
}

impl Serialize for CMat {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<[f64; 2]>> = (0..self.n)
            .map(|i| (0..self.n).map(|j| [self[(i, j)].re, self[(i, j)].im]).collect())
            .collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for CMat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<Vec<[f64; 2]>> = Vec::deserialize(d)?;
        let rows = rows
            .into_iter()
            .map(|r| r.into_iter().map(|[re, im]| C64::new(re, im)).collect())
            .collect();
        CMat::from_rows(rows).map_err(serde::de::Error::custom)
    }
}

/// 2×2 unitary `[[pp, pq], [qp, qq]]` with `V* [[a_pp, a_pq], [conj a_pq, a_qq]] V`
/// diagonal. The complex phase of `a_pq` is absorbed first, then a real
/// Jacobi rotation annihilates the remaining real off-diagonal entry.
fn jacobi_rotation(app: f64, aqq: f64, apq: C64) -> [C64; 4] {
    let r = apq.norm();
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    if r == 0.0 {
        return [one, zero, zero, one];
    }
    let d = (apq / r).conj();
    let theta = (aqq - app) / (2.0 * r);
    let t = if theta == 0.0 {
        1.0
    } else {
        theta.signum() / (theta.abs() + theta.hypot(1.0))
    };
    let c = 1.0 / t.hypot(1.0);
    let s = t * c;
    [C64::new(c, 0.0), C64::new(s, 0.0), d * (-s), d * c]
}

/// Applies `A ← A V` on columns `p, q`.
fn rotate_columns(a: &mut CMat, p: usize, q: usize, v: &[C64; 4]) {
    for i in 0..a.n {
        let ap = a[(i, p)];
        let aq = a[(i, q)];
        a[(i, p)] = ap * v[0] + aq * v[2];
        a[(i, q)] = ap * v[1] + aq * v[3];
    }
}

/// Applies `A ← V* A` on rows `p, q`.
fn rotate_rows(a: &mut CMat, p: usize, q: usize, v: &[C64; 4]) {
    let (c00, c01, c10, c11) = (v[0].conj(), v[2].conj(), v[1].conj(), v[3].conj());
    for j in 0..a.n {
        let ap = a[(p, j)];
        let aq = a[(q, j)];
        a[(p, j)] = c00 * ap + c01 * aq;
        a[(q, j)] = c10 * ap + c11 * aq;
    }
}

fn off_diagonal_norm(a: &CMat) -> f64 {
    let mut s = 0.0;
    for i in 0..a.n {
        for j in 0..a.n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Eigendecomposition of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct Eigh {
    /// Eigenvalues in descending order.
    pub values: Vec<f64>,
    /// Unitary matrix whose columns are the matching eigenvectors.
    pub vectors: CMat,
}

/// Cyclic two-sided Jacobi eigensolver for Hermitian matrices.
pub fn eigh(a: &CMat) -> Result<Eigh> {
    let n = a.n;
    if !a.is_finite() {
        return Err(Error::NonFinite("eigh input".into()));
    }
    let defect = a.hermitian_defect();
    if defect > HERMITIAN_TOLERANCE * a.max_abs().max(1.0) {
        return Err(Error::NotHermitian { defect });
    }
    let mut w = a.hermitian_part();
    for i in 0..n {
        w[(i, i)] = C64::new(w[(i, i)].re, 0.0);
    }
    let mut v = CMat::identity(n);
    let frob = w.frobenius_norm();
    let mut converged = false;
    for _ in 0..JACOBI_MAX_SWEEPS {
        let off = off_diagonal_norm(&w);
        if off <= JACOBI_TOLERANCE * frob {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = w[(p, q)];
                if apq.norm() == 0.0 {
                    continue;
                }
                let rot = jacobi_rotation(w[(p, p)].re, w[(q, q)].re, apq);
                rotate_columns(&mut w, p, q, &rot);
                rotate_rows(&mut w, p, q, &rot);
                w[(p, q)] = C64::new(0.0, 0.0);
                w[(q, p)] = C64::new(0.0, 0.0);
                w[(p, p)] = C64::new(w[(p, p)].re, 0.0);
                w[(q, q)] = C64::new(w[(q, q)].re, 0.0);
                rotate_columns(&mut v, p, q, &rot);
            }
        }
    }
    if !converged {
        let off = off_diagonal_norm(&w);
        if off > JACOBI_TOLERANCE * frob {
            return Err(Error::NoConvergence { sweeps: JACOBI_MAX_SWEEPS, residual: off });
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| w[(j, j)].re.total_cmp(&w[(i, i)].re).then(i.cmp(&j)));
    let values = order.iter().map(|&i| w[(i, i)].re).collect();
    let vectors = CMat::from_fn(n, |r, c| v[(r, order[c])]);
    Ok(Eigh { values, vectors })
}

/// Singular value decomposition `A = U diag(σ) V*`.
#[derive(Clone, Debug)]
pub struct Svd {
    /// Left singular vectors; columns belonging to `σ = 0` are zero.
    pub u: CMat,
    /// Singular values in descending order.
    pub sigma: Vec<f64>,
    pub v: CMat,
}

/// One-sided (Hestenes) Jacobi SVD. Singular values carry high relative
/// accuracy, including exact-rank deficiency down to roundoff.
pub fn svd(a: &CMat) -> Result<Svd> {
    let n = a.n;
    if !a.is_finite() {
        return Err(Error::NonFinite("svd input".into()));
    }
    let mut w = a.clone();
    let mut v = CMat::identity(n);
    let tol = (n.max(1) as f64) * f64::EPSILON;
    // columns below this squared norm are numerically zero and left alone
    let negligible = (a.frobenius_norm() * f64::EPSILON).powi(2).max(f64::MIN_POSITIVE);
    let mut converged = false;
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let mut alpha = 0.0;
                let mut beta = 0.0;
                let mut gamma = C64::new(0.0, 0.0);
                for i in 0..n {
                    let wp = w[(i, p)];
                    let wq = w[(i, q)];
                    alpha += wp.norm_sqr();
                    beta += wq.norm_sqr();
                    gamma += wp.conj() * wq;
                }
                if alpha.min(beta) <= negligible
                    || gamma.norm() <= tol * (alpha * beta).sqrt()
                    || gamma.norm() == 0.0
                {
                    continue;
                }
                rotated = true;
                let rot = jacobi_rotation(alpha, beta, gamma);
                rotate_columns(&mut w, p, q, &rot);
                rotate_columns(&mut v, p, q, &rot);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence { sweeps: JACOBI_MAX_SWEEPS, residual: f64::NAN });
    }
    let norms: Vec<f64> = (0..n)
        .map(|j| (0..n).map(|i| w[(i, j)].norm_sqr()).sum::<f64>().sqrt())
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]).then(i.cmp(&j)));
    let sigma: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
    let u = CMat::from_fn(n, |r, c| {
        let s = sigma[c];
        if s > 0.0 {
            w[(r, order[c])] / s
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let v = CMat::from_fn(n, |r, c| v[(r, order[c])]);
    Ok(Svd { u, sigma, v })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn sample(n: usize, seed: u64) -> CMat {
        // small LCG; the algebra module owns the real generator
        let mut s = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let mut next = move || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        CMat::from_fn(n, |_, _| c(next(), next()))
    }

    #[test]
    fn rotation_diagonalizes_two_by_two() {
        let a = CMat::from_rows(vec![vec![c(2.0, 0.0), c(1.0, 1.0)], vec![c(1.0, -1.0), c(-1.0, 0.0)]])
            .unwrap();
        let rot = jacobi_rotation(2.0, -1.0, c(1.0, 1.0));
        let v = CMat::from_rows(vec![vec![rot[0], rot[1]], vec![rot[2], rot[3]]]).unwrap();
        let d = v.adjoint().matmul(&a).matmul(&v);
        assert!(d[(0, 1)].norm() < 1e-15);
        assert!(v.adjoint().matmul(&v).sub(&CMat::identity(2)).max_abs() < 1e-15);
    }

    #[test]
    fn eigh_reconstructs_random_hermitian() {
        for seed in 0..10 {
            let g = sample(7, seed);
            let h = g.add(&g.adjoint());
            let e = eigh(&h).unwrap();
            let recon = CMat::weighted_outer_sum(
                &e.vectors,
                &e.values.iter().copied().enumerate().collect::<Vec<_>>(),
            );
            assert!(recon.sub(&h).frobenius_norm() <= 1e-12 * h.frobenius_norm());
            let gram = e.vectors.adjoint().matmul(&e.vectors);
            assert!(gram.sub(&CMat::identity(7)).max_abs() < 1e-12);
            assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn eigh_rejects_non_hermitian() {
        let a = CMat::from_rows(vec![vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(0.0, 0.0), c(0.0, 0.0)]])
            .unwrap();
        assert!(matches!(eigh(&a), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn svd_reconstructs_and_detects_rank() {
        let g = sample(5, 3);
        let s = svd(&g).unwrap();
        let us = CMat::from_fn(5, |i, j| s.u[(i, j)] * s.sigma[j]);
        assert!(us.matmul(&s.v.adjoint()).sub(&g).max_abs() < 1e-13);

        // rank one: v w*
        let r1 = CMat::from_fn(4, |i, j| c((i + 1) as f64, 0.0) * c(1.0, (j as f64) * 0.5));
        let s = svd(&r1).unwrap();
        assert!(s.sigma[0] > 1.0);
        assert!(s.sigma[1..].iter().all(|&x| x < 1e-14 * s.sigma[0]));
    }
}
