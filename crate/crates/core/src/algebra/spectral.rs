//! Spectral calculus on block operators: Hermitian eigendecomposition,
//! singular value decomposition, polar decomposition, spectral projections
//! and spectral truncation.

use super::operator::Operator;
use super::projection::Projection;
use super::shape::AlgebraShape;
use crate::error::{Error, Result};
use crate::linalg::{self, CMat, C64};

/// Eigenvalues at distance at most this from an interval endpoint count as
/// inside (closed intervals, inclusive tie-break).
pub const BOUNDARY_TOLERANCE: f64 = 1e-12;

/// Per-block eigendecomposition of a Hermitian operator.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    pub shape: AlgebraShape,
    /// Eigenvalues per block, descending.
    pub values: Vec<Vec<f64>>,
    /// Eigenvector matrices per block (columns match `values`).
    pub vectors: Vec<CMat>,
}

impl SpectralDecomposition {
    /// `Σ_k U_k diag(f(λ)) U_k*`.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> Operator {
        let blocks = self
            .values
            .iter()
            .zip(&self.vectors)
            .map(|(vals, vecs)| {
                let coeffs: Vec<(usize, f64)> = vals.iter().map(|&l| f(l)).enumerate().collect();
                CMat::weighted_outer_sum(vecs, &coeffs).hermitian_part()
            })
            .collect();
        Operator::from_blocks(&self.shape, blocks).expect("dimensions preserved")
    }

    pub fn reconstruct(&self) -> Operator {
        self.apply(|l| l)
    }

    /// Projection onto eigenvectors whose eigenvalue satisfies `keep`.
    pub fn projection_where(&self, keep: impl Fn(f64) -> bool) -> Projection {
        let cols: Vec<Vec<usize>> = self
            .values
            .iter()
            .map(|vals| vals.iter().enumerate().filter(|(_, &l)| keep(l)).map(|(i, _)| i).collect())
            .collect();
        Projection::from_columns(&self.shape, &self.vectors, &cols)
    }

    /// All eigenvalues with the weight of the block they come from.
    pub fn weighted_values(&self) -> Vec<(f64, f64)> {
        self.shape
            .blocks()
            .iter()
            .zip(&self.values)
            .flat_map(|(b, vals)| vals.iter().map(move |&l| (l, b.weight)))
            .collect()
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().flatten().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().flatten().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Eigendecomposition of a Hermitian operator (descending per block).
pub fn eigh(x: &Operator) -> Result<SpectralDecomposition> {
    let mut values = Vec::with_capacity(x.blocks().len());
    let mut vectors = Vec::with_capacity(x.blocks().len());
    for b in x.blocks() {
        let e = linalg::eigh(b)?;
        values.push(e.values);
        vectors.push(e.vectors);
    }
    Ok(SpectralDecomposition { shape: x.shape().clone(), values, vectors })
}

/// Per-block singular value decomposition `x_k = U_k diag(σ_k) V_k*`.
#[derive(Clone, Debug)]
pub struct SingularDecomposition {
    pub shape: AlgebraShape,
    pub sigma: Vec<Vec<f64>>,
    pub u: Vec<CMat>,
    pub v: Vec<CMat>,
}

impl SingularDecomposition {
    /// `Σ_k U_k diag(f(σ)) V_k*`, i.e. `phase · f(|x|)` when `f(0) = 0`.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> Operator {
        let blocks = self
            .sigma
            .iter()
            .zip(self.u.iter().zip(&self.v))
            .map(|(s, (u, v))| {
                let d = u.dim();
                let mut m = CMat::zeros(d);
                for (c, &sc) in s.iter().enumerate() {
                    let fc = f(sc);
                    if fc == 0.0 {
                        continue;
                    }
                    for i in 0..d {
                        let ui = u[(i, c)] * fc;
                        for j in 0..d {
                            m[(i, j)] += ui * v[(j, c)].conj();
                        }
                    }
                }
                m
            })
            .collect();
        Operator::from_blocks(&self.shape, blocks).expect("dimensions preserved")
    }

    /// All singular values paired with their block weight.
    pub fn weighted_values(&self) -> Vec<(f64, f64)> {
        self.shape
            .blocks()
            .iter()
            .zip(&self.sigma)
            .flat_map(|(b, s)| s.iter().map(move |&v| (v, b.weight)))
            .collect()
    }

    /// Largest singular value, i.e. `‖x‖∞`.
    pub fn max_value(&self) -> f64 {
        self.sigma.iter().filter_map(|s| s.first().copied()).fold(0.0, f64::max)
    }
}

pub fn svd(x: &Operator) -> Result<SingularDecomposition> {
    let mut sigma = Vec::new();
    let mut u = Vec::new();
    let mut v = Vec::new();
    for b in x.blocks() {
        let s = linalg::svd(b)?;
        sigma.push(s.sigma);
        u.push(s.u);
        v.push(s.v);
    }
    Ok(SingularDecomposition { shape: x.shape().clone(), sigma, u, v })
}

/// Numerical rank threshold for a block with largest singular value `smax`.
fn rank_tolerance(dim: usize, smax: f64) -> f64 {
    dim as f64 * f64::EPSILON * smax
}

/// Polar decomposition `x = phase · |x|`.
///
/// `|x| = (x*x)^{1/2}`; `phase` is the partial isometry from the support of
/// `|x|` onto the range of `x` and vanishes on the kernel of `|x|`.
pub fn polar_abs(x: &Operator) -> Result<(Operator, Operator)> {
    let sd = svd(x)?;
    let mut abs_blocks = Vec::new();
    let mut phase_blocks = Vec::new();
    for ((s, u), v) in sd.sigma.iter().zip(&sd.u).zip(&sd.v) {
        let d = u.dim();
        let smax = s.first().copied().unwrap_or(0.0);
        let tol = rank_tolerance(d, smax);
        let coeffs: Vec<(usize, f64)> = s.iter().copied().enumerate().collect();
        abs_blocks.push(CMat::weighted_outer_sum(v, &coeffs).hermitian_part());
        let mut ph = CMat::zeros(d);
        for (c, &sc) in s.iter().enumerate() {
            if sc <= tol || sc == 0.0 {
                continue;
            }
            for i in 0..d {
                for j in 0..d {
                    ph[(i, j)] += u[(i, c)] * v[(j, c)].conj();
                }
            }
        }
        phase_blocks.push(ph);
    }
    Ok((
        Operator::from_blocks(x.shape(), abs_blocks)?,
        Operator::from_blocks(x.shape(), phase_blocks)?,
    ))
}

/// Projection onto the span of eigenvectors of Hermitian `x` with eigenvalue
/// in the closed interval `[lo, hi]` (endpoints widened by
/// [`BOUNDARY_TOLERANCE`]).
pub fn spectral_projection(x: &Operator, lo: f64, hi: f64) -> Result<Projection> {
    if lo.is_nan() || hi.is_nan() || lo > hi {
        return Err(Error::InvalidArgument(format!("empty interval [{lo}, {hi}]")));
    }
    let sd = eigh(x)?;
    Ok(sd.projection_where(|l| l >= lo - BOUNDARY_TOLERANCE && l <= hi + BOUNDARY_TOLERANCE))
}

/// Splits `x = tall + flat` with `tall = phase · (|x| − level)₊`.
///
/// `‖flat‖∞ ≤ level` and `‖tall‖₁ = ∫ (μ_t(x) − level)₊ dt`. Level 0 returns
/// `(x, 0)` exactly.
pub fn spectral_truncate(x: &Operator, level: f64) -> Result<(Operator, Operator)> {
    if !(level >= 0.0) || !level.is_finite() {
        return Err(Error::InvalidArgument(format!("truncation level {level} must be ≥ 0")));
    }
    if level == 0.0 {
        return Ok((x.clone(), Operator::zeros(x.shape())));
    }
    let sd = svd(x)?;
    let tall = sd.apply(|s| (s - level).max(0.0));
    let flat = x.sub(&tall)?;
    Ok((tall, flat))
}

/// Positive and negative parts `h = h₊ − h₋` of a Hermitian operator.
pub fn jordan_parts(h: &Operator) -> Result<(Operator, Operator)> {
    let sd = eigh(h)?;
    Ok((sd.apply(|l| l.max(0.0)), sd.apply(|l| (-l).max(0.0))))
}

/// Splits an arbitrary `x` into four positive operators with
/// `x = p₀ − p₁ + i(p₂ − p₃)`.
pub fn positive_pieces(x: &Operator) -> Result<[Operator; 4]> {
    let (a, b) = jordan_parts(&x.real_part())?;
    let (c, d) = jordan_parts(&x.imag_part())?;
    Ok([a, b, c, d])
}

/// Recombines the output of [`positive_pieces`].
pub fn recombine_pieces(pieces: &[Operator; 4]) -> Result<Operator> {
    let re = pieces[0].sub(&pieces[1])?;
    let im = pieces[2].sub(&pieces[3])?;
    re.add(&im.scale(C64::new(0.0, 1.0)))
}
