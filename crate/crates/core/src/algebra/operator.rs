use serde::{Deserialize, Serialize};

use super::shape::AlgebraShape;
use crate::error::{Error, Result};
use crate::linalg::{CMat, C64};

/// An element of the block algebra `⊕_k M_{dim_k}`.
///
/// In finite dimension every element is measurable, integrable and bounded,
/// so a single type covers `L₀`, `L₁` and `L∞`; membership is a matter of
/// norms, not types.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "OperatorRepr", into = "OperatorRepr")]
pub struct Operator {
    shape: AlgebraShape,
    blocks: Vec<CMat>,
}

#[derive(Serialize, Deserialize)]
struct OperatorRepr {
    shape: AlgebraShape,
    blocks: Vec<CMat>,
}

impl TryFrom<OperatorRepr> for Operator {
    type Error = Error;
    fn try_from(r: OperatorRepr) -> Result<Self> {
        Operator::from_blocks(&r.shape, r.blocks)
    }
}

impl From<Operator> for OperatorRepr {
    fn from(o: Operator) -> Self {
        OperatorRepr { shape: o.shape, blocks: o.blocks }
    }
}

impl Operator {
    pub fn zeros(shape: &AlgebraShape) -> Self {
        Self { shape: shape.clone(), blocks: shape.dims().map(CMat::zeros).collect() }
    }

    pub fn identity(shape: &AlgebraShape) -> Self {
        Self { shape: shape.clone(), blocks: shape.dims().map(CMat::identity).collect() }
    }

    pub fn from_blocks(shape: &AlgebraShape, blocks: Vec<CMat>) -> Result<Self> {
        if blocks.len() != shape.num_blocks() {
            return Err(Error::InvalidArgument(format!(
                "{} blocks given for shape {shape}",
                blocks.len()
            )));
        }
        for (k, (b, d)) in blocks.iter().zip(shape.dims()).enumerate() {
            if b.dim() != d {
                return Err(Error::InvalidArgument(format!(
                    "block {k} has dimension {} but shape {shape} requires {d}",
                    b.dim()
                )));
            }
            if !b.is_finite() {
                return Err(Error::NonFinite(format!("operator block {k}")));
            }
        }
        Ok(Self { shape: shape.clone(), blocks })
    }

    /// Diagonal operator whose diagonal (concatenated over blocks) is `diag`.
    pub fn from_diagonal(shape: &AlgebraShape, diag: &[C64]) -> Result<Self> {
        if diag.len() != shape.total_dim() {
            return Err(Error::InvalidArgument(format!(
                "diagonal of length {} for shape {shape} (needs {})",
                diag.len(),
                shape.total_dim()
            )));
        }
        let mut it = diag.iter();
        let blocks = shape
            .dims()
            .map(|d| {
                let mut m = CMat::zeros(d);
                for i in 0..d {
                    m[(i, i)] = *it.next().expect("length checked");
                }
                m
            })
            .collect();
        Self::from_blocks(shape, blocks)
    }

    pub fn from_real_diagonal(shape: &AlgebraShape, diag: &[f64]) -> Result<Self> {
        let d: Vec<C64> = diag.iter().map(|&v| C64::new(v, 0.0)).collect();
        Self::from_diagonal(shape, &d)
    }

    pub fn shape(&self) -> &AlgebraShape {
        &self.shape
    }

    pub fn blocks(&self) -> &[CMat] {
        &self.blocks
    }

    pub fn block(&self, k: usize) -> &CMat {
        &self.blocks[k]
    }

    pub fn into_blocks(self) -> Vec<CMat> {
        self.blocks
    }

    fn check_same(&self, other: &Operator) -> Result<()> {
        if self.shape != other.shape {
            return Err(Error::mismatch(&self.shape, &other.shape));
        }
        Ok(())
    }

    fn zip_with(&self, other: &Operator, f: impl Fn(&CMat, &CMat) -> CMat) -> Result<Operator> {
        self.check_same(other)?;
        let blocks = self.blocks.iter().zip(&other.blocks).map(|(a, b)| f(a, b)).collect();
        Ok(Operator { shape: self.shape.clone(), blocks })
    }

    fn map_blocks(&self, f: impl Fn(&CMat) -> CMat) -> Operator {
        Operator { shape: self.shape.clone(), blocks: self.blocks.iter().map(f).collect() }
    }

    pub fn add(&self, other: &Operator) -> Result<Operator> {
        self.zip_with(other, CMat::add)
    }

    pub fn sub(&self, other: &Operator) -> Result<Operator> {
        self.zip_with(other, CMat::sub)
    }

    pub fn mul(&self, other: &Operator) -> Result<Operator> {
        self.zip_with(other, CMat::matmul)
    }

    /// Conjugate transpose, blockwise.
    pub fn adjoint(&self) -> Operator {
        self.map_blocks(CMat::adjoint)
    }

    pub fn scale(&self, c: C64) -> Operator {
        self.map_blocks(|b| b.scale(c))
    }

    pub fn scale_real(&self, c: f64) -> Operator {
        self.scale(C64::new(c, 0.0))
    }

    /// `τ(x) = Σ_k weight_k · Tr(x_k)`.
    pub fn trace(&self) -> C64 {
        self.shape
            .blocks()
            .iter()
            .zip(&self.blocks)
            .map(|(b, m)| m.trace() * b.weight)
            .sum()
    }

    /// `⟨x, y⟩_τ = τ(y* x)`.
    pub fn inner(&self, other: &Operator) -> Result<C64> {
        self.check_same(other)?;
        Ok(self
            .shape
            .blocks()
            .iter()
            .zip(self.blocks.iter().zip(&other.blocks))
            .map(|(b, (x, y))| {
                x.as_slice().iter().zip(y.as_slice()).map(|(a, c)| c.conj() * a).sum::<C64>()
                    * b.weight
            })
            .sum())
    }

    /// `‖x‖_{L₂(τ)} = τ(x* x)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        self.shape
            .blocks()
            .iter()
            .zip(&self.blocks)
            .map(|(b, m)| b.weight * m.frobenius_norm().powi(2))
            .sum::<f64>()
            .sqrt()
    }

    pub fn hermitian_defect(&self) -> f64 {
        self.blocks.iter().map(CMat::hermitian_defect).fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_defect() <= tol
    }

    /// `(x + x*) / 2`.
    pub fn real_part(&self) -> Operator {
        self.map_blocks(CMat::hermitian_part)
    }

    /// `(x − x*) / 2i`.
    pub fn imag_part(&self) -> Operator {
        self.map_blocks(|m| {
            CMat::from_fn(m.dim(), |i, j| (m[(i, j)] - m[(j, i)].conj()) * C64::new(0.0, -0.5))
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.blocks.iter().map(CMat::max_abs).fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.max_abs() == 0.0
    }

    /// Flattens into the fixed basis ordering used by superoperators: block by
    /// block, each block row-major.
    pub fn to_vec(&self) -> Vec<C64> {
        let mut v = Vec::with_capacity(self.shape.vec_dim());
        for b in &self.blocks {
            v.extend_from_slice(b.as_slice());
        }
        v
    }

    pub fn from_vec(shape: &AlgebraShape, v: &[C64]) -> Result<Operator> {
        if v.len() != shape.vec_dim() {
            return Err(Error::InvalidArgument(format!(
                "vector of length {} for shape {shape} (needs {})",
                v.len(),
                shape.vec_dim()
            )));
        }
        let mut off = 0;
        let blocks = shape
            .dims()
            .map(|d| {
                let mut m = CMat::zeros(d);
                m.as_mut_slice().copy_from_slice(&v[off..off + d * d]);
                off += d * d;
                m
            })
            .collect();
        Operator::from_blocks(shape, blocks)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Operator> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Binary and unary algebra operations, dispatched by name.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AlgebraOp {
    Add,
    Sub,
    Mul,
    Adjoint,
    Scale(C64),
}

/// Applies `op` blockwise. The second operand is ignored by unary operations.
pub fn algebra_ops(x: &Operator, y: &Operator, op: AlgebraOp) -> Result<Operator> {
    match op {
        AlgebraOp::Add => x.add(y),
        AlgebraOp::Sub => x.sub(y),
        AlgebraOp::Mul => x.mul(y),
        AlgebraOp::Adjoint => Ok(x.adjoint()),
        AlgebraOp::Scale(c) => Ok(x.scale(c)),
    }
}

/// `τ(x)`.
pub fn trace(x: &Operator) -> C64 {
    x.trace()
}
