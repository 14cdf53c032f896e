use serde::{Deserialize, Serialize};

use super::operator::Operator;
use super::shape::AlgebraShape;
use super::spectral;
use crate::error::{Error, Result};
use crate::linalg::CMat;

/// Entrywise tolerance for `P = P*` and `P² = P`.
pub const PROJECTION_TOLERANCE: f64 = 1e-10;
/// Eigenvalue cut deciding membership in the intersection of ranges.
pub const MEET_TOLERANCE: f64 = 1e-9;

/// An orthogonal projection with its per-block rank.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProjectionRepr", into = "ProjectionRepr")]
pub struct Projection {
    op: Operator,
    ranks: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct ProjectionRepr {
    operator: Operator,
    ranks: Vec<usize>,
}

impl TryFrom<ProjectionRepr> for Projection {
    type Error = Error;
    fn try_from(r: ProjectionRepr) -> Result<Self> {
        let p = Projection::new(r.operator)?;
        if p.ranks != r.ranks {
            return Err(Error::InvalidArgument(format!(
                "recorded ranks {:?} disagree with the operator ({:?})",
                r.ranks, p.ranks
            )));
        }
        Ok(p)
    }
}

impl From<Projection> for ProjectionRepr {
    fn from(p: Projection) -> Self {
        ProjectionRepr { operator: p.op, ranks: p.ranks }
    }
}

impl Projection {
    /// Validates `op` as a projection and reads off its ranks.
    pub fn new(op: Operator) -> Result<Self> {
        let herm = op.hermitian_defect();
        let sq = op.mul(&op)?.sub(&op)?.max_abs();
        let defect = herm.max(sq);
        if defect > PROJECTION_TOLERANCE {
            return Err(Error::NotAProjection { defect });
        }
        let ranks = op.blocks().iter().map(|b| b.trace().re.round().max(0.0) as usize).collect();
        Ok(Self { op, ranks })
    }

    /// `Σ v v*` over the selected orthonormal columns in each block.
    pub(crate) fn from_columns(shape: &AlgebraShape, vectors: &[CMat], cols: &[Vec<usize>]) -> Self {
        let blocks: Vec<CMat> = vectors
            .iter()
            .zip(cols)
            .map(|(v, c)| {
                let coeffs: Vec<(usize, f64)> = c.iter().map(|&i| (i, 1.0)).collect();
                CMat::weighted_outer_sum(v, &coeffs).hermitian_part()
            })
            .collect();
        let ranks = cols.iter().map(Vec::len).collect();
        Self { op: Operator::from_blocks(shape, blocks).expect("dimensions preserved"), ranks }
    }

    pub fn identity(shape: &AlgebraShape) -> Self {
        Self { op: Operator::identity(shape), ranks: shape.dims().collect() }
    }

    pub fn zero(shape: &AlgebraShape) -> Self {
        Self { op: Operator::zeros(shape), ranks: vec![0; shape.num_blocks()] }
    }

    pub fn operator(&self) -> &Operator {
        &self.op
    }

    pub fn shape(&self) -> &AlgebraShape {
        self.op.shape()
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    /// `τ(P) = Σ_k weight_k · rank_k`.
    pub fn trace(&self) -> f64 {
        self.shape().blocks().iter().zip(&self.ranks).map(|(b, &r)| b.weight * r as f64).sum()
    }

    /// `τ(1 − P)`.
    pub fn defect(&self) -> f64 {
        self.shape()
            .blocks()
            .iter()
            .zip(&self.ranks)
            .map(|(b, &r)| b.weight * (b.dim - r) as f64)
            .sum()
    }

    pub fn is_identity(&self) -> bool {
        self.ranks.iter().zip(self.shape().dims()).all(|(&r, d)| r == d)
    }

    pub fn complement(&self) -> Projection {
        let op = Operator::identity(self.shape()).sub(&self.op).expect("same shape");
        let ranks = self.ranks.iter().zip(self.shape().dims()).map(|(&r, d)| d - r).collect();
        Projection { op, ranks }
    }

    /// `P x P`.
    pub fn compress(&self, x: &Operator) -> Result<Operator> {
        self.op.mul(x)?.mul(&self.op)
    }

    /// Smallest eigenvalue of `other − self`; `self ≤ other` in the PSD order
    /// when this is ≥ −tolerance.
    pub fn order_gap(&self, other: &Projection) -> Result<f64> {
        let d = other.op.sub(&self.op)?;
        Ok(spectral::eigh(&d)?.min_value())
    }
}

/// Projection onto the intersection of the ranges `⋀ P_i`.
///
/// Computed as the spectral projection of `Σ (1 − P_i)` at eigenvalue 0; the
/// subadditivity `τ(1 − ⋀ P_i) ≤ Σ τ(1 − P_i)` is checked on the output.
pub fn meet_projections(ps: &[Projection]) -> Result<Projection> {
    let first = ps
        .first()
        .ok_or_else(|| Error::InvalidArgument("meet of an empty collection".into()))?;
    let shape = first.shape().clone();
    if ps.len() == 1 {
        return Ok(first.clone());
    }
    let mut sum = Operator::zeros(&shape);
    for p in ps {
        if p.shape() != &shape {
            return Err(Error::mismatch(&shape, p.shape()));
        }
        if p.is_identity() {
            continue;
        }
        sum = sum.add(&p.complement().op)?;
    }
    let sd = spectral::eigh(&sum)?;
    let meet = sd.projection_where(|l| l <= MEET_TOLERANCE);
    let bound: f64 = ps.iter().map(Projection::defect).sum();
    let got = meet.defect();
    if got > bound * (1.0 + 1e-12) + 1e-300 {
        return Err(Error::InvalidArgument(format!(
            "meet defect {got} exceeds the subadditive bound {bound}"
        )));
    }
    Ok(meet)
}
