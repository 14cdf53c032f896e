use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraShape, Operator};
use crate::error::{Error, Result};
use crate::linalg::{eigh, CMat, C64};

/// Tolerance on `u u* = 1` for automorphism unitaries.
pub const UNITARY_TOLERANCE: f64 = 1e-10;
/// Tolerance on probability sums and row/column conditions.
pub const WEIGHT_TOLERANCE: f64 = 1e-12;
/// Tolerance on positivity of a Schur multiplier.
pub const PSD_TOLERANCE: f64 = 1e-10;

/// One automorphism `x ↦ u π(x) u*`: block `k` of `x` is moved to block
/// `block_map[k]` and conjugated there by the matching block of `unitary`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AutomorphismTerm {
    pub weight: f64,
    pub unitary: Operator,
    /// Target block for each source block; the identity map when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub block_map: Option<Vec<usize>>,
}

/// How a kernel was built. Re-expanding a recipe reproduces the superoperator
/// bit for bit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Recipe {
    Identity,
    Automorphisms { terms: Vec<AutomorphismTerm> },
    /// One partition of `0..dim` per block.
    Pinching { partition: Vec<Vec<Vec<usize>>> },
    Markov { matrix: Vec<Vec<f64>> },
    Schur { multiplier: CMat },
    /// `kernels[0] ∘ kernels[1] ∘ …` (the last one acts first).
    Compose { kernels: Vec<Recipe> },
    Convex { weights: Vec<f64>, kernels: Vec<Recipe> },
    /// A superoperator supplied directly; cannot be serialized.
    #[serde(skip)]
    Raw,
}

impl Recipe {
    pub fn is_raw(&self) -> bool {
        match self {
            Recipe::Raw => true,
            Recipe::Compose { kernels } | Recipe::Convex { kernels, .. } => {
                kernels.iter().any(Recipe::is_raw)
            }
            _ => false,
        }
    }

    /// Short family name used in reports.
    pub fn family(&self) -> &'static str {
        match self {
            Recipe::Identity => "identity",
            Recipe::Automorphisms { .. } => "automorphisms",
            Recipe::Pinching { .. } => "pinching",
            Recipe::Markov { .. } => "markov",
            Recipe::Schur { .. } => "schur",
            Recipe::Compose { .. } => "compose",
            Recipe::Convex { .. } => "convex",
            Recipe::Raw => "raw",
        }
    }

    /// Validates the recipe against `shape` and expands it to the dense
    /// superoperator.
    pub(crate) fn build(&self, shape: &AlgebraShape) -> Result<CMat> {
        match self {
            Recipe::Identity => Ok(CMat::identity(shape.vec_dim())),
            Recipe::Automorphisms { terms } => automorphisms(shape, terms),
            Recipe::Pinching { partition } => pinching(shape, partition),
            Recipe::Markov { matrix } => markov(shape, matrix),
            Recipe::Schur { multiplier } => schur(shape, multiplier),
            Recipe::Compose { kernels } => {
                let mut it = kernels.iter();
                let first = it
                    .next()
                    .ok_or_else(|| Error::InvalidKernel("compose of no kernels".into()))?;
                let mut m = first.build(shape)?;
                for k in it {
                    m = m.matmul(&k.build(shape)?);
                }
                Ok(m)
            }
            Recipe::Convex { weights, kernels } => {
                check_probabilities(weights, kernels.len())?;
                let mut m = CMat::zeros(shape.vec_dim());
                for (w, k) in weights.iter().zip(kernels) {
                    m = m.add(&k.build(shape)?.scale(C64::new(*w, 0.0)));
                }
                Ok(m)
            }
            Recipe::Raw => Err(Error::RawKernel),
        }
    }
}

pub(crate) fn check_probabilities(weights: &[f64], count: usize) -> Result<()> {
    if weights.len() != count || count == 0 {
        return Err(Error::InvalidKernel(format!(
            "{} weights for {count} terms",
            weights.len()
        )));
    }
    if let Some((i, w)) = weights.iter().enumerate().find(|(_, w)| !(w.is_finite() && **w >= 0.0)) {
        return Err(Error::InvalidKernel(format!("weight {i} is {w}")));
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > WEIGHT_TOLERANCE {
        return Err(Error::InvalidKernel(format!("weights sum to {sum}, not 1")));
    }
    Ok(())
}

fn automorphisms(shape: &AlgebraShape, terms: &[AutomorphismTerm]) -> Result<CMat> {
    let weights: Vec<f64> = terms.iter().map(|t| t.weight).collect();
    check_probabilities(&weights, terms.len())?;
    let offsets = shape.vec_offsets();
    let blocks = shape.blocks();
    let mut m = CMat::zeros(shape.vec_dim());
    for (t, term) in terms.iter().enumerate() {
        if term.unitary.shape() != shape {
            return Err(Error::mismatch(shape, term.unitary.shape()));
        }
        let defect = term
            .unitary
            .mul(&term.unitary.adjoint())?
            .sub(&Operator::identity(shape))?
            .max_abs();
        if defect > UNITARY_TOLERANCE {
            return Err(Error::NotUnitary { defect });
        }
        let map: Vec<usize> = match &term.block_map {
            Some(p) => p.clone(),
            None => (0..blocks.len()).collect(),
        };
        let mut seen = vec![false; blocks.len()];
        if map.len() != blocks.len() || map.iter().any(|&l| l >= blocks.len() || std::mem::replace(&mut seen[l], true)) {
            return Err(Error::InvalidKernel(format!("term {t}: block map {map:?} is not a permutation")));
        }
        for (k, &l) in map.iter().enumerate() {
            let (a, b) = (blocks[k], blocks[l]);
            let same_weight = (a.weight - b.weight).abs() <= WEIGHT_TOLERANCE * a.weight.max(b.weight);
            if a.dim != b.dim || !same_weight {
                return Err(Error::InvalidKernel(format!(
                    "term {t}: block {k} ({}, {}) cannot be mapped to block {l} ({}, {}) without breaking the trace",
                    a.dim, a.weight, b.dim, b.weight
                )));
            }
        }
        let w = C64::new(term.weight, 0.0);
        for (k, &l) in map.iter().enumerate() {
            let d = blocks[k].dim;
            let u = term.unitary.block(l);
            // E_ij ↦ u e_i e_j* u*, i.e. entry (a, b) = u[a,i] conj(u[b,j])
            for i in 0..d {
                for j in 0..d {
                    let col = offsets[k] + i * d + j;
                    for a in 0..d {
                        let ua = u[(a, i)] * w;
                        for b in 0..d {
                            m[(offsets[l] + a * d + b, col)] += ua * u[(b, j)].conj();
                        }
                    }
                }
            }
        }
    }
    Ok(m)
}

fn pinching(shape: &AlgebraShape, partition: &[Vec<Vec<usize>>]) -> Result<CMat> {
    if partition.len() != shape.num_blocks() {
        return Err(Error::InvalidKernel(format!(
            "{} partitions for {} blocks",
            partition.len(),
            shape.num_blocks()
        )));
    }
    let offsets = shape.vec_offsets();
    let mut m = CMat::zeros(shape.vec_dim());
    for (k, (cells, d)) in partition.iter().zip(shape.dims()).enumerate() {
        let mut cell_of = vec![usize::MAX; d];
        for (c, cell) in cells.iter().enumerate() {
            if cell.is_empty() {
                return Err(Error::InvalidKernel(format!("block {k}: cell {c} is empty")));
            }
            for &i in cell {
                if i >= d || cell_of[i] != usize::MAX {
                    return Err(Error::InvalidKernel(format!(
                        "block {k}: index {i} is out of range or repeated"
                    )));
                }
                cell_of[i] = c;
            }
        }
        if let Some(i) = cell_of.iter().position(|&c| c == usize::MAX) {
            return Err(Error::InvalidKernel(format!("block {k}: index {i} is in no cell")));
        }
        for i in 0..d {
            for j in 0..d {
                if cell_of[i] == cell_of[j] {
                    let idx = offsets[k] + i * d + j;
                    m[(idx, idx)] = C64::new(1.0, 0.0);
                }
            }
        }
    }
    Ok(m)
}

fn markov(shape: &AlgebraShape, k: &[Vec<f64>]) -> Result<CMat> {
    if !shape.is_diagonal() {
        return Err(Error::InvalidKernel(format!("Markov kernels need a diagonal shape, got {shape}")));
    }
    let n = shape.num_blocks();
    if k.len() != n || k.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidKernel(format!("Markov matrix must be {n}×{n}")));
    }
    for (i, row) in k.iter().enumerate() {
        if let Some(j) = row.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidKernel(format!("entry ({i}, {j}) = {} is not ≥ 0", row[j])));
        }
    }
    let (worst_row, row_sum) = k
        .iter()
        .map(|r| r.iter().sum::<f64>())
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .expect("n ≥ 1");
    if row_sum > 1.0 + WEIGHT_TOLERANCE {
        return Err(Error::InvalidKernel(format!("row {worst_row} sums to {row_sum} > 1")));
    }
    let w: Vec<f64> = shape.blocks().iter().map(|b| b.weight).collect();
    let (worst_col, excess) = (0..n)
        .map(|j| (0..n).map(|i| w[i] * k[i][j]).sum::<f64>() / w[j] - 1.0)
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .expect("n ≥ 1");
    if excess > WEIGHT_TOLERANCE {
        return Err(Error::InvalidKernel(format!(
            "column {worst_col} violates Σ_i w_i K_ij ≤ w_j by a relative {excess:e}"
        )));
    }
    Ok(CMat::from_fn(n, |i, j| C64::new(k[i][j], 0.0)))
}

fn schur(shape: &AlgebraShape, m: &CMat) -> Result<CMat> {
    if shape.num_blocks() != 1 {
        return Err(Error::InvalidKernel(format!("Schur multipliers need a single block, got {shape}")));
    }
    let d = shape.blocks()[0].dim;
    if m.dim() != d {
        return Err(Error::InvalidKernel(format!("multiplier is {}×{0}, block is {d}×{d}", m.dim())));
    }
    let min = eigh(m)?.values.last().copied().unwrap_or(0.0);
    if min < -PSD_TOLERANCE {
        return Err(Error::NotPositive { min_eigenvalue: min });
    }
    if let Some(i) = (0..d).find(|&i| m[(i, i)].re > 1.0 + WEIGHT_TOLERANCE) {
        return Err(Error::InvalidKernel(format!("diagonal entry {i} is {} > 1", m[(i, i)].re)));
    }
    let mut s = CMat::zeros(d * d);
    for i in 0..d {
        for j in 0..d {
            s[(i * d + j, i * d + j)] = m[(i, j)];
        }
    }
    Ok(s)
}
