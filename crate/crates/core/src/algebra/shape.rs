use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One full matrix block `M_dim` carrying trace weight `weight`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Block {
    pub dim: usize,
    pub weight: f64,
}

/// A finite direct sum of full matrix blocks with weighted trace
/// `τ(x) = Σ_k weight_k · Tr(x_k)`.
///
/// Cheap to clone; operators hold their shape by value.
#[derive(Clone, PartialEq)]
pub struct AlgebraShape {
    blocks: Arc<[Block]>,
}

impl AlgebraShape {
    pub fn new(blocks: impl IntoIterator<Item = (usize, f64)>) -> Result<Self> {
        let blocks: Vec<Block> =
            blocks.into_iter().map(|(dim, weight)| Block { dim, weight }).collect();
        if blocks.is_empty() {
            return Err(Error::InvalidShape("at least one block is required".into()));
        }
        for (k, b) in blocks.iter().enumerate() {
            if b.dim == 0 {
                return Err(Error::InvalidShape(format!("block {k} has dimension 0")));
            }
            if !(b.weight.is_finite() && b.weight > 0.0) {
                return Err(Error::InvalidShape(format!(
                    "block {k} has weight {} (must be finite and > 0)",
                    b.weight
                )));
            }
        }
        let total: f64 = blocks.iter().map(|b| b.weight * b.dim as f64).sum();
        if !total.is_finite() {
            return Err(Error::InvalidShape("total trace is not finite".into()));
        }
        Ok(Self { blocks: blocks.into() })
    }

    /// A single block `M_dim` with trace weight `weight`.
    pub fn single(dim: usize, weight: f64) -> Result<Self> {
        Self::new([(dim, weight)])
    }

    /// The commutative algebra `ℓ^∞(n)` with point masses `weights`.
    pub fn diagonal(weights: &[f64]) -> Result<Self> {
        Self::new(weights.iter().map(|&w| (1, w)))
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn dims(&self) -> impl Iterator<Item = usize> + '_ {
        self.blocks.iter().map(|b| b.dim)
    }

    /// `τ(1)`.
    pub fn total_trace(&self) -> f64 {
        self.blocks.iter().map(|b| b.weight * b.dim as f64).sum()
    }

    /// Sum of block dimensions (size of a diagonal).
    pub fn total_dim(&self) -> usize {
        self.blocks.iter().map(|b| b.dim).sum()
    }

    /// Dimension of the vectorized algebra, `Σ dim_k²`.
    pub fn vec_dim(&self) -> usize {
        self.blocks.iter().map(|b| b.dim * b.dim).sum()
    }

    /// Start of each block in the vectorized layout.
    pub fn vec_offsets(&self) -> Vec<usize> {
        let mut off = 0;
        self.blocks
            .iter()
            .map(|b| {
                let o = off;
                off += b.dim * b.dim;
                o
            })
            .collect()
    }

    /// True when every block is one-dimensional.
    pub fn is_diagonal(&self) -> bool {
        self.blocks.iter().all(|b| b.dim == 1)
    }

    pub fn min_weight(&self) -> f64 {
        self.blocks.iter().map(|b| b.weight).fold(f64::INFINITY, f64::min)
    }

    pub fn to_pairs(&self) -> Vec<(usize, f64)> {
        self.blocks.iter().map(|b| (b.dim, b.weight)).collect()
    }
}

impl fmt::Debug for AlgebraShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for AlgebraShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, b) in self.blocks.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "({}, {})", b.dim, b.weight)?;
        }
        write!(f, "]")
    }
}

impl Serialize for AlgebraShape {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_pairs().serialize(s)
    }
}

impl<'de> Deserialize<'de> for AlgebraShape {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let pairs: Vec<(usize, f64)> = Vec::deserialize(d)?;
        AlgebraShape::new(pairs).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_degenerate_blocks() {
        assert!(AlgebraShape::new([(0, 1.0)]).is_err());
        assert!(AlgebraShape::new([(2, 0.0)]).is_err());
        assert!(AlgebraShape::new([(2, -1.0)]).is_err());
        assert!(AlgebraShape::new([(2, f64::NAN)]).is_err());
        assert!(AlgebraShape::new(Vec::<(usize, f64)>::new()).is_err());
    }

    #[test]
    fn total_trace_and_layout() {
        let s = AlgebraShape::new([(2, 0.5), (3, 2.0)]).unwrap();
        assert_eq!(s.total_trace(), 7.0);
        assert_eq!(s.vec_dim(), 13);
        assert_eq!(s.vec_offsets(), vec![0, 4]);
        assert_ne!(s, AlgebraShape::new([(3, 2.0), (2, 0.5)]).unwrap());
    }
}
