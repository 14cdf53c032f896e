//! Seeded random members of each constructible kernel family.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{AutomorphismTerm, KernelRep, Recipe};
use crate::algebra::random::{gaussian_block, rng};
use crate::algebra::{random_unitary, AlgebraShape};
use crate::error::{Error, Result};
use crate::linalg::CMat;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelFamily {
    /// Mixture of inner automorphisms `Ad u`.
    UnitaryMixture,
    /// Mixture of automorphisms that may also permute equivalent blocks.
    Automorphisms,
    Pinching,
    /// Diagonal shapes only.
    Markov,
    /// Single-block shapes only.
    Schur,
    /// Composition of two random members of the base families.
    Compose,
    /// Convex combination of two random members of the base families.
    Convex,
}

impl KernelFamily {
    pub const ALL: [KernelFamily; 7] = [
        KernelFamily::UnitaryMixture,
        KernelFamily::Automorphisms,
        KernelFamily::Pinching,
        KernelFamily::Markov,
        KernelFamily::Schur,
        KernelFamily::Compose,
        KernelFamily::Convex,
    ];

    pub fn supports(self, shape: &AlgebraShape) -> bool {
        match self {
            KernelFamily::Markov => shape.is_diagonal(),
            KernelFamily::Schur => shape.num_blocks() == 1,
            _ => true,
        }
    }

    /// Families usable on `shape`, in declaration order.
    pub fn applicable(shape: &AlgebraShape) -> Vec<KernelFamily> {
        Self::ALL.into_iter().filter(|f| f.supports(shape)).collect()
    }

    fn is_base(self) -> bool {
        !matches!(self, KernelFamily::Compose | KernelFamily::Convex)
    }
}

fn probabilities(n: usize, r: &mut impl Rng) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| -(1.0 - r.random::<f64>()).ln()).collect();
    let sum: f64 = raw.iter().sum();
    raw.into_iter().map(|v| v / sum).collect()
}

/// Random permutation of blocks that only swaps blocks of equal dimension
/// and weight.
fn block_map(shape: &AlgebraShape, r: &mut impl Rng) -> Vec<usize> {
    let blocks = shape.blocks();
    let mut map: Vec<usize> = (0..blocks.len()).collect();
    let mut seen = vec![false; blocks.len()];
    for k in 0..blocks.len() {
        if seen[k] {
            continue;
        }
        let class: Vec<usize> = (k..blocks.len())
            .filter(|&l| blocks[l].dim == blocks[k].dim && blocks[l].weight == blocks[k].weight)
            .collect();
        let mut targets = class.clone();
        targets.shuffle(r);
        for (&src, &dst) in class.iter().zip(&targets) {
            seen[src] = true;
            map[src] = dst;
        }
    }
    map
}

fn partition(d: usize, r: &mut impl Rng) -> Vec<Vec<usize>> {
    let cells = r.random_range(1..=d);
    let mut groups = vec![Vec::new(); cells];
    for i in 0..d {
        groups[r.random_range(0..cells)].push(i);
    }
    groups.retain(|g| !g.is_empty());
    groups
}

fn markov_matrix(shape: &AlgebraShape, r: &mut impl Rng) -> Vec<Vec<f64>> {
    let n = shape.num_blocks();
    let w: Vec<f64> = shape.blocks().iter().map(|b| b.weight).collect();
    if w.iter().all(|&v| v == w[0]) {
        // Birkhoff mixture: doubly stochastic
        let p = probabilities(3, r);
        let mut k = vec![vec![0.0; n]; n];
        for &pi in &p {
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(r);
            for (i, &j) in perm.iter().enumerate() {
                k[i][j] += pi;
            }
        }
        return k;
    }
    let raw: Vec<Vec<f64>> = (0..n).map(|_| (0..n).map(|_| r.random::<f64>()).collect()).collect();
    let row_max = raw.iter().map(|row| row.iter().sum::<f64>()).fold(0.0, f64::max);
    let col_room = (0..n)
        .map(|j| w[j] / (0..n).map(|i| w[i] * raw[i][j]).sum::<f64>())
        .fold(f64::INFINITY, f64::min);
    let s = (1.0 / row_max).min(col_room);
    raw.into_iter().map(|row| row.into_iter().map(|v| v * s).collect()).collect()
}

/// `c · G G*` normalized to unit diagonal, `c ∈ [1/2, 1]`.
fn schur_multiplier(d: usize, r: &mut impl Rng) -> CMat {
    let g = gaussian_block(d, r);
    let gram = g.matmul(&g.adjoint());
    let c = r.random_range(0.5..=1.0);
    CMat::from_fn(d, |i, j| gram[(i, j)] * (c / (gram[(i, i)].re * gram[(j, j)].re).sqrt()))
        .hermitian_part()
}

/// A random recipe of the given family; errors when the family does not
/// support the shape.
pub fn random_recipe(shape: &AlgebraShape, family: KernelFamily, seed: u64) -> Result<Recipe> {
    if !family.supports(shape) {
        return Err(Error::InvalidKernel(format!("family {family:?} does not support shape {shape}")));
    }
    let mut r = rng(seed);
    Ok(match family {
        KernelFamily::UnitaryMixture | KernelFamily::Automorphisms => {
            let n = r.random_range(1..=3);
            let weights = probabilities(n, &mut r);
            let terms = weights
                .into_iter()
                .map(|weight| AutomorphismTerm {
                    weight,
                    unitary: random_unitary(shape, r.random()),
                    block_map: (family == KernelFamily::Automorphisms).then(|| block_map(shape, &mut r)),
                })
                .collect();
            Recipe::Automorphisms { terms }
        }
        KernelFamily::Pinching => {
            Recipe::Pinching { partition: shape.dims().map(|d| partition(d, &mut r)).collect() }
        }
        KernelFamily::Markov => Recipe::Markov { matrix: markov_matrix(shape, &mut r) },
        KernelFamily::Schur => Recipe::Schur { multiplier: schur_multiplier(shape.blocks()[0].dim, &mut r) },
        KernelFamily::Compose | KernelFamily::Convex => {
            let base: Vec<KernelFamily> =
                KernelFamily::applicable(shape).into_iter().filter(|f| f.is_base()).collect();
            let kernels = (0..2)
                .map(|_| random_recipe(shape, base[r.random_range(0..base.len())], r.random()))
                .collect::<Result<Vec<_>>>()?;
            if family == KernelFamily::Compose {
                Recipe::Compose { kernels }
            } else {
                Recipe::Convex { weights: probabilities(2, &mut r), kernels }
            }
        }
    })
}

pub fn random_kernel(shape: &AlgebraShape, family: KernelFamily, seed: u64) -> Result<KernelRep> {
    KernelRep::from_recipe(shape, random_recipe(shape, family, seed)?)
}

/// Cycles through the applicable families, one kernel per seed offset.
pub fn random_kernels(shape: &AlgebraShape, count: usize, seed: u64) -> Result<Vec<KernelRep>> {
    let fams = KernelFamily::applicable(shape);
    (0..count)
        .map(|i| random_kernel(shape, fams[i % fams.len()], seed.wrapping_add(i as u64)))
        .collect()
}
