//! Seeded random elements.
//!
//! Entries are drawn from ChaCha8 seeded with the caller's `u64`; a general
//! element has i.i.d. entries `(a + ib)/√2` with `a, b ~ N(0, 1)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::operator::Operator;
use super::shape::AlgebraShape;
use crate::error::{Error, Result};
use crate::linalg::{CMat, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OperatorKind {
    General,
    Hermitian,
    /// `G G* / dim` for a general `G`.
    Psd,
    /// Projection of total rank `rank_budget`, spread over blocks at random.
    Projection { rank_budget: usize },
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub(crate) fn gaussian_c64(rng: &mut impl Rng) -> C64 {
    let a: f64 = rng.sample(StandardNormal);
    let b: f64 = rng.sample(StandardNormal);
    C64::new(a, b) * std::f64::consts::FRAC_1_SQRT_2
}

pub(crate) fn gaussian_block(dim: usize, rng: &mut impl Rng) -> CMat {
    CMat::from_fn(dim, |_, _| gaussian_c64(rng))
}

/// Haar-ish unitary from modified Gram–Schmidt on a Gaussian matrix.
pub(crate) fn unitary_block(dim: usize, rng: &mut impl Rng) -> CMat {
    let g = gaussian_block(dim, rng);
    let mut cols: Vec<Vec<C64>> = (0..dim).map(|j| g.column(j)).collect();
    for j in 0..dim {
        for i in 0..j {
            let (done, rest) = cols.split_at_mut(j);
            let qi = &done[i];
            let proj: C64 = qi.iter().zip(&rest[0]).map(|(a, b)| a.conj() * b).sum();
            for (x, q) in rest[0].iter_mut().zip(qi) {
                *x -= proj * q;
            }
        }
        let norm = cols[j].iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        for x in cols[j].iter_mut() {
            *x /= norm;
        }
    }
    CMat::from_fn(dim, |i, j| cols[j][i])
}

/// Block-diagonal random unitary.
pub fn random_unitary(shape: &AlgebraShape, seed: u64) -> Operator {
    let mut r = rng(seed);
    let blocks = shape.dims().map(|d| unitary_block(d, &mut r)).collect();
    Operator::from_blocks(shape, blocks).expect("dimensions match")
}

/// Deterministic random element of the requested kind.
pub fn random_operator(shape: &AlgebraShape, kind: OperatorKind, seed: u64) -> Result<Operator> {
    let mut r = rng(seed);
    let blocks: Vec<CMat> = match kind {
        OperatorKind::General => shape.dims().map(|d| gaussian_block(d, &mut r)).collect(),
        OperatorKind::Hermitian => {
            shape.dims().map(|d| gaussian_block(d, &mut r).hermitian_part()).collect()
        }
        OperatorKind::Psd => shape
            .dims()
            .map(|d| {
                let g = gaussian_block(d, &mut r);
                g.matmul(&g.adjoint()).scale(C64::new(1.0 / d as f64, 0.0)).hermitian_part()
            })
            .collect(),
        OperatorKind::Projection { rank_budget } => {
            let total = shape.total_dim();
            if rank_budget > total {
                return Err(Error::InvalidArgument(format!(
                    "rank budget {rank_budget} exceeds total dimension {total}"
                )));
            }
            let mut ranks = vec![0usize; shape.num_blocks()];
            for _ in 0..rank_budget {
                let open: Vec<usize> = shape
                    .dims()
                    .enumerate()
                    .filter(|&(k, d)| ranks[k] < d)
                    .map(|(k, _)| k)
                    .collect();
                let k = open[r.random_range(0..open.len())];
                ranks[k] += 1;
            }
            shape
                .dims()
                .zip(&ranks)
                .map(|(d, &rk)| {
                    let u = unitary_block(d, &mut r);
                    let coeffs: Vec<(usize, f64)> = (0..rk).map(|i| (i, 1.0)).collect();
                    CMat::weighted_outer_sum(&u, &coeffs).hermitian_part()
                })
                .collect()
        }
    };
    Operator::from_blocks(shape, blocks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::spectral;

    #[test]
    fn deterministic_per_seed() {
        let s = AlgebraShape::new([(3, 1.0), (2, 0.25)]).unwrap();
        for kind in [
            OperatorKind::General,
            OperatorKind::Hermitian,
            OperatorKind::Psd,
            OperatorKind::Projection { rank_budget: 3 },
        ] {
            let a = random_operator(&s, kind, 11).unwrap();
            let b = random_operator(&s, kind, 11).unwrap();
            assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
            assert_ne!(a, random_operator(&s, kind, 12).unwrap());
        }
    }

    #[test]
    fn kind_constraints() {
        let s = AlgebraShape::new([(4, 1.0), (2, 0.5)]).unwrap();
        let p = random_operator(&s, OperatorKind::Psd, 3).unwrap();
        assert!(spectral::eigh(&p).unwrap().min_value() >= -1e-12);
        let z = random_operator(&s, OperatorKind::Projection { rank_budget: 0 }, 3).unwrap();
        assert!(z.is_zero());
        let q = random_operator(&s, OperatorKind::Projection { rank_budget: 4 }, 3).unwrap();
        let pr = crate::algebra::Projection::new(q).unwrap();
        assert_eq!(pr.ranks().iter().sum::<usize>(), 4);
        assert!(random_operator(&s, OperatorKind::Projection { rank_budget: 7 }, 3).is_err());
    }
}
