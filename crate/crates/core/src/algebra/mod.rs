//! Finite tracial matrix algebras `(M, τ)`: block shapes with weighted
//! traces, operators, spectral calculus and the projection lattice.

mod operator;
mod projection;
pub mod random;
mod shape;
pub mod spectral;

pub use operator::{algebra_ops, trace, AlgebraOp, Operator};
pub use projection::{meet_projections, Projection, MEET_TOLERANCE, PROJECTION_TOLERANCE};
pub use random::{random_operator, random_unitary, OperatorKind};
pub use shape::{AlgebraShape, Block};
pub use spectral::{
    eigh, polar_abs, spectral_projection, spectral_truncate, svd, SingularDecomposition,
    SpectralDecomposition,
};
