//! Numerical laboratory for non-commutative symmetric spaces over finite
//! tracial matrix algebras and for the mean and bilateral almost-everywhere
//! ergodic theorems of positive Dunford–Schwartz kernels.
//!
//! The crate is organised bottom-up:
//!
//! - [`algebra`]: block algebras with weighted trace, spectral calculus, projections.
//! - [`rearrangement`]: singular value functions `μ_t(x)` and the symmetric norms
//!   `L₁`, `L∞`, `L₁∩L∞`, `L₁+L∞` and Orlicz.
//! - [`kernels`]: positive kernels as superoperators, their certification and fixed spaces.
//! - [`ergodic`]: Cesàro averages, d.s.a.e. witnesses and the two replication pipelines.
//! - [`expcli`]: TOML-configured experiments and the `ncerg` command line.

pub mod algebra;
pub mod error;
pub mod ergodic;
pub mod expcli;
pub mod kernels;
pub mod linalg;
pub mod rearrangement;

pub use error::{Error, Result};
