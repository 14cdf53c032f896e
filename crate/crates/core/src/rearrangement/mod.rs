//! Generalized singular value functions and rearrangement-invariant norms.

mod majorization;
mod norms;
mod orlicz;
mod probes;
mod step;

pub use majorization::{majorization_check, MajorizationReport, MAJORIZATION_TOLERANCE};
pub use norms::{k_decomposition, norm_eval, NormId};
pub use orlicz::{
    delta2_check, luxemburg, orlicz_norm, Delta2Report, GrowthRegime, OrliczFunction, OrliczKind,
    DELTA2_RATIO_CAP,
};
pub use probes::{
    embedding_probe, norm_axiom_suite, AxiomOutcome, AxiomReport, EmbeddingReport, AXIOM_TOLERANCE,
};
pub use step::{mu, StepFunction};
