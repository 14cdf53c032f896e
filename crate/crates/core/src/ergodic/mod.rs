//! Cesàro averages, their limits, projections witnessing bilateral
//! almost-everywhere convergence, and the two level-by-level replications.

mod cesaro;
mod prop1;
mod report;
mod theorem;
mod witness;

pub use cesaro::{
    cauchy_profile, cesaro, cesaro_direct, default_schedule, geometric_schedule, mean_limit, CauchyProfile,
    Trajectory, DEFAULT_SCHEDULE_EXP,
};
pub use prop1::{replicate_prop1, replicate_prop1_with};
pub use report::{Check, LevelRecord, ReplicationKind, ReplicationReport};
pub use theorem::{replicate_theorem, replicate_theorem_with, MAX_SHELLS, TAIL_FRACTION};
pub use witness::{
    dsae_check, maximal_projection, ProjectionWitness, WitnessKind, ESTIMATE_SLACK, GROUP_TOLERANCE,
    PSD_INPUT_TOLERANCE,
};
