//! TOML-configured experiments, result rows in CSV or JSON, and the `ncerg`
//! command line.

mod cli;
mod config;
mod rows;
mod run;

pub use cli::{main_with_args, Cli, EXIT_FAIL, EXIT_OK, EXIT_USAGE};
pub use config::{
    parse_config, Budgets, ElementClass, ElementSpec, ExperimentConfig, KernelSpec, RandomKernelSpec, DEFAULT_BOUND,
    DEFAULT_EPSILON, DEFAULT_N_MAX, DEFAULT_TOL, DEFAULT_TRIALS,
};
pub use rows::{emit, from_csv, from_json, render, to_csv, to_json, Format, ResultRow, RowVerdict, CSV_HEADER};
pub use run::{dump, replay_dump, run, Command, RunOutput, CONTRACTION_TOLERANCE, RECURRENCE_TOLERANCE};
