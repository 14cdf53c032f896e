use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;

use clap::Parser;

use super::config::parse_config;
use super::rows::{emit, Format};
use super::run::{dump, run, Command};
use crate::error::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "ncerg", version, about = "Ergodic averages of positive kernels on finite tracial algebras")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Experiment configuration (TOML).
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long, global = true, env = "NCERG_SEED", value_name = "U64")]
    pub seed: Option<u64>,
    /// Output file; standard output when absent.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Exit with status 1 when any row fails.
    #[arg(long, global = true)]
    pub strict: bool,
    /// Write the resolved config and intermediate artifacts here.
    #[arg(long, global = true, value_name = "DIR")]
    pub dump: Option<PathBuf>,
}

fn execute(cli: &Cli) -> Result<bool> {
    let path = cli.config.as_ref().ok_or_else(|| Error::Config(vec!["--config <PATH> is required".into()]))?;
    let text = fs::read_to_string(path).map_err(|source| Error::Io { path: path.clone(), source })?;
    let mut config = parse_config(&text)?;
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    let output = run(&config, cli.command)?;
    if let Some(dir) = &cli.dump {
        dump(dir, &config, cli.command, &output)?;
    }
    emit(&output.rows, cli.format, cli.out.as_deref())?;
    Ok(output.any_fail())
}

/// Parses `args` (program name first), runs, and returns the exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(any_fail) if any_fail && cli.strict => EXIT_FAIL,
        Ok(_) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}
