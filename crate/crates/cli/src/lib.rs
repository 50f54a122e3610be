//! File formats, parameter sweeps and the command-line front end for
//! [`optiphase_core`].
//!
//! Every numerical result comes from the core crate; this crate only parses
//! inputs, schedules work on a thread pool and writes JSON and CSV.

pub mod error;
pub mod input;
pub mod profile;
pub mod report;
pub mod sweep;
pub mod verify;

use optiphase_core::optimizer::{ascend, restart_states, select_best};
use optiphase_core::{CircularPrior, OptimizerConfig, OptimizerResult};
use rayon::prelude::*;

pub use error::{CliError, Result};

/// [`optiphase_core::optimize_probe`] with the restarts spread over the
/// current rayon pool. The result is identical to the sequential one.
pub fn optimize_parallel(n: usize, prior: &CircularPrior, cfg: &OptimizerConfig) -> Result<OptimizerResult> {
    cfg.validate().map_err(CliError::Input)?;
    let starts = restart_states(n, cfg).map_err(CliError::Input)?;
    let runs: Vec<OptimizerResult> = starts
        .into_par_iter()
        .enumerate()
        .map(|(i, s)| ascend(s, prior, cfg, i))
        .collect();
    Ok(select_best(runs).expect("at least one restart"))
}

/// A pool with `jobs` workers, or one per logical CPU when `None`.
pub fn thread_pool(jobs: Option<usize>) -> Result<rayon::ThreadPool> {
    if jobs == Some(0) {
        return Err(CliError::Usage("--jobs must be positive".into()));
    }
    Ok(rayon::ThreadPoolBuilder::new().num_threads(jobs.unwrap_or(0)).build()?)
}
