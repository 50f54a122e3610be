//! JSON shapes of the command outputs.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use optiphase_core::{OptimizerResult, ProbeState, StrategyReport};
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::input::{to_pair, Pair};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrategyJson {
    pub cost: f64,
    pub fidelity: f64,
    pub posterior_uncertainty: f64,
    /// Estimate attached to each outcome, ascending.
    pub phases: Vec<f64>,
    /// Measurement basis, one vector per outcome, in the order of `phases`.
    pub basis: Vec<Vec<Pair>>,
}

impl From<&StrategyReport> for StrategyJson {
    fn from(r: &StrategyReport) -> Self {
        StrategyJson {
            cost: r.cost,
            fidelity: r.fidelity,
            posterior_uncertainty: r.posterior_uncertainty,
            phases: r.measurement.phases().to_vec(),
            basis: r
                .measurement
                .basis()
                .iter()
                .map(|v| v.iter().copied().map(to_pair).collect())
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizerJson {
    pub state: Vec<Pair>,
    pub cost: f64,
    pub iterations: usize,
    pub converged: bool,
    pub fidelity_trace: Vec<f64>,
}

impl From<&OptimizerResult> for OptimizerJson {
    fn from(r: &OptimizerResult) -> Self {
        OptimizerJson {
            state: amplitudes(&r.state),
            cost: r.cost,
            iterations: r.iterations,
            converged: r.converged,
            fidelity_trace: r.fidelity_trace.clone(),
        }
    }
}

pub fn amplitudes(state: &ProbeState) -> Vec<Pair> {
    state.amplitudes().iter().copied().map(to_pair).collect()
}

/// Opens `path` for writing, or stdout when `None`.
pub fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// Pretty-printed JSON followed by a newline.
pub fn write_json<T: Serialize>(value: &T, path: Option<&Path>) -> Result<()> {
    let mut w = output(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

/// Twelve significant digits in scientific notation.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.11e}")
}
