//! Outcome probabilities `p(k|phi)` of the optimal measurement.

use std::f64::consts::PI;
use std::io::Write;

use optiphase_core::{conditional_probabilities, optimal_strategy, CircularPrior, ProbeState, StrategyReport};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::input::Pair;
use crate::report::{amplitudes, fmt_float};

#[derive(Clone, Debug)]
pub struct Profile {
    pub state: ProbeState,
    pub report: StrategyReport,
    /// `-pi + 2 pi j / points`.
    pub phis: Vec<f64>,
    /// `probabilities[j][k] = p(k | phis[j])`.
    pub probabilities: Vec<Vec<f64>>,
}

/// Written next to the CSV: estimates, probe and cost.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileSidecar {
    pub phases: Vec<f64>,
    pub amplitudes: Vec<Pair>,
    pub cost: f64,
    pub fidelity: f64,
}

pub fn profile(state: &ProbeState, prior: &CircularPrior, points: usize) -> Result<Profile> {
    if points == 0 {
        return Err(CliError::Usage("--points must be positive".into()));
    }
    let report = optimal_strategy(&state.to_density(), prior);
    let phis: Vec<f64> = (0..points).map(|j| -PI + 2.0 * PI * j as f64 / points as f64).collect();
    let probabilities = conditional_probabilities(state, &report.measurement, &phis).map_err(CliError::Numerical)?;
    Ok(Profile {
        state: state.clone(),
        report,
        phis,
        probabilities,
    })
}

impl Profile {
    pub fn header(&self) -> Vec<String> {
        std::iter::once("phi".to_string())
            .chain((0..self.state.dimension()).map(|k| format!("p{k}")))
            .collect()
    }

    pub fn sidecar(&self) -> ProfileSidecar {
        ProfileSidecar {
            phases: self.report.measurement.phases().to_vec(),
            amplitudes: amplitudes(&self.state),
            cost: self.report.cost,
            fidelity: self.report.fidelity,
        }
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        w.write_record(self.header())?;
        for (phi, row) in self.phis.iter().zip(&self.probabilities) {
            w.write_record(std::iter::once(fmt_float(*phi)).chain(row.iter().map(|&p| fmt_float(p))))?;
        }
        w.flush()?;
        Ok(())
    }
}
