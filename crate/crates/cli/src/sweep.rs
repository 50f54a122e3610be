//! Cost versus prior width for a list of probes.

use std::io::Write;
use std::str::FromStr;

use optiphase_core::prior::DEFAULT_TRUNCATION_TOL;
use optiphase_core::{optimal_strategy, CircularPrior, OptimizerConfig};
use rayon::prelude::*;

use crate::error::{CliError, Result};
use crate::input::{fixed_probe, Probe, StateArg};
use crate::report::fmt_float;

pub const HEADER: [&str; 6] = ["t", "delta_phi_prior", "state", "cost", "delta_phi", "ratio"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Spacing {
    Lin,
    Log,
}

/// Diffusion times `min:max:log|lin:count`, endpoints included.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TGrid {
    pub min: f64,
    pub max: f64,
    pub spacing: Spacing,
    pub count: usize,
}

impl TGrid {
    pub fn new(min: f64, max: f64, spacing: Spacing, count: usize) -> Result<Self, String> {
        if !(min.is_finite() && max.is_finite()) || min <= 0.0 {
            return Err(format!("diffusion times must be finite and positive, got {min}:{max}"));
        }
        if count == 0 {
            return Err("t-grid is empty".into());
        }
        if count == 1 && min != max {
            return Err("a single-point t-grid needs min == max".into());
        }
        if count > 1 && min >= max {
            return Err(format!("t-grid needs min < max, got {min}:{max}"));
        }
        Ok(TGrid {
            min,
            max,
            spacing,
            count,
        })
    }

    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                let s = i as f64 / last;
                let t = match self.spacing {
                    Spacing::Lin => self.min + (self.max - self.min) * s,
                    Spacing::Log => (self.min.ln() + (self.max.ln() - self.min.ln()) * s).exp(),
                };
                // pin the endpoints exactly
                if i == 0 {
                    self.min
                } else if i + 1 == self.count {
                    self.max
                } else {
                    t
                }
            })
            .collect()
    }
}

impl FromStr for TGrid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [min, max, spacing, count] = parts[..] else {
            return Err(format!("t-grid '{s}' is not min:max:log|lin:count"));
        };
        let num = |x: &str| x.parse::<f64>().map_err(|e| format!("bad number '{x}' in t-grid: {e}"));
        let spacing = match spacing {
            "log" => Spacing::Log,
            "lin" => Spacing::Lin,
            other => return Err(format!("t-grid spacing must be log or lin, got '{other}'")),
        };
        let count = count
            .parse::<usize>()
            .map_err(|e| format!("bad point count '{count}' in t-grid: {e}"))?;
        TGrid::new(num(min)?, num(max)?, spacing, count)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRecord {
    pub t: f64,
    pub delta_phi_prior: f64,
    pub state: String,
    pub cost: f64,
    pub delta_phi: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub n: usize,
    pub prior_tol: f64,
    pub optimizer: OptimizerConfig,
}

impl SweepConfig {
    pub fn new(n: usize) -> Self {
        SweepConfig {
            n,
            prior_tol: DEFAULT_TRUNCATION_TOL,
            optimizer: OptimizerConfig::default(),
        }
    }
}

enum Row {
    Fixed(Probe),
    Optimal,
}

/// One record per `(t, state)`, `t` outer, states in the given order.
///
/// Rows are computed on the current rayon pool; the output order does not
/// depend on scheduling.
pub fn run_sweep(ts: &[f64], states: &[StateArg], cfg: &SweepConfig) -> Result<Vec<SweepRecord>> {
    if ts.is_empty() || states.is_empty() {
        return Err(CliError::Usage("sweep needs at least one t and one state".into()));
    }
    cfg.optimizer.validate().map_err(CliError::Input)?;
    let rows: Vec<(String, Row)> = states
        .iter()
        .map(|s| {
            Ok((
                s.to_string(),
                match s {
                    StateArg::Optimal => Row::Optimal,
                    other => Row::Fixed(fixed_probe(other, Some(cfg.n))?),
                },
            ))
        })
        .collect::<Result<_>>()?;
    let priors: Vec<CircularPrior> = ts
        .iter()
        .map(|&t| CircularPrior::diffusive(t, cfg.prior_tol).map_err(CliError::Input))
        .collect::<Result<_>>()?;

    let jobs: Vec<(usize, usize)> = (0..ts.len())
        .flat_map(|i| (0..rows.len()).map(move |j| (i, j)))
        .collect();
    jobs.par_iter()
        .map(|&(i, j)| {
            let prior = &priors[i];
            let (label, row) = &rows[j];
            let cost = match row {
                Row::Fixed(probe) => optimal_strategy(&probe.density(), prior).cost,
                Row::Optimal => crate::optimize_parallel(cfg.n, prior, &cfg.optimizer)?.cost,
            };
            let delta_phi_prior = prior.prior_uncertainty();
            let delta_phi = cost.sqrt();
            Ok(SweepRecord {
                t: ts[i],
                delta_phi_prior,
                state: label.clone(),
                cost,
                delta_phi,
                ratio: delta_phi / delta_phi_prior,
            })
        })
        .collect()
}

pub fn write_csv<W: Write>(records: &[SweepRecord], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(HEADER)?;
    for r in records {
        w.write_record([
            fmt_float(r.t),
            fmt_float(r.delta_phi_prior),
            r.state.clone(),
            fmt_float(r.cost),
            fmt_float(r.delta_phi),
            fmt_float(r.ratio),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        let g: TGrid = "0.001:30:log:40".parse().unwrap();
        let v = g.values();
        assert_eq!(v.len(), 40);
        assert_eq!((v[0], v[39]), (0.001, 30.0));
        assert!(v.windows(2).all(|w| w[0] < w[1]));
        let ratio = v[1] / v[0];
        assert!(v.windows(2).all(|w| (w[1] / w[0] - ratio).abs() < 1e-9));

        let g: TGrid = "1:3:lin:3".parse().unwrap();
        assert_eq!(g.values(), vec![1.0, 2.0, 3.0]);
        assert_eq!("2:2:lin:1".parse::<TGrid>().unwrap().values(), vec![2.0]);

        for bad in [
            "1:3:lin:0",
            "3:1:log:5",
            "1:1:log:3",
            "0:1:log:3",
            "1:2:cubic:3",
            "1:2:3",
            "a:2:lin:3",
            "1:2:lin:-1",
        ] {
            assert!(bad.parse::<TGrid>().is_err(), "{bad}");
        }
    }

    #[test]
    fn records_follow_grid_order() {
        let ts = [0.01, 0.1, 1.0];
        let states = [StateArg::Bw, StateArg::Noon];
        let recs = run_sweep(&ts, &states, &SweepConfig::new(3)).unwrap();
        let keys: Vec<(f64, &str)> = recs.iter().map(|r| (r.t, r.state.as_str())).collect();
        assert_eq!(
            keys,
            vec![
                (0.01, "bw"),
                (0.01, "noon"),
                (0.1, "bw"),
                (0.1, "noon"),
                (1.0, "bw"),
                (1.0, "noon")
            ]
        );
        for r in &recs {
            assert_eq!(r.delta_phi, r.cost.sqrt());
            assert!(r.ratio > 0.0 && r.ratio <= 1.0);
        }
    }

    #[test]
    fn csv_layout() {
        let recs = run_sweep(&[0.5], &[StateArg::Flat], &SweepConfig::new(2)).unwrap();
        let mut buf = Vec::new();
        write_csv(&recs, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.split_terminator('\n').collect();
        assert_eq!(lines[0], "t,delta_phi_prior,state,cost,delta_phi,ratio");
        assert_eq!(lines.len(), 2);
        assert!(lines[1].starts_with("5.00000000000e-1,"));
        assert!(!text.contains('\r'));
    }

    #[test]
    fn rejects_bad_inputs() {
        assert_eq!(
            run_sweep(&[], &[StateArg::Bw], &SweepConfig::new(2))
                .unwrap_err()
                .exit_code(),
            2
        );
        assert_eq!(
            run_sweep(&[1.0], &[StateArg::Noon], &SweepConfig::new(0))
                .unwrap_err()
                .exit_code(),
            2
        );
    }
}
