//! Cross-checks of the closed-form results against the brute-force oracles.

use optiphase_core::oracle::{self, QuadratureGrid};
use optiphase_core::{evaluate_strategy, CircularPrior, OffDiagonalBlock, PhaseMeasurement, ProbeState};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{CliError, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Worst observed discrepancy.
    pub worst: f64,
    pub tolerance: f64,
}

impl Check {
    fn new(name: impl Into<String>, worst: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            passed: worst <= tolerance,
            worst,
            tolerance,
        }
    }
}

struct Instance {
    state: ProbeState,
    prior: CircularPrior,
}

fn instance(seed: u64, index: u64, max_n: usize) -> Result<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let n = rng.gen_range(1..=max_n);
    let t = 10f64.powf(rng.gen_range(-2.0..1.0));
    Ok(Instance {
        state: ProbeState::haar_random(n, &mut rng),
        prior: CircularPrior::diffusive(t, optiphase_core::prior::DEFAULT_TRUNCATION_TOL).map_err(CliError::Input)?,
    })
}

fn haar_measurement(rng: &mut ChaCha8Rng, d: usize) -> PhaseMeasurement {
    let mut v = optiphase_core::linalg::CMatrix::zeros(d, d);
    for j in 0..d {
        let col = ProbeState::haar_random(d - 1, rng);
        v.column_mut(j).copy_from_slice(col.amplitudes());
    }
    // The unitary polar factor of a Gaussian matrix is Haar distributed.
    let svd = optiphase_core::linalg::svd(&v);
    let u = &svd.u * &svd.v.adjoint();
    let phases = (0..d)
        .map(|_| rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI))
        .collect();
    PhaseMeasurement::new(u.columns().map(<[_]>::to_vec).collect(), phases).expect("unitary columns")
}

/// Runs the oracle suite with `instances` random cases per check.
pub fn run(seed: u64, instances: usize) -> Result<Vec<Check>> {
    let cases: Vec<Instance> = (0..instances as u64)
        .map(|i| instance(seed, i, 6))
        .collect::<Result<_>>()?;
    let mut checks = Vec::new();

    let worst = cases
        .par_iter()
        .map(|c| {
            let block = OffDiagonalBlock::from_state(&c.state, &c.prior);
            let m = block.optimal_measurement();
            let report = evaluate_strategy(&c.state.to_density(), &c.prior, &m).map_err(CliError::Numerical)?;
            Ok((report.cost - block.optimal_cost()).abs())
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    checks.push(Check::new("saturation round-trip", worst, 1e-12));

    let worst = cases
        .par_iter()
        .enumerate()
        .map(|(i, c)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
            rng.set_stream(i as u64);
            let m = haar_measurement(&mut rng, c.state.dimension());
            let grid = QuadratureGrid::resolving(c.state.photon_number(), &c.prior);
            let direct = oracle::quadrature_cost(&c.state, &c.prior, &m, &grid).map_err(CliError::Numerical)?;
            let closed = evaluate_strategy(&c.state.to_density(), &c.prior, &m).map_err(CliError::Numerical)?;
            Ok((direct - closed.cost).abs())
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    checks.push(Check::new("quadrature agrees with closed form", worst, 1e-6));

    let worst = cases
        .par_iter()
        .enumerate()
        .map(|(i, c)| {
            let optimum = OffDiagonalBlock::from_state(&c.state, &c.prior).optimal_cost();
            let found = oracle::random_strategy_search(&c.state, &c.prior, 200, seed.wrapping_add(i as u64))
                .map_err(CliError::Numerical)?;
            Ok((optimum - found).max(0.0))
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    checks.push(Check::new("random strategies never beat the optimum", worst, 1e-9));

    let mut worst: f64 = 0.0;
    for n in 1..=20 {
        let (lambda, vector) = oracle::tridiagonal_dominant(n).map_err(CliError::Numerical)?;
        let bw = ProbeState::berry_wiseman(n).map_err(CliError::Numerical)?;
        let cost = OffDiagonalBlock::from_state(&bw, &CircularPrior::uniform()).optimal_cost();
        worst = worst.max((cost - 2.0 * (1.0 - lambda)).abs());
        for (a, v) in bw.amplitudes().iter().zip(&vector) {
            worst = worst.max((a.re - v).abs());
        }
    }
    checks.push(Check::new(
        "uniform prior optimum is the tridiagonal eigenvector",
        worst,
        1e-10,
    ));

    Ok(checks)
}
