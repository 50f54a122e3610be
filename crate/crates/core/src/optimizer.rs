//! Probe-state optimization by alternating maximization.
//!
//! For a fixed measurement the fidelity is a quadratic form in the probe
//! amplitudes, `F = <psi| S |psi>`, so the best probe is the top eigenvector
//! of `S`. For a fixed probe the best measurement comes from the SVD of the
//! off-diagonal block. Alternating the two never decreases `F`.

use alloc::vec::Vec;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::estimation::{OffDiagonalBlock, PhaseMeasurement};
use crate::linalg::{self, CMatrix};
use crate::prior::CircularPrior;
use crate::state::ProbeState;

/// Overlap with the top eigenvector of its own fidelity matrix that a final
/// iterate must reach to count as a fixed point.
pub const FIXED_POINT_OVERLAP: f64 = 1.0 - 1e-9;

/// Number of deterministic starting states used before random restarts.
pub const CANONICAL_STARTS: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OptimizerConfig {
    /// Stop once one iteration raises the fidelity by less than this.
    pub tol: f64,
    pub max_iter: usize,
    /// Total number of starting states. The first four are always the
    /// Berry-Wiseman, N00N, flat and binomial states; any further ones are
    /// Haar-random.
    pub restarts: usize,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            tol: 1e-12,
            max_iter: 1000,
            restarts: CANONICAL_STARTS,
            seed: 0,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::InvalidConfig("tol must be positive"));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidConfig("max_iter must be at least 1"));
        }
        if self.restarts == 0 {
            return Err(Error::InvalidConfig("restarts must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptimizerResult {
    /// Best probe found, first non-negligible amplitude real positive.
    pub state: ProbeState,
    /// Optimal cost for `state`.
    pub cost: f64,
    pub fidelity: f64,
    /// Fidelity of each iterate under its own optimal measurement.
    pub fidelity_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Index of the starting state that produced this result.
    pub restart: usize,
}

/// The matrix `S` with `<psi| S |psi> = F(psi, m)` for every probe `psi`.
///
/// `S[n][l] = sum_k psi_k[n] conj(psi_k[l]) I_{n-l}(phi_k)` where
/// `I_q(x) = 1/2 p_{-q} + 1/4 e^{-ix} p_{-q-1} + 1/4 e^{ix} p_{-q+1}` is the
/// prior average of `e^{iq phi} (1 + cos(phi - x)) / 2`.
pub fn build_script_m(m: &PhaseMeasurement, prior: &CircularPrior) -> CMatrix {
    let d = m.dimension();
    let offset = d as i64;
    // p_s for s in -d..=d
    let coeff: Vec<Complex64> = (-offset..=offset).map(|s| prior.coefficient(s)).collect();
    let p = |s: i64| coeff[(s + offset) as usize];

    let mut out = CMatrix::zeros(d, d);
    for (psi, phi) in m.outcomes() {
        let e = Complex64::from_polar(1.0, -phi);
        for l in 0..d {
            for n in 0..d {
                let q = n as i64 - l as i64;
                let weight = p(-q) * 0.5 + e * p(-q - 1) * 0.25 + e.conj() * p(-q + 1) * 0.25;
                out[(n, l)] += psi[n] * psi[l].conj() * weight;
            }
        }
    }
    out
}

/// Starting states for the restarts, in order.
pub fn restart_states(n: usize, cfg: &OptimizerConfig) -> Result<Vec<ProbeState>> {
    let mut states = Vec::with_capacity(cfg.restarts.max(CANONICAL_STARTS));
    states.push(ProbeState::berry_wiseman(n)?);
    states.push(ProbeState::noon(n)?);
    states.push(ProbeState::flat(n)?);
    states.push(ProbeState::classical_binomial(n)?);
    for r in CANONICAL_STARTS..cfg.restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(r as u64);
        states.push(ProbeState::haar_random(n, &mut rng));
    }
    Ok(states)
}

/// Runs the alternating iteration from one starting state.
pub fn ascend(initial: ProbeState, prior: &CircularPrior, cfg: &OptimizerConfig, restart: usize) -> OptimizerResult {
    let mut state = initial;
    let mut trace = Vec::new();
    let mut best: Option<(ProbeState, f64, PhaseMeasurement)> = None;
    let mut stalled = false;

    for _ in 0..cfg.max_iter {
        let block = OffDiagonalBlock::from_state(&state, prior);
        let measurement = block.optimal_measurement();
        let fidelity = block.fidelity_of(&measurement).expect("dimensions agree");
        let previous = trace.last().copied();
        trace.push(fidelity);

        if best.as_ref().is_none_or(|(_, f, _)| fidelity > *f) {
            best = Some((state.clone(), fidelity, measurement.clone()));
        }
        if previous.is_some_and(|p| fidelity - p < cfg.tol) {
            stalled = true;
            break;
        }

        let scripted = build_script_m(&measurement, prior);
        let eig = linalg::hermitian_eigen(&scripted);
        state = ProbeState::from_amplitudes(eig.top_vector().to_vec()).expect("eigenvectors are unit vectors");
    }

    let (state, fidelity, measurement) = best.expect("max_iter >= 1");
    let converged = stalled && is_fixed_point(&state, &measurement, prior);
    OptimizerResult {
        cost: (4.0 * (1.0 - fidelity)).max(0.0),
        state,
        fidelity,
        iterations: trace.len(),
        fidelity_trace: trace,
        converged,
        restart,
    }
}

/// True when `state` is (numerically) the top eigenvector of the fidelity
/// matrix built from `measurement`.
pub fn is_fixed_point(state: &ProbeState, measurement: &PhaseMeasurement, prior: &CircularPrior) -> bool {
    let eig = linalg::hermitian_eigen(&build_script_m(measurement, prior));
    linalg::inner(eig.top_vector(), state.amplitudes()).norm_sqr() >= FIXED_POINT_OVERLAP
}

/// Highest fidelity wins; ties go to the lower restart index.
pub fn select_best(results: impl IntoIterator<Item = OptimizerResult>) -> Option<OptimizerResult> {
    results.into_iter().fold(None, |acc, r| match acc {
        None => Some(r),
        Some(a) if r.fidelity > a.fidelity || (r.fidelity == a.fidelity && r.restart < a.restart) => Some(r),
        keep => keep,
    })
}

/// Finds a cost-minimizing pure probe with `n` photons for `prior`.
pub fn optimize_probe(n: usize, prior: &CircularPrior, cfg: &OptimizerConfig) -> Result<OptimizerResult> {
    cfg.validate()?;
    let starts = restart_states(n, cfg)?;
    Ok(
        select_best(starts.into_iter().enumerate().map(|(i, s)| ascend(s, prior, cfg, i)))
            .expect("at least one restart"),
    )
}
