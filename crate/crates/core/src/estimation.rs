//! Optimal single-shot estimation for a fixed probe state and prior.
//!
//! The average fidelity of a strategy with outcome phases `phi_k` and
//! projectors `|psi_k><psi_k|` is
//!
//! ```text
//! F = 1/2 + 2 Re Tr(B M),   M = 1/2 sum_k exp(-i phi_k) |psi_k><psi_k|,
//! ```
//!
//! where `B` is the off-diagonal block with entries
//! `B[n][m] = 1/2 rho[n][m] p_{n-m-1}`. The average cost under
//! `4 sin^2((phi - est)/2)` is `4 (1 - F)`. The maximum over all strategies
//! is `F = 1/2 + ||B||_1`, reached with `2M = V U^dagger` for the SVD
//! `B = U S V^dagger`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, Svd};
use crate::prior::CircularPrior;
use crate::state::{DensityMatrix, ProbeState};

/// Largest allowed entry of `G - I` for a measurement basis Gram matrix `G`.
pub const ORTHONORMALITY_TOL: f64 = 1e-10;

/// Maps any angle into `[-pi, pi)`.
pub fn wrap_phase(x: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let mut y = x - two_pi * ((x + PI) / two_pi).floor();
    if y >= PI {
        y -= two_pi;
    }
    if y < -PI {
        y += two_pi;
    }
    // -0.0 becomes 0.0
    y + 0.0
}

/// The block `B` from which cost and optimal measurement follow.
#[derive(Clone, Debug, PartialEq)]
pub struct OffDiagonalBlock {
    matrix: CMatrix,
}

impl OffDiagonalBlock {
    /// `B[n][m] = 1/2 rho[n][m] p_{n-m-1}` with `p_{-q} = conj(p_q)`.
    pub fn build(rho: &DensityMatrix, prior: &CircularPrior) -> Self {
        let d = rho.dimension();
        let matrix = CMatrix::from_fn(d, d, |n, m| {
            let q = n as i64 - m as i64 - 1;
            rho.entry(n, m) * prior.coefficient(q) * 0.5
        });
        OffDiagonalBlock { matrix }
    }

    pub fn from_state(state: &ProbeState, prior: &CircularPrior) -> Self {
        Self::build(&state.to_density(), prior)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dimension(&self) -> usize {
        self.matrix.rows()
    }

    pub fn svd(&self) -> Svd {
        linalg::svd(&self.matrix)
    }

    /// Sum of singular values.
    pub fn trace_norm(&self) -> f64 {
        self.svd().trace_norm()
    }

    /// Best achievable fidelity, `1/2 + ||B||_1`.
    pub fn optimal_fidelity(&self) -> f64 {
        0.5 + self.trace_norm()
    }

    /// Minimal average cost `4 (1/2 - ||B||_1)`, clamped at zero.
    pub fn optimal_cost(&self) -> f64 {
        (4.0 * (0.5 - self.trace_norm())).max(0.0)
    }

    /// The cost-minimizing projective measurement and estimator.
    pub fn optimal_measurement(&self) -> PhaseMeasurement {
        measurement_from_svd(&self.svd())
    }

    /// Fidelity of an arbitrary strategy: `1/2 + sum_k Re[e^{-i phi_k} <psi_k|B|psi_k>]`.
    pub fn fidelity_of(&self, m: &PhaseMeasurement) -> Result<f64> {
        if m.dimension() != self.dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.dimension(),
                found: m.dimension(),
            });
        }
        let overlap: f64 = m
            .outcomes()
            .map(|(psi, phi)| (Complex64::from_polar(1.0, -phi) * self.matrix.quadratic_form(psi)).re)
            .sum();
        Ok(0.5 + overlap)
    }
}

/// Builds the measurement `V U^dagger = sum_k e^{-i phi_k} |psi_k><psi_k|`
/// from given SVD factors of the block.
///
/// Any pair of unitary factors from a valid SVD gives an optimal strategy;
/// they differ only on degenerate or null singular subspaces.
pub fn measurement_from_svd(svd: &Svd) -> PhaseMeasurement {
    let w = &svd.v * &svd.u.adjoint();
    let eig = linalg::unitary_eigen(&w);
    let mut outcomes: Vec<(Vec<Complex64>, f64)> = eig
        .vectors
        .columns()
        .zip(&eig.values)
        .map(|(col, lambda)| (col.to_vec(), wrap_phase(-lambda.arg())))
        .collect();
    outcomes.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (basis, phases) = outcomes.into_iter().unzip();
    PhaseMeasurement { basis, phases }
}

/// Projective measurement on an orthonormal basis `psi_k`, reporting the
/// estimate `phi_k` for outcome `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseMeasurement {
    basis: Vec<Vec<Complex64>>,
    phases: Vec<f64>,
}

impl PhaseMeasurement {
    /// Checks orthonormality and wraps phases into `[-pi, pi)`. The outcome
    /// order is kept as given.
    pub fn new(basis: Vec<Vec<Complex64>>, phases: Vec<f64>) -> Result<Self> {
        let d = basis.len();
        if d == 0 {
            return Err(Error::InvalidMeasurement("empty basis"));
        }
        if phases.len() != d {
            return Err(Error::InvalidMeasurement("one phase per basis vector required"));
        }
        if let Some(v) = basis.iter().find(|v| v.len() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: v.len(),
            });
        }
        if phases.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidMeasurement("non-finite phase"));
        }
        let defect = gram_defect(&basis);
        // also rejects NaN
        if defect.is_nan() || defect > ORTHONORMALITY_TOL {
            return Err(Error::NonOrthonormalBasis(defect));
        }
        Ok(PhaseMeasurement {
            basis,
            phases: phases.into_iter().map(wrap_phase).collect(),
        })
    }

    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<Complex64>] {
        &self.basis
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn outcomes(&self) -> impl Iterator<Item = (&[Complex64], f64)> {
        self.basis.iter().map(Vec::as_slice).zip(self.phases.iter().copied())
    }

    /// `sum_k exp(-i phi_k) |psi_k><psi_k|`.
    pub fn unitary(&self) -> CMatrix {
        let d = self.dimension();
        let mut u = CMatrix::zeros(d, d);
        for (psi, phi) in self.outcomes() {
            let w = Complex64::from_polar(1.0, -phi);
            for m in 0..d {
                let c = w * psi[m].conj();
                for n in 0..d {
                    u[(n, m)] += psi[n] * c;
                }
            }
        }
        u
    }

    /// Largest entry of `G - I` for the basis Gram matrix `G`.
    pub fn gram_defect(&self) -> f64 {
        gram_defect(&self.basis)
    }
}

fn gram_defect(basis: &[Vec<Complex64>]) -> f64 {
    let mut worst = 0.0f64;
    for (i, a) in basis.iter().enumerate() {
        for (j, b) in basis.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            let g = linalg::inner(a, b);
            worst = worst.max((g - Complex64::new(target, 0.0)).norm());
        }
    }
    worst
}

/// Outcome of evaluating a strategy on a (state, prior) pair.
#[derive(Clone, Debug, PartialEq)]
pub struct StrategyReport {
    /// Average cost `4 (1 - F)`.
    pub cost: f64,
    pub fidelity: f64,
    /// `sqrt(cost)`.
    pub posterior_uncertainty: f64,
    pub measurement: PhaseMeasurement,
}

impl StrategyReport {
    fn from_fidelity(fidelity: f64, measurement: PhaseMeasurement) -> Self {
        let cost = (4.0 * (1.0 - fidelity)).max(0.0);
        StrategyReport {
            cost,
            fidelity,
            posterior_uncertainty: cost.sqrt(),
            measurement,
        }
    }
}

/// Average cost and fidelity of measurement `m` on probe `rho` under `prior`.
pub fn evaluate_strategy(rho: &DensityMatrix, prior: &CircularPrior, m: &PhaseMeasurement) -> Result<StrategyReport> {
    let block = OffDiagonalBlock::build(rho, prior);
    let fidelity = block.fidelity_of(m)?;
    Ok(StrategyReport::from_fidelity(fidelity, m.clone()))
}

/// Optimal measurement for `rho` under `prior`, evaluated.
pub fn optimal_strategy(rho: &DensityMatrix, prior: &CircularPrior) -> StrategyReport {
    let block = OffDiagonalBlock::build(rho, prior);
    let m = block.optimal_measurement();
    let fidelity = block.fidelity_of(&m).expect("measurement built from the same block");
    StrategyReport::from_fidelity(fidelity, m)
}

/// `p(k|phi) = |<psi_k| U_phi |psi>|^2` with `U_phi |n> = exp(-i n phi) |n>`.
///
/// One row per grid phase, one column per outcome.
pub fn conditional_probabilities(state: &ProbeState, m: &PhaseMeasurement, phases: &[f64]) -> Result<Vec<Vec<f64>>> {
    if m.dimension() != state.dimension() {
        return Err(Error::DimensionMismatch {
            expected: state.dimension(),
            found: m.dimension(),
        });
    }
    Ok(phases
        .iter()
        .map(|&phi| {
            let shifted = phase_shift(state.amplitudes(), phi);
            m.basis()
                .iter()
                .map(|psi| linalg::inner(psi, &shifted).norm_sqr())
                .collect()
        })
        .collect())
}

/// `U_phi` applied to an amplitude vector.
pub fn phase_shift(amplitudes: &[Complex64], phi: f64) -> Vec<Complex64> {
    amplitudes
        .iter()
        .enumerate()
        .map(|(n, a)| a * Complex64::from_polar(1.0, -(n as f64) * phi))
        .collect()
}

/// Quantum Fisher information of a pure state under `U_phi`: `4 Var(n)`.
pub fn qfi_pure(state: &ProbeState) -> f64 {
    let (mut mean, mut second) = (0.0, 0.0);
    for (n, a) in state.amplitudes().iter().enumerate() {
        let w = a.norm_sqr();
        let n = n as f64;
        mean += w * n;
        second += w * n * n;
    }
    (4.0 * (second - mean * mean)).max(0.0)
}
