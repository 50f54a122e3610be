//! Optimal single-shot Bayesian phase estimation with arbitrary circular
//! priors.
//!
//! Given a probe state on the `N+1` photon-number-difference basis and a
//! prior density on the circle (stored as Fourier coefficients), this crate
//! computes the minimal average cost under `4 sin^2((phi - est)/2)`, the
//! projective measurement and estimator that attain it, and optimal probe
//! states found by alternating maximization.
//!
//! The crate is `no_std` and needs only `alloc`.
//!
//! ```
//! use optiphase_core::{CircularPrior, OffDiagonalBlock, ProbeState};
//!
//! let psi = ProbeState::berry_wiseman(10).unwrap();
//! let block = OffDiagonalBlock::from_state(&psi, &CircularPrior::uniform());
//! let expected = 2.0 * (1.0 - (core::f64::consts::PI / 12.0).cos());
//! assert!((block.optimal_cost() - expected).abs() < 1e-12);
//! ```

#![no_std]

extern crate alloc;

pub mod error;
pub mod estimation;
pub mod linalg;
pub mod optimizer;
pub mod oracle;
pub mod prior;
pub mod state;

pub use error::{Error, Result};
pub use estimation::{
    conditional_probabilities, evaluate_strategy, optimal_strategy, qfi_pure, wrap_phase, OffDiagonalBlock,
    PhaseMeasurement, StrategyReport,
};
pub use linalg::CMatrix;
pub use optimizer::{build_script_m, optimize_probe, OptimizerConfig, OptimizerResult};
pub use prior::CircularPrior;
pub use state::{DensityMatrix, ProbeState};
