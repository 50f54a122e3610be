//! Probe states on the `N+1` dimensional photon-number-difference basis.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};

/// Amplitudes with modulus at or below this are treated as zero when fixing
/// the global phase.
const PHASE_REFERENCE_FLOOR: f64 = 1e-10;

/// Pure probe state `sum_n alpha_n |n>`, `n = 0..=N`.
///
/// Always normalized, with the first non-negligible amplitude real and
/// positive.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbeState {
    amplitudes: Vec<Complex64>,
}

impl ProbeState {
    /// Normalizes `raw` and fixes its global phase. `N = raw.len() - 1`.
    pub fn from_amplitudes(raw: Vec<Complex64>) -> Result<Self> {
        if raw.is_empty() {
            return Err(Error::InvalidState("no amplitudes given"));
        }
        if raw.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::InvalidState("non-finite amplitude"));
        }
        let nrm = linalg::norm(&raw);
        if nrm == 0.0 {
            return Err(Error::InvalidState("zero vector cannot be normalized"));
        }
        let mut amplitudes: Vec<Complex64> = raw.into_iter().map(|z| z / nrm).collect();
        if let Some(reference) = amplitudes.iter().find(|z| z.norm() > PHASE_REFERENCE_FLOOR) {
            let unphase = reference.conj() / reference.norm();
            for z in &mut amplitudes {
                *z *= unphase;
            }
        }
        Ok(ProbeState { amplitudes })
    }

    pub fn from_real(raw: &[f64]) -> Result<Self> {
        Self::from_amplitudes(raw.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// `(|0> + |N>) / sqrt(2)`.
    pub fn noon(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroPhotonNumber);
        }
        let mut a = vec![0.0; n + 1];
        a[0] = 1.0;
        a[n] = 1.0;
        Self::from_real(&a)
    }

    /// Sine-profile state `alpha_n = sqrt(2/(N+2)) sin((n+1) pi / (N+2))`,
    /// the Perron vector of the tridiagonal matrix with `1/2` off the diagonal.
    pub fn berry_wiseman(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroPhotonNumber);
        }
        let m = (n + 2) as f64;
        let a: Vec<f64> = (0..=n)
            .map(|k| (2.0 / m).sqrt() * ((k + 1) as f64 * PI / m).sin())
            .collect();
        Self::from_real(&a)
    }

    /// `alpha_n = sqrt(binomial(N, n) / 2^N)`: N independent photons split
    /// evenly.
    pub fn classical_binomial(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroPhotonNumber);
        }
        // Build the binomial row in log space so large N cannot overflow.
        let mut log_c = 0.0f64;
        let mut a = Vec::with_capacity(n + 1);
        for k in 0..=n {
            if k > 0 {
                log_c += ((n - k + 1) as f64).ln() - (k as f64).ln();
            }
            a.push((0.5 * (log_c - n as f64 * core::f64::consts::LN_2)).exp());
        }
        Self::from_real(&a)
    }

    /// Equal-weight superposition of all `N+1` basis states.
    pub fn flat(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroPhotonNumber);
        }
        Self::from_real(&vec![1.0; n + 1])
    }

    /// Basis state `|k>` in dimension `N+1`.
    pub fn basis(n: usize, k: usize) -> Result<Self> {
        if k > n {
            return Err(Error::InvalidState("basis index exceeds photon number"));
        }
        let mut a = vec![0.0; n + 1];
        a[k] = 1.0;
        Self::from_real(&a)
    }

    /// Haar-random pure state (normalized complex Gaussian vector).
    pub fn haar_random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        loop {
            let raw: Vec<Complex64> = (0..=n)
                .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
                .collect();
            if let Ok(state) = Self::from_amplitudes(raw) {
                return state;
            }
        }
    }

    pub fn photon_number(&self) -> usize {
        self.amplitudes.len() - 1
    }

    pub fn dimension(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// `|<self|other>|^2`, or zero when the dimensions differ.
    pub fn overlap(&self, other: &ProbeState) -> f64 {
        if self.dimension() != other.dimension() {
            return 0.0;
        }
        linalg::inner(&self.amplitudes, &other.amplitudes).norm_sqr()
    }

    /// `|psi><psi|`.
    pub fn to_density(&self) -> DensityMatrix {
        let a = &self.amplitudes;
        DensityMatrix {
            matrix: CMatrix::from_fn(a.len(), a.len(), |n, m| a[n] * a[m].conj()),
        }
    }
}

/// Mixed probe state `rho = sum rho^n_m |n><m|`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity (1e-12), unit trace (1e-12) and positivity
    /// (smallest eigenvalue >= -1e-10).
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() || matrix.rows() == 0 {
            return Err(Error::InvalidDensityMatrix("matrix must be square and non-empty"));
        }
        if matrix.hermitian_defect() > 1e-12 {
            return Err(Error::InvalidDensityMatrix("matrix is not Hermitian"));
        }
        if (matrix.trace() - Complex64::new(1.0, 0.0)).norm() > 1e-12 {
            return Err(Error::InvalidDensityMatrix("trace differs from one"));
        }
        if linalg::hermitian_eigen(&matrix).values[0] < -1e-10 {
            return Err(Error::InvalidDensityMatrix("matrix has a negative eigenvalue"));
        }
        Ok(DensityMatrix { matrix })
    }

    pub fn dimension(&self) -> usize {
        self.matrix.rows()
    }

    pub fn photon_number(&self) -> usize {
        self.matrix.rows() - 1
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn entry(&self, n: usize, m: usize) -> Complex64 {
        self.matrix[(n, m)]
    }
}

impl From<&ProbeState> for DensityMatrix {
    fn from(state: &ProbeState) -> Self {
        state.to_density()
    }
}
