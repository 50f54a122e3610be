//! Prior phase distributions on the circle, held as Fourier coefficients.
//!
//! A density is represented as
//! `p(phi) = (1/2pi) * sum_k p_k exp(i k phi)` with `p_0 = 1` and
//! `p_{-k} = conj(p_k)`. Only `k >= 0` is stored.

use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default cut-off below which diffusive coefficients are dropped.
pub const DEFAULT_TRUNCATION_TOL: f64 = 1e-14;

/// Slack allowed for negative density values caused by truncation.
pub const POSITIVITY_SLACK: f64 = 1e-9;

/// Hard cap on the number of stored coefficients. Diffusive priors keep an
/// exact analytic tail beyond it, so the estimation routines are unaffected.
pub const MAX_STORED_ORDER: usize = 2048;

const VALIDATION_POINTS: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq)]
enum Tail {
    /// Coefficients beyond the stored order are zero.
    Zero,
    /// Heat-kernel tail `exp(-k^2 t) exp(-i k shift)`.
    Diffusive { t: f64, shift: f64 },
}

/// A probability density on `[-pi, pi)` described by its Fourier series.
#[derive(Clone, Debug, PartialEq)]
pub struct CircularPrior {
    coeffs: Vec<Complex64>,
    tail: Tail,
    label: Option<String>,
}

impl CircularPrior {
    /// Flat prior `1/2pi`: no a priori knowledge.
    pub fn uniform() -> Self {
        CircularPrior {
            coeffs: alloc::vec![Complex64::new(1.0, 0.0)],
            tail: Tail::Zero,
            label: Some(String::from("uniform")),
        }
    }

    /// Solution of the diffusion equation on the circle started from a point
    /// mass at zero, after time `t`: `p_k = exp(-k^2 t)`.
    ///
    /// The stored order `K` is the smallest integer with
    /// `exp(-(K+1)^2 t) < tol`, capped at [`MAX_STORED_ORDER`].
    pub fn diffusive(t: f64, tol: f64) -> Result<Self> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::InvalidDiffusionTime(t));
        }
        if !(tol > 0.0 && tol < 1.0) {
            return Err(Error::InvalidTolerance(tol));
        }
        let mut coeffs = alloc::vec![Complex64::new(1.0, 0.0)];
        let mut k = 1usize;
        while k <= MAX_STORED_ORDER {
            let pk = (-((k * k) as f64) * t).exp();
            if pk < tol {
                break;
            }
            coeffs.push(Complex64::new(pk, 0.0));
            k += 1;
        }
        Ok(CircularPrior {
            coeffs,
            tail: Tail::Diffusive { t, shift: 0.0 },
            label: None,
        })
    }

    /// Arbitrary prior from `p_0, p_1, ..., p_K`.
    ///
    /// `p_0` must equal one (within 1e-12; it is then stored as exactly one),
    /// every `|p_k| <= 1`, and the reconstructed density must be non-negative
    /// up to [`POSITIVITY_SLACK`] on a 4096-point grid.
    pub fn from_coefficients(coeffs: Vec<Complex64>) -> Result<Self> {
        let Some(p0) = coeffs.first() else {
            return Err(Error::InvalidPrior("empty coefficient list"));
        };
        if (p0 - Complex64::new(1.0, 0.0)).norm() > 1e-12 {
            return Err(Error::InvalidPrior("p_0 must equal 1"));
        }
        if coeffs.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::InvalidPrior("non-finite coefficient"));
        }
        if coeffs.iter().any(|z| z.norm() > 1.0 + 1e-12) {
            return Err(Error::InvalidPrior("coefficient magnitude exceeds 1"));
        }
        let mut coeffs = coeffs;
        coeffs[0] = Complex64::new(1.0, 0.0);
        // Trailing zeros carry no information.
        while coeffs.len() > 1 && coeffs.last() == Some(&Complex64::new(0.0, 0.0)) {
            coeffs.pop();
        }
        let prior = CircularPrior {
            coeffs,
            tail: Tail::Zero,
            label: None,
        };
        let points = VALIDATION_POINTS.max(8 * (prior.order() + 1));
        for j in 0..points {
            let phi = -PI + 2.0 * PI * j as f64 / points as f64;
            prior.density_at(phi)?;
        }
        Ok(prior)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    /// Number of stored coefficients beyond `p_0`.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Stored coefficients `p_0..=p_K`.
    pub fn coefficients(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Diffusion time if this is (a translate of) a diffusive prior.
    pub fn diffusion_time(&self) -> Option<f64> {
        match self.tail {
            Tail::Diffusive { t, .. } => Some(t),
            Tail::Zero => None,
        }
    }

    /// `p_k` for any integer `k`.
    ///
    /// Beyond the stored order, diffusive priors continue analytically and all
    /// other priors are zero.
    pub fn coefficient(&self, k: i64) -> Complex64 {
        if k < 0 {
            return self.coefficient(-k).conj();
        }
        let idx = k as usize;
        if let Some(z) = self.coeffs.get(idx) {
            return *z;
        }
        match self.tail {
            Tail::Zero => Complex64::new(0.0, 0.0),
            Tail::Diffusive { t, shift } => {
                let kf = k as f64;
                Complex64::from_polar((-kf * kf * t).exp(), -kf * shift)
            }
        }
    }

    /// Density value at `phi`, summed over the stored coefficients.
    ///
    /// Values in `[-POSITIVITY_SLACK, 0)` are clamped to zero; anything lower
    /// means the coefficient sequence is not a valid density.
    pub fn density_at(&self, phi: f64) -> Result<f64> {
        let step = Complex64::from_polar(1.0, phi);
        let mut phasor = Complex64::new(1.0, 0.0);
        let mut acc = 0.0;
        for pk in &self.coeffs[1..] {
            phasor *= step;
            acc += (pk * phasor).re;
        }
        let value = (1.0 + 2.0 * acc) / (2.0 * PI);
        if value >= 0.0 {
            Ok(value)
        } else if value >= -POSITIVITY_SLACK {
            Ok(0.0)
        } else {
            Err(Error::NegativeDensity { phase: phi, value })
        }
    }

    /// `sqrt( integral 4 sin^2(phi/2) p(phi) dphi ) = sqrt(2 - 2 Re p_1)`.
    pub fn prior_uncertainty(&self) -> f64 {
        (2.0 - 2.0 * self.coefficient(1).re).max(0.0).sqrt()
    }

    /// The same distribution translated by `theta`: `q(phi) = p(phi - theta)`,
    /// so `q_k = p_k exp(-i k theta)`.
    pub fn shifted(&self, theta: f64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, z)| z * Complex64::from_polar(1.0, -(k as f64) * theta))
            .collect();
        let tail = match self.tail {
            Tail::Zero => Tail::Zero,
            Tail::Diffusive { t, shift } => Tail::Diffusive {
                t,
                shift: shift + theta,
            },
        };
        CircularPrior {
            coeffs,
            tail,
            label: self.label.clone(),
        }
    }
}
