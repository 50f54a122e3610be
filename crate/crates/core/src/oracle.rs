//! Brute-force reference evaluators.
//!
//! Everything here works directly from the prior density and the phase-shifted
//! probe on an equally spaced grid. Nothing goes through the off-diagonal
//! block or its SVD, so agreement with [`crate::estimation`] is a genuine
//! cross-check. For trigonometric-polynomial integrands of degree below the
//! grid size the equally spaced rule is exact.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::estimation::PhaseMeasurement;
use crate::prior::CircularPrior;
use crate::state::ProbeState;

/// Default oracle grid size.
pub const DEFAULT_POINTS: usize = 4096;

/// Equally spaced nodes `-pi + 2 pi j / points`, `j = 0..points`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuadratureGrid {
    points: usize,
}

impl QuadratureGrid {
    pub fn new(points: usize) -> Result<Self> {
        if points < 2 {
            return Err(Error::UnderResolvedGrid { points, required: 2 });
        }
        Ok(QuadratureGrid { points })
    }

    /// Smallest grid this module accepts for an `n`-photon probe and `prior`.
    pub fn required_points(n: usize, prior: &CircularPrior) -> usize {
        8 * (n + prior.order() + 1)
    }

    /// The smallest power of two (at least 64) that resolves the integrand.
    pub fn resolving(n: usize, prior: &CircularPrior) -> Self {
        QuadratureGrid {
            points: Self::required_points(n, prior).next_power_of_two().max(64),
        }
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn spacing(&self) -> f64 {
        2.0 * PI / self.points as f64
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.points).map(move |j| -PI + self.spacing() * j as f64)
    }

    fn check(&self, n: usize, prior: &CircularPrior) -> Result<()> {
        let required = Self::required_points(n, prior);
        if self.points < required {
            return Err(Error::UnderResolvedGrid {
                points: self.points,
                required,
            });
        }
        Ok(())
    }
}

fn shifted_amplitudes(state: &ProbeState, phi: f64) -> Vec<Complex64> {
    let step = Complex64::from_polar(1.0, -phi);
    let mut phasor = Complex64::new(1.0, 0.0);
    state
        .amplitudes()
        .iter()
        .map(|a| {
            let v = a * phasor;
            phasor *= step;
            v
        })
        .collect()
}

fn overlap(v: &[Complex64], w: &[Complex64]) -> Complex64 {
    v.iter().zip(w).map(|(a, b)| a.conj() * b).sum()
}

/// Average cost `integral p(phi) sum_k p(k|phi) 4 sin^2((phi - phi_k)/2)` by
/// direct summation over `grid`.
pub fn quadrature_cost(
    state: &ProbeState,
    prior: &CircularPrior,
    m: &PhaseMeasurement,
    grid: &QuadratureGrid,
) -> Result<f64> {
    if m.dimension() != state.dimension() {
        return Err(Error::DimensionMismatch {
            expected: state.dimension(),
            found: m.dimension(),
        });
    }
    grid.check(state.photon_number(), prior)?;
    let mut total = 0.0;
    for phi in grid.nodes() {
        let weight = prior.density_at(phi)?;
        let shifted = shifted_amplitudes(state, phi);
        let inner: f64 = m
            .outcomes()
            .map(|(psi, est)| {
                let prob = overlap(psi, &shifted).norm_sqr();
                prob * 4.0 * ((phi - est) / 2.0).sin().powi(2)
            })
            .sum();
        total += weight * inner;
    }
    Ok(total * grid.spacing())
}

/// Prior-weighted first Fourier moments of the phase-shifted probe:
/// `Z[n][l] = integral p(phi) a_n conj(a_l) e^{-i(n-l) phi} e^{i phi} dphi`.
///
/// For a basis vector `v`, `v^dagger Z v = integral p(phi) p(v|phi) e^{i phi}`.
/// The best estimate for that outcome is its argument and the cost of a basis
/// with optimally chosen estimates is `2 - 2 sum_k |v_k^dagger Z v_k|`.
#[derive(Clone, Debug)]
pub struct OutcomeMoments {
    dim: usize,
    z: Vec<Complex64>,
}

impl OutcomeMoments {
    pub fn new(state: &ProbeState, prior: &CircularPrior, grid: &QuadratureGrid) -> Result<Self> {
        grid.check(state.photon_number(), prior)?;
        let d = state.dimension();
        let mut z = vec![Complex64::new(0.0, 0.0); d * d];
        for phi in grid.nodes() {
            let w = prior.density_at(phi)? * grid.spacing();
            let a = shifted_amplitudes(state, phi);
            let rot = Complex64::from_polar(w, phi);
            for n in 0..d {
                for l in 0..d {
                    z[n * d + l] += a[n] * a[l].conj() * rot;
                }
            }
        }
        Ok(OutcomeMoments { dim: d, z })
    }

    /// `v^dagger Z v`.
    pub fn first_moment(&self, v: &[Complex64]) -> Complex64 {
        let d = self.dim;
        let mut acc = Complex64::new(0.0, 0.0);
        for (n, vn) in v.iter().enumerate().take(d) {
            let row: Complex64 = self.z[n * d..(n + 1) * d].iter().zip(v).map(|(z, vl)| z * vl).sum();
            acc += vn.conj() * row;
        }
        acc
    }

    /// Cost of the basis with each estimate set to its best value.
    pub fn best_cost_for_basis<'a>(&self, basis: impl IntoIterator<Item = &'a [Complex64]>) -> f64 {
        let total: f64 = basis.into_iter().map(|v| self.first_moment(v).norm()).sum();
        2.0 - 2.0 * total
    }
}

/// Haar-random orthonormal basis by Gram-Schmidt on complex Gaussian columns.
fn haar_basis<R: Rng>(rng: &mut R, d: usize) -> Vec<Vec<Complex64>> {
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(d);
    while basis.len() < d {
        let mut v: Vec<Complex64> = (0..d)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        for _ in 0..2 {
            for b in &basis {
                let c = overlap(b, &v);
                for (x, y) in v.iter_mut().zip(b) {
                    *x -= c * y;
                }
            }
        }
        let nrm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if nrm > 1e-6 {
            basis.push(v.into_iter().map(|z| z / nrm).collect());
        }
    }
    basis
}

/// Best cost over `trials` Haar-random bases, each with optimal estimates.
///
/// Trial `i` draws from its own ChaCha stream, so a longer search always
/// contains the shorter one and the result never increases with `trials`.
pub fn random_strategy_search(state: &ProbeState, prior: &CircularPrior, trials: usize, seed: u64) -> Result<f64> {
    search(state, prior, trials, seed, None)
}

/// As [`random_strategy_search`], with `injected` evaluated as trial zero.
pub fn random_strategy_search_with(
    state: &ProbeState,
    prior: &CircularPrior,
    trials: usize,
    seed: u64,
    injected: &PhaseMeasurement,
) -> Result<f64> {
    search(state, prior, trials, seed, Some(injected))
}

fn search(
    state: &ProbeState,
    prior: &CircularPrior,
    trials: usize,
    seed: u64,
    injected: Option<&PhaseMeasurement>,
) -> Result<f64> {
    if trials == 0 {
        return Err(Error::InvalidConfig("at least one trial required"));
    }
    let grid = QuadratureGrid::resolving(state.photon_number(), prior);
    let moments = OutcomeMoments::new(state, prior, &grid)?;
    let d = state.dimension();
    let mut best = f64::INFINITY;
    for trial in 0..trials {
        let cost = match (trial, injected) {
            (0, Some(m)) => moments.best_cost_for_basis(m.basis().iter().map(Vec::as_slice)),
            _ => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(trial as u64);
                let basis = haar_basis(&mut rng, d);
                moments.best_cost_for_basis(basis.iter().map(Vec::as_slice))
            }
        };
        best = best.min(cost);
    }
    Ok(best)
}

/// Exhaustive search over all single-photon strategies.
///
/// Every orthonormal basis of the two-dimensional space is, up to phases of
/// its vectors, `(cos a, e^{ib} sin a)`, `(-e^{-ib} sin a, cos a)` with
/// `a in [0, pi/2]`, `b in [0, 2 pi)`; both angles are scanned on regular
/// grids and each basis gets its best estimates.
pub fn exhaustive_two_level_search(
    state: &ProbeState,
    prior: &CircularPrior,
    angle_points: usize,
    phase_points: usize,
) -> Result<f64> {
    if state.dimension() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: state.dimension(),
        });
    }
    if angle_points < 2 || phase_points < 1 {
        return Err(Error::InvalidConfig("grid too small"));
    }
    let grid = QuadratureGrid::resolving(1, prior);
    let moments = OutcomeMoments::new(state, prior, &grid)?;
    let mut best = f64::INFINITY;
    for i in 0..angle_points {
        let a = 0.5 * PI * i as f64 / (angle_points - 1) as f64;
        let (sa, ca) = a.sin_cos();
        for j in 0..phase_points {
            let b = 2.0 * PI * j as f64 / phase_points as f64;
            let e = Complex64::from_polar(1.0, b);
            let v0 = [Complex64::new(ca, 0.0), e * sa];
            let v1 = [-e.conj() * sa, Complex64::new(ca, 0.0)];
            let cost = moments.best_cost_for_basis([&v0[..], &v1[..]]);
            best = best.min(cost);
        }
    }
    Ok(best)
}

/// Dominant eigenpair of the `(N+1) x (N+1)` tridiagonal matrix with `1/2`
/// on both off-diagonals, by power iteration on `I + T`.
///
/// The eigenvector is normalized with positive entries.
pub fn tridiagonal_dominant(n: usize) -> Result<(f64, Vec<f64>)> {
    if n == 0 {
        return Err(Error::ZeroPhotonNumber);
    }
    let d = n + 1;
    let mut x = vec![1.0 / (d as f64).sqrt(); d];
    let mut lambda = 0.0;
    for _ in 0..1_000_000 {
        let y: Vec<f64> = (0..d)
            .map(|i| {
                let left = if i > 0 { x[i - 1] } else { 0.0 };
                let right = if i + 1 < d { x[i + 1] } else { 0.0 };
                x[i] + 0.5 * (left + right)
            })
            .collect();
        let nrm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        let y: Vec<f64> = y.into_iter().map(|v| v / nrm).collect();
        let change = y.iter().zip(&x).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        x = y;
        lambda = nrm;
        if change < 1e-16 {
            break;
        }
    }
    // Rayleigh quotient of T itself.
    let rq: f64 = (0..d).map(|i| if i + 1 < d { x[i] * x[i + 1] } else { 0.0 }).sum();
    debug_assert!((rq - (lambda - 1.0)).abs() < 1e-8);
    Ok((rq, x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimation::{evaluate_strategy, OffDiagonalBlock};
    use crate::prior::DEFAULT_TRUNCATION_TOL;

    fn diffusive(t: f64) -> CircularPrior {
        CircularPrior::diffusive(t, DEFAULT_TRUNCATION_TOL).unwrap()
    }

    fn random_measurement(rng: &mut ChaCha8Rng, d: usize) -> PhaseMeasurement {
        let phases = (0..d).map(|_| rng.gen::<f64>() * 2.0 * PI - PI).collect();
        PhaseMeasurement::new(haar_basis(rng, d), phases).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(QuadratureGrid::new(1).is_err());
        let g = QuadratureGrid::new(8).unwrap();
        assert_eq!(g.nodes().count(), 8);
        assert_eq!(g.nodes().next(), Some(-PI));
        let psi = ProbeState::flat(3).unwrap();
        let prior = diffusive(0.5);
        let m = OffDiagonalBlock::from_state(&psi, &prior).optimal_measurement();
        assert!(matches!(
            quadrature_cost(&psi, &prior, &m, &g),
            Err(Error::UnderResolvedGrid { .. })
        ));
    }

    #[test]
    fn quadrature_matches_closed_form_evaluation() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let grid = QuadratureGrid::new(2048).unwrap();
        for trial in 0..40 {
            let n = trial % 7;
            let psi = ProbeState::haar_random(n, &mut rng);
            let prior = diffusive(0.05 + 2.0 * rng.gen::<f64>()).shifted(rng.gen::<f64>() * 4.0 - 2.0);
            let m = random_measurement(&mut rng, n + 1);
            let q = quadrature_cost(&psi, &prior, &m, &grid).unwrap();
            let e = evaluate_strategy(&psi.to_density(), &prior, &m).unwrap().cost;
            assert!((q - e).abs() < 1e-10, "trial {trial}: {q} vs {e}");
        }
    }

    #[test]
    fn quadrature_is_grid_independent_once_resolved() {
        let psi = ProbeState::berry_wiseman(4).unwrap();
        let prior = diffusive(0.3);
        let m = OffDiagonalBlock::from_state(&psi, &prior).optimal_measurement();
        let base = QuadratureGrid::required_points(4, &prior);
        let costs: Vec<f64> = [1, 2, 4, 8]
            .iter()
            .map(|f| quadrature_cost(&psi, &prior, &m, &QuadratureGrid::new(base * f).unwrap()).unwrap())
            .collect();
        for w in costs.windows(2) {
            assert!((w[0] - w[1]).abs() < 1e-12);
        }
        let exact = evaluate_strategy(&psi.to_density(), &prior, &m).unwrap().cost;
        assert!((costs[3] - exact).abs() < 1e-8);
    }

    #[test]
    fn vacuum_costs_two() {
        let psi = ProbeState::from_real(&[1.0]).unwrap();
        let m = PhaseMeasurement::new(vec![vec![Complex64::new(1.0, 0.0)]], vec![0.7]).unwrap();
        let q = quadrature_cost(&psi, &CircularPrior::uniform(), &m, &QuadratureGrid::new(64).unwrap()).unwrap();
        assert!((q - 2.0).abs() < 1e-9);
    }

    #[test]
    fn flat_single_photon_uniform_costs_one() {
        let psi = ProbeState::flat(1).unwrap();
        let prior = CircularPrior::uniform();
        let m = OffDiagonalBlock::from_state(&psi, &prior).optimal_measurement();
        let q = quadrature_cost(&psi, &prior, &m, &QuadratureGrid::new(DEFAULT_POINTS).unwrap()).unwrap();
        assert!((q - 1.0).abs() < 1e-6);
    }

    #[test]
    fn search_is_monotone_and_bounded() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let psi = ProbeState::haar_random(2, &mut rng);
        let prior = diffusive(0.7);
        let optimum = OffDiagonalBlock::from_state(&psi, &prior).optimal_cost();
        let mut last = f64::INFINITY;
        for trials in [1, 5, 20, 100] {
            let c = random_strategy_search(&psi, &prior, trials, 11).unwrap();
            assert!(c <= last);
            assert!(c >= optimum - 1e-9);
            last = c;
        }
        assert!(random_strategy_search(&psi, &prior, 0, 11).is_err());
    }

    #[test]
    fn injected_optimum_is_recovered() {
        let psi = ProbeState::classical_binomial(3).unwrap();
        let prior = diffusive(0.4);
        let block = OffDiagonalBlock::from_state(&psi, &prior);
        let best = random_strategy_search_with(&psi, &prior, 10, 0, &block.optimal_measurement()).unwrap();
        assert!((best - block.optimal_cost()).abs() < 1e-10);
    }

    #[test]
    fn tridiagonal_oracle() {
        let (l, v) = tridiagonal_dominant(1).unwrap();
        assert!((l - 0.5).abs() < 1e-14);
        assert!(v.iter().all(|x| (x - core::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12));
        let (l, _) = tridiagonal_dominant(10).unwrap();
        assert!((l - (PI / 12.0).cos()).abs() < 1e-12);
        for n in 1..=20 {
            let (_, v) = tridiagonal_dominant(n).unwrap();
            let bw = ProbeState::berry_wiseman(n).unwrap();
            for (a, b) in bw.amplitudes().iter().zip(&v) {
                assert!((a.re - b).abs() < 1e-10, "n={n}");
            }
        }
        assert!(tridiagonal_dominant(0).is_err());
    }
}
