//! Small dense complex linear algebra: a column-major matrix type plus the
//! three decompositions the estimation pipeline needs (Hermitian eigen,
//! singular value, and unitary eigen decompositions).
//!
//! All routines are Jacobi-type. They are slower than LAPACK-style QR
//! iterations but converge unconditionally, keep orthogonality at machine
//! precision, and have no trouble with the unit-modulus spectra of cyclic
//! shift matrices that arise for flat priors.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut, Mul};

use num_complex::Complex64;

const MAX_SWEEPS: usize = 100;

/// Dense complex matrix stored column by column.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for j in 0..cols {
            for i in 0..rows {
                data.push(f(i, j));
            }
        }
        CMatrix { rows, cols, data }
    }

    /// Builds a matrix whose `j`-th column is `columns[j]`.
    ///
    /// Panics if the columns have differing lengths.
    pub fn from_columns(columns: &[Vec<Complex64>]) -> Self {
        let rows = columns.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows * columns.len());
        for c in columns {
            assert_eq!(c.len(), rows, "ragged column list");
            data.extend_from_slice(c);
        }
        CMatrix {
            rows,
            cols: columns.len(),
            data,
        }
    }

    /// Diagonal matrix with real entries.
    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let mut m = CMatrix::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(d, 0.0);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn column(&self, j: usize) -> &[Complex64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn column_mut(&mut self, j: usize) -> &mut [Complex64] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn columns(&self) -> impl Iterator<Item = &[Complex64]> {
        self.data.chunks(self.rows.max(1)).take(self.cols)
    }

    pub fn adjoint(&self) -> CMatrix {
        CMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn hermitian_defect(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    pub fn scale(&self, factor: Complex64) -> CMatrix {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn add(&self, other: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &CMatrix) -> CMatrix {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// `self * x` for a column vector `x`.
    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.cols);
        let mut out = vec![Complex64::new(0.0, 0.0); self.rows];
        for (j, xj) in x.iter().enumerate() {
            for (o, a) in out.iter_mut().zip(self.column(j)) {
                *o += a * xj;
            }
        }
        out
    }

    /// `Tr(self * other)` without forming the product.
    pub fn trace_of_product(&self, other: &CMatrix) -> Complex64 {
        assert_eq!(self.cols, other.rows);
        assert_eq!(self.rows, other.cols);
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..self.rows {
            for k in 0..self.cols {
                acc += self[(i, k)] * other[(k, i)];
            }
        }
        acc
    }

    /// `<x| self |x>` with the conjugate on the left vector.
    pub fn quadratic_form(&self, x: &[Complex64]) -> Complex64 {
        inner(x, &self.mul_vec(x))
    }

    /// Applies the 2x2 transform `g = [[gpp, gpq], [gqp, gqq]]` to columns
    /// `p` and `q` from the right.
    fn rotate_columns(&mut self, p: usize, q: usize, g: &Rotation) {
        for i in 0..self.rows {
            let x = self[(i, p)];
            let y = self[(i, q)];
            self[(i, p)] = x * g.pp + y * g.qp;
            self[(i, q)] = x * g.pq + y * g.qq;
        }
    }

    /// Applies `g^dagger` to rows `p` and `q` from the left.
    fn rotate_rows_adjoint(&mut self, p: usize, q: usize, g: &Rotation) {
        for j in 0..self.cols {
            let x = self[(p, j)];
            let y = self[(q, j)];
            self[(p, j)] = g.pp.conj() * x + g.qp.conj() * y;
            self[(q, j)] = g.pq.conj() * x + g.qq.conj() * y;
        }
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[j * self.rows + i]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[j * self.rows + i]
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;

    fn mul(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch in product");
        let mut out = CMatrix::zeros(self.rows, rhs.cols);
        for j in 0..rhs.cols {
            for k in 0..self.cols {
                let b = rhs[(k, j)];
                if b == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for i in 0..self.rows {
                    out.data[j * self.rows + i] += self.data[k * self.rows + i] * b;
                }
            }
        }
        out
    }
}

/// `<x|y>`, conjugate-linear in `x`.
pub fn inner(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

pub fn norm(x: &[Complex64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Entries of a 2x2 unitary acting on coordinates `p < q`.
struct Rotation {
    pp: Complex64,
    pq: Complex64,
    qp: Complex64,
    qq: Complex64,
}

impl Rotation {
    /// Unitary that diagonalizes the Hermitian 2x2 block
    /// `[[app, apq], [conj(apq), aqq]]` by congruence. `apq` must be nonzero.
    fn hermitian(app: f64, aqq: f64, apq: Complex64) -> Self {
        let mag = apq.norm();
        let phase = (apq / mag).conj();
        let tau = (aqq - app) / (2.0 * mag);
        let t = if tau >= 0.0 {
            1.0 / (tau + (1.0 + tau * tau).sqrt())
        } else {
            -1.0 / (-tau + (1.0 + tau * tau).sqrt())
        };
        let c = 1.0 / (1.0 + t * t).sqrt();
        let s = t * c;
        Rotation {
            pp: Complex64::new(c, 0.0),
            pq: Complex64::new(s, 0.0),
            qp: -phase * s,
            qq: phase * c,
        }
    }
}

/// Spectral decomposition `A = V diag(values) V^dagger` of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    /// Eigenvalues in ascending order.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors stored as columns, aligned with `values`.
    pub vectors: CMatrix,
}

impl HermitianEigen {
    /// Eigenvector of the largest eigenvalue.
    pub fn top_vector(&self) -> &[Complex64] {
        self.vectors.column(self.values.len() - 1)
    }

    pub fn top_value(&self) -> f64 {
        *self.values.last().expect("empty decomposition")
    }
}

/// Cyclic complex Jacobi eigensolver for Hermitian matrices.
///
/// The input is symmetrized first, so small Hermitian defects from rounding
/// are tolerated.
pub fn hermitian_eigen(a: &CMatrix) -> HermitianEigen {
    assert!(a.is_square(), "eigen decomposition needs a square matrix");
    let n = a.rows();
    let mut work = a.add(&a.adjoint()).scale(Complex64::new(0.5, 0.0));
    let mut vectors = CMatrix::identity(n);
    let scale = work.frobenius_norm();

    if scale > 0.0 {
        let threshold = scale * 1e-17;
        for _ in 0..MAX_SWEEPS {
            let mut rotated = false;
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = work[(p, q)];
                    if apq.norm() <= threshold {
                        continue;
                    }
                    rotated = true;
                    let g = Rotation::hermitian(work[(p, p)].re, work[(q, q)].re, apq);
                    work.rotate_columns(p, q, &g);
                    work.rotate_rows_adjoint(p, q, &g);
                    work[(p, q)] = Complex64::new(0.0, 0.0);
                    work[(q, p)] = Complex64::new(0.0, 0.0);
                    work[(p, p)].im = 0.0;
                    work[(q, q)].im = 0.0;
                    vectors.rotate_columns(p, q, &g);
                }
            }
            if !rotated {
                break;
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| work[(i, i)].re.total_cmp(&work[(j, j)].re).then(i.cmp(&j)));
    let values = order.iter().map(|&i| work[(i, i)].re).collect();
    let columns: Vec<Vec<Complex64>> = order.iter().map(|&i| vectors.column(i).to_vec()).collect();
    HermitianEigen {
        values,
        vectors: CMatrix::from_columns(&columns),
    }
}

/// Singular value decomposition `A = U diag(singular_values) V^dagger` of a
/// square matrix, with `U` and `V` both unitary.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: CMatrix,
    /// Non-negative, in descending order.
    pub singular_values: Vec<f64>,
    pub v: CMatrix,
}

impl Svd {
    pub fn trace_norm(&self) -> f64 {
        self.singular_values.iter().sum()
    }
}

/// One-sided (Hestenes) Jacobi SVD of a square complex matrix.
///
/// Left singular vectors belonging to numerically zero singular values are
/// completed from the standard basis, taken in index order, so that `U` is
/// always a full unitary.
pub fn svd(a: &CMatrix) -> Svd {
    assert!(a.is_square(), "svd is implemented for square matrices only");
    let n = a.rows();
    let mut w = a.clone();
    let mut v = CMatrix::identity(n);

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha = norm(w.column(p)).powi(2);
                let beta = norm(w.column(q)).powi(2);
                let gamma = inner(w.column(p), w.column(q));
                let g = gamma.norm();
                if g == 0.0 || g <= 1e-15 * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let rot = Rotation::hermitian(alpha, beta, gamma);
                w.rotate_columns(p, q, &rot);
                v.rotate_columns(p, q, &rot);
            }
        }
        if !rotated {
            break;
        }
    }

    let sigma: Vec<f64> = (0..n).map(|j| norm(w.column(j))).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| sigma[j].total_cmp(&sigma[i]).then(i.cmp(&j)));
    let sigma_max = order.first().map_or(0.0, |&i| sigma[i]);
    let null_threshold = sigma_max * 1e-14;

    let singular_values: Vec<f64> = order.iter().map(|&i| sigma[i]).collect();
    let v_sorted: Vec<Vec<Complex64>> = order.iter().map(|&i| v.column(i).to_vec()).collect();
    let raw_u: Vec<Option<Vec<Complex64>>> = order
        .iter()
        .map(|&i| {
            (sigma[i] > null_threshold && sigma[i] > 0.0).then(|| w.column(i).iter().map(|z| z / sigma[i]).collect())
        })
        .collect();

    Svd {
        u: CMatrix::from_columns(&orthonormal_completion(n, raw_u)),
        singular_values,
        v: CMatrix::from_columns(&v_sorted),
    }
}

/// Re-orthonormalizes the given columns in order and fills every `None` (or
/// numerically dependent) slot with the first standard basis vector that
/// still has a substantial component outside the span built so far.
fn orthonormal_completion(n: usize, columns: Vec<Option<Vec<Complex64>>>) -> Vec<Vec<Complex64>> {
    let mut accepted: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    let mut slots: Vec<Option<Vec<Complex64>>> = Vec::with_capacity(n);
    for col in columns {
        let kept = col.and_then(|c| {
            let r = project_out(&accepted, c);
            let nr = norm(&r);
            (nr > 0.5).then(|| r.iter().map(|z| z / nr).collect::<Vec<_>>())
        });
        if let Some(c) = &kept {
            accepted.push(c.clone());
        }
        slots.push(kept);
    }

    let mut next_basis = 0;
    for slot in slots.iter_mut().filter(|s| s.is_none()) {
        while next_basis < n {
            let mut e = vec![Complex64::new(0.0, 0.0); n];
            e[next_basis] = Complex64::new(1.0, 0.0);
            next_basis += 1;
            let r = project_out(&accepted, e);
            let nr = norm(&r);
            if nr * nr > 0.5 / n as f64 {
                let c: Vec<Complex64> = r.iter().map(|z| z / nr).collect();
                accepted.push(c.clone());
                *slot = Some(c);
                break;
            }
        }
    }
    slots
        .into_iter()
        .map(|s| s.expect("standard basis spans the space"))
        .collect()
}

/// Removes the components along `basis` (twice, for stability).
fn project_out(basis: &[Vec<Complex64>], mut x: Vec<Complex64>) -> Vec<Complex64> {
    for _ in 0..2 {
        for b in basis {
            let c = inner(b, &x);
            for (xi, bi) in x.iter_mut().zip(b) {
                *xi -= c * bi;
            }
        }
    }
    x
}

/// Spectral decomposition of a unitary matrix `W = sum_k lambda_k |v_k><v_k|`.
#[derive(Clone, Debug)]
pub struct UnitaryEigen {
    /// Unit-modulus eigenvalues, aligned with the columns of `vectors`.
    pub values: Vec<Complex64>,
    pub vectors: CMatrix,
}

// Two fixed mixing weights for the commuting Hermitian and anti-Hermitian
// parts. Eigenvalues that collide under the first never collide under the
// second.
const PRIMARY_MIX: f64 = 0.618_033_988_749_894_9;
const SECONDARY_MIX: f64 = -1.732_050_807_568_877_2;
const CLUSTER_GAP: f64 = 1e-3;

/// Eigen decomposition of a unitary (more generally, normal) matrix.
///
/// `W = H + iK` with commuting Hermitian `H` and `K`; the Hermitian matrix
/// `H + cK` shares the eigenvectors of `W`. Clusters of near-equal
/// eigenvalues of that combination are re-split with a second weight, which
/// separates distinct eigenvalues of `W` that happen to collide under the
/// first.
pub fn unitary_eigen(w: &CMatrix) -> UnitaryEigen {
    assert!(w.is_square());
    let n = w.rows();
    let wa = w.adjoint();
    let herm = w.add(&wa).scale(Complex64::new(0.5, 0.0));
    let anti = w.sub(&wa).scale(Complex64::new(0.0, -0.5));
    let mix = |c: f64| herm.add(&anti.scale(Complex64::new(c, 0.0)));

    let first = hermitian_eigen(&mix(PRIMARY_MIX));
    let mut columns: Vec<Vec<Complex64>> = first.vectors.columns().map(<[_]>::to_vec).collect();

    let secondary = mix(SECONDARY_MIX);
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && first.values[end] - first.values[end - 1] < CLUSTER_GAP {
            end += 1;
        }
        if end - start > 1 {
            let block = CMatrix::from_columns(&columns[start..end]);
            let compressed = &(&block.adjoint() * &secondary) * &block;
            let inner_eig = hermitian_eigen(&compressed);
            let rotated = &block * &inner_eig.vectors;
            for (offset, col) in rotated.columns().enumerate() {
                columns[start + offset] = col.to_vec();
            }
        }
        start = end;
    }

    let values = columns
        .iter()
        .map(|c| {
            let z = w.quadratic_form(c);
            z / z.norm()
        })
        .collect();
    UnitaryEigen {
        values,
        vectors: CMatrix::from_columns(&columns),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
        CMatrix::from_fn(n, n, |_, _| c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
    }

    fn unitarity_defect(u: &CMatrix) -> f64 {
        (&u.adjoint() * u).max_abs_diff(&CMatrix::identity(u.cols()))
    }

    fn cyclic_shift(n: usize) -> CMatrix {
        CMatrix::from_fn(n, n, |i, j| if (i + 1) % n == j { c(1.0, 0.0) } else { c(0.0, 0.0) })
    }

    #[test]
    fn hermitian_eigen_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 1..14 {
            let x = random_matrix(&mut rng, n);
            let h = x.add(&x.adjoint());
            let e = hermitian_eigen(&h);
            let rec = &(&e.vectors * &CMatrix::from_real_diagonal(&e.values)) * &e.vectors.adjoint();
            assert!(rec.max_abs_diff(&h) < 1e-13, "n={n}");
            assert!(unitarity_defect(&e.vectors) < 1e-13);
            assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn hermitian_eigen_tridiagonal_spectrum() {
        let n = 9;
        let t = CMatrix::from_fn(n, n, |i, j| if i.abs_diff(j) == 1 { c(0.5, 0.0) } else { c(0.0, 0.0) });
        let e = hermitian_eigen(&t);
        let pi = core::f64::consts::PI;
        for (k, v) in e.values.iter().enumerate() {
            let expected = -((k + 1) as f64 * pi / (n + 1) as f64).cos();
            assert!((v - expected).abs() < 1e-14);
        }
    }

    #[test]
    fn svd_random_and_structured() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for trial in 0..300 {
            let n = 1 + trial % 15;
            let a = match trial % 3 {
                0 => random_matrix(&mut rng, n),
                1 => {
                    // rank one
                    let x: Vec<Complex64> = (0..n).map(|_| c(rng.gen(), rng.gen())).collect();
                    CMatrix::from_fn(n, n, |i, j| x[i] * x[j].conj())
                }
                _ => {
                    // weighted shift with an empty first row and last column
                    CMatrix::from_fn(n, n, |i, j| if i == j + 1 { c(rng.gen(), 0.0) } else { c(0.0, 0.0) })
                }
            };
            let s = svd(&a);
            let rec = &(&s.u * &CMatrix::from_real_diagonal(&s.singular_values)) * &s.v.adjoint();
            assert!(rec.max_abs_diff(&a) < 1e-13, "trial {trial}");
            assert!(unitarity_defect(&s.u) < 1e-13, "trial {trial}");
            assert!(unitarity_defect(&s.v) < 1e-13, "trial {trial}");
            assert!(s.singular_values.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn svd_of_zero_matrix_is_identity_pair() {
        let s = svd(&CMatrix::zeros(3, 3));
        assert_eq!(s.trace_norm(), 0.0);
        assert!(unitarity_defect(&s.u) < 1e-15);
        assert!(unitarity_defect(&s.v) < 1e-15);
    }

    #[test]
    fn unitary_eigen_handles_cyclic_shift() {
        for n in 1..24 {
            let w = cyclic_shift(n);
            let e = unitary_eigen(&w);
            assert!(unitarity_defect(&e.vectors) < 1e-12, "n={n}");
            let rec = &(&e.vectors * &CMatrix::from_fn(n, n, |i, j| if i == j { e.values[i] } else { c(0.0, 0.0) }))
                * &e.vectors.adjoint();
            assert!(rec.max_abs_diff(&w) < 1e-12, "n={n}");
        }
    }

    #[test]
    fn unitary_eigen_degenerate_and_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for trial in 0..200 {
            let n = 1 + trial % 12;
            let q = svd(&random_matrix(&mut rng, n)).u;
            // Some trials use a spectrum with repeated and conjugate-paired values.
            let phases: Vec<f64> = (0..n)
                .map(|k| match trial % 3 {
                    0 => rng.gen::<f64>() * 6.0 - 3.0,
                    1 => [0.3, -0.3, 0.3, 2.0, -2.0][k % 5],
                    _ => core::f64::consts::PI * (k as f64) / 2.0,
                })
                .collect();
            let d = CMatrix::from_fn(n, n, |i, j| {
                if i == j {
                    Complex64::from_polar(1.0, phases[i])
                } else {
                    c(0.0, 0.0)
                }
            });
            let w = &(&q * &d) * &q.adjoint();
            let e = unitary_eigen(&w);
            let rec = &(&e.vectors * &CMatrix::from_fn(n, n, |i, j| if i == j { e.values[i] } else { c(0.0, 0.0) }))
                * &e.vectors.adjoint();
            assert!(unitarity_defect(&e.vectors) < 1e-12, "trial {trial}");
            assert!(rec.max_abs_diff(&w) < 1e-12, "trial {trial}");
        }
    }
}
