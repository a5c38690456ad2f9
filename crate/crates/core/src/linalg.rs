//! Small dense complex linear algebra.
//!
//! Everything here works on [`ComplexMatrix`], a row-major matrix of
//! `Complex<f64>`. Sizes in this crate never exceed 64, so the algorithms
//! favour accuracy and simplicity over asymptotic speed: a cyclic Jacobi
//! eigensolver for Hermitian matrices, spectral square roots, Kronecker
//! products and partial traces over a multipartite index.
//!
//! Multipartite basis index convention: for subsystem dimensions
//! `[d0, d1, ..., dk]` the flat index is `((i0 * d1 + i1) * d2 + i2) ...`,
//! so the last subsystem varies fastest.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Tolerance for treating an input as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Eigenvalues below `-PSD_ERROR_TOL` are rejected by [`psd_sqrt`].
pub const PSD_ERROR_TOL: f64 = 1e-8;

const JACOBI_TOL: f64 = 1e-14;
const JACOBI_MAX_SWEEPS: usize = 100;

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                let z = self[(r, c)];
                write!(f, "{:>10.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Dimension(format!("empty matrix {rows}x{cols}")));
        }
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |r, c| if r == c { ONE } else { ZERO })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from real row-major values.
    pub fn from_real(rows: usize, cols: usize, values: &[f64]) -> Result<Self> {
        Self::new(rows, cols, values.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn from_diag(values: &[f64]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |r, c| if r == c { C64::new(values[r], 0.0) } else { ZERO })
    }

    /// Outer product `|u><v|`.
    pub fn outer(u: &[C64], v: &[C64]) -> Self {
        Self::from_fn(u.len(), v.len(), |r, c| u[r] * v[c].conj())
    }

    /// Projector `|v><v|`.
    pub fn projector(v: &[C64]) -> Self {
        Self::outer(v, v)
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

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.data
    }

    pub fn column(&self, c: usize) -> Vec<C64> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest elementwise modulus of `self - other`; infinite on shape mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.rows != other.rows || self.cols != other.cols {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest elementwise modulus of `M - M†`.
    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut worst = 0.0f64;
        for r in 0..n {
            for c in r..n {
                worst = worst.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol
    }

    /// `(M + M†) / 2`, used to strip roundoff asymmetry from products.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |r, c| {
            (self[(r, c)] + self[(c, r)].conj()) * 0.5
        })
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a == ZERO {
                    continue;
                }
                for c in 0..rhs.cols {
                    out.data[r * rhs.cols + c] += a * rhs[(k, c)];
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.cols {
            return Err(Error::Dimension(format!(
                "cannot apply {}x{} to a vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|r| {
                self.data[r * self.cols..(r + 1) * self.cols]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect())
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.cols + c]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    /// Panics on a shape mismatch; use [`ComplexMatrix::matmul`] for a checked product.
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs).expect("matrix shape mismatch")
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "matrix shape mismatch");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "matrix shape mismatch");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

/// `<u|v>`.
pub fn inner(u: &[C64], v: &[C64]) -> C64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

pub fn norm_sq(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

/// Eigendecomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    /// Eigenvalues in descending order.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors stored as columns, matching `values`.
    pub vectors: ComplexMatrix,
}

impl EigenSystem {
    /// `V diag(f(w)) V†`.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.values.len();
        let fw: Vec<f64> = self.values.iter().map(|&w| f(w)).collect();
        let v = &self.vectors;
        ComplexMatrix::from_fn(n, n, |r, c| {
            (0..n).map(|k| v[(r, k)] * fw[k] * v[(c, k)].conj()).sum()
        })
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map_spectrum(|w| w)
    }
}

/// Hermitian eigendecomposition by cyclic complex Jacobi rotations.
///
/// Each rotation first removes the phase of the pivot `a_pq`, then applies a
/// real Givens rotation that zeroes it. Sweeps stop once the off-diagonal
/// Frobenius mass falls under `1e-14` (relative to the matrix norm when that
/// exceeds one).
pub fn eig_hermitian(m: &ComplexMatrix) -> Result<EigenSystem> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows,
            cols: m.cols,
        });
    }
    let dev = m.hermitian_deviation();
    if dev > HERMITIAN_TOL {
        return Err(Error::NotHermitian(dev));
    }
    let n = m.rows;
    let mut a = m.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let threshold = JACOBI_TOL * a.frobenius_norm().max(1.0);

    for _ in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(&a) < threshold {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let g = apq.norm();
                if g < 1e-300 {
                    continue;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let theta = 0.5 * (2.0 * g).atan2(aqq - app);
                let (s, c) = theta.sin_cos();
                // phase of the pivot, e^{-i phi}
                let ph = (apq / g).conj();
                // U = [[c, s], [-s e^{-i phi}, c e^{-i phi}]] on columns p, q
                let u00 = C64::new(c, 0.0);
                let u01 = C64::new(s, 0.0);
                let u10 = ph * (-s);
                let u11 = ph * c;
                // A <- A U
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * u00 + akq * u10;
                    a[(k, q)] = akp * u01 + akq * u11;
                }
                // A <- U† A
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = u00.conj() * apk + u10.conj() * aqk;
                    a[(q, k)] = u01.conj() * apk + u11.conj() * aqk;
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)].im = 0.0;
                a[(q, q)].im = 0.0;
                // V <- V U
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * u00 + vkq * u10;
                    v[(k, q)] = vkp * u01 + vkq * u11;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(EigenSystem { values, vectors })
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows;
    let mut s = 0.0;
    for r in 0..n {
        for c in 0..n {
            if r != c {
                s += a[(r, c)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Eigenvalues of a Hermitian matrix, descending.
pub fn eigenvalues_hermitian(m: &ComplexMatrix) -> Result<Vec<f64>> {
    Ok(eig_hermitian(m)?.values)
}

/// Principal square root of a Hermitian PSD matrix.
///
/// Eigenvalues in `[-1e-8, 0)` are treated as roundoff and clamped to zero.
pub fn psd_sqrt(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = eig_hermitian(m)?;
    let min = eig.values.last().copied().unwrap_or(0.0);
    if min < -PSD_ERROR_TOL {
        return Err(Error::NotPsd(min));
    }
    Ok(eig.map_spectrum(|w| w.max(0.0).sqrt()))
}

/// Kronecker product `A ⊗ B`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (br, bc) = (b.rows, b.cols);
    ComplexMatrix::from_fn(a.rows * br, a.cols * bc, |r, c| {
        a[(r / br, c / bc)] * b[(r % br, c % bc)]
    })
}

/// Traces out every subsystem not listed in `keep`.
///
/// `dims` lists the subsystem dimensions in index order; `keep` holds the
/// indices of the subsystems to retain (order is irrelevant, the result uses
/// the original relative order).
pub fn partial_trace(rho: &ComplexMatrix, dims: &[usize], keep: &[usize]) -> Result<ComplexMatrix> {
    let total: usize = dims.iter().product();
    if !rho.is_square() || rho.rows != total || dims.is_empty() {
        return Err(Error::Dimension(format!(
            "{}x{} matrix does not match subsystem dims {:?}",
            rho.rows, rho.cols, dims
        )));
    }
    if let Some(&bad) = keep.iter().find(|&&k| k >= dims.len()) {
        return Err(Error::Dimension(format!(
            "subsystem {bad} out of range for {} subsystems",
            dims.len()
        )));
    }
    let kept: Vec<bool> = (0..dims.len()).map(|i| keep.contains(&i)).collect();
    let kept_dim: usize = dims.iter().zip(&kept).filter(|(_, &k)| k).map(|(d, _)| d).product();

    // Split a flat index into (kept index, traced index).
    let split = |mut idx: usize| {
        let mut k_idx = 0;
        let mut k_mul = 1;
        let mut t_idx = 0;
        let mut t_mul = 1;
        for (d, &is_kept) in dims.iter().zip(&kept).rev() {
            let digit = idx % d;
            idx /= d;
            if is_kept {
                k_idx += digit * k_mul;
                k_mul *= d;
            } else {
                t_idx += digit * t_mul;
                t_mul *= d;
            }
        }
        (k_idx, t_idx)
    };
    let parts: Vec<(usize, usize)> = (0..total).map(split).collect();

    let mut out = ComplexMatrix::zeros(kept_dim, kept_dim);
    for (r, &(kr, tr)) in parts.iter().enumerate() {
        for (c, &(kc, tc)) in parts.iter().enumerate() {
            if tr == tc {
                out[(kr, kc)] += rho[(r, c)];
            }
        }
    }
    Ok(out)
}

/// Orthonormalizes the columns of `m` in place order (modified Gram–Schmidt).
///
/// Fails if the columns are linearly dependent.
pub fn orthonormalize_columns(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (rows, cols) = (m.rows, m.cols);
    if cols > rows {
        return Err(Error::Dimension(format!(
            "cannot orthonormalize {cols} columns in dimension {rows}"
        )));
    }
    let mut q: Vec<Vec<C64>> = Vec::with_capacity(cols);
    for c in 0..cols {
        let mut v = m.column(c);
        for _ in 0..2 {
            for u in &q {
                let proj = inner(u, &v);
                for (vi, ui) in v.iter_mut().zip(u) {
                    *vi -= proj * ui;
                }
            }
        }
        let n = norm_sq(&v).sqrt();
        if n < 1e-12 {
            return Err(Error::Dimension("linearly dependent columns".into()));
        }
        v.iter_mut().for_each(|z| *z /= n);
        q.push(v);
    }
    Ok(ComplexMatrix::from_fn(rows, cols, |r, c| q[c][r]))
}

/// Largest elementwise deviation of `U†U` from the identity.
pub fn isometry_deviation(u: &ComplexMatrix) -> f64 {
    let gram = &u.adjoint() * u;
    gram.max_abs_diff(&ComplexMatrix::identity(u.cols))
}

/// Pauli Y.
pub fn sigma_y() -> ComplexMatrix {
    ComplexMatrix::new(
        2,
        2,
        vec![ZERO, C64::new(0.0, -1.0), C64::new(0.0, 1.0), ZERO],
    )
    .expect("2x2")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(rows, cols, |_, _| {
            C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        })
    }

    fn random_hermitian(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
        random_matrix(rng, n, n).hermitian_part()
    }

    fn random_density(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
        let g = random_matrix(rng, n, n);
        let p = &g * &g.adjoint();
        let t = p.trace().re;
        p.scale(C64::new(1.0 / t, 0.0)).hermitian_part()
    }

    #[test]
    fn identity_spectrum() {
        let e = eig_hermitian(&ComplexMatrix::identity(4)).unwrap();
        assert_eq!(e.values, vec![1.0; 4]);
    }

    #[test]
    fn sigma_y_spectrum() {
        let e = eig_hermitian(&sigma_y()).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-14);
        assert!((e.values[1] + 1.0).abs() < 1e-14);
    }

    #[test]
    fn eig_reconstructs_random_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [2, 3, 8, 16] {
            let m = random_hermitian(&mut rng, n);
            let e = eig_hermitian(&m).unwrap();
            assert!(e.reconstruct().max_abs_diff(&m) < 1e-9);
            assert!(isometry_deviation(&e.vectors) < 1e-10);
            assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
            let tr: f64 = e.values.iter().sum();
            assert!((tr - m.trace().re).abs() < 1e-10);
        }
    }

    #[test]
    fn eig_handles_degenerate_and_diagonal() {
        let m = ComplexMatrix::from_diag(&[0.5, 2.0, 0.5, -1.0]);
        let e = eig_hermitian(&m).unwrap();
        assert_eq!(e.values, vec![2.0, 0.5, 0.5, -1.0]);
    }

    #[test]
    fn eig_rejects_bad_input() {
        let rect = ComplexMatrix::zeros(2, 3);
        assert!(matches!(eig_hermitian(&rect), Err(Error::NotSquare { .. })));
        let mut m = ComplexMatrix::identity(2);
        m[(0, 1)] = C64::new(0.3, 0.0);
        assert!(matches!(eig_hermitian(&m), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn sqrt_of_diagonal() {
        let s = psd_sqrt(&ComplexMatrix::from_diag(&[4.0, 1.0])).unwrap();
        assert!(s.max_abs_diff(&ComplexMatrix::from_diag(&[2.0, 1.0])) < 1e-15);
        let i = psd_sqrt(&ComplexMatrix::identity(3)).unwrap();
        assert!(i.max_abs_diff(&ComplexMatrix::identity(3)) < 1e-15);
    }

    #[test]
    fn sqrt_squares_back() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let rho = random_density(&mut rng, 4);
            let s = psd_sqrt(&rho).unwrap();
            assert!(s.is_hermitian(1e-12));
            assert!((&s * &s).max_abs_diff(&rho) < 1e-8);
            assert!(eigenvalues_hermitian(&s).unwrap()[3] > -1e-12);
        }
    }

    #[test]
    fn sqrt_clamps_roundoff_and_rejects_negative() {
        let s = psd_sqrt(&ComplexMatrix::from_diag(&[1.0, -1e-11])).unwrap();
        assert_eq!(s[(1, 1)], ZERO);
        let s = psd_sqrt(&ComplexMatrix::from_diag(&[1.0, -5e-9])).unwrap();
        assert_eq!(s[(1, 1)], ZERO);
        assert!(matches!(
            psd_sqrt(&ComplexMatrix::from_diag(&[1.0, -1e-6])),
            Err(Error::NotPsd(_))
        ));
    }

    #[test]
    fn kron_basics() {
        let i4 = kron(&ComplexMatrix::identity(2), &ComplexMatrix::identity(2));
        assert_eq!(i4, ComplexMatrix::identity(4));

        let yy = kron(&sigma_y(), &sigma_y());
        let expected = ComplexMatrix::from_real(
            4,
            4,
            &[
                0., 0., 0., -1., //
                0., 0., 1., 0., //
                0., 1., 0., 0., //
                -1., 0., 0., 0.,
            ],
        )
        .unwrap();
        assert_eq!(yy, expected);
    }

    #[test]
    fn kron_mixed_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let a = random_matrix(&mut rng, 2, 2);
            let b = random_matrix(&mut rng, 2, 2);
            let c = random_matrix(&mut rng, 2, 2);
            let d = random_matrix(&mut rng, 2, 2);
            let lhs = &kron(&a, &b) * &kron(&c, &d);
            let rhs = kron(&(&a * &c), &(&b * &d));
            assert!(lhs.max_abs_diff(&rhs) < 1e-12);
        }
    }

    fn ket(n: usize, i: usize) -> Vec<C64> {
        let mut v = vec![ZERO; n];
        v[i] = ONE;
        v
    }

    #[test]
    fn partial_trace_product_state() {
        let rho = ComplexMatrix::projector(&ket(8, 0));
        let out = partial_trace(&rho, &[2, 2, 2], &[0, 1]).unwrap();
        assert_eq!(out, ComplexMatrix::projector(&ket(4, 0)));
    }

    #[test]
    fn partial_trace_ghz() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut ghz = vec![ZERO; 8];
        ghz[0] = C64::new(h, 0.0);
        ghz[7] = C64::new(h, 0.0);
        let out = partial_trace(&ComplexMatrix::projector(&ghz), &[2, 2, 2], &[0, 1]).unwrap();
        let expected = ComplexMatrix::from_diag(&[0.5, 0.0, 0.0, 0.5]);
        assert!(out.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn partial_trace_preserves_trace_and_composes() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let dims = [2, 3, 4];
        for _ in 0..10 {
            let rho = random_density(&mut rng, 24);
            let ab = partial_trace(&rho, &dims, &[0, 1]).unwrap();
            assert!((ab.trace() - rho.trace()).norm() < 1e-12);
            assert!(ab.is_hermitian(1e-12));
            let a_two_steps = partial_trace(&ab, &[2, 3], &[0]).unwrap();
            let a_joint = partial_trace(&rho, &dims, &[0]).unwrap();
            assert!(a_two_steps.max_abs_diff(&a_joint) < 1e-12);
        }
    }

    #[test]
    fn partial_trace_rejects_mismatch() {
        let rho = ComplexMatrix::identity(6);
        assert!(matches!(
            partial_trace(&rho, &[2, 2, 2], &[0]),
            Err(Error::Dimension(_))
        ));
        assert!(partial_trace(&ComplexMatrix::identity(8), &[2, 2, 2], &[3]).is_err());
    }

    #[test]
    fn gram_schmidt_yields_isometry() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let u = orthonormalize_columns(&random_matrix(&mut rng, 8, 3)).unwrap();
        assert!(isometry_deviation(&u) < 1e-12);
    }
}
