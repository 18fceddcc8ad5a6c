//! Small dense matrix helpers shared by the Gaussian modules.
//!
//! Phase-space vectors are ordered `(p_1, .., p_N, q_1, .., q_N)`; for the
//! two-mode Raman system this is `(p_a, p_b, q_a, q_b)`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Canonical commutation form `J = [[0, -I], [I, 0]]`, so that
/// `[Q_j, Q_k] = i J_jk` for `Q = (p, q)`.
///
/// `J^2 = -I` and `J^T = -J`. A real matrix `S` is symplectic when
/// `S^T J S = J`.
pub fn canonical_form(n_modes: usize) -> DMatrix<f64> {
    let dim = 2 * n_modes;
    let mut j = DMatrix::zeros(dim, dim);
    for k in 0..n_modes {
        j[(k, k + n_modes)] = -1.0;
        j[(k + n_modes, k)] = 1.0;
    }
    j
}

/// The unitary `U = (1/sqrt 2) [[-iI, iI], [I, I]]` with `Q = U (a, a^dagger)`.
pub fn quadrature_unitary(n_modes: usize) -> CMatrix {
    let dim = 2 * n_modes;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut u = CMatrix::zeros(dim, dim);
    for k in 0..n_modes {
        u[(k, k)] = Complex64::new(0.0, -h);
        u[(k, k + n_modes)] = Complex64::new(0.0, h);
        u[(k + n_modes, k)] = Complex64::new(h, 0.0);
        u[(k + n_modes, k + n_modes)] = Complex64::new(h, 0.0);
    }
    u
}

/// Block anti-diagonal identity `[[0, I], [I, 0]]`.
pub fn block_swap(n_modes: usize) -> DMatrix<f64> {
    let dim = 2 * n_modes;
    let mut s = DMatrix::zeros(dim, dim);
    for k in 0..n_modes {
        s[(k, k + n_modes)] = 1.0;
        s[(k + n_modes, k)] = 1.0;
    }
    s
}

pub fn to_complex(m: &DMatrix<f64>) -> CMatrix {
    m.map(|x| Complex64::new(x, 0.0))
}

pub fn inverse(m: &DMatrix<f64>, context: &'static str) -> Result<DMatrix<f64>> {
    m.clone().try_inverse().ok_or(Error::Singular(context))
}

pub fn inverse_complex(m: &CMatrix, context: &'static str) -> Result<CMatrix> {
    m.clone().try_inverse().ok_or(Error::Singular(context))
}

pub fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

pub fn max_abs_diff_complex(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Largest |A_ij - A_ji|.
pub fn asymmetry(m: &DMatrix<f64>) -> f64 {
    max_abs_diff(m, &m.transpose())
}

pub fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Smallest eigenvalue of the Hermitian matrix `re + i im`.
///
/// Uses the real symmetric embedding `[[re, -im], [im, re]]`, whose spectrum
/// is the Hermitian spectrum with every eigenvalue doubled.
pub fn hermitian_min_eigenvalue(re: &DMatrix<f64>, im: &DMatrix<f64>) -> f64 {
    let n = re.nrows();
    let mut big = DMatrix::zeros(2 * n, 2 * n);
    big.view_mut((0, 0), (n, n)).copy_from(re);
    big.view_mut((n, n), (n, n)).copy_from(re);
    big.view_mut((0, n), (n, n)).copy_from(&(-im));
    big.view_mut((n, 0), (n, n)).copy_from(im);
    let big = symmetrize(&big);
    big.symmetric_eigenvalues().min()
}

/// Principal branch of `z^(1/2)`, continued: picks the root nearest `previous`.
pub fn continued_sqrt(z: Complex64, previous: Complex64) -> Complex64 {
    let root = z.sqrt();
    if (root - previous).norm() <= (-root - previous).norm() {
        root
    } else {
        -root
    }
}

pub fn select_rows_cols(m: &DMatrix<f64>, idx: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(idx.len(), idx.len(), |i, j| m[(idx[i], idx[j])])
}

pub fn select_rows_cols_rect(m: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_form_squares_to_minus_identity() {
        for n in 1..4 {
            let j = canonical_form(n);
            let jj = &j * &j;
            assert!(max_abs_diff(&jj, &(-DMatrix::identity(2 * n, 2 * n))) == 0.0);
            assert!(max_abs_diff(&j.transpose(), &(-&j)) == 0.0);
        }
    }

    #[test]
    fn quadrature_unitary_is_unitary_and_reproduces_block_swap() {
        let u = quadrature_unitary(2);
        let id = CMatrix::identity(4, 4);
        assert!(max_abs_diff_complex(&(&u * u.adjoint()), &id) < 1e-15);
        // U^dagger U^* = U^T U = [[0, I], [I, 0]]
        let sx = to_complex(&block_swap(2));
        assert!(max_abs_diff_complex(&(u.adjoint() * u.conjugate()), &sx) < 1e-15);
        assert!(max_abs_diff_complex(&(u.transpose() * &u), &sx) < 1e-15);
    }

    #[test]
    fn hermitian_min_eigenvalue_of_vacuum_uncertainty_matrix_is_zero() {
        // sigma + (i/2) J for sigma = I/2 has eigenvalues {0, 1}.
        let re = DMatrix::identity(2, 2) * 0.5;
        let im = canonical_form(1) * 0.5;
        assert!(hermitian_min_eigenvalue(&re, &im).abs() < 1e-14);
    }

    #[test]
    fn continued_sqrt_follows_previous_branch() {
        let z = Complex64::new(-1.0, -1e-9);
        let near_i = continued_sqrt(z, Complex64::new(0.0, 1.0));
        assert!((near_i - Complex64::new(0.0, 1.0)).norm() < 1e-8);
    }
}
