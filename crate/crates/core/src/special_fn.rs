//! Multivariable Hermite polynomials, Legendre polynomials and the
//! generating-function identities for diagonal Hermite sums.
//!
//! Convention: for a complex symmetric `R` and argument `y`,
//!
//! ```text
//! sum_n H_n^{R}(y) prod_i lambda_i^{n_i} / n_i! = exp(-lambda^T R lambda / 2 + lambda^T R y)
//! ```
//!
//! which gives the recurrence
//! `H_{n+e_i} = (R y)_i H_n - sum_j R_ij n_j H_{n-e_j}` seeded with `H_0 = 1`.
//!
//! Values are tabulated in normalized form `K_n = H_n / sqrt(n!)` (with
//! `n! = prod n_i!`). For the diagonal indices that carry probabilities,
//! `K_{(n,n)} = H_{nn} / n!` stays bounded, so the table never overflows.

use std::ops::{Add, Div, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector};

/// `|H|` beyond which raw values are refused in favour of [`ScaledHermite`].
pub const RAW_LIMIT: f64 = 1e250;
/// Largest Hermite table, in entries.
pub const MAX_TABLE_ENTRIES: usize = 50_000_000;

const SYMMETRY_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct HermiteParams {
    r: CMatrix,
    y: Option<CVector>,
    ry: CVector,
}

impl HermiteParams {
    pub fn new(r: CMatrix, y: CVector) -> Result<Self> {
        let n = r.nrows();
        if r.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, found: r.ncols() });
        }
        if y.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: y.len() });
        }
        check_symmetric(&r)?;
        let ry = &r * &y;
        Ok(Self { r, y: Some(y), ry })
    }

    /// Parameters given through the product `R y` only. The recurrence never
    /// needs `y` itself, and `R y` stays finite when `y` does not exist.
    pub fn from_shift(r: CMatrix, ry: CVector) -> Result<Self> {
        let n = r.nrows();
        if r.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, found: r.ncols() });
        }
        if ry.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: ry.len() });
        }
        check_symmetric(&r)?;
        Ok(Self { r, y: None, ry })
    }

    /// Zero argument.
    pub fn at_origin(r: CMatrix) -> Result<Self> {
        let n = r.nrows();
        Self::new(r, CVector::zeros(n))
    }

    pub fn dim(&self) -> usize {
        self.r.nrows()
    }

    pub fn r(&self) -> &CMatrix {
        &self.r
    }

    pub fn y(&self) -> Option<&CVector> {
        self.y.as_ref()
    }

    pub fn ry(&self) -> &CVector {
        &self.ry
    }
}

fn check_symmetric(r: &CMatrix) -> Result<()> {
    let asym = linalg::max_abs_diff_complex(r, &r.transpose());
    if asym > SYMMETRY_TOL * (1.0 + r.iter().map(|z| z.norm()).fold(0.0, f64::max)) {
        return Err(Error::Domain(format!("R is not symmetric (defect {asym:e})")));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultiIndex(pub Vec<usize>);

impl MultiIndex {
    pub fn total_degree(&self) -> usize {
        self.0.iter().sum()
    }

    /// `ln(n!)` summed over components.
    pub fn ln_factorial(&self) -> f64 {
        self.0.iter().map(|&k| ln_factorial(k)).sum()
    }
}

impl From<&[usize]> for MultiIndex {
    fn from(v: &[usize]) -> Self {
        MultiIndex(v.to_vec())
    }
}

pub fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// A Hermite value as `normalized * exp(ln_factor)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScaledHermite {
    pub normalized: Complex64,
    pub ln_factor: f64,
}

impl ScaledHermite {
    pub fn ln_abs(&self) -> f64 {
        self.normalized.norm().ln() + self.ln_factor
    }

    pub fn value(&self) -> Result<Complex64> {
        let ln_abs = self.ln_abs();
        if ln_abs > RAW_LIMIT.ln() {
            return Err(Error::Overflow { ln_abs });
        }
        Ok(self.normalized * self.ln_factor.exp())
    }
}

/// Normalized Hermite values `H_k / sqrt(k!)` for every `k` in the box
/// `0 <= k_i <= upper_i`.
#[derive(Clone, Debug)]
pub struct HermiteTable {
    extent: Vec<usize>,
    strides: Vec<usize>,
    values: Vec<Complex64>,
}

impl HermiteTable {
    pub fn build(params: &HermiteParams, upper: &MultiIndex) -> Result<Self> {
        let dim = params.dim();
        if upper.0.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: upper.0.len() });
        }
        let extent: Vec<usize> = upper.0.iter().map(|&u| u + 1).collect();
        let total = extent
            .iter()
            .try_fold(1usize, |acc, &e| acc.checked_mul(e))
            .filter(|&t| t <= MAX_TABLE_ENTRIES)
            .ok_or_else(|| Error::Domain(format!("Hermite table {extent:?} too large")))?;
        let mut strides = vec![1usize; dim];
        for i in (0..dim.saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * extent[i + 1];
        }
        let sqrt_int: Vec<f64> = (0..=extent.iter().copied().max().unwrap_or(1))
            .map(|k| (k as f64).sqrt())
            .collect();

        let mut values = vec![Complex64::new(0.0, 0.0); total];
        values[0] = Complex64::new(1.0, 0.0);
        let mut idx = vec![0usize; dim];
        for lin in 1..total {
            // advance the odometer to `lin`
            for pos in (0..dim).rev() {
                idx[pos] += 1;
                if idx[pos] < extent[pos] {
                    break;
                }
                idx[pos] = 0;
            }
            let i = (0..dim).rev().find(|&p| idx[p] > 0).expect("nonzero index");
            let prev = lin - strides[i];
            let mut acc = params.ry[i] * values[prev];
            for j in 0..dim {
                let nj = idx[j] - usize::from(j == i);
                if nj > 0 {
                    acc -= params.r[(i, j)] * sqrt_int[nj] * values[prev - strides[j]];
                }
            }
            values[lin] = acc / sqrt_int[idx[i]];
        }
        Ok(Self { extent, strides, values })
    }

    fn offset(&self, k: &[usize]) -> Result<usize> {
        if k.len() != self.extent.len() {
            return Err(Error::DimensionMismatch { expected: self.extent.len(), found: k.len() });
        }
        let mut off = 0;
        for (p, (&ki, &e)) in k.iter().zip(&self.extent).enumerate() {
            if ki >= e {
                return Err(Error::Domain(format!("index {k:?} outside Hermite table")));
            }
            off += ki * self.strides[p];
        }
        Ok(off)
    }

    /// `H_k / sqrt(k!)`.
    pub fn normalized(&self, k: &[usize]) -> Result<Complex64> {
        Ok(self.values[self.offset(k)?])
    }

    pub fn scaled(&self, k: &[usize]) -> Result<ScaledHermite> {
        let normalized = self.normalized(k)?;
        let ln_factor = 0.5 * k.iter().map(|&n| ln_factorial(n)).sum::<f64>();
        Ok(ScaledHermite { normalized, ln_factor })
    }

    pub fn value(&self, k: &[usize]) -> Result<Complex64> {
        self.scaled(k)?.value()
    }
}

/// `H_n^{R}(y)` by the recurrence.
pub fn hermite_multi(params: &HermiteParams, n: &MultiIndex) -> Result<Complex64> {
    hermite_multi_scaled(params, n)?.value()
}

pub fn hermite_multi_scaled(params: &HermiteParams, n: &MultiIndex) -> Result<ScaledHermite> {
    HermiteTable::build(params, n)?.scaled(&n.0)
}

/// Legendre polynomial by the three-term recurrence
/// `(n+1) L_{n+1} = (2n+1) x L_n - n L_{n-1}`.
pub fn legendre<T>(n: usize, x: T) -> T
where
    T: Copy + From<f64> + Add<Output = T> + Sub<Output = T> + Mul<Output = T> + Div<Output = T>,
{
    scaled_legendre(n, x, T::from(1.0))
}

/// `s^n L_n(x)`, computed by the recurrence multiplied through by `s^{n+1}`
/// so that large `x` paired with small `s` does not overflow.
pub fn scaled_legendre<T>(n: usize, x: T, s: T) -> T
where
    T: Copy + From<f64> + Add<Output = T> + Sub<Output = T> + Mul<Output = T> + Div<Output = T>,
{
    let xs = x * s;
    let ss = s * s;
    let mut prev = T::from(1.0);
    if n == 0 {
        return prev;
    }
    let mut cur = xs;
    for k in 1..n {
        let kf = k as f64;
        let next = (T::from(2.0 * kf + 1.0) * xs * cur - T::from(kf) * ss * prev) / T::from(kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Parameters of the Legendre form of the diagonal two-variable Hermite
/// values: `H_nn^{R}(0,0) = n! (-1)^n s^n L_n(x)` with
/// `s = (r12^2 - r11 r22)^{1/2}` and `x = r / sqrt(r^2 - 1)`,
/// `r = r12 / sqrt(r11 r22)`, on principal branches except that the sign of
/// `x` is fixed by `x s = r12`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LegendreReduction {
    pub s: Complex64,
    pub x: Complex64,
}

const DEGENERATE_TOL: f64 = 1e-300;

impl LegendreReduction {
    pub fn new(r: &CMatrix) -> Result<Self> {
        if r.nrows() != 2 || r.ncols() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, found: r.nrows() });
        }
        let (r11, r12, r22) = (r[(0, 0)], r[(0, 1)], r[(1, 1)]);
        let s = (r12 * r12 - r11 * r22).sqrt();
        let g = (r11 * r22).sqrt();
        let x = if s.norm() <= DEGENERATE_TOL {
            // x -> infinity; the scaled recurrence only needs x*s = r12
            Complex64::new(f64::INFINITY, 0.0)
        } else if g.norm() <= DEGENERATE_TOL {
            r12 / s
        } else {
            let rr = r12 / g;
            let x = rr / (rr * rr - 1.0).sqrt();
            // independent principal roots can leave x s = -r12
            if (x * s - r12).norm() <= (x * s + r12).norm() {
                x
            } else {
                -x
            }
        };
        Ok(Self { s, x })
    }

    /// `(-1)^n s^n L_n(x) = H_nn(0,0) / n!` for `n = 0..=n_max`.
    pub fn normalized_diagonal(&self, r12: Complex64, n_max: usize) -> Vec<Complex64> {
        let xs = if self.x.re.is_infinite() { r12 } else { self.x * self.s };
        let ss = self.s * self.s;
        let mut out = Vec::with_capacity(n_max + 1);
        let (mut prev, mut cur) = (Complex64::new(1.0, 0.0), xs);
        out.push(prev);
        for k in 0..n_max {
            let sign = if (k + 1) % 2 == 0 { 1.0 } else { -1.0 };
            out.push(cur * sign);
            let kf = (k + 1) as f64;
            let next = ((2.0 * kf + 1.0) * xs * cur - kf * ss * prev) / (kf + 1.0);
            prev = cur;
            cur = next;
        }
        out
    }
}

/// `H_nn^{R}(0,0)` for a 2x2 symmetric `R` via the Legendre reduction.
pub fn hermite_diagonal_zero(r: &CMatrix, n: usize) -> Result<Complex64> {
    let red = LegendreReduction::new(r)?;
    let normalized = red.normalized_diagonal(r[(0, 1)], n)[n];
    ScaledHermite { normalized, ln_factor: ln_factorial(n) }.value()
}

/// Closed form of `G(lambda) = sum_n lambda^n / n! H_{nn}^{R}(R^-1 y)`:
///
/// `det(L Sx R + I)^{-1/2} exp(y (L Sx R + I)^{-1} Sx L y / 2)`
///
/// with `L = diag(lambda, lambda)` and `Sx = [[0, I], [I, 0]]`. The square
/// root is continued along the segment from `lambda = 0`, where `G = 1`.
pub fn generating_function_value(r: &CMatrix, y: &CVector, lambda: &[f64]) -> Result<Complex64> {
    let dim = r.nrows();
    if !dim.is_multiple_of(2) || r.ncols() != dim {
        return Err(Error::Domain("R must be square with even dimension".into()));
    }
    if y.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: y.len() });
    }
    let n = dim / 2;
    if lambda.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: lambda.len() });
    }
    let sx = linalg::to_complex(&linalg::block_swap(n));
    let id = CMatrix::identity(dim, dim);
    let lam_mat = |scale: f64| {
        let mut l = DMatrix::zeros(dim, dim);
        for (j, &v) in lambda.iter().enumerate() {
            l[(j, j)] = v * scale;
            l[(j + n, j + n)] = v * scale;
        }
        linalg::to_complex(&l)
    };

    const STEPS: usize = 64;
    let mut root = Complex64::new(1.0, 0.0);
    for k in 1..=STEPS {
        let tau = k as f64 / STEPS as f64;
        let det = (lam_mat(tau) * &sx * r + &id).determinant();
        if det.norm() < 1e-300 || !det.re.is_finite() {
            return Err(Error::Domain(format!(
                "det(L Sx R + I) vanishes on the path to lambda = {lambda:?}"
            )));
        }
        root = linalg::continued_sqrt(det, root);
    }
    let l = lam_mat(1.0);
    let m = &l * &sx * r + &id;
    let inv = linalg::inverse_complex(&m, "generating function")?;
    let expo = (y.transpose() * inv * &sx * &l * y)[(0, 0)] * 0.5;
    Ok(expo.exp() / root)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn off_diag(r: f64) -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[c(0.0), c(r), c(r), c(0.0)])
    }

    #[test]
    fn zero_index_is_one() {
        let r = CMatrix::from_row_slice(2, 2, &[c(0.3), Complex64::new(0.1, 0.2), Complex64::new(0.1, 0.2), c(-0.4)]);
        let p = HermiteParams::new(r, CVector::from_vec(vec![c(1.0), c(-2.0)])).unwrap();
        assert_eq!(hermite_multi(&p, &MultiIndex(vec![0, 0])).unwrap(), c(1.0));
    }

    #[test]
    fn off_diagonal_first_order() {
        let p = HermiteParams::at_origin(off_diag(0.37)).unwrap();
        let h = hermite_multi(&p, &MultiIndex(vec![1, 1])).unwrap();
        assert!((h - c(-0.37)).norm() < 1e-15);
    }

    #[test]
    fn off_diagonal_closed_form() {
        let r = 0.6;
        let p = HermiteParams::at_origin(off_diag(r)).unwrap();
        let table = HermiteTable::build(&p, &MultiIndex(vec![10, 10])).unwrap();
        for k in 0..=10usize {
            let expected = (-r).powi(k as i32) * ln_factorial(k).exp();
            let h = table.value(&[k, k]).unwrap();
            assert!((h.re - expected).abs() <= 1e-12 * expected.abs(), "k = {k}");
            assert!(h.im.abs() < 1e-12 * expected.abs().max(1.0));
        }
    }

    #[test]
    fn dimension_mismatch_errors() {
        let p = HermiteParams::at_origin(off_diag(0.2)).unwrap();
        assert!(matches!(
            hermite_multi(&p, &MultiIndex(vec![1, 1, 1])),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(HermiteParams::new(off_diag(0.2), CVector::zeros(3)).is_err());
        let asym = CMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(0.5), c(0.0)]);
        assert!(HermiteParams::at_origin(asym).is_err());
    }

    #[test]
    fn huge_values_refuse_raw_form() {
        let p = HermiteParams::at_origin(off_diag(0.9)).unwrap();
        let n = MultiIndex(vec![200, 200]);
        assert!(matches!(hermite_multi(&p, &n), Err(Error::Overflow { .. })));
        let scaled = hermite_multi_scaled(&p, &n).unwrap();
        let expected_ln = 200.0 * 0.9f64.ln() + ln_factorial(200);
        assert!((scaled.ln_abs() - expected_ln).abs() < 1e-9);
    }

    #[test]
    fn legendre_small_orders() {
        assert_eq!(legendre(0, 0.3f64), 1.0);
        assert_eq!(legendre(1, 0.3f64), 0.3);
        assert!((legendre(2, 1.0f64) - 1.0).abs() < 1e-15);
        assert!((legendre(3, 0.5f64) + 0.4375).abs() < 1e-15);
    }

    #[test]
    fn legendre_matches_explicit_polynomials() {
        let explicit: [fn(f64) -> f64; 6] = [
            |_| 1.0,
            |x| x,
            |x| (3.0 * x * x - 1.0) / 2.0,
            |x| (5.0 * x.powi(3) - 3.0 * x) / 2.0,
            |x| (35.0 * x.powi(4) - 30.0 * x * x + 3.0) / 8.0,
            |x| (63.0 * x.powi(5) - 70.0 * x.powi(3) + 15.0 * x) / 8.0,
        ];
        for (n, f) in explicit.iter().enumerate() {
            for k in 0..=20 {
                let x = -1.5 + 0.15 * k as f64;
                assert!((legendre(n, x) - f(x)).abs() < 1e-12, "n={n} x={x}");
            }
        }
        let z = Complex64::new(0.2, 1.3);
        let l3 = (z * z * z * 5.0 - z * 3.0) / 2.0;
        assert!((legendre(3, z) - l3).norm() < 1e-12);
    }

    #[test]
    fn scaled_legendre_consistent() {
        let (x, s) = (Complex64::new(0.3, -2.0), Complex64::new(0.5, 0.1));
        for n in 0..12 {
            let direct = legendre(n, x) * s.powu(n as u32);
            assert!((scaled_legendre(n, x, s) - direct).norm() < 1e-12 * direct.norm().max(1.0));
        }
    }

    #[test]
    fn diagonal_zero_off_diagonal_case() {
        let r = 0.45;
        assert_eq!(hermite_diagonal_zero(&off_diag(r), 0).unwrap(), c(1.0));
        let h2 = hermite_diagonal_zero(&off_diag(r), 2).unwrap();
        assert!((h2 - c(2.0 * r * r)).norm() < 1e-14);
    }

    #[test]
    fn generating_function_trivial_cases() {
        let r = CMatrix::from_row_slice(2, 2, &[c(0.1), c(0.3), c(0.3), c(-0.2)]);
        let y = CVector::from_vec(vec![c(0.4), c(-0.1)]);
        assert!((generating_function_value(&r, &y, &[0.0]).unwrap() - c(1.0)).norm() < 1e-15);
        // y = 0: only the determinant survives
        let g = generating_function_value(&off_diag(0.3), &CVector::zeros(2), &[0.5]).unwrap();
        assert!((g - c(1.0 / 1.15)).norm() < 1e-14);
    }

    #[test]
    fn generating_function_singular_path() {
        // 1 + lambda r = 0 at lambda = 1 for r = -1
        let err = generating_function_value(&off_diag(-1.0), &CVector::zeros(2), &[1.0]);
        assert!(matches!(err, Err(Error::Domain(_))));
    }
}
