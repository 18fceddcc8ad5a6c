//! Coordinate-representation Green function of the two-mode system.
//!
//! With `Lambda(t) = [[l1, l2], [l3, l4]]` partitioned in `(p, q)` blocks,
//!
//! ```text
//! G(x1, x2, t) = [det(-2 pi i l3)]^{-1/2}
//!     exp{-(i/2) [x2 l3^-1 l4 x2 - 2 x2 l3^-1 x1 + x1 l1 l3^-1 x1]}
//! ```
//!
//! propagates a wavefunction from coordinates `x1` at time 0 to `x2` at
//! time `t`. `l3` vanishes at `t = 0`, where `G` tends to `delta(x2 - x1)`.

use nalgebra::{DMatrix, Matrix2, Vector2};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::evolution::{build_symplectic, SymplecticMap};
use crate::model::{GaussianState, ModelParams};

/// `|det l3|` at or below this is treated as a caustic.
pub const CAUSTIC_TOL: f64 = 1e-12;
/// Resolution of the time scan for conjugate points of `l3`.
const MASLOV_STEP: f64 = 1e-3;
/// Golden-section iterations when refining a conjugate point.
const MINIMIZE_ITERS: usize = 80;
/// Singular values of `l3` at or below this count toward the nullity at a
/// refined conjugate point.
const NULLITY_TOL: f64 = 1e-6;

fn block(m: &DMatrix<f64>, r: usize, c: usize) -> Matrix2<f64> {
    Matrix2::new(m[(r, c)], m[(r, c + 1)], m[(r + 1, c)], m[(r + 1, c + 1)])
}

/// `Lambda(t)` split into `2 x 2` blocks: rows `(p, q)` invariants,
/// columns `(p, q)` quadratures.
#[derive(Clone, Debug, PartialEq)]
pub struct PropagatorBlocks {
    pub lambda1: Matrix2<f64>,
    pub lambda2: Matrix2<f64>,
    pub lambda3: Matrix2<f64>,
    pub lambda4: Matrix2<f64>,
}

impl PropagatorBlocks {
    pub fn from_map(map: &SymplecticMap) -> Self {
        let m = map.matrix();
        Self { lambda1: block(m, 0, 0), lambda2: block(m, 0, 2), lambda3: block(m, 2, 0), lambda4: block(m, 2, 2) }
    }

    pub fn new(params: &ModelParams, t: f64) -> Result<Self> {
        Ok(Self::from_map(&build_symplectic(params, t)?))
    }

    pub fn assemble(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(4, 4);
        for (b, r, c) in [(&self.lambda1, 0, 0), (&self.lambda2, 0, 2), (&self.lambda3, 2, 0), (&self.lambda4, 2, 2)] {
            for i in 0..2 {
                for j in 0..2 {
                    m[(r + i, c + j)] = b[(i, j)];
                }
            }
        }
        m
    }

    pub fn det_lambda3(&self) -> f64 {
        self.lambda3.determinant()
    }

    /// `l3^-1 l4` and `l1 l3^-1`, or a caustic error.
    pub fn quadratic_blocks(&self, t: f64) -> Result<(Matrix2<f64>, Matrix2<f64>, Matrix2<f64>)> {
        let det = self.det_lambda3();
        if det.abs() <= CAUSTIC_TOL {
            return Err(Error::Caustic { t, det });
        }
        let inv = self.lambda3.try_inverse().ok_or(Error::Caustic { t, det })?;
        Ok((inv * self.lambda4, inv, self.lambda1 * inv))
    }
}

fn asymmetry2(m: &Matrix2<f64>) -> f64 {
    (m[(0, 1)] - m[(1, 0)]).abs()
}

fn singular_values(params: &ModelParams, s: f64) -> Result<Vector2<f64>> {
    Ok(PropagatorBlocks::new(params, s)?.lambda3.singular_values())
}

/// Nullity of `l3` at a local minimum of its smallest singular value
/// bracketed by `[lo, hi]`, or 0 when the minimum stays clear of zero.
fn conjugate_multiplicity(params: &ModelParams, mut lo: f64, mut hi: f64) -> Result<usize> {
    let smallest = |s: f64| singular_values(params, s).map(|v| v.min());
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (hi - ratio * (hi - lo), lo + ratio * (hi - lo));
    let (mut fa, mut fb) = (smallest(a)?, smallest(b)?);
    for _ in 0..MINIMIZE_ITERS {
        if fa < fb {
            hi = b;
            (b, fb) = (a, fa);
            a = hi - ratio * (hi - lo);
            fa = smallest(a)?;
        } else {
            lo = a;
            (a, fa) = (b, fb);
            b = lo + ratio * (hi - lo);
            fb = smallest(b)?;
        }
    }
    let sv = singular_values(params, if fa < fb { a } else { b })?;
    Ok(sv.iter().filter(|&&v| v <= NULLITY_TOL).count())
}

/// Maslov index on `(0, t)`, counting conjugate points of `l3` with their
/// multiplicity, and `det l3` at the first invertible scan point.
fn scan_caustics(params: &ModelParams, t: f64) -> Result<(usize, f64)> {
    let steps = ((t / MASLOV_STEP).ceil() as usize).max(1);
    let times: Vec<f64> = (1..=steps).map(|k| t * k as f64 / steps as f64).collect();
    let mut first = None;
    let mut dets = Vec::with_capacity(steps);
    let mut smallest = Vec::with_capacity(steps);
    for &s in &times {
        let blocks = PropagatorBlocks::new(params, s)?;
        let det = blocks.det_lambda3();
        if first.is_none() && det.abs() > CAUSTIC_TOL {
            first = Some(det);
        }
        dets.push(det);
        smallest.push(blocks.lambda3.singular_values().min());
    }
    let mut index = 0;
    for k in 1..steps.saturating_sub(1) {
        if smallest[k] <= smallest[k - 1] && smallest[k] < smallest[k + 1] {
            let m = conjugate_multiplicity(params, times[k - 1], times[k + 1])?;
            let flips = dets[k - 1].signum() != dets[k + 1].signum();
            // an odd nullity always flips the sign of the determinant
            index += if flips && m % 2 == 0 { m + 1 } else { m };
        }
    }
    first.map(|d| (index, d)).ok_or(Error::Caustic { t, det: 0.0 })
}

/// Green function at one time, ready for evaluation on many points.
#[derive(Clone, Debug, PartialEq)]
pub struct GreenFunction {
    t: f64,
    a: Matrix2<f64>,
    b: Matrix2<f64>,
    c: Matrix2<f64>,
    det_lambda3: f64,
    maslov_index: usize,
    prefactor: Complex64,
}

impl GreenFunction {
    pub fn new(params: &ModelParams, t: f64) -> Result<Self> {
        let blocks = PropagatorBlocks::new(params, t)?;
        let (a, b, c) = blocks.quadratic_blocks(t)?;
        let det = blocks.det_lambda3();
        let (maslov_index, first_det) = scan_caustics(params, t)?;
        // principal branch at the first invertible time, then a quarter
        // turn per caustic
        let z0 = Complex64::new(-4.0 * std::f64::consts::PI.powi(2) * first_det, 0.0);
        let phase0 = z0.sqrt().inv().arg();
        let phase = phase0 - std::f64::consts::FRAC_PI_2 * maslov_index as f64;
        let modulus = 1.0 / (2.0 * std::f64::consts::PI * det.abs().sqrt());
        Ok(Self { t, a, b, c, det_lambda3: det, maslov_index, prefactor: Complex64::from_polar(modulus, phase) })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn det_lambda3(&self) -> f64 {
        self.det_lambda3
    }

    pub fn maslov_index(&self) -> usize {
        self.maslov_index
    }

    pub fn prefactor(&self) -> Complex64 {
        self.prefactor
    }

    /// `Q` in `G = prefactor exp(-(i/2) X^T Q X)`, `X = (x1, x2)`.
    pub fn exponent_hessian(&self) -> DMatrix<f64> {
        let mut q = DMatrix::zeros(4, 4);
        for i in 0..2 {
            for j in 0..2 {
                q[(i, j)] = self.c[(i, j)];
                q[(i, j + 2)] = -self.b[(j, i)];
                q[(i + 2, j)] = -self.b[(i, j)];
                q[(i + 2, j + 2)] = self.a[(i, j)];
            }
        }
        q
    }

    /// Asymmetry of `l3^-1 l4` and `l1 l3^-1`.
    pub fn symmetry_defect(&self) -> f64 {
        asymmetry2(&self.a).max(asymmetry2(&self.c))
    }

    pub fn eval(&self, x1: [f64; 2], x2: [f64; 2]) -> Complex64 {
        let (x1, x2) = (Vector2::from(x1), Vector2::from(x2));
        let form = x2.dot(&(self.a * x2)) - 2.0 * x2.dot(&(self.b * x1)) + x1.dot(&(self.c * x1));
        self.prefactor * Complex64::from_polar(1.0, -0.5 * form)
    }
}

pub fn green_function(x1: [f64; 2], x2: [f64; 2], params: &ModelParams, t: f64) -> Result<Complex64> {
    Ok(GreenFunction::new(params, t)?.eval(x1, x2))
}

/// Uniform tensor grid for the quadrature check.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureGrid {
    pub half_width: f64,
    pub points: usize,
}

impl QuadratureGrid {
    fn nodes(&self) -> (Vec<f64>, f64) {
        let h = 2.0 * self.half_width / (self.points - 1) as f64;
        ((0..self.points).map(|i| -self.half_width + h * i as f64).collect(), h)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureMoments {
    /// `<q_i q_j>` of the propagated wavepacket.
    pub q_cov: Matrix2<f64>,
    /// `int |psi(x2, t)|^2 dx2`.
    pub norm: f64,
}

/// Propagate the vacuum wavefunction `pi^{-1/2} exp(-|x|^2 / 2)` through
/// `G` by tensor-grid quadrature over `x1`, then take coordinate second
/// moments by quadrature over `x2`.
pub fn propagate_vacuum_moments(
    params: &ModelParams,
    t: f64,
    source: QuadratureGrid,
    target: QuadratureGrid,
) -> Result<QuadratureMoments> {
    let g = GreenFunction::new(params, t)?;
    let (xs, h1) = source.nodes();
    let (ys, h2) = target.nodes();
    let n = xs.len();

    // x1-only part of the integrand
    let weight: Vec<Complex64> = (0..n * n)
        .map(|idx| {
            let x1 = Vector2::new(xs[idx / n], xs[idx % n]);
            let psi0 = (-0.5 * x1.norm_squared()).exp() / std::f64::consts::PI.sqrt();
            Complex64::from_polar(psi0, -0.5 * x1.dot(&(g.c * x1)))
        })
        .collect();

    let rows: Vec<(f64, Matrix2<f64>)> = ys
        .par_iter()
        .map(|&y0| {
            let mut norm = 0.0;
            let mut second = Matrix2::zeros();
            for &y1 in &ys {
                let x2 = Vector2::new(y0, y1);
                let k = g.b.transpose() * x2;
                let e0: Vec<Complex64> = xs.iter().map(|&x| Complex64::from_polar(1.0, k[0] * x)).collect();
                let e1: Vec<Complex64> = xs.iter().map(|&x| Complex64::from_polar(1.0, k[1] * x)).collect();
                let mut acc = Complex64::new(0.0, 0.0);
                for i in 0..n {
                    let inner: Complex64 = (0..n).map(|j| weight[i * n + j] * e1[j]).sum();
                    acc += e0[i] * inner;
                }
                let psi = g.prefactor * Complex64::from_polar(1.0, -0.5 * x2.dot(&(g.a * x2))) * acc * (h1 * h1);
                let dens = psi.norm_sqr() * h2 * h2;
                norm += dens;
                second += x2 * x2.transpose() * dens;
            }
            (norm, second)
        })
        .collect();
    let norm: f64 = rows.iter().map(|r| r.0).sum();
    let second: Matrix2<f64> = rows.iter().map(|r| r.1).sum();
    Ok(QuadratureMoments { q_cov: second / norm, norm })
}

/// Grids used for the consistency check against covariance evolution.
pub const DEFAULT_SOURCE_GRID: QuadratureGrid = QuadratureGrid { half_width: 9.0, points: 121 };
pub const DEFAULT_TARGET_GRID: QuadratureGrid = QuadratureGrid { half_width: 7.0, points: 57 };

/// Largest deviation between the quadrature `q`-block covariance and the
/// one predicted by covariance evolution, and the quadrature norm.
pub fn quadrature_consistency(params: &ModelParams, t: f64) -> Result<(f64, f64)> {
    let moments = propagate_vacuum_moments(params, t, DEFAULT_SOURCE_GRID, DEFAULT_TARGET_GRID)?;
    let state = crate::evolution::evolve_covariance(&GaussianState::vacuum(2), params, t)?;
    let expected = block(state.cov(), 2, 2);
    Ok(((moments.q_cov - expected).abs().max(), moments.norm))
}
