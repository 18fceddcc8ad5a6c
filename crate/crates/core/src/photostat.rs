//! Photon and phonon number statistics of Gaussian states.
//!
//! For an `N`-mode Gaussian state with dispersion matrix `sigma` and means
//! `<Q>`, the number distribution is
//!
//! ```text
//! P_n = P_0 H_{nn}^{R}(y) / n!
//! R   = U^dagger (I - 2 sigma)(I + 2 sigma)^-1 U^*
//! y   = 2 U^T (I - 2 sigma)^-1 <Q>
//! P_0 = det(sigma + I/2)^{-1/2} exp(-<Q> (2 sigma + I)^-1 <Q>)
//! ```
//!
//! Subsystem statistics follow from the same formulas applied to the
//! sub-block of `sigma` belonging to the kept modes.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector};
use crate::model::{GaussianState, Mode};
use crate::special_fn::{HermiteParams, HermiteTable, LegendreReduction, MultiIndex};

/// Negative values down to this are clamped to zero.
pub const CLAMP_TOL: f64 = 1e-10;
/// Largest tolerated imaginary part of a computed probability.
pub const RESIDUE_TOL: f64 = 1e-9;
/// Target for the geometric tail estimate when choosing a truncation.
pub const TAIL_TARGET: f64 = 1e-8;
/// Largest truncation picked automatically for marginal distributions.
pub const MARGINAL_N_MAX_CAP: usize = 512;
/// Largest truncation accepted for the joint distribution; the
/// four-index Hermite table grows as `(n_max + 1)^4`.
pub const JOINT_N_MAX_CAP: usize = 48;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    GaussianFormula,
    Oracle,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Layout {
    Marginal,
    /// Row-major `(n, m)` grid with `n, m <= n_max`.
    Joint,
}

/// Truncated probability vector with an estimate of the omitted mass.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NumberDistribution {
    probs: Vec<f64>,
    n_max: usize,
    tail_bound: f64,
    provenance: Provenance,
    layout: Layout,
}

impl NumberDistribution {
    pub(crate) fn new(probs: Vec<f64>, n_max: usize, tail_bound: f64, provenance: Provenance, layout: Layout) -> Self {
        Self { probs, n_max, tail_bound, provenance, layout }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// `P_n` of a marginal distribution.
    pub fn get(&self, n: usize) -> Option<f64> {
        match self.layout {
            Layout::Marginal => self.probs.get(n).copied(),
            Layout::Joint => None,
        }
    }

    /// `P_nm` of a joint distribution.
    pub fn joint(&self, n: usize, m: usize) -> Option<f64> {
        match self.layout {
            Layout::Joint if n <= self.n_max && m <= self.n_max => Some(self.probs[n * (self.n_max + 1) + m]),
            _ => None,
        }
    }

    /// Sum a joint distribution over one mode, keeping `keep`.
    pub fn marginal(&self, keep: Mode) -> Option<NumberDistribution> {
        if self.layout != Layout::Joint {
            return None;
        }
        let dim = self.n_max + 1;
        let probs = (0..dim)
            .map(|k| {
                (0..dim)
                    .map(|j| match keep {
                        Mode::Photon => self.probs[k * dim + j],
                        Mode::Phonon => self.probs[j * dim + k],
                    })
                    .sum()
            })
            .collect();
        Some(NumberDistribution::new(probs, self.n_max, self.tail_bound, self.provenance, Layout::Marginal))
    }

    /// Mean and variance of a marginal distribution by direct summation.
    pub fn moments(&self) -> Option<(f64, f64)> {
        if self.layout != Layout::Marginal {
            return None;
        }
        let (m1, m2) = self.probs.iter().enumerate().fold((0.0, 0.0), |(a, b), (n, &p)| {
            let n = n as f64;
            (a + n * p, b + n * n * p)
        });
        Some((m1, m2 - m1 * m1))
    }
}

/// Clamp a computed probability, rejecting large negative or complex values.
fn clamp_probability(index: usize, value: Complex64) -> Result<f64> {
    if value.im.abs() > RESIDUE_TOL {
        return Err(Error::ComplexResidue { index, residue: value.im.abs() });
    }
    let p = value.re;
    if !p.is_finite() || p < -CLAMP_TOL {
        return Err(Error::NegativeProbability { index, value: p });
    }
    Ok(p.clamp(0.0, 1.0))
}

/// Geometric extrapolation of the mass beyond `last`, given the two final
/// shell masses. Falls back to the normalization deficit when the sequence
/// is not decaying.
fn geometric_tail(prev: f64, last: f64, deficit: f64) -> f64 {
    if last <= 0.0 {
        return 0.0;
    }
    if prev > 0.0 {
        let ratio = last / prev;
        if ratio < 1.0 {
            return last * ratio / (1.0 - ratio);
        }
    }
    deficit.max(0.0)
}

fn tail_of_shells(shells: &[f64]) -> f64 {
    let total: f64 = shells.iter().sum();
    let deficit = 1.0 - total;
    match shells {
        [] => 1.0,
        [_] => deficit.max(0.0),
        [.., prev, last] => geometric_tail(*prev, *last, deficit),
    }
}

fn complex_vec(v: &DVector<f64>) -> CVector {
    v.map(|x| Complex64::new(x, 0.0))
}

/// `R`, `R y`, `y` (when it exists) and `P_0` of a Gaussian state.
#[derive(Clone, Debug, PartialEq)]
pub struct DistributionParams {
    r: CMatrix,
    ry: CVector,
    y: Option<CVector>,
    p0: f64,
}

impl DistributionParams {
    pub fn r(&self) -> &CMatrix {
        &self.r
    }

    /// `y = 2 U^T (I - 2 sigma)^-1 <Q>`; absent when `I - 2 sigma` is
    /// singular and the means are nonzero.
    pub fn y(&self) -> Option<&CVector> {
        self.y.as_ref()
    }

    /// `R y = 2 U^dagger (I + 2 sigma)^-1 <Q>`, defined for every state.
    pub fn ry(&self) -> &CVector {
        &self.ry
    }

    pub fn p0(&self) -> f64 {
        self.p0
    }

    pub fn n_modes(&self) -> usize {
        self.r.nrows() / 2
    }

    pub fn hermite_params(&self) -> Result<HermiteParams> {
        HermiteParams::from_shift(self.r.clone(), self.ry.clone())
    }
}

pub fn build_distribution_params(state: &GaussianState) -> Result<DistributionParams> {
    let n = state.n_modes();
    let dim = 2 * n;
    let id = DMatrix::<f64>::identity(dim, dim);
    let two_sigma = state.cov() * 2.0;
    let plus_inv = linalg::inverse(&(&id + &two_sigma), "I + 2 sigma")
        .map_err(|_| Error::Domain("I + 2 sigma is singular; uncertainty relation violated".into()))?;
    let minus = &id - &two_sigma;

    let u = linalg::quadrature_unitary(n);
    let core = linalg::to_complex(&(&minus * &plus_inv));
    let r = u.adjoint() * core * u.conjugate();
    let defect = linalg::max_abs_diff_complex(&r, &r.transpose());
    if defect > 1e-10 {
        return Err(Error::Invariant { name: "R symmetric", detail: format!("defect {defect:e}") });
    }
    let r = (&r + r.transpose()) * Complex64::new(0.5, 0.0);

    let mean = state.mean();
    let ry = u.adjoint() * complex_vec(&(&plus_inv * mean * 2.0));
    let y = if mean.iter().all(|&m| m == 0.0) {
        Some(CVector::zeros(dim))
    } else {
        minus
            .clone()
            .try_inverse()
            .filter(|_| minus.determinant().abs() > 1e-12)
            .map(|inv| u.transpose() * complex_vec(&(inv * mean * 2.0)))
    };

    let det = (state.cov() + &id * 0.5).determinant();
    let quad = (mean.transpose() * &plus_inv * mean)[(0, 0)];
    let p0 = (-quad).exp() / det.sqrt();
    Ok(DistributionParams { r, ry, y, p0 })
}

/// `P_n` for an `N`-mode multi-index `n`.
pub fn number_probability(params: &DistributionParams, n: &[usize]) -> Result<f64> {
    let modes = params.n_modes();
    if n.len() != modes {
        return Err(Error::DimensionMismatch { expected: modes, found: n.len() });
    }
    let doubled: Vec<usize> = n.iter().chain(n.iter()).copied().collect();
    let table = HermiteTable::build(&params.hermite_params()?, &MultiIndex(doubled.clone()))?;
    let value = table.normalized(&doubled)? * params.p0;
    clamp_probability(0, value)
}

/// Photon-phonon distribution `P_nm`, `n, m <= n_max`.
pub fn joint_distribution(state: &GaussianState, n_max: usize) -> Result<NumberDistribution> {
    if state.n_modes() != 2 {
        return Err(Error::DimensionMismatch { expected: 4, found: state.cov().nrows() });
    }
    if n_max > JOINT_N_MAX_CAP {
        return Err(Error::Domain(format!(
            "joint n_max {n_max} exceeds {JOINT_N_MAX_CAP}"
        )));
    }
    let params = build_distribution_params(state)?;
    let table = HermiteTable::build(&params.hermite_params()?, &MultiIndex(vec![n_max; 4]))?;
    let dim = n_max + 1;
    let mut probs = Vec::with_capacity(dim * dim);
    for n in 0..dim {
        for m in 0..dim {
            let value = table.normalized(&[n, m, n, m])? * params.p0;
            probs.push(clamp_probability(n * dim + m, value)?);
        }
    }
    let shells: Vec<f64> = (0..dim)
        .map(|k| {
            (0..dim)
                .flat_map(|n| (0..dim).map(move |m| (n, m)))
                .filter(|&(n, m)| n.max(m) == k)
                .map(|(n, m)| probs[n * dim + m])
                .sum()
        })
        .collect();
    let tail = tail_of_shells(&shells);
    Ok(NumberDistribution::new(probs, n_max, tail, Provenance::GaussianFormula, Layout::Joint))
}

fn mode_indices(n_modes: usize, keep: &[usize]) -> Vec<usize> {
    keep.iter().copied().chain(keep.iter().map(|k| k + n_modes)).collect()
}

/// Reduced state of the modes in `keep`: crossing out the rows and columns
/// of the discarded modes.
pub fn reduce_modes(state: &GaussianState, keep: &[usize]) -> Result<GaussianState> {
    let n = state.n_modes();
    if keep.is_empty() || keep.iter().any(|&k| k >= n) {
        return Err(Error::Domain(format!("invalid mode selection {keep:?} for {n} modes")));
    }
    let idx = mode_indices(n, keep);
    let cov = linalg::select_rows_cols(state.cov(), &idx);
    let mean = DVector::from_iterator(idx.len(), idx.iter().map(|&i| state.mean()[i]));
    GaussianState::new(mean, cov)
}

pub fn marginal_state(state: &GaussianState, keep: Mode) -> Result<GaussianState> {
    if state.n_modes() != 2 {
        return Err(Error::DimensionMismatch { expected: 4, found: state.cov().nrows() });
    }
    reduce_modes(state, &[keep.index()])
}

/// Result of integrating `exp(-X A X)` over the trailing block of `X`:
/// `pi^{m/2} det(d)^{-1/2} exp(-x g x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianReduction {
    pub g: DMatrix<f64>,
    pub det_d: f64,
    pub integrated_dims: usize,
}

impl GaussianReduction {
    pub fn integral(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.g.nrows() {
            return Err(Error::DimensionMismatch { expected: self.g.nrows(), found: x.len() });
        }
        let x = DVector::from_column_slice(x);
        let quad = (x.transpose() * &self.g * &x)[(0, 0)];
        let pi_pow = std::f64::consts::PI.powf(0.5 * self.integrated_dims as f64);
        Ok(pi_pow / self.det_d.sqrt() * (-quad).exp())
    }
}

/// Integrate `exp(-X A X)` over the last `A.nrows() - n_keep` coordinates,
/// with `A = [[a, b], [c, d]]` and `g = a - (c^T + b) d^-1 (b^T + c) / 4`.
pub fn gaussian_integral_reduce(a_full: &DMatrix<f64>, n_keep: usize) -> Result<GaussianReduction> {
    let dim = a_full.nrows();
    if a_full.ncols() != dim || n_keep == 0 || n_keep >= dim {
        return Err(Error::Domain(format!("cannot keep {n_keep} of {dim} coordinates")));
    }
    let m = dim - n_keep;
    let a = a_full.view((0, 0), (n_keep, n_keep)).clone_owned();
    let b = a_full.view((0, n_keep), (n_keep, m)).clone_owned();
    let c = a_full.view((n_keep, 0), (m, n_keep)).clone_owned();
    let d = a_full.view((n_keep, n_keep), (m, m)).clone_owned();
    let det_d = d.determinant();
    if det_d <= 0.0 {
        return Err(Error::Domain("integrated block is not positive definite".into()));
    }
    let d_inv = linalg::inverse(&d, "Gaussian integral block")?;
    let g = &a - (c.transpose() + &b) * d_inv * (b.transpose() + &c) * 0.25;
    Ok(GaussianReduction { g, det_d, integrated_dims: m })
}

/// Reduced state of one mode via the Schur complement of `sigma^-1`:
/// `sigma_keep^-1 = 2 a - (c^T + b) d^-1 (b^T + c) / 2` with
/// `A = P sigma^-1 P / 2` and `P` moving the kept mode's `(p, q)` first.
pub fn marginal_state_schur(state: &GaussianState, keep: Mode) -> Result<GaussianState> {
    if state.n_modes() != 2 {
        return Err(Error::DimensionMismatch { expected: 4, found: state.cov().nrows() });
    }
    let k = keep.index();
    let o = keep.other().index();
    let order = [k, k + 2, o, o + 2];
    let inv = linalg::inverse(state.cov(), "dispersion matrix")?;
    let a_full = linalg::select_rows_cols(&inv, &order) * 0.5;
    let reduced = gaussian_integral_reduce(&a_full, 2)?;
    let sigma_keep = linalg::inverse(&(reduced.g * 2.0), "reduced inverse dispersion")?;
    let mean = DVector::from_vec(vec![state.mean()[k], state.mean()[k + 2]]);
    GaussianState::new(mean, sigma_keep)
}

fn require_single_mode(state: &GaussianState) -> Result<()> {
    if state.n_modes() != 1 {
        return Err(Error::DimensionMismatch { expected: 2, found: state.cov().nrows() });
    }
    Ok(())
}

fn marginal_from_probs(probs: Vec<f64>, n_max: usize) -> NumberDistribution {
    let tail = tail_of_shells(&probs);
    NumberDistribution::new(probs, n_max, tail, Provenance::GaussianFormula, Layout::Marginal)
}

/// Single-mode number distribution through `H_nn^{R}(y)` of two variables.
pub fn single_mode_distribution_hermite(mode: &GaussianState, n_max: usize) -> Result<NumberDistribution> {
    require_single_mode(mode)?;
    let params = build_distribution_params(mode)?;
    let table = HermiteTable::build(&params.hermite_params()?, &MultiIndex(vec![n_max, n_max]))?;
    let probs = (0..=n_max)
        .map(|n| clamp_probability(n, table.normalized(&[n, n])? * params.p0))
        .collect::<Result<Vec<_>>>()?;
    Ok(marginal_from_probs(probs, n_max))
}

/// Single-mode number distribution through the Legendre form, valid for
/// zero quadrature means.
pub fn single_mode_distribution_legendre(mode: &GaussianState, n_max: usize) -> Result<NumberDistribution> {
    require_single_mode(mode)?;
    if !mode.is_zero_mean(0.0) {
        return Err(Error::Unsupported("Legendre form needs zero quadrature means".into()));
    }
    let params = build_distribution_params(mode)?;
    let reduction = LegendreReduction::new(params.r())?;
    let probs = reduction
        .normalized_diagonal(params.r()[(0, 1)], n_max)
        .into_iter()
        .enumerate()
        .map(|(n, h)| clamp_probability(n, h * params.p0))
        .collect::<Result<Vec<_>>>()?;
    Ok(marginal_from_probs(probs, n_max))
}

/// Stokes-photon distribution from the two-variable Hermite route.
pub fn stokes_distribution_hermite(state: &GaussianState, n_max: usize) -> Result<NumberDistribution> {
    single_mode_distribution_hermite(&marginal_state(state, Mode::Photon)?, n_max)
}

/// Stokes-photon distribution from the Legendre route.
pub fn stokes_distribution_legendre(state: &GaussianState, n_max: usize) -> Result<NumberDistribution> {
    single_mode_distribution_legendre(&marginal_state(state, Mode::Photon)?, n_max)
}

/// Smallest truncation whose geometric tail estimate and normalization
/// deficit are both below [`TAIL_TARGET`], capped at
/// [`MARGINAL_N_MAX_CAP`].
pub fn choose_truncation(mode: &GaussianState) -> Result<usize> {
    let full = single_mode_distribution_hermite(mode, MARGINAL_N_MAX_CAP)?;
    let p = full.probs();
    let mut cumulative = 0.0;
    for n in 0..p.len() {
        cumulative += p[n];
        let deficit = 1.0 - cumulative;
        let tail = if n == 0 { deficit.max(0.0) } else { geometric_tail(p[n - 1], p[n], deficit) };
        if tail < TAIL_TARGET && deficit < TAIL_TARGET {
            return Ok(n);
        }
    }
    Ok(MARGINAL_N_MAX_CAP)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StokesMoments {
    pub mean: f64,
    pub variance: f64,
}

/// Mean and variance of the Stokes photon number from the photon block of
/// the dispersion matrix:
/// `<n> = (s_pp + s_qq - 1) / 2`, `Var n = (s_pp^2 + s_qq^2 + 2 s_pq^2) / 2 - 1/4`.
pub fn stokes_moments(state: &GaussianState) -> Result<StokesMoments> {
    if !state.is_zero_mean(1e-12) {
        return Err(Error::Unsupported("moments are implemented for zero quadrature means".into()));
    }
    let ph = marginal_state(state, Mode::Photon)?;
    let s = ph.cov();
    let (spp, sqq, spq) = (s[(0, 0)], s[(1, 1)], s[(0, 1)]);
    // both are nonnegative; clamp rounding noise at the vacuum
    Ok(StokesMoments {
        mean: (0.5 * (spp + sqq - 1.0)).max(0.0),
        variance: (0.5 * (spp * spp + sqq * sqq + 2.0 * spq * spq) - 0.25).max(0.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::evolve_covariance;
    use crate::model::{initial_state, Beta, ModelParams};

    fn squeezed(kt: f64, beta: Beta) -> GaussianState {
        let p = ModelParams::new(0.0, 0.0, kt, beta).unwrap();
        evolve_covariance(&initial_state(&p), &p, 1.0).unwrap()
    }

    #[test]
    fn vacuum_params() {
        let p = build_distribution_params(&GaussianState::vacuum(2)).unwrap();
        assert!(p.r().iter().all(|z| z.norm() < 1e-15));
        assert!((p.p0() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn thermal_vacuum_probability() {
        let nbar = 0.7;
        let p = build_distribution_params(&GaussianState::thermal(nbar).unwrap()).unwrap();
        assert!((p.p0() - 1.0 / (nbar + 1.0)).abs() < 1e-14);
    }

    #[test]
    fn squeezed_vacuum_p0() {
        let p = build_distribution_params(&squeezed(0.5, Beta::ZeroTemperature)).unwrap();
        let sech2 = 1.0 / 0.5f64.cosh().powi(2);
        assert!((p.p0() - sech2).abs() < 1e-14);
        assert!((sech2 - 0.786_448).abs() < 1e-6);
    }

    #[test]
    fn joint_at_zero_time_is_delta() {
        let p = ModelParams::new(1.0, 0.5, 0.2, Beta::ZeroTemperature).unwrap();
        let d = joint_distribution(&initial_state(&p), 5).unwrap();
        for n in 0..=5 {
            for m in 0..=5 {
                let expected = if n == 0 && m == 0 { 1.0 } else { 0.0 };
                assert!((d.joint(n, m).unwrap() - expected).abs() < 1e-15);
            }
        }
        assert_eq!(d.tail_bound(), 0.0);
    }

    #[test]
    fn joint_of_squeezed_vacuum_is_diagonal() {
        let d = joint_distribution(&squeezed(0.5, Beta::ZeroTemperature), 10).unwrap();
        let (sech2, tanh2) = (1.0 / 0.5f64.cosh().powi(2), 0.5f64.tanh().powi(2));
        for n in 0..=10 {
            for m in 0..=10 {
                let expected = if n == m { sech2 * tanh2.powi(n as i32) } else { 0.0 };
                assert!((d.joint(n, m).unwrap() - expected).abs() < 1e-12, "({n},{m})");
            }
        }
    }

    #[test]
    fn joint_rejects_oversized_truncation() {
        let s = squeezed(0.5, Beta::ZeroTemperature);
        assert!(joint_distribution(&s, JOINT_N_MAX_CAP + 1).is_err());
    }

    #[test]
    fn block_diagonal_marginal_is_block() {
        let cov = DMatrix::from_row_slice(4, 4, &[
            0.9, 0.0, 0.2, 0.0,
            0.0, 1.5, 0.0, 0.0,
            0.2, 0.0, 0.7, 0.0,
            0.0, 0.0, 0.0, 1.5,
        ]);
        let s = GaussianState::new(DVector::zeros(4), cov).unwrap();
        let ph = marginal_state(&s, Mode::Photon).unwrap();
        assert_eq!(ph.cov(), &DMatrix::from_row_slice(2, 2, &[0.9, 0.2, 0.2, 0.7]));
        let schur = marginal_state_schur(&s, Mode::Photon).unwrap();
        assert!(linalg::max_abs_diff(schur.cov(), ph.cov()) < 1e-14);
    }

    #[test]
    fn vacuum_marginal() {
        let ph = marginal_state(&GaussianState::vacuum(2), Mode::Phonon).unwrap();
        assert_eq!(ph.cov(), &(DMatrix::identity(2, 2) * 0.5));
    }

    #[test]
    fn stokes_at_zero_time_is_delta() {
        let p = ModelParams::new(1.0, 0.5, 0.2, Beta::Finite(1.0)).unwrap();
        let s = initial_state(&p);
        for d in [stokes_distribution_hermite(&s, 6).unwrap(), stokes_distribution_legendre(&s, 6).unwrap()] {
            assert_eq!(d.get(0), Some(1.0));
            assert!(d.probs()[1..].iter().all(|&p| p.abs() < 1e-15));
        }
        assert_eq!(choose_truncation(&marginal_state(&s, Mode::Photon).unwrap()).unwrap(), 0);
    }

    #[test]
    fn stokes_of_squeezed_vacuum_is_geometric() {
        let s = squeezed(0.5, Beta::ZeroTemperature);
        let lam = 0.5f64.tanh().powi(2);
        let h = stokes_distribution_hermite(&s, 30).unwrap();
        let l = stokes_distribution_legendre(&s, 30).unwrap();
        for n in 0..=30 {
            let expected = (1.0 - lam) * lam.powi(n as i32);
            assert!((h.get(n).unwrap() - expected).abs() < 1e-12);
            assert!((l.get(n).unwrap() - expected).abs() < 1e-12);
        }
        assert!((h.get(1).unwrap() - 0.167_948).abs() < 1e-6);
    }

    #[test]
    fn legendre_route_rejects_displaced_states() {
        let s = GaussianState::new(DVector::from_vec(vec![0.3, 0.0]), DMatrix::identity(2, 2) * 0.5).unwrap();
        assert!(matches!(single_mode_distribution_legendre(&s, 4), Err(Error::Unsupported(_))));
    }

    #[test]
    fn coherent_state_is_poissonian() {
        // alpha = (q + i p) / sqrt 2
        let (p, q) = (0.4, 1.1);
        let s = GaussianState::new(DVector::from_vec(vec![p, q]), DMatrix::identity(2, 2) * 0.5).unwrap();
        let params = build_distribution_params(&s).unwrap();
        assert!(params.y().is_none());
        let n_bar = 0.5 * (p * p + q * q);
        let d = single_mode_distribution_hermite(&s, 20).unwrap();
        let mut poisson = (-n_bar).exp();
        for n in 0..=20 {
            assert!((d.get(n).unwrap() - poisson).abs() < 1e-14, "n = {n}");
            poisson *= n_bar / (n + 1) as f64;
        }
    }

    #[test]
    fn moments_of_vacuum_and_squeezed_vacuum() {
        let m = stokes_moments(&GaussianState::vacuum(2)).unwrap();
        assert!(m.mean.abs() < 1e-15 && m.variance.abs() < 1e-15);
        let m = stokes_moments(&squeezed(0.5, Beta::ZeroTemperature)).unwrap();
        let sh2 = 0.5f64.sinh().powi(2);
        assert!((m.mean - sh2).abs() < 1e-14);
        assert!((m.variance - sh2 * (sh2 + 1.0)).abs() < 1e-14);
    }

    #[test]
    fn moments_reject_displaced_states() {
        let s = GaussianState::new(DVector::from_vec(vec![0.1, 0.0, 0.0, 0.0]), DMatrix::identity(4, 4) * 0.5).unwrap();
        assert!(matches!(stokes_moments(&s), Err(Error::Unsupported(_))));
    }

    #[test]
    fn negative_probability_is_an_error() {
        assert!(clamp_probability(3, Complex64::new(-1e-11, 0.0)).unwrap() == 0.0);
        assert!(matches!(
            clamp_probability(3, Complex64::new(-1e-6, 0.0)),
            Err(Error::NegativeProbability { index: 3, .. })
        ));
        assert!(matches!(
            clamp_probability(1, Complex64::new(0.5, 1e-6)),
            Err(Error::ComplexResidue { .. })
        ));
    }
}
