//! Model parameters, Gaussian states and the initial photon-vacuum /
//! thermal-phonon state.
//!
//! Units are dimensionless with hbar = 1. Phase-space ordering is
//! `(p_a, p_b, q_a, q_b)` where `a` is the Stokes photon and `b` the phonon.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg;

/// Tolerance used when checking the generalized uncertainty relation.
pub const UNCERTAINTY_TOL: f64 = 1e-9;
/// Tolerance on the purity bound `det(sigma) >= 4^-N`.
pub const DET_BOUND_TOL: f64 = 1e-10;

/// Inverse temperature `beta = omega_31 / T`.
///
/// Zero temperature is its own variant so that `coth(beta/2) = 1` exactly.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Beta {
    Finite(f64),
    ZeroTemperature,
}

impl Beta {
    pub fn new(beta: f64) -> Result<Self> {
        if beta == f64::INFINITY {
            Ok(Beta::ZeroTemperature)
        } else if beta.is_finite() && beta > 0.0 {
            Ok(Beta::Finite(beta))
        } else {
            Err(Error::Domain(format!(
                "inverse temperature must be positive, got {beta}"
            )))
        }
    }

    /// Bose-Einstein occupation `1 / (e^beta - 1)`.
    pub fn thermal_occupation(self) -> f64 {
        match self {
            Beta::Finite(b) => 1.0 / b.exp_m1(),
            Beta::ZeroTemperature => 0.0,
        }
    }

    /// `coth(beta/2) = 2 n + 1`.
    pub fn coth_half(self) -> f64 {
        match self {
            Beta::Finite(b) => 1.0 + 2.0 / b.exp_m1(),
            Beta::ZeroTemperature => 1.0,
        }
    }

    /// `tanh(beta/2)`.
    pub fn tanh_half(self) -> f64 {
        match self {
            Beta::Finite(b) => (0.5 * b).tanh(),
            Beta::ZeroTemperature => 1.0,
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Beta::Finite(b) => b,
            Beta::ZeroTemperature => f64::INFINITY,
        }
    }
}

impl fmt::Display for Beta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Beta::Finite(b) => write!(f, "{b}"),
            Beta::ZeroTemperature => f.write_str("inf"),
        }
    }
}

impl FromStr for Beta {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "+inf" | "infinity" => Ok(Beta::ZeroTemperature),
            other => {
                let v: f64 = other
                    .parse()
                    .map_err(|_| Error::Domain(format!("cannot parse beta from `{s}`")))?;
                Beta::new(v)
            }
        }
    }
}

impl Serialize for Beta {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Beta::Finite(b) => serializer.serialize_f64(*b),
            Beta::ZeroTemperature => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Beta {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        let parsed = match Raw::deserialize(deserializer)? {
            Raw::Num(v) => Beta::new(v),
            Raw::Text(s) => s.parse(),
        };
        parsed.map_err(serde::de::Error::custom)
    }
}

/// Bose-Einstein mean occupation for a raw inverse temperature.
///
/// `f64::INFINITY` is accepted as the zero-temperature value.
pub fn mean_thermal_occupation(beta: f64) -> Result<f64> {
    Beta::new(beta).map(Beta::thermal_occupation)
}

/// Stokes frequency, phonon frequency, coupling and phonon temperature.
///
/// The laser frequency is not stored: resonance fixes it to
/// `omega_s + omega_31`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    omega_s: f64,
    omega_31: f64,
    kappa: f64,
    beta: Beta,
}

impl ModelParams {
    pub fn new(omega_s: f64, omega_31: f64, kappa: f64, beta: Beta) -> Result<Self> {
        for (name, v) in [("omega_s", omega_s), ("omega_31", omega_31), ("kappa", kappa)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Domain(format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        if let Beta::Finite(b) = beta {
            Beta::new(b)?;
        }
        Ok(Self { omega_s, omega_31, kappa, beta })
    }

    pub fn omega_s(&self) -> f64 {
        self.omega_s
    }

    pub fn omega_31(&self) -> f64 {
        self.omega_31
    }

    /// Laser frequency at exact resonance.
    pub fn omega_l(&self) -> f64 {
        self.omega_s + self.omega_31
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn beta(&self) -> Beta {
        self.beta
    }

    pub fn with_kappa(self, kappa: f64) -> Result<Self> {
        Self::new(self.omega_s, self.omega_31, kappa, self.beta)
    }

    pub fn with_beta(self, beta: Beta) -> Result<Self> {
        Self::new(self.omega_s, self.omega_31, self.kappa, beta)
    }
}

/// One of the two Raman modes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Stokes photon, mode `a`.
    Photon,
    /// Phonon, mode `b`.
    Phonon,
}

impl Mode {
    pub fn index(self) -> usize {
        match self {
            Mode::Photon => 0,
            Mode::Phonon => 1,
        }
    }

    pub fn other(self) -> Mode {
        match self {
            Mode::Photon => Mode::Phonon,
            Mode::Phonon => Mode::Photon,
        }
    }
}

/// Gaussian state of `N` bosonic modes: quadrature means and the symmetric
/// dispersion matrix, both in `(p_1..p_N, q_1..q_N)` ordering.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianState {
    mean: DVector<f64>,
    cov: DMatrix<f64>,
}

impl GaussianState {
    /// Symmetrizes `cov` and checks the uncertainty relation
    /// `cov + (i/2) J >= 0` together with `det(cov) >= 4^-N`.
    pub fn new(mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self> {
        let dim = cov.nrows();
        if dim == 0 || !dim.is_multiple_of(2) || cov.ncols() != dim {
            return Err(Error::Domain(format!(
                "covariance must be square with even dimension, got {}x{}",
                cov.nrows(),
                cov.ncols()
            )));
        }
        if mean.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: mean.len() });
        }
        if cov.iter().chain(mean.iter()).any(|x| !x.is_finite()) {
            return Err(Error::Domain("non-finite moment".into()));
        }
        let state = Self { mean, cov: linalg::symmetrize(&cov) };
        let min_eig = state.uncertainty_min_eigenvalue();
        if min_eig < -UNCERTAINTY_TOL {
            return Err(Error::Domain(format!(
                "uncertainty relation violated: min eigenvalue of cov + iJ/2 is {min_eig:e}"
            )));
        }
        let bound = 0.25f64.powi(state.n_modes() as i32);
        let det = state.cov.determinant();
        if det < bound - DET_BOUND_TOL {
            return Err(Error::Domain(format!("det(cov) = {det:e} below {bound:e}")));
        }
        Ok(state)
    }

    pub fn vacuum(n_modes: usize) -> Self {
        let dim = 2 * n_modes;
        Self { mean: DVector::zeros(dim), cov: DMatrix::identity(dim, dim) * 0.5 }
    }

    /// Single-mode thermal state with mean occupation `n_bar`.
    pub fn thermal(n_bar: f64) -> Result<Self> {
        Self::new(DVector::zeros(2), DMatrix::identity(2, 2) * (n_bar + 0.5))
    }

    pub fn n_modes(&self) -> usize {
        self.cov.nrows() / 2
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    pub fn is_zero_mean(&self, tol: f64) -> bool {
        self.mean.iter().all(|m| m.abs() <= tol)
    }

    /// Smallest eigenvalue of the Hermitian matrix `cov + (i/2) J`.
    pub fn uncertainty_min_eigenvalue(&self) -> f64 {
        let j = linalg::canonical_form(self.n_modes()) * 0.5;
        linalg::hermitian_min_eigenvalue(&self.cov, &j)
    }

    /// Wigner function `det(sigma)^(-1/2) exp(-(Q - <Q>) sigma^-1 (Q - <Q>) / 2)`,
    /// normalized so that its integral over phase space is `(2 pi)^N`.
    pub fn wigner(&self, point: &[f64]) -> Result<f64> {
        if point.len() != self.mean.len() {
            return Err(Error::DimensionMismatch { expected: self.mean.len(), found: point.len() });
        }
        let inv = linalg::inverse(&self.cov, "wigner covariance")?;
        let d = DVector::from_column_slice(point) - &self.mean;
        let quad = (d.transpose() * inv * &d)[(0, 0)];
        Ok((-0.5 * quad).exp() / self.cov.determinant().sqrt())
    }
}

/// Photon vacuum times a thermal phonon state: zero means and
/// `cov = diag(1/2, c/2, 1/2, c/2)` with `c = coth(beta/2)`.
pub fn initial_state(params: &ModelParams) -> GaussianState {
    let c = params.beta().coth_half();
    GaussianState {
        mean: DVector::zeros(4),
        cov: DMatrix::from_diagonal(&DVector::from_vec(vec![0.5, 0.5 * c, 0.5, 0.5 * c])),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_temperature_initial_state_is_vacuum() {
        let p = ModelParams::new(1.0, 0.5, 0.2, Beta::ZeroTemperature).unwrap();
        let s = initial_state(&p);
        assert_eq!(s.cov(), &(DMatrix::identity(4, 4) * 0.5));
        assert!(s.is_zero_mean(0.0));
    }

    #[test]
    fn unit_beta_phonon_entries() {
        let p = ModelParams::new(1.0, 0.5, 0.2, Beta::Finite(1.0)).unwrap();
        let s = initial_state(&p);
        let expected = 0.5 / (0.5f64).tanh();
        assert!((s.cov()[(1, 1)] - expected).abs() < 1e-14);
        assert!((s.cov()[(1, 1)] - 1.081_976_7).abs() < 1e-6);
        let nbar = Beta::Finite(1.0).thermal_occupation();
        assert!((nbar - 0.581_976_7).abs() < 1e-7);
        assert!((s.cov()[(1, 1)] - (nbar + 0.5)).abs() < 1e-12);
        // photon block is exactly I/2
        assert_eq!(s.cov()[(0, 0)], 0.5);
        assert_eq!(s.cov()[(2, 2)], 0.5);
    }

    #[test]
    fn thermal_occupation_values() {
        assert_eq!(mean_thermal_occupation(f64::INFINITY).unwrap(), 0.0);
        assert!((mean_thermal_occupation(1.0).unwrap() - 1.0 / (1f64.exp() - 1.0)).abs() < 1e-15);
        assert!((mean_thermal_occupation(2f64.ln()).unwrap() - 1.0).abs() < 1e-12);
        assert!(mean_thermal_occupation(0.0).is_err());
        assert!(mean_thermal_occupation(-1.0).is_err());
        assert!(mean_thermal_occupation(f64::NAN).is_err());
    }

    #[test]
    fn huge_beta_does_not_overflow() {
        let b = Beta::Finite(1e6);
        assert_eq!(b.coth_half(), 1.0);
        assert_eq!(b.thermal_occupation(), 0.0);
    }

    #[test]
    fn params_reject_negative_inputs() {
        assert!(ModelParams::new(-1.0, 0.5, 0.2, Beta::ZeroTemperature).is_err());
        assert!(ModelParams::new(1.0, 0.5, -0.2, Beta::ZeroTemperature).is_err());
        assert!(ModelParams::new(1.0, 0.5, 0.2, Beta::Finite(0.0)).is_err());
        let p = ModelParams::new(1.0, 0.5, 0.2, Beta::ZeroTemperature).unwrap();
        assert_eq!(p.omega_l(), 1.5);
    }

    #[test]
    fn beta_parses_and_serializes_infinity() {
        assert_eq!("inf".parse::<Beta>().unwrap(), Beta::ZeroTemperature);
        assert_eq!("2.5".parse::<Beta>().unwrap(), Beta::Finite(2.5));
        assert!("-1".parse::<Beta>().is_err());
        let json = serde_json::to_string(&Beta::ZeroTemperature).unwrap();
        assert_eq!(json, "\"inf\"");
        let back: Beta = serde_json::from_str("1.5").unwrap();
        assert_eq!(back, Beta::Finite(1.5));
    }

    #[test]
    fn gaussian_state_rejects_uncertainty_violation() {
        let cov = DMatrix::identity(2, 2) * 0.3;
        assert!(GaussianState::new(DVector::zeros(2), cov).is_err());
        let squeezed = DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 0.125]));
        assert!(GaussianState::new(DVector::zeros(2), squeezed).is_ok());
    }

    #[test]
    fn gaussian_state_symmetrizes() {
        let cov = DMatrix::from_row_slice(2, 2, &[1.0, 0.1 + 1e-13, 0.1, 1.0]);
        let s = GaussianState::new(DVector::zeros(2), cov).unwrap();
        assert_eq!(s.cov()[(0, 1)], s.cov()[(1, 0)]);
    }

    #[test]
    fn wigner_peak_value() {
        let s = GaussianState::vacuum(1);
        assert!((s.wigner(&[0.0, 0.0]).unwrap() - 2.0).abs() < 1e-14);
    }
}
