//! Linear integrals of motion for the resonant Raman Hamiltonian and the
//! covariance evolution they induce.
//!
//! The Bogoliubov matrix `M(t)` acts on `(a, b, a^dagger, b^dagger)`:
//!
//! ```text
//! a(t) = a e^{i ws t} cosh kt + i b^dagger e^{-i w31 t} sinh kt
//! b(t) = b e^{i w31 t} cosh kt + i a^dagger e^{-i ws t} sinh kt
//! ```
//!
//! together with the adjoint rows. The quadrature map is
//! `Lambda(t) = U M(t) U^dagger` with `Q = U (a, b, a^dagger, b^dagger)`;
//! the invariants satisfy `I(t) = Lambda(t) Q`, hence
//! `sigma(t) = Lambda^-1 sigma(0) Lambda^-T`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::model::{GaussianState, ModelParams, Mode};

/// Largest imaginary residue tolerated in `U M U^dagger`.
pub const REALNESS_TOL: f64 = 1e-10;

fn check_time(t: f64) -> Result<()> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("time must be finite and >= 0, got {t}")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BogoliubovMap {
    matrix: CMatrix,
    t: f64,
}

impl BogoliubovMap {
    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// `max |M K M^dagger - K|` with `K = diag(1, 1, -1, -1)`.
    pub fn commutator_defect(&self) -> f64 {
        let k = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(-1.0, 0.0),
        ]));
        let mkm = &self.matrix * &k * self.matrix.adjoint();
        linalg::max_abs_diff_complex(&mkm, &k)
    }
}

pub fn build_bogoliubov(params: &ModelParams, t: f64) -> Result<BogoliubovMap> {
    check_time(t)?;
    let (ch, sh) = ((params.kappa() * t).cosh(), (params.kappa() * t).sinh());
    let phase = |w: f64| Complex64::from_polar(1.0, w * t);
    let i = Complex64::i();
    let (ws, w31) = (params.omega_s(), params.omega_31());

    let mut m = CMatrix::zeros(4, 4);
    m[(0, 0)] = phase(ws) * ch;
    m[(0, 3)] = i * phase(-w31) * sh;
    m[(1, 1)] = phase(w31) * ch;
    m[(1, 2)] = i * phase(-ws) * sh;
    m[(2, 1)] = -i * phase(w31) * sh;
    m[(2, 2)] = phase(-ws) * ch;
    m[(3, 0)] = -i * phase(ws) * sh;
    m[(3, 3)] = phase(-w31) * ch;
    Ok(BogoliubovMap { matrix: m, t })
}

/// Real 4x4 map from current quadratures to their initial-time values.
#[derive(Clone, Debug, PartialEq)]
pub struct SymplecticMap {
    lambda: DMatrix<f64>,
    t: f64,
}

impl SymplecticMap {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.lambda
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// `max |Lambda^T J Lambda - J|`.
    pub fn symplectic_defect(&self) -> f64 {
        let j = linalg::canonical_form(2);
        linalg::max_abs_diff(&(self.lambda.transpose() * &j * &self.lambda), &j)
    }

    pub fn inverse(&self) -> Result<DMatrix<f64>> {
        linalg::inverse(&self.lambda, "symplectic map")
    }
}

pub fn build_symplectic(params: &ModelParams, t: f64) -> Result<SymplecticMap> {
    let m = build_bogoliubov(params, t)?;
    let u = linalg::quadrature_unitary(2);
    let lam = &u * m.matrix() * u.adjoint();
    let residue = lam.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    if residue > REALNESS_TOL {
        return Err(Error::Invariant {
            name: "real symplectic map",
            detail: format!("imaginary residue {residue:e}"),
        });
    }
    Ok(SymplecticMap { lambda: lam.map(|z| z.re), t })
}

/// Evolve a two-mode Gaussian state from time 0 to `t`.
pub fn evolve_covariance(state0: &GaussianState, params: &ModelParams, t: f64) -> Result<GaussianState> {
    if state0.n_modes() != 2 {
        return Err(Error::DimensionMismatch { expected: 4, found: state0.cov().nrows() });
    }
    let inv = build_symplectic(params, t)?.inverse()?;
    let cov = &inv * state0.cov() * inv.transpose();
    let mean = &inv * state0.mean();
    GaussianState::new(mean, cov)
}

/// `<x^dagger(t) x(t)>` for the quadratic invariant of `mode`, evaluated in
/// the state at time `t`.
///
/// The operator `x(t)` is a row of `M(t) U^dagger` applied to `Q`, so the
/// expectation is `v^* (sigma + <Q><Q>^T + (i/2) J) v`.
pub fn quadratic_invariant(state_t: &GaussianState, params: &ModelParams, t: f64, mode: Mode) -> Result<f64> {
    if state_t.n_modes() != 2 {
        return Err(Error::DimensionMismatch { expected: 4, found: state_t.cov().nrows() });
    }
    let m = build_bogoliubov(params, t)?;
    let coeffs = m.matrix() * linalg::quadrature_unitary(2).adjoint();
    let v = coeffs.row(mode.index()).transpose();

    let mu = state_t.mean();
    let second = state_t.cov() + mu * mu.transpose();
    let moments = linalg::to_complex(&second)
        + linalg::to_complex(&linalg::canonical_form(2)) * Complex64::new(0.0, 0.5);
    let value = (v.adjoint() * moments * &v)[(0, 0)];
    Ok(value.re)
}

/// `<N_a(t)>`: the initial photon number, conserved along the trajectory.
pub fn invariant_photon_number(state_t: &GaussianState, params: &ModelParams, t: f64) -> Result<f64> {
    quadratic_invariant(state_t, params, t, Mode::Photon)
}

/// `<N_b(t)>`: the initial phonon number.
pub fn invariant_phonon_number(state_t: &GaussianState, params: &ModelParams, t: f64) -> Result<f64> {
    quadratic_invariant(state_t, params, t, Mode::Phonon)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{initial_state, Beta};

    fn params(ws: f64, w31: f64, k: f64, beta: Beta) -> ModelParams {
        ModelParams::new(ws, w31, k, beta).unwrap()
    }

    #[test]
    fn bogoliubov_at_zero_time_is_identity() {
        let m = build_bogoliubov(&params(1.0, 0.5, 0.2, Beta::ZeroTemperature), 0.0).unwrap();
        assert!(linalg::max_abs_diff_complex(m.matrix(), &CMatrix::identity(4, 4)) < 1e-15);
    }

    #[test]
    fn bogoliubov_without_coupling_is_free_rotation() {
        let (ws, w31, t) = (1.3, 0.7, 2.1);
        let m = build_bogoliubov(&params(ws, w31, 0.0, Beta::ZeroTemperature), t).unwrap();
        let expected = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            Complex64::from_polar(1.0, ws * t),
            Complex64::from_polar(1.0, w31 * t),
            Complex64::from_polar(1.0, -ws * t),
            Complex64::from_polar(1.0, -w31 * t),
        ]));
        assert!(linalg::max_abs_diff_complex(m.matrix(), &expected) < 1e-15);
    }

    #[test]
    fn bogoliubov_coupling_entry_and_commutators() {
        let m = build_bogoliubov(&params(1.0, 0.5, 0.2, Beta::ZeroTemperature), 1.0).unwrap();
        assert!((m.matrix()[(0, 3)].norm() - 0.201_336_002_541_093_8).abs() < 1e-12);
        assert!(m.commutator_defect() < 1e-12);
        // (a, b^dagger) block decouples from (b, a^dagger)
        for (r, c) in [(0, 1), (0, 2), (3, 1), (3, 2), (1, 0), (1, 3), (2, 0), (2, 3)] {
            assert_eq!(m.matrix()[(r, c)], Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn symplectic_at_zero_time_is_identity() {
        let s = build_symplectic(&params(1.0, 0.5, 0.2, Beta::ZeroTemperature), 0.0).unwrap();
        assert!(linalg::max_abs_diff(s.matrix(), &DMatrix::identity(4, 4)) < 1e-15);
    }

    #[test]
    fn symplectic_qa_entry() {
        let s = build_symplectic(&params(1.0, 0.5, 0.2, Beta::ZeroTemperature), 1.0).unwrap();
        let expected = 0.2f64.cosh() * 1f64.cos();
        assert!((s.matrix()[(2, 2)] - expected).abs() < 1e-14);
        assert!((expected - 0.551_144_4).abs() < 1e-7);
        assert!(s.symplectic_defect() < 1e-12);
        assert!((s.matrix().determinant() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn negative_time_rejected() {
        assert!(build_symplectic(&params(1.0, 0.5, 0.2, Beta::ZeroTemperature), -1.0).is_err());
    }

    #[test]
    fn squeezed_vacuum_covariance() {
        let p = params(0.0, 0.0, 0.5, Beta::ZeroTemperature);
        let s = evolve_covariance(&initial_state(&p), &p, 1.0).unwrap();
        let half_cosh = 0.5 * 1f64.cosh();
        assert!((s.cov()[(0, 0)] - half_cosh).abs() < 1e-14);
        assert!((s.cov()[(2, 2)] - half_cosh).abs() < 1e-14);
        let n = 0.5 * (s.cov()[(0, 0)] + s.cov()[(2, 2)] - 1.0);
        assert!((n - 0.5f64.sinh().powi(2)).abs() < 1e-14);
    }

    #[test]
    fn free_rotation_keeps_photon_vacuum() {
        let p = params(1.0, 0.5, 0.0, Beta::Finite(1.0));
        for k in 0..10 {
            let t = 0.37 * k as f64;
            let s = evolve_covariance(&initial_state(&p), &p, t).unwrap();
            let n = 0.5 * (s.cov()[(0, 0)] + s.cov()[(2, 2)] - 1.0);
            assert!(n.abs() < 1e-14);
        }
    }

    #[test]
    fn quadratic_invariants_are_conserved() {
        let p = params(1.0, 0.5, 0.3, Beta::Finite(1.0));
        let nb = Beta::Finite(1.0).thermal_occupation();
        for k in 0..12 {
            let t = 0.25 * k as f64;
            let s = evolve_covariance(&initial_state(&p), &p, t).unwrap();
            let na_t = invariant_photon_number(&s, &p, t).unwrap();
            let nb_t = invariant_phonon_number(&s, &p, t).unwrap();
            assert!(na_t.abs() < 1e-9, "N_a = {na_t} at t = {t}");
            assert!((nb_t - nb).abs() < 1e-9);
            assert!((na_t - nb_t + nb).abs() < 1e-9);
        }
    }
}
