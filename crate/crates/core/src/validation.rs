//! Cross-checks between the Gaussian formulas, the Fock-space oracle and
//! the invariants of the dynamics, reported as a pass/fail table.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::evolution::{build_symplectic, evolve_covariance, invariant_phonon_number, invariant_photon_number};
use crate::linalg::{self, CMatrix};
use crate::model::{initial_state, Beta, GaussianState, ModelParams, Mode};
use crate::oracle::{evolve_rho_auto, oracle_distribution, DEFAULT_N_MAX};
use crate::photostat::{
    build_distribution_params, choose_truncation, joint_distribution, marginal_state, stokes_distribution_hermite,
    stokes_distribution_legendre, stokes_moments,
};
use crate::propagator::{quadrature_consistency, GreenFunction};
use crate::special_fn::{HermiteParams, HermiteTable, MultiIndex};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl CheckOutcome {
    pub fn new(name: impl Into<String>, max_deviation: f64, tolerance: f64) -> Self {
        let passed = max_deviation.is_finite() && max_deviation <= tolerance;
        Self { name: name.into(), max_deviation, tolerance, passed }
    }

    fn failed(name: impl Into<String>, tolerance: f64) -> Self {
        Self { name: name.into(), max_deviation: f64::INFINITY, tolerance, passed: false }
    }
}

/// Photon frequency and phonon frequency used by the comparison grids.
pub const GRID_OMEGAS: (f64, f64) = (1.0, 0.5);
pub const GRID_BETAS: [Beta; 3] = [Beta::ZeroTemperature, Beta::Finite(2.0), Beta::Finite(1.0)];
pub const GRID_KAPPA_T: [f64; 3] = [0.1, 0.3, 0.6];
/// Fock indices compared on the joint grid.
pub const GRID_N: usize = 12;

/// `(params, t)` of the oracle comparison grid, with `t = 1` and
/// `kappa = kappa t`.
pub fn oracle_grid() -> Vec<(ModelParams, f64)> {
    GRID_BETAS
        .iter()
        .flat_map(|&b| {
            GRID_KAPPA_T
                .iter()
                .map(move |&kt| (ModelParams::new(GRID_OMEGAS.0, GRID_OMEGAS.1, kt, b).expect("valid grid point"), 1.0))
        })
        .collect()
}

/// Ten deterministic parameter points spread with a golden-ratio sequence.
pub fn sample_points() -> Vec<(ModelParams, f64)> {
    let phi = 0.618_033_988_749_894_9;
    (1..=10)
        .map(|k| {
            let u = |s: f64| (k as f64 * phi * s).fract();
            let params = ModelParams::new(
                0.2 + 2.0 * u(1.0),
                0.1 + 1.5 * u(2.0),
                0.05 + 0.6 * u(3.0),
                Beta::Finite(0.5 + 3.0 * u(5.0)),
            )
            .expect("valid sample point");
            (params, 0.2 + 1.5 * u(7.0))
        })
        .collect()
}

fn evolved(params: &ModelParams, t: f64) -> Result<GaussianState> {
    evolve_covariance(&initial_state(params), params, t)
}

/// Largest entrywise `|P_nm^gauss - P_nm^oracle|`, `n, m <= GRID_N`.
pub fn oracle_equivalence(n_max: usize) -> Result<f64> {
    let devs = oracle_grid()
        .par_iter()
        .map(|(p, t)| {
            let gauss = joint_distribution(&evolved(p, *t)?, GRID_N)?;
            let oracle = oracle_distribution(&evolve_rho_auto(p, *t, n_max)?);
            let mut worst = 0.0f64;
            for n in 0..=GRID_N {
                for m in 0..=GRID_N {
                    worst = worst.max((gauss.joint(n, m).unwrap() - oracle.joint(n, m).unwrap()).abs());
                }
            }
            Ok(worst)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(devs.into_iter().fold(0.0, f64::max))
}

/// Largest relative difference between the Hermite and Legendre routes
/// over `P_n > 1e-12`, `n <= 20`.
pub fn route_equality(points: &[(ModelParams, f64)]) -> Result<f64> {
    let mut worst = 0.0f64;
    for (p, t) in points {
        let s = evolved(p, *t)?;
        let h = stokes_distribution_hermite(&s, 20)?;
        let l = stokes_distribution_legendre(&s, 20)?;
        for (a, b) in h.probs().iter().zip(l.probs()) {
            if *a > 1e-12 {
                worst = worst.max((a - b).abs() / a);
            }
        }
    }
    Ok(worst)
}

/// `(max |sum_m P_nm - P_n|, max sum-rule defect)` for `n <= GRID_N`.
///
/// The sum rule compares `P~_0 H~_{nn} / n!` with
/// `P_0 sum_m H_{nmnm} / (n! m!)` using raw Hermite values; the phonon sum
/// runs to `m_max`.
pub fn marginal_consistency(points: &[(ModelParams, f64)], m_max: usize) -> Result<(f64, f64)> {
    let mut worst_marginal = 0.0f64;
    let mut worst_rule = 0.0f64;
    for (p, t) in points {
        let s = evolved(p, *t)?;
        let full = build_distribution_params(&s)?;
        let table = HermiteTable::build(&full.hermite_params()?, &MultiIndex(vec![GRID_N, m_max, GRID_N, m_max]))?;
        let photon = stokes_distribution_hermite(&s, GRID_N)?;

        let sub = build_distribution_params(&marginal_state(&s, Mode::Photon)?)?;
        let sub_table = HermiteTable::build(&sub.hermite_params()?, &MultiIndex(vec![GRID_N, GRID_N]))?;
        for n in 0..=GRID_N {
            let summed: f64 = (0..=m_max).map(|m| (table.normalized(&[n, m, n, m]).unwrap() * full.p0()).re).sum();
            worst_marginal = worst_marginal.max((summed - photon.get(n).unwrap()).abs());

            let ln_nf = crate::special_fn::ln_factorial(n);
            let lhs = sub.p0() * sub_table.scaled(&[n, n])?.value()?.re / ln_nf.exp();
            let rhs: f64 = (0..=m_max)
                .map(|m| {
                    let raw = table.scaled(&[n, m, n, m]).and_then(|h| h.value()).unwrap().re;
                    full.p0() * raw / (ln_nf + crate::special_fn::ln_factorial(m)).exp()
                })
                .sum();
            worst_rule = worst_rule.max((lhs - rhs).abs());
        }
    }
    Ok((worst_marginal, worst_rule))
}

/// Closed-form anchors at `beta = inf, kappa t = 0.5`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnchorDeviations {
    pub routes: f64,
    pub oracle: f64,
    pub thermal_mean: f64,
}

pub fn closed_form_anchors() -> Result<AnchorDeviations> {
    let kt: f64 = 0.5;
    let p = ModelParams::new(GRID_OMEGAS.0, GRID_OMEGAS.1, kt, Beta::ZeroTemperature)?;
    let s = evolved(&p, 1.0)?;
    let p0 = 1.0 / kt.cosh().powi(2);
    let ratio = kt.tanh().powi(2);
    let mean = kt.sinh().powi(2);
    let exact: Vec<f64> = (0..=20).map(|n| p0 * ratio.powi(n)).collect();

    let mut routes = 0.0f64;
    for d in [stokes_distribution_hermite(&s, 20)?, stokes_distribution_legendre(&s, 20)?] {
        for (a, b) in d.probs().iter().zip(&exact) {
            routes = routes.max((a - b).abs());
        }
        routes = routes.max((d.probs()[1] / d.probs()[0] - ratio).abs());
    }
    routes = routes.max((stokes_moments(&s)?.mean - mean).abs());

    let rho = evolve_rho_auto(&p, 1.0, DEFAULT_N_MAX)?;
    let photon = oracle_distribution(&rho).marginal(Mode::Photon).expect("joint layout");
    let mut oracle = 0.0f64;
    for (a, b) in photon.probs().iter().zip(&exact) {
        oracle = oracle.max((a - b).abs());
    }
    oracle = oracle.max((photon.moments().expect("marginal").0 - mean).abs());

    let thermal = ModelParams::new(GRID_OMEGAS.0, GRID_OMEGAS.1, kt, Beta::Finite(1.0))?;
    let n_b = Beta::Finite(1.0).thermal_occupation();
    let thermal_mean = (stokes_moments(&evolved(&thermal, 1.0)?)?.mean - (n_b + 1.0) * mean).abs();
    Ok(AnchorDeviations { routes, oracle, thermal_mean })
}

/// Largest `|Lambda^T J Lambda - J|` over the given points.
pub fn symplectic_defect(points: &[(ModelParams, f64)]) -> Result<f64> {
    points
        .iter()
        .map(|(p, t)| build_symplectic(p, *t).map(|m| m.symplectic_defect()))
        .try_fold(0.0f64, |acc, d| d.map(|d| acc.max(d)))
}

/// Variation of `<N_a>`, `<N_b>`, their difference and `det sigma` along
/// `times`, maximized over the given parameters.
pub fn invariant_drift(points: &[(ModelParams, f64)], times: &[f64]) -> Result<f64> {
    let mut worst = 0.0f64;
    for (p, _) in points {
        let s0 = initial_state(p);
        let na0 = invariant_photon_number(&s0, p, 0.0)?;
        let nb0 = invariant_phonon_number(&s0, p, 0.0)?;
        let det0 = s0.cov().determinant();
        for &t in times {
            let s = evolve_covariance(&s0, p, t)?;
            let na = invariant_photon_number(&s, p, t)?;
            let nb = invariant_phonon_number(&s, p, t)?;
            worst = worst
                .max((na - na0).abs())
                .max((nb - nb0).abs())
                .max(((na - nb) - (na0 - nb0)).abs())
                .max((s.cov().determinant() - det0).abs());
        }
    }
    Ok(worst)
}

/// Largest `1 - sum P_n` at the automatically chosen truncation.
pub fn normalization_deficit(points: &[(ModelParams, f64)]) -> Result<f64> {
    let mut worst = 0.0f64;
    for (p, t) in points {
        let photon = marginal_state(&evolved(p, *t)?, Mode::Photon)?;
        let n_max = choose_truncation(&photon)?;
        let d = stokes_distribution_hermite(&evolved(p, *t)?, n_max)?;
        worst = worst.max((1.0 - d.total()).abs());
    }
    Ok(worst)
}

/// Largest relative deviation of `H_kk^{[[0, r], [r, 0]]}(0)` from
/// `(-r)^k k!`, `k <= 10`.
pub fn off_diagonal_hermite(r: f64) -> Result<f64> {
    let c = |x: f64| Complex64::new(x, 0.0);
    let mat = CMatrix::from_row_slice(2, 2, &[c(0.0), c(r), c(r), c(0.0)]);
    let table = HermiteTable::build(&HermiteParams::at_origin(mat)?, &MultiIndex(vec![10, 10]))?;
    let mut worst = 0.0f64;
    for k in 0..=10usize {
        let expected = (-r).powi(k as i32) * crate::special_fn::ln_factorial(k).exp();
        worst = worst.max((table.value(&[k, k])? - expected).norm() / expected.abs());
    }
    Ok(worst)
}

/// Propagator checks: quadrature covariance deviation, quadratic-form
/// asymmetry, and whether a known caustic is detected.
pub fn propagator_checks() -> Result<(f64, f64, bool)> {
    let p = ModelParams::new(1.0, 0.5, 0.2, Beta::ZeroTemperature)?;
    let (dev, _) = quadrature_consistency(&p, 1.0)?;
    let g = GreenFunction::new(&p, 1.0)?;
    let asym = linalg::asymmetry(&g.exponent_hessian()).max(g.symmetry_defect());
    let free = ModelParams::new(1.0, 0.5, 0.0, Beta::ZeroTemperature)?;
    let caustic = matches!(GreenFunction::new(&free, std::f64::consts::PI), Err(crate::Error::Caustic { .. }));
    Ok((dev, asym, caustic))
}

fn outcome(name: &str, tol: f64, value: Result<f64>) -> CheckOutcome {
    match value {
        Ok(v) => CheckOutcome::new(name, v, tol),
        Err(_) => CheckOutcome::failed(name, tol),
    }
}

/// Full suite used by the `validate` command.
pub fn run_validation(n_max: usize) -> Vec<CheckOutcome> {
    let points = sample_points();
    let times: Vec<f64> = (0..=20).map(|k| 0.25 * k as f64).collect();
    let mut out = vec![
        outcome("oracle-equivalence", 5e-7, oracle_equivalence(n_max)),
        outcome("route-equality", 1e-8, route_equality(&points)),
    ];
    match marginal_consistency(&points, 60) {
        Ok((m, r)) => {
            out.push(CheckOutcome::new("marginal-consistency", m, 1e-7));
            out.push(CheckOutcome::new("hermite-sum-rule", r, 1e-8));
        }
        Err(_) => {
            out.push(CheckOutcome::failed("marginal-consistency", 1e-7));
            out.push(CheckOutcome::failed("hermite-sum-rule", 1e-8));
        }
    }
    match closed_form_anchors() {
        Ok(a) => {
            out.push(CheckOutcome::new("anchors-routes", a.routes, 1e-9));
            out.push(CheckOutcome::new("anchors-oracle", a.oracle, 5e-7));
            out.push(CheckOutcome::new("anchors-thermal-mean", a.thermal_mean, 1e-7));
        }
        Err(_) => {
            for (n, t) in [("anchors-routes", 1e-9), ("anchors-oracle", 5e-7), ("anchors-thermal-mean", 1e-7)] {
                out.push(CheckOutcome::failed(n, t));
            }
        }
    }
    out.push(outcome("symplectic", 1e-10, symplectic_defect(&points)));
    out.push(outcome("invariants", 1e-9, invariant_drift(&points, &times)));
    out.push(outcome("normalization", 1e-6, normalization_deficit(&points)));
    out.push(outcome("hermite-off-diagonal", 1e-12, off_diagonal_hermite(0.6)));
    match propagator_checks() {
        Ok((dev, asym, caustic)) => {
            out.push(CheckOutcome::new("propagator-quadrature", dev, 1e-4));
            out.push(CheckOutcome::new("propagator-symmetry", asym, 1e-9));
            out.push(CheckOutcome::new("propagator-caustic", if caustic { 0.0 } else { 1.0 }, 0.0));
        }
        Err(_) => {
            for (n, t) in [("propagator-quadrature", 1e-4), ("propagator-symmetry", 1e-9), ("propagator-caustic", 0.0)] {
                out.push(CheckOutcome::failed(n, t));
            }
        }
    }
    out
}

/// Summary of the invariant checks at one `(params, t)`, attached to CLI
/// JSON output.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InvariantReport {
    pub symplectic_defect: f64,
    pub photon_invariant_drift: f64,
    pub phonon_invariant_drift: f64,
    pub uncertainty_min_eigenvalue: f64,
}

pub fn invariant_report(params: &ModelParams, t: f64) -> Result<InvariantReport> {
    let s0 = initial_state(params);
    let s = evolve_covariance(&s0, params, t)?;
    Ok(InvariantReport {
        symplectic_defect: build_symplectic(params, t)?.symplectic_defect(),
        photon_invariant_drift: (invariant_photon_number(&s, params, t)? - invariant_photon_number(&s0, params, 0.0)?).abs(),
        phonon_invariant_drift: (invariant_phonon_number(&s, params, t)? - invariant_phonon_number(&s0, params, 0.0)?).abs(),
        uncertainty_min_eigenvalue: s.uncertainty_min_eigenvalue(),
    })
}
