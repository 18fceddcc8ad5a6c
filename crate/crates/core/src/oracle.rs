//! Brute-force validation in a truncated Fock space.
//!
//! The basis is `|n, m>` with `n, m <= N_max` (photon, phonon). At resonance
//! the interaction-picture Hamiltonian `H_I = kappa (a^dagger b^dagger + a b)`
//! is constant and conserves `d = n - m`, so `H_I` splits into one
//! tridiagonal block per sector `d` and the density matrix is stored as
//! blocks between sectors. Free evolution is diagonal in `|n, m>` and is
//! applied as a phase when returning to the Schrodinger picture.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::model::{Beta, ModelParams};
use crate::photostat::{Layout, NumberDistribution, Provenance};

pub const DEFAULT_N_MAX: usize = 40;
pub const MAX_N_MAX: usize = 160;
/// Largest tolerated population of the top Fock shell after evolution.
pub const LEAK_TOL: f64 = 1e-6;
/// Minimum step count for the time-ordered cross-check.
pub const MIN_TIME_STEPS: usize = 1000;

/// Sector `d = n - m` and position `k` within it.
fn sector_state(d: i64, k: usize) -> (usize, usize) {
    if d >= 0 {
        (d as usize + k, k)
    } else {
        (k, k + d.unsigned_abs() as usize)
    }
}

fn sector_len(n_max: usize, d: i64) -> usize {
    n_max + 1 - d.unsigned_abs() as usize
}

fn sector_of(n: usize, m: usize) -> (i64, usize) {
    (n as i64 - m as i64, n.min(m))
}

/// Density matrix over `|n, m>`, stored as blocks `rho[(d1, d2)]` between
/// sectors. Absent blocks are zero.
#[derive(Clone, Debug, PartialEq)]
pub struct FockDensityMatrix {
    n_max: usize,
    blocks: BTreeMap<(i64, i64), CMatrix>,
    truncation_deficit: f64,
}

impl FockDensityMatrix {
    fn empty(n_max: usize) -> Result<Self> {
        if n_max < 1 {
            return Err(Error::Domain("N_max must be >= 1".into()));
        }
        Ok(Self { n_max, blocks: BTreeMap::new(), truncation_deficit: 0.0 })
    }

    /// Diagonal density matrix from populations `p(n, m)`.
    pub fn diagonal<F: Fn(usize, usize) -> f64>(n_max: usize, p: F) -> Result<Self> {
        let mut rho = Self::empty(n_max)?;
        for d in -(n_max as i64)..=n_max as i64 {
            let len = sector_len(n_max, d);
            let diag: Vec<Complex64> = (0..len)
                .map(|k| {
                    let (n, m) = sector_state(d, k);
                    Complex64::new(p(n, m), 0.0)
                })
                .collect();
            if diag.iter().any(|z| z.re != 0.0) {
                rho.blocks.insert((d, d), CMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag)));
            }
        }
        Ok(rho)
    }

    /// Pure Fock state `|n, m><n, m|`.
    pub fn basis_state(n: usize, m: usize, n_max: usize) -> Result<Self> {
        if n > n_max || m > n_max {
            return Err(Error::Domain(format!("|{n}, {m}> outside truncation {n_max}")));
        }
        Self::diagonal(n_max, |a, b| if (a, b) == (n, m) { 1.0 } else { 0.0 })
    }

    /// Build from a dense matrix indexed by `n * (N_max + 1) + m`.
    pub fn from_dense(rho: &CMatrix, n_max: usize) -> Result<Self> {
        let dim = (n_max + 1) * (n_max + 1);
        if rho.nrows() != dim || rho.ncols() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: rho.nrows() });
        }
        let mut out = Self::empty(n_max)?;
        let nm = n_max as i64;
        for d1 in -nm..=nm {
            for d2 in -nm..=nm {
                let (l1, l2) = (sector_len(n_max, d1), sector_len(n_max, d2));
                let block = CMatrix::from_fn(l1, l2, |i, j| {
                    let (n1, m1) = sector_state(d1, i);
                    let (n2, m2) = sector_state(d2, j);
                    rho[(n1 * (n_max + 1) + m1, n2 * (n_max + 1) + m2)]
                });
                if block.iter().any(|z| z.norm() != 0.0) {
                    out.blocks.insert((d1, d2), block);
                }
            }
        }
        Ok(out)
    }

    pub fn to_dense(&self) -> CMatrix {
        let dim = (self.n_max + 1) * (self.n_max + 1);
        let mut out = CMatrix::zeros(dim, dim);
        for (&(d1, d2), block) in &self.blocks {
            for i in 0..block.nrows() {
                let (n1, m1) = sector_state(d1, i);
                for j in 0..block.ncols() {
                    let (n2, m2) = sector_state(d2, j);
                    out[(n1 * (self.n_max + 1) + m1, n2 * (self.n_max + 1) + m2)] = block[(i, j)];
                }
            }
        }
        out
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Mass dropped when the initial state was renormalized on the
    /// truncated space.
    pub fn truncation_deficit(&self) -> f64 {
        self.truncation_deficit
    }

    /// `<n1, m1| rho |n2, m2>`.
    pub fn element(&self, n1: usize, m1: usize, n2: usize, m2: usize) -> Complex64 {
        if n1.max(m1).max(n2).max(m2) > self.n_max {
            return Complex64::new(0.0, 0.0);
        }
        let (d1, k1) = sector_of(n1, m1);
        let (d2, k2) = sector_of(n2, m2);
        self.blocks.get(&(d1, d2)).map_or(Complex64::new(0.0, 0.0), |b| b[(k1, k2)])
    }

    /// `P_nm = <n, m| rho |n, m>`.
    pub fn population(&self, n: usize, m: usize) -> f64 {
        self.element(n, m, n, m).re
    }

    pub fn trace(&self) -> f64 {
        self.blocks
            .iter()
            .filter(|((a, b), _)| a == b)
            .map(|(_, blk)| blk.diagonal().iter().map(|z| z.re).sum::<f64>())
            .sum()
    }

    /// `Tr rho^2`.
    pub fn purity(&self) -> f64 {
        self.blocks
            .iter()
            .map(|(&(d1, d2), blk)| {
                let partner = self.blocks.get(&(d2, d1));
                partner.map_or(0.0, |p| blk.iter().zip(p.transpose().iter()).map(|(x, y)| (x * y).re).sum())
            })
            .sum()
    }

    /// Largest `|rho_ij - conj(rho_ji)|`.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for (&(d1, d2), blk) in &self.blocks {
            let partner = self.blocks.get(&(d2, d1));
            for i in 0..blk.nrows() {
                for j in 0..blk.ncols() {
                    let other = partner.map_or(Complex64::new(0.0, 0.0), |p| p[(j, i)].conj());
                    worst = worst.max((blk[(i, j)] - other).norm());
                }
            }
        }
        worst
    }

    /// Smallest eigenvalue. Block-diagonal states are checked sector by
    /// sector; anything else is assembled densely.
    pub fn min_eigenvalue(&self) -> f64 {
        let block_diagonal = self.blocks.keys().all(|(a, b)| a == b);
        if block_diagonal {
            self.blocks
                .values()
                .map(hermitian_min_eigenvalue)
                .fold(f64::INFINITY, f64::min)
                .min(if self.blocks.is_empty() { 0.0 } else { f64::INFINITY })
        } else {
            hermitian_min_eigenvalue(&self.to_dense())
        }
    }

    /// Population of the top shell `max(n, m) = N_max`.
    pub fn top_shell_population(&self) -> f64 {
        self.blocks
            .iter()
            .filter(|((a, b), _)| a == b)
            .map(|(_, blk)| {
                let last = blk.nrows() - 1;
                blk[(last, last)].re
            })
            .sum()
    }

    /// `<N_a>` and `<N_b>` by direct summation.
    pub fn mean_numbers(&self) -> (f64, f64) {
        let mut na = 0.0;
        let mut nb = 0.0;
        for (&(d1, d2), blk) in &self.blocks {
            if d1 != d2 {
                continue;
            }
            for k in 0..blk.nrows() {
                let (n, m) = sector_state(d1, k);
                let p = blk[(k, k)].re;
                na += n as f64 * p;
                nb += m as f64 * p;
            }
        }
        (na, nb)
    }

    /// Check Hermiticity, trace and positivity against the stated
    /// tolerances.
    pub fn validate(&self) -> Result<()> {
        let h = self.hermitian_defect();
        if h > 1e-12 {
            return Err(Error::Invariant { name: "rho Hermitian", detail: format!("defect {h:e}") });
        }
        let tr = self.trace();
        if tr > 1.0 + 1e-12 || tr < 1.0 - self.truncation_deficit - 1e-9 {
            return Err(Error::Invariant { name: "rho trace", detail: format!("trace {tr}") });
        }
        let ev = self.min_eigenvalue();
        if ev < -1e-10 {
            return Err(Error::Invariant { name: "rho positive", detail: format!("min eigenvalue {ev:e}") });
        }
        Ok(())
    }
}

fn hermitian_min_eigenvalue(m: &CMatrix) -> f64 {
    let re = m.map(|z| z.re);
    let im = m.map(|z| z.im);
    crate::linalg::hermitian_min_eigenvalue(&re, &im)
}

/// `|0><0| (x) rho_th(beta)` renormalized on `m <= N_max`.
pub fn build_initial_rho(params: &ModelParams, n_max: usize) -> Result<FockDensityMatrix> {
    let weights: Vec<f64> = match params.beta() {
        Beta::ZeroTemperature => (0..=n_max).map(|m| if m == 0 { 1.0 } else { 0.0 }).collect(),
        Beta::Finite(b) => {
            let p0 = -(-b).exp_m1();
            (0..=n_max).map(|m| p0 * (-b * m as f64).exp()).collect()
        }
    };
    let total: f64 = weights.iter().sum();
    let mut rho = FockDensityMatrix::diagonal(n_max, |n, m| if n == 0 { weights[m] / total } else { 0.0 })?;
    rho.truncation_deficit = 1.0 - total;
    Ok(rho)
}

/// `exp(-i t H_I)` restricted to sector `d`.
fn sector_propagator(n_max: usize, d: i64, kappa: f64, t: f64) -> CMatrix {
    let len = sector_len(n_max, d);
    let mut h = DMatrix::<f64>::zeros(len, len);
    for k in 0..len.saturating_sub(1) {
        let (n, m) = sector_state(d, k);
        let c = kappa * (((n + 1) * (m + 1)) as f64).sqrt();
        h[(k, k + 1)] = c;
        h[(k + 1, k)] = c;
    }
    let eig = SymmetricEigen::new(h);
    let v = eig.eigenvectors.map(|x| Complex64::new(x, 0.0));
    let phases = eig.eigenvalues.map(|e| Complex64::from_polar(1.0, -e * t));
    &v * CMatrix::from_diagonal(&phases) * v.transpose()
}

/// Evolve to time `t` in the Schrodinger picture. Fails with
/// [`Error::TruncationLeak`] when the top shell holds more than
/// [`LEAK_TOL`].
pub fn evolve_rho(rho0: &FockDensityMatrix, params: &ModelParams, t: f64) -> Result<FockDensityMatrix> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::Domain(format!("time must be finite and >= 0, got {t}")));
    }
    let n_max = rho0.n_max;
    let mut sectors: Vec<i64> = rho0.blocks.keys().flat_map(|&(a, b)| [a, b]).collect();
    sectors.sort_unstable();
    sectors.dedup();
    let props: BTreeMap<i64, CMatrix> = sectors
        .iter()
        .map(|&d| (d, sector_propagator(n_max, d, params.kappa(), t)))
        .collect();

    let (ws, w31) = (params.omega_s(), params.omega_31());
    let blocks = rho0
        .blocks
        .iter()
        .map(|(&(d1, d2), b)| {
            let mut out = &props[&d1] * b * props[&d2].adjoint();
            for i in 0..out.nrows() {
                let (n1, m1) = sector_state(d1, i);
                for j in 0..out.ncols() {
                    let (n2, m2) = sector_state(d2, j);
                    let dn = n1 as f64 - n2 as f64;
                    let dm = m1 as f64 - m2 as f64;
                    out[(i, j)] *= Complex64::from_polar(1.0, -t * (ws * dn + w31 * dm));
                }
            }
            ((d1, d2), out)
        })
        .collect();
    let rho = FockDensityMatrix { n_max, blocks, truncation_deficit: rho0.truncation_deficit };
    let leak = rho.top_shell_population();
    if leak > LEAK_TOL {
        return Err(Error::TruncationLeak { leak, n_max });
    }
    Ok(rho)
}

/// Thermal initial state evolved to `t`, doubling `N_max` from `n_max`
/// until the top-shell leak is below tolerance or [`MAX_N_MAX`] is reached.
pub fn evolve_rho_auto(params: &ModelParams, t: f64, n_max: usize) -> Result<FockDensityMatrix> {
    let mut n = n_max.max(1);
    loop {
        match evolve_rho(&build_initial_rho(params, n)?, params, t) {
            Err(Error::TruncationLeak { .. }) if n < MAX_N_MAX => n = (2 * n).min(MAX_N_MAX),
            other => return other,
        }
    }
}

/// Thermal initial states evolved over a time grid, points in parallel.
pub fn evolve_rho_grid(params: &ModelParams, times: &[f64], n_max: usize) -> Result<Vec<FockDensityMatrix>> {
    times.par_iter().map(|&t| evolve_rho_auto(params, t, n_max)).collect()
}

/// `(H rho)` for the full Hamiltonian
/// `ws a^dagger a + w31 b^dagger b + kappa (e^{-i wl t} a^dagger b^dagger + e^{i wl t} a b)`
/// on a dense density matrix.
fn apply_hamiltonian(rho: &CMatrix, n_max: usize, params: &ModelParams, t: f64) -> CMatrix {
    let side = n_max + 1;
    let idx = |n: usize, m: usize| n * side + m;
    let up = Complex64::from_polar(params.kappa(), -params.omega_l() * t);
    let down = up.conj();
    let mut out = CMatrix::zeros(rho.nrows(), rho.ncols());
    for n in 0..side {
        for m in 0..side {
            let row = idx(n, m);
            let diag = params.omega_s() * n as f64 + params.omega_31() * m as f64;
            let mut acc = rho.row(row) * Complex64::new(diag, 0.0);
            // <n, m| a^dagger b^dagger |n-1, m-1>
            if n > 0 && m > 0 {
                let c = up * ((n * m) as f64).sqrt();
                acc += rho.row(idx(n - 1, m - 1)) * c;
            }
            // <n, m| a b |n+1, m+1>
            if n < n_max && m < n_max {
                let c = down * (((n + 1) * (m + 1)) as f64).sqrt();
                acc += rho.row(idx(n + 1, m + 1)) * c;
            }
            out.row_mut(row).copy_from(&acc);
        }
    }
    out
}

/// Schrodinger-picture evolution under the explicitly time-dependent
/// Hamiltonian by classical fourth-order Runge-Kutta with `steps` steps.
pub fn evolve_rho_time_ordered(
    rho0: &FockDensityMatrix,
    params: &ModelParams,
    t: f64,
    steps: usize,
) -> Result<FockDensityMatrix> {
    if steps < MIN_TIME_STEPS {
        return Err(Error::Domain(format!("time-ordered stepping needs >= {MIN_TIME_STEPS} steps")));
    }
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::Domain(format!("time must be finite and >= 0, got {t}")));
    }
    let n_max = rho0.n_max;
    let minus_i = Complex64::new(0.0, -1.0);
    let rhs = |rho: &CMatrix, s: f64| {
        let h_rho = apply_hamiltonian(rho, n_max, params, s);
        (&h_rho - h_rho.adjoint()) * minus_i
    };
    let c = |x: f64| Complex64::new(x, 0.0);
    let h = t / steps as f64;
    let mut rho = rho0.to_dense();
    for k in 0..steps {
        let s = k as f64 * h;
        let k1 = rhs(&rho, s);
        let k2 = rhs(&(&rho + &k1 * c(0.5 * h)), s + 0.5 * h);
        let k3 = rhs(&(&rho + &k2 * c(0.5 * h)), s + 0.5 * h);
        let k4 = rhs(&(&rho + &k3 * c(h)), s + h);
        rho += (k1 + k2 * c(2.0) + k3 * c(2.0) + k4) * c(h / 6.0);
    }
    let mut out = FockDensityMatrix::from_dense(&rho, n_max)?;
    out.truncation_deficit = rho0.truncation_deficit;
    Ok(out)
}

/// Joint `P_nm` over the whole truncated space.
pub fn oracle_distribution(rho: &FockDensityMatrix) -> NumberDistribution {
    let side = rho.n_max + 1;
    let probs = (0..side * side).map(|i| rho.population(i / side, i % side).max(0.0)).collect();
    let tail = rho.top_shell_population().max(0.0) + rho.truncation_deficit.max(0.0);
    NumberDistribution::new(probs, rho.n_max, tail, Provenance::Oracle, Layout::Joint)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(ws: f64, w31: f64, k: f64, beta: Beta) -> ModelParams {
        ModelParams::new(ws, w31, k, beta).unwrap()
    }

    #[test]
    fn zero_temperature_initial_state_is_vacuum() {
        let rho = build_initial_rho(&params(1.0, 0.5, 0.2, Beta::ZeroTemperature), 5).unwrap();
        assert_eq!(rho.population(0, 0), 1.0);
        assert_eq!(rho.trace(), 1.0);
    }

    #[test]
    fn thermal_initial_state() {
        let rho = build_initial_rho(&params(1.0, 0.5, 0.2, Beta::Finite(1.0)), 30).unwrap();
        let p0 = 1.0 - (-1.0f64).exp();
        assert!((p0 - 0.632_121).abs() < 1e-6);
        assert!((rho.population(0, 0) - p0).abs() < 1e-12);
        assert!((rho.population(0, 3) / rho.population(0, 2) - (-1.0f64).exp()).abs() < 1e-14);
        assert!((rho.trace() - 1.0).abs() < 1e-15);
        assert!(rho.truncation_deficit() > 0.0 && rho.truncation_deficit() < 1e-12);
    }

    #[test]
    fn sector_indexing_round_trips() {
        for n in 0..=6 {
            for m in 0..=6 {
                let (d, k) = sector_of(n, m);
                assert_eq!(sector_state(d, k), (n, m));
                assert!(k < sector_len(6, d));
            }
        }
    }

    #[test]
    fn dense_round_trip() {
        let rho = build_initial_rho(&params(1.0, 0.5, 0.3, Beta::Finite(1.0)), 4).unwrap();
        let rho = evolve_rho(&rho, &params(1.0, 0.5, 0.3, Beta::Finite(1.0)), 0.4).unwrap_or(rho);
        let back = FockDensityMatrix::from_dense(&rho.to_dense(), 4).unwrap();
        assert_eq!(back.to_dense(), rho.to_dense());
    }

    #[test]
    fn no_coupling_keeps_populations() {
        let p = params(1.0, 0.5, 0.0, Beta::Finite(1.0));
        let rho0 = build_initial_rho(&p, 20).unwrap();
        let rho = evolve_rho(&rho0, &p, 3.0).unwrap();
        for n in 0..=20 {
            for m in 0..=20 {
                assert!((rho.population(n, m) - rho0.population(n, m)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn squeezed_vacuum_populations() {
        let p = params(1.0, 0.5, 0.5, Beta::ZeroTemperature);
        let rho = evolve_rho(&build_initial_rho(&p, 40).unwrap(), &p, 1.0).unwrap();
        let (sech2, tanh2) = (1.0 / 0.5f64.cosh().powi(2), 0.5f64.tanh().powi(2));
        for n in 0..=15 {
            assert!((rho.population(n, n) - sech2 * tanh2.powi(n as i32)).abs() < 1e-8);
            assert!(rho.population(n, n + 1).abs() < 1e-15);
        }
        assert!((rho.purity() - 1.0).abs() < 1e-9);
        rho.validate().unwrap();
    }

    #[test]
    fn fock_state_support_stays_on_sector() {
        let p = params(1.0, 0.5, 0.4, Beta::ZeroTemperature);
        let rho = evolve_rho(&FockDensityMatrix::basis_state(0, 2, 40).unwrap(), &p, 1.0).unwrap();
        for n in 0..=40 {
            for m in 0..=40 {
                if m != n + 2 {
                    assert!(rho.population(n, m).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn leak_is_reported() {
        let p = params(1.0, 0.5, 1.0, Beta::Finite(0.5));
        let err = evolve_rho(&build_initial_rho(&p, 4).unwrap(), &p, 2.0).unwrap_err();
        assert!(matches!(err, Error::TruncationLeak { n_max: 4, .. }));
    }

    #[test]
    fn auto_escalation_raises_truncation() {
        let p = params(1.0, 0.5, 1.0, Beta::Finite(1.0));
        let rho = evolve_rho_auto(&p, 1.0, 10).unwrap();
        assert!(rho.n_max() > 10);
        assert!(rho.top_shell_population() <= LEAK_TOL);
    }

    #[test]
    fn rejects_short_time_ordered_runs() {
        let p = params(1.0, 0.5, 0.2, Beta::ZeroTemperature);
        let rho0 = build_initial_rho(&p, 3).unwrap();
        assert!(evolve_rho_time_ordered(&rho0, &p, 1.0, 10).is_err());
    }

    #[test]
    fn distribution_from_vacuum() {
        let d = oracle_distribution(&FockDensityMatrix::basis_state(0, 0, 3).unwrap());
        assert_eq!(d.joint(0, 0), Some(1.0));
        assert_eq!(d.provenance(), Provenance::Oracle);
    }
}
