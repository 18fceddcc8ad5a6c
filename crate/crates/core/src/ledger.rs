//! Printed closed forms versus computed values at a reference point.
//!
//! Each entry evaluates a transcription of a published closed-form
//! expression and the value obtained from the integrals of motion, and
//! flags agreement. Shorthand used below: `ch = cosh kt`, `sh = sinh kt`,
//! `cs = cos ws t`, `ss = sin ws t`, `cb = cos w31 t`, `sb = sin w31 t`,
//! `C = coth(beta/2)`, `T = tanh(beta/2)`.

use nalgebra::{DMatrix, Matrix2};
use serde::Serialize;

use crate::error::Result;
use crate::evolution::{build_symplectic, evolve_covariance};
use crate::linalg;
use crate::model::{initial_state, Beta, ModelParams};
use crate::photostat::{marginal_state, stokes_moments};
use crate::model::Mode;
use crate::propagator::PropagatorBlocks;

pub const LEDGER_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LedgerEntry {
    pub group: &'static str,
    pub entry: String,
    pub printed: f64,
    pub computed: f64,
    pub abs_diff: f64,
    pub agrees: bool,
}

impl LedgerEntry {
    fn new(group: &'static str, entry: impl Into<String>, printed: f64, computed: f64) -> Self {
        let abs_diff = (printed - computed).abs();
        Self { group, entry: entry.into(), printed, computed, abs_diff, agrees: abs_diff <= LEDGER_TOL }
    }
}

/// `(omega_s, omega_31, kappa, beta) = (1, 0.5, 0.2, 1)` at `t = 1`.
pub fn reference_point() -> (ModelParams, f64) {
    (ModelParams::new(1.0, 0.5, 0.2, Beta::Finite(1.0)).expect("valid reference parameters"), 1.0)
}

const NAMES: [&str; 4] = ["pa", "pb", "qa", "qb"];

struct Trig {
    ch: f64,
    sh: f64,
    cs: f64,
    ss: f64,
    cb: f64,
    sb: f64,
    coth: f64,
    tanh: f64,
    s2k: f64,
    ws_t: f64,
    wb_t: f64,
}

impl Trig {
    fn new(p: &ModelParams, t: f64) -> Self {
        let kt = p.kappa() * t;
        let (ws_t, wb_t) = (p.omega_s() * t, p.omega_31() * t);
        Self {
            ch: kt.cosh(),
            sh: kt.sinh(),
            cs: ws_t.cos(),
            ss: ws_t.sin(),
            cb: wb_t.cos(),
            sb: wb_t.sin(),
            coth: p.beta().coth_half(),
            tanh: p.beta().tanh_half(),
            s2k: (2.0 * kt).sinh(),
            ws_t,
            wb_t,
        }
    }
}

fn printed_quadrature_map(g: &Trig) -> DMatrix<f64> {
    let Trig { ch, sh, cs, ss, cb, sb, .. } = *g;
    DMatrix::from_row_slice(4, 4, &[
        ch * cs, -sh * sb, ch * ss, sh * cb,
        -sh * ss, ch * cb, sh * cs, ch * sb,
        -ch * cs, -sh * cb, ch * cs, sh * sb,
        -sh * cs, -ch * cb, sh * ss, ch * cb,
    ])
}

fn printed_covariance(g: &Trig, p: &ModelParams, t: f64) -> DMatrix<f64> {
    let Trig { ch, sh, cs, ss, cb, sb, coth: c, s2k, ws_t, wb_t, .. } = *g;
    let (ch2, sh2) = (ch * ch, sh * sh);
    let wl_t = p.omega_l() * t;
    let pa2 = 0.5 * (ch2 + c * sh2);
    let pb2 = 0.5 * (sh2 + c * ch2);
    let papb = 0.25 * (1.0 + c) * s2k * wl_t.sin();
    let qa2 = ch2 * cs + 0.5 * sh2 * c;
    let qb2 = 0.5 * sh2 + ch2 * cb * cb * c;
    let qaqb = 0.25 * s2k * (cs * (cb - sb) + c * cb * (cs - ss));
    let paqa = 0.5 * sh2 * (2.0 * ws_t).sin() * c + 0.5 * ch2 * cs * (cs - ss);
    let pbqb = 0.5 * sh2 * (2.0 * wb_t).sin() + 0.5 * ch2 * c * cb * (cb - sb);
    let paqb = 0.25 * s2k * ((ws_t - wb_t).cos() + cb * c * (ss - cs));
    let pbqa = 0.25 * s2k * ((ws_t - wb_t).cos() * c + cs * (sb - cb));
    DMatrix::from_row_slice(4, 4, &[
        pa2, papb, paqa, paqb,
        papb, pb2, pbqa, pbqb,
        paqa, pbqa, qa2, qaqb,
        paqb, pbqb, qaqb, qb2,
    ])
}

fn printed_inverse_covariance(g: &Trig) -> DMatrix<f64> {
    let Trig { ch, sh, cs, ss, cb, sb, tanh: th, s2k, ws_t, wb_t, .. } = *g;
    let (ch2, sh2) = (ch * ch, sh * sh);
    let pa2 = 4.0 * ch2 * cs * cs + 2.0 * th * sh2;
    let pb2 = 4.0 * th * ch2 * cb * cb + 2.0 * sh2;
    let papb = s2k * (cs * (cb - sb) + cb * th * (cs - ss));
    let paqa = 2.0 * ch2 * cs * (ss - cs) - 2.0 * th * sh2 * (2.0 * ws_t).sin();
    // the printed sine argument lacks the time factor; read as w31 t
    let paqb = s2k * (cs * cb * (1.0 - th) - sb * (th * ss + cs));
    let pbqa = s2k * (cb * cs * (th - 1.0) - ss * (sb + th * cb));
    let pbqb = -2.0 * sh2 * (2.0 * wb_t).sin() + th * ch2 * ((2.0 * wb_t).sin() - 2.0 * cb * cb);
    let qa2 = 2.0 * (ch2 + th * sh2);
    let qb2 = 2.0 * (sh2 + th * ch2);
    let qaqb = s2k * (ws_t + wb_t).sin() * (1.0 + th);
    DMatrix::from_row_slice(4, 4, &[
        pa2, papb, paqa, paqb,
        papb, pb2, pbqa, pbqb,
        paqa, pbqa, qa2, qaqb,
        paqb, pbqb, qaqb, qb2,
    ])
}

/// Printed photon-block entries `(s11, s22, s12)` evaluated with the given
/// inverse dispersion matrix.
fn printed_photon_inverse(inv: &DMatrix<f64>) -> (f64, f64, f64) {
    let (pa, pb, qa, qb) = (0, 1, 2, 3);
    let s = |i: usize, j: usize| inv[(i, j)];
    let den = 2.0 * (s(pb, pb) * s(qb, qb) - s(pb, qb).powi(2));
    let s11 = -s(pa, pa)
        - (s(qb, qb) * s(pa, pb).powi(2) + s(pb, pb) * s(pa, qb).powi(2) - 2.0 * s(pa, pb) * s(pa, qb) * s(pb, qb)) / den;
    let s22 = -s(qa, qa)
        - (s(qb, qb) * s(pb, pa).powi(2) + s(pb, pb) * s(qa, qb).powi(2) - 2.0 * s(qa, qb) * s(pb, qa) * s(pb, qb)) / den;
    let s12 = -s(pa, qa)
        - (s(qb, qb) * s(pa, pb) * s(pb, qa) + s(pb, pb) * s(pa, qb) * s(qa, qb)
            - s(pa, qb) * s(pb, qa) * s(pb, qb)
            - s(pa, pb) * s(pb, qb) * s(qa, qb))
            / den;
    (s11, s22, s12)
}

fn printed_mean(g: &Trig) -> f64 {
    let Trig { ch, sh, cs, coth: c, .. } = *g;
    0.5 * (ch * ch * (0.5 + cs * cs) + sh * sh * c - 1.0)
}

fn printed_variance(g: &Trig) -> f64 {
    let Trig { ch, sh, cs, ss, coth: c, ws_t, s2k, .. } = *g;
    let s2w = (2.0 * ws_t).sin();
    0.5 * ch.powi(4) * (0.25 + cs.powi(4) + cs * cs * (0.5 - ss))
        + 0.25 * sh.powi(4) * c * (1.0 + s2w * s2w)
        + 0.5 * sh * sh * s2w * c
        + 0.125 * s2k * s2k * c * (0.5 + cs * cs)
        - 0.5 * ch * ch * cs * (cs - ss)
        - 0.25
}

fn printed_blocks(g: &Trig) -> [Matrix2<f64>; 4] {
    let Trig { ch, sh, cs, ss, cb, sb, .. } = *g;
    [
        Matrix2::new(ch * cs, -sh * sb, -sh * ss, ch * cb),
        Matrix2::new(ch * ss, sh * cb, sh * cs, ch * sb),
        Matrix2::new(-ch * cs, -sh * cb, -sh * cs, -ch * cb),
        Matrix2::new(ch * cs, sh * sb, sh * ss, ch * cb),
    ]
}

fn matrix_entries(out: &mut Vec<LedgerEntry>, group: &'static str, label: &str, printed: &DMatrix<f64>, computed: &DMatrix<f64>, upper: bool) {
    for i in 0..4 {
        for j in 0..4 {
            if upper && j < i {
                continue;
            }
            let name = if upper { format!("{label}_{}_{}", NAMES[i], NAMES[j]) } else { format!("{label}[{},{}]", i + 1, j + 1) };
            out.push(LedgerEntry::new(group, name, printed[(i, j)], computed[(i, j)]));
        }
    }
}

/// All ledger entries at `(params, t)`.
pub fn build_ledger(params: &ModelParams, t: f64) -> Result<Vec<LedgerEntry>> {
    let g = Trig::new(params, t);
    let mut out = Vec::new();

    let map = build_symplectic(params, t)?;
    let lambda = map.matrix();
    matrix_entries(&mut out, "quadrature-map", "Lambda", &printed_quadrature_map(&g), lambda, false);

    let state0 = initial_state(params);
    let state = evolve_covariance(&state0, params, t)?;
    let inv_lambda = map.inverse()?;
    let sx = linalg::block_swap(2);
    let sigma_with_swaps = &inv_lambda * state0.cov() * &sx * lambda.transpose() * &sx;
    matrix_entries(&mut out, "covariance-map", "sigma", &sigma_with_swaps, state.cov(), true);

    matrix_entries(&mut out, "covariance", "sigma", &printed_covariance(&g, params, t), state.cov(), true);

    let inv = linalg::inverse(state.cov(), "dispersion matrix")?;
    matrix_entries(&mut out, "inverse-covariance", "inv_sigma", &printed_inverse_covariance(&g), &inv, true);

    let photon = marginal_state(&state, Mode::Photon)?;
    let photon_inv = linalg::inverse(photon.cov(), "photon dispersion")?;
    let (s11, s22, s12) = printed_photon_inverse(&inv);
    out.push(LedgerEntry::new("photon-inverse-covariance", "s11", s11, photon_inv[(0, 0)]));
    out.push(LedgerEntry::new("photon-inverse-covariance", "s22", s22, photon_inv[(1, 1)]));
    out.push(LedgerEntry::new("photon-inverse-covariance", "s12", s12, photon_inv[(0, 1)]));

    let moments = stokes_moments(&state)?;
    let quad_mean = 0.5 * (state.cov()[(0, 0)] + state.cov()[(2, 2)] - 1.0);
    out.push(LedgerEntry::new("photon-mean", "mean_quadrature_form", quad_mean, moments.mean));
    out.push(LedgerEntry::new("photon-mean", "mean_explicit_form", printed_mean(&g), moments.mean));
    out.push(LedgerEntry::new("photon-variance", "variance", printed_variance(&g), moments.variance));

    let blocks = PropagatorBlocks::from_map(&map);
    let computed = [blocks.lambda1, blocks.lambda2, blocks.lambda3, blocks.lambda4];
    for (k, (pb, cb)) in printed_blocks(&g).iter().zip(computed.iter()).enumerate() {
        for i in 0..2 {
            for j in 0..2 {
                out.push(LedgerEntry::new("propagator-blocks", format!("lambda{}[{},{}]", k + 1, i + 1, j + 1), pb[(i, j)], cb[(i, j)]));
            }
        }
    }
    Ok(out)
}
