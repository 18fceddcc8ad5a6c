// Sweep of Stokes-photon mean, variance, vacuum probability and Fano
// factor over coupling and temperature, evaluated in parallel.
//
// Run with `cargo run --example parameter_sweep`.

use rayon::prelude::*;
use raman_photostat::evolution::evolve_covariance;
use raman_photostat::model::{initial_state, Beta, ModelParams, Mode};
use raman_photostat::photostat::{build_distribution_params, marginal_state, stokes_moments};

fn main() {
    let betas = [Beta::ZeroTemperature, Beta::Finite(2.0), Beta::Finite(1.0), Beta::Finite(0.5)];
    let kappas = [0.1, 0.3, 0.5, 0.7];
    let points: Vec<(Beta, f64)> = betas.iter().flat_map(|&b| kappas.iter().map(move |&k| (b, k))).collect();

    let rows: Vec<(Beta, f64, f64, f64, f64)> = points
        .par_iter()
        .map(|&(beta, kappa)| {
            let params = ModelParams::new(1.0, 0.5, kappa, beta).expect("valid parameters");
            let state = evolve_covariance(&initial_state(&params), &params, 1.0).expect("evolution");
            let m = stokes_moments(&state).expect("moments");
            let p0 = build_distribution_params(&marginal_state(&state, Mode::Photon).expect("marginal")).expect("params").p0();
            (beta, kappa, m.mean, m.variance, p0)
        })
        .collect();

    println!("{:>6} {:>6} {:>10} {:>10} {:>10} {:>8}", "beta", "kappa", "mean", "variance", "P_0", "Fano");
    for (beta, kappa, mean, var, p0) in rows {
        println!("{:>6} {kappa:>6.2} {mean:>10.6} {var:>10.6} {p0:>10.6} {:>8.4}", beta.to_string(), var / mean);
    }
}
