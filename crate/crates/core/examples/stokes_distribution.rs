// Stokes-photon number distribution by the two-variable Hermite route and
// the Legendre route, with mean and variance.
//
// Run with `cargo run --example stokes_distribution`.

use raman_photostat::evolution::evolve_covariance;
use raman_photostat::model::{initial_state, Beta, ModelParams, Mode};
use raman_photostat::photostat::{
    choose_truncation, marginal_state, stokes_distribution_hermite, stokes_distribution_legendre, stokes_moments,
};

fn main() {
    for beta in [Beta::ZeroTemperature, Beta::Finite(1.0)] {
        let params = ModelParams::new(1.0, 0.5, 0.5, beta).expect("valid parameters");
        let state = evolve_covariance(&initial_state(&params), &params, 1.0).expect("evolution");
        let n_max = choose_truncation(&marginal_state(&state, Mode::Photon).expect("marginal")).expect("truncation");
        let hermite = stokes_distribution_hermite(&state, n_max).expect("Hermite route");
        let legendre = stokes_distribution_legendre(&state, n_max).expect("Legendre route");
        let moments = stokes_moments(&state).expect("moments");

        println!("beta = {beta}, kappa t = 0.5, n_max = {n_max}, tail <= {:.1e}", hermite.tail_bound());
        for n in 0..=n_max.min(8) {
            let (h, l) = (hermite.get(n).unwrap(), legendre.get(n).unwrap());
            println!("  P_{n:<2} = {h:.10}  (Legendre {l:.10})");
        }
        println!("  mean = {:.6}, variance = {:.6}, sum = {:.10}\n", moments.mean, moments.variance, hermite.total());
    }
}
