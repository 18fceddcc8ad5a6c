// Coordinate Green function: values, caustics, and propagation of the
// vacuum wavepacket by quadrature.
//
// Run with `cargo run --release --example green_function`.

use raman_photostat::evolution::evolve_covariance;
use raman_photostat::model::{Beta, GaussianState, ModelParams};
use raman_photostat::propagator::{
    propagate_vacuum_moments, GreenFunction, DEFAULT_SOURCE_GRID, DEFAULT_TARGET_GRID,
};
use raman_photostat::Error;

fn main() {
    let params = ModelParams::new(1.0, 0.5, 0.2, Beta::ZeroTemperature).expect("valid parameters");
    let g = GreenFunction::new(&params, 1.0).expect("regular time");
    println!("det lambda3 = {:.6}, Maslov index = {}", g.det_lambda3(), g.maslov_index());
    for (x1, x2) in [([0.0, 0.0], [0.0, 0.0]), ([0.5, -0.2], [0.1, 0.7])] {
        let v = g.eval(x1, x2);
        println!("G({x1:?}, {x2:?}) = {:.8} {:+.8}i", v.re, v.im);
    }

    let free = ModelParams::new(1.0, 0.5, 0.0, Beta::ZeroTemperature).expect("valid parameters");
    match GreenFunction::new(&free, std::f64::consts::PI) {
        Err(Error::Caustic { t, det }) => println!("caustic detected at t = {t:.6} (det = {det:.1e})"),
        other => println!("unexpected: {other:?}"),
    }

    let moments = propagate_vacuum_moments(&params, 1.0, DEFAULT_SOURCE_GRID, DEFAULT_TARGET_GRID).expect("quadrature");
    let expected = evolve_covariance(&GaussianState::vacuum(2), &params, 1.0).expect("evolution");
    println!("norm after propagation = {:.12}", moments.norm);
    println!("q-block from quadrature:\n{:.10}", moments.q_cov);
    println!("q-block from covariance evolution:\n{:.10}", expected.cov().view((2, 2), (2, 2)));
}
