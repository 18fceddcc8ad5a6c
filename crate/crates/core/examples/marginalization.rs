// Reduced photon state by crossing out phonon rows and columns, by the
// Schur complement of the inverse dispersion matrix, and by the explicit
// Gaussian integral.
//
// Run with `cargo run --example marginalization`.

use raman_photostat::evolution::evolve_covariance;
use raman_photostat::linalg::{inverse, max_abs_diff, select_rows_cols};
use raman_photostat::model::{initial_state, Beta, ModelParams, Mode};
use raman_photostat::photostat::{gaussian_integral_reduce, marginal_state, marginal_state_schur};

fn main() {
    let params = ModelParams::new(1.0, 0.5, 0.4, Beta::Finite(0.8)).expect("valid parameters");
    let state = evolve_covariance(&initial_state(&params), &params, 1.3).expect("evolution");
    println!("sigma(t) =\n{:.6}", state.cov());

    let crossed = marginal_state(&state, Mode::Photon).expect("crossing out");
    let schur = marginal_state_schur(&state, Mode::Photon).expect("Schur route");
    println!("photon block by crossing out:\n{:.8}", crossed.cov());
    println!("difference to Schur route: {:.2e}", max_abs_diff(crossed.cov(), schur.cov()));

    // int exp(-X A X) dy over the phonon coordinates with A = P sigma^-1 P / 2
    let a = select_rows_cols(&inverse(state.cov(), "sigma").expect("invertible"), &[0, 2, 1, 3]) * 0.5;
    let reduced = gaussian_integral_reduce(&a, 2).expect("reduction");
    println!("reduced quadratic form g =\n{:.8}", reduced.g);
    println!("integral at (p_a, q_a) = (0.3, -0.1): {:.8}", reduced.integral(&[0.3, -0.1]).expect("point"));
}
