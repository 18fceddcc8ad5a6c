// Linear and quadratic integrals of motion along a trajectory.
//
// Run with `cargo run --example integrals_of_motion`.

use raman_photostat::evolution::{build_symplectic, evolve_covariance, invariant_phonon_number, invariant_photon_number};
use raman_photostat::model::{initial_state, Beta, ModelParams};

fn main() {
    let params = ModelParams::new(1.0, 0.5, 0.2, Beta::Finite(1.0)).expect("valid parameters");
    let state0 = initial_state(&params);
    let det0 = state0.cov().determinant();

    println!("{:>5} {:>12} {:>12} {:>12} {:>12} {:>12}", "t", "<n_a>", "N_a inv", "N_b inv", "det sigma", "symp defect");
    for k in 0..=8 {
        let t = 0.5 * k as f64;
        let map = build_symplectic(&params, t).expect("symplectic map");
        let state = evolve_covariance(&state0, &params, t).expect("evolution");
        let n_a = 0.5 * (state.cov()[(0, 0)] + state.cov()[(2, 2)] - 1.0);
        let inv_a = invariant_photon_number(&state, &params, t).expect("invariant");
        let inv_b = invariant_phonon_number(&state, &params, t).expect("invariant");
        println!(
            "{t:>5.2} {n_a:>12.6} {inv_a:>12.2e} {inv_b:>12.6} {:>12.6} {:>12.2e}",
            state.cov().determinant(),
            map.symplectic_defect()
        );
        assert!((state.cov().determinant() - det0).abs() < 1e-9);
    }
    println!("Lambda(1) =\n{:.6}", build_symplectic(&params, 1.0).expect("symplectic map").matrix());
}
