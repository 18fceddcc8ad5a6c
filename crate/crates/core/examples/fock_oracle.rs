// Brute-force Fock-space evolution compared with the Gaussian formula, and
// the rotating-frame shortcut compared with explicit time stepping.
//
// Run with `cargo run --example fock_oracle`.

use raman_photostat::evolution::evolve_covariance;
use raman_photostat::model::{initial_state, Beta, ModelParams};
use raman_photostat::oracle::{build_initial_rho, evolve_rho, evolve_rho_auto, evolve_rho_time_ordered, oracle_distribution};
use raman_photostat::photostat::joint_distribution;

fn main() {
    let params = ModelParams::new(1.0, 0.5, 0.3, Beta::Finite(1.0)).expect("valid parameters");
    let rho = evolve_rho_auto(&params, 1.0, 40).expect("oracle evolution");
    rho.validate().expect("valid density matrix");
    let oracle = oracle_distribution(&rho);
    let gauss = joint_distribution(&evolve_covariance(&initial_state(&params), &params, 1.0).expect("evolution"), 12)
        .expect("joint distribution");

    let mut worst = 0.0f64;
    for n in 0..=12 {
        for m in 0..=12 {
            worst = worst.max((oracle.joint(n, m).unwrap() - gauss.joint(n, m).unwrap()).abs());
        }
    }
    println!("N_max = {}, top-shell leak = {:.1e}", rho.n_max(), rho.top_shell_population());
    println!("max |P_nm oracle - P_nm Gaussian| over n, m <= 12: {worst:.2e}");
    let (na, nb) = rho.mean_numbers();
    println!("<n_a> = {na:.8}, <n_b> = {nb:.8}, purity = {:.8}", rho.purity());

    // explicit stepping under the time-dependent Hamiltonian at small N
    let cold = params.with_beta(Beta::Finite(2.0)).expect("valid parameters");
    let rho0 = build_initial_rho(&cold, 10).expect("initial state");
    let exact = evolve_rho(&rho0, &cold, 1.0).expect("rotating frame").to_dense();
    let stepped = evolve_rho_time_ordered(&rho0, &cold, 1.0, 1000).expect("time stepping").to_dense();
    let diff = exact.iter().zip(stepped.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    println!("rotating frame vs 1000-step RK4, full density matrix: {diff:.2e}");
}
