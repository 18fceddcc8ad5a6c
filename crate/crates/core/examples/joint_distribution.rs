// Joint photon-phonon distribution P_nm and its marginals.
//
// Run with `cargo run --example joint_distribution`.

use raman_photostat::evolution::evolve_covariance;
use raman_photostat::model::{initial_state, Beta, ModelParams, Mode};
use raman_photostat::photostat::joint_distribution;

fn main() {
    let params = ModelParams::new(1.0, 0.5, 0.3, Beta::Finite(1.0)).expect("valid parameters");
    let state = evolve_covariance(&initial_state(&params), &params, 1.0).expect("evolution");
    let joint = joint_distribution(&state, 16).expect("joint distribution");

    println!("P_nm for n, m <= 5 (rows n, columns m)");
    for n in 0..=5 {
        let row: Vec<String> = (0..=5).map(|m| format!("{:.2e}", joint.joint(n, m).unwrap())).collect();
        println!("  {}", row.join("  "));
    }
    // photons and phonons are created in pairs from the thermal phonon state
    let photon = joint.marginal(Mode::Photon).expect("joint layout");
    let phonon = joint.marginal(Mode::Phonon).expect("joint layout");
    let (mean_a, _) = photon.moments().expect("marginal");
    let (mean_b, _) = phonon.moments().expect("marginal");
    println!("<n_a> = {mean_a:.6}, <n_b> = {mean_b:.6}, difference = {:.6}", mean_b - mean_a);
    println!("total = {:.10}, tail <= {:.1e}", joint.total(), joint.tail_bound());
}
