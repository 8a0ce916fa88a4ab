//! Two compatible strains: with equal efficacy and cost the strain share is
//! conserved along trajectories and a whole continuum of equilibria exists;
//! breaking the cost symmetry lets the cheaper strain take over.

use wolbdyn::equilibria::continuum_equilibria;
use wolbdyn::models::{ratio_drift, MultiStrainParams};
use wolbdyn::odeint::{integrate, IntegratorConfig};

fn main() {
    let params = MultiStrainParams::simplified_compatible(1.0, 1.1, 0.95, 0.5).unwrap();

    // the continuum family: for every uninfected level u below tau/eta there
    // is an equilibrium splitting the infected between the strains
    println!("continuum of equilibria (tau = 1, eta = 1.1, q0_a = 0.95, q0_b = 0.5):");
    for u in [0.7, 0.8, 0.88] {
        let pt = continuum_equilibria(u, &params).unwrap();
        println!(
            "  u = {u:.2}: i_a = {:+.5}, i_b = {:+.5}, biological: {}",
            pt.i_a, pt.i_b, pt.nonnegative
        );
    }

    // conserved share under the symmetric parameters
    let cfg = IntegratorConfig::new(50.0);
    let traj = integrate(params.vector_field(), &[0.0, 0.2, 0.1, 0.5], &cfg).unwrap();
    let drift = ratio_drift(&traj.states).unwrap();
    println!("\nequal costs: share drift over t in [0, 50] = {drift:.2e}");

    // unequal costs: strain A (cheaper) displaces strain B
    let lopsided =
        MultiStrainParams::new(1.0, 1.0, 1.1, 1.2, 0.95, 0.5, 0.0, 0.0, 0.0, 0.0, 0.0).unwrap();
    let traj = integrate(lopsided.vector_field(), &[0.0, 0.2, 0.1, 0.5], &cfg).unwrap();
    let end = traj.last_state();
    println!(
        "unequal costs (eta_a = 1.1, eta_b = 1.2): share {:.3} -> {:.3}",
        0.2 / 0.3,
        end[1] / (end[1] + end[2])
    );
}
