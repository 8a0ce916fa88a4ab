//! The full two-strain model with a doubly infected class: when double
//! carriers shed single strains at birth, all three infected classes coexist,
//! with the doubly infected far ahead.

use wolbdyn::equilibria::multistrain_equilibrium;
use wolbdyn::models::{MultiStrainParams, State4};
use wolbdyn::odeint::{integrate, IntegratorConfig};

fn main() {
    let params = MultiStrainParams::double_infection(0.9, 0.9, 1.1, 1.1, 0.9, 0.9).unwrap();
    println!(
        "derived incompatibility against double carriers: q0_ab = {:.4}, cost eta_ab = {:.2}",
        params.q0_ab,
        params.eta_ab()
    );

    let mut cfg = IntegratorConfig::new(2000.0);
    cfg.conv_tol = 1e-10;
    let traj = integrate(params.vector_field(), &[0.1, 0.1, 0.1, 0.1], &cfg).unwrap();
    let end = traj.last_state();
    println!(
        "simulation from (0.1, 0.1, 0.1, 0.1) converged at t = {:.1}:",
        traj.times.last().unwrap()
    );
    println!(
        "  i_ab = {:.5}, i_a = {:.5}, i_b = {:.5}, u = {:.5}",
        end[0], end[1], end[2], end[3]
    );

    // the same point located directly by damped Newton, with its spectrum
    let report =
        multistrain_equilibrium(&params, State4::new(0.5, 0.1, 0.1, 0.05).unwrap()).unwrap();
    println!("\nNewton from a rough seed lands on the same equilibrium:");
    println!(
        "  point ({:.5}, {:.5}, {:.5}, {:.5}), {:?}",
        report.point[0], report.point[1], report.point[2], report.point[3], report.classification
    );
    for e in &report.eigenvalues {
        println!("  eigenvalue {:+.5} {:+.5}i", e.re, e.im);
    }
}
