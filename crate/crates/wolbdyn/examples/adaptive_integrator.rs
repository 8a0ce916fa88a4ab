//! The integrator on its own: tolerance behaviour on a problem with a known
//! solution, early convergence detection, and the observed order of the
//! fixed-step kernel.

use wolbdyn::models::SingleStrainParams;
use wolbdyn::odeint::{integrate, order_check, IntegratorConfig};

fn main() {
    // pure exponential decay against the closed form
    let decay = |y: &[f64], dy: &mut [f64]| dy[0] = -y[0];
    for rel_tol in [1e-6, 1e-9, 1e-12] {
        let mut cfg = IntegratorConfig::new(1.0);
        cfg.rel_tol = rel_tol;
        cfg.abs_tol = rel_tol * 1e-2;
        let traj = integrate(decay, &[1.0], &cfg).unwrap();
        let err = (traj.last_state()[0] - (-1.0f64).exp()).abs();
        println!(
            "rel_tol {rel_tol:>7.0e}: {:>4} steps, end-point error {err:.2e}",
            traj.len() - 1
        );
    }

    // convergence detection on the invasion model
    let params = SingleStrainParams::mortality(1.0, 1.0, 1.0 / 0.9).unwrap();
    let mut cfg = IntegratorConfig::new(1e6);
    cfg.conv_tol = 1e-12;
    let traj = integrate(params.vector_field(), &[0.5, 0.1], &cfg).unwrap();
    println!(
        "\ninvasion run stopped as {:?} at t = {:.1} near ({:.4}, {:.4})",
        traj.terminal,
        traj.times.last().unwrap(),
        traj.last_state()[0],
        traj.last_state()[1]
    );

    // Richardson order check of the fixed-step kernel
    let reference = [(-1.0f64).exp()];
    let order = order_check(decay, &[1.0], 1.0, &reference, 0.1).unwrap();
    println!("\nobserved order of the fixed-step kernel: {order:.3}");
}
