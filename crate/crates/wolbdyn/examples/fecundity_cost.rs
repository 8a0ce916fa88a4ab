//! The fecundity-cost variant: infected individuals reproduce at a reduced
//! rate instead of dying faster. Its equilibria have no exposed closed form
//! and are located numerically.

use wolbdyn::equilibria::single_equilibria_fecundity;
use wolbdyn::models::{rhs_single, SingleStrainParams, State2};
use wolbdyn::odeint::{integrate, IntegratorConfig};

fn main() {
    let params = SingleStrainParams::fecundity(1.0, 1.0, 0.9).unwrap();
    println!("fecundity variant with tau = 1, q = 1, mu = 0.9");
    for report in single_equilibria_fecundity(&params).unwrap() {
        let d = rhs_single(
            State2 {
                i: report.point[0].max(0.0),
                u: report.point[1].max(0.0),
            },
            &params,
        )
        .unwrap();
        println!(
            "  ({:.5}, {:.5})  {:<20} field residual {:.1e}",
            report.point[0],
            report.point[1],
            format!("{:?}", report.classification),
            d[0].abs().max(d[1].abs())
        );
    }

    // the invasion picture mirrors the mortality-cost model
    let mut cfg = IntegratorConfig::new(2000.0);
    cfg.conv_tol = 1e-11;
    for y0 in [[0.5, 0.1], [0.01, 0.99]] {
        let traj = integrate(params.vector_field(), &y0, &cfg).unwrap();
        let end = traj.last_state();
        println!(
            "start ({:.2}, {:.2}) -> ({:.4}, {:.4})",
            y0[0], y0[1], end[0], end[1]
        );
    }
}
