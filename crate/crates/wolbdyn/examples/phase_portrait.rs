//! Phase-portrait ingredients for the bistable single-strain scenario: the
//! separatrix (stable manifold of the saddle) and the basins it separates,
//! probed by forward integration from both sides.

use wolbdyn::equilibria::{saddle_separatrix, single_equilibria, Classification};
use wolbdyn::models::SingleStrainParams;
use wolbdyn::odeint::{integrate, IntegratorConfig};

fn main() {
    let params = SingleStrainParams::mortality(1.0, 1.0, 1.0 / 0.9).unwrap();
    let reports = single_equilibria(&params).unwrap();
    let saddle = reports
        .iter()
        .find(|r| r.classification == Classification::Saddle)
        .expect("this scenario has a saddle");
    println!("saddle at ({:.4}, {:.4})", saddle.point[0], saddle.point[1]);

    let polyline = saddle_separatrix(&params, saddle, 2.0).unwrap();
    println!("separatrix polyline: {} points", polyline.len());
    println!("  first {:?}", polyline.first().unwrap());
    println!("  last  {:?}", polyline.last().unwrap());

    // pick a mid point, step off the curve on both sides, and watch the
    // trajectories settle on different attractors
    let k = polyline.len() / 2;
    let (a, b) = (polyline[k], polyline[k + 1]);
    let tangent = [b[0] - a[0], b[1] - a[1]];
    let norm = (tangent[0] * tangent[0] + tangent[1] * tangent[1]).sqrt();
    let normal = [-tangent[1] / norm, tangent[0] / norm];
    let mut cfg = IntegratorConfig::new(2000.0);
    cfg.conv_tol = 1e-12;
    for side in [-1.0, 1.0] {
        let start = [
            (a[0] + side * 1e-3 * normal[0]).max(0.0),
            (a[1] + side * 1e-3 * normal[1]).max(0.0),
        ];
        let traj = integrate(params.vector_field(), &start, &cfg).unwrap();
        let end = traj.last_state();
        println!(
            "start ({:.4}, {:.4}) -> equilibrium ({:.4}, {:.4}) after t = {:.1}",
            start[0],
            start[1],
            end[0],
            end[1],
            traj.times.last().unwrap()
        );
    }
}
