//! The (xi, tau, q) parameter-space region map and the persistence threshold
//! in the transmission efficacy: below tau = 3/4 no parameter choice admits
//! the admissible invasion equilibrium.

use wolbdyn::equilibria::{region_classify, tau_persistence_threshold, RegionLabel};

fn main() {
    // a tau-xi slice at complete incompatibility
    let q = 1.0;
    println!("region slice at q = {q} (rows tau, columns xi):");
    print!("tau\\xi ");
    for j in 1..=10 {
        print!("{:>5.1}", j as f64 / 10.0);
    }
    println!();
    for k in (0..=10).rev() {
        let tau = k as f64 / 10.0;
        print!("{tau:>6.1} ");
        for j in 1..=10 {
            let xi = j as f64 / 10.0;
            let label = match region_classify(xi, tau, q).unwrap() {
                RegionLabel::A => "A",
                RegionLabel::BOnly => "B",
                RegionLabel::C => "C",
            };
            print!("{label:>5}");
        }
        println!();
    }

    let threshold = tau_persistence_threshold(200).unwrap();
    println!("\nsmallest transmission efficacy with a region-C point: {threshold:.6}");
}
