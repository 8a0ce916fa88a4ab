//! Closed-form equilibria and their stability for three single-strain
//! scenarios: cheap infection with complete transmission (bistable invasion),
//! costless infection with partial transmission (true coexistence), and weak
//! incompatibility with a high cost (no viable invasion).

use wolbdyn::equilibria::single_equilibria;
use wolbdyn::models::SingleStrainParams;

fn show(label: &str, xi: f64, tau: f64, q: f64) {
    let params = SingleStrainParams::mortality(tau, q, 1.0 / xi).unwrap();
    println!("{label}  (xi = {xi}, tau = {tau}, q = {q})");
    for report in single_equilibria(&params).unwrap() {
        let eigs: Vec<String> = report
            .eigenvalues
            .iter()
            .map(|e| {
                if e.im == 0.0 {
                    format!("{:.4}", e.re)
                } else {
                    format!("{:.4}{:+.4}i", e.re, e.im)
                }
            })
            .collect();
        println!(
            "  ({:.4}, {:.4})  {:<20}  eigenvalues [{}]",
            report.point[0],
            report.point[1],
            format!("{:?}", report.classification),
            eigs.join(", ")
        );
    }
    println!();
}

fn main() {
    show("cheap infection, complete transmission:", 0.9, 1.0, 1.0);
    show("costless infection, partial transmission:", 1.0, 0.76, 1.0);
    show("expensive infection, weak incompatibility:", 0.5, 1.0, 0.1);
}
