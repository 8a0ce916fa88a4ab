//! Transport simulation of the age-structured system: a computed steady
//! state stays put, and a one-percent infected seed invades the
//! infection-free population when the invasion integral exceeds one.

use wolbdyn::agestruct::{
    disease_free_instability, simulate_pde, solve_disease_free, solve_positive_steady_states,
    AgeSpec, RateFunction,
};

fn main() {
    let constant = |v| RateFunction::constant(v).unwrap();

    // steady-state preservation under the benchmark rates
    let spec = AgeSpec::new(
        1.0,
        400,
        constant(5.0),
        constant(5.0),
        constant(1.0),
        constant(1.0),
        0.9,
        1.0,
    )
    .unwrap();
    let ss = &solve_positive_steady_states(&spec).unwrap()[0];
    let run = simulate_pde(&spec, &ss.i_profile, &ss.u_profile, 5.0, 2000).unwrap();
    let drift = run
        .final_i_profile()
        .iter()
        .zip(&ss.i_profile)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    println!(
        "steady-state run over t in [0, 5]: max profile drift {drift:.3e} (profile peak {:.3})",
        ss.i_profile[0]
    );

    // invasion from a small seed
    let gspec = AgeSpec::new(
        1.0,
        400,
        constant(3.0),
        constant(2.0),
        constant(1.0),
        constant(1.0),
        0.9,
        1.0,
    )
    .unwrap();
    let df = solve_disease_free(&gspec).unwrap();
    let verdict = disease_free_instability(&gspec).unwrap();
    println!(
        "\ninvasion integral = {:.4} -> {:?}",
        verdict.witness.unwrap(),
        verdict.verdict
    );
    let seed: Vec<f64> = df.u_profile.iter().map(|&v| 0.01 * v).collect();
    let run = simulate_pde(&gspec, &seed, &df.u_profile, 2.0, 100).unwrap();
    println!("infected total under a 1% seed:");
    for k in (0..run.times.len()).step_by(run.times.len() / 8) {
        println!("  t = {:>5.2}: I = {:.6}", run.times[k], run.i_totals[k]);
    }
}
