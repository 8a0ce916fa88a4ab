//! Age-structured steady states and their stability: the fertility-threshold
//! test for the extinct state, the invasion integral for the infection-free
//! state, and the characteristic function for the two coexistence states.

use wolbdyn::agestruct::{
    disease_free_instability, evaluate_characteristic, instability_check, solve_disease_free,
    solve_positive_steady_states, trivial_stability, AgeSpec, RateFunction,
};

fn main() {
    let constant = |v| RateFunction::constant(v).unwrap();
    let spec = AgeSpec::new(
        1.0,
        800,
        constant(5.0),
        constant(5.0),
        constant(1.0),
        constant(1.0),
        0.9,
        1.0,
    )
    .unwrap();

    let trivial = trivial_stability(&spec);
    println!(
        "extinct state: {:?} (witness {:?})",
        trivial.verdict, trivial.witness
    );

    let df = solve_disease_free(&spec).unwrap();
    let df_verdict = disease_free_instability(&spec).unwrap();
    println!(
        "infection-free state: U* = {:.6}, invasion integral = {:.4} -> {:?}",
        df.u_total,
        df_verdict.witness.unwrap(),
        df_verdict.verdict
    );

    for ss in solve_positive_steady_states(&spec).unwrap() {
        let c = ss.coefficients.unwrap();
        let k0 = evaluate_characteristic(0.0, &ss, &spec).unwrap();
        let verdict = instability_check(&ss, &spec, 5.0).unwrap();
        println!(
            "coexistence state: I* = {:.6}, U* = {:.6} (c1 = {:.6})",
            ss.i_total, ss.u_total, c.c1
        );
        println!(
            "  K(0) = {k0:+.6} -> {:?} (witness {:?})",
            verdict.verdict, verdict.witness
        );
    }
}
