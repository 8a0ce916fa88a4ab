//! Closed-form stability criteria: fertility-integral thresholds for the
//! trivial state, the invasion integral for the disease-free state, and the
//! reproduction-rate determinant for strictly positive states under complete
//! transmission.

use super::steady::solve_disease_free;
use super::{AgeSpec, StabilityVerdict, SteadyStateProfile};
use crate::error::{Error, Result};

const EQUALITY_TOL: f64 = 1e-12;

/// Stability of the extinct state from the two fertility integrals: stable
/// when both `tau * int beta1` and `int beta2` are below one, unstable when
/// either exceeds one (witness: the offending integral), inconclusive on
/// equality within 1e-12.
pub fn trivial_stability(spec: &AgeSpec) -> StabilityVerdict {
    const CRITERION: &str = "fertility integral thresholds";
    let g = spec.grid();
    let infected = spec.tau * g.trapz(&g.b1);
    let uninfected = g.trapz(&g.b2);
    if infected > 1.0 + EQUALITY_TOL {
        return StabilityVerdict::unstable(infected, CRITERION);
    }
    if uninfected > 1.0 + EQUALITY_TOL {
        return StabilityVerdict::unstable(uninfected, CRITERION);
    }
    if infected < 1.0 - EQUALITY_TOL && uninfected < 1.0 - EQUALITY_TOL {
        return StabilityVerdict::stable(Some(infected.max(uninfected)), CRITERION);
    }
    StabilityVerdict::inconclusive(Some(infected.max(uninfected)), CRITERION)
}

/// One-sided instability test of the disease-free state: the state is
/// unstable when the infected invasion integral
/// `tau * int beta1(a) exp(-U* int_0^a eta1)` exceeds one. Below one the
/// criterion is silent (inconclusive), since the linearisation is not known
/// to have a dominant real eigenvalue.
pub fn disease_free_instability(spec: &AgeSpec) -> Result<StabilityVerdict> {
    const CRITERION: &str = "invasion reproduction integral";
    let df = solve_disease_free(spec)?;
    let g = spec.grid();
    let vals: Vec<f64> = (0..spec.nodes())
        .map(|k| g.b1[k] * (-df.u_total * g.ce1[k]).exp())
        .collect();
    let integral = spec.tau * g.trapz(&vals);
    if integral > 1.0 + EQUALITY_TOL {
        Ok(StabilityVerdict::unstable(integral, CRITERION))
    } else {
        Ok(StabilityVerdict::inconclusive(Some(integral), CRITERION))
    }
}

/// Instability of a strictly positive steady state under complete
/// transmission, from the sign of the reproduction-rate determinant
/// `R1_I R2_U - R1_U R2_I` (partial derivatives of the two net reproduction
/// rates in the totals, evaluated analytically with trapezoid quadrature).
///
/// With `tau = 1`, `q != 0`, and none of `beta1`, `beta2`, `eta1` identically
/// zero, the determinant is provably negative, so a non-negative value under
/// those hypotheses is reported as an internal-consistency failure of the
/// implementation rather than a verdict. `q = 0` is inconclusive (zero is
/// then the dominant eigenvalue of the linearisation).
pub fn complete_transmission_instability(
    ss: &SteadyStateProfile,
    spec: &AgeSpec,
) -> Result<StabilityVerdict> {
    const CRITERION: &str = "reproduction-rate determinant";
    if (spec.tau - 1.0).abs() > EQUALITY_TOL {
        return Err(Error::Domain(format!(
            "complete_transmission_instability requires tau = 1, got {}",
            spec.tau
        )));
    }
    if !ss.is_strictly_positive() {
        return Err(Error::Domain(
            "complete_transmission_instability requires a strictly positive steady state".into(),
        ));
    }
    if spec.q == 0.0 {
        return Ok(StabilityVerdict::inconclusive(None, CRITERION));
    }
    let g = spec.grid();
    let total = ss.total_population();
    let frac_i = ss.i_total / total;
    let f1: Vec<f64> = g.ce1.iter().map(|&ce| (-total * ce).exp()).collect();
    let f2: Vec<f64> = g.ce2.iter().map(|&ce| (-total * ce).exp()).collect();
    // R1_I = R1_U: common derivative of the infected reproduction rate
    let r1_vals: Vec<f64> = (0..spec.nodes())
        .map(|k| g.b1[k] * g.ce1[k] * f1[k])
        .collect();
    let r1_d = -g.trapz(&r1_vals);
    // shared mortality part of the uninfected derivatives
    let shared_vals: Vec<f64> = (0..spec.nodes())
        .map(|k| g.b2[k] * g.ce2[k] * f2[k])
        .collect();
    let shared = -(1.0 - spec.q * frac_i) * g.trapz(&shared_vals);
    let b2f2: Vec<f64> = (0..spec.nodes()).map(|k| g.b2[k] * f2[k]).collect();
    let b2f2_total = g.trapz(&b2f2);
    let r2_i = shared - spec.q * ss.u_total / (total * total) * b2f2_total;
    let r2_u = shared + spec.q * ss.i_total / (total * total) * b2f2_total;
    let condition = r1_d * (r2_u - r2_i);
    if condition < 0.0 {
        return Ok(StabilityVerdict::unstable(condition, CRITERION));
    }
    let hypotheses_hold = !spec.beta1.is_zero() && !spec.beta2.is_zero() && !spec.eta1.is_zero();
    if hypotheses_hold {
        return Err(Error::InternalConsistency(format!(
            "reproduction-rate determinant is {condition} >= 0 although instability is \
             guaranteed under the stated hypotheses"
        )));
    }
    Ok(StabilityVerdict::inconclusive(Some(condition), CRITERION))
}
