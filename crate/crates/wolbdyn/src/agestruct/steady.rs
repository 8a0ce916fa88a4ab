//! Steady-state solvers for the age-structured system.

use super::{AgeSpec, QuadraticCoefficients, SteadyStateKind, SteadyStateProfile};
use crate::error::{Error, Result};
use crate::numerics::bisect;

const MAX_BRACKET_DOUBLINGS: usize = 64;

/// Solve the disease-free fixed-point equation for the uninfected total and
/// expand it into an age profile.
///
/// The defining scalar equation is
/// `1 = integral of beta2(a) exp(-U* int_0^a eta2)` over `[0, max_age]`;
/// its right side is continuous and strictly decreasing in `U*` (for
/// non-vanishing `eta2`), so the root found by bracketed bisection is unique.
/// A disease-free state exists iff the fertility integral of the uninfected
/// exceeds one.
pub fn solve_disease_free(spec: &AgeSpec) -> Result<SteadyStateProfile> {
    let g = spec.grid();
    let b2_total = g.trapz(&g.b2);
    if b2_total <= 1.0 {
        return Err(Error::Nonexistence(format!(
            "disease-free state needs the uninfected fertility integral above 1, got {b2_total}"
        )));
    }
    let renewal = |upper: f64| -> f64 {
        let vals: Vec<f64> =
            g.b2.iter()
                .zip(&g.ce2)
                .map(|(&b, &ce)| b * (-upper * ce).exp())
                .collect();
        g.trapz(&vals) - 1.0
    };
    let hi = expand_down(&renewal).ok_or_else(|| {
        Error::Divergence(
            "disease-free renewal never drops below 1; uninfected mortality vanishes on the \
             fertile ages"
                .into(),
        )
    })?;
    let u_star = bisect(renewal, 0.0, hi);
    let shape: Vec<f64> = g.ce2.iter().map(|&ce| (-u_star * ce).exp()).collect();
    let shape_total = g.trapz(&shape);
    let u0 = u_star / shape_total;
    let u_profile: Vec<f64> = shape.iter().map(|&s| u0 * s).collect();
    Ok(SteadyStateProfile {
        kind: SteadyStateKind::DiseaseFree,
        i_profile: vec![0.0; spec.nodes()],
        u_profile,
        i_total: 0.0,
        u_total: u_star,
        i0: 0.0,
        u0,
        coefficients: None,
    })
}

fn expand_down<F: Fn(f64) -> f64>(f: &F) -> Option<f64> {
    let mut hi = 1.0;
    for _ in 0..MAX_BRACKET_DOUBLINGS {
        let v = f(hi);
        if !v.is_finite() {
            return None;
        }
        if v < 0.0 {
            return Some(hi);
        }
        hi *= 2.0;
    }
    None
}

/// Solve for the non-trivial steady states with infected individuals.
///
/// First the total population `c1 = I* + U*` is pinned by bisection on the
/// infected renewal equation, then the infected total solves a scalar
/// quadratic whose coefficients are age integrals at `c1`. Every root with
/// `I* >= 0` and `U* = c1 - I* >= 0` is expanded into profiles. Necessary
/// condition: `tau` times the infected fertility integral must exceed one.
pub fn solve_positive_steady_states(spec: &AgeSpec) -> Result<Vec<SteadyStateProfile>> {
    if !(spec.tau.is_finite() && spec.tau > 0.0) {
        return Err(Error::Domain(
            "positive steady states require tau > 0".into(),
        ));
    }
    let g = spec.grid();
    let b1_total = g.trapz(&g.b1);
    if spec.tau * b1_total <= 1.0 {
        return Err(Error::Nonexistence(format!(
            "positive states need tau * (infected fertility integral) above 1, got {}",
            spec.tau * b1_total
        )));
    }
    let renewal = |c: f64| -> f64 {
        let vals: Vec<f64> =
            g.b1.iter()
                .zip(&g.ce1)
                .map(|(&b, &ce)| b * (-c * ce).exp())
                .collect();
        spec.tau * g.trapz(&vals) - 1.0
    };
    let hi = expand_down(&renewal).ok_or_else(|| {
        Error::Divergence(
            "infected renewal never drops below 1; infected mortality vanishes on the fertile \
             ages"
                .into(),
        )
    })?;
    let c1 = bisect(renewal, 0.0, hi);

    let f1: Vec<f64> = g.ce1.iter().map(|&ce| (-c1 * ce).exp()).collect();
    let f2: Vec<f64> = g.ce2.iter().map(|&ce| (-c1 * ce).exp()).collect();
    let f1_total = g.trapz(&f1);
    let f2_total = g.trapz(&f2);
    let b2f2: Vec<f64> = g.b2.iter().zip(&f2).map(|(&b, &f)| b * f).collect();
    let c2 = g.trapz(&b2f2);
    let c3 = spec.q * c2 / c1;
    let c4 = (1.0 / spec.tau - 1.0) * f2_total / f1_total;
    let coeffs = QuadraticCoefficients { c1, c2, c3, c4 };

    // c3 I^2 + (1 - c2 - c1 c3 + c4) I + c1 c2 - c1 = 0
    let lin = 1.0 - c2 - c1 * c3 + c4;
    let cst = c1 * c2 - c1;
    let mut roots: Vec<f64> = Vec::new();
    if c3 == 0.0 {
        // q = 0 degenerates the quadratic to a linear equation
        if lin != 0.0 {
            roots.push(-cst / lin);
        }
    } else {
        let disc = lin * lin - 4.0 * c3 * cst;
        if disc >= 0.0 {
            let s = disc.sqrt();
            roots.push((-lin - s) / (2.0 * c3));
            if disc > 0.0 {
                roots.push((-lin + s) / (2.0 * c3));
            }
        }
    }
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let mut out = Vec::new();
    for mut i_star in roots {
        if (-1e-12..0.0).contains(&i_star) {
            i_star = 0.0;
        }
        let mut u_star = c1 - i_star;
        if (-1e-12..0.0).contains(&u_star) {
            u_star = 0.0;
        }
        if i_star < 0.0 || u_star < 0.0 {
            continue;
        }
        let i0 = i_star / f1_total;
        let u0 = u_star / f2_total;
        out.push(SteadyStateProfile {
            kind: SteadyStateKind::Positive,
            i_profile: f1.iter().map(|&f| i0 * f).collect(),
            u_profile: f2.iter().map(|&f| u0 * f).collect(),
            i_total: i_star,
            u_total: u_star,
            i0,
            u0,
            coefficients: Some(coeffs),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agestruct::RateFunction;

    /// Residuals of the defining boundary equations at a steady state: the
    /// infected renewal residual and the uninfected one, with the fertility
    /// integrals taken over the stored profiles.
    fn boundary_residuals(ss: &SteadyStateProfile, spec: &AgeSpec) -> (f64, f64) {
        let g = spec.grid();
        let b1i: Vec<f64> =
            g.b1.iter()
                .zip(&ss.i_profile)
                .map(|(&b, &i)| b * i)
                .collect();
        let b2u: Vec<f64> =
            g.b2.iter()
                .zip(&ss.u_profile)
                .map(|(&b, &u)| b * u)
                .collect();
        let births_i = spec.tau * g.trapz(&b1i);
        let total = ss.total_population();
        let ci = if total > 0.0 {
            1.0 - spec.q * ss.i_total / total
        } else {
            1.0
        };
        let births_u = (1.0 - spec.tau) * g.trapz(&b1i) + ci * g.trapz(&b2u);
        ((ss.i0 - births_i).abs(), (ss.u0 - births_u).abs())
    }

    fn constant_spec(b1: f64, b2: f64, e1: f64, e2: f64, tau: f64, q: f64, n: usize) -> AgeSpec {
        let c = |v| RateFunction::constant(v).unwrap();
        AgeSpec::new(1.0, n, c(b1), c(b2), c(e1), c(e2), tau, q).unwrap()
    }

    #[test]
    fn disease_free_constant_rates() {
        // independent oracle: root of 2 (1 - exp(-U))/U = 1 is 1.59362426004004;
        // the discrete value at this grid is 1.5936278110070816
        let spec = constant_spec(3.0, 2.0, 1.0, 1.0, 0.9, 1.0, 400);
        let ss = solve_disease_free(&spec).unwrap();
        assert!(
            (ss.u_total - 1.5936278110070816).abs() < 1e-10,
            "got {}",
            ss.u_total
        );
        assert!((ss.u_total - 1.59362426004004).abs() < 1e-4);
        // residual of the defining equation at the returned total
        let g = spec.grid();
        let vals: Vec<f64> =
            g.b2.iter()
                .zip(&g.ce2)
                .map(|(&b, &ce)| b * (-ss.u_total * ce).exp())
                .collect();
        assert!((g.trapz(&vals) - 1.0).abs() < 1e-10);
        // profile integrates back to the total
        assert!((g.trapz(&ss.u_profile) - ss.u_total).abs() < 1e-10);
    }

    #[test]
    fn disease_free_nonexistence() {
        let spec = constant_spec(3.0, 0.5, 1.0, 1.0, 0.9, 1.0, 400);
        assert!(matches!(
            solve_disease_free(&spec),
            Err(Error::Nonexistence(_))
        ));
    }

    #[test]
    fn disease_free_divergence_with_zero_mortality() {
        let spec = constant_spec(3.0, 2.0, 1.0, 0.0, 0.9, 1.0, 400);
        assert!(matches!(
            solve_disease_free(&spec),
            Err(Error::Divergence(_))
        ));
    }

    #[test]
    fn positive_states_constant_rate_benchmark() {
        // frozen from the independent oracle at this grid resolution
        let spec = constant_spec(5.0, 5.0, 1.0, 1.0, 0.9, 1.0, 800);
        let states = solve_positive_steady_states(&spec).unwrap();
        assert_eq!(states.len(), 2);
        let c = states[0].coefficients.unwrap();
        assert!((c.c1 - 4.4473166954080625).abs() < 1e-9, "c1 = {}", c.c1);
        assert!((c.c2 - 1.1111111111110463).abs() < 1e-9);
        assert!((c.c4 - (1.0 / 0.9 - 1.0)).abs() < 1e-10);
        assert!((states[0].i_total - 0.5012199980412051).abs() < 1e-8);
        assert!((states[1].i_total - 3.946096697366598).abs() < 1e-8);
        for s in &states {
            assert!((s.i_total + s.u_total - c.c1).abs() < 1e-10);
            let (ri, ru) = boundary_residuals(s, &spec);
            assert!(ri < 1e-8 && ru < 1e-8, "residuals {ri}, {ru}");
        }
    }

    #[test]
    fn positive_nonexistence_when_fertility_too_low() {
        let spec = constant_spec(1.0, 5.0, 1.0, 1.0, 0.9, 1.0, 400);
        assert!(matches!(
            solve_positive_steady_states(&spec),
            Err(Error::Nonexistence(_))
        ));
    }

    #[test]
    fn positive_requires_positive_tau() {
        let spec = constant_spec(5.0, 5.0, 1.0, 1.0, 0.0, 1.0, 400);
        assert!(matches!(
            solve_positive_steady_states(&spec),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn q_zero_linear_branch() {
        // beta2 below beta1 so the linear equation has an admissible root
        let spec = constant_spec(5.0, 2.0, 1.0, 1.0, 0.9, 0.0, 400);
        let states = solve_positive_steady_states(&spec).unwrap();
        assert_eq!(states.len(), 1);
        let s = &states[0];
        assert!(s.i_total > 0.0 && s.u_total > 0.0);
        let (ri, ru) = boundary_residuals(s, &spec);
        assert!(ri < 1e-8 && ru < 1e-8, "residuals {ri}, {ru}");
    }

    #[test]
    fn richardson_convergence_of_total_population() {
        // trapezoid quadrature: the c1 error must shrink by about 4 per
        // grid doubling
        let c1_of = |n: usize| {
            let spec = constant_spec(5.0, 5.0, 1.0, 1.0, 0.9, 1.0, n);
            solve_positive_steady_states(&spec).unwrap()[0]
                .coefficients
                .unwrap()
                .c1
        };
        let (a, b, c) = (c1_of(400), c1_of(800), c1_of(1600));
        let ratio = (a - c).abs() / (b - c).abs();
        assert!(ratio > 2.5 && ratio < 6.0, "convergence ratio {ratio}");
    }
}
