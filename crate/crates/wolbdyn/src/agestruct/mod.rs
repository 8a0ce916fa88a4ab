//! Age-structured infection dynamics: transport simulation along
//! characteristics, steady-state solvers, the characteristic function of the
//! linearised system, and the stability/instability criteria built on it.
//!
//! All age integrals use composite trapezoid on a uniform grid of `cells`
//! cells over `[0, max_age]`; nested integrals use cumulative trapezoid.
//! Scalar roots are found by bisection (tolerance 1e-12) after geometric
//! bracket expansion.

mod characteristic;
mod simulate;
mod stability;
mod steady;

pub use characteristic::{evaluate_characteristic, instability_check};
pub use simulate::{sample_profile, simulate_pde, PdeTimeSeries};
pub use stability::{
    complete_transmission_instability, disease_free_instability, trivial_stability,
};
pub use steady::{solve_disease_free, solve_positive_steady_states};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{cumulative_trapezoid, trapezoid};

/// A non-negative rate of age, given as a piecewise-linear knot table.
/// Evaluation interpolates linearly between knots and extends the end values
/// constantly towards the interval ends.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateFunction {
    knots: Vec<f64>,
    values: Vec<f64>,
}

impl RateFunction {
    pub fn new(knots: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if knots.is_empty() || knots.len() != values.len() {
            return Err(Error::Domain(
                "RateFunction needs equally many knots and values, at least one".into(),
            ));
        }
        if knots
            .windows(2)
            .any(|w| w[1].partial_cmp(&w[0]).is_none_or(|o| !o.is_gt()))
        {
            return Err(Error::Domain(
                "RateFunction knots must be strictly increasing".into(),
            ));
        }
        if knots.iter().chain(values.iter()).any(|v| !v.is_finite()) {
            return Err(Error::Domain("RateFunction entries must be finite".into()));
        }
        if knots[0] < 0.0 {
            return Err(Error::Domain(
                "RateFunction knots must be non-negative ages".into(),
            ));
        }
        if values.iter().any(|&v| v < 0.0) {
            return Err(Error::Domain(
                "RateFunction values must be non-negative".into(),
            ));
        }
        Ok(Self { knots, values })
    }

    /// Constant rate at every age.
    pub fn constant(value: f64) -> Result<Self> {
        Self::new(vec![0.0], vec![value])
    }

    pub fn eval(&self, age: f64) -> f64 {
        let k = &self.knots;
        let v = &self.values;
        if age <= k[0] {
            return v[0];
        }
        if age >= k[k.len() - 1] {
            return v[v.len() - 1];
        }
        let idx = k.partition_point(|&x| x <= age);
        let (a0, a1) = (k[idx - 1], k[idx]);
        let t = (age - a0) / (a1 - a0);
        v[idx - 1] + t * (v[idx] - v[idx - 1])
    }

    pub fn last_knot(&self) -> f64 {
        *self.knots.last().expect("non-empty by construction")
    }

    /// True when the rate vanishes identically (every knot value is zero).
    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }
}

/// The age-structured model specification: maximum age, grid resolution,
/// the four age-specific rates, and the transmission/incompatibility levels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgeSpec {
    pub max_age: f64,
    /// Number of uniform grid cells; profiles live on the `cells + 1` nodes.
    pub cells: usize,
    /// Fertility of infected individuals.
    pub beta1: RateFunction,
    /// Fertility of uninfected individuals.
    pub beta2: RateFunction,
    /// Mortality modulation of infected individuals.
    pub eta1: RateFunction,
    /// Mortality modulation of uninfected individuals.
    pub eta2: RateFunction,
    pub tau: f64,
    pub q: f64,
}

impl AgeSpec {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        max_age: f64,
        cells: usize,
        beta1: RateFunction,
        beta2: RateFunction,
        eta1: RateFunction,
        eta2: RateFunction,
        tau: f64,
        q: f64,
    ) -> Result<Self> {
        if !(max_age.is_finite() && max_age > 0.0) {
            return Err(Error::Domain(format!(
                "max_age must be positive, got {max_age}"
            )));
        }
        if cells < 100 {
            return Err(Error::Domain(format!(
                "grid must have at least 100 cells for the analysis operations, got {cells}"
            )));
        }
        if !(0.0..=1.0).contains(&tau) {
            return Err(Error::Domain(format!("tau must be in [0,1], got {tau}")));
        }
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::Domain(format!("q must be in [0,1], got {q}")));
        }
        for (name, rate) in [
            ("beta1", &beta1),
            ("beta2", &beta2),
            ("eta1", &eta1),
            ("eta2", &eta2),
        ] {
            if rate.last_knot() > max_age {
                return Err(Error::Domain(format!(
                    "{name} has a knot beyond max_age = {max_age}"
                )));
            }
        }
        Ok(Self {
            max_age,
            cells,
            beta1,
            beta2,
            eta1,
            eta2,
            tau,
            q,
        })
    }

    /// Grid spacing.
    pub fn da(&self) -> f64 {
        self.max_age / self.cells as f64
    }

    /// Number of profile nodes (`cells + 1`).
    pub fn nodes(&self) -> usize {
        self.cells + 1
    }

    pub(crate) fn grid(&self) -> AgeGrid {
        let n = self.nodes();
        let da = self.da();
        let ages: Vec<f64> = (0..n).map(|k| k as f64 * da).collect();
        let sample = |r: &RateFunction| -> Vec<f64> { ages.iter().map(|&a| r.eval(a)).collect() };
        let b1 = sample(&self.beta1);
        let b2 = sample(&self.beta2);
        let e1 = sample(&self.eta1);
        let e2 = sample(&self.eta2);
        let ce1 = cumulative_trapezoid(&e1, da);
        let ce2 = cumulative_trapezoid(&e2, da);
        let mids: Vec<f64> = (0..self.cells).map(|k| (k as f64 + 0.5) * da).collect();
        let e1_mid = mids.iter().map(|&a| self.eta1.eval(a)).collect();
        let e2_mid = mids.iter().map(|&a| self.eta2.eval(a)).collect();
        AgeGrid {
            da,
            ages,
            b1,
            b2,
            e1,
            e2,
            ce1,
            ce2,
            e1_mid,
            e2_mid,
        }
    }
}

/// Node-sampled rates and their cumulative integrals on the uniform grid.
pub(crate) struct AgeGrid {
    pub da: f64,
    pub ages: Vec<f64>,
    pub b1: Vec<f64>,
    pub b2: Vec<f64>,
    pub e1: Vec<f64>,
    pub e2: Vec<f64>,
    /// Cumulative integral of eta1 from age 0 to each node.
    pub ce1: Vec<f64>,
    /// Cumulative integral of eta2 from age 0 to each node.
    pub ce2: Vec<f64>,
    /// eta1 at cell midpoints (used by the transport step).
    pub e1_mid: Vec<f64>,
    pub e2_mid: Vec<f64>,
}

impl AgeGrid {
    pub fn trapz(&self, y: &[f64]) -> f64 {
        trapezoid(y, self.da)
    }

    pub fn cumtrapz(&self, y: &[f64]) -> Vec<f64> {
        cumulative_trapezoid(y, self.da)
    }
}

/// Which steady state a profile represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SteadyStateKind {
    Trivial,
    DiseaseFree,
    Positive,
}

/// Coefficients of the scalar quadratic that determines the infected total
/// of a positive steady state (`c1` is the total population).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadraticCoefficients {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
}

/// A steady state of the age-structured system: age profiles on the grid
/// nodes, their totals, and the boundary (age-zero) values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SteadyStateProfile {
    pub kind: SteadyStateKind,
    pub i_profile: Vec<f64>,
    pub u_profile: Vec<f64>,
    /// Total infected population `I*` (trapezoid of the profile).
    pub i_total: f64,
    /// Total uninfected population `U*`.
    pub u_total: f64,
    /// Boundary value `i*(0)`.
    pub i0: f64,
    /// Boundary value `u*(0)`.
    pub u0: f64,
    /// Present for the positive kind only.
    pub coefficients: Option<QuadraticCoefficients>,
}

impl SteadyStateProfile {
    /// The zero steady state on the grid of `spec`.
    pub fn trivial(spec: &AgeSpec) -> Self {
        let zeros = vec![0.0; spec.nodes()];
        Self {
            kind: SteadyStateKind::Trivial,
            i_profile: zeros.clone(),
            u_profile: zeros,
            i_total: 0.0,
            u_total: 0.0,
            i0: 0.0,
            u0: 0.0,
            coefficients: None,
        }
    }

    pub fn total_population(&self) -> f64 {
        self.i_total + self.u_total
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.kind == SteadyStateKind::Positive && self.i_total > 0.0 && self.u_total > 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Stable,
    Unstable,
    /// The applied criterion is one-sided and did not fire.
    Inconclusive,
}

/// Outcome of a stability criterion, with the quantity that decided it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityVerdict {
    pub verdict: Verdict,
    /// The deciding quantity: a located root, a threshold integral, or the
    /// characteristic value at zero. Always present on unstable verdicts.
    pub witness: Option<f64>,
    /// Name of the criterion that produced the verdict.
    pub criterion: String,
}

impl StabilityVerdict {
    pub(crate) fn unstable(witness: f64, criterion: &str) -> Self {
        Self {
            verdict: Verdict::Unstable,
            witness: Some(witness),
            criterion: criterion.into(),
        }
    }

    pub(crate) fn stable(witness: Option<f64>, criterion: &str) -> Self {
        Self {
            verdict: Verdict::Stable,
            witness,
            criterion: criterion.into(),
        }
    }

    pub(crate) fn inconclusive(witness: Option<f64>, criterion: &str) -> Self {
        Self {
            verdict: Verdict::Inconclusive,
            witness,
            criterion: criterion.into(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rate_function_interpolation_and_extrapolation() {
        let r = RateFunction::new(vec![0.2, 0.4], vec![1.0, 3.0]).unwrap();
        assert_eq!(r.eval(0.0), 1.0); // constant before first knot
        assert!((r.eval(0.3) - 2.0).abs() < 1e-12); // linear in between
        assert_eq!(r.eval(0.9), 3.0); // constant after last knot
        assert!((r.eval(0.25) - 1.5).abs() < 1e-12);
    }

    #[test]
    fn rate_function_validation() {
        assert!(RateFunction::new(vec![], vec![]).is_err());
        assert!(RateFunction::new(vec![0.0, 0.0], vec![1.0, 2.0]).is_err());
        assert!(RateFunction::new(vec![0.0, 1.0], vec![1.0]).is_err());
        assert!(RateFunction::new(vec![0.0], vec![-1.0]).is_err());
        assert!(RateFunction::constant(2.0).unwrap().eval(5.0) == 2.0);
        assert!(RateFunction::constant(0.0).unwrap().is_zero());
    }

    #[test]
    fn age_spec_validation() {
        let c = |v| RateFunction::constant(v).unwrap();
        assert!(AgeSpec::new(1.0, 400, c(5.0), c(5.0), c(1.0), c(1.0), 0.9, 1.0).is_ok());
        assert!(AgeSpec::new(0.0, 400, c(5.0), c(5.0), c(1.0), c(1.0), 0.9, 1.0).is_err());
        assert!(AgeSpec::new(1.0, 50, c(5.0), c(5.0), c(1.0), c(1.0), 0.9, 1.0).is_err());
        assert!(AgeSpec::new(1.0, 400, c(5.0), c(5.0), c(1.0), c(1.0), 1.2, 1.0).is_err());
        let beyond = RateFunction::new(vec![0.0, 2.0], vec![1.0, 1.0]).unwrap();
        assert!(AgeSpec::new(1.0, 400, beyond, c(5.0), c(1.0), c(1.0), 0.9, 1.0).is_err());
    }

    #[test]
    fn grid_cumulative_integral_of_constant_rate() {
        let c = |v| RateFunction::constant(v).unwrap();
        let spec = AgeSpec::new(2.0, 200, c(5.0), c(5.0), c(1.5), c(1.0), 0.9, 1.0).unwrap();
        let g = spec.grid();
        // integral of 1.5 from 0 to 2 = 3
        assert!((g.ce1[g.ce1.len() - 1] - 3.0).abs() < 1e-12);
        assert_eq!(g.e1_mid.len(), 200);
    }
}
