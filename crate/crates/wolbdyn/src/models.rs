//! Parameter and state types plus the right-hand sides (vector fields) of the
//! scaled single-strain and two-strain infection models.
//!
//! All densities are in the rescaled units (time scaled by the birth rate);
//! the raw demographic rates never appear. Every operation here is a pure
//! function of its arguments.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How the fitness cost of carrying the infection enters the model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CostMode {
    /// Infected individuals suffer extra mortality (scaled rate `eta >= 1`).
    Mortality,
    /// Infected individuals reproduce at a reduced rate `mu` (common death rate).
    Fecundity,
}

/// Parameters of the single-strain model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingleStrainParams {
    /// Vertical transmission efficacy, fraction of infected offspring from
    /// infected parents, in `[0, 1]`.
    pub tau: f64,
    /// Incompatibility level: probability that a cross of an infected male
    /// with an uninfected female is unviable, in `[0, 1]`.
    pub q: f64,
    /// Scaled mortality of infected individuals, `>= 1`. Only meaningful in
    /// mortality mode; `xi = 1/eta` is the equilibrium capacity factor.
    pub eta: f64,
    pub cost_mode: CostMode,
    /// Reduced fecundity of infected individuals in `[0, 1]`; used only in
    /// fecundity mode.
    pub mu: f64,
}

impl SingleStrainParams {
    /// Mortality-cost parameters (the primary model).
    pub fn mortality(tau: f64, q: f64, eta: f64) -> Result<Self> {
        let p = Self {
            tau,
            q,
            eta,
            cost_mode: CostMode::Mortality,
            mu: 1.0,
        };
        p.validate()?;
        Ok(p)
    }

    /// Fecundity-cost variant: reduced birth rate `mu` for infected
    /// individuals, common mortality for everyone.
    pub fn fecundity(tau: f64, q: f64, mu: f64) -> Result<Self> {
        let p = Self {
            tau,
            q,
            eta: 1.0,
            cost_mode: CostMode::Fecundity,
            mu,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.tau) || !self.tau.is_finite() {
            return Err(Error::Domain(format!(
                "tau must be in [0,1], got {}",
                self.tau
            )));
        }
        if !(0.0..=1.0).contains(&self.q) || !self.q.is_finite() {
            return Err(Error::Domain(format!("q must be in [0,1], got {}", self.q)));
        }
        if !(self.eta.is_finite() && self.eta >= 1.0) {
            return Err(Error::Domain(format!("eta must be >= 1, got {}", self.eta)));
        }
        if !(0.0..=1.0).contains(&self.mu) || !self.mu.is_finite() {
            return Err(Error::Domain(format!(
                "mu must be in [0,1], got {}",
                self.mu
            )));
        }
        Ok(())
    }

    /// Capacity factor `xi = 1/eta` in `(0, 1]`.
    pub fn xi(&self) -> f64 {
        1.0 / self.eta
    }

    /// The model vector field as a closure suitable for the integrator.
    /// Components within integration clipping tolerance below zero are
    /// treated as zero, so the field stays defined on the whole orthant.
    pub fn vector_field(&self) -> impl Fn(&[f64], &mut [f64]) + '_ {
        move |y, dy| {
            let s = State2 {
                i: y[0].max(0.0),
                u: y[1].max(0.0),
            };
            let d = rhs_single_raw(s, self);
            dy[0] = d[0];
            dy[1] = d[1];
        }
    }
}

/// Scaled (infected, uninfected) density pair. Both components non-negative;
/// the origin is admitted as an equilibrium by convention.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct State2 {
    pub i: f64,
    pub u: f64,
}

impl State2 {
    pub fn new(i: f64, u: f64) -> Result<Self> {
        if !(i.is_finite() && i >= 0.0) || !(u.is_finite() && u >= 0.0) {
            return Err(Error::Domain(format!(
                "state components must be non-negative, got ({i}, {u})"
            )));
        }
        Ok(Self { i, u })
    }

    pub fn total(&self) -> f64 {
        self.i + self.u
    }
}

/// Right-hand side of the single-strain model at `s`.
///
/// Mortality mode:
/// `di/dt = (tau - eta (i+u)) i`,
/// `du/dt = (1-tau) i + (1 - q i/(i+u) - (i+u)) u`.
/// Fecundity mode replaces `tau` by `mu tau` in the infected growth term and
/// `(1-tau)` by `mu (1-tau)` in the leakage term, with `eta = 1`.
///
/// The origin returns a zero derivative; negative components are a domain
/// error.
pub fn rhs_single(s: State2, params: &SingleStrainParams) -> Result<[f64; 2]> {
    if s.i.is_nan() || s.u.is_nan() || s.i < 0.0 || s.u < 0.0 {
        return Err(Error::Domain(format!(
            "rhs_single requires non-negative components, got ({}, {})",
            s.i, s.u
        )));
    }
    params.validate()?;
    Ok(rhs_single_raw(s, params))
}

fn rhs_single_raw(s: State2, params: &SingleStrainParams) -> [f64; 2] {
    let p = s.total();
    if p == 0.0 {
        return [0.0, 0.0];
    }
    let freq = s.i / p;
    match params.cost_mode {
        CostMode::Mortality => [
            (params.tau - params.eta * p) * s.i,
            (1.0 - params.tau) * s.i + (1.0 - params.q * freq - p) * s.u,
        ],
        CostMode::Fecundity => [
            (params.mu * params.tau - p) * s.i,
            params.mu * (1.0 - params.tau) * s.i + (1.0 - params.q * freq - p) * s.u,
        ],
    }
}

/// Parameters of the two-strain model with a doubly infected class.
///
/// The seven incompatibility levels are keyed female-first: `qa_b` is the
/// level for an A-infected female crossed with a B-infected male, `q0_ab`
/// for an uninfected female crossed with a doubly infected male, and so on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MultiStrainParams {
    pub tau_a: f64,
    pub tau_b: f64,
    pub eta_a: f64,
    pub eta_b: f64,
    pub q0_a: f64,
    pub q0_b: f64,
    pub q0_ab: f64,
    pub qa_b: f64,
    pub qa_ab: f64,
    pub qb_a: f64,
    pub qb_ab: f64,
}

impl MultiStrainParams {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        tau_a: f64,
        tau_b: f64,
        eta_a: f64,
        eta_b: f64,
        q0_a: f64,
        q0_b: f64,
        q0_ab: f64,
        qa_b: f64,
        qa_ab: f64,
        qb_a: f64,
        qb_ab: f64,
    ) -> Result<Self> {
        let p = Self {
            tau_a,
            tau_b,
            eta_a,
            eta_b,
            q0_a,
            q0_b,
            q0_ab,
            qa_b,
            qa_ab,
            qb_a,
            qb_ab,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("tau_a", self.tau_a), ("tau_b", self.tau_b)] {
            if !(0.0..=1.0).contains(&v) || !v.is_finite() {
                return Err(Error::Domain(format!("{name} must be in [0,1], got {v}")));
            }
        }
        for (name, v) in [("eta_a", self.eta_a), ("eta_b", self.eta_b)] {
            if !(v.is_finite() && v >= 1.0) {
                return Err(Error::Domain(format!("{name} must be >= 1, got {v}")));
            }
        }
        for (name, v) in [
            ("q0_a", self.q0_a),
            ("q0_b", self.q0_b),
            ("q0_ab", self.q0_ab),
            ("qa_b", self.qa_b),
            ("qa_ab", self.qa_ab),
            ("qb_a", self.qb_a),
            ("qb_ab", self.qb_ab),
        ] {
            if !(0.0..=1.0).contains(&v) || !v.is_finite() {
                return Err(Error::Domain(format!("{name} must be in [0,1], got {v}")));
            }
        }
        Ok(())
    }

    /// Combined cost of the double infection (additive strain costs).
    pub fn eta_ab(&self) -> f64 {
        self.eta_a + self.eta_b - 1.0
    }

    /// Opt-in convention: the escape from incompatibility against a doubly
    /// infected male is the product of the single-strain escapes,
    /// `1 - q0_ab = (1 - q0_a)(1 - q0_b)`.
    pub fn with_product_escape(mut self) -> Self {
        self.q0_ab = 1.0 - (1.0 - self.q0_a) * (1.0 - self.q0_b);
        self
    }

    /// Preset: no doubly infected class, mutually compatible strains with
    /// equal efficacy and cost; only the incompatibility against uninfected
    /// females differs between strains.
    pub fn simplified_compatible(tau: f64, eta: f64, q0_a: f64, q0_b: f64) -> Result<Self> {
        Self::new(tau, tau, eta, eta, q0_a, q0_b, 0.0, 0.0, 0.0, 0.0, 0.0)
    }

    /// Preset: no doubly infected class, mutually incompatible strains with
    /// equal efficacy and cost and a common level `q0` against uninfected
    /// females.
    pub fn mutually_incompatible(
        tau: f64,
        eta: f64,
        q0: f64,
        qa_b: f64,
        qb_a: f64,
    ) -> Result<Self> {
        Self::new(tau, tau, eta, eta, q0, q0, 0.0, qa_b, 0.0, qb_a, 0.0)
    }

    /// Preset: full model with doubly infected individuals under the
    /// male-determined-incompatibility conventions `qa_b = qa_ab = q0_b`,
    /// `qb_a = qb_ab = q0_a`, and the product-escape rule for `q0_ab`.
    pub fn double_infection(
        tau_a: f64,
        tau_b: f64,
        eta_a: f64,
        eta_b: f64,
        q0_a: f64,
        q0_b: f64,
    ) -> Result<Self> {
        let q0_ab = 1.0 - (1.0 - q0_a) * (1.0 - q0_b);
        Self::new(
            tau_a, tau_b, eta_a, eta_b, q0_a, q0_b, q0_ab, q0_b, q0_b, q0_a, q0_a,
        )
    }

    /// True when the parameters are a simplified-compatible preset
    /// (equal efficacies and costs, no incompatibility between carriers).
    pub fn is_simplified_compatible(&self) -> bool {
        self.tau_a == self.tau_b && self.eta_a == self.eta_b && self.qa_b == 0.0 && self.qb_a == 0.0
    }

    /// The model vector field as a closure suitable for the integrator.
    pub fn vector_field(&self) -> impl Fn(&[f64], &mut [f64]) + '_ {
        move |y, dy| {
            let s = [y[0].max(0.0), y[1].max(0.0), y[2].max(0.0), y[3].max(0.0)];
            dy.copy_from_slice(&rhs_multistrain_raw(&s, self));
        }
    }
}

/// Scaled densities of the two-strain model: doubly infected, singly infected
/// with A, singly infected with B, uninfected.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct State4 {
    pub i_ab: f64,
    pub i_a: f64,
    pub i_b: f64,
    pub u: f64,
}

impl State4 {
    pub fn new(i_ab: f64, i_a: f64, i_b: f64, u: f64) -> Result<Self> {
        for v in [i_ab, i_a, i_b, u] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Domain(format!(
                    "state components must be non-negative, got ({i_ab}, {i_a}, {i_b}, {u})"
                )));
            }
        }
        Ok(Self { i_ab, i_a, i_b, u })
    }

    pub fn total(&self) -> f64 {
        self.i_ab + self.i_a + self.i_b + self.u
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.i_ab, self.i_a, self.i_b, self.u]
    }
}

/// Right-hand side of the two-strain model at `s`. The simplified compatible
/// and mutually incompatible systems are parameter restrictions of this one
/// field (see the presets on [`MultiStrainParams`]).
///
/// At the exact origin all crossing frequencies are taken to be zero and the
/// derivative is identically zero, matching the single-strain convention.
pub fn rhs_multistrain(s: State4, params: &MultiStrainParams) -> Result<[f64; 4]> {
    let y = s.as_array();
    if y.iter().any(|v| v.is_nan() || *v < 0.0) {
        return Err(Error::Domain(format!(
            "rhs_multistrain requires non-negative components, got {y:?}"
        )));
    }
    params.validate()?;
    Ok(rhs_multistrain_raw(&y, params))
}

pub(crate) fn rhs_multistrain_raw(y: &[f64; 4], pr: &MultiStrainParams) -> [f64; 4] {
    let [i_ab, i_a, i_b, u] = *y;
    let p = i_ab + i_a + i_b + u;
    if p == 0.0 {
        return [0.0; 4];
    }
    let f_ab = i_ab / p;
    let f_a = i_a / p;
    let f_b = i_b / p;
    let eta_ab = pr.eta_ab();
    // viable-offspring factors per maternal class
    let g_a = 1.0 - pr.qa_b * f_b - pr.qa_ab * f_ab;
    let g_b = 1.0 - pr.qb_a * f_a - pr.qb_ab * f_ab;
    let g_0 = 1.0 - pr.q0_a * f_a - pr.q0_b * f_b - pr.q0_ab * f_ab;
    let d_ab = pr.tau_a * pr.tau_b * i_ab - eta_ab * p * i_ab;
    let d_a = pr.tau_a * (1.0 - pr.tau_b) * i_ab + pr.tau_a * g_a * i_a - pr.eta_a * p * i_a;
    let d_b = (1.0 - pr.tau_a) * pr.tau_b * i_ab + pr.tau_b * g_b * i_b - pr.eta_b * p * i_b;
    let d_u = (1.0 - pr.tau_a) * (1.0 - pr.tau_b) * i_ab
        + (1.0 - pr.tau_a) * g_a * i_a
        + (1.0 - pr.tau_b) * g_b * i_b
        + g_0 * u
        - p * u;
    [d_ab, d_a, d_b, d_u]
}

/// Maximal drift of the strain-A share `i_A / (i_A + i_B)` along a stored
/// trajectory, relative to its initial value.
///
/// Under a simplified-compatible preset with no doubly infected individuals
/// the share is a conserved quantity, so the drift probes integrator and
/// model fidelity; with unequal costs or efficacies it measures how strongly
/// one strain displaces the other.
pub fn ratio_drift(states: &[Vec<f64>]) -> Result<f64> {
    if states.is_empty() {
        return Err(Error::Domain("ratio_drift: empty trajectory".into()));
    }
    let share = |s: &[f64]| -> Result<f64> {
        if s.len() != 4 {
            return Err(Error::Domain(format!(
                "ratio_drift expects 4-component states, got {}",
                s.len()
            )));
        }
        let denom = s[1] + s[2];
        if denom <= 0.0 {
            return Err(Error::Domain(
                "ratio_drift: i_A + i_B must stay positive".into(),
            ));
        }
        Ok(s[1] / denom)
    };
    let r0 = share(&states[0])?;
    let mut drift = 0.0f64;
    for s in &states[1..] {
        drift = drift.max((share(s)? - r0).abs());
    }
    Ok(drift)
}
