//! Scenario configuration: JSON schema, validation, and conversion into the
//! typed model parameters. Every field is validated before any computation;
//! unknown keys anywhere are rejected.

use serde::Deserialize;

use crate::agestruct::{AgeSpec, RateFunction};
use crate::error::{Error, Result};
use crate::models::{MultiStrainParams, SingleStrainParams};
use crate::odeint::IntegratorConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Single,
    SingleFecundity,
    Multistrain,
    MultistrainSimplified,
    MutuallyIncompatible,
    AgeStructured,
}

impl ModelKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ModelKind::Single => "single",
            ModelKind::SingleFecundity => "single_fecundity",
            ModelKind::Multistrain => "multistrain",
            ModelKind::MultistrainSimplified => "multistrain_simplified",
            ModelKind::MutuallyIncompatible => "mutually_incompatible",
            ModelKind::AgeStructured => "age_structured",
        }
    }
}

/// Top-level scenario file. `parameters` is validated against the schema of
/// the selected model; the remaining blocks are read by the commands that
/// need them.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub model: ModelKind,
    pub parameters: serde_json::Value,
    #[serde(default)]
    pub initial_state: Option<serde_json::Value>,
    #[serde(default)]
    pub run: Option<RunSettings>,
    #[serde(default)]
    pub outputs: Option<Outputs>,
    #[serde(default)]
    pub sweep: Option<SweepGrid>,
    #[serde(default)]
    pub window: Option<PhaseWindow>,
    #[serde(default)]
    pub analysis: Option<AnalysisSettings>,
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct RunSettings {
    #[serde(default)]
    pub t_end: Option<f64>,
    #[serde(default)]
    pub rel_tol: Option<f64>,
    #[serde(default)]
    pub abs_tol: Option<f64>,
    #[serde(default)]
    pub max_step: Option<f64>,
    #[serde(default)]
    pub conv_tol: Option<f64>,
    #[serde(default)]
    pub initial_step: Option<f64>,
    /// Age model only: store full age profiles every this many steps.
    #[serde(default)]
    pub profile_stride: Option<usize>,
}

impl RunSettings {
    pub fn integrator_config(&self) -> Result<IntegratorConfig> {
        let t_end = self
            .t_end
            .ok_or_else(|| Error::Config("run.t_end is required for simulation".into()))?;
        let mut cfg = IntegratorConfig::new(t_end);
        if let Some(v) = self.rel_tol {
            cfg.rel_tol = v;
        }
        if let Some(v) = self.abs_tol {
            cfg.abs_tol = v;
        }
        if let Some(v) = self.max_step {
            cfg.max_step = v;
        }
        if let Some(v) = self.conv_tol {
            cfg.conv_tol = v;
        }
        if let Some(v) = self.initial_step {
            cfg.initial_step = v;
        }
        Ok(cfg)
    }
}

/// Requested artifacts. Relative paths are resolved against `--out`.
/// Commands use the keys they document and fall back to fixed default names.
#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    #[serde(default)]
    pub report: Option<String>,
    #[serde(default)]
    pub timeseries: Option<String>,
    #[serde(default)]
    pub table: Option<String>,
    #[serde(default)]
    pub field: Option<String>,
    /// Prefix for per-steady-state age profile CSVs.
    #[serde(default)]
    pub profiles_prefix: Option<String>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisSpec {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl AxisSpec {
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        let step = (self.max - self.min) / (self.count - 1) as f64;
        (0..self.count)
            .map(|k| self.min + k as f64 * step)
            .collect()
    }

    fn validate(&self, name: &str, lo: f64, hi: f64, open_lo: bool) -> Result<()> {
        if self.count == 0 {
            return Err(Error::Config(format!(
                "sweep.{name}.count must be at least 1"
            )));
        }
        if self.min.partial_cmp(&self.max).is_none_or(|o| o.is_gt()) {
            return Err(Error::Config(format!(
                "sweep.{name}: min must not exceed max"
            )));
        }
        let lo_ok = if open_lo {
            self.min > lo
        } else {
            self.min >= lo
        };
        if !lo_ok || self.max > hi {
            return Err(Error::Config(format!(
                "sweep.{name} must stay within {}{lo}, {hi}]",
                if open_lo { "(" } else { "[" }
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepGrid {
    pub xi: AxisSpec,
    pub tau: AxisSpec,
    pub q: AxisSpec,
    #[serde(default)]
    pub include_equilibrium: bool,
}

impl SweepGrid {
    pub fn validate(&self) -> Result<()> {
        self.xi.validate("xi", 0.0, 1.0, true)?;
        self.tau.validate("tau", 0.0, 1.0, false)?;
        self.q.validate("q", 0.0, 1.0, false)?;
        Ok(())
    }

    pub fn total_points(&self) -> usize {
        self.xi
            .count
            .saturating_mul(self.tau.count)
            .saturating_mul(self.q.count)
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseWindow {
    pub i_min: f64,
    pub i_max: f64,
    pub u_min: f64,
    pub u_max: f64,
    pub resolution: usize,
}

impl PhaseWindow {
    pub fn validate(&self) -> Result<()> {
        if self.resolution == 0 {
            return Err(Error::Config("window.resolution must be at least 1".into()));
        }
        if self.i_min < 0.0
            || self.u_min < 0.0
            || !self.i_min.is_finite()
            || !self.u_min.is_finite()
        {
            return Err(Error::Config(
                "window must lie in the non-negative quadrant".into(),
            ));
        }
        if !(self.i_min <= self.i_max && self.u_min <= self.u_max) {
            return Err(Error::Config("window bounds must be ordered".into()));
        }
        Ok(())
    }

    pub fn samples_i(&self) -> Vec<f64> {
        axis_samples(self.i_min, self.i_max, self.resolution)
    }

    pub fn samples_u(&self) -> Vec<f64> {
        axis_samples(self.u_min, self.u_max, self.resolution)
    }
}

fn axis_samples(min: f64, max: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![min];
    }
    let step = (max - min) / (count - 1) as f64;
    (0..count).map(|k| min + k as f64 * step).collect()
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct AnalysisSettings {
    /// Newton seeds for two-strain equilibrium location.
    #[serde(default)]
    pub seeds: Vec<[f64; 4]>,
    /// Scan bound for the characteristic-root search (age model).
    #[serde(default)]
    pub lambda_max: Option<f64>,
    /// Arc-length budget per separatrix branch.
    #[serde(default)]
    pub separatrix_arc_length: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SingleCfg {
    tau: f64,
    q: f64,
    #[serde(default)]
    xi: Option<f64>,
    #[serde(default)]
    eta: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FecundityCfg {
    tau: f64,
    q: f64,
    mu: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MultistrainCfg {
    tau_a: f64,
    tau_b: f64,
    eta_a: f64,
    eta_b: f64,
    q0_a: f64,
    q0_b: f64,
    #[serde(default)]
    q0_ab: Option<f64>,
    qa_b: f64,
    qa_ab: f64,
    qb_a: f64,
    qb_ab: f64,
    /// When set, `q0_ab` is derived from the product-escape convention and
    /// must not be given explicitly.
    #[serde(default)]
    product_escape: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SimplifiedCfg {
    tau: f64,
    eta: f64,
    q0_a: f64,
    q0_b: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct IncompatibleCfg {
    tau: f64,
    eta: f64,
    q0: f64,
    qa_b: f64,
    qb_a: f64,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum RateSpec {
    Constant(f64),
    Table { knots: Vec<f64>, values: Vec<f64> },
}

impl RateSpec {
    pub fn build(&self) -> Result<RateFunction> {
        match self {
            RateSpec::Constant(v) => RateFunction::constant(*v),
            RateSpec::Table { knots, values } => RateFunction::new(knots.clone(), values.clone()),
        }
        .map_err(|e| Error::Config(e.to_string()))
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct AgeCfg {
    max_age: f64,
    cells: usize,
    tau: f64,
    q: f64,
    beta1: RateSpec,
    beta2: RateSpec,
    eta1: RateSpec,
    eta2: RateSpec,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgeInitialState {
    pub i0: RateSpec,
    pub u0: RateSpec,
}

fn from_value<T: serde::de::DeserializeOwned>(v: &serde_json::Value, what: &str) -> Result<T> {
    serde_json::from_value(v.clone()).map_err(|e| Error::Config(format!("invalid {what}: {e}")))
}

impl ScenarioConfig {
    /// Parse and structurally validate a scenario file. Parameter blocks are
    /// checked against the selected model's schema immediately.
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig = serde_json::from_str(text)
            .map_err(|e| Error::Config(format!("line {}, column {}: {e}", e.line(), e.column())))?;
        // eagerly validate the parameter block for the chosen model
        match cfg.model {
            ModelKind::Single | ModelKind::SingleFecundity => {
                cfg.single_params()?;
            }
            ModelKind::Multistrain
            | ModelKind::MultistrainSimplified
            | ModelKind::MutuallyIncompatible => {
                cfg.multistrain_params()?;
            }
            ModelKind::AgeStructured => {
                cfg.age_spec()?;
            }
        }
        if let Some(sweep) = &cfg.sweep {
            sweep.validate()?;
        }
        if let Some(window) = &cfg.window {
            window.validate()?;
        }
        Ok(cfg)
    }

    pub fn single_params(&self) -> Result<SingleStrainParams> {
        match self.model {
            ModelKind::Single => {
                let c: SingleCfg = from_value(&self.parameters, "single-model parameters")?;
                let eta = match (c.xi, c.eta) {
                    (Some(xi), None) => {
                        if !(xi.is_finite() && xi > 0.0 && xi <= 1.0) {
                            return Err(Error::Config(format!("xi must be in (0,1], got {xi}")));
                        }
                        1.0 / xi
                    }
                    (None, Some(eta)) => eta,
                    _ => {
                        return Err(Error::Config(
                            "give exactly one of parameters.xi and parameters.eta".into(),
                        ))
                    }
                };
                SingleStrainParams::mortality(c.tau, c.q, eta)
                    .map_err(|e| Error::Config(e.to_string()))
            }
            ModelKind::SingleFecundity => {
                let c: FecundityCfg = from_value(&self.parameters, "fecundity-model parameters")?;
                SingleStrainParams::fecundity(c.tau, c.q, c.mu)
                    .map_err(|e| Error::Config(e.to_string()))
            }
            _ => Err(Error::Config(format!(
                "model {} does not take single-strain parameters",
                self.model.as_str()
            ))),
        }
    }

    pub fn multistrain_params(&self) -> Result<MultiStrainParams> {
        let built = match self.model {
            ModelKind::Multistrain => {
                let c: MultistrainCfg = from_value(&self.parameters, "multistrain parameters")?;
                let q0_ab = match (c.product_escape, c.q0_ab) {
                    (true, None) => 1.0 - (1.0 - c.q0_a) * (1.0 - c.q0_b),
                    (false, Some(v)) => v,
                    (true, Some(_)) => {
                        return Err(Error::Config(
                            "q0_ab must be omitted when product_escape is set".into(),
                        ))
                    }
                    (false, None) => {
                        return Err(Error::Config(
                            "q0_ab is required unless product_escape is set".into(),
                        ))
                    }
                };
                MultiStrainParams::new(
                    c.tau_a, c.tau_b, c.eta_a, c.eta_b, c.q0_a, c.q0_b, q0_ab, c.qa_b, c.qa_ab,
                    c.qb_a, c.qb_ab,
                )
            }
            ModelKind::MultistrainSimplified => {
                let c: SimplifiedCfg = from_value(&self.parameters, "simplified-model parameters")?;
                MultiStrainParams::simplified_compatible(c.tau, c.eta, c.q0_a, c.q0_b)
            }
            ModelKind::MutuallyIncompatible => {
                let c: IncompatibleCfg =
                    from_value(&self.parameters, "mutually-incompatible parameters")?;
                MultiStrainParams::mutually_incompatible(c.tau, c.eta, c.q0, c.qa_b, c.qb_a)
            }
            _ => {
                return Err(Error::Config(format!(
                    "model {} does not take multistrain parameters",
                    self.model.as_str()
                )))
            }
        };
        built.map_err(|e| Error::Config(e.to_string()))
    }

    pub fn age_spec(&self) -> Result<AgeSpec> {
        if self.model != ModelKind::AgeStructured {
            return Err(Error::Config(format!(
                "model {} does not take age-structured parameters",
                self.model.as_str()
            )));
        }
        let c: AgeCfg = from_value(&self.parameters, "age-structured parameters")?;
        AgeSpec::new(
            c.max_age,
            c.cells,
            c.beta1.build()?,
            c.beta2.build()?,
            c.eta1.build()?,
            c.eta2.build()?,
            c.tau,
            c.q,
        )
        .map_err(|e| Error::Config(e.to_string()))
    }

    /// Initial state vector for the ODE models (length 2 or 4).
    pub fn ode_initial_state(&self, dim: usize) -> Result<Vec<f64>> {
        let v = self
            .initial_state
            .as_ref()
            .ok_or_else(|| Error::Config("initial_state is required for simulation".into()))?;
        let state: Vec<f64> = from_value(v, "initial_state")?;
        if state.len() != dim {
            return Err(Error::Config(format!(
                "initial_state must have {dim} components for this model, got {}",
                state.len()
            )));
        }
        if state.iter().any(|&x| !(x.is_finite() && x >= 0.0)) {
            return Err(Error::Config(
                "initial_state components must be non-negative".into(),
            ));
        }
        Ok(state)
    }

    pub fn age_initial_state(&self) -> Result<AgeInitialState> {
        let v = self
            .initial_state
            .as_ref()
            .ok_or_else(|| Error::Config("initial_state is required for simulation".into()))?;
        from_value(v, "age-structured initial_state")
    }
}
