//! The scenario commands behind the `wolbdyn` binary: equilibrium/stability
//! reports, trajectory runs, parameter sweeps, phase-field sampling, and the
//! age-structured analyses. All outputs are deterministic: identical configs
//! give byte-identical files apart from nothing (the version header is part
//! of the bytes and changes only with the crate version).

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::{ModelKind, ScenarioConfig};
use crate::agestruct::{
    complete_transmission_instability, disease_free_instability, evaluate_characteristic,
    instability_check, sample_profile, simulate_pde, solve_disease_free,
    solve_positive_steady_states, trivial_stability, QuadraticCoefficients, StabilityVerdict,
    SteadyStateProfile,
};
use crate::equilibria::{
    admissible_larger_root, multistrain_equilibrium, region_classify, region_classify_raw,
    saddle_separatrix, single_equilibria, single_equilibria_fecundity, Classification,
    EquilibriumReport, RegionLabel,
};
use crate::error::{Error, Result};
use crate::models::{CostMode, State4};
use crate::odeint::{integrate, TerminalFlag, Trajectory};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Where outputs go and how many workers a sweep may use.
#[derive(Debug, Clone)]
pub struct CommandContext {
    pub out_dir: PathBuf,
    pub threads: usize,
}

impl CommandContext {
    pub fn new(out_dir: PathBuf, threads: usize) -> Self {
        Self {
            out_dir,
            threads: threads.max(1),
        }
    }

    fn resolve(&self, path: &str) -> PathBuf {
        let p = Path::new(path);
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.out_dir.join(p)
        }
    }

    fn writer(&self, path: &str) -> Result<BufWriter<File>> {
        let full = self.resolve(path);
        if let Some(parent) = full.parent() {
            if !parent.as_os_str().is_empty() {
                std::fs::create_dir_all(parent)?;
            }
        }
        Ok(BufWriter::new(File::create(full)?))
    }
}

/// 17-significant-digit decimal float, locale independent, round-trip exact.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_json<T: Serialize>(ctx: &CommandContext, path: &str, value: &T) -> Result<()> {
    let mut w = ctx.writer(path)?;
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Config(format!("serialization failed: {e}")))?;
    w.write_all(text.as_bytes())?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

// ---------------------------------------------------------------------------
// analyze
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct OdeAnalyzeReport {
    version: &'static str,
    model: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    region: Option<RegionLabel>,
    equilibria: Vec<EquilibriumReport>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    seed_results: Vec<SeedOutcome>,
}

#[derive(Serialize)]
struct SeedOutcome {
    seed: [f64; 4],
    status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    report: Option<EquilibriumReport>,
}

/// Equilibrium/stability report as JSON. Exit code 0; nonexistence of a
/// steady state is data, not an error.
pub fn cmd_analyze(cfg: &ScenarioConfig, ctx: &CommandContext) -> Result<i32> {
    let path = cfg
        .outputs
        .as_ref()
        .and_then(|o| o.report.clone())
        .unwrap_or_else(|| "report.json".into());
    match cfg.model {
        ModelKind::Single => {
            let params = cfg.single_params()?;
            let report = OdeAnalyzeReport {
                version: VERSION,
                model: cfg.model.as_str(),
                region: Some(region_classify(params.xi(), params.tau, params.q)?),
                equilibria: single_equilibria(&params)?,
                seed_results: Vec::new(),
            };
            write_json(ctx, &path, &report)?;
        }
        ModelKind::SingleFecundity => {
            let params = cfg.single_params()?;
            let report = OdeAnalyzeReport {
                version: VERSION,
                model: cfg.model.as_str(),
                region: None,
                equilibria: single_equilibria_fecundity(&params)?,
                seed_results: Vec::new(),
            };
            write_json(ctx, &path, &report)?;
        }
        ModelKind::Multistrain
        | ModelKind::MultistrainSimplified
        | ModelKind::MutuallyIncompatible => {
            let params = cfg.multistrain_params()?;
            let disease_free = multistrain_equilibrium(
                &params,
                State4::new(0.0, 0.0, 0.0, 1.0).map_err(|e| Error::Config(e.to_string()))?,
            )?;
            let equilibria = vec![disease_free];
            let mut seed_results = Vec::new();
            if let Some(analysis) = &cfg.analysis {
                for &seed in &analysis.seeds {
                    let state = State4::new(seed[0], seed[1], seed[2], seed[3])
                        .map_err(|e| Error::Config(format!("invalid seed: {e}")))?;
                    match multistrain_equilibrium(&params, state) {
                        Ok(report) => seed_results.push(SeedOutcome {
                            seed,
                            status: "converged".into(),
                            report: Some(report),
                        }),
                        Err(e) => seed_results.push(SeedOutcome {
                            seed,
                            status: e.to_string(),
                            report: None,
                        }),
                    }
                }
            }
            let report = OdeAnalyzeReport {
                version: VERSION,
                model: cfg.model.as_str(),
                region: None,
                equilibria,
                seed_results,
            };
            write_json(ctx, &path, &report)?;
        }
        ModelKind::AgeStructured => {
            return cmd_agestruct_analyze(cfg, ctx);
        }
    }
    Ok(0)
}

// ---------------------------------------------------------------------------
// agestruct-analyze
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct AgeAnalyzeReport {
    version: &'static str,
    model: &'static str,
    trivial_stability: StabilityVerdict,
    disease_free: SteadyStateSection,
    positive: PositiveSection,
}

#[derive(Serialize)]
struct SteadyStateSection {
    status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    reason: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    u_total: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    instability: Option<StabilityVerdict>,
}

#[derive(Serialize)]
struct PositiveSection {
    status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    reason: Option<String>,
    states: Vec<PositiveStateReport>,
}

#[derive(Serialize)]
struct PositiveStateReport {
    i_total: f64,
    u_total: f64,
    i0: f64,
    u0: f64,
    coefficients: QuadraticCoefficients,
    k_at_zero: f64,
    instability: StabilityVerdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    complete_transmission: Option<StabilityVerdict>,
}

fn write_profile_csv(
    ctx: &CommandContext,
    path: &str,
    da: f64,
    ss: &SteadyStateProfile,
) -> Result<()> {
    let mut w = ctx.writer(path)?;
    writeln!(w, "# wolbdyn {VERSION}")?;
    writeln!(w, "age,i_star,u_star")?;
    for (k, (i, u)) in ss.i_profile.iter().zip(&ss.u_profile).enumerate() {
        writeln!(
            w,
            "{},{},{}",
            fmt_float(k as f64 * da),
            fmt_float(*i),
            fmt_float(*u)
        )?;
    }
    w.flush()?;
    Ok(())
}

/// Age-structured steady states and stability verdicts as JSON, with one
/// profile CSV per located steady state.
pub fn cmd_agestruct_analyze(cfg: &ScenarioConfig, ctx: &CommandContext) -> Result<i32> {
    if cfg.model != ModelKind::AgeStructured {
        return Err(Error::Config(format!(
            "agestruct-analyze requires model = age_structured, got {}",
            cfg.model.as_str()
        )));
    }
    let spec = cfg.age_spec()?;
    let outputs = cfg.outputs.clone().unwrap_or_default();
    let report_path = outputs.report.unwrap_or_else(|| "report.json".into());
    let prefix = outputs.profiles_prefix.unwrap_or_else(|| "profiles".into());
    let lambda_max = cfg
        .analysis
        .as_ref()
        .and_then(|a| a.lambda_max)
        .unwrap_or(10.0 / spec.max_age);
    if !(lambda_max.is_finite() && lambda_max > 0.0) {
        return Err(Error::Config("analysis.lambda_max must be positive".into()));
    }

    let trivial = trivial_stability(&spec);

    let disease_free = match solve_disease_free(&spec) {
        Ok(ss) => {
            write_profile_csv(ctx, &format!("{prefix}_disease_free.csv"), spec.da(), &ss)?;
            let instability = disease_free_instability(&spec)?;
            SteadyStateSection {
                status: "exists",
                reason: None,
                u_total: Some(ss.u_total),
                instability: Some(instability),
            }
        }
        Err(Error::Nonexistence(reason)) | Err(Error::Divergence(reason)) => SteadyStateSection {
            status: "nonexistent",
            reason: Some(reason),
            u_total: None,
            instability: None,
        },
        Err(e) => return Err(e),
    };

    let positive = match solve_positive_steady_states(&spec) {
        Ok(states) => {
            let mut reports = Vec::with_capacity(states.len());
            for (idx, ss) in states.iter().enumerate() {
                write_profile_csv(ctx, &format!("{prefix}_positive_{idx}.csv"), spec.da(), ss)?;
                let k0 = evaluate_characteristic(0.0, ss, &spec)?;
                let instability = instability_check(ss, &spec, lambda_max)?;
                let complete = if (spec.tau - 1.0).abs() <= 1e-12 && ss.is_strictly_positive() {
                    Some(complete_transmission_instability(ss, &spec)?)
                } else {
                    None
                };
                reports.push(PositiveStateReport {
                    i_total: ss.i_total,
                    u_total: ss.u_total,
                    i0: ss.i0,
                    u0: ss.u0,
                    coefficients: ss.coefficients.expect("positive states carry coefficients"),
                    k_at_zero: k0,
                    instability,
                    complete_transmission: complete,
                });
            }
            PositiveSection {
                status: "exists",
                reason: None,
                states: reports,
            }
        }
        Err(Error::Nonexistence(reason)) | Err(Error::Divergence(reason)) => PositiveSection {
            status: "nonexistent",
            reason: Some(reason),
            states: Vec::new(),
        },
        Err(e) => return Err(e),
    };

    let report = AgeAnalyzeReport {
        version: VERSION,
        model: "age_structured",
        trivial_stability: trivial,
        disease_free,
        positive,
    };
    write_json(ctx, &report_path, &report)?;
    Ok(0)
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

fn write_trajectory_csv(
    ctx: &CommandContext,
    path: &str,
    header: &str,
    traj: &Trajectory,
    terminal_override: Option<&str>,
) -> Result<()> {
    let mut w = ctx.writer(path)?;
    writeln!(w, "# wolbdyn {VERSION}")?;
    writeln!(w, "{header}")?;
    for (t, state) in traj.times.iter().zip(&traj.states) {
        let mut row = fmt_float(*t);
        for v in state {
            row.push(',');
            row.push_str(&fmt_float(*v));
        }
        writeln!(w, "{row}")?;
    }
    let terminal = terminal_override.unwrap_or(match traj.terminal {
        TerminalFlag::ReachedHorizon => "reached_horizon",
        TerminalFlag::Converged => "converged",
        TerminalFlag::BlowUp => "blow_up",
    });
    writeln!(w, "# terminal: {terminal}")?;
    w.flush()?;
    Ok(())
}

/// Trajectory / time-series CSV. Exit code 3 on stiffness or blow-up, with
/// the accepted prefix of the run preserved in the output file.
pub fn cmd_simulate(cfg: &ScenarioConfig, ctx: &CommandContext) -> Result<i32> {
    let run = cfg.run.clone().unwrap_or_default();
    let path = cfg
        .outputs
        .as_ref()
        .and_then(|o| o.timeseries.clone())
        .unwrap_or_else(|| "timeseries.csv".into());
    match cfg.model {
        ModelKind::Single | ModelKind::SingleFecundity => {
            let params = cfg.single_params()?;
            let y0 = cfg.ode_initial_state(2)?;
            let icfg = run.integrator_config()?;
            match integrate(params.vector_field(), &y0, &icfg) {
                Ok(traj) => {
                    write_trajectory_csv(ctx, &path, "t,i,u", &traj, None)?;
                    Ok(if traj.terminal == TerminalFlag::BlowUp {
                        3
                    } else {
                        0
                    })
                }
                Err(Error::Stiffness { t, partial }) => {
                    write_trajectory_csv(ctx, &path, "t,i,u", &partial, Some("stiffness"))?;
                    eprintln!("integration stalled at t = {t}; partial output preserved");
                    Ok(3)
                }
                Err(e) => Err(e),
            }
        }
        ModelKind::Multistrain
        | ModelKind::MultistrainSimplified
        | ModelKind::MutuallyIncompatible => {
            let params = cfg.multistrain_params()?;
            let y0 = cfg.ode_initial_state(4)?;
            let icfg = run.integrator_config()?;
            let header = "t,i_ab,i_a,i_b,u";
            match integrate(params.vector_field(), &y0, &icfg) {
                Ok(traj) => {
                    write_trajectory_csv(ctx, &path, header, &traj, None)?;
                    Ok(if traj.terminal == TerminalFlag::BlowUp {
                        3
                    } else {
                        0
                    })
                }
                Err(Error::Stiffness { t, partial }) => {
                    write_trajectory_csv(ctx, &path, header, &partial, Some("stiffness"))?;
                    eprintln!("integration stalled at t = {t}; partial output preserved");
                    Ok(3)
                }
                Err(e) => Err(e),
            }
        }
        ModelKind::AgeStructured => cmd_agestruct_simulate(cfg, ctx),
    }
}

/// Age-structured transport run; emits a `(t, I, U)` CSV.
pub fn cmd_agestruct_simulate(cfg: &ScenarioConfig, ctx: &CommandContext) -> Result<i32> {
    if cfg.model != ModelKind::AgeStructured {
        return Err(Error::Config(format!(
            "agestruct-simulate requires model = age_structured, got {}",
            cfg.model.as_str()
        )));
    }
    let spec = cfg.age_spec()?;
    let run = cfg.run.clone().unwrap_or_default();
    let t_end = run
        .t_end
        .ok_or_else(|| Error::Config("run.t_end is required for simulation".into()))?;
    if !(t_end.is_finite() && t_end > 0.0) {
        return Err(Error::Config(format!(
            "run.t_end must be positive, got {t_end}"
        )));
    }
    let steps = (t_end / spec.da()).round().max(1.0) as usize;
    let stride = run.profile_stride.unwrap_or_else(|| (steps / 100).max(1));
    let init = cfg.age_initial_state()?;
    let i0 = sample_profile(&spec, &init.i0.build()?);
    let u0 = sample_profile(&spec, &init.u0.build()?);
    let series = simulate_pde(&spec, &i0, &u0, t_end, stride).map_err(|e| match e {
        Error::Domain(msg) => Error::Config(msg),
        other => other,
    })?;
    let path = cfg
        .outputs
        .as_ref()
        .and_then(|o| o.timeseries.clone())
        .unwrap_or_else(|| "timeseries.csv".into());
    let mut w = ctx.writer(&path)?;
    writeln!(w, "# wolbdyn {VERSION}")?;
    writeln!(w, "t,I,U")?;
    for ((t, i), u) in series
        .times
        .iter()
        .zip(&series.i_totals)
        .zip(&series.u_totals)
    {
        writeln!(w, "{},{},{}", fmt_float(*t), fmt_float(*i), fmt_float(*u))?;
    }
    writeln!(w, "# terminal: reached_horizon")?;
    w.flush()?;
    Ok(0)
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

const SWEEP_POINT_LIMIT: usize = 10_000_000;

/// Region-map CSV over a `(xi, tau, q)` grid, rows in lexicographic grid
/// order (xi outer, q inner) independent of worker count.
pub fn cmd_sweep(cfg: &ScenarioConfig, ctx: &CommandContext) -> Result<i32> {
    let sweep = cfg
        .sweep
        .ok_or_else(|| Error::Config("sweep block is required for the sweep command".into()))?;
    sweep.validate()?;
    let total = sweep.total_points();
    if total > SWEEP_POINT_LIMIT {
        return Err(Error::ResourceGuard(format!(
            "sweep grid has {total} points, above the {SWEEP_POINT_LIMIT} limit"
        )));
    }
    let xis = sweep.xi.values();
    let taus = sweep.tau.values();
    let qs = sweep.q.values();
    let with_eq = sweep.include_equilibrium;

    let mut rows: Vec<(RegionLabel, Option<(f64, f64)>)> = vec![(RegionLabel::A, None); total];
    let n_tau = taus.len();
    let n_q = qs.len();
    let fill = |slot: &mut (RegionLabel, Option<(f64, f64)>), flat: usize| {
        let xi = xis[flat / (n_tau * n_q)];
        let tau = taus[(flat / n_q) % n_tau];
        let q = qs[flat % n_q];
        let label = region_classify_raw(xi, tau, q);
        let extra = if with_eq && label == RegionLabel::C {
            admissible_larger_root(xi, tau, q)
        } else {
            None
        };
        *slot = (label, extra);
    };
    let workers = ctx.threads.min(total.max(1));
    if workers <= 1 {
        for (flat, slot) in rows.iter_mut().enumerate() {
            fill(slot, flat);
        }
    } else {
        let chunk = total.div_ceil(workers);
        std::thread::scope(|scope| {
            for (w, piece) in rows.chunks_mut(chunk).enumerate() {
                let fill = &fill;
                scope.spawn(move || {
                    for (off, slot) in piece.iter_mut().enumerate() {
                        fill(slot, w * chunk + off);
                    }
                });
            }
        });
    }

    let path = cfg
        .outputs
        .as_ref()
        .and_then(|o| o.table.clone())
        .unwrap_or_else(|| "sweep.csv".into());
    let mut w = ctx.writer(&path)?;
    writeln!(w, "# wolbdyn {VERSION}")?;
    if with_eq {
        writeln!(w, "xi,tau,q,region,i2,u2")?;
    } else {
        writeln!(w, "xi,tau,q,region")?;
    }
    for (flat, (label, extra)) in rows.iter().enumerate() {
        let xi = xis[flat / (n_tau * n_q)];
        let tau = taus[(flat / n_q) % n_tau];
        let q = qs[flat % n_q];
        if with_eq {
            let (i2, u2) = match extra {
                Some((i2, u2)) => (fmt_float(*i2), fmt_float(*u2)),
                None => (String::new(), String::new()),
            };
            writeln!(
                w,
                "{},{},{},{},{},{}",
                fmt_float(xi),
                fmt_float(tau),
                fmt_float(q),
                label.as_str(),
                i2,
                u2
            )?;
        } else {
            writeln!(
                w,
                "{},{},{},{}",
                fmt_float(xi),
                fmt_float(tau),
                fmt_float(q),
                label.as_str()
            )?;
        }
    }
    w.flush()?;
    Ok(0)
}

// ---------------------------------------------------------------------------
// phasefield
// ---------------------------------------------------------------------------

/// Vector-field samples over a rectangular window plus separatrix polylines,
/// one CSV. Sample rows carry the derivative and its signs; separatrix rows
/// are tagged `sep<k>` and leave the derivative columns empty.
pub fn cmd_phasefield(cfg: &ScenarioConfig, ctx: &CommandContext) -> Result<i32> {
    let window = cfg.window.ok_or_else(|| {
        Error::Config("window block is required for the phasefield command".into())
    })?;
    window.validate()?;
    let params = match cfg.model {
        ModelKind::Single | ModelKind::SingleFecundity => cfg.single_params()?,
        other => {
            return Err(Error::Config(format!(
                "phasefield supports the single-strain models, got {}",
                other.as_str()
            )))
        }
    };
    let arc_length = cfg
        .analysis
        .as_ref()
        .and_then(|a| a.separatrix_arc_length)
        .unwrap_or(2.0);
    if !(arc_length.is_finite() && arc_length > 0.0) {
        return Err(Error::Config(
            "analysis.separatrix_arc_length must be positive".into(),
        ));
    }

    let field = params.vector_field();
    let path = cfg
        .outputs
        .as_ref()
        .and_then(|o| o.field.clone())
        .unwrap_or_else(|| "phasefield.csv".into());
    let mut w = ctx.writer(&path)?;
    writeln!(w, "# wolbdyn {VERSION}")?;
    writeln!(w, "record,i,u,di,du,sign_di,sign_du")?;
    let sign = |x: f64| -> i8 {
        if x > 0.0 {
            1
        } else if x < 0.0 {
            -1
        } else {
            0
        }
    };
    let mut dy = [0.0f64; 2];
    for &i in &window.samples_i() {
        for &u in &window.samples_u() {
            field(&[i, u], &mut dy);
            writeln!(
                w,
                "sample,{},{},{},{},{},{}",
                fmt_float(i),
                fmt_float(u),
                fmt_float(dy[0]),
                fmt_float(dy[1]),
                sign(dy[0]),
                sign(dy[1])
            )?;
        }
    }

    let reports = match params.cost_mode {
        CostMode::Mortality => single_equilibria(&params)?,
        CostMode::Fecundity => single_equilibria_fecundity(&params)?,
    };
    for (k, report) in reports
        .iter()
        .filter(|r| r.classification == Classification::Saddle)
        .enumerate()
    {
        let polyline = saddle_separatrix(&params, report, arc_length)?;
        for pt in polyline {
            writeln!(w, "sep{k},{},{},,,,", fmt_float(pt[0]), fmt_float(pt[1]))?;
        }
    }
    w.flush()?;
    Ok(0)
}
