//! Configuration-driven scenario front end. The `wolbdyn` binary is a thin
//! wrapper over this module; everything here is callable as a library.
//!
//! Exit-code contract: 0 success, 2 config error, 3 integration failure,
//! 4 resource guard, 1 anything else (I/O).

mod commands;
mod config;

pub use commands::{
    cmd_agestruct_analyze, cmd_agestruct_simulate, cmd_analyze, cmd_phasefield, cmd_simulate,
    cmd_sweep, fmt_float, CommandContext, VERSION,
};
pub use config::{
    AgeInitialState, AnalysisSettings, AxisSpec, ModelKind, Outputs, PhaseWindow, RateSpec,
    RunSettings, ScenarioConfig, SweepGrid,
};

use crate::error::Error;

/// Env var consulted when `--threads` is not given.
pub const THREADS_ENV: &str = "WOLBDYN_THREADS";

/// Worker count: the explicit flag, else the `WOLBDYN_THREADS` env var,
/// else 1.
pub fn resolve_threads(flag: Option<usize>) -> usize {
    flag.or_else(|| std::env::var(THREADS_ENV).ok().and_then(|v| v.parse().ok()))
        .unwrap_or(1)
        .max(1)
}

/// Process exit code for an error, per the documented contract.
pub fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::Config(_) => 2,
        Error::Stiffness { .. } => 3,
        Error::ResourceGuard(_) => 4,
        _ => 1,
    }
}
