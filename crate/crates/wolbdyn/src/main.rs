//! Thin command-line wrapper over the `wolbdyn::cli` module.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use wolbdyn::cli::{
    cmd_agestruct_analyze, cmd_agestruct_simulate, cmd_analyze, cmd_phasefield, cmd_simulate,
    cmd_sweep, exit_code_for, resolve_threads, CommandContext, ScenarioConfig,
};

#[derive(Parser)]
#[command(
    name = "wolbdyn",
    version,
    about = "Deterministic endosymbiont invasion dynamics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Scenario configuration file (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory for relative artifact paths.
    #[arg(long, default_value = ".", global = true)]
    out: PathBuf,

    /// Worker threads for sweeps (falls back to WOLBDYN_THREADS, then 1).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Accepted for interface compatibility; every computation is
    /// deterministic, so the value is unused.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Equilibrium / stability report (JSON).
    Analyze,
    /// Trajectory or time-series run (CSV).
    Simulate,
    /// Region map over a (xi, tau, q) grid (CSV).
    Sweep,
    /// Vector-field samples and separatrices over a window (CSV).
    Phasefield,
    /// Age-structured steady states and verdicts (JSON + profile CSVs).
    AgestructAnalyze,
    /// Age-structured transport run (CSV).
    AgestructSimulate,
}

fn run(cli: &Cli) -> wolbdyn::Result<i32> {
    let config_path = cli
        .config
        .as_ref()
        .ok_or_else(|| wolbdyn::Error::Config("--config PATH is required".into()))?;
    let text = std::fs::read_to_string(config_path).map_err(|e| {
        wolbdyn::Error::Config(format!("cannot read {}: {e}", config_path.display()))
    })?;
    let cfg = ScenarioConfig::from_json(&text)?;
    let ctx = CommandContext::new(cli.out.clone(), resolve_threads(cli.threads));
    std::fs::create_dir_all(&ctx.out_dir)?;
    match cli.command {
        Command::Analyze => cmd_analyze(&cfg, &ctx),
        Command::Simulate => cmd_simulate(&cfg, &ctx),
        Command::Sweep => cmd_sweep(&cfg, &ctx),
        Command::Phasefield => cmd_phasefield(&cfg, &ctx),
        Command::AgestructAnalyze => cmd_agestruct_analyze(&cfg, &ctx),
        Command::AgestructSimulate => cmd_agestruct_simulate(&cfg, &ctx),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e) as u8)
        }
    }
}
