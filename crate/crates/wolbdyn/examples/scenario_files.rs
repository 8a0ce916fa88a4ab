//! The config-driven command layer used by the `wolbdyn` binary, exercised
//! in-process: write a scenario file, run the analyze and sweep commands,
//! and read the artifacts back.

use wolbdyn::cli::{cmd_analyze, cmd_sweep, CommandContext, ScenarioConfig};

fn main() {
    let dir = std::env::temp_dir().join("wolbdyn_scenario_example");
    std::fs::create_dir_all(&dir).unwrap();
    let ctx = CommandContext::new(dir.clone(), 2);

    let analyze = ScenarioConfig::from_json(
        r#"{
            "model": "single",
            "parameters": {"xi": 0.9, "tau": 1.0, "q": 1.0},
            "outputs": {"report": "report.json"}
        }"#,
    )
    .unwrap();
    cmd_analyze(&analyze, &ctx).unwrap();
    let report = std::fs::read_to_string(dir.join("report.json")).unwrap();
    let value: serde_json::Value = serde_json::from_str(&report).unwrap();
    println!(
        "analyze: region {} with {} equilibria -> {}",
        value["region"],
        value["equilibria"].as_array().unwrap().len(),
        dir.join("report.json").display()
    );

    let sweep = ScenarioConfig::from_json(
        r#"{
            "model": "single",
            "parameters": {"xi": 0.9, "tau": 1.0, "q": 1.0},
            "sweep": {"xi": {"min": 0.05, "max": 1.0, "count": 20},
                      "tau": {"min": 0.0, "max": 1.0, "count": 21},
                      "q": {"min": 0.0, "max": 1.0, "count": 21}},
            "outputs": {"table": "sweep.csv"}
        }"#,
    )
    .unwrap();
    cmd_sweep(&sweep, &ctx).unwrap();
    let table = std::fs::read_to_string(dir.join("sweep.csv")).unwrap();
    let c_rows = table.lines().filter(|l| l.ends_with(",C")).count();
    println!(
        "sweep: {} grid rows, {} in region C",
        table.lines().count() - 2,
        c_rows
    );
}
