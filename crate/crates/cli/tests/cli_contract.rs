mod support;

use std::fs;

use infersched::Catalog;
use serde_json::Value;
use support::{run, run_ok};

fn code(args: &[&str]) -> i32 {
    run(args).status.code().expect("exit code")
}

fn read_json(path: &std::path::Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn solve_toy_with_naive() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let toy = support::repo_root().join("crates/cli/tests/fixtures/toy_instance.json");
    let result = run(&["solve", "--scheme", "naive", "--instance", toy.to_str().unwrap(), "--out", out]);
    assert_eq!(result.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&result.stdout).contains("objective 1.4"));
    let json = read_json(&dir.path().join("solve.json"));
    assert_eq!(json["objective"], serde_json::json!(1.4));
    assert_eq!(json["genes"], serde_json::json!([1, 2]));
    assert_eq!(json["feasible"], Value::Bool(true));
}

#[test]
fn infeasible_solve_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("tight.json");
    fs::write(&inst, r#"{"jobs":[{"id":1,"size_mb":1.0}],"constraints":{"time_budget_ms":1,"energy_budget":100}}"#)
        .unwrap();
    for scheme in ["naive", "lgsto", "pso"] {
        let out = dir.path().join(scheme);
        let c =
            code(&["solve", "--scheme", scheme, "--instance", inst.to_str().unwrap(), "--out", out.to_str().unwrap()]);
        assert_eq!(c, 2, "{scheme}");
        let json = read_json(&out.join("solve.json"));
        assert_eq!(json["feasible"], Value::Bool(false));
        assert_eq!(json["objective"], Value::Null);
    }
}

#[test]
fn simulate_writes_one_row_per_slot_and_scheme() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    run_ok(&["simulate", "--slots", "6", "--schemes", "lgsto,dp,pso", "--out", out]);
    let csv = fs::read_to_string(dir.path().join("slots.csv")).unwrap();
    assert_eq!(csv.lines().count(), 6 * 3 + 1);
    assert_eq!(
        csv.lines().next().unwrap(),
        "slot,scheme,est_time_ms,est_energy,real_time_ms,real_energy,avg_accuracy,sched_time_ms,feasible"
    );
    let summary = read_json(&dir.path().join("summary.json"));
    assert_eq!(summary["metadata"]["constraints"]["time_budget_ms"], serde_json::json!(350.0));
    assert_eq!(summary["metadata"]["constraints"]["energy_budget"], serde_json::json!(100.0));
    for scheme in ["lgsto", "dp", "pso"] {
        let s = &summary["schemes"][scheme];
        for key in [
            "average_accuracy",
            "average_power",
            "average_inference_time_ms",
            "average_scheduling_time_ms",
            "total_time_ms",
        ] {
            assert!(s[key].is_number(), "{scheme}.{key}");
        }
    }
    let diff = fs::read_to_string(dir.path().join("accuracy_diff.csv")).unwrap();
    assert_eq!(diff.lines().count(), 6 * 2 + 1);
}

#[test]
fn unknown_scheme_lists_valid_names() {
    let out = run(&["simulate", "--schemes", "lgsto,tabu", "--slots", "1"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("tabu") && err.contains("nsga2") && err.contains("aco"), "{err}");
    assert_eq!(code(&["solve", "--scheme", "tabu"]), 1);
}

#[test]
fn config_errors_exit_one_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(&cfg, "{\n  \"slots\": 2,\n  \"budget\": 5\n}\n").unwrap();
    let out = run(&["--config", cfg.to_str().unwrap(), "simulate"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("run.json:3:") && err.contains("budget"), "{err}");

    fs::write(&cfg, r#"{"catalog_path": "missing.json"}"#).unwrap();
    assert_eq!(code(&["--config", cfg.to_str().unwrap(), "simulate", "--slots", "1"]), 1);
    assert_eq!(code(&["solve", "--pop", "1"]), 1);
    assert_eq!(code(&["frobnicate"]), 1);
}

#[test]
fn sweep_grid_and_bad_ranges() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    run_ok(&[
        "sweep",
        "--axis",
        "time",
        "--from",
        "100",
        "--to",
        "600",
        "--step",
        "50",
        "--fixed-energy",
        "20",
        "--slots",
        "2",
        "--out",
        out,
    ]);
    let csv = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 11 * 4 + 1);
    assert_eq!(csv.lines().next().unwrap(), "constraint_value,model_id,count");
    assert_eq!(code(&["sweep", "--axis", "time", "--from", "100", "--to", "600", "--step", "0"]), 1);
    assert_eq!(code(&["sweep", "--axis", "time", "--from", "600", "--to", "100", "--step", "50"]), 1);
    assert_eq!(code(&["sweep", "--axis", "sideways", "--from", "1", "--to", "2", "--step", "1"]), 1);
}

#[test]
fn gen_writes_table_sizes_and_a_parsable_catalog() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    run_ok(&["gen", "--out", out]);
    let sizes = fs::read_to_string(dir.path().join("sizes.txt")).unwrap();
    assert_eq!(sizes.lines().count(), 3923);
    assert!(sizes.lines().all(|l| l.parse::<f64>().unwrap() > 0.0));
    let text = fs::read_to_string(dir.path().join("catalog.json")).unwrap();
    let catalog: Catalog = serde_json::from_str(&text).unwrap();
    assert_eq!(catalog.len(), 4);
    let remote = &catalog.models()[catalog.remote_index().unwrap()];
    assert_eq!(remote.name.as_deref(), Some("resnext101"));
    assert_eq!(remote.avg_accuracy, 87.05788745);
    assert_eq!(serde_json::to_string_pretty(&catalog).unwrap() + "\n", text);

    // The written files feed straight back in.
    let cfg = dir.path().join("run.json");
    fs::write(
        &cfg,
        r#"{"catalog_path": "catalog.json", "workload": {"size_distribution": {"file": "sizes.txt"}}, "slots": 2, "schemes": ["dp"]}"#,
    )
    .unwrap();
    run_ok(&["--config", cfg.to_str().unwrap(), "simulate", "--out", dir.path().join("sim").to_str().unwrap()]);
}

#[test]
fn unwritable_output_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    assert_eq!(code(&["gen", "--count", "3", "--out", blocker.join("sub").to_str().unwrap()]), 1);
}
