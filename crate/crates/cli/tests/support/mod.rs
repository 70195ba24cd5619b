//! Running the binary and masking wall-clock fields out of its outputs.

#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

pub const BIN: &str = env!("CARGO_BIN_EXE_infersched");

pub fn repo_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..").canonicalize().unwrap()
}

pub fn config_path(name: &str) -> PathBuf {
    repo_root().join("configs").join(name)
}

pub fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).env_remove("INFERSCHED_LOG").output().expect("binary runs")
}

pub fn run_ok(args: &[&str]) -> Output {
    let out = run(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    out
}

const TIMING_KEYS: [&str; 5] = [
    "sched_time_ms",
    "average_scheduling_time_ms",
    "median_scheduling_time_ms",
    "scheduling_time_variance",
    "total_time_ms",
];

fn mask_value(v: &mut Value) {
    match v {
        Value::Object(map) => {
            for (k, inner) in map.iter_mut() {
                if TIMING_KEYS.contains(&k.as_str()) {
                    *inner = Value::String("<timing>".into());
                } else {
                    mask_value(inner);
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(mask_value),
        _ => {}
    }
}

/// Replaces every timing column of a CSV with `*`.
fn mask_csv(text: &str) -> String {
    let mut lines = text.lines();
    let Some(header) = lines.next() else { return String::new() };
    let masked: Vec<usize> =
        header.split(',').enumerate().filter(|(_, h)| TIMING_KEYS.contains(h)).map(|(i, _)| i).collect();
    let mut out = format!("{header}\n");
    for line in lines {
        let cells: Vec<&str> =
            line.split(',').enumerate().map(|(i, c)| if masked.contains(&i) { "*" } else { c }).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// File contents with wall-clock fields removed; everything else byte for byte.
pub fn masked(path: &Path) -> String {
    let text = fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    match path.extension().and_then(|e| e.to_str()) {
        Some("json") => {
            let mut v: Value = serde_json::from_str(&text).unwrap();
            mask_value(&mut v);
            serde_json::to_string_pretty(&v).unwrap() + "\n"
        }
        Some("csv") => mask_csv(&text),
        _ => text,
    }
}

pub struct GoldenCase {
    pub name: &'static str,
    pub args: Vec<String>,
    pub files: &'static [&'static str],
}

/// Small deterministic runs of every subcommand. `{out}` is replaced by the output dir.
pub fn golden_cases() -> Vec<GoldenCase> {
    let toy = repo_root().join("crates/cli/tests/fixtures/toy_instance.json").display().to_string();
    let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
    vec![
        GoldenCase {
            name: "solve_toy",
            args: s(&["solve", "--scheme", "lgsto", "--seed", "7", "--instance", &toy]),
            files: &["solve.json"],
        },
        GoldenCase { name: "solve_slot", args: s(&["solve", "--scheme", "dp", "--seed", "3"]), files: &["solve.json"] },
        GoldenCase {
            name: "simulate",
            args: s(&[
                "simulate",
                "--schemes",
                "lgsto,dp,ga-gp,ga-cr,nsga2,pso,aco,naive",
                "--slots",
                "4",
                "--seed",
                "11",
            ]),
            files: &["slots.csv", "summary.json", "accuracy_diff.csv"],
        },
        GoldenCase {
            name: "sweep",
            args: s(&[
                "sweep",
                "--axis",
                "energy",
                "--from",
                "5",
                "--to",
                "50",
                "--step",
                "15",
                "--fixed-time",
                "500",
                "--slots",
                "3",
                "--seed",
                "5",
            ]),
            files: &["sweep.csv"],
        },
        GoldenCase {
            name: "gen",
            args: s(&["gen", "--count", "25", "--seed", "2"]),
            files: &["sizes.txt", "catalog.json"],
        },
    ]
}

/// Runs a case into `out` and returns `(file, masked contents)` pairs.
pub fn run_case(case: &GoldenCase, out: &Path) -> Vec<(String, String)> {
    let mut args: Vec<String> = case.args.clone();
    args.push("--out".into());
    args.push(out.display().to_string());
    let refs: Vec<&str> = args.iter().map(String::as_str).collect();
    run_ok(&refs);
    case.files.iter().map(|f| (f.to_string(), masked(&out.join(f)))).collect()
}

pub fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}
