//! Acceptance gate: one verdict line per criterion.
//!
//! Runs as a plain binary (no libtest harness) so that every line is printed even
//! when `cargo test` captures output. Exits non-zero if any criterion fails.

use std::path::Path;
use std::process::ExitCode;

use gibbslab::harness::suites::{self, Check, SuiteReport, SUITES};
use gibbslab::harness::{run_experiment, ExperimentConfig};

/// Runs the config twice to the same output prefix, as two `gibbslab run`
/// invocations would, and compares the files on disk.
fn written_reports_identical(dir: &Path) -> Result<Check, String> {
    let prefix = dir.join("report");
    let config = ExperimentConfig::from_json(&format!(
        r#"{{
            "experiment": {{"kind": "violation", "bound": "kl"}},
            "space": {{"generator": "random_loss_table", "hypotheses": 64, "atoms": 16}},
            "n": 50, "beta_grid": [10.0, 50.0, 500.0], "delta": 0.05, "trials": 500,
            "master_seed": 20240611, "output_path": "{}"
        }}"#,
        prefix.display()
    ))
    .map_err(|e| e.to_string())?;
    let mut seen = Vec::new();
    for _ in 0..2 {
        let outcome = run_experiment(&config).map_err(|e| e.to_string())?;
        let (csv, json) = outcome.write(&config).map_err(|e| e.to_string())?;
        let read = |p: &Path| std::fs::read(p).map_err(|e| e.to_string());
        seen.push((read(&csv)?, read(&json)?));
    }
    Ok(Check {
        label: "written CSV and JSON files byte-identical across runs".into(),
        passed: seen[0] == seen[1] && !seen[0].0.is_empty(),
        detail: format!("{} + {} bytes", seen[0].0.len(), seen[0].1.len()),
    })
}

fn main() -> ExitCode {
    let mut failed = Vec::new();
    for (id, ..) in SUITES {
        let mut report: SuiteReport = match suites::run_suite(id) {
            Ok(mut r) => r.remove(0),
            Err(e) => {
                println!("FAIL {id}: error: {e}");
                failed.push(*id);
                continue;
            }
        };
        if *id == "c11" {
            let dir = tempfile::tempdir().expect("temporary directory");
            report
                .checks
                .push(written_reports_identical(dir.path()).unwrap_or_else(|e| Check {
                    label: "written reports".into(),
                    passed: false,
                    detail: e,
                }));
        }
        for line in report.lines() {
            println!("{line}");
        }
        if !report.passed() {
            failed.push(*id);
        }
    }
    println!(
        "acceptance: {} of {} criteria passed{}",
        SUITES.len() - failed.len(),
        SUITES.len(),
        if failed.is_empty() {
            String::new()
        } else {
            format!("; failed: {}", failed.join(", "))
        }
    );
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
