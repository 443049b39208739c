use std::path::Path;

use serde_json::Value;
use spinquench::runner::{parse_scenario, presets, read_series_csv, run_scenario};

const SWEEP: &str = r#"
name = "small"
initial_state = "single_island"

[model]
sites = 6
two_s = 1
h0 = 0.5

[evolution]
method = "dense"
t_max = 40
dt = 0.5

[observables]
window = [20, 40]

[[sweep]]
param = "theta"
values = [0, "pi/3", "4pi/3"]
"#;

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn csv_columns_reproduce_the_summary() {
    let dir = tempfile::tempdir().unwrap();
    let config = parse_scenario(SWEEP).unwrap();
    let report = run_scenario(&config, Some(dir.path())).unwrap();
    assert!(report.is_complete());
    let summary = read_json(&dir.path().join("small/summary.json"));
    let records = summary["records"].as_array().unwrap();
    assert_eq!(records.len(), 3);

    for record in records {
        let file = record["csv"].as_str().unwrap();
        let series = read_series_csv(&std::fs::read_to_string(dir.path().join("small").join(file)).unwrap()).unwrap();
        let initial = &series.magnetization[0];
        let norm = initial.len() as f64 * 0.25;
        let sz_total: f64 = initial.iter().sum();
        for (k, row) in series.magnetization.iter().enumerate() {
            // Recompute the imbalance from the ⟨Sᶻ_j⟩ columns.
            let imb: f64 = row.iter().zip(initial).map(|(a, b)| a * b).sum::<f64>() / norm;
            assert!((imb - series.imbalance[k]).abs() <= 1e-12);
            assert!((row.iter().sum::<f64>() - sz_total).abs() <= 1e-10);
        }
        // Plain mean over the samples inside the window.
        let inside: Vec<f64> = series
            .times
            .iter()
            .zip(&series.imbalance)
            .filter(|(t, _)| (20.0..=40.0).contains(*t))
            .map(|(_, &v)| v)
            .collect();
        let mean = inside.iter().sum::<f64>() / inside.len() as f64;
        let reported = record["imbalance_average"].as_f64().unwrap();
        assert!((mean - reported).abs() <= 1e-12, "{mean} vs {reported}");
    }
}

#[test]
fn repeated_runs_write_identical_bytes() {
    let config = parse_scenario(SWEEP).unwrap();
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    run_scenario(&config, Some(a.path())).unwrap();
    run_scenario(&config, Some(b.path())).unwrap();
    for k in 0..3 {
        let name = format!("small/point_{k:03}.csv");
        let x = std::fs::read(a.path().join(&name)).unwrap();
        let y = std::fs::read(b.path().join(&name)).unwrap();
        assert!(x == y, "{name} differs between runs");
    }
}

#[test]
fn failing_point_is_recorded_and_others_finish() {
    let text = r#"
name = "partial"
initial_state = "single_island"
[model]
sites = 4
two_s = 1
[evolution]
method = "dense"
t_max = 10
dt = 1
[observables]
window = [5, 10]
[limits]
dense = 20
[[sweep]]
param = "sites"
values = [4, 8]
"#;
    let dir = tempfile::tempdir().unwrap();
    let config = parse_scenario(text).unwrap();
    let report = run_scenario(&config, Some(dir.path())).unwrap();
    assert_eq!(report.records.len(), 1);
    assert_eq!(report.failures.len(), 1);
    assert_eq!(report.failures[0].index, 1);
    assert!(dir.path().join("partial/point_000.csv").exists());
    assert!(!dir.path().join("partial/point_001.csv").exists());
    let errors = read_json(&dir.path().join("partial/errors.json"));
    assert_eq!(errors["failures"][0]["index"], 1);
    assert!(errors["failures"][0]["error"].as_str().unwrap().contains("dense"));
}

#[test]
fn frozen_preset_keeps_its_initial_pattern() {
    let config = presets::load("trivial").unwrap();
    let report = run_scenario(&config, None).unwrap();
    let record = &report.records[0];
    assert!(record.series.imbalance.iter().all(|&v| (v - 1.0).abs() < 1e-12));
    assert!(record.series.entropy.iter().all(|&s| s.abs() < 1e-10));
}
