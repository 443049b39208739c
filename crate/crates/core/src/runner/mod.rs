//! Scenario files, sweeps and persisted artifacts.
//!
//! A scenario is a TOML document with a `[model]` block, an `initial_state`,
//! optional `[evolution]`, `[observables]`, `[limits]`, `[scaling]` and `[hp]`
//! blocks, and any number of `[[sweep]]` axes. See the presets for examples.

mod config;
mod initial;
mod output;
pub mod presets;
mod run;

pub use config::{
    parse_expression, parse_scenario, Couplings, EvolutionSpec, HpSpec, Limits, ModelSpec, ObservableSpec,
    PointSpec, Scalar, ScalingSpec, ScenarioConfig, SweepAxis, Task, TimeSpec,
};
pub use initial::{build_initial_state, InitialSpec};
pub use output::{read_series_csv, series_csv};
pub use run::{
    dos_point, dos_report, export_operator, hp_report, linear_fit, run_point, run_scenario, scaling_study,
    scenario_dir, DegenerateGroup, DosRecord, DosReport, HpReport, PointFailure, RunRecord, ScalingCase,
    ScalingReport, ScalingRow, ScenarioReport,
};
