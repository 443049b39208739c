//! Execution of scenarios: time evolution sweeps, participation-entropy
//! scaling, density of states and the boson mapping report.

use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::config::{PointSpec, ScenarioConfig, Task};
use super::initial::build_initial_state;
use super::output::{columns_csv, series_csv, write_json, write_text};
use crate::basis::SpinBasis;
use crate::dynamics::{evolve_krylov_each, evolve_spectral_each, Method};
use crate::error::{Error, Result};
use crate::hpboson::{build_hp_hamiltonian, hp_terms, one_magnon_crosscheck, sign_symmetry_discrepancy, BosonBasis, HpForm};
use crate::model::{build_hamiltonian, full_spectrum, full_spectrum_with_guard, ModelParams, SparseOperator, Spectrum};
use crate::observables::{
    degenerate_groups, density_of_states, dos_grid, magnetization_profile, participation_entropy, thermal_imbalance,
    time_average, ObservableSeries, SpectralDecomposition,
};

/// Result of one sweep point. The series itself is stored in the CSV.
#[derive(Debug, Clone, Serialize)]
pub struct RunRecord {
    pub index: usize,
    pub label: String,
    pub params: ModelParams,
    pub initial_state: Vec<i32>,
    pub two_sz_total: i64,
    pub dimension: usize,
    pub method: Method,
    pub cut: usize,
    pub window: (f64, f64),
    pub imbalance_average: f64,
    pub entropy_average: f64,
    pub thermal_imbalance: f64,
    /// Present when the dense path ran.
    pub participation_entropy: Option<f64>,
    pub wall_seconds: f64,
    pub csv: Option<String>,
    #[serde(skip)]
    pub series: ObservableSeries,
}

#[derive(Debug, Clone, Serialize)]
pub struct PointFailure {
    pub index: usize,
    pub label: String,
    pub error: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScenarioReport {
    pub name: String,
    pub task: Task,
    pub description: String,
    pub records: Vec<RunRecord>,
    pub failures: Vec<PointFailure>,
    pub wall_seconds: f64,
}

impl ScenarioReport {
    pub fn is_complete(&self) -> bool {
        self.failures.is_empty()
    }
}

struct Prepared {
    basis: SpinBasis,
    hamiltonian: SparseOperator,
    two_sz_total: i64,
}

fn prepare(point: &PointSpec, config: &ScenarioConfig) -> Result<Prepared> {
    let two_sz_total = point.initial.iter().map(|&m| m as i64).sum();
    let basis = SpinBasis::with_guard(point.params.length, point.params.two_s, Some(two_sz_total), config.limits.basis)?;
    let hamiltonian = build_hamiltonian(&point.params, &basis)?;
    Ok(Prepared {
        basis,
        hamiltonian,
        two_sz_total,
    })
}

fn dense_spectrum(h: &SparseOperator, config: &ScenarioConfig) -> Result<Spectrum> {
    full_spectrum_with_guard(h, config.limits.dense)
}

/// Evolve a single point and measure along the trajectory.
pub fn run_point(point: &PointSpec, config: &ScenarioConfig) -> Result<RunRecord> {
    let start = Instant::now();
    let Prepared {
        basis,
        hamiltonian,
        two_sz_total,
    } = prepare(point, config)?;
    let psi0 = build_initial_state(&point.initial, &basis)?;
    let initial = magnetization_profile(&psi0, &basis)?;
    let evolution = config.evolution.config();
    let mut series = ObservableSeries::new(point.cut);
    let mut sink = |_: usize, t: f64, psi: &crate::dynamics::StateVector| series.record(t, psi, &basis, &initial);
    let participation = match evolution.method {
        Method::Dense => {
            let spectrum = dense_spectrum(&hamiltonian, config)?;
            evolve_spectral_each(&spectrum, &psi0, &evolution.time_grid, &mut sink)?;
            if config.observables.participation {
                let decomp = SpectralDecomposition::new(&spectrum, &psi0, config.observables.degeneracy_tolerance)?;
                Some(participation_entropy(&decomp))
            } else {
                None
            }
        }
        Method::Krylov => {
            evolve_krylov_each(&hamiltonian, &psi0, &evolution, &mut sink)?;
            None
        }
    };
    let window = config.observables.window;
    Ok(RunRecord {
        index: point.index,
        label: point.label.clone(),
        params: point.params,
        initial_state: point.initial.clone(),
        two_sz_total,
        dimension: basis.len(),
        method: evolution.method,
        cut: point.cut,
        window,
        imbalance_average: time_average(&series.times, &series.imbalance, window)?,
        entropy_average: time_average(&series.times, &series.entropy, window)?,
        thermal_imbalance: thermal_imbalance(point.params.length, point.params.two_s, two_sz_total),
        participation_entropy: participation,
        wall_seconds: start.elapsed().as_secs_f64(),
        csv: None,
        series,
    })
}

fn point_file(index: usize, stem: &str, ext: &str) -> String {
    format!("{stem}_{index:03}.{ext}")
}

/// Output directory of a scenario under `root`.
pub fn scenario_dir(config: &ScenarioConfig, root: &Path) -> PathBuf {
    root.join(config.output.as_deref().unwrap_or(&config.name))
}

fn split_results<T>(
    points: &[PointSpec],
    results: Vec<Result<T>>,
) -> (Vec<T>, Vec<PointFailure>) {
    let mut ok = Vec::new();
    let mut failures = Vec::new();
    for (point, result) in points.iter().zip(results) {
        match result {
            Ok(r) => ok.push(r),
            Err(e) => failures.push(PointFailure {
                index: point.index,
                label: point.label.clone(),
                error: e.to_string(),
            }),
        }
    }
    (ok, failures)
}

#[derive(Serialize)]
struct Manifest<'a> {
    name: &'a str,
    failures: &'a [PointFailure],
}

fn write_failures(dir: &Path, name: &str, failures: &[PointFailure]) -> Result<()> {
    let path = dir.join("errors.json");
    if failures.is_empty() {
        if path.exists() {
            std::fs::remove_file(path)?;
        }
        return Ok(());
    }
    write_json(&path, &Manifest { name, failures })
}

/// Run every sweep point concurrently. When `out` is given, each point writes
/// `point_NNN.csv` and the scenario writes `summary.json` (plus `errors.json`
/// if any point failed). Failing points do not abort the others.
pub fn run_scenario(config: &ScenarioConfig, out: Option<&Path>) -> Result<ScenarioReport> {
    let start = Instant::now();
    let points = config.points()?;
    let dir = out.map(|root| scenario_dir(config, root));
    let results: Vec<Result<RunRecord>> = points
        .par_iter()
        .map(|point| {
            let mut record = run_point(point, config)?;
            if let Some(dir) = &dir {
                let name = point_file(point.index, "point", "csv");
                write_text(&dir.join(&name), &series_csv(&record.series))?;
                record.csv = Some(name);
            }
            Ok(record)
        })
        .collect();
    let (records, failures) = split_results(&points, results);
    let report = ScenarioReport {
        name: config.name.clone(),
        task: config.task,
        description: config.description.clone(),
        records,
        failures,
        wall_seconds: start.elapsed().as_secs_f64(),
    };
    if let Some(dir) = &dir {
        write_json(&dir.join("summary.json"), &report)?;
        write_failures(dir, &config.name, &report.failures)?;
    }
    Ok(report)
}

#[derive(Debug, Clone, Serialize)]
pub struct ScalingRow {
    pub sites: usize,
    pub dimension: usize,
    pub ln_dimension: f64,
    pub participation_entropy: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScalingCase {
    pub label: String,
    pub rows: Vec<ScalingRow>,
    /// Least-squares slope of S₂ against ln 𝒩; absent with fewer than two sizes.
    pub slope: Option<f64>,
    pub intercept: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScalingReport {
    pub name: String,
    pub cases: Vec<ScalingCase>,
    pub failures: Vec<PointFailure>,
    pub wall_seconds: f64,
}

/// Ordinary least squares `y ≈ a + b·x`; `None` when `x` has no spread.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Option<(f64, f64)> {
    if x.len() < 2 || x.len() != y.len() {
        return None;
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    Some((my - slope * mx, slope))
}

fn scaling_row(point: &PointSpec, config: &ScenarioConfig) -> Result<ScalingRow> {
    let prepared = prepare(point, config)?;
    let psi0 = build_initial_state(&point.initial, &prepared.basis)?;
    let spectrum = dense_spectrum(&prepared.hamiltonian, config)?;
    let decomp = SpectralDecomposition::new(&spectrum, &psi0, config.observables.degeneracy_tolerance)?;
    let dim = prepared.basis.len();
    Ok(ScalingRow {
        sites: point.params.length,
        dimension: dim,
        ln_dimension: (dim as f64).ln(),
        participation_entropy: participation_entropy(&decomp),
    })
}

/// `S₂` against `ln 𝒩` for every case of the `[scaling]` block, with a linear fit.
pub fn scaling_study(config: &ScenarioConfig, out: Option<&Path>) -> Result<ScalingReport> {
    let start = Instant::now();
    let scaling = config
        .scaling
        .as_ref()
        .ok_or_else(|| Error::Config("missing [scaling] block".into()))?;
    let tagged = config.scaling_points()?;
    let points: Vec<PointSpec> = tagged.iter().map(|(_, p)| p.clone()).collect();
    let results: Vec<Result<(usize, ScalingRow)>> = tagged
        .par_iter()
        .map(|(case, point)| Ok((*case, scaling_row(point, config)?)))
        .collect();
    let (rows, failures) = split_results(&points, results);

    let mut cases = Vec::with_capacity(scaling.cases.len());
    for (c, assignments) in scaling.cases.iter().enumerate() {
        let label = assignments
            .iter()
            .map(|(k, v)| format!("{k}={}", v.value().unwrap_or(f64::NAN)))
            .collect::<Vec<_>>()
            .join(";");
        let mut case_rows: Vec<ScalingRow> = rows.iter().filter(|(i, _)| *i == c).map(|(_, r)| r.clone()).collect();
        case_rows.sort_by_key(|r| r.sites);
        let x: Vec<f64> = case_rows.iter().map(|r| r.ln_dimension).collect();
        let y: Vec<f64> = case_rows.iter().map(|r| r.participation_entropy).collect();
        let fit = linear_fit(&x, &y);
        cases.push(ScalingCase {
            label,
            rows: case_rows,
            slope: fit.map(|f| f.1),
            intercept: fit.map(|f| f.0),
        });
    }
    let report = ScalingReport {
        name: config.name.clone(),
        cases,
        failures,
        wall_seconds: start.elapsed().as_secs_f64(),
    };
    if let Some(root) = out {
        let dir = scenario_dir(config, root);
        let mut csv = String::from("case,sites,dimension,ln_dimension,s2\n");
        for case in &report.cases {
            for r in &case.rows {
                csv.push_str(&format!(
                    "{},{},{},{:?},{:?}\n",
                    case.label, r.sites, r.dimension, r.ln_dimension, r.participation_entropy
                ));
            }
        }
        write_text(&dir.join("scaling.csv"), &csv)?;
        write_json(&dir.join("scaling.json"), &report)?;
        write_failures(&dir, &config.name, &report.failures)?;
    }
    Ok(report)
}

#[derive(Debug, Clone, Serialize)]
pub struct DegenerateGroup {
    pub first: usize,
    pub size: usize,
    pub energy: f64,
    /// Largest `|⟨n|ψ₀⟩|²` within the group.
    pub max_overlap: f64,
    /// `Σ |⟨n|ψ₀⟩|²` over the group.
    pub weight: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DosRecord {
    pub index: usize,
    pub label: String,
    pub params: ModelParams,
    pub initial_state: Vec<i32>,
    pub dimension: usize,
    pub sigma: f64,
    pub degeneracy_tolerance: f64,
    pub degenerate_groups: usize,
    pub largest_group: usize,
    /// Highest-energy group.
    pub top_group: DegenerateGroup,
    /// Group carrying the most initial-state weight.
    pub dominant_group: DegenerateGroup,
    pub participation_entropy: f64,
    pub dos_csv: Option<String>,
    pub spectrum_csv: Option<String>,
    #[serde(skip)]
    pub energies: Vec<f64>,
    #[serde(skip)]
    pub overlaps: Vec<f64>,
    #[serde(skip)]
    pub groups: Vec<DegenerateGroup>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DosReport {
    pub name: String,
    pub records: Vec<DosRecord>,
    pub failures: Vec<PointFailure>,
    pub wall_seconds: f64,
}

/// Full spectrum, initial-state overlaps and degenerate groups of one point.
pub fn dos_point(point: &PointSpec, config: &ScenarioConfig) -> Result<DosRecord> {
    let prepared = prepare(point, config)?;
    let psi0 = build_initial_state(&point.initial, &prepared.basis)?;
    let spectrum = dense_spectrum(&prepared.hamiltonian, config)?;
    let decomp = SpectralDecomposition::new(&spectrum, &psi0, config.observables.degeneracy_tolerance)?;
    let overlaps: Vec<f64> = decomp.overlaps.iter().map(|c| c.norm_sqr()).collect();
    let groups: Vec<DegenerateGroup> = degenerate_groups(&spectrum.values, decomp.absolute_tolerance())
        .into_iter()
        .map(|r| DegenerateGroup {
            first: r.start,
            size: r.len(),
            energy: spectrum.values[r.start],
            max_overlap: overlaps[r.clone()].iter().copied().fold(0.0, f64::max),
            weight: overlaps[r].iter().sum(),
        })
        .collect();
    let top_group = groups.last().cloned().expect("non-empty spectrum");
    let dominant_group = groups
        .iter()
        .max_by(|a, b| a.weight.total_cmp(&b.weight))
        .cloned()
        .expect("non-empty spectrum");
    Ok(DosRecord {
        index: point.index,
        label: point.label.clone(),
        params: point.params,
        initial_state: point.initial.clone(),
        dimension: spectrum.dim(),
        sigma: config.observables.dos_sigma,
        degeneracy_tolerance: decomp.absolute_tolerance(),
        degenerate_groups: groups.len(),
        largest_group: groups.iter().map(|g| g.size).max().unwrap_or(0),
        top_group,
        dominant_group,
        participation_entropy: participation_entropy(&decomp),
        dos_csv: None,
        spectrum_csv: None,
        energies: spectrum.values,
        overlaps,
        groups,
    })
}

/// Density of states and overlap structure for every sweep point.
pub fn dos_report(config: &ScenarioConfig, out: Option<&Path>) -> Result<DosReport> {
    let start = Instant::now();
    let points = config.points()?;
    let dir = out.map(|root| scenario_dir(config, root));
    let results: Vec<Result<DosRecord>> = points
        .par_iter()
        .map(|point| {
            let mut record = dos_point(point, config)?;
            if let Some(dir) = &dir {
                let grid = dos_grid(&record.energies, record.sigma, config.observables.dos_points);
                let dos = density_of_states(&record.energies, record.sigma, &grid)?;
                let name = point_file(point.index, "dos", "csv");
                write_text(&dir.join(&name), &columns_csv(&["energy", "dos"], &[&grid, &dos]))?;
                record.dos_csv = Some(name);
                let name = point_file(point.index, "spectrum", "csv");
                write_text(
                    &dir.join(&name),
                    &columns_csv(&["energy", "overlap"], &[&record.energies, &record.overlaps]),
                )?;
                record.spectrum_csv = Some(name);
            }
            Ok(record)
        })
        .collect();
    let (records, failures) = split_results(&points, results);
    let report = DosReport {
        name: config.name.clone(),
        records,
        failures,
        wall_seconds: start.elapsed().as_secs_f64(),
    };
    if let Some(dir) = &dir {
        write_json(&dir.join("dos.json"), &report)?;
        write_failures(dir, &config.name, &report.failures)?;
    }
    Ok(report)
}

#[derive(Debug, Clone, Serialize)]
pub struct HpReport {
    pub name: String,
    pub params: ModelParams,
    pub form: HpForm,
    pub bosons: u32,
    pub chemical_potential: Vec<f64>,
    pub hopping: f64,
    pub correlated_hopping: f64,
    pub onsite: f64,
    pub density: f64,
    /// Largest one-magnon eigenvalue mismatch of the derived coefficients.
    pub derived_one_magnon_discrepancy: f64,
    /// Same comparison with the selected coefficients.
    pub form_one_magnon_discrepancy: f64,
    /// Spectrum of `H(U)` against `−H(−U)` for the selected coefficients.
    pub sign_symmetry_discrepancy: f64,
    pub boson_spectrum: Vec<f64>,
}

fn one_magnon_mismatch(params: &ModelParams, form: HpForm) -> Result<f64> {
    if form == HpForm::Derived {
        return one_magnon_crosscheck(params);
    }
    let top = params.length as i64 * params.two_s as i64;
    let polarized = SpinBasis::new(params.length, params.two_s, Some(top))?;
    let reference = build_hamiltonian(params, &polarized)?.get(0, 0);
    let magnon = SpinBasis::new(params.length, params.two_s, Some(top - 2))?;
    let spin = full_spectrum(&build_hamiltonian(params, &magnon)?)?;
    let bosons = BosonBasis::new(params.length, params.two_s, 1)?;
    let boson = full_spectrum(&build_hp_hamiltonian(params, &bosons, form)?)?;
    Ok(spin
        .values
        .iter()
        .zip(&boson.values)
        .map(|(a, b)| (a - reference - b).abs())
        .fold(0.0, f64::max))
}

/// Effective boson model for the base point, with consistency diagnostics.
pub fn hp_report(config: &ScenarioConfig, out: Option<&Path>) -> Result<HpReport> {
    let params = config.model.params();
    let form = config.hp.form;
    let terms = hp_terms(&params, form)?;
    let basis = BosonBasis::with_guard(params.length, params.two_s, config.hp.bosons, config.limits.basis)?;
    let h = build_hp_hamiltonian(&params, &basis, form)?;
    let spectrum = full_spectrum_with_guard(&h, config.limits.dense)?;
    let report = HpReport {
        name: config.name.clone(),
        params,
        form,
        bosons: config.hp.bosons,
        chemical_potential: terms.chemical.clone(),
        hopping: terms.hopping,
        correlated_hopping: terms.correlated_hopping,
        onsite: terms.onsite,
        density: terms.density,
        derived_one_magnon_discrepancy: one_magnon_crosscheck(&params)?,
        form_one_magnon_discrepancy: one_magnon_mismatch(&params, form)?,
        sign_symmetry_discrepancy: sign_symmetry_discrepancy(&terms, &basis)?,
        boson_spectrum: spectrum.values,
    };
    if let Some(root) = out {
        let dir = scenario_dir(config, root);
        write_json(&dir.join("hp.json"), &report)?;
    }
    Ok(report)
}

/// Write the Hamiltonian of the base point in Matrix Market format.
pub fn export_operator(config: &ScenarioConfig, path: &Path) -> Result<()> {
    let point = match config.task {
        Task::Scaling => config.scaling_points()?.remove(0).1,
        _ => config.points()?.remove(0),
    };
    let prepared = prepare(&point, config)?;
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    let file = std::io::BufWriter::new(std::fs::File::create(path)?);
    prepared.hamiltonian.write_matrix_market(file)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::runner::config::parse_scenario;

    fn small(extra: &str) -> ScenarioConfig {
        let text = format!(
            "initial_state = \"single_island\"\n{extra}\n[model]\nsites = 6\ntwo_s = 1\n\
             [evolution]\nmethod = \"dense\"\nt_max = 20\ndt = 0.5\n[observables]\nwindow = [10, 20]\n"
        );
        parse_scenario(&text).unwrap()
    }

    #[test]
    fn frozen_chain_keeps_unit_imbalance() {
        let mut cfg = small("");
        cfg.model.j0 = 0.0;
        cfg.model.d = 4.0;
        let r = run_point(&cfg.points().unwrap()[0], &cfg).unwrap();
        assert!(r.series.imbalance.iter().all(|&i| (i - 1.0).abs() < 1e-12));
        assert!(r.series.entropy.iter().all(|&s| s.abs() < 1e-12));
        assert_eq!(r.participation_entropy, Some(0.0));
    }

    #[test]
    fn averages_match_the_series() {
        let cfg = small("");
        let r = run_point(&cfg.points().unwrap()[0], &cfg).unwrap();
        assert_eq!(r.series.len(), 41);
        let lo = r.series.times.iter().position(|&t| t == 10.0).unwrap();
        let mean = r.series.imbalance[lo..].iter().sum::<f64>() / (r.series.len() - lo) as f64;
        assert!((mean - r.imbalance_average).abs() < 1e-12);
        assert_eq!(r.thermal_imbalance, 0.0);
        assert_eq!(r.dimension, 20);
    }

    #[test]
    fn dense_and_krylov_records_agree() {
        let mut cfg = small("");
        cfg.model.h0 = 1.0;
        let dense = run_point(&cfg.points().unwrap()[0], &cfg).unwrap();
        cfg.set_method(Method::Krylov);
        let kry = run_point(&cfg.points().unwrap()[0], &cfg).unwrap();
        for (a, b) in dense.series.imbalance.iter().zip(&kry.series.imbalance) {
            assert!((a - b).abs() < 1e-8);
        }
        assert!(kry.participation_entropy.is_none());
    }

    #[test]
    fn failures_are_isolated() {
        let mut cfg = small("[[sweep]]\nparam = \"sites\"\nvalues = [4, 12]");
        cfg.limits.dense = 100;
        let report = run_scenario(&cfg, None).unwrap();
        assert_eq!(report.records.len(), 1);
        assert_eq!(report.failures.len(), 1);
        assert_eq!(report.failures[0].index, 1);
        assert!(report.failures[0].error.contains("capacity"));
        assert!(!report.is_complete());
    }

    #[test]
    fn least_squares() {
        let (a, b) = linear_fit(&[1.0, 2.0, 3.0], &[3.0, 5.0, 7.0]).unwrap();
        assert!((a - 1.0).abs() < 1e-14 && (b - 2.0).abs() < 1e-14);
        assert!(linear_fit(&[1.0], &[2.0]).is_none());
        assert!(linear_fit(&[1.0, 1.0], &[2.0, 3.0]).is_none());
    }

    #[test]
    fn single_size_scaling_has_no_fit() {
        let text = "task = \"scaling\"\ninitial_state = \"single_island(2)\"\n[model]\nsites = 4\ntwo_s = 3\n\
                    [scaling]\nsites = [4]\ncases = [{d = 0, h0 = 0}]\n";
        let report = scaling_study(&parse_scenario(text).unwrap(), None).unwrap();
        assert_eq!(report.cases[0].rows.len(), 1);
        assert!(report.cases[0].slope.is_none());
    }

    #[test]
    fn hp_report_for_spin_half() {
        let text = "task = \"hp\"\n[model]\nsites = 4\ntwo_s = 1\nh0 = 0.7\n[hp]\nform = \"derived\"\n";
        let report = hp_report(&parse_scenario(text).unwrap(), None).unwrap();
        assert!(report.derived_one_magnon_discrepancy < 1e-10);
        assert_eq!(report.form_one_magnon_discrepancy, report.derived_one_magnon_discrepancy);
        assert_eq!(report.boson_spectrum.len(), 4);
    }
}
