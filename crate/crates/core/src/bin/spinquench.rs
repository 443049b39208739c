use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use spinquench::runner::{self, presets, ScenarioConfig, Task};
use spinquench::{Error, Method};

const OUT_ENV: &str = "SPINQUENCH_OUT";

#[derive(Parser)]
#[command(name = "spinquench", version, about = "Quench dynamics of tilted spin-S chains")]
struct Cli {
    /// Output root; falls back to $SPINQUENCH_OUT, then `./out`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Override the propagation method of the scenario.
    #[arg(long, global = true)]
    method: Option<Method>,
    /// Worker threads for sweeps and operator assembly.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Reserved; nothing in the simulator is stochastic.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Also write the base-point Hamiltonian in Matrix Market format.
    #[arg(long, global = true, value_name = "PATH")]
    export_operator: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve the base point of a scenario, ignoring sweeps.
    Evolve { config: PathBuf },
    /// Evolve every sweep point.
    Sweep { config: PathBuf },
    /// Density of states and initial-state overlaps.
    Dos { config: PathBuf },
    /// Participation entropy against sector dimension.
    Scaling { config: PathBuf },
    /// Boson effective model report.
    Hp { config: PathBuf },
    /// Built-in scenarios.
    Presets {
        #[command(subcommand)]
        action: PresetAction,
    },
}

#[derive(Subcommand)]
enum PresetAction {
    List,
    /// Run a preset with its own task.
    Run { name: String },
    /// Print a preset's scenario file.
    Show { name: String },
}

enum Outcome {
    Complete,
    Partial,
}

fn load(path: &Path) -> Result<ScenarioConfig, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    runner::parse_scenario(&text).map_err(|e| match e {
        Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
        other => other,
    })
}

fn execute(mut config: ScenarioConfig, task: Task, cli: &Cli, out: &Path) -> Result<Outcome, Error> {
    config.task = task;
    if let Some(m) = cli.method {
        config.set_method(m);
    }
    if let Some(path) = &cli.export_operator {
        runner::export_operator(&config, path)?;
        println!("operator written to {}", path.display());
    }
    let dir = runner::scenario_dir(&config, out);
    let partial = match task {
        Task::Evolve | Task::Sweep => {
            let report = runner::run_scenario(&config, Some(out))?;
            for r in &report.records {
                let s2 = r.participation_entropy.map_or(String::new(), |s| format!("  S2={s:.6}"));
                println!(
                    "[{:03}] {}  dim={}  I_avg={:.6}  S_avg={:.6}  I_th={:.6}{}",
                    r.index, r.label, r.dimension, r.imbalance_average, r.entropy_average, r.thermal_imbalance, s2
                );
            }
            for f in &report.failures {
                eprintln!("[{:03}] {} failed: {}", f.index, f.label, f.error);
            }
            !report.is_complete()
        }
        Task::Dos => {
            let report = runner::dos_report(&config, Some(out))?;
            for r in &report.records {
                println!(
                    "[{:03}] {}  dim={}  groups={}  top E={:.6} size={} max overlap={:.6}",
                    r.index, r.label, r.dimension, r.degenerate_groups, r.top_group.energy, r.top_group.size,
                    r.top_group.max_overlap
                );
            }
            for f in &report.failures {
                eprintln!("[{:03}] {} failed: {}", f.index, f.label, f.error);
            }
            !report.failures.is_empty()
        }
        Task::Scaling => {
            let report = runner::scaling_study(&config, Some(out))?;
            for case in &report.cases {
                for r in &case.rows {
                    println!("{}  L={}  N={}  S2={:.6}", case.label, r.sites, r.dimension, r.participation_entropy);
                }
                match case.slope {
                    Some(s) => println!("{}  slope={s:.6}", case.label),
                    None => println!("{}  slope=n/a", case.label),
                }
            }
            for f in &report.failures {
                eprintln!("[{:03}] {} failed: {}", f.index, f.label, f.error);
            }
            !report.failures.is_empty()
        }
        Task::Hp => {
            let report = runner::hp_report(&config, Some(out))?;
            println!("one-magnon mismatch (derived): {:.3e}", report.derived_one_magnon_discrepancy);
            println!("one-magnon mismatch (selected form): {:.3e}", report.form_one_magnon_discrepancy);
            println!("sign symmetry mismatch: {:.3e}", report.sign_symmetry_discrepancy);
            false
        }
    };
    println!("results in {}", dir.display());
    Ok(if partial { Outcome::Partial } else { Outcome::Complete })
}

fn run(cli: &Cli) -> Result<Outcome, Error> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    }
    let out = cli
        .out
        .clone()
        .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));
    match &cli.command {
        Command::Evolve { config } => execute(load(config)?, Task::Evolve, cli, &out),
        Command::Sweep { config } => execute(load(config)?, Task::Sweep, cli, &out),
        Command::Dos { config } => execute(load(config)?, Task::Dos, cli, &out),
        Command::Scaling { config } => execute(load(config)?, Task::Scaling, cli, &out),
        Command::Hp { config } => execute(load(config)?, Task::Hp, cli, &out),
        Command::Presets { action } => match action {
            PresetAction::List => {
                for p in presets::PRESETS {
                    let cfg = presets::load(p.name)?;
                    println!("{:<8} {:<8} {}", p.name, cfg.task.to_string(), cfg.description);
                }
                Ok(Outcome::Complete)
            }
            PresetAction::Show { name } => {
                let p = presets::find(name).ok_or_else(|| Error::Config(format!("unknown preset `{name}`")))?;
                print!("{}", p.text);
                Ok(Outcome::Complete)
            }
            PresetAction::Run { name } => {
                let cfg = presets::load(name)?;
                let task = cfg.task;
                execute(cfg, task, cli, &out)
            }
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Outcome::Complete) => ExitCode::SUCCESS,
        Ok(Outcome::Partial) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
