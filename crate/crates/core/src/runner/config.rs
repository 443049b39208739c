//! Scenario documents: TOML schema, defaults and sweep expansion.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::initial::InitialSpec;
use crate::dynamics::{uniform_grid, EvolutionConfig, Method};
use crate::error::{Error, Result};
use crate::hpboson::HpForm;
use crate::model::{ModelParams, DEFAULT_DENSE_GUARD};
use crate::observables::DEFAULT_DEGENERACY_TOLERANCE;
use crate::product::DEFAULT_ENUMERATION_GUARD;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Evolve,
    Sweep,
    Dos,
    Scaling,
    Hp,
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Task::Evolve => "evolve",
            Task::Sweep => "sweep",
            Task::Dos => "dos",
            Task::Scaling => "scaling",
            Task::Hp => "hp",
        };
        f.write_str(s)
    }
}

/// A number, or a string such as `"pi/3"`, `"2pi/3"`, `"-0.5*pi"`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Number(f64),
    Text(String),
}

impl Scalar {
    pub fn value(&self) -> Result<f64> {
        match self {
            Scalar::Number(x) => Ok(*x),
            Scalar::Text(s) => parse_expression(s),
        }
    }

    fn label(&self) -> String {
        match self {
            Scalar::Number(x) => format!("{x}"),
            Scalar::Text(s) => s.replace(' ', ""),
        }
    }
}

/// Evaluate `[coef][*]pi[/den]` or a plain number.
pub fn parse_expression(text: &str) -> Result<f64> {
    let bad = || Error::Config(format!("cannot read `{text}` as a number or multiple of pi"));
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect::<String>().to_lowercase();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.to_string(), d.parse::<f64>().map_err(|_| bad())?),
        None => (s.clone(), 1.0),
    };
    let value = if let Some(coef) = num.strip_suffix("pi").or_else(|| num.strip_suffix('π')) {
        let coef = coef.strip_suffix('*').unwrap_or(coef);
        let c = match coef {
            "" | "+" => 1.0,
            "-" => -1.0,
            c => c.parse::<f64>().map_err(|_| bad())?,
        };
        c * std::f64::consts::PI
    } else {
        num.parse::<f64>().map_err(|_| bad())?
    };
    let out = value / den;
    if !out.is_finite() {
        return Err(bad());
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Couplings {
    Theta(f64),
    Explicit { j1: f64, j2: f64 },
}

/// Model block before resolution into [`ModelParams`].
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    pub sites: usize,
    pub two_s: u32,
    pub j0: f64,
    pub couplings: Couplings,
    pub h0: f64,
    pub gamma: f64,
    pub d: f64,
}

impl ModelSpec {
    pub fn params(&self) -> ModelParams {
        let base = match self.couplings {
            Couplings::Theta(theta) => ModelParams::with_theta(self.sites, self.two_s, self.j0, theta),
            Couplings::Explicit { j1, j2 } => {
                let mut p = ModelParams::with_couplings(self.sites, self.two_s, j1, j2);
                p.j0 = self.j0;
                p
            }
        };
        base.field(self.h0, self.gamma).anisotropy(self.d)
    }

    /// Set a named model parameter. Returns false if `name` is not a model field.
    fn assign(&mut self, name: &str, value: &Scalar) -> Result<bool> {
        let as_count = |v: f64| -> Result<usize> {
            if v < 0.0 || v.fract() != 0.0 {
                return Err(Error::Config(format!("`{name}` must be a non-negative integer, got {v}")));
            }
            Ok(v as usize)
        };
        match name {
            "sites" | "L" => self.sites = as_count(value.value()?)?,
            "two_s" => self.two_s = as_count(value.value()?)? as u32,
            "j0" => self.j0 = value.value()?,
            "theta" => self.couplings = Couplings::Theta(value.value()?),
            "j1" | "j2" => {
                let (mut j1, mut j2) = match self.couplings {
                    Couplings::Explicit { j1, j2 } => (j1, j2),
                    Couplings::Theta(_) => {
                        let p = self.params();
                        (p.j1, p.j2)
                    }
                };
                if name == "j1" {
                    j1 = value.value()?;
                } else {
                    j2 = value.value()?;
                }
                self.couplings = Couplings::Explicit { j1, j2 };
            }
            "h0" => self.h0 = value.value()?,
            "gamma" => self.gamma = value.value()?,
            "d" | "D" => self.d = value.value()?,
            _ => return Ok(false),
        }
        Ok(true)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TimeSpec {
    Uniform { t_max: f64, dt: f64 },
    Explicit(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionSpec {
    pub method: Method,
    pub times: TimeSpec,
    pub krylov_dim: usize,
    pub step_tolerance: f64,
    pub max_substeps: usize,
}

impl EvolutionSpec {
    pub fn time_grid(&self) -> Vec<f64> {
        match &self.times {
            TimeSpec::Uniform { t_max, dt } => uniform_grid(*t_max, *dt),
            TimeSpec::Explicit(t) => t.clone(),
        }
    }

    pub fn config(&self) -> EvolutionConfig {
        EvolutionConfig {
            method: self.method,
            time_grid: self.time_grid(),
            krylov_dim: self.krylov_dim,
            step_tolerance: self.step_tolerance,
            max_substeps: self.max_substeps,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObservableSpec {
    /// Bond index; `None` means `⌊L/2⌋`.
    pub entropy_cut: Option<usize>,
    pub degeneracy_tolerance: f64,
    pub window: (f64, f64),
    pub dos_sigma: f64,
    pub dos_points: usize,
    pub participation: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Limits {
    pub basis: u128,
    pub dense: usize,
}

/// One sweep axis. Multi-parameter axes advance their parameters together.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepAxis {
    pub params: Vec<String>,
    pub values: Vec<Vec<Scalar>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingSpec {
    pub sites: Vec<usize>,
    pub cases: Vec<BTreeMap<String, Scalar>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HpSpec {
    pub form: HpForm,
    pub bosons: u32,
}

/// Fully resolved scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub name: String,
    pub description: String,
    pub task: Task,
    pub output: Option<String>,
    pub model: ModelSpec,
    pub initial: Option<InitialSpec>,
    pub evolution: EvolutionSpec,
    pub observables: ObservableSpec,
    pub sweep: Vec<SweepAxis>,
    pub scaling: Option<ScalingSpec>,
    pub hp: HpSpec,
    pub limits: Limits,
}

/// A single resolved point of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSpec {
    pub index: usize,
    pub label: String,
    pub params: ModelParams,
    pub initial: Vec<i32>,
    pub cut: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    name: Option<String>,
    description: Option<String>,
    task: Option<Task>,
    output: Option<String>,
    model: RawModel,
    initial_state: Option<RawInitial>,
    #[serde(default)]
    evolution: RawEvolution,
    #[serde(default)]
    observables: RawObservables,
    #[serde(default)]
    sweep: Vec<RawAxis>,
    scaling: Option<RawScaling>,
    hp: Option<RawHp>,
    #[serde(default)]
    limits: RawLimits,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    #[serde(alias = "L")]
    sites: usize,
    two_s: u32,
    j0: Option<Scalar>,
    theta: Option<Scalar>,
    j1: Option<Scalar>,
    j2: Option<Scalar>,
    h0: Option<Scalar>,
    gamma: Option<Scalar>,
    #[serde(alias = "D")]
    d: Option<Scalar>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawInitial {
    Text(String),
    List(Vec<i32>),
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawEvolution {
    method: Option<Method>,
    t_max: Option<f64>,
    dt: Option<f64>,
    times: Option<Vec<f64>>,
    krylov_dim: Option<usize>,
    step_tolerance: Option<f64>,
    max_substeps: Option<usize>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawObservables {
    entropy_cut: Option<usize>,
    degeneracy_tolerance: Option<f64>,
    window: Option<[f64; 2]>,
    dos_sigma: Option<f64>,
    dos_points: Option<usize>,
    participation: Option<bool>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAxis {
    param: Option<String>,
    params: Option<Vec<String>>,
    values: Vec<RawSweepValue>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawSweepValue {
    One(Scalar),
    Tuple(Vec<Scalar>),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScaling {
    sites: Vec<usize>,
    cases: Vec<BTreeMap<String, Scalar>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawHp {
    form: Option<String>,
    positive_anisotropy_shift: Option<bool>,
    bosons: Option<u32>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawLimits {
    basis: Option<u64>,
    dense: Option<usize>,
}

fn opt(value: Option<Scalar>, default: f64) -> Result<f64> {
    value.map_or(Ok(default), |v| v.value())
}

/// Parse and validate a scenario document. Every sweep point is resolved, so
/// a returned config is known to describe admissible initial states.
pub fn parse_scenario(text: &str) -> Result<ScenarioConfig> {
    let raw: RawScenario = toml::from_str(text).map_err(|e| Error::Config(e.to_string().trim_end().to_string()))?;

    let m = raw.model;
    let couplings = match (m.theta, m.j1, m.j2) {
        (Some(_), Some(_), _) | (Some(_), _, Some(_)) => {
            return Err(Error::Config("model: give either `theta` or `j1`/`j2`, not both".into()))
        }
        (Some(t), None, None) => Couplings::Theta(t.value()?),
        (None, None, None) => Couplings::Theta(0.0),
        (None, j1, j2) => Couplings::Explicit {
            j1: opt(j1, 0.0)?,
            j2: opt(j2, 0.0)?,
        },
    };
    let model = ModelSpec {
        sites: m.sites,
        two_s: m.two_s,
        j0: opt(m.j0, 1.0)?,
        couplings,
        h0: opt(m.h0, 0.0)?,
        gamma: opt(m.gamma, 0.0)?,
        d: opt(m.d, 0.0)?,
    };

    let initial = match raw.initial_state {
        None => None,
        Some(RawInitial::Text(s)) => Some(InitialSpec::parse(&s)?),
        Some(RawInitial::List(v)) => Some(InitialSpec::Pattern(v)),
    };

    let e = raw.evolution;
    let times = match (e.times, e.t_max, e.dt) {
        (Some(_), Some(_), _) | (Some(_), _, Some(_)) => {
            return Err(Error::Config("evolution: `times` excludes `t_max`/`dt`".into()))
        }
        (Some(t), None, None) => TimeSpec::Explicit(t),
        (None, t_max, dt) => {
            let (t_max, dt) = (t_max.unwrap_or(500.0), dt.unwrap_or(0.5));
            if !(dt > 0.0) || !(t_max >= 0.0) {
                return Err(Error::Config("evolution: need dt > 0 and t_max >= 0".into()));
            }
            TimeSpec::Uniform { t_max, dt }
        }
    };
    let evolution = EvolutionSpec {
        method: e.method.unwrap_or(Method::Krylov),
        times,
        krylov_dim: e.krylov_dim.unwrap_or(30),
        step_tolerance: e.step_tolerance.unwrap_or(1e-10),
        max_substeps: e.max_substeps.unwrap_or(10_000_000),
    };
    evolution
        .config()
        .validate()
        .map_err(|err| Error::Config(format!("evolution: {err}")))?;

    let o = raw.observables;
    let observables = ObservableSpec {
        entropy_cut: o.entropy_cut,
        degeneracy_tolerance: o.degeneracy_tolerance.unwrap_or(DEFAULT_DEGENERACY_TOLERANCE),
        window: o.window.map_or((400.0, 500.0), |[a, b]| (a, b)),
        dos_sigma: o.dos_sigma.unwrap_or(0.05),
        dos_points: o.dos_points.unwrap_or(2000),
        participation: o.participation.unwrap_or(true),
    };
    if !(observables.window.0 <= observables.window.1) {
        return Err(Error::Config("observables: window must be [lo, hi] with lo <= hi".into()));
    }
    if !(observables.dos_sigma > 0.0) || observables.dos_points < 2 {
        return Err(Error::Config("observables: need dos_sigma > 0 and dos_points >= 2".into()));
    }

    let mut sweep = Vec::with_capacity(raw.sweep.len());
    for (k, axis) in raw.sweep.into_iter().enumerate() {
        let params = match (axis.param, axis.params) {
            (Some(p), None) => vec![p],
            (None, Some(ps)) if !ps.is_empty() => ps,
            _ => {
                return Err(Error::Config(format!(
                    "sweep[{k}]: give exactly one of `param` or a non-empty `params`"
                )))
            }
        };
        if axis.values.is_empty() {
            return Err(Error::Config(format!("sweep[{k}]: `values` is empty")));
        }
        let mut values = Vec::with_capacity(axis.values.len());
        for v in axis.values {
            let tuple = match v {
                RawSweepValue::One(s) if params.len() == 1 => vec![s],
                RawSweepValue::Tuple(t) if t.len() == params.len() => t,
                _ => {
                    return Err(Error::Config(format!(
                        "sweep[{k}]: each value must supply {} entries",
                        params.len()
                    )))
                }
            };
            values.push(tuple);
        }
        sweep.push(SweepAxis { params, values });
    }

    let scaling = raw.scaling.map(|s| ScalingSpec {
        sites: s.sites,
        cases: s.cases,
    });

    let hp = match raw.hp {
        None => HpSpec {
            form: HpForm::default(),
            bosons: 1,
        },
        Some(h) => {
            let form = match h.form.as_deref().unwrap_or("printed") {
                "printed" => HpForm::Printed {
                    positive_anisotropy_shift: h.positive_anisotropy_shift.unwrap_or(true),
                },
                "derived" if h.positive_anisotropy_shift.is_none() => HpForm::Derived,
                "derived" => {
                    return Err(Error::Config(
                        "hp: `positive_anisotropy_shift` applies to the printed form only".into(),
                    ))
                }
                other => return Err(Error::Config(format!("hp: unknown form `{other}`"))),
            };
            HpSpec {
                form,
                bosons: h.bosons.unwrap_or(1),
            }
        }
    };

    let limits = Limits {
        basis: raw.limits.basis.map_or(DEFAULT_ENUMERATION_GUARD, u128::from),
        dense: raw.limits.dense.unwrap_or(DEFAULT_DENSE_GUARD),
    };

    let task = raw.task.unwrap_or(Task::Sweep);
    let config = ScenarioConfig {
        name: raw.name.unwrap_or_else(|| "scenario".into()),
        description: raw.description.unwrap_or_default(),
        task,
        output: raw.output,
        model,
        initial,
        evolution,
        observables,
        sweep,
        scaling,
        hp,
        limits,
    };
    config.check()?;
    Ok(config)
}

impl ScenarioConfig {
    fn check(&self) -> Result<()> {
        if self.name.is_empty() || self.name.contains(['/', '\\']) || self.name == ".." {
            return Err(Error::Config(format!("name `{}` is not a valid directory name", self.name)));
        }
        match self.task {
            Task::Hp => {
                self.model.params().validate().map_err(config_err("model"))?;
            }
            Task::Scaling => {
                let scaling = self
                    .scaling
                    .as_ref()
                    .ok_or_else(|| Error::Config("task `scaling` needs a [scaling] block".into()))?;
                if scaling.cases.is_empty() || scaling.sites.is_empty() {
                    return Err(Error::Config("scaling: `sites` and `cases` must be non-empty".into()));
                }
                self.scaling_points()?;
            }
            Task::Evolve | Task::Sweep | Task::Dos => {
                let points = self.points()?;
                let grid = self.evolution.time_grid();
                let (lo, hi) = self.observables.window;
                let slack = 1e-9 * lo.abs().max(hi.abs()).max(1.0);
                if self.task != Task::Dos && !grid.iter().any(|&t| t >= lo - slack && t <= hi + slack) {
                    return Err(Error::Config(format!(
                        "observables: window [{lo}, {hi}] contains no time of the evolution grid"
                    )));
                }
                debug_assert!(!points.is_empty());
            }
        }
        Ok(())
    }

    fn initial_spec(&self) -> Result<&InitialSpec> {
        self.initial
            .as_ref()
            .ok_or_else(|| Error::Config(format!("task `{}` needs `initial_state`", self.task)))
    }

    fn resolve(&self, index: usize, label: String, model: &ModelSpec, initial: &InitialSpec) -> Result<PointSpec> {
        let params = model.params();
        params.validate().map_err(config_err("model"))?;
        let pattern = initial
            .resolve(params.length, params.two_s)
            .map_err(config_err("initial_state"))?;
        let cut = self.observables.entropy_cut.unwrap_or(params.length / 2);
        if cut == 0 || cut >= params.length {
            return Err(Error::Config(format!(
                "observables: entropy_cut {cut} must satisfy 1 <= cut < {}",
                params.length
            )));
        }
        Ok(PointSpec {
            index,
            label,
            params,
            initial: pattern,
            cut,
        })
    }

    /// Cartesian product of the sweep axes, first axis outermost. The
    /// `evolve` task ignores the sweep and yields the base point only.
    pub fn points(&self) -> Result<Vec<PointSpec>> {
        let base_initial = self.initial_spec()?;
        let axes: &[SweepAxis] = if self.task == Task::Evolve { &[] } else { &self.sweep };
        let total: usize = axes.iter().map(|a| a.values.len()).product();
        let mut points = Vec::with_capacity(total);
        for index in 0..total {
            let mut model = self.model.clone();
            let mut initial = base_initial.clone();
            let mut labels = Vec::new();
            let mut rest = index;
            let mut picks = vec![0; axes.len()];
            for (k, axis) in axes.iter().enumerate().rev() {
                picks[k] = rest % axis.values.len();
                rest /= axis.values.len();
            }
            for (axis, &pick) in axes.iter().zip(&picks) {
                for (name, value) in axis.params.iter().zip(&axis.values[pick]) {
                    if name == "initial_state" {
                        initial = match value {
                            Scalar::Text(s) => InitialSpec::parse(s)?,
                            Scalar::Number(_) => {
                                return Err(Error::Config("sweep: `initial_state` values must be strings".into()))
                            }
                        };
                    } else if !model.assign(name, value)? {
                        return Err(Error::Config(format!("sweep: unknown parameter `{name}`")));
                    }
                    labels.push(format!("{name}={}", value.label()));
                }
            }
            let label = if labels.is_empty() { "base".to_string() } else { labels.join(";") };
            points.push(self.resolve(index, label, &model, &initial)?);
        }
        Ok(points)
    }

    /// `(case index, case assignments, point)` for every case and size.
    pub fn scaling_points(&self) -> Result<Vec<(usize, PointSpec)>> {
        let scaling = self
            .scaling
            .as_ref()
            .ok_or_else(|| Error::Config("missing [scaling] block".into()))?;
        let initial = self.initial_spec()?;
        let mut out = Vec::new();
        for (c, case) in scaling.cases.iter().enumerate() {
            for &sites in &scaling.sites {
                let mut model = self.model.clone();
                model.sites = sites;
                let mut labels = Vec::new();
                for (name, value) in case {
                    if matches!(name.as_str(), "sites" | "L") || !model.assign(name, value)? {
                        return Err(Error::Config(format!("scaling: cannot set `{name}` in a case")));
                    }
                    labels.push(format!("{name}={}", value.label()));
                }
                labels.push(format!("sites={sites}"));
                let index = out.len();
                out.push((c, self.resolve(index, labels.join(";"), &model, initial)?));
            }
        }
        Ok(out)
    }

    /// Override the propagation method for every point.
    pub fn set_method(&mut self, method: Method) {
        self.evolution.method = method;
    }
}

fn config_err(block: &'static str) -> impl Fn(Error) -> Error {
    move |e| match e {
        Error::Config(msg) => Error::Config(format!("{block}: {msg}")),
        other => Error::Config(format!("{block}: {other}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    const MINIMAL: &str = r#"
[model]
sites = 8
two_s = 1
theta = 0

initial_state = "1,1,1,1,-1,-1,-1,-1"
"#;

    fn minimal() -> String {
        // `initial_state` must precede the first table.
        "initial_state = \"1,1,1,1,-1,-1,-1,-1\"\n[model]\nsites = 8\ntwo_s = 1\ntheta = 0\n".to_string()
    }

    #[test]
    fn minimal_config_resolves_defaults() {
        let cfg = parse_scenario(&minimal()).unwrap();
        assert_eq!(cfg.task, Task::Sweep);
        assert_eq!(cfg.observables.window, (400.0, 500.0));
        assert_eq!(cfg.evolution.method, Method::Krylov);
        assert_eq!(cfg.evolution.time_grid().len(), 1001);
        let points = cfg.points().unwrap();
        assert_eq!(points.len(), 1);
        assert_eq!(points[0].initial, vec![1, 1, 1, 1, -1, -1, -1, -1]);
        assert_eq!(points[0].cut, 4);
        assert_eq!(points[0].params.j1, 1.0);
    }

    #[test]
    fn keys_after_a_table_belong_to_it() {
        // In TOML this `initial_state` lands inside [model] and is rejected.
        let err = parse_scenario(MINIMAL).unwrap_err();
        assert!(err.to_string().contains("initial_state"), "{err}");
    }

    #[test]
    fn schema_errors_carry_location() {
        let text = minimal().replace("two_s = 1", "two_s = 1\nbogus = 3");
        let err = parse_scenario(&text).unwrap_err().to_string();
        assert!(err.contains("bogus") && err.contains("line"), "{err}");
    }

    #[test]
    fn pattern_length_and_admissibility() {
        let short = minimal().replace("1,1,1,1,-1,-1,-1,-1", "1,1,-1,-1");
        assert!(matches!(parse_scenario(&short), Err(Error::Config(_))));
        let big = minimal().replace("1,1,1,1,-1,-1,-1,-1", "2,1,1,1,-1,-1,-1,-2");
        let err = parse_scenario(&big).unwrap_err().to_string();
        assert!(err.contains("admissible"), "{err}");
    }

    #[test]
    fn angle_expressions() {
        for (s, v) in [
            ("pi", PI),
            ("pi/3", PI / 3.0),
            ("2pi/3", 2.0 * PI / 3.0),
            ("5*pi/3", 5.0 * PI / 3.0),
            ("-pi / 2", -PI / 2.0),
            ("0.25", 0.25),
            ("3/4", 0.75),
        ] {
            assert!((parse_expression(s).unwrap() - v).abs() < 1e-15, "{s}");
        }
        assert!(parse_expression("tau").is_err());
        assert!(parse_expression("1/0").is_err());
    }

    #[test]
    fn sweep_is_a_cartesian_product() {
        let text = format!(
            "{}[[sweep]]\nparam = \"h0\"\nvalues = [0, 1, 2]\n[[sweep]]\nparam = \"theta\"\nvalues = [0, \"pi/3\"]\n",
            minimal()
        );
        let cfg = parse_scenario(&text).unwrap();
        let points = cfg.points().unwrap();
        assert_eq!(points.len(), 6);
        assert_eq!(points[0].label, "h0=0;theta=0");
        assert_eq!(points[5].label, "h0=2;theta=pi/3");
        assert_eq!(points[5].params.h0, 2.0);
        assert!((points[5].params.j2 - (PI / 3.0).sin()).abs() < 1e-15);
    }

    #[test]
    fn zipped_axes_and_initial_state_sweeps() {
        let text = format!(
            "{}[[sweep]]\nparams = [\"h0\", \"d\"]\nvalues = [[0, 0], [2, 0], [0, 4]]\n\
             [[sweep]]\nparam = \"initial_state\"\nvalues = [\"n_walls(1)\", \"n_walls(3)\"]\n",
            minimal()
        );
        let points = parse_scenario(&text).unwrap().points().unwrap();
        assert_eq!(points.len(), 6);
        assert_eq!(points[4].params.d, 4.0);
        assert_eq!(points[4].initial, vec![1, 1, 1, 1, -1, -1, -1, -1]);
        assert_eq!(points[5].initial, vec![1, 1, -1, -1, 1, 1, -1, -1]);
    }

    #[test]
    fn evolve_ignores_the_sweep() {
        let text = format!("task = \"evolve\"\n{}[[sweep]]\nparam = \"h0\"\nvalues = [0, 1]\n", minimal());
        assert_eq!(parse_scenario(&text).unwrap().points().unwrap().len(), 1);
    }

    #[test]
    fn theta_and_couplings_are_exclusive() {
        let text = minimal().replace("theta = 0", "theta = 0\nj1 = 1.0");
        assert!(parse_scenario(&text).is_err());
        let explicit = minimal().replace("theta = 0", "j1 = 0.5\nj2 = -0.25");
        let p = parse_scenario(&explicit).unwrap().points().unwrap()[0].params;
        assert_eq!((p.j1, p.j2, p.theta), (0.5, -0.25, None));
    }

    #[test]
    fn window_must_meet_the_grid() {
        let text = format!("{}[evolution]\nt_max = 10\n", minimal());
        assert!(parse_scenario(&text).is_err());
        let text = format!("{}[evolution]\nt_max = 10\n[observables]\nwindow = [5, 10]\n", minimal());
        assert!(parse_scenario(&text).is_ok());
    }

    #[test]
    fn scaling_requires_directive_states() {
        let text = "task = \"scaling\"\ninitial_state = \"single_island(2)\"\n[model]\nsites = 4\ntwo_s = 3\n\
                    [scaling]\nsites = [4, 6]\ncases = [{d = 0, h0 = 0}, {d = 8}]\n";
        let cfg = parse_scenario(text).unwrap();
        let pts = cfg.scaling_points().unwrap();
        assert_eq!(pts.len(), 4);
        assert_eq!(pts[1].1.initial, vec![-3, -3, 3, 3, -3, -3]);
        assert_eq!(pts[3].1.params.d, 8.0);
        let fixed = text.replace("single_island(2)", "-3,3,3,-3");
        assert!(parse_scenario(&fixed).is_err());
    }
}
