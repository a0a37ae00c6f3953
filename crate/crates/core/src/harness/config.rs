//! Experiment configuration files.
//!
//! The format is line oriented UTF-8:
//!
//! ```text
//! # comment
//! [dirichlet]
//! seed = 7
//! step_size = 0.005
//! inner_steps_sweep = 1, 5, 10, 20
//! ```
//!
//! Exactly one `[section]` header names the experiment; every other non-blank
//! line is `key = value`. Unknown and duplicate keys are rejected. Vectors are
//! comma-separated numbers and booleans are `true`/`false`.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExperimentKind {
    Blr,
    SimplexQuadratic,
    Dirichlet,
    Custom,
}

impl ExperimentKind {
    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::Blr => "blr",
            ExperimentKind::SimplexQuadratic => "simplex_quadratic",
            ExperimentKind::Dirichlet => "dirichlet",
            ExperimentKind::Custom => "custom",
        }
    }
}

impl FromStr for ExperimentKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "blr" => Ok(ExperimentKind::Blr),
            "simplex_quadratic" | "simplex-quadratic" => Ok(ExperimentKind::SimplexQuadratic),
            "dirichlet" => Ok(ExperimentKind::Dirichlet),
            "custom" => Ok(ExperimentKind::Custom),
            other => Err(format!("unknown experiment `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SamplerChoice {
    Mla,
    Ula,
    Pla,
}

impl SamplerChoice {
    pub fn name(&self) -> &'static str {
        match self {
            SamplerChoice::Mla => "mla",
            SamplerChoice::Ula => "ula",
            SamplerChoice::Pla => "pla",
        }
    }
}

impl FromStr for SamplerChoice {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "mla" => Ok(SamplerChoice::Mla),
            "ula" => Ok(SamplerChoice::Ula),
            "pla" => Ok(SamplerChoice::Pla),
            other => Err(format!("unknown sampler `{other}`")),
        }
    }
}

/// Mirror map of a `custom` experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MirrorChoice {
    Euclidean,
    Box,
    Simplex,
    Weighted,
}

impl MirrorChoice {
    pub fn name(&self) -> &'static str {
        match self {
            MirrorChoice::Euclidean => "euclidean",
            MirrorChoice::Box => "box",
            MirrorChoice::Simplex => "simplex",
            MirrorChoice::Weighted => "weighted",
        }
    }
}

impl FromStr for MirrorChoice {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "euclidean" => Ok(MirrorChoice::Euclidean),
            "box" => Ok(MirrorChoice::Box),
            "simplex" => Ok(MirrorChoice::Simplex),
            "weighted" => Ok(MirrorChoice::Weighted),
            other => Err(format!("unknown mirror map `{other}`")),
        }
    }
}

/// Potential of a `custom` experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PotentialChoice {
    Zero,
    /// Random `ÃÃᵀ` quadratic drawn from `matrix_seed`.
    Quadratic,
    /// Dirichlet potential with `weights`.
    Dirichlet,
}

impl PotentialChoice {
    pub fn name(&self) -> &'static str {
        match self {
            PotentialChoice::Zero => "zero",
            PotentialChoice::Quadratic => "quadratic",
            PotentialChoice::Dirichlet => "dirichlet",
        }
    }
}

impl FromStr for PotentialChoice {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "zero" => Ok(PotentialChoice::Zero),
            "quadratic" => Ok(PotentialChoice::Quadratic),
            "dirichlet" => Ok(PotentialChoice::Dirichlet),
            other => Err(format!("unknown potential `{other}`")),
        }
    }
}

/// A fully resolved experiment description.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    /// Sampler used by single runs (`sample`) and `custom` experiments.
    pub sampler: SamplerChoice,
    pub dimension: usize,
    pub step_size: f64,
    /// Step size of the projected baseline in comparison experiments.
    pub pla_step_size: f64,
    pub inner_steps: usize,
    /// Inner-step counts swept by the Dirichlet experiment.
    pub inner_steps_sweep: Vec<usize>,
    pub iterations: usize,
    pub chains: usize,
    pub trials: usize,
    pub burn_in: usize,
    pub seed: u64,
    /// Number of logistic observations.
    pub n: usize,
    /// Fill value of the true logistic parameter.
    pub theta_star: f64,
    /// Optional CSV dataset replacing the synthetic logistic data.
    pub dataset: Option<PathBuf>,
    pub matrix_seed: u64,
    /// Iterations of the long MLA run used as reference when rejection
    /// sampling is infeasible (`d > 3`).
    pub reference_iterations: usize,
    pub weights: Vec<f64>,
    pub mirror: MirrorChoice,
    pub potential: PotentialChoice,
}

impl ExperimentConfig {
    /// Documented defaults for each experiment.
    pub fn defaults(experiment: ExperimentKind) -> Self {
        let base = Self {
            experiment,
            sampler: SamplerChoice::Mla,
            dimension: 10,
            step_size: 0.005,
            pla_step_size: 0.005,
            inner_steps: 10,
            inner_steps_sweep: vec![1, 5, 10, 20],
            iterations: 30,
            chains: 30,
            trials: 10,
            burn_in: 0,
            seed: 0,
            n: 1000,
            theta_star: 0.9,
            dataset: None,
            matrix_seed: 0,
            reference_iterations: 300,
            weights: vec![2.0; 11],
            mirror: MirrorChoice::Box,
            potential: PotentialChoice::Zero,
        };
        match experiment {
            ExperimentKind::Blr => Self {
                iterations: 500,
                ..base
            },
            ExperimentKind::SimplexQuadratic => Self {
                dimension: 100,
                pla_step_size: 1e-6,
                chains: 256,
                ..base
            },
            ExperimentKind::Dirichlet => Self {
                chains: 256,
                ..base
            },
            ExperimentKind::Custom => Self {
                dimension: 2,
                step_size: 0.01,
                iterations: 1000,
                trials: 1,
                ..base
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Validation(m));
        if !(self.step_size > 0.0 && self.step_size.is_finite()) {
            return fail(format!("step_size must be positive, got {}", self.step_size));
        }
        if !(self.pla_step_size > 0.0 && self.pla_step_size.is_finite()) {
            return fail(format!("pla_step_size must be positive, got {}", self.pla_step_size));
        }
        for (name, v) in [
            ("dimension", self.dimension),
            ("inner_steps", self.inner_steps),
            ("iterations", self.iterations),
            ("chains", self.chains),
            ("trials", self.trials),
            ("n", self.n),
            ("reference_iterations", self.reference_iterations),
        ] {
            if v == 0 {
                return fail(format!("{name} must be at least 1"));
            }
        }
        if self.burn_in >= self.iterations {
            return fail(format!(
                "burn_in ({}) must be below iterations ({})",
                self.burn_in, self.iterations
            ));
        }
        if self.inner_steps_sweep.is_empty() || self.inner_steps_sweep.contains(&0) {
            return fail("inner_steps_sweep must be a non-empty list of positive counts".into());
        }
        if let Some(&w) = self.weights.iter().find(|&&a| !(a > 0.0 && a.is_finite())) {
            return fail(format!("weights must be positive, got {w}"));
        }
        let uses_weights = self.experiment == ExperimentKind::Dirichlet
            || (self.experiment == ExperimentKind::Custom
                && (self.mirror == MirrorChoice::Weighted
                    || self.potential == PotentialChoice::Dirichlet));
        if uses_weights && self.weights.len() != self.dimension + 1 {
            return fail(format!(
                "{} weights given for dimension {} (need dimension + 1)",
                self.weights.len(),
                self.dimension
            ));
        }
        if !self.theta_star.is_finite()
            || (self.experiment == ExperimentKind::Blr && self.theta_star.abs() >= 1.0)
        {
            return fail(format!("theta_star must lie in (-1, 1), got {}", self.theta_star));
        }
        Ok(())
    }

    /// Serializes every field in the file format.
    pub fn to_config_string(&self) -> String {
        let list = |v: &[f64]| v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(", ");
        let mut s = String::new();
        let _ = writeln!(s, "[{}]", self.experiment.name());
        let _ = writeln!(s, "sampler = {}", self.sampler.name());
        let _ = writeln!(s, "dimension = {}", self.dimension);
        let _ = writeln!(s, "step_size = {:?}", self.step_size);
        let _ = writeln!(s, "pla_step_size = {:?}", self.pla_step_size);
        let _ = writeln!(s, "inner_steps = {}", self.inner_steps);
        let sweep: Vec<String> = self.inner_steps_sweep.iter().map(|k| k.to_string()).collect();
        let _ = writeln!(s, "inner_steps_sweep = {}", sweep.join(", "));
        let _ = writeln!(s, "iterations = {}", self.iterations);
        let _ = writeln!(s, "chains = {}", self.chains);
        let _ = writeln!(s, "trials = {}", self.trials);
        let _ = writeln!(s, "burn_in = {}", self.burn_in);
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "n = {}", self.n);
        let _ = writeln!(s, "theta_star = {:?}", self.theta_star);
        if let Some(p) = &self.dataset {
            let _ = writeln!(s, "dataset = {}", p.display());
        }
        let _ = writeln!(s, "matrix_seed = {}", self.matrix_seed);
        let _ = writeln!(s, "reference_iterations = {}", self.reference_iterations);
        let _ = writeln!(s, "weights = {}", list(&self.weights));
        let _ = writeln!(s, "mirror = {}", self.mirror.name());
        let _ = writeln!(s, "potential = {}", self.potential.name());
        s
    }
}

fn parse_value<T: FromStr>(line: usize, key: &str, raw: &str) -> Result<T> {
    raw.parse().map_err(|_| Error::Parse {
        line,
        message: format!("invalid value `{raw}` for `{key}`"),
    })
}

fn parse_list<T: FromStr>(line: usize, key: &str, raw: &str) -> Result<Vec<T>> {
    raw.split(',')
        .map(|item| parse_value(line, key, item.trim()))
        .collect()
}

fn parse_enum<T: FromStr<Err = String>>(line: usize, raw: &str) -> Result<T> {
    raw.parse().map_err(|message| Error::Parse { line, message })
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let mut cfg: Option<ExperimentConfig> = None;
    let mut seen = HashSet::new();
    let mut dimension_set = false;
    let mut weights_set = false;

    for (idx, raw_line) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw_line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix('[') {
            let name = rest.strip_suffix(']').ok_or_else(|| Error::Parse {
                line,
                message: "unterminated section header".into(),
            })?;
            if cfg.is_some() {
                return Err(Error::Parse {
                    line,
                    message: "only one experiment section is allowed per file".into(),
                });
            }
            cfg = Some(ExperimentConfig::defaults(parse_enum(line, name.trim())?));
            continue;
        }
        let cfg = cfg.as_mut().ok_or_else(|| Error::Parse {
            line,
            message: "key before the experiment section header".into(),
        })?;
        let (key, value) = content.split_once('=').ok_or_else(|| Error::Parse {
            line,
            message: format!("expected `key = value`, got `{content}`"),
        })?;
        let (key, value) = (key.trim(), value.trim());
        if !seen.insert(key.to_string()) {
            return Err(Error::Parse {
                line,
                message: format!("duplicate key `{key}`"),
            });
        }
        match key {
            "sampler" => cfg.sampler = parse_enum(line, value)?,
            "dimension" => {
                cfg.dimension = parse_value(line, key, value)?;
                dimension_set = true;
            }
            "step_size" => cfg.step_size = parse_value(line, key, value)?,
            "pla_step_size" => cfg.pla_step_size = parse_value(line, key, value)?,
            "inner_steps" => cfg.inner_steps = parse_value(line, key, value)?,
            "inner_steps_sweep" => cfg.inner_steps_sweep = parse_list(line, key, value)?,
            "iterations" => cfg.iterations = parse_value(line, key, value)?,
            "chains" => cfg.chains = parse_value(line, key, value)?,
            "trials" => cfg.trials = parse_value(line, key, value)?,
            "burn_in" => cfg.burn_in = parse_value(line, key, value)?,
            "seed" => cfg.seed = parse_value(line, key, value)?,
            "n" => cfg.n = parse_value(line, key, value)?,
            "theta_star" => cfg.theta_star = parse_value(line, key, value)?,
            "dataset" => cfg.dataset = Some(PathBuf::from(value)),
            "matrix_seed" => cfg.matrix_seed = parse_value(line, key, value)?,
            "reference_iterations" => cfg.reference_iterations = parse_value(line, key, value)?,
            "weights" => {
                cfg.weights = parse_list(line, key, value)?;
                weights_set = true;
            }
            "mirror" => cfg.mirror = parse_enum(line, value)?,
            "potential" => cfg.potential = parse_enum(line, value)?,
            other => {
                return Err(Error::Parse {
                    line,
                    message: format!("unknown key `{other}`"),
                })
            }
        }
    }

    let mut cfg = cfg.ok_or(Error::Parse {
        line: text.lines().count().max(1),
        message: "missing experiment section header".into(),
    })?;
    // Weights and dimension determine each other when only one is given.
    if weights_set && !dimension_set {
        cfg.dimension = cfg.weights.len().saturating_sub(1);
    } else if dimension_set && !weights_set {
        cfg.weights = vec![2.0; cfg.dimension + 1];
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    parse_config(&std::fs::read_to_string(path)?)
}
