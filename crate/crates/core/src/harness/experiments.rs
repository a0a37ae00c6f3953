//! Orchestration of the three benchmark experiments and of single runs.
//!
//! Chain `c` of trial `t` draws its noise from the stream derived from
//! `(seed, experiment tag, t, c)`; data and reference clouds use reserved
//! indices on the same path. Chains run in parallel and records are sorted
//! before output, so results are independent of scheduling.

use nalgebra::DMatrix;
use rand::Rng;
use rayon::prelude::*;

use super::config::{ExperimentConfig, ExperimentKind, MirrorChoice, PotentialChoice, SamplerChoice};
use super::data::{generate_logistic_data, read_dataset};
use super::records::RunRecord;
use crate::error::{Error, Result};
use crate::mirror::MirrorMap;
use crate::oracle::{dirichlet_mean, OracleSpec, RejectionSampler, Support};
use crate::potentials::{LogisticDataset, Potential};
use crate::rng::{derive_seed, tag, Stream};
use crate::samplers::{run_chain, Projection, Sampler, SamplerConfig, Trajectory};
use crate::transport::{empirical_w2_sq, per_coordinate_moments, posterior_mean_error, EmpiricalMeasure};

const DATA_STREAM: u64 = u64::MAX;
const REFERENCE_STREAM: u64 = u64::MAX - 1;

/// Largest dimension for which the rejection reference is used.
pub const REJECTION_MAX_DIM: usize = 3;

/// `A = ÃÃᵀ` with `Ã` uniform on `[−1, 1]^{d×d}`, rescaled so that the
/// largest entry magnitude is 1.
pub fn random_quadratic(dim: usize, matrix_seed: u64) -> Result<Potential> {
    let mut rng = Stream::new(matrix_seed);
    let raw = DMatrix::from_fn(dim, dim, |_, _| rng.random_range(-1.0..1.0));
    let mut a = &raw * raw.transpose();
    let scale = a.amax();
    if scale > 0.0 {
        a /= scale;
    }
    // Exact symmetry despite rounding in the product.
    let a = DMatrix::from_fn(dim, dim, |i, j| if i <= j { a[(i, j)] } else { a[(j, i)] });
    Potential::quadratic(a)
}

/// Mirror map, potential, projection and start point of one sampling problem.
#[derive(Debug, Clone)]
pub struct Target {
    pub map: MirrorMap,
    pub potential: Potential,
    pub projection: Option<Projection>,
    pub start: Vec<f64>,
}

impl Target {
    fn sampler(&self, choice: SamplerChoice) -> Result<Sampler> {
        Ok(match choice {
            SamplerChoice::Mla => Sampler::Mla,
            SamplerChoice::Ula => Sampler::Ula,
            SamplerChoice::Pla => Sampler::Pla(self.projection.ok_or_else(|| {
                Error::Validation("pla needs a constrained target".into())
            })?),
        })
    }
}

/// The logistic data set of trial `trial`: read from `cfg.dataset` when set,
/// otherwise generated from the trial's data stream.
pub fn logistic_data(cfg: &ExperimentConfig, trial: usize) -> Result<LogisticDataset> {
    match &cfg.dataset {
        Some(path) => {
            let ds = read_dataset(path)?;
            if ds.dim() != cfg.dimension {
                return Err(Error::Validation(format!(
                    "dataset has dimension {}, config says {}",
                    ds.dim(),
                    cfg.dimension
                )));
            }
            Ok(ds)
        }
        None => {
            let theta = vec![cfg.theta_star; cfg.dimension];
            let mut rng = Stream::derived(cfg.seed, &[tag(cfg.experiment.name()), trial as u64, DATA_STREAM]);
            generate_logistic_data(cfg.n, &theta, &mut rng)
        }
    }
}

/// Builds the sampling problem described by `cfg` for one trial.
pub fn build_target(cfg: &ExperimentConfig, trial: usize) -> Result<Target> {
    let d = cfg.dimension;
    Ok(match cfg.experiment {
        ExperimentKind::Blr => Target {
            map: MirrorMap::box_log_barrier(d),
            potential: Potential::logistic(logistic_data(cfg, trial)?),
            projection: Some(Projection::Box),
            start: vec![0.0; d],
        },
        ExperimentKind::SimplexQuadratic => {
            let map = MirrorMap::simplex_barrier(d);
            Target {
                start: map.center(),
                map,
                potential: random_quadratic(d, cfg.matrix_seed)?,
                projection: Some(Projection::Simplex),
            }
        }
        ExperimentKind::Dirichlet => {
            let map = MirrorMap::weighted_simplex_barrier(cfg.weights.clone())?;
            Target {
                start: map.center(),
                potential: Potential::WeightedBarrier(map.clone()),
                map,
                projection: Some(Projection::Simplex),
            }
        }
        ExperimentKind::Custom => {
            let (map, projection) = match cfg.mirror {
                MirrorChoice::Euclidean => (MirrorMap::euclidean(d), None),
                MirrorChoice::Box => (MirrorMap::box_log_barrier(d), Some(Projection::Box)),
                MirrorChoice::Simplex => (MirrorMap::simplex_barrier(d), Some(Projection::Simplex)),
                MirrorChoice::Weighted => (
                    MirrorMap::weighted_simplex_barrier(cfg.weights.clone())?,
                    Some(Projection::Simplex),
                ),
            };
            let potential = match cfg.potential {
                PotentialChoice::Zero => Potential::zero(d),
                PotentialChoice::Quadratic => random_quadratic(d, cfg.matrix_seed)?,
                PotentialChoice::Dirichlet => Potential::weighted_barrier(cfg.weights.clone())?,
            };
            Target {
                start: map.center(),
                map,
                potential,
                projection,
            }
        }
    })
}

/// Runs `chains` independent chains; chain `c` uses the stream at
/// `path ++ [c]`.
pub fn run_chains(
    target: &Target,
    sampler: Sampler,
    step_size: f64,
    inner_steps: usize,
    iterations: usize,
    chains: usize,
    seed: u64,
    path: &[u64],
) -> Result<Vec<Trajectory>> {
    let base = SamplerConfig::new(step_size, inner_steps, iterations, 0);
    base.validate()?;
    (0..chains)
        .into_par_iter()
        .map(|c| {
            let mut full = path.to_vec();
            full.push(c as u64);
            let cfg = SamplerConfig {
                seed: derive_seed(seed, &full),
                ..base
            };
            run_chain(&target.map, &target.potential, sampler, &target.start, &cfg)
        })
        .collect()
}

/// Cross-chain cloud at iteration `k`.
pub fn cloud_at(trajectories: &[Trajectory], k: usize) -> Vec<Vec<f64>> {
    trajectories.iter().map(|t| t.states[k].clone()).collect()
}

fn record(
    cfg: &ExperimentConfig,
    sampler: &str,
    inner_steps: usize,
    trial: usize,
    iteration: usize,
    metric: &str,
    value: f64,
) -> RunRecord {
    RunRecord {
        experiment: cfg.experiment.name().to_string(),
        sampler: sampler.to_string(),
        inner_steps,
        trial,
        iteration,
        metric: metric.to_string(),
        value,
    }
}

fn inner_of(sampler: Sampler, inner: usize) -> usize {
    match sampler {
        Sampler::Mla => inner,
        _ => 0,
    }
}

/// Posterior-mean error of MLA (box barrier) and PLA for Bayesian logistic
/// regression; one record per (sampler, trial, iteration).
pub fn run_experiment_blr(cfg: &ExperimentConfig) -> Result<Vec<RunRecord>> {
    let theta_star = vec![cfg.theta_star; cfg.dimension];
    let exp_tag = tag(cfg.experiment.name());
    let mut out = Vec::new();
    for trial in 0..cfg.trials {
        let target = build_target(cfg, trial)?;
        let path = [exp_tag, trial as u64];
        for (sampler, eta) in [
            (Sampler::Mla, cfg.step_size),
            (Sampler::Pla(Projection::Box), cfg.pla_step_size),
        ] {
            let trajs = run_chains(&target, sampler, eta, cfg.inner_steps, cfg.iterations, cfg.chains, cfg.seed, &path)?;
            for k in 1..=cfg.iterations {
                let err = posterior_mean_error(&cloud_at(&trajs, k), &theta_star, 0)?;
                out.push(record(cfg, sampler.name(), inner_of(sampler, cfg.inner_steps), trial, k, "posterior_mean_error", err));
            }
        }
    }
    Ok(out)
}

fn w2_curve(
    cfg: &ExperimentConfig,
    trajs: &[Trajectory],
    reference: &EmpiricalMeasure,
    metric: &str,
    sampler: Sampler,
    inner: usize,
    trial: usize,
    out: &mut Vec<RunRecord>,
) -> Result<()> {
    for k in 1..=cfg.iterations {
        let cloud = EmpiricalMeasure::new(cloud_at(trajs, k))?;
        let w2 = empirical_w2_sq(&cloud, reference)?;
        out.push(record(cfg, sampler.name(), inner_of(sampler, inner), trial, k, metric, w2));
    }
    Ok(())
}

/// Reference cloud for the quadratic-on-simplex target and its metric name.
pub fn simplex_quadratic_reference(
    cfg: &ExperimentConfig,
    target: &Target,
    trial: usize,
) -> Result<(EmpiricalMeasure, &'static str)> {
    let d = cfg.dimension;
    let path = [tag(cfg.experiment.name()), trial as u64, REFERENCE_STREAM];
    if d <= REJECTION_MAX_DIM {
        let sampler = RejectionSampler::new(
            target.potential.clone(),
            vec![0.0; d],
            vec![1.0; d],
            Support::FilledSimplex,
            1.0,
        )?;
        let mut rng = Stream::derived(cfg.seed, &path);
        let cloud = OracleSpec::Rejection(sampler).cloud(cfg.chains, &mut rng)?;
        Ok((EmpiricalMeasure::new(cloud)?, "w2sq"))
    } else {
        let trajs = run_chains(
            target,
            Sampler::Mla,
            cfg.step_size,
            cfg.inner_steps,
            cfg.reference_iterations,
            cfg.chains,
            cfg.seed,
            &path,
        )?;
        let cloud = cloud_at(&trajs, cfg.reference_iterations);
        Ok((EmpiricalMeasure::new(cloud)?, "w2sq_vs_selfref"))
    }
}

/// `W₂²` to the target for MLA (simplex barrier) and PLA on a quadratic
/// potential over the filled simplex.
pub fn run_experiment_simplex_quadratic(cfg: &ExperimentConfig) -> Result<Vec<RunRecord>> {
    let exp_tag = tag(cfg.experiment.name());
    let mut out = Vec::new();
    for trial in 0..cfg.trials {
        let target = build_target(cfg, trial)?;
        let (reference, metric) = simplex_quadratic_reference(cfg, &target, trial)?;
        let path = [exp_tag, trial as u64];
        for (sampler, eta) in [
            (Sampler::Mla, cfg.step_size),
            (Sampler::Pla(Projection::Simplex), cfg.pla_step_size),
        ] {
            let trajs = run_chains(&target, sampler, eta, cfg.inner_steps, cfg.iterations, cfg.chains, cfg.seed, &path)?;
            w2_curve(cfg, &trajs, &reference, metric, sampler, cfg.inner_steps, trial, &mut out)?;
        }
    }
    Ok(out)
}

/// MLA with `φ = V` on a Dirichlet target for each inner-step count in the
/// sweep; records `W₂²` to a gamma-construction reference and the sup-norm
/// error of the cloud mean.
pub fn run_experiment_dirichlet(cfg: &ExperimentConfig) -> Result<Vec<RunRecord>> {
    let exp_tag = tag(cfg.experiment.name());
    let mean = dirichlet_mean(&cfg.weights);
    let mut out = Vec::new();
    for trial in 0..cfg.trials {
        let target = build_target(cfg, trial)?;
        let mut rng = Stream::derived(cfg.seed, &[exp_tag, trial as u64, REFERENCE_STREAM]);
        let reference =
            EmpiricalMeasure::new(OracleSpec::DirichletGamma(cfg.weights.clone()).cloud(cfg.chains, &mut rng)?)?;
        let path = [exp_tag, trial as u64];
        for &inner in &cfg.inner_steps_sweep {
            let trajs = run_chains(&target, Sampler::Mla, cfg.step_size, inner, cfg.iterations, cfg.chains, cfg.seed, &path)?;
            w2_curve(cfg, &trajs, &reference, "w2sq", Sampler::Mla, inner, trial, &mut out)?;
            for k in 1..=cfg.iterations {
                let cloud = cloud_at(&trajs, k);
                let n = cloud.len() as f64;
                let err = (0..cfg.dimension)
                    .map(|j| (cloud.iter().map(|p| p[j]).sum::<f64>() / n - mean[j]).abs())
                    .fold(0.0, f64::max);
                out.push(record(cfg, "mla", inner, trial, k, "mean_err", err));
            }
        }
    }
    Ok(out)
}

/// One sampler on the configured target: per-iteration cross-chain means
/// (`mean_x{j}`) and variances (`var_x{j}`), plus the pooled post-burn-in
/// mean (`pooled_mean_x{j}`) at the last iteration.
pub fn run_single(cfg: &ExperimentConfig) -> Result<Vec<RunRecord>> {
    let exp_tag = tag(cfg.experiment.name());
    let mut out = Vec::new();
    for trial in 0..cfg.trials {
        let target = build_target(cfg, trial)?;
        let sampler = target.sampler(cfg.sampler)?;
        let eta = match sampler {
            Sampler::Pla(_) => cfg.pla_step_size,
            _ => cfg.step_size,
        };
        let inner = inner_of(sampler, cfg.inner_steps);
        let trajs = run_chains(&target, sampler, eta, cfg.inner_steps, cfg.iterations, cfg.chains, cfg.seed, &[exp_tag, trial as u64])?;
        for k in 1..=cfg.iterations {
            let cloud = cloud_at(&trajs, k);
            let n = cloud.len() as f64;
            for j in 0..cfg.dimension {
                let m = cloud.iter().map(|p| p[j]).sum::<f64>() / n;
                out.push(record(cfg, sampler.name(), inner, trial, k, &format!("mean_x{}", j + 1), m));
            }
            if cloud.len() >= 2 {
                let moments = per_coordinate_moments(&cloud)?;
                for (j, v) in moments.variances.iter().enumerate() {
                    out.push(record(cfg, sampler.name(), inner, trial, k, &format!("var_x{}", j + 1), *v));
                }
            }
        }
        let pooled: Vec<Vec<f64>> = trajs
            .iter()
            .flat_map(|t| t.states[cfg.burn_in + 1..].iter().cloned())
            .collect();
        let n = pooled.len() as f64;
        for j in 0..cfg.dimension {
            let m = pooled.iter().map(|p| p[j]).sum::<f64>() / n;
            out.push(record(cfg, sampler.name(), inner, trial, cfg.iterations, &format!("pooled_mean_x{}", j + 1), m));
        }
    }
    Ok(out)
}

/// Runs the comparison experiment named by `cfg.experiment`; `custom`
/// configurations fall back to [`run_single`].
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<RunRecord>> {
    cfg.validate()?;
    match cfg.experiment {
        ExperimentKind::Blr => run_experiment_blr(cfg),
        ExperimentKind::SimplexQuadratic => run_experiment_simplex_quadratic(cfg),
        ExperimentKind::Dirichlet => run_experiment_dirichlet(cfg),
        ExperimentKind::Custom => run_single(cfg),
    }
}
