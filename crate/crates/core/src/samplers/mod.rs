//! The mirror-Langevin algorithm and its Euclidean baselines.
//!
//! One MLA iteration is a deterministic mirror-descent step followed by a pure
//! diffusion in dual coordinates:
//!
//! 1. `∇φ(X_{k+½}) = ∇φ(X_k) − η ∇V(X_k)`;
//! 2. starting from `W = ∇φ(X_{k+½})`, run `dW = √2 [∇²φ(∇φ*(W))]^{1/2} dB` for
//!    time `η` and set `X_{k+1} = ∇φ*(W_η)`.
//!
//! The diffusion is simulated with `inner_steps` Euler–Maruyama substeps, each
//! using the Hessian factor at the current inner iterate and consuming `d`
//! standard normals. The half step consumes no noise. With `φ = ‖·‖²/2` and a
//! single substep this is exactly the unadjusted Langevin algorithm.

mod projection;
mod schedule;

pub use projection::{project_box, project_simplex, Projection};
pub use schedule::{iterations_strong, iterations_weak, step_size_strong, step_size_weak};

use rand::Rng;

use crate::error::{Error, Result};
use crate::mirror::MirrorMap;
use crate::potentials::Potential;
use crate::rng::{NoiseSource, Stream};

/// Relative tolerance of the runtime half-step certificate.
pub const STATIONARITY_TOL: f64 = 1e-8;

/// Multiple of the forward rounding bound tolerated by the certificate.
const ROUNDING_SLACK: f64 = 8.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplerConfig {
    pub step_size: f64,
    pub inner_steps: usize,
    pub iterations: usize,
    pub seed: u64,
}

impl SamplerConfig {
    pub fn new(step_size: f64, inner_steps: usize, iterations: usize, seed: u64) -> Self {
        Self {
            step_size,
            inner_steps,
            iterations,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step_size > 0.0 && self.step_size.is_finite()) {
            return Err(Error::Validation(format!(
                "step_size must be positive, got {}",
                self.step_size
            )));
        }
        if self.inner_steps == 0 {
            return Err(Error::Validation("inner_steps must be at least 1".into()));
        }
        Ok(())
    }

    /// Validation for runs that rely on the convergence theorems, which need
    /// `η ≤ 1/β′`.
    pub fn validate_for(&self, beta_prime: f64) -> Result<()> {
        self.validate()?;
        if self.step_size * beta_prime > 1.0 {
            return Err(Error::Validation(format!(
                "step_size {} exceeds 1/beta' = {}",
                self.step_size,
                beta_prime.recip()
            )));
        }
        Ok(())
    }
}

/// Current MLA iterate with its cached mirror image.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainState {
    pub primal: Vec<f64>,
    pub dual: Vec<f64>,
    pub step_index: usize,
}

impl ChainState {
    pub fn new(map: &MirrorMap, x0: Vec<f64>) -> Result<Self> {
        let dual = map.grad(&x0)?;
        Ok(Self {
            primal: x0,
            dual,
            step_index: 0,
        })
    }
}

/// Recorded iterates `X_0, …, X_N` of one chain.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trajectory {
    pub states: Vec<Vec<f64>>,
}

impl Trajectory {
    /// Number of post-initial iterates `N`.
    pub fn iterations(&self) -> usize {
        self.states.len().saturating_sub(1)
    }

    pub fn last(&self) -> Option<&[f64]> {
        self.states.last().map(Vec::as_slice)
    }
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Inverts a dual point produced by a half step and checks the optimality
/// condition `∇φ(x₊) = target` of the Bregman proximal problem.
///
/// Near the boundary `x₊` cannot be represented well enough for the residual
/// to reach the relative tolerance (a rounded preimage of `target` already
/// misses it by about `ε‖target‖‖x₊‖²‖∇²φ(x₊)‖`), so that rounding allowance
/// is added to the tolerance.
fn certified_inverse(map: &MirrorMap, target: &[f64]) -> Result<Vec<f64>> {
    let x = map.dual_grad(target)?;
    let back = map.grad(&x)?;
    let residual = inf_norm(
        &back
            .iter()
            .zip(target)
            .map(|(a, b)| a - b)
            .collect::<Vec<_>>(),
    );
    let size = inf_norm(target).max(1.0);
    let x_size = inf_norm(&x).max(1.0);
    let rounding = ROUNDING_SLACK * f64::EPSILON * size * x_size * x_size * map.hessian_inf_norm(&x)?;
    if residual > STATIONARITY_TOL * size + rounding {
        return Err(Error::Stationarity(residual));
    }
    Ok(x)
}

/// Dual image of the mirror-descent half step, `∇φ(x) − η∇V(x)`, given `∇φ(x)`.
fn half_step_dual(p: &Potential, x: &[f64], dual: &[f64], eta: f64) -> Result<(Vec<f64>, bool)> {
    let g = p.grad(x)?;
    let mut moved = false;
    let out = dual
        .iter()
        .zip(&g)
        .map(|(y, gi)| {
            let step = eta * gi;
            moved |= step != 0.0;
            y - step
        })
        .collect();
    Ok((out, moved))
}

/// Mirror-descent half step `∇φ*(∇φ(x) − η∇V(x))`.
pub fn mla_half_step(map: &MirrorMap, p: &Potential, x: &[f64], eta: f64) -> Result<Vec<f64>> {
    let dual = map.grad(x)?;
    let (target, moved) = half_step_dual(p, x, &dual, eta)?;
    if !moved {
        return Ok(x.to_vec());
    }
    certified_inverse(map, &target)
}

/// Euler–Maruyama simulation of the dual diffusion from `(x, w = ∇φ(x))` for
/// time `eta`. Returns the final primal and dual points.
fn diffuse<N: NoiseSource + ?Sized>(
    map: &MirrorMap,
    mut x: Vec<f64>,
    mut w: Vec<f64>,
    eta: f64,
    inner: usize,
    noise: &mut N,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let d = map.dim();
    let h = eta / inner as f64;
    let scale = (2.0 * h).sqrt();
    let mut xi = vec![0.0; d];
    let mut kick = vec![0.0; d];
    let mut stale = false;
    for _ in 0..inner {
        noise.fill_standard_normal(&mut xi);
        if stale {
            map.dual_grad_into(&w, &mut x)?;
        }
        map.hessian_factor(&x)?.apply_into(&xi, &mut kick);
        for (wi, k) in w.iter_mut().zip(&kick) {
            let inc = scale * k;
            stale |= inc != 0.0;
            *wi += inc;
        }
    }
    if stale {
        map.dual_grad_into(&w, &mut x)?;
    }
    Ok((x, w))
}

/// Diffusion phase started at `x_half`, simulated with `inner` substeps.
pub fn mla_diffusion_step<N: NoiseSource + ?Sized>(
    map: &MirrorMap,
    x_half: &[f64],
    eta: f64,
    inner: usize,
    noise: &mut N,
) -> Result<Vec<f64>> {
    let w = map.grad(x_half)?;
    diffuse(map, x_half.to_vec(), w, eta, inner, noise).map(|(x, _)| x)
}

/// One full MLA iteration.
pub fn mla_step<N: NoiseSource + ?Sized>(
    map: &MirrorMap,
    p: &Potential,
    state: &ChainState,
    cfg: &SamplerConfig,
    noise: &mut N,
) -> Result<ChainState> {
    let eta = cfg.step_size;
    let (w, moved) = half_step_dual(p, &state.primal, &state.dual, eta)?;
    let x_half = if moved {
        certified_inverse(map, &w)?
    } else {
        state.primal.clone()
    };
    let (primal, dual) = diffuse(map, x_half, w, eta, cfg.inner_steps, noise)?;
    Ok(ChainState {
        primal,
        dual,
        step_index: state.step_index + 1,
    })
}

/// Unadjusted Langevin step `x − η∇V(x) + √(2η) ξ`.
pub fn ula_step<N: NoiseSource + ?Sized>(
    p: &Potential,
    x: &[f64],
    eta: f64,
    noise: &mut N,
) -> Result<Vec<f64>> {
    let g = p.grad(x)?;
    let scale = (2.0 * eta).sqrt();
    let mut xi = vec![0.0; x.len()];
    noise.fill_standard_normal(&mut xi);
    Ok(x.iter()
        .zip(&g)
        .zip(&xi)
        .map(|((xi_, gi), z)| (xi_ - eta * gi) + scale * z)
        .collect())
}

/// Projected Langevin step: a ULA step followed by Euclidean projection.
pub fn pla_step<N: NoiseSource + ?Sized>(
    p: &Potential,
    proj: Projection,
    x: &[f64],
    eta: f64,
    noise: &mut N,
) -> Result<Vec<f64>> {
    ula_step(p, x, eta, noise).map(|y| proj.apply(&y))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sampler {
    Mla,
    Ula,
    Pla(Projection),
}

impl Sampler {
    pub fn name(&self) -> &'static str {
        match self {
            Sampler::Mla => "mla",
            Sampler::Ula => "ula",
            Sampler::Pla(_) => "pla",
        }
    }
}

/// Runs `cfg.iterations` steps from `x0` with a stream seeded by `cfg.seed`.
pub fn run_chain(
    map: &MirrorMap,
    p: &Potential,
    sampler: Sampler,
    x0: &[f64],
    cfg: &SamplerConfig,
) -> Result<Trajectory> {
    let mut noise = Stream::new(cfg.seed);
    run_chain_with(map, p, sampler, x0, cfg, &mut noise)
}

/// As [`run_chain`], drawing noise from the given source.
pub fn run_chain_with<N: NoiseSource + ?Sized>(
    map: &MirrorMap,
    p: &Potential,
    sampler: Sampler,
    x0: &[f64],
    cfg: &SamplerConfig,
    noise: &mut N,
) -> Result<Trajectory> {
    let mut states = Vec::with_capacity(cfg.iterations + 1);
    states.push(x0.to_vec());
    let fail = |step: usize| move |e: Error| Error::Chain {
        step,
        source: Box::new(e),
    };
    match sampler {
        Sampler::Mla => {
            let mut state = ChainState::new(map, x0.to_vec()).map_err(fail(0))?;
            for k in 1..=cfg.iterations {
                state = mla_step(map, p, &state, cfg, noise).map_err(fail(k))?;
                states.push(state.primal.clone());
            }
        }
        Sampler::Ula | Sampler::Pla(_) => {
            let mut x = x0.to_vec();
            for k in 1..=cfg.iterations {
                x = match sampler {
                    Sampler::Pla(proj) => pla_step(p, proj, &x, cfg.step_size, noise),
                    _ => ula_step(p, &x, cfg.step_size, noise),
                }
                .map_err(fail(k))?;
                states.push(x.clone());
            }
        }
    }
    Ok(Trajectory { states })
}

/// Draws `X_K` with `K` uniform on `{1, …, N}`.
pub fn sample_from_mixture<'a, R: Rng + ?Sized>(traj: &'a Trajectory, rng: &mut R) -> Result<&'a [f64]> {
    let n = traj.iterations();
    if n == 0 {
        return Err(Error::Empty("trajectory"));
    }
    Ok(&traj.states[rng.random_range(1..=n)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use nalgebra::DMatrix;

    /// Replays a fixed sequence of normals, then zeros.
    struct Scripted(Vec<f64>, usize);

    impl NoiseSource for Scripted {
        fn standard_normal(&mut self) -> f64 {
            let v = self.0.get(self.1).copied().unwrap_or(0.0);
            self.1 += 1;
            v
        }
    }

    fn zeros() -> Scripted {
        Scripted(Vec::new(), 0)
    }

    #[test]
    fn half_step_examples() {
        let e = MirrorMap::euclidean(2);
        let q = Potential::quadratic(DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0])).unwrap();
        let x = [0.4, -0.3];
        let out = mla_half_step(&e, &q, &x, 0.1).unwrap();
        let g = q.grad(&x).unwrap();
        for i in 0..2 {
            assert_relative_eq!(out[i], x[i] - 0.1 * g[i], epsilon = 1e-15);
        }

        let s = MirrorMap::simplex_barrier(3);
        let y = [0.1, 0.2, 0.3];
        assert_eq!(mla_half_step(&s, &Potential::zero(3), &y, 0.5).unwrap(), y.to_vec());

        let b = MirrorMap::box_log_barrier(1);
        let out = mla_half_step(&b, &Potential::Linear(vec![1.0]), &[0.0], 1.0).unwrap();
        assert_relative_eq!(out[0], 1.0 - 2f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn diffusion_examples() {
        let e = MirrorMap::euclidean(1);
        let out = mla_diffusion_step(&e, &[0.3], 0.02, 1, &mut Scripted(vec![1.5], 0)).unwrap();
        assert_relative_eq!(out[0], 0.3 + 0.04f64.sqrt() * 1.5, epsilon = 1e-15);

        let s = MirrorMap::simplex_barrier(2);
        let x = [0.25, 0.6];
        assert_eq!(mla_diffusion_step(&s, &x, 0.1, 5, &mut zeros()).unwrap(), x.to_vec());

        let b = MirrorMap::box_log_barrier(1);
        let out = mla_diffusion_step(&b, &[0.0], 0.02, 1, &mut Scripted(vec![1.0], 0)).unwrap();
        let w = 0.2 * 2f64.sqrt();
        assert_relative_eq!(out[0], ((1.0 + w * w).sqrt() - 1.0) / w, epsilon = 1e-15);
        assert_relative_eq!(out[0], 0.138_701, epsilon = 1e-6);
    }

    #[test]
    fn each_inner_step_consumes_one_vector() {
        struct Counting(usize);
        impl NoiseSource for Counting {
            fn standard_normal(&mut self) -> f64 {
                self.0 += 1;
                0.1
            }
        }
        let mut c = Counting(0);
        let b = MirrorMap::box_log_barrier(3);
        mla_diffusion_step(&b, &[0.0; 3], 0.01, 7, &mut c).unwrap();
        assert_eq!(c.0, 21);
    }

    #[test]
    fn mla_step_matches_ula_under_euclidean_map() {
        let e = MirrorMap::euclidean(2);
        let q = Potential::quadratic(DMatrix::from_row_slice(2, 2, &[1.0, 0.3, 0.3, 0.5])).unwrap();
        let cfg = SamplerConfig::new(0.05, 1, 1, 0);
        let state = ChainState::new(&e, vec![0.2, 0.7]).unwrap();
        let next = mla_step(&e, &q, &state, &cfg, &mut Stream::new(3)).unwrap();
        let ula = ula_step(&q, &state.primal, 0.05, &mut Stream::new(3)).unwrap();
        assert_eq!(next.primal, ula);
        assert_eq!(next.step_index, 1);
    }

    #[test]
    fn zero_potential_step_is_pure_diffusion() {
        let b = MirrorMap::box_log_barrier(2);
        let cfg = SamplerConfig::new(0.01, 4, 1, 0);
        let state = ChainState::new(&b, vec![0.1, -0.4]).unwrap();
        let next = mla_step(&b, &Potential::zero(2), &state, &cfg, &mut Stream::new(9)).unwrap();
        let diff = mla_diffusion_step(&b, &state.primal, 0.01, 4, &mut Stream::new(9)).unwrap();
        for i in 0..2 {
            assert_relative_eq!(next.primal[i], diff[i], epsilon = 1e-14);
        }
    }

    #[test]
    fn zero_step_size_is_identity() {
        let s = MirrorMap::simplex_barrier(3);
        let q = Potential::quadratic(DMatrix::identity(3, 3)).unwrap();
        let cfg = SamplerConfig::new(0.0, 10, 1, 0);
        let state = ChainState::new(&s, vec![0.1, 0.3, 0.2]).unwrap();
        let next = mla_step(&s, &q, &state, &cfg, &mut Stream::new(1)).unwrap();
        assert_eq!(next.primal, state.primal);
        assert_eq!(next.dual, state.dual);
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn ula_and_pla_examples() {
        let z = Potential::zero(2);
        assert_eq!(ula_step(&z, &[0.3, 0.4], 0.1, &mut zeros()).unwrap(), vec![0.3, 0.4]);
        let q = Potential::quadratic(DMatrix::identity(2, 2)).unwrap();
        assert_eq!(ula_step(&q, &[1.0, 0.0], 0.5, &mut zeros()).unwrap(), vec![0.5, 0.0]);
        let out = pla_step(&z, Projection::Box, &[0.2, 0.1], 0.1, &mut zeros()).unwrap();
        assert_eq!(out, vec![0.2, 0.1]);
        let out = pla_step(&z, Projection::Simplex, &[0.8, 0.8], 0.1, &mut zeros()).unwrap();
        assert_relative_eq!(out[0], 0.5, epsilon = 1e-15);
    }

    #[test]
    fn ula_noise_variance() {
        let z = Potential::zero(1);
        let eta = 0.3;
        let mut rng = Stream::new(2024);
        let n = 100_000;
        let draws: Vec<f64> = (0..n).map(|_| ula_step(&z, &[0.0], eta, &mut rng).unwrap()[0]).collect();
        let mean = draws.iter().sum::<f64>() / n as f64;
        let var = draws.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!((var / (2.0 * eta) - 1.0).abs() < 0.05, "var {var}");
    }

    #[test]
    fn run_chain_basics() {
        let b = MirrorMap::box_log_barrier(2);
        let z = Potential::zero(2);
        let cfg0 = SamplerConfig::new(0.01, 2, 0, 5);
        assert_eq!(run_chain(&b, &z, Sampler::Mla, &[0.0, 0.0], &cfg0).unwrap().states, vec![vec![0.0, 0.0]]);
        let cfg = SamplerConfig::new(0.01, 2, 50, 5);
        let a = run_chain(&b, &z, Sampler::Mla, &[0.0, 0.0], &cfg).unwrap();
        let c = run_chain(&b, &z, Sampler::Mla, &[0.0, 0.0], &cfg).unwrap();
        assert_eq!(a, c);
        assert_eq!(a.iterations(), 50);
    }

    #[test]
    fn run_chain_reports_failing_step() {
        let s = MirrorMap::simplex_barrier(2);
        let err = run_chain(&s, &Potential::zero(2), Sampler::Mla, &[0.7, 0.7], &SamplerConfig::new(0.1, 1, 3, 0))
            .unwrap_err();
        assert!(matches!(err, Error::Chain { step: 0, .. }));
    }

    #[test]
    fn certificate_tolerates_rounding_near_the_slanted_face() {
        // 1 − Σx ≈ 4e-5 here; x₊ is exact to rounding but ∇φ(x₊) misses the
        // target by ~3.5e-4.
        let map = MirrorMap::simplex_barrier(3);
        let target = [24123.445030512685, 24035.625438267114, 24125.176862476226];
        let x = certified_inverse(&map, &target).unwrap();
        assert!(map.is_interior(&x));
        assert!((x[1] - 0.010985641487688835).abs() < 1e-12);
        assert!(matches!(
            certified_inverse(&map, &[f64::NAN, 0.0, 0.0]),
            Err(_)
        ));
    }

    #[test]
    fn mixture_sampling() {
        let traj = Trajectory {
            states: vec![vec![0.0], vec![1.0]],
        };
        let mut rng = Stream::new(0);
        for _ in 0..10 {
            assert_eq!(sample_from_mixture(&traj, &mut rng).unwrap(), &[1.0]);
        }
        let empty = Trajectory {
            states: vec![vec![0.0]],
        };
        assert!(matches!(sample_from_mixture(&empty, &mut rng), Err(Error::Empty(_))));

        let n = 5;
        let traj = Trajectory {
            states: (0..=n).map(|k| vec![k as f64]).collect(),
        };
        let draws = 100_000;
        let mut counts = vec![0usize; n + 1];
        for _ in 0..draws {
            counts[sample_from_mixture(&traj, &mut rng).unwrap()[0] as usize] += 1;
        }
        assert_eq!(counts[0], 0);
        let p = 1.0 / n as f64;
        let sd = (draws as f64 * p * (1.0 - p)).sqrt();
        for &c in &counts[1..] {
            assert!((c as f64 - draws as f64 * p).abs() < 3.0 * sd, "{counts:?}");
        }
    }
}
