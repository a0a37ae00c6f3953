//! Property suites behind `mla check --suite …`.
//!
//! Each suite is a fixed, seeded battery of the library's invariants and
//! returns one outcome per property; the CLI exits nonzero if any fails.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::mirror::{MapKind, MirrorMap};
use crate::oracle::{
    dirichlet_mean, dirichlet_variance, filled_dirichlet, sample_dirichlet_gamma, sample_uniform_l1_ball,
    RejectionSampler, Support,
};
use crate::potentials::{profile_simplex_quadratic, Potential};
use crate::rng::Stream;
use crate::samplers::{iterations_strong, iterations_weak, step_size_strong, step_size_weak};
use crate::samplers::{mla_half_step, mla_step, ula_step, ChainState, SamplerConfig};
use crate::transport::{bregman_matching, empirical_w2_sq, min_cost_assignment, EmpiricalMeasure};

use super::experiments::random_quadratic;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Geometry,
    Samplers,
    Transport,
    Oracle,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::Geometry, Suite::Samplers, Suite::Transport, Suite::Oracle];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Geometry => "geometry",
            Suite::Samplers => "samplers",
            Suite::Transport => "transport",
            Suite::Oracle => "oracle",
        }
    }
}

impl std::str::FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::Validation(format!("unknown suite `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    /// Worst observed value of the checked quantity.
    pub detail: String,
}

impl CheckOutcome {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        Self {
            name: name.to_string(),
            passed,
            detail,
        }
    }
}

pub fn run_suite(suite: Suite, seed: u64) -> Result<Vec<CheckOutcome>> {
    match suite {
        Suite::Geometry => geometry_suite(seed),
        Suite::Samplers => samplers_suite(seed),
        Suite::Transport => transport_suite(seed),
        Suite::Oracle => oracle_suite(seed),
    }
}

/// A random interior point of `map`'s domain, kept away from the boundary
/// by a relative margin of `1e-3`.
pub fn random_interior<R: Rng + ?Sized>(map: &MirrorMap, rng: &mut R) -> Vec<f64> {
    let d = map.dim();
    match map.kind() {
        MapKind::Euclidean => (0..d).map(|_| rng.random_range(-5.0..5.0)).collect(),
        MapKind::BoxLogBarrier => (0..d).map(|_| rng.random_range(-0.999..0.999)).collect(),
        MapKind::SimplexBarrier | MapKind::WeightedSimplexBarrier(_) => loop {
            let x = filled_dirichlet(&vec![1.0; d + 1], rng);
            let slack = 1.0 - x.iter().sum::<f64>();
            if x.iter().all(|&v| v > 1e-3 / d as f64) && slack > 1e-3 / d as f64 {
                break x;
            }
        },
    }
}

fn random_direction<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<f64> {
    (0..d).map(|_| rng.random_range(-1.0..1.0)).collect()
}

/// The four map families at dimension `d` (weighted with random weights).
pub fn all_maps<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<MirrorMap> {
    let weights = (0..=d).map(|_| rng.random_range(0.5..3.0)).collect();
    vec![
        MirrorMap::euclidean(d),
        MirrorMap::box_log_barrier(d),
        MirrorMap::simplex_barrier(d),
        MirrorMap::weighted_simplex_barrier(weights).expect("positive weights"),
    ]
}

fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn geometry_suite(seed: u64) -> Result<Vec<CheckOutcome>> {
    let mut rng = Stream::derived(seed, &[1]);
    let maps = all_maps(5, &mut rng);
    let mut round_trip: f64 = 0.0;
    let mut min_bregman = f64::INFINITY;
    let mut self_bregman: f64 = 0.0;
    let mut factor_rel: f64 = 0.0;
    let mut sc_min = f64::INFINITY;
    for map in &maps {
        for _ in 0..1000 {
            let x = random_interior(map, &mut rng);
            let y = random_interior(map, &mut rng);
            round_trip = round_trip.max(sup_diff(&map.dual_grad(&map.grad(&x)?)?, &x));
            min_bregman = min_bregman.min(map.bregman(&x, &y)?);
            self_bregman = self_bregman.max(map.bregman(&x, &x)?.abs());
        }
        for _ in 0..100 {
            let x = random_interior(map, &mut rng);
            let u = random_direction(map.dim(), &mut rng);
            let ct = map.hessian_factor(&x)?.apply_transpose(&u);
            let via_factor: f64 = ct.iter().map(|v| v * v).sum();
            let exact = map.hessian_quad_form(&x, &u)?;
            factor_rel = factor_rel.max((via_factor - exact).abs() / exact.abs().max(f64::MIN_POSITIVE));
            if map.is_barrier() {
                // Scale the direction to unit local norm so the stencil stays inside.
                let scale = exact.sqrt();
                let u: Vec<f64> = u.iter().map(|v| v / scale).collect();
                let r = map.check_self_concordance(&x, &u, 1e-5)?;
                sc_min = sc_min.min(r / (2.0 * map.self_concordance()).max(1.0));
            }
        }
    }
    Ok(vec![
        CheckOutcome::new("dual round trip <= 1e-9", round_trip <= 1e-9, format!("{round_trip:.3e}")),
        CheckOutcome::new("bregman nonnegative", min_bregman >= 0.0, format!("{min_bregman:.3e}")),
        CheckOutcome::new("bregman(x, x) <= 1e-12", self_bregman <= 1e-12, format!("{self_bregman:.3e}")),
        CheckOutcome::new("hessian factor relative <= 1e-10", factor_rel <= 1e-10, format!("{factor_rel:.3e}")),
        CheckOutcome::new("self-concordance residual >= -1e-4", sc_min >= -1e-4, format!("{sc_min:.3e}")),
    ])
}

fn samplers_suite(seed: u64) -> Result<Vec<CheckOutcome>> {
    let mut out = Vec::new();

    // Euclidean map with one inner step is ULA.
    let d = 5;
    let potential = random_quadratic(d, seed)?;
    let map = MirrorMap::euclidean(d);
    let cfg = SamplerConfig::new(5e-3, 1, 1000, 0);
    let mut a = Stream::derived(seed, &[2]);
    let mut b = Stream::derived(seed, &[2]);
    let mut state = ChainState::new(&map, vec![0.1; d])?;
    let mut x = vec![0.1; d];
    let mut gap: f64 = 0.0;
    for _ in 0..1000 {
        state = mla_step(&map, &potential, &state, &cfg, &mut a)?;
        x = ula_step(&potential, &x, cfg.step_size, &mut b)?;
        gap = gap.max(sup_diff(&state.primal, &x));
    }
    out.push(CheckOutcome::new("euclidean mla equals ula", gap <= 1e-12, format!("{gap:.3e}")));

    // Confinement on both barrier domains.
    let mut confined = true;
    for map in [MirrorMap::box_log_barrier(10), MirrorMap::simplex_barrier(10)] {
        let cfg = SamplerConfig::new(0.01, 10, 10_000, 0);
        let mut noise = Stream::derived(seed, &[3]);
        let mut state = ChainState::new(&map, map.center())?;
        let zero = Potential::zero(10);
        for _ in 0..cfg.iterations {
            state = mla_step(&map, &zero, &state, &cfg, &mut noise)?;
            confined &= map.is_interior(&state.primal);
        }
    }
    out.push(CheckOutcome::new("barrier iterates stay interior", confined, String::new()));

    // Bregman proximal inequality for the half step.
    let map = MirrorMap::simplex_barrier(d);
    let eta = 1.0 / profile_simplex_quadratic().beta_prime;
    let mut rng = Stream::derived(seed, &[4]);
    let mut worst = f64::INFINITY;
    for _ in 0..100 {
        let x = random_interior(&map, &mut rng);
        let y = random_interior(&map, &mut rng);
        let e: f64 = rng.random_range(0.0..eta);
        let xp = mla_half_step(&map, &potential, &x, e)?;
        let g = potential.grad(&x)?;
        let f = |z: &[f64]| e * g.iter().zip(z).map(|(a, b)| a * b).sum::<f64>();
        let slack = map.bregman(&y, &x)? - map.bregman(&y, &xp)? - map.bregman(&xp, &x)? - (f(&xp) - f(&y));
        worst = worst.min(slack);
    }
    out.push(CheckOutcome::new("proximal inequality slack >= -1e-8", worst >= -1e-8, format!("{worst:.3e}")));

    // Schedules against hand evaluation.
    let mut sched: f64 = 0.0;
    let mut counts_match = true;
    for _ in 0..20 {
        let eps: f64 = rng.random_range(0.01..1.0);
        let bp: f64 = rng.random_range(0.5..10.0);
        let alpha: f64 = rng.random_range(0.01..1.0);
        let dim = rng.random_range(1..50usize);
        let cost: f64 = rng.random_range(0.1..10.0);
        let df = dim as f64;
        sched = sched.max((step_size_weak(eps, bp, dim) - (eps / (2.0 * bp * df)).min(1.0 / bp)).abs());
        sched = sched.max((step_size_strong(eps, alpha, bp, dim)? - (alpha * eps / (2.0 * bp * df)).min(1.0 / bp)).abs());
        let weak = (4.0 * bp * df * cost / (eps * eps) * (eps / (2.0 * df)).max(1.0)).ceil() as u64;
        counts_match &= iterations_weak(eps, bp, dim, cost) == weak;
        let eta = step_size_strong(eps, alpha, bp, dim)?;
        let strong = ((2.0 * cost / eps).ln().max(0.0) / (alpha * eta)).ceil() as u64;
        counts_match &= iterations_strong(eps, alpha, bp, dim, cost)? == strong;
    }
    out.push(CheckOutcome::new(
        "schedules match formulas",
        sched <= 1e-12 && counts_match,
        format!("{sched:.3e}"),
    ));
    Ok(out)
}

fn permutations(m: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                go(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; m], &mut out);
    out
}

/// Minimum of `Σ cost[i][σ(i)]` over all permutations.
pub fn brute_force_assignment(cost: &[Vec<f64>]) -> f64 {
    permutations(cost.len())
        .iter()
        .map(|p| p.iter().enumerate().map(|(i, &j)| cost[i][j]).sum::<f64>())
        .fold(f64::INFINITY, f64::min)
}

/// Cost of pairing the `r`-th smallest of `a` with the `r`-th smallest of `b`.
pub fn sorted_matching_cost(a: &[f64], b: &[f64], cost: impl Fn(f64, f64) -> f64) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    a.iter().zip(&b).map(|(&x, &y)| cost(x, y)).sum()
}

fn transport_suite(seed: u64) -> Result<Vec<CheckOutcome>> {
    let mut rng = Stream::derived(seed, &[5]);
    let mut assign_gap: f64 = 0.0;
    for _ in 0..100 {
        let cost: Vec<Vec<f64>> = (0..6).map(|_| (0..6).map(|_| rng.random_range(0.0..1.0)).collect()).collect();
        let fast = min_cost_assignment(&cost)?.cost;
        assign_gap = assign_gap.max((fast - brute_force_assignment(&cost)).abs());
    }

    let box1 = MirrorMap::box_log_barrier(1);
    let mut sorted_gap: f64 = 0.0;
    for m in 2..=8 {
        let a: Vec<f64> = (0..m).map(|_| rng.random_range(-0.99..0.99)).collect();
        let b: Vec<f64> = (0..m).map(|_| rng.random_range(-0.99..0.99)).collect();
        let ea = EmpiricalMeasure::new(a.iter().map(|&v| vec![v]).collect())?;
        let eb = EmpiricalMeasure::new(b.iter().map(|&v| vec![v]).collect())?;
        let w2 = empirical_w2_sq(&ea, &eb)? * m as f64;
        sorted_gap = sorted_gap.max((w2 - sorted_matching_cost(&a, &b, |x, y| (x - y).powi(2))).abs());
        let breg = bregman_matching(&box1, &ea, &eb)?.cost;
        let sorted = sorted_matching_cost(&a, &b, |x, y| box1.bregman(&[x], &[y]).unwrap_or(f64::INFINITY));
        sorted_gap = sorted_gap.max((breg - sorted).abs() / sorted.max(1.0));
    }

    let cloud = |rng: &mut Stream| -> Result<EmpiricalMeasure> {
        EmpiricalMeasure::new((0..20).map(|_| random_direction(3, rng)).collect())
    };
    let mut sym: f64 = 0.0;
    let mut triangle = f64::INFINITY;
    for _ in 0..20 {
        let (p, q, r) = (cloud(&mut rng)?, cloud(&mut rng)?, cloud(&mut rng)?);
        let pq = empirical_w2_sq(&p, &q)?;
        sym = sym.max((pq - empirical_w2_sq(&q, &p)?).abs());
        triangle = triangle.min(pq.sqrt() + empirical_w2_sq(&q, &r)?.sqrt() - empirical_w2_sq(&p, &r)?.sqrt());
    }
    Ok(vec![
        CheckOutcome::new("assignment matches brute force", assign_gap <= 1e-12, format!("{assign_gap:.3e}")),
        CheckOutcome::new("1-d optimum is sorted matching", sorted_gap <= 1e-10, format!("{sorted_gap:.3e}")),
        CheckOutcome::new("w2 symmetric", sym <= 1e-12, format!("{sym:.3e}")),
        CheckOutcome::new("w2 triangle inequality", triangle >= -1e-12, format!("{triangle:.3e}")),
    ])
}

fn oracle_suite(seed: u64) -> Result<Vec<CheckOutcome>> {
    let mut rng = Stream::derived(seed, &[6]);
    let weights = [2.0; 11];
    let n = 100_000;
    let mean = dirichlet_mean(&weights);
    let var = dirichlet_variance(&weights);
    let mut sums = vec![0.0; 10];
    for _ in 0..n {
        for (s, v) in sums.iter_mut().zip(sample_dirichlet_gamma(&weights, &mut rng)?) {
            *s += v;
        }
    }
    let z = sums
        .iter()
        .zip(&mean)
        .zip(&var)
        .map(|((s, m), v)| (s / n as f64 - m).abs() / (v / n as f64).sqrt())
        .fold(0.0, f64::max);

    let mut inside = true;
    let mut shuffled: Vec<usize> = (1..=10).collect();
    shuffled.shuffle(&mut rng);
    for d in shuffled {
        for _ in 0..1000 {
            inside &= sample_uniform_l1_ball(d, &mut rng).iter().map(|v| v.abs()).sum::<f64>() <= 1.0;
        }
    }

    // Linear density on [0, 1]: π(x) ∝ e^{-x}, CDF (1 − e^{-x}) / (1 − e^{-1}).
    let sampler = RejectionSampler::new(Potential::Linear(vec![1.0]), vec![0.0], vec![1.0], Support::BoundingBox, 1.0)?;
    let m = 10_000;
    let mut xs: Vec<f64> = (0..m).map(|_| sampler.sample(&mut rng).map(|x| x[0])).collect::<Result<_>>()?;
    xs.sort_by(f64::total_cmp);
    let norm = 1.0 - (-1.0f64).exp();
    let ks = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = (1.0 - (-x).exp()) / norm;
            (f - i as f64 / m as f64).abs().max(((i + 1) as f64 / m as f64 - f).abs())
        })
        .fold(0.0, f64::max);
    let critical = 1.628 / (m as f64).sqrt();
    Ok(vec![
        CheckOutcome::new("dirichlet means within 4 se", z <= 4.0, format!("max z = {z:.3}")),
        CheckOutcome::new("l1-ball draws inside", inside, String::new()),
        CheckOutcome::new("rejection ks below 1% critical", ks < critical, format!("{ks:.4} < {critical:.4}")),
    ])
}
