//! Exact reference samplers used as ground truth by the experiments and tests.

use rand::Rng;
use rand_distr::{Distribution, Exp1, Gamma, Open01};

use crate::error::{Error, Result};
use crate::potentials::Potential;

/// Proposal budget of the rejection sampler.
pub const REJECTION_BUDGET: usize = 1_000_000;

/// Draws `(G₁, …, G_d) / Σ_{i=0}^d Gᵢ` with `Gᵢ ~ Gamma(shapes[i])`;
/// `shapes[0]` belongs to the boundary coordinate.
pub(crate) fn filled_dirichlet<R: Rng + ?Sized>(shapes: &[f64], rng: &mut R) -> Vec<f64> {
    let draws: Vec<f64> = shapes
        .iter()
        .map(|&s| Gamma::new(s, 1.0).expect("positive shape").sample(rng))
        .collect();
    let total: f64 = draws.iter().sum();
    draws[1..].iter().map(|g| g / total).collect()
}

/// Exact draw from `π ∝ (1−Σx)^{a₀} Π xᵢ^{aᵢ}` on the open filled simplex,
/// i.e. the Dirichlet law with parameters `(a₁+1, …, a_d+1, a₀+1)`.
pub fn sample_dirichlet_gamma<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> Result<Vec<f64>> {
    if weights.len() < 2 {
        return Err(Error::Validation("need weights a_0..a_d with d >= 1".into()));
    }
    if let Some(&bad) = weights.iter().find(|&&a| !(a > 0.0)) {
        return Err(Error::Weight(bad));
    }
    let shapes: Vec<f64> = weights.iter().map(|a| a + 1.0).collect();
    Ok(filled_dirichlet(&shapes, rng))
}

/// Analytic per-coordinate mean of the filled Dirichlet law with weights `a`.
pub fn dirichlet_mean(weights: &[f64]) -> Vec<f64> {
    let total: f64 = weights.iter().map(|a| a + 1.0).sum();
    weights[1..].iter().map(|a| (a + 1.0) / total).collect()
}

/// Analytic per-coordinate variance of the filled Dirichlet law with weights `a`.
pub fn dirichlet_variance(weights: &[f64]) -> Vec<f64> {
    let total: f64 = weights.iter().map(|a| a + 1.0).sum();
    weights[1..]
        .iter()
        .map(|a| {
            let p = (a + 1.0) / total;
            p * (1.0 - p) / (total + 1.0)
        })
        .collect()
}

/// Uniform draw on `[−1, 1]ᵈ`.
pub fn sample_uniform_box<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<f64> {
    (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect()
}

/// Uniform draw on the unit `ℓ₁` ball: random signs times normalized
/// exponentials (uniform on the positive face) times radius `U^{1/d}`.
pub fn sample_uniform_l1_ball<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<f64> {
    let e: Vec<f64> = (0..dim).map(|_| Exp1.sample(rng)).collect();
    let total: f64 = e.iter().sum();
    let u: f64 = Open01.sample(rng);
    let radius = u.powf(1.0 / dim as f64);
    e.into_iter()
        .map(|v| {
            let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
            sign * v / total * radius
        })
        .collect()
}

/// Support of a rejection target inside its bounding box.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Support {
    /// The whole bounding box.
    BoundingBox,
    /// The open filled simplex `{x > 0, Σx < 1}`.
    FilledSimplex,
}

impl Support {
    fn contains(&self, x: &[f64]) -> bool {
        match self {
            Support::BoundingBox => true,
            Support::FilledSimplex => x.iter().all(|&v| v > 0.0) && x.iter().sum::<f64>() < 1.0,
        }
    }
}

/// Rejection sampler for `π ∝ exp(−V)` on a bounded support.
#[derive(Debug, Clone, PartialEq)]
pub struct RejectionSampler {
    potential: Potential,
    lower: Vec<f64>,
    upper: Vec<f64>,
    support: Support,
    envelope: f64,
}

impl RejectionSampler {
    /// Validates the envelope `exp(−V) ≤ M` on a grid over the bounding box.
    pub fn new(
        potential: Potential,
        lower: Vec<f64>,
        upper: Vec<f64>,
        support: Support,
        envelope: f64,
    ) -> Result<Self> {
        let d = potential.dim();
        if lower.len() != d || upper.len() != d {
            return Err(Error::Dimension {
                expected: d,
                got: lower.len().min(upper.len()),
            });
        }
        if lower.iter().zip(&upper).any(|(l, u)| !(l < u)) || !(envelope > 0.0) {
            return Err(Error::Validation("degenerate bounding box or envelope".into()));
        }
        let sampler = Self {
            potential,
            lower,
            upper,
            support,
            envelope,
        };
        sampler.spot_check_envelope()?;
        Ok(sampler)
    }

    fn spot_check_envelope(&self) -> Result<()> {
        let d = self.lower.len();
        let per_dim = ((4096f64).powf(1.0 / d as f64).floor() as usize).max(2);
        let total = per_dim.pow(d as u32);
        let mut x = vec![0.0; d];
        for idx in 0..total {
            let mut rem = idx;
            for k in 0..d {
                let t = (rem % per_dim) as f64 / (per_dim - 1) as f64;
                rem /= per_dim;
                x[k] = self.lower[k] + t * (self.upper[k] - self.lower[k]);
            }
            if !self.support.contains(&x) {
                continue;
            }
            if let Ok(v) = self.potential.value(&x) {
                if (-v).exp() > self.envelope * (1.0 + 1e-12) {
                    return Err(Error::Validation(format!(
                        "envelope {} is below exp(-V) = {} at {x:?}",
                        self.envelope,
                        (-v).exp()
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn envelope(&self) -> f64 {
        self.envelope
    }

    pub fn bounding_volume(&self) -> f64 {
        self.lower.iter().zip(&self.upper).map(|(l, u)| u - l).product()
    }

    /// One exact draw together with the number of proposals it took.
    pub fn sample_counted<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<(Vec<f64>, usize)> {
        for n in 1..=REJECTION_BUDGET {
            let x: Vec<f64> = self
                .lower
                .iter()
                .zip(&self.upper)
                .map(|(&l, &u)| rng.random_range(l..u))
                .collect();
            if !self.support.contains(&x) {
                continue;
            }
            let accept = (-self.potential.value(&x)?).exp() / self.envelope;
            if rng.random::<f64>() < accept {
                return Ok((x, n));
            }
        }
        Err(Error::Budget(REJECTION_BUDGET))
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Vec<f64>> {
        self.sample_counted(rng).map(|(x, _)| x)
    }
}

/// Declarative choice of reference sampler.
#[derive(Debug, Clone, PartialEq)]
pub enum OracleSpec {
    DirichletGamma(Vec<f64>),
    UniformBox(usize),
    UniformL1Ball(usize),
    Rejection(RejectionSampler),
}

impl OracleSpec {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Vec<f64>> {
        match self {
            OracleSpec::DirichletGamma(w) => sample_dirichlet_gamma(w, rng),
            OracleSpec::UniformBox(d) => Ok(sample_uniform_box(*d, rng)),
            OracleSpec::UniformL1Ball(d) => Ok(sample_uniform_l1_ball(*d, rng)),
            OracleSpec::Rejection(r) => r.sample(rng),
        }
    }

    pub fn cloud<R: Rng + ?Sized>(&self, m: usize, rng: &mut R) -> Result<Vec<Vec<f64>>> {
        (0..m).map(|_| self.sample(rng)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Stream;

    #[test]
    fn unit_shapes_give_uniform() {
        let mut rng = Stream::new(11);
        let n = 100_000;
        let xs: Vec<f64> = (0..n).map(|_| filled_dirichlet(&[1.0, 1.0], &mut rng)[0]).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let se = (1.0f64 / 12.0 / n as f64).sqrt();
        assert!((mean - 0.5).abs() < 3.0 * se);
        assert!((var - 1.0 / 12.0).abs() < 0.01 / 12.0 * 5.0);
    }

    #[test]
    fn dirichlet_draws_are_interior() {
        let mut rng = Stream::new(5);
        for _ in 0..10_000 {
            let x = sample_dirichlet_gamma(&[2.0; 11], &mut rng).unwrap();
            assert!(x.iter().all(|&v| v > 0.0) && x.iter().sum::<f64>() < 1.0);
        }
        assert!(matches!(sample_dirichlet_gamma(&[1.0, 0.0], &mut rng), Err(Error::Weight(_))));
        let m = dirichlet_mean(&[2.0; 11]);
        assert!((m[0] - 1.0 / 11.0).abs() < 1e-15);
    }

    #[test]
    fn l1_ball_draws_stay_inside() {
        let mut rng = Stream::new(8);
        for d in [1, 2, 10] {
            for _ in 0..5_000 {
                let x = sample_uniform_l1_ball(d, &mut rng);
                assert!(x.iter().map(|v| v.abs()).sum::<f64>() <= 1.0);
            }
        }
    }

    #[test]
    fn flat_target_accepts_everything() {
        let r = RejectionSampler::new(
            Potential::zero(2),
            vec![-1.0; 2],
            vec![1.0; 2],
            Support::BoundingBox,
            1.0,
        )
        .unwrap();
        let mut rng = Stream::new(1);
        for _ in 0..100 {
            assert_eq!(r.sample_counted(&mut rng).unwrap().1, 1);
        }
    }

    #[test]
    fn low_envelope_is_rejected() {
        let err = RejectionSampler::new(
            Potential::zero(1),
            vec![0.0],
            vec![1.0],
            Support::BoundingBox,
            0.5,
        );
        assert!(matches!(err, Err(Error::Validation(_))));
    }
}
