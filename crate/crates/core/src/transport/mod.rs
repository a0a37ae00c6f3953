//! Empirical transport diagnostics between equal-weight point clouds.
//!
//! For two clouds of equal size `m` the optimal coupling is a permutation, so
//! `W₂²` and the Bregman transport cost reduce to exact assignment problems.

mod assignment;

pub use assignment::{min_cost_assignment, Assignment};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::mirror::MirrorMap;

/// Equal-weight point cloud.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalMeasure {
    points: Vec<Vec<f64>>,
}

impl EmpiricalMeasure {
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        let first = points.first().ok_or(Error::Empty("empirical measure"))?;
        let d = first.len();
        if let Some(bad) = points.iter().find(|p| p.len() != d) {
            return Err(Error::Dimension {
                expected: d,
                got: bad.len(),
            });
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points[0].len()
    }
}

fn check_pair(a: &EmpiricalMeasure, b: &EmpiricalMeasure) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::Size(a.len(), b.len()));
    }
    if a.dim() != b.dim() {
        return Err(Error::Dimension {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    Ok(())
}

/// Row-parallel cost matrix; results do not depend on the thread count.
fn cost_matrix<F>(m: usize, entry: F) -> Vec<f64>
where
    F: Fn(usize, usize) -> f64 + Sync,
{
    let mut flat = vec![0.0; m * m];
    flat.par_chunks_mut(m).enumerate().for_each(|(i, row)| {
        for (j, c) in row.iter_mut().enumerate() {
            *c = entry(i, j);
        }
    });
    flat
}

/// Optimal matching between `a` and `b` under squared Euclidean cost.
pub fn w2_matching(a: &EmpiricalMeasure, b: &EmpiricalMeasure) -> Result<Assignment> {
    check_pair(a, b)?;
    let m = a.len();
    let flat = cost_matrix(m, |i, j| {
        a.points[i]
            .iter()
            .zip(&b.points[j])
            .map(|(x, y)| (x - y) * (x - y))
            .sum()
    });
    assignment::assign_flat(&flat, m)
}

/// Empirical `W₂²(a, b)`.
pub fn empirical_w2_sq(a: &EmpiricalMeasure, b: &EmpiricalMeasure) -> Result<f64> {
    Ok(w2_matching(a, b)?.cost / a.len() as f64)
}

/// Optimal matching for the cost `D_φ(aᵢ, b_j)`.
pub fn bregman_matching(
    map: &MirrorMap,
    a: &EmpiricalMeasure,
    b: &EmpiricalMeasure,
) -> Result<Assignment> {
    check_pair(a, b)?;
    let m = a.len();
    let phi_a: Vec<f64> = a.points.iter().map(|x| map.value(x)).collect::<Result<_>>()?;
    let phi_b: Vec<f64> = b.points.iter().map(|y| map.value(y)).collect::<Result<_>>()?;
    let grad_b: Vec<Vec<f64>> = b.points.iter().map(|y| map.grad(y)).collect::<Result<_>>()?;
    let anchor: Vec<f64> = grad_b
        .iter()
        .zip(&b.points)
        .map(|(g, y)| g.iter().zip(y).map(|(s, t)| s * t).sum())
        .collect();
    let flat = cost_matrix(m, |i, j| {
        let lin: f64 = grad_b[j].iter().zip(&a.points[i]).map(|(g, x)| g * x).sum();
        (phi_a[i] - phi_b[j] - lin + anchor[j]).max(0.0)
    });
    assignment::assign_flat(&flat, m)
}

/// Empirical Bregman transport cost: `a` plays the first argument of `D_φ`.
pub fn empirical_bregman_cost(
    map: &MirrorMap,
    a: &EmpiricalMeasure,
    b: &EmpiricalMeasure,
) -> Result<f64> {
    Ok(bregman_matching(map, a, b)?.cost / a.len() as f64)
}

/// `‖mean(samples[burn_in..]) − θ*‖₂`.
pub fn posterior_mean_error(samples: &[Vec<f64>], theta_star: &[f64], burn_in: usize) -> Result<f64> {
    let kept = samples.get(burn_in..).unwrap_or(&[]);
    if kept.is_empty() {
        return Err(Error::Empty("post burn-in sample set"));
    }
    let n = kept.len() as f64;
    let mut mean = vec![0.0; theta_star.len()];
    for s in kept {
        if s.len() != mean.len() {
            return Err(Error::Dimension {
                expected: mean.len(),
                got: s.len(),
            });
        }
        for (m, v) in mean.iter_mut().zip(s) {
            *m += v / n;
        }
    }
    Ok(mean
        .iter()
        .zip(theta_star)
        .map(|(m, t)| (m - t).powi(2))
        .sum::<f64>()
        .sqrt())
}

/// Per-coordinate sample means and unbiased variances.
#[derive(Debug, Clone, PartialEq)]
pub struct Moments {
    pub means: Vec<f64>,
    pub variances: Vec<f64>,
}

pub fn per_coordinate_moments(samples: &[Vec<f64>]) -> Result<Moments> {
    if samples.len() < 2 {
        return Err(Error::Empty("sample set (need at least two samples)"));
    }
    let d = samples[0].len();
    let n = samples.len() as f64;
    let mut means = vec![0.0; d];
    for s in samples {
        for (m, v) in means.iter_mut().zip(s) {
            *m += v;
        }
    }
    means.iter_mut().for_each(|m| *m /= n);
    let mut variances = vec![0.0; d];
    for s in samples {
        for ((acc, v), m) in variances.iter_mut().zip(s).zip(&means) {
            *acc += (v - m).powi(2);
        }
    }
    variances.iter_mut().for_each(|v| *v /= n - 1.0);
    Ok(Moments { means, variances })
}
