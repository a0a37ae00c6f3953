//! Step sizes and iteration counts that guarantee a target accuracy `ε`.

use crate::error::{Error, Result};

/// Step size for the weakly convex case: `min{ε/(2β′d), 1/β′}`.
pub fn step_size_weak(eps: f64, beta_prime: f64, dim: usize) -> f64 {
    (eps / (2.0 * beta_prime * dim as f64)).min(beta_prime.recip())
}

/// Iterations for KL accuracy `ε` of the iterate mixture in the weakly convex
/// case: `⌈4β′d·cost/ε² · max{1, ε/(2d)}⌉`, where `cost` is the Bregman
/// transport cost from the target to the initial law.
pub fn iterations_weak(eps: f64, beta_prime: f64, dim: usize, initial_cost: f64) -> u64 {
    let d = dim as f64;
    let n = 4.0 * beta_prime * d * initial_cost / (eps * eps) * (eps / (2.0 * d)).max(1.0);
    n.ceil() as u64
}

/// Step size for the strongly relatively convex case: `min{αε/(2β′d), 1/β′}`.
pub fn step_size_strong(eps: f64, alpha: f64, beta_prime: f64, dim: usize) -> Result<f64> {
    if !(alpha > 0.0) {
        return Err(Error::Alpha(alpha));
    }
    Ok((alpha * eps / (2.0 * beta_prime * dim as f64)).min(beta_prime.recip()))
}

/// Iterations for Bregman transport accuracy `ε` in the strongly relatively
/// convex case: `⌈2β′d/(α²ε) · ln(2·cost/ε) · max{1, αε/(2d)}⌉`.
///
/// A start already within `ε/2` needs no iterations.
pub fn iterations_strong(
    eps: f64,
    alpha: f64,
    beta_prime: f64,
    dim: usize,
    initial_cost: f64,
) -> Result<u64> {
    if !(alpha > 0.0) {
        return Err(Error::Alpha(alpha));
    }
    let d = dim as f64;
    let log = (2.0 * initial_cost / eps).ln().max(0.0);
    let n = 2.0 * beta_prime * d / (alpha * alpha * eps) * log * (alpha * eps / (2.0 * d)).max(1.0);
    Ok(n.ceil() as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weak_examples() {
        assert!((step_size_weak(0.1, 3.0, 10) - 1.0 / 600.0).abs() < 1e-15);
        assert_eq!(step_size_weak(1e6, 2.0, 1), 0.5);
        let a = step_size_weak(0.1, 3.0, 10);
        let b = step_size_weak(0.1, 3.0, 20);
        assert!((a / b - 2.0).abs() < 1e-12);

        assert_eq!(iterations_weak(1.0, 1.0, 1, 1.0), 4);
        assert_eq!(iterations_weak(1.0, 1.0, 1, 0.0), 0);
        assert_eq!(iterations_weak(0.5, 1.0, 4, 1.0), 4 * iterations_weak(1.0, 1.0, 4, 1.0));
    }

    #[test]
    fn strong_examples() {
        assert!((step_size_strong(0.1, 1.0, 1.0, 1).unwrap() - 0.05).abs() < 1e-15);
        assert_eq!(iterations_strong(0.1, 1.0, 1.0, 1, 0.05).unwrap(), 0);
        assert!(iterations_strong(1.0, 1.0, 2.0, 2, 0.6).unwrap() >= 1);
        assert!(matches!(step_size_strong(0.1, 0.0, 1.0, 1), Err(Error::Alpha(_))));
        assert!(matches!(iterations_strong(0.1, -1.0, 1.0, 1, 1.0), Err(Error::Alpha(_))));
    }
}
