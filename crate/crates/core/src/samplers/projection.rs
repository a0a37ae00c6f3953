//! Euclidean projections used by the projected Langevin baseline.

/// Closed constraint sets with an exact Euclidean projection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Projection {
    /// `[−1, 1]ᵈ`.
    Box,
    /// `{x ≥ 0, Σx ≤ 1}`.
    Simplex,
}

impl Projection {
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        match self {
            Projection::Box => project_box(x),
            Projection::Simplex => project_simplex(x),
        }
    }
}

pub fn project_box(x: &[f64]) -> Vec<f64> {
    x.iter().map(|v| v.clamp(-1.0, 1.0)).collect()
}

/// Projection onto the filled simplex `{x ≥ 0, Σx ≤ 1}`.
///
/// If clipping to the orthant already satisfies the sum constraint that is the
/// answer; otherwise the sum constraint is active and the point is projected
/// onto `{x ≥ 0, Σx = 1}` by sort-and-threshold.
pub fn project_simplex(x: &[f64]) -> Vec<f64> {
    let clipped: Vec<f64> = x.iter().map(|v| v.max(0.0)).collect();
    if clipped.iter().sum::<f64>() <= 1.0 {
        return clipped;
    }
    let mut sorted = x.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut tau = 0.0;
    for (j, &u) in sorted.iter().enumerate() {
        cumsum += u;
        let candidate = (cumsum - 1.0) / (j + 1) as f64;
        if u - candidate > 0.0 {
            tau = candidate;
        } else {
            break;
        }
    }
    x.iter().map(|v| (v - tau).max(0.0)).collect()
}
