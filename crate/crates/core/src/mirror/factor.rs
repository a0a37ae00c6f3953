//! Structured square-root factors of mirror-map Hessians.
//!
//! The diffusion phase of the sampler only needs Gaussian noise with covariance
//! proportional to the Hessian, so any `C` with `C Cᵀ = ∇²φ(x)` will do. All
//! Hessians produced by the built-in maps are either diagonal or diagonal plus
//! a multiple of the all-ones matrix, and both admit an `O(d)` factor.

/// Parameters of the factor `C = D^{1/2} (I + σ w wᵀ)` of `D + ρ 𝟙𝟙ᵀ`,
/// with `w = D^{-1/2} 𝟙`.
#[derive(Debug, Clone, PartialEq)]
pub struct RankOneFactor {
    diag: Vec<f64>,
    rank_one: f64,
    sqrt_diag: Vec<f64>,
    w: Vec<f64>,
    w_norm_sq: f64,
    sigma: f64,
}

impl RankOneFactor {
    /// Builds the factor of `diag(diag) + rank_one · 𝟙𝟙ᵀ`.
    ///
    /// All diagonal entries must be positive and `rank_one ≥ 0`.
    pub fn new(diag: Vec<f64>, rank_one: f64) -> Self {
        debug_assert!(diag.iter().all(|&v| v > 0.0));
        debug_assert!(rank_one >= 0.0);
        let sqrt_diag: Vec<f64> = diag.iter().map(|v| v.sqrt()).collect();
        let w: Vec<f64> = sqrt_diag.iter().map(|s| s.recip()).collect();
        let w_norm_sq: f64 = diag.iter().map(|v| v.recip()).sum();
        // Positive root of q σ² + 2σ − ρ = 0, written without cancellation.
        let sigma = rank_one / (1.0 + (1.0 + rank_one * w_norm_sq).sqrt());
        Self {
            diag,
            rank_one,
            sqrt_diag,
            w,
            w_norm_sq,
            sigma,
        }
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn rank_one(&self) -> f64 {
        self.rank_one
    }
}

/// A factor `C` with `C Cᵀ` equal to a mirror-map Hessian.
#[derive(Debug, Clone, PartialEq)]
pub enum HessianFactor {
    /// `∇²φ = I`.
    Identity(usize),
    /// `∇²φ = diag(s²)`; holds the square roots `s`.
    Diagonal(Vec<f64>),
    /// `∇²φ = diag(δ) + ρ 𝟙𝟙ᵀ`.
    DiagonalPlusRankOne(RankOneFactor),
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl HessianFactor {
    pub fn dim(&self) -> usize {
        match self {
            HessianFactor::Identity(d) => *d,
            HessianFactor::Diagonal(s) => s.len(),
            HessianFactor::DiagonalPlusRankOne(f) => f.diag.len(),
        }
    }

    /// Writes `C ξ` into `out`.
    pub fn apply_into(&self, xi: &[f64], out: &mut [f64]) {
        match self {
            HessianFactor::Identity(_) => out.copy_from_slice(xi),
            HessianFactor::Diagonal(s) => {
                for ((o, &si), &x) in out.iter_mut().zip(s).zip(xi) {
                    *o = si * x;
                }
            }
            HessianFactor::DiagonalPlusRankOne(f) => {
                let t = f.sigma * dot(&f.w, xi);
                for i in 0..xi.len() {
                    out[i] = f.sqrt_diag[i] * (xi[i] + f.w[i] * t);
                }
            }
        }
    }

    /// `C ξ`.
    pub fn apply(&self, xi: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; xi.len()];
        self.apply_into(xi, &mut out);
        out
    }

    /// `Cᵀ u`.
    pub fn apply_transpose(&self, u: &[f64]) -> Vec<f64> {
        match self {
            HessianFactor::Identity(_) => u.to_vec(),
            HessianFactor::Diagonal(s) => s.iter().zip(u).map(|(a, b)| a * b).collect(),
            HessianFactor::DiagonalPlusRankOne(f) => {
                let v: Vec<f64> = f.sqrt_diag.iter().zip(u).map(|(a, b)| a * b).collect();
                let t = f.sigma * dot(&f.w, &v);
                v.iter().zip(&f.w).map(|(vi, wi)| vi + wi * t).collect()
            }
        }
    }

    /// `C⁻¹ u`, so that `‖C⁻¹u‖² = ⟨u, [∇²φ]⁻¹ u⟩`.
    pub fn solve(&self, u: &[f64]) -> Vec<f64> {
        match self {
            HessianFactor::Identity(_) => u.to_vec(),
            HessianFactor::Diagonal(s) => u.iter().zip(s).map(|(a, b)| a / b).collect(),
            HessianFactor::DiagonalPlusRankOne(f) => {
                let v: Vec<f64> = u.iter().zip(&f.sqrt_diag).map(|(a, b)| a / b).collect();
                let t = f.sigma / (1.0 + f.sigma * f.w_norm_sq) * dot(&f.w, &v);
                v.iter().zip(&f.w).map(|(vi, wi)| vi - wi * t).collect()
            }
        }
    }

    /// The Hessian quadratic form `⟨u, C Cᵀ u⟩`, evaluated from the structure.
    pub fn quad_form(&self, u: &[f64]) -> f64 {
        match self {
            HessianFactor::Identity(_) => dot(u, u),
            HessianFactor::Diagonal(s) => s.iter().zip(u).map(|(a, b)| (a * b).powi(2)).sum(),
            HessianFactor::DiagonalPlusRankOne(f) => {
                let sum: f64 = u.iter().sum();
                f.diag.iter().zip(u).map(|(a, b)| a * b * b).sum::<f64>() + f.rank_one * sum * sum
            }
        }
    }

    /// Dense row-major `C`.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let d = self.dim();
        let mut cols = Vec::with_capacity(d);
        for j in 0..d {
            let mut e = vec![0.0; d];
            e[j] = 1.0;
            cols.push(self.apply(&e));
        }
        (0..d).map(|i| (0..d).map(|j| cols[j][i]).collect()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hessian_from_factor(f: &HessianFactor) -> Vec<Vec<f64>> {
        let c = f.to_dense();
        let d = c.len();
        let mut h = vec![vec![0.0; d]; d];
        for i in 0..d {
            for j in 0..d {
                h[i][j] = (0..d).map(|k| c[i][k] * c[j][k]).sum();
            }
        }
        h
    }

    #[test]
    fn rank_one_factor_reproduces_dense_hessian() {
        let diag = vec![4.0, 9.0, 0.5];
        let rho = 2.5;
        let f = HessianFactor::DiagonalPlusRankOne(RankOneFactor::new(diag.clone(), rho));
        let h = hessian_from_factor(&f);
        for i in 0..3 {
            for j in 0..3 {
                let expected = rho + if i == j { diag[i] } else { 0.0 };
                assert!((h[i][j] - expected).abs() < 1e-12 * expected.abs().max(1.0));
            }
        }
    }

    #[test]
    fn solve_inverts_apply_transpose() {
        let f = HessianFactor::DiagonalPlusRankOne(RankOneFactor::new(vec![1.0, 3.0, 7.0], 11.0));
        let u = [0.3, -1.2, 2.0];
        let z = f.solve(&u);
        // ‖C⁻¹u‖² = uᵀ (CCᵀ)⁻¹ u; check by solving H v = u through the factor.
        let v = f.apply(&f.solve(&u));
        assert!(v.iter().zip(&u).all(|(a, b)| (a - b).abs() < 1e-12));
        let cz = f.apply(&z);
        assert!(cz.iter().zip(&u).all(|(a, b)| (a - b).abs() < 1e-12));
    }

    #[test]
    fn diagonal_factor_is_elementwise_root() {
        let f = HessianFactor::Diagonal(vec![2.0, 3.0]);
        assert_eq!(f.apply(&[1.0, 1.0]), vec![2.0, 3.0]);
        assert_eq!(f.quad_form(&[1.0, 1.0]), 13.0);
    }
}
