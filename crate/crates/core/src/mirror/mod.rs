//! Legendre-type mirror maps and their geometry.
//!
//! A [`MirrorMap`] pairs a primal domain with a strictly convex barrier `φ`.
//! The gradient `∇φ` sends the open domain bijectively onto the dual space and
//! [`MirrorMap::dual_grad`] inverts it. The three barrier maps have bounded
//! primal domains and dual domain `ℝᵈ`.

mod factor;

pub use factor::{HessianFactor, RankOneFactor};

use crate::error::{Error, Result};

/// Minimum slack required in each barrier inequality.
pub const BOUNDARY_MARGIN: f64 = 1e-14;

/// Relative (scaled by `max(1, c)`) tolerance of the simplex dual root find.
/// The scale `c` enters every dual coordinate, so it is resolved to a few ulps.
pub const DUAL_ROOT_TOL: f64 = 4.0 * f64::EPSILON;

/// Iteration cap of the simplex dual root find.
pub const DUAL_ROOT_MAX_ITER: usize = 200;

#[derive(Debug, Clone, PartialEq)]
pub enum MapKind {
    /// `φ(x) = ‖x‖²/2` on `ℝᵈ`.
    Euclidean,
    /// `φ(θ) = Σ ln 1/(1−θᵢ) + ln 1/(1+θᵢ)` on `(−1, 1)ᵈ`.
    BoxLogBarrier,
    /// `φ(x) = Σ ln 1/xᵢ + ln 1/(1−Σx)` on the open filled simplex.
    SimplexBarrier,
    /// `φ(x) = a₀ ln 1/(1−Σx) + Σ aᵢ ln 1/xᵢ`; weights stored as `[a₀, a₁, …, a_d]`.
    WeightedSimplexBarrier(Vec<f64>),
}

/// A mirror map of fixed dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct MirrorMap {
    kind: MapKind,
    dim: usize,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Neumaier summation.
fn compensated_sum(terms: impl IntoIterator<Item = f64>) -> f64 {
    let (mut sum, mut carry) = (0.0_f64, 0.0_f64);
    for t in terms {
        let next = sum + t;
        carry += if sum.abs() >= t.abs() { (sum - next) + t } else { (t - next) + sum };
        sum = next;
    }
    sum + carry
}

/// `1 − Σx` to about an ulp, which matters once the slack is tiny.
fn simplex_slack(x: &[f64]) -> f64 {
    compensated_sum(std::iter::once(1.0).chain(x.iter().map(|v| -v)))
}

impl MirrorMap {
    pub fn euclidean(dim: usize) -> Self {
        Self {
            kind: MapKind::Euclidean,
            dim,
        }
    }

    pub fn box_log_barrier(dim: usize) -> Self {
        Self {
            kind: MapKind::BoxLogBarrier,
            dim,
        }
    }

    pub fn simplex_barrier(dim: usize) -> Self {
        Self {
            kind: MapKind::SimplexBarrier,
            dim,
        }
    }

    /// Weighted simplex barrier from `[a₀, a₁, …, a_d]` (boundary weight first).
    pub fn weighted_simplex_barrier(weights: Vec<f64>) -> Result<Self> {
        if weights.len() < 2 {
            return Err(Error::Validation(
                "weighted simplex barrier needs at least two weights".into(),
            ));
        }
        if let Some(&bad) = weights.iter().find(|&&a| !(a > 0.0 && a.is_finite())) {
            return Err(Error::Weight(bad));
        }
        let dim = weights.len() - 1;
        Ok(Self {
            kind: MapKind::WeightedSimplexBarrier(weights),
            dim,
        })
    }

    pub fn kind(&self) -> &MapKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            MapKind::Euclidean => "euclidean",
            MapKind::BoxLogBarrier => "box log-barrier",
            MapKind::SimplexBarrier => "simplex barrier",
            MapKind::WeightedSimplexBarrier(_) => "weighted simplex barrier",
        }
    }

    /// Self-concordance constant `M_φ`.
    pub fn self_concordance(&self) -> f64 {
        match &self.kind {
            MapKind::Euclidean => 0.0,
            MapKind::BoxLogBarrier | MapKind::SimplexBarrier => 1.0,
            MapKind::WeightedSimplexBarrier(a) => a
                .iter()
                .map(|w| w.powf(-0.5))
                .fold(f64::NEG_INFINITY, f64::max),
        }
    }

    /// Whether the primal domain is bounded (all barrier maps).
    pub fn is_barrier(&self) -> bool {
        !matches!(self.kind, MapKind::Euclidean)
    }

    /// Weight of the boundary term (`i = 0`) or of coordinate `i − 1`.
    fn simplex_weight(&self, i: usize) -> f64 {
        match &self.kind {
            MapKind::WeightedSimplexBarrier(a) => a[i],
            _ => 1.0,
        }
    }

    /// Strict interiority with [`BOUNDARY_MARGIN`] slack.
    pub fn is_interior(&self, x: &[f64]) -> bool {
        if x.len() != self.dim || x.iter().any(|v| !v.is_finite()) {
            return false;
        }
        match self.kind {
            MapKind::Euclidean => true,
            MapKind::BoxLogBarrier => x.iter().all(|v| 1.0 - v.abs() > BOUNDARY_MARGIN),
            MapKind::SimplexBarrier | MapKind::WeightedSimplexBarrier(_) => {
                x.iter().all(|&v| v > BOUNDARY_MARGIN)
                    && simplex_slack(x) > BOUNDARY_MARGIN
            }
        }
    }

    fn require_interior(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                got: x.len(),
            });
        }
        if self.is_interior(x) {
            Ok(())
        } else {
            Err(Error::Domain(self.name()))
        }
    }

    /// A canonical interior point: the origin for the box and Euclidean maps,
    /// the barycenter `(1/(d+1), …)` for the simplex maps.
    pub fn center(&self) -> Vec<f64> {
        match self.kind {
            MapKind::Euclidean | MapKind::BoxLogBarrier => vec![0.0; self.dim],
            _ => vec![1.0 / (self.dim as f64 + 1.0); self.dim],
        }
    }

    /// `φ(x)`.
    pub fn value(&self, x: &[f64]) -> Result<f64> {
        self.require_interior(x)?;
        Ok(match self.kind {
            MapKind::Euclidean => 0.5 * dot(x, x),
            MapKind::BoxLogBarrier => x.iter().map(|&t| -(-t * t).ln_1p()).sum(),
            _ => {
                let slack = simplex_slack(x);
                let interior: f64 = x
                    .iter()
                    .enumerate()
                    .map(|(i, &v)| -self.simplex_weight(i + 1) * v.ln())
                    .sum();
                interior - self.simplex_weight(0) * slack.ln()
            }
        })
    }

    /// `∇φ(x)`.
    pub fn grad(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.dim];
        self.grad_into(x, &mut out)?;
        Ok(out)
    }

    pub fn grad_into(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        self.require_interior(x)?;
        match self.kind {
            MapKind::Euclidean => out.copy_from_slice(x),
            MapKind::BoxLogBarrier => {
                for (o, &t) in out.iter_mut().zip(x) {
                    *o = 2.0 * t / ((1.0 - t) * (1.0 + t));
                }
            }
            _ => {
                let boundary = self.simplex_weight(0) / simplex_slack(x);
                for (i, (o, &v)) in out.iter_mut().zip(x).enumerate() {
                    *o = boundary - self.simplex_weight(i + 1) / v;
                }
            }
        }
        Ok(())
    }

    /// `‖∇²φ(x)‖∞`, the largest absolute row sum of the Hessian.
    pub fn hessian_inf_norm(&self, x: &[f64]) -> Result<f64> {
        self.require_interior(x)?;
        Ok(match self.kind {
            MapKind::Euclidean => 1.0,
            MapKind::BoxLogBarrier => x.iter().fold(0.0_f64, |m, &t| {
                let q = (1.0 - t) * (1.0 + t);
                m.max(2.0 * (1.0 + t * t) / (q * q))
            }),
            _ => {
                let s = simplex_slack(x);
                let rank_one = self.dim as f64 * self.simplex_weight(0) / (s * s);
                x.iter()
                    .enumerate()
                    .fold(0.0_f64, |m, (i, &v)| m.max(self.simplex_weight(i + 1) / (v * v)))
                    + rank_one
            }
        })
    }

    /// `∇φ*(y)`, the unique interior point whose gradient is `y`.
    pub fn dual_grad(&self, y: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.dim];
        self.dual_grad_into(y, &mut out)?;
        Ok(out)
    }

    pub fn dual_grad_into(&self, y: &[f64], out: &mut [f64]) -> Result<()> {
        if y.len() != self.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                got: y.len(),
            });
        }
        match self.kind {
            MapKind::Euclidean => out.copy_from_slice(y),
            MapKind::BoxLogBarrier => {
                for (o, &v) in out.iter_mut().zip(y) {
                    // (√(1+y²) − 1)/y without cancellation.
                    *o = v / (1.0 + v.hypot(1.0));
                }
            }
            _ => {
                let (c, below_ulp) = self.simplex_dual_scale(y)?;
                for (i, (o, &v)) in out.iter_mut().zip(y).enumerate() {
                    *o = self.simplex_weight(i + 1) / ((c - v) + below_ulp);
                }
            }
        }
        Ok(())
    }

    /// Solves `Σ aᵢ/(c − yᵢ) + a₀/c = 1` for `c = a₀/(1 − Σx)`.
    ///
    /// The left side is convex and strictly decreasing on `c > max(0, maxᵢ yᵢ)`,
    /// so Newton iterates started left of the root increase monotonically; the
    /// bracket only guards against round-off.
    ///
    /// Returns the root as `c + δ` with `|δ|` below an ulp of `c`. Near the
    /// slanted face `c` is large while `1 − Σx` is tiny, and rounding `c` to
    /// the f64 grid alone would shift every dual coordinate by `O(ε c)`.
    fn simplex_dual_scale(&self, y: &[f64]) -> Result<(f64, f64)> {
        let a0 = self.simplex_weight(0);
        let mut total = a0;
        let mut lo = a0;
        let mut top = 0.0_f64;
        for (i, &v) in y.iter().enumerate() {
            let a = self.simplex_weight(i + 1);
            total += a;
            lo = lo.max(v + a);
            top = top.max(v);
        }
        let mut hi = top + total;
        let excess = |c: f64| -> (f64, f64) {
            let mut g = a0 / c - 1.0;
            let mut dg = -a0 / (c * c);
            for (i, &v) in y.iter().enumerate() {
                let r = 1.0 / (c - v);
                let a = self.simplex_weight(i + 1);
                g += a * r;
                dg -= a * r * r;
            }
            (g, dg)
        };

        let mut c = lo;
        let mut residual = f64::INFINITY;
        for _ in 0..DUAL_ROOT_MAX_ITER {
            let (g, dg) = excess(c);
            residual = g;
            if g == 0.0 {
                return Ok((c, 0.0));
            }
            if g > 0.0 {
                lo = c;
            } else {
                hi = c;
            }
            let tol = DUAL_ROOT_TOL * c.max(1.0);
            let newton = c - g / dg;
            if (newton - c).abs() <= tol {
                return Ok(self.refine_dual_scale(y, newton.clamp(lo, hi)));
            }
            let next = if newton > lo && newton <= hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            if hi - lo <= tol {
                return Ok(self.refine_dual_scale(y, next));
            }
            c = next;
        }
        Err(Error::Convergence {
            iterations: DUAL_ROOT_MAX_ITER,
            residual,
        })
    }

    /// One Newton correction at `c` with the excess summed in compensated
    /// arithmetic, kept separate from `c`.
    fn refine_dual_scale(&self, y: &[f64], c: f64) -> (f64, f64) {
        let a0 = self.simplex_weight(0);
        let mut terms = Vec::with_capacity(y.len() + 2);
        let mut dg = -a0 / (c * c);
        terms.push(-1.0);
        terms.push(a0 / c);
        for (i, &v) in y.iter().enumerate() {
            let r = 1.0 / (c - v);
            let a = self.simplex_weight(i + 1);
            terms.push(a * r);
            dg -= a * r * r;
        }
        let delta = -compensated_sum(terms) / dg;
        if delta.is_finite() && delta.abs() <= 4.0 * f64::EPSILON * c {
            (c, delta)
        } else {
            (c, 0.0)
        }
    }

    /// Bregman divergence `D_φ(x, y) = φ(x) − φ(y) − ⟨∇φ(y), x − y⟩`.
    pub fn bregman(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        if self.kind == MapKind::Euclidean {
            self.require_interior(x)?;
            self.require_interior(y)?;
            return Ok(0.5 * x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>());
        }
        let gy = self.grad(y)?;
        let fx = self.value(x)?;
        let fy = self.value(y)?;
        let lin: f64 = gy
            .iter()
            .zip(x.iter().zip(y))
            .map(|(g, (a, b))| g * (a - b))
            .sum();
        Ok((fx - fy - lin).max(0.0))
    }

    /// Factor `C` with `C Cᵀ = ∇²φ(x)`.
    pub fn hessian_factor(&self, x: &[f64]) -> Result<HessianFactor> {
        self.require_interior(x)?;
        Ok(match self.kind {
            MapKind::Euclidean => HessianFactor::Identity(self.dim),
            MapKind::BoxLogBarrier => HessianFactor::Diagonal(
                x.iter()
                    .map(|&t| ((1.0 - t).powi(-2) + (1.0 + t).powi(-2)).sqrt())
                    .collect(),
            ),
            _ => {
                let slack = simplex_slack(x);
                let diag = x
                    .iter()
                    .enumerate()
                    .map(|(i, &v)| self.simplex_weight(i + 1) / (v * v))
                    .collect();
                HessianFactor::DiagonalPlusRankOne(RankOneFactor::new(
                    diag,
                    self.simplex_weight(0) / (slack * slack),
                ))
            }
        })
    }

    /// `⟨u, ∇²φ(x) u⟩`.
    pub fn hessian_quad_form(&self, x: &[f64], u: &[f64]) -> Result<f64> {
        Ok(self.hessian_factor(x)?.quad_form(u))
    }

    /// Dual local norm `‖u‖_{[∇²φ(x)]⁻¹}`.
    pub fn local_dual_norm(&self, x: &[f64], u: &[f64]) -> Result<f64> {
        let z = self.hessian_factor(x)?.solve(u);
        Ok(dot(&z, &z).sqrt())
    }

    /// Finite-difference self-concordance residual
    /// `2 M_φ ‖u‖³_x − |∇³φ(x)[u,u,u]|`.
    ///
    /// The third derivative is the central difference of `t ↦ ⟨u, ∇²φ(x+tu) u⟩`
    /// with step `fd_step`. The stencil `x ± 10·fd_step·u` must stay interior.
    pub fn check_self_concordance(&self, x: &[f64], u: &[f64], fd_step: f64) -> Result<f64> {
        self.require_interior(x)?;
        let shifted = |t: f64| -> Vec<f64> { x.iter().zip(u).map(|(a, b)| a + t * b).collect() };
        for t in [10.0 * fd_step, -10.0 * fd_step] {
            if !self.is_interior(&shifted(t)) {
                return Err(Error::Domain(self.name()));
            }
        }
        let plus = self.hessian_quad_form(&shifted(fd_step), u)?;
        let minus = self.hessian_quad_form(&shifted(-fd_step), u)?;
        let third = (plus - minus) / (2.0 * fd_step);
        let local = self.hessian_quad_form(x, u)?.sqrt();
        Ok(2.0 * self.self_concordance() * local.powi(3) - third.abs())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn values_on_known_points() {
        assert_relative_eq!(MirrorMap::euclidean(2).value(&[3.0, 4.0]).unwrap(), 12.5);
        let b = MirrorMap::box_log_barrier(1);
        assert_eq!(b.value(&[0.0]).unwrap(), 0.0);
        assert_relative_eq!(b.value(&[0.5]).unwrap(), (4.0f64 / 3.0).ln(), epsilon = 1e-15);
    }

    #[test]
    fn gradients_on_known_points() {
        assert_eq!(MirrorMap::box_log_barrier(2).grad(&[0.0, 0.0]).unwrap(), vec![0.0, 0.0]);
        assert_relative_eq!(
            MirrorMap::box_log_barrier(1).grad(&[0.5]).unwrap()[0],
            4.0 / 3.0,
            epsilon = 1e-15
        );
        assert_eq!(MirrorMap::simplex_barrier(1).grad(&[0.5]).unwrap(), vec![0.0]);
    }

    #[test]
    fn dual_gradients_on_known_points() {
        assert_eq!(MirrorMap::euclidean(2).dual_grad(&[1.0, 2.0]).unwrap(), vec![1.0, 2.0]);
        assert_relative_eq!(
            MirrorMap::box_log_barrier(1).dual_grad(&[4.0 / 3.0]).unwrap()[0],
            0.5,
            epsilon = 1e-15
        );
        assert_relative_eq!(
            MirrorMap::simplex_barrier(1).dual_grad(&[0.0]).unwrap()[0],
            0.5,
            epsilon = 1e-14
        );
        assert_eq!(MirrorMap::box_log_barrier(1).dual_grad(&[0.0]).unwrap(), vec![0.0]);
    }

    #[test]
    fn bregman_on_known_points() {
        assert_relative_eq!(
            MirrorMap::euclidean(2).bregman(&[1.0, 0.0], &[0.0, 0.0]).unwrap(),
            0.5
        );
        let b = MirrorMap::box_log_barrier(1);
        assert_eq!(b.bregman(&[0.3], &[0.3]).unwrap(), 0.0);
        assert_relative_eq!(b.bregman(&[0.5], &[0.0]).unwrap(), 0.287_682_072_451_780_9, epsilon = 1e-12);
    }

    #[test]
    fn hessian_factors_on_known_points() {
        assert_eq!(
            MirrorMap::euclidean(3).hessian_factor(&[1.0, 2.0, 3.0]).unwrap(),
            HessianFactor::Identity(3)
        );
        match MirrorMap::box_log_barrier(1).hessian_factor(&[0.0]).unwrap() {
            HessianFactor::Diagonal(s) => assert_relative_eq!(s[0], 2f64.sqrt()),
            other => panic!("unexpected structure {other:?}"),
        }
        let f = MirrorMap::simplex_barrier(2)
            .hessian_factor(&[1.0 / 3.0, 1.0 / 3.0])
            .unwrap();
        let ctu = f.apply_transpose(&[1.0, 0.0]);
        assert_relative_eq!(dot(&ctu, &ctu), 18.0, max_relative = 1e-12);
    }

    #[test]
    fn dual_norms_on_known_points() {
        assert_relative_eq!(
            MirrorMap::euclidean(2).local_dual_norm(&[0.0, 0.0], &[3.0, 4.0]).unwrap(),
            5.0
        );
        assert_relative_eq!(
            MirrorMap::box_log_barrier(1).local_dual_norm(&[0.0], &[1.0]).unwrap(),
            0.5f64.sqrt(),
            epsilon = 1e-15
        );
        assert_eq!(
            MirrorMap::simplex_barrier(2).local_dual_norm(&[0.2, 0.2], &[0.0, 0.0]).unwrap(),
            0.0
        );
    }

    #[test]
    fn self_concordance_known_residuals() {
        let r = MirrorMap::euclidean(2)
            .check_self_concordance(&[0.3, 0.1], &[0.6, 0.8], 1e-4)
            .unwrap();
        assert!(r.abs() < 1e-9);
        let r = MirrorMap::box_log_barrier(1)
            .check_self_concordance(&[0.0], &[1.0], 1e-4)
            .unwrap();
        assert_relative_eq!(r, 2.0 * 2f64.powf(1.5), max_relative = 1e-8);
    }

    #[test]
    fn boundary_points_are_rejected() {
        let b = MirrorMap::box_log_barrier(2);
        assert!(matches!(b.value(&[1.0, 0.0]), Err(Error::Domain(_))));
        let s = MirrorMap::simplex_barrier(2);
        assert!(matches!(s.grad(&[0.5, 0.5]), Err(Error::Domain(_))));
        assert!(matches!(s.hessian_factor(&[0.0, 0.5]), Err(Error::Domain(_))));
        assert!(matches!(s.bregman(&[0.2, 0.2], &[-0.1, 0.2]), Err(Error::Domain(_))));
        assert!(matches!(s.value(&[0.2]), Err(Error::Dimension { .. })));
    }

    #[test]
    fn stencil_leaving_domain_is_an_error() {
        let b = MirrorMap::box_log_barrier(1);
        assert!(matches!(
            b.check_self_concordance(&[0.999], &[1.0], 1e-3),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn weighted_barrier_rejects_nonpositive_weights() {
        assert!(matches!(
            MirrorMap::weighted_simplex_barrier(vec![1.0, 0.0, 2.0]),
            Err(Error::Weight(w)) if w == 0.0
        ));
        let m = MirrorMap::weighted_simplex_barrier(vec![2.0; 11]).unwrap();
        assert_eq!(m.dim(), 10);
        assert_relative_eq!(m.self_concordance(), 0.5f64.sqrt());
    }

    #[test]
    fn weighted_gradient_matches_formula() {
        let m = MirrorMap::weighted_simplex_barrier(vec![3.0, 1.0, 2.0]).unwrap();
        let x = [0.2, 0.5];
        let g = m.grad(&x).unwrap();
        assert_relative_eq!(g[0], 3.0 / 0.3 - 1.0 / 0.2, epsilon = 1e-12);
        assert_relative_eq!(g[1], 3.0 / 0.3 - 2.0 / 0.5, epsilon = 1e-12);
        let back = m.dual_grad(&g).unwrap();
        assert_relative_eq!(back[0], 0.2, epsilon = 1e-13);
        assert_relative_eq!(back[1], 0.5, epsilon = 1e-13);
    }

    #[test]
    fn extreme_dual_points_stay_interior() {
        let s = MirrorMap::simplex_barrier(3);
        for y in [[1e8, -1e8, 0.0], [-1e6, -1e6, -1e6], [50.0, 50.0, 50.0]] {
            let x = s.dual_grad(&y).unwrap();
            assert!(s.is_interior(&x), "{x:?}");
        }
        let b = MirrorMap::box_log_barrier(2);
        assert!(b.is_interior(&b.dual_grad(&[1e6, -1e6]).unwrap()));
    }
}
