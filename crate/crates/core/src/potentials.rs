//! Target potentials `V` (negative log-densities up to a constant) and the
//! relative convexity constants that drive the step-size rules.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::mirror::MirrorMap;

const POWER_ITER_MAX: usize = 1000;
const POWER_ITER_TOL: f64 = 1e-8;

/// Observations `(Xᵢ, Yᵢ)` of a logistic regression model.
#[derive(Debug, Clone, PartialEq)]
pub struct LogisticDataset {
    dim: usize,
    features: Vec<f64>,
    labels: Vec<bool>,
}

impl LogisticDataset {
    pub fn new(features: Vec<Vec<f64>>, labels: Vec<bool>) -> Result<Self> {
        if features.is_empty() {
            return Err(Error::Empty("logistic dataset"));
        }
        if features.len() != labels.len() {
            return Err(Error::Size(features.len(), labels.len()));
        }
        let dim = features[0].len();
        if dim == 0 {
            return Err(Error::Validation("feature vectors must be non-empty".into()));
        }
        let mut flat = Vec::with_capacity(dim * features.len());
        for row in &features {
            if row.len() != dim {
                return Err(Error::Dimension {
                    expected: dim,
                    got: row.len(),
                });
            }
            flat.extend_from_slice(row);
        }
        Ok(Self {
            dim,
            features: flat,
            labels,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn feature(&self, i: usize) -> &[f64] {
        &self.features[i * self.dim..(i + 1) * self.dim]
    }

    pub fn label(&self, i: usize) -> bool {
        self.labels[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[f64], bool)> + '_ {
        self.features
            .chunks_exact(self.dim)
            .zip(self.labels.iter().copied())
    }

    /// `λ_max(Σ Xᵢ Xᵢᵀ)` by power iteration from the all-ones vector.
    pub fn smoothness_bound(&self) -> f64 {
        let d = self.dim;
        let mut gram = DMatrix::<f64>::zeros(d, d);
        for (x, _) in self.iter() {
            let v = DVector::from_column_slice(x);
            gram.ger(1.0, &v, &v, 1.0);
        }
        power_iteration(&gram)
    }

    /// `Σ ‖Xᵢ‖₂`, an upper bound on `‖∇V‖₂` anywhere.
    pub fn lipschitz_bound(&self) -> f64 {
        self.iter()
            .map(|(x, _)| x.iter().map(|v| v * v).sum::<f64>().sqrt())
            .sum()
    }
}

/// Largest eigenvalue of a symmetric PSD matrix.
fn power_iteration(m: &DMatrix<f64>) -> f64 {
    let d = m.nrows();
    let scale = m.amax();
    if scale == 0.0 {
        return 0.0;
    }
    // All ones first; the alternating start covers an all-ones null vector.
    let starts = [
        DVector::from_element(d, 1.0),
        DVector::from_fn(d, |i, _| if i % 2 == 0 { 1.0 } else { -0.5 } * (i + 1) as f64),
    ];
    let mut best = 0.0_f64;
    for start in starts {
        let mut v = start.normalize();
        let mut lambda = 0.0;
        for _ in 0..POWER_ITER_MAX {
            let mv = m * &v;
            let norm = mv.norm();
            if norm <= 1e-14 * scale {
                lambda = 0.0;
                break;
            }
            let next = mv / norm;
            let converged = (norm - lambda).abs() <= POWER_ITER_TOL * norm;
            lambda = norm;
            v = next;
            if converged {
                break;
            }
        }
        best = best.max(lambda);
        if best > 0.0 {
            break;
        }
    }
    best
}

/// `V(x) = ½⟨x, A x⟩` with `A` symmetric positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticPotential {
    matrix: DMatrix<f64>,
}

impl QuadraticPotential {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Shape {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
            });
        }
        let asym = (&matrix - matrix.transpose()).amax();
        if asym > 1e-12 {
            return Err(Error::Validation(format!(
                "quadratic matrix is not symmetric (max asymmetry {asym:e})"
            )));
        }
        let min_eig = matrix.clone().symmetric_eigenvalues().min();
        if min_eig < -1e-10 {
            return Err(Error::Validation(format!(
                "quadratic matrix is not positive semidefinite (min eigenvalue {min_eig:e})"
            )));
        }
        Ok(Self { matrix })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.matrix.amax()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Potential {
    Zero(usize),
    /// `V(x) = ⟨c, x⟩`.
    Linear(Vec<f64>),
    Quadratic(QuadraticPotential),
    LogisticRegression(LogisticDataset),
    /// `V(x) = a₀ ln 1/(1−Σx) + Σ aᵢ ln 1/xᵢ`; the Dirichlet potential.
    WeightedBarrier(MirrorMap),
}

/// `ln(1 + eᵗ)` without overflow.
pub fn softplus(t: f64) -> f64 {
    t.max(0.0) + (-t.abs()).exp().ln_1p()
}

/// Logistic function `1/(1 + e⁻ᵗ)`.
pub fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl Potential {
    pub fn zero(dim: usize) -> Self {
        Potential::Zero(dim)
    }

    pub fn quadratic(matrix: DMatrix<f64>) -> Result<Self> {
        QuadraticPotential::new(matrix).map(Potential::Quadratic)
    }

    pub fn logistic(data: LogisticDataset) -> Self {
        Potential::LogisticRegression(data)
    }

    pub fn weighted_barrier(weights: Vec<f64>) -> Result<Self> {
        MirrorMap::weighted_simplex_barrier(weights).map(Potential::WeightedBarrier)
    }

    pub fn dim(&self) -> usize {
        match self {
            Potential::Zero(d) => *d,
            Potential::Linear(c) => c.len(),
            Potential::Quadratic(q) => q.matrix.nrows(),
            Potential::LogisticRegression(ds) => ds.dim,
            Potential::WeightedBarrier(m) => m.dim(),
        }
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() == self.dim() {
            Ok(())
        } else {
            Err(Error::Dimension {
                expected: self.dim(),
                got: x.len(),
            })
        }
    }

    /// `V(x)`.
    pub fn value(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        Ok(match self {
            Potential::Zero(_) => 0.0,
            Potential::Linear(c) => dot(c, x),
            Potential::Quadratic(q) => {
                let v = DVector::from_column_slice(x);
                0.5 * v.dot(&(&q.matrix * &v))
            }
            Potential::LogisticRegression(ds) => ds
                .iter()
                .map(|(xi, y)| {
                    let t = dot(x, xi);
                    softplus(t) - if y { t } else { 0.0 }
                })
                .sum(),
            Potential::WeightedBarrier(m) => return m.value(x),
        })
    }

    /// `∇V(x)`.
    pub fn grad(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.dim()];
        self.grad_into(x, &mut out)?;
        Ok(out)
    }

    pub fn grad_into(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        self.check_dim(x)?;
        match self {
            Potential::Zero(_) => out.fill(0.0),
            Potential::Linear(c) => out.copy_from_slice(c),
            Potential::Quadratic(q) => {
                let d = x.len();
                for (i, o) in out.iter_mut().enumerate() {
                    *o = (0..d).map(|j| q.matrix[(i, j)] * x[j]).sum();
                }
            }
            Potential::LogisticRegression(ds) => {
                out.fill(0.0);
                for (xi, y) in ds.iter() {
                    let coef = sigmoid(dot(x, xi)) - if y { 1.0 } else { 0.0 };
                    for (o, &f) in out.iter_mut().zip(xi) {
                        *o += coef * f;
                    }
                }
            }
            Potential::WeightedBarrier(m) => m.grad_into(x, out)?,
        }
        Ok(())
    }
}

/// Relative convexity profile of a potential with respect to a mirror map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvexityProfile {
    pub alpha: f64,
    pub beta: f64,
    pub lipschitz: f64,
    pub self_concordance: f64,
    /// `β + 2 M_φ L`.
    pub beta_prime: f64,
}

impl ConvexityProfile {
    pub fn new(alpha: f64, beta: f64, lipschitz: f64, self_concordance: f64) -> Self {
        Self {
            alpha,
            beta,
            lipschitz,
            self_concordance,
            beta_prime: beta + 2.0 * self_concordance * lipschitz,
        }
    }
}

/// Profile of the logistic posterior under the box log-barrier, from the
/// ordinary smoothness `β` and Lipschitz constant `L` of `V`.
///
/// The barrier's Hessian dominates `2I`, which halves `β` and divides `L`
/// by `√2`.
pub fn profile_blr(beta: f64, lipschitz: f64) -> ConvexityProfile {
    ConvexityProfile::new(0.0, beta / 2.0, lipschitz / 2f64.sqrt(), 1.0)
}

/// Profile of a quadratic with entries in `[−1, 1]` under the simplex barrier.
pub fn profile_simplex_quadratic() -> ConvexityProfile {
    ConvexityProfile::new(0.0, 1.0, 1.0, 1.0)
}

/// Constants of the Dirichlet target sampled with `φ = V`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirichletProfile {
    pub profile: ConvexityProfile,
    /// `3 √d √(a_max / a_min)`, a closed-form upper bound on `β′`.
    pub beta_prime_bound: f64,
}

pub fn profile_dirichlet(weights: &[f64]) -> Result<DirichletProfile> {
    if weights.len() < 2 {
        return Err(Error::Validation("need weights a_0..a_d with d >= 1".into()));
    }
    if let Some(&bad) = weights.iter().find(|&&a| !(a > 0.0)) {
        return Err(Error::Weight(bad));
    }
    let d = (weights.len() - 1) as f64;
    let a_max = weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let a_min = weights.iter().copied().fold(f64::INFINITY, f64::min);
    let lipschitz = weights.iter().sum::<f64>().sqrt();
    let profile = ConvexityProfile::new(1.0, 1.0, lipschitz, a_min.powf(-0.5));
    Ok(DirichletProfile {
        profile,
        beta_prime_bound: 3.0 * d.sqrt() * (a_max / a_min).sqrt(),
    })
}
