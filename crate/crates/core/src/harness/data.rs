//! Synthetic logistic-regression data and its CSV format (`y,x1,…,xd`).

use std::fmt::Write as _;
use std::path::Path;

use rand::Rng;

use crate::error::{Error, Result};
use crate::oracle::sample_uniform_l1_ball;
use crate::potentials::{sigmoid, LogisticDataset};

/// Draws `n` pairs with `Xᵢ` uniform on the `ℓ₁` ball and
/// `Yᵢ ~ Bernoulli(σ(⟨θ*, Xᵢ⟩))`.
pub fn generate_logistic_data<R: Rng + ?Sized>(
    n: usize,
    theta_star: &[f64],
    rng: &mut R,
) -> Result<LogisticDataset> {
    let d = theta_star.len();
    let mut features = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let x = sample_uniform_l1_ball(d, rng);
        let p = sigmoid(x.iter().zip(theta_star).map(|(a, b)| a * b).sum());
        labels.push(rng.random::<f64>() < p);
        features.push(x);
    }
    LogisticDataset::new(features, labels)
}

pub fn dataset_to_csv(ds: &LogisticDataset) -> String {
    let mut s = String::from("y");
    for j in 1..=ds.dim() {
        let _ = write!(s, ",x{j}");
    }
    s.push('\n');
    for (x, y) in ds.iter() {
        s.push(if y { '1' } else { '0' });
        for v in x {
            let _ = write!(s, ",{v:?}");
        }
        s.push('\n');
    }
    s
}

pub fn dataset_from_csv(text: &str) -> Result<LogisticDataset> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(Error::Empty("dataset file"))?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    let expected: Vec<String> = std::iter::once("y".to_string())
        .chain((1..cols.len()).map(|j| format!("x{j}")))
        .collect();
    if cols.len() < 2 || cols != expected {
        return Err(Error::Parse {
            line: 1,
            message: format!("dataset header must be `y,x1,...,xd`, got `{header}`"),
        });
    }
    let d = cols.len() - 1;
    let mut features = Vec::new();
    let mut labels = Vec::new();
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let bad = |message: String| Error::Parse {
            line: idx + 1,
            message,
        };
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != d + 1 {
            return Err(bad(format!("expected {} fields, got {}", d + 1, fields.len())));
        }
        labels.push(match fields[0] {
            "1" => true,
            "0" => false,
            other => return Err(bad(format!("label must be 0 or 1, got `{other}`"))),
        });
        features.push(
            fields[1..]
                .iter()
                .map(|f| f.parse::<f64>().map_err(|_| bad(format!("invalid number `{f}`"))))
                .collect::<Result<Vec<_>>>()?,
        );
    }
    LogisticDataset::new(features, labels)
}

pub fn write_dataset(ds: &LogisticDataset, path: &Path) -> Result<()> {
    std::fs::write(path, dataset_to_csv(ds))?;
    Ok(())
}

pub fn read_dataset(path: &Path) -> Result<LogisticDataset> {
    dataset_from_csv(&std::fs::read_to_string(path)?)
}
