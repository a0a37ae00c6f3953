use crate::error::{Error, Result};

/// Optimal assignment: row `i` is matched to column `permutation[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    pub permutation: Vec<usize>,
    pub cost: f64,
}

/// Exact minimum-cost perfect matching of a square cost matrix.
///
/// Hungarian method in its shortest-augmenting-path form with dual potentials,
/// `O(m³)`.
pub fn min_cost_assignment(cost: &[Vec<f64>]) -> Result<Assignment> {
    let n = cost.len();
    for row in cost {
        if row.len() != n {
            return Err(Error::Shape {
                rows: n,
                cols: row.len(),
            });
        }
    }
    let flat: Vec<f64> = cost.iter().flatten().copied().collect();
    assign_flat(&flat, n)
}

pub(crate) fn assign_flat(a: &[f64], n: usize) -> Result<Assignment> {
    debug_assert_eq!(a.len(), n * n);
    if n == 0 {
        return Ok(Assignment {
            permutation: Vec::new(),
            cost: 0.0,
        });
    }
    if let Some(bad) = a.iter().find(|v| !v.is_finite()) {
        return Err(Error::Validation(format!("cost matrix entry {bad} is not finite")));
    }

    // 1-based: index 0 is a virtual column holding the row being inserted.
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut owner = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    let mut minv = vec![0.0; n + 1];
    let mut used = vec![false; n + 1];

    for i in 1..=n {
        owner[0] = i;
        let mut j0 = 0;
        minv.fill(f64::INFINITY);
        used.fill(false);
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let row = &a[(i0 - 1) * n..i0 * n];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = row[j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut permutation = vec![0usize; n];
    for j in 1..=n {
        permutation[owner[j] - 1] = j - 1;
    }
    let cost = permutation
        .iter()
        .enumerate()
        .map(|(i, &j)| a[i * n + j])
        .sum();
    Ok(Assignment { permutation, cost })
}
