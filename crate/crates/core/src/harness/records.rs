//! Per-iteration metric records and their CSV form.
//!
//! Header: `experiment,sampler,inner_steps,trial,iteration,metric,value`.
//! Values use Rust's shortest round-trip decimal formatting, so reparsing a
//! file reproduces every record bit for bit.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "experiment,sampler,inner_steps,trial,iteration,metric,value";

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub experiment: String,
    pub sampler: String,
    /// Euler–Maruyama substeps; 0 for samplers without a diffusion phase.
    pub inner_steps: usize,
    pub trial: usize,
    pub iteration: usize,
    pub metric: String,
    pub value: f64,
}

fn sort_key(r: &RunRecord) -> (&str, usize, usize, usize, &str) {
    (&r.sampler, r.inner_steps, r.trial, r.iteration, &r.metric)
}

pub fn sort_records(records: &mut [RunRecord]) {
    records.sort_by(|a, b| sort_key(a).cmp(&sort_key(b)));
}

pub fn records_to_csv(records: &[RunRecord]) -> String {
    let mut sorted = records.to_vec();
    sort_records(&mut sorted);
    let mut s = String::with_capacity(64 * (sorted.len() + 1));
    s.push_str(CSV_HEADER);
    s.push('\n');
    for r in &sorted {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{:?}",
            r.experiment, r.sampler, r.inner_steps, r.trial, r.iteration, r.metric, r.value
        );
    }
    s
}

pub fn records_from_csv(text: &str) -> Result<Vec<RunRecord>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == CSV_HEADER => {}
        _ => {
            return Err(Error::Parse {
                line: 1,
                message: format!("expected header `{CSV_HEADER}`"),
            })
        }
    }
    let mut out = Vec::new();
    for (idx, line) in lines.enumerate() {
        let line_no = idx + 2;
        if line.trim().is_empty() {
            continue;
        }
        let bad = |what: &str| Error::Parse {
            line: line_no,
            message: format!("invalid {what}"),
        };
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 7 {
            return Err(bad("field count"));
        }
        out.push(RunRecord {
            experiment: f[0].to_string(),
            sampler: f[1].to_string(),
            inner_steps: f[2].parse().map_err(|_| bad("inner_steps"))?,
            trial: f[3].parse().map_err(|_| bad("trial"))?,
            iteration: f[4].parse().map_err(|_| bad("iteration"))?,
            metric: f[5].to_string(),
            value: f[6].parse().map_err(|_| bad("value"))?,
        });
    }
    Ok(out)
}

pub fn write_csv(records: &[RunRecord], path: &Path) -> Result<()> {
    std::fs::write(path, records_to_csv(records))?;
    Ok(())
}

pub fn read_csv(path: &Path) -> Result<Vec<RunRecord>> {
    records_from_csv(&std::fs::read_to_string(path)?)
}

/// Trial mean of one metric at one iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialAverage {
    pub sampler: String,
    pub inner_steps: usize,
    pub iteration: usize,
    pub metric: String,
    pub mean: f64,
    /// Standard error of the mean over trials (0 for a single trial).
    pub std_err: f64,
    pub trials: usize,
}

/// Arithmetic mean over trials for every (sampler, inner_steps, iteration, metric).
pub fn trial_average(records: &[RunRecord]) -> Vec<TrialAverage> {
    let mut groups: BTreeMap<(String, usize, usize, String), Vec<f64>> = BTreeMap::new();
    for r in records {
        groups
            .entry((r.sampler.clone(), r.inner_steps, r.iteration, r.metric.clone()))
            .or_default()
            .push(r.value);
    }
    groups
        .into_iter()
        .map(|((sampler, inner_steps, iteration, metric), values)| {
            let n = values.len() as f64;
            let mean = values.iter().sum::<f64>() / n;
            let std_err = if values.len() > 1 {
                (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0) / n).sqrt()
            } else {
                0.0
            };
            TrialAverage {
                sampler,
                inner_steps,
                iteration,
                metric,
                mean,
                std_err,
                trials: values.len(),
            }
        })
        .collect()
}
