//! Benchmark filtering: dissimilar sets, label-aware critical sets, the
//! uniformity measure and the choice of the distance threshold.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceMetadataRow {
    pub instance_id: String,
    /// Transformed feature vector.
    pub features: Vec<f64>,
    /// One bit per algorithm: true when the algorithm performs well.
    pub delta: Vec<bool>,
    /// Lower tiers are kept in preference to higher ones.
    pub priority_tier: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterResult {
    /// Retained ids, in input order.
    pub retained: Vec<String>,
    pub theta: f64,
    /// Uniformity of the retained set, `None` when it has fewer than two rows.
    pub uniformity: Option<f64>,
    pub n_dissimilar: usize,
    /// Rows kept only because a close neighbour carries a different label.
    pub n_violating: usize,
    pub n_critical: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FilterMode {
    Dissimilar,
    Critical,
}

impl std::str::FromStr for FilterMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dissimilar" => Ok(FilterMode::Dissimilar),
            "critical" => Ok(FilterMode::Critical),
            _ => Err(Error::Config(format!("unknown filter mode `{s}` (expected dissimilar or critical)"))),
        }
    }
}

pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

fn check_rows(rows: &[InstanceMetadataRow], theta: f64) -> Result<()> {
    if !(theta >= 0.0 && theta.is_finite()) {
        return Err(Error::Config(format!("theta must be finite and non-negative, got {theta}")));
    }
    let Some(first) = rows.first() else { return Ok(()) };
    for r in rows {
        if r.features.len() != first.features.len() || r.delta.len() != first.delta.len() {
            return Err(Error::Schema(format!(
                "row `{}` has {} features and {} labels, expected {} and {}",
                r.instance_id,
                r.features.len(),
                r.delta.len(),
                first.features.len(),
                first.delta.len()
            )));
        }
        if let Some(v) = r.features.iter().find(|v| !v.is_finite()) {
            return Err(Error::Data(format!("row `{}` has non-finite feature {v}", r.instance_id)));
        }
    }
    Ok(())
}

/// Removal scan order: highest tier first, then descending instance id.
pub fn scan_order(rows: &[InstanceMetadataRow]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..rows.len()).collect();
    order.sort_by(|&a, &b| {
        rows[b]
            .priority_tier
            .cmp(&rows[a].priority_tier)
            .then_with(|| rows[b].instance_id.cmp(&rows[a].instance_id))
    });
    order
}

fn greedy_keep(rows: &[InstanceMetadataRow], theta: f64, label_aware: bool) -> Vec<bool> {
    let mut present = vec![true; rows.len()];
    for i in scan_order(rows) {
        let similar = (0..rows.len()).any(|j| {
            j != i
                && present[j]
                && (!label_aware || rows[i].delta == rows[j].delta)
                && distance(&rows[i].features, &rows[j].features) <= theta
        });
        if similar {
            present[i] = false;
        }
    }
    present
}

fn result(rows: &[InstanceMetadataRow], theta: f64, keep: &[bool], n_dissimilar: usize) -> FilterResult {
    let retained: Vec<String> = rows.iter().zip(keep).filter(|(_, k)| **k).map(|(r, _)| r.instance_id.clone()).collect();
    let kept: Vec<&[f64]> = rows.iter().zip(keep).filter(|(_, k)| **k).map(|(r, _)| r.features.as_slice()).collect();
    FilterResult {
        n_critical: retained.len(),
        n_violating: retained.len() - n_dissimilar,
        n_dissimilar,
        retained,
        theta,
        uniformity: uniformity(&kept).ok(),
    }
}

/// Removes rows that have a still-present neighbour within `theta`.
pub fn dissimilar_set(rows: &[InstanceMetadataRow], theta: f64) -> Result<FilterResult> {
    check_rows(rows, theta)?;
    let keep = greedy_keep(rows, theta, false);
    let n = keep.iter().filter(|k| **k).count();
    Ok(result(rows, theta, &keep, n))
}

/// Like [`dissimilar_set`], but a row is only removed when the close
/// neighbour also has the same performance labels.
pub fn critical_set(rows: &[InstanceMetadataRow], theta: f64) -> Result<FilterResult> {
    check_rows(rows, theta)?;
    let dissimilar = greedy_keep(rows, theta, false).iter().filter(|k| **k).count();
    let keep = greedy_keep(rows, theta, true);
    Ok(result(rows, theta, &keep, dissimilar))
}

pub fn filter(rows: &[InstanceMetadataRow], theta: f64, mode: FilterMode) -> Result<FilterResult> {
    match mode {
        FilterMode::Dissimilar => dissimilar_set(rows, theta),
        FilterMode::Critical => critical_set(rows, theta),
    }
}

/// `1 - sd / mean` of nearest-neighbour distances (sample sd).
pub fn uniformity(features: &[&[f64]]) -> Result<f64> {
    let n = features.len();
    if n < 2 {
        return Err(Error::Size(format!("uniformity needs at least 2 instances, got {n}")));
    }
    let nn: Vec<f64> = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| j != i)
                .map(|j| distance(features[i], features[j]))
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    let mean = nn.iter().sum::<f64>() / n as f64;
    if !(mean > 0.0) {
        return Err(Error::Degenerate("all nearest-neighbour distances are zero".into()));
    }
    let sd = (nn.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0)).sqrt();
    Ok(1.0 - sd / mean)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaCandidate {
    pub theta: f64,
    pub uniformity: Option<f64>,
    pub scaled: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaSelection {
    pub theta: f64,
    pub candidates: Vec<ThetaCandidate>,
}

/// Min-max scales defined values to `[0, 1]`; a constant set scales to 1.
pub fn min_max_scale(values: &[Option<f64>]) -> Vec<Option<f64>> {
    let (lo, hi) = values
        .iter()
        .flatten()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    values
        .iter()
        .map(|v| v.map(|v| if hi > lo { (v - lo) / (hi - lo) } else { 1.0 }))
        .collect()
}

/// Smallest `theta` whose scaled dissimilar-set uniformity reaches 0.5.
pub fn select_theta(rows: &[InstanceMetadataRow], grid: &[f64]) -> Result<ThetaSelection> {
    if grid.is_empty() {
        return Err(Error::Config("theta grid is empty".into()));
    }
    if grid.windows(2).any(|w| w[1].partial_cmp(&w[0]) != Some(Ordering::Greater)) {
        return Err(Error::Config("theta grid must be strictly ascending".into()));
    }
    for &t in grid {
        check_rows(rows, t)?;
    }
    let u: Vec<Option<f64>> = grid
        .par_iter()
        .map(|&t| {
            let keep = greedy_keep(rows, t, false);
            let kept: Vec<&[f64]> =
                rows.iter().zip(&keep).filter(|(_, k)| **k).map(|(r, _)| r.features.as_slice()).collect();
            uniformity(&kept).ok()
        })
        .collect();
    select_from_uniformity(grid, &u)
}

/// θ selection from precomputed uniformities over an ascending grid.
pub fn select_from_uniformity(grid: &[f64], u: &[Option<f64>]) -> Result<ThetaSelection> {
    if u.len() != grid.len() {
        return Err(Error::Shape { expected: grid.len(), got: u.len() });
    }
    let scaled = min_max_scale(u);
    let candidates: Vec<ThetaCandidate> = grid
        .iter()
        .zip(u)
        .zip(&scaled)
        .map(|((&theta, &uniformity), &scaled)| ThetaCandidate { theta, uniformity, scaled })
        .collect();
    let theta = candidates
        .iter()
        .find(|c| c.scaled.is_some_and(|s| s >= 0.5))
        .map(|c| c.theta)
        .ok_or_else(|| Error::Selection("uniformity is undefined at every theta".into()))?;
    Ok(ThetaSelection { theta, candidates })
}
