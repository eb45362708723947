//! Instance features computed from the training sample alone, and the
//! transforms that make them commensurable across instances.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::pearson;

fn check_pair(y_l: &[f64], y_h: &[f64]) -> Result<()> {
    if y_l.len() != y_h.len() {
        return Err(Error::Size(format!("y_l has {} values, y_h has {}", y_l.len(), y_h.len())));
    }
    if y_l.len() < 2 {
        return Err(Error::Size("need at least 2 paired values".into()));
    }
    Ok(())
}

/// Squared Pearson correlation between the two sources.
pub fn cc(y_l: &[f64], y_h: &[f64]) -> Result<f64> {
    check_pair(y_l, y_h)?;
    let r = pearson(y_l, y_h)?;
    Ok((r * r).min(1.0))
}

pub fn rmse(y_l: &[f64], y_h: &[f64]) -> Result<f64> {
    check_pair(y_l, y_h)?;
    let ss: f64 = y_l.iter().zip(y_h).map(|(l, h)| (l - h).powi(2)).sum();
    Ok((ss / y_l.len() as f64).sqrt())
}

/// RMSE divided by the range of `y_h`.
pub fn rrmse(y_l: &[f64], y_h: &[f64]) -> Result<f64> {
    let e = rmse(y_l, y_h)?;
    let (lo, hi) = y_h.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    if !(hi > lo) {
        return Err(Error::UndefinedCorrelation("y_h is constant, RRMSE has no scale".into()));
    }
    Ok(e / (hi - lo))
}

/// Squared weighted correlation with weighted means and (biased) weighted
/// standard deviations.
pub fn wcc(y_l: &[f64], y_h: &[f64], w: &[f64]) -> Result<f64> {
    check_pair(y_l, y_h)?;
    if w.len() != y_l.len() {
        return Err(Error::Size(format!("{} weights for {} values", w.len(), y_l.len())));
    }
    if w.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(Error::Data("weights must be finite and non-negative".into()));
    }
    let total: f64 = w.iter().sum();
    if !(total > 0.0) {
        return Err(Error::UndefinedCorrelation("all weights are zero".into()));
    }
    let ml = w.iter().zip(y_l).map(|(w, v)| w * v).sum::<f64>() / total;
    let mh = w.iter().zip(y_h).map(|(w, v)| w * v).sum::<f64>() / total;
    let vl = w.iter().zip(y_l).map(|(w, v)| w * (v - ml).powi(2)).sum::<f64>() / total;
    let vh = w.iter().zip(y_h).map(|(w, v)| w * (v - mh).powi(2)).sum::<f64>() / total;
    let scale = y_l.iter().chain(y_h).fold(0.0f64, |a, v| a.max(v.abs())).max(f64::MIN_POSITIVE);
    if !(vl > (1e-15 * scale).powi(2) && vh > (1e-15 * scale).powi(2)) {
        return Err(Error::UndefinedCorrelation("zero weighted variance".into()));
    }
    let s: f64 = w.iter().zip(y_l.iter().zip(y_h)).map(|(w, (l, h))| w * (l - ml) * (h - mh)).sum();
    let r = s / total / (vl.sqrt() * vh.sqrt());
    Ok((r * r).min(1.0))
}

/// Kernel weights `max(0, 1 - |x - x_i| / (r * sqrt(d)))` on unit-hypercube points.
pub fn lcc_weights(points: &[Vec<f64>], centre: &[f64], radius: f64) -> Vec<f64> {
    let reach = radius * (centre.len() as f64).sqrt();
    points
        .iter()
        .map(|p| {
            let dist = p.iter().zip(centre).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            (1.0 - dist / reach).max(0.0)
        })
        .collect()
}

/// Local correlation of the two sources around `centre`.
///
/// Undefined (an `UndefinedCorrelation` error) when fewer than two points get
/// a positive weight or a weighted variance vanishes.
pub fn lcc_at(points: &[Vec<f64>], y_l: &[f64], y_h: &[f64], centre: &[f64], radius: f64) -> Result<f64> {
    if points.len() != y_l.len() {
        return Err(Error::Size(format!("{} points for {} values", points.len(), y_l.len())));
    }
    if !(radius > 0.0) {
        return Err(Error::Config(format!("LCC radius must be positive, got {radius}")));
    }
    let w = lcc_weights(points, centre, radius);
    if w.iter().filter(|v| **v > 0.0).count() < 2 {
        return Err(Error::UndefinedCorrelation("fewer than two points inside the LCC ball".into()));
    }
    wcc(y_l, y_h, &w)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RadiusMode {
    /// `r = 0.2`
    Fixed,
    /// `r = 0.2^(1/d)`
    DimScaled,
}

impl RadiusMode {
    pub fn radius(self, d: usize) -> f64 {
        match self {
            RadiusMode::Fixed => 0.2,
            RadiusMode::DimScaled => 0.2f64.powf(1.0 / d as f64),
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            RadiusMode::Fixed => "fixed",
            RadiusMode::DimScaled => "dim",
        }
    }
}

pub const DEFAULT_THRESHOLDS: [f64; 11] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.975];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LccConfig {
    pub radius_mode: RadiusMode,
    pub thresholds: Vec<f64>,
}

impl LccConfig {
    pub fn new(radius_mode: RadiusMode) -> Self {
        Self {
            radius_mode,
            thresholds: DEFAULT_THRESHOLDS.to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LccFeatures {
    /// `(p, fraction of centres with LCC >= p)` in threshold order.
    pub proportions: Vec<(f64, f64)>,
    pub mean: f64,
    pub sd: f64,
    pub coeff: f64,
    /// Centres whose local correlation was defined.
    pub used: usize,
    /// Centres dropped because their local correlation was undefined.
    pub dropped: usize,
}

/// Summary statistics of a set of local correlations.
///
/// The standard deviation uses `n - 1`; with a single centre it is 0. The
/// coefficient of variation is 0 when the mean is 0.
pub fn lcc_summary(values: &[f64], thresholds: &[f64]) -> Result<LccFeatures> {
    if values.is_empty() {
        return Err(Error::UndefinedCorrelation("no centre has a defined local correlation".into()));
    }
    let n = values.len() as f64;
    let proportions = thresholds
        .iter()
        .map(|&p| (p, values.iter().filter(|v| **v >= p).count() as f64 / n))
        .collect();
    let mean = values.iter().sum::<f64>() / n;
    let sd = if values.len() > 1 {
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    let coeff = if mean > 0.0 { sd / mean } else { 0.0 };
    Ok(LccFeatures {
        proportions,
        mean,
        sd,
        coeff,
        used: values.len(),
        dropped: 0,
    })
}

/// LCC features with every sample point as a centre; undefined centres are dropped.
pub fn lcc_features(points: &[Vec<f64>], y_l: &[f64], y_h: &[f64], cfg: &LccConfig) -> Result<LccFeatures> {
    check_pair(y_l, y_h)?;
    if let Some(p) = cfg.thresholds.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::Config(format!("LCC threshold {p} outside [0, 1]")));
    }
    let d = points.first().map_or(1, Vec::len);
    let radius = cfg.radius_mode.radius(d);
    let mut values = Vec::with_capacity(points.len());
    for c in points {
        match lcc_at(points, y_l, y_h, c, radius) {
            Ok(v) => values.push(v),
            Err(Error::UndefinedCorrelation(_)) => {}
            Err(e) => return Err(e),
        }
    }
    let dropped = points.len() - values.len();
    let mut f = lcc_summary(&values, &cfg.thresholds)?;
    f.dropped = dropped;
    Ok(f)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BudgetFeatures {
    pub b_h: f64,
    pub b_l: f64,
    pub br_h: f64,
    pub br_l: f64,
    pub br: f64,
    pub d: f64,
}

pub fn budget_features(n_h: usize, n_l: usize, d: usize) -> Result<BudgetFeatures> {
    if n_h == 0 || d == 0 || n_h > n_l {
        return Err(Error::Size(format!("need 1 <= n_h <= n_l and d >= 1, got n_h={n_h}, n_l={n_l}, d={d}")));
    }
    let (h, l, df) = (n_h as f64, n_l as f64, d as f64);
    Ok(BudgetFeatures {
        b_h: h,
        b_l: l,
        br_h: h / df,
        br_l: l / df,
        br: h / l,
        d: df,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdjustedR2 {
    pub value: f64,
    /// The regression could not be assessed (too few points for its terms, a
    /// rank-deficient design, or constant responses) and the value is 1.
    pub saturated: bool,
}

/// Design matrix with an intercept, the linear terms and, optionally, every
/// pairwise product `x_i * x_j` (`i < j`).
pub fn regression_design(x: &[Vec<f64>], with_interactions: bool) -> DMatrix<f64> {
    let d = x.first().map_or(0, Vec::len);
    let extra = if with_interactions { d * d.saturating_sub(1) / 2 } else { 0 };
    let cols = 1 + d + extra;
    DMatrix::from_fn(x.len(), cols, |i, c| {
        if c == 0 {
            1.0
        } else if c <= d {
            x[i][c - 1]
        } else {
            let mut k = c - d - 1;
            for a in 0..d {
                let span = d - a - 1;
                if k < span {
                    return x[i][a] * x[i][a + 1 + k];
                }
                k -= span;
            }
            unreachable!("interaction index in range")
        }
    })
}

/// Adjusted R^2 of a least-squares linear model of `y` on `x`.
pub fn adjusted_r2_linear(x: &[Vec<f64>], y: &[f64], with_interactions: bool) -> Result<AdjustedR2> {
    if x.len() != y.len() {
        return Err(Error::Size(format!("{} points for {} values", x.len(), y.len())));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::Data("regression responses must be finite".into()));
    }
    let saturated = Ok(AdjustedR2 { value: 1.0, saturated: true });
    let design = regression_design(x, with_interactions);
    let (n, cols) = design.shape();
    let predictors = cols - 1;
    if n < 2 || n <= predictors + 1 {
        return saturated;
    }
    let mean = y.iter().sum::<f64>() / n as f64;
    let sst: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    let scale = y.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(f64::MIN_POSITIVE);
    if sst <= (1e-12 * scale).powi(2) * n as f64 {
        return saturated;
    }
    let svd = design.clone().svd(true, true);
    let tol = svd.singular_values.max() * n.max(cols) as f64 * f64::EPSILON;
    if svd.rank(tol) < cols {
        return saturated;
    }
    let yv = DVector::from_column_slice(y);
    let beta = svd.solve(&yv, tol).map_err(|e| Error::Data(e.to_string()))?;
    let resid = &yv - &design * beta;
    let sse = resid.norm_squared();
    let r2 = 1.0 - sse / sst;
    let adj = 1.0 - (1.0 - r2) * (n as f64 - 1.0) / (n - predictors - 1) as f64;
    Ok(AdjustedR2 { value: adj.min(1.0), saturated: false })
}

/// Feature identifiers.
pub mod ids {
    pub const CC: &str = "cc";
    pub const RRMSE: &str = "rrmse";
    pub const B_H: &str = "b_h";
    pub const B_L: &str = "b_l";
    pub const BR_H: &str = "br_h";
    pub const BR_L: &str = "br_l";
    pub const BR: &str = "br";
    pub const D: &str = "d";
    /// Adjusted R^2 of a linear model of `f_h - f_l`.
    pub const R2_L_DIFF: &str = "r2_l_diff";
    /// Adjusted R^2 of a linear model with interactions of `f_h - f_l`.
    pub const R2_LI_DIFF: &str = "r2_li_diff";

    pub fn lcc_threshold(mode: super::RadiusMode, p: f64) -> String {
        format!("lcc_{}_{}", mode.tag(), p)
    }

    pub fn lcc_stat(mode: super::RadiusMode, stat: &str) -> String {
        format!("lcc_{}_{stat}", mode.tag())
    }
}

/// All feature ids produced by [`sample_features`], in column order.
pub fn feature_ids() -> Vec<String> {
    let mut out = vec![ids::CC.to_string(), ids::RRMSE.to_string()];
    for mode in [RadiusMode::Fixed, RadiusMode::DimScaled] {
        for p in DEFAULT_THRESHOLDS {
            out.push(ids::lcc_threshold(mode, p));
        }
        for stat in ["mean", "sd", "coeff"] {
            out.push(ids::lcc_stat(mode, stat));
        }
    }
    out.extend(
        [ids::B_H, ids::B_L, ids::BR_H, ids::BR_L, ids::BR, ids::D, ids::R2_L_DIFF, ids::R2_LI_DIFF]
            .iter()
            .map(|s| s.to_string()),
    );
    out
}

/// Known value range of a feature, or `None` for unbounded features.
pub fn feature_range(id: &str) -> Option<(f64, f64)> {
    match id {
        ids::RRMSE => None,
        ids::B_H | ids::B_L => Some((2.0, 400.0)),
        ids::BR_H | ids::BR_L => Some((2.0, 20.0)),
        ids::D => Some((1.0, 20.0)),
        s if s.starts_with("lcc_") && s.ends_with("_coeff") => None,
        _ => Some((0.0, 1.0)),
    }
}

/// One repetition's raw features; `None` marks an undefined value.
pub type RawFeatures = BTreeMap<String, Option<f64>>;

/// Features of one training sample. `points` are the high-fidelity points in
/// the unit hypercube, where both sources are known.
pub fn sample_features(points: &[Vec<f64>], y_l: &[f64], y_h: &[f64], n_l: usize) -> Result<RawFeatures> {
    let d = points.first().map_or(0, Vec::len);
    let mut out = RawFeatures::new();
    let defined = |r: Result<f64>| match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::UndefinedCorrelation(_)) => Ok(None),
        Err(e) => Err(e),
    };
    out.insert(ids::CC.into(), defined(cc(y_l, y_h))?);
    out.insert(ids::RRMSE.into(), defined(rrmse(y_l, y_h))?);
    for mode in [RadiusMode::Fixed, RadiusMode::DimScaled] {
        let lcc = match lcc_features(points, y_l, y_h, &LccConfig::new(mode)) {
            Ok(f) => Some(f),
            Err(Error::UndefinedCorrelation(_)) => None,
            Err(e) => return Err(e),
        };
        for (k, p) in DEFAULT_THRESHOLDS.iter().enumerate() {
            out.insert(ids::lcc_threshold(mode, *p), lcc.as_ref().map(|f| f.proportions[k].1));
        }
        out.insert(ids::lcc_stat(mode, "mean"), lcc.as_ref().map(|f| f.mean));
        out.insert(ids::lcc_stat(mode, "sd"), lcc.as_ref().map(|f| f.sd));
        out.insert(ids::lcc_stat(mode, "coeff"), lcc.as_ref().map(|f| f.coeff));
    }
    let b = budget_features(points.len(), n_l, d)?;
    for (k, v) in [
        (ids::B_H, b.b_h),
        (ids::B_L, b.b_l),
        (ids::BR_H, b.br_h),
        (ids::BR_L, b.br_l),
        (ids::BR, b.br),
        (ids::D, b.d),
    ] {
        out.insert(k.into(), Some(v));
    }
    let diff: Vec<f64> = y_h.iter().zip(y_l).map(|(h, l)| h - l).collect();
    out.insert(ids::R2_L_DIFF.into(), Some(adjusted_r2_linear(points, &diff, false)?.value));
    out.insert(ids::R2_LI_DIFF.into(), Some(adjusted_r2_linear(points, &diff, true)?.value));
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Raw,
    Transformed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub values: BTreeMap<String, f64>,
    /// Features undefined in every repetition.
    pub missing: BTreeSet<String>,
    /// Per feature, how many repetitions were excluded as undefined.
    pub excluded: BTreeMap<String, usize>,
    pub repetitions: usize,
    pub provenance: Provenance,
}

impl FeatureVector {
    pub fn get(&self, id: &str) -> Option<f64> {
        self.values.get(id).copied()
    }
}

/// Averages per-repetition features, skipping undefined repetitions.
pub fn sample_feature_vector(reps: &[RawFeatures]) -> Result<FeatureVector> {
    if reps.is_empty() {
        return Err(Error::Size("need at least one repetition".into()));
    }
    let keys: BTreeSet<&String> = reps.iter().flat_map(|r| r.keys()).collect();
    let mut fv = FeatureVector {
        values: BTreeMap::new(),
        missing: BTreeSet::new(),
        excluded: BTreeMap::new(),
        repetitions: reps.len(),
        provenance: Provenance::Raw,
    };
    for key in keys {
        let vals: Vec<f64> = reps.iter().filter_map(|r| r.get(key).copied().flatten()).collect();
        let excluded = reps.len() - vals.len();
        if excluded > 0 {
            fv.excluded.insert(key.clone(), excluded);
        }
        if vals.is_empty() {
            fv.missing.insert(key.clone());
        } else {
            fv.values.insert(key.clone(), vals.iter().sum::<f64>() / vals.len() as f64);
        }
    }
    Ok(fv)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ColumnTransform {
    /// Affine map of `[lower, upper]` onto `[-2, 2]`, clamped.
    Linear { lower: f64, upper: f64 },
    /// Shift, Box-Cox with `lambda`, standardize, clamp to `[-4, 4]`.
    BoxCox { shift: f64, lambda: f64, mean: f64, sd: f64 },
}

pub const LAMBDA_GRID_STEP: f64 = 0.05;

fn box_cox(x: f64, lambda: f64) -> f64 {
    if lambda.abs() < 1e-12 {
        x.ln()
    } else {
        (x.powf(lambda) - 1.0) / lambda
    }
}

/// Profile log-likelihood of a Box-Cox transform of positive data.
pub fn box_cox_log_likelihood(x: &[f64], lambda: f64) -> f64 {
    let n = x.len() as f64;
    let y: Vec<f64> = x.iter().map(|v| box_cox(*v, lambda)).collect();
    let m = y.iter().sum::<f64>() / n;
    let var = y.iter().map(|v| (v - m).powi(2)).sum::<f64>() / n;
    let log_sum: f64 = x.iter().map(|v| v.ln()).sum();
    -0.5 * n * var.ln() + (lambda - 1.0) * log_sum
}

impl ColumnTransform {
    pub fn apply(&self, v: f64) -> f64 {
        match *self {
            ColumnTransform::Linear { lower, upper } => (4.0 * (v - lower) / (upper - lower) - 2.0).clamp(-2.0, 2.0),
            ColumnTransform::BoxCox { shift, lambda, mean, sd } => {
                let x = (v + shift).max(f64::MIN_POSITIVE);
                if sd > 0.0 {
                    ((box_cox(x, lambda) - mean) / sd).clamp(-4.0, 4.0)
                } else {
                    0.0
                }
            }
        }
    }

    fn fit_box_cox(col: &[f64]) -> Self {
        let min = col.iter().cloned().fold(f64::INFINITY, f64::min);
        let shift = if min <= 0.0 { 1.0 - min } else { 0.0 };
        let x: Vec<f64> = col.iter().map(|v| v + shift).collect();
        let constant = col.iter().all(|v| *v == col[0]);
        let steps = (4.0 / LAMBDA_GRID_STEP).round() as i32;
        let lambda = if constant {
            1.0
        } else {
            (0..=steps)
                .map(|k| -2.0 + f64::from(k) * LAMBDA_GRID_STEP)
                .map(|l| (l, box_cox_log_likelihood(&x, l)))
                .filter(|(_, ll)| ll.is_finite())
                .fold(None::<(f64, f64)>, |best, (l, ll)| match best {
                    Some((_, b)) if b >= ll => best,
                    _ => Some((l, ll)),
                })
                .map_or(1.0, |(l, _)| l)
        };
        let y: Vec<f64> = x.iter().map(|v| box_cox(*v, lambda)).collect();
        let n = y.len() as f64;
        let mean = y.iter().sum::<f64>() / n;
        let sd = (y.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
        ColumnTransform::BoxCox {
            shift,
            lambda,
            mean,
            sd: if sd.is_finite() { sd } else { 0.0 },
        }
    }
}

/// Fitted per-column transforms; serialized as the sidecar of a feature table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureTransform {
    pub columns: Vec<(String, ColumnTransform)>,
}

impl FeatureTransform {
    pub fn apply_row(&self, row: &[f64]) -> Result<Vec<f64>> {
        if row.len() != self.columns.len() {
            return Err(Error::Shape { expected: self.columns.len(), got: row.len() });
        }
        Ok(row.iter().zip(&self.columns).map(|(v, (_, t))| t.apply(*v)).collect())
    }
}

/// Fits and applies the feature transforms to a raw instance-by-feature matrix.
///
/// Bounded columns (`ranges[j] = Some((lo, hi))`) are mapped affinely onto
/// `[-2, 2]`; unbounded columns are shifted to be positive, Box-Cox
/// transformed with a per-column lambda chosen on a grid over `[-2, 2]`,
/// standardized and clamped to `[-4, 4]`.
pub fn transform_features(
    feature_ids: &[String],
    ranges: &[Option<(f64, f64)>],
    instance_ids: &[String],
    raw: &[Vec<f64>],
) -> Result<(FeatureTransform, Vec<Vec<f64>>)> {
    if raw.is_empty() {
        return Err(Error::Size("transform needs at least one instance".into()));
    }
    if ranges.len() != feature_ids.len() || instance_ids.len() != raw.len() {
        return Err(Error::Schema("feature metadata does not match the matrix".into()));
    }
    for (i, row) in raw.iter().enumerate() {
        if row.len() != feature_ids.len() {
            return Err(Error::Shape { expected: feature_ids.len(), got: row.len() });
        }
        if let Some(j) = row.iter().position(|v| !v.is_finite()) {
            return Err(Error::Data(format!(
                "instance `{}` has non-finite feature `{}` ({})",
                instance_ids[i], feature_ids[j], row[j]
            )));
        }
    }
    let columns: Vec<(String, ColumnTransform)> = feature_ids
        .iter()
        .zip(ranges)
        .enumerate()
        .map(|(j, (id, range))| {
            let t = match range {
                Some((lower, upper)) => ColumnTransform::Linear { lower: *lower, upper: *upper },
                None => {
                    let col: Vec<f64> = raw.iter().map(|r| r[j]).collect();
                    ColumnTransform::fit_box_cox(&col)
                }
            };
            (id.clone(), t)
        })
        .collect();
    let transform = FeatureTransform { columns };
    let out = raw.iter().map(|r| transform.apply_row(r)).collect::<Result<_>>()?;
    Ok((transform, out))
}
