//! Choosing between Kriging and Co-Kriging from sample features.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{ids, RadiusMode};
use crate::surrogates::ModelKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleClause {
    /// `B^r_h >= 18`
    HighBudgetRatio,
    /// `B^r = 1`
    EqualBudgets,
    /// `LCC_0.4 <= 0.7`
    LowLocalCorrelation,
    /// `LCC_0.95 >= threshold`
    HighLocalCorrelation,
    /// `R2_L(f_h - f_l) >= 0.4`
    LinearDifference,
    /// `B^r_h <= 5`
    SmallBudget,
    /// Nothing else fired and `B^r_h > 5`.
    Fallback,
    /// The CC baseline.
    CcBaseline,
    Classifier,
}

impl RuleClause {
    pub fn as_str(self) -> &'static str {
        match self {
            RuleClause::HighBudgetRatio => "rule1_high_budget_ratio",
            RuleClause::EqualBudgets => "rule1_equal_budgets",
            RuleClause::LowLocalCorrelation => "rule1_low_local_correlation",
            RuleClause::HighLocalCorrelation => "rule2_high_local_correlation",
            RuleClause::LinearDifference => "rule2_linear_difference",
            RuleClause::SmallBudget => "rule3_small_budget",
            RuleClause::Fallback => "rule3_fallback",
            RuleClause::CcBaseline => "cc_baseline",
            RuleClause::Classifier => "classifier",
        }
    }
}

impl fmt::Display for RuleClause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decision {
    pub choice: ModelKind,
    pub rule_fired: RuleClause,
    pub inputs: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RuleInputs {
    pub br_h: f64,
    pub br: f64,
    pub lcc_04: f64,
    pub lcc_095: f64,
    pub r2_l_diff: f64,
}

impl RuleInputs {
    pub const FEATURES: [&'static str; 5] = [ids::BR_H, ids::BR, "lcc_dim_0.4", "lcc_dim_0.95", ids::R2_L_DIFF];

    /// Picks the rule inputs out of a feature map, naming the first missing one.
    pub fn from_features(features: &BTreeMap<String, f64>) -> Result<Self> {
        let get = |id: &str| {
            features
                .get(id)
                .copied()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::Selection(format!("feature `{id}` is missing")))
        };
        debug_assert_eq!(Self::FEATURES[2], ids::lcc_threshold(RadiusMode::DimScaled, 0.4));
        Ok(Self {
            br_h: get(Self::FEATURES[0])?,
            br: get(Self::FEATURES[1])?,
            lcc_04: get(Self::FEATURES[2])?,
            lcc_095: get(Self::FEATURES[3])?,
            r2_l_diff: get(Self::FEATURES[4])?,
        })
    }

    fn echo(&self) -> BTreeMap<String, f64> {
        let vals = [self.br_h, self.br, self.lcc_04, self.lcc_095, self.r2_l_diff];
        Self::FEATURES.iter().zip(vals).map(|(k, v)| (k.to_string(), v)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RuleConfig {
    /// LCC_0.95 threshold of the second rule.
    pub lcc_095_threshold: f64,
}

impl Default for RuleConfig {
    fn default() -> Self {
        Self { lcc_095_threshold: 0.5 }
    }
}

pub fn rule_select(inputs: &RuleInputs, cfg: &RuleConfig) -> Result<Decision> {
    let vals = [inputs.br_h, inputs.br, inputs.lcc_04, inputs.lcc_095, inputs.r2_l_diff];
    if let Some(k) = vals.iter().position(|v| !v.is_finite()) {
        return Err(Error::Selection(format!("feature `{}` is not finite", RuleInputs::FEATURES[k])));
    }
    for (k, v) in [(2, inputs.lcc_04), (3, inputs.lcc_095)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::Selection(format!("feature `{}` = {v} outside [0, 1]", RuleInputs::FEATURES[k])));
        }
    }
    use ModelKind::{CoKriging, Kriging};
    let (choice, rule_fired) = if inputs.br_h >= 18.0 {
        (Kriging, RuleClause::HighBudgetRatio)
    } else if inputs.br >= 1.0 {
        (Kriging, RuleClause::EqualBudgets)
    } else if inputs.lcc_04 <= 0.7 {
        (Kriging, RuleClause::LowLocalCorrelation)
    } else if inputs.lcc_095 >= cfg.lcc_095_threshold {
        (CoKriging, RuleClause::HighLocalCorrelation)
    } else if inputs.r2_l_diff >= 0.4 {
        (CoKriging, RuleClause::LinearDifference)
    } else if inputs.br_h <= 5.0 {
        (CoKriging, RuleClause::SmallBudget)
    } else {
        (Kriging, RuleClause::Fallback)
    };
    Ok(Decision { choice, rule_fired, inputs: inputs.echo() })
}

/// Co-Kriging when `cc >= 0.7`, Kriging otherwise.
pub fn cc_baseline_select(cc: f64) -> Decision {
    let choice = if cc >= 0.7 { ModelKind::CoKriging } else { ModelKind::Kriging };
    Decision {
        choice,
        rule_fired: RuleClause::CcBaseline,
        inputs: BTreeMap::from([(ids::CC.to_string(), cc)]),
    }
}

/// Feature ids of the projection inputs, in order. The two landscape
/// features of `f_h` are not computed here and must be supplied.
pub const PROJECTION_INPUTS: [&str; 9] = [
    "br",
    "lcc_fixed_sd",
    "lcc_dim_0.4",
    "lcc_dim_0.95",
    "rrmse",
    "mmce_lda",
    "h0",
    "r2_l_diff",
    "r2_li_diff",
];

/// Row `k` holds the `(z1, z2)` loadings of input `k`.
pub const PROJECTION: [[f64; 2]; 9] = [
    [-0.4916, -0.0889],
    [-0.3167, -0.2321],
    [-0.1506, 0.372],
    [-0.0568, 0.4394],
    [0.1777, -0.4154],
    [0.3696, 0.0989],
    [0.4362, 0.0526],
    [0.177, 0.3381],
    [0.4031, 0.2545],
];

pub fn project_2d(v: &[f64]) -> Result<[f64; 2]> {
    if v.len() != PROJECTION.len() {
        return Err(Error::Shape { expected: PROJECTION.len(), got: v.len() });
    }
    Ok(PROJECTION.iter().zip(v).fold([0.0, 0.0], |[a, b], (row, x)| [a + row[0] * x, b + row[1] * x]))
}

/// Projection inputs from a transformed feature map; absent landscape inputs are zero.
pub fn projection_inputs(features: &BTreeMap<String, f64>) -> Result<Vec<f64>> {
    PROJECTION_INPUTS
        .iter()
        .map(|id| match features.get(*id) {
            Some(v) if v.is_finite() => Ok(*v),
            Some(v) => Err(Error::Selection(format!("feature `{id}` = {v} is not finite"))),
            None if matches!(*id, "mmce_lda" | "h0") => Ok(0.0),
            None => Err(Error::Selection(format!("feature `{id}` is missing"))),
        })
        .collect()
}

pub const MIN_TRAINING_ROWS: usize = 20;

/// L2-regularized logistic regression on `(z1, z2)`; positive class Co-Kriging.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classifier {
    /// Intercept, z1 and z2 coefficients.
    pub weights: [f64; 3],
    pub penalty: f64,
    pub resubstitution_accuracy: f64,
}

impl Classifier {
    pub fn score(&self, z: [f64; 2]) -> f64 {
        self.weights[0] + self.weights[1] * z[0] + self.weights[2] * z[1]
    }

    pub fn classify(&self, z: [f64; 2]) -> ModelKind {
        if self.score(z) > 0.0 {
            ModelKind::CoKriging
        } else {
            ModelKind::Kriging
        }
    }

    pub fn decide(&self, z: [f64; 2]) -> Decision {
        Decision {
            choice: self.classify(z),
            rule_fired: RuleClause::Classifier,
            inputs: BTreeMap::from([("z1".to_string(), z[0]), ("z2".to_string(), z[1])]),
        }
    }
}

pub const DEFAULT_PENALTY: f64 = 1e-3;

/// Fits the classifier by iteratively reweighted least squares.
pub fn train_classifier(z: &[[f64; 2]], target: &[ModelKind], penalty: f64) -> Result<Classifier> {
    if z.len() != target.len() {
        return Err(Error::Size(format!("{} points for {} labels", z.len(), target.len())));
    }
    if z.len() < MIN_TRAINING_ROWS {
        return Err(Error::Training(format!(
            "classifier needs at least {MIN_TRAINING_ROWS} rows, got {}",
            z.len()
        )));
    }
    let positives = target.iter().filter(|t| **t == ModelKind::CoKriging).count();
    if positives == 0 || positives == target.len() {
        return Err(Error::Training("classifier needs both classes in the training data".into()));
    }
    if !(penalty > 0.0) {
        return Err(Error::Config(format!("classifier penalty must be positive, got {penalty}")));
    }
    if z.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::Data("classifier inputs must be finite".into()));
    }
    let y: Vec<f64> = target.iter().map(|t| f64::from(u8::from(*t == ModelKind::CoKriging))).collect();
    let feats: Vec<Vector3<f64>> = z.iter().map(|p| Vector3::new(1.0, p[0], p[1])).collect();
    let mut w = Vector3::zeros();
    for _ in 0..100 {
        let mut hess = Matrix3::zeros();
        let mut grad = Vector3::zeros();
        for (x, yi) in feats.iter().zip(&y) {
            let p = 1.0 / (1.0 + (-w.dot(x)).exp());
            grad += x * (p - yi);
            hess += x * x.transpose() * (p * (1.0 - p)).max(1e-12);
        }
        // The intercept is not penalized.
        for k in 1..3 {
            grad[k] += penalty * w[k];
            hess[(k, k)] += penalty;
        }
        hess[(0, 0)] += 1e-12;
        let Some(step) = hess.lu().solve(&grad) else { break };
        w -= step;
        if step.amax() < 1e-10 {
            break;
        }
    }
    let mut clf = Classifier {
        weights: [w[0], w[1], w[2]],
        penalty,
        resubstitution_accuracy: 0.0,
    };
    let correct = z.iter().zip(target).filter(|(p, t)| clf.classify(**p) == **t).count();
    clf.resubstitution_accuracy = correct as f64 / z.len() as f64;
    Ok(clf)
}

/// The model to recommend for an instance given both labels and p-values:
/// the only good one, otherwise the one with the larger p-value.
pub fn preferred_model(good_kriging: bool, good_cokriging: bool, p_kriging: f64, p_cokriging: f64) -> ModelKind {
    match (good_kriging, good_cokriging) {
        (true, false) => ModelKind::Kriging,
        (false, true) => ModelKind::CoKriging,
        _ if p_cokriging > p_kriging => ModelKind::CoKriging,
        _ => ModelKind::Kriging,
    }
}
