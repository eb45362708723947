//! Kriging and Co-Kriging surrogates and the correlation-based accuracy metric.

mod cokriging;
mod kriging;

use serde::{Deserialize, Serialize};

pub use cokriging::{train_cokriging, CoKrigingModel};
pub use kriging::{concentrated_log_likelihood, multistart_points, train_kriging, KrigingModel};

use crate::error::{Error, Result};
use crate::stats::pearson;
use crate::testbed::{Fidelity, FunctionPair};

/// Hyperparameter search settings shared by both model types.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainerConfig {
    /// Number of Nelder-Mead starts over log length scales.
    pub n_starts: usize,
    /// Objective evaluations per start; `None` means `100 + 50 d`.
    pub max_evals: Option<usize>,
    /// Length-scale search box on unit-hypercube coordinates.
    pub length_scale_bounds: (f64, f64),
    /// Initial diagonal jitter.
    pub nugget: f64,
    /// Largest jitter tried when factorization fails (escalation is x10).
    pub max_nugget: f64,
    /// Box for the Co-Kriging multiplier.
    pub rho_bounds: (f64, f64),
}

impl Default for TrainerConfig {
    fn default() -> Self {
        Self {
            n_starts: 10,
            max_evals: None,
            length_scale_bounds: (1e-2, 1e2),
            nugget: 1e-10,
            max_nugget: 1e-4,
            rho_bounds: (-5.0, 5.0),
        }
    }
}

impl TrainerConfig {
    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.length_scale_bounds;
        if !(lo > 0.0 && lo < hi && hi.is_finite()) {
            return Err(Error::Config(format!("invalid length-scale bounds ({lo}, {hi})")));
        }
        if !(self.nugget >= 0.0 && self.nugget <= self.max_nugget && self.max_nugget.is_finite()) {
            return Err(Error::Config(format!(
                "nugget {} must be non-negative and not above max_nugget {}",
                self.nugget, self.max_nugget
            )));
        }
        let (rlo, rhi) = self.rho_bounds;
        if !(rlo < rhi && rlo.is_finite() && rhi.is_finite()) {
            return Err(Error::Config(format!("invalid rho bounds ({rlo}, {rhi})")));
        }
        if self.n_starts == 0 {
            return Err(Error::Config("n_starts must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub mean: f64,
    pub variance: f64,
}

pub trait Surrogate {
    fn predict(&self, x: &[f64]) -> Result<Prediction>;

    fn predict_mean(&self, x: &[f64]) -> Result<f64> {
        self.predict(x).map(|p| p.mean)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Kriging,
    CoKriging,
}

impl ModelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Kriging => "kriging",
            ModelKind::CoKriging => "cokriging",
        }
    }
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "").as_str() {
            "kriging" => Ok(ModelKind::Kriging),
            "cokriging" => Ok(ModelKind::CoKriging),
            other => Err(Error::Config(format!("unknown model kind `{other}`"))),
        }
    }
}

#[derive(Debug, Clone)]
pub enum SurrogateModel {
    Kriging(KrigingModel),
    CoKriging(CoKrigingModel),
}

impl SurrogateModel {
    pub fn kind(&self) -> ModelKind {
        match self {
            SurrogateModel::Kriging(_) => ModelKind::Kriging,
            SurrogateModel::CoKriging(_) => ModelKind::CoKriging,
        }
    }
}

impl Surrogate for SurrogateModel {
    fn predict(&self, x: &[f64]) -> Result<Prediction> {
        match self {
            SurrogateModel::Kriging(m) => m.predict(x),
            SurrogateModel::CoKriging(m) => m.predict(x),
        }
    }

    fn predict_mean(&self, x: &[f64]) -> Result<f64> {
        match self {
            SurrogateModel::Kriging(m) => m.predict_mean(x),
            SurrogateModel::CoKriging(m) => m.predict_mean(x),
        }
    }
}

const MODEL_FORMAT: &str = "bifid-model";
const MODEL_VERSION: u32 = 1;

/// Serializes a model (hyperparameters and training data) as versioned JSON.
pub fn model_to_json(model: &SurrogateModel) -> String {
    let body = match model {
        SurrogateModel::Kriging(m) => serde_json::json!({ "kriging": m.to_json_value() }),
        SurrogateModel::CoKriging(m) => serde_json::json!({
            "cokriging": {
                "rho": m.scale_rho(),
                "low": m.low_model().to_json_value(),
                "diff": m.diff_model().to_json_value(),
            }
        }),
    };
    let doc = serde_json::json!({ "format": MODEL_FORMAT, "version": MODEL_VERSION, "model": body });
    serde_json::to_string_pretty(&doc).expect("json value serializes")
}

pub fn model_from_json(text: &str) -> Result<SurrogateModel> {
    let doc: serde_json::Value = serde_json::from_str(text)?;
    if doc["format"] != MODEL_FORMAT {
        return Err(Error::Schema(format!("not a {MODEL_FORMAT} document")));
    }
    if doc["version"].as_u64() != Some(u64::from(MODEL_VERSION)) {
        return Err(Error::Schema(format!("unsupported model version {}", doc["version"])));
    }
    let model = &doc["model"];
    if let Some(k) = model.get("kriging") {
        return Ok(SurrogateModel::Kriging(KrigingModel::from_json_value(k.clone())?));
    }
    if let Some(c) = model.get("cokriging") {
        let rho = c["rho"].as_f64().ok_or_else(|| Error::Schema("missing rho".into()))?;
        let low = KrigingModel::from_json_value(c["low"].clone())?;
        let diff = KrigingModel::from_json_value(c["diff"].clone())?;
        return Ok(SurrogateModel::CoKriging(CoKrigingModel::from_parts(low, diff, rho)?));
    }
    Err(Error::Schema("model must be `kriging` or `cokriging`".into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AccuracyReport {
    pub p_corr: f64,
    pub n_test: usize,
}

/// Pearson correlation between model means and `f_h` over `test_points`.
pub fn accuracy(model: &impl Surrogate, pair: &FunctionPair, test_points: &[Vec<f64>]) -> Result<AccuracyReport> {
    if test_points.len() < 3 {
        return Err(Error::Size(format!("need at least 3 test points, got {}", test_points.len())));
    }
    let truth: Vec<f64> = test_points
        .iter()
        .map(|x| pair.evaluate(Fidelity::High, x))
        .collect::<Result<_>>()?;
    let means: Vec<f64> = test_points.iter().map(|x| model.predict_mean(x)).collect::<Result<_>>()?;
    Ok(AccuracyReport {
        p_corr: pearson(&truth, &means)?,
        n_test: test_points.len(),
    })
}

#[cfg(test)]
mod tests;
