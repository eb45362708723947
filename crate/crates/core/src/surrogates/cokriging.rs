use nalgebra::DVector;

use super::kriging::{maximize_likelihood, train_kriging, validate_training, KrigingModel};
use super::{Prediction, Surrogate, TrainerConfig};
use crate::error::{Error, Result};
use crate::rng;
use crate::testbed::Hypercube;

/// Two-level autoregressive Co-Kriging: `f_h(x) ~ rho * f_l(x) + delta(x)`,
/// with independent Gaussian processes for `f_l` and `delta`.
///
/// With a nested design the low-fidelity values at the high-fidelity points
/// are known exactly, so the two processes are trained one after the other.
#[derive(Debug, Clone)]
pub struct CoKrigingModel {
    low: KrigingModel,
    diff: KrigingModel,
    rho: f64,
    nested: bool,
}

impl CoKrigingModel {
    pub fn low_model(&self) -> &KrigingModel {
        &self.low
    }

    pub fn diff_model(&self) -> &KrigingModel {
        &self.diff
    }

    pub fn scale_rho(&self) -> f64 {
        self.rho
    }

    pub fn is_nested(&self) -> bool {
        self.nested
    }

    pub fn domain(&self) -> &Hypercube {
        self.low.domain()
    }

    pub fn from_parts(low: KrigingModel, diff: KrigingModel, rho: f64) -> Result<Self> {
        if low.domain() != diff.domain() {
            return Err(Error::Design("low and difference models live on different domains".into()));
        }
        if !rho.is_finite() {
            return Err(Error::Data(format!("non-finite rho {rho}")));
        }
        Ok(Self { low, diff, rho, nested: true })
    }

    pub fn predict(&self, x: &[f64]) -> Result<Prediction> {
        let lo = self.low.predict(x)?;
        let di = self.diff.predict(x)?;
        Ok(Prediction {
            mean: self.rho * lo.mean + di.mean,
            variance: self.rho * self.rho * lo.variance + di.variance,
        })
    }

    pub fn predict_mean(&self, x: &[f64]) -> Result<f64> {
        Ok(self.rho * self.low.predict_mean(x)? + self.diff.predict_mean(x)?)
    }
}

impl Surrogate for CoKrigingModel {
    fn predict(&self, x: &[f64]) -> Result<Prediction> {
        CoKrigingModel::predict(self, x)
    }

    fn predict_mean(&self, x: &[f64]) -> Result<f64> {
        CoKrigingModel::predict_mean(self, x)
    }
}

/// Trains Co-Kriging on a nested design (`x_high` must be a subset of `x_low`).
///
/// The low-fidelity process is ordinary Kriging on `(x_low, y_low)`. For the
/// difference process, `rho` and the trend are profiled out of the likelihood
/// by generalized least squares at every trial set of length scales, with
/// `rho` clamped to `cfg.rho_bounds`. When the low-fidelity values at the
/// high-fidelity points are constant, `rho` is unidentifiable; it is fixed to
/// 0 and the difference process is exactly `train_kriging(x_high, y_high, cfg, seed)`.
pub fn train_cokriging(
    domain: &Hypercube,
    x_high: &[Vec<f64>],
    y_high: &[f64],
    x_low: &[Vec<f64>],
    y_low: &[f64],
    cfg: &TrainerConfig,
    seed: u64,
) -> Result<CoKrigingModel> {
    cfg.validate()?;
    validate_training(domain, x_high, y_high)?;
    validate_training(domain, x_low, y_low)?;
    let at_high: Vec<f64> = x_high
        .iter()
        .map(|p| {
            x_low
                .iter()
                .position(|q| q == p)
                .map(|i| y_low[i])
                .ok_or_else(|| Error::Design(format!("high-fidelity point {p:?} is not in the low-fidelity design")))
        })
        .collect::<Result<_>>()?;

    let low = train_kriging(domain, x_low, y_low, cfg, rng::derive(seed, &[1]))?;

    let (g_lo, g_hi) = at_high.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let y_scale = y_high.iter().chain(y_low).fold(0.0f64, |a, v| a.max(v.abs())).max(1.0);
    if g_hi - g_lo <= 1e-12 * y_scale {
        let diff = train_kriging(domain, x_high, y_high, cfg, seed)?;
        return Ok(CoKrigingModel { low, diff, rho: 0.0, nested: true });
    }

    let n = y_high.len();
    let mean = y_high.iter().sum::<f64>() / n as f64;
    let var = y_high.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
    let s = if var > 0.0 { var.sqrt() } else { 1.0 };
    let z = DVector::from_iterator(n, y_high.iter().map(|v| (v - mean) / s));
    let g = DVector::from_iterator(n, at_high.iter().map(|v| v / s));
    let unit: Vec<Vec<f64>> = x_high.iter().map(|p| domain.to_unit(p)).collect();
    let fit = maximize_likelihood(&unit, &z, Some(&g), cfg, seed)?;
    let rho = fit.profile.rho;

    let d: Vec<f64> = y_high.iter().zip(&at_high).map(|(h, l)| h - rho * l).collect();
    let (d_lo, d_hi) = d.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let diff = if d_hi - d_lo <= 1e-10 * y_scale {
        let m = d.iter().sum::<f64>() / n as f64;
        KrigingModel::constant(domain, x_high, &d, cfg, m)
    } else {
        KrigingModel::from_hyperparameters(domain, x_high, &d, &fit.length_scales, cfg)?
    };
    Ok(CoKrigingModel { low, diff, rho, nested: true })
}
