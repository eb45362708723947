use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Prediction, Surrogate, TrainerConfig};
use crate::error::{Error, Result};
use crate::linalg::SpdFactor;
use crate::optim::{nelder_mead, NelderMeadOptions};
use crate::rng;
use crate::testbed::Hypercube;

/// Floor on the standardized process variance inside the likelihood; exact
/// fits would otherwise send the log-likelihood to `+inf`.
const SIGMA2_FLOOR: f64 = 1e-14;

/// Relative spread under which training values count as constant.
const CONSTANT_TOL: f64 = 1e-12;

fn sq_exp(u: &[f64], v: &[f64], length_scales: &[f64]) -> f64 {
    let s: f64 = u
        .iter()
        .zip(v)
        .zip(length_scales)
        .map(|((a, b), l)| {
            let t = (a - b) / l;
            t * t
        })
        .sum();
    (-0.5 * s).exp()
}

pub(crate) fn correlation_matrix(points: &[Vec<f64>], length_scales: &[f64], nugget: f64) -> DMatrix<f64> {
    let n = points.len();
    let mut r = DMatrix::<f64>::identity(n, n) * (1.0 + nugget);
    for i in 0..n {
        for j in i + 1..n {
            let v = sq_exp(&points[i], &points[j], length_scales);
            r[(i, j)] = v;
            r[(j, i)] = v;
        }
    }
    r
}

/// Factorizes the correlation matrix, escalating the nugget by x10 on failure.
pub(crate) fn factorize(
    points: &[Vec<f64>],
    length_scales: &[f64],
    nugget: f64,
    max_nugget: f64,
) -> Option<(SpdFactor, f64)> {
    let mut nug = nugget;
    loop {
        if let Some(f) = SpdFactor::new(correlation_matrix(points, length_scales, nug)) {
            return Some((f, nug));
        }
        if nug >= max_nugget {
            return None;
        }
        nug = (nug * 10.0).max(1e-12).min(max_nugget);
    }
}

/// Generalized least-squares profile of a constant trend plus an optional
/// scaled regressor `g` (the Co-Kriging multiplier), with the multiplier
/// clamped to `rho_bounds`.
pub(crate) struct Profile {
    pub mean: f64,
    pub rho: f64,
    pub sigma2: f64,
    pub ln_likelihood: f64,
}

pub(crate) fn profile(factor: &SpdFactor, z: &DVector<f64>, g: Option<&DVector<f64>>, rho_bounds: (f64, f64)) -> Profile {
    let n = z.len();
    let ones = DVector::<f64>::from_element(n, 1.0);
    let r_ones = factor.solve(&ones);
    let one_r_one = ones.dot(&r_ones);
    let r_z = factor.solve(z);

    let ordinary = |target: &DVector<f64>, r_target: &DVector<f64>| -> (f64, DVector<f64>) {
        let mean = ones.dot(r_target) / one_r_one;
        (mean, target - &ones * mean)
    };

    let (mean, rho, resid) = match g {
        None => {
            let (m, e) = ordinary(z, &r_z);
            (m, 0.0, e)
        }
        Some(g) => {
            let r_g = factor.solve(g);
            let (a11, a12, a22) = (one_r_one, ones.dot(&r_g), g.dot(&r_g));
            let (b1, b2) = (ones.dot(&r_z), g.dot(&r_z));
            let det = a11 * a22 - a12 * a12;
            let mut rho = if det.abs() > 1e-14 * a11 * a22 { (a11 * b2 - a12 * b1) / det } else { 0.0 };
            if !rho.is_finite() {
                rho = 0.0;
            }
            rho = rho.clamp(rho_bounds.0, rho_bounds.1);
            let target = z - g * rho;
            let r_target = &r_z - &r_g * rho;
            let (m, e) = ordinary(&target, &r_target);
            (m, rho, e)
        }
    };
    let sigma2 = (resid.dot(&factor.solve(&resid)) / n as f64).max(SIGMA2_FLOOR);
    let ln_likelihood = -0.5 * n as f64 * sigma2.ln() - 0.5 * factor.ln_det();
    Profile {
        mean,
        rho,
        sigma2,
        ln_likelihood,
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct KrigingData {
    domain: Hypercube,
    points: Vec<Vec<f64>>,
    values: Vec<f64>,
    length_scales: Vec<f64>,
    process_variance: f64,
    trend_mean: f64,
    nugget: f64,
    ln_likelihood: f64,
    constant: bool,
}

/// Ordinary Kriging with an anisotropic squared-exponential correlation
/// `exp(-0.5 * sum(((u_k - v_k) / l_k)^2))` on unit-hypercube coordinates.
///
/// The nugget acts as jitter on the diagonal. It is treated as part of the
/// self-correlation of a training point, so the predictor interpolates and
/// has zero variance there.
#[derive(Debug, Clone)]
pub struct KrigingModel {
    data: KrigingData,
    unit_points: Vec<Vec<f64>>,
    factor: Option<SpdFactor>,
    weights: DVector<f64>,
}

pub(crate) fn validate_training(domain: &Hypercube, x: &[Vec<f64>], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::Size(format!("{} points but {} values", x.len(), y.len())));
    }
    if x.len() < 2 {
        return Err(Error::Size(format!("need at least 2 training points, got {}", x.len())));
    }
    if let Some(i) = y.iter().position(|v| !v.is_finite()) {
        return Err(Error::Data(format!("training value {i} is not finite ({})", y[i])));
    }
    for p in x {
        if p.iter().any(|v| !v.is_finite()) {
            return Err(Error::Data(format!("training point {p:?} is not finite")));
        }
        domain.check(p)?;
    }
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            if x[i] == x[j] {
                return Err(Error::Degenerate(format!("training points {i} and {j} coincide")));
            }
        }
    }
    Ok(())
}

fn spread(y: &[f64]) -> (f64, f64, f64) {
    let (lo, hi) = y.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    (lo, hi, mean)
}

/// Seeded multistart points in log-length-scale space; the first is the box centre.
pub fn multistart_points(dim: usize, cfg: &TrainerConfig, seed: u64) -> Vec<Vec<f64>> {
    let (lo, hi) = (cfg.length_scale_bounds.0.ln(), cfg.length_scale_bounds.1.ln());
    let mut rng = rng::seeded(seed);
    (0..cfg.n_starts.max(1))
        .map(|s| {
            if s == 0 {
                vec![0.5 * (lo + hi); dim]
            } else {
                (0..dim).map(|_| lo + (hi - lo) * rng.gen::<f64>()).collect()
            }
        })
        .collect()
}

/// Concentrated log-likelihood of ordinary Kriging at the given length scales,
/// evaluated on standardized outputs. Returns `None` when the correlation
/// matrix cannot be factorized even at the maximum nugget.
pub fn concentrated_log_likelihood(
    domain: &Hypercube,
    x: &[Vec<f64>],
    y: &[f64],
    length_scales: &[f64],
    cfg: &TrainerConfig,
) -> Option<f64> {
    let unit: Vec<Vec<f64>> = x.iter().map(|p| domain.to_unit(p)).collect();
    let (_, _, m) = spread(y);
    let s = std_dev(y, m);
    let z = DVector::from_iterator(y.len(), y.iter().map(|v| (v - m) / s));
    let (factor, _) = factorize(&unit, length_scales, cfg.nugget, cfg.max_nugget)?;
    Some(profile(&factor, &z, None, cfg.rho_bounds).ln_likelihood)
}

fn std_dev(y: &[f64], mean: f64) -> f64 {
    let v = y.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / y.len() as f64;
    if v > 0.0 {
        v.sqrt()
    } else {
        1.0
    }
}

/// Result of maximizing the profiled likelihood over log length scales.
pub(crate) struct Fit {
    pub length_scales: Vec<f64>,
    pub profile: Profile,
}

/// Multistart Nelder-Mead over log length scales. `g`, when present, is the
/// Co-Kriging regressor in the same standardized units as `z`.
pub(crate) fn maximize_likelihood(
    unit: &[Vec<f64>],
    z: &DVector<f64>,
    g: Option<&DVector<f64>>,
    cfg: &TrainerConfig,
    seed: u64,
) -> Result<Fit> {
    let dim = unit[0].len();
    let (lo, hi) = (cfg.length_scale_bounds.0.ln(), cfg.length_scale_bounds.1.ln());
    let lower = vec![lo; dim];
    let upper = vec![hi; dim];
    let objective = |theta: &[f64]| -> f64 {
        let ls: Vec<f64> = theta.iter().map(|t| t.exp()).collect();
        match factorize(unit, &ls, cfg.nugget, cfg.max_nugget) {
            Some((f, _)) => -profile(&f, z, g, cfg.rho_bounds).ln_likelihood,
            None => f64::INFINITY,
        }
    };
    let opts = NelderMeadOptions {
        max_evals: cfg.max_evals.unwrap_or(100 + 50 * dim),
        ..Default::default()
    };
    let mut best: Option<(Vec<f64>, f64)> = None;
    for start in multistart_points(dim, cfg, seed) {
        let m = nelder_mead(objective, &start, &lower, &upper, opts);
        if best.as_ref().map_or(true, |(_, v)| m.value < *v) {
            best = Some((m.x, m.value));
        }
    }
    let (theta, value) = best.expect("at least one start");
    if !value.is_finite() {
        return Err(Error::Training(
            "correlation matrix is not positive definite for any length scale, even at the maximum nugget".into(),
        ));
    }
    let length_scales: Vec<f64> = theta.iter().map(|t| t.exp()).collect();
    let (factor, _) = factorize(unit, &length_scales, cfg.nugget, cfg.max_nugget).expect("factorized during search");
    Ok(Fit {
        profile: profile(&factor, z, g, cfg.rho_bounds),
        length_scales,
    })
}

impl KrigingModel {
    /// Builds a model with fixed length scales; trend and process variance are
    /// re-estimated from the data.
    pub fn from_hyperparameters(
        domain: &Hypercube,
        x: &[Vec<f64>],
        y: &[f64],
        length_scales: &[f64],
        cfg: &TrainerConfig,
    ) -> Result<Self> {
        validate_training(domain, x, y)?;
        if length_scales.len() != domain.dim() || length_scales.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
            return Err(Error::Config(format!("invalid length scales {length_scales:?}")));
        }
        let unit: Vec<Vec<f64>> = x.iter().map(|p| domain.to_unit(p)).collect();
        let (_, _, m) = spread(y);
        let s = std_dev(y, m);
        let z = DVector::from_iterator(y.len(), y.iter().map(|v| (v - m) / s));
        let (factor, nugget) = factorize(&unit, length_scales, cfg.nugget, cfg.max_nugget)
            .ok_or_else(|| Error::Training("correlation matrix is not positive definite".into()))?;
        let p = profile(&factor, &z, None, cfg.rho_bounds);
        let data = KrigingData {
            domain: domain.clone(),
            points: x.to_vec(),
            values: y.to_vec(),
            length_scales: length_scales.to_vec(),
            process_variance: p.sigma2 * s * s,
            trend_mean: m + s * p.mean,
            nugget,
            ln_likelihood: p.ln_likelihood,
            constant: false,
        };
        Ok(Self::assemble(data, unit, Some(factor)))
    }

    pub(crate) fn constant(domain: &Hypercube, x: &[Vec<f64>], y: &[f64], cfg: &TrainerConfig, value: f64) -> Self {
        let unit: Vec<Vec<f64>> = x.iter().map(|p| domain.to_unit(p)).collect();
        let data = KrigingData {
            domain: domain.clone(),
            points: x.to_vec(),
            values: y.to_vec(),
            length_scales: vec![1.0; domain.dim()],
            process_variance: 0.0,
            trend_mean: value,
            nugget: cfg.nugget,
            ln_likelihood: 0.0,
            constant: true,
        };
        Self::assemble(data, unit, None)
    }

    fn assemble(data: KrigingData, unit_points: Vec<Vec<f64>>, factor: Option<SpdFactor>) -> Self {
        let weights = match &factor {
            Some(f) => {
                let resid = DVector::from_iterator(data.values.len(), data.values.iter().map(|v| v - data.trend_mean));
                f.solve(&resid)
            }
            None => DVector::zeros(data.values.len()),
        };
        Self {
            data,
            unit_points,
            factor,
            weights,
        }
    }

    pub fn domain(&self) -> &Hypercube {
        &self.data.domain
    }

    pub fn training_points(&self) -> &[Vec<f64>] {
        &self.data.points
    }

    pub fn training_values(&self) -> &[f64] {
        &self.data.values
    }

    pub fn length_scales(&self) -> &[f64] {
        &self.data.length_scales
    }

    pub fn process_variance(&self) -> f64 {
        self.data.process_variance
    }

    pub fn trend_mean(&self) -> f64 {
        self.data.trend_mean
    }

    pub fn nugget(&self) -> f64 {
        self.data.nugget
    }

    /// Concentrated log-likelihood (standardized outputs) at the fitted length scales.
    pub fn log_likelihood(&self) -> f64 {
        self.data.ln_likelihood
    }

    /// True when training data were constant and the model is a constant predictor.
    pub fn is_constant(&self) -> bool {
        self.data.constant
    }

    // At a training point the cross-correlation vector is a column of the
    // jittered matrix, so the posterior mean is the training value and the
    // variance is zero. Evaluating that directly avoids the round-off of the
    // nearly singular solve.
    fn training_index(&self, u: &[f64]) -> Option<usize> {
        self.unit_points.iter().position(|p| p.as_slice() == u)
    }

    fn correlations(&self, u: &[f64]) -> DVector<f64> {
        DVector::from_iterator(self.unit_points.len(), self.unit_points.iter().map(|p| sq_exp(u, p, &self.data.length_scales)))
    }

    pub fn predict_mean(&self, x: &[f64]) -> Result<f64> {
        self.data.domain.check(x)?;
        if self.data.constant {
            return Ok(self.data.trend_mean);
        }
        let u = self.data.domain.to_unit(x);
        if let Some(i) = self.training_index(&u) {
            return Ok(self.data.values[i]);
        }
        Ok(self.data.trend_mean + self.correlations(&u).dot(&self.weights))
    }

    pub fn predict(&self, x: &[f64]) -> Result<Prediction> {
        self.data.domain.check(x)?;
        let Some(factor) = &self.factor else {
            return Ok(Prediction { mean: self.data.trend_mean, variance: 0.0 });
        };
        let u = self.data.domain.to_unit(x);
        if let Some(i) = self.training_index(&u) {
            return Ok(Prediction { mean: self.data.values[i], variance: 0.0 });
        }
        let r = self.correlations(&u);
        let explained = r.dot(&factor.solve(&r));
        Ok(Prediction {
            mean: self.data.trend_mean + r.dot(&self.weights),
            variance: (self.data.process_variance * (1.0 - explained)).max(0.0),
        })
    }

    pub(crate) fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(&self.data).expect("model data serializes")
    }

    pub(crate) fn from_json_value(v: serde_json::Value) -> Result<Self> {
        let data: KrigingData = serde_json::from_value(v)?;
        validate_training(&data.domain, &data.points, &data.values)?;
        let unit: Vec<Vec<f64>> = data.points.iter().map(|p| data.domain.to_unit(p)).collect();
        if data.constant {
            return Ok(Self::assemble(data, unit, None));
        }
        let factor = SpdFactor::new(correlation_matrix(&unit, &data.length_scales, data.nugget))
            .ok_or_else(|| Error::Training("stored hyperparameters give a singular correlation matrix".into()))?;
        Ok(Self::assemble(data, unit, Some(factor)))
    }
}

impl Surrogate for KrigingModel {
    fn predict(&self, x: &[f64]) -> Result<Prediction> {
        KrigingModel::predict(self, x)
    }

    fn predict_mean(&self, x: &[f64]) -> Result<f64> {
        KrigingModel::predict_mean(self, x)
    }
}

/// Trains ordinary Kriging by maximizing the concentrated likelihood.
///
/// Outputs are standardized internally, so training on `a*y + b` yields
/// predictions `a*mean + b`. Constant data short-circuit to a constant
/// predictor.
pub fn train_kriging(domain: &Hypercube, x: &[Vec<f64>], y: &[f64], cfg: &TrainerConfig, seed: u64) -> Result<KrigingModel> {
    cfg.validate()?;
    validate_training(domain, x, y)?;
    let (lo, hi, mean) = spread(y);
    let scale = y.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1.0);
    if hi - lo <= CONSTANT_TOL * scale {
        return Ok(KrigingModel::constant(domain, x, y, cfg, mean));
    }
    let unit: Vec<Vec<f64>> = x.iter().map(|p| domain.to_unit(p)).collect();
    let s = std_dev(y, mean);
    let z = DVector::from_iterator(y.len(), y.iter().map(|v| (v - mean) / s));
    let fit = maximize_likelihood(&unit, &z, None, cfg, seed)?;
    KrigingModel::from_hyperparameters(domain, x, y, &fit.length_scales, cfg)
}
