//! Deterministic high/low-fidelity function pairs.
//!
//! Two sources are provided: a fixed catalogue of closed-form pairs taken from
//! the multi-fidelity literature, and a generator that derives a low-fidelity
//! source from any high-fidelity function by adding a seeded, compactly
//! supported disturbance field.

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

/// Bumped whenever a catalogued formula, domain or id changes.
pub const CATALOGUE_VERSION: &str = "1";

pub type ScalarField = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hypercube {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Hypercube {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(Error::Config(format!(
                "hypercube bounds must be non-empty and of equal length ({} vs {})",
                lower.len(),
                upper.len()
            )));
        }
        if let Some(i) = (0..lower.len()).find(|&i| !(lower[i] < upper[i])) {
            return Err(Error::Config(format!(
                "hypercube bound {i}: lower {} is not below upper {}",
                lower[i], upper[i]
            )));
        }
        Ok(Self { lower, upper })
    }

    pub fn unit(d: usize) -> Self {
        Self {
            lower: vec![0.0; d],
            upper: vec![1.0; d],
        }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (lo, hi))| *v >= *lo && *v <= *hi)
    }

    pub fn check(&self, x: &[f64]) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::Domain { point: x.to_vec() })
        }
    }

    /// Maps a point of the unit hypercube onto this domain.
    pub fn from_unit(&self, u: &[f64]) -> Vec<f64> {
        u.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(v, (lo, hi))| (lo + v * (hi - lo)).clamp(*lo, *hi))
            .collect()
    }

    /// Maps a point of this domain onto the unit hypercube.
    pub fn to_unit(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(v, (lo, hi))| (v - lo) / (hi - lo))
            .collect()
    }

    pub fn midpoint(&self) -> Vec<f64> {
        self.from_unit(&vec![0.5; self.dim()])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Fidelity {
    High,
    Low,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SourceTag {
    Literature,
    Disturbance,
}

impl SourceTag {
    /// Filtering priority tier; lower tiers are kept first.
    pub fn priority_tier(self) -> u32 {
        match self {
            SourceTag::Literature => 1,
            SourceTag::Disturbance => 2,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SourceTag::Literature => "literature",
            SourceTag::Disturbance => "disturbance",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "literature" => Some(SourceTag::Literature),
            "disturbance" => Some(SourceTag::Disturbance),
            _ => None,
        }
    }
}

impl fmt::Display for SourceTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A single deterministic function on a hypercube; the seed of a disturbance pair.
#[derive(Clone)]
pub struct BaseFunction {
    pub id: String,
    pub domain: Hypercube,
    pub f: ScalarField,
}

impl fmt::Debug for BaseFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BaseFunction")
            .field("id", &self.id)
            .field("domain", &self.domain)
            .finish_non_exhaustive()
    }
}

#[derive(Clone)]
pub struct FunctionPair {
    id: String,
    domain: Hypercube,
    high: ScalarField,
    low: ScalarField,
    source: SourceTag,
}

impl fmt::Debug for FunctionPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FunctionPair")
            .field("id", &self.id)
            .field("domain", &self.domain)
            .field("source", &self.source)
            .finish_non_exhaustive()
    }
}

impl FunctionPair {
    pub fn new(
        id: impl Into<String>,
        domain: Hypercube,
        high: ScalarField,
        low: ScalarField,
        source: SourceTag,
    ) -> Self {
        Self {
            id: id.into(),
            domain,
            high,
            low,
            source,
        }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn domain(&self) -> &Hypercube {
        &self.domain
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn source(&self) -> SourceTag {
        self.source
    }

    pub fn evaluate(&self, fidelity: Fidelity, x: &[f64]) -> Result<f64> {
        self.domain.check(x)?;
        Ok(match fidelity {
            Fidelity::High => (self.high)(x),
            Fidelity::Low => (self.low)(x),
        })
    }

    /// The high-fidelity source as a standalone function.
    pub fn high_base(&self) -> BaseFunction {
        BaseFunction {
            id: self.id.clone(),
            domain: self.domain.clone(),
            f: self.high.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DisturbanceMode {
    HeightBased,
    CentreBased,
}

/// Parameters of the disturbance added to a base function.
///
/// `amplitude` is relative to the range of the base function estimated on a
/// seeded probe, and `radius` is a fraction of the unit-hypercube diagonal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisturbanceConfig {
    pub mode: DisturbanceMode,
    pub amplitude: f64,
    #[serde(default = "default_centres")]
    pub num_centres: usize,
    pub radius: f64,
    #[serde(default = "default_quantile")]
    pub target_height_quantile: f64,
    pub seed: u64,
}

fn default_centres() -> usize {
    1
}

fn default_quantile() -> f64 {
    0.5
}

impl DisturbanceConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.amplitude.is_finite() {
            return Err(Error::Config(format!(
                "disturbance amplitude must be finite, got {}",
                self.amplitude
            )));
        }
        if !(self.radius > 0.0 && self.radius <= 1.0) {
            return Err(Error::Config(format!(
                "disturbance radius must lie in (0, 1], got {}",
                self.radius
            )));
        }
        if !(0.0..=1.0).contains(&self.target_height_quantile) {
            return Err(Error::Config(format!(
                "target height quantile must lie in [0, 1], got {}",
                self.target_height_quantile
            )));
        }
        if self.mode == DisturbanceMode::CentreBased && self.num_centres == 0 {
            return Err(Error::Config("centre-based disturbance needs at least one centre".into()));
        }
        Ok(())
    }
}

const PROBE_SIZE: usize = 1000;

/// Smooth radial bump `exp(1 - 1/(1 - t^2))`: 1 at the origin, 0 for `|t| >= 1`.
pub fn bump(t: f64) -> f64 {
    let t2 = t * t;
    if t2 >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - t2)).exp()
    }
}

/// Builds a pair whose high fidelity is `base` and whose low fidelity is
/// `base + disturbance`.
///
/// Centre-based mode places `num_centres` seeded centres in the domain and adds
/// `A * R * bump(t) * sin(4 pi t + phase)` around each, where `t` is the distance
/// to the centre in units of `radius * sqrt(d)` and `R` the probed range of the
/// base. Height-based mode applies the same bump to the normalized distance of
/// the base value from its `target_height_quantile` (band half-width
/// `radius * R`), modulated by a seeded plane wave.
pub fn make_disturbance_pair(
    id: impl Into<String>,
    base: &BaseFunction,
    cfg: &DisturbanceConfig,
) -> Result<FunctionPair> {
    cfg.validate()?;
    let domain = base.domain.clone();
    let d = domain.dim();
    let mut rng = rng::seeded(cfg.seed);

    let mut probe: Vec<f64> = (0..PROBE_SIZE)
        .map(|_| {
            let u: Vec<f64> = (0..d).map(|_| rng.gen::<f64>()).collect();
            (base.f)(&domain.from_unit(&u))
        })
        .collect();
    probe.retain(|v| v.is_finite());
    if probe.is_empty() {
        return Err(Error::Config(format!("base function `{}` is not finite on its probe", base.id)));
    }
    probe.sort_by(f64::total_cmp);
    let range = (probe[probe.len() - 1] - probe[0]).max(f64::MIN_POSITIVE);
    let scale = cfg.amplitude * range;
    let reach = cfg.radius * (d as f64).sqrt();

    let high = base.f.clone();
    let f = base.f.clone();
    let dom = domain.clone();
    let low: ScalarField = match cfg.mode {
        DisturbanceMode::CentreBased => {
            let centres: Vec<(Vec<f64>, f64)> = (0..cfg.num_centres)
                .map(|_| {
                    let c: Vec<f64> = (0..d).map(|_| rng.gen::<f64>()).collect();
                    let phase = rng.gen::<f64>() * std::f64::consts::TAU;
                    (c, phase)
                })
                .collect();
            Arc::new(move |x: &[f64]| {
                let u = dom.to_unit(x);
                let field: f64 = centres
                    .iter()
                    .map(|(c, phase)| {
                        let dist = u.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
                        let t = dist / reach;
                        bump(t) * (2.0 * std::f64::consts::TAU * t + phase).sin()
                    })
                    .sum();
                f(x) + scale * field
            })
        }
        DisturbanceMode::HeightBased => {
            let q = cfg.target_height_quantile;
            let pos = q * (probe.len() - 1) as f64;
            let (lo, frac) = (pos.floor() as usize, pos - pos.floor());
            let hi = (lo + 1).min(probe.len() - 1);
            let target = probe[lo] + frac * (probe[hi] - probe[lo]);
            let band = cfg.radius * range;
            let mut dir: Vec<f64> = (0..d).map(|_| rng.gen::<f64>() - 0.5).collect();
            let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-12);
            dir.iter_mut().for_each(|v| *v /= norm);
            let phase = rng.gen::<f64>() * std::f64::consts::TAU;
            let wavelength = reach;
            Arc::new(move |x: &[f64]| {
                let base_value = f(x);
                let u = dom.to_unit(x);
                let along: f64 = u.iter().zip(&dir).map(|(a, b)| a * b).sum();
                let w = (std::f64::consts::TAU * along / wavelength + phase).sin();
                base_value + scale * bump((base_value - target) / band) * w
            })
        }
    };
    Ok(FunctionPair::new(id, domain, high, low, SourceTag::Disturbance))
}

fn pair(
    id: &str,
    lower: Vec<f64>,
    upper: Vec<f64>,
    high: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    low: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
) -> FunctionPair {
    let domain = Hypercube::new(lower, upper).expect("catalogue domains are valid");
    FunctionPair::new(id, domain, Arc::new(high), Arc::new(low), SourceTag::Literature)
}

fn forrester(x: f64) -> f64 {
    (6.0 * x - 2.0).powi(2) * (12.0 * x - 4.0).sin()
}

fn currin_high(x: &[f64]) -> f64 {
    let (x1, x2) = (x[0], x[1]);
    let num = 2300.0 * x1.powi(3) + 1900.0 * x1 * x1 + 2092.0 * x1 + 60.0;
    let den = 100.0 * x1.powi(3) + 500.0 * x1 * x1 + 4.0 * x1 + 20.0;
    (1.0 - (-1.0 / (2.0 * x2)).exp()) * num / den
}

fn park91a_high(x: &[f64]) -> f64 {
    let (x1, x2, x3, x4) = (x[0], x[1], x[2], x[3]);
    x1 / 2.0 * ((1.0 + (x2 + x3 * x3) * x4 / (x1 * x1)).sqrt() - 1.0)
        + (x1 + 3.0 * x4) * (1.0 + x3.sin()).exp()
}

fn park91b_high(x: &[f64]) -> f64 {
    2.0 / 3.0 * (x[0] + x[1]).exp() - x[3] * x[2].sin() + x[2]
}

fn borehole(x: &[f64], numerator: f64, offset: f64) -> f64 {
    let (rw, r, tu, hu, tl, hl, l, kw) = (x[0], x[1], x[2], x[3], x[4], x[5], x[6], x[7]);
    let log_ratio = (r / rw).ln();
    numerator * tu * (hu - hl)
        / (log_ratio * (offset + 2.0 * l * tu / (log_ratio * rw * rw * kw) + tu / tl))
}

fn rosenbrock_high(x: &[f64]) -> f64 {
    x.windows(2)
        .map(|w| 100.0 * (w[1] - w[0] * w[0]).powi(2) + (1.0 - w[0]).powi(2))
        .sum()
}

fn rosenbrock_low(x: &[f64]) -> f64 {
    let coupled: f64 = x
        .windows(2)
        .map(|w| 50.0 * (w[1] - w[0] * w[0]).powi(2) + (-2.0 - w[0]).powi(2))
        .sum();
    coupled - 0.5 * x.iter().sum::<f64>()
}

fn rosenbrock(d: usize) -> FunctionPair {
    pair(
        &format!("rosenbrock-{d}d"),
        vec![-2.0; d],
        vec![2.0; d],
        rosenbrock_high,
        rosenbrock_low,
    )
}

/// The shipped literature catalogue, in stable id order.
///
/// | id | d | high fidelity | low fidelity |
/// |----|---|---------------|--------------|
/// | `forrester` | 1 | `(6x-2)^2 sin(12x-4)` on `[0,1]` | `0.5 f_h + 10(x-0.5) - 5` |
/// | `forrester-b` | 1 | as above | `(5.5x-2.5)^2 sin(12x-4)` |
/// | `forrester-c` | 1 | as above | `0.75 f_h + 5(x-0.5) - 2` |
/// | `currin` | 2 | Currin exponential on `[0,1]^2` | four-point average with offsets of 0.05 (second coordinate floored at 0) |
/// | `park91a` | 4 | Park (1991) A on `[0.01,1] x [0,1]^3` | `(1 + sin(x1)/10) f_h - 2 x1 + x2^2 + x3^2 + 0.5` |
/// | `park91b` | 4 | `2/3 exp(x1+x2) - x4 sin(x3) + x3` on `[0,1]^4` | `1.2 f_h - 1` |
/// | `borehole` | 8 | borehole water flow, `2 pi` numerator, offset 1 | numerator 5, offset 1.5 |
/// | `rosenbrock-{2,3,5,10}d` | 2,3,5,10 | Rosenbrock on `[-2,2]^d` | `sum 50(x_{i+1}-x_i^2)^2 + (-2-x_i)^2 - 0.5 sum x_i` |
///
/// The lower bound of `x1` for `park91a` is moved from 0 to 0.01 so that the
/// function is finite on the whole closed domain.
pub fn list_literature_pairs() -> Vec<FunctionPair> {
    vec![
        pair(
            "forrester",
            vec![0.0],
            vec![1.0],
            |x| forrester(x[0]),
            |x| 0.5 * forrester(x[0]) + 10.0 * (x[0] - 0.5) - 5.0,
        ),
        pair(
            "forrester-b",
            vec![0.0],
            vec![1.0],
            |x| forrester(x[0]),
            |x| (5.5 * x[0] - 2.5).powi(2) * (12.0 * x[0] - 4.0).sin(),
        ),
        pair(
            "forrester-c",
            vec![0.0],
            vec![1.0],
            |x| forrester(x[0]),
            |x| 0.75 * forrester(x[0]) + 5.0 * (x[0] - 0.5) - 2.0,
        ),
        pair("currin", vec![0.0; 2], vec![1.0; 2], currin_high, |x| {
            let (x1, x2) = (x[0], x[1]);
            let down = (x2 - 0.05).max(0.0);
            0.25 * (currin_high(&[x1 + 0.05, x2 + 0.05])
                + currin_high(&[x1 + 0.05, down])
                + currin_high(&[x1 - 0.05, x2 + 0.05])
                + currin_high(&[x1 - 0.05, down]))
        }),
        pair(
            "park91a",
            vec![0.01, 0.0, 0.0, 0.0],
            vec![1.0; 4],
            park91a_high,
            |x| {
                (1.0 + x[0].sin() / 10.0) * park91a_high(x) - 2.0 * x[0]
                    + x[1] * x[1]
                    + x[2] * x[2]
                    + 0.5
            },
        ),
        pair("park91b", vec![0.0; 4], vec![1.0; 4], park91b_high, |x| {
            1.2 * park91b_high(x) - 1.0
        }),
        pair(
            "borehole",
            vec![0.05, 100.0, 63070.0, 990.0, 63.1, 700.0, 1120.0, 9855.0],
            vec![0.15, 50000.0, 115600.0, 1110.0, 116.0, 820.0, 1680.0, 12045.0],
            |x| borehole(x, std::f64::consts::TAU, 1.0),
            |x| borehole(x, 5.0, 1.5),
        ),
        rosenbrock(2),
        rosenbrock(3),
        rosenbrock(5),
        rosenbrock(10),
    ]
}

pub fn find_pair(id: &str) -> Result<FunctionPair> {
    list_literature_pairs()
        .into_iter()
        .find(|p| p.id() == id)
        .ok_or_else(|| Error::UnknownPair(id.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn forrester_base() -> BaseFunction {
        find_pair("forrester").unwrap().high_base()
    }

    fn centre_cfg(amplitude: f64) -> DisturbanceConfig {
        DisturbanceConfig {
            mode: DisturbanceMode::CentreBased,
            amplitude,
            num_centres: 1,
            radius: 0.1,
            target_height_quantile: 0.5,
            seed: 11,
        }
    }

    #[test]
    fn forrester_high_at_origin() {
        let p = find_pair("forrester").unwrap();
        let v = p.evaluate(Fidelity::High, &[0.0]).unwrap();
        assert!((v - 4.0 * (-4.0f64).sin()).abs() < 1e-15);
        assert!((v - 3.0272).abs() < 1e-4);
    }

    #[test]
    fn out_of_domain_is_rejected() {
        let p = find_pair("forrester").unwrap();
        assert!(matches!(p.evaluate(Fidelity::High, &[1.5]), Err(Error::Domain { .. })));
        assert!(matches!(p.evaluate(Fidelity::Low, &[-0.1]), Err(Error::Domain { .. })));
        assert!(p.evaluate(Fidelity::Low, &[0.2, 0.2]).is_err());
    }

    #[test]
    fn identity_low_fidelity_matches_high() {
        let base = forrester_base();
        let p = FunctionPair::new("id", base.domain.clone(), base.f.clone(), base.f.clone(), SourceTag::Literature);
        for x in [0.0, 0.3, 0.77, 1.0] {
            assert_eq!(
                p.evaluate(Fidelity::High, &[x]).unwrap(),
                p.evaluate(Fidelity::Low, &[x]).unwrap()
            );
        }
    }

    #[test]
    fn catalogue_shape() {
        let pairs = list_literature_pairs();
        assert!(pairs.len() >= 10);
        let mut dims: Vec<usize> = pairs.iter().map(|p| p.dim()).collect();
        dims.sort_unstable();
        dims.dedup();
        for d in [1, 2, 3, 5, 10] {
            assert!(dims.contains(&d), "missing dimension {d}");
        }
        let mut ids: Vec<&str> = pairs.iter().map(|p| p.id()).collect();
        ids.sort_unstable();
        ids.dedup();
        assert_eq!(ids.len(), pairs.len(), "ids must be unique");
    }

    #[test]
    fn catalogue_finite_at_midpoints_and_corners() {
        for p in list_literature_pairs() {
            for x in [p.domain().midpoint(), p.domain().lower().to_vec(), p.domain().upper().to_vec()] {
                for fid in [Fidelity::High, Fidelity::Low] {
                    let v = p.evaluate(fid, &x).unwrap();
                    assert!(v.is_finite(), "{} {:?} at {:?}", p.id(), fid, x);
                }
            }
        }
    }

    #[test]
    fn spot_checks_by_hand() {
        let park = find_pair("park91b").unwrap();
        let x = [0.5, 0.5, 0.0, 0.3];
        let expect = 2.0 / 3.0 * 1f64.exp();
        assert!((park.evaluate(Fidelity::High, &x).unwrap() - expect).abs() < 1e-14);
        assert!((park.evaluate(Fidelity::Low, &x).unwrap() - (1.2 * expect - 1.0)).abs() < 1e-14);

        let rb = find_pair("rosenbrock-2d").unwrap();
        assert_eq!(rb.evaluate(Fidelity::High, &[1.0, 1.0]).unwrap(), 0.0);
        // 50*0 + 9 - 0.5*2
        assert_eq!(rb.evaluate(Fidelity::Low, &[1.0, 1.0]).unwrap(), 8.0);

        // Currin at x2 = 0: exp(-inf) = 0, so f_h = 60/20.
        let cu = find_pair("currin").unwrap();
        assert!((cu.evaluate(Fidelity::High, &[0.0, 0.0]).unwrap() - 3.0).abs() < 1e-14);
    }

    #[test]
    fn zero_amplitude_disturbance_is_identity() {
        for mode in [DisturbanceMode::CentreBased, DisturbanceMode::HeightBased] {
            let cfg = DisturbanceConfig { mode, ..centre_cfg(0.0) };
            let p = make_disturbance_pair("z", &forrester_base(), &cfg).unwrap();
            for i in 0..=100 {
                let x = [i as f64 / 100.0];
                assert_eq!(
                    p.evaluate(Fidelity::High, &x).unwrap(),
                    p.evaluate(Fidelity::Low, &x).unwrap()
                );
            }
        }
    }

    #[test]
    fn disturbance_is_reproducible() {
        let cfg = DisturbanceConfig { num_centres: 3, ..centre_cfg(2.0) };
        let a = make_disturbance_pair("a", &forrester_base(), &cfg).unwrap();
        let b = make_disturbance_pair("a", &forrester_base(), &cfg).unwrap();
        for i in 0..=200 {
            let x = [i as f64 / 200.0];
            assert_eq!(
                a.evaluate(Fidelity::Low, &x).unwrap().to_bits(),
                b.evaluate(Fidelity::Low, &x).unwrap().to_bits()
            );
        }
        assert_eq!(a.source(), SourceTag::Disturbance);
    }

    #[test]
    fn centre_disturbance_has_compact_support() {
        let p = make_disturbance_pair("c", &forrester_base(), &centre_cfg(5.0)).unwrap();
        let xs: Vec<f64> = (0..=1000).map(|i| i as f64 / 1000.0).collect();
        let diff: Vec<f64> = xs
            .iter()
            .map(|&x| p.evaluate(Fidelity::Low, &[x]).unwrap() - p.evaluate(Fidelity::High, &[x]).unwrap())
            .collect();
        let touched: Vec<f64> = xs.iter().zip(&diff).filter(|(_, d)| d.abs() > 0.0).map(|(x, _)| *x).collect();
        assert!(!touched.is_empty());
        let width = touched.last().unwrap() - touched.first().unwrap();
        assert!(width <= 0.2 + 1e-9, "support width {width}");
    }

    #[test]
    fn invalid_disturbance_configs() {
        let base = forrester_base();
        assert!(matches!(make_disturbance_pair("x", &base, &centre_cfg(f64::NAN)), Err(Error::Config(_))));
        assert!(make_disturbance_pair("x", &base, &centre_cfg(f64::INFINITY)).is_err());
        let cfg = DisturbanceConfig { radius: 0.0, ..centre_cfg(1.0) };
        assert!(make_disturbance_pair("x", &base, &cfg).is_err());
        let cfg = DisturbanceConfig { target_height_quantile: 1.5, ..centre_cfg(1.0) };
        assert!(make_disturbance_pair("x", &base, &cfg).is_err());
        let cfg = DisturbanceConfig { num_centres: 0, ..centre_cfg(1.0) };
        assert!(make_disturbance_pair("x", &base, &cfg).is_err());
    }

    #[test]
    fn height_disturbance_targets_the_band() {
        let cfg = DisturbanceConfig {
            mode: DisturbanceMode::HeightBased,
            target_height_quantile: 0.5,
            radius: 0.05,
            ..centre_cfg(1.0)
        };
        let p = make_disturbance_pair("h", &forrester_base(), &cfg).unwrap();
        // The global maximum of the Forrester function (~15.83 at x=1) is far from the median.
        let x = [1.0];
        assert_eq!(p.evaluate(Fidelity::Low, &x).unwrap(), p.evaluate(Fidelity::High, &x).unwrap());
    }

    #[test]
    fn bump_profile() {
        assert_eq!(bump(0.0), 1.0);
        assert_eq!(bump(1.0), 0.0);
        assert_eq!(bump(-2.0), 0.0);
        assert!(bump(0.5) > bump(0.9));
    }

    #[test]
    fn unit_mapping_round_trip() {
        let h = Hypercube::new(vec![-5.0, 0.0], vec![10.0, 15.0]).unwrap();
        let x = vec![2.5, 7.5];
        assert_eq!(h.to_unit(&x), vec![0.5, 0.5]);
        assert_eq!(h.from_unit(&[0.5, 0.5]), x);
        assert!(Hypercube::new(vec![1.0], vec![1.0]).is_err());
        assert!(Hypercube::new(vec![], vec![]).is_err());
    }
}
