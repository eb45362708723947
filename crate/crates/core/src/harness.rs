//! The per-instance experiment: repeated designs, both models, accuracies,
//! paired Wilcoxon comparison, labels, and the metadata table.

use std::collections::BTreeSet;
use std::io::{BufRead, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{
    feature_range, sample_feature_vector, sample_features, transform_features, FeatureTransform, FeatureVector,
};
use crate::filtering::InstanceMetadataRow;
use crate::rng;
use crate::sampling::{build_nested_design, lhs_plan, NestedDesign};
use crate::stats::{wilcoxon_p, MIN_PAIRS};
use crate::surrogates::{accuracy, train_cokriging, train_kriging, TrainerConfig};
use crate::testbed::{Fidelity, FunctionPair, SourceTag};

/// Allowed shortfall of one model's correlation before it is considered worse.
pub const TOLERANCE: f64 = 0.001;
pub const DEFAULT_REPETITIONS: usize = 40;
/// Test points per dimension for the accuracy estimate.
pub const TEST_POINTS_PER_DIM: usize = 1000;
/// p-value reported when there are too few valid repetitions to test.
pub const LOW_POWER_P: f64 = 0.5 - 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub pair_id: String,
    pub n_h: usize,
    pub n_l: usize,
    pub repetitions: usize,
    pub seed: u64,
}

impl InstanceSpec {
    pub fn new(pair_id: impl Into<String>, n_h: usize, n_l: usize, repetitions: usize, seed: u64) -> Self {
        Self { pair_id: pair_id.into(), n_h, n_l, repetitions, seed }
    }

    pub fn instance_id(&self) -> String {
        format!("{}_nh{}_nl{}", self.pair_id, self.n_h, self.n_l)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_h < 2 || self.n_h > self.n_l {
            return Err(Error::Config(format!(
                "instance `{}`: need 2 <= n_h <= n_l, got n_h={}, n_l={}",
                self.instance_id(),
                self.n_h,
                self.n_l
            )));
        }
        if self.repetitions == 0 {
            return Err(Error::Config(format!("instance `{}`: repetitions must be positive", self.instance_id())));
        }
        Ok(())
    }

    pub fn repetition_seed(&self, k: usize) -> u64 {
        rng::derive(self.seed, &[rng::hash_str(&self.pair_id), self.n_h as u64, self.n_l as u64, k as u64])
    }

    /// The nested design used in repetition `k`.
    pub fn design(&self, dim: usize, k: usize) -> Result<NestedDesign> {
        build_nested_design(self.n_h, self.n_l, dim, self.repetition_seed(k))
    }
}

/// The `(n_h, n_l)` combinations with `n_h` in `{2d, 4d, ..., 20d}`,
/// `n_l` in `{4d, 8d, ..., 20d}` and `n_h <= n_l`.
pub fn paper_grid(d: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for l in [4, 8, 12, 16, 20] {
        for h in (2..=20).step_by(2) {
            if h <= l {
                out.push((h * d, l * d));
            }
        }
    }
    out
}

pub fn binary_label(p: f64) -> bool {
    p > 0.5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepetitionFailure {
    pub repetition: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceResult {
    pub spec: InstanceSpec,
    pub source: SourceTag,
    pub dim: usize,
    /// Paired accuracies of the valid repetitions.
    pub acc_kriging: Vec<f64>,
    pub acc_cokriging: Vec<f64>,
    pub p_kriging: f64,
    pub p_cokriging: f64,
    pub good_kriging: bool,
    pub good_cokriging: bool,
    /// Fewer than the minimum number of valid pairs; both labels are bad.
    pub low_power: bool,
    pub failures: Vec<RepetitionFailure>,
    pub features: FeatureVector,
}

struct Repetition {
    design: NestedDesign,
    kriging: f64,
    cokriging: f64,
    features: crate::features::RawFeatures,
}

fn correlation_or_zero(r: Result<f64>) -> Result<f64> {
    match r {
        Err(Error::UndefinedCorrelation(_)) => Ok(0.0),
        other => other,
    }
}

fn run_repetition(spec: &InstanceSpec, pair: &FunctionPair, cfg: &TrainerConfig, k: usize) -> Result<Repetition> {
    let d = pair.dim();
    let domain = pair.domain();
    let seed = spec.repetition_seed(k);
    let design = spec.design(d, k)?;
    let unit_low = design.low_points();
    let unit_high = design.high_points();
    let x_low: Vec<Vec<f64>> = unit_low.iter().map(|u| domain.from_unit(u)).collect();
    let x_high: Vec<Vec<f64>> = unit_high.iter().map(|u| domain.from_unit(u)).collect();
    let eval = |f, xs: &[Vec<f64>]| xs.iter().map(|x| pair.evaluate(f, x)).collect::<Result<Vec<f64>>>();
    let y_low = eval(Fidelity::Low, &x_low)?;
    let y_high = eval(Fidelity::High, &x_high)?;
    let y_low_at_high: Vec<f64> = design.subset_indices().iter().map(|&i| y_low[i]).collect();

    let test: Vec<Vec<f64>> = lhs_plan(TEST_POINTS_PER_DIM * d, d, rng::derive(seed, &[2]))?
        .points()
        .iter()
        .map(|u| domain.from_unit(u))
        .collect();
    let kriging = train_kriging(domain, &x_high, &y_high, cfg, rng::derive(seed, &[3]))?;
    let cokriging = train_cokriging(domain, &x_high, &y_high, &x_low, &y_low, cfg, rng::derive(seed, &[4]))?;
    let acc = |m: &dyn Fn() -> Result<f64>| correlation_or_zero(m());
    let acc_k = acc(&|| accuracy(&kriging, pair, &test).map(|a| a.p_corr))?;
    let acc_c = acc(&|| accuracy(&cokriging, pair, &test).map(|a| a.p_corr))?;
    let features = sample_features(&unit_high, &y_low_at_high, &y_high, spec.n_l)?;
    Ok(Repetition { design, kriging: acc_k, cokriging: acc_c, features })
}

/// Runs every repetition of an instance and labels both models.
///
/// A repetition whose training or evaluation fails is recorded in
/// `failures` and left out of the paired comparison.
pub fn run_instance(spec: &InstanceSpec, pair: &FunctionPair, cfg: &TrainerConfig) -> Result<InstanceResult> {
    run_instance_with_designs(spec, pair, cfg).map(|(r, _)| r)
}

/// [`run_instance`], also returning the design of every successful repetition.
pub fn run_instance_with_designs(
    spec: &InstanceSpec,
    pair: &FunctionPair,
    cfg: &TrainerConfig,
) -> Result<(InstanceResult, Vec<(usize, NestedDesign)>)> {
    spec.validate()?;
    cfg.validate()?;
    if pair.id() != spec.pair_id {
        return Err(Error::Config(format!("spec names pair `{}` but was given `{}`", spec.pair_id, pair.id())));
    }
    let outcomes: Vec<Result<Repetition>> =
        (0..spec.repetitions).into_par_iter().map(|k| run_repetition(spec, pair, cfg, k)).collect();
    let mut acc_kriging = Vec::new();
    let mut acc_cokriging = Vec::new();
    let mut raw = Vec::new();
    let mut failures = Vec::new();
    let mut designs = Vec::new();
    for (k, o) in outcomes.into_iter().enumerate() {
        match o {
            Ok(r) => {
                designs.push((k, r.design));
                acc_kriging.push(r.kriging);
                acc_cokriging.push(r.cokriging);
                raw.push(r.features);
            }
            Err(e) => failures.push(RepetitionFailure { repetition: k, reason: e.to_string() }),
        }
    }
    if raw.is_empty() {
        return Err(Error::Training(format!(
            "instance `{}`: every repetition failed ({})",
            spec.instance_id(),
            failures[0].reason
        )));
    }
    let low_power = acc_kriging.len() < MIN_PAIRS;
    let (p_kriging, p_cokriging) = if low_power {
        (LOW_POWER_P, LOW_POWER_P)
    } else {
        (
            wilcoxon_p(&acc_kriging, &acc_cokriging, TOLERANCE)?,
            wilcoxon_p(&acc_cokriging, &acc_kriging, TOLERANCE)?,
        )
    };
    let result = InstanceResult {
        spec: spec.clone(),
        source: pair.source(),
        dim: pair.dim(),
        acc_kriging,
        acc_cokriging,
        p_kriging,
        p_cokriging,
        good_kriging: binary_label(p_kriging),
        good_cokriging: binary_label(p_cokriging),
        low_power,
        failures,
        features: sample_feature_vector(&raw)?,
    };
    Ok((result, designs))
}

pub const METADATA_SCHEMA: &str = "bifid-metadata/1.0";
const SCHEMA_PREFIX: &str = "#schema=";
const MISSING: &str = "NA";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetadataRow {
    pub instance_id: String,
    pub source: SourceTag,
    pub d: usize,
    pub n_h: usize,
    pub n_l: usize,
    pub raw: Vec<Option<f64>>,
    pub transformed: Vec<f64>,
    pub p_kriging: f64,
    pub p_cokriging: f64,
    pub good_kriging: bool,
    pub good_cokriging: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetadataTable {
    pub feature_ids: Vec<String>,
    pub rows: Vec<MetadataRow>,
}

fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let n = values.len();
    Some(if n % 2 == 1 { values[n / 2] } else { 0.5 * (values[n / 2 - 1] + values[n / 2]) })
}

/// Builds the metadata table and fits the feature transforms over it.
///
/// Features missing for an instance are imputed with the column median
/// before transforming (0 if the whole column is missing); the raw column
/// keeps them as missing.
pub fn assemble_metadata(
    results: &[InstanceResult],
    feature_ids: &[String],
) -> Result<(MetadataTable, Option<FeatureTransform>)> {
    let mut seen = BTreeSet::new();
    for r in results {
        if !seen.insert(r.spec.instance_id()) {
            return Err(Error::Merge(format!("duplicate instance id `{}`", r.spec.instance_id())));
        }
    }
    let raw: Vec<Vec<Option<f64>>> = results
        .iter()
        .map(|r| feature_ids.iter().map(|id| r.features.get(id)).collect())
        .collect();
    let transformed = if results.is_empty() {
        (None, Vec::new())
    } else {
        let medians: Vec<f64> = (0..feature_ids.len())
            .map(|j| median(&mut raw.iter().filter_map(|r| r[j]).collect::<Vec<_>>()).unwrap_or(0.0))
            .collect();
        let filled: Vec<Vec<f64>> =
            raw.iter().map(|r| r.iter().zip(&medians).map(|(v, m)| v.unwrap_or(*m)).collect()).collect();
        let ranges: Vec<_> = feature_ids.iter().map(|id| feature_range(id)).collect();
        let ids: Vec<String> = results.iter().map(|r| r.spec.instance_id()).collect();
        let (t, out) = transform_features(feature_ids, &ranges, &ids, &filled)?;
        (Some(t), out)
    };
    let rows = results
        .iter()
        .zip(raw)
        .zip(transformed.1)
        .map(|((r, raw), transformed)| MetadataRow {
            instance_id: r.spec.instance_id(),
            source: r.source,
            d: r.dim,
            n_h: r.spec.n_h,
            n_l: r.spec.n_l,
            raw,
            transformed,
            p_kriging: r.p_kriging,
            p_cokriging: r.p_cokriging,
            good_kriging: r.good_kriging,
            good_cokriging: r.good_cokriging,
        })
        .collect();
    Ok((MetadataTable { feature_ids: feature_ids.to_vec(), rows }, transformed.0))
}

fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

fn parse_f64(s: &str, line: usize, col: &str) -> Result<f64> {
    s.parse().map_err(|_| Error::Parse { line, msg: format!("column `{col}`: `{s}` is not a number") })
}

fn parse_bit(s: &str, line: usize, col: &str) -> Result<bool> {
    match s {
        "1" => Ok(true),
        "0" => Ok(false),
        _ => Err(Error::Parse { line, msg: format!("column `{col}`: `{s}` is not 0 or 1") }),
    }
}

impl MetadataTable {
    pub fn header(&self) -> Vec<String> {
        let mut h: Vec<String> = ["instance_id", "source", "d", "n_h", "n_l"].iter().map(|s| s.to_string()).collect();
        h.extend(self.feature_ids.iter().map(|f| format!("raw_{f}")));
        h.extend(self.feature_ids.iter().map(|f| format!("tf_{f}")));
        h.extend(["p_kriging", "p_cokriging", "good_kriging", "good_cokriging"].iter().map(|s| s.to_string()));
        h
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{SCHEMA_PREFIX}{METADATA_SCHEMA}")?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(self.header())?;
        for r in &self.rows {
            let mut rec = vec![r.instance_id.clone(), r.source.to_string(), r.d.to_string(), r.n_h.to_string(), r.n_l.to_string()];
            rec.extend(r.raw.iter().map(|v| v.map_or_else(|| MISSING.to_string(), fmt_f64)));
            rec.extend(r.transformed.iter().map(|v| fmt_f64(*v)));
            rec.push(fmt_f64(r.p_kriging));
            rec.push(fmt_f64(r.p_cokriging));
            rec.push(u8::from(r.good_kriging).to_string());
            rec.push(u8::from(r.good_cokriging).to_string());
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("CSV output is UTF-8"))
    }

    pub fn read_csv<R: BufRead>(mut input: R) -> Result<Self> {
        let mut first = String::new();
        input.read_line(&mut first)?;
        let version = first
            .trim_end()
            .strip_prefix(SCHEMA_PREFIX)
            .ok_or_else(|| Error::Schema("missing `#schema=` line".into()))?;
        let (name, ver) = version
            .split_once('/')
            .ok_or_else(|| Error::Schema(format!("malformed schema tag `{version}`")))?;
        if name != "bifid-metadata" || ver.split('.').next() != Some("1") {
            return Err(Error::Schema(format!("unsupported metadata schema `{version}`")));
        }
        let mut rdr = csv::Reader::from_reader(input);
        let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
        let feature_ids: Vec<String> = header.iter().filter_map(|h| h.strip_prefix("raw_").map(str::to_string)).collect();
        let table = MetadataTable { feature_ids, rows: Vec::new() };
        let expected = table.header();
        if header != expected {
            let missing: Vec<&String> = expected.iter().filter(|h| !header.contains(h)).collect();
            return Err(Error::Schema(format!("metadata columns do not match; missing: {missing:?}")));
        }
        let nf = table.feature_ids.len();
        let mut rows = Vec::new();
        for (k, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let line = k + 3;
            let get = |i: usize| rec.get(i).unwrap_or("");
            let int = |i: usize| {
                get(i).parse::<usize>().map_err(|_| Error::Parse { line, msg: format!("column `{}` is not an integer", header[i]) })
            };
            let raw = (0..nf)
                .map(|j| match get(5 + j) {
                    MISSING => Ok(None),
                    s => parse_f64(s, line, &header[5 + j]).map(Some),
                })
                .collect::<Result<_>>()?;
            let transformed =
                (0..nf).map(|j| parse_f64(get(5 + nf + j), line, &header[5 + nf + j])).collect::<Result<_>>()?;
            let base = 5 + 2 * nf;
            rows.push(MetadataRow {
                instance_id: get(0).to_string(),
                source: SourceTag::parse(get(1))
                    .ok_or_else(|| Error::Parse { line, msg: format!("unknown source `{}`", get(1)) })?,
                d: int(2)?,
                n_h: int(3)?,
                n_l: int(4)?,
                raw,
                transformed,
                p_kriging: parse_f64(get(base), line, "p_kriging")?,
                p_cokriging: parse_f64(get(base + 1), line, "p_cokriging")?,
                good_kriging: parse_bit(get(base + 2), line, "good_kriging")?,
                good_cokriging: parse_bit(get(base + 3), line, "good_cokriging")?,
            });
        }
        Ok(MetadataTable { rows, ..table })
    }

    pub fn column(&self, id: &str) -> Option<usize> {
        self.feature_ids.iter().position(|f| f == id)
    }

    /// Rows for filtering over the transformed features.
    pub fn filter_rows(&self) -> Vec<InstanceMetadataRow> {
        self.rows
            .iter()
            .map(|r| InstanceMetadataRow {
                instance_id: r.instance_id.clone(),
                features: r.transformed.clone(),
                delta: vec![r.good_kriging, r.good_cokriging],
                priority_tier: r.source.priority_tier(),
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_has_thirty_combinations() {
        for d in [1, 2, 5] {
            let g = paper_grid(d);
            assert_eq!(g.len(), 30);
            assert!(g.iter().all(|(h, l)| h <= l && h % (2 * d) == 0 && l % (4 * d) == 0));
        }
    }

    #[test]
    fn labels_are_strict() {
        assert!(binary_label(0.51));
        assert!(!binary_label(0.5));
        assert!(!binary_label(0.49));
        assert!(!binary_label(LOW_POWER_P));
    }

    #[test]
    fn spec_validation() {
        assert!(InstanceSpec::new("forrester", 6, 4, 5, 1).validate().is_err());
        assert!(InstanceSpec::new("forrester", 1, 4, 5, 1).validate().is_err());
        assert!(InstanceSpec::new("forrester", 2, 4, 0, 1).validate().is_err());
        assert_eq!(InstanceSpec::new("forrester", 2, 8, 5, 1).instance_id(), "forrester_nh2_nl8");
    }

    #[test]
    fn seeds_differ_by_field() {
        let a = InstanceSpec::new("forrester", 2, 8, 5, 1);
        let b = InstanceSpec::new("currin", 2, 8, 5, 1);
        assert_ne!(a.repetition_seed(0), a.repetition_seed(1));
        assert_ne!(a.repetition_seed(0), b.repetition_seed(0));
    }

    #[test]
    fn empty_table_is_header_only() {
        let ids = vec!["cc".to_string()];
        let (t, tf) = assemble_metadata(&[], &ids).unwrap();
        assert!(tf.is_none());
        let s = t.to_csv_string().unwrap();
        assert_eq!(s.lines().count(), 2);
        assert_eq!(MetadataTable::read_csv(s.as_bytes()).unwrap(), t);
    }

    #[test]
    fn unknown_major_version_rejected() {
        let s = "#schema=bifid-metadata/2.0\ninstance_id\n";
        assert!(matches!(MetadataTable::read_csv(s.as_bytes()), Err(Error::Schema(_))));
    }
}
