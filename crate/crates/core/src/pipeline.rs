//! Config-driven end-to-end runs: instances, metadata, filtering, selection
//! and reporting, with a manifest that pins every artifact.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::features::feature_ids;
use crate::filtering::{self, FilterMode, FilterResult};
use crate::harness::{
    assemble_metadata, paper_grid, run_instance_with_designs, InstanceResult, InstanceSpec, MetadataTable,
    DEFAULT_REPETITIONS,
};
use crate::sampling::write_plan_string;
use crate::selector::{
    cc_baseline_select, preferred_model, project_2d, projection_inputs, rule_select, train_classifier, Classifier,
    RuleConfig, RuleInputs, DEFAULT_PENALTY, MIN_TRAINING_ROWS,
};
use crate::surrogates::{ModelKind, TrainerConfig};
use crate::testbed::{find_pair, list_literature_pairs, make_disturbance_pair, DisturbanceConfig, FunctionPair};

/// Environment variable that overrides the master seed.
pub const SEED_ENV: &str = "BIFID_SEED";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PairSelection {
    /// `"all"`: every literature pair.
    Keyword(String),
    List(Vec<String>),
}

impl Default for PairSelection {
    fn default() -> Self {
        PairSelection::List(Vec::new())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DisturbanceSpec {
    pub id: String,
    /// Literature pair whose high fidelity is the base function.
    pub base: String,
    #[serde(flatten)]
    pub config: DisturbanceConfig,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BudgetGrid {
    /// The 30 combinations per pair from multiples of `d`.
    Paper,
    /// `(n_h, n_l)` as multiples of `d`.
    PerDim { budgets: Vec<(usize, usize)> },
    /// Absolute `(n_h, n_l)`.
    Absolute { budgets: Vec<(usize, usize)> },
}

impl Default for BudgetGrid {
    fn default() -> Self {
        BudgetGrid::Paper
    }
}

impl BudgetGrid {
    pub fn budgets(&self, d: usize) -> Vec<(usize, usize)> {
        match self {
            BudgetGrid::Paper => paper_grid(d),
            BudgetGrid::PerDim { budgets } => budgets.iter().map(|(h, l)| (h * d, l * d)).collect(),
            BudgetGrid::Absolute { budgets } => budgets.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ThetaSetting {
    /// `"auto"`: select on the grid by uniformity.
    Keyword(String),
    Value(f64),
}

impl Default for ThetaSetting {
    fn default() -> Self {
        ThetaSetting::Keyword("auto".into())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FilterConfig {
    pub mode: FilterMode,
    pub theta: ThetaSetting,
    /// Ascending grid for automatic selection; by default 20 evenly spaced
    /// values up to the largest pairwise feature distance.
    pub theta_grid: Option<Vec<f64>>,
}

impl Default for FilterConfig {
    fn default() -> Self {
        Self {
            mode: FilterMode::Critical,
            theta: ThetaSetting::default(),
            theta_grid: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub pairs: PairSelection,
    #[serde(default)]
    pub disturbance: Vec<DisturbanceSpec>,
    #[serde(default)]
    pub grid: BudgetGrid,
    #[serde(default = "default_reps")]
    pub repetitions: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub trainer: TrainerConfig,
    #[serde(default)]
    pub filter: FilterConfig,
    #[serde(default)]
    pub rules: RuleConfig,
    /// Output directory, relative to the config file.
    pub out: PathBuf,
    /// Worker threads; all cores when absent.
    #[serde(default)]
    pub jobs: Option<usize>,
}

fn default_reps() -> usize {
    DEFAULT_REPETITIONS
}

fn line_of(text: &str, needle: &str) -> usize {
    text.lines().position(|l| l.contains(needle)).map_or(1, |i| i + 1)
}

impl RunConfig {
    /// Parses and validates a config, reporting problems with a line number.
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: RunConfig =
            serde_json::from_str(text).map_err(|e| Error::Parse { line: e.line().max(1), msg: e.to_string() })?;
        cfg.validate().map_err(|e| {
            let (needle, msg) = match &e {
                Error::UnknownPair(id) => (format!("\"{id}\""), e.to_string()),
                other => (String::new(), other.to_string()),
            };
            let line = if needle.is_empty() { 1 } else { line_of(text, &needle) };
            Error::Parse { line, msg }
        })?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Applies a `BIFID_SEED` value.
    pub fn apply_seed_override(&mut self, value: Option<&str>) -> Result<()> {
        if let Some(v) = value {
            self.seed = v
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("{SEED_ENV} must be an unsigned integer, got `{v}`")))?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.trainer.validate()?;
        if self.repetitions == 0 {
            return Err(Error::Config("repetitions must be positive".into()));
        }
        if self.jobs == Some(0) {
            return Err(Error::Config("jobs must be positive".into()));
        }
        if let ThetaSetting::Keyword(k) = &self.filter.theta {
            if k != "auto" {
                return Err(Error::Config(format!("theta must be a number or \"auto\", got \"{k}\"")));
            }
        }
        if let PairSelection::Keyword(k) = &self.pairs {
            if k != "all" {
                return Err(Error::Config(format!("pairs must be a list or \"all\", got \"{k}\"")));
            }
        }
        self.resolve_pairs()?;
        Ok(())
    }

    pub fn resolve_pairs(&self) -> Result<Vec<FunctionPair>> {
        let mut out = match &self.pairs {
            PairSelection::Keyword(_) => list_literature_pairs(),
            PairSelection::List(ids) => ids.iter().map(|id| find_pair(id)).collect::<Result<_>>()?,
        };
        for d in &self.disturbance {
            let base = find_pair(&d.base)?.high_base();
            out.push(make_disturbance_pair(d.id.clone(), &base, &d.config)?);
        }
        let mut ids: Vec<&str> = out.iter().map(FunctionPair::id).collect();
        ids.sort_unstable();
        if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Config(format!("pair `{}` selected twice", w[0])));
        }
        Ok(out)
    }

    /// Every instance of the run, in a stable order.
    pub fn instances(&self) -> Result<Vec<(FunctionPair, InstanceSpec)>> {
        let mut out = Vec::new();
        for pair in self.resolve_pairs()? {
            for (n_h, n_l) in self.grid.budgets(pair.dim()) {
                let spec = InstanceSpec::new(pair.id(), n_h, n_l, self.repetitions, self.seed);
                spec.validate()?;
                out.push((pair.clone(), spec));
            }
        }
        Ok(out)
    }

    pub fn sha256(&self) -> String {
        hex(&Sha256::digest(serde_json::to_vec(self).expect("config serializes")))
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn sha256_file(path: &Path) -> Result<String> {
    Ok(hex(&Sha256::digest(std::fs::read(path)?)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionRow {
    pub instance_id: String,
    pub rules: Option<ModelKind>,
    pub rule_fired: String,
    pub cc_baseline: Option<ModelKind>,
    pub classifier: Option<ModelKind>,
    pub z1: f64,
    pub z2: f64,
    /// The model the labels favour.
    pub preferred: ModelKind,
}

pub const DECISIONS_SCHEMA: &str = "bifid-decisions/1.0";
pub const FILTERED_SCHEMA: &str = "bifid-filtered/1.0";

/// Rule, CC-baseline and (when trainable) classifier decisions per instance.
pub fn decide_all(table: &MetadataTable, rules: &RuleConfig) -> Result<(Vec<DecisionRow>, Option<Classifier>)> {
    let mut rows = Vec::with_capacity(table.rows.len());
    for r in &table.rows {
        let raw: BTreeMap<String, f64> =
            table.feature_ids.iter().zip(&r.raw).filter_map(|(id, v)| v.map(|v| (id.clone(), v))).collect();
        let tf: BTreeMap<String, f64> = table.feature_ids.iter().cloned().zip(r.transformed.iter().copied()).collect();
        let (rule_choice, rule_fired) = match RuleInputs::from_features(&raw).and_then(|i| rule_select(&i, rules)) {
            Ok(d) => (Some(d.choice), d.rule_fired.to_string()),
            Err(e) => (None, format!("unavailable: {e}")),
        };
        let cc = raw.get("cc").map(|&c| cc_baseline_select(c).choice);
        let z = project_2d(&projection_inputs(&tf)?)?;
        rows.push(DecisionRow {
            instance_id: r.instance_id.clone(),
            rules: rule_choice,
            rule_fired,
            cc_baseline: cc,
            classifier: None,
            z1: z[0],
            z2: z[1],
            preferred: preferred_model(r.good_kriging, r.good_cokriging, r.p_kriging, r.p_cokriging),
        });
    }
    let z: Vec<[f64; 2]> = rows.iter().map(|r| [r.z1, r.z2]).collect();
    let target: Vec<ModelKind> = rows.iter().map(|r| r.preferred).collect();
    let classes = target.iter().filter(|t| **t == ModelKind::CoKriging).count();
    let clf = if rows.len() >= MIN_TRAINING_ROWS && classes > 0 && classes < rows.len() {
        let c = train_classifier(&z, &target, DEFAULT_PENALTY)?;
        for r in &mut rows {
            r.classifier = Some(c.classify([r.z1, r.z2]));
        }
        Some(c)
    } else {
        None
    };
    Ok((rows, clf))
}

fn opt_kind(k: Option<ModelKind>) -> String {
    k.map_or_else(|| "NA".to_string(), |k| k.to_string())
}

fn parse_opt_kind(s: &str) -> Result<Option<ModelKind>> {
    if s == "NA" {
        Ok(None)
    } else {
        s.parse().map(Some)
    }
}

fn check_schema_line<R: BufRead>(input: &mut R, expected: &str) -> Result<()> {
    let mut first = String::new();
    input.read_line(&mut first)?;
    let tag = first.trim_end().strip_prefix("#schema=").unwrap_or("");
    let (name, ver) = tag.split_once('/').unwrap_or(("", ""));
    let (ename, ever) = expected.split_once('/').expect("schema tag has a version");
    if name != ename || ver.split('.').next() != ever.split('.').next() {
        return Err(Error::Schema(format!("expected schema `{expected}`, found `{}`", first.trim_end())));
    }
    Ok(())
}

const DECISION_COLUMNS: [&str; 8] =
    ["instance_id", "rules", "rule_fired", "cc_baseline", "classifier", "z1", "z2", "preferred"];

pub fn write_decisions<W: Write>(rows: &[DecisionRow], mut out: W) -> Result<()> {
    writeln!(out, "#schema={DECISIONS_SCHEMA}")?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(DECISION_COLUMNS)?;
    for r in rows {
        w.write_record([
            r.instance_id.clone(),
            opt_kind(r.rules),
            r.rule_fired.clone(),
            opt_kind(r.cc_baseline),
            opt_kind(r.classifier),
            format!("{:?}", r.z1),
            format!("{:?}", r.z2),
            r.preferred.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_decisions<R: BufRead>(mut input: R) -> Result<Vec<DecisionRow>> {
    check_schema_line(&mut input, DECISIONS_SCHEMA)?;
    let mut rdr = csv::Reader::from_reader(input);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let missing: Vec<&str> = DECISION_COLUMNS.iter().copied().filter(|c| !header.iter().any(|h| h == c)).collect();
    if !missing.is_empty() {
        return Err(Error::Schema(format!("decisions file is missing columns {missing:?}")));
    }
    let col = |name: &str| header.iter().position(|h| h == name).expect("checked above");
    let mut out = Vec::new();
    for (k, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = k + 3;
        let get = |name: &str| rec.get(col(name)).unwrap_or("").to_string();
        let num = |name: &str| {
            get(name).parse::<f64>().map_err(|_| Error::Parse { line, msg: format!("column `{name}` is not a number") })
        };
        out.push(DecisionRow {
            instance_id: get("instance_id"),
            rules: parse_opt_kind(&get("rules"))?,
            rule_fired: get("rule_fired"),
            cc_baseline: parse_opt_kind(&get("cc_baseline"))?,
            classifier: parse_opt_kind(&get("classifier"))?,
            z1: num("z1")?,
            z2: num("z2")?,
            preferred: get("preferred").parse()?,
        });
    }
    Ok(out)
}

pub fn write_filtered<W: Write>(table: &MetadataTable, result: &FilterResult, mode: FilterMode, mut out: W) -> Result<()> {
    writeln!(out, "#schema={FILTERED_SCHEMA}")?;
    writeln!(
        out,
        "#mode={} theta={:?} dissimilar={} violating={} critical={}",
        match mode {
            FilterMode::Dissimilar => "dissimilar",
            FilterMode::Critical => "critical",
        },
        result.theta,
        result.n_dissimilar,
        result.n_violating,
        result.n_critical
    )?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["instance_id", "source", "priority_tier", "good_kriging", "good_cokriging"])?;
    let keep: std::collections::BTreeSet<&String> = result.retained.iter().collect();
    for r in table.rows.iter().filter(|r| keep.contains(&r.instance_id)) {
        w.write_record([
            r.instance_id.clone(),
            r.source.to_string(),
            r.source.priority_tier().to_string(),
            u8::from(r.good_kriging).to_string(),
            u8::from(r.good_cokriging).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Evenly spaced grid `(0, max pairwise distance]` with `steps` points.
pub fn default_theta_grid(rows: &[filtering::InstanceMetadataRow], steps: usize) -> Vec<f64> {
    let mut max: f64 = 0.0;
    for i in 0..rows.len() {
        for j in i + 1..rows.len() {
            max = max.max(filtering::distance(&rows[i].features, &rows[j].features));
        }
    }
    if max <= 0.0 {
        return vec![0.0];
    }
    (1..=steps).map(|k| max * k as f64 / steps as f64).collect()
}

/// Filters a metadata table per the config; `theta` of `"auto"` selects on the grid.
pub fn filter_table(table: &MetadataTable, cfg: &FilterConfig) -> Result<FilterResult> {
    let rows = table.filter_rows();
    let theta = match &cfg.theta {
        ThetaSetting::Value(v) => *v,
        ThetaSetting::Keyword(_) if rows.len() < 2 => 0.0,
        ThetaSetting::Keyword(_) => {
            let grid = cfg.theta_grid.clone().unwrap_or_else(|| default_theta_grid(&rows, 20));
            filtering::select_theta(&rows, &grid)?.theta
        }
    };
    filtering::filter(&rows, theta, cfg.mode)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceFailure {
    pub instance_id: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool_version: String,
    pub catalogue_version: String,
    pub metadata_schema: String,
    pub config_sha256: String,
    pub seed: u64,
    pub config: RunConfig,
    pub instances: Vec<InstanceSpec>,
    pub failed_instances: Vec<InstanceFailure>,
    pub failed_repetitions: BTreeMap<String, Vec<usize>>,
    pub theta: f64,
    pub artifacts: BTreeMap<String, String>,
}

#[derive(Debug, Clone)]
pub struct PipelineOutcome {
    pub manifest: Manifest,
    pub results: Vec<InstanceResult>,
    pub table: MetadataTable,
    pub filter: FilterResult,
    pub decisions: Vec<DecisionRow>,
}

impl PipelineOutcome {
    /// Exit status: 0 when every instance ran, 2 on partial failures.
    pub fn exit_code(&self) -> i32 {
        if self.manifest.failed_instances.is_empty() {
            0
        } else {
            2
        }
    }
}

fn write_artifact(dir: &Path, name: &str, bytes: &[u8], digests: &mut BTreeMap<String, String>) -> Result<()> {
    std::fs::write(dir.join(name), bytes)?;
    digests.insert(name.to_string(), hex(&Sha256::digest(bytes)));
    Ok(())
}

/// Runs every instance, then writes plans, `metadata.csv`,
/// `transforms.json`, `filtered.csv`, `decisions.csv` and `manifest.json`
/// under `out_dir`. Reruns with the same config are byte-identical.
pub fn command_pipeline(cfg: &RunConfig, out_dir: &Path) -> Result<PipelineOutcome> {
    cfg.validate()?;
    let instances = cfg.instances()?;
    let run = || -> Vec<Result<(InstanceResult, Vec<(usize, crate::sampling::NestedDesign)>)>> {
        instances.par_iter().map(|(pair, spec)| run_instance_with_designs(spec, pair, &cfg.trainer)).collect()
    };
    let outcomes = match cfg.jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(format!("cannot start {n} workers: {e}")))?
            .install(run),
        None => run(),
    };

    let plans_dir = out_dir.join("plans");
    std::fs::create_dir_all(&plans_dir)?;
    let mut digests = BTreeMap::new();
    let mut results = Vec::new();
    let mut failed_instances = Vec::new();
    let mut failed_repetitions = BTreeMap::new();
    for ((_, spec), o) in instances.iter().zip(outcomes) {
        match o {
            Ok((r, designs)) => {
                for (k, design) in designs {
                    let name = format!("plans/{}_rep{k}.plan", spec.instance_id());
                    write_artifact(out_dir, &name, write_plan_string(&design).as_bytes(), &mut digests)?;
                }
                if !r.failures.is_empty() {
                    failed_repetitions.insert(spec.instance_id(), r.failures.iter().map(|f| f.repetition).collect());
                }
                results.push(r);
            }
            Err(e) => {
                eprintln!("instance {} failed: {e}", spec.instance_id());
                failed_instances.push(InstanceFailure { instance_id: spec.instance_id(), reason: e.to_string() });
            }
        }
    }

    let (table, transform) = assemble_metadata(&results, &feature_ids())?;
    write_artifact(out_dir, "metadata.csv", table.to_csv_string()?.as_bytes(), &mut digests)?;
    let tf_json = serde_json::to_string_pretty(&transform)?;
    write_artifact(out_dir, "transforms.json", tf_json.as_bytes(), &mut digests)?;

    let filter = filter_table(&table, &cfg.filter)?;
    let mut buf = Vec::new();
    write_filtered(&table, &filter, cfg.filter.mode, &mut buf)?;
    write_artifact(out_dir, "filtered.csv", &buf, &mut digests)?;

    let (decisions, _) = decide_all(&table, &cfg.rules)?;
    let mut buf = Vec::new();
    write_decisions(&decisions, &mut buf)?;
    write_artifact(out_dir, "decisions.csv", &buf, &mut digests)?;

    let manifest = Manifest {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        catalogue_version: crate::testbed::CATALOGUE_VERSION.to_string(),
        metadata_schema: crate::harness::METADATA_SCHEMA.to_string(),
        config_sha256: cfg.sha256(),
        seed: cfg.seed,
        config: cfg.clone(),
        instances: instances.iter().map(|(_, s)| s.clone()).collect(),
        failed_instances,
        failed_repetitions,
        theta: filter.theta,
        artifacts: digests,
    };
    std::fs::write(out_dir.join("manifest.json"), serde_json::to_string_pretty(&manifest)?)?;
    Ok(PipelineOutcome { manifest, results, table, filter, decisions })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SelectorMode {
    Rules,
    CcBaseline,
    Classifier,
}

impl std::str::FromStr for SelectorMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rules" => Ok(SelectorMode::Rules),
            "cc-baseline" => Ok(SelectorMode::CcBaseline),
            "classifier" => Ok(SelectorMode::Classifier),
            _ => Err(Error::Config(format!("unknown selector `{s}` (rules, cc-baseline, classifier)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelScores {
    pub pr_good: f64,
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub instances: usize,
    /// Instances with a decision from the chosen selector.
    pub decided: usize,
    pub kriging: Option<ModelScores>,
    pub cokriging: Option<ModelScores>,
    /// Fraction of decided instances where the chosen model is labelled good.
    pub selection_accuracy: Option<f64>,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        f64::NAN
    } else {
        num as f64 / den as f64
    }
}

/// Pr(good) per model and, treating "selector chose the model" as a
/// prediction of "the model is good", accuracy, precision and recall.
pub fn command_report(table: &MetadataTable, decisions: &[DecisionRow], mode: SelectorMode) -> Result<Report> {
    let by_id: BTreeMap<&str, &DecisionRow> = decisions.iter().map(|d| (d.instance_id.as_str(), d)).collect();
    let mut pairs = Vec::new();
    for r in &table.rows {
        let d = by_id
            .get(r.instance_id.as_str())
            .ok_or_else(|| Error::Schema(format!("no decision for instance `{}`", r.instance_id)))?;
        let choice = match mode {
            SelectorMode::Rules => d.rules,
            SelectorMode::CcBaseline => d.cc_baseline,
            SelectorMode::Classifier => d.classifier,
        };
        if let Some(c) = choice {
            pairs.push((r.good_kriging, r.good_cokriging, c));
        }
    }
    let n = table.rows.len();
    if n == 0 {
        return Ok(Report { instances: 0, decided: 0, kriging: None, cokriging: None, selection_accuracy: None });
    }
    let scores = |kind: ModelKind, good: &dyn Fn(&crate::harness::MetadataRow) -> bool, gp: &dyn Fn(&(bool, bool, ModelKind)) -> bool| {
        let pr_good = ratio(table.rows.iter().filter(|r| good(r)).count(), n);
        let tp = pairs.iter().filter(|p| p.2 == kind && gp(p)).count();
        let fp = pairs.iter().filter(|p| p.2 == kind && !gp(p)).count();
        let fn_ = pairs.iter().filter(|p| p.2 != kind && gp(p)).count();
        let tn = pairs.len() - tp - fp - fn_;
        ModelScores {
            pr_good,
            accuracy: ratio(tp + tn, pairs.len()),
            precision: ratio(tp, tp + fp),
            recall: ratio(tp, tp + fn_),
        }
    };
    let kriging = scores(ModelKind::Kriging, &|r| r.good_kriging, &|p| p.0);
    let cokriging = scores(ModelKind::CoKriging, &|r| r.good_cokriging, &|p| p.1);
    let hits = pairs
        .iter()
        .filter(|(gk, gc, c)| match c {
            ModelKind::Kriging => *gk,
            ModelKind::CoKriging => *gc,
        })
        .count();
    Ok(Report {
        instances: n,
        decided: pairs.len(),
        kriging: Some(kriging),
        cokriging: Some(cokriging),
        selection_accuracy: (!pairs.is_empty()).then(|| ratio(hits, pairs.len())),
    })
}
