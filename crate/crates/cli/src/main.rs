use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use bifid_core::features::{feature_ids, sample_features};
use bifid_core::filtering::FilterMode;
use bifid_core::harness::{assemble_metadata, run_instance, MetadataTable};
use bifid_core::pipeline::{
    command_pipeline, command_report, decide_all, filter_table, read_decisions, write_decisions, write_filtered,
    BudgetGrid, FilterConfig, PairSelection, RunConfig, SelectorMode, ThetaSetting, SEED_ENV,
};
use bifid_core::sampling::{build_nested_design, read_plan, write_plan};
use bifid_core::selector::RuleConfig;
use bifid_core::surrogates::{model_to_json, train_cokriging, train_kriging, SurrogateModel, TrainerConfig};
use bifid_core::testbed::{find_pair, list_literature_pairs, Fidelity, FunctionPair};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "bifid", version, about = "Bi-fidelity surrogate benchmarking and model selection")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Function-pair catalogue.
    Pairs {
        #[command(subcommand)]
        action: PairsAction,
    },
    /// Build a nested maximin Latin hypercube plan.
    Plan {
        #[arg(long)]
        n_low: usize,
        #[arg(long)]
        n_high: usize,
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train a surrogate on a pair sampled at a plan and print it as JSON.
    Fit {
        #[arg(long, value_enum)]
        model: ModelArg,
        #[arg(long)]
        pair: String,
        #[arg(long)]
        plan: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the instance grid and write the metadata table.
    Run {
        /// Comma-separated pair ids, or `all`.
        #[arg(long, default_value = "all")]
        pairs: String,
        #[arg(long, value_enum, default_value_t = GridArg::Paper)]
        grid: GridArg,
        /// Absolute `n_h:n_l` budgets for `--grid custom`, comma-separated.
        #[arg(long)]
        budgets: Option<String>,
        #[arg(long, default_value_t = 40)]
        reps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sample features of a pair on the high-fidelity points of a plan.
    Features {
        #[arg(long)]
        pair: String,
        #[arg(long)]
        plan: PathBuf,
    },
    /// Filter a metadata table into a dissimilar or critical suite.
    Filter {
        #[arg(long)]
        metadata: PathBuf,
        /// `auto` or a number.
        #[arg(long, default_value = "auto")]
        theta: String,
        #[arg(long, default_value = "critical")]
        mode: FilterMode,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Project instances to the 2D instance space.
    Project {
        #[arg(long)]
        features: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Choose a model per instance.
    Select {
        #[arg(long, default_value = "rules")]
        mode: SelectorMode,
        #[arg(long)]
        features: PathBuf,
        /// Co-Kriging threshold on the high-correlation proportion.
        #[arg(long, default_value_t = RuleConfig::default().lcc_095_threshold)]
        lcc_threshold: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Summarize labels and selector quality.
    Report {
        #[arg(long)]
        metadata: PathBuf,
        #[arg(long)]
        decisions: PathBuf,
        #[arg(long, default_value = "rules")]
        mode: SelectorMode,
    },
    /// Run the whole study from a config file.
    Pipeline {
        config: PathBuf,
        /// Overrides the config's output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum PairsAction {
    List,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Kriging,
    Cokriging,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum GridArg {
    Paper,
    Custom,
}

/// Failure carrying the process exit status: 1 for bad input or config, 2
/// when some instances failed but the rest were written.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(std::io::BufWriter::new(
            std::fs::File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn read_table(path: &Path) -> Result<MetadataTable> {
    let f = std::fs::File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    Ok(MetadataTable::read_csv(std::io::BufReader::new(f))?)
}

fn seed_override() -> Option<String> {
    std::env::var(SEED_ENV).ok()
}

fn evaluate(pair: &FunctionPair, fid: Fidelity, unit: &[Vec<f64>]) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
    let x: Vec<Vec<f64>> = unit.iter().map(|u| pair.domain().from_unit(u)).collect();
    let y = x.iter().map(|p| pair.evaluate(fid, p)).collect::<std::result::Result<_, _>>()?;
    Ok((x, y))
}

fn check_dim(pair: &FunctionPair, plan_dim: usize) -> Result<()> {
    if pair.dim() != plan_dim {
        bail!("pair `{}` is {}-dimensional but the plan is {plan_dim}-dimensional", pair.id(), pair.dim());
    }
    Ok(())
}

fn parse_budgets(text: &str) -> Result<Vec<(usize, usize)>> {
    text.split(',')
        .map(|b| {
            let (h, l) = b.trim().split_once(':').with_context(|| format!("budget `{b}` is not n_h:n_l"))?;
            Ok((h.trim().parse()?, l.trim().parse()?))
        })
        .collect()
}

fn run(cli: Cli) -> std::result::Result<(), Failure> {
    let fail = |error: anyhow::Error| Failure { code: 1, error };
    match cli.command {
        Command::Pairs { action: PairsAction::List } => {
            println!("{:<14} {:>3}  source", "id", "d");
            for p in list_literature_pairs() {
                println!("{:<14} {:>3}  {}", p.id(), p.dim(), p.source());
            }
            Ok(())
        }
        Command::Plan { n_low, n_high, dim, seed, out } => (|| {
            let design = build_nested_design(n_high, n_low, dim, seed)?;
            write_plan(&out, &design)?;
            eprintln!("plan written to {} (min distance {:.6})", out.display(), design.plan().min_distance());
            Ok(())
        })()
        .map_err(fail),
        Command::Fit { model, pair, plan, seed, out } => (|| {
            let pair = find_pair(&pair)?;
            let design = read_plan(&plan)?;
            check_dim(&pair, design.plan().dim())?;
            let (xh, yh) = evaluate(&pair, Fidelity::High, &design.high_points())?;
            let cfg = TrainerConfig::default();
            let m = match model {
                ModelArg::Kriging => SurrogateModel::Kriging(train_kriging(pair.domain(), &xh, &yh, &cfg, seed)?),
                ModelArg::Cokriging => {
                    let (xl, yl) = evaluate(&pair, Fidelity::Low, &design.low_points())?;
                    SurrogateModel::CoKriging(train_cokriging(pair.domain(), &xh, &yh, &xl, &yl, &cfg, seed)?)
                }
            };
            writeln!(sink(out.as_deref())?, "{}", model_to_json(&m))?;
            Ok(())
        })()
        .map_err(fail),
        Command::Run { pairs, grid, budgets, reps, seed, jobs, out } => {
            let cfg = (|| {
                let grid = match (grid, budgets) {
                    (GridArg::Paper, None) => BudgetGrid::Paper,
                    (GridArg::Custom, Some(b)) => BudgetGrid::Absolute { budgets: parse_budgets(&b)? },
                    (GridArg::Paper, Some(_)) => bail!("--budgets needs --grid custom"),
                    (GridArg::Custom, None) => bail!("--grid custom needs --budgets"),
                };
                let pairs = if pairs == "all" {
                    PairSelection::Keyword(pairs)
                } else {
                    PairSelection::List(pairs.split(',').map(|s| s.trim().to_string()).collect())
                };
                let mut cfg = RunConfig {
                    pairs,
                    disturbance: vec![],
                    grid,
                    repetitions: reps,
                    seed,
                    trainer: TrainerConfig::default(),
                    filter: FilterConfig::default(),
                    rules: RuleConfig::default(),
                    out: out.clone(),
                    jobs,
                };
                cfg.apply_seed_override(seed_override().as_deref())?;
                cfg.validate()?;
                Ok(cfg)
            })()
            .map_err(fail)?;
            let (results, failed) = (|| {
                let instances = cfg.instances()?;
                let pool = rayon::ThreadPoolBuilder::new().num_threads(cfg.jobs.unwrap_or(0)).build()?;
                let outcomes: Vec<_> = pool.install(|| {
                    use rayon::prelude::*;
                    instances.par_iter().map(|(pair, spec)| (spec.instance_id(), run_instance(spec, pair, &cfg.trainer))).collect()
                });
                let mut results = Vec::new();
                let mut failed = 0;
                for (id, o) in outcomes {
                    match o {
                        Ok(r) => results.push(r),
                        Err(e) => {
                            eprintln!("instance {id} failed: {e}");
                            failed += 1;
                        }
                    }
                }
                let (table, _) = assemble_metadata(&results, &feature_ids())?;
                table.write_csv(sink(Some(&out))?)?;
                Ok((results.len(), failed))
            })()
            .map_err(fail)?;
            eprintln!("{results} instances written to {}", out.display());
            if failed > 0 {
                return Err(Failure { code: 2, error: anyhow::anyhow!("{failed} instances failed") });
            }
            Ok(())
        }
        Command::Features { pair, plan } => (|| {
            let pair = find_pair(&pair)?;
            let design = read_plan(&plan)?;
            check_dim(&pair, design.plan().dim())?;
            let unit = design.high_points();
            let (_, yh) = evaluate(&pair, Fidelity::High, &unit)?;
            let (_, yl) = evaluate(&pair, Fidelity::Low, &unit)?;
            let f = sample_features(&unit, &yl, &yh, design.n_low())?;
            println!("feature,value");
            for id in feature_ids() {
                match f.get(&id).copied().flatten() {
                    Some(v) => println!("{id},{v:?}"),
                    None => println!("{id},NA"),
                }
            }
            Ok(())
        })()
        .map_err(fail),
        Command::Filter { metadata, theta, mode, out } => (|| {
            let table = read_table(&metadata)?;
            let theta = match theta.as_str() {
                "auto" => ThetaSetting::Keyword(theta),
                v => ThetaSetting::Value(v.parse().with_context(|| format!("theta `{v}` is not `auto` or a number"))?),
            };
            let result = filter_table(&table, &FilterConfig { mode, theta, theta_grid: None })?;
            write_filtered(&table, &result, mode, sink(out.as_deref())?)?;
            eprintln!("theta {:?}: kept {} of {}", result.theta, result.retained.len(), table.rows.len());
            Ok(())
        })()
        .map_err(fail),
        Command::Project { features, out } => (|| {
            let table = read_table(&features)?;
            let (rows, _) = decide_all(&table, &RuleConfig::default())?;
            let mut w = sink(out.as_deref())?;
            writeln!(w, "instance_id,z1,z2")?;
            for r in rows {
                writeln!(w, "{},{:?},{:?}", r.instance_id, r.z1, r.z2)?;
            }
            Ok(())
        })()
        .map_err(fail),
        Command::Select { mode, features, lcc_threshold, out } => (|| {
            let table = read_table(&features)?;
            let (rows, classifier) = decide_all(&table, &RuleConfig { lcc_095_threshold: lcc_threshold })?;
            if mode == SelectorMode::Classifier && classifier.is_none() && !rows.is_empty() {
                bail!("too few instances to train the classifier");
            }
            if mode == SelectorMode::Rules {
                write_decisions(&rows, sink(out.as_deref())?)?;
                return Ok(());
            }
            let mut w = sink(out.as_deref())?;
            writeln!(w, "instance_id,choice,rule_fired")?;
            for r in rows {
                let (choice, fired) = match mode {
                    SelectorMode::CcBaseline => (r.cc_baseline, "cc_baseline"),
                    _ => (r.classifier, "classifier"),
                };
                let choice = choice.map_or("NA", |c| c.as_str());
                writeln!(w, "{},{choice},{fired}", r.instance_id)?;
            }
            Ok(())
        })()
        .map_err(fail),
        Command::Report { metadata, decisions, mode } => (|| {
            let table = read_table(&metadata)?;
            let f = std::fs::File::open(&decisions).with_context(|| format!("cannot open {}", decisions.display()))?;
            let rows = read_decisions(std::io::BufReader::new(f))?;
            let rep = command_report(&table, &rows, mode)?;
            println!("instances {}  decided {}", rep.instances, rep.decided);
            println!("{:<10} {:>8} {:>9} {:>10} {:>7}", "model", "Pr(good)", "accuracy", "precision", "recall");
            for (name, s) in [("kriging", rep.kriging), ("cokriging", rep.cokriging)] {
                if let Some(s) = s {
                    println!("{name:<10} {:>8.3} {:>9.3} {:>10.3} {:>7.3}", s.pr_good, s.accuracy, s.precision, s.recall);
                }
            }
            if let Some(a) = rep.selection_accuracy {
                println!("selected model good: {a:.3}");
            }
            Ok(())
        })()
        .map_err(fail),
        Command::Pipeline { config, out } => {
            let (cfg, dir) = (|| {
                let mut cfg = RunConfig::load(&config).map_err(|e| anyhow::Error::new(e).context(config.display().to_string()))?;
                cfg.apply_seed_override(seed_override().as_deref())?;
                let base = config.parent().unwrap_or(Path::new("."));
                let dir = out.clone().unwrap_or_else(|| base.join(&cfg.out));
                Ok((cfg, dir))
            })()
            .map_err(fail)?;
            let outcome = command_pipeline(&cfg, &dir).map_err(|e| fail(e.into()))?;
            eprintln!(
                "{} instances, theta {:?}, {} retained; artifacts in {}",
                outcome.table.rows.len(),
                outcome.filter.theta,
                outcome.filter.retained.len(),
                dir.display()
            );
            match outcome.exit_code() {
                0 => Ok(()),
                c => Err(Failure {
                    code: c as u8,
                    error: anyhow::anyhow!("{} instances failed", outcome.manifest.failed_instances.len()),
                }),
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
