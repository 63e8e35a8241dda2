//! Command-line front end.
//!
//! Every subcommand writes into its own output directory using fixed file
//! names and leaves a `manifest.json` holding the fully resolved command.
//! `replay --manifest <dir>/manifest.json --out <new dir>` re-runs it; with a
//! single worker the outputs are byte-identical.

use std::fs::{self, File};
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::generate::{self, GenerationConfig, MatchProfile, Saturation};
use crate::io::{self, AnalysisReport, CyclePolicy, DotOptions, EdgeListLoad, IdFormat, ReadOptions};
use crate::metrics::{self, AnalysisOptions};
use crate::theory;

pub const MANIFEST_FILE: &str = "manifest.json";
pub const GRAPH_FILE: &str = "graph.edges";
pub const ITERATIONS_FILE: &str = "iterations.json";
pub const REPORT_FILE: &str = "report.json";
pub const DOT_FILE: &str = "graph.dot";
pub const MATCHED_FILE: &str = "matched.edges";

#[derive(Debug, Parser)]
#[command(name = "dagcollapse", version, about = "Generate random DAGs and measure how collapsed they are")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Generate a random DAG and write it as an edge list.
    Generate(GenerateArgs),
    /// Summary statistics, degree/depth/RRL histograms and collapse verdict.
    Analyze(AnalyzeArgs),
    /// Compare a graph with another graph or with its matched-random counterpart.
    Compare(CompareArgs),
    /// Run a Monte Carlo or closed-form check of the collapse theory.
    Verify(VerifyArgs),
    /// Export a graph as a Graphviz DOT file.
    ExportDot(ExportDotArgs),
    /// Re-run the command recorded in a manifest.
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    /// Complete binary tree plus iterated depth-ordered random edges.
    TreeCollapse,
    /// Random rank order plus uniformly drawn rank-ordered pairs.
    RankRandom,
    /// Rank-ordered generation matching a profile's counts.
    Matched,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct GenerateArgs {
    #[arg(long, value_enum)]
    pub model: Model,
    /// Node count (tree-collapse, rank-random).
    #[arg(long)]
    pub nodes: Option<usize>,
    /// Edge count (rank-random).
    #[arg(long)]
    pub edges: Option<usize>,
    /// Insertion iterations (tree-collapse).
    #[arg(long, default_value_t = 4)]
    pub iterations: usize,
    /// Per-iteration budget is ceil(n(1+epsilon)); defaults to log2(n) - 1.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Duplicate draws tolerated per edge before it is skipped (tree-collapse).
    #[arg(long, default_value_t = 64)]
    pub max_resample_attempts: u32,
    /// Fail instead of skipping when the budget exceeds the free legal pairs.
    #[arg(long)]
    pub strict_budget: bool,
    /// JSON match profile {node_count, edge_count, root_count, leaf_count} (matched).
    #[arg(long)]
    pub profile: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct InputArgs {
    /// Edge-list file.
    #[arg(long)]
    pub input: PathBuf,
    /// Treat tokens as labels rather than integer ids.
    #[arg(long)]
    pub labeled: bool,
    /// Drop back edges instead of failing on cycles.
    #[arg(long)]
    pub lenient: bool,
    /// Node count for integer ids (default: largest id + 1).
    #[arg(long)]
    pub nodes: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct WalkArgs {
    /// Random root-to-leaf walks to sample.
    #[arg(long, default_value_t = 100_000)]
    pub walks: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Walks strictly shorter than beta count as short.
    #[arg(long, default_value_t = metrics::DEFAULT_BETA)]
    pub beta: u64,
    /// Share of short walks needed for a collapsed verdict.
    #[arg(long, default_value_t = metrics::DEFAULT_THRESHOLD)]
    pub threshold: f64,
    /// Sampling threads; results are reproducible for a fixed count.
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
}

impl WalkArgs {
    fn options(&self) -> AnalysisOptions {
        AnalysisOptions {
            walks: self.walks,
            seed: self.seed,
            beta: self.beta,
            threshold: self.threshold,
            workers: self.workers,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Name used in the report (default: input file stem).
    #[arg(long)]
    pub name: Option<String>,
    #[command(flatten)]
    pub walk: WalkArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Against {
    MatchedRandom,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct CompareArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Second edge-list file (same id format and cycle policy).
    #[arg(long)]
    pub other: Option<PathBuf>,
    /// Generate the counterpart instead of reading a second file.
    #[arg(long, value_enum)]
    pub against: Option<Against>,
    /// Seed for the generated counterpart.
    #[arg(long, default_value_t = 0)]
    pub match_seed: u64,
    /// Relative difference above which a scalar is flagged.
    #[arg(long, default_value_t = metrics::DEFAULT_MISMATCH_TOLERANCE)]
    pub tolerance: f64,
    #[command(flatten)]
    pub walk: WalkArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct VerifyArgs {
    #[command(subcommand)]
    pub experiment: Experiment,
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    /// Depth of a uniformly drawn shallower source.
    Lemma1 {
        /// Depth of the complete tree and of the conditioned target.
        #[arg(long, default_value_t = 15)]
        depth: u32,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Never-selected targets under uniform target draws.
    Selection {
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 0.0)]
        epsilon: f64,
        #[arg(long, default_value_t = 200)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Union and Chernoff bound curves.
    Bounds {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        epsilon: f64,
        #[arg(long, value_delimiter = ',', default_value = "1,2,4,8,16,32,64")]
        gammas: Vec<u64>,
        #[arg(long, value_delimiter = ',', default_value = "0,0.5,1,2,4,8")]
        deltas: Vec<f64>,
    },
    /// Depth collapse of tree-seeded generation over several seeds.
    Collapse {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 4)]
        iterations: usize,
        /// Defaults to log2(n) - 1.
        #[arg(long)]
        epsilon: Option<f64>,
        /// Number of seeds, run as seed-base, seed-base + 1, ...
        #[arg(long, default_value_t = 30)]
        seeds: u64,
        #[arg(long, default_value_t = 0)]
        seed_base: u64,
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct ExportDotArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Refuse graphs with more nodes than this.
    #[arg(long, default_value_t = io::DEFAULT_DOT_CAP)]
    pub cap: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct ReplayArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

/// Record of one run, written next to its outputs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub command: Command,
    pub seeds: Vec<u64>,
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<String>,
    pub tool_version: String,
    pub duration_secs: f64,
}

/// Bad flag combination detected after parsing.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(pub String);

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        Self {
            name: name.to_string(),
            passed,
            detail,
        }
    }
}

/// JSON report of a `verify` run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema_version: u32,
    pub tool_version: String,
    pub experiment: String,
    pub result: serde_json::Value,
    pub checks: Vec<Check>,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub out_dir: PathBuf,
    pub outputs: Vec<String>,
    pub checks: Vec<Check>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Binary entry point; returns the process exit code.
pub fn main() -> i32 {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(outcome) => {
            for check in &outcome.checks {
                let status = if check.passed { "PASS" } else { "FAIL" };
                println!("{status} {}: {}", check.name, check.detail);
            }
            println!("wrote {} file(s) to {}", outcome.outputs.len() + 1, outcome.out_dir.display());
            if outcome.passed() {
                0
            } else {
                1
            }
        }
        Err(err) if err.is::<UsageError>() => {
            eprintln!("usage error: {err}");
            2
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            1
        }
    }
}

/// Runs a command and writes its outputs and manifest.
pub fn run(command: Command) -> anyhow::Result<Outcome> {
    if let Command::Replay(args) = &command {
        let text = fs::read_to_string(&args.manifest)
            .with_context(|| format!("reading {}", args.manifest.display()))?;
        let manifest: RunManifest = serde_json::from_str(&text)?;
        if matches!(manifest.command, Command::Replay(_)) {
            bail!(UsageError("manifest records a replay".into()));
        }
        return run(with_out_dir(manifest.command, args.out.clone()));
    }

    let command = resolve(command);
    let started = Instant::now();
    let out_dir = out_dir(&command).to_path_buf();
    fs::create_dir_all(&out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let mut run = Run {
        dir: out_dir.clone(),
        outputs: Vec::new(),
        checks: Vec::new(),
        seeds: Vec::new(),
        inputs: Vec::new(),
    };
    match &command {
        Command::Generate(args) => cmd_generate(args, &mut run)?,
        Command::Analyze(args) => cmd_analyze(args, &mut run)?,
        Command::Compare(args) => cmd_compare(args, &mut run)?,
        Command::Verify(args) => cmd_verify(args, &mut run)?,
        Command::ExportDot(args) => cmd_export_dot(args, &mut run)?,
        Command::Replay(_) => unreachable!(),
    }
    let manifest = RunManifest {
        subcommand: subcommand_name(&command).to_string(),
        seeds: run.seeds,
        inputs: run.inputs,
        outputs: run.outputs.clone(),
        tool_version: crate::TOOL_VERSION.to_string(),
        duration_secs: started.elapsed().as_secs_f64(),
        command,
    };
    fs::write(out_dir.join(MANIFEST_FILE), serde_json::to_string_pretty(&manifest)? + "\n")?;
    Ok(Outcome {
        out_dir,
        outputs: run.outputs,
        checks: run.checks,
    })
}

struct Run {
    dir: PathBuf,
    outputs: Vec<String>,
    checks: Vec<Check>,
    seeds: Vec<u64>,
    inputs: Vec<PathBuf>,
}

impl Run {
    fn write(&mut self, name: &str, contents: &str) -> anyhow::Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
        self.outputs.push(name.to_string());
        Ok(())
    }

    fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> anyhow::Result<()> {
        self.write(name, &(serde_json::to_string_pretty(value)? + "\n"))
    }
}

/// Fills in defaults derived from other flags so manifests record the values used.
fn resolve(mut command: Command) -> Command {
    match &mut command {
        Command::Generate(a) if a.model == Model::TreeCollapse => {
            if let (None, Some(n)) = (a.epsilon, a.nodes) {
                a.epsilon = Some(generate::default_epsilon(n));
            }
        }
        Command::Verify(VerifyArgs {
            experiment: Experiment::Collapse { n, epsilon, .. },
            ..
        }) => {
            epsilon.get_or_insert_with(|| generate::default_epsilon(*n));
        }
        _ => {}
    }
    command
}

fn subcommand_name(command: &Command) -> &'static str {
    match command {
        Command::Generate(_) => "generate",
        Command::Analyze(_) => "analyze",
        Command::Compare(_) => "compare",
        Command::Verify(_) => "verify",
        Command::ExportDot(_) => "export-dot",
        Command::Replay(_) => "replay",
    }
}

fn out_dir(command: &Command) -> &Path {
    match command {
        Command::Generate(a) => &a.out,
        Command::Analyze(a) => &a.out,
        Command::Compare(a) => &a.out,
        Command::Verify(a) => &a.out,
        Command::ExportDot(a) => &a.out,
        Command::Replay(a) => &a.out,
    }
}

fn with_out_dir(mut command: Command, dir: PathBuf) -> Command {
    match &mut command {
        Command::Generate(a) => a.out = dir,
        Command::Analyze(a) => a.out = dir,
        Command::Compare(a) => a.out = dir,
        Command::Verify(a) => a.out = dir,
        Command::ExportDot(a) => a.out = dir,
        Command::Replay(a) => a.out = dir,
    }
    command
}

fn load(input: &InputArgs, path: &Path) -> anyhow::Result<EdgeListLoad> {
    let options = ReadOptions {
        format: if input.labeled { IdFormat::Labeled } else { IdFormat::Integer },
        cycles: if input.lenient { CyclePolicy::Lenient } else { CyclePolicy::Strict },
        node_count: input.nodes,
    };
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    io::read_edge_list(BufReader::new(file), &options).with_context(|| format!("reading {}", path.display()))
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "graph".into())
}

fn cmd_generate(args: &GenerateArgs, run: &mut Run) -> anyhow::Result<()> {
    run.seeds.push(args.seed);
    let need = |v: Option<usize>, flag: &str| {
        v.ok_or_else(|| UsageError(format!("--{flag} is required for this model")))
    };
    match args.model {
        Model::TreeCollapse => {
            let n = need(args.nodes, "nodes")?;
            let config = GenerationConfig {
                n,
                iterations: args.iterations,
                epsilon: args.epsilon.unwrap_or_else(|| generate::default_epsilon(n)),
                seed: args.seed,
                max_resample_attempts: args.max_resample_attempts,
                saturation: if args.strict_budget { Saturation::Fail } else { Saturation::Skip },
            };
            let tree = generate::complete_binary_tree(n)?;
            let (dag, log) = generate::add_random_edges(&tree, &config)?;
            run.write(GRAPH_FILE, &io::write_edge_list(&dag))?;
            run.write_json(
                ITERATIONS_FILE,
                &serde_json::json!({ "config": config, "budget": config.budget(), "log": log }),
            )?;
        }
        Model::RankRandom => {
            let dag = generate::rank_random_dag(need(args.nodes, "nodes")?, need(args.edges, "edges")?, args.seed)?;
            run.write(GRAPH_FILE, &io::write_edge_list(&dag))?;
        }
        Model::Matched => {
            let path = args
                .profile
                .as_ref()
                .ok_or_else(|| UsageError("--profile is required for the matched model".into()))?;
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let profile: MatchProfile = serde_json::from_str(&text)?;
            run.inputs.push(path.clone());
            let dag = generate::matched_random(&profile, args.seed)?;
            run.write(GRAPH_FILE, &io::write_edge_list(&dag))?;
        }
    }
    Ok(())
}

fn write_histograms(run: &mut Run, prefix: &str, g: &metrics::GraphAnalysis) -> anyhow::Result<()> {
    for (name, hist) in [("in_degree", &g.in_degree), ("out_degree", &g.out_degree), ("depth", &g.depth), ("rrl", &g.rrl)] {
        run.write(&format!("{prefix}{name}.csv"), &io::write_histogram_csv(hist))?;
    }
    Ok(())
}

fn load_metadata(load: &EdgeListLoad) -> serde_json::Value {
    serde_json::json!({
        "records": load.records,
        "duplicates_dropped": load.duplicates_dropped,
        "back_edges_dropped": load.back_edges_dropped,
    })
}

fn cmd_analyze(args: &AnalyzeArgs, run: &mut Run) -> anyhow::Result<()> {
    run.seeds.push(args.walk.seed);
    run.inputs.push(args.input.input.clone());
    let loaded = load(&args.input, &args.input.input)?;
    let name = args.name.clone().unwrap_or_else(|| stem(&args.input.input));
    let analysis = metrics::analyze(&loaded.dag, &name, &args.walk.options())?;
    write_histograms(run, "", &analysis)?;
    run.checks.push(verdict_check(&analysis));
    let mut report = AnalysisReport::new(vec![analysis]);
    report.metadata.insert("input".into(), load_metadata(&loaded));
    report.metadata.insert("walks".into(), serde_json::to_value(args.walk.options())?);
    run.write(REPORT_FILE, &io::write_report(&report)?)?;
    Ok(())
}

fn verdict_check(g: &metrics::GraphAnalysis) -> Check {
    // informational: a verdict either way is a valid result
    Check::new(
        &format!("{} collapse verdict", g.summary.name),
        true,
        format!(
            "{} ({:.4} of walks shorter than {})",
            if g.verdict.collapsed { "collapsed" } else { "not collapsed" },
            g.verdict.fraction_below,
            g.verdict.beta
        ),
    )
}

fn cmd_compare(args: &CompareArgs, run: &mut Run) -> anyhow::Result<()> {
    run.seeds.push(args.walk.seed);
    run.inputs.push(args.input.input.clone());
    let real = load(&args.input, &args.input.input)?;
    let real_name = stem(&args.input.input);
    let (random_dag, random_name) = match (&args.other, args.against) {
        (Some(_), Some(_)) => bail!(UsageError("give either --other or --against, not both".into())),
        (None, None) => bail!(UsageError(
            "a second input (--other) or --against matched-random is required".into()
        )),
        (Some(path), None) => {
            run.inputs.push(path.clone());
            (load(&args.input, path)?.dag, stem(path))
        }
        (None, Some(Against::MatchedRandom)) => {
            run.seeds.push(args.match_seed);
            let dag = generate::matched_random(&generate::profile_of(&real.dag), args.match_seed)?;
            run.write(MATCHED_FILE, &io::write_edge_list(&dag))?;
            (dag, format!("{real_name}-rand"))
        }
    };
    let options = args.walk.options();
    let a = metrics::analyze(&real.dag, &real_name, &options)?;
    let b = metrics::analyze(&random_dag, &random_name, &options)?;
    let comparison = metrics::compare(&a, &b, args.tolerance);
    for d in comparison.flagged() {
        run.checks.push(Check::new(
            &format!("mismatch {}", d.name),
            true,
            format!("{} vs {} (relative difference {:.3})", d.real, d.random, d.relative),
        ));
    }
    write_histograms(run, "real_", &a)?;
    write_histograms(run, "random_", &b)?;
    let mut report = AnalysisReport::new(vec![a, b]);
    report.comparison = Some(comparison);
    report.metadata.insert("input".into(), load_metadata(&real));
    run.write(REPORT_FILE, &io::write_report(&report)?)?;
    Ok(())
}

fn cmd_export_dot(args: &ExportDotArgs, run: &mut Run) -> anyhow::Result<()> {
    run.inputs.push(args.input.input.clone());
    let loaded = load(&args.input, &args.input.input)?;
    let options = DotOptions {
        cap: args.cap,
        graph_name: "G",
        labels: loaded.labels.as_deref(),
    };
    run.write(DOT_FILE, &io::export_dot(&loaded.dag, &options)?)?;
    Ok(())
}

fn cmd_verify(args: &VerifyArgs, run: &mut Run) -> anyhow::Result<()> {
    let (name, result, checks) = match &args.experiment {
        Experiment::Lemma1 { depth, samples, seed } => {
            run.seeds.push(*seed);
            let nodes = 1usize
                .checked_shl(depth + 1)
                .filter(|_| *depth < 40)
                .ok_or_else(|| UsageError(format!("depth {depth} is too large")))?
                - 1;
            let tree = generate::complete_binary_tree(nodes)?;
            let r = theory::lemma1_trial(&tree, *depth, *samples, *seed)?;
            let diff = (r.empirical_probability - r.exact_probability).abs();
            let checks = vec![
                Check::new("within 4 standard errors", r.within_tolerance, format!("|{:.5} - {:.5}| = {diff:.5} <= {:.5}", r.empirical_probability, r.exact_probability, r.tolerance)),
                Check::new("within 0.01 of exact", diff <= 0.01, format!("{diff:.5}")),
            ];
            ("lemma1", serde_json::to_value(&r)?, checks)
        }
        Experiment::Selection { n, epsilon, trials, seed, workers } => {
            run.seeds.push(*seed);
            let r = theory::selection_trial(*n, *epsilon, *trials, *seed, *workers)?;
            let check = if r.predicted_mean >= 1.0 {
                let rel = (r.empirical_mean - r.predicted_mean).abs() / r.predicted_mean;
                Check::new("mean within 5% of prediction", rel <= 0.05, format!("{:.3} vs {:.3} ({:.2}%)", r.empirical_mean, r.predicted_mean, 100.0 * rel))
            } else {
                Check::new("mean at most 1", r.empirical_mean <= 1.0, format!("{:.4} (predicted {:.4})", r.empirical_mean, r.predicted_mean))
            };
            ("selection", serde_json::to_value(&r)?, vec![check])
        }
        Experiment::Bounds { n, epsilon, gammas, deltas } => {
            let c = theory::bound_curves(*n, *epsilon, gammas, deltas)?;
            let start = std::f64::consts::E * *n as f64 * (-(1.0 + epsilon)).exp();
            let mut union: Vec<_> = c.union.iter().filter(|p| p.x as f64 >= start).collect();
            union.sort_by_key(|p| p.x);
            let mut chernoff: Vec<_> = c.chernoff.iter().filter(|p| p.x > 0.0).collect();
            chernoff.sort_by(|a, b| a.x.total_cmp(&b.x));
            let checks = vec![
                Check::new("union bound decreasing in gamma", union.windows(2).all(|w| w[1].ln_value <= w[0].ln_value), format!("{} points with gamma >= {start:.3}", union.len())),
                Check::new("chernoff factor decreasing in delta", chernoff.windows(2).all(|w| w[1].ln_value <= w[0].ln_value), format!("{} points with delta > 0", chernoff.len())),
            ];
            ("bounds", serde_json::to_value(&c)?, checks)
        }
        Experiment::Collapse { n, iterations, epsilon, seeds, seed_base, workers } => {
            let seed_list: Vec<u64> = (*seed_base..seed_base + seeds).collect();
            run.seeds.extend(&seed_list);
            let eps = epsilon.unwrap_or_else(|| generate::default_epsilon(*n));
            let e = theory::collapse_experiment(*n, *iterations, eps, &seed_list, *workers)?;
            let checks = vec![
                Check::new("median exceptions within reference", e.median_exceptions <= e.exception_reference, format!("{} <= {:.2}", e.median_exceptions, e.exception_reference)),
                Check::new("every run has >= 95% of leaves at depth <= 2", e.min_shallow_leaf_fraction >= 0.95, format!("min {:.4}", e.min_shallow_leaf_fraction)),
                Check::new("depth never increases", e.traces.iter().all(|t| t.depth_monotone), format!("{} runs", e.traces.len())),
            ];
            ("collapse", serde_json::to_value(&e)?, checks)
        }
    };
    let report = ExperimentReport {
        schema_version: io::REPORT_SCHEMA_VERSION,
        tool_version: crate::TOOL_VERSION.to_string(),
        experiment: name.to_string(),
        result,
        checks: checks.clone(),
    };
    run.write_json(REPORT_FILE, &report)?;
    run.checks.extend(checks);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn parses_documented_invocations() {
        let cases: &[&[&str]] = &[
            &["generate", "--model", "rank-random", "--nodes", "1000", "--edges", "5000", "--seed", "7", "--out", "o"],
            &["generate", "--model", "tree-collapse", "--nodes", "1023", "--iterations", "4", "--seed", "1", "--out", "o"],
            &["generate", "--model", "matched", "--profile", "wordnet.json", "--seed", "3", "--out", "o"],
            &["verify", "lemma1", "--depth", "15", "--samples", "100000", "--seed", "2"],
            &["verify", "selection", "--n", "4096", "--epsilon", "0", "--trials", "200", "--seed", "2"],
            &["verify", "collapse", "--n", "1023", "--iterations", "4", "--seeds", "30"],
            &["verify", "bounds", "--n", "1024", "--epsilon", "9", "--gammas", "1,10"],
            &["compare", "--input", "a", "--against", "matched-random", "--match-seed", "3", "--out", "o"],
            &["export-dot", "--input", "a", "--out", "o"],
        ];
        for args in cases {
            let argv = std::iter::once("dagcollapse").chain(args.iter().copied());
            Cli::try_parse_from(argv).unwrap_or_else(|e| panic!("{args:?}: {e}"));
        }
    }

    #[test]
    fn derived_defaults_are_recorded() {
        let cli = Cli::try_parse_from(["dagcollapse", "generate", "--model", "tree-collapse", "--nodes", "8", "--out", "o"]).unwrap();
        match resolve(cli.command) {
            Command::Generate(a) => assert_eq!(a.epsilon, Some(2.0)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn manifest_command_round_trips() {
        let cli = Cli::try_parse_from(["dagcollapse", "verify", "--out", "x", "bounds", "--n", "8", "--epsilon", "1"]).unwrap();
        let json = serde_json::to_string(&cli.command).unwrap();
        let back: Command = serde_json::from_str(&json).unwrap();
        assert_eq!(back, cli.command);
    }
}
