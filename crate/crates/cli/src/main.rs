//! `evifuse` command-line front end.

mod tables;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use evifuse::clustering::{cluster_distances, default_k, DEFAULT_MAX_ITER, DEFAULT_RESTARTS};
use evifuse::combination::{combine_n, mixed};
use evifuse::experiment::{fmt_sig, run_experiment, DecisionSource, ExperimentConfig, Mode};
use evifuse::generators::{gen_consistent, gen_dependent, gen_independent, Decision};
use evifuse::independence::{multi_source_independence, IndependenceOptions, MultiSourceReport};
use evifuse::io::{mass_to_json, masses_from_json, stream_from_json, stream_to_json};
use evifuse::metrics::pairwise_distances;
use evifuse::{canonical_decompose, jousselme_distance, Frame, MassFunction, Rule};
use serde_json::{json, Value};

#[derive(Debug, Parser)]
#[command(name = "evifuse", version, about = "Combine belief functions from partially independent sources")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Combine mass functions with one rule and print the result as JSON.
    Combine(CombineArgs),
    /// Print the canonical weights of a nondogmatic mass function.
    Decompose {
        file: PathBuf,
    },
    /// Cluster a stream of mass functions; prints `object,cluster` CSV.
    Cluster {
        stream: PathBuf,
        #[command(flatten)]
        clustering: ClusteringArgs,
    },
    /// Estimate how independent two or more sources are.
    Independence(IndependenceArgs),
    /// Generate a random stream of mass functions.
    Generate(GenerateArgs),
    /// Jousselme distance from the mixed rule to the classical rules over a γ grid.
    DistanceCurve(DistanceCurveArgs),
    /// Run the Monte-Carlo independence experiment.
    Experiment(ExperimentArgs),
    /// Regenerate the two-source combination table.
    TableCombination,
    /// Regenerate the two-source independence table.
    TableTwoSources(TableRunArgs),
    /// Regenerate the three-source independence tables.
    TableThreeSources(TableRunArgs),
    /// Regenerate the mixed-combination table for estimated degrees.
    TableMixed {
        /// Independence degrees to tabulate.
        #[arg(long, value_delimiter = ',', default_values_t = [0.68, 0.34])]
        gamma: Vec<f64>,
    },
}

#[derive(Debug, Args)]
struct CombineArgs {
    /// conjunctive, disjunctive, dempster, yager, dubois_prade, mean, cautious,
    /// mixed or mixed(γ).
    #[arg(long)]
    rule: String,
    /// Independence degree for the mixed rule.
    #[arg(long)]
    gamma: Option<f64>,
    /// Discount dogmatic inputs by this rate before the cautious or mixed rule.
    #[arg(long, value_name = "EPS", num_args = 0..=1, require_equals = true, default_missing_value = "1e-6")]
    discount_dogmatic: Option<f64>,
    /// Files holding one mass function or an array of them.
    #[arg(required = true)]
    files: Vec<PathBuf>,
}

#[derive(Debug, Args)]
struct ClusteringArgs {
    /// Number of clusters; defaults to the frame size.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_MAX_ITER)]
    max_iter: usize,
    /// Seeded starts; the partition with the smallest spread is kept.
    #[arg(long, default_value_t = DEFAULT_RESTARTS)]
    restarts: usize,
}

#[derive(Debug, Args)]
struct IndependenceArgs {
    /// Stream files, one per source, in the same object order.
    #[arg(required = true, num_args = 2..)]
    streams: Vec<PathBuf>,
    #[command(flatten)]
    clustering: ClusteringArgs,
    /// Derive a separate clustering seed for every source.
    #[arg(long)]
    per_source_seeds: bool,
    /// Include similarity matrices, matchings and cluster masses.
    #[arg(long)]
    detail: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum GenMode {
    Independent,
    Consistent,
    Dependent,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    mode: GenMode,
    /// Frame size; hypotheses are named w1..wN.
    #[arg(long, default_value_t = 5)]
    omega: usize,
    /// Stream length; defaults to 100, or to the number of decisions.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// JSON array of decisions (dependent mode), e.g. ["w1", "w2|w3"].
    #[arg(long)]
    decisions: Option<PathBuf>,
    /// Write the anchors of a consistent stream here, in the decisions format.
    #[arg(long)]
    decisions_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct DistanceCurveArgs {
    #[arg(required = true, num_args = 2..)]
    files: Vec<PathBuf>,
    /// Values of γ; defaults to 0, 0.1, ..., 1.
    #[arg(long, value_delimiter = ',')]
    gamma: Vec<f64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Independent,
    Dependent,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Independent => Mode::Independent,
            ModeArg::Dependent => Mode::Dependent,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DecisionArg {
    Anchors,
    Pignistic,
}

#[derive(Debug, Args)]
struct ExperimentArgs {
    #[arg(long, value_enum)]
    mode: ModeArg,
    #[arg(long, default_value_t = 2)]
    sources: usize,
    #[command(flatten)]
    run: TableRunArgs,
    /// Where dependent sources take the first source's decisions from.
    #[arg(long, value_enum, default_value_t = DecisionArg::Anchors)]
    decisions: DecisionArg,
    /// Also write one CSV row per trial and source pair to this file.
    #[arg(long)]
    per_trial: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
struct TableRunArgs {
    #[arg(long, default_value_t = 5)]
    omega: usize,
    /// Mass functions per source.
    #[arg(long, default_value_t = 100)]
    n: usize,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    /// Clusters per source; defaults to the frame size.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value_t = 2024)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_RESTARTS)]
    restarts: usize,
}

impl TableRunArgs {
    fn config(&self, mode: Mode, n_sources: usize) -> ExperimentConfig {
        let mut config = ExperimentConfig::standard(mode, n_sources, self.seed);
        config.omega_size = self.omega;
        config.n_masses = self.n;
        config.n_trials = self.trials;
        config.k = self.k;
        config.restarts = self.restarts;
        config
    }
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Domain(evifuse::Error),
}

impl From<evifuse::Error> for Failure {
    fn from(e: evifuse::Error) -> Self {
        Failure::Domain(e)
    }
}

type Outcome = Result<String, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))
}

fn read_masses(files: &[PathBuf]) -> Result<Vec<MassFunction>, Failure> {
    let mut out = Vec::new();
    for f in files {
        out.extend(masses_from_json(&read(f)?)?);
    }
    Ok(out)
}

fn parse_rule(text: &str, gamma: Option<f64>) -> Result<Rule, Failure> {
    let rule = match (text, gamma) {
        ("mixed", Some(g)) => Rule::Mixed(g),
        ("mixed", None) => return Err(usage("the mixed rule needs --gamma")),
        (_, Some(_)) if !text.starts_with("mixed") => return Err(usage(format!("--gamma does not apply to {text}"))),
        (_, Some(_)) => return Err(usage("give γ either in the rule name or with --gamma")),
        (_, None) => text.parse::<Rule>().map_err(|e| usage(e.to_string()))?,
    };
    if let Rule::Mixed(g) = rule {
        if !(0.0..=1.0).contains(&g) {
            return Err(Failure::Domain(evifuse::Error::OutOfUnitInterval { name: "gamma", value: g }));
        }
    }
    Ok(rule)
}

fn combine(args: CombineArgs) -> Outcome {
    let rule = parse_rule(&args.rule, args.gamma)?;
    let mut ms = read_masses(&args.files)?;
    if ms.len() < 2 {
        return Err(usage("combine needs at least two mass functions"));
    }
    if let (Some(eps), Rule::Cautious | Rule::Mixed(_)) = (args.discount_dogmatic, rule) {
        for m in ms.iter_mut().filter(|m| m.is_dogmatic()) {
            *m = m.discount(1.0 - eps)?;
        }
    }
    Ok(mass_to_json(&combine_n(rule, &ms)?))
}

fn decompose(file: &Path) -> Outcome {
    let ms = masses_from_json(&read(file)?)?;
    let [m] = ms.as_slice() else {
        return Err(usage("decompose takes exactly one mass function"));
    };
    let w = canonical_decompose(m)?;
    let weights: serde_json::Map<String, Value> =
        w.entries().map(|(s, x)| (m.frame().format_subset(s), json!(x))).collect();
    Ok(pretty(&json!({ "frame": m.frame(), "weights": weights })))
}

fn cluster(stream: &Path, args: &ClusteringArgs) -> Outcome {
    let ms = stream_from_json(&read(stream)?)?;
    let frame = ms.first().ok_or_else(|| usage("the stream is empty"))?.frame();
    let k = args.k.unwrap_or_else(|| default_k(frame));
    let distances = pairwise_distances(&ms)?;
    let partition = cluster_distances(&distances, k, args.seed, args.max_iter, args.restarts)?;
    Ok(partition.to_csv())
}

fn independence(args: IndependenceArgs) -> Outcome {
    let streams = args
        .streams
        .iter()
        .map(|p| Ok(stream_from_json(&read(p)?)?))
        .collect::<Result<Vec<_>, Failure>>()?;
    let mut options = IndependenceOptions::new(args.clustering.seed);
    options.k = args.clustering.k;
    options.max_iter = args.clustering.max_iter;
    options.restarts = args.clustering.restarts;
    options.shared_seed = !args.per_source_seeds;
    let report = multi_source_independence(&streams, &options)?;
    Ok(pretty(&report_json(&report, args.detail)))
}

fn decision(independent: bool) -> &'static str {
    if independent {
        "independent"
    } else {
        "dependent"
    }
}

fn report_json(report: &MultiSourceReport, detail: bool) -> Value {
    let pairs: Vec<Value> = report
        .pairs
        .iter()
        .map(|p| {
            let r = &p.report;
            let mut row = json!({
                "first": p.first + 1,
                "second": p.second + 1,
                "id_forward": r.first.independence,
                "idbar_forward": r.first.dependence,
                "id_backward": r.second.independence,
                "idbar_backward": r.second.dependence,
                "independence": r.overall,
                "decision": decision(r.is_independent()),
            });
            if detail {
                row["detail"] = json!(r);
            }
            row
        })
        .collect();
    json!({ "gamma": report.gamma, "decision": decision(report.gamma > 0.5), "pairs": pairs })
}

fn parse_decisions(frame: &Frame, text: &str) -> Result<Vec<Decision>, Failure> {
    let labels: Vec<String> =
        serde_json::from_str(text).map_err(|e| evifuse::Error::Parse(format!("decisions: {e}")))?;
    Ok(labels.iter().map(|l| frame.parse_subset(l)).collect::<evifuse::Result<_>>()?)
}

fn generate(args: GenerateArgs) -> Outcome {
    let frame = Arc::new(Frame::with_size(args.omega)?);
    let n = args.n.unwrap_or(100);
    match (args.mode, &args.decisions) {
        (GenMode::Dependent, None) => return Err(usage("dependent mode needs --decisions")),
        (GenMode::Independent | GenMode::Consistent, Some(_)) => {
            return Err(usage("--decisions only applies to dependent mode"))
        }
        _ => {}
    }
    if args.decisions_out.is_some() && !matches!(args.mode, GenMode::Consistent) {
        return Err(usage("--decisions-out only applies to consistent mode"));
    }
    let stream = match args.mode {
        GenMode::Independent => gen_independent(frame, n, args.seed),
        GenMode::Consistent => {
            let (ms, anchors) = gen_consistent(frame.clone(), n, args.seed);
            if let Some(path) = &args.decisions_out {
                let labels: Vec<String> = anchors.iter().map(|&a| frame.format_subset(a)).collect();
                write(path, &pretty(&json!(labels)))?;
            }
            ms
        }
        GenMode::Dependent => {
            let decisions = parse_decisions(&frame, &read(args.decisions.as_deref().unwrap())?)?;
            let n = args.n.unwrap_or(decisions.len());
            gen_dependent(frame, n, &decisions, args.seed)?
        }
    };
    Ok(stream_to_json(&stream))
}

const CURVE_RULES: [(&str, Rule); 6] = [
    ("conjunctive", Rule::Conjunctive),
    ("dempster", Rule::Dempster),
    ("yager", Rule::Yager),
    ("disjunctive", Rule::Disjunctive),
    ("cautious", Rule::Cautious),
    ("mean", Rule::Mean),
];

fn distance_curve(args: DistanceCurveArgs) -> Outcome {
    let ms = read_masses(&args.files)?;
    let grid = if args.gamma.is_empty() { (0..=10).map(|i| i as f64 / 10.0).collect() } else { args.gamma };
    let references = CURVE_RULES.iter().map(|&(_, r)| combine_n(r, &ms)).collect::<evifuse::Result<Vec<_>>>()?;
    let mut out = String::from("gamma");
    for (name, _) in CURVE_RULES {
        let _ = write!(out, ",{name}");
    }
    out.push('\n');
    for gamma in grid {
        let fused = mixed(&ms, gamma)?;
        out.push_str(&fmt_sig(gamma));
        for r in &references {
            let _ = write!(out, ",{}", fmt_sig(jousselme_distance(&fused, r)?));
        }
        out.push('\n');
    }
    Ok(out)
}

fn experiment(args: ExperimentArgs) -> Outcome {
    let mut config = args.run.config(args.mode.into(), args.sources);
    config.decisions = match args.decisions {
        DecisionArg::Anchors => DecisionSource::Anchors,
        DecisionArg::Pignistic => DecisionSource::Pignistic,
    };
    let result = run_experiment(&config)?;
    if let Some(path) = &args.per_trial {
        write(path, &result.trials_csv())?;
    }
    Ok(result.summary_csv())
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("JSON values serialize") + "\n"
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Combine(args) => combine(args),
        Command::Decompose { file } => decompose(&file),
        Command::Cluster { stream, clustering } => cluster(&stream, &clustering),
        Command::Independence(args) => independence(args),
        Command::Generate(args) => generate(args),
        Command::DistanceCurve(args) => distance_curve(args),
        Command::Experiment(args) => experiment(args),
        Command::TableCombination => Ok(tables::combination()?),
        Command::TableTwoSources(args) => Ok(tables::sources(&args, 2)?),
        Command::TableThreeSources(args) => Ok(tables::sources(&args, 3)?),
        Command::TableMixed { gamma } => Ok(tables::mixed_table(&gamma)?),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(text) => {
            print!("{text}");
            if !text.is_empty() && !text.ends_with('\n') {
                println!();
            }
            ExitCode::SUCCESS
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Domain(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
