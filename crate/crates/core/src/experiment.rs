//! Monte-Carlo runs of the independence estimator on generated sources.
//!
//! Every trial draws fresh streams for each source, estimates all pairwise
//! degrees and the overall degree, and records them. Trials use sub-seeds
//! `derive_seed(seed, [trial, source])` for generation and
//! `derive_seed(seed, [trial, CLUSTERING_STREAM])` for clustering, so any
//! single trial can be replayed on its own.

use std::fmt::Write as _;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::clustering::DEFAULT_RESTARTS;
use crate::error::{Error, Result};
use crate::frame::Frame;
use crate::generators::{decision_of, gen_consistent, gen_dependent, gen_independent, Decision};
use crate::independence::{multi_source_independence, IndependenceOptions, MultiSourceReport};
use crate::mass::MassFunction;
use crate::seed::derive_seed;

/// Path component reserved for clustering seeds.
const CLUSTERING_STREAM: u64 = u64::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Every source draws focal elements anywhere.
    Independent,
    /// Source 0 is consistent; the others are built on its decisions.
    Dependent,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "independent" => Ok(Mode::Independent),
            "dependent" => Ok(Mode::Dependent),
            other => Err(Error::Parse(format!("unknown mode {other:?}"))),
        }
    }
}

/// How dependent sources obtain the decisions of the first source.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DecisionSource {
    /// The anchor sets the consistent generator built around.
    #[default]
    Anchors,
    /// The pignistic decision of each of the first source's mass functions.
    Pignistic,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub omega_size: usize,
    pub n_masses: usize,
    pub n_trials: usize,
    /// Clusters per source; `None` uses `omega_size`.
    pub k: Option<usize>,
    pub seed: u64,
    pub mode: Mode,
    pub n_sources: usize,
    pub decisions: DecisionSource,
    /// Seeded clustering starts per source.
    pub restarts: usize,
}

impl ExperimentConfig {
    /// Frame of 5 hypotheses, 100 mass functions per source, 100 trials.
    pub fn standard(mode: Mode, n_sources: usize, seed: u64) -> Self {
        ExperimentConfig {
            omega_size: 5,
            n_masses: 100,
            n_trials: 100,
            k: None,
            seed,
            mode,
            n_sources,
            decisions: DecisionSource::Anchors,
            restarts: DEFAULT_RESTARTS,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let counts = [("omega_size", self.omega_size), ("n_masses", self.n_masses), ("n_trials", self.n_trials)];
        if let Some((name, _)) = counts.iter().find(|(_, v)| *v == 0) {
            return Err(Error::InvalidFrame(format!("{name} must be at least 1")));
        }
        if self.n_sources < 2 {
            return Err(Error::LengthMismatch("an experiment needs at least two sources".into()));
        }
        let k = self.k.unwrap_or(self.omega_size);
        if k == 0 || k > self.n_masses {
            return Err(Error::InvalidClusterCount(format!("k = {k} with {} mass functions", self.n_masses)));
        }
        Frame::with_size(self.omega_size).map(|_| ())
    }
}

/// Generates the streams of every source for one trial.
pub fn trial_streams(config: &ExperimentConfig, frame: &Arc<Frame>, trial: usize) -> Result<Vec<Vec<MassFunction>>> {
    let seed_of = |source: usize| derive_seed(config.seed, &[trial as u64, source as u64]);
    let n = config.n_masses;
    match config.mode {
        Mode::Independent => Ok((0..config.n_sources).map(|s| gen_independent(frame.clone(), n, seed_of(s))).collect()),
        Mode::Dependent => {
            let (leader, anchors) = gen_consistent(frame.clone(), n, seed_of(0));
            let decisions: Vec<Decision> = match config.decisions {
                DecisionSource::Anchors => anchors,
                DecisionSource::Pignistic => leader.iter().map(decision_of).collect::<Result<_>>()?,
            };
            let mut streams = vec![leader];
            for s in 1..config.n_sources {
                streams.push(gen_dependent(frame.clone(), n, &decisions, seed_of(s))?);
            }
            Ok(streams)
        }
    }
}

/// Directed and pairwise degrees of one source pair in one trial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairDegrees {
    pub first: usize,
    pub second: usize,
    /// `I_d(first, second)`.
    pub forward: f64,
    /// `I_d(second, first)`.
    pub backward: f64,
    /// `min(forward, backward)`.
    pub pairwise: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialResult {
    pub trial: usize,
    pub pairs: Vec<PairDegrees>,
    pub gamma: f64,
}

impl TrialResult {
    fn from_report(trial: usize, report: &MultiSourceReport) -> Self {
        let pairs = report
            .pairs
            .iter()
            .map(|p| PairDegrees {
                first: p.first,
                second: p.second,
                forward: p.report.first.independence,
                backward: p.report.second.independence,
                pairwise: p.report.overall,
            })
            .collect();
        TrialResult { trial, pairs, gamma: report.gamma }
    }
}

/// Runs one trial.
pub fn run_trial(config: &ExperimentConfig, trial: usize) -> Result<TrialResult> {
    let frame = Arc::new(Frame::with_size(config.omega_size)?);
    let streams = trial_streams(config, &frame, trial)?;
    let mut options = IndependenceOptions::new(derive_seed(config.seed, &[trial as u64, CLUSTERING_STREAM]));
    options.k = config.k;
    options.restarts = config.restarts;
    let report = multi_source_independence(&streams, &options)?;
    Ok(TrialResult::from_report(trial, &report))
}

/// Mean and standard error of a sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_err: f64,
}

impl Estimate {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = if values.len() > 1 {
            values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        Estimate { mean, std_err: (var / n).sqrt() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairSummary {
    pub first: usize,
    pub second: usize,
    pub forward: Estimate,
    pub backward: Estimate,
    pub pairwise: Estimate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub trials: Vec<TrialResult>,
    pub pairs: Vec<PairSummary>,
    pub gamma: Estimate,
}

/// Runs all trials (in parallel) and summarizes them in trial order.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResult> {
    config.validate()?;
    let trials = (0..config.n_trials)
        .into_par_iter()
        .map(|t| run_trial(config, t))
        .collect::<Result<Vec<_>>>()?;
    let pairs = trials[0]
        .pairs
        .iter()
        .enumerate()
        .map(|(idx, p)| {
            let column = |f: fn(&PairDegrees) -> f64| Estimate::of(&trials.iter().map(|t| f(&t.pairs[idx])).collect::<Vec<_>>());
            PairSummary {
                first: p.first,
                second: p.second,
                forward: column(|d| d.forward),
                backward: column(|d| d.backward),
                pairwise: column(|d| d.pairwise),
            }
        })
        .collect();
    let gamma = Estimate::of(&trials.iter().map(|t| t.gamma).collect::<Vec<_>>());
    Ok(ExperimentResult { config: config.clone(), trials, pairs, gamma })
}

/// Formats `x` with six significant digits, without trailing zeros.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { x.to_string() };
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (5 - magnitude).max(0) as usize;
    let mut text = format!("{x:.decimals$}");
    if text.contains('.') {
        text = text.trim_end_matches('0').trim_end_matches('.').to_string();
    }
    if text == "-0" {
        text = "0".into();
    }
    text
}

impl ExperimentResult {
    /// One row per trial and source pair.
    pub fn trials_csv(&self) -> String {
        let mut out = String::from("trial,first,second,id_forward,idbar_forward,id_backward,idbar_backward,pairwise,gamma\n");
        for t in &self.trials {
            for p in &t.pairs {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{}",
                    t.trial,
                    p.first + 1,
                    p.second + 1,
                    fmt_sig(p.forward),
                    fmt_sig(1.0 - p.forward),
                    fmt_sig(p.backward),
                    fmt_sig(1.0 - p.backward),
                    fmt_sig(p.pairwise),
                    fmt_sig(t.gamma)
                );
            }
        }
        out
    }

    /// Mean degrees per pair, and the mean overall degree.
    pub fn summary_csv(&self) -> String {
        let mut out = String::from(
            "mode,sources,first,second,id_forward,idbar_forward,id_backward,idbar_backward,pairwise,gamma,gamma_std_err\n",
        );
        let mode = match self.config.mode {
            Mode::Independent => "independent",
            Mode::Dependent => "dependent",
        };
        for p in &self.pairs {
            let _ = writeln!(
                out,
                "{mode},{},{},{},{},{},{},{},{},{},{}",
                self.config.n_sources,
                p.first + 1,
                p.second + 1,
                fmt_sig(p.forward.mean),
                fmt_sig(1.0 - p.forward.mean),
                fmt_sig(p.backward.mean),
                fmt_sig(1.0 - p.backward.mean),
                fmt_sig(p.pairwise.mean),
                fmt_sig(self.gamma.mean),
                fmt_sig(self.gamma.std_err)
            );
        }
        out
    }
}
