//! Estimating how independent two or more sources are from the mass
//! functions they give for the same objects.
//!
//! Each source's stream is clustered on its own. If the sources are
//! dependent, their partitions line up: the clusters of one contain the same
//! objects as the clusters of the other. The pipeline measures that overlap:
//!
//! 1. similarity matrices between the two partitions, one normalized by each
//!    source's cluster sizes;
//! 2. a greedy bijective matching of clusters for each orientation;
//! 3. for every matched pair, a mass function on `{Dep, Ind}` that puts the
//!    overlap `β` on `Dep` and `1 − β` on `Ind`, discounted by a reliability
//!    factor that grows with the cluster size;
//! 4. the mean of those masses per source, whose pignistic probability of
//!    `Ind` is the directed independence degree.
//!
//! Two sources get the smaller of their two directed degrees; a group of
//! sources gets the largest pairwise value.

use std::sync::{Arc, OnceLock};

use rayon::prelude::*;
use serde::Serialize;

use crate::clustering::{cluster_distances, ClusterPartition, DEFAULT_MAX_ITER, DEFAULT_RESTARTS};
use crate::combination::mean_rule;
use crate::error::{check_unit, Error, Result};
use crate::frame::{Frame, Subset};
use crate::mass::MassFunction;
use crate::metrics::pairwise_distances;
use crate::seed::derive_seed;

/// `Dep` is the first element of the independence frame.
pub const DEP: Subset = Subset(0b01);
/// `Ind` is the second element of the independence frame.
pub const IND: Subset = Subset(0b10);

/// The two-element frame `{Dep, Ind}`.
pub fn independence_frame() -> Arc<Frame> {
    static FRAME: OnceLock<Arc<Frame>> = OnceLock::new();
    FRAME
        .get_or_init(|| Arc::new(Frame::new(["Dep", "Ind"]).expect("static labels are valid")))
        .clone()
}

/// Which source's cluster sizes normalize a similarity matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    TowardsFirst,
    TowardsSecond,
}

/// `K × K` overlap proportions. Row `r` is a cluster of the source the
/// matrix is oriented towards; column `c` a cluster of the other source.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimilarityMatrix {
    orientation: Orientation,
    rows: Vec<Vec<f64>>,
}

impl SimilarityMatrix {
    pub fn new(orientation: Orientation, rows: Vec<Vec<f64>>) -> Result<Self> {
        let k = rows.len();
        if rows.iter().any(|r| r.len() != k) {
            return Err(Error::LengthMismatch("similarity matrix must be square".into()));
        }
        Ok(SimilarityMatrix { orientation, rows })
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn k(&self) -> usize {
        self.rows.len()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.rows[row][col]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn transpose(&self) -> Vec<Vec<f64>> {
        (0..self.k()).map(|c| (0..self.k()).map(|r| self.rows[r][c]).collect()).collect()
    }
}

/// One greedy step: the pair bound and the similarity it was bound at.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MatchStep {
    pub row: usize,
    pub col: usize,
    pub similarity: f64,
}

/// A bijection from row clusters to column clusters.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Matching {
    partner: Vec<usize>,
    steps: Vec<MatchStep>,
}

impl Matching {
    /// Column cluster matched to `row`.
    pub fn partner(&self, row: usize) -> usize {
        self.partner[row]
    }

    pub fn partners(&self) -> &[usize] {
        &self.partner
    }

    /// Greedy steps in the order they were taken.
    pub fn steps(&self) -> &[MatchStep] {
        &self.steps
    }

    pub fn is_bijection(&self) -> bool {
        let mut seen = vec![false; self.partner.len()];
        self.partner.iter().all(|&c| c < seen.len() && !std::mem::replace(&mut seen[c], true))
    }
}

/// Overlap matrices of two partitions of the same objects.
///
/// The first is normalized by the first partition's cluster sizes, the
/// second by the second's; the second is indexed `[cluster of P2][cluster of P1]`.
pub fn similarity_matrices(
    p1: &ClusterPartition,
    p2: &ClusterPartition,
) -> Result<(SimilarityMatrix, SimilarityMatrix)> {
    if p1.len() != p2.len() {
        return Err(Error::LengthMismatch(format!("partitions cover {} and {} objects", p1.len(), p2.len())));
    }
    if p1.k() != p2.k() {
        return Err(Error::LengthMismatch(format!("partitions have {} and {} clusters", p1.k(), p2.k())));
    }
    let k = p1.k();
    let mut counts = vec![vec![0usize; k]; k];
    for (&c1, &c2) in p1.assignment().iter().zip(p2.assignment()) {
        counts[c1][c2] += 1;
    }
    let (s1, s2) = (p1.sizes(), p2.sizes());
    let ratio = |num: usize, den: usize| if den == 0 { 0.0 } else { num as f64 / den as f64 };
    let towards_first = (0..k).map(|a| (0..k).map(|b| ratio(counts[a][b], s1[a])).collect()).collect();
    let towards_second = (0..k).map(|b| (0..k).map(|a| ratio(counts[a][b], s2[b])).collect()).collect();
    Ok((
        SimilarityMatrix { orientation: Orientation::TowardsFirst, rows: towards_first },
        SimilarityMatrix { orientation: Orientation::TowardsSecond, rows: towards_second },
    ))
}

/// Greedy matching: repeatedly bind the largest remaining entry and remove
/// its row and column. Ties go to the smallest row, then the smallest column.
pub fn match_clusters(matrix: &SimilarityMatrix) -> Matching {
    let k = matrix.k();
    let mut row_free = vec![true; k];
    let mut col_free = vec![true; k];
    let mut partner = vec![usize::MAX; k];
    let mut steps = Vec::with_capacity(k);
    for _ in 0..k {
        let mut best: Option<MatchStep> = None;
        for row in (0..k).filter(|&r| row_free[r]) {
            for col in (0..k).filter(|&c| col_free[c]) {
                let similarity = matrix.get(row, col);
                if best.map_or(true, |b| similarity > b.similarity) {
                    best = Some(MatchStep { row, col, similarity });
                }
            }
        }
        let step = best.expect("a free row and column remain while steps < k");
        row_free[step.row] = false;
        col_free[step.col] = false;
        partner[step.row] = step.col;
        steps.push(step);
    }
    Matching { partner, steps }
}

/// Reliability of an independence estimate made on a cluster of
/// `cluster_size` objects over a frame of `frame_size` hypotheses:
/// `1 − |Cl|^(−1/|Ω|)`.
pub fn reliability_factor(frame_size: usize, cluster_size: usize) -> Result<f64> {
    if cluster_size == 0 {
        return Err(Error::Empty("reliability of an empty cluster"));
    }
    if frame_size == 0 {
        return Err(Error::InvalidFrame("frame size must be positive".into()));
    }
    Ok(1.0 - (cluster_size as f64).powf(-1.0 / frame_size as f64))
}

/// Mass on `{Dep, Ind}` for one matched pair of clusters:
/// `Dep ↦ αβ`, `Ind ↦ α(1 − β)`, `Dep ∪ Ind ↦ 1 − α`.
pub fn cluster_independence_mass(beta: f64, alpha: f64) -> Result<MassFunction> {
    check_unit("beta", beta)?;
    check_unit("alpha", alpha)?;
    let frame = independence_frame();
    let full = frame.full();
    MassFunction::new(frame, [(DEP, alpha * beta), (IND, alpha * (1.0 - beta)), (full, 1.0 - alpha)])
}

/// Mean of the per-cluster masses of one source.
pub fn source_independence_mass(cluster_masses: &[MassFunction]) -> Result<MassFunction> {
    if cluster_masses.is_empty() {
        return Err(Error::Empty("no cluster masses"));
    }
    mean_rule(cluster_masses)
}

/// Directed independence and dependence degrees `(BetP(Ind), BetP(Dep))`.
pub fn independence_degree(m: &MassFunction) -> Result<(f64, f64)> {
    if m.frame().size() != 2 {
        return Err(Error::InvalidFrame("independence masses live on a two-element frame".into()));
    }
    let betp = m.pignistic()?;
    Ok((betp[1], betp[0]))
}

/// One source's side of a pairwise estimate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DirectedIndependence {
    pub similarity: SimilarityMatrix,
    pub matching: Matching,
    pub reliabilities: Vec<f64>,
    pub cluster_masses: Vec<MassFunction>,
    pub source_mass: MassFunction,
    /// `I_d`: pignistic probability of `Ind`.
    pub independence: f64,
    /// `Ī_d`: pignistic probability of `Dep`.
    pub dependence: f64,
}

impl DirectedIndependence {
    fn from_matrix(similarity: SimilarityMatrix, sizes: &[usize], frame_size: usize) -> Result<Self> {
        let matching = match_clusters(&similarity);
        let reliabilities = sizes.iter().map(|&s| reliability_factor(frame_size, s)).collect::<Result<Vec<_>>>()?;
        let cluster_masses = (0..similarity.k())
            .map(|row| cluster_independence_mass(similarity.get(row, matching.partner(row)), reliabilities[row]))
            .collect::<Result<Vec<_>>>()?;
        let source_mass = source_independence_mass(&cluster_masses)?;
        let (independence, dependence) = independence_degree(&source_mass)?;
        Ok(DirectedIndependence {
            similarity,
            matching,
            reliabilities,
            cluster_masses,
            source_mass,
            independence,
            dependence,
        })
    }

    /// True when `I_d > Ī_d`.
    pub fn is_independent(&self) -> bool {
        self.independence > self.dependence
    }
}

/// Full record of a two-source estimate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndependenceReport {
    /// Seen from the first source: `I_d(s1, s2)`.
    pub first: DirectedIndependence,
    /// Seen from the second source: `I_d(s2, s1)`.
    pub second: DirectedIndependence,
    /// `I(s1, s2) = min(I_d(s1, s2), I_d(s2, s1))`.
    pub overall: f64,
}

impl IndependenceReport {
    /// Builds the report from two partitions of the same objects.
    pub fn from_partitions(p1: &ClusterPartition, p2: &ClusterPartition, frame_size: usize) -> Result<Self> {
        let (m1, m2) = similarity_matrices(p1, p2)?;
        let first = DirectedIndependence::from_matrix(m1, &p1.sizes(), frame_size)?;
        let second = DirectedIndependence::from_matrix(m2, &p2.sizes(), frame_size)?;
        let overall = first.independence.min(second.independence);
        Ok(IndependenceReport { first, second, overall })
    }

    pub fn is_independent(&self) -> bool {
        self.overall > 0.5
    }
}

/// Settings shared by the independence estimators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IndependenceOptions {
    /// Clusters per source; `None` uses the frame size.
    pub k: Option<usize>,
    pub seed: u64,
    pub max_iter: usize,
    /// Seeded starts per clustering.
    pub restarts: usize,
    /// Cluster every source with `seed` itself instead of a seed derived
    /// from the source index. Identical streams then get identical partitions.
    pub shared_seed: bool,
}

impl IndependenceOptions {
    pub fn new(seed: u64) -> Self {
        IndependenceOptions { k: None, seed, max_iter: DEFAULT_MAX_ITER, restarts: DEFAULT_RESTARTS, shared_seed: false }
    }

    pub fn with_k(mut self, k: usize) -> Self {
        self.k = Some(k);
        self
    }

    pub fn with_shared_seed(mut self) -> Self {
        self.shared_seed = true;
        self
    }

    fn seed_for(&self, index: usize) -> u64 {
        if self.shared_seed {
            self.seed
        } else {
            derive_seed(self.seed, &[index as u64])
        }
    }
}

fn check_streams(streams: &[&[MassFunction]]) -> Result<Arc<Frame>> {
    let first = streams
        .first()
        .and_then(|s| s.first())
        .ok_or(Error::Empty("streams must contain mass functions"))?;
    let n = streams[0].len();
    for stream in streams {
        if stream.len() != n {
            return Err(Error::LengthMismatch(format!("streams hold {n} and {} mass functions", stream.len())));
        }
        for m in stream.iter() {
            first.ensure_same_frame(m)?;
        }
    }
    Ok(first.shared_frame().clone())
}

/// Clusters source number `index`, by default with its own derived seed.
pub fn cluster_source(ms: &[MassFunction], index: usize, options: &IndependenceOptions) -> Result<ClusterPartition> {
    let frame = ms.first().ok_or(Error::Empty("stream is empty"))?.frame();
    let k = options.k.unwrap_or_else(|| crate::clustering::default_k(frame));
    let distances = pairwise_distances(ms)?;
    cluster_distances(&distances, k, options.seed_for(index), options.max_iter, options.restarts)
}

/// Independence of two sources; `ms1[i]` and `ms2[i]` describe the same object.
pub fn pairwise_independence(
    ms1: &[MassFunction],
    ms2: &[MassFunction],
    options: &IndependenceOptions,
) -> Result<IndependenceReport> {
    let frame = check_streams(&[ms1, ms2])?;
    let p1 = cluster_source(ms1, 0, options)?;
    let p2 = cluster_source(ms2, 1, options)?;
    IndependenceReport::from_partitions(&p1, &p2, frame.size())
}

/// Pairwise reports for a group of sources and their overall degree.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultiSourceReport {
    pub pairs: Vec<SourcePair>,
    /// Largest pairwise `I` over all unordered pairs.
    pub gamma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SourcePair {
    pub first: usize,
    pub second: usize,
    pub report: IndependenceReport,
}

impl MultiSourceReport {
    pub fn pair(&self, first: usize, second: usize) -> Option<&IndependenceReport> {
        self.pairs.iter().find(|p| p.first == first && p.second == second).map(|p| &p.report)
    }
}

/// Overall independence of `streams.len() ≥ 2` sources. Each stream is
/// clustered once; every unordered pair `i < j` is then compared.
pub fn multi_source_independence(
    streams: &[Vec<MassFunction>],
    options: &IndependenceOptions,
) -> Result<MultiSourceReport> {
    if streams.len() < 2 {
        return Err(Error::LengthMismatch(format!("need at least two sources, got {}", streams.len())));
    }
    let views: Vec<&[MassFunction]> = streams.iter().map(Vec::as_slice).collect();
    let frame = check_streams(&views)?;
    let partitions = views
        .par_iter()
        .enumerate()
        .map(|(i, ms)| cluster_source(ms, i, options))
        .collect::<Result<Vec<_>>>()?;
    let mut pairs = Vec::new();
    for i in 0..streams.len() {
        for j in i + 1..streams.len() {
            let report = IndependenceReport::from_partitions(&partitions[i], &partitions[j], frame.size())?;
            pairs.push(SourcePair { first: i, second: j, report });
        }
    }
    let gamma = pairs.iter().map(|p| p.report.overall).fold(f64::NEG_INFINITY, f64::max);
    Ok(MultiSourceReport { pairs, gamma })
}
