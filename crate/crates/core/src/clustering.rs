//! Mode-free evidential clustering.
//!
//! Objects are mass functions. An object's distance to a cluster is its mean
//! Jousselme distance to the cluster's members, so all distances are computed
//! once up front and no cluster prototype is ever combined. Starting from a
//! seeded random partition, objects are swept in id order and each one moves
//! to the cluster it is closest to, until a full sweep changes nothing.
//!
//! A single run can stop in a local optimum, so [`cluster`] repeats it from
//! several seeded starts and keeps the partition with the smallest total
//! object-to-cluster distance.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::frame::Frame;
use crate::mass::MassFunction;
use crate::metrics::{pairwise_distances, DistanceMatrix};
use crate::seed::derive_seed;

pub const DEFAULT_MAX_ITER: usize = 100;

/// Seeded starts tried by [`cluster`].
pub const DEFAULT_RESTARTS: usize = 10;

/// Uniform random draws retried before falling back to a seeded
/// permutation that puts one distinct object in each cluster.
const INIT_ATTEMPTS: usize = 64;

/// Hard partition of `n` objects into `k` nonempty clusters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterPartition {
    k: usize,
    assignment: Vec<usize>,
    iterations: usize,
    converged: bool,
}

impl ClusterPartition {
    /// Partition from an explicit assignment. Every cluster id must be used.
    pub fn from_assignment(k: usize, assignment: Vec<usize>) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidClusterCount("k must be at least 1".into()));
        }
        if let Some(&bad) = assignment.iter().find(|&&c| c >= k) {
            return Err(Error::InvalidClusterCount(format!("cluster id {bad} out of range for k = {k}")));
        }
        let partition = ClusterPartition { k, assignment, iterations: 0, converged: true };
        if partition.sizes().contains(&0) {
            return Err(Error::InvalidClusterCount("every cluster needs at least one object".into()));
        }
        Ok(partition)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn cluster_of(&self, object: usize) -> usize {
        self.assignment[object]
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &c in &self.assignment {
            sizes[c] += 1;
        }
        sizes
    }

    pub fn members(&self, cluster: usize) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.assignment[i] == cluster).collect()
    }

    /// Full sweeps performed.
    pub fn iterations(&self) -> usize {
        self.iterations
    }

    /// False when the iteration cap stopped the sweeps.
    pub fn converged(&self) -> bool {
        self.converged
    }

    /// `object,cluster` rows with a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("object,cluster\n");
        for (i, c) in self.assignment.iter().enumerate() {
            let _ = writeln!(out, "{i},{c}");
        }
        out
    }

    /// Σ over objects of the mean distance to their own cluster.
    pub fn objective(&self, distances: &DistanceMatrix) -> f64 {
        let sizes = self.sizes();
        let mut within = vec![0.0; self.k];
        for i in 0..self.len() {
            let c = self.assignment[i];
            let row = distances.row(i);
            within[c] += (0..self.len()).filter(|&q| self.assignment[q] == c).map(|q| row[q]).sum::<f64>();
        }
        within.iter().zip(&sizes).map(|(w, &s)| w / s as f64).sum()
    }
}

/// Number of clusters used when none is given: one per hypothesis.
pub fn default_k(frame: &Frame) -> usize {
    frame.size()
}

/// Clusters mass functions into `k` groups.
pub fn cluster(ms: &[MassFunction], k: usize, seed: u64, max_iter: usize) -> Result<ClusterPartition> {
    check_k(ms.len(), k)?;
    let distances = pairwise_distances(ms)?;
    cluster_distances(&distances, k, seed, max_iter, DEFAULT_RESTARTS)
}

/// Best of `restarts` runs on a precomputed distance matrix. Run `r` starts
/// from `derive_seed(seed, [r])`; ties keep the earliest run.
pub fn cluster_distances(
    distances: &DistanceMatrix,
    k: usize,
    seed: u64,
    max_iter: usize,
    restarts: usize,
) -> Result<ClusterPartition> {
    check_k(distances.len(), k)?;
    let mut best: Option<(f64, ClusterPartition)> = None;
    for run in 0..restarts.max(1) {
        let partition = cluster_once(distances, k, derive_seed(seed, &[run as u64]), max_iter)?;
        let objective = partition.objective(distances);
        if best.as_ref().map_or(true, |(b, _)| objective < *b) {
            best = Some((objective, partition));
        }
    }
    Ok(best.expect("at least one run").1)
}

/// One run from a single seeded start.
pub fn cluster_once(distances: &DistanceMatrix, k: usize, seed: u64, max_iter: usize) -> Result<ClusterPartition> {
    let n = distances.len();
    check_k(n, k)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assignment = initial_assignment(n, k, &mut rng);
    let mut sizes = vec![0usize; k];
    for &c in &assignment {
        sizes[c] += 1;
    }

    let mut iterations = 0;
    let mut converged = false;
    // sums[i * k + c] = Σ_{q ∈ c} d(i, q)
    let mut sums = vec![0.0; n * k];
    while iterations < max_iter {
        iterations += 1;
        sums.iter_mut().for_each(|s| *s = 0.0);
        for i in 0..n {
            let row = distances.row(i);
            for (q, &c) in assignment.iter().enumerate() {
                sums[i * k + c] += row[q];
            }
        }

        let mut moves = 0;
        for i in 0..n {
            let current = assignment[i];
            let own = sums[i * k + current] / sizes[current] as f64;
            let mut best = current;
            let mut best_dist = own;
            for c in 0..k {
                if c == current || sizes[c] == 0 {
                    continue;
                }
                let d = sums[i * k + c] / sizes[c] as f64;
                if d < best_dist {
                    best = c;
                    best_dist = d;
                }
            }
            if best != current {
                move_object(i, current, best, &mut assignment, &mut sizes, &mut sums, distances, k);
                moves += 1;
            }
        }
        moves += repair_empty(&mut assignment, &mut sizes, &mut sums, distances, k);
        if moves == 0 {
            converged = true;
            break;
        }
    }
    Ok(ClusterPartition { k, assignment, iterations, converged })
}

fn check_k(n: usize, k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidClusterCount("k must be at least 1".into()));
    }
    if k > n {
        return Err(Error::InvalidClusterCount(format!("k = {k} exceeds the {n} objects")));
    }
    Ok(())
}

fn initial_assignment(n: usize, k: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    for _ in 0..INIT_ATTEMPTS {
        let draw: Vec<usize> = (0..n).map(|_| rng.gen_range(0..k)).collect();
        let mut used = vec![false; k];
        draw.iter().for_each(|&c| used[c] = true);
        if used.iter().all(|&u| u) {
            return draw;
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut assignment = vec![0; n];
    for (rank, &object) in order.iter().enumerate() {
        assignment[object] = if rank < k { rank } else { rng.gen_range(0..k) };
    }
    assignment
}

#[allow(clippy::too_many_arguments)]
fn move_object(
    object: usize,
    from: usize,
    to: usize,
    assignment: &mut [usize],
    sizes: &mut [usize],
    sums: &mut [f64],
    distances: &DistanceMatrix,
    k: usize,
) {
    assignment[object] = to;
    sizes[from] -= 1;
    sizes[to] += 1;
    let row = distances.row(object);
    for (j, &d) in row.iter().enumerate() {
        sums[j * k + from] -= d;
        sums[j * k + to] += d;
    }
}

/// Moves the object farthest from its own cluster into each empty cluster.
fn repair_empty(
    assignment: &mut [usize],
    sizes: &mut [usize],
    sums: &mut [f64],
    distances: &DistanceMatrix,
    k: usize,
) -> usize {
    let mut moves = 0;
    while let Some(empty) = sizes.iter().position(|&s| s == 0) {
        let farthest = (0..assignment.len())
            .filter(|&i| sizes[assignment[i]] > 1)
            .map(|i| (i, sums[i * k + assignment[i]] / sizes[assignment[i]] as f64))
            .fold(None, |best: Option<(usize, f64)>, (i, d)| match best {
                Some((_, bd)) if bd >= d => best,
                _ => Some((i, d)),
            });
        let Some((object, _)) = farthest else { break };
        let from = assignment[object];
        move_object(object, from, empty, assignment, sizes, sums, distances, k);
        moves += 1;
    }
    moves
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::Subset;
    use std::sync::Arc;

    fn categorical_groups(k: usize, per_group: usize) -> Vec<MassFunction> {
        let frame = Arc::new(Frame::with_size(k).unwrap());
        (0..k * per_group)
            .map(|i| MassFunction::categorical(frame.clone(), Subset(1 << (i % k))).unwrap())
            .collect()
    }

    #[test]
    fn single_cluster() {
        let ms = categorical_groups(3, 4);
        let p = cluster(&ms, 1, 7, DEFAULT_MAX_ITER).unwrap();
        assert!(p.assignment().iter().all(|&c| c == 0));
        assert_eq!(p.sizes(), vec![12]);
    }

    #[test]
    fn single_runs_can_stall_on_separated_groups() {
        let ms = categorical_groups(4, 6);
        let d = pairwise_distances(&ms).unwrap();
        let stalled = (0..200).filter(|&s| cluster_once(&d, 4, s, DEFAULT_MAX_ITER).unwrap().objective(&d) > 0.0).count();
        assert!(stalled > 0);
    }

    #[test]
    fn separated_groups_are_recovered() {
        let ms = categorical_groups(4, 6);
        for seed in 0..200 {
            let p = cluster(&ms, 4, seed, DEFAULT_MAX_ITER).unwrap();
            assert!(p.converged());
            for i in 0..ms.len() {
                for j in 0..ms.len() {
                    assert_eq!(p.cluster_of(i) == p.cluster_of(j), i % 4 == j % 4, "seed {seed}");
                }
            }
        }
    }

    #[test]
    fn k_equal_n_isolates_everything() {
        let ms = categorical_groups(3, 3);
        let p = cluster(&ms, 9, 1, DEFAULT_MAX_ITER).unwrap();
        assert_eq!(p.sizes(), vec![1; 9]);
    }

    #[test]
    fn invalid_k() {
        let ms = categorical_groups(2, 2);
        assert!(matches!(cluster(&ms, 0, 0, 10), Err(Error::InvalidClusterCount(_))));
        assert!(matches!(cluster(&ms, 5, 0, 10), Err(Error::InvalidClusterCount(_))));
    }

    #[test]
    fn deterministic_per_seed() {
        let ms = categorical_groups(3, 5);
        let a = cluster(&ms, 3, 99, 50).unwrap();
        let b = cluster(&ms, 3, 99, 50).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn default_k_is_frame_size() {
        assert_eq!(default_k(&Frame::with_size(5).unwrap()), 5);
        assert_eq!(default_k(&Frame::with_size(1).unwrap()), 1);
        assert_eq!(default_k(&Frame::with_size(3).unwrap()), 3);
    }

    #[test]
    fn partition_csv_and_validation() {
        let p = ClusterPartition::from_assignment(2, vec![0, 1, 1]).unwrap();
        assert_eq!(p.to_csv(), "object,cluster\n0,0\n1,1\n2,1\n");
        assert_eq!(p.members(1), vec![1, 2]);
        assert!(ClusterPartition::from_assignment(3, vec![0, 1, 1]).is_err());
        assert!(ClusterPartition::from_assignment(2, vec![0, 2]).is_err());
    }

    #[test]
    fn repair_fills_empty_clusters() {
        let d = DistanceMatrix::from_rows(vec![
            vec![0.0, 0.1, 0.9],
            vec![0.1, 0.0, 0.8],
            vec![0.9, 0.8, 0.0],
        ])
        .unwrap();
        let mut assignment = vec![0, 0, 0];
        let mut sizes = vec![3, 0];
        let mut sums = vec![0.0; 6];
        for i in 0..3 {
            sums[i * 2] = d.row(i).iter().sum();
        }
        assert_eq!(repair_empty(&mut assignment, &mut sizes, &mut sums, &d, 2), 1);
        assert_eq!(assignment, vec![0, 0, 1]);
        assert_eq!(sizes, vec![2, 1]);
    }
}
