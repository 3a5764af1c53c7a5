#![allow(dead_code)]

use std::sync::Arc;

use evifuse::{Frame, MassFunction, Subset};
use rand::seq::index;
use rand::Rng;

pub fn abc() -> Arc<Frame> {
    Arc::new(Frame::new(["a", "b", "c"]).unwrap())
}

pub fn table_pair() -> (MassFunction, MassFunction) {
    let f = abc();
    let m1 = MassFunction::from_labels(f.clone(), &[("a", 0.3), ("c", 0.2), ("a|c", 0.2), ("*", 0.3)]).unwrap();
    let m2 = MassFunction::from_labels(f, &[("a", 0.3), ("a|c", 0.4), ("*", 0.3)]).unwrap();
    (m1, m2)
}

/// Random mass with a few focal sets (possibly ∅), normalized weights.
pub fn random_mass<R: Rng>(rng: &mut R, frame: &Arc<Frame>, with_omega: bool) -> MassFunction {
    let len = frame.powerset_len();
    let count = rng.gen_range(1..=len.min(6));
    let mut entries: Vec<(Subset, f64)> = index::sample(rng, len, count)
        .iter()
        .map(|i| (Subset(i as u32), rng.gen_range(0.05..1.0)))
        .collect();
    if with_omega {
        entries.push((frame.full(), rng.gen_range(0.05..1.0)));
    }
    let total: f64 = entries.iter().map(|(_, w)| w).sum();
    MassFunction::new(frame.clone(), entries.into_iter().map(|(s, w)| (s, w / total))).unwrap()
}

pub fn nondogmatic<R: Rng>(rng: &mut R, frame: &Arc<Frame>) -> MassFunction {
    random_mass(rng, frame, true)
}

/// Conjunctive or disjunctive combination by summing over every pair of
/// subsets of the dense vectors.
pub fn brute_pairwise(m1: &MassFunction, m2: &MassFunction, union: bool) -> Vec<f64> {
    let (a, b) = (m1.to_dense(), m2.to_dense());
    let mut out = vec![0.0; a.len()];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            let target = if union { i | j } else { i & j };
            out[target] += x * y;
        }
    }
    out
}

pub fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
