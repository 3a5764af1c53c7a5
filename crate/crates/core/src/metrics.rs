//! Jousselme distance and the distance tables used by clustering.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::frame::{jaccard_index, Frame, Subset};
use crate::mass::MassFunction;

/// Dense `2^N × 2^N` Jaccard similarity matrix in canonical subset order.
#[derive(Debug, Clone, PartialEq)]
pub struct JaccardMatrix {
    dim: usize,
    entries: Vec<f64>,
}

impl JaccardMatrix {
    pub fn new(frame: &Frame) -> Self {
        let dim = frame.powerset_len();
        let entries = (0..dim * dim)
            .map(|k| jaccard_index(Subset((k / dim) as u32), Subset((k % dim) as u32)))
            .collect();
        JaccardMatrix { dim, entries }
    }

    pub fn get(&self, a: Subset, b: Subset) -> f64 {
        self.entries[a.index() * self.dim + b.index()]
    }

    /// Jousselme distance through the dense quadratic form.
    pub fn distance(&self, m1: &MassFunction, m2: &MassFunction) -> Result<f64> {
        m1.ensure_same_frame(m2)?;
        if m1.frame().powerset_len() != self.dim {
            return Err(Error::FrameMismatch);
        }
        let diff: Vec<f64> = m1.to_dense().iter().zip(m2.to_dense()).map(|(a, b)| a - b).collect();
        let mut form = 0.0;
        for (i, &x) in diff.iter().enumerate().filter(|(_, x)| **x != 0.0) {
            let row = &self.entries[i * self.dim..(i + 1) * self.dim];
            form += x * row.iter().zip(&diff).map(|(d, y)| d * y).sum::<f64>();
        }
        Ok((0.5 * form).max(0.0).sqrt())
    }
}

/// Jousselme distance `sqrt(½ (m1 − m2)ᵀ D (m1 − m2))` with `D` the Jaccard
/// matrix. The quadratic form only visits focal elements of either input.
pub fn jousselme_distance(m1: &MassFunction, m2: &MassFunction) -> Result<f64> {
    m1.ensure_same_frame(m2)?;
    let mut support: Vec<(Subset, f64)> = m1.focal_elements().collect();
    for (s, x) in m2.focal_elements() {
        match support.binary_search_by_key(&s, |&(t, _)| t) {
            Ok(i) => support[i].1 -= x,
            Err(i) => support.insert(i, (s, -x)),
        }
    }
    let mut form = 0.0;
    for (i, &(a, x)) in support.iter().enumerate() {
        form += x * x;
        for &(b, y) in &support[i + 1..] {
            form += 2.0 * x * y * jaccard_index(a, b);
        }
    }
    // round-off can push a zero form slightly negative
    Ok((0.5 * form).max(0.0).sqrt().min(1.0))
}

/// Symmetric matrix of pairwise distances with a zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl DistanceMatrix {
    /// Builds a matrix from a full row-major table, checking symmetry and
    /// the zero diagonal.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for row in &rows {
            if row.len() != n {
                return Err(Error::LengthMismatch("distance matrix must be square".into()));
            }
            entries.extend_from_slice(row);
        }
        for i in 0..n {
            if entries[i * n + i] != 0.0 {
                return Err(Error::InvalidMass(format!("nonzero diagonal at {i}")));
            }
            for j in 0..i {
                let d = entries[i * n + j];
                if d != entries[j * n + i] || !(0.0..=1.0).contains(&d) {
                    return Err(Error::InvalidMass(format!("entry ({i}, {j}) is asymmetric or out of [0, 1]")));
                }
            }
        }
        Ok(DistanceMatrix { n, entries })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    /// Row-major CSV with object ids as the header.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let header: Vec<String> = (0..self.n).map(|i| i.to_string()).collect();
        out.push_str(&header.join(","));
        out.push('\n');
        for i in 0..self.n {
            let row: Vec<String> = self.row(i).iter().map(|d| format!("{d}")).collect();
            let _ = writeln!(out, "{}", row.join(","));
        }
        out
    }
}

/// Jousselme distances between all pairs, each computed once.
pub fn pairwise_distances(ms: &[MassFunction]) -> Result<DistanceMatrix> {
    let first = ms.first().ok_or(Error::Empty("no mass functions"))?;
    for m in ms {
        first.ensure_same_frame(m)?;
    }
    let n = ms.len();
    let upper: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| ms[i + 1..].iter().map(|m| jousselme_distance(&ms[i], m)).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    let mut entries = vec![0.0; n * n];
    for (i, row) in upper.iter().enumerate() {
        for (offset, &d) in row.iter().enumerate() {
            let j = i + 1 + offset;
            entries[i * n + j] = d;
            entries[j * n + i] = d;
        }
    }
    Ok(DistanceMatrix { n, entries })
}

/// Mean distance from object `object` to the members of `cluster`. When the
/// object belongs to the cluster its zero self-distance is part of the mean.
pub fn object_to_cluster_distance(object: usize, cluster: &[usize], distances: &DistanceMatrix) -> Result<f64> {
    if cluster.is_empty() {
        return Err(Error::Empty("cluster has no members"));
    }
    let n = distances.len();
    if object >= n || cluster.iter().any(|&q| q >= n) {
        return Err(Error::LengthMismatch(format!("object index out of range for {n} objects")));
    }
    let row = distances.row(object);
    Ok(cluster.iter().map(|&q| row[q]).sum::<f64>() / cluster.len() as f64)
}
