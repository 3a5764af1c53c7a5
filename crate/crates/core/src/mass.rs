//! Mass functions and the transforms that act on a single one.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{check_unit, Error, Result};
use crate::frame::{Frame, Subset};
use crate::transform;

/// Tolerance on `Σ m(A) = 1` for masses built in code.
pub const SUM_TOLERANCE: f64 = 1e-9;

/// Tolerance on `Σ m(A) = 1` for masses read from files. Accepted inputs are
/// renormalized by their sum.
pub const INPUT_SUM_TOLERANCE: f64 = 1e-6;

/// Dense values at or below this magnitude are treated as zero when a dense
/// vector is turned back into focal elements.
pub(crate) const ZERO_EPS: f64 = 1e-12;

/// A basic belief assignment over a frame.
///
/// Only focal elements (strictly positive masses) are stored. Mass on ∅ is
/// allowed: it is the conflict of an unnormalized, open-world assignment.
#[derive(Debug, Clone, PartialEq)]
pub struct MassFunction {
    frame: Arc<Frame>,
    masses: BTreeMap<Subset, f64>,
}

impl MassFunction {
    /// Builds a mass function from `(subset, mass)` pairs. Repeated subsets
    /// accumulate; zero masses are dropped.
    pub fn new<I>(frame: Arc<Frame>, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Subset, f64)>,
    {
        let masses = collect_entries(&frame, entries)?;
        let total: f64 = masses.values().sum();
        if (total - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::InvalidMass(format!("masses sum to {total}, not 1")));
        }
        Ok(MassFunction { frame, masses })
    }

    /// Lenient constructor for external input: the sum only needs to be
    /// within [`INPUT_SUM_TOLERANCE`] of 1 and is then divided out.
    pub fn normalized_from<I>(frame: Arc<Frame>, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Subset, f64)>,
    {
        let mut masses = collect_entries(&frame, entries)?;
        let total: f64 = masses.values().sum();
        if (total - 1.0).abs() > INPUT_SUM_TOLERANCE {
            return Err(Error::InvalidMass(format!("masses sum to {total}, not 1")));
        }
        masses.values_mut().for_each(|v| *v /= total);
        Ok(MassFunction { frame, masses })
    }

    /// Builds a mass function from labelled focal elements, e.g.
    /// `[("a", 0.3), ("a|c", 0.7)]`.
    pub fn from_labels(frame: Arc<Frame>, entries: &[(&str, f64)]) -> Result<Self> {
        let parsed = entries
            .iter()
            .map(|&(text, mass)| Ok((frame.parse_subset(text)?, mass)))
            .collect::<Result<Vec<_>>>()?;
        MassFunction::new(frame, parsed)
    }

    /// Reads back a dense vector in canonical subset order. Round-off below
    /// [`ZERO_EPS`] is discarded; anything more negative is an error.
    pub fn from_dense(frame: Arc<Frame>, values: &[f64]) -> Result<Self> {
        debug_assert_eq!(values.len(), frame.powerset_len());
        let mut masses = BTreeMap::new();
        for (i, &v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::InvalidMass(format!("non-finite mass {v}")));
            }
            if v < -SUM_TOLERANCE {
                return Err(Error::InvalidMass(format!(
                    "negative mass {v} on {}",
                    frame.format_subset(Subset(i as u32))
                )));
            }
            if v > ZERO_EPS {
                masses.insert(Subset(i as u32), v);
            }
        }
        let total: f64 = masses.values().sum();
        if (total - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::InvalidMass(format!("masses sum to {total}, not 1")));
        }
        Ok(MassFunction { frame, masses })
    }

    /// m(Ω) = 1.
    pub fn vacuous(frame: Arc<Frame>) -> Self {
        let full = frame.full();
        MassFunction { frame, masses: BTreeMap::from([(full, 1.0)]) }
    }

    /// All mass on one subset.
    pub fn categorical(frame: Arc<Frame>, focal: Subset) -> Result<Self> {
        frame.check(focal)?;
        Ok(MassFunction { frame, masses: BTreeMap::from([(focal, 1.0)]) })
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn shared_frame(&self) -> &Arc<Frame> {
        &self.frame
    }

    /// Mass of `subset` (zero when it is not focal).
    pub fn mass(&self, subset: Subset) -> f64 {
        self.masses.get(&subset).copied().unwrap_or(0.0)
    }

    /// Focal elements with their masses, in canonical order.
    pub fn focal_elements(&self) -> impl ExactSizeIterator<Item = (Subset, f64)> + '_ {
        self.masses.iter().map(|(&s, &m)| (s, m))
    }

    pub fn focal_count(&self) -> usize {
        self.masses.len()
    }

    /// m(∅), the conflict carried by this assignment.
    pub fn conflict(&self) -> f64 {
        self.mass(Subset::EMPTY)
    }

    /// Nondogmatic means m(Ω) > 0.
    pub fn is_dogmatic(&self) -> bool {
        self.mass(self.frame.full()) <= 0.0
    }

    pub fn is_vacuous(&self) -> bool {
        self.masses.len() == 1 && self.masses.contains_key(&self.frame.full())
    }

    /// Dense mass vector of length `2^N` in canonical order.
    pub fn to_dense(&self) -> Vec<f64> {
        let mut dense = vec![0.0; self.frame.powerset_len()];
        for (s, m) in self.focal_elements() {
            dense[s.index()] = m;
        }
        dense
    }

    /// Dense commonality vector `q(A) = Σ_{B ⊇ A} m(B)`.
    pub fn commonalities(&self) -> Vec<f64> {
        let mut dense = self.to_dense();
        transform::superset_zeta(&mut dense);
        dense
    }

    /// Inverse of [`MassFunction::commonalities`].
    pub fn from_commonalities(frame: Arc<Frame>, commonalities: &[f64]) -> Result<Self> {
        let mut dense = commonalities.to_vec();
        transform::superset_mobius(&mut dense);
        MassFunction::from_dense(frame, &dense)
    }

    pub fn same_frame(&self, other: &MassFunction) -> bool {
        Arc::ptr_eq(&self.frame, &other.frame) || self.frame == other.frame
    }

    pub(crate) fn ensure_same_frame(&self, other: &MassFunction) -> Result<()> {
        if self.same_frame(other) {
            Ok(())
        } else {
            Err(Error::FrameMismatch)
        }
    }

    /// Largest absolute difference over all subsets.
    pub fn max_abs_diff(&self, other: &MassFunction) -> f64 {
        self.masses
            .keys()
            .chain(other.masses.keys())
            .map(|&s| (self.mass(s) - other.mass(s)).abs())
            .fold(0.0, f64::max)
    }

    /// `bel(A) = Σ_{∅ ≠ B ⊆ A} m(B)`.
    pub fn belief(&self, a: Subset) -> Result<f64> {
        self.frame.check(a)?;
        Ok(self
            .focal_elements()
            .filter(|(b, _)| !b.is_empty() && b.is_subset_of(a))
            .map(|(_, m)| m)
            .sum())
    }

    /// `pl(A) = Σ_{B ∩ A ≠ ∅} m(B)`.
    pub fn plausibility(&self, a: Subset) -> Result<f64> {
        self.frame.check(a)?;
        Ok(self.focal_elements().filter(|(b, _)| b.intersects(a)).map(|(_, m)| m).sum())
    }

    /// `q(A) = Σ_{B ⊇ A} m(B)`.
    pub fn commonality(&self, a: Subset) -> Result<f64> {
        self.frame.check(a)?;
        Ok(self.focal_elements().filter(|(b, _)| a.is_subset_of(*b)).map(|(_, m)| m).sum())
    }

    /// Pignistic probability of each singleton, in frame order.
    ///
    /// Each focal mass is shared equally among its elements after removing
    /// the conflict m(∅).
    pub fn pignistic(&self) -> Result<Vec<f64>> {
        let scale = 1.0 - self.conflict();
        if scale <= 0.0 {
            return Err(Error::TotalConflict { conflict: self.conflict() });
        }
        let mut betp = vec![0.0; self.frame.size()];
        for (b, m) in self.focal_elements().filter(|(b, _)| !b.is_empty()) {
            let share = m / f64::from(b.cardinality()) / scale;
            for i in b.indices() {
                betp[i] += share;
            }
        }
        Ok(betp)
    }

    /// Shafer discounting with reliability `alpha`: masses on strict subsets
    /// are scaled by `alpha`, the remainder goes to Ω.
    pub fn discount(&self, alpha: f64) -> Result<MassFunction> {
        check_unit("alpha", alpha)?;
        let full = self.frame.full();
        let mut entries: Vec<(Subset, f64)> = self
            .focal_elements()
            .filter(|&(s, _)| s != full)
            .map(|(s, m)| (s, alpha * m))
            .collect();
        entries.push((full, 1.0 - alpha * (1.0 - self.mass(full))));
        MassFunction::new(self.frame.clone(), entries)
    }

    /// Closed-world normalization: drop m(∅) and rescale.
    pub fn dempster_normalize(&self) -> Result<MassFunction> {
        let conflict = self.conflict();
        let scale = 1.0 - conflict;
        if scale <= 0.0 {
            return Err(Error::TotalConflict { conflict });
        }
        let masses = self
            .masses
            .iter()
            .filter(|(s, _)| !s.is_empty())
            .map(|(&s, &m)| (s, m / scale))
            .collect();
        Ok(MassFunction { frame: self.frame.clone(), masses })
    }

    /// Rebuilds the map without re-validation. Callers guarantee the sum.
    pub(crate) fn from_map_unchecked(frame: Arc<Frame>, masses: BTreeMap<Subset, f64>) -> Self {
        MassFunction { frame, masses }
    }
}

/// Simple support function `A^w`: mass `1 − w` on `A`, `w` on Ω.
pub fn simple_support(frame: Arc<Frame>, focus: Subset, weight: f64) -> Result<MassFunction> {
    frame.check(focus)?;
    if focus == frame.full() {
        return Err(Error::InvalidMass("a simple support needs a strict subset of Ω".into()));
    }
    check_unit("w", weight)?;
    let full = frame.full();
    MassFunction::new(frame, [(focus, 1.0 - weight), (full, weight)])
}

fn collect_entries<I>(frame: &Frame, entries: I) -> Result<BTreeMap<Subset, f64>>
where
    I: IntoIterator<Item = (Subset, f64)>,
{
    let mut masses = BTreeMap::new();
    for (subset, mass) in entries {
        frame.check(subset)?;
        if !mass.is_finite() || mass < 0.0 {
            return Err(Error::InvalidMass(format!(
                "mass {mass} on {} is not a nonnegative number",
                frame.format_subset(subset)
            )));
        }
        *masses.entry(subset).or_insert(0.0) += mass;
    }
    masses.retain(|_, m| *m > 0.0);
    Ok(masses)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn abc() -> Arc<Frame> {
        Arc::new(Frame::new(["a", "b", "c"]).unwrap())
    }

    fn m1() -> MassFunction {
        MassFunction::from_labels(abc(), &[("a", 0.3), ("c", 0.2), ("a|c", 0.2), ("*", 0.3)]).unwrap()
    }

    fn m2() -> MassFunction {
        MassFunction::from_labels(abc(), &[("a", 0.3), ("a|c", 0.4), ("*", 0.3)]).unwrap()
    }

    #[test]
    fn belief_examples() {
        let f = abc();
        assert_abs_diff_eq!(m1().belief(f.parse_subset("a|c").unwrap()).unwrap(), 0.7, epsilon = 1e-12);
        assert_eq!(m1().belief(Subset::EMPTY).unwrap(), 0.0);
        assert_eq!(MassFunction::vacuous(f.clone()).belief(f.full()).unwrap(), 1.0);
        assert!(m1().belief(Subset(0b1000)).is_err());
    }

    #[test]
    fn plausibility_examples() {
        let f = abc();
        assert_abs_diff_eq!(m1().plausibility(f.parse_subset("b").unwrap()).unwrap(), 0.3, epsilon = 1e-12);
        assert_eq!(m1().plausibility(Subset::EMPTY).unwrap(), 0.0);
        assert_abs_diff_eq!(m1().plausibility(f.full()).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn commonality_examples() {
        let f = abc();
        assert_abs_diff_eq!(m1().commonality(f.parse_subset("a").unwrap()).unwrap(), 0.8, epsilon = 1e-12);
        assert_abs_diff_eq!(m1().commonality(Subset::EMPTY).unwrap(), 1.0, epsilon = 1e-12);
        let vac = MassFunction::vacuous(f.clone());
        for s in f.subsets() {
            assert_eq!(vac.commonality(s).unwrap(), 1.0);
        }
    }

    #[test]
    fn pignistic_examples() {
        let betp = m2().pignistic().unwrap();
        assert_abs_diff_eq!(betp[0], 0.6, epsilon = 1e-12);
        assert_abs_diff_eq!(betp[1], 0.1, epsilon = 1e-12);
        assert_abs_diff_eq!(betp[2], 0.3, epsilon = 1e-12);

        let f = Arc::new(Frame::with_size(4).unwrap());
        for p in MassFunction::vacuous(f.clone()).pignistic().unwrap() {
            assert_abs_diff_eq!(p, 0.25, epsilon = 1e-12);
        }
        let cat = MassFunction::categorical(abc(), Subset(1)).unwrap();
        assert_eq!(cat.pignistic().unwrap(), vec![1.0, 0.0, 0.0]);

        let conflict = MassFunction::categorical(abc(), Subset::EMPTY).unwrap();
        assert!(matches!(conflict.pignistic(), Err(Error::TotalConflict { .. })));
    }

    #[test]
    fn pignistic_ignores_normalization() {
        let f = abc();
        let m = MassFunction::from_labels(f, &[("{}", 0.2), ("a", 0.3), ("b|c", 0.5)]).unwrap();
        let direct = m.pignistic().unwrap();
        let normalized = m.dempster_normalize().unwrap().pignistic().unwrap();
        for (x, y) in direct.iter().zip(&normalized) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(direct.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn discount_examples() {
        let m = m1();
        assert!(m.discount(1.0).unwrap().max_abs_diff(&m) < 1e-12);
        assert!(m.discount(0.0).unwrap().is_vacuous());
        let half = m.discount(0.5).unwrap();
        let expected =
            MassFunction::from_labels(abc(), &[("a", 0.15), ("c", 0.1), ("a|c", 0.1), ("*", 0.65)]).unwrap();
        assert!(half.max_abs_diff(&expected) < 1e-12);
        assert!(m.discount(1.5).is_err());
        assert!(m.discount(-0.1).is_err());
    }

    #[test]
    fn simple_support_examples() {
        let f = abc();
        let a = f.parse_subset("a").unwrap();
        let m = simple_support(f.clone(), a, 0.7).unwrap();
        assert_abs_diff_eq!(m.mass(a), 0.3, epsilon = 1e-12);
        assert_abs_diff_eq!(m.mass(f.full()), 0.7, epsilon = 1e-12);
        assert!(simple_support(f.clone(), a, 1.0).unwrap().is_vacuous());
        let cat = simple_support(f.clone(), a, 0.0).unwrap();
        assert_eq!(cat.focal_count(), 1);
        assert_eq!(cat.mass(a), 1.0);
        assert!(simple_support(f.clone(), f.full(), 0.5).is_err());
    }

    #[test]
    fn dempster_normalize_examples() {
        let f = abc();
        assert_eq!(m1().dempster_normalize().unwrap(), m1());
        let half = MassFunction::from_labels(f.clone(), &[("{}", 0.5), ("a", 0.5)]).unwrap();
        let n = half.dempster_normalize().unwrap();
        assert_eq!(n.focal_count(), 1);
        assert_abs_diff_eq!(n.mass(Subset(1)), 1.0, epsilon = 1e-12);

        let conj = MassFunction::from_labels(
            f.clone(),
            &[("{}", 0.06), ("a", 0.45), ("c", 0.14), ("a|c", 0.26), ("*", 0.09)],
        )
        .unwrap();
        let n = conj.dempster_normalize().unwrap();
        assert_eq!(n.conflict(), 0.0);
        assert_abs_diff_eq!(n.mass(Subset(0b001)), 0.45 / 0.94, epsilon = 1e-12);
        assert_abs_diff_eq!(n.mass(Subset(0b100)), 0.14 / 0.94, epsilon = 1e-12);
        assert_abs_diff_eq!(n.mass(Subset(0b101)), 0.26 / 0.94, epsilon = 1e-12);
        assert_abs_diff_eq!(n.mass(Subset(0b111)), 0.09 / 0.94, epsilon = 1e-12);

        let total = MassFunction::categorical(f, Subset::EMPTY).unwrap();
        assert!(matches!(total.dempster_normalize(), Err(Error::TotalConflict { .. })));
    }

    #[test]
    fn construction_validation() {
        let f = abc();
        assert!(MassFunction::from_labels(f.clone(), &[("a", 0.5)]).is_err());
        assert!(MassFunction::from_labels(f.clone(), &[("a", 1.2), ("b", -0.2)]).is_err());
        assert!(MassFunction::from_labels(f.clone(), &[("d", 1.0)]).is_err());
        let lenient =
            MassFunction::normalized_from(f.clone(), [(Subset(1), 0.5), (Subset(2), 0.5000004)]).unwrap();
        assert_abs_diff_eq!(lenient.focal_elements().map(|(_, m)| m).sum::<f64>(), 1.0, epsilon = 1e-15);
        assert!(MassFunction::normalized_from(f, [(Subset(1), 0.5), (Subset(2), 0.51)]).is_err());
    }

    #[test]
    fn commonality_round_trip() {
        let m = m1();
        let q = m.commonalities();
        let back = MassFunction::from_commonalities(m.shared_frame().clone(), &q).unwrap();
        assert!(back.max_abs_diff(&m) < 1e-12);
    }
}
