//! Canonical conjunctive decomposition of nondogmatic mass functions.
//!
//! Every nondogmatic `m` factors as the conjunctive combination of
//! generalized simple supports `A^{w(A)}` over the strict subsets `A ⊂ Ω`.
//! The weights follow from the commonalities:
//!
//! ```text
//! ln w(A) = −Σ_{B ⊇ A} (−1)^{|B|−|A|} ln q(B)
//! ```
//!
//! which is a superset Möbius transform of `−ln q`. Weights above 1 are
//! legitimate (the mass is then not separable); they matter for the
//! cautious rule.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::frame::{Frame, Subset};
use crate::mass::MassFunction;
use crate::transform;

/// Weights at most this far from 1 are not stored.
const UNIT_WEIGHT_EPS: f64 = 1e-12;

/// Canonical weights, one per strict subset of Ω. Subsets without an entry
/// have weight 1.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightFunction {
    frame: Arc<Frame>,
    weights: BTreeMap<Subset, f64>,
}

impl WeightFunction {
    pub fn new<I>(frame: Arc<Frame>, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Subset, f64)>,
    {
        let mut weights = BTreeMap::new();
        for (subset, w) in entries {
            frame.check(subset)?;
            if subset == frame.full() {
                return Err(Error::InvalidMass("Ω carries no canonical weight".into()));
            }
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::NonPositiveWeight(w));
            }
            if (w - 1.0).abs() > UNIT_WEIGHT_EPS {
                weights.insert(subset, w);
            }
        }
        Ok(WeightFunction { frame, weights })
    }

    /// All weights equal to 1: the decomposition of the vacuous mass.
    pub fn identity(frame: Arc<Frame>) -> Self {
        WeightFunction { frame, weights: BTreeMap::new() }
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn shared_frame(&self) -> &Arc<Frame> {
        &self.frame
    }

    pub fn weight(&self, subset: Subset) -> f64 {
        self.weights.get(&subset).copied().unwrap_or(1.0)
    }

    /// Weights different from 1, in canonical order.
    pub fn entries(&self) -> impl Iterator<Item = (Subset, f64)> + '_ {
        self.weights.iter().map(|(&s, &w)| (s, w))
    }

    /// Pointwise minimum of two weight functions on the same frame.
    pub fn min(&self, other: &WeightFunction) -> Result<WeightFunction> {
        if self.frame != other.frame {
            return Err(Error::FrameMismatch);
        }
        let entries = self
            .frame
            .subsets()
            .filter(|&s| s != self.frame.full())
            .map(|s| (s, self.weight(s).min(other.weight(s))));
        WeightFunction::new(self.frame.clone(), entries)
    }
}

/// Canonical weights of a nondogmatic mass function.
pub fn canonical_decompose(m: &MassFunction) -> Result<WeightFunction> {
    if m.is_dogmatic() {
        return Err(Error::Dogmatic);
    }
    let frame = m.shared_frame().clone();
    let full = frame.full().index();
    // q(B) ≥ m(Ω) > 0 for every B, so the logarithm is defined.
    let mut log_w: Vec<f64> = m.commonalities().iter().map(|q| -q.ln()).collect();
    transform::superset_mobius(&mut log_w);
    let entries = log_w
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != full)
        .map(|(i, lw)| (Subset(i as u32), lw.exp()));
    WeightFunction::new(frame, entries)
}

/// Conjunctive combination of the simple supports `A^{w(A)}`.
///
/// With `f(A) = ln w(A)` and `f(Ω) = 0`, `ln q(B) = Σ_A f(A) − Σ_{A ⊇ B} f(A)`.
pub fn recompose(w: &WeightFunction) -> Result<MassFunction> {
    let frame = w.shared_frame().clone();
    let mut log_w = vec![0.0; frame.powerset_len()];
    for (s, weight) in w.entries() {
        if weight <= 0.0 {
            return Err(Error::NonPositiveWeight(weight));
        }
        log_w[s.index()] = weight.ln();
    }
    transform::superset_zeta(&mut log_w);
    let total = log_w[0];
    let commonalities: Vec<f64> = log_w.iter().map(|g| (total - g).exp()).collect();
    MassFunction::from_commonalities(frame, &commonalities)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mass::simple_support;

    fn abc() -> Arc<Frame> {
        Arc::new(Frame::new(["a", "b", "c"]).unwrap())
    }

    #[test]
    fn simple_support_inverts() {
        let f = abc();
        let a = f.parse_subset("a").unwrap();
        let m = simple_support(f.clone(), a, 0.7).unwrap();
        let w = canonical_decompose(&m).unwrap();
        assert!((w.weight(a) - 0.7).abs() < 1e-12);
        assert_eq!(w.entries().count(), 1);
        assert!(recompose(&w).unwrap().max_abs_diff(&m) < 1e-12);
    }

    #[test]
    fn vacuous_has_unit_weights() {
        let f = abc();
        let w = canonical_decompose(&MassFunction::vacuous(f.clone())).unwrap();
        assert_eq!(w, WeightFunction::identity(f.clone()));
        assert!(recompose(&w).unwrap().is_vacuous());
    }

    #[test]
    fn table_pair_round_trip() {
        let f = abc();
        let m1 = MassFunction::from_labels(f, &[("a", 0.3), ("c", 0.2), ("a|c", 0.2), ("*", 0.3)]).unwrap();
        let w = canonical_decompose(&m1).unwrap();
        assert!(recompose(&w).unwrap().max_abs_diff(&m1) < 1e-12);
        // m1 is not separable: some weight exceeds 1
        assert!(w.entries().any(|(_, x)| x > 1.0));
    }

    #[test]
    fn dogmatic_is_rejected() {
        let f = abc();
        let m = MassFunction::from_labels(f, &[("a", 0.5), ("b|c", 0.5)]).unwrap();
        assert_eq!(canonical_decompose(&m), Err(Error::Dogmatic));
    }

    #[test]
    fn weights_must_be_positive() {
        let f = abc();
        assert!(matches!(WeightFunction::new(f.clone(), [(Subset(1), 0.0)]), Err(Error::NonPositiveWeight(_))));
        assert!(WeightFunction::new(f.clone(), [(f.full(), 0.5)]).is_err());
    }
}
