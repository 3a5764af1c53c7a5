//! Combination rules.
//!
//! Binary rules take two mass functions on the same frame. [`combine_n`]
//! drives any [`Rule`] over a sequence: associative rules fold pairwise,
//! the mean and mixed rules are natively n-ary, and the Yager and
//! Dubois–Prade rules fold left in input order (they are not associative,
//! so the order of the sources changes the result).

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::decomposition::{canonical_decompose, recompose};
use crate::error::{check_unit, Error, Result};
use crate::frame::Subset;
use crate::mass::MassFunction;

fn pairwise<F>(m1: &MassFunction, m2: &MassFunction, target: F) -> Result<MassFunction>
where
    F: Fn(Subset, Subset) -> Subset,
{
    m1.ensure_same_frame(m2)?;
    let mut out: BTreeMap<Subset, f64> = BTreeMap::new();
    for (b, x) in m1.focal_elements() {
        for (c, y) in m2.focal_elements() {
            *out.entry(target(b, c)).or_insert(0.0) += x * y;
        }
    }
    Ok(MassFunction::from_map_unchecked(m1.shared_frame().clone(), out))
}

/// Unnormalized conjunctive rule: `m(A) = Σ_{B∩C=A} m1(B)·m2(C)`.
pub fn conjunctive(m1: &MassFunction, m2: &MassFunction) -> Result<MassFunction> {
    pairwise(m1, m2, Subset::intersection)
}

/// Conjunctive rule through commonalities, `q = q1·q2`. Dense in `2^N`.
pub fn conjunctive_via_commonality(m1: &MassFunction, m2: &MassFunction) -> Result<MassFunction> {
    m1.ensure_same_frame(m2)?;
    let q: Vec<f64> = m1.commonalities().iter().zip(m2.commonalities()).map(|(a, b)| a * b).collect();
    MassFunction::from_commonalities(m1.shared_frame().clone(), &q)
}

/// Disjunctive rule: `m(A) = Σ_{B∪C=A} m1(B)·m2(C)`.
pub fn disjunctive(m1: &MassFunction, m2: &MassFunction) -> Result<MassFunction> {
    pairwise(m1, m2, Subset::union)
}

/// Dempster's rule: normalized conjunctive combination.
pub fn dempster(m1: &MassFunction, m2: &MassFunction) -> Result<MassFunction> {
    conjunctive(m1, m2)?.dempster_normalize()
}

fn conflict_to_ignorance(m: MassFunction) -> MassFunction {
    let conflict = m.conflict();
    if conflict == 0.0 {
        return m;
    }
    let full = m.frame().full();
    let mut masses: BTreeMap<Subset, f64> = m.focal_elements().filter(|(s, _)| !s.is_empty()).collect();
    *masses.entry(full).or_insert(0.0) += conflict;
    MassFunction::from_map_unchecked(m.shared_frame().clone(), masses)
}

/// Yager's rule: the conjunctive conflict is moved to Ω.
pub fn yager(m1: &MassFunction, m2: &MassFunction) -> Result<MassFunction> {
    Ok(conflict_to_ignorance(conjunctive(m1, m2)?))
}

/// Dubois–Prade rule: conflicting pairs give their mass to `B ∪ C`.
pub fn dubois_prade(m1: &MassFunction, m2: &MassFunction) -> Result<MassFunction> {
    pairwise(m1, m2, |b, c| {
        let meet = b.intersection(c);
        if meet.is_empty() {
            b.union(c)
        } else {
            meet
        }
    })
}

/// Pointwise average of the inputs.
pub fn mean_rule(ms: &[MassFunction]) -> Result<MassFunction> {
    let first = ms.first().ok_or(Error::Empty("mean rule needs at least one mass function"))?;
    let mut out: BTreeMap<Subset, f64> = BTreeMap::new();
    for m in ms {
        first.ensure_same_frame(m)?;
        for (s, x) in m.focal_elements() {
            *out.entry(s).or_insert(0.0) += x;
        }
    }
    let n = ms.len() as f64;
    out.values_mut().for_each(|v| *v /= n);
    Ok(MassFunction::from_map_unchecked(first.shared_frame().clone(), out))
}

/// Cautious rule: pointwise minimum of canonical weights, recomposed.
pub fn cautious(m1: &MassFunction, m2: &MassFunction) -> Result<MassFunction> {
    cautious_n(&[m1.clone(), m2.clone()])
}

fn cautious_n(ms: &[MassFunction]) -> Result<MassFunction> {
    let first = ms.first().ok_or(Error::Empty("cautious rule needs at least one mass function"))?;
    let mut weights = canonical_decompose(first)?;
    for m in &ms[1..] {
        first.ensure_same_frame(m)?;
        weights = weights.min(&canonical_decompose(m)?)?;
    }
    recompose(&weights)
}

fn conjunctive_n(ms: &[MassFunction]) -> Result<MassFunction> {
    let (first, rest) = ms.split_first().ok_or(Error::Empty("no mass functions to combine"))?;
    rest.iter().try_fold(first.clone(), |acc, m| conjunctive(&acc, m))
}

/// Mixed rule: `γ·m_conj + (1 − γ)·m_cautious`, where both legs are the
/// n-ary combinations of `ms`. `γ` is the sources' degree of independence.
pub fn mixed(ms: &[MassFunction], gamma: f64) -> Result<MassFunction> {
    check_unit("gamma", gamma)?;
    let conj = conjunctive_n(ms)?;
    let caut = cautious_n(ms)?;
    Ok(blend(&conj, &caut, gamma))
}

/// `gamma·a + (1 − gamma)·b`, focal by focal.
pub(crate) fn blend(a: &MassFunction, b: &MassFunction, gamma: f64) -> MassFunction {
    let mut out: BTreeMap<Subset, f64> = BTreeMap::new();
    for (s, x) in a.focal_elements() {
        *out.entry(s).or_insert(0.0) += gamma * x;
    }
    for (s, x) in b.focal_elements() {
        *out.entry(s).or_insert(0.0) += (1.0 - gamma) * x;
    }
    out.retain(|_, v| *v > 0.0);
    MassFunction::from_map_unchecked(a.shared_frame().clone(), out)
}

/// Identifier of a combination rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Rule {
    Conjunctive,
    Disjunctive,
    Dempster,
    Yager,
    DuboisPrade,
    Mean,
    Cautious,
    Mixed(f64),
}

impl Rule {
    /// Whether combining in a different grouping gives the same result.
    pub fn is_associative(self) -> bool {
        matches!(self, Rule::Conjunctive | Rule::Disjunctive | Rule::Dempster | Rule::Cautious)
    }

    pub fn name(self) -> &'static str {
        match self {
            Rule::Conjunctive => "conjunctive",
            Rule::Disjunctive => "disjunctive",
            Rule::Dempster => "dempster",
            Rule::Yager => "yager",
            Rule::DuboisPrade => "dubois_prade",
            Rule::Mean => "mean",
            Rule::Cautious => "cautious",
            Rule::Mixed(_) => "mixed",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rule::Mixed(g) => write!(f, "mixed({g})"),
            other => f.write_str(other.name()),
        }
    }
}

impl FromStr for Rule {
    type Err = Error;

    /// Accepts the rule names plus `mixed(γ)`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        Ok(match s {
            "conjunctive" => Rule::Conjunctive,
            "disjunctive" => Rule::Disjunctive,
            "dempster" => Rule::Dempster,
            "yager" => Rule::Yager,
            "dubois_prade" => Rule::DuboisPrade,
            "mean" => Rule::Mean,
            "cautious" => Rule::Cautious,
            _ => {
                let gamma = s
                    .strip_prefix("mixed(")
                    .and_then(|rest| rest.strip_suffix(')'))
                    .ok_or_else(|| Error::Parse(format!("unknown rule {s:?}")))?
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("bad mixed rule parameter: {e}")))?;
                check_unit("gamma", gamma)?;
                Rule::Mixed(gamma)
            }
        })
    }
}

/// Combines a nonempty sequence of mass functions with `rule`.
pub fn combine_n(rule: Rule, ms: &[MassFunction]) -> Result<MassFunction> {
    let (first, rest) = ms.split_first().ok_or(Error::Empty("no mass functions to combine"))?;
    for m in rest {
        first.ensure_same_frame(m)?;
    }
    let fold = |f: fn(&MassFunction, &MassFunction) -> Result<MassFunction>| {
        rest.iter().try_fold(first.clone(), |acc, m| f(&acc, m))
    };
    match rule {
        Rule::Conjunctive => conjunctive_n(ms),
        Rule::Disjunctive => fold(disjunctive),
        Rule::Dempster => conjunctive_n(ms)?.dempster_normalize(),
        Rule::Yager => fold(yager),
        Rule::DuboisPrade => fold(dubois_prade),
        Rule::Mean => mean_rule(ms),
        Rule::Cautious => cautious_n(ms),
        Rule::Mixed(gamma) => mixed(ms, gamma),
    }
}
