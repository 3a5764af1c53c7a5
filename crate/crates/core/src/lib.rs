//! Belief-function combination for partially independent sources.
//!
//! `evifuse` covers the classical Dempster–Shafer toolkit (mass functions,
//! belief and plausibility, pignistic decisions, discounting, the usual
//! combination rules and the canonical decomposition behind the cautious
//! rule) and adds two things on top:
//!
//! - an estimator of how independent several sources are, computed from the
//!   mass functions they give for the same objects ([`independence`]);
//! - a mixed rule that blends the conjunctive and cautious combinations by
//!   that degree ([`combination::mixed`]).
//!
//! ```
//! use std::sync::Arc;
//! use evifuse::{combination, Frame, MassFunction};
//!
//! let frame = Arc::new(Frame::new(["a", "b", "c"])?);
//! let m1 = MassFunction::from_labels(frame.clone(), &[("a", 0.3), ("c", 0.2), ("a|c", 0.2), ("*", 0.3)])?;
//! let m2 = MassFunction::from_labels(frame.clone(), &[("a", 0.3), ("a|c", 0.4), ("*", 0.3)])?;
//!
//! let fused = combination::mixed(&[m1, m2], 0.3)?;
//! assert!((fused.mass(frame.parse_subset("a")?) - 0.3225).abs() < 5e-5);
//! # Ok::<(), evifuse::Error>(())
//! ```
//!
//! The guide in `book/` walks through each piece.

pub mod clustering;
pub mod combination;
pub mod decomposition;
pub mod error;
pub mod experiment;
pub mod frame;
pub mod generators;
pub mod independence;
pub mod io;
pub mod mass;
pub mod metrics;
pub mod seed;
pub mod transform;

pub use combination::Rule;
pub use decomposition::{canonical_decompose, recompose, WeightFunction};
pub use error::{Error, Result};
pub use frame::{jaccard_index, Frame, Subset};
pub use mass::{simple_support, MassFunction};
pub use metrics::jousselme_distance;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/mass-functions.md")]
    mod mass_functions {}
    #[doc = include_str!("../../../book/src/combination-rules.md")]
    mod combination_rules {}
    #[doc = include_str!("../../../book/src/canonical-decomposition.md")]
    mod canonical_decomposition {}
    #[doc = include_str!("../../../book/src/distances-and-clustering.md")]
    mod distances_and_clustering {}
    #[doc = include_str!("../../../book/src/independence.md")]
    mod independence {}
    #[doc = include_str!("../../../book/src/mixed-rule.md")]
    mod mixed_rule {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
