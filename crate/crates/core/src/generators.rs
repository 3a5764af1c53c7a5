//! Seeded generators of random mass-function streams.
//!
//! - [`gen_independent`]: focal elements drawn anywhere in the power set,
//!   the empty set included.
//! - [`gen_consistent`]: every mass function has focal elements that all
//!   contain a random anchor set, so it carries no internal conflict.
//! - [`gen_dependent`]: like the consistent generator, but the anchors are
//!   decisions taken from another source.
//!
//! In all three the masses are the piece lengths of `[0, 1]` cut at sorted
//! uniform points, assigned to focal elements in the order they were drawn.

use std::sync::Arc;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::frame::{Frame, Subset};
use crate::mass::MassFunction;

/// A decision: the set a source commits to (a singleton or a larger subset).
pub type Decision = Subset;

/// Piece lengths of `[0, 1]` cut at `pieces − 1` sorted uniform points.
pub fn stick_breaking<R: Rng + ?Sized>(rng: &mut R, pieces: usize) -> Vec<f64> {
    assert!(pieces >= 1, "at least one piece");
    let mut cuts: Vec<f64> = (1..pieces).map(|_| rng.gen::<f64>()).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.push(1.0);
    let mut prev = 0.0;
    cuts.into_iter()
        .map(|c| {
            let len = c - prev;
            prev = c;
            len
        })
        .collect()
}

/// All supersets of `anchor` within `frame`, in ascending bit order.
pub fn supersets(frame: &Frame, anchor: Subset) -> Vec<Subset> {
    let free = frame.complement(anchor).bits();
    let mut out = Vec::with_capacity(1 << free.count_ones());
    // enumerate submasks of `free` in ascending order
    let mut sub = 0u32;
    loop {
        out.push(Subset(anchor.bits() | sub));
        if sub == free {
            break;
        }
        sub = (sub.wrapping_sub(free)) & free;
    }
    out
}

fn random_mass<R: Rng + ?Sized>(rng: &mut R, frame: &Arc<Frame>, pool: &[Subset]) -> MassFunction {
    let count = rng.gen_range(1..=pool.len());
    let picks = index::sample(rng, pool.len(), count);
    let masses = stick_breaking(rng, count);
    let entries: Vec<(Subset, f64)> = picks.iter().map(|i| pool[i]).zip(masses).collect();
    MassFunction::new(frame.clone(), entries).expect("stick-breaking pieces sum to one")
}

fn random_anchor<R: Rng + ?Sized>(rng: &mut R, frame: &Frame) -> Subset {
    Subset(rng.gen_range(1..frame.powerset_len() as u32))
}

/// `n` mass functions with between 1 and `2^N` focal elements each, drawn
/// without replacement from all subsets.
pub fn gen_independent(frame: Arc<Frame>, n: usize, seed: u64) -> Vec<MassFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pool: Vec<Subset> = frame.subsets().collect();
    (0..n).map(|_| random_mass(&mut rng, &frame, &pool)).collect()
}

/// `n` consistent mass functions and the anchor each one was built around.
pub fn gen_consistent(frame: Arc<Frame>, n: usize, seed: u64) -> (Vec<MassFunction>, Vec<Decision>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let anchor = random_anchor(&mut rng, &frame);
            let pool = supersets(&frame, anchor);
            (random_mass(&mut rng, &frame, &pool), anchor)
        })
        .unzip()
}

/// One mass function per decision, with every focal element containing it.
pub fn gen_dependent(frame: Arc<Frame>, n: usize, decisions: &[Decision], seed: u64) -> Result<Vec<MassFunction>> {
    if decisions.len() != n {
        return Err(Error::LengthMismatch(format!("{n} mass functions requested for {} decisions", decisions.len())));
    }
    for &d in decisions {
        frame.check(d)?;
        if d.is_empty() {
            return Err(Error::InvalidMass("a decision must be a nonempty set".into()));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(decisions
        .iter()
        .map(|&d| {
            let pool = supersets(&frame, d);
            random_mass(&mut rng, &frame, &pool)
        })
        .collect())
}

/// The singleton with the largest pignistic probability; the earliest label
/// wins ties.
pub fn decision_of(m: &MassFunction) -> Result<Decision> {
    let betp = m.pignistic()?;
    let best = betp
        .iter()
        .enumerate()
        .fold(0, |best, (i, &p)| if p > betp[best] { i } else { best });
    Ok(Subset(1 << best))
}
