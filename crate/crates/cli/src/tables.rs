//! Regeneration of the published example tables as CSV.

use std::fmt::Write as _;
use std::sync::Arc;

use evifuse::combination::{cautious, conjunctive, mixed};
use evifuse::experiment::{fmt_sig, run_experiment, Mode};
use evifuse::{Frame, MassFunction, Result};

use crate::TableRunArgs;

fn example_pair() -> Result<(MassFunction, MassFunction)> {
    let frame = Arc::new(Frame::new(["a", "b", "c"])?);
    let m1 = MassFunction::from_labels(frame.clone(), &[("a", 0.3), ("c", 0.2), ("a|c", 0.2), ("*", 0.3)])?;
    let m2 = MassFunction::from_labels(frame, &[("a", 0.3), ("a|c", 0.4), ("*", 0.3)])?;
    Ok((m1, m2))
}

fn render(header: &str, frame: &Frame, columns: &[Vec<f64>]) -> String {
    let mut out = format!("subset,{header}\n");
    for s in frame.subsets() {
        out.push_str(&frame.format_subset(s));
        for c in columns {
            let _ = write!(out, ",{}", fmt_sig(c[s.index()]));
        }
        out.push('\n');
    }
    out
}

/// Both sources, their cautious and conjunctive combinations and the mixed
/// rule at γ = 0, 0.3, 0.6 and 1, over every subset.
pub fn combination() -> Result<String> {
    let (m1, m2) = example_pair()?;
    let pair = [m1.clone(), m2.clone()];
    let mut columns = vec![m1.to_dense(), m2.to_dense(), cautious(&m1, &m2)?.to_dense(), conjunctive(&m1, &m2)?.to_dense()];
    for gamma in [0.0, 0.3, 0.6, 1.0] {
        columns.push(mixed(&pair, gamma)?.to_dense());
    }
    Ok(render("m1,m2,cautious,conjunctive,mixed_0,mixed_0.3,mixed_0.6,mixed_1", m1.frame(), &columns))
}

/// Mean directed and pairwise degrees for independent, then dependent sources.
pub fn sources(args: &TableRunArgs, n_sources: usize) -> Result<String> {
    let mut out = String::new();
    for mode in [Mode::Independent, Mode::Dependent] {
        let summary = run_experiment(&args.config(mode, n_sources))?.summary_csv();
        let body = if out.is_empty() { &summary[..] } else { summary.split_once('\n').map_or("", |(_, rest)| rest) };
        out.push_str(body);
    }
    Ok(out)
}

/// Mixed combinations of the example pair. Each γ gets two columns: the rule
/// itself, and the column the published table prints under that γ, which is
/// the rule evaluated at 1 − γ.
pub fn mixed_table(gammas: &[f64]) -> Result<String> {
    let (m1, m2) = example_pair()?;
    let pair = [m1.clone(), m2.clone()];
    let mut header = String::from("m1,m2");
    let mut columns = vec![m1.to_dense(), m2.to_dense()];
    for &gamma in gammas {
        let g = fmt_sig(gamma);
        let _ = write!(header, ",mixed_{g},published_{g}");
        columns.push(mixed(&pair, gamma)?.to_dense());
        columns.push(mixed(&pair, 1.0 - gamma)?.to_dense());
    }
    let note = "# mixed_G = G*conjunctive + (1-G)*cautious.\n\
                # published_G is the column the published table labels G; it equals mixed at 1-G (G and 1-G swapped).\n";
    Ok(format!("{note}{}", render(&header, m1.frame(), &columns)))
}
