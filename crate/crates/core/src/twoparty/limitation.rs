//! How strong a round lower bound the cut-simulation technique can give.
//!
//! An `r`-round algorithm yields a two-party protocol with at most
//! `r * 2 * cut * B` bits, `B = 2L` bits per edge per round. The listing
//! protocols here put an upper bound `U` on the communication any family can
//! demand, so no family of this shape certifies more than `U / (2 * cut * B)`
//! rounds. That figure bounds the technique, not algorithms.

use serde::{Deserialize, Serialize};

use crate::bits::id_bits;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "k", rename_all = "snake_case")]
pub enum Target {
    Cycle(usize),
    Diamond,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitationReport {
    pub target: Target,
    pub n: usize,
    pub cut: usize,
    pub id_bits: usize,
    pub bandwidth_bits: usize,
    /// Listing protocol upper bound on the bits any pattern needs across this cut.
    pub protocol_bits: f64,
    pub protocol_formula: String,
    /// Largest round lower bound the technique can certify.
    pub round_ceiling: f64,
    pub ceiling_formula: String,
    /// Growth of the ceiling in `n`, up to log factors.
    pub growth: String,
    /// Set when `cut == 0`: no bits cross, the technique certifies nothing.
    pub degenerate: bool,
    pub label: String,
}

pub fn limitation_bound_report(n: usize, cut: usize, target: Target) -> Result<LimitationReport> {
    if n == 0 {
        return Err(Error::input("n must be positive"));
    }
    let l = id_bits(n);
    let b = 2 * l;
    let (protocol_bits, protocol_formula, per_cut, growth) = match target {
        Target::Cycle(k) if !(3..=7).contains(&k) => {
            return Err(Error::Unsupported(format!("no listing protocol for induced C_{k}")));
        }
        Target::Cycle(_) => {
            let u = 4.0 * l as f64 * n as f64 * cut as f64;
            (u, format!("4 * {l} * {n} * {cut}"), 4.0 * l as f64 * n as f64, "n")
        }
        Target::Diamond => {
            let root = (n as f64).sqrt();
            let u = 12.0 * l as f64 * root * cut as f64;
            (u, format!("12 * {l} * sqrt({n}) * {cut}"), 12.0 * l as f64 * root, "sqrt(n)")
        }
    };
    let degenerate = cut == 0;
    let round_ceiling = if degenerate { 0.0 } else { per_cut / (2.0 * b as f64) };
    Ok(LimitationReport {
        target,
        n,
        cut,
        id_bits: l,
        bandwidth_bits: b,
        protocol_bits,
        protocol_formula,
        round_ceiling,
        ceiling_formula: format!("protocol_bits / (2 * cut * {b})"),
        growth: growth.to_string(),
        degenerate,
        label: "ceiling on lower bounds provable by cut simulation; not a statement about algorithms".into(),
    })
}
