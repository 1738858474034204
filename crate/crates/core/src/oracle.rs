//! Brute-force reference mining used by the verification suites.
//!
//! Candidates are enumerated exhaustively (every frequent sequence
//! extended by every symbol in the log) and counted with the naive
//! occurrence simulation, so this path shares neither candidate
//! generation nor counting machinery with [`crate::miner::mine`].
//! Intended for small inputs.

use std::collections::BTreeSet;

use crate::miner::{Params, PatternCounts};
use crate::model::{EventLog, Sequence, Symbol};
use crate::occurrence::count_occurrences_oracle;

/// Every sequence whose occurrence count in `log` reaches
/// `ceil(min_supp * |log|)`, with its exact count.
///
/// Extending only frequent sequences loses nothing: a frequent
/// sequence's length-(m-1) prefix occurs at least as often as the
/// sequence itself, so it is frequent too and was enumerated at the
/// previous level.
pub fn brute_force_frequent(log: &EventLog, params: &Params) -> PatternCounts {
    let min_count = params.min_supp().ceil_mul(log.len());
    let alphabet: BTreeSet<Symbol> = log.events().iter().map(|e| e.symbol).collect();

    let mut out = PatternCounts::new();
    let mut level: Vec<Sequence> = alphabet.iter().map(|&s| Sequence::single(s)).collect();
    while !level.is_empty() {
        let mut next = Vec::new();
        for cand in level {
            let count = count_occurrences_oracle(&cand, log, params.window());
            if count >= min_count {
                for &sym in &alphabet {
                    next.push(cand.extended(sym));
                }
                out.insert(cand, count);
            }
        }
        level = next;
    }
    out
}
