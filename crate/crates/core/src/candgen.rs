//! Cross-database candidate generation for the updated log.
//!
//! After both stored pattern sets have been reclassified against the
//! updated log U, the only sequences that can still enter the border of
//! U are combinations of a base-side frequent sequence with an
//! increment-side one. Joining the two sides in both directions (suffix
//! and prefix extension) generates exactly those candidates; none of
//! them can be frequent in U, so counting them feeds the border only.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::miner::{Params, PatternCounts};
use crate::model::Sequence;
use crate::occurrence::LogIndex;

/// How a candidate was generated: extending a base-side sequence at the
/// end (suffix), extending it at the front (prefix), or both.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    SuffixExtension,
    PrefixExtension,
    Both,
}

impl Provenance {
    fn merge(self, other: Provenance) -> Provenance {
        if self == other {
            self
        } else {
            Provenance::Both
        }
    }
}

/// One level's cross-join candidates, all of the same length, none of
/// them already frequent in U.
#[derive(Debug, Clone)]
pub struct CandidateBatch {
    length: usize,
    candidates: BTreeMap<Sequence, Provenance>,
    /// Raw join emissions before pruning, after deduplication.
    pub generated: usize,
    /// Emissions dropped by the subsequence prune or because they were
    /// already frequent in U.
    pub pruned: usize,
}

impl CandidateBatch {
    pub fn length(&self) -> usize {
        self.length
    }

    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Sequence, Provenance)> {
        self.candidates.iter().map(|(s, &p)| (s, p))
    }
}

/// Joins base-side against increment-side frequent sequences of length
/// m-1, in both directions.
///
/// For every pair (α from `base_side`, β from `increment_side`) with
/// α ≠ β: when α's tail matches β's head, α extended by β's last symbol
/// is emitted (suffix extension), and symmetrically β extended by α's
/// last symbol (prefix extension). For length-1 inputs the overlap is
/// empty, so both directions always emit. Candidates with a delete-one
/// subsequence outside `frequent_prev` (the full frequent level m-1 of
/// U) are pruned, as are candidates already in `already_frequent` (the
/// frequent level m of U).
///
/// Panics if the input sequences do not all have length m-1.
pub fn cross_join(
    base_side: &BTreeSet<Sequence>,
    increment_side: &BTreeSet<Sequence>,
    frequent_prev: &BTreeSet<Sequence>,
    already_frequent: &BTreeSet<Sequence>,
) -> CandidateBatch {
    let m1 = base_side
        .iter()
        .chain(increment_side)
        .next()
        .map_or(0, |s| s.len());
    assert!(
        base_side
            .iter()
            .chain(increment_side)
            .all(|s| s.len() == m1),
        "cross-join inputs must have uniform length"
    );

    let mut raw: BTreeMap<Sequence, Provenance> = BTreeMap::new();
    let mut emit = |seq: Sequence, tag: Provenance| {
        raw.entry(seq)
            .and_modify(|t| *t = t.merge(tag))
            .or_insert(tag);
    };
    for alpha in base_side {
        for beta in increment_side {
            if alpha == beta {
                continue;
            }
            if alpha.symbols()[1..] == beta.symbols()[..m1 - 1] {
                emit(alpha.extended(beta.last()), Provenance::SuffixExtension);
            }
            if beta.symbols()[1..] == alpha.symbols()[..m1 - 1] {
                emit(beta.extended(alpha.last()), Provenance::PrefixExtension);
            }
        }
    }

    let generated = raw.len();
    let candidates: BTreeMap<Sequence, Provenance> = raw
        .into_iter()
        .filter(|(seq, _)| {
            !already_frequent.contains(seq)
                && seq
                    .delete_one_subsequences()
                    .iter()
                    .all(|sub| frequent_prev.contains(sub))
        })
        .collect();

    CandidateBatch {
        length: m1 + 1,
        pruned: generated - candidates.len(),
        generated,
        candidates,
    }
}

/// Counts a candidate batch over the updated log and keeps the counts
/// that fall into the border band `[nbd_floor, min_count)`.
///
/// A candidate reaching `min_count` would mean a sequence frequent in U
/// without being frequent on either side, which the stored states rule
/// out; it is reported as an internal consistency violation rather than
/// classified.
pub fn count_and_band(
    batch: &CandidateBatch,
    u_index: &LogIndex<'_>,
    params: &Params,
) -> Result<PatternCounts> {
    let n = u_index.log().len();
    let min_count = params.min_supp().ceil_mul(n);
    let nbd_floor = params.min_nbd_supp().ceil_mul(n).max(1);

    let mut out = PatternCounts::new();
    for (seq, _) in batch.iter() {
        let count = u_index.count(seq, params.window());
        if count >= min_count {
            return Err(Error::InternalConsistency(format!(
                "cross-join candidate {:?} counts {count} >= min_count {min_count} in the updated log",
                seq.symbols().iter().map(|s| s.id()).collect::<Vec<_>>()
            )));
        }
        if count >= nbd_floor {
            out.insert(seq.clone(), count);
        }
    }
    Ok(out)
}
