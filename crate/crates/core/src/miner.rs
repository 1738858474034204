//! Level-wise miner producing the frequent set and negative border from
//! scratch: the initial-mining step, the re-run comparator for the
//! benchmark, and the correctness baseline for the update algorithms.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::fraction::Fraction;
use crate::model::{EventLog, Sequence, Symbol};
use crate::occurrence::{LogIndex, Window};

/// Mining thresholds. `min_nbd_supp` bounds which negative-border
/// sequences are kept and must lie strictly below `min_supp`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Params {
    min_supp: Fraction,
    min_nbd_supp: Fraction,
    window: Window,
}

impl Params {
    pub fn new(min_supp: Fraction, min_nbd_supp: Fraction, window: Window) -> Result<Params> {
        if min_supp.is_zero() || min_supp > Fraction::ONE {
            return Err(Error::InvalidParams(format!(
                "min_supp must be in (0, 1], got {min_supp}"
            )));
        }
        if min_nbd_supp >= min_supp {
            return Err(Error::InvalidParams(format!(
                "min_nbd_supp ({min_nbd_supp}) must be below min_supp ({min_supp})"
            )));
        }
        Ok(Params {
            min_supp,
            min_nbd_supp,
            window,
        })
    }

    pub fn min_supp(&self) -> Fraction {
        self.min_supp
    }

    pub fn min_nbd_supp(&self) -> Fraction {
        self.min_nbd_supp
    }

    pub fn window(&self) -> Window {
        self.window
    }
}

/// Patterns with their exact occurrence counts, in canonical order
/// (length first, then symbol ids).
pub type PatternCounts = BTreeMap<Sequence, usize>;

/// Iterates the patterns of one length.
pub fn level(map: &PatternCounts, len: usize) -> impl Iterator<Item = (&Sequence, usize)> {
    map.iter()
        .filter(move |(s, _)| s.len() == len)
        .map(|(s, &c)| (s, c))
}

/// Frequent set and negative border of one log under one set of
/// parameters, with the exact counts they were mined with.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MiningState {
    params: Params,
    db_size: usize,
    frequent: PatternCounts,
    negative_border: PatternCounts,
}

impl MiningState {
    /// Assembles and validates a state. Fails if any invariant does not
    /// hold (see [`MiningState::validate`]).
    pub fn from_parts(
        params: Params,
        db_size: usize,
        frequent: PatternCounts,
        negative_border: PatternCounts,
    ) -> Result<MiningState> {
        let state = MiningState {
            params,
            db_size,
            frequent,
            negative_border,
        };
        state.validate()?;
        Ok(state)
    }

    /// Assembles a state without validating it. For callers that hold
    /// externally derived counts which are not necessarily realizable as
    /// one log's mining output; such states still merge arithmetically.
    pub fn from_parts_unchecked(
        params: Params,
        db_size: usize,
        frequent: PatternCounts,
        negative_border: PatternCounts,
    ) -> MiningState {
        MiningState {
            params,
            db_size,
            frequent,
            negative_border,
        }
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn db_size(&self) -> usize {
        self.db_size
    }

    pub fn frequent(&self) -> &PatternCounts {
        &self.frequent
    }

    pub fn negative_border(&self) -> &PatternCounts {
        &self.negative_border
    }

    /// Occurrence count at or above which a pattern is frequent here.
    pub fn min_count(&self) -> usize {
        self.params.min_supp.ceil_mul(self.db_size)
    }

    /// Smallest occurrence count kept in the negative border.
    pub fn nbd_floor(&self) -> usize {
        self.params.min_nbd_supp.ceil_mul(self.db_size).max(1)
    }

    pub fn max_len(&self) -> usize {
        self.frequent
            .keys()
            .chain(self.negative_border.keys())
            .map(|s| s.len())
            .max()
            .unwrap_or(0)
    }

    /// Checks every state invariant:
    ///
    /// 1. the frequent set and the border are disjoint;
    /// 2. every frequent count reaches `min_count`;
    /// 3. every border count lies in `[nbd_floor, min_count)`;
    /// 4. every border pattern of length >= 2 has all delete-one
    ///    subsequences frequent;
    /// 5. the frequent set is downward closed under delete-one
    ///    subsequences.
    pub fn validate(&self) -> Result<()> {
        let min_count = self.min_count();
        let nbd_floor = self.nbd_floor();
        let bad = |msg: String| Err(Error::StateInvariant(msg));

        for (seq, &count) in &self.frequent {
            if self.negative_border.contains_key(seq) {
                return bad(format!(
                    "pattern {} is both frequent and in the border",
                    ids(seq)
                ));
            }
            if count < min_count {
                return bad(format!(
                    "frequent pattern {} has count {count} < min_count {min_count}",
                    ids(seq)
                ));
            }
            if seq.len() >= 2 {
                for sub in seq.delete_one_subsequences() {
                    if !self.frequent.contains_key(&sub) {
                        return bad(format!(
                            "frequent pattern {} has non-frequent subsequence {}",
                            ids(seq),
                            ids(&sub)
                        ));
                    }
                }
            }
        }
        for (seq, &count) in &self.negative_border {
            if count < nbd_floor || count >= min_count {
                return bad(format!(
                    "border pattern {} has count {count} outside [{nbd_floor}, {min_count})",
                    ids(seq)
                ));
            }
            if seq.len() >= 2 {
                for sub in seq.delete_one_subsequences() {
                    if !self.frequent.contains_key(&sub) {
                        return bad(format!(
                            "border pattern {} has non-frequent subsequence {}",
                            ids(seq),
                            ids(&sub)
                        ));
                    }
                }
            }
        }
        Ok(())
    }
}

fn ids(seq: &Sequence) -> String {
    let parts: Vec<String> = seq.symbols().iter().map(|s| s.id().to_string()).collect();
    format!("[{}]", parts.join(" "))
}

/// Mines the frequent set and negative border of `log` from scratch.
///
/// Level 1 candidates are all symbols appearing in the log; level `m`
/// candidates come from self-joining the frequent level `m-1`. Each
/// candidate is counted once; counts at or above `min_count` are
/// frequent, counts in the border band are kept in the border, the rest
/// are dropped. The loop ends when a level adds no frequent sequences.
pub fn mine(log: &EventLog, params: &Params) -> MiningState {
    let n = log.len();
    let min_count = params.min_supp.ceil_mul(n);
    let nbd_floor = params.min_nbd_supp.ceil_mul(n).max(1);
    let index = LogIndex::new(log);

    let mut frequent = PatternCounts::new();
    let mut border = PatternCounts::new();

    let alphabet: BTreeSet<Symbol> = log.events().iter().map(|e| e.symbol).collect();
    let mut candidates: BTreeSet<Sequence> =
        alphabet.into_iter().map(Sequence::single).collect();

    while !candidates.is_empty() {
        let mut frequent_level = BTreeSet::new();
        for cand in candidates {
            let count = index.count(&cand, params.window);
            if count >= min_count {
                frequent.insert(cand.clone(), count);
                frequent_level.insert(cand);
            } else if count >= nbd_floor {
                border.insert(cand, count);
            }
        }
        if frequent_level.is_empty() {
            break;
        }
        candidates = self_join_candidates(&frequent_level);
    }

    MiningState {
        params: params.clone(),
        db_size: n,
        frequent,
        negative_border: border,
    }
}

/// Joins a frequent level with itself to produce the next level's
/// candidates: for every ordered pair whose overlap matches (α's tail
/// equals β's head, both of length m-1), emit α extended by β's last
/// symbol, then drop candidates with a delete-one subsequence outside
/// the level. For length-1 input the overlap is empty, so every ordered
/// pair (including a symbol with itself) yields a 2-sequence.
///
/// Panics if the sequences do not all have the same length.
pub fn self_join_candidates(level: &BTreeSet<Sequence>) -> BTreeSet<Sequence> {
    let Some(first) = level.iter().next() else {
        return BTreeSet::new();
    };
    let m1 = first.len();
    assert!(
        level.iter().all(|s| s.len() == m1),
        "self-join level must have uniform length"
    );

    let mut by_prefix: HashMap<&[Symbol], Vec<&Sequence>> = HashMap::new();
    for s in level {
        by_prefix.entry(&s.symbols()[..m1 - 1]).or_default().push(s);
    }

    let mut out = BTreeSet::new();
    for alpha in level {
        let overlap = &alpha.symbols()[1..];
        let Some(betas) = by_prefix.get(overlap) else {
            continue;
        };
        for beta in betas {
            let cand = alpha.extended(beta.last());
            if cand
                .delete_one_subsequences()
                .iter()
                .all(|sub| level.contains(sub))
            {
                out.insert(cand);
            }
        }
    }
    out
}
