//! Incremental pattern maintenance: updating a mined state when a
//! strictly later batch of events is appended.
//!
//! The update never re-mines the combined log. It re-classifies the
//! stored frequent and border sequences of both sides against the
//! updated log U level by level, fetching counts from the stored states
//! wherever possible and scanning a log only for the side a sequence is
//! missing from. After each level, cross-join candidates built from the
//! previous frequent level of U are counted to complete the border.
//!
//! Every sequence frequent in U is frequent on at least one side, so
//! reclassifying the two stored frequent sets reconstructs the frequent
//! set of U exactly; the cross-join phase can only ever add border
//! entries.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use crate::candgen::{count_and_band, cross_join};
use crate::error::{Error, Result};
use crate::miner::{level, mine, MiningState, Params, PatternCounts};
use crate::model::{EventLog, Sequence};
use crate::occurrence::LogIndex;

/// Work done in one classification phase, summed over levels.
/// `processed` sequences were classified; each had its missing-side
/// count either fetched from a stored state or counted in a log, so
/// `processed == fetched_stored + scanned_log`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PhaseStats {
    pub processed: usize,
    pub fetched_stored: usize,
    pub scanned_log: usize,
    pub wall: Duration,
}

impl PhaseStats {
    fn record(&mut self, fetched: bool) {
        self.processed += 1;
        if fetched {
            self.fetched_stored += 1;
        } else {
            self.scanned_log += 1;
        }
    }
}

/// Work done by the cross-join extension phases.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ExtensionStats {
    pub generated: usize,
    pub pruned: usize,
    pub counted: usize,
    pub wall: Duration,
}

/// Instrumentation for one incremental update.
#[derive(Debug, Clone, Default)]
pub struct UpdateCounters {
    /// Mining the increment batch itself.
    pub mine_increment_wall: Duration,
    /// Base-side frequent sequences reclassified against U.
    pub base_frequent: PhaseStats,
    /// Increment-side frequent sequences not frequent in the base.
    pub increment_frequent: PhaseStats,
    /// Base-side border sequences not frequent in the increment.
    pub base_border: PhaseStats,
    /// Increment-side border sequences unseen by the base state.
    pub increment_border: PhaseStats,
    pub extension: ExtensionStats,
    pub total_wall: Duration,
}

/// Result of an incremental update: the new state over U plus counters.
#[derive(Debug, Clone)]
pub struct UpdateReport {
    pub state: MiningState,
    pub counters: UpdateCounters,
}

/// Updates `state_db` (mined from `full_db_log`) for the appended batch
/// `db_log`, producing the state of the concatenated log.
///
/// `params` must equal the state's parameters and `full_db_log` must be
/// the log the state was mined from; the increment must start no
/// earlier than the base log ends.
pub fn ius_update(
    state_db: &MiningState,
    db_log: &EventLog,
    full_db_log: &EventLog,
    params: &Params,
) -> Result<UpdateReport> {
    if params != state_db.params() {
        return Err(Error::ParamMismatch(format!(
            "state was mined with min_supp {}, min_nbd_supp {}, window {}",
            state_db.params().min_supp(),
            state_db.params().min_nbd_supp(),
            state_db.params().window()
        )));
    }
    if full_db_log.len() != state_db.db_size() {
        return Err(Error::SizeMismatch {
            expected: state_db.db_size(),
            actual: full_db_log.len(),
        });
    }
    let total_start = Instant::now();
    let u = full_db_log.concat(db_log)?;
    let u_size = u.len();
    let min_count_u = params.min_supp().ceil_mul(u_size);
    let nbd_floor_u = params.min_nbd_supp().ceil_mul(u_size).max(1);

    let mut counters = UpdateCounters::default();

    let mine_start = Instant::now();
    let state_inc = mine(db_log, params);
    counters.mine_increment_wall = mine_start.elapsed();

    let u_index = LogIndex::new(&u);
    let inc_index = LogIndex::new(db_log);
    let base_index = LogIndex::new(full_db_log);

    // Working copies support the prune cascade; membership tests and
    // count fetches go against the original states, whose counts stay
    // valid throughout.
    let mut work_base_l = state_db.frequent().clone();
    let mut work_base_n = state_db.negative_border().clone();
    let mut work_inc_l = state_inc.frequent().clone();
    let mut work_inc_n = state_inc.negative_border().clone();

    let mut frequent_u = PatternCounts::new();
    let mut border_u = PatternCounts::new();

    let window = params.window();
    let mut m = 1;
    loop {
        let frequent_before = frequent_u.len();

        // Base-side frequent sequences, level m.
        let phase_start = Instant::now();
        for (seq, base_count) in snapshot(&work_base_l, m) {
            if !subs_frequent(&seq, m, &frequent_u) {
                continue;
            }
            let (inc_count, fetched) = lookup(&state_inc, &seq)
                .map(|c| (c, true))
                .unwrap_or_else(|| (inc_index.count(&seq, window), false));
            counters.base_frequent.record(fetched);
            let total = base_count + inc_count;
            if total >= min_count_u {
                frequent_u.insert(seq, total);
            } else {
                prune_with_supersequences(&mut work_base_l, &mut work_base_n, &seq);
                if total >= nbd_floor_u {
                    insert_border(&mut border_u, seq, total);
                }
            }
        }
        counters.base_frequent.wall += phase_start.elapsed();

        // Increment-side frequent sequences not frequent in the base.
        let phase_start = Instant::now();
        for (seq, inc_count) in snapshot(&work_inc_l, m) {
            if state_db.frequent().contains_key(&seq) {
                continue;
            }
            if !subs_frequent(&seq, m, &frequent_u) {
                continue;
            }
            let (base_count, fetched) = match state_db.negative_border().get(&seq) {
                Some(&c) => (c, true),
                None => (base_index.count(&seq, window), false),
            };
            counters.increment_frequent.record(fetched);
            let total = base_count + inc_count;
            if total >= min_count_u {
                frequent_u.insert(seq, total);
            } else {
                prune_with_supersequences(&mut work_inc_l, &mut work_inc_n, &seq);
                if total >= nbd_floor_u {
                    insert_border(&mut border_u, seq, total);
                }
            }
        }
        counters.increment_frequent.wall += phase_start.elapsed();

        // Base-side border sequences not frequent in the increment.
        // These cannot be frequent in U (not frequent on either side),
        // so they feed the border only. A sequence sitting in both
        // borders is classified here once, from the two stored counts.
        let phase_start = Instant::now();
        for (seq, base_count) in snapshot(&work_base_n, m) {
            if state_inc.frequent().contains_key(&seq) {
                continue;
            }
            if !subs_frequent(&seq, m, &frequent_u) {
                continue;
            }
            let (inc_count, fetched) = match state_inc.negative_border().get(&seq) {
                Some(&c) => (c, true),
                None => (inc_index.count(&seq, window), false),
            };
            counters.base_border.record(fetched);
            let total = base_count + inc_count;
            if total >= min_count_u {
                return Err(Error::InternalConsistency(format!(
                    "border sequence {:?} totals {total} >= min_count {min_count_u} in U \
                     without being frequent on either side",
                    ids(&seq)
                )));
            }
            if total >= nbd_floor_u {
                insert_border(&mut border_u, seq, total);
            }
        }
        counters.base_border.wall += phase_start.elapsed();

        // Increment-side border sequences the base state has never seen.
        let phase_start = Instant::now();
        for (seq, inc_count) in snapshot(&work_inc_n, m) {
            if state_db.frequent().contains_key(&seq)
                || state_db.negative_border().contains_key(&seq)
            {
                continue;
            }
            if !subs_frequent(&seq, m, &frequent_u) {
                continue;
            }
            let base_count = base_index.count(&seq, window);
            counters.increment_border.record(false);
            let total = base_count + inc_count;
            if total >= min_count_u {
                return Err(Error::InternalConsistency(format!(
                    "border sequence {:?} totals {total} >= min_count {min_count_u} in U \
                     without being frequent on either side",
                    ids(&seq)
                )));
            }
            if total >= nbd_floor_u {
                insert_border(&mut border_u, seq, total);
            }
        }
        counters.increment_border.wall += phase_start.elapsed();

        // Extension: cross-join the previous frequent level of U. Runs
        // after this level's classification so the already-frequent
        // filter sees the complete level.
        if m >= 2 {
            let phase_start = Instant::now();
            let prev: BTreeSet<Sequence> =
                level(&frequent_u, m - 1).map(|(s, _)| s.clone()).collect();
            let base_side: BTreeSet<Sequence> = prev
                .iter()
                .filter(|s| state_db.frequent().contains_key(*s))
                .cloned()
                .collect();
            let inc_side: BTreeSet<Sequence> = prev
                .iter()
                .filter(|s| state_inc.frequent().contains_key(*s))
                .cloned()
                .collect();
            let current: BTreeSet<Sequence> =
                level(&frequent_u, m).map(|(s, _)| s.clone()).collect();
            let batch = cross_join(&base_side, &inc_side, &prev, &current);
            counters.extension.generated += batch.generated;
            counters.extension.pruned += batch.pruned;
            counters.extension.counted += batch.len();
            let banded = count_and_band(&batch, &u_index, params)?;
            for (seq, count) in banded {
                insert_border(&mut border_u, seq, count);
            }
            counters.extension.wall += phase_start.elapsed();
        }

        if frequent_u.len() == frequent_before {
            break;
        }
        m += 1;
    }

    let state = MiningState::from_parts(params.clone(), u_size, frequent_u, border_u)?;
    counters.total_wall = total_start.elapsed();
    Ok(UpdateReport { state, counters })
}

fn ids(seq: &Sequence) -> Vec<u32> {
    seq.symbols().iter().map(|s| s.id()).collect()
}

/// Level-m entries of a working map, materialized so the map can be
/// pruned while classifying.
fn snapshot(map: &PatternCounts, m: usize) -> Vec<(Sequence, usize)> {
    level(map, m).map(|(s, c)| (s.clone(), c)).collect()
}

fn lookup(state: &MiningState, seq: &Sequence) -> Option<usize> {
    state
        .frequent()
        .get(seq)
        .or_else(|| state.negative_border().get(seq))
        .copied()
}

/// Gate: all delete-one subsequences classified frequent in U. Level-1
/// sequences have no proper subsequences to check.
fn subs_frequent(seq: &Sequence, m: usize, frequent_u: &PatternCounts) -> bool {
    m == 1
        || seq
            .delete_one_subsequences()
            .iter()
            .all(|sub| frequent_u.contains_key(sub))
}

/// Drops a sequence that failed the frequency test, and every stored
/// supersequence of it, from the working sets. Supersequences cannot be
/// frequent in U either, so skipping them saves their classification;
/// nothing already emitted is touched.
fn prune_with_supersequences(l: &mut PatternCounts, n: &mut PatternCounts, seq: &Sequence) {
    l.remove(seq);
    let is_super = |k: &Sequence| k.len() > seq.len() && seq.is_subsequence_of(k);
    l.retain(|k, _| !is_super(k));
    n.retain(|k, _| !is_super(k));
}

/// Border inserts are idempotent: a sequence can be reached by more
/// than one phase, always with the same exact count in U.
fn insert_border(border: &mut PatternCounts, seq: Sequence, count: usize) {
    if let Some(prev) = border.insert(seq, count) {
        debug_assert_eq!(prev, count);
    }
}
