//! Decremental pattern maintenance: updating a mined state when a
//! leading time-prefix of the log is deleted.
//!
//! Candidates are the stored frequent and border sequences. A sequence's
//! count in the shrunken log is its stored count minus the occurrences
//! the deleted prefix takes with it, so one scan of the prefix replaces
//! a scan of the whole remaining log. A necessary-condition filter
//! (`min_freq`) skips border sequences whose support in the original log
//! is already too low to ever reach the frequency threshold after the
//! deletion.
//!
//! Deletion is lossy by design: a sequence that was never a candidate in
//! the original log cannot be recovered, however frequent it becomes in
//! the remainder. [`recall_note`] quantifies that gap against a fresh
//! re-mine.

use std::fmt;

use crate::error::{Error, Result};
use crate::fraction::Fraction;
use crate::miner::{mine, MiningState, Params, PatternCounts};
use crate::model::{EventLog, Sequence, SymbolTable};
use crate::occurrence::{LogIndex, Window};

/// Result of a decremental update.
#[derive(Debug, Clone)]
pub struct DeletionReport {
    pub state: MiningState,
    /// The necessary support level in the original log for a sequence to
    /// stay frequent after the deletion.
    pub min_freq: Fraction,
    pub candidates_examined: usize,
    pub skipped_by_theorem1: usize,
    pub dropped_by_closure: usize,
}

/// Support a sequence must have had in the original log of `db_size`
/// events to be frequent after deleting `dd_size` of them:
/// `min_supp * (db_size - dd_size) / db_size`, exact.
pub fn min_freq(params: &Params, db_size: usize, dd_size: usize) -> Result<Fraction> {
    if db_size == 0 {
        return Err(Error::InvalidParams(
            "min_freq is undefined for an empty log".into(),
        ));
    }
    if dd_size > db_size {
        return Err(Error::InvalidParams(format!(
            "deleted prefix ({dd_size} events) exceeds the log ({db_size} events)"
        )));
    }
    params
        .min_supp()
        .scale((db_size - dd_size) as u64, db_size as u64)
}

/// Updates `state_db` (mined from `full_db_log`) for the deletion of
/// `dd_log`, which must be exactly the time-prefix split off
/// `full_db_log` (see [`EventLog::split_prefix`]).
///
/// Note the filter applies even to a no-op deletion: with an empty
/// prefix, `min_freq` equals `min_supp`, and every border sequence sits
/// below that by definition, so the frequent set carries over unchanged
/// while the border is shed. Setting `min_nbd_supp` to the printed
/// `min_freq` when re-mining keeps later borders filter-proof.
pub fn dus_update(
    state_db: &MiningState,
    dd_log: &EventLog,
    full_db_log: &EventLog,
    params: &Params,
) -> Result<DeletionReport> {
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
    check_prefix(dd_log, full_db_log)?;

    let db_size = full_db_log.len();
    let cut = dd_log.len();
    let u_size = db_size - cut;
    let threshold = min_freq(params, db_size, cut)?;
    let min_count_u = params.min_supp().ceil_mul(u_size);
    let nbd_floor_u = params.min_nbd_supp().ceil_mul(u_size).max(1);
    let window = params.window();
    let full_index = LogIndex::new(full_db_log);

    let mut frequent_u = PatternCounts::new();
    let mut border_u = PatternCounts::new();
    let mut candidates_examined = 0;
    let mut skipped_by_theorem1 = 0;

    let candidates = state_db
        .frequent()
        .iter()
        .chain(state_db.negative_border().iter());
    for (seq, &stored) in candidates {
        // Frequent sequences pass the necessary condition automatically
        // (min_supp >= min_freq); border sequences below it cannot
        // become frequent and are skipped without counting.
        if state_db.negative_border().contains_key(seq) && !threshold.le_ratio(stored, db_size) {
            skipped_by_theorem1 += 1;
            continue;
        }
        candidates_examined += 1;
        let removed = removed_occurrences(&full_index, seq, cut, window);
        let u_count = stored.checked_sub(removed).ok_or_else(|| {
            Error::InternalConsistency(format!(
                "stored count {stored} smaller than {removed} occurrences removed by the deletion"
            ))
        })?;
        if u_count >= min_count_u {
            frequent_u.insert(seq.clone(), u_count);
        } else if u_count >= nbd_floor_u {
            border_u.insert(seq.clone(), u_count);
        }
    }

    // Deletion can defrequent a subsequence while a longer candidate
    // survives the band numerically; sweep those out, shortest first.
    let mut dropped_by_closure = 0;
    let max_len = frequent_u
        .keys()
        .chain(border_u.keys())
        .map(|s| s.len())
        .max()
        .unwrap_or(0);
    for len in 2..=max_len {
        let doomed: Vec<Sequence> = frequent_u
            .keys()
            .filter(|s| {
                s.len() == len
                    && s.delete_one_subsequences()
                        .iter()
                        .any(|sub| !frequent_u.contains_key(sub))
            })
            .cloned()
            .collect();
        for seq in doomed {
            frequent_u.remove(&seq);
            dropped_by_closure += 1;
        }
    }
    let doomed: Vec<Sequence> = border_u
        .keys()
        .filter(|s| {
            s.len() >= 2
                && s.delete_one_subsequences()
                    .iter()
                    .any(|sub| !frequent_u.contains_key(sub))
        })
        .cloned()
        .collect();
    for seq in doomed {
        border_u.remove(&seq);
        dropped_by_closure += 1;
    }

    let state = MiningState::from_parts(params.clone(), u_size, frequent_u, border_u)?;
    Ok(DeletionReport {
        state,
        min_freq: threshold,
        candidates_examined,
        skipped_by_theorem1,
        dropped_by_closure,
    })
}

/// Occurrences of `seq` that deleting the first `cut` events removes.
///
/// Whole leading segments lose their full counts. The segment containing
/// the cut loses the difference between its count and its surviving
/// tail's count, which makes the subtraction exact even when the cut
/// falls inside a segment (an occurrence spanning the cut is removed,
/// though no event of its tail part is).
fn removed_occurrences(full_index: &LogIndex<'_>, seq: &Sequence, cut: usize, w: Window) -> usize {
    let mut removed = 0;
    for &(lo, hi) in full_index.log().segment_bounds() {
        if hi <= cut {
            removed += full_index.count_range(seq, w, lo, hi);
        } else if lo < cut {
            removed += full_index.count_range(seq, w, lo, hi)
                - full_index.count_range(seq, w, cut, hi);
            break;
        } else {
            break;
        }
    }
    removed
}

/// Verifies that `dd` is the exact prefix split of `full`: same leading
/// events, and segment boundaries that agree with `full`'s up to the
/// cut.
fn check_prefix(dd: &EventLog, full: &EventLog) -> Result<()> {
    let cut = dd.len();
    if cut > full.len() {
        return Err(Error::NotAPrefix(format!(
            "deleted log has {cut} events, base log only {}",
            full.len()
        )));
    }
    if dd.events() != &full.events()[..cut] {
        return Err(Error::NotAPrefix(
            "leading events differ (timestamp or symbol mismatch)".into(),
        ));
    }
    let mut expected = Vec::new();
    for &(lo, hi) in full.segment_bounds() {
        if hi <= cut {
            expected.push((lo, hi));
        } else {
            if lo < cut {
                expected.push((lo, cut));
            }
            break;
        }
    }
    if dd.segment_bounds() != expected {
        return Err(Error::NotAPrefix(format!(
            "segment boundaries differ: expected {:?}, got {:?}",
            expected,
            dd.segment_bounds()
        )));
    }
    Ok(())
}

/// Frequent sequences of a fresh re-mine of `remaining` that the
/// maintained state misses. Deletion maintenance cannot recover a
/// sequence that was never a candidate in the original log, so a
/// non-empty note is expected behavior, not an error.
#[derive(Debug, Clone, Default)]
pub struct RecallNote {
    pub missed: Vec<(Sequence, usize)>,
}

impl RecallNote {
    pub fn is_complete(&self) -> bool {
        self.missed.is_empty()
    }

    pub fn render(&self, table: &SymbolTable) -> String {
        if self.missed.is_empty() {
            return "recall: complete (no frequent sequence missed)".to_string();
        }
        let items: Vec<String> = self
            .missed
            .iter()
            .map(|(s, c)| format!("{}:{}", s.display(table), c))
            .collect();
        format!(
            "recall: {} frequent sequence(s) not recoverable from the stored state: {}",
            self.missed.len(),
            items.join(" ")
        )
    }
}

impl fmt::Display for RecallNote {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.missed.is_empty() {
            return f.write_str("recall: complete (no frequent sequence missed)");
        }
        write!(
            f,
            "recall: {} frequent sequence(s) not recoverable from the stored state",
            self.missed.len()
        )
    }
}

/// Re-mines `remaining` under the state's parameters and reports every
/// frequent sequence the maintained state lacks.
pub fn recall_note(state: &MiningState, remaining: &EventLog) -> RecallNote {
    let remined = mine(remaining, state.params());
    let missed = remined
        .frequent()
        .iter()
        .filter(|(seq, _)| !state.frequent().contains_key(*seq))
        .map(|(seq, &count)| (seq.clone(), count))
        .collect();
    RecallNote { missed }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{parse_log, Event, EventLog};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn params(ms: &str, mn: &str) -> Params {
        Params::new(ms.parse().unwrap(), mn.parse().unwrap(), Window::Unbounded).unwrap()
    }

    #[test]
    fn min_freq_examples() {
        let p = params("0.05", "0.01");
        assert_eq!(
            min_freq(&p, 100, 20).unwrap(),
            "0.04".parse::<Fraction>().unwrap()
        );
        assert_eq!(
            min_freq(&p, 100, 0).unwrap(),
            "0.05".parse::<Fraction>().unwrap()
        );
        assert_eq!(min_freq(&p, 100, 100).unwrap(), Fraction::ZERO);
        assert!(min_freq(&p, 100, 101).is_err());
        assert!(min_freq(&p, 0, 0).is_err());
    }

    #[test]
    fn empty_deletion_keeps_frequent_set() {
        let mut t = SymbolTable::new();
        let log = parse_log("1,a\n2,b\n3,a\n4,b\n5,c\n6,a", &mut t).unwrap();
        let p = params("0.3", "0.1");
        let state = mine(&log, &p);
        let report = dus_update(&state, &EventLog::empty(), &log, &p).unwrap();
        // No occurrence changes: the frequent set carries over count for
        // count. The border does not: min_freq equals min_supp here, so
        // the necessary-condition filter sheds every border sequence.
        assert_eq!(report.state.frequent(), state.frequent());
        assert_eq!(report.state.db_size(), state.db_size());
        assert!(report.state.negative_border().is_empty());
        assert_eq!(report.skipped_by_theorem1, state.negative_border().len());
        assert_eq!(report.dropped_by_closure, 0);
    }

    /// Subtraction arithmetic: a pattern with 10 occurrences in a
    /// 100-event log, 3 of them in the 20-event deleted prefix, keeps
    /// 7 >= ceil(0.05 * 80) = 4 and stays frequent.
    #[test]
    fn subtraction_keeps_frequent_pattern() {
        let mut events = Vec::new();
        let mut t = SymbolTable::new();
        let (a, b, x, y) = (t.intern("a"), t.intern("b"), t.intern("x"), t.intern("y"));
        let mut ts = 0u64;
        let push = |events: &mut Vec<Event>, symbol, ts: &mut u64| {
            events.push(Event { symbol, timestamp: *ts });
            *ts += 1;
        };
        for _ in 0..3 {
            push(&mut events, a, &mut ts);
            push(&mut events, b, &mut ts);
        }
        for _ in 0..14 {
            push(&mut events, x, &mut ts);
        }
        for _ in 0..7 {
            push(&mut events, a, &mut ts);
            push(&mut events, b, &mut ts);
        }
        for _ in 0..66 {
            push(&mut events, y, &mut ts);
        }
        let log = EventLog::from_events(events);
        assert_eq!(log.len(), 100);
        let p = params("0.05", "0.01");
        let state = mine(&log, &p);
        let ab = Sequence::new(vec![a, b]);
        assert_eq!(state.frequent().get(&ab), Some(&10));

        let (dd, remaining) = log.split_prefix(20);
        assert_eq!(dd.len(), 20);
        let report = dus_update(&state, &dd, &log, &p).unwrap();
        assert_eq!(report.min_freq, "0.04".parse::<Fraction>().unwrap());
        assert_eq!(report.state.frequent().get(&ab), Some(&7));
        // Exactness against a fresh count of the remainder.
        assert_eq!(
            crate::occurrence::count_occurrences(&ab, &remaining, Window::Unbounded),
            7
        );
    }

    #[test]
    fn theorem1_skips_low_support_border() {
        // 20 events; min_supp 0.4 puts min_count at 8, min_freq after
        // deleting half at 0.2. Symbols living only in the deleted half
        // have support 0.15 < 0.2 and are skipped without counting.
        let mut t = SymbolTable::new();
        let text = "0,z\n1,z\n2,z\n3,a\n4,a\n5,a\n6,a\n7,x\n8,x\n9,x\n\
                    10,a\n11,a\n12,a\n13,a\n14,w\n15,w\n16,w\n17,w\n18,w\n19,w";
        let log = parse_log(text, &mut t).unwrap();
        let p = params("0.4", "0.1");
        let state = mine(&log, &p);
        let z = Sequence::single(t.lookup("z").unwrap());
        let x = Sequence::single(t.lookup("x").unwrap());
        let w = Sequence::single(t.lookup("w").unwrap());
        assert!(state.negative_border().contains_key(&z));
        assert!(state.negative_border().contains_key(&x));

        let (dd, remaining) = log.split_prefix(10);
        let report = dus_update(&state, &dd, &log, &p).unwrap();
        // z (3/20) and x (3/20) fall below min_freq 0.2.
        assert_eq!(report.skipped_by_theorem1, 2);
        assert!(!report.state.frequent().contains_key(&z));
        assert!(!report.state.negative_border().contains_key(&z));
        // w was border (6 < 8) and is promoted (6 >= ceil(0.4*10)).
        assert_eq!(report.state.frequent().get(&w), Some(&6));

        // Soundness: everything reported frequent matches the re-mine.
        let remined = mine(&remaining, &p);
        for (seq, count) in report.state.frequent() {
            assert_eq!(remined.frequent().get(seq), Some(count));
        }
    }

    #[test]
    fn closure_sweep_drops_orphaned_border_pattern() {
        // a,b stays in the border band numerically after the deletion,
        // but its subsequence a drops out of the frequent set; the sweep
        // must remove a,b.
        let mut t = SymbolTable::new();
        let text = "0,a\n1,a\n2,b\n3,a\n4,b\n5,a\n6,b\n7,b\n8,b\n9,b\n10,b\n11,b";
        let log = parse_log(text, &mut t).unwrap();
        let p = params("0.25", "0");
        let state = mine(&log, &p);
        let a = Sequence::single(t.lookup("a").unwrap());
        let ab = Sequence::new(vec![t.lookup("a").unwrap(), t.lookup("b").unwrap()]);
        assert_eq!(state.frequent().get(&a), Some(&4));
        assert_eq!(state.frequent().get(&ab), Some(&3));

        let (dd, _) = log.split_prefix(2);
        assert_eq!(dd.len(), 2);
        let report = dus_update(&state, &dd, &log, &p).unwrap();
        // a keeps 2 of 4 occurrences: below min_count 3, into the border.
        assert_eq!(report.state.negative_border().get(&a), Some(&2));
        // a,b keeps 2 occurrences, numerically border, but its
        // subsequence is no longer frequent.
        assert!(!report.state.frequent().contains_key(&ab));
        assert!(!report.state.negative_border().contains_key(&ab));
        assert!(report.dropped_by_closure >= 1);
        report.state.validate().unwrap();
    }

    #[test]
    fn rejects_non_prefix() {
        let mut t = SymbolTable::new();
        let log = parse_log("1,a\n2,b\n3,c\n4,d", &mut t).unwrap();
        let p = params("0.5", "0.1");
        let state = mine(&log, &p);
        let other = parse_log("1,a\n2,c", &mut t).unwrap();
        assert!(matches!(
            dus_update(&state, &other, &log, &p),
            Err(Error::NotAPrefix(_))
        ));
        let too_long = parse_log("1,a\n2,b\n3,c\n4,d\n5,e", &mut t).unwrap();
        assert!(matches!(
            dus_update(&state, &too_long, &log, &p),
            Err(Error::NotAPrefix(_))
        ));
    }

    #[test]
    fn sound_and_conditionally_complete_on_random_logs() {
        let names = ["a", "b", "c", "d", "e"];
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for round in 0..40 {
            let mut t = SymbolTable::new();
            let syms: Vec<_> = names.iter().map(|n| t.intern(n)).collect();
            // Two to four batches so cuts can land on and between
            // segment boundaries.
            let mut log = EventLog::empty();
            let mut ts = 0u64;
            for _ in 0..rng.random_range(2..=4) {
                let len = rng.random_range(10..40);
                let batch = EventLog::from_events(
                    (0..len)
                        .map(|_| {
                            ts += rng.random_range(1..3) as u64;
                            Event {
                                symbol: syms[rng.random_range(0..syms.len())],
                                timestamp: ts,
                            }
                        })
                        .collect(),
                );
                log = log.concat(&batch).unwrap();
            }
            let ms = ["0.15", "0.2", "0.3"][round % 3];
            let mn = ["0", "0.05"][round % 2];
            let p = params(ms, mn);
            let state = mine(&log, &p);
            let cutoff = rng.random_range(0..=ts + 1);
            let (dd, remaining) = log.split_prefix(cutoff);
            if remaining.is_empty() {
                continue;
            }
            let report = dus_update(&state, &dd, &log, &p).unwrap();
            let remined = mine(&remaining, &p);

            // Soundness: no false frequents, exact counts.
            for (seq, count) in report.state.frequent() {
                assert_eq!(
                    remined.frequent().get(seq),
                    Some(count),
                    "round {round}: {:?} wrongly frequent",
                    seq.symbols()
                );
            }
            // Conditional completeness: candidates passing the filter
            // that are truly frequent must be found.
            let threshold = report.min_freq;
            for (seq, count) in remined.frequent() {
                let stored = state
                    .frequent()
                    .get(seq)
                    .or_else(|| state.negative_border().get(seq));
                if let Some(&stored) = stored {
                    if threshold.le_ratio(stored, log.len()) {
                        assert_eq!(
                            report.state.frequent().get(seq),
                            Some(count),
                            "round {round}: candidate {:?} missed",
                            seq.symbols()
                        );
                    }
                }
            }
            report.state.validate().unwrap();
        }
    }
}
