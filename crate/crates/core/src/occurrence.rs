//! Occurrence counting: how many times a sequence occurs in a log.
//!
//! The counting rule is greedy leftmost non-overlapping matching within
//! one segment:
//!
//! * an occurrence is a strictly increasing index tuple matching the
//!   sequence in order whose last-minus-first timestamp fits the window;
//! * every element is matched at the earliest legal position after the
//!   previous one, and after an occurrence completes the scan restarts
//!   strictly after its last index;
//! * occurrences never cross a segment boundary; per-segment counts sum.
//!
//! This rule keeps counts monotone under subsequences (a shorter pattern
//! never occurs fewer times than a longer one containing it) and exactly
//! additive across concatenated logs, which the update algorithms rely
//! on.
//!
//! Two implementations are kept deliberately separate: the posting-list
//! counter used everywhere, and a naive per-segment simulation that
//! shares no code or data structures with it and exists to check it.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::fraction::Fraction;
use crate::model::{EventLog, Sequence};

/// Bound on one occurrence's time extent (last minus first timestamp).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Window {
    Unbounded,
    Span(u64),
}

impl Window {
    /// Bounded window; the span must be positive.
    pub fn bounded(span: u64) -> Result<Window> {
        if span == 0 {
            return Err(Error::InvalidParams("window span must be positive".into()));
        }
        Ok(Window::Span(span))
    }

    pub fn admits(self, dt: u64) -> bool {
        match self {
            Window::Unbounded => true,
            Window::Span(span) => dt <= span,
        }
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Window::Unbounded => f.write_str("inf"),
            Window::Span(s) => write!(f, "{s}"),
        }
    }
}

impl FromStr for Window {
    type Err = Error;

    fn from_str(text: &str) -> Result<Window> {
        let t = text.trim();
        if t == "inf" {
            return Ok(Window::Unbounded);
        }
        let span: u64 = t.parse().map_err(|_| {
            Error::InvalidParams(format!("invalid window {text:?}: expected `inf` or a positive integer"))
        })?;
        Window::bounded(span)
    }
}

/// Smallest occurrence count that makes a sequence frequent:
/// `ceil(min_supp * n)`, computed exactly.
pub fn min_count(min_supp: Fraction, n: usize) -> Result<usize> {
    if min_supp.is_zero() || min_supp > Fraction::ONE {
        return Err(Error::InvalidParams(format!(
            "min_supp must be in (0, 1], got {min_supp}"
        )));
    }
    Ok(min_supp.ceil_mul(n))
}

/// Per-symbol posting lists over one log, shared by all candidate counts
/// against that log. Building it costs one pass; each count is then a
/// chain of binary searches.
pub struct LogIndex<'a> {
    log: &'a EventLog,
    postings: Vec<Vec<u32>>,
}

impl<'a> LogIndex<'a> {
    pub fn new(log: &'a EventLog) -> LogIndex<'a> {
        let max_sym = log
            .events()
            .iter()
            .map(|e| e.symbol.index())
            .max()
            .map_or(0, |m| m + 1);
        let mut postings = vec![Vec::new(); max_sym];
        for (i, e) in log.events().iter().enumerate() {
            postings[e.symbol.index()].push(i as u32);
        }
        LogIndex { log, postings }
    }

    pub fn log(&self) -> &'a EventLog {
        self.log
    }

    /// First index of `sym` in `[from, hi)`, if any.
    fn next(&self, sym: usize, from: usize, hi: usize) -> Option<usize> {
        let list = self.postings.get(sym)?;
        let at = list.partition_point(|&i| (i as usize) < from);
        let idx = *list.get(at)? as usize;
        (idx < hi).then_some(idx)
    }

    pub fn count(&self, s: &Sequence, w: Window) -> usize {
        self.log
            .segment_bounds()
            .iter()
            .map(|&(lo, hi)| self.count_range(s, w, lo, hi))
            .sum()
    }

    /// Greedy count restricted to event indices `[lo, hi)`, treated as
    /// one segment.
    pub fn count_range(&self, s: &Sequence, w: Window, lo: usize, hi: usize) -> usize {
        let events = self.log.events();
        let syms = s.symbols();
        let mut count = 0;
        let mut scan = lo;
        'scan: while scan < hi {
            let Some(anchor) = self.next(syms[0].index(), scan, hi) else {
                break;
            };
            let t0 = events[anchor].timestamp;
            let mut prev = anchor;
            for &sym in &syms[1..] {
                match self.next(sym.index(), prev + 1, hi) {
                    // No later start can find this element either.
                    None => break 'scan,
                    Some(j) => {
                        if !w.admits(events[j].timestamp - t0) {
                            // Timestamps only grow, so nothing anchored
                            // here can fit the window; try the next start.
                            scan = anchor + 1;
                            continue 'scan;
                        }
                        prev = j;
                    }
                }
            }
            count += 1;
            scan = prev + 1;
        }
        count
    }
}

/// Greedy leftmost non-overlapping occurrence count of `s` in `log`.
pub fn count_occurrences(s: &Sequence, log: &EventLog, w: Window) -> usize {
    LogIndex::new(log).count(s, w)
}

/// Reference counter: a direct per-segment simulation of the matching
/// rule. Linear rescans, no index, no shortcuts; every failed attempt
/// simply retries from the next position. Intended for small inputs and
/// for checking [`count_occurrences`].
pub fn count_occurrences_oracle(s: &Sequence, log: &EventLog, w: Window) -> usize {
    let syms = s.symbols();
    let mut total = 0;
    for seg in log.segments() {
        let mut scan = 0;
        while scan < seg.len() {
            // Anchor: earliest start of the first element at or after scan.
            let mut anchor = scan;
            while anchor < seg.len() && seg[anchor].symbol != syms[0] {
                anchor += 1;
            }
            if anchor == seg.len() {
                break;
            }
            // Extend one element at a time, each at its earliest match.
            let mut positions = vec![anchor];
            let mut pos = anchor + 1;
            for &sym in &syms[1..] {
                while pos < seg.len()
                    && !(seg[pos].symbol == sym
                        && w.admits(seg[pos].timestamp - seg[anchor].timestamp))
                {
                    pos += 1;
                }
                if pos == seg.len() {
                    break;
                }
                positions.push(pos);
                pos += 1;
            }
            if positions.len() == syms.len() {
                total += 1;
                scan = positions.last().unwrap() + 1;
            } else {
                scan = anchor + 1;
            }
        }
    }
    total
}
