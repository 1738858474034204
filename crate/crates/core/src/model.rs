//! Event, log, and sequence domain types shared by every mining stage.
//!
//! A log is an ordered list of timestamped events partitioned into
//! contiguous segments (batch boundaries). Occurrence counting never
//! crosses a segment boundary, which is what makes counts additive when
//! logs are concatenated and subtractable when a leading batch is
//! deleted.
//!
//! Logs and sequences are immutable after construction and safe to share
//! across threads for read-only counting.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

/// Interned alarm-type identifier: dense, starting at zero, unique within
/// one [`SymbolTable`]. Comparisons and hashing use the id only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(u32);

impl Symbol {
    pub fn new(id: u32) -> Symbol {
        Symbol(id)
    }

    pub fn id(self) -> u32 {
        self.0
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Bijective name/id map. Ids are assigned densely in first-seen order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SymbolTable {
    names: Vec<String>,
    index: HashMap<String, Symbol>,
}

impl SymbolTable {
    pub fn new() -> SymbolTable {
        SymbolTable::default()
    }

    /// Returns the existing id for `name` or assigns the next dense one.
    pub fn intern(&mut self, name: &str) -> Symbol {
        if let Some(&sym) = self.index.get(name) {
            return sym;
        }
        let sym = Symbol(self.names.len() as u32);
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), sym);
        sym
    }

    pub fn lookup(&self, name: &str) -> Option<Symbol> {
        self.index.get(name).copied()
    }

    /// Panics if `sym` was not produced by this table.
    pub fn name(&self, sym: Symbol) -> &str {
        &self.names[sym.index()]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    /// Names in id order.
    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.names.iter().map(|s| s.as_str())
    }
}

/// One timestamped event. The time unit is opaque: only order and
/// differences matter to the mining algorithms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Event {
    pub symbol: Symbol,
    pub timestamp: u64,
}

/// Ordered event list partitioned into contiguous segments.
///
/// Invariants: events are sorted by timestamp within each segment, the
/// segments are contiguous, non-overlapping and cover the whole list,
/// and consecutive segments are time-ordered (every constructor enforces
/// this). Empty segments are never stored; an empty log has none.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EventLog {
    events: Vec<Event>,
    segments: Vec<(usize, usize)>,
}

impl EventLog {
    pub fn empty() -> EventLog {
        EventLog::default()
    }

    /// Builds a single-segment log, stably sorting by timestamp.
    /// Events with equal timestamps keep their input order.
    pub fn from_events(mut events: Vec<Event>) -> EventLog {
        events.sort_by_key(|e| e.timestamp);
        let segments = if events.is_empty() {
            Vec::new()
        } else {
            vec![(0, events.len())]
        };
        EventLog { events, segments }
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    /// Half-open `(start, end)` index ranges, one per segment, in order.
    pub fn segment_bounds(&self) -> &[(usize, usize)] {
        &self.segments
    }

    pub fn segments(&self) -> impl Iterator<Item = &[Event]> {
        self.segments.iter().map(|&(lo, hi)| &self.events[lo..hi])
    }

    pub fn first_timestamp(&self) -> Option<u64> {
        self.events.first().map(|e| e.timestamp)
    }

    pub fn last_timestamp(&self) -> Option<u64> {
        self.events.last().map(|e| e.timestamp)
    }

    /// Appends a strictly-later batch, keeping both segment lists.
    ///
    /// The increment must not start before this log ends; out-of-order
    /// merges are rejected.
    pub fn concat(&self, increment: &EventLog) -> Result<EventLog> {
        if self.is_empty() {
            return Ok(increment.clone());
        }
        if increment.is_empty() {
            return Ok(self.clone());
        }
        let base_max = self.last_timestamp().unwrap();
        let inc_min = increment.first_timestamp().unwrap();
        if base_max > inc_min {
            return Err(Error::ConcatOrder { base_max, inc_min });
        }
        let offset = self.events.len();
        let mut events = self.events.clone();
        events.extend_from_slice(&increment.events);
        let mut segments = self.segments.clone();
        segments.extend(
            increment
                .segments
                .iter()
                .map(|&(lo, hi)| (lo + offset, hi + offset)),
        );
        Ok(EventLog { events, segments })
    }

    /// Splits off the time prefix strictly before `cutoff`.
    ///
    /// The deleted part takes whole leading segments plus the head of the
    /// segment containing the cutoff; everything else is the remainder.
    /// Event-for-event, `deleted` then `remaining` reproduce this log;
    /// when the cutoff falls inside a segment the cut point becomes a
    /// segment boundary in the two halves.
    pub fn split_prefix(&self, cutoff: u64) -> (EventLog, EventLog) {
        let mut split_at = self.events.len();
        for &(lo, hi) in &self.segments {
            let seg = &self.events[lo..hi];
            let p = seg.partition_point(|e| e.timestamp < cutoff);
            if p < seg.len() {
                split_at = lo + p;
                break;
            }
        }
        (self.slice(0, split_at), self.slice(split_at, self.events.len()))
    }

    /// Sub-log over event indices `[from, to)`, clipping segments.
    fn slice(&self, from: usize, to: usize) -> EventLog {
        let events = self.events[from..to].to_vec();
        let mut segments = Vec::new();
        for &(lo, hi) in &self.segments {
            let lo = lo.max(from);
            let hi = hi.min(to);
            if lo < hi {
                segments.push((lo - from, hi - from));
            }
        }
        EventLog { events, segments }
    }
}

/// Ordered list of event symbols: the unit of mining. Never empty;
/// repeated symbols are allowed and order matters.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Sequence(Vec<Symbol>);

impl Sequence {
    /// Panics if `symbols` is empty.
    pub fn new(symbols: Vec<Symbol>) -> Sequence {
        assert!(!symbols.is_empty(), "a sequence has at least one symbol");
        Sequence(symbols)
    }

    pub fn single(sym: Symbol) -> Sequence {
        Sequence(vec![sym])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.0
    }

    pub fn first(&self) -> Symbol {
        self.0[0]
    }

    pub fn last(&self) -> Symbol {
        *self.0.last().unwrap()
    }

    /// New sequence with `sym` appended.
    pub fn extended(&self, sym: Symbol) -> Sequence {
        let mut v = self.0.clone();
        v.push(sym);
        Sequence(v)
    }

    /// The `len` sequences obtained by deleting one position each, in
    /// position order; duplicates are retained. Panics on length-1
    /// sequences, which have no non-empty proper subsequences.
    pub fn delete_one_subsequences(&self) -> Vec<Sequence> {
        assert!(
            self.0.len() >= 2,
            "delete-one subsequences need length >= 2"
        );
        (0..self.0.len())
            .map(|skip| {
                let v: Vec<Symbol> = self
                    .0
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != skip)
                    .map(|(_, &s)| s)
                    .collect();
                Sequence(v)
            })
            .collect()
    }

    /// True iff this sequence's symbols appear in `other` in order,
    /// not necessarily contiguously.
    pub fn is_subsequence_of(&self, other: &Sequence) -> bool {
        let mut it = other.0.iter();
        self.0.iter().all(|sym| it.any(|o| o == sym))
    }

    /// Renders symbol names joined by commas.
    pub fn display<'a>(&'a self, table: &'a SymbolTable) -> SequenceDisplay<'a> {
        SequenceDisplay { seq: self, table }
    }
}

/// Canonical mining order: shorter sequences first, then by symbol ids.
impl Ord for Sequence {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Sequence {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub struct SequenceDisplay<'a> {
    seq: &'a Sequence,
    table: &'a SymbolTable,
}

impl fmt::Display for SequenceDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, &sym) in self.seq.symbols().iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str(self.table.name(sym))?;
        }
        Ok(())
    }
}

/// Parses the log text format: one `timestamp,symbol` per line, `#`
/// starts a comment line, blank lines are ignored, input need not be
/// pre-sorted. New symbols are appended to `table` with the next dense
/// id in first-seen order.
pub fn parse_log(text: &str, table: &mut SymbolTable) -> Result<EventLog> {
    let mut events = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let lineno = i + 1;
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (ts_text, name) = line.split_once(',').ok_or_else(|| Error::LogParse {
            line: lineno,
            msg: "expected `timestamp,symbol`".into(),
        })?;
        let ts_text = ts_text.trim();
        if ts_text.starts_with('-') {
            return Err(Error::LogParse {
                line: lineno,
                msg: "negative timestamp".into(),
            });
        }
        let timestamp: u64 = ts_text.parse().map_err(|_| Error::LogParse {
            line: lineno,
            msg: format!("invalid timestamp {ts_text:?}"),
        })?;
        let name = name.trim();
        if name.is_empty() {
            return Err(Error::LogParse {
                line: lineno,
                msg: "empty symbol".into(),
            });
        }
        events.push(Event {
            symbol: table.intern(name),
            timestamp,
        });
    }
    Ok(EventLog::from_events(events))
}

/// Renders a log back to the text format, one event per line in log
/// order. Segment boundaries are not representable in the text format;
/// parsing the output yields a single-segment log with the same events.
pub fn serialize_log(log: &EventLog, table: &SymbolTable) -> String {
    let mut out = String::new();
    for e in log.events() {
        out.push_str(&e.timestamp.to_string());
        out.push(',');
        out.push_str(table.name(e.symbol));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn table_with(names: &[&str]) -> SymbolTable {
        let mut t = SymbolTable::new();
        for n in names {
            t.intern(n);
        }
        t
    }

    fn seq(table: &SymbolTable, names: &[&str]) -> Sequence {
        Sequence::new(names.iter().map(|n| table.lookup(n).unwrap()).collect())
    }

    #[test]
    fn parse_basic() {
        let mut t = SymbolTable::new();
        let log = parse_log("1,a\n2,b\n3,a", &mut t).unwrap();
        assert_eq!(log.len(), 3);
        assert_eq!(log.segment_bounds(), &[(0, 3)]);
        let names: Vec<&str> = log.events().iter().map(|e| t.name(e.symbol)).collect();
        assert_eq!(names, ["a", "b", "a"]);
    }

    #[test]
    fn parse_empty() {
        let mut t = SymbolTable::new();
        let log = parse_log("", &mut t).unwrap();
        assert!(log.is_empty());
        assert!(log.segment_bounds().is_empty());
    }

    #[test]
    fn parse_sorts_stably() {
        let mut t = SymbolTable::new();
        let log = parse_log("3,b\n1,a", &mut t).unwrap();
        let got: Vec<(u64, &str)> = log
            .events()
            .iter()
            .map(|e| (e.timestamp, t.name(e.symbol)))
            .collect();
        assert_eq!(got, [(1, "a"), (3, "b")]);

        // Equal timestamps keep input order.
        let log = parse_log("5,x\n5,y\n5,z", &mut t).unwrap();
        let got: Vec<&str> = log.events().iter().map(|e| t.name(e.symbol)).collect();
        assert_eq!(got, ["x", "y", "z"]);
    }

    #[test]
    fn parse_skips_comments_and_blanks() {
        let mut t = SymbolTable::new();
        let log = parse_log("# header\n\n1,a\n   \n# more\n2,b\n", &mut t).unwrap();
        assert_eq!(log.len(), 2);
    }

    #[test]
    fn parse_reports_line_numbers() {
        let mut t = SymbolTable::new();
        match parse_log("1,a\nnot-a-line\n", &mut t) {
            Err(Error::LogParse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
        match parse_log("1,a\n2,b\n-3,c", &mut t) {
            Err(Error::LogParse { line, msg }) => {
                assert_eq!(line, 3);
                assert!(msg.contains("negative"));
            }
            other => panic!("expected parse error, got {other:?}"),
        }
        assert!(parse_log("1,", &mut t).is_err());
        assert!(parse_log("x,a", &mut t).is_err());
    }

    #[test]
    fn symbols_intern_densely() {
        let mut t = SymbolTable::new();
        let a = t.intern("a");
        let b = t.intern("b");
        assert_eq!(a.id(), 0);
        assert_eq!(b.id(), 1);
        assert_eq!(t.intern("a"), a);
        assert_eq!(t.len(), 2);
        assert_eq!(t.name(b), "b");
    }

    #[test]
    fn concat_preserves_counts_and_segments() {
        let mut t = SymbolTable::new();
        let base = parse_log("1,a\n2,b\n3,a\n4,c", &mut t).unwrap();
        let inc = parse_log("5,b\n6,a\n7,d", &mut t).unwrap();
        let u = base.concat(&inc).unwrap();
        assert_eq!(u.len(), 7);
        assert_eq!(u.segment_bounds(), &[(0, 4), (4, 7)]);
    }

    #[test]
    fn concat_identity_on_empty() {
        let mut t = SymbolTable::new();
        let inc = parse_log("5,b\n6,a", &mut t).unwrap();
        let u = EventLog::empty().concat(&inc).unwrap();
        assert_eq!(u, inc);
        let u = inc.concat(&EventLog::empty()).unwrap();
        assert_eq!(u, inc);
    }

    #[test]
    fn concat_rejects_out_of_order() {
        let mut t = SymbolTable::new();
        let base = parse_log("10,a", &mut t).unwrap();
        let inc = parse_log("5,b", &mut t).unwrap();
        match base.concat(&inc) {
            Err(Error::ConcatOrder { base_max, inc_min }) => {
                assert_eq!((base_max, inc_min), (10, 5));
            }
            other => panic!("expected order violation, got {other:?}"),
        }
        // Equal boundary timestamps are allowed.
        let inc = parse_log("10,b", &mut t).unwrap();
        assert!(base.concat(&inc).is_ok());
    }

    #[test]
    fn split_prefix_basic() {
        let mut t = SymbolTable::new();
        let log = parse_log("1,a\n2,b\n3,c", &mut t).unwrap();
        let (deleted, remaining) = log.split_prefix(3);
        assert_eq!(deleted.len(), 2);
        assert_eq!(remaining.len(), 1);
        assert_eq!(remaining.events()[0].timestamp, 3);

        let (deleted, remaining) = log.split_prefix(0);
        assert!(deleted.is_empty());
        assert_eq!(remaining, log);

        let (deleted, remaining) = log.split_prefix(u64::MAX);
        assert_eq!(deleted.len(), 3);
        assert!(remaining.is_empty());
    }

    #[test]
    fn split_prefix_respects_segment_boundaries() {
        let mut t = SymbolTable::new();
        let a = parse_log("1,a\n2,b", &mut t).unwrap();
        let b = parse_log("3,c\n4,d", &mut t).unwrap();
        let log = a.concat(&b).unwrap();
        // Cut exactly at the batch boundary: both halves keep their
        // original segmentation and concat restores the log exactly.
        let (deleted, remaining) = log.split_prefix(3);
        assert_eq!(deleted, a);
        assert_eq!(remaining, b);
        assert_eq!(deleted.concat(&remaining).unwrap(), log);
    }

    #[test]
    fn delete_one_examples() {
        let t = table_with(&["a", "b", "c"]);
        let abc = seq(&t, &["a", "b", "c"]);
        let subs = abc.delete_one_subsequences();
        assert_eq!(
            subs,
            vec![
                seq(&t, &["b", "c"]),
                seq(&t, &["a", "c"]),
                seq(&t, &["a", "b"]),
            ]
        );
        let aa = seq(&t, &["a", "a"]);
        assert_eq!(aa.delete_one_subsequences(), vec![seq(&t, &["a"]), seq(&t, &["a"])]);
        let ab = seq(&t, &["a", "b"]);
        assert_eq!(ab.delete_one_subsequences(), vec![seq(&t, &["b"]), seq(&t, &["a"])]);
    }

    #[test]
    #[should_panic(expected = "length >= 2")]
    fn delete_one_rejects_singletons() {
        let t = table_with(&["a"]);
        let _ = seq(&t, &["a"]).delete_one_subsequences();
    }

    #[test]
    fn subsequence_examples() {
        let t = table_with(&["a", "b", "c"]);
        assert!(seq(&t, &["a", "c"]).is_subsequence_of(&seq(&t, &["a", "b", "c"])));
        assert!(!seq(&t, &["c", "a"]).is_subsequence_of(&seq(&t, &["a", "b", "c"])));
        assert!(seq(&t, &["a"]).is_subsequence_of(&seq(&t, &["a"])));
    }

    #[test]
    fn canonical_order_is_length_then_ids() {
        let t = table_with(&["a", "b"]);
        let a = seq(&t, &["a"]);
        let b = seq(&t, &["b"]);
        let ab = seq(&t, &["a", "b"]);
        let ba = seq(&t, &["b", "a"]);
        let mut v = vec![ba.clone(), a.clone(), ab.clone(), b.clone()];
        v.sort();
        assert_eq!(v, vec![a, b, ab, ba]);
    }

    proptest! {
        #[test]
        fn serialize_parse_roundtrip(lines in proptest::collection::vec((0u64..1000, 0usize..4), 0..60)) {
            let names = ["a", "b", "c", "alarm x"];
            let mut t = SymbolTable::new();
            let events: Vec<Event> = lines
                .iter()
                .map(|&(ts, i)| Event { symbol: t.intern(names[i]), timestamp: ts })
                .collect();
            let log = EventLog::from_events(events);
            let text = serialize_log(&log, &t);
            let mut t2 = SymbolTable::new();
            let reparsed = parse_log(&text, &mut t2).unwrap();
            // Compare by (timestamp, name): tables may assign different ids
            // depending on first-seen order.
            let a: Vec<(u64, &str)> = log.events().iter().map(|e| (e.timestamp, t.name(e.symbol))).collect();
            let b: Vec<(u64, &str)> = reparsed.events().iter().map(|e| (e.timestamp, t2.name(e.symbol))).collect();
            prop_assert_eq!(a, b);
        }

        #[test]
        fn split_then_concat_is_identity_on_events(
            ts in proptest::collection::vec(0u64..100, 0..40),
            cutoff in 0u64..110,
            batches in 1usize..4,
        ) {
            let mut t = SymbolTable::new();
            let sym = t.intern("a");
            let mut sorted = ts.clone();
            sorted.sort_unstable();
            // Build a multi-segment log out of consecutive batches.
            let mut log = EventLog::empty();
            for chunk in sorted.chunks(sorted.len().max(1) / batches + 1) {
                let part = EventLog::from_events(
                    chunk.iter().map(|&timestamp| Event { symbol: sym, timestamp }).collect(),
                );
                log = log.concat(&part).unwrap();
            }
            let (deleted, remaining) = log.split_prefix(cutoff);
            prop_assert!(deleted.events().iter().all(|e| e.timestamp < cutoff));
            prop_assert!(remaining.events().first().map_or(true, |e| e.timestamp >= cutoff));
            let rejoined = deleted.concat(&remaining).unwrap();
            prop_assert_eq!(rejoined.events(), log.events());
            prop_assert_eq!(deleted.len() + remaining.len(), log.len());
        }

        #[test]
        fn delete_one_shape(symbols in proptest::collection::vec(0u32..5, 2..7)) {
            let s = Sequence::new(symbols.into_iter().map(Symbol::new).collect());
            let subs = s.delete_one_subsequences();
            prop_assert_eq!(subs.len(), s.len());
            for sub in &subs {
                prop_assert_eq!(sub.len(), s.len() - 1);
                prop_assert!(sub.is_subsequence_of(&s));
            }
        }
    }
}
