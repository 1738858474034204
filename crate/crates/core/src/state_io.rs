//! Durable text format for mining states.
//!
//! The format is versioned, line-oriented, and canonical: saving any
//! state produces exactly one byte sequence, so fixtures diff cleanly
//! and `save(load(f)) == f` for every file `save` produced.
//!
//! ```text
//! SEQMINE-STATE 1
//! min_supp 0.05
//! min_nbd_supp 0.01
//! window inf
//! db_size 300
//! symbols 2
//! S 0 a
//! S 1 b
//! F 0 17
//! F 0 1 9
//! N 1 4
//! ```
//!
//! Header lines are fixed in the order above. `S <id> <name>` lines
//! list the symbol table in dense id order (names may contain spaces,
//! not newlines). Each pattern line is the band letter (`F` frequent,
//! `N` border), the pattern's symbol ids, and its occurrence count,
//! with frequent patterns first, in canonical order (length, then ids).
//! Thresholds travel with the file so updates can verify they were
//! mined under the same parameters.

use crate::error::{Error, Result};
use crate::fraction::Fraction;
use crate::miner::{MiningState, Params, PatternCounts};
use crate::model::{Sequence, Symbol, SymbolTable};
use crate::occurrence::Window;

const VERSION_LINE: &str = "SEQMINE-STATE 1";

/// Renders a state to the text format. Refuses to persist a state that
/// fails validation or references symbols outside the table.
pub fn save_state(state: &MiningState, table: &SymbolTable) -> Result<String> {
    state.validate()?;
    for seq in state.frequent().keys().chain(state.negative_border().keys()) {
        for sym in seq.symbols() {
            if sym.index() >= table.len() {
                return Err(Error::StateInvariant(format!(
                    "pattern references symbol id {} outside the table (size {})",
                    sym.id(),
                    table.len()
                )));
            }
        }
    }
    for name in table.names() {
        if name.contains('\n') || name.is_empty() {
            return Err(Error::StateInvariant(format!(
                "symbol name {name:?} cannot be serialized"
            )));
        }
    }

    let mut out = String::new();
    out.push_str(VERSION_LINE);
    out.push('\n');
    out.push_str(&format!("min_supp {}\n", state.params().min_supp()));
    out.push_str(&format!("min_nbd_supp {}\n", state.params().min_nbd_supp()));
    out.push_str(&format!("window {}\n", state.params().window()));
    out.push_str(&format!("db_size {}\n", state.db_size()));
    out.push_str(&format!("symbols {}\n", table.len()));
    for (id, name) in table.names().enumerate() {
        out.push_str(&format!("S {id} {name}\n"));
    }
    for (band, patterns) in [("F", state.frequent()), ("N", state.negative_border())] {
        for (seq, count) in patterns {
            out.push(band.chars().next().unwrap());
            for sym in seq.symbols() {
                out.push_str(&format!(" {}", sym.id()));
            }
            out.push_str(&format!(" {count}\n"));
        }
    }
    Ok(out)
}

/// Parses the text format back into a state and its symbol table,
/// re-validating every state invariant before returning.
pub fn load_state(text: &str) -> Result<(MiningState, SymbolTable)> {
    let mut lines = text.lines().enumerate();
    let mut next_line = |expect: &str| -> Result<(usize, String)> {
        match lines.next() {
            Some((i, l)) => Ok((i + 1, l.to_string())),
            None => Err(Error::StateParse {
                line: text.lines().count() + 1,
                msg: format!("unexpected end of file, expected {expect}"),
            }),
        }
    };

    let (_, version) = next_line("version line")?;
    if version != VERSION_LINE {
        return Err(Error::StateVersion {
            expected: VERSION_LINE.to_string(),
            found: version,
        });
    }

    let mut header_field = |key: &str| -> Result<(usize, String)> {
        let (lineno, line) = next_line(key)?;
        match line.split_once(' ') {
            Some((k, v)) if k == key => Ok((lineno, v.to_string())),
            _ => Err(Error::StateParse {
                line: lineno,
                msg: format!("expected `{key} <value>`"),
            }),
        }
    };

    let (ms_line, ms_text) = header_field("min_supp")?;
    let min_supp: Fraction = ms_text.parse().map_err(|e| line_err(ms_line, e))?;
    let (mn_line, mn_text) = header_field("min_nbd_supp")?;
    let min_nbd_supp: Fraction = mn_text.parse().map_err(|e| line_err(mn_line, e))?;
    let (w_line, w_text) = header_field("window")?;
    let window: Window = w_text.parse().map_err(|e| line_err(w_line, e))?;
    let (n_line, n_text) = header_field("db_size")?;
    let db_size: usize = n_text.parse().map_err(|_| Error::StateParse {
        line: n_line,
        msg: format!("invalid db_size {n_text:?}"),
    })?;
    let (count_line, count_text) = header_field("symbols")?;
    let symbol_count: usize = count_text.parse().map_err(|_| Error::StateParse {
        line: count_line,
        msg: format!("invalid symbol count {count_text:?}"),
    })?;

    let params = Params::new(min_supp, min_nbd_supp, window)
        .map_err(|e| Error::StateInvariant(e.to_string()))?;

    let mut table = SymbolTable::new();
    for expected_id in 0..symbol_count {
        let (lineno, line) = next_line("symbol line")?;
        let mut parts = line.splitn(3, ' ');
        let (tag, id_text, name) = (parts.next(), parts.next(), parts.next());
        let malformed = || Error::StateParse {
            line: lineno,
            msg: "expected `S <id> <name>`".into(),
        };
        if tag != Some("S") {
            return Err(malformed());
        }
        let id: usize = id_text
            .ok_or_else(malformed)?
            .parse()
            .map_err(|_| malformed())?;
        let name = name.ok_or_else(malformed)?;
        if id != expected_id {
            return Err(Error::StateParse {
                line: lineno,
                msg: format!("symbol ids must be dense: expected {expected_id}, found {id}"),
            });
        }
        if name.is_empty() {
            return Err(Error::StateParse {
                line: lineno,
                msg: "empty symbol name".into(),
            });
        }
        if table.lookup(name).is_some() {
            return Err(Error::StateParse {
                line: lineno,
                msg: format!("duplicate symbol name {name:?}"),
            });
        }
        table.intern(name);
    }

    let mut frequent = PatternCounts::new();
    let mut border = PatternCounts::new();
    for (i, line) in lines {
        let lineno = i + 1;
        let mut parts = line.split(' ');
        let band = parts.next().unwrap_or("");
        let target = match band {
            "F" => &mut frequent,
            "N" => &mut border,
            _ => {
                return Err(Error::StateParse {
                    line: lineno,
                    msg: format!("expected pattern line `F|N <ids...> <count>`, found {line:?}"),
                })
            }
        };
        let fields: Vec<&str> = parts.collect();
        if fields.len() < 2 {
            return Err(Error::StateParse {
                line: lineno,
                msg: "pattern line needs at least one symbol id and a count".into(),
            });
        }
        let (id_fields, count_field) = fields.split_at(fields.len() - 1);
        let mut symbols = Vec::with_capacity(id_fields.len());
        for f in id_fields {
            let id: u32 = f.parse().map_err(|_| Error::StateParse {
                line: lineno,
                msg: format!("invalid symbol id {f:?}"),
            })?;
            if id as usize >= symbol_count {
                return Err(Error::StateParse {
                    line: lineno,
                    msg: format!("symbol id {id} outside the table (size {symbol_count})"),
                });
            }
            symbols.push(Symbol::new(id));
        }
        let count: usize = count_field[0].parse().map_err(|_| Error::StateParse {
            line: lineno,
            msg: format!("invalid count {:?}", count_field[0]),
        })?;
        let seq = Sequence::new(symbols);
        if target.insert(seq, count).is_some() {
            return Err(Error::StateParse {
                line: lineno,
                msg: "duplicate pattern line".into(),
            });
        }
    }

    let state = MiningState::from_parts(params, db_size, frequent, border)?;
    Ok((state, table))
}

fn line_err(line: usize, e: Error) -> Error {
    Error::StateParse {
        line,
        msg: e.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::miner::mine;
    use crate::model::parse_log;
    use proptest::prelude::*;

    fn params(ms: &str, mn: &str) -> Params {
        Params::new(ms.parse().unwrap(), mn.parse().unwrap(), Window::Unbounded).unwrap()
    }

    #[test]
    fn minimal_state_renders_exactly() {
        let mut t = SymbolTable::new();
        let a = t.intern("a");
        let mut f = PatternCounts::new();
        f.insert(Sequence::single(a), 4);
        let state = MiningState::from_parts(params("0.5", "0.1"), 8, f, PatternCounts::new())
            .unwrap();
        let text = save_state(&state, &t).unwrap();
        assert_eq!(
            text,
            "SEQMINE-STATE 1\nmin_supp 0.5\nmin_nbd_supp 0.1\nwindow inf\ndb_size 8\nsymbols 1\nS 0 a\nF 0 4\n"
        );
    }

    #[test]
    fn empty_state_roundtrips() {
        let t = SymbolTable::new();
        let state = MiningState::from_parts(
            params("0.5", "0.1"),
            0,
            PatternCounts::new(),
            PatternCounts::new(),
        )
        .unwrap();
        let text = save_state(&state, &t).unwrap();
        let (loaded, loaded_table) = load_state(&text).unwrap();
        assert_eq!(loaded, state);
        assert_eq!(loaded_table.len(), 0);
        assert_eq!(save_state(&loaded, &loaded_table).unwrap(), text);
    }

    #[test]
    fn mined_state_roundtrips_byte_identically() {
        let mut t = SymbolTable::new();
        let log = parse_log(
            "1,a\n2,b\n3,a\n4,b\n5,c\n6,a\n7,b\n8,alarm x\n9,alarm x\n10,c",
            &mut t,
        )
        .unwrap();
        let state = mine(&log, &params("0.2", "0.05"));
        let text = save_state(&state, &t).unwrap();
        let (loaded, loaded_table) = load_state(&text).unwrap();
        assert_eq!(loaded, state);
        assert_eq!(save_state(&loaded, &loaded_table).unwrap(), text);
    }

    #[test]
    fn rejects_unknown_version() {
        match load_state("SEQMINE-STATE 9\n") {
            Err(Error::StateVersion { found, .. }) => assert_eq!(found, "SEQMINE-STATE 9"),
            other => panic!("expected version error, got {other:?}"),
        }
    }

    #[test]
    fn reports_malformed_lines_with_numbers() {
        let text = "SEQMINE-STATE 1\nmin_supp 0.5\nmin_nbd_supp 0.1\nwindow inf\ndb_size 8\nsymbols 1\nS 0 a\nF zero 4\n";
        match load_state(text) {
            Err(Error::StateParse { line, .. }) => assert_eq!(line, 8),
            other => panic!("expected parse error, got {other:?}"),
        }
        let text = "SEQMINE-STATE 1\nmin_supp 0.5\nwindow inf\n";
        match load_state(text) {
            Err(Error::StateParse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_band_violations_naming_the_pattern() {
        // F-line count below min_count (0.5 * 8 = 4).
        let text = "SEQMINE-STATE 1\nmin_supp 0.5\nmin_nbd_supp 0.1\nwindow inf\ndb_size 8\nsymbols 1\nS 0 a\nF 0 3\n";
        match load_state(text) {
            Err(Error::StateInvariant(msg)) => {
                assert!(msg.contains("[0]"), "message should name the pattern: {msg}");
            }
            other => panic!("expected invariant error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_structural_damage() {
        // Duplicate symbol name.
        let text = "SEQMINE-STATE 1\nmin_supp 0.5\nmin_nbd_supp 0.1\nwindow inf\ndb_size 8\nsymbols 2\nS 0 a\nS 1 a\n";
        assert!(matches!(load_state(text), Err(Error::StateParse { .. })));
        // Pattern referencing an id outside the table.
        let text = "SEQMINE-STATE 1\nmin_supp 0.5\nmin_nbd_supp 0.1\nwindow inf\ndb_size 8\nsymbols 1\nS 0 a\nF 1 4\n";
        assert!(matches!(load_state(text), Err(Error::StateParse { .. })));
        // Non-dense symbol ids.
        let text = "SEQMINE-STATE 1\nmin_supp 0.5\nmin_nbd_supp 0.1\nwindow inf\ndb_size 8\nsymbols 2\nS 0 a\nS 2 b\n";
        assert!(matches!(load_state(text), Err(Error::StateParse { .. })));
        // Duplicate pattern.
        let text = "SEQMINE-STATE 1\nmin_supp 0.5\nmin_nbd_supp 0.1\nwindow inf\ndb_size 8\nsymbols 1\nS 0 a\nF 0 4\nF 0 4\n";
        assert!(matches!(load_state(text), Err(Error::StateParse { .. })));
    }

    #[test]
    fn refuses_to_save_corrupt_state() {
        let mut t = SymbolTable::new();
        let a = t.intern("a");
        let mut f = PatternCounts::new();
        f.insert(Sequence::single(a), 1);
        // Count 1 < min_count 4: unchecked construction, save must refuse.
        let state =
            MiningState::from_parts_unchecked(params("0.5", "0.1"), 8, f, PatternCounts::new());
        assert!(matches!(
            save_state(&state, &t),
            Err(Error::StateInvariant(_))
        ));
    }

    #[test]
    fn symbol_names_may_contain_spaces() {
        let mut t = SymbolTable::new();
        let a = t.intern("link down 7");
        let mut f = PatternCounts::new();
        f.insert(Sequence::single(a), 4);
        let state = MiningState::from_parts(params("0.5", "0.1"), 8, f, PatternCounts::new())
            .unwrap();
        let text = save_state(&state, &t).unwrap();
        let (_, loaded_table) = load_state(&text).unwrap();
        assert_eq!(loaded_table.name(Symbol::new(0)), "link down 7");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn roundtrip_on_random_mined_states(
            events in proptest::collection::vec((0u64..50, 0u8..5), 0..80),
            ms_choice in 0usize..3,
            span in proptest::option::of(5u64..25),
        ) {
            let names = ["a", "b", "c", "d", "e"];
            let mut t = SymbolTable::new();
            let evs: Vec<crate::model::Event> = events
                .iter()
                .map(|&(ts, s)| crate::model::Event { symbol: t.intern(names[s as usize]), timestamp: ts })
                .collect();
            let log = crate::model::EventLog::from_events(evs);
            let ms = ["0.3", "0.2", "0.15"][ms_choice];
            let w = span.map_or(Window::Unbounded, Window::Span);
            let p = Params::new(ms.parse().unwrap(), "0.05".parse().unwrap(), w).unwrap();
            let state = mine(&log, &p);
            let text = save_state(&state, &t).unwrap();
            let (loaded, loaded_table) = load_state(&text).unwrap();
            prop_assert_eq!(&loaded, &state);
            prop_assert_eq!(save_state(&loaded, &loaded_table).unwrap(), text);
        }
    }
}
