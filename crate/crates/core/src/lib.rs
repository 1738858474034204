//! Frequent-sequence mining over timestamped event logs, with
//! incremental (append) and decremental (prefix-delete) maintenance of
//! the mined pattern sets.
//!
//! The library mines the set of frequent sequences `L` together with a
//! negative border `NBD` (candidates that just missed the support
//! threshold but whose subsequences are all frequent). Keeping the
//! border around is what lets an update reuse old counts instead of
//! re-mining from scratch:
//!
//! * [`miner::mine`] builds a [`miner::MiningState`] from a log;
//! * [`ius::ius_update`] maintains it when a later batch is appended;
//! * [`dus::dus_update`] maintains it when a leading time-prefix is
//!   deleted;
//! * [`state_io`] persists states as versioned, diffable text files.
//!
//! The `seqmine` binary exposes the same operations as subcommands, plus
//! a deterministic synthetic-log generator and a benchmark harness that
//! times incremental updates against full re-mining.

pub mod bench;
pub mod candgen;
pub mod dus;
pub mod error;
pub mod fraction;
pub mod gen;
pub mod ius;
pub mod miner;
pub mod model;
pub mod occurrence;
pub mod oracle;
pub mod state_io;

pub use dus::{dus_update, min_freq, DeletionReport};
pub use error::{Error, Result};
pub use fraction::Fraction;
pub use ius::{ius_update, UpdateReport};
pub use miner::{mine, MiningState, Params, PatternCounts};
pub use model::{parse_log, serialize_log, Event, EventLog, Sequence, Symbol, SymbolTable};
pub use occurrence::{count_occurrences, count_occurrences_oracle, min_count, LogIndex, Window};
pub use state_io::{load_state, save_state};
