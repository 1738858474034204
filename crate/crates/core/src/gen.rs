//! Deterministic synthetic log generator.
//!
//! Stands in for real alarm streams when exercising the miner and the
//! update algorithms at scale: planted pattern instances interleaved
//! with uniform noise, all driven by a fixed, seeded ChaCha8 stream so
//! the same spec always produces the byte-identical log on every
//! platform.
//!
//! Per event slot, in order: each planted pattern starts a new instance
//! with its configured probability (instances queue up their remaining
//! symbols); then the slot emits either a uniform noise symbol (with
//! probability `noise_rate`, or when no instance is pending) or the next
//! queued symbol. Timestamps are `start_ts + slot`.

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{Event, EventLog, Symbol, SymbolTable};

/// One pattern to plant: symbol indexes into the generated alphabet,
/// and the per-slot probability of starting a new instance.
#[derive(Debug, Clone)]
pub struct PlantedPattern {
    pub symbol_indexes: Vec<usize>,
    pub rate: f64,
}

/// Generator configuration. Identical specs yield identical logs.
#[derive(Debug, Clone)]
pub struct GenSpec {
    pub seed: u64,
    pub alphabet: usize,
    pub length: usize,
    pub start_ts: u64,
    pub noise_rate: f64,
    pub planted: Vec<PlantedPattern>,
}

/// Name of the i-th alphabet symbol: `a`..`z`, then `s26`, `s27`, ...
pub fn symbol_name(i: usize) -> String {
    if i < 26 {
        ((b'a' + i as u8) as char).to_string()
    } else {
        format!("s{i}")
    }
}

/// Generates the log described by `spec`, interning the full alphabet
/// into `table` in index order.
pub fn generate(spec: &GenSpec, table: &mut SymbolTable) -> Result<EventLog> {
    if !(0.0..=1.0).contains(&spec.noise_rate) {
        return Err(Error::InvalidParams(format!(
            "noise rate {} outside [0, 1]",
            spec.noise_rate
        )));
    }
    for p in &spec.planted {
        if p.symbol_indexes.is_empty() {
            return Err(Error::InvalidParams("planted pattern is empty".into()));
        }
        if let Some(&bad) = p.symbol_indexes.iter().find(|&&i| i >= spec.alphabet) {
            return Err(Error::InvalidParams(format!(
                "planted pattern uses symbol index {bad}, alphabet has {}",
                spec.alphabet
            )));
        }
        if !(0.0..=1.0).contains(&p.rate) {
            return Err(Error::InvalidParams(format!(
                "planted rate {} outside [0, 1]",
                p.rate
            )));
        }
    }
    if spec.alphabet == 0 && spec.length > 0 {
        return Err(Error::InvalidParams(
            "cannot generate events over an empty alphabet".into(),
        ));
    }

    let alphabet: Vec<Symbol> = (0..spec.alphabet)
        .map(|i| table.intern(&symbol_name(i)))
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut pending: VecDeque<Symbol> = VecDeque::new();
    let mut events = Vec::with_capacity(spec.length);
    for slot in 0..spec.length {
        for p in &spec.planted {
            if rng.random::<f64>() < p.rate {
                pending.extend(p.symbol_indexes.iter().map(|&i| alphabet[i]));
            }
        }
        let noise = rng.random::<f64>() < spec.noise_rate;
        let symbol = if noise {
            alphabet[rng.random_range(0..alphabet.len())]
        } else {
            match pending.pop_front() {
                Some(sym) => sym,
                None => alphabet[rng.random_range(0..alphabet.len())],
            }
        };
        events.push(Event {
            symbol,
            timestamp: spec.start_ts + slot as u64,
        });
    }
    Ok(EventLog::from_events(events))
}
