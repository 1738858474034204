//! Benchmark harness: incremental updates against full re-mining.
//!
//! For every grid point (min_supp, min_nbd_supp) the harness mines the
//! base log once, then walks the increment batches, timing the
//! incremental update and a from-scratch re-mine of the grown log for
//! each. A row is emitted only after the two frequent sets are verified
//! equal; the verification runs outside both timed regions.

use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::fraction::Fraction;
use crate::ius::ius_update;
use crate::miner::{mine, Params};
use crate::model::EventLog;
use crate::occurrence::Window;

/// One cell of the speedup experiment.
#[derive(Debug, Clone)]
pub struct BenchRecord {
    pub db_size: usize,
    pub inc_size: usize,
    pub min_supp: Fraction,
    pub min_nbd_supp: Fraction,
    pub t_rerun: Duration,
    pub t_ius: Duration,
    /// Re-mine wall time over update wall time.
    pub speedup: f64,
    /// Size of the updated state's negative border.
    pub nbd_size: usize,
}

impl BenchRecord {
    pub fn csv_header() -> &'static str {
        "db_size,inc_size,min_supp,min_nbd_supp,t_rerun_s,t_ius_s,speedup,nbd_size"
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{:.6},{:.6},{:.3},{}",
            self.db_size,
            self.inc_size,
            self.min_supp,
            self.min_nbd_supp,
            self.t_rerun.as_secs_f64(),
            self.t_ius.as_secs_f64(),
            self.speedup,
            self.nbd_size
        )
    }
}

/// Runs the grid: one record per (grid point, increment). Increments
/// apply cumulatively, each update starting from the previous state.
/// A frequent-set mismatch between the update and the re-mine aborts
/// the whole run.
pub fn run_bench(
    base: &EventLog,
    increments: &[EventLog],
    grid: &[(Fraction, Fraction)],
    window: Window,
) -> Result<Vec<BenchRecord>> {
    let mut records = Vec::new();
    for &(min_supp, min_nbd_supp) in grid {
        let params = Params::new(min_supp, min_nbd_supp, window)?;
        let mut current_log = base.clone();
        let mut state = mine(&current_log, &params);
        for inc in increments {
            let ius_start = Instant::now();
            let report = ius_update(&state, inc, &current_log, &params)?;
            let t_ius = ius_start.elapsed();

            let merged = current_log.concat(inc)?;
            let rerun_start = Instant::now();
            let remined = mine(&merged, &params);
            let t_rerun = rerun_start.elapsed();

            if report.state.frequent() != remined.frequent() {
                return Err(Error::InternalConsistency(format!(
                    "incremental update and re-mine disagree at min_supp {min_supp}, \
                     min_nbd_supp {min_nbd_supp}, db_size {}",
                    current_log.len()
                )));
            }

            records.push(BenchRecord {
                db_size: current_log.len(),
                inc_size: inc.len(),
                min_supp,
                min_nbd_supp,
                t_rerun,
                t_ius,
                speedup: t_rerun.as_nanos().max(1) as f64 / t_ius.as_nanos().max(1) as f64,
                nbd_size: report.state.negative_border().len(),
            });
            current_log = merged;
            state = report.state;
        }
    }
    Ok(records)
}

/// Renders records as CSV with a header row.
pub fn to_csv(records: &[BenchRecord]) -> String {
    let mut out = String::from(BenchRecord::csv_header());
    out.push('\n');
    for r in records {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    out
}
