use std::io::IsTerminal;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use seqmine::bench::{run_bench, to_csv};
use seqmine::dus::{dus_update, recall_note};
use seqmine::gen::{generate, symbol_name, GenSpec, PlantedPattern};
use seqmine::ius::ius_update;
use seqmine::miner::{mine, MiningState, Params};
use seqmine::model::{parse_log, serialize_log, SymbolTable};
use seqmine::state_io::{load_state, save_state};
use seqmine::{Error, Fraction, Result, Window};

#[derive(Parser)]
#[command(
    name = "seqmine",
    version,
    about = "Frequent-sequence mining over event logs, with incremental and decremental maintenance"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mine a log from scratch and write the state file
    Mine(MineArgs),
    /// Maintain an existing state as the log grows or shrinks
    #[command(subcommand)]
    Update(UpdateCommand),
    /// Compare two state files
    Diff(DiffArgs),
    /// Print the patterns of a state file
    Show(ShowArgs),
    /// Generate a deterministic synthetic log
    Gen(GenArgs),
    /// Time incremental updates against full re-mining
    Bench(BenchArgs),
}

#[derive(Args)]
struct MineArgs {
    /// Log file to mine
    #[arg(long)]
    input: PathBuf,
    /// Minimum support threshold, e.g. 0.05
    #[arg(long)]
    min_supp: String,
    /// Minimum support kept in the negative border (below min-supp)
    #[arg(long, default_value = "0")]
    min_nbd_supp: String,
    /// Occurrence window: `inf` or a positive time span
    #[arg(long, default_value = "inf")]
    window: String,
    /// State file to write
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum UpdateCommand {
    /// Fold an appended batch into the state
    Add(UpdateAddArgs),
    /// Remove a leading time-prefix from the state
    Delete(UpdateDeleteArgs),
}

#[derive(Args)]
struct UpdateAddArgs {
    /// Existing state file
    #[arg(long)]
    state: PathBuf,
    /// The log the state was mined from
    #[arg(long)]
    log: PathBuf,
    /// The appended batch
    #[arg(long)]
    increment: PathBuf,
    /// State file to write
    #[arg(long)]
    out: PathBuf,
    /// Also write the concatenated log
    #[arg(long)]
    out_log: Option<PathBuf>,
    /// Assert the state was mined with this min-supp
    #[arg(long)]
    min_supp: Option<String>,
    /// Assert the state was mined with this min-nbd-supp
    #[arg(long)]
    min_nbd_supp: Option<String>,
    /// Assert the state was mined with this window
    #[arg(long)]
    window: Option<String>,
}

#[derive(Args)]
struct UpdateDeleteArgs {
    /// Existing state file
    #[arg(long)]
    state: PathBuf,
    /// The log the state was mined from
    #[arg(long)]
    log: PathBuf,
    /// Delete all events with a timestamp below this
    #[arg(long)]
    before: u64,
    /// State file to write
    #[arg(long)]
    out: PathBuf,
    /// Also write the remaining log
    #[arg(long)]
    out_log: Option<PathBuf>,
    /// Re-mine the remainder and report frequent sequences the
    /// maintained state cannot recover
    #[arg(long)]
    check_recall: bool,
    /// Assert the state was mined with this min-supp
    #[arg(long)]
    min_supp: Option<String>,
    /// Assert the state was mined with this min-nbd-supp
    #[arg(long)]
    min_nbd_supp: Option<String>,
    /// Assert the state was mined with this window
    #[arg(long)]
    window: Option<String>,
}

#[derive(Args)]
struct DiffArgs {
    #[arg(long)]
    a: PathBuf,
    #[arg(long)]
    b: PathBuf,
}

#[derive(Args)]
struct ShowArgs {
    #[arg(long)]
    state: PathBuf,
    /// Only patterns of this length
    #[arg(long)]
    level: Option<usize>,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    seed: u64,
    /// Alphabet size; symbols are named a..z, then s26, s27, ...
    #[arg(long)]
    alphabet: usize,
    /// Number of events
    #[arg(long)]
    length: usize,
    /// Planted pattern `sym,sym,...:rate`, repeatable
    #[arg(long)]
    planted: Vec<String>,
    /// Probability of a slot emitting uniform noise
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    /// Timestamp of the first event
    #[arg(long, default_value_t = 0)]
    start_ts: u64,
    /// Log file to write
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    /// Base log
    #[arg(long)]
    base: PathBuf,
    /// Increment batch, repeatable, applied cumulatively in order
    #[arg(long = "increment", required = true)]
    increments: Vec<PathBuf>,
    /// Comma-separated min-supp values
    #[arg(long)]
    min_supp: String,
    /// Comma-separated min-nbd-supp values
    #[arg(long, default_value = "0")]
    min_nbd_supp: String,
    #[arg(long, default_value = "inf")]
    window: String,
    /// CSV file to write; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            let first = e.to_string();
            eprintln!("seqmine: {}", first.lines().next().unwrap_or("usage error"));
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("seqmine: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Mine(args) => cmd_mine(args),
        Command::Update(UpdateCommand::Add(args)) => cmd_update_add(args),
        Command::Update(UpdateCommand::Delete(args)) => cmd_update_delete(args),
        Command::Diff(args) => cmd_diff(args),
        Command::Show(args) => cmd_show(args),
        Command::Gen(args) => cmd_gen(args),
        Command::Bench(args) => cmd_bench(args),
    }
}

/// All stdout goes through here so a closed pipe (`seqmine ... | head`)
/// ends the process quietly instead of panicking.
fn emit(text: &str) -> Result<()> {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        Ok(()) => Ok(()),
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => std::process::exit(0),
        Err(e) => Err(Error::Io(e)),
    }
}

macro_rules! outln {
    ($($arg:tt)*) => { emit(&format!("{}\n", format_args!($($arg)*)))? };
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    })
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    })
}

fn parse_params(min_supp: &str, min_nbd_supp: &str, window: &str) -> Result<Params> {
    let ms: Fraction = min_supp.parse()?;
    let mn: Fraction = min_nbd_supp.parse()?;
    let w: Window = window.parse()?;
    Params::new(ms, mn, w)
}

/// Optional parameter assertions against a loaded state's header.
fn assert_params(
    state: &MiningState,
    min_supp: &Option<String>,
    min_nbd_supp: &Option<String>,
    window: &Option<String>,
) -> Result<()> {
    if let Some(ms) = min_supp {
        let ms: Fraction = ms.parse()?;
        if ms != state.params().min_supp() {
            return Err(Error::ParamMismatch(format!(
                "state header has min_supp {}, not {ms}",
                state.params().min_supp()
            )));
        }
    }
    if let Some(mn) = min_nbd_supp {
        let mn: Fraction = mn.parse()?;
        if mn != state.params().min_nbd_supp() {
            return Err(Error::ParamMismatch(format!(
                "state header has min_nbd_supp {}, not {mn}",
                state.params().min_nbd_supp()
            )));
        }
    }
    if let Some(w) = window {
        let w: Window = w.parse()?;
        if w != state.params().window() {
            return Err(Error::ParamMismatch(format!(
                "state header has window {}, not {w}",
                state.params().window()
            )));
        }
    }
    Ok(())
}

fn cmd_mine(args: MineArgs) -> Result<()> {
    let params = parse_params(&args.min_supp, &args.min_nbd_supp, &args.window)?;
    let mut table = SymbolTable::new();
    let log = parse_log(&read_file(&args.input)?, &mut table)?;
    let state = mine(&log, &params);
    write_file(&args.out, &save_state(&state, &table)?)?;
    outln!(
        "mined {} events: {} frequent, {} border patterns -> {}",
        log.len(),
        state.frequent().len(),
        state.negative_border().len(),
        args.out.display()
    );
    Ok(())
}

fn cmd_update_add(args: UpdateAddArgs) -> Result<()> {
    let (state, mut table) = load_state(&read_file(&args.state)?)?;
    assert_params(&state, &args.min_supp, &args.min_nbd_supp, &args.window)?;
    let log = parse_log(&read_file(&args.log)?, &mut table)?;
    let increment = parse_log(&read_file(&args.increment)?, &mut table)?;
    let params = state.params().clone();
    let report = ius_update(&state, &increment, &log, &params)?;
    write_file(&args.out, &save_state(&report.state, &table)?)?;
    if let Some(out_log) = &args.out_log {
        let merged = log.concat(&increment)?;
        write_file(out_log, &serialize_log(&merged, &table))?;
    }
    let c = &report.counters;
    outln!(
        "updated to {} events: {} frequent, {} border patterns -> {}",
        report.state.db_size(),
        report.state.frequent().len(),
        report.state.negative_border().len(),
        args.out.display()
    );
    outln!(
        "reused {} stored counts, scanned increment {} times, base {} times, \
         cross-join candidates {} counted / {} pruned",
        c.base_frequent.fetched_stored
            + c.increment_frequent.fetched_stored
            + c.base_border.fetched_stored
            + c.increment_border.fetched_stored,
        c.base_frequent.scanned_log + c.base_border.scanned_log,
        c.increment_frequent.scanned_log + c.increment_border.scanned_log,
        c.extension.counted,
        c.extension.pruned
    );
    Ok(())
}

fn cmd_update_delete(args: UpdateDeleteArgs) -> Result<()> {
    let (state, mut table) = load_state(&read_file(&args.state)?)?;
    assert_params(&state, &args.min_supp, &args.min_nbd_supp, &args.window)?;
    let log = parse_log(&read_file(&args.log)?, &mut table)?;
    let (deleted, remaining) = log.split_prefix(args.before);
    let params = state.params().clone();
    let report = dus_update(&state, &deleted, &log, &params)?;
    write_file(&args.out, &save_state(&report.state, &table)?)?;
    if let Some(out_log) = &args.out_log {
        write_file(out_log, &serialize_log(&remaining, &table))?;
    }
    outln!("min_freq {}", report.min_freq);
    outln!(
        "deleted {} events, kept {}: {} frequent, {} border patterns \
         ({} candidates skipped by the support filter, {} dropped by closure) -> {}",
        deleted.len(),
        report.state.db_size(),
        report.state.frequent().len(),
        report.state.negative_border().len(),
        report.skipped_by_theorem1,
        report.dropped_by_closure,
        args.out.display()
    );
    if args.check_recall {
        let note = recall_note(&report.state, &remaining);
        outln!("{}", note.render(&table));
    }
    Ok(())
}

fn csv_quote(field: &str) -> String {
    format!("\"{}\"", field.replace('"', "\"\""))
}

fn cmd_diff(args: DiffArgs) -> Result<()> {
    let (state_a, table_a) = load_state(&read_file(&args.a)?)?;
    let (state_b, table_b) = load_state(&read_file(&args.b)?)?;

    // Patterns are compared by name so the two files need not share id
    // assignments.
    let collect = |state: &MiningState, table: &SymbolTable| {
        let mut map = std::collections::BTreeMap::new();
        for (band, patterns) in [("F", state.frequent()), ("N", state.negative_border())] {
            for (seq, &count) in patterns {
                map.insert(
                    (seq.len(), seq.display(table).to_string()),
                    (band, count),
                );
            }
        }
        map
    };
    let a = collect(&state_a, &table_a);
    let b = collect(&state_b, &table_b);

    let mut rows: Vec<(String, String, String, String, String, String)> = Vec::new();
    for (key, &(band_b, count_b)) in &b {
        match a.get(key) {
            None => rows.push((
                "added".into(),
                key.1.clone(),
                String::new(),
                String::new(),
                band_b.into(),
                count_b.to_string(),
            )),
            Some(&(band_a, count_a)) if band_a != band_b || count_a != count_b => rows.push((
                "recounted".into(),
                key.1.clone(),
                band_a.into(),
                count_a.to_string(),
                band_b.into(),
                count_b.to_string(),
            )),
            Some(_) => {}
        }
    }
    for (key, &(band_a, count_a)) in &a {
        if !b.contains_key(key) {
            rows.push((
                "removed".into(),
                key.1.clone(),
                band_a.into(),
                count_a.to_string(),
                String::new(),
                String::new(),
            ));
        }
    }

    if std::io::stdout().is_terminal() {
        if rows.is_empty() {
            outln!("states are identical");
        }
        for (change, pattern, band_a, count_a, band_b, count_b) in &rows {
            outln!(
                "{change:<10} {pattern}  {}{}  ->  {}{}",
                band_a,
                if count_a.is_empty() { String::new() } else { format!(":{count_a}") },
                band_b,
                if count_b.is_empty() { String::new() } else { format!(":{count_b}") },
            );
        }
    } else {
        outln!("change,pattern,band_a,count_a,band_b,count_b");
        for (change, pattern, band_a, count_a, band_b, count_b) in &rows {
            outln!(
                "{change},{},{band_a},{count_a},{band_b},{count_b}",
                csv_quote(pattern)
            );
        }
    }
    Ok(())
}

fn cmd_show(args: ShowArgs) -> Result<()> {
    let (state, table) = load_state(&read_file(&args.state)?)?;
    let mut rows: Vec<(&str, usize, String, usize)> = Vec::new();
    for (band, patterns) in [("F", state.frequent()), ("N", state.negative_border())] {
        for (seq, &count) in patterns {
            if args.level.is_none_or(|l| seq.len() == l) {
                rows.push((band, seq.len(), seq.display(&table).to_string(), count));
            }
        }
    }

    if std::io::stdout().is_terminal() {
        outln!(
            "db_size {}  min_supp {}  min_nbd_supp {}  window {}",
            state.db_size(),
            state.params().min_supp(),
            state.params().min_nbd_supp(),
            state.params().window()
        );
        outln!("{:<4} {:<6} {:<30} {}", "band", "len", "pattern", "count");
        for (band, len, pattern, count) in &rows {
            outln!("{band:<4} {len:<6} {pattern:<30} {count}");
        }
    } else {
        outln!("band,length,pattern,count");
        for (band, len, pattern, count) in &rows {
            outln!("{band},{len},{},{count}", csv_quote(pattern));
        }
    }
    Ok(())
}

/// Parses `sym,sym,...:rate` against the generated alphabet.
fn parse_planted(text: &str, alphabet: usize) -> Result<PlantedPattern> {
    let bad = |msg: String| Error::InvalidParams(format!("planted pattern {text:?}: {msg}"));
    let (symbols, rate) = text
        .rsplit_once(':')
        .ok_or_else(|| bad("expected `sym,sym,...:rate`".into()))?;
    let rate: f64 = rate
        .parse()
        .map_err(|_| bad(format!("invalid rate {rate:?}")))?;
    let mut symbol_indexes = Vec::new();
    for name in symbols.split(',') {
        let name = name.trim();
        let idx = (0..alphabet)
            .find(|&i| symbol_name(i) == name)
            .ok_or_else(|| bad(format!("symbol {name:?} not in the alphabet")))?;
        symbol_indexes.push(idx);
    }
    if symbol_indexes.is_empty() {
        return Err(bad("no symbols".into()));
    }
    Ok(PlantedPattern {
        symbol_indexes,
        rate,
    })
}

fn cmd_gen(args: GenArgs) -> Result<()> {
    let planted = args
        .planted
        .iter()
        .map(|p| parse_planted(p, args.alphabet))
        .collect::<Result<Vec<_>>>()?;
    let spec = GenSpec {
        seed: args.seed,
        alphabet: args.alphabet,
        length: args.length,
        start_ts: args.start_ts,
        noise_rate: args.noise,
        planted,
    };
    let mut table = SymbolTable::new();
    let log = generate(&spec, &mut table)?;
    write_file(&args.out, &serialize_log(&log, &table))?;
    outln!("generated {} events -> {}", log.len(), args.out.display());
    Ok(())
}

fn parse_fraction_list(text: &str) -> Result<Vec<Fraction>> {
    text.split(',').map(|s| s.trim().parse()).collect()
}

fn cmd_bench(args: BenchArgs) -> Result<()> {
    let window: Window = args.window.parse()?;
    let mut table = SymbolTable::new();
    let base = parse_log(&read_file(&args.base)?, &mut table)?;
    let mut increments = Vec::new();
    for path in &args.increments {
        increments.push(parse_log(&read_file(path)?, &mut table)?);
    }
    let mut grid = Vec::new();
    for &ms in &parse_fraction_list(&args.min_supp)? {
        for &mn in &parse_fraction_list(&args.min_nbd_supp)? {
            grid.push((ms, mn));
        }
    }
    let records = run_bench(&base, &increments, &grid, window)?;
    let csv = to_csv(&records);
    match &args.out {
        Some(path) => {
            write_file(path, &csv)?;
            outln!("{} rows -> {}", records.len(), path.display());
        }
        None => emit(&csv)?,
    }
    Ok(())
}
