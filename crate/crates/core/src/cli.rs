//! The `boolefock` command line: `relations`, `classify`, `sweep`, `replay`.
//!
//! Exit codes: 0 when every check passes (or the state is consistent, or the
//! witness reproduces), 1 when one fails, 2 on configuration or parse errors.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::report;
use crate::states::BooleanState;
use crate::verify::{sweep, CheckReport, Classification, SweepRow, Verifier, Witness};
use crate::CHECK_TOLERANCE;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
    Human,
}

#[derive(Debug, Parser)]
#[command(name = "boolefock", version, about = "Verification harness for Boolean exchangeability")]
struct Cli {
    #[command(flatten)]
    flags: Flags,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Flags {
    /// RNG seed; falls back to BOOLEFOCK_SEED, then 0.
    #[arg(long, global = true, env = "BOOLEFOCK_SEED")]
    seed: Option<u64>,
    /// Pass/fail tolerance of every equality check.
    #[arg(long, global = true, default_value_t = CHECK_TOLERANCE)]
    tolerance: f64,
    /// Samples per check; number of states for `sweep`.
    #[arg(long, global = true)]
    samples: Option<usize>,
    #[arg(long, global = true, default_value_t = 5)]
    max_word_len: usize,
    #[arg(long, global = true, default_value_t = 6)]
    max_rank: usize,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Creation/annihilation relations, matrix units, embedding homomorphism.
    Relations,
    /// De Finetti classification of a state read from JSON.
    Classify {
        #[arg(long)]
        state: PathBuf,
    },
    /// Classification of randomly generated states.
    Sweep,
    /// Recompute the deviation recorded in a witness (or a report holding one).
    Replay {
        #[arg(long)]
        witness: PathBuf,
    },
}

/// Validated run configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub seed: u64,
    pub tolerance: f64,
    pub n_samples: usize,
    pub max_word_len: usize,
    pub max_rank: usize,
    pub output_format: OutputFormat,
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(format!("--tolerance must be positive, got {}", self.tolerance));
        }
        if self.n_samples < 1 {
            return Err("--samples must be at least 1".into());
        }
        if self.max_word_len < 1 {
            return Err("--max-word-len must be at least 1".into());
        }
        if self.max_rank < 1 {
            return Err("--max-rank must be at least 1".into());
        }
        Ok(())
    }

    pub fn verifier(&self) -> Verifier {
        Verifier::new()
            .tolerance(self.tolerance)
            .words(self.n_samples.max(200), self.max_word_len)
            .samples(self.n_samples)
    }
}

fn default_samples(command: &Command) -> usize {
    match command {
        Command::Relations => 500,
        Command::Sweep => 1000,
        Command::Classify { .. } | Command::Replay { .. } => 100,
    }
}

#[derive(Serialize)]
struct SuiteOutput<'a> {
    command: &'static str,
    config: &'a RunConfig,
    passed: bool,
    reports: &'a [CheckReport],
}

#[derive(Serialize)]
struct SweepOutput<'a> {
    command: &'static str,
    config: &'a RunConfig,
    all_consistent: bool,
    rows: &'a [SweepRow],
}

#[derive(Serialize)]
struct ReplayOutput {
    command: &'static str,
    kind: String,
    recorded: f64,
    recomputed: f64,
    reproduced: bool,
}

/// Outcome of a subcommand: exit code plus rendered report.
struct Outcome {
    code: i32,
    body: String,
}

/// Entry point of the binary: parses `args`, runs, writes the report and
/// returns the exit code. Diagnostics go to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    let config = RunConfig {
        seed: cli.flags.seed.unwrap_or(0),
        tolerance: cli.flags.tolerance,
        n_samples: cli.flags.samples.unwrap_or_else(|| default_samples(&cli.command)),
        max_word_len: cli.flags.max_word_len,
        max_rank: cli.flags.max_rank,
        output_format: cli.flags.format,
    };
    if let Err(msg) = config.validate() {
        let _ = writeln!(err, "error: {msg}");
        return EXIT_USAGE;
    }
    let outcome = match &cli.command {
        Command::Relations => Ok(cmd_relations(&config)),
        Command::Classify { state } => cmd_classify(state, &config),
        Command::Sweep => Ok(cmd_sweep(&config)),
        Command::Replay { witness } => cmd_replay(witness, &config),
    };
    let outcome = match outcome {
        Ok(o) => o,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            return EXIT_USAGE;
        }
    };
    let written = match &cli.flags.out {
        Some(path) => fs::write(path, &outcome.body).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => out.write_all(outcome.body.as_bytes()).and_then(|_| out.flush()).map_err(|e| e.to_string()),
    };
    if let Err(msg) = written {
        let _ = writeln!(err, "error: {msg}");
        return EXIT_USAGE;
    }
    outcome.code
}

fn json_line<T: Serialize>(value: &T) -> String {
    let mut s = report::to_json(value).expect("report types serialize");
    s.push('\n');
    s
}

fn cmd_relations(config: &RunConfig) -> Outcome {
    let v = config.verifier();
    let seed = |k| crate::sample::stream_seed(config.seed, k);
    let reports = vec![
        v.check_boolean_relations(config.n_samples, 16, seed(0)),
        v.check_matrix_units(8),
        v.check_embedding_homomorphism(config.n_samples, seed(1)),
    ];
    let passed = reports.iter().all(|r| r.passed);
    let body = match config.output_format {
        OutputFormat::Json => {
            json_line(&SuiteOutput { command: "relations", config, passed, reports: &reports })
        }
        OutputFormat::Csv => report::reports_csv(&reports),
        OutputFormat::Human => report::reports_human(&reports),
    };
    Outcome { code: if passed { EXIT_PASS } else { EXIT_FAIL }, body }
}

fn read(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))
}

/// Parses a state file; diagnostics name the file and the violated invariant.
pub fn load_state(path: &Path) -> Result<BooleanState, String> {
    let text = read(path)?;
    serde_json::from_str(&text).map_err(|e| format!("invalid state in {}: {e}", path.display()))
}

fn cmd_classify(path: &Path, config: &RunConfig) -> Result<Outcome, String> {
    let state = load_state(path)?;
    let c: Classification = config.verifier().classify_definetti(&state, config.seed);
    let body = match config.output_format {
        OutputFormat::Json => json_line(&c),
        OutputFormat::Csv => report::classification_csv(&c),
        OutputFormat::Human => report::classification_human(&c),
    };
    Ok(Outcome { code: if c.consistent { EXIT_PASS } else { EXIT_FAIL }, body })
}

fn cmd_sweep(config: &RunConfig) -> Outcome {
    // --samples counts states here; per-state checks keep fixed sizes
    let verifier = Verifier::new().tolerance(config.tolerance).words(200, config.max_word_len).samples(100);
    let rows = sweep(&verifier, config.n_samples, config.max_rank, config.seed);
    let all_consistent = rows.iter().all(|r| r.consistent);
    let body = match config.output_format {
        OutputFormat::Json => json_line(&SweepOutput { command: "sweep", config, all_consistent, rows: &rows }),
        OutputFormat::Csv => report::sweep_csv(&rows),
        OutputFormat::Human => report::sweep_human(&rows),
    };
    Outcome { code: if all_consistent { EXIT_PASS } else { EXIT_FAIL }, body }
}

/// A witness file holds either a bare witness or a check report carrying one.
pub fn load_witness(path: &Path) -> Result<Witness, String> {
    let text = read(path)?;
    let bare = serde_json::from_str::<Witness>(&text);
    match bare {
        Ok(w) => Ok(w),
        Err(bare_err) => match serde_json::from_str::<CheckReport>(&text) {
            Ok(CheckReport { witness: Some(w), .. }) => Ok(w),
            Ok(_) => Err(format!("{}: report carries no witness", path.display())),
            Err(_) => Err(format!("invalid witness in {}: {bare_err}", path.display())),
        },
    }
}

/// Whether a recomputed deviation matches the recorded one.
pub fn reproduces(recorded: f64, recomputed: f64) -> bool {
    if recorded.is_infinite() || recomputed.is_infinite() {
        return recorded == recomputed;
    }
    (recorded - recomputed).abs() <= 1e-12_f64.max(1e-9 * recorded.abs())
}

fn cmd_replay(path: &Path, config: &RunConfig) -> Result<Outcome, String> {
    let w = load_witness(path)?;
    let recomputed = w.recompute().map_err(|e| format!("witness inputs rejected: {e}"))?;
    let kind = serde_json::to_value(&w)
        .ok()
        .and_then(|v| v.get("kind").and_then(|k| k.as_str()).map(str::to_owned))
        .unwrap_or_default();
    let out = ReplayOutput {
        command: "replay",
        kind,
        recorded: w.deviation(),
        recomputed,
        reproduced: reproduces(w.deviation(), recomputed),
    };
    let body = match config.output_format {
        OutputFormat::Json => json_line(&out),
        OutputFormat::Csv => format!(
            "kind,recorded,recomputed,reproduced\n{},{},{},{}\n",
            out.kind,
            report::fixed(out.recorded),
            report::fixed(out.recomputed),
            out.reproduced
        ),
        OutputFormat::Human => format!(
            "{} witness: recorded {} recomputed {} -> {}\n",
            out.kind,
            report::fixed(out.recorded),
            report::fixed(out.recomputed),
            if out.reproduced { "reproduced" } else { "NOT reproduced" }
        ),
    };
    Ok(Outcome { code: if out.reproduced { EXIT_PASS } else { EXIT_FAIL }, body })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(std::iter::once("boolefock").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn zero_samples_is_a_config_error() {
        let (code, _, err) = run_args(&["relations", "--samples", "0"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("--samples"));
    }

    #[test]
    fn unknown_flag_is_a_config_error() {
        assert_eq!(run_args(&["sweep", "--bogus"]).0, EXIT_USAGE);
        assert_eq!(run_args(&["relations", "--tolerance", "-1"]).0, EXIT_USAGE);
    }

    #[test]
    fn relations_small_run() {
        let (code, out, _) = run_args(&["relations", "--seed", "7", "--samples", "20", "--format", "csv"]);
        assert_eq!(code, EXIT_PASS);
        assert_eq!(out.lines().count(), 4);
        assert!(out.starts_with(report::REPORT_HEADER));
    }

    #[test]
    fn reproduction_tolerance() {
        assert!(reproduces(0.25, 0.25 + 1e-13));
        assert!(!reproduces(0.25, 0.26));
        assert!(reproduces(f64::INFINITY, f64::INFINITY));
    }
}
