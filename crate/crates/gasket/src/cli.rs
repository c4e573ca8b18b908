//! Command-line surface: one subcommand per operation family, JSON to
//! stdout by default (CSV for the table, SVG/PGM for figures), deterministic
//! output for identical inputs.

use crate::critical::{self, tol_from_f64, CriticalError};
use crate::expansion::{self, Beta, ExpansionError};
use crate::geometry;
use crate::interval::{Dyadic, RealInterval};
use crate::sft::{self, SftError};
use crate::symbolic::{DigitEPSequence, EPSequence, Word};
use crate::tm::{self, TMFamily};
use crate::univoque::{self, MembershipInput, UnivoqueError};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;
use std::io::Write;
use std::process::ExitCode;

/// Shared numeric configuration.
#[derive(Clone, Debug)]
pub struct Config {
    pub precision_bits: u32,
    pub tol: Dyadic,
}

impl Config {
    fn from_flags(precision_bits: Option<u32>, tol: Option<f64>) -> Result<Config, CliError> {
        let env_bits = std::env::var("UNIVOQUE_PRECISION_BITS")
            .ok()
            .and_then(|v| v.parse::<u32>().ok());
        let bits = precision_bits.or(env_bits).unwrap_or(256);
        if bits < 64 {
            return Err(CliError::usage("precision-bits must be at least 64"));
        }
        let tol = tol.unwrap_or(1e-12);
        if !(tol > 0.0) {
            return Err(CliError::usage("tol must be positive"));
        }
        Ok(Config { precision_bits: bits, tol: tol_from_f64(tol) })
    }
}

#[derive(Debug)]
pub struct CliError {
    pub message: String,
    pub code: u8,
}

impl CliError {
    fn usage(msg: impl Into<String>) -> CliError {
        CliError { message: msg.into(), code: 1 }
    }
    fn undecided(msg: impl Into<String>) -> CliError {
        CliError { message: msg.into(), code: 2 }
    }
}

impl From<ExpansionError> for CliError {
    fn from(e: ExpansionError) -> Self {
        match e {
            ExpansionError::Undecidable(_) | ExpansionError::PrecisionExhausted => {
                CliError::undecided(e.to_string())
            }
            other => CliError::usage(other.to_string()),
        }
    }
}

impl From<CriticalError> for CliError {
    fn from(e: CriticalError) -> Self {
        match e {
            CriticalError::PrecisionExhausted => CliError::undecided(e.to_string()),
            CriticalError::Expansion(inner) => inner.into(),
            other => CliError::usage(other.to_string()),
        }
    }
}

impl From<UnivoqueError> for CliError {
    fn from(e: UnivoqueError) -> Self {
        match e {
            UnivoqueError::Undecidable => CliError::undecided(e.to_string()),
            UnivoqueError::Expansion(inner) => inner.into(),
            UnivoqueError::Critical(inner) => inner.into(),
            other => CliError::usage(other.to_string()),
        }
    }
}

impl From<SftError> for CliError {
    fn from(e: SftError) -> Self {
        match e {
            SftError::Critical(inner) => inner.into(),
            other => CliError::usage(other.to_string()),
        }
    }
}

impl From<crate::symbolic::SymbolicError> for CliError {
    fn from(e: crate::symbolic::SymbolicError) -> Self {
        CliError::usage(e.to_string())
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "gasket",
    about = "Critical bases, unique codings and dimension bounds for fat Sierpinski gaskets",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// working precision in bits (env UNIVOQUE_PRECISION_BITS overrides the default 256)
    #[arg(long)]
    precision_bits: Option<u32>,
    /// enclosure tolerance for root finding (default 1e-12)
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Both critical bases for a range of M, 5-decimal table
    CriticalTable {
        #[arg(long)]
        from: u32,
        #[arg(long)]
        to: u32,
        /// CSV instead of JSON
        #[arg(long)]
        csv: bool,
        #[arg(long, default_value_t = 1)]
        threads: usize,
        #[command(flatten)]
        common: Common,
    },
    /// First critical base (generalized golden ratio)
    BetaG {
        #[arg(long)]
        m: u32,
        #[command(flatten)]
        common: Common,
    },
    /// Second critical base (Thue-Morse series root)
    BetaC {
        #[arg(long)]
        m: u32,
        #[command(flatten)]
        common: Common,
    },
    /// Increasing ladder below the second base (or decreasing with --hat)
    BetaLadder {
        #[arg(long)]
        m: u32,
        #[arg(long, default_value_t = 4)]
        n_max: usize,
        /// the decreasing ladder above the second base
        #[arg(long)]
        hat: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Quasi-greedy expansion of 1 in the given base
    Delta {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        beta: String,
        #[arg(long, default_value_t = 64)]
        len: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Base whose expansion of 1 equals the given sequence
    DeltaInverse {
        #[arg(long)]
        m: u32,
        /// integer sequence "PRE | PER", e.g. "| 100"
        #[arg(long)]
        seq: String,
        #[command(flatten)]
        common: Common,
    },
    /// Three-row membership test of a digit sequence
    Check {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        beta: String,
        /// digit sequence "PRE | PER" with digits "i,j" separated by ";"
        /// (no "|" marks a finite stream prefix)
        #[arg(long)]
        seq: String,
        #[arg(long, default_value_t = 512)]
        depth: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Surviving digit-prefix count for a planar point
    CountCodings {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        beta: String,
        /// point given as the value of a digit sequence
        #[arg(long)]
        seq: Option<String>,
        /// or explicit coordinates
        #[arg(long)]
        x: Option<String>,
        #[arg(long)]
        y: Option<String>,
        #[arg(long, default_value_t = 16)]
        depth: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Phase of the uniqueness structure at a base
    Classify {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        beta: String,
        #[command(flatten)]
        common: Common,
    },
    /// Eventually periodic tails of the level-n difference set
    Tails {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Subshift dimension bounds at level k (requires beta above the gate)
    SftDim {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        beta: String,
        /// also print the labeled graph in DOT form
        #[arg(long)]
        dot: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Dimension of the no-repeat shift at M=1 (golden ratio by default)
    MultinacciDim {
        #[arg(long)]
        beta: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Exhaustive shift-inequality verification for the three families
    VerifyLemmas {
        #[arg(long, default_value_t = 8)]
        n_max: usize,
        #[arg(long, default_value_t = 3)]
        max_family_n: u32,
        #[command(flatten)]
        common: Common,
    },
    /// First-generation SVG figure
    Render {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        beta: String,
        #[arg(long)]
        out: Option<String>,
        /// SVG output (the only figure format; kept for explicitness)
        #[arg(long)]
        svg: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Escape-time grid for the expanding map with the overlap hole
    SurvivorGrid {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        beta: String,
        #[arg(long, default_value_t = 512)]
        resolution: usize,
        #[arg(long, default_value_t = 32)]
        iterations: u32,
        /// write the PGM image here (summary JSON goes to stdout)
        #[arg(long)]
        out: Option<String>,
        #[arg(long, default_value_t = 1)]
        threads: usize,
        #[command(flatten)]
        common: Common,
    },
}

pub fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().collect();
    let mut stdout = std::io::stdout().lock();
    match run(&args, &mut stdout) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

fn parse_beta(text: &str, m: u32, prec: u32) -> Result<Beta, CliError> {
    Beta::from_decimal(text, m, prec).map_err(|e| CliError::usage(e.to_string()))
}

fn beta_json(b: &Beta) -> serde_json::Value {
    let v = b.value();
    json!({
        "lo": v.lo().to_decimal(30, false),
        "hi": v.hi().to_decimal(30, true),
        "width": v.width().to_decimal(30, true),
        "decimal": v.mid().to_decimal_half_even(12),
    })
}

fn interval_json(v: &RealInterval) -> serde_json::Value {
    json!({
        "lo": v.lo().to_decimal(30, false),
        "hi": v.hi().to_decimal(30, true),
    })
}

fn print_json<W: Write, T: Serialize>(out: &mut W, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::usage(format!("serialization failed: {e}")))?;
    writeln!(out, "{text}").map_err(|e| CliError::usage(e.to_string()))
}

/// Dispatches one invocation; everything written to `out`.
pub fn run<W: Write>(argv: &[String], out: &mut W) -> Result<(), CliError> {
    let cli = Cli::try_parse_from(argv).map_err(|e| CliError::usage(e.to_string()))?;
    match cli.command {
        Command::CriticalTable { from, to, csv, threads, common } => {
            let cfg = Config::from_flags(common.precision_bits, common.tol)?;
            if from < 1 || from > to {
                return Err(CliError::usage("need 1 <= from <= to"));
            }
            let rows = table_rows(from, to, &cfg.tol, threads)?;
            if csv {
                writeln!(out, "M,beta_G,beta_c,width_G,width_c")
                    .map_err(|e| CliError::usage(e.to_string()))?;
                for r in &rows {
                    writeln!(out, "{},{},{},{},{}", r.m, r.beta_g, r.beta_c, r.width_g, r.width_c)
                        .map_err(|e| CliError::usage(e.to_string()))?;
                }
            } else {
                print_json(out, &rows)?;
            }
            Ok(())
        }
        Command::BetaG { m, common } => {
            let cfg = Config::from_flags(common.precision_bits, common.tol)?;
            let b = critical::beta_g(m, &cfg.tol)?;
            print_json(out, &json!({"m": m, "beta_g": beta_json(&b)}))
        }
        Command::BetaC { m, common } => {
            let cfg = Config::from_flags(common.precision_bits, common.tol)?;
            let b = critical::beta_c(m, &cfg.tol)?;
            print_json(out, &json!({"m": m, "beta_c": beta_json(&b)}))
        }
        Command::BetaLadder { m, n_max, hat, common } => {
            let cfg = Config::from_flags(common.precision_bits, common.tol)?;
            if n_max > 8 {
                return Err(CliError::usage("n-max is capped at 8"));
            }
            let ladder = if hat {
                critical::beta_hat_ladder(m, n_max, &cfg.tol)?
            } else {
                critical::beta_n_ladder(m, n_max, &cfg.tol)?
            };
            let rows: Vec<serde_json::Value> = ladder
                .iter()
                .enumerate()
                .map(|(n, b)| {
                    json!({
                        "n": n,
                        "beta": beta_json(b),
                        "delta": b.delta_known().map(|s| s.to_text()),
                    })
                })
                .collect();
            print_json(out, &json!({"m": m, "hat": hat, "ladder": rows}))
        }
        Command::Delta { m, beta, len, common } => {
            let cfg = Config::from_flags(common.precision_bits, common.tol)?;
            let b = parse_beta(&beta, m, cfg.precision_bits)?;
            let digits = expansion::quasi_greedy_one(&b, len)?;
            let text: Vec<String> = digits.iter().map(|d| d.to_string()).collect();
            print_json(out, &json!({"m": m, "beta": beta, "digits": text.join(",")}))
        }
        Command::DeltaInverse { m, seq, common } => {
            let cfg = Config::from_flags(common.precision_bits, common.tol)?;
            let s = EPSequence::parse(&seq)?;
            let b = expansion::delta_inverse(&s, m, &cfg.tol)?;
            print_json(out, &json!({"m": m, "seq": s.to_text(), "beta": beta_json(&b)}))
        }
        Command::Check { m, beta, seq, depth, common } => {
            let cfg = Config::from_flags(common.precision_bits, common.tol)?;
            let b = parse_beta(&beta, m, cfg.precision_bits)?;
            let input = parse_membership_input(&seq, m)?;
            let verdict = univoque::check_membership(&input, &b, depth)?;
            print_json(out, &verdict)
        }
        Command::CountCodings { m, beta, seq, x, y, depth, common } => {
            let cfg = Config::from_flags(common.precision_bits, common.tol)?;
            let b = parse_beta(&beta, m, cfg.precision_bits)?;
            let (px, py) = match (seq, x, y) {
                (Some(seq), None, None) => {
                    let s = DigitEPSequence::parse(&seq, m)?;
                    univoque::point_of_sequence(&s, &b, 256)?
                }
                (None, Some(x), Some(y)) => (
                    RealInterval::from_decimal(&x, cfg.precision_bits)
                        .map_err(CliError::usage)?,
                    RealInterval::from_decimal(&y, cfg.precision_bits)
                        .map_err(CliError::usage)?,
                ),
                _ => return Err(CliError::usage("give either --seq or both --x and --y")),
            };
            let c = univoque::count_codings((&px, &py), &b, depth)?;
            print_json(out, &c)
        }
        Command::Classify { m, beta, common } => {
            let cfg = Config::from_flags(common.precision_bits, common.tol)?;
            let b = parse_beta(&beta, m, cfg.precision_bits)?;
            let report = univoque::classify_regime(m, &b, &cfg.tol)?;
            print_json(out, &report)
        }
        Command::Tails { m, n, common } => {
            let _ = Config::from_flags(common.precision_bits, common.tol)?;
            if n > 8 {
                return Err(CliError::usage("n is capped at 8"));
            }
            let tails = univoque::difference_tail_enumerate(m, n)?;
            let texts: Vec<String> = tails.iter().map(|t| t.to_text()).collect();
            print_json(out, &json!({"m": m, "n": n, "tails": texts}))
        }
        Command::SftDim { m, k, beta, dot, common } => {
            let cfg = Config::from_flags(common.precision_bits, common.tol)?;
            if k > 8 {
                return Err(CliError::usage("k is capped at 8"));
            }
            let b = parse_beta(&beta, m, cfg.precision_bits)?;
            let report = sft::dim_bounds_report(m, k, &b, &cfg.tol)?;
            if dot {
                let g = sft::build_xk_graph(m, k);
                write!(out, "{}", g.to_dot()).map_err(|e| CliError::usage(e.to_string()))?;
            }
            print_json(out, &report)
        }
        Command::MultinacciDim { beta, common } => {
            let cfg = Config::from_flags(common.precision_bits, common.tol)?;
            let b = match beta {
                Some(text) => parse_beta(&text, 1, cfg.precision_bits)?,
                None => expansion::delta_inverse(
                    &EPSequence::parse("| 10").unwrap(),
                    1,
                    &cfg.tol,
                )?,
            };
            let rho = sft::spectral_radius(&sft::multinacci_adjacency(), &cfg.tol)?;
            let dim = sft::multinacci_dimension(&b, &cfg.tol)?;
            print_json(
                out,
                &json!({
                    "beta": beta_json(&b),
                    "spectral_radius": interval_json(&rho),
                    "dimension": interval_json(&dim),
                    "dimension_5dp": dim.mid().to_decimal_half_even(5),
                }),
            )
        }
        Command::VerifyLemmas { n_max, max_family_n, common } => {
            let _ = Config::from_flags(common.precision_bits, common.tol)?;
            if n_max > 8 {
                return Err(CliError::usage("n-max is capped at 8"));
            }
            let mut reports = Vec::new();
            let mut all_pass = true;
            for fam_n in 0..=max_family_n {
                for m in [3 * fam_n + 1, 3 * fam_n + 2, 3 * fam_n + 3] {
                    let family = TMFamily::from_m(m).unwrap();
                    for n in 0..=n_max {
                        let r = tm::verify_tm_inequalities(&family, n);
                        all_pass &= r.pass;
                        reports.push(r);
                    }
                }
            }
            print_json(out, &json!({"all_pass": all_pass, "reports": reports}))
        }
        Command::Render { m, beta, out: out_file, svg: _, common } => {
            let cfg = Config::from_flags(common.precision_bits, common.tol)?;
            let b = parse_beta(&beta, m, cfg.precision_bits)?;
            let svg = geometry::render_first_generation(&b);
            match out_file {
                Some(path) => std::fs::write(&path, svg)
                    .map_err(|e| CliError::usage(format!("cannot write {path}: {e}")))?,
                None => {
                    write!(out, "{svg}").map_err(|e| CliError::usage(e.to_string()))?;
                }
            }
            Ok(())
        }
        Command::SurvivorGrid { m, beta, resolution, iterations, out: out_file, threads, common } => {
            let cfg = Config::from_flags(common.precision_bits, common.tol)?;
            if resolution < 2 || resolution > 4096 {
                return Err(CliError::usage("resolution must be in 2..=4096"));
            }
            if iterations < 1 || iterations > 64 {
                return Err(CliError::usage("iterations must be in 1..=64"));
            }
            let b = parse_beta(&beta, m, cfg.precision_bits)?;
            let grid = geometry::survivor_grid_threaded(&b, resolution, iterations, threads);
            if let Some(path) = out_file {
                std::fs::write(&path, grid.to_pgm())
                    .map_err(|e| CliError::usage(format!("cannot write {path}: {e}")))?;
            }
            print_json(
                out,
                &json!({
                    "m": m,
                    "beta": beta,
                    "resolution": resolution,
                    "iterations": iterations,
                    "survivors": grid.survivors(),
                    "survivor_fraction": grid.survivors() as f64 / (resolution * resolution) as f64,
                }),
            )
        }
    }
}

fn table_rows(
    from: u32,
    to: u32,
    tol: &Dyadic,
    threads: usize,
) -> Result<Vec<critical::TableRow>, CliError> {
    let ms: Vec<u32> = (from..=to).collect();
    let threads = threads.clamp(1, 32);
    if threads == 1 || ms.len() == 1 {
        return Ok(critical::critical_table(from, to, tol)?);
    }
    let mut rows: Vec<Option<Result<critical::TableRow, CriticalError>>> =
        (0..ms.len()).map(|_| None).collect();
    let chunk = ms.len().div_ceil(threads);
    std::thread::scope(|scope| {
        for (ms_chunk, rows_chunk) in ms.chunks(chunk).zip(rows.chunks_mut(chunk)) {
            scope.spawn(move || {
                for (m, slot) in ms_chunk.iter().zip(rows_chunk.iter_mut()) {
                    *slot = Some(critical::table_row(*m, tol));
                }
            });
        }
    });
    rows.into_iter().map(|r| r.expect("filled").map_err(CliError::from)).collect()
}

fn parse_membership_input(seq: &str, m: u32) -> Result<MembershipInput, CliError> {
    if seq.contains('|') {
        Ok(MembershipInput::Ep(DigitEPSequence::parse(seq, m)?))
    } else {
        // finite stream prefix: bare digit-pair list
        let parsed = DigitEPSequence::parse(&format!("| {seq}"), m)?;
        Ok(MembershipInput::Stream(Word::new(parsed.per.digits, m)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> Result<String, CliError> {
        let mut argv = vec!["gasket".to_string()];
        argv.extend(args.iter().map(|s| s.to_string()));
        let mut buf = Vec::new();
        run(&argv, &mut buf)?;
        Ok(String::from_utf8(buf).unwrap())
    }

    #[test]
    fn table_csv_shape() {
        let text =
            run_capture(&["critical-table", "--from", "1", "--to", "3", "--csv", "--tol", "1e-10"])
                .unwrap();
        let lines: Vec<&str> = text.trim().lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[0], "M,beta_G,beta_c,width_G,width_c");
        assert!(lines[1].starts_with("1,1.46557,1.55356,"));
        assert!(lines[3].starts_with("3,2.00000,2.40462,"));
    }

    #[test]
    fn table_threads_match_single() {
        let a = run_capture(&["critical-table", "--from", "1", "--to", "4", "--csv"]).unwrap();
        let b = run_capture(&["critical-table", "--from", "1", "--to", "4", "--csv", "--threads", "3"])
            .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn check_member_json() {
        let text =
            run_capture(&["check", "--m", "1", "--beta", "1.52", "--seq", "| 1,0;0,1;0,0"])
                .unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["status"], "Member");
    }

    #[test]
    fn check_stream_input() {
        let text =
            run_capture(&["check", "--m", "1", "--beta", "1.52", "--seq", "1,0;0,1;0,0;1,0"])
                .unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert!(v["status"]["VerifiedToDepth"]["depth"].is_number(), "{v}");
    }

    #[test]
    fn delta_and_inverse_round_trip() {
        let text = run_capture(&["delta-inverse", "--m", "1", "--seq", "| 100"]).unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        let dec = v["beta"]["decimal"].as_str().unwrap();
        assert!(dec.starts_with("1.4655712318"), "{dec}");

        let text = run_capture(&["delta", "--m", "1", "--beta", "1.8", "--len", "8"]).unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["digits"], "1,1,0,1,0,1,0,1");
    }

    #[test]
    fn classify_json() {
        let text = run_capture(&["classify", "--m", "2", "--beta", "1.9"]).unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["regime"], "CountablyInfinite");
    }

    #[test]
    fn render_to_buffer_and_determinism() {
        let a = run_capture(&["render", "--m", "4", "--beta", "4.0"]).unwrap();
        assert_eq!(a.matches("class=\"dark\"").count(), 18);
        let b = run_capture(&["render", "--m", "4", "--beta", "4.0"]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn usage_errors_are_code_one() {
        let mut buf = Vec::new();
        let e = run(&["gasket".into(), "no-such-command".into()], &mut buf).unwrap_err();
        assert_eq!(e.code, 1);
        let e = run_capture(&["critical-table", "--from", "3", "--to", "1"]).unwrap_err();
        assert_eq!(e.code, 1);
        let e = run_capture(&["delta-inverse", "--m", "1", "--seq", "| 010"]).unwrap_err();
        assert_eq!(e.code, 1);
    }

    #[test]
    fn verify_lemmas_small() {
        let text = run_capture(&["verify-lemmas", "--n-max", "2", "--max-family-n", "1"]).unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["all_pass"], true);
    }

    #[test]
    fn multinacci_subcommand() {
        let text = run_capture(&["multinacci-dim"]).unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["dimension_5dp"], "1.44042");
    }

    #[test]
    fn tails_subcommand() {
        let text = run_capture(&["tails", "--m", "3", "--n", "0"]).unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["tails"].as_array().unwrap().len(), 1);
    }
}
