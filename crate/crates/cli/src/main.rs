//! `hyperbracket`: decompose trace-zero matrices as commutators inside a
//! hyperplane `{B}^perp`.
//!
//! Exit codes: 0 decomposed or verified, 2 not representable or failed
//! verification, 3 budget exhausted, 1 usage or input errors.

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hyperbracket::oracle::{oracle_search, EXHAUSTIVE_LIMIT};
use hyperbracket::solver::{analyze_n2, N2Structure};
use hyperbracket::textio::{format_instance, format_rows, parse_instance, parse_matrix_with, parse_pair};
use hyperbracket::{
    decompose, sweep, verify_decomposition, Field, Hyperplane, Instance, Mat, OracleMode,
    SolveOutcome, SolverConfig, SweepConfig, DEFAULT_BUDGET,
};
use serde_json::{json, Value};

/// `println!` that ignores a closed stdout (e.g. piping into `head`).
macro_rules! out {
    ($($arg:tt)*) => {{
        let _ = writeln!(io::stdout(), $($arg)*);
    }};
}

const EXIT_USAGE: u8 = 1;
const EXIT_NOT_REPRESENTABLE: u8 = 2;
const EXIT_EXHAUSTED: u8 = 3;

#[derive(Parser)]
#[command(name = "hyperbracket", version, about = "Commutator decompositions inside a matrix hyperplane")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Find (A1, A2) in H^2 with A1 A2 - A2 A1 = A.
    Decompose {
        /// Instance file (`-` for standard input).
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
    /// Check a claimed pair against an instance.
    Verify {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        pair: PathBuf,
    },
    /// Solve many seeded random instances and report the outcome.
    Sweep {
        #[arg(long, default_value = "gf 5")]
        field: String,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        count: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Draw trace-zero normals so that I lies in H.
        #[arg(long)]
        force_identity_in_h: bool,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        #[arg(long)]
        json: bool,
    },
    /// Brute-force search over H.
    Oracle {
        #[arg(long)]
        instance: PathBuf,
        /// Enumerate all of H instead of sampling it.
        #[arg(long)]
        exhaustive: bool,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
    /// Describe [H, H] for a 2x2 normal.
    #[command(name = "analyze-n2")]
    AnalyzeN2 {
        #[arg(long, default_value = "gf 5")]
        field: String,
        /// Normal matrix: rows only, or a full matrix file.
        #[arg(long = "B", id = "normal")]
        normal: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Print a random valid instance.
    Gen {
        #[arg(long, default_value = "gf 5")]
        field: String,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        force_identity_in_h: bool,
    },
}

type CliResult = Result<u8, String>;

fn read_input(path: &Path) -> Result<String, String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| format!("reading standard input: {e}"))?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(|e| format!("reading {}: {e}", path.display()))
    }
}

fn load_instance(path: &Path) -> Result<(Instance, Hyperplane), String> {
    let inst = parse_instance(&read_input(path)?).map_err(|e| format!("{}: {e}", path.display()))?;
    let h = Hyperplane::new(inst.b.clone()).map_err(|e| e.to_string())?;
    Ok((inst, h))
}

fn parse_field(desc: &str) -> Result<Field, String> {
    Field::parse(desc).map_err(|e| e.to_string())
}

fn rows_json(m: &Mat) -> Value {
    let f = m.field();
    Value::from(
        m.rows()
            .iter()
            .map(|r| r.iter().map(|e| f.format_elem(e)).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
    )
}

fn emit_outcome(out: &SolveOutcome, as_json: bool) -> u8 {
    let code = match out {
        SolveOutcome::Decomposed(_) => 0,
        SolveOutcome::NotRepresentable { .. } => EXIT_NOT_REPRESENTABLE,
        SolveOutcome::Exhausted { .. } => EXIT_EXHAUSTED,
    };
    if as_json {
        let mut v = json!({ "status": out.status() });
        match out {
            SolveOutcome::Decomposed(d) => {
                v["strategy"] = json!(d.strategy().tag());
                v["attempts"] = json!(d.attempts());
                v["seed"] = json!(d.seed());
                v["a1"] = rows_json(d.a1());
                v["a2"] = rows_json(d.a2());
            }
            SolveOutcome::NotRepresentable { line_generator } => {
                v["line_generator"] = line_generator.as_ref().map_or(Value::Null, rows_json);
            }
            SolveOutcome::Exhausted { attempts, log } => {
                v["attempts"] = json!(attempts);
                v["log"] = json!(log);
            }
        }
        out!("{}", serde_json::to_string_pretty(&v).expect("json"));
        return code;
    }
    out!("status: {}", out.status());
    match out {
        SolveOutcome::Decomposed(d) => {
            out!("strategy: {}", d.strategy());
            out!("attempts: {}", d.attempts());
            out!("seed: {}", d.seed());
            out!("A1:\n{}", format_rows(d.a1()));
            out!("A2:\n{}", format_rows(d.a2()));
        }
        SolveOutcome::NotRepresentable { line_generator } => {
            if let Some(g) = line_generator {
                out!("[H, H] is the line spanned by:\n{}", format_rows(g));
            }
        }
        SolveOutcome::Exhausted { attempts, log } => {
            out!("attempts: {attempts}");
            for line in log {
                out!("  {line}");
            }
        }
    }
    code
}

fn run(cmd: Command) -> CliResult {
    match cmd {
        Command::Decompose {
            instance,
            budget,
            seed,
            json,
        } => {
            let (inst, h) = load_instance(&instance)?;
            let config = SolverConfig {
                budget,
                seed,
                ..Default::default()
            };
            let out = decompose(&inst.a, &h, &config).map_err(|e| e.to_string())?;
            Ok(emit_outcome(&out, json))
        }
        Command::Verify { instance, pair } => {
            let (inst, h) = load_instance(&instance)?;
            let text = read_input(&pair)?;
            let (a1, a2) =
                parse_pair(&text, inst.a.field(), inst.a.n()).map_err(|e| format!("{}: {e}", pair.display()))?;
            match verify_decomposition(&inst.a, &h, &a1, &a2) {
                Ok(()) => {
                    out!("verified");
                    Ok(0)
                }
                Err(e) => {
                    out!("verification failed: {e}");
                    Ok(EXIT_NOT_REPRESENTABLE)
                }
            }
        }
        Command::Sweep {
            field,
            n,
            count,
            seed,
            force_identity_in_h,
            budget,
            json,
        } => {
            if n == 0 {
                return Err("n must be positive".into());
            }
            let mut config = SweepConfig::new(parse_field(&field)?, n, count, seed);
            config.force_identity_in_h = force_identity_in_h;
            config.budget = budget;
            let report = sweep(&config);
            if json {
                out!("{}", report.to_json());
            } else {
                out!("field: {}", report.field);
                out!("n: {}", report.n);
                out!("successes: {}/{}", report.successes, report.count);
                for (tag, hits) in &report.strategy_histogram {
                    out!("  {tag}: {hits}");
                }
                for f in &report.failures {
                    out!("failure #{} ({}), oracle: {}", f.index, f.status, f.oracle);
                }
                out!("elapsed_ms: {}", report.elapsed_ms);
            }
            Ok(if report.failures.is_empty() { 0 } else { EXIT_EXHAUSTED })
        }
        Command::Oracle {
            instance,
            exhaustive,
            budget,
            seed,
            json,
        } => {
            let (inst, h) = load_instance(&instance)?;
            let (mode, budget) = if exhaustive {
                (OracleMode::Exhaustive, EXHAUSTIVE_LIMIT)
            } else {
                (OracleMode::Sampled, budget)
            };
            let (pair, used) = oracle_search(&inst.a, &h, mode, budget, seed).map_err(|e| e.to_string())?;
            let out = match pair {
                Some((a1, a2)) => SolveOutcome::Decomposed(
                    hyperbracket::Decomposition::new(
                        &inst.a,
                        &h,
                        a1,
                        a2,
                        hyperbracket::Strategy::Exhaustive,
                        used,
                        seed,
                    )
                    .map_err(|e| e.to_string())?,
                ),
                None if exhaustive => SolveOutcome::NotRepresentable { line_generator: None },
                None => SolveOutcome::Exhausted {
                    attempts: used,
                    log: vec!["sampled oracle: nothing found".into()],
                },
            };
            Ok(emit_outcome(&out, json))
        }
        Command::AnalyzeN2 { field, normal, json } => {
            let f = parse_field(&field)?;
            let b = parse_matrix_with(&read_input(&normal)?, &f).map_err(|e| format!("{}: {e}", normal.display()))?;
            let h = Hyperplane::new(b).map_err(|e| e.to_string())?;
            let report = analyze_n2(&h).map_err(|e| e.to_string())?;
            match (&report, json) {
                (N2Structure::FullSl2, true) => out!("{}", json!({ "structure": "full_sl2" })),
                (N2Structure::Line { generator, .. }, true) => {
                    out!("{}", json!({ "structure": "line", "generator": rows_json(generator) }))
                }
                (N2Structure::FullSl2, false) => out!("I is outside H: [H, H] is all of sl2"),
                (N2Structure::Line { generator, .. }, false) => {
                    out!("I lies in H: [H, H] is the line spanned by\n{}", format_rows(generator))
                }
            }
            Ok(0)
        }
        Command::Gen {
            field,
            n,
            seed,
            force_identity_in_h,
        } => {
            if n == 0 {
                return Err("n must be positive".into());
            }
            // Same generator as instance 0 of a sweep with this seed.
            let mut config = SweepConfig::new(parse_field(&field)?, n, 1, seed);
            config.force_identity_in_h = force_identity_in_h;
            let inst = config.instance(0);
            out!("{}", format_instance(&inst));
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
