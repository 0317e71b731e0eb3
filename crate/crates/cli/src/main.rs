use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dynwidth::engine::EngineConfig;
use dynwidth::gen::{generate, Mode};
use dynwidth::harness::{bench, csv_bytes, run_trace, verify_trace};
use dynwidth::par::Execution;
use dynwidth::trace::{format_trace, parse_trace};
use dynwidth::Op;

const EXIT_IO: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_SEMANTIC: u8 = 3;
const EXIT_MISMATCH: u8 = 4;

/// Exact width of a planar point set under insertions and deletions.
#[derive(Parser)]
#[command(name = "dynwidth", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute a trace and write one CSV row per operation.
    Run {
        #[arg(long)]
        trace: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Write 0 in the time_ns column so output is reproducible.
        #[arg(long)]
        no_timing: bool,
    },
    /// Compare the width after every operation with a from-scratch oracle.
    Verify {
        #[arg(long)]
        trace: PathBuf,
        /// Deliberately corrupt the engine, to check that mismatches are caught.
        #[arg(long)]
        fault_inject: bool,
        /// Run the oracle on one thread.
        #[arg(long)]
        sequential: bool,
    },
    /// Generate a random trace.
    Gen {
        #[arg(long)]
        mode: Mode,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        /// Defaults to standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Time the engine against the recompute-from-scratch baseline.
    Bench {
        #[arg(long)]
        mode: Mode,
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 3)]
        repeats: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

struct Failure {
    code: u8,
    message: String,
}

fn fail(code: u8, message: impl Into<String>) -> Failure {
    Failure {
        code,
        message: message.into(),
    }
}

fn load(path: &PathBuf) -> Result<Vec<Op>, Failure> {
    let text = fs::read_to_string(path).map_err(|e| fail(EXIT_IO, format!("{}: {e}", path.display())))?;
    parse_trace(&text).map_err(|e| fail(EXIT_PARSE, format!("{}: {e}", path.display())))
}

fn save(path: &PathBuf, bytes: &[u8]) -> Result<(), Failure> {
    fs::write(path, bytes).map_err(|e| fail(EXIT_IO, format!("{}: {e}", path.display())))
}

fn execute(cli: Cli) -> Result<(), Failure> {
    let mut config = EngineConfig::from_env().map_err(|e| fail(EXIT_PARSE, e.to_string()))?;
    match cli.command {
        Command::Run { trace, out, no_timing } => {
            let ops = load(&trace)?;
            let records = run_trace(&ops, config, !no_timing).map_err(|e| fail(EXIT_SEMANTIC, e.to_string()))?;
            save(&out, &csv_bytes(&records))
        }
        Command::Verify {
            trace,
            fault_inject,
            sequential,
        } => {
            let ops = load(&trace)?;
            config.fault_inject = fault_inject;
            let exec = if sequential { Execution::Sequential } else { Execution::Parallel };
            match verify_trace(&ops, config, exec).map_err(|e| fail(EXIT_SEMANTIC, e.to_string()))? {
                None => {
                    println!("ok: width matches the oracle after all {} operations", ops.len());
                    Ok(())
                }
                Some(m) => Err(fail(
                    EXIT_MISMATCH,
                    format!(
                        "mismatch at operation {}: engine width_sq {}, oracle width_sq {}",
                        m.op_index, m.engine, m.oracle
                    ),
                )),
            }
        }
        Command::Gen { mode, n, seed, out } => {
            if n == 0 {
                return Err(fail(EXIT_PARSE, "--n must be at least 1"));
            }
            let text = format_trace(&generate(mode, n, seed));
            match out {
                Some(path) => save(&path, text.as_bytes()),
                None => io::stdout()
                    .write_all(text.as_bytes())
                    .map_err(|e| fail(EXIT_IO, e.to_string())),
            }
        }
        Command::Bench {
            mode,
            sizes,
            repeats,
            out,
            seed,
        } => {
            if sizes.is_empty() || sizes.contains(&0) || sizes.windows(2).any(|w| w[0] >= w[1]) {
                return Err(fail(EXIT_PARSE, "--sizes must be positive and strictly ascending"));
            }
            let rows = bench(mode, &sizes, repeats, seed, config).map_err(|e| fail(EXIT_SEMANTIC, e.to_string()))?;
            for r in &rows {
                println!(
                    "n={:<8} amortized={:>10.0} ns  sum_k={:<8} naive={:>12.0} ns  speedup={:.1}x",
                    r.n, r.amortized_ns, r.sum_k, r.naive_ns_per_op, r.speedup
                );
            }
            if let Some(r) = rows.first() {
                println!("log-log slope of amortized time: {:.3}", r.slope);
            }
            save(&out, &csv_bytes(&rows))
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("dynwidth: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
