//! The `knot` command: every generator and enumerator from the library,
//! with limits, counts, and an optional instrumentation report.
//!
//! Results go to stdout one item per line (paths as space-separated
//! symbols), so golden files diff cleanly. With `--stats` a single JSON
//! object goes to stderr: the counter deltas for exactly this run.

use std::io::Write;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::{ArgGroup, Parser, Subcommand};
use serde_json::json;

use knot::search::{self, solutions, SearchTree};
use knot::stream::{hamming, hamming_staged, primes, products, products_inf};
use knot::{Error, Nat, Stream};

#[derive(Parser)]
#[command(name = "knot", version, about = "Self-referential lazy structures: streams, memo trees, search trees")]
struct Cli {
    /// Emit a JSON run report (counters, elapsed time) to stderr.
    #[arg(long, global = true)]
    stats: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// First N Hamming numbers (multiples of 2, 3 and 5 only).
    Hamming {
        #[arg(long)]
        count: usize,
        /// Use the staged program built from pairwise disjoint merges.
        #[arg(long)]
        staged: bool,
    },
    /// Ascending products of powers of a factor set.
    #[command(group(ArgGroup::new("factor_source").required(true).args(["factors", "primes"])))]
    Products {
        /// Comma-separated factors, each at least 2.
        #[arg(long, value_delimiter = ',')]
        factors: Option<Vec<u64>>,
        /// Draw factors from the infinite prime stream instead.
        #[arg(long)]
        primes: bool,
        #[arg(long)]
        count: usize,
    },
    /// fib(N) through the memo tree, or the first N values with --list.
    #[command(group(ArgGroup::new("which").required(true).args(["n", "list"])))]
    Fib {
        /// Position to look up (1-based).
        n: Option<u64>,
        /// Rebuild the tree for this one call instead of reusing a handle.
        #[arg(long, conflicts_with = "list")]
        oneshot: bool,
        /// Print the first N values in breadth-first order.
        #[arg(long, value_name = "N")]
        list: Option<u64>,
    },
    /// Permutations of 1..=N as depth-N paths.
    Perms {
        n: u32,
        /// Stop after this many solutions.
        #[arg(long)]
        limit: Option<u64>,
        /// Print only the number of solutions.
        #[arg(long)]
        count_only: bool,
    },
    /// N-queens placements: line k holds the row of the queen in column k.
    Queens {
        n: u32,
        #[arg(long)]
        limit: Option<u64>,
        #[arg(long)]
        count_only: bool,
    },
    /// Square-free sequences of the given length over the alphabet 1..=N.
    Squarefree {
        n: u32,
        #[arg(long)]
        length: usize,
        #[arg(long)]
        limit: Option<u64>,
        #[arg(long)]
        count_only: bool,
    },
}

/// Run with explicit argv and output sinks; returns the process exit code.
/// 0 success, 2 usage (including out-of-domain arguments), 1 runtime error.
pub fn run(argv: &[&str], stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{e}");
                    0
                }
                _ => {
                    let _ = write!(stderr, "{e}");
                    2
                }
            };
        }
    };

    knot::reset_stats();
    search::reset_counters();
    let started = Instant::now();
    match execute(&cli.command, stdout) {
        Ok(emitted) => {
            if cli.stats {
                let elapsed_ms = started.elapsed().as_millis() as u64;
                let s = knot::snapshot_stats();
                let report = json!({
                    "command": command_name(&cli.command),
                    "params": params_json(&cli.command),
                    "outputs_emitted": emitted,
                    "allocations": s.allocations,
                    "forces": s.forces,
                    "nodes": s.nodes,
                    "tests": s.tests,
                    "elapsed_ms": elapsed_ms,
                });
                let _ = writeln!(stderr, "{report}");
            }
            0
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            match e {
                // Bad argument values are usage errors, same as bad flags.
                Error::Domain(_) => 2,
                _ => 1,
            }
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Hamming { .. } => "hamming",
        Command::Products { .. } => "products",
        Command::Fib { .. } => "fib",
        Command::Perms { .. } => "perms",
        Command::Queens { .. } => "queens",
        Command::Squarefree { .. } => "squarefree",
    }
}

fn params_json(c: &Command) -> serde_json::Value {
    match c {
        Command::Hamming { count, staged } => json!({ "count": count, "staged": staged }),
        Command::Products { factors, primes, count } => match factors {
            Some(f) => json!({ "factors": f, "count": count }),
            None => json!({ "primes": primes, "count": count }),
        },
        Command::Fib { n, oneshot, list } => match list {
            Some(k) => json!({ "list": k }),
            None => json!({ "n": n, "oneshot": oneshot }),
        },
        Command::Perms { n, limit, count_only } => {
            json!({ "n": n, "limit": limit, "count_only": count_only })
        }
        Command::Queens { n, limit, count_only } => {
            json!({ "n": n, "limit": limit, "count_only": count_only })
        }
        Command::Squarefree { n, length, limit, count_only } => {
            json!({ "n": n, "length": length, "limit": limit, "count_only": count_only })
        }
    }
}

fn execute(command: &Command, out: &mut dyn Write) -> knot::Result<u64> {
    match command {
        Command::Hamming { count, staged } => {
            let s = if *staged { hamming_staged() } else { hamming() };
            emit_stream(s, *count, out)
        }
        Command::Products { factors, primes: use_primes, count } => {
            let s = if *use_primes {
                products_inf(primes())
            } else {
                let factors = factors.as_deref().unwrap_or(&[]);
                for &f in factors {
                    if f < 2 {
                        return Err(Error::Domain(format!(
                            "factor {f} out of range; factors must be at least 2"
                        )));
                    }
                }
                products(&factors.iter().copied().map(Nat::from).collect::<Vec<_>>())
            };
            emit_stream(s, *count, out)
        }
        Command::Fib { n, oneshot, list } => {
            if let Some(k) = list {
                let s = knot::fib::fib_handle().stream();
                return emit_stream(s, *k as usize, out);
            }
            let n = n.expect("clap group guarantees n or list");
            let value = if *oneshot {
                knot::fib::fib_oneshot(n)?
            } else {
                knot::fib::fib_handle().lookup(n)?
            };
            writeln!(out, "{value}").map_err(io_error)?;
            Ok(1)
        }
        Command::Perms { n, limit, count_only } => {
            let t = search::perm_tree(*n)?;
            emit_solutions(&t, *n as usize, *limit, *count_only, out)
        }
        Command::Queens { n, limit, count_only } => {
            let t = search::queens_tree(*n)?;
            emit_solutions(&t, *n as usize, *limit, *count_only, out)
        }
        Command::Squarefree { n, length, limit, count_only } => {
            let t = search::squarefree_tree(*n)?;
            emit_solutions(&t, *length, *limit, *count_only, out)
        }
    }
}

fn io_error(e: std::io::Error) -> Error {
    Error::Computation(format!("write failed: {e}"))
}

/// Print up to `count` stream elements, one per line; a finite stream may
/// end sooner.
fn emit_stream(s: Stream<Nat>, count: usize, out: &mut dyn Write) -> knot::Result<u64> {
    let mut emitted = 0u64;
    let mut rest = s;
    while (emitted as usize) < count {
        match rest.uncons()? {
            None => break,
            Some((v, tail)) => {
                writeln!(out, "{v}").map_err(io_error)?;
                emitted += 1;
                rest = tail;
            }
        }
    }
    Ok(emitted)
}

fn emit_solutions(
    t: &SearchTree,
    len: usize,
    limit: Option<u64>,
    count_only: bool,
    out: &mut dyn Write,
) -> knot::Result<u64> {
    if count_only && limit.is_none() {
        let count = search::count_solutions(t, len)?;
        writeln!(out, "{count}").map_err(io_error)?;
        return Ok(1);
    }
    let mut found = 0u64;
    let mut s = solutions(t, len);
    while limit.is_none_or(|m| found < m) {
        match s.uncons()? {
            None => break,
            Some((path, rest)) => {
                found += 1;
                if !count_only {
                    let line: Vec<String> = path.iter().map(u32::to_string).collect();
                    writeln!(out, "{}", line.join(" ")).map_err(io_error)?;
                }
                s = rest;
            }
        }
    }
    if count_only {
        writeln!(out, "{found}").map_err(io_error)?;
        return Ok(1);
    }
    Ok(found)
}
