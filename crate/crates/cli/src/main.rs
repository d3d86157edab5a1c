//! `theta`: batch computations over `Θ_n`, level-trees and the
//! Eilenberg-MacLane cell models.

mod budget;

use std::io::{self, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use theta_core::counting::{euler_char, expected_euler_char, fib_numbers, format_rational};
use theta_core::presheaf::{cell_census, chain_complex, homology_f2, oracle_multisimplicial, EilenbergMacLane};
use theta_core::trees::{enumerate_pruned, enumerate_trees};
use theta_core::verify::{run_suite, Suite};
use theta_core::{FiniteAbelianGroup, ThetaError};

const EXIT_MISMATCH: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_UNSUPPORTED: u8 = 3;

#[derive(Parser)]
#[command(name = "theta", version, about = "Level-trees, Θ_n operators and Eilenberg-MacLane cell models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List level-trees of bounded height with a given number of edges.
    Trees {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        edges: usize,
        /// Only trees whose leaves all sit at height n.
        #[arg(long)]
        pruned: bool,
    },
    /// Cell censuses and mod-2 homology of K(π, n).
    Em {
        #[command(subcommand)]
        what: EmCommand,
    },
    /// Generalized Fibonacci numbers and Euler characteristics.
    Count {
        #[command(subcommand)]
        what: CountCommand,
    },
    /// Run an invariant suite.
    Verify {
        #[arg(long, default_value = "all", value_parser = clap::builder::PossibleValuesParser::new(Suite::NAMES))]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct EmArgs {
    #[arg(long)]
    n: usize,
    /// Group spec such as z2, z3 or z2xz4.
    #[arg(long)]
    group: String,
    #[arg(long = "max-dim")]
    max_dim: usize,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Subcommand)]
enum EmCommand {
    /// Non-degenerate cells per dimension.
    Cells {
        #[command(flatten)]
        args: EmArgs,
    },
    /// F₂ Betti numbers in degrees below the dimension bound.
    Homology {
        #[command(flatten)]
        args: EmArgs,
        /// Cross-check against the independent (bi)simplicial computation.
        #[arg(long)]
        oracle: bool,
    },
}

#[derive(Subcommand)]
enum CountCommand {
    /// f^0, f^1, .. from the recursion.
    Fib {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        order: u64,
        #[arg(long, default_value_t = 10)]
        terms: usize,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// The virtual Euler characteristic p^((-1)^n).
    Euler {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        order: u64,
    },
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: EXIT_USAGE, message: message.into() }
    }
}

impl From<ThetaError> for Failure {
    fn from(e: ThetaError) -> Self {
        let code = match e {
            ThetaError::Unsupported(_) => EXIT_UNSUPPORTED,
            ThetaError::Invariant(_) => EXIT_MISMATCH,
            _ => EXIT_USAGE,
        };
        Failure { code, message: e.to_string() }
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = io::stdout().lock();
    let result = match cli.command {
        Command::Trees { n, edges, pruned } => cmd_trees(&mut out, n, edges, pruned),
        Command::Em { what } => cmd_em(&mut out, what),
        Command::Count { what } => cmd_count(&mut out, what),
        Command::Verify { suite, seed } => cmd_verify(&mut out, &suite, seed),
    };
    let _ = out.flush();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("theta: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn write_out(out: &mut impl Write, text: &str) -> Outcome {
    out.write_all(text.as_bytes()).map_err(|e| Failure { code: EXIT_MISMATCH, message: e.to_string() })
}

fn cmd_trees(out: &mut impl Write, n: usize, edges: usize, pruned: bool) -> Outcome {
    budget::check(budget::tree_listing_bytes(n, edges))?;
    let trees = if pruned { enumerate_pruned(n, edges) } else { enumerate_trees(n, edges) };
    let mut text = String::new();
    for t in trees {
        text.push_str(&t.render());
        text.push('\n');
    }
    write_out(out, &text)
}

fn parse_em(args: &EmArgs) -> Result<EilenbergMacLane, Failure> {
    if args.n == 0 {
        return Err(Failure::usage("--n must be at least 1"));
    }
    let pi: FiniteAbelianGroup = args.group.parse()?;
    if pi.order() < 2 {
        return Err(Failure::usage("the group must be non-trivial"));
    }
    Ok(EilenbergMacLane::new(pi, args.n)?)
}

fn table(format: Format, header: (&str, &str), rows: &[(String, String)]) -> String {
    match format {
        Format::Csv => {
            let mut s = format!("{},{}\n", header.0, header.1);
            for (a, b) in rows {
                s.push_str(&format!("{a},{b}\n"));
            }
            s
        }
        Format::Json => {
            // numeric cells stay numbers in JSON
            let value = |v: &String| {
                serde_json::from_str::<serde_json::Value>(v).unwrap_or_else(|_| serde_json::Value::String(v.clone()))
            };
            let list: Vec<serde_json::Value> = rows
                .iter()
                .map(|(a, b)| {
                    let mut m = serde_json::Map::new();
                    m.insert(header.0.into(), value(a));
                    m.insert(header.1.into(), value(b));
                    serde_json::Value::Object(m)
                })
                .collect();
            format!("{}\n", serde_json::Value::Array(list))
        }
    }
}

fn cmd_em(out: &mut impl Write, what: EmCommand) -> Outcome {
    match what {
        EmCommand::Cells { args } => {
            let k = parse_em(&args)?;
            budget::check(budget::census_bytes(args.n, k.group().order() as u64, args.max_dim))?;
            let census = cell_census(&k, args.max_dim);
            let rows: Vec<(String, String)> =
                census.iter().enumerate().map(|(d, c)| (d.to_string(), c.to_string())).collect();
            write_out(out, &table(args.format, ("dimension", "count"), &rows))
        }
        EmCommand::Homology { args, oracle } => {
            let k = parse_em(&args)?;
            if oracle && args.n > 2 {
                return Err(Failure {
                    code: EXIT_UNSUPPORTED,
                    message: format!("the oracle supports n <= 2, got n = {}", args.n),
                });
            }
            budget::check(budget::homology_bytes(args.n, k.group().order() as u64, args.max_dim))?;
            let complex = chain_complex(&k, args.max_dim)?;
            let betti: Vec<usize> = (0..args.max_dim).map(|d| homology_f2(&complex, d)).collect::<Result<_, _>>()?;
            let rows: Vec<(String, String)> =
                betti.iter().enumerate().map(|(d, b)| (d.to_string(), b.to_string())).collect();
            write_out(out, &table(args.format, ("degree", "betti_f2"), &rows))?;
            if oracle {
                let expected = oracle_multisimplicial(k.group(), args.n, args.max_dim)?;
                if let Some(d) = (0..betti.len()).find(|&d| betti[d] != expected[d]) {
                    return Err(Failure {
                        code: EXIT_MISMATCH,
                        message: format!("oracle mismatch in degree {d}: {} vs {}", betti[d], expected[d]),
                    });
                }
            }
            Ok(())
        }
    }
}

fn cmd_count(out: &mut impl Write, what: CountCommand) -> Outcome {
    let check = |n: usize, order: u64| -> Outcome {
        if n == 0 {
            return Err(Failure::usage("--n must be at least 1"));
        }
        if order < 2 {
            return Err(Failure::usage("--order must be at least 2"));
        }
        Ok(())
    };
    match what {
        CountCommand::Fib { n, order, terms, format } => {
            check(n, order)?;
            if terms == 0 {
                return write_out(out, &table(format, ("k", "f"), &[]));
            }
            let f = fib_numbers(n, order, terms - 1)?;
            let rows: Vec<(String, String)> = f.iter().enumerate().map(|(k, v)| (k.to_string(), v.to_string())).collect();
            write_out(out, &table(format, ("k", "f"), &rows))
        }
        CountCommand::Euler { n, order } => {
            check(n, order)?;
            let chi = euler_char(n, order)?;
            write_out(out, &format!("{}\n", format_rational(&chi)))?;
            if chi != expected_euler_char(n, order) {
                return Err(Failure {
                    code: EXIT_MISMATCH,
                    message: format!("expected {}", format_rational(&expected_euler_char(n, order))),
                });
            }
            Ok(())
        }
    }
}

fn cmd_verify(out: &mut impl Write, suite: &str, seed: u64) -> Outcome {
    let suite: Suite = suite.parse()?;
    let outcomes = run_suite(suite, seed);
    let mut text = String::new();
    for o in &outcomes {
        text.push_str(&format!("{o}\n"));
    }
    let passed = outcomes.iter().filter(|o| o.passed).count();
    text.push_str(&format!("{passed}/{} checks passed\n", outcomes.len()));
    write_out(out, &text)?;
    if passed != outcomes.len() {
        return Err(Failure { code: EXIT_MISMATCH, message: "verification failed".into() });
    }
    Ok(())
}
