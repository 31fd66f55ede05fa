//! `polyclone`: command-line access to the library over its text formats.
//!
//! Exit codes: 0 when the command completed (SAT and UNSAT alike), 2 for
//! usage and input errors, 3 when a search was refused by a budget, 1 when
//! `--verify` rejects a witness.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use polyclone::Budget;

use commands::{Failure, Report};

#[derive(Parser, Debug)]
#[command(
    name = "polyclone",
    version,
    about = "Polymorphism clones, pp-definability, interpretations and CSP hardness on finite structures"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Emit the versioned JSON form instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Re-check every witness before printing it.
    #[arg(long, global = true)]
    pub verify: bool,
    /// Worker threads (defaults to the number of CPUs).
    #[arg(long, global = true, value_name = "N")]
    pub jobs: Option<usize>,
    /// Largest number of candidate operation tables a polymorphism search may
    /// range over, as an integer or `2^k`.
    #[arg(long, global = true, value_name = "COUNT", value_parser = parse_count, default_value = "2^24")]
    pub max_candidates: f64,
    /// Power bound for the hardness and HSP searches.
    #[arg(long, global = true, value_name = "N")]
    pub max_power: Option<usize>,
    /// Arity bound for the truncated polymorphism algebra.
    #[arg(long, global = true, value_name = "K")]
    pub max_arity: Option<usize>,
}

impl Global {
    pub fn budget(&self) -> Budget {
        Budget::default().with_candidate_bits(self.max_candidates)
    }
}

/// `log2` of a count written as an integer or as `2^k`.
fn parse_count(s: &str) -> Result<f64, String> {
    if let Some(exp) = s.strip_prefix("2^") {
        return exp.parse::<f64>().map_err(|e| e.to_string());
    }
    let n: u64 = s.parse().map_err(|e: std::num::ParseIntError| e.to_string())?;
    if n == 0 {
        return Err("must be positive".into());
    }
    Ok((n as f64).log2())
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide a primitive positive sentence in a structure.
    Solve {
        #[arg(long)]
        structure: PathBuf,
        #[arg(long)]
        sentence: PathBuf,
    },
    /// List the polymorphisms of a given arity.
    Pol {
        #[arg(long)]
        structure: PathBuf,
        #[arg(long)]
        arity: usize,
    },
    /// Decide pp-definability of a relation and print a definition or a
    /// separating polymorphism.
    Ppdef {
        #[arg(long)]
        structure: PathBuf,
        #[arg(long)]
        relation: PathBuf,
    },
    /// Primitive positive interpretations.
    #[command(subcommand)]
    Interpret(InterpretCommand),
    /// Translate a sentence over the target into one over the host.
    Reduce {
        #[arg(long)]
        interp: PathBuf,
        #[arg(long)]
        sentence: PathBuf,
    },
    /// Search for a two-element projection quotient of the polymorphism
    /// algebra.
    Hardness {
        #[arg(long)]
        structure: PathBuf,
        /// Also write the text report to this file.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// The Betweenness problem over the rationals.
    #[command(subcommand)]
    Betw(BetwCommand),
    /// Finite algebras.
    #[command(subcommand)]
    Algebra(AlgebraCommand),
}

#[derive(Subcommand, Debug)]
enum InterpretCommand {
    /// Check an interpretation with a coordinate map on every atomic formula.
    Verify {
        #[arg(long)]
        host: PathBuf,
        #[arg(long)]
        target: PathBuf,
        #[arg(long)]
        interp: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
enum BetwCommand {
    /// Find a linear order satisfying the instance.
    Solve {
        #[arg(long)]
        instance: PathBuf,
    },
    /// Find the dominant coordinate of a sampled function.
    Classify {
        /// Sample file.
        #[arg(long, conflicts_with = "expr", required_unless_present = "expr")]
        sample: Option<PathBuf>,
        /// Expression file, sampled on the grid `{-r..r}^k`.
        #[arg(long)]
        expr: Option<PathBuf>,
        #[arg(long, requires = "expr")]
        arity: Option<usize>,
        #[arg(long, default_value_t = 2)]
        radius: usize,
    },
    /// Derive a Betw violation from a function with no dominant coordinate.
    Falsify {
        #[arg(long)]
        expr: PathBuf,
        #[arg(long)]
        arity: Option<usize>,
        /// Witnesses are searched on the grid `{-r..r}^k`.
        #[arg(long, default_value_t = 2)]
        radius: usize,
    },
}

#[derive(Subcommand, Debug)]
enum AlgebraCommand {
    /// Is `B` in the pseudovariety generated by `A`?
    Hsp {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
    /// Does the clone of `A` map onto the clone of `B` naturally?
    Nathom {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long, default_value_t = polyclone::algebra::DEFAULT_TERM_DEPTH)]
        depth: usize,
    },
}

fn run(cli: Cli) -> Result<Report, Failure> {
    let g = &cli.global;
    match cli.command {
        Command::Solve { structure, sentence } => commands::solve(g, &structure, &sentence),
        Command::Pol { structure, arity } => commands::pol(g, &structure, arity),
        Command::Ppdef { structure, relation } => commands::ppdef(g, &structure, &relation),
        Command::Interpret(InterpretCommand::Verify { host, target, interp }) => {
            commands::interpret_verify(g, &host, &target, &interp)
        }
        Command::Reduce { interp, sentence } => commands::reduce(g, &interp, &sentence),
        Command::Hardness { structure, report } => commands::hardness(g, &structure, report.as_deref()),
        Command::Betw(BetwCommand::Solve { instance }) => commands::betw_solve(g, &instance),
        Command::Betw(BetwCommand::Classify {
            sample,
            expr,
            arity,
            radius,
        }) => commands::betw_classify(g, sample.as_deref(), expr.as_deref(), arity, radius),
        Command::Betw(BetwCommand::Falsify { expr, arity, radius }) => commands::betw_falsify(g, &expr, arity, radius),
        Command::Algebra(AlgebraCommand::Hsp { a, b }) => commands::algebra_hsp(g, &a, &b),
        Command::Algebra(AlgebraCommand::Nathom { a, b, depth }) => commands::algebra_nathom(g, &a, &b, depth),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Some(n) = cli.global.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let json = cli.global.json;
    match run(cli) {
        Ok(report) => {
            if json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&report.json).expect("JSON values serialize")
                );
            } else {
                print!("{}", report.text);
            }
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
