use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use genus::cli::{self, Command};
use genus::zmod::Factorization;

/// Genus symbols of integral quadratic forms: compute, validate, realize
/// locally, and construct a form in a given genus.
#[derive(Parser)]
#[command(name = "qfgenus", version, about)]
struct Args {
    #[command(subcommand)]
    command: Cli,
}

#[derive(Subcommand)]
enum Cli {
    /// Compute the genus symbol of a form.
    Symbol {
        /// Matrix JSON file: {"n": int, "rows": [["..."], ...]}.
        #[arg(long)]
        form: PathBuf,
        /// Factorization hints "p:e,p:e" for determinants with prime
        /// factors above 10^6.
        #[arg(long)]
        hints: Option<String>,
    },
    /// Check the determinant, oddity and per-constituent conditions.
    Validate {
        #[arg(long)]
        symbol: PathBuf,
    },
    /// Build a form realizing the symbol at one prime or modulo a
    /// composite modulus.
    Localform {
        #[arg(long)]
        symbol: PathBuf,
        #[arg(long)]
        prime: Option<String>,
        #[arg(long)]
        modulus: Option<String>,
    },
    /// Construct an integer primitively represented by the genus.
    Findt {
        #[arg(long)]
        symbol: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Construct an integral form belonging to the genus.
    Generate {
        #[arg(long)]
        symbol: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Whole-pipeline restarts before giving up.
        #[arg(long, default_value_t = 16)]
        retries: u32,
        /// Emit the per-level recursion trace.
        #[arg(long)]
        trace: bool,
    },
    /// Check that a form belongs to the genus of a symbol.
    Verify {
        #[arg(long)]
        form: PathBuf,
        #[arg(long)]
        symbol: PathBuf,
    },
    /// Exhaustive ground-truth checks.
    Oracle {
        #[command(subcommand)]
        what: OracleCli,
    },
}

#[derive(Subcommand)]
enum OracleCli {
    /// Sweep the dimension-2 congruence case grids (expected 0 failures).
    AppendixC {
        /// even-block | odd-even-gap | odd-odd-gap (default: all three).
        #[arg(long)]
        which: Option<String>,
    },
    /// Sweep the dimension-4 mod-16 representability grid.
    RepDim4,
    /// Exhaustive congruence-equivalence search between two forms.
    Equiv {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        p: String,
        #[arg(long)]
        k: u32,
    },
}

fn build(args: Args) -> genus::Result<Command> {
    Ok(match args.command {
        Cli::Symbol { form, hints } => Command::Symbol {
            form: cli::read_json(&form)?,
            hints: match hints {
                Some(h) => cli::parse_hints(&h)?,
                None => Factorization::new(),
            },
        },
        Cli::Validate { symbol } => Command::Validate { symbol: cli::read_json(&symbol)? },
        Cli::Localform { symbol, prime, modulus } => Command::LocalForm {
            symbol: cli::read_json(&symbol)?,
            prime: prime.as_deref().map(cli::parse_prime).transpose()?,
            modulus: modulus
                .as_deref()
                .map(|m| {
                    m.parse()
                        .map_err(|_| genus::Error::Parse(format!("bad modulus `{m}`")))
                })
                .transpose()?,
        },
        Cli::Findt { symbol, seed } => Command::FindT {
            symbol: cli::read_json(&symbol)?,
            seed: cli::resolve_seed(seed),
        },
        Cli::Generate { symbol, seed, retries, trace } => Command::Generate {
            symbol: cli::read_json(&symbol)?,
            seed: cli::resolve_seed(seed),
            retries,
            trace,
        },
        Cli::Verify { form, symbol } => Command::Verify {
            form: cli::read_json(&form)?,
            symbol: cli::read_json(&symbol)?,
        },
        Cli::Oracle { what } => match what {
            OracleCli::AppendixC { which } => Command::OracleCaseGrids {
                which: match which.as_deref() {
                    None | Some("all") => None,
                    Some("even-block") => Some(genus::oracle::CaseGrid::EvenBlock),
                    Some("odd-even-gap") => Some(genus::oracle::CaseGrid::OddBlockEvenGap),
                    Some("odd-odd-gap") => Some(genus::oracle::CaseGrid::OddBlockOddGap),
                    Some(other) => {
                        return Err(genus::Error::Parse(format!("unknown grid `{other}`")))
                    }
                },
            },
            OracleCli::RepDim4 => Command::OracleRepDim4,
            OracleCli::Equiv { a, b, p, k } => Command::OracleEquiv {
                a: cli::read_json(&a)?,
                b: cli::read_json(&b)?,
                p: cli::parse_prime(&p)?,
                k,
            },
        },
    })
}

fn main() -> ExitCode {
    let args = Args::parse();
    let cmd = match build(args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{}", serde_json::json!({"error": e.to_string()}));
            return ExitCode::from(1);
        }
    };
    let (code, value) = cli::run(&cmd);
    println!("{}", serde_json::to_string_pretty(&value).unwrap());
    ExitCode::from(code as u8)
}
