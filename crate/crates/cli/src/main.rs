use std::path::PathBuf;
use std::process::exit;

use birank::{WitnessKind, DEFAULT_PROD_TOL, DEFAULT_RANK_TOL};
use birank_cli::commands::{cmd_analyze, cmd_construct, cmd_feasible, cmd_sweep, CliError};
use clap::{Parser, Subcommand, ValueEnum};

/// Construct, classify, and analyze bipartite states by the ranks
/// (d1, d2, d3) of their reduced and composite density operators.
#[derive(Parser)]
#[command(name = "birank", version)]
struct Cli {
    /// Suppress the prose sentence; print only the JSON document.
    #[arg(long, global = true)]
    quiet: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a rank triple. Dimensions are positive integers or "inf".
    Feasible { d1: String, d2: String, d3: String },

    /// Construct a witness state with the given rank triple and write it
    /// to a state file.
    Construct {
        d1: usize,
        d2: usize,
        d3: usize,
        /// Correlation status the witness must have.
        #[arg(long, value_enum, default_value_t = KindArg::Any)]
        kind: KindArg,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Output path for the state file.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = DEFAULT_RANK_TOL)]
        rank_tol: f64,
        #[arg(long, default_value_t = DEFAULT_PROD_TOL)]
        prod_tol: f64,
    },

    /// Analyze a saved state file: rank triple, purity, correlation
    /// verdict, and the spectral necessity checks.
    Analyze {
        path: PathBuf,
        #[arg(long, default_value_t = DEFAULT_RANK_TOL)]
        rank_tol: f64,
        #[arg(long, default_value_t = DEFAULT_PROD_TOL)]
        prod_tol: f64,
    },

    /// Reconcile classification, construction, and random sampling over
    /// every triple up to a dimension bound.
    Sweep {
        #[arg(long, default_value_t = 4)]
        max_dim: usize,
        /// Random samples per (dim_a, dim_b, mix_rank) configuration.
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_RANK_TOL)]
        rank_tol: f64,
        #[arg(long, default_value_t = DEFAULT_PROD_TOL)]
        prod_tol: f64,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum KindArg {
    Any,
    Correlated,
    Uncorrelated,
}

impl From<KindArg> for WitnessKind {
    fn from(kind: KindArg) -> Self {
        match kind {
            KindArg::Any => WitnessKind::Any,
            KindArg::Correlated => WitnessKind::Correlated,
            KindArg::Uncorrelated => WitnessKind::Uncorrelated,
        }
    }
}

/// Prints a line to stdout, exiting quietly if the consumer closed the pipe.
fn emit(text: &str) {
    use std::io::Write;
    let mut stdout = std::io::stdout().lock();
    if writeln!(stdout, "{text}").is_err() || stdout.flush().is_err() {
        exit(0);
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                exit(0);
            }
            eprint!("{e}");
            exit(1);
        }
    };

    let result = match cli.command {
        Command::Feasible { d1, d2, d3 } => cmd_feasible(&d1, &d2, &d3),
        Command::Construct {
            d1,
            d2,
            d3,
            kind,
            seed,
            out,
            rank_tol,
            prod_tol,
        } => {
            if d1 == 0 || d2 == 0 || d3 == 0 {
                Err(CliError {
                    exit: 1,
                    message: "dimensions must be at least 1".to_owned(),
                })
            } else {
                cmd_construct(d1, d2, d3, kind.into(), seed, &out, rank_tol, prod_tol)
            }
        }
        Command::Analyze {
            path,
            rank_tol,
            prod_tol,
        } => cmd_analyze(&path, rank_tol, prod_tol),
        Command::Sweep {
            max_dim,
            samples,
            seed,
            rank_tol,
            prod_tol,
        } => cmd_sweep(max_dim, samples, seed, rank_tol, prod_tol),
    };

    match result {
        Ok(output) => {
            if !cli.quiet {
                emit(&output.prose);
            }
            emit(&serde_json::to_string_pretty(&output.doc).expect("documents serialize"));
            exit(output.exit);
        }
        Err(err) => {
            eprintln!("error: {}", err.message);
            exit(err.exit);
        }
    }
}
