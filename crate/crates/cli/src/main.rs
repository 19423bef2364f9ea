mod analyze;
mod bench;
mod gen;
mod instance;
mod record;
mod run;
mod settings;

use std::fmt;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

/// Bad flags, config values or flag combinations.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

const EXIT_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_INPUT: u8 = 3;

#[derive(Parser)]
#[command(
    name = "hypop",
    version,
    about = "Hypergraph neural network solver for constrained combinatorial problems"
)]
struct Cli {
    /// Thread budget for annealing restarts, benchmarks and sweeps.
    #[arg(long, global = true, env = "HYPOP_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance and write a run record.
    Solve(run::SolveArgs),
    /// Solve one instance with training split across workers.
    Distributed(run::SolveArgs),
    /// Pretrain a model and save it, or apply a saved model to a new objective.
    #[command(subcommand)]
    Transfer(run::TransferCommand),
    /// Run every instance, solver and seed of a suite manifest.
    Bench(bench::BenchArgs),
    /// Generate synthetic instances.
    #[command(subcommand)]
    Gen(gen::GenCommand),
    /// Trainability diagnostics for maximum independent set.
    #[command(subcommand)]
    Analyze(analyze::AnalyzeCommand),
    /// Re-evaluate stored assignments against their run records.
    Verify(run::VerifyArgs),
}

fn exit_code(err: &anyhow::Error) -> u8 {
    use hypop_core::Error as E;
    for cause in err.chain() {
        if cause.downcast_ref::<UsageError>().is_some() {
            return EXIT_USAGE;
        }
        if cause.downcast_ref::<toml::de::Error>().is_some() {
            return EXIT_USAGE;
        }
        if let Some(e) = cause.downcast_ref::<E>() {
            return match e {
                E::InvalidArgument(_) | E::TooManyWorkers { .. } => EXIT_USAGE,
                E::Io(_)
                | E::Parse { .. }
                | E::IndexOutOfRange { .. }
                | E::EmptyHyperedge { .. }
                | E::DuplicateNodeInEdge { .. }
                | E::NotAGraph { .. }
                | E::EmptyClause { .. }
                | E::UnsupportedVersion(_) => EXIT_INPUT,
                _ => EXIT_FAILURE,
            };
        }
        if cause.downcast_ref::<std::io::Error>().is_some() {
            return EXIT_INPUT;
        }
    }
    EXIT_FAILURE
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    let result = match cli.command {
        Command::Solve(args) => run::solve(&args, false),
        Command::Distributed(args) => run::solve(&args, true),
        Command::Transfer(cmd) => run::transfer(&cmd),
        Command::Bench(args) => bench::bench(&args),
        Command::Gen(cmd) => gen::gen(&cmd),
        Command::Analyze(cmd) => analyze::analyze(&cmd),
        Command::Verify(args) => run::verify(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
