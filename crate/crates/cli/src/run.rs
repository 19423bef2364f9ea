use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Subcommand};

use hypop_core::distributed::DistMode;
use hypop_core::model::{load_checkpoint, save_checkpoint, HyperGnnModel};
use hypop_core::pipeline::{
    hypop_from, hypop_transfer, hypop_workers, solve as solve_with, Solution, Solver,
};
use hypop_core::problems::Problem;

use crate::instance::{digest, open};
use crate::record::{
    self, make_record, read_records, write_sidecar, RecordSink, RunContext, RunRecord,
};
use crate::settings::{merge, Settings};
use crate::UsageError;

#[derive(Args, Debug, Clone)]
pub struct Output {
    /// Append run records (JSON lines) to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Directory for assignment files. Defaults to `assignments/` next to
    /// `--out`, or in the working directory.
    #[arg(long)]
    pub assignments: Option<PathBuf>,
}

impl Output {
    pub fn assignments_dir(&self) -> PathBuf {
        match (&self.assignments, &self.out) {
            (Some(dir), _) => dir.clone(),
            (None, Some(out)) => out.with_file_name("assignments"),
            (None, None) => PathBuf::from("assignments"),
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct SolveArgs {
    /// Instance file.
    #[arg(long)]
    pub input: PathBuf,
    /// Flat TOML file with default settings.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub output: Output,
    #[command(flatten)]
    pub settings: Settings,
}

/// Runs the configured solver on `problem`.
pub fn run_solver(problem: &dyn Problem, s: &Settings) -> Result<Solution> {
    let cfg = s.pipeline();
    let workers = s.workers.unwrap_or(1);
    let solver = s.solver.unwrap_or(Solver::Hypop);
    if workers > 1 {
        if solver != Solver::Hypop {
            bail!(UsageError(format!(
                "--workers applies to the hypop solver, not {solver}"
            )));
        }
        let mode = s.dist_mode.unwrap_or(DistMode::Parallel);
        return Ok(hypop_workers(
            problem,
            &cfg,
            workers,
            mode,
            s.partition_scheme(),
        )?);
    }
    Ok(solve_with(problem, solver, &cfg)?)
}

pub fn emit(
    ctx: &RunContext<'_>,
    problem: &dyn Problem,
    solution: &Solution,
    sink: &mut RecordSink,
) -> Result<RunRecord> {
    let rec = make_record(ctx, problem, solution);
    write_sidecar(&rec, &solution.assignment.x)?;
    sink.write(&rec)?;
    Ok(rec)
}

pub fn solve(args: &SolveArgs, distributed: bool) -> Result<()> {
    let mut flags = args.settings.clone();
    if distributed {
        if flags.workers.is_none() {
            bail!(UsageError("distributed needs --workers".into()));
        }
        flags.dist_mode.get_or_insert(DistMode::Distributed);
    }
    let s = merge(&flags, args.config.as_deref())?;
    let (problem, digest) = open(&args.input, &s)?;
    let solution = run_solver(problem.as_ref(), &s)?;
    let dir = args.output.assignments_dir();
    let ctx = RunContext {
        input: &args.input,
        digest: &digest,
        config: &s,
        extra: "",
        assignments: &dir,
    };
    let mut sink = RecordSink::open(args.output.out.as_deref())?;
    emit(&ctx, problem.as_ref(), &solution, &mut sink)?;
    Ok(())
}

#[derive(Subcommand, Debug, Clone)]
pub enum TransferCommand {
    /// Train on an instance and save the model.
    Pretrain {
        #[arg(long)]
        checkpoint: PathBuf,
        #[command(flatten)]
        args: SolveArgs,
    },
    /// Re-optimize only the embedding of a saved model for a new problem on
    /// a hypergraph with the same node count.
    Apply {
        #[arg(long)]
        checkpoint: PathBuf,
        #[command(flatten)]
        args: SolveArgs,
    },
}

pub fn transfer(cmd: &TransferCommand) -> Result<()> {
    let (checkpoint, args, pretrain) = match cmd {
        TransferCommand::Pretrain { checkpoint, args } => (checkpoint, args, true),
        TransferCommand::Apply { checkpoint, args } => (checkpoint, args, false),
    };
    let mut flags = args.settings.clone();
    if flags.solver.is_some_and(|s| s != Solver::Hypop) {
        bail!(UsageError("transfer uses the hypop solver".into()));
    }
    flags.solver = Some(Solver::Hypop);
    let s = merge(&flags, args.config.as_deref())?;
    let (problem, input_digest) = open(&args.input, &s)?;
    let cfg = s.pipeline();
    let (solution, extra) = if pretrain {
        let mut model = HyperGnnModel::for_domain(
            problem.n_vars(),
            cfg.width,
            problem.domain(),
            cfg.train.seed,
        )?
        .with_variant(cfg.variant);
        let solution = hypop_from(problem.as_ref(), &mut model, &cfg)?;
        save_checkpoint(&model, checkpoint)?;
        (solution, "pretrain".to_string())
    } else {
        let bytes =
            fs::read(checkpoint).with_context(|| format!("reading {}", checkpoint.display()))?;
        let mut model = load_checkpoint(checkpoint)?;
        let solution = hypop_transfer(problem.as_ref(), &mut model, &cfg)?;
        (solution, format!("transfer {}", digest(&bytes)))
    };
    let dir = args.output.assignments_dir();
    let ctx = RunContext {
        input: &args.input,
        digest: &input_digest,
        config: &s,
        extra: &extra,
        assignments: &dir,
    };
    let mut sink = RecordSink::open(args.output.out.as_deref())?;
    emit(&ctx, problem.as_ref(), &solution, &mut sink)?;
    Ok(())
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    /// Run records (JSON lines) to check.
    #[arg(long)]
    pub records: PathBuf,
}

pub fn verify(args: &VerifyArgs) -> Result<()> {
    let records = read_records(&args.records)?;
    let mut failed = 0;
    for rec in &records {
        match record::verify(rec) {
            Ok(()) => println!(
                "ok {} {} {} = {}",
                rec.id, rec.input, rec.score_name, rec.objective
            ),
            Err(e) => {
                failed += 1;
                println!("FAILED {e:#}");
            }
        }
    }
    if failed > 0 {
        bail!("{failed} of {} records failed verification", records.len());
    }
    Ok(())
}
