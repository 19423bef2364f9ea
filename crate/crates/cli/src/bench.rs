//! Suite runs. A manifest lists instances, solvers and seeds:
//!
//! ```toml
//! seeds = [0, 1, 2]
//! solvers = ["hypop", "sa"]
//!
//! [defaults]
//! problem = "hypergraph-maxcut"
//! epochs = 2000
//!
//! [[instance]]
//! input = "hg_1000.txt"
//! lr = 0.01
//! ```
//!
//! Instance entries take the same keys as a config file plus `input` and an
//! optional `solvers` list. Relative paths are resolved against the manifest.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::Args;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use hypop_core::pipeline::Solver;

use crate::instance::open;
use crate::record::{make_record, write_sidecar, RecordSink, RunContext, RunRecord};
use crate::run::{run_solver, Output};
use crate::settings::Settings;
use crate::UsageError;

#[derive(Args, Debug, Clone)]
pub struct BenchArgs {
    /// Suite manifest (TOML).
    #[arg(long)]
    pub manifest: PathBuf,
    #[command(flatten)]
    pub output: Output,
    /// Write the summary table (CSV) here instead of stdout.
    #[arg(long)]
    pub table: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct Manifest {
    #[serde(default)]
    seeds: Vec<u64>,
    #[serde(default)]
    solvers: Vec<Solver>,
    #[serde(default)]
    defaults: Settings,
    #[serde(default)]
    instance: Vec<toml::Table>,
}

#[derive(Debug, Clone)]
struct Entry {
    input: PathBuf,
    solvers: Vec<Solver>,
    settings: Settings,
}

#[derive(Debug, Clone)]
struct Job {
    input: PathBuf,
    settings: Settings,
}

fn parse_entry(mut table: toml::Table, base: &Path, fallback: &[Solver]) -> Result<Entry> {
    let input = match table.remove("input") {
        Some(toml::Value::String(s)) => base.join(s),
        _ => anyhow::bail!(UsageError(
            "every [[instance]] needs an `input` path".into()
        )),
    };
    let solvers = match table.remove("solvers") {
        Some(v) => v.try_into::<Vec<Solver>>()?,
        None => fallback.to_vec(),
    };
    let settings: Settings = toml::Value::Table(table).try_into()?;
    Ok(Entry {
        input,
        solvers,
        settings,
    })
}

fn jobs(manifest_path: &Path) -> Result<Vec<Job>> {
    let text = fs::read_to_string(manifest_path)
        .with_context(|| format!("reading {}", manifest_path.display()))?;
    let m: Manifest =
        toml::from_str(&text).with_context(|| format!("parsing {}", manifest_path.display()))?;
    let base = manifest_path.parent().unwrap_or(Path::new("."));
    let seeds = if m.seeds.is_empty() {
        vec![0]
    } else {
        m.seeds.clone()
    };
    let mut out = Vec::new();
    for table in m.instance {
        let entry = parse_entry(table, base, &m.solvers)?;
        let defaults = entry.settings.clone().or(&m.defaults);
        let solvers = if entry.solvers.is_empty() {
            vec![defaults.solver.unwrap_or(Solver::Hypop)]
        } else {
            entry.solvers.clone()
        };
        for &solver in &solvers {
            for &seed in &seeds {
                let settings = Settings {
                    solver: Some(solver),
                    seed: Some(seed),
                    ..defaults.clone()
                }
                .resolved();
                out.push(Job {
                    input: entry.input.clone(),
                    settings,
                });
            }
        }
    }
    Ok(out)
}

fn run_job(job: &Job, assignments: &Path) -> Result<(RunRecord, Vec<i64>)> {
    let (problem, digest) = open(&job.input, &job.settings)?;
    let solution = run_solver(problem.as_ref(), &job.settings)?;
    let ctx = RunContext {
        input: &job.input,
        digest: &digest,
        config: &job.settings,
        extra: "",
        assignments,
    };
    Ok((
        make_record(&ctx, problem.as_ref(), &solution),
        solution.assignment.x,
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub input: String,
    pub problem: String,
    pub solver: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub runs: usize,
    pub score_name: String,
    pub objective_mean: f64,
    pub objective_std: f64,
    pub feasible_runs: usize,
    pub total_s_mean: f64,
    pub total_s_std: f64,
    pub train_s_mean: f64,
    pub epochs_mean: f64,
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// One row per (input, problem, solver), in first-seen order.
pub fn summarize(records: &[RunRecord]) -> Vec<Row> {
    let mut order: Vec<(String, String, String)> = Vec::new();
    let mut groups: BTreeMap<(String, String, String), Vec<&RunRecord>> = BTreeMap::new();
    for r in records {
        let key = (r.input.clone(), r.problem.clone(), r.solver.clone());
        if !groups.contains_key(&key) {
            order.push(key.clone());
        }
        groups.entry(key).or_default().push(r);
    }
    order
        .into_iter()
        .map(|key| {
            let rs = &groups[&key];
            let pick = |f: fn(&RunRecord) -> f64| rs.iter().map(|r| f(r)).collect::<Vec<_>>();
            let (objective_mean, objective_std) = mean_std(&pick(|r| r.objective));
            let (total_s_mean, total_s_std) = mean_std(&pick(|r| r.timings.total_s));
            Row {
                n: rs[0].n,
                runs: rs.len(),
                score_name: rs[0].score_name.clone(),
                objective_mean,
                objective_std,
                feasible_runs: rs.iter().filter(|r| r.feasible).count(),
                total_s_mean,
                total_s_std,
                train_s_mean: mean_std(&pick(|r| r.timings.train_s)).0,
                epochs_mean: mean_std(&pick(|r| r.epochs_run as f64)).0,
                input: key.0,
                problem: key.1,
                solver: key.2,
            }
        })
        .collect()
}

/// Least-squares slope of `ln(total_s)` against `ln(N)` per (problem,
/// solver), for groups with at least two sizes.
pub fn scaling_exponents(rows: &[Row]) -> Vec<(String, String, f64)> {
    let mut groups: BTreeMap<(String, String), Vec<(f64, f64)>> = BTreeMap::new();
    for r in rows.iter().filter(|r| r.total_s_mean > 0.0) {
        groups
            .entry((r.problem.clone(), r.solver.clone()))
            .or_default()
            .push(((r.n as f64).ln(), r.total_s_mean.ln()));
    }
    groups
        .into_iter()
        .filter_map(|((problem, solver), pts)| Some((problem, solver, log_slope(&pts)?)))
        .collect()
}

pub fn log_slope(pts: &[(f64, f64)]) -> Option<f64> {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (pts.len() >= 2 && sxx > 0.0).then(|| sxy / sxx)
}

fn write_table(rows: &[Row], out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if rows.is_empty() {
        w.write_record([
            "input",
            "problem",
            "solver",
            "N",
            "runs",
            "score_name",
            "objective_mean",
            "objective_std",
            "feasible_runs",
            "total_s_mean",
            "total_s_std",
            "train_s_mean",
            "epochs_mean",
        ])?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn bench(args: &BenchArgs) -> Result<()> {
    let jobs = jobs(&args.manifest)?;
    let dir = args.output.assignments_dir();
    let results: Vec<(RunRecord, Vec<i64>)> = jobs
        .par_iter()
        .map(|job| {
            run_job(job, &dir)
                .with_context(|| format!("{} ({:?})", job.input.display(), job.settings.solver))
        })
        .collect::<Result<_>>()?;
    let mut sink = RecordSink::open(args.output.out.as_deref())?;
    for (rec, x) in &results {
        write_sidecar(rec, x)?;
        sink.write(rec)?;
    }
    let records: Vec<RunRecord> = results.into_iter().map(|(r, _)| r).collect();
    let rows = summarize(&records);
    match &args.table {
        Some(path) => write_table(
            &rows,
            fs::File::create(path).with_context(|| format!("creating {}", path.display()))?,
        )?,
        None => write_table(&rows, io::stdout())?,
    }
    for (problem, solver, slope) in scaling_exponents(&rows) {
        eprintln!("runtime exponent {problem} {solver}: {slope:.3}");
    }
    Ok(())
}
