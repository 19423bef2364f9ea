//! Run records and assignment sidecar files.

use std::fs::{self, File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use hypop_core::pipeline::{Solution, Timings};
use hypop_core::problems::Problem;

use crate::instance::digest;
use crate::settings::Settings;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub id: String,
    pub problem: String,
    pub input: String,
    pub digest: String,
    pub solver: String,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "K")]
    pub k: usize,
    pub seed: u64,
    pub config: Settings,
    /// Problem score of the assignment (cut size, set size, unsatisfied
    /// clauses, ...), named by `score_name`.
    pub objective: f64,
    pub score_name: String,
    /// Penalized loss of the assignment.
    pub penalized: f64,
    pub feasible: bool,
    pub violations: usize,
    pub timings: Timings,
    pub epochs_run: usize,
    pub assignment: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssignmentFile {
    pub id: String,
    pub x: Vec<i64>,
}

/// Stable id of a run: identical inputs, solver and settings give the same
/// id. `extra` distinguishes otherwise identical runs (checkpoint digests).
pub fn run_id(digest_hex: &str, config: &Settings, extra: &str) -> String {
    let config = serde_json::to_string(config).expect("settings serialize");
    digest(format!("{digest_hex}\n{config}\n{extra}").as_bytes())[..16].to_string()
}

pub struct RunContext<'a> {
    pub input: &'a Path,
    pub digest: &'a str,
    pub config: &'a Settings,
    pub extra: &'a str,
    pub assignments: &'a Path,
}

pub fn make_record(ctx: &RunContext<'_>, problem: &dyn Problem, solution: &Solution) -> RunRecord {
    let id = run_id(ctx.digest, ctx.config, ctx.extra);
    let x = &solution.assignment.x;
    let eval = &solution.assignment.evaluation;
    RunRecord {
        assignment: sidecar_path(ctx.assignments, &id).display().to_string(),
        id,
        problem: problem.kind().to_string(),
        input: ctx.input.display().to_string(),
        digest: ctx.digest.to_string(),
        solver: ctx.config.solver.map(|s| s.to_string()).unwrap_or_default(),
        n: problem.n_vars(),
        k: problem.n_terms(),
        seed: ctx.config.seed(),
        config: ctx.config.clone(),
        objective: problem.score(x),
        score_name: problem.score_name().to_string(),
        penalized: eval.penalized,
        feasible: eval.feasible(),
        violations: eval.violations.len(),
        timings: solution.timings,
        epochs_run: solution.epochs_run(),
    }
}

pub fn sidecar_path(dir: &Path, id: &str) -> PathBuf {
    dir.join(format!("{id}.json"))
}

pub fn write_sidecar(record: &RunRecord, x: &[i64]) -> Result<()> {
    let path = Path::new(&record.assignment);
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let file = AssignmentFile {
        id: record.id.clone(),
        x: x.to_vec(),
    };
    fs::write(path, serde_json::to_string(&file)?)
        .with_context(|| format!("writing {}", path.display()))
}

pub fn read_sidecar(path: &Path) -> Result<AssignmentFile> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(serde_json::from_str(&text)?)
}

/// Appends JSON lines to a file, or writes them to stdout.
pub struct RecordSink {
    out: Box<dyn Write>,
}

impl RecordSink {
    pub fn open(path: Option<&Path>) -> Result<RecordSink> {
        let out: Box<dyn Write> = match path {
            Some(p) => {
                if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                    fs::create_dir_all(dir)?;
                }
                Box::new(
                    OpenOptions::new()
                        .create(true)
                        .append(true)
                        .open(p)
                        .with_context(|| format!("opening {}", p.display()))?,
                )
            }
            None => Box::new(io::stdout()),
        };
        Ok(RecordSink { out })
    }

    pub fn write<T: Serialize>(&mut self, value: &T) -> Result<()> {
        serde_json::to_writer(&mut self.out, value)?;
        self.out.write_all(b"\n")?;
        self.out.flush()?;
        Ok(())
    }
}

pub fn read_records(path: &Path) -> Result<Vec<RunRecord>> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(
            serde_json::from_str(&line)
                .with_context(|| format!("{}:{}: not a run record", path.display(), i + 1))?,
        );
    }
    Ok(out)
}

/// Re-reads the input and the sidecar of `record` and re-evaluates the
/// assignment.
pub fn verify(record: &RunRecord) -> Result<()> {
    let input = Path::new(&record.input);
    let (problem, digest) = crate::instance::open(input, &record.config)?;
    if digest != record.digest {
        bail!(
            "{}: input digest {} does not match the record",
            record.id,
            digest
        );
    }
    let sidecar = read_sidecar(Path::new(&record.assignment))?;
    if sidecar.id != record.id {
        bail!("{}: sidecar belongs to run {}", record.id, sidecar.id);
    }
    if sidecar.x.len() != problem.n_vars() {
        bail!(
            "{}: assignment has {} entries, problem has {}",
            record.id,
            sidecar.x.len(),
            problem.n_vars()
        );
    }
    let eval = problem.evaluate(&sidecar.x);
    let objective = problem.score(&sidecar.x);
    if objective != record.objective || eval.penalized != record.penalized {
        bail!(
            "{}: re-evaluation gives objective {objective} and penalized {}, record has {} and {}",
            record.id,
            eval.penalized,
            record.objective,
            record.penalized
        );
    }
    if eval.feasible() != record.feasible || eval.violations.len() != record.violations {
        bail!("{}: feasibility does not match the record", record.id);
    }
    Ok(())
}
