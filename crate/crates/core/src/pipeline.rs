//! End-to-end solvers: the GNN pipeline and the baselines that share its
//! mapping stage.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::baselines;
use crate::distributed::{train_distributed, train_parallel, DistMode};
use crate::error::Result;
use crate::hypergraph::{OperatorVariant, Partition, PartitionScheme, PropagationOperator};
use crate::mapping::{map_with_restarts, Assignment, OutputDistribution, SaConfig};
use crate::model::{train, transfer, HyperGnnModel, TrainConfig, TrainReport};
use crate::problems::Problem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Solver {
    Hypop,
    Sa,
    Adam,
    Bipartite,
}

impl Solver {
    pub const ALL: [Solver; 4] = [Solver::Hypop, Solver::Sa, Solver::Adam, Solver::Bipartite];

    pub fn name(self) -> &'static str {
        match self {
            Solver::Hypop => "hypop",
            Solver::Sa => "sa",
            Solver::Adam => "adam",
            Solver::Bipartite => "bipartite",
        }
    }
}

impl fmt::Display for Solver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Solver {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Solver::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| format!("unknown solver {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub train: TrainConfig,
    pub sa: SaConfig,
    pub variant: OperatorVariant,
    /// Feature width override; `None` uses the default for the node count.
    pub width: Option<usize>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            train: TrainConfig::default(),
            sa: SaConfig::default(),
            variant: OperatorVariant::Modified,
            width: None,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub train_s: f64,
    pub map_s: f64,
    pub total_s: f64,
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub assignment: Assignment,
    /// Continuous outputs the mapping sampled from, when a network or
    /// relaxation was trained.
    pub p: Option<Vec<f64>>,
    pub report: Option<TrainReport>,
    pub timings: Timings,
}

impl Solution {
    pub fn epochs_run(&self) -> usize {
        self.report.as_ref().map_or(0, |r| r.epochs_run)
    }
}

/// Maps continuous outputs (or, with `None`, a uniform distribution) to an
/// assignment and stamps the timings.
pub(crate) fn finish_with_mapping(
    problem: &dyn Problem,
    p: Option<Vec<f64>>,
    report: Option<TrainReport>,
    sa: &SaConfig,
    started: Instant,
    train_s: f64,
) -> Result<Solution> {
    let map_start = Instant::now();
    let dist = match &p {
        Some(p) => OutputDistribution::from_outputs(p, problem.domain()),
        None => OutputDistribution::uniform(problem.n_vars(), problem.domain()),
    };
    let mapped = map_with_restarts(&dist, problem, sa)?;
    let map_s = map_start.elapsed().as_secs_f64();
    Ok(Solution {
        assignment: mapped.best,
        p,
        report,
        timings: Timings {
            train_s,
            map_s,
            total_s: started.elapsed().as_secs_f64(),
        },
    })
}

/// The GNN pipeline. With zero epochs the annealer starts from uniformly
/// random assignments, which makes it identical to [`baselines::sa_only`].
pub fn hypop(problem: &dyn Problem, cfg: &PipelineConfig) -> Result<Solution> {
    let started = Instant::now();
    if cfg.train.epochs == 0 {
        return finish_with_mapping(problem, None, None, &cfg.sa, started, 0.0);
    }
    let mut model = HyperGnnModel::for_domain(
        problem.n_vars(),
        cfg.width,
        problem.domain(),
        cfg.train.seed,
    )?
    .with_variant(cfg.variant);
    hypop_from(problem, &mut model, cfg)
}

/// The GNN pipeline starting from `model`, which is trained in place.
/// `cfg.width` and `cfg.variant` are ignored in favour of the model's own.
pub fn hypop_from(
    problem: &dyn Problem,
    model: &mut HyperGnnModel,
    cfg: &PipelineConfig,
) -> Result<Solution> {
    let started = Instant::now();
    let op = PropagationOperator::new(problem.hypergraph(), model.variant());
    let outcome = train(model, &op, problem, &cfg.train)?;
    let train_s = started.elapsed().as_secs_f64();
    finish_with_mapping(
        problem,
        Some(outcome.p),
        Some(outcome.report),
        &cfg.sa,
        started,
        train_s,
    )
}

/// Pipeline starting from a pretrained model: only the embedding is
/// re-optimized. `model` is updated in place.
pub fn hypop_transfer(
    problem: &dyn Problem,
    model: &mut HyperGnnModel,
    cfg: &PipelineConfig,
) -> Result<Solution> {
    let started = Instant::now();
    let op = PropagationOperator::new(problem.hypergraph(), model.variant());
    let outcome = transfer(model, &op, problem, &cfg.train)?;
    let train_s = started.elapsed().as_secs_f64();
    finish_with_mapping(
        problem,
        Some(outcome.p),
        Some(outcome.report),
        &cfg.sa,
        started,
        train_s,
    )
}

/// The GNN pipeline with training split over `workers` threads. The
/// parallel mode shuffles hyperedges with the training seed; the
/// distributed mode partitions the nodes with `scheme`.
pub fn hypop_workers(
    problem: &dyn Problem,
    cfg: &PipelineConfig,
    workers: usize,
    mode: DistMode,
    scheme: PartitionScheme,
) -> Result<Solution> {
    let started = Instant::now();
    let mut model = HyperGnnModel::for_domain(
        problem.n_vars(),
        cfg.width,
        problem.domain(),
        cfg.train.seed,
    )?
    .with_variant(cfg.variant);
    let outcome = match mode {
        DistMode::Parallel => {
            let op = PropagationOperator::new(problem.hypergraph(), cfg.variant);
            train_parallel(
                &mut model,
                &op,
                problem,
                &cfg.train,
                workers,
                cfg.train.seed,
                None,
            )?
        }
        DistMode::Distributed => {
            let partition = Partition::new(problem.hypergraph(), workers, scheme)?;
            train_distributed(&mut model, problem, &partition, &cfg.train, None)?
        }
    };
    let train_s = started.elapsed().as_secs_f64();
    finish_with_mapping(
        problem,
        Some(outcome.p),
        Some(outcome.report),
        &cfg.sa,
        started,
        train_s,
    )
}

pub fn solve(problem: &dyn Problem, solver: Solver, cfg: &PipelineConfig) -> Result<Solution> {
    match solver {
        Solver::Hypop => hypop(problem, cfg),
        Solver::Sa => baselines::sa_only(problem, &cfg.sa),
        Solver::Adam => baselines::adam_direct(problem, &cfg.train, &cfg.sa),
        Solver::Bipartite => baselines::bipartite_gnn(problem, cfg),
    }
}
