//! Comparison solvers that reuse the mapping stage: annealing from random
//! starts, Adam directly on the relaxed variables, and the GNN run on the
//! bipartite (factor graph) expansion.

use std::time::Instant;

use rand::Rng;

use crate::error::{Error, Result};
use crate::hypergraph::PropagationOperator;
use crate::mapping::SaConfig;
use crate::model::{train_with, Adam, HyperGnnModel, Plateau, TrainConfig, TrainReport};
use crate::pipeline::{finish_with_mapping, PipelineConfig, Solution};
use crate::problems::{Domain, Problem};
use crate::rng::seeded;

/// Annealing from uniformly random assignments.
pub fn sa_only(problem: &dyn Problem, sa: &SaConfig) -> Result<Solution> {
    finish_with_mapping(problem, None, None, sa, Instant::now(), 0.0)
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Box-constrained relaxation `p = d_0 + (d_v − d_0)·sigmoid(z)`.
#[derive(Debug, Clone, Copy)]
pub struct LogitRelaxation {
    low: f64,
    span: f64,
}

impl LogitRelaxation {
    pub fn new(domain: &Domain) -> Self {
        let low = domain.min() as f64;
        Self {
            low,
            span: domain.max() as f64 - low,
        }
    }

    pub fn outputs(&self, z: &[f64]) -> Vec<f64> {
        z.iter()
            .map(|&v| self.low + self.span * sigmoid(v))
            .collect()
    }

    /// `f̂(p(z))` and its gradient with respect to `z`.
    pub fn loss_and_grad(&self, problem: &dyn Problem, z: &[f64], grad: &mut [f64]) -> f64 {
        let p = self.outputs(z);
        let loss = problem.loss_and_grad(&p, grad);
        for (g, &v) in grad.iter_mut().zip(z) {
            let s = sigmoid(v);
            *g *= self.span * s * (1.0 - s);
        }
        loss
    }
}

/// Adam on free logits `z` with `p = sigmoid(z)`, then the same annealing
/// stage as the GNN pipeline. Uses the epoch budget, learning rate and early
/// stopping rule of `train`.
pub fn adam_direct(problem: &dyn Problem, train: &TrainConfig, sa: &SaConfig) -> Result<Solution> {
    train.validate()?;
    let started = Instant::now();
    let n = problem.n_vars();
    let relax = LogitRelaxation::new(problem.domain());
    let mut rng = seeded(train.seed);
    // random logits break the symmetry at p = 1/2
    let mut z: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mut grad = vec![0.0; n];
    let mut adam = Adam::new(
        &[n],
        train.learning_rate,
        train.beta1,
        train.beta2,
        train.epsilon,
    );
    let mut losses = Vec::new();
    let mut plateau = Plateau::new(train.early_stop);
    let mut stopped_early = false;
    for t in 0..train.epochs {
        let loss = relax.loss_and_grad(problem, &z, &mut grad);
        if !loss.is_finite() {
            return Err(Error::NonFiniteLoss { epoch: t });
        }
        losses.push(loss);
        adam.begin_step();
        adam.update(0, &mut z, &grad);
        if plateau.observe(loss) {
            stopped_early = true;
            break;
        }
    }
    let train_s = started.elapsed().as_secs_f64();
    let report = TrainReport {
        epochs_run: losses.len(),
        losses,
        stopped_early,
        wall_time_s: train_s,
        smoothing: None,
    };
    finish_with_mapping(
        problem,
        Some(relax.outputs(&z)),
        Some(report),
        sa,
        started,
        train_s,
    )
}

/// The GNN pipeline on the bipartite expansion: one extra node per
/// hyperedge, joined to each of its members. Factor nodes take part in
/// propagation but the loss reads only the original nodes' outputs.
pub fn bipartite_gnn(problem: &dyn Problem, cfg: &PipelineConfig) -> Result<Solution> {
    let started = Instant::now();
    let n = problem.n_vars();
    let expanded = problem.hypergraph().bipartite_expansion();
    let total = expanded.n_nodes();
    let mut model = HyperGnnModel::for_domain(total, cfg.width, problem.domain(), cfg.train.seed)?
        .with_variant(cfg.variant);
    let op = PropagationOperator::new(&expanded, cfg.variant);
    let mut upstream = vec![0.0; total];
    let report = train_with(&mut model, &cfg.train, |m, _| {
        let cache = m.forward(&op)?;
        upstream[n..].fill(0.0);
        let loss = problem.loss_and_grad(&cache.p[..n], &mut upstream[..n]);
        let grads = m.backward(&op, &cache, &upstream)?;
        Ok((loss, grads))
    })?;
    let mut p = model.predict(&op)?;
    p.truncate(n);
    let train_s = started.elapsed().as_secs_f64();
    finish_with_mapping(problem, Some(p), Some(report), &cfg.sa, started, train_s)
}
