use std::time::Instant;

use ndarray::ArrayView2;
use serde::{Deserialize, Serialize};

use super::{Adam, Gradients, HyperGnnModel};
use crate::error::{Error, Result};
use crate::hypergraph::PropagationOperator;
use crate::problems::Problem;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EarlyStop {
    /// Required relative improvement of the best loss.
    pub tolerance: f64,
    /// Epochs without such an improvement before stopping.
    pub patience: usize,
}

impl Default for EarlyStop {
    fn default() -> Self {
        Self {
            tolerance: 1e-4,
            patience: 100,
        }
    }
}

/// Tracks the best loss so far for [`EarlyStop`].
#[derive(Debug, Clone)]
pub(crate) struct Plateau {
    rule: Option<EarlyStop>,
    best: f64,
    since_best: usize,
}

impl Plateau {
    pub(crate) fn new(rule: Option<EarlyStop>) -> Self {
        Self {
            rule,
            best: f64::INFINITY,
            since_best: 0,
        }
    }

    /// Records `loss`; true once training should stop.
    pub(crate) fn observe(&mut self, loss: f64) -> bool {
        let Some(rule) = self.rule else {
            return false;
        };
        if !self.best.is_finite() || loss < self.best - rule.tolerance * self.best.abs() {
            self.best = loss;
            self.since_best = 0;
            return false;
        }
        self.since_best += 1;
        self.since_best >= rule.patience
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub early_stop: Option<EarlyStop>,
    /// Seed for the model initialization.
    pub seed: u64,
    /// Optimize only `σ`; `W0` and `W1` keep their values.
    pub freeze_weights: bool,
    /// Record the layer-wise embedding spread after training.
    pub record_smoothing: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 5000,
            learning_rate: 1e-4,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            early_stop: Some(EarlyStop::default()),
            seed: 0,
            freeze_weights: false,
            record_smoothing: false,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.learning_rate > 0.0
            && self.learning_rate.is_finite()
            && (0.0..1.0).contains(&self.beta1)
            && (0.0..1.0).contains(&self.beta2)
            && self.epsilon > 0.0;
        if !ok {
            return Err(Error::InvalidArgument(format!(
                "optimizer settings {self:?}"
            )));
        }
        if let Some(es) = self.early_stop {
            if es.tolerance.is_nan() || es.tolerance < 0.0 || es.patience == 0 {
                return Err(Error::InvalidArgument(format!("early stop {es:?}")));
            }
        }
        Ok(())
    }

    pub fn optimizer(&self, model: &HyperGnnModel) -> Adam {
        Adam::for_model(
            model,
            self.learning_rate,
            self.beta1,
            self.beta2,
            self.epsilon,
        )
    }

    pub(crate) fn frozen_blocks(&self) -> &'static [usize] {
        if self.freeze_weights {
            &[1, 2]
        } else {
            &[]
        }
    }
}

/// Largest Euclidean distance between any two rows.
pub fn max_pairwise_distance(rows: ArrayView2<'_, f64>) -> f64 {
    let n = rows.nrows();
    let mut best: f64 = 0.0;
    for i in 0..n {
        let a = rows.row(i);
        for j in i + 1..n {
            let b = rows.row(j);
            let d2: f64 = a.iter().zip(b.iter()).map(|(x, y)| (x - y) * (x - y)).sum();
            best = best.max(d2);
        }
    }
    best.sqrt()
}

/// Max pairwise node-embedding distance after each stage of the network,
/// with each layer taken as a linear map followed by propagation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoothingTrace {
    pub input: f64,
    /// After the first linear layer `σ W0`.
    pub conv1: f64,
    /// After the first propagation and ReLU.
    pub agg1: f64,
    /// After the second linear layer.
    pub conv2: f64,
    /// After the second propagation (logits).
    pub agg2: f64,
}

impl SmoothingTrace {
    pub fn measure(model: &HyperGnnModel, op: &PropagationOperator) -> Result<Self> {
        let cache = model.forward(op)?;
        Ok(Self {
            input: max_pairwise_distance(model.embedding.view()),
            conv1: max_pairwise_distance(model.embedding.dot(&model.w0).view()),
            agg1: max_pairwise_distance(cache.hidden.view()),
            conv2: max_pairwise_distance(cache.hidden.dot(&model.w1).view()),
            agg2: max_pairwise_distance(cache.conv2.view()),
        })
    }

    /// `[conv1, agg1, conv2, agg2]`.
    pub fn stages(&self) -> [f64; 4] {
        [self.conv1, self.agg1, self.conv2, self.agg2]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    /// Loss at the parameters each epoch started from.
    pub losses: Vec<f64>,
    pub epochs_run: usize,
    pub stopped_early: bool,
    pub wall_time_s: f64,
    pub smoothing: Option<SmoothingTrace>,
}

impl TrainReport {
    pub fn final_loss(&self) -> Option<f64> {
        self.losses.last().copied()
    }

    pub fn best_loss(&self) -> Option<f64> {
        self.losses.iter().copied().reduce(f64::min)
    }
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    /// Network output after the last update.
    pub p: Vec<f64>,
    pub report: TrainReport,
}

/// Generic epoch loop: `epoch(model, t)` returns the loss and the full
/// parameter gradient at the current parameters, then one Adam step is
/// taken. Shared by the single-worker, parallel and distributed trainers.
pub fn train_with<F>(
    model: &mut HyperGnnModel,
    cfg: &TrainConfig,
    mut epoch: F,
) -> Result<TrainReport>
where
    F: FnMut(&HyperGnnModel, usize) -> Result<(f64, Gradients)>,
{
    cfg.validate()?;
    let start = Instant::now();
    let mut adam = cfg.optimizer(model);
    let mut losses = Vec::with_capacity(cfg.epochs.min(100_000));
    let mut plateau = Plateau::new(cfg.early_stop);
    let mut stopped_early = false;
    for t in 0..cfg.epochs {
        let (loss, mut grads) = epoch(model, t)?;
        if !loss.is_finite() {
            return Err(Error::NonFiniteLoss { epoch: t });
        }
        losses.push(loss);
        if cfg.freeze_weights {
            grads.zero_weights();
        }
        adam.step(model, &grads, cfg.frozen_blocks());
        if plateau.observe(loss) {
            stopped_early = true;
            break;
        }
    }
    Ok(TrainReport {
        epochs_run: losses.len(),
        losses,
        stopped_early,
        wall_time_s: start.elapsed().as_secs_f64(),
        smoothing: None,
    })
}

/// Loss and parameter gradient of `problem` at the model's current output.
pub(crate) fn full_gradient(
    model: &HyperGnnModel,
    op: &PropagationOperator,
    problem: &dyn Problem,
    upstream: &mut Vec<f64>,
) -> Result<(f64, Gradients)> {
    let cache = model.forward(op)?;
    upstream.resize(model.n(), 0.0);
    let loss = problem.loss_and_grad(&cache.p, upstream);
    let grads = model.backward(op, &cache, upstream)?;
    Ok((loss, grads))
}

fn check_problem(model: &HyperGnnModel, problem: &dyn Problem) -> Result<()> {
    if problem.n_vars() != model.n() {
        return Err(Error::ShapeMismatch(format!(
            "model has {} nodes, problem has {} variables",
            model.n(),
            problem.n_vars()
        )));
    }
    Ok(())
}

/// Full-batch training of `model` on `problem`.
pub fn train(
    model: &mut HyperGnnModel,
    op: &PropagationOperator,
    problem: &dyn Problem,
    cfg: &TrainConfig,
) -> Result<TrainOutcome> {
    check_problem(model, problem)?;
    let mut upstream = Vec::new();
    let mut report = train_with(model, cfg, |m, _| {
        full_gradient(m, op, problem, &mut upstream)
    })?;
    finish(model, op, cfg, &mut report)
}

pub(crate) fn finish(
    model: &HyperGnnModel,
    op: &PropagationOperator,
    cfg: &TrainConfig,
    report: &mut TrainReport,
) -> Result<TrainOutcome> {
    let p = model.predict(op)?;
    if cfg.record_smoothing {
        report.smoothing = Some(SmoothingTrace::measure(model, op)?);
    }
    Ok(TrainOutcome {
        p,
        report: report.clone(),
    })
}

/// Re-optimizes only the embedding of a pretrained model for a new problem
/// on the same node set.
pub fn transfer(
    model: &mut HyperGnnModel,
    op: &PropagationOperator,
    problem: &dyn Problem,
    cfg: &TrainConfig,
) -> Result<TrainOutcome> {
    if op.n() != model.n() {
        return Err(Error::ShapeMismatch(format!(
            "pretrained model has {} nodes, target instance has {}",
            model.n(),
            op.n()
        )));
    }
    check_problem(model, problem)?;
    let cfg = TrainConfig {
        freeze_weights: true,
        ..cfg.clone()
    };
    train(model, op, problem, &cfg)
}
