//! Multi-worker training.
//!
//! * [`train_parallel`]: every epoch the hyperedges are shuffled and split
//!   into `S` slices. Each worker evaluates the loss on its slice with the
//!   full propagation operator; the summed gradient equals the full-batch
//!   gradient.
//! * [`train_distributed`]: each worker owns a fixed node set, propagates
//!   only over its inner hyperedges, and evaluates the loss over its inner
//!   and outer hyperedges. Outputs of remote nodes come from the previous
//!   round. Each worker keeps the embedding gradient of its own nodes only.
//!
//! Workers are persistent threads. Every round is a barrier: the leader
//! broadcasts the model, waits for all `S` replies, reduces them in worker
//! order and takes one Adam step.

mod pool;
mod wire;

use std::sync::Arc;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::{Partition, PropagationOperator};
use crate::model::{finish, train_with, Gradients, HyperGnnModel, TrainConfig, TrainOutcome};
use crate::problems::Problem;
use crate::rng::seeded;

pub use wire::{GradientMessage, WIRE_VERSION};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DistMode {
    Parallel,
    Distributed,
}

/// Per-epoch hook: `(epoch, model before the step, loss, reduced gradient)`.
pub type Observer<'a> = &'a mut dyn FnMut(usize, &HyperGnnModel, f64, &Gradients);

/// Sums full-size gradient contributions in worker order, starting from a
/// copy of worker 0's. Every worker in `0..workers` must appear once.
pub fn aggregate(
    epoch: usize,
    workers: usize,
    mut contributions: Vec<(usize, Gradients)>,
) -> Result<Gradients> {
    contributions.sort_by_key(|(s, _)| *s);
    for s in 0..workers {
        if contributions.get(s).map(|(w, _)| *w) != Some(s) {
            return Err(Error::MissingContribution { epoch, worker: s });
        }
    }
    if contributions.len() != workers {
        return Err(Error::InvalidArgument(format!(
            "{} contributions for {workers} workers",
            contributions.len()
        )));
    }
    let mut iter = contributions.into_iter();
    let (_, mut total) = iter
        .next()
        .ok_or(Error::MissingContribution { epoch, worker: 0 })?;
    for (_, g) in iter {
        total.add_assign(&g);
    }
    Ok(total)
}

/// Splits `0..n_edges` into `workers` balanced slices of a seeded shuffle,
/// each sorted ascending.
pub fn shuffled_slices(
    n_edges: usize,
    workers: usize,
    rng: &mut crate::rng::Rng,
) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..n_edges).collect();
    order.shuffle(rng);
    let (base, extra) = (n_edges / workers, n_edges % workers);
    let mut start = 0;
    (0..workers)
        .map(|s| {
            let len = base + usize::from(s < extra);
            let mut slice = order[start..start + len].to_vec();
            start += len;
            slice.sort_unstable();
            slice
        })
        .collect()
}

struct ParallelJob {
    epoch: usize,
    model: Arc<HyperGnnModel>,
    slice: Vec<usize>,
}

/// Data-parallel training over `workers` shuffled hyperedge slices. With
/// one worker the trajectory is bitwise identical to [`crate::model::train`].
pub fn train_parallel(
    model: &mut HyperGnnModel,
    op: &PropagationOperator,
    problem: &dyn Problem,
    cfg: &TrainConfig,
    workers: usize,
    shuffle_seed: u64,
    mut observer: Option<Observer<'_>>,
) -> Result<TrainOutcome> {
    if workers == 0 {
        return Err(Error::TooManyWorkers {
            workers,
            nodes: problem.n_vars(),
        });
    }
    if problem.n_vars() != model.n() || op.n() != model.n() {
        return Err(Error::ShapeMismatch(format!(
            "model has {} nodes, problem {}, operator {}",
            model.n(),
            problem.n_vars(),
            op.n()
        )));
    }
    let handlers: Vec<_> = (0..workers)
        .map(|s| {
            let mut upstream = vec![0.0; problem.n_vars()];
            move |job: ParallelJob| -> Result<GradientMessage> {
                let cache = job.model.forward(op)?;
                upstream.fill(0.0);
                let loss =
                    problem.partial_loss_and_grad(&cache.p, &job.slice, s == 0, &mut upstream);
                let grads = job.model.backward(op, &cache, &upstream)?;
                Ok(GradientMessage::new(
                    job.epoch,
                    s,
                    loss,
                    grads.flatten(),
                    Vec::new(),
                ))
            }
        })
        .collect();
    let n_edges = problem.n_terms();
    let mut rng = seeded(shuffle_seed);
    let mut report = pool::with_workers(handlers, |pool| {
        train_with(model, cfg, |m, epoch| {
            let shared = Arc::new(m.clone());
            let jobs = shuffled_slices(n_edges, pool.len(), &mut rng)
                .into_iter()
                .map(|slice| ParallelJob {
                    epoch,
                    model: Arc::clone(&shared),
                    slice,
                })
                .collect();
            let replies = pool.round(jobs)?;
            let mut loss = replies[0].loss;
            for r in &replies[1..] {
                loss += r.loss;
            }
            let contributions = replies
                .iter()
                .map(|r| Ok((r.worker, Gradients::unflatten(m, &r.gradient)?)))
                .collect::<Result<Vec<_>>>()?;
            let grads = aggregate(epoch, pool.len(), contributions)?;
            if let Some(obs) = observer.as_mut() {
                obs(epoch, m, loss, &grads);
            }
            Ok((loss, grads))
        })
    })?;
    finish(model, op, cfg, &mut report)
}

/// Fixed view of one worker in distributed mode.
struct LocalView {
    nodes: Vec<usize>,
    op: PropagationOperator,
    /// Inner and outer hyperedges in ascending order, with the share of each
    /// term's value this worker reports (1 for inner hyperedges).
    terms: Vec<(usize, f64)>,
}

enum DistJob {
    Outputs {
        model: Arc<HyperGnnModel>,
    },
    Epoch {
        epoch: usize,
        model: Arc<HyperGnnModel>,
        outputs: Arc<Vec<f64>>,
    },
}

fn local_views(
    problem: &dyn Problem,
    partition: &Partition,
    model: &HyperGnnModel,
) -> Result<Vec<LocalView>> {
    let h = problem.hypergraph();
    partition.check_matches(h)?;
    let owner = partition.owners();
    partition
        .workers()
        .iter()
        .enumerate()
        .map(|(s, part)| {
            let local = h.restrict(&part.nodes, &part.inner)?;
            let op = PropagationOperator::new(&local, model.variant());
            let mut terms: Vec<(usize, f64)> = part.inner.iter().map(|&k| (k, 1.0)).collect();
            for &k in &part.outer {
                let edge = h.edge(k);
                let own = edge.iter().filter(|&&i| owner[i] == s).count();
                terms.push((k, own as f64 / edge.len() as f64));
            }
            terms.sort_unstable_by_key(|&(k, _)| k);
            Ok(LocalView {
                nodes: part.nodes.clone(),
                op,
                terms,
            })
        })
        .collect()
}

/// Inner/outer-hyperedge distributed training on a fixed node partition.
/// Returns outputs computed by each worker on its local operator.
pub fn train_distributed(
    model: &mut HyperGnnModel,
    problem: &dyn Problem,
    partition: &Partition,
    cfg: &TrainConfig,
    mut observer: Option<Observer<'_>>,
) -> Result<TrainOutcome> {
    let n = problem.n_vars();
    if model.n() != n {
        return Err(Error::ShapeMismatch(format!(
            "model has {} nodes, problem has {n} variables",
            model.n()
        )));
    }
    let views = local_views(problem, partition, model)?;
    let workers = views.len();
    let aggregate_term = problem.aggregate();
    let handlers: Vec<_> = views
        .iter()
        .enumerate()
        .map(|(s, view)| {
            let mut p_view = vec![0.0; n];
            let mut grad_view = vec![0.0; n];
            let share = view.nodes.len() as f64 / n as f64;
            move |job: DistJob| -> Result<GradientMessage> {
                let (epoch, model, outputs) = match job {
                    DistJob::Outputs { model } => {
                        let rows = model.embedding_rows(&view.nodes);
                        let cache = model.forward_with(&view.op, rows.view())?;
                        return Ok(GradientMessage::new(0, s, 0.0, Vec::new(), cache.p));
                    }
                    DistJob::Epoch {
                        epoch,
                        model,
                        outputs,
                    } => (epoch, model, outputs),
                };
                let rows = model.embedding_rows(&view.nodes);
                let cache = model.forward_with(&view.op, rows.view())?;
                p_view.copy_from_slice(&outputs);
                for (l, &i) in view.nodes.iter().enumerate() {
                    p_view[i] = cache.p[l];
                }
                grad_view.fill(0.0);
                let mut loss = 0.0;
                for &(k, weight) in &view.terms {
                    loss += weight * problem.relaxed_term(k, &p_view, Some(&mut grad_view));
                }
                if !aggregate_term.is_none() {
                    let total: f64 = p_view.iter().sum();
                    let d = aggregate_term.derivative(total);
                    for &i in &view.nodes {
                        grad_view[i] += d;
                    }
                    loss += aggregate_term.value(total) * share;
                }
                let upstream: Vec<f64> = view.nodes.iter().map(|&i| grad_view[i]).collect();
                let grads = model.backward(&view.op, &cache, &upstream)?;
                Ok(GradientMessage::new(
                    epoch,
                    s,
                    loss,
                    grads.flatten(),
                    cache.p,
                ))
            }
        })
        .collect();

    let assemble = |replies: &[GradientMessage]| -> Vec<f64> {
        let mut p = vec![0.0; n];
        for (view, r) in views.iter().zip(replies) {
            for (&i, &v) in view.nodes.iter().zip(&r.boundary) {
                p[i] = v;
            }
        }
        p
    };

    let width = model.width();
    let (w0_len, w1_len) = (model.w0().len(), model.w1().len());
    pool::with_workers(handlers, |pool| -> Result<TrainOutcome> {
        let broadcast_outputs = |m: &HyperGnnModel| -> Result<Vec<GradientMessage>> {
            let shared = Arc::new(m.clone());
            pool.round(
                (0..workers)
                    .map(|_| DistJob::Outputs {
                        model: Arc::clone(&shared),
                    })
                    .collect(),
            )
        };
        let mut outputs = Arc::new(assemble(&broadcast_outputs(model)?));
        let mut report = train_with(model, cfg, |m, epoch| {
            let shared = Arc::new(m.clone());
            let jobs = (0..workers)
                .map(|_| DistJob::Epoch {
                    epoch,
                    model: Arc::clone(&shared),
                    outputs: Arc::clone(&outputs),
                })
                .collect();
            let replies = pool.round(jobs)?;
            let mut grads = Gradients::zeros_like(m);
            let mut loss = 0.0;
            for (s, (view, r)) in views.iter().zip(&replies).enumerate() {
                if r.worker != s || r.epoch != epoch {
                    return Err(Error::MissingContribution { epoch, worker: s });
                }
                let rows = view.nodes.len() * width;
                if r.gradient.len() != rows + w0_len + w1_len {
                    return Err(Error::ShapeMismatch(format!(
                        "worker {s} sent {} gradient entries",
                        r.gradient.len()
                    )));
                }
                let (sigma, rest) = r.gradient.split_at(rows);
                let (w0, w1) = rest.split_at(w0_len);
                for (l, &i) in view.nodes.iter().enumerate() {
                    grads
                        .embedding
                        .row_mut(i)
                        .iter_mut()
                        .zip(&sigma[l * width..(l + 1) * width])
                        .for_each(|(g, v)| *g += v);
                }
                if s == 0 {
                    loss = r.loss;
                    grads.w0.iter_mut().zip(w0).for_each(|(g, v)| *g = *v);
                    grads.w1.iter_mut().zip(w1).for_each(|(g, v)| *g = *v);
                } else {
                    loss += r.loss;
                    grads.w0.iter_mut().zip(w0).for_each(|(g, v)| *g += v);
                    grads.w1.iter_mut().zip(w1).for_each(|(g, v)| *g += v);
                }
            }
            outputs = Arc::new(assemble(&replies));
            if let Some(obs) = observer.as_mut() {
                obs(epoch, m, loss, &grads);
            }
            Ok((loss, grads))
        })?;
        let p = assemble(&broadcast_outputs(model)?);
        report.smoothing = None;
        Ok(TrainOutcome { p, report })
    })
}
