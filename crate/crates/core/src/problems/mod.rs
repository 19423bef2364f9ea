//! Problem adapters.
//!
//! Every adapter exposes the same penalized loss
//!
//! ```text
//! f̂(p) = Σ_k term_k(p_{N_k}) + h(Σ_i p_i)
//! ```
//!
//! where each hyperedge `k` of the constraint hypergraph carries one term
//! (an objective contribution, a weighted hinge `λ_k·max(0, c_k)`, or both)
//! and `h` is an optional node-aggregate term. Keeping the loss a sum over
//! hyperedges lets it be split across workers without approximation.
//!
//! At integral points the relaxed terms agree exactly with the discrete
//! evaluator, so `f̂(x)` is also the objective simulated annealing minimizes.

mod maxcut;
mod mis;
mod resource;
mod sat;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::hypergraph::Hypergraph;

pub use maxcut::{GraphMaxCut, HypergraphMaxCut, HypergraphMinCut};
pub use mis::MaxIndependentSet;
pub use resource::{ResourceAllocation, ResourceConstraint};
pub use sat::Sat3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProblemKind {
    HypergraphMaxcut,
    HypergraphMincut,
    GraphMaxcut,
    Mis,
    Sat3,
    Resource,
}

impl ProblemKind {
    pub const ALL: [ProblemKind; 6] = [
        ProblemKind::HypergraphMaxcut,
        ProblemKind::HypergraphMincut,
        ProblemKind::GraphMaxcut,
        ProblemKind::Mis,
        ProblemKind::Sat3,
        ProblemKind::Resource,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProblemKind::HypergraphMaxcut => "hypergraph-maxcut",
            ProblemKind::HypergraphMincut => "hypergraph-mincut",
            ProblemKind::GraphMaxcut => "graph-maxcut",
            ProblemKind::Mis => "mis",
            ProblemKind::Sat3 => "sat3",
            ProblemKind::Resource => "resource",
        }
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProblemKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ProblemKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown problem {s:?}"))
    }
}

/// Ordered admissible values `d_0 < … < d_v` for every variable.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Domain(Vec<i64>);

impl Domain {
    pub fn new(mut values: Vec<i64>) -> Self {
        values.sort_unstable();
        values.dedup();
        assert!(!values.is_empty(), "domain needs at least one value");
        Domain(values)
    }

    pub fn binary() -> Self {
        Domain(vec![0, 1])
    }

    pub fn values(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_binary(&self) -> bool {
        self.0 == [0, 1]
    }

    pub fn min(&self) -> i64 {
        self.0[0]
    }

    pub fn max(&self) -> i64 {
        *self.0.last().unwrap()
    }

    pub fn contains(&self, v: i64) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn index_of(&self, v: i64) -> Option<usize> {
        self.0.binary_search(&v).ok()
    }
}

/// Discrete value of one hyperedge term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TermValue {
    /// Contribution to the objective `f`.
    pub objective: f64,
    /// `max(0, c_k(x))`; zero for terms that are not constraints.
    pub violation: f64,
    /// `λ_k`.
    pub weight: f64,
}

impl TermValue {
    pub fn objective(objective: f64) -> Self {
        Self {
            objective,
            violation: 0.0,
            weight: 0.0,
        }
    }

    pub fn constraint(violation: f64, weight: f64) -> Self {
        Self {
            objective: 0.0,
            violation,
            weight,
        }
    }

    pub fn penalized(&self) -> f64 {
        self.objective + self.weight * self.violation
    }
}

/// Node-aggregate term `h(s)` with `s = Σ_i x_i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Aggregate {
    None,
    /// `h(s) = coef · s`.
    Linear {
        coef: f64,
    },
    /// `h(s) = gamma · (s - target)²`.
    Balance {
        gamma: f64,
        target: f64,
    },
}

impl Aggregate {
    pub fn value(&self, s: f64) -> f64 {
        match *self {
            Aggregate::None => 0.0,
            Aggregate::Linear { coef } => coef * s,
            Aggregate::Balance { gamma, target } => gamma * (s - target) * (s - target),
        }
    }

    pub fn derivative(&self, s: f64) -> f64 {
        match *self {
            Aggregate::None => 0.0,
            Aggregate::Linear { coef } => coef,
            Aggregate::Balance { gamma, target } => 2.0 * gamma * (s - target),
        }
    }

    pub fn is_none(&self) -> bool {
        matches!(self, Aggregate::None)
    }
}

/// Result of evaluating a discrete assignment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    /// `f(x)`, minimized.
    pub objective: f64,
    /// `f̂(x) = f(x) + Σ_k λ_k max(0, c_k(x))`.
    pub penalized: f64,
    /// Violated constraints as `(hyperedge index, max(0, c_k))`.
    pub violations: Vec<(usize, f64)>,
}

impl Evaluation {
    pub fn feasible(&self) -> bool {
        self.violations.is_empty()
    }
}

/// A constrained combinatorial problem over the nodes of its constraint
/// hypergraph.
pub trait Problem: Send + Sync + fmt::Debug {
    fn kind(&self) -> ProblemKind;

    fn hypergraph(&self) -> &Hypergraph;

    fn domain(&self) -> &Domain;

    /// Relaxed term of hyperedge `k`. When `grad` is given, `∂term/∂p_i` is
    /// added to `grad[i]` for each member `i`.
    fn relaxed_term(&self, k: usize, p: &[f64], grad: Option<&mut [f64]>) -> f64;

    fn discrete_term(&self, k: usize, x: &[i64]) -> TermValue;

    fn aggregate(&self) -> Aggregate {
        Aggregate::None
    }

    /// Human-facing figure of merit (cut size, set size, unsatisfied
    /// clauses, …) for `x`.
    fn score(&self, x: &[i64]) -> f64;

    /// Name of [`Problem::score`].
    fn score_name(&self) -> &'static str;

    fn n_vars(&self) -> usize {
        self.hypergraph().n_nodes()
    }

    fn n_terms(&self) -> usize {
        self.hypergraph().n_edges()
    }

    fn loss(&self, p: &[f64]) -> f64 {
        let terms: f64 = (0..self.n_terms())
            .map(|k| self.relaxed_term(k, p, None))
            .sum();
        terms + self.aggregate_term(p, None)
    }

    /// `f̂(p)`, overwriting `grad` with `∇f̂(p)`.
    fn loss_and_grad(&self, p: &[f64], grad: &mut [f64]) -> f64 {
        grad.fill(0.0);
        let mut loss = 0.0;
        for k in 0..self.n_terms() {
            loss += self.relaxed_term(k, p, Some(grad));
        }
        loss + self.aggregate_term(p, Some(grad))
    }

    /// Loss restricted to the listed hyperedge terms (plus the aggregate term
    /// when `with_aggregate`), accumulating into `grad`.
    fn partial_loss_and_grad(
        &self,
        p: &[f64],
        terms: &[usize],
        with_aggregate: bool,
        grad: &mut [f64],
    ) -> f64 {
        let mut loss = 0.0;
        for &k in terms {
            loss += self.relaxed_term(k, p, Some(grad));
        }
        if with_aggregate {
            loss += self.aggregate_term(p, Some(grad));
        }
        loss
    }

    fn aggregate_term(&self, p: &[f64], grad: Option<&mut [f64]>) -> f64 {
        let agg = self.aggregate();
        if agg.is_none() {
            return 0.0;
        }
        let s: f64 = p.iter().sum();
        if let Some(grad) = grad {
            let d = agg.derivative(s);
            for g in grad.iter_mut() {
                *g += d;
            }
        }
        agg.value(s)
    }

    fn evaluate(&self, x: &[i64]) -> Evaluation {
        let mut objective = 0.0;
        let mut penalty = 0.0;
        let mut violations = Vec::new();
        for k in 0..self.n_terms() {
            let t = self.discrete_term(k, x);
            objective += t.objective;
            if t.violation > 0.0 {
                penalty += t.weight * t.violation;
                violations.push((k, t.violation));
            }
        }
        let s: f64 = x.iter().map(|&v| v as f64).sum();
        objective += self.aggregate().value(s);
        Evaluation {
            objective,
            penalized: objective + penalty,
            violations,
        }
    }

    /// Change in `f̂` when `x[i]` becomes `value`. Only the hyperedges
    /// containing `i` are re-evaluated; `sum` is the current `Σ x`.
    fn move_delta(&self, x: &mut [i64], i: usize, value: i64, sum: f64) -> f64 {
        let old = x[i];
        if old == value {
            return 0.0;
        }
        let h = self.hypergraph();
        let mut delta = 0.0;
        for &k in h.incident_edges(i) {
            delta -= self.discrete_term(k, x).penalized();
        }
        x[i] = value;
        for &k in h.incident_edges(i) {
            delta += self.discrete_term(k, x).penalized();
        }
        x[i] = old;
        let agg = self.aggregate();
        if !agg.is_none() {
            delta += agg.value(sum + (value - old) as f64) - agg.value(sum);
        }
        delta
    }
}
