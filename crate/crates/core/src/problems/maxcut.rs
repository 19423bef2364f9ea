use super::{Aggregate, Domain, Problem, ProblemKind, TermValue};
use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;

/// `1 − Πp − Π(1−p)` over the members of `edge`, the probability that the
/// hyperedge is cut when nodes are drawn independently.
fn relaxed_cut(edge: &[usize], p: &[f64], scale: f64, grad: Option<&mut [f64]>) -> f64 {
    if let Some(grad) = grad {
        for (j, &i) in edge.iter().enumerate() {
            let (mut ones, mut zeros) = (1.0, 1.0);
            for (l, &m) in edge.iter().enumerate() {
                if l != j {
                    ones *= p[m];
                    zeros *= 1.0 - p[m];
                }
            }
            // d/dp_i of −Πp − Π(1−p)
            grad[i] += scale * (zeros - ones);
        }
    }
    let all_one: f64 = edge.iter().map(|&i| p[i]).product();
    let all_zero: f64 = edge.iter().map(|&i| 1.0 - p[i]).product();
    scale * (1.0 - all_one - all_zero)
}

fn is_cut(edge: &[usize], x: &[i64]) -> bool {
    let first = x[edge[0]];
    edge[1..].iter().any(|&i| x[i] != first)
}

pub(crate) fn cut_weight(h: &Hypergraph, x: &[i64]) -> f64 {
    h.edges()
        .enumerate()
        .filter(|(_, e)| is_cut(e, x))
        .map(|(k, _)| h.weight(k))
        .sum()
}

/// Maximize the total weight of hyperedges containing both labels.
#[derive(Debug, Clone)]
pub struct HypergraphMaxCut {
    h: Hypergraph,
    domain: Domain,
}

impl HypergraphMaxCut {
    pub fn new(h: Hypergraph) -> Self {
        Self {
            h,
            domain: Domain::binary(),
        }
    }
}

impl Problem for HypergraphMaxCut {
    fn kind(&self) -> ProblemKind {
        ProblemKind::HypergraphMaxcut
    }

    fn hypergraph(&self) -> &Hypergraph {
        &self.h
    }

    fn domain(&self) -> &Domain {
        &self.domain
    }

    fn relaxed_term(&self, k: usize, p: &[f64], grad: Option<&mut [f64]>) -> f64 {
        relaxed_cut(self.h.edge(k), p, -self.h.weight(k), grad)
    }

    fn discrete_term(&self, k: usize, x: &[i64]) -> TermValue {
        let cut = is_cut(self.h.edge(k), x);
        TermValue::objective(if cut { -self.h.weight(k) } else { 0.0 })
    }

    fn score(&self, x: &[i64]) -> f64 {
        cut_weight(&self.h, x)
    }

    fn score_name(&self) -> &'static str {
        "cut"
    }
}

/// Max-cut on an ordinary graph with the quadratic relaxation
/// `Σ w(2 p_i p_j − p_i − p_j)`.
#[derive(Debug, Clone)]
pub struct GraphMaxCut {
    h: Hypergraph,
    domain: Domain,
}

impl GraphMaxCut {
    pub fn new(h: Hypergraph) -> Result<Self> {
        h.require_graph()?;
        Ok(Self {
            h,
            domain: Domain::binary(),
        })
    }
}

impl Problem for GraphMaxCut {
    fn kind(&self) -> ProblemKind {
        ProblemKind::GraphMaxcut
    }

    fn hypergraph(&self) -> &Hypergraph {
        &self.h
    }

    fn domain(&self) -> &Domain {
        &self.domain
    }

    fn relaxed_term(&self, k: usize, p: &[f64], grad: Option<&mut [f64]>) -> f64 {
        let (i, j) = match *self.h.edge(k) {
            [i, j] => (i, j),
            _ => unreachable!("checked at construction"),
        };
        let w = self.h.weight(k);
        if let Some(grad) = grad {
            grad[i] += w * (2.0 * p[j] - 1.0);
            grad[j] += w * (2.0 * p[i] - 1.0);
        }
        w * (2.0 * p[i] * p[j] - p[i] - p[j])
    }

    fn discrete_term(&self, k: usize, x: &[i64]) -> TermValue {
        let cut = is_cut(self.h.edge(k), x);
        TermValue::objective(if cut { -self.h.weight(k) } else { 0.0 })
    }

    fn score(&self, x: &[i64]) -> f64 {
        cut_weight(&self.h, x)
    }

    fn score_name(&self) -> &'static str {
        "cut"
    }
}

/// Balanced min-cut: cut weight plus `γ (Σp − N/2)²`.
#[derive(Debug, Clone)]
pub struct HypergraphMinCut {
    h: Hypergraph,
    gamma: f64,
    domain: Domain,
}

impl HypergraphMinCut {
    /// Uses the default balance weight `γ = 2·mean_degree / N`.
    pub fn new(h: Hypergraph) -> Self {
        let n = h.n_nodes().max(1) as f64;
        let mean_degree = h.incidence_count() as f64 / n;
        let gamma = 2.0 * mean_degree / n;
        Self {
            h,
            gamma,
            domain: Domain::binary(),
        }
    }

    pub fn with_gamma(h: Hypergraph, gamma: f64) -> Result<Self> {
        if !(gamma.is_finite() && gamma >= 0.0) {
            return Err(Error::InvalidArgument(format!("balance weight {gamma}")));
        }
        Ok(Self {
            h,
            gamma,
            domain: Domain::binary(),
        })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// `|Σx − N/2|`.
    pub fn imbalance(&self, x: &[i64]) -> f64 {
        let s: i64 = x.iter().sum();
        (s as f64 - self.h.n_nodes() as f64 / 2.0).abs()
    }
}

impl Problem for HypergraphMinCut {
    fn kind(&self) -> ProblemKind {
        ProblemKind::HypergraphMincut
    }

    fn hypergraph(&self) -> &Hypergraph {
        &self.h
    }

    fn domain(&self) -> &Domain {
        &self.domain
    }

    fn relaxed_term(&self, k: usize, p: &[f64], grad: Option<&mut [f64]>) -> f64 {
        relaxed_cut(self.h.edge(k), p, self.h.weight(k), grad)
    }

    fn discrete_term(&self, k: usize, x: &[i64]) -> TermValue {
        let cut = is_cut(self.h.edge(k), x);
        TermValue::objective(if cut { self.h.weight(k) } else { 0.0 })
    }

    fn aggregate(&self) -> Aggregate {
        Aggregate::Balance {
            gamma: self.gamma,
            target: self.h.n_nodes() as f64 / 2.0,
        }
    }

    fn score(&self, x: &[i64]) -> f64 {
        cut_weight(&self.h, x)
    }

    fn score_name(&self) -> &'static str {
        "cut"
    }
}
