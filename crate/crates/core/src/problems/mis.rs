use super::{Aggregate, Domain, Problem, ProblemKind, TermValue};
use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;

pub const DEFAULT_BETA: f64 = 2.0;

/// Maximum independent set: `−Σp + β Σ_{(i,j)∈E} p_i p_j`.
#[derive(Debug, Clone)]
pub struct MaxIndependentSet {
    h: Hypergraph,
    beta: f64,
    domain: Domain,
}

impl MaxIndependentSet {
    pub fn new(h: Hypergraph) -> Result<Self> {
        Self::with_beta(h, DEFAULT_BETA)
    }

    pub fn with_beta(h: Hypergraph, beta: f64) -> Result<Self> {
        h.require_graph()?;
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::InvalidArgument(format!("edge penalty {beta}")));
        }
        Ok(Self {
            h,
            beta,
            domain: Domain::binary(),
        })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn set_size(x: &[i64]) -> usize {
        x.iter().filter(|&&v| v != 0).count()
    }

    /// Edges with both endpoints selected.
    pub fn conflicts(&self, x: &[i64]) -> usize {
        self.h
            .edges()
            .filter(|e| x[e[0]] != 0 && x[e[1]] != 0)
            .count()
    }
}

impl Problem for MaxIndependentSet {
    fn kind(&self) -> ProblemKind {
        ProblemKind::Mis
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
        if let Some(grad) = grad {
            grad[i] += self.beta * p[j];
            grad[j] += self.beta * p[i];
        }
        self.beta * p[i] * p[j]
    }

    fn discrete_term(&self, k: usize, x: &[i64]) -> TermValue {
        let e = self.h.edge(k);
        TermValue::constraint((x[e[0]] * x[e[1]]) as f64, self.beta)
    }

    fn aggregate(&self) -> Aggregate {
        Aggregate::Linear { coef: -1.0 }
    }

    fn score(&self, x: &[i64]) -> f64 {
        Self::set_size(x) as f64
    }

    fn score_name(&self) -> &'static str {
        "set_size"
    }
}
