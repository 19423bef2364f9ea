use super::{Domain, Problem, ProblemKind, TermValue};
use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;

/// What a derived hyperedge of [`ResourceAllocation`] constrains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ResourceConstraint {
    /// Task `t` needs `requirement` assigned agents: `c = requirement − Σx`.
    Task { task: usize, requirement: f64 },
    /// Agent `i` can take at most `budget` assignments: `c = Σx − budget`.
    Agent { agent: usize, budget: f64 },
}

/// Agent-to-task assignment. Agents are the nodes and tasks the hyperedges
/// of a base hypergraph; there is one binary variable per (agent, task)
/// incidence pair, and the GNN runs on the derived hypergraph over those
/// variables.
#[derive(Debug, Clone)]
pub struct ResourceAllocation {
    pairs: Vec<(usize, usize)>,
    constraints: Vec<ResourceConstraint>,
    h: Hypergraph,
    penalties: Vec<f64>,
    domain: Domain,
}

impl ResourceAllocation {
    /// Each task requires all of its members; agent `i` has budget
    /// `degree(i) + surplus`.
    pub fn new(base: &Hypergraph, surplus: usize) -> Result<Self> {
        let mut pairs = Vec::with_capacity(base.incidence_count());
        let mut edges = Vec::with_capacity(base.n_edges() + base.n_nodes());
        let mut constraints = Vec::with_capacity(base.n_edges() + base.n_nodes());
        let mut by_agent: Vec<Vec<usize>> = vec![Vec::new(); base.n_nodes()];
        for (t, task) in base.edges().enumerate() {
            let mut vars = Vec::with_capacity(task.len());
            for &agent in task {
                by_agent[agent].push(pairs.len());
                vars.push(pairs.len());
                pairs.push((agent, t));
            }
            edges.push(vars);
            constraints.push(ResourceConstraint::Task {
                task: t,
                requirement: task.len() as f64,
            });
        }
        for (agent, vars) in by_agent.into_iter().enumerate() {
            if vars.is_empty() {
                continue;
            }
            constraints.push(ResourceConstraint::Agent {
                agent,
                budget: (vars.len() + surplus) as f64,
            });
            edges.push(vars);
        }
        let h = Hypergraph::new(pairs.len(), edges)?;
        Ok(Self {
            penalties: vec![1.0; constraints.len()],
            pairs,
            constraints,
            h,
            domain: Domain::binary(),
        })
    }

    pub fn with_penalties(mut self, penalties: Vec<f64>) -> Result<Self> {
        if penalties.len() != self.constraints.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} penalties for {} constraints",
                penalties.len(),
                self.constraints.len()
            )));
        }
        if let Some(bad) = penalties.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::InvalidArgument(format!("constraint penalty {bad}")));
        }
        self.penalties = penalties;
        Ok(self)
    }

    /// `(agent, task)` for each variable.
    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn constraint(&self, k: usize) -> ResourceConstraint {
        self.constraints[k]
    }

    /// `c_k` for a sum `s` over the hyperedge's variables, and `∂c_k/∂x`.
    fn slack(&self, k: usize, s: f64) -> (f64, f64) {
        match self.constraints[k] {
            ResourceConstraint::Task { requirement, .. } => (requirement - s, -1.0),
            ResourceConstraint::Agent { budget, .. } => (s - budget, 1.0),
        }
    }
}

impl Problem for ResourceAllocation {
    fn kind(&self) -> ProblemKind {
        ProblemKind::Resource
    }

    fn hypergraph(&self) -> &Hypergraph {
        &self.h
    }

    fn domain(&self) -> &Domain {
        &self.domain
    }

    fn relaxed_term(&self, k: usize, p: &[f64], grad: Option<&mut [f64]>) -> f64 {
        let vars = self.h.edge(k);
        let s: f64 = vars.iter().map(|&v| p[v]).sum();
        let (c, dc) = self.slack(k, s);
        if c <= 0.0 {
            return 0.0;
        }
        let lambda = self.penalties[k];
        if let Some(grad) = grad {
            for &v in vars {
                grad[v] += lambda * dc;
            }
        }
        lambda * c
    }

    fn discrete_term(&self, k: usize, x: &[i64]) -> TermValue {
        let s: f64 = self.h.edge(k).iter().map(|&v| x[v] as f64).sum();
        let (c, _) = self.slack(k, s);
        TermValue::constraint(c.max(0.0), self.penalties[k])
    }

    fn score(&self, x: &[i64]) -> f64 {
        (0..self.n_terms())
            .filter(|&k| self.discrete_term(k, x).violation > 0.0)
            .count() as f64
    }

    fn score_name(&self) -> &'static str {
        "violations"
    }
}
