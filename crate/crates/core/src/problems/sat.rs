use super::{Domain, Problem, ProblemKind, TermValue};
use crate::error::{Error, Result};
use crate::hypergraph::io::{CnfFormula, Literal};
use crate::hypergraph::Hypergraph;

/// CNF satisfiability. Clause `k` contributes `λ_k Π_ℓ (1 − s_ℓ)` with
/// `s_ℓ = p_i` for a positive literal and `1 − p_i` for a negated one.
#[derive(Debug, Clone)]
pub struct Sat3 {
    cnf: CnfFormula,
    clauses: Vec<Vec<Literal>>,
    h: Hypergraph,
    penalties: Vec<f64>,
    domain: Domain,
}

impl Sat3 {
    pub fn new(cnf: CnfFormula) -> Result<Self> {
        if let Some(k) = cnf.clauses.iter().position(|c| c.is_empty()) {
            return Err(Error::EmptyClause { clause: k });
        }
        let h = cnf.hypergraph()?;
        let clauses = cnf.literal_clauses();
        let penalties = vec![1.0; clauses.len()];
        Ok(Self {
            cnf,
            clauses,
            h,
            penalties,
            domain: Domain::binary(),
        })
    }

    pub fn with_penalties(mut self, penalties: Vec<f64>) -> Result<Self> {
        if penalties.len() != self.clauses.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} penalties for {} clauses",
                penalties.len(),
                self.clauses.len()
            )));
        }
        if let Some(bad) = penalties.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::InvalidArgument(format!("clause penalty {bad}")));
        }
        self.penalties = penalties;
        Ok(self)
    }

    pub fn formula(&self) -> &CnfFormula {
        &self.cnf
    }

    fn clause_satisfied(&self, k: usize, x: &[i64]) -> bool {
        self.clauses[k]
            .iter()
            .any(|l| (x[l.var] != 0) == l.positive)
    }
}

/// `1 − s_ℓ`: the probability that literal `l` is false.
fn falsity(l: &Literal, p: &[f64]) -> f64 {
    if l.positive {
        1.0 - p[l.var]
    } else {
        p[l.var]
    }
}

impl Problem for Sat3 {
    fn kind(&self) -> ProblemKind {
        ProblemKind::Sat3
    }

    fn hypergraph(&self) -> &Hypergraph {
        &self.h
    }

    fn domain(&self) -> &Domain {
        &self.domain
    }

    fn relaxed_term(&self, k: usize, p: &[f64], grad: Option<&mut [f64]>) -> f64 {
        let clause = &self.clauses[k];
        let lambda = self.penalties[k];
        if let Some(grad) = grad {
            for (j, l) in clause.iter().enumerate() {
                let rest: f64 = clause
                    .iter()
                    .enumerate()
                    .filter(|&(m, _)| m != j)
                    .map(|(_, o)| falsity(o, p))
                    .product();
                let sign = if l.positive { -1.0 } else { 1.0 };
                grad[l.var] += lambda * sign * rest;
            }
        }
        lambda * clause.iter().map(|l| falsity(l, p)).product::<f64>()
    }

    fn discrete_term(&self, k: usize, x: &[i64]) -> TermValue {
        let violated = !self.clause_satisfied(k, x);
        TermValue::constraint(if violated { 1.0 } else { 0.0 }, self.penalties[k])
    }

    fn score(&self, x: &[i64]) -> f64 {
        (0..self.clauses.len())
            .filter(|&k| !self.clause_satisfied(k, x))
            .count() as f64
    }

    fn score_name(&self) -> &'static str {
        "unsatisfied"
    }
}
