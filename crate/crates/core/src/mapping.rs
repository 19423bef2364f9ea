//! From continuous outputs to a discrete assignment: build a per-node
//! distribution, sample, refine each sample by simulated annealing on the
//! penalized objective, keep the best.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problems::{Domain, Evaluation, Problem};
use crate::rng::stream;

const INVERSE_DISTANCE_EPS: f64 = 1e-6;
const CALIBRATION_FLIPS: usize = 100;

/// Per-node probability weights over the values of a domain.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputDistribution {
    values: Vec<i64>,
    /// Row-major `n × values.len()`.
    weights: Vec<f64>,
}

impl OutputDistribution {
    /// Binary domains use `Pr(1) = p_i`. Larger domains weight value `d_j`
    /// by `1 / (|p_i − d_j| + ε)`.
    pub fn from_outputs(p: &[f64], domain: &Domain) -> Self {
        let values = domain.values().to_vec();
        let k = values.len();
        let mut weights = Vec::with_capacity(p.len() * k);
        for &pi in p {
            if domain.is_binary() {
                let one = pi.clamp(0.0, 1.0);
                weights.extend([1.0 - one, one]);
            } else {
                let start = weights.len();
                weights.extend(
                    values
                        .iter()
                        .map(|&d| 1.0 / ((pi - d as f64).abs() + INVERSE_DISTANCE_EPS)),
                );
                let total: f64 = weights[start..].iter().sum();
                weights[start..].iter_mut().for_each(|w| *w /= total);
            }
        }
        Self { values, weights }
    }

    /// Every value equally likely for every node.
    pub fn uniform(n: usize, domain: &Domain) -> Self {
        let k = domain.len();
        Self {
            values: domain.values().to_vec(),
            weights: vec![1.0 / k as f64; n * k],
        }
    }

    pub fn n(&self) -> usize {
        self.weights.len() / self.values.len()
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn weights(&self, i: usize) -> &[f64] {
        let k = self.values.len();
        &self.weights[i * k..(i + 1) * k]
    }

    /// One independent draw per node.
    pub fn sample(&self, rng: &mut impl Rng) -> Vec<i64> {
        (0..self.n())
            .map(|i| {
                let u: f64 = rng.gen();
                let w = self.weights(i);
                let mut acc = 0.0;
                for (j, &wj) in w.iter().enumerate() {
                    acc += wj;
                    if u < acc {
                        return self.values[j];
                    }
                }
                // rounding left u just above the cumulative sum; take the
                // last value with nonzero weight
                let j = w.iter().rposition(|&wj| wj > 0.0).unwrap_or(w.len() - 1);
                self.values[j]
            })
            .collect()
    }
}

pub fn to_distribution(p: &[f64], domain: &Domain) -> OutputDistribution {
    OutputDistribution::from_outputs(p, domain)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "value")]
pub enum Temperature {
    /// `scale × mean |Δf̂|` over random single flips from the start state.
    Auto(f64),
    Fixed(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SaConfig {
    pub restarts: usize,
    pub initial_temperature: Temperature,
    /// Geometric cooling factor applied after every sweep.
    pub cooling: f64,
    /// Sweeps per restart; one sweep is `N` proposed moves.
    pub sweeps: usize,
    pub seed: u64,
}

impl Default for SaConfig {
    fn default() -> Self {
        Self {
            restarts: 3,
            initial_temperature: Temperature::Auto(1.0),
            cooling: 0.99,
            sweeps: 200,
            seed: 0,
        }
    }
}

impl SaConfig {
    pub fn validate(&self) -> Result<()> {
        let t_ok = match self.initial_temperature {
            Temperature::Auto(s) | Temperature::Fixed(s) => s > 0.0 && s.is_finite(),
        };
        if self.restarts == 0 || !t_ok || !(self.cooling > 0.0 && self.cooling < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "annealing settings {self:?}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assignment {
    pub x: Vec<i64>,
    pub evaluation: Evaluation,
}

impl Assignment {
    pub fn new(x: Vec<i64>, problem: &dyn Problem) -> Self {
        let evaluation = problem.evaluate(&x);
        Self { x, evaluation }
    }

    pub fn penalized(&self) -> f64 {
        self.evaluation.penalized
    }
}

fn propose(domain: &Domain, current: i64, rng: &mut impl Rng) -> i64 {
    if domain.is_binary() {
        return 1 - current;
    }
    let values = domain.values();
    let pos = domain.index_of(current).unwrap_or(0);
    let pick = rng.gen_range(0..values.len() - 1);
    values[if pick >= pos { pick + 1 } else { pick }]
}

fn calibrate(problem: &dyn Problem, x: &mut [i64], sum: f64, rng: &mut impl Rng) -> f64 {
    let domain = problem.domain();
    let n = x.len();
    let total: f64 = (0..CALIBRATION_FLIPS)
        .map(|_| {
            let i = rng.gen_range(0..n);
            let v = propose(domain, x[i], rng);
            problem.move_delta(x, i, v, sum).abs()
        })
        .sum();
    let mean = total / CALIBRATION_FLIPS as f64;
    if mean > 0.0 {
        mean
    } else {
        1.0
    }
}

/// Zero-temperature finish: sweeps the variables in index order taking the
/// best strictly improving single-variable change until none is left.
fn quench(problem: &dyn Problem, x: &mut [i64]) {
    let domain = problem.domain();
    let mut sum: f64 = x.iter().map(|&v| v as f64).sum();
    let mut improved = true;
    while improved {
        improved = false;
        for i in 0..x.len() {
            let mut best = (0.0, x[i]);
            for &v in domain.values() {
                if v == x[i] {
                    continue;
                }
                let delta = problem.move_delta(x, i, v, sum);
                // a margin keeps rounding noise from cycling
                if delta < best.0 - 1e-12 {
                    best = (delta, v);
                }
            }
            if best.1 != x[i] {
                sum += (best.1 - x[i]) as f64;
                x[i] = best.1;
                improved = true;
            }
        }
    }
}

/// Metropolis single-variable annealing from `x0`, then a greedy descent
/// from the best state seen. The result is never worse than `x0`.
pub fn anneal(
    x0: Vec<i64>,
    problem: &dyn Problem,
    cfg: &SaConfig,
    rng: &mut impl Rng,
) -> Result<Assignment> {
    cfg.validate()?;
    let n = problem.n_vars();
    if x0.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "initial assignment has {} entries for {n} variables",
            x0.len()
        )));
    }
    let domain = problem.domain();
    if let Some(bad) = x0.iter().find(|v| !domain.contains(**v)) {
        return Err(Error::InvalidArgument(format!(
            "value {bad} outside the domain"
        )));
    }
    let start = Assignment::new(x0, problem);
    if n == 0 || (domain.len() < 2) {
        return Ok(start);
    }

    let mut x = start.x.clone();
    let mut sum: f64 = x.iter().map(|&v| v as f64).sum();
    let mut temperature = match cfg.initial_temperature {
        Temperature::Fixed(t) => t,
        Temperature::Auto(scale) => scale * calibrate(problem, &mut x, sum, rng),
    };

    let mut current = start.penalized();
    let mut best_value = current;
    let mut best_x = x.clone();
    // indices changed since best_x was last synchronized with x
    let mut dirty: Vec<usize> = Vec::new();
    let mut is_dirty = vec![false; n];

    for _ in 0..cfg.sweeps {
        for _ in 0..n {
            let i = rng.gen_range(0..n);
            let v = propose(domain, x[i], rng);
            let delta = problem.move_delta(&mut x, i, v, sum);
            let accept = delta <= 0.0 || rng.gen::<f64>() < (-delta / temperature).exp();
            if !accept {
                continue;
            }
            sum += (v - x[i]) as f64;
            x[i] = v;
            current += delta;
            if !is_dirty[i] {
                is_dirty[i] = true;
                dirty.push(i);
            }
            if current < best_value {
                best_value = current;
                for &j in &dirty {
                    best_x[j] = x[j];
                    is_dirty[j] = false;
                }
                dirty.clear();
            }
        }
        temperature *= cfg.cooling;
    }

    quench(problem, &mut best_x);
    let best = Assignment::new(best_x, problem);
    // the running value accumulates rounding; settle on exact evaluations
    if start.penalized() < best.penalized() {
        Ok(start)
    } else {
        Ok(best)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MappingOutcome {
    pub best: Assignment,
    /// Index of the winning restart.
    pub best_restart: usize,
    /// Penalized objective of each restart's result.
    pub restart_values: Vec<f64>,
}

/// `R` independent sample-and-anneal runs from `dist`; restart `r` draws
/// from stream `r` of `cfg.seed`. Lowest penalized objective wins, ties go
/// to the lowest restart index.
pub fn map_with_restarts(
    dist: &OutputDistribution,
    problem: &dyn Problem,
    cfg: &SaConfig,
) -> Result<MappingOutcome> {
    cfg.validate()?;
    if dist.n() != problem.n_vars() {
        return Err(Error::DimensionMismatch(format!(
            "distribution over {} nodes for {} variables",
            dist.n(),
            problem.n_vars()
        )));
    }
    let results: Vec<Assignment> = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = stream(cfg.seed, r as u64);
            let x0 = dist.sample(&mut rng);
            anneal(x0, problem, cfg, &mut rng)
        })
        .collect::<Result<_>>()?;
    let restart_values: Vec<f64> = results.iter().map(Assignment::penalized).collect();
    let mut best_restart = 0;
    for (r, &v) in restart_values.iter().enumerate() {
        if v < restart_values[best_restart] {
            best_restart = r;
        }
    }
    let best = results
        .into_iter()
        .nth(best_restart)
        .expect("at least one restart");
    Ok(MappingOutcome {
        best,
        best_restart,
        restart_values,
    })
}
