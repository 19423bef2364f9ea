//! Trainability diagnostics for maximum independent set: density sweeps on
//! Erdős–Rényi graphs, comparison across graph families, embedding spread
//! through the network, and recovery by sparsifying the propagation graph.
//!
//! "GNN-only" means the network output thresholded at 1/2 and repaired by
//! greedily dropping the node with the most conflicts until the set is
//! independent. "hypop" anneals from the same trained output.

use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::generate::{density, erdos_renyi, powerlaw, random_regular};
use crate::hypergraph::{Hypergraph, OperatorVariant, PropagationOperator};
use crate::mapping::{map_with_restarts, OutputDistribution, SaConfig};
use crate::model::{train, HyperGnnModel, SmoothingTrace, TrainConfig};
use crate::problems::{MaxIndependentSet, Problem};

/// `ln(n) / n`, the connectivity threshold of `G(n, p)`.
pub fn connectivity_threshold(n: usize) -> f64 {
    (n as f64).ln() / n as f64
}

/// Threshold at 1/2, then drop the node with the most conflicting selected
/// neighbours (lowest index on ties) until no edge has both ends selected.
pub fn threshold_repair(h: &Hypergraph, p: &[f64]) -> Vec<i64> {
    let n = h.n_nodes();
    let mut x: Vec<i64> = p.iter().map(|&v| i64::from(v >= 0.5)).collect();
    let neighbours = |i: usize| {
        h.incident_edges(i).iter().map(move |&k| {
            let e = h.edge(k);
            if e[0] == i {
                e[1]
            } else {
                e[0]
            }
        })
    };
    let mut conflicts: Vec<usize> = (0..n)
        .map(|i| {
            if x[i] == 0 {
                0
            } else {
                neighbours(i).filter(|&j| x[j] != 0).count()
            }
        })
        .collect();
    loop {
        let (worst, &count) = conflicts
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
            .expect("n > 0");
        if count == 0 {
            break;
        }
        x[worst] = 0;
        conflicts[worst] = 0;
        for j in neighbours(worst) {
            if x[j] != 0 {
                conflicts[j] -= 1;
            }
        }
    }
    x
}

pub fn mis_ratio(x: &[i64]) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    MaxIndependentSet::set_size(x) as f64 / x.len() as f64
}

fn is_independent(h: &Hypergraph, x: &[i64]) -> bool {
    h.edges().all(|e| x[e[0]] == 0 || x[e[1]] == 0)
}

/// One sweep cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub family: String,
    #[serde(rename = "N")]
    pub n: usize,
    /// Edge probability (ER) or realized density.
    pub p: f64,
    /// Degree parameter: `d` for regular graphs, the exponent for power-law
    /// graphs.
    pub d: Option<f64>,
    /// Edge drop probability used for the propagation graph.
    pub ps: Option<f64>,
    pub lr: f64,
    pub seed: u64,
    pub solver: String,
    pub ratio: f64,
    pub runtime_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepConfig {
    pub train: TrainConfig,
    pub sa: SaConfig,
    pub variant: OperatorVariant,
    /// Skip annealing and report only the GNN-only ratio.
    pub gnn_only: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            train: TrainConfig::default(),
            sa: SaConfig::default(),
            variant: OperatorVariant::Modified,
            gnn_only: false,
        }
    }
}

/// Graph an instance was drawn from, for the record.
#[derive(Debug, Clone)]
struct Cell {
    family: &'static str,
    p: f64,
    d: Option<f64>,
    ps: Option<f64>,
    lr: f64,
    seed: u64,
}

/// Trains on `propagation` (the instance itself unless sparsified), then
/// reports the GNN-only and annealed ratios on `graph`.
fn run_cell(
    graph: &Hypergraph,
    propagation: &Hypergraph,
    cell: &Cell,
    cfg: &SweepConfig,
) -> Result<Vec<SweepRecord>> {
    let n = graph.n_nodes();
    let problem = MaxIndependentSet::new(graph.clone())?;
    let train_cfg = TrainConfig {
        learning_rate: cell.lr,
        seed: cell.seed,
        ..cfg.train.clone()
    };
    let started = Instant::now();
    let mut model = HyperGnnModel::new(n, cell.seed)?.with_variant(cfg.variant);
    let op = PropagationOperator::new(propagation, cfg.variant);
    let outcome = train(&mut model, &op, &problem, &train_cfg)?;
    let gnn = threshold_repair(graph, &outcome.p);
    debug_assert!(is_independent(graph, &gnn));
    let record = |solver: &str, ratio: f64, runtime_s: f64| SweepRecord {
        family: cell.family.to_string(),
        n,
        p: cell.p,
        d: cell.d,
        ps: cell.ps,
        lr: cell.lr,
        seed: cell.seed,
        solver: solver.to_string(),
        ratio,
        runtime_s,
    };
    let mut out = vec![record(
        "gnn-only",
        mis_ratio(&gnn),
        started.elapsed().as_secs_f64(),
    )];
    if !cfg.gnn_only {
        let dist = OutputDistribution::from_outputs(&outcome.p, problem.domain());
        let sa = SaConfig {
            seed: cell.seed,
            ..cfg.sa.clone()
        };
        let mapped = map_with_restarts(&dist, &problem, &sa)?;
        let x = &mapped.best.x;
        let ratio = if is_independent(graph, x) {
            mis_ratio(x)
        } else {
            // infeasible annealer output is repaired the same way
            mis_ratio(&threshold_repair(
                graph,
                &x.iter().map(|&v| v as f64).collect::<Vec<_>>(),
            ))
        };
        out.push(record("hypop", ratio, started.elapsed().as_secs_f64()));
    }
    Ok(out)
}

fn run_cells<F>(cells: Vec<Cell>, cfg: &SweepConfig, build: F) -> Result<Vec<SweepRecord>>
where
    F: Fn(&Cell) -> Result<(Hypergraph, Hypergraph)> + Sync,
{
    let nested: Vec<Vec<SweepRecord>> = cells
        .par_iter()
        .map(|cell| {
            let (graph, propagation) = build(cell)?;
            run_cell(&graph, &propagation, cell, cfg)
        })
        .collect::<Result<_>>()?;
    Ok(nested.into_iter().flatten().collect())
}

/// MIS on `G(n, p)` over the full grid `ns × ps × lrs × seeds`. Graph and
/// model are both seeded by the cell's seed.
pub fn phase_transition_sweep(
    ns: &[usize],
    ps: &[f64],
    lrs: &[f64],
    seeds: &[u64],
    cfg: &SweepConfig,
) -> Result<Vec<SweepRecord>> {
    let mut cells = Vec::new();
    let mut sizes = Vec::new();
    for &n in ns {
        for &p in ps {
            for &lr in lrs {
                for &seed in seeds {
                    cells.push(Cell {
                        family: "er",
                        p,
                        d: None,
                        ps: None,
                        lr,
                        seed,
                    });
                    sizes.push(n);
                }
            }
        }
    }
    let with_n: Vec<(usize, Cell)> = sizes.into_iter().zip(cells).collect();
    let nested: Vec<Vec<SweepRecord>> = with_n
        .par_iter()
        .map(|(n, cell)| {
            let g = erdos_renyi(*n, cell.p, cell.seed)?;
            run_cell(&g, &g, cell, cfg)
        })
        .collect::<Result<_>>()?;
    Ok(nested.into_iter().flatten().collect())
}

/// Mean ratio per `(family, N, p, solver)` cell in first-seen order.
pub fn mean_ratios(records: &[SweepRecord], solver: &str) -> Vec<(String, usize, f64, f64)> {
    let mut out: Vec<(String, usize, f64, f64, usize)> = Vec::new();
    for r in records.iter().filter(|r| r.solver == solver) {
        match out
            .iter_mut()
            .find(|c| c.0 == r.family && c.1 == r.n && c.2 == r.p)
        {
            Some(c) => {
                c.3 += r.ratio;
                c.4 += 1;
            }
            None => out.push((r.family.clone(), r.n, r.p, r.ratio, 1)),
        }
    }
    out.into_iter()
        .map(|(f, n, p, sum, count)| (f, n, p, sum / count as f64))
        .collect()
}

/// First grid density at which the ratio falls below half its value at the
/// smallest density. `curve` must be sorted by density.
pub fn drop_threshold(curve: &[(f64, f64)]) -> Option<f64> {
    let &(_, base) = curve.first()?;
    curve
        .iter()
        .find(|&&(_, ratio)| ratio < 0.5 * base)
        .map(|&(p, _)| p)
}

/// Instances of the three families at the density of a power-law graph.
#[derive(Debug, Clone)]
pub struct MatchedFamilies {
    pub powerlaw: Hypergraph,
    pub regular: Hypergraph,
    pub erdos_renyi: Hypergraph,
    pub regular_degree: usize,
}

/// Power-law graph from `(exponent, min_degree)`, then a regular graph and
/// an ER graph with the same density (within 5%, checked).
pub fn matched_families(
    n: usize,
    exponent: f64,
    min_degree: usize,
    seed: u64,
) -> Result<MatchedFamilies> {
    let pl = powerlaw(n, exponent, min_degree, seed)?;
    let target = density(&pl);
    let mut degree = (target * (n as f64 - 1.0)).round().max(1.0) as usize;
    if n * degree % 2 == 1 {
        degree += 1;
    }
    let regular = random_regular(n, degree, seed)?;
    let er = erdos_renyi(n, target, seed)?;
    for (name, g) in [("regular", &regular), ("erdos-renyi", &er)] {
        let d = density(g);
        if (d - target).abs() > 0.05 * target {
            return Err(Error::InfeasibleSpec(format!(
                "{name} density {d:.5} is not within 5% of {target:.5}"
            )));
        }
    }
    Ok(MatchedFamilies {
        powerlaw: pl,
        regular,
        erdos_renyi: er,
        regular_degree: degree,
    })
}

/// GNN-only and annealed ratios on density-matched power-law, regular and
/// ER graphs, for each `(exponent, min_degree)` and seed.
pub fn family_comparison(
    n: usize,
    powerlaw_params: &[(f64, usize)],
    lr: f64,
    seeds: &[u64],
    cfg: &SweepConfig,
) -> Result<Vec<SweepRecord>> {
    let mut jobs = Vec::new();
    for &(exponent, min_degree) in powerlaw_params {
        for &seed in seeds {
            jobs.push((exponent, min_degree, seed));
        }
    }
    let nested: Vec<Vec<SweepRecord>> = jobs
        .par_iter()
        .map(|&(exponent, min_degree, seed)| {
            let fam = matched_families(n, exponent, min_degree, seed)?;
            let p = density(&fam.powerlaw);
            let mut out = Vec::new();
            for (family, g, d) in [
                ("powerlaw", &fam.powerlaw, Some(exponent)),
                ("regular", &fam.regular, Some(fam.regular_degree as f64)),
                ("er", &fam.erdos_renyi, None),
            ] {
                let cell = Cell {
                    family,
                    p,
                    d,
                    ps: None,
                    lr,
                    seed,
                };
                out.extend(run_cell(g, g, &cell, cfg)?);
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    Ok(nested.into_iter().flatten().collect())
}

/// Max pairwise node-embedding distance after each of the four main
/// operations of `model` on `op`.
pub fn oversmoothing_trace(
    model: &HyperGnnModel,
    op: &PropagationOperator,
) -> Result<SmoothingTrace> {
    SmoothingTrace::measure(model, op)
}

/// MIS on `graph` with each hyperedge of the propagation graph dropped with
/// probability `Ps`. The loss and evaluation always use `graph` itself.
pub fn sparsification_study(
    graph: &Hypergraph,
    drop_probabilities: &[f64],
    lr: f64,
    seeds: &[u64],
    cfg: &SweepConfig,
) -> Result<Vec<SweepRecord>> {
    let p = density(graph);
    let mut cells = Vec::new();
    for &ps in drop_probabilities {
        for &seed in seeds {
            cells.push(Cell {
                family: "er",
                p,
                d: None,
                ps: Some(ps),
                lr,
                seed,
            });
        }
    }
    run_cells(cells, cfg, |cell| {
        let sparse = graph.sparsify(cell.ps.unwrap_or(0.0), cell.seed)?;
        Ok((graph.clone(), sparse))
    })
}

pub fn write_jsonl(records: &[SweepRecord], mut out: impl Write) -> Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r).map_err(|e| Error::Wire(e.to_string()))?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_csv(records: &[SweepRecord], out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r).map_err(|e| Error::Wire(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}
