use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::Hypergraph;
use crate::error::{Error, Result};
use crate::rng::seeded;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum PartitionScheme {
    /// Contiguous index ranges `0..a, a..b, ...`.
    Block,
    /// Contiguous ranges over a seeded random permutation of the nodes.
    Random { seed: u64 },
}

/// One worker's local view of the hypergraph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorkerPart {
    /// Owned nodes, ascending.
    pub nodes: Vec<usize>,
    /// Hyperedges whose members are all owned by this worker.
    pub inner: Vec<usize>,
    /// Hyperedges with at least one owned member and at least one remote member.
    pub outer: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    n_nodes: usize,
    n_edges: usize,
    owner: Vec<usize>,
    workers: Vec<WorkerPart>,
}

impl Partition {
    pub fn new(h: &Hypergraph, workers: usize, scheme: PartitionScheme) -> Result<Self> {
        let n = h.n_nodes();
        if workers == 0 || workers > n {
            return Err(Error::TooManyWorkers { workers, nodes: n });
        }
        let mut order: Vec<usize> = (0..n).collect();
        if let PartitionScheme::Random { seed } = scheme {
            order.shuffle(&mut seeded(seed));
        }
        let mut owner = vec![0; n];
        let (base, extra) = (n / workers, n % workers);
        let mut start = 0;
        for s in 0..workers {
            let len = base + usize::from(s < extra);
            for &i in &order[start..start + len] {
                owner[i] = s;
            }
            start += len;
        }
        Self::from_owner(h, owner, workers)
    }

    /// Builds the worker views from an explicit node→worker map.
    pub fn from_owner(h: &Hypergraph, owner: Vec<usize>, workers: usize) -> Result<Self> {
        if owner.len() != h.n_nodes() {
            return Err(Error::StalePartition {
                partition_nodes: owner.len(),
                problem_nodes: h.n_nodes(),
            });
        }
        let mut parts: Vec<WorkerPart> = (0..workers)
            .map(|_| WorkerPart {
                nodes: Vec::new(),
                inner: Vec::new(),
                outer: Vec::new(),
            })
            .collect();
        for (i, &s) in owner.iter().enumerate() {
            if s >= workers {
                return Err(Error::InvalidArgument(format!(
                    "node {i} assigned to worker {s} of {workers}"
                )));
            }
            parts[s].nodes.push(i);
        }
        if let Some(s) = parts.iter().position(|p| p.nodes.is_empty()) {
            return Err(Error::InvalidArgument(format!("worker {s} owns no nodes")));
        }
        let mut touched = Vec::new();
        for (k, edge) in h.edges().enumerate() {
            touched.clear();
            touched.extend(edge.iter().map(|&i| owner[i]));
            touched.sort_unstable();
            touched.dedup();
            if touched.len() == 1 {
                parts[touched[0]].inner.push(k);
            } else {
                for &s in &touched {
                    parts[s].outer.push(k);
                }
            }
        }
        Ok(Self {
            n_nodes: h.n_nodes(),
            n_edges: h.n_edges(),
            owner,
            workers: parts,
        })
    }

    pub fn n_workers(&self) -> usize {
        self.workers.len()
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn n_edges(&self) -> usize {
        self.n_edges
    }

    pub fn worker(&self, s: usize) -> &WorkerPart {
        &self.workers[s]
    }

    pub fn workers(&self) -> &[WorkerPart] {
        &self.workers
    }

    pub fn owner(&self, node: usize) -> usize {
        self.owner[node]
    }

    pub fn owners(&self) -> &[usize] {
        &self.owner
    }

    /// Fails unless this partition was built for `h`.
    pub fn check_matches(&self, h: &Hypergraph) -> Result<()> {
        if self.n_nodes != h.n_nodes() || self.n_edges != h.n_edges() {
            return Err(Error::StalePartition {
                partition_nodes: self.n_nodes,
                problem_nodes: h.n_nodes(),
            });
        }
        Ok(())
    }
}
