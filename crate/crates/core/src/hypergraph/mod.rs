//! Constraint hypergraphs.
//!
//! A [`Hypergraph`] has one node per optimization variable and one hyperedge
//! per constraint, holding the indices of the variables that constraint reads.
//! It is immutable once built; derived structures (propagation operators,
//! partitions, sparsified copies, bipartite expansions) are new values.

pub mod generate;
pub mod io;
mod operator;
mod partition;

use crate::error::{Error, Result};
use crate::rng::seeded;
use rand::Rng;

pub use operator::{OperatorVariant, PropagationOperator};
pub use partition::{Partition, PartitionScheme, WorkerPart};

/// Hyperedges stored in compressed form, plus the transposed node→edge
/// incidence lists.
#[derive(Debug, Clone, PartialEq)]
pub struct Hypergraph {
    n_nodes: usize,
    edge_offsets: Vec<usize>,
    edge_nodes: Vec<usize>,
    weights: Option<Vec<f64>>,
    incidence: Incidence,
}

#[derive(Debug, Clone, PartialEq)]
struct Incidence {
    offsets: Vec<usize>,
    edges: Vec<usize>,
}

impl Hypergraph {
    /// Validates and builds a hypergraph over `n_nodes` nodes.
    pub fn new<E, I>(n_nodes: usize, hyperedges: E) -> Result<Self>
    where
        E: IntoIterator<Item = I>,
        I: AsRef<[usize]>,
    {
        let mut edge_offsets = vec![0];
        let mut edge_nodes = Vec::new();
        let mut seen = vec![usize::MAX; n_nodes];
        for (k, edge) in hyperedges.into_iter().enumerate() {
            let edge = edge.as_ref();
            if edge.is_empty() {
                return Err(Error::EmptyHyperedge { edge: k });
            }
            for &node in edge {
                if node >= n_nodes {
                    return Err(Error::IndexOutOfRange {
                        edge: k,
                        node,
                        n_nodes,
                    });
                }
                if seen[node] == k {
                    return Err(Error::DuplicateNodeInEdge { edge: k, node });
                }
                seen[node] = k;
                edge_nodes.push(node);
            }
            edge_offsets.push(edge_nodes.len());
        }
        Ok(Self::from_parts(n_nodes, edge_offsets, edge_nodes, None))
    }

    /// Attaches per-hyperedge weights.
    pub fn with_weights(mut self, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != self.n_edges() {
            return Err(Error::DimensionMismatch(format!(
                "{} weights for {} hyperedges",
                weights.len(),
                self.n_edges()
            )));
        }
        self.weights = Some(weights);
        Ok(self)
    }

    fn from_parts(
        n_nodes: usize,
        edge_offsets: Vec<usize>,
        edge_nodes: Vec<usize>,
        weights: Option<Vec<f64>>,
    ) -> Self {
        let incidence = Incidence::build(n_nodes, &edge_offsets, &edge_nodes);
        Self {
            n_nodes,
            edge_offsets,
            edge_nodes,
            weights,
            incidence,
        }
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn n_edges(&self) -> usize {
        self.edge_offsets.len() - 1
    }

    pub fn edge(&self, k: usize) -> &[usize] {
        &self.edge_nodes[self.edge_offsets[k]..self.edge_offsets[k + 1]]
    }

    pub fn edges(&self) -> impl ExactSizeIterator<Item = &[usize]> + '_ {
        (0..self.n_edges()).map(move |k| self.edge(k))
    }

    /// Weight of hyperedge `k` (1 when the hypergraph is unweighted).
    pub fn weight(&self, k: usize) -> f64 {
        self.weights.as_ref().map_or(1.0, |w| w[k])
    }

    pub fn is_weighted(&self) -> bool {
        self.weights.is_some()
    }

    /// Hyperedges containing node `i`, in ascending order.
    pub fn incident_edges(&self, i: usize) -> &[usize] {
        &self.incidence.edges[self.incidence.offsets[i]..self.incidence.offsets[i + 1]]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.incidence.offsets[i + 1] - self.incidence.offsets[i]
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n_nodes).map(|i| self.degree(i)).collect()
    }

    /// Total number of (node, hyperedge) memberships.
    pub fn incidence_count(&self) -> usize {
        self.edge_nodes.len()
    }

    pub fn max_edge_size(&self) -> usize {
        self.edges().map(<[usize]>::len).max().unwrap_or(0)
    }

    /// True when every hyperedge has exactly two nodes.
    pub fn is_graph(&self) -> bool {
        self.edges().all(|e| e.len() == 2)
    }

    /// Fails with `NotAGraph` on the first hyperedge that is not a pair.
    pub fn require_graph(&self) -> Result<()> {
        match self.edges().position(|e| e.len() != 2) {
            Some(edge) => Err(Error::NotAGraph {
                edge,
                size: self.edge(edge).len(),
            }),
            None => Ok(()),
        }
    }

    /// Copy keeping only the hyperedges for which `keep` returns true.
    pub fn filter_edges(&self, mut keep: impl FnMut(usize, &[usize]) -> bool) -> Self {
        let mut edge_offsets = vec![0];
        let mut edge_nodes = Vec::new();
        let mut weights = self.weights.as_ref().map(|_| Vec::new());
        for k in 0..self.n_edges() {
            let edge = self.edge(k);
            if keep(k, edge) {
                edge_nodes.extend_from_slice(edge);
                edge_offsets.push(edge_nodes.len());
                if let Some(w) = weights.as_mut() {
                    w.push(self.weight(k));
                }
            }
        }
        Self::from_parts(self.n_nodes, edge_offsets, edge_nodes, weights)
    }

    /// Drops hyperedges with a single node.
    pub fn without_singletons(&self) -> Self {
        self.filter_edges(|_, e| e.len() > 1)
    }

    /// Removes nodes that belong to no hyperedge and relabels the rest
    /// densely. Returns the new hypergraph and, for each new node, its
    /// original index.
    pub fn without_isolated(&self) -> (Self, Vec<usize>) {
        let kept: Vec<usize> = (0..self.n_nodes).filter(|&i| self.degree(i) > 0).collect();
        let mut relabel = vec![usize::MAX; self.n_nodes];
        for (new, &old) in kept.iter().enumerate() {
            relabel[old] = new;
        }
        let edge_nodes = self.edge_nodes.iter().map(|&i| relabel[i]).collect();
        let h = Self::from_parts(
            kept.len(),
            self.edge_offsets.clone(),
            edge_nodes,
            self.weights.clone(),
        );
        (h, kept)
    }

    /// Drops each hyperedge independently with probability `drop_probability`.
    pub fn sparsify(&self, drop_probability: f64, seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&drop_probability) {
            return Err(Error::InvalidArgument(format!(
                "drop probability {drop_probability} outside [0, 1]"
            )));
        }
        let mut rng = seeded(seed);
        let keep_probability = 1.0 - drop_probability;
        Ok(self.filter_edges(|_, _| rng.gen::<f64>() < keep_probability))
    }

    /// Factor-graph form: one extra node per hyperedge, joined by a plain
    /// edge to each member. Node `n_nodes + k` stands for hyperedge `k`.
    pub fn bipartite_expansion(&self) -> Self {
        let n = self.n_nodes;
        let mut edge_offsets = Vec::with_capacity(self.incidence_count() + 1);
        edge_offsets.push(0);
        let mut edge_nodes = Vec::with_capacity(2 * self.incidence_count());
        for (k, edge) in self.edges().enumerate() {
            for &i in edge {
                edge_nodes.push(i);
                edge_nodes.push(n + k);
                edge_offsets.push(edge_nodes.len());
            }
        }
        Self::from_parts(n + self.n_edges(), edge_offsets, edge_nodes, None)
    }

    /// The hypergraph seen by a worker holding `nodes` (ascending, global ids)
    /// and the listed hyperedges, relabelled to local indices `0..nodes.len()`.
    /// Every listed hyperedge must lie inside `nodes`.
    pub fn restrict(&self, nodes: &[usize], edge_ids: &[usize]) -> Result<Self> {
        let mut local = vec![usize::MAX; self.n_nodes];
        for (l, &g) in nodes.iter().enumerate() {
            local[g] = l;
        }
        let mut edge_offsets = vec![0];
        let mut edge_nodes = Vec::new();
        for &k in edge_ids {
            for &g in self.edge(k) {
                let l = local[g];
                if l == usize::MAX {
                    return Err(Error::IndexOutOfRange {
                        edge: k,
                        node: g,
                        n_nodes: nodes.len(),
                    });
                }
                edge_nodes.push(l);
            }
            edge_offsets.push(edge_nodes.len());
        }
        let weights = self
            .weights
            .as_ref()
            .map(|w| edge_ids.iter().map(|&k| w[k]).collect());
        Ok(Self::from_parts(
            nodes.len(),
            edge_offsets,
            edge_nodes,
            weights,
        ))
    }

    /// Dense incidence matrix (rows = nodes, columns = hyperedges).
    pub fn incidence_matrix(&self) -> ndarray::Array2<f64> {
        let mut a = ndarray::Array2::zeros((self.n_nodes, self.n_edges()));
        for (k, edge) in self.edges().enumerate() {
            for &i in edge {
                a[[i, k]] = 1.0;
            }
        }
        a
    }
}

impl Incidence {
    fn build(n_nodes: usize, edge_offsets: &[usize], edge_nodes: &[usize]) -> Self {
        let mut counts = vec![0usize; n_nodes + 1];
        for &i in edge_nodes {
            counts[i + 1] += 1;
        }
        for i in 0..n_nodes {
            counts[i + 1] += counts[i];
        }
        let offsets = counts.clone();
        let mut cursor = counts;
        let mut edges = vec![0; edge_nodes.len()];
        for k in 0..edge_offsets.len() - 1 {
            for &i in &edge_nodes[edge_offsets[k]..edge_offsets[k + 1]] {
                edges[cursor[i]] = k;
                cursor[i] += 1;
            }
        }
        Self { offsets, edges }
    }
}
