use ndarray::{Array2, ArrayView2, ArrayViewMut2};
use serde::{Deserialize, Serialize};

use super::Hypergraph;

/// Which normalized adjacency the convolution layers propagate with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OperatorVariant {
    /// `D_v^{-1/2} (A D̃_e^{-1} Aᵀ - diag) D_v^{-1/2}` with `D̃_e = D_e - I`.
    /// Zero diagonal, and reduces to the normalized graph adjacency on graphs.
    #[default]
    Modified,
    /// `D_v^{-1/2} A D_e^{-1} Aᵀ D_v^{-1/2}`, self-contributions included.
    Standard,
}

impl OperatorVariant {
    pub fn as_u8(self) -> u8 {
        match self {
            OperatorVariant::Modified => 0,
            OperatorVariant::Standard => 1,
        }
    }

    pub fn from_u8(v: u8) -> Option<Self> {
        match v {
            0 => Some(OperatorVariant::Modified),
            1 => Some(OperatorVariant::Standard),
            _ => None,
        }
    }
}

/// Sparse symmetric N×N propagation matrix in compressed-row form.
#[derive(Debug, Clone, PartialEq)]
pub struct PropagationOperator {
    n: usize,
    variant: OperatorVariant,
    row_offsets: Vec<usize>,
    cols: Vec<usize>,
    values: Vec<f64>,
}

impl PropagationOperator {
    /// Builds the operator. Single-node hyperedges are ignored (their reduced
    /// degree would be zero) and degree-0 nodes get an all-zero row.
    pub fn new(h: &Hypergraph, variant: OperatorVariant) -> Self {
        let n = h.n_nodes();
        let clean = h.without_singletons();
        let inv_sqrt_degree: Vec<f64> = (0..n)
            .map(|i| match clean.degree(i) {
                0 => 0.0,
                d => 1.0 / (d as f64).sqrt(),
            })
            .collect();

        let mut row_offsets = Vec::with_capacity(n + 1);
        row_offsets.push(0);
        let mut cols = Vec::new();
        let mut values = Vec::new();
        let mut acc = vec![0.0f64; n];
        let mut touched: Vec<usize> = Vec::new();
        for i in 0..n {
            for &k in clean.incident_edges(i) {
                let edge = clean.edge(k);
                let coef = match variant {
                    OperatorVariant::Modified => 1.0 / (edge.len() - 1) as f64,
                    OperatorVariant::Standard => 1.0 / edge.len() as f64,
                };
                for &j in edge {
                    if variant == OperatorVariant::Modified && j == i {
                        continue;
                    }
                    if acc[j] == 0.0 {
                        touched.push(j);
                    }
                    acc[j] += coef;
                }
            }
            touched.sort_unstable();
            for &j in &touched {
                cols.push(j);
                // one product of the two scale factors keeps P exactly symmetric
                values.push(acc[j] * (inv_sqrt_degree[i] * inv_sqrt_degree[j]));
                acc[j] = 0.0;
            }
            touched.clear();
            row_offsets.push(cols.len());
        }
        Self {
            n,
            variant,
            row_offsets,
            cols,
            values,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn variant(&self) -> OperatorVariant {
        self.variant
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Column indices and values of row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let r = self.row_offsets[i]..self.row_offsets[i + 1];
        (&self.cols[r.clone()], &self.values[r])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        cols.binary_search(&j).map_or(0.0, |pos| vals[pos])
    }

    pub fn to_dense(&self) -> Array2<f64> {
        let mut dense = Array2::zeros((self.n, self.n));
        for i in 0..self.n {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                dense[[i, j]] = v;
            }
        }
        dense
    }

    /// `P · x` for a dense `n × c` matrix.
    pub fn apply(&self, x: ArrayView2<'_, f64>) -> Array2<f64> {
        let mut out = Array2::zeros((self.n, x.ncols()));
        self.apply_into(x, out.view_mut());
        out
    }

    pub fn apply_into(&self, x: ArrayView2<'_, f64>, mut out: ArrayViewMut2<'_, f64>) {
        assert_eq!(x.nrows(), self.n, "operator/input row mismatch");
        for i in 0..self.n {
            let (cols, vals) = self.row(i);
            let mut out_row = out.row_mut(i);
            out_row.fill(0.0);
            for (&j, &v) in cols.iter().zip(vals) {
                out_row.scaled_add(v, &x.row(j));
            }
        }
    }
}
