//! Two-layer hypergraph convolutional network
//!
//! ```text
//! p = head(P · ReLU(P · σ · W0) · W1)
//! ```
//!
//! with a trainable input embedding `σ` (N × f), `W0` (f × f/2) and `W1`
//! (f/2 × out). Binary problems use a single sigmoid output. Problems over
//! `v + 1` ordered values use a softmax over `v + 1` outputs and report the
//! expected value `p_i = Σ_j q_ij d_j`.
//!
//! Gradients are computed by hand. The backward pass uses `Pᵀ = P`, which
//! holds exactly for every operator built by [`PropagationOperator::new`].

mod adam;
mod checkpoint;
mod train;

use ndarray::{Array1, Array2, ArrayView2, Axis, Zip};
use rand::Rng;

use crate::error::{Error, Result};
use crate::hypergraph::{OperatorVariant, PropagationOperator};
use crate::problems::Domain;
use crate::rng::seeded;

pub use adam::Adam;
pub use checkpoint::{load_checkpoint, read_checkpoint, save_checkpoint, write_checkpoint};
#[cfg(test)]
pub(crate) use train::full_gradient;
pub(crate) use train::{finish, Plateau};
pub use train::{
    max_pairwise_distance, train, train_with, transfer, EarlyStop, SmoothingTrace, TrainConfig,
    TrainOutcome, TrainReport,
};

/// Default feature width: `ceil(√n)` rounded up to the next even number.
pub fn default_width(n: usize) -> usize {
    let mut f = (n as f64).sqrt().ceil() as usize;
    // guard against sqrt rounding just below an exact square
    while f * f < n {
        f += 1;
    }
    f = f.max(2);
    f + f % 2
}

#[derive(Debug, Clone, PartialEq)]
pub enum Head {
    Sigmoid,
    /// Softmax over the listed ordered values.
    Softmax(Vec<i64>),
}

impl Head {
    pub fn outputs(&self) -> usize {
        match self {
            Head::Sigmoid => 1,
            Head::Softmax(values) => values.len(),
        }
    }

    pub fn for_domain(domain: &Domain) -> Self {
        if domain.is_binary() {
            Head::Sigmoid
        } else {
            Head::Softmax(domain.values().to_vec())
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HyperGnnModel {
    pub(crate) embedding: Array2<f64>,
    pub(crate) w0: Array2<f64>,
    pub(crate) w1: Array2<f64>,
    pub(crate) head: Head,
    pub(crate) variant: OperatorVariant,
}

/// Intermediate values of one forward pass.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    /// `P σ`
    pub agg1: Array2<f64>,
    /// `(P σ) W0`
    pub conv1: Array2<f64>,
    /// `ReLU(conv1)`
    pub hidden: Array2<f64>,
    /// `P · hidden`
    pub agg2: Array2<f64>,
    /// `agg2 · W1`, pre-activation logits
    pub conv2: Array2<f64>,
    /// Softmax probabilities (empty for the sigmoid head).
    pub probs: Array2<f64>,
    /// Node outputs.
    pub p: Vec<f64>,
}

/// Parameter gradients, shaped like the model.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub embedding: Array2<f64>,
    pub w0: Array2<f64>,
    pub w1: Array2<f64>,
}

impl Gradients {
    pub fn zeros_like(model: &HyperGnnModel) -> Self {
        Self {
            embedding: Array2::zeros(model.embedding.raw_dim()),
            w0: Array2::zeros(model.w0.raw_dim()),
            w1: Array2::zeros(model.w1.raw_dim()),
        }
    }

    pub fn add_assign(&mut self, other: &Gradients) {
        self.embedding += &other.embedding;
        self.w0 += &other.w0;
        self.w1 += &other.w1;
    }

    pub fn len(&self) -> usize {
        self.embedding.len() + self.w0.len() + self.w1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Row-major concatenation `σ, W0, W1`.
    pub fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.len());
        out.extend(self.embedding.iter());
        out.extend(self.w0.iter());
        out.extend(self.w1.iter());
        out
    }

    /// Inverse of [`Gradients::flatten`] for a model of `model`'s shape.
    pub fn unflatten(model: &HyperGnnModel, flat: &[f64]) -> Result<Self> {
        let mut g = Self::zeros_like(model);
        if flat.len() != g.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} gradient entries for a model with {} parameters",
                flat.len(),
                g.len()
            )));
        }
        let (a, rest) = flat.split_at(g.embedding.len());
        let (b, c) = rest.split_at(g.w0.len());
        for (dst, src) in [(&mut g.embedding, a), (&mut g.w0, b), (&mut g.w1, c)] {
            dst.iter_mut().zip(src).for_each(|(d, s)| *d = *s);
        }
        Ok(g)
    }

    pub fn zero_weights(&mut self) {
        self.w0.fill(0.0);
        self.w1.fill(0.0);
    }

    pub fn max_abs(&self) -> f64 {
        self.embedding
            .iter()
            .chain(self.w0.iter())
            .chain(self.w1.iter())
            .fold(0.0, |m, v| m.max(v.abs()))
    }
}

fn uniform(rows: usize, cols: usize, bound: f64, rng: &mut impl Rng) -> Array2<f64> {
    Array2::from_shape_fn((rows, cols), |_| rng.gen_range(-bound..=bound))
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

impl HyperGnnModel {
    /// Binary model with the default width.
    pub fn new(n: usize, seed: u64) -> Result<Self> {
        Self::with_width(n, default_width(n), seed)
    }

    pub fn with_width(n: usize, f: usize, seed: u64) -> Result<Self> {
        Self::build(n, f, Head::Sigmoid, seed)
    }

    /// Model whose head matches `domain` (sigmoid for `{0, 1}`).
    pub fn for_domain(n: usize, f: Option<usize>, domain: &Domain, seed: u64) -> Result<Self> {
        Self::build(
            n,
            f.unwrap_or_else(|| default_width(n)),
            Head::for_domain(domain),
            seed,
        )
    }

    fn build(n: usize, f: usize, head: Head, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument(
                "model needs at least one node".into(),
            ));
        }
        if f < 2 || !f.is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!(
                "feature width must be even and at least 2, got {f}"
            )));
        }
        if let Head::Softmax(values) = &head {
            if values.len() < 2 {
                return Err(Error::InvalidArgument(
                    "softmax head needs two values".into(),
                ));
            }
        }
        let hidden = f / 2;
        let mut rng = seeded(seed);
        let embedding = uniform(n, f, 1.0 / (f as f64).sqrt(), &mut rng);
        let w0 = uniform(f, hidden, 1.0 / (f as f64).sqrt(), &mut rng);
        let w1 = uniform(
            hidden,
            head.outputs(),
            1.0 / (hidden as f64).sqrt(),
            &mut rng,
        );
        Ok(Self {
            embedding,
            w0,
            w1,
            head,
            variant: OperatorVariant::Modified,
        })
    }

    /// Replaces every parameter; shapes must match the current ones.
    pub fn set_parameters(
        &mut self,
        embedding: Array2<f64>,
        w0: Array2<f64>,
        w1: Array2<f64>,
    ) -> Result<()> {
        if embedding.dim() != self.embedding.dim()
            || w0.dim() != self.w0.dim()
            || w1.dim() != self.w1.dim()
        {
            return Err(Error::ShapeMismatch(
                "parameter shapes differ from the model".into(),
            ));
        }
        self.embedding = embedding;
        self.w0 = w0;
        self.w1 = w1;
        Ok(())
    }

    pub fn with_variant(mut self, variant: OperatorVariant) -> Self {
        self.variant = variant;
        self
    }

    pub fn n(&self) -> usize {
        self.embedding.nrows()
    }

    pub fn width(&self) -> usize {
        self.embedding.ncols()
    }

    pub fn hidden(&self) -> usize {
        self.w0.ncols()
    }

    pub fn head(&self) -> &Head {
        &self.head
    }

    pub fn variant(&self) -> OperatorVariant {
        self.variant
    }

    pub fn embedding(&self) -> &Array2<f64> {
        &self.embedding
    }

    pub fn w0(&self) -> &Array2<f64> {
        &self.w0
    }

    pub fn w1(&self) -> &Array2<f64> {
        &self.w1
    }

    pub fn parameter_count(&self) -> usize {
        self.embedding.len() + self.w0.len() + self.w1.len()
    }

    fn check_operator(&self, op: &PropagationOperator) -> Result<()> {
        if op.n() != self.n() {
            return Err(Error::DimensionMismatch(format!(
                "operator is {}×{}, model has {} nodes",
                op.n(),
                op.n(),
                self.n()
            )));
        }
        Ok(())
    }

    pub fn forward(&self, op: &PropagationOperator) -> Result<ForwardCache> {
        self.check_operator(op)?;
        Ok(self.forward_from(op, self.embedding.view()))
    }

    /// Forward pass over a subset of nodes: `embedding` holds their rows of
    /// `σ` and `op` is a propagation operator in the same local indexing.
    pub fn forward_with(
        &self,
        op: &PropagationOperator,
        embedding: ArrayView2<'_, f64>,
    ) -> Result<ForwardCache> {
        if op.n() != embedding.nrows() || embedding.ncols() != self.width() {
            return Err(Error::DimensionMismatch(format!(
                "operator over {} nodes, embedding is {}×{}",
                op.n(),
                embedding.nrows(),
                embedding.ncols()
            )));
        }
        Ok(self.forward_from(op, embedding))
    }

    fn forward_from(
        &self,
        op: &PropagationOperator,
        embedding: ArrayView2<'_, f64>,
    ) -> ForwardCache {
        let agg1 = op.apply(embedding);
        let conv1 = agg1.dot(&self.w0);
        let hidden = conv1.mapv(|v| v.max(0.0));
        let agg2 = op.apply(hidden.view());
        let conv2 = agg2.dot(&self.w1);
        let (p, probs) = match &self.head {
            Head::Sigmoid => (
                conv2.column(0).iter().map(|&z| sigmoid(z)).collect(),
                Array2::zeros((0, 0)),
            ),
            Head::Softmax(values) => {
                let mut probs = conv2.clone();
                for mut row in probs.rows_mut() {
                    let m = row.fold(f64::NEG_INFINITY, |a, &b| a.max(b));
                    row.mapv_inplace(|z| (z - m).exp());
                    let s = row.sum();
                    row /= s;
                }
                let d = Array1::from_iter(values.iter().map(|&v| v as f64));
                (probs.dot(&d).to_vec(), probs)
            }
        };
        ForwardCache {
            agg1,
            conv1,
            hidden,
            agg2,
            conv2,
            probs,
            p,
        }
    }

    /// Node outputs only.
    pub fn predict(&self, op: &PropagationOperator) -> Result<Vec<f64>> {
        Ok(self.forward(op)?.p)
    }

    /// Reverse-mode gradients of `L(p)` given `upstream = ∂L/∂p`, for the
    /// nodes and operator the cache was computed on. The embedding gradient
    /// has one row per node of the cache.
    pub fn backward(
        &self,
        op: &PropagationOperator,
        cache: &ForwardCache,
        upstream: &[f64],
    ) -> Result<Gradients> {
        if op.n() != cache.p.len() || upstream.len() != cache.p.len() {
            return Err(Error::DimensionMismatch(format!(
                "operator over {} nodes, forward over {}, upstream gradient over {}",
                op.n(),
                cache.p.len(),
                upstream.len()
            )));
        }
        let mut d_conv2 = Array2::zeros(cache.conv2.raw_dim());
        match &self.head {
            Head::Sigmoid => {
                for (i, &g) in upstream.iter().enumerate() {
                    let p = cache.p[i];
                    d_conv2[[i, 0]] = g * p * (1.0 - p);
                }
            }
            Head::Softmax(values) => {
                for (i, &g) in upstream.iter().enumerate() {
                    for (j, &d) in values.iter().enumerate() {
                        let q = cache.probs[[i, j]];
                        d_conv2[[i, j]] = g * q * (d as f64 - cache.p[i]);
                    }
                }
            }
        }
        let w1 = cache.agg2.t().dot(&d_conv2);
        let d_agg2 = d_conv2.dot(&self.w1.t());
        let mut d_conv1 = op.apply(d_agg2.view());
        Zip::from(&mut d_conv1).and(&cache.conv1).for_each(|d, &z| {
            if z <= 0.0 {
                *d = 0.0;
            }
        });
        let w0 = cache.agg1.t().dot(&d_conv1);
        let d_agg1 = d_conv1.dot(&self.w0.t());
        let embedding = op.apply(d_agg1.view());
        Ok(Gradients { embedding, w0, w1 })
    }

    /// Copy of the rows of `σ` for `nodes`, in order.
    pub fn embedding_rows(&self, nodes: &[usize]) -> Array2<f64> {
        self.embedding.select(Axis(0), nodes)
    }
}
