use super::{Gradients, HyperGnnModel};

/// Adam over a fixed list of parameter blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct Adam {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    step: u64,
    m: Vec<Vec<f64>>,
    v: Vec<Vec<f64>>,
}

impl Adam {
    pub fn new(
        block_sizes: &[usize],
        learning_rate: f64,
        beta1: f64,
        beta2: f64,
        epsilon: f64,
    ) -> Self {
        Self {
            learning_rate,
            beta1,
            beta2,
            epsilon,
            step: 0,
            m: block_sizes.iter().map(|&n| vec![0.0; n]).collect(),
            v: block_sizes.iter().map(|&n| vec![0.0; n]).collect(),
        }
    }

    /// Blocks `σ, W0, W1` of `model`.
    pub fn for_model(
        model: &HyperGnnModel,
        learning_rate: f64,
        beta1: f64,
        beta2: f64,
        epsilon: f64,
    ) -> Self {
        let sizes = [model.embedding.len(), model.w0.len(), model.w1.len()];
        Self::new(&sizes, learning_rate, beta1, beta2, epsilon)
    }

    pub fn steps(&self) -> u64 {
        self.step
    }

    /// Starts a new step; call once before the step's [`Adam::update`]s.
    pub fn begin_step(&mut self) {
        self.step += 1;
    }

    /// Updates one block in place.
    pub fn update(&mut self, block: usize, params: &mut [f64], grads: &[f64]) {
        assert_eq!(
            params.len(),
            grads.len(),
            "parameter/gradient length mismatch"
        );
        assert!(self.step > 0, "begin_step not called");
        let t = self.step as i32;
        let c1 = 1.0 - self.beta1.powi(t);
        let c2 = 1.0 - self.beta2.powi(t);
        let (b1, b2, lr, eps) = (self.beta1, self.beta2, self.learning_rate, self.epsilon);
        let (m, v) = (&mut self.m[block], &mut self.v[block]);
        for (((w, &g), m), v) in params
            .iter_mut()
            .zip(grads)
            .zip(m.iter_mut())
            .zip(v.iter_mut())
        {
            *m = b1 * *m + (1.0 - b1) * g;
            *v = b2 * *v + (1.0 - b2) * g * g;
            *w -= lr * (*m / c1) / ((*v / c2).sqrt() + eps);
        }
    }

    /// One model update. Blocks listed in `frozen` (0 = σ, 1 = W0, 2 = W1)
    /// are left untouched, moments included.
    pub fn step(&mut self, model: &mut HyperGnnModel, grads: &Gradients, frozen: &[usize]) {
        self.begin_step();
        let params = [&mut model.embedding, &mut model.w0, &mut model.w1];
        let grads = [&grads.embedding, &grads.w0, &grads.w1];
        for (k, (param, grad)) in params.into_iter().zip(grads).enumerate() {
            if frozen.contains(&k) {
                continue;
            }
            let param = param.as_slice_mut().expect("parameters are contiguous");
            let grad = grad.as_slice().expect("gradients are contiguous");
            self.update(k, param, grad);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_step_moves_by_learning_rate() {
        let mut model = HyperGnnModel::with_width(3, 2, 0).unwrap();
        let before = model.clone();
        let mut g = Gradients::zeros_like(&model);
        g.embedding.fill(0.3);
        g.w0.fill(-5.0);
        let mut adam = Adam::for_model(&model, 0.01, 0.9, 0.999, 1e-8);
        adam.step(&mut model, &g, &[]);
        // bias-corrected first step is lr · sign(g) up to ε
        for (a, b) in model.embedding.iter().zip(before.embedding.iter()) {
            assert!((b - a - 0.01).abs() < 1e-6);
        }
        for (a, b) in model.w0.iter().zip(before.w0.iter()) {
            assert!((a - b - 0.01).abs() < 1e-6);
        }
        assert_eq!(model.w1, before.w1);
    }

    #[test]
    fn frozen_blocks_are_bitwise_unchanged() {
        let mut model = HyperGnnModel::with_width(5, 4, 1).unwrap();
        let before = model.clone();
        let mut g = Gradients::zeros_like(&model);
        g.embedding.fill(1.0);
        g.w0.fill(1.0);
        g.w1.fill(1.0);
        let mut adam = Adam::for_model(&model, 0.1, 0.9, 0.999, 1e-8);
        for _ in 0..5 {
            adam.step(&mut model, &g, &[1, 2]);
        }
        assert_eq!(model.w0, before.w0);
        assert_eq!(model.w1, before.w1);
        assert_ne!(model.embedding, before.embedding);
    }

    #[test]
    fn minimizes_a_quadratic() {
        // loss = Σ w², gradient 2w
        let mut model = HyperGnnModel::with_width(4, 2, 2).unwrap();
        let mut adam = Adam::for_model(&model, 0.05, 0.9, 0.999, 1e-8);
        for _ in 0..2000 {
            let g = Gradients {
                embedding: &model.embedding * 2.0,
                w0: &model.w0 * 2.0,
                w1: &model.w1 * 2.0,
            };
            adam.step(&mut model, &g, &[]);
        }
        assert!(model.embedding.iter().all(|v| v.abs() < 1e-2));
    }
}
