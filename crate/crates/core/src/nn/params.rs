use std::collections::{BTreeMap, HashMap};

use ndarray::Array2;
use rand::Rng;

use super::graph::{Graph, Var};

/// Named parameter tensors with Adam optimizer state. Iteration order is
/// deterministic (sorted by name).
#[derive(Debug, Clone, Default)]
pub struct ParamStore {
    params: BTreeMap<String, Array2<f64>>,
    moment1: BTreeMap<String, Array2<f64>>,
    moment2: BTreeMap<String, Array2<f64>>,
    step: u64,
}

/// Adam hyperparameters and optional global-norm gradient clipping.
#[derive(Debug, Clone)]
pub struct AdamConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub max_grad_norm: Option<f64>,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self {
            lr: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            max_grad_norm: None,
        }
    }
}

impl ParamStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, name: &str, value: Array2<f64>) {
        self.params.insert(name.to_string(), value);
    }

    pub fn get(&self, name: &str) -> &Array2<f64> {
        self.params
            .get(name)
            .unwrap_or_else(|| panic!("unknown parameter {name}"))
    }

    pub fn get_mut(&mut self, name: &str) -> &mut Array2<f64> {
        self.params
            .get_mut(name)
            .unwrap_or_else(|| panic!("unknown parameter {name}"))
    }

    pub fn contains(&self, name: &str) -> bool {
        self.params.contains_key(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.params.keys().map(|s| s.as_str())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Array2<f64>)> {
        self.params.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    pub fn n_values(&self) -> usize {
        self.params.values().map(|v| v.len()).sum()
    }

    /// Euclidean norm over a gradient map, accumulated in name order so
    /// the result does not depend on map iteration order.
    pub fn global_grad_norm(grads: &HashMap<String, Array2<f64>>) -> f64 {
        let mut names: Vec<&String> = grads.keys().collect();
        names.sort();
        names
            .iter()
            .map(|name| grads[*name].iter().map(|x| x * x).sum::<f64>())
            .sum::<f64>()
            .sqrt()
    }

    /// One Adam update over all parameters present in `grads`, with global
    /// norm clipping applied first when configured.
    pub fn adam_step(&mut self, grads: &HashMap<String, Array2<f64>>, cfg: &AdamConfig) {
        let mut scale = 1.0;
        if let Some(max_norm) = cfg.max_grad_norm {
            let norm = Self::global_grad_norm(grads);
            if norm > max_norm && norm > 0.0 {
                scale = max_norm / norm;
            }
        }
        self.step += 1;
        let t = self.step as f64;
        let bc1 = 1.0 - cfg.beta1.powf(t);
        let bc2 = 1.0 - cfg.beta2.powf(t);
        for (name, grad) in grads {
            let Some(value) = self.params.get_mut(name) else {
                panic!("gradient for unknown parameter {name}");
            };
            let m = self
                .moment1
                .entry(name.clone())
                .or_insert_with(|| Array2::zeros(value.dim()));
            let v = self
                .moment2
                .entry(name.clone())
                .or_insert_with(|| Array2::zeros(value.dim()));
            for ((x, g), (mi, vi)) in value
                .iter_mut()
                .zip(grad.iter())
                .zip(m.iter_mut().zip(v.iter_mut()))
            {
                let g = g * scale;
                *mi = cfg.beta1 * *mi + (1.0 - cfg.beta1) * g;
                *vi = cfg.beta2 * *vi + (1.0 - cfg.beta2) * g * g;
                let m_hat = *mi / bc1;
                let v_hat = *vi / bc2;
                *x -= cfg.lr * m_hat / (v_hat.sqrt() + cfg.eps);
            }
        }
    }

    /// Resets optimizer state (moments and step), keeping parameter values.
    pub fn reset_optimizer(&mut self) {
        self.moment1.clear();
        self.moment2.clear();
        self.step = 0;
    }
}

/// Binds a stored parameter into a graph as a named leaf.
pub fn bind(g: &mut Graph, store: &ParamStore, name: &str) -> Var {
    g.param(name, store.get(name).clone())
}

/// Xavier-uniform initialization, bound ±sqrt(6/(fan_in+fan_out)).
pub fn xavier<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> Array2<f64> {
    let bound = (6.0 / (rows + cols) as f64).sqrt();
    Array2::from_shape_fn((rows, cols), |_| rng.gen_range(-bound..bound))
}

/// Zero-mean Gaussian initialization.
pub fn gaussian<R: Rng>(rng: &mut R, rows: usize, cols: usize, std: f64) -> Array2<f64> {
    use rand_distr::{Distribution, Normal};
    let dist = Normal::new(0.0, std).expect("valid std");
    Array2::from_shape_fn((rows, cols), |_| dist.sample(rng))
}

/// Linear warmup then constant: scales `base_lr` by min(1, step/warmup).
pub fn warmup_lr(base_lr: f64, step: u64, total_steps: u64, warmup_frac: f64) -> f64 {
    let warmup_steps = (total_steps as f64 * warmup_frac).ceil().max(1.0);
    base_lr * ((step as f64 + 1.0) / warmup_steps).min(1.0)
}
