//! The actor-critic network: two 64-unit tanh layers shared by all
//! heads, one softmax head per action dimension and a linear value head.
//! Parameters live in one flat vector so the optimizer and the
//! finite-difference checks can treat them uniformly.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const HIDDEN: usize = 64;

/// Layer shapes; fixes every parameter offset in the flat vector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetShape {
    pub obs_dim: usize,
    pub head_arities: Vec<usize>,
    pub hidden: usize,
}

impl NetShape {
    pub fn new(obs_dim: usize, head_arities: Vec<usize>) -> Self {
        Self { obs_dim, head_arities, hidden: HIDDEN }
    }

    fn w1_len(&self) -> usize {
        self.hidden * self.obs_dim
    }

    fn w2_len(&self) -> usize {
        self.hidden * self.hidden
    }

    pub fn param_count(&self) -> usize {
        let heads: usize = self.head_arities.iter().map(|a| a * self.hidden + a).sum();
        self.w1_len() + self.hidden + self.w2_len() + self.hidden + heads + self.hidden + 1
    }

    /// Offset of head `i`'s weight block.
    fn head_offset(&self, i: usize) -> usize {
        let mut off = self.w1_len() + self.hidden + self.w2_len() + self.hidden;
        for a in &self.head_arities[..i] {
            off += a * self.hidden + a;
        }
        off
    }

    fn value_offset(&self) -> usize {
        self.head_offset(self.head_arities.len())
    }
}

/// Activations cached by one forward pass, enough to backpropagate.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    pub obs: Vec<f64>,
    pub h1: Vec<f64>,
    pub h2: Vec<f64>,
    /// Per-head probability vectors; each sums to 1.
    pub head_probs: Vec<Vec<f64>>,
    pub value: f64,
}

impl ForwardCache {
    /// Joint log-probability of an action, one index per head.
    pub fn log_prob(&self, action: &[usize]) -> f64 {
        self.head_probs
            .iter()
            .zip(action)
            .map(|(p, &a)| p[a].ln())
            .sum()
    }

    /// Sum of per-head entropies.
    pub fn entropy(&self) -> f64 {
        self.head_probs
            .iter()
            .map(|p| -p.iter().filter(|&&x| x > 0.0).map(|&x| x * x.ln()).sum::<f64>())
            .sum()
    }

    /// Sample one index per head.
    pub fn sample(&self, rng: &mut ChaCha8Rng) -> Vec<usize> {
        self.head_probs
            .iter()
            .map(|p| {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                for (i, &pi) in p.iter().enumerate() {
                    acc += pi;
                    if u < acc {
                        return i;
                    }
                }
                p.len() - 1
            })
            .collect()
    }

    /// Most probable index per head.
    pub fn argmax(&self) -> Vec<usize> {
        self.head_probs
            .iter()
            .map(|p| {
                p.iter()
                    .enumerate()
                    .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
                    .map(|(i, _)| i)
                    .unwrap()
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Network {
    pub shape: NetShape,
    pub params: Vec<f64>,
}

fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|&z| (z - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

impl Network {
    /// All parameters zero: uniform heads, zero value.
    pub fn zeros(shape: NetShape) -> Self {
        let params = vec![0.0; shape.param_count()];
        Self { shape, params }
    }

    /// Uniform +-1/sqrt(fan_in) init; head weights scaled down so the
    /// initial policy is near-uniform.
    pub fn init(shape: NetShape, rng: &mut ChaCha8Rng) -> Self {
        let mut net = Self::zeros(shape);
        let s = net.shape.clone();
        let mut fill = |range: std::ops::Range<usize>, scale: f64, rng: &mut ChaCha8Rng| {
            for i in range {
                net.params[i] = rng.random_range(-scale..scale);
            }
        };
        let mut off = 0;
        let w1_scale = 1.0 / (s.obs_dim as f64).sqrt();
        fill(off..off + s.w1_len(), w1_scale, rng);
        off += s.w1_len() + s.hidden; // biases stay zero
        let w2_scale = 1.0 / (s.hidden as f64).sqrt();
        fill(off..off + s.w2_len(), w2_scale, rng);
        off += s.w2_len() + s.hidden;
        for &arity in &s.head_arities {
            fill(off..off + arity * s.hidden, 0.01 * w2_scale, rng);
            off += arity * s.hidden + arity;
        }
        fill(off..off + s.hidden, w2_scale, rng);
        net
    }

    pub fn forward(&self, obs: &[f64]) -> Result<ForwardCache> {
        let s = &self.shape;
        if obs.len() != s.obs_dim {
            return Err(Error::Shape(format!(
                "observation length {} != expected {}",
                obs.len(),
                s.obs_dim
            )));
        }
        let p = &self.params;
        let mut off = 0;

        let mut h1 = vec![0.0; s.hidden];
        for (i, h) in h1.iter_mut().enumerate() {
            let row = &p[off + i * s.obs_dim..off + (i + 1) * s.obs_dim];
            let pre: f64 = row.iter().zip(obs).map(|(w, x)| w * x).sum::<f64>()
                + p[off + s.w1_len() + i];
            *h = pre.tanh();
        }
        off += s.w1_len() + s.hidden;

        let mut h2 = vec![0.0; s.hidden];
        for (i, h) in h2.iter_mut().enumerate() {
            let row = &p[off + i * s.hidden..off + (i + 1) * s.hidden];
            let pre: f64 = row.iter().zip(&h1).map(|(w, x)| w * x).sum::<f64>()
                + p[off + s.w2_len() + i];
            *h = pre.tanh();
        }
        off += s.w2_len() + s.hidden;

        let mut head_probs = Vec::with_capacity(s.head_arities.len());
        for &arity in &s.head_arities {
            let mut logits = vec![0.0; arity];
            for (j, z) in logits.iter_mut().enumerate() {
                let row = &p[off + j * s.hidden..off + (j + 1) * s.hidden];
                *z = row.iter().zip(&h2).map(|(w, x)| w * x).sum::<f64>()
                    + p[off + arity * s.hidden + j];
            }
            head_probs.push(softmax(&logits));
            off += arity * s.hidden + arity;
        }

        let vrow = &p[off..off + s.hidden];
        let value = vrow.iter().zip(&h2).map(|(w, x)| w * x).sum::<f64>() + p[off + s.hidden];

        Ok(ForwardCache { obs: obs.to_vec(), h1, h2, head_probs, value })
    }

    /// Backpropagate gradients of a scalar objective given its partials
    /// with respect to each head's logits and the value output,
    /// accumulating into `grad` (same layout as `params`).
    pub fn backward(&self, cache: &ForwardCache, d_logits: &[Vec<f64>], d_value: f64, grad: &mut [f64]) {
        let s = &self.shape;
        let p = &self.params;
        let mut dh2 = vec![0.0; s.hidden];

        // Heads.
        let mut off = s.w1_len() + s.hidden + s.w2_len() + s.hidden;
        for (h, &arity) in d_logits.iter().zip(&s.head_arities) {
            for (j, &dz) in h.iter().enumerate() {
                let w_off = off + j * s.hidden;
                for i in 0..s.hidden {
                    grad[w_off + i] += dz * cache.h2[i];
                    dh2[i] += p[w_off + i] * dz;
                }
                grad[off + arity * s.hidden + j] += dz;
            }
            off += arity * s.hidden + arity;
        }

        // Value head.
        let v_off = s.value_offset();
        for i in 0..s.hidden {
            grad[v_off + i] += d_value * cache.h2[i];
            dh2[i] += p[v_off + i] * d_value;
        }
        grad[v_off + s.hidden] += d_value;

        // Trunk layer 2.
        let w2_off = s.w1_len() + s.hidden;
        let mut dh1 = vec![0.0; s.hidden];
        for i in 0..s.hidden {
            let dpre = dh2[i] * (1.0 - cache.h2[i] * cache.h2[i]);
            let row = w2_off + i * s.hidden;
            for j in 0..s.hidden {
                grad[row + j] += dpre * cache.h1[j];
                dh1[j] += p[row + j] * dpre;
            }
            grad[w2_off + s.w2_len() + i] += dpre;
        }

        // Trunk layer 1.
        for i in 0..s.hidden {
            let dpre = dh1[i] * (1.0 - cache.h1[i] * cache.h1[i]);
            let row = i * s.obs_dim;
            for j in 0..s.obs_dim {
                grad[row + j] += dpre * cache.obs[j];
            }
            grad[s.w1_len() + i] += dpre;
        }
    }
}
