//! The clipped-surrogate PPO objective and its analytic gradient.
//!
//! The scalar being minimized over a minibatch is
//! `mean[-min(r A, clip(r, 1-eps, 1+eps) A) + c1 (V - V_targ)^2 - c2 S]`
//! with `r = exp(logp_new - logp_old)` and `S` the sum of head entropies.

use serde::{Deserialize, Serialize};

use super::net::Network;
use crate::error::{Error, Result};

/// One training sample, frozen at collection time.
#[derive(Debug, Clone)]
pub struct Sample {
    pub obs: Vec<f64>,
    pub action: Vec<usize>,
    pub old_log_prob: f64,
    pub advantage: f64,
    pub value_target: f64,
}

pub type Minibatch = [Sample];

/// Hyperparameters that enter the loss itself.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossCoeffs {
    pub clip_epsilon: f64,
    pub c1_value: f64,
    pub c2_entropy: f64,
}

/// Diagnostics from one loss evaluation.
#[derive(Debug, Clone, Copy, Default)]
pub struct LossStats {
    pub loss: f64,
    pub mean_ratio: f64,
    pub clip_fraction: f64,
    pub mean_entropy: f64,
    pub value_loss: f64,
}

/// Evaluate the minibatch loss and accumulate its gradient.
pub fn ppo_loss(
    net: &Network,
    batch: &Minibatch,
    coeffs: &LossCoeffs,
) -> Result<(LossStats, Vec<f64>)> {
    if batch.is_empty() {
        return Err(Error::Domain("empty minibatch".into()));
    }
    let n = batch.len() as f64;
    let eps = coeffs.clip_epsilon;
    let mut grad = vec![0.0; net.shape.param_count()];
    let mut stats = LossStats::default();

    for sample in batch {
        let cache = net.forward(&sample.obs)?;
        let logp = cache.log_prob(&sample.action);
        let ratio = (logp - sample.old_log_prob).exp();
        let adv = sample.advantage;

        let unclipped = ratio * adv;
        let clipped = ratio.clamp(1.0 - eps, 1.0 + eps) * adv;
        let surrogate = unclipped.min(clipped);

        // Gradient of the surrogate w.r.t. the ratio: zero when the
        // clipped branch is strictly smaller and the clamp is saturated.
        let d_sur_d_ratio = if unclipped <= clipped {
            adv
        } else if (1.0 - eps..=1.0 + eps).contains(&ratio) {
            adv
        } else {
            0.0
        };

        let entropy = cache.entropy();
        let v_err = cache.value - sample.value_target;

        stats.loss += (-surrogate + coeffs.c1_value * v_err * v_err
            - coeffs.c2_entropy * entropy)
            / n;
        stats.mean_ratio += ratio / n;
        stats.mean_entropy += entropy / n;
        stats.value_loss += v_err * v_err / n;
        if (ratio - 1.0).abs() > eps {
            stats.clip_fraction += 1.0 / n;
        }

        // d loss / d logp = -d_sur_d_ratio * ratio (chain through exp).
        let d_logp = -d_sur_d_ratio * ratio / n;
        let d_value = 2.0 * coeffs.c1_value * v_err / n;

        let d_logits: Vec<Vec<f64>> = cache
            .head_probs
            .iter()
            .zip(&sample.action)
            .map(|(p, &a)| {
                let h: f64 = -p.iter().filter(|&&x| x > 0.0).map(|&x| x * x.ln()).sum::<f64>();
                p.iter()
                    .enumerate()
                    .map(|(i, &pi)| {
                        // log-prob term: (onehot - p).
                        let d_from_logp = d_logp * (if i == a { 1.0 - pi } else { -pi });
                        // entropy bonus term: dH/dz_i = -p_i (ln p_i + H).
                        let d_from_ent = -coeffs.c2_entropy / n * (-pi * (pi.ln() + h));
                        d_from_logp + d_from_ent
                    })
                    .collect()
            })
            .collect();

        net.backward(&cache, &d_logits, d_value, &mut grad);
    }

    if !stats.loss.is_finite() {
        return Err(Error::Diverged(format!("non-finite loss: {:?}", stats)));
    }
    Ok((stats, grad))
}
