//! The training loop: collect fixed-length rollouts from the
//! environment, turn them into advantage-weighted minibatches and run a
//! few epochs of clipped-surrogate updates after every fill.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::adam::Adam;
use super::buffer::{RolloutBuffer, Transition};
use super::loss::{ppo_loss, LossCoeffs, Sample};
use super::net::{NetShape, Network};
use crate::env::{DuplexMode, Env};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PpoHyperparams {
    pub gamma: f64,
    pub alpha: f64,
    pub c1: f64,
    pub c2: f64,
    pub epsilon: f64,
    pub n_steps: usize,
    pub batch_size: usize,
    pub epochs_per_update: usize,
    pub max_episodes: usize,
    /// Global gradient-norm ceiling; keeps the large-magnitude value
    /// errors from saturating the shared trunk.
    pub max_grad_norm: f64,
}

impl Default for PpoHyperparams {
    fn default() -> Self {
        // The TDD column of the reference hyperparameter table.
        Self {
            gamma: 0.93,
            alpha: 3e-4,
            c1: 0.5,
            c2: 0.01,
            epsilon: 0.2,
            n_steps: 100,
            batch_size: 100,
            epochs_per_update: 10,
            max_episodes: 2000,
            max_grad_norm: 0.5,
        }
    }
}

impl PpoHyperparams {
    /// The FDD column: slightly lower discount, larger step size.
    pub fn fdd() -> Self {
        Self { gamma: 0.92, alpha: 5e-4, ..Self::default() }
    }

    pub fn for_mode(mode: DuplexMode) -> Self {
        match mode {
            DuplexMode::Tdd => Self::default(),
            DuplexMode::Fdd => Self::fdd(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0 < self.gamma && self.gamma < 1.0) {
            return Err(Error::Config(format!("gamma must be in (0,1), got {}", self.gamma)));
        }
        if self.epsilon <= 0.0 || self.alpha <= 0.0 {
            return Err(Error::Config("epsilon and alpha must be positive".into()));
        }
        if self.max_grad_norm <= 0.0 {
            return Err(Error::Config("max_grad_norm must be positive".into()));
        }
        if self.n_steps == 0 || self.batch_size == 0 || self.batch_size > self.n_steps {
            return Err(Error::Config(format!(
                "need 0 < batch_size <= n_steps, got {} / {}",
                self.batch_size, self.n_steps
            )));
        }
        Ok(())
    }

    fn coeffs(&self) -> LossCoeffs {
        LossCoeffs { clip_epsilon: self.epsilon, c1_value: self.c1, c2_entropy: self.c2 }
    }
}

/// Per-episode aggregates recorded during training and evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeLog {
    pub episode: usize,
    pub cumulative_reward: f64,
    /// Time-average over steps of the per-step mean node AoI.
    pub mean_aoi: f64,
    /// Energy credited to node batteries over the episode, J.
    pub harvested_j: f64,
    /// Jain fairness of the final collection counts.
    pub jain: f64,
    pub penalty_location: f64,
    pub penalty_information: f64,
    pub penalty_occurrence: f64,
}

/// Streams step outcomes into an [`EpisodeLog`].
#[derive(Debug, Default)]
pub struct EpisodeMetricsAccumulator {
    steps: usize,
    reward: f64,
    aoi_sum: f64,
    harvested: f64,
    p_loc: f64,
    p_info: f64,
    p_occ: f64,
}

impl EpisodeMetricsAccumulator {
    pub fn record(&mut self, env: &Env, reward: &crate::env::RewardBreakdown, harvested_j: f64) {
        self.steps += 1;
        self.reward += reward.total;
        let nodes = &env.state().nodes;
        self.aoi_sum +=
            nodes.iter().map(|n| n.aoi as f64).sum::<f64>() / nodes.len() as f64;
        self.harvested += harvested_j;
        self.p_loc += reward.rho_location;
        self.p_info += reward.rho_information;
        self.p_occ += reward.rho_occurrence;
    }

    pub fn finish(self, episode: usize, env: &Env) -> EpisodeLog {
        let counts: Vec<u32> =
            env.state().nodes.iter().map(|n| n.collected_count).collect();
        EpisodeLog {
            episode,
            cumulative_reward: self.reward,
            mean_aoi: self.aoi_sum / self.steps.max(1) as f64,
            harvested_j: self.harvested,
            jain: crate::env::jain_index(&counts),
            penalty_location: self.p_loc,
            penalty_information: self.p_info,
            penalty_occurrence: self.p_occ,
        }
    }
}

pub struct TrainResult {
    pub network: Network,
    pub log: Vec<EpisodeLog>,
}

/// Running scale for the critic head. The raw returns sit hundreds of
/// reward units below zero while Adam moves each parameter at most
/// ~`alpha` per step, so a critic regressing raw returns cannot reach
/// them within a training budget. The head therefore predicts targets in
/// normalized units and is denormalized on read.
#[derive(Debug, Clone, Copy)]
struct ValueScale {
    mean: f64,
    std: f64,
    initialized: bool,
}

impl ValueScale {
    fn new() -> Self {
        Self { mean: 0.0, std: 1.0, initialized: false }
    }

    fn denormalize(&self, v: f64) -> f64 {
        self.mean + self.std * v
    }

    fn normalize(&self, v: f64) -> f64 {
        (v - self.mean) / self.std
    }

    /// Fold one batch of raw value targets into the running statistics.
    fn update(&mut self, targets: &[f64]) {
        let n = targets.len() as f64;
        let mean = targets.iter().sum::<f64>() / n;
        let var = targets.iter().map(|t| (t - mean) * (t - mean)).sum::<f64>() / n;
        let std = var.sqrt().max(1e-4);
        if self.initialized {
            self.mean = 0.99 * self.mean + 0.01 * mean;
            self.std = 0.99 * self.std + 0.01 * std;
        } else {
            self.mean = mean;
            self.std = std;
            self.initialized = true;
        }
    }
}

/// Mean-zero unit-variance normalization, guarded for tiny batches.
fn normalize(advantages: &mut [f64]) {
    let n = advantages.len() as f64;
    let mean = advantages.iter().sum::<f64>() / n;
    let var = advantages.iter().map(|a| (a - mean) * (a - mean)).sum::<f64>() / n;
    let std = (var + 1e-8).sqrt();
    for a in advantages {
        *a = (*a - mean) / std;
    }
}

/// Train a fresh network on `env` for `hp.max_episodes` episodes.
/// Deterministic in (`env` construction, `seed`).
pub fn train(env: &mut Env, hp: &PpoHyperparams, seed: u64) -> Result<TrainResult> {
    hp.validate()?;
    let shape = NetShape::new(env.obs_dim(), env.action_arities());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut net = Network::init(shape.clone(), &mut rng);
    let mut opt = Adam::new(hp.alpha, shape.param_count());
    let mut buffer = RolloutBuffer::new(hp.n_steps);
    let mut log = Vec::with_capacity(hp.max_episodes);
    let coeffs = hp.coeffs();
    let mut scale = ValueScale::new();

    for episode in 0..hp.max_episodes {
        let mut obs = env.reset();
        let mut metrics = EpisodeMetricsAccumulator::default();
        loop {
            let cache = net.forward(&obs)?;
            let action_idx = cache.sample(&mut rng);
            let action = env.decode_action(&action_idx)?;
            let out = env.step(&action)?;
            metrics.record(env, &out.reward, out.info.harvested_j);
            buffer.push(Transition {
                obs: obs.clone(),
                log_prob: cache.log_prob(&action_idx),
                action: action_idx,
                reward: out.reward.total,
                value: scale.denormalize(cache.value),
                done: out.done,
            });
            obs = out.observation;

            if buffer.is_full() {
                let terminal_value = if buffer.transitions().last().unwrap().done {
                    0.0
                } else {
                    scale.denormalize(net.forward(&obs)?.value)
                };
                update(&mut net, &mut opt, &buffer, hp, &coeffs, terminal_value, &mut scale, &mut rng)?;
                buffer.clear();
            }
            if out.done {
                break;
            }
        }
        log.push(metrics.finish(episode, env));
    }

    Ok(TrainResult { network: net, log })
}

fn update(
    net: &mut Network,
    opt: &mut Adam,
    buffer: &RolloutBuffer,
    hp: &PpoHyperparams,
    coeffs: &LossCoeffs,
    terminal_value: f64,
    scale: &mut ValueScale,
    rng: &mut ChaCha8Rng,
) -> Result<()> {
    let mut advantages = buffer.compute_advantages(hp.gamma, terminal_value);
    let targets: Vec<f64> = buffer
        .transitions()
        .iter()
        .zip(&advantages)
        .map(|(t, a)| t.value + a)
        .collect();
    scale.update(&targets);
    normalize(&mut advantages);

    let samples: Vec<Sample> = buffer
        .transitions()
        .iter()
        .zip(advantages.iter().zip(&targets))
        .map(|(t, (&adv, &target))| Sample {
            obs: t.obs.clone(),
            action: t.action.clone(),
            old_log_prob: t.log_prob,
            advantage: adv,
            value_target: scale.normalize(target),
        })
        .collect();

    let mut order: Vec<usize> = (0..samples.len()).collect();
    for _ in 0..hp.epochs_per_update {
        order.shuffle(rng);
        for chunk in order.chunks(hp.batch_size) {
            let batch: Vec<Sample> = chunk.iter().map(|&i| samples[i].clone()).collect();
            let (stats, mut grad) = ppo_loss(net, &batch, coeffs)?;
            if !stats.loss.is_finite() {
                return Err(Error::Diverged(format!("loss {:?}", stats.loss)));
            }
            let norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
            if norm > hp.max_grad_norm {
                let scale = hp.max_grad_norm / norm;
                for g in &mut grad {
                    *g *= scale;
                }
            }
            opt.step(&mut net.params, &grad);
        }
    }
    Ok(())
}

/// Roll one greedy (argmax) episode with a trained network.
pub fn evaluate_episode(env: &mut Env, net: &Network, episode: usize) -> Result<EpisodeLog> {
    let mut obs = env.reset();
    let mut metrics = EpisodeMetricsAccumulator::default();
    loop {
        let cache = net.forward(&obs)?;
        let action = env.decode_action(&cache.argmax())?;
        let out = env.step(&action)?;
        metrics.record(env, &out.reward, out.info.harvested_j);
        obs = out.observation;
        if out.done {
            break;
        }
    }
    Ok(metrics.finish(episode, env))
}

/// On-disk snapshot of a trained policy; loads only into an environment
/// with matching observation and action shapes.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Checkpoint {
    pub version: u32,
    pub mode: DuplexMode,
    pub k_nodes: usize,
    pub shape: NetShape,
    pub params: Vec<f64>,
    pub hyperparams: PpoHyperparams,
}

impl Checkpoint {
    pub const VERSION: u32 = 1;

    pub fn new(env: &Env, net: &Network, hp: &PpoHyperparams) -> Self {
        Self {
            version: Self::VERSION,
            mode: env.config().mode,
            k_nodes: env.config().k_nodes,
            shape: net.shape.clone(),
            params: net.params.clone(),
            hyperparams: hp.clone(),
        }
    }

    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        let json = serde_json::to_string(self).map_err(|e| Error::Serde(e.to_string()))?;
        std::fs::write(path, json)?;
        Ok(())
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let json = std::fs::read_to_string(path)?;
        let ckpt: Checkpoint =
            serde_json::from_str(&json).map_err(|e| Error::Serde(e.to_string()))?;
        if ckpt.version != Self::VERSION {
            return Err(Error::Config(format!("unsupported checkpoint version {}", ckpt.version)));
        }
        if ckpt.params.len() != ckpt.shape.param_count() {
            return Err(Error::Config("checkpoint parameter count mismatch".into()));
        }
        Ok(ckpt)
    }

    /// Reconstruct the network after checking it matches `env`.
    pub fn into_network(self, env: &Env) -> Result<Network> {
        if self.mode != env.config().mode
            || self.k_nodes != env.config().k_nodes
            || self.shape.obs_dim != env.obs_dim()
            || self.shape.head_arities != env.action_arities()
        {
            return Err(Error::Config(
                "checkpoint does not match the environment configuration".into(),
            ));
        }
        Ok(Network { shape: self.shape, params: self.params })
    }
}
