//! Seeded runs: roll baselines or train-then-evaluate PPO, one metrics
//! row per (seed, policy) cell, with schema-stable CSV output.

use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use super::config::ExperimentConfig;
use crate::env::Env;
use crate::error::{Error, Result};
use crate::policies::{Greedy, Policy, RandomWalk, RoundRobin};
use crate::ppo::{evaluate_episode, train, EpisodeLog, EpisodeMetricsAccumulator};

/// One evaluated episode for one seed.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRow {
    pub seed: u64,
    pub policy: String,
    pub log: EpisodeLog,
    /// Fairness fell below the configured floor (reported, not enforced).
    pub jain_below_min: bool,
}

/// Instantiate a baseline by name. PPO is handled separately because it
/// trains before it acts.
pub fn make_policy(name: &str, seed: u64) -> Result<Box<dyn Policy>> {
    match name {
        "rw" => Ok(Box::new(RandomWalk::new(ChaCha8Rng::seed_from_u64(seed)))),
        "rr" => Ok(Box::new(RoundRobin::new())),
        "ga" => Ok(Box::new(Greedy::new())),
        other => Err(Error::Config(format!("unknown baseline policy {other:?}"))),
    }
}

/// Roll one full episode under `policy`, starting from a reset.
pub fn rollout_policy(env: &mut Env, policy: &mut dyn Policy) -> Result<EpisodeLog> {
    env.reset();
    let mut metrics = EpisodeMetricsAccumulator::default();
    loop {
        let decision = policy.decide(env)?;
        let out = env.step(&decision.action)?;
        metrics.record(env, &out.reward, out.info.harvested_j);
        if out.done {
            break;
        }
    }
    Ok(metrics.finish(0, env))
}

/// Run the configured policy over every seed. Rows come back in seed
/// order; identical config and seeds give identical rows.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<MetricsRow>> {
    config.validate()?;
    let mut rows = Vec::with_capacity(config.seeds.len());
    for &seed in &config.seeds {
        let mut env = Env::new(config.env.clone(), seed)?;
        let log = match config.policy.as_str() {
            "ppo" => {
                let hp = config.hyperparams();
                let result = train(&mut env, &hp, seed)?;
                evaluate_episode(&mut env, &result.network, 0)?
            }
            name => {
                let mut policy = make_policy(name, seed)?;
                rollout_policy(&mut env, policy.as_mut())?
            }
        };
        rows.push(MetricsRow {
            seed,
            policy: config.policy.clone(),
            jain_below_min: log.jain < config.jain_min,
            log,
        });
    }
    Ok(rows)
}

fn fmt_f(v: f64) -> String {
    format!("{v:.6}")
}

/// Fixed-schema CSV for a set of metric rows.
pub fn metrics_csv(rows: &[MetricsRow]) -> String {
    let mut out = String::from(
        "seed,policy,cumulative_reward,mean_aoi,harvested_j,jain,\
         penalty_location,penalty_information,penalty_occurrence,jain_below_min\n",
    );
    for row in rows {
        let l = &row.log;
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            row.seed,
            row.policy,
            fmt_f(l.cumulative_reward),
            fmt_f(l.mean_aoi),
            fmt_f(l.harvested_j),
            fmt_f(l.jain),
            fmt_f(l.penalty_location),
            fmt_f(l.penalty_information),
            fmt_f(l.penalty_occurrence),
            row.jain_below_min,
        )
        .unwrap();
    }
    out
}

/// One episode as line-delimited JSON records: step index, AUV cell,
/// the action taken, per-node AoI/energy after the step, and the reward
/// breakdown. One line per step.
pub fn trace_episode(env: &mut Env, policy: &mut dyn Policy) -> Result<String> {
    env.reset();
    let mut out = String::new();
    let mut step = 0u32;
    loop {
        let decision = policy.decide(env)?;
        let outcome = env.step(&decision.action)?;
        let nodes: Vec<serde_json::Value> = env
            .state()
            .nodes
            .iter()
            .map(|n| json!({ "aoi": n.aoi, "energy": n.energy }))
            .collect();
        let record = json!({
            "step": step,
            "auv_pos": env.state().auv_pos,
            "action": decision.action,
            "nodes": nodes,
            "reward": outcome.reward,
        });
        out.push_str(&serde_json::to_string(&record).map_err(|e| Error::Serde(e.to_string()))?);
        out.push('\n');
        step += 1;
        if outcome.done {
            break;
        }
    }
    Ok(out)
}

/// FNV-1a, for artifact fingerprints in the run manifest.
fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash
}

/// JSON manifest echoing the config and fingerprinting the artifacts.
pub fn run_manifest(config: &ExperimentConfig, artifacts: &[(&str, &str)]) -> Result<String> {
    let manifest = json!({
        "config": serde_json::to_value(config).map_err(|e| Error::Serde(e.to_string()))?,
        "seeds": config.seeds,
        "artifacts": artifacts
            .iter()
            .map(|(name, content)| {
                json!({
                    "name": name,
                    "bytes": content.len(),
                    "fnv1a": format!("{:016x}", fnv1a(content.as_bytes())),
                })
            })
            .collect::<Vec<_>>(),
    });
    serde_json::to_string_pretty(&manifest).map_err(|e| Error::Serde(e.to_string()))
}
