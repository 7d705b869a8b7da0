//! Baseline controllers behind the same interface the learned policy
//! uses. The published benchmarks name the schedules (random walk, round
//! robin, greedy) but not their movement rules; the readings here are the
//! minimal ones: RW wanders, RR chases its scheduled node, greedy parks
//! at the node centroid and serves the hungriest feasible node.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::env::{Action, Direction, DuplexMode, Env};
use crate::error::Result;

/// An action plus, for stochastic policies, the log-probability it was
/// sampled with.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolicyDecision {
    pub action: Action,
    pub log_prob: Option<f64>,
}

/// Anything that can drive an environment.
pub trait Policy {
    fn decide(&mut self, env: &Env) -> Result<PolicyDecision>;
}

/// Uniform random direction and node choice(s).
pub struct RandomWalk {
    rng: ChaCha8Rng,
}

impl RandomWalk {
    pub fn new(rng: ChaCha8Rng) -> Self {
        Self { rng }
    }
}

impl Policy for RandomWalk {
    fn decide(&mut self, env: &Env) -> Result<PolicyDecision> {
        let k = env.config().k_nodes;
        let direction = Direction::ALL[self.rng.random_range(0..6)];
        let action = match env.config().mode {
            DuplexMode::Tdd => Action::Tdd { direction, node: self.rng.random_range(0..k) },
            DuplexMode::Fdd => Action::Fdd {
                direction,
                wet_node: self.rng.random_range(0..k),
                uplink_node: self.rng.random_range(0..k),
            },
        };
        Ok(PolicyDecision { action, log_prob: None })
    }
}

/// Serves node `t mod K`, moving one step toward it each slot.
pub struct RoundRobin {
    t: usize,
}

impl RoundRobin {
    pub fn new() -> Self {
        Self { t: 0 }
    }
}

impl Default for RoundRobin {
    fn default() -> Self {
        Self::new()
    }
}

/// Single-step move that reduces Euclidean distance from `from` to
/// `target`, preferring the axis order x, y, z on ties. `None` when
/// already at the target cell.
fn step_toward(from: [i64; 3], target: [i64; 3]) -> Option<Direction> {
    let diff = [target[0] - from[0], target[1] - from[1], target[2] - from[2]];
    let mut axis = 0;
    for i in 1..3 {
        if diff[i].abs() > diff[axis].abs() {
            axis = i;
        }
    }
    if diff[axis] == 0 {
        return None;
    }
    Some(match (axis, diff[axis] > 0) {
        (0, true) => Direction::Right,
        (0, false) => Direction::Left,
        (1, true) => Direction::Up,
        (1, false) => Direction::Down,
        (2, true) => Direction::Forward,
        (2, false) => Direction::Backward,
        _ => unreachable!(),
    })
}

impl Policy for RoundRobin {
    fn decide(&mut self, env: &Env) -> Result<PolicyDecision> {
        let k = env.config().k_nodes;
        let uplink = self.t % k;
        let next = (self.t + 1) % k;
        let nodes = &env.state().nodes;
        // When already on the target cell, head for the next scheduled node.
        let direction = step_toward(env.state().auv_pos, nodes[uplink].position)
            .or_else(|| step_toward(env.state().auv_pos, nodes[next].position))
            .unwrap_or(Direction::Right);
        let action = match env.config().mode {
            DuplexMode::Tdd => Action::Tdd { direction, node: uplink },
            DuplexMode::Fdd => Action::Fdd { direction, wet_node: next, uplink_node: uplink },
        };
        self.t += 1;
        Ok(PolicyDecision { action, log_prob: None })
    }
}

/// Parks near the node centroid; uplinks the feasible node with the
/// largest AoI (lowest index on ties), falling back to the nearest node
/// when nothing can afford its packet. FDD charges the emptiest battery.
pub struct Greedy;

impl Greedy {
    pub fn new() -> Self {
        Self
    }
}

impl Policy for Greedy {
    fn decide(&mut self, env: &Env) -> Result<PolicyDecision> {
        let nodes = &env.state().nodes;
        let k = env.config().k_nodes;
        let pos = env.state().auv_pos;

        // Nearest grid cell to the node centroid.
        let centroid_cell: [i64; 3] = {
            let mut c = [0i64; 3];
            for i in 0..3 {
                let mean = nodes.iter().map(|n| n.position[i] as f64).sum::<f64>() / k as f64;
                c[i] = mean.round() as i64;
            }
            c
        };
        // There is no stay action, so parking means bouncing one cell out
        // and back; pick the first in-bounds direction for the out leg.
        let direction = step_toward(pos, centroid_cell).unwrap_or_else(|| {
            Direction::ALL
                .into_iter()
                .find(|d| {
                    let delta = d.delta();
                    env.config().grid.contains([
                        pos[0] + delta[0],
                        pos[1] + delta[1],
                        pos[2] + delta[2],
                    ])
                })
                .unwrap_or(Direction::Right)
        });

        let beta = env.config().beta();
        let feasible: Vec<usize> = (0..k)
            .filter(|&i| {
                env.node_required_energy(i, beta)
                    .map(|e| nodes[i].energy >= e)
                    .unwrap_or(false)
            })
            .collect();
        let hungriest = |candidates: &mut dyn Iterator<Item = usize>| {
            candidates.max_by(|&a, &b| {
                nodes[a]
                    .aoi
                    .cmp(&nodes[b].aoi)
                    .then(b.cmp(&a)) // lower index wins ties
            })
        };
        let uplink = hungriest(&mut feasible.iter().copied()).unwrap_or_else(|| {
            // Nothing can transmit yet: keep charging the hungriest node
            // so service rotates instead of pinning one battery.
            hungriest(&mut (0..k)).unwrap()
        });

        let action = match env.config().mode {
            DuplexMode::Tdd => Action::Tdd { direction, node: uplink },
            DuplexMode::Fdd => {
                let wet = (0..k)
                    .min_by(|&a, &b| nodes[a].energy.partial_cmp(&nodes[b].energy).unwrap())
                    .unwrap();
                Action::Fdd { direction, wet_node: wet, uplink_node: uplink }
            }
        };
        Ok(PolicyDecision { action, log_prob: None })
    }
}
