//! The episodic grid-world MDP: an AUV moves through a 3-D cell grid,
//! charges battery-less sensor nodes acoustically and collects their data
//! uplinks, under either a TDD (one node per slot, time-split) or FDD
//! (separate charging and uplink nodes, separate bands) regime.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::acoustics::{harvested_energy, received_level, AcousticConfig};
use crate::duplex::{BETA_HI, BETA_LO};
use crate::error::{Error, Result};
use crate::uplink::{required_energy_exact, UplinkConfig};

/// Geometry of the cell grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GridSpec {
    /// Cell counts along x, y, z.
    pub dims: [i64; 3],
    /// Spacing between adjacent cell centers, m.
    pub cell_size_m: f64,
    /// World coordinates of cell (0,0,0); only used when exporting traces.
    pub origin: [f64; 3],
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { dims: [10, 10, 4], cell_size_m: 100.0, origin: [0.0; 3] }
    }
}

impl GridSpec {
    pub fn cell_count(&self) -> i64 {
        self.dims[0] * self.dims[1] * self.dims[2]
    }

    pub fn contains(&self, cell: [i64; 3]) -> bool {
        (0..3).all(|i| cell[i] >= 0 && cell[i] < self.dims[i])
    }

    /// Grid center, flooring on even dimensions.
    pub fn center(&self) -> [i64; 3] {
        [self.dims[0] / 2, self.dims[1] / 2, self.dims[2] / 2]
    }

    /// Euclidean distance between two cell centers, m.
    pub fn distance_m(&self, a: [i64; 3], b: [i64; 3]) -> f64 {
        let dx = (a[0] - b[0]) as f64;
        let dy = (a[1] - b[1]) as f64;
        let dz = (a[2] - b[2]) as f64;
        self.cell_size_m * (dx * dx + dy * dy + dz * dz).sqrt()
    }
}

/// One of the six axis-aligned moves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    Right,
    Left,
    Up,
    Down,
    Forward,
    Backward,
}

impl Direction {
    pub const ALL: [Direction; 6] = [
        Direction::Right,
        Direction::Left,
        Direction::Up,
        Direction::Down,
        Direction::Forward,
        Direction::Backward,
    ];

    pub fn delta(self) -> [i64; 3] {
        match self {
            Direction::Right => [1, 0, 0],
            Direction::Left => [-1, 0, 0],
            Direction::Up => [0, 1, 0],
            Direction::Down => [0, -1, 0],
            Direction::Forward => [0, 0, 1],
            Direction::Backward => [0, 0, -1],
        }
    }

    pub fn index(self) -> usize {
        Self::ALL.iter().position(|&d| d == self).unwrap()
    }

    pub fn from_index(i: usize) -> Option<Direction> {
        Self::ALL.get(i).copied()
    }
}

/// An AUV decision for one slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Action {
    /// Move, then serve one node with a time-split slot.
    Tdd { direction: Direction, node: usize },
    /// Move, then charge `wet_node` on the charging band while
    /// `uplink_node` transmits on the data band.
    Fdd { direction: Direction, wet_node: usize, uplink_node: usize },
}

impl Action {
    pub fn direction(&self) -> Direction {
        match *self {
            Action::Tdd { direction, .. } | Action::Fdd { direction, .. } => direction,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum DuplexMode {
    #[default]
    Tdd,
    Fdd,
}

/// Penalty magnitudes; the location penalty dominates the largest
/// possible base term so that leaving the grid is never worthwhile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Penalties {
    pub loc: f64,
    pub wrong_indice: f64,
    pub occ: f64,
    pub no_indices: f64,
    pub only_charging: f64,
    pub only_transmitting: f64,
}

impl Default for Penalties {
    fn default() -> Self {
        Self {
            loc: 50.0,
            wrong_indice: 20.0,
            occ: 10.0,
            no_indices: 5.0,
            only_charging: 10.0,
            only_transmitting: 5.0,
        }
    }
}

/// Environment configuration; defaults follow the reference scenario
/// (10x10x4 grid of 100 m cells, 2500 s navigation, 25 s slots).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EnvConfig {
    pub mode: DuplexMode,
    pub k_nodes: usize,
    pub grid: GridSpec,
    pub acoustic: AcousticConfig,
    pub uplink: UplinkConfig,
    /// Nominal TDD time split; clamped to the operating interval.
    pub beta_nominal: f64,
    /// When set, a TDD slot on a fully charged node skips charging and
    /// spends the whole slot on the uplink (the beta = 0 case).
    pub adaptive_tdd: bool,
    pub penalties: Penalties,
    /// Node battery capacity, J.
    pub e_cap: f64,
    /// Node battery charge at reset, J.
    pub initial_energy: f64,
    /// AoI ceiling.
    pub a_max: u32,
    /// Steps per episode; total navigation time / slot duration.
    pub horizon_steps: u32,
    /// Fixed node cells; when absent, placement is sampled from the seed.
    pub node_positions: Option<Vec<[i64; 3]>>,
    /// Per-node importance weights; all 1 when absent.
    pub node_weights: Option<Vec<f64>>,
}

impl Default for EnvConfig {
    fn default() -> Self {
        Self {
            mode: DuplexMode::Tdd,
            k_nodes: 3,
            grid: GridSpec::default(),
            acoustic: AcousticConfig::default(),
            uplink: UplinkConfig::default(),
            beta_nominal: 0.5,
            adaptive_tdd: false,
            penalties: Penalties::default(),
            e_cap: 2000.0,
            initial_energy: 0.0,
            a_max: 50,
            horizon_steps: 100,
            node_positions: None,
            node_weights: None,
        }
    }
}

impl EnvConfig {
    pub fn validate(&self) -> Result<()> {
        self.acoustic.validate()?;
        self.uplink.validate()?;
        if self.k_nodes == 0 {
            return Err(Error::Config("need at least one node".into()));
        }
        if self.k_nodes as i64 >= self.grid.cell_count() {
            return Err(Error::Config(format!(
                "{} nodes do not fit a grid of {} cells (one cell is reserved for the AUV start)",
                self.k_nodes,
                self.grid.cell_count()
            )));
        }
        if let Some(pos) = &self.node_positions {
            if pos.len() != self.k_nodes {
                return Err(Error::Config(format!(
                    "node_positions has {} entries for k_nodes = {}",
                    pos.len(),
                    self.k_nodes
                )));
            }
            for &p in pos {
                if !self.grid.contains(p) {
                    return Err(Error::Config(format!("node position {p:?} outside grid")));
                }
            }
        }
        if let Some(w) = &self.node_weights {
            if w.len() != self.k_nodes {
                return Err(Error::Config("node_weights length mismatch".into()));
            }
        }
        if self.e_cap <= 0.0 || self.initial_energy < 0.0 || self.initial_energy > self.e_cap {
            return Err(Error::Config("energy bounds inconsistent".into()));
        }
        if self.a_max < 1 || self.horizon_steps == 0 {
            return Err(Error::Config("a_max and horizon_steps must be >= 1".into()));
        }
        Ok(())
    }

    /// Nominal split clamped to the operating interval.
    pub fn beta(&self) -> f64 {
        self.beta_nominal.clamp(BETA_LO, BETA_HI)
    }
}

/// Per-node dynamic state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeState {
    pub position: [i64; 3],
    pub aoi: u32,
    pub energy: f64,
    /// Successful data collections so far.
    pub collected_count: u32,
    /// Times this node was picked as the uplink target (success or not).
    pub selected_count: u32,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvState {
    pub auv_pos: [i64; 3],
    pub nodes: Vec<NodeState>,
    pub t: u32,
    pub horizon_steps: u32,
}

/// Immediate reward, split into its components.
/// `total = base - (rho_location + rho_information + rho_occurrence)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RewardBreakdown {
    pub base: f64,
    pub rho_location: f64,
    pub rho_information: f64,
    pub rho_occurrence: f64,
    pub total: f64,
}

/// Side information about one transition, for metrics and traces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepInfo {
    /// Energy actually credited to node batteries this slot, J.
    pub harvested_j: f64,
    /// Node that successfully uplinked, if any.
    pub uplink_success: Option<usize>,
    /// Whether the attempted move would have left the grid.
    pub out_of_bounds: bool,
}

pub struct StepOutcome {
    pub observation: Vec<f64>,
    pub reward: RewardBreakdown,
    pub info: StepInfo,
    pub done: bool,
}

/// Jain's fairness index of a collection-count vector. Defined as 1 for
/// the all-zero vector: before any collection there is no discrimination.
pub fn jain_index(counts: &[u32]) -> f64 {
    let k = counts.len() as f64;
    let sum: f64 = counts.iter().map(|&c| c as f64).sum();
    let sum_sq: f64 = counts.iter().map(|&c| (c as f64) * (c as f64)).sum();
    if sum_sq == 0.0 {
        return 1.0;
    }
    sum * sum / (k * sum_sq)
}

/// One environment instance. Node placement is fixed at construction
/// (from config or the seed); `reset` restores the initial state without
/// re-placing nodes, so an experiment keeps one topology per seed.
pub struct Env {
    config: EnvConfig,
    initial_nodes: Vec<NodeState>,
    state: EnvState,
    done: bool,
}

impl Env {
    pub fn new(config: EnvConfig, seed: u64) -> Result<Self> {
        config.validate()?;
        let center = config.grid.center();
        let positions = match &config.node_positions {
            Some(p) => p.clone(),
            None => {
                let mut cells: Vec<[i64; 3]> = Vec::with_capacity(config.grid.cell_count() as usize);
                for x in 0..config.grid.dims[0] {
                    for y in 0..config.grid.dims[1] {
                        for z in 0..config.grid.dims[2] {
                            let c = [x, y, z];
                            if c != center {
                                cells.push(c);
                            }
                        }
                    }
                }
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let (chosen, _) = cells.partial_shuffle(&mut rng, config.k_nodes);
                chosen.to_vec()
            }
        };
        let weights = config
            .node_weights
            .clone()
            .unwrap_or_else(|| vec![1.0; config.k_nodes]);
        let initial_nodes: Vec<NodeState> = positions
            .into_iter()
            .zip(weights)
            .map(|(position, weight)| NodeState {
                position,
                aoi: 1,
                energy: config.initial_energy,
                collected_count: 0,
                selected_count: 0,
                weight,
            })
            .collect();
        let state = EnvState {
            auv_pos: center,
            nodes: initial_nodes.clone(),
            t: 0,
            horizon_steps: config.horizon_steps,
        };
        Ok(Self { config, initial_nodes, state, done: false })
    }

    pub fn config(&self) -> &EnvConfig {
        &self.config
    }

    pub fn state(&self) -> &EnvState {
        &self.state
    }

    pub fn is_done(&self) -> bool {
        self.done
    }

    /// Restore the initial state (same node placement) and return the
    /// initial observation.
    pub fn reset(&mut self) -> Vec<f64> {
        self.state = EnvState {
            auv_pos: self.config.grid.center(),
            nodes: self.initial_nodes.clone(),
            t: 0,
            horizon_steps: self.config.horizon_steps,
        };
        self.done = false;
        self.observe()
    }

    /// Flat observation in [0,1]: normalized AUV cell, then per-node
    /// AoI / a_max and energy / e_cap. Length `3 + 2K`.
    pub fn observe(&self) -> Vec<f64> {
        let mut obs = Vec::with_capacity(3 + 2 * self.config.k_nodes);
        for i in 0..3 {
            obs.push(self.state.auv_pos[i] as f64 / self.config.grid.dims[i] as f64);
        }
        for node in &self.state.nodes {
            obs.push(node.aoi as f64 / self.config.a_max as f64);
        }
        for node in &self.state.nodes {
            obs.push(node.energy / self.config.e_cap);
        }
        obs
    }

    pub fn obs_dim(&self) -> usize {
        3 + 2 * self.config.k_nodes
    }

    /// Arity of each action head in the order the policy emits them.
    pub fn action_arities(&self) -> Vec<usize> {
        match self.config.mode {
            DuplexMode::Tdd => vec![6, self.config.k_nodes],
            DuplexMode::Fdd => vec![6, self.config.k_nodes, self.config.k_nodes],
        }
    }

    pub fn decode_action(&self, indices: &[usize]) -> Result<Action> {
        let arities = self.action_arities();
        if indices.len() != arities.len() || indices.iter().zip(&arities).any(|(&i, &a)| i >= a) {
            return Err(Error::Domain(format!(
                "action indices {indices:?} invalid for arities {arities:?}"
            )));
        }
        let direction = Direction::from_index(indices[0]).unwrap();
        Ok(match self.config.mode {
            DuplexMode::Tdd => Action::Tdd { direction, node: indices[1] },
            DuplexMode::Fdd => {
                Action::Fdd { direction, wet_node: indices[1], uplink_node: indices[2] }
            }
        })
    }

    fn validate_action(&self, action: &Action) -> Result<()> {
        let k = self.config.k_nodes;
        let ok = match (*action, self.config.mode) {
            (Action::Tdd { node, .. }, DuplexMode::Tdd) => node < k,
            (Action::Fdd { wet_node, uplink_node, .. }, DuplexMode::Fdd) => {
                wet_node < k && uplink_node < k
            }
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "action {action:?} does not match mode {:?} / k = {k}",
                self.config.mode
            )))
        }
    }

    fn distance_to_node(&self, k: usize) -> f64 {
        self.config.grid.distance_m(self.state.auv_pos, self.state.nodes[k].position)
    }

    /// Frequency the uplink runs on: TDD shares the charging band, FDD
    /// has its own.
    fn f_uplink(&self) -> f64 {
        match self.config.mode {
            DuplexMode::Tdd => self.config.acoustic.f_charging_khz,
            DuplexMode::Fdd => self.config.acoustic.f_data_khz,
        }
    }

    /// Exact uplink energy for node `k` from the current AUV position,
    /// with `beta` of the slot given to charging.
    pub fn node_required_energy(&self, k: usize, beta: f64) -> Result<f64> {
        let f_data = self.f_uplink();
        required_energy_exact(
            self.distance_to_node(k),
            beta,
            f_data,
            &self.config.uplink,
            &self.config.acoustic,
        )
    }

    /// Advance one slot. Movement is applied first; link distances use
    /// the post-move position.
    pub fn step(&mut self, action: &Action) -> Result<StepOutcome> {
        if self.done {
            return Err(Error::EpisodeDone);
        }
        self.validate_action(action)?;

        let p = self.config.penalties.clone();
        let mut rho_location = 0.0;
        let mut rho_information = 0.0;
        let mut rho_occurrence = 0.0;
        let mut harvested_j = 0.0;
        let mut uplink_success: Option<usize> = None;

        // Movement; an attempted exit leaves the position unchanged.
        let delta = action.direction().delta();
        let candidate = [
            self.state.auv_pos[0] + delta[0],
            self.state.auv_pos[1] + delta[1],
            self.state.auv_pos[2] + delta[2],
        ];
        let out_of_bounds = !self.config.grid.contains(candidate);
        if out_of_bounds {
            rho_location = p.loc;
        } else {
            self.state.auv_pos = candidate;
        }

        let tau = self.config.uplink.tau_s;
        let acfg = &self.config.acoustic;
        let f_wet = acfg.f_charging_khz;

        // Energy deltas per node, applied together with the AoI update.
        let k_count = self.config.k_nodes;
        let mut energy_delta = vec![0.0f64; k_count];

        match *action {
            Action::Tdd { node, .. } => {
                let beta = self.config.beta();
                let d = self.distance_to_node(node);
                let lb = received_level(d, f_wet, acfg)?;
                let stored = self.state.nodes[node].energy;
                self.state.nodes[node].selected_count += 1;
                if self.config.adaptive_tdd && stored >= self.config.e_cap {
                    // Battery already full: whole slot on the uplink (beta = 0).
                    let e_req = self.node_required_energy(node, 0.0)?;
                    if stored >= e_req {
                        energy_delta[node] = -e_req;
                        uplink_success = Some(node);
                    }
                    rho_information = p.only_transmitting;
                } else {
                    let e_r = harvested_energy(lb.p_harv, beta * tau)?;
                    let e_req = self.node_required_energy(node, beta)?;
                    if stored + e_r >= e_req {
                        energy_delta[node] = e_r - e_req;
                        uplink_success = Some(node);
                        harvested_j += self.credited(node, e_r);
                    } else {
                        // Uplink unaffordable: escalate to a full charging slot.
                        let e_full = harvested_energy(lb.p_harv, tau)?;
                        energy_delta[node] = e_full;
                        harvested_j += self.credited(node, e_full);
                        rho_information = p.only_charging;
                    }
                }
            }
            Action::Fdd { wet_node, uplink_node, .. } => {
                // Charging band: full slot for the chosen node.
                let d_wet = self.distance_to_node(wet_node);
                let lb = received_level(d_wet, f_wet, acfg)?;
                let e_r = harvested_energy(lb.p_harv, tau)?;
                energy_delta[wet_node] += e_r;
                harvested_j += self.credited(wet_node, e_r);

                // Data band: full slot for the chosen uplink, if affordable.
                let feasible: Vec<usize> = (0..k_count)
                    .filter(|&k| {
                        self.node_required_energy(k, 0.0)
                            .map(|e| self.state.nodes[k].energy >= e)
                            .unwrap_or(false)
                    })
                    .collect();
                self.state.nodes[uplink_node].selected_count += 1;
                if feasible.is_empty() {
                    rho_information = p.no_indices;
                } else if !feasible.contains(&uplink_node) {
                    rho_information = p.wrong_indice;
                } else {
                    let e_req = self.node_required_energy(uplink_node, 0.0)?;
                    energy_delta[uplink_node] -= e_req;
                    uplink_success = Some(uplink_node);
                }
            }
        }

        // AoI dichotomy and the energy ledger.
        for k in 0..k_count {
            let node = &mut self.state.nodes[k];
            if uplink_success == Some(k) {
                node.aoi = 1;
                node.collected_count += 1;
            } else {
                node.aoi = (node.aoi + 1).min(self.config.a_max);
            }
            node.energy = (node.energy + energy_delta[k]).clamp(0.0, self.config.e_cap);
        }

        // Occurrence penalty for an over-served uplink target.
        let uplink_target = match *action {
            Action::Tdd { node, .. } => node,
            Action::Fdd { uplink_node, .. } => uplink_node,
        };
        let fair_share = self.config.horizon_steps as f64 / k_count as f64;
        if self.state.nodes[uplink_target].selected_count as f64 > fair_share {
            rho_occurrence = p.occ;
        }

        self.state.t += 1;
        self.done = self.state.t == self.config.horizon_steps;

        let counts: Vec<u32> = self.state.nodes.iter().map(|n| n.collected_count).collect();
        let discrimination = 1.0 - jain_index(&counts);
        let weighted_aoi: f64 =
            self.state.nodes.iter().map(|n| n.weight * n.aoi as f64).sum();
        let base = -(discrimination / k_count as f64) * weighted_aoi;
        let total = base - (rho_location + rho_information + rho_occurrence);

        Ok(StepOutcome {
            observation: self.observe(),
            reward: RewardBreakdown { base, rho_location, rho_information, rho_occurrence, total },
            info: StepInfo { harvested_j, uplink_success, out_of_bounds },
            done: self.done,
        })
    }

    /// Portion of `e_r` that actually fits in node `k`'s battery.
    fn credited(&self, k: usize, e_r: f64) -> f64 {
        e_r.min(self.config.e_cap - self.state.nodes[k].energy).max(0.0)
    }
}
