//! Fixed-length rollout storage and finite-horizon advantage estimation.
//!
//! The advantage of a step is its discounted return to the end of its
//! episode segment minus the stored value baseline, bootstrapping with
//! the value of the cut state only when the segment was cut mid-episode.

#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub obs: Vec<f64>,
    pub action: Vec<usize>,
    pub log_prob: f64,
    pub reward: f64,
    pub value: f64,
    pub done: bool,
}

#[derive(Debug, Clone)]
pub struct RolloutBuffer {
    capacity: usize,
    transitions: Vec<Transition>,
}

impl RolloutBuffer {
    pub fn new(capacity: usize) -> Self {
        Self { capacity, transitions: Vec::with_capacity(capacity) }
    }

    pub fn push(&mut self, t: Transition) {
        assert!(self.transitions.len() < self.capacity, "rollout buffer overflow");
        self.transitions.push(t);
    }

    pub fn is_full(&self) -> bool {
        self.transitions.len() == self.capacity
    }

    pub fn len(&self) -> usize {
        self.transitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transitions.is_empty()
    }

    pub fn clear(&mut self) {
        self.transitions.clear();
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    /// Per-step advantages. `terminal_value` is the critic's estimate of
    /// the state following the last stored transition; it only enters
    /// when that transition did not end its episode.
    pub fn compute_advantages(&self, gamma: f64, terminal_value: f64) -> Vec<f64> {
        let n = self.transitions.len();
        let mut advantages = vec![0.0; n];
        let mut ret = terminal_value;
        for t in (0..n).rev() {
            let tr = &self.transitions[t];
            if tr.done {
                ret = 0.0;
            }
            ret = tr.reward + gamma * ret;
            advantages[t] = ret - tr.value;
        }
        advantages
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn tr(reward: f64, value: f64, done: bool) -> Transition {
        Transition { obs: vec![], action: vec![], log_prob: 0.0, reward, value, done }
    }

    /// Loop-free oracle: explicit discounted sum per step.
    fn brute_force(rewards: &[f64], values: &[f64], dones: &[bool], gamma: f64, terminal: f64) -> Vec<f64> {
        let n = rewards.len();
        (0..n)
            .map(|t| {
                let mut ret = 0.0;
                let mut k = 0;
                for u in t..n {
                    ret += gamma.powi(k) * rewards[u];
                    k += 1;
                    if dones[u] {
                        return ret - values[t];
                    }
                }
                ret + gamma.powi(k) * terminal - values[t]
            })
            .collect()
    }

    #[test]
    fn one_step_terminal() {
        let mut buf = RolloutBuffer::new(1);
        buf.push(tr(2.0, 1.0, true));
        assert_eq!(buf.compute_advantages(0.9, 99.0), vec![1.0]);
    }

    #[test]
    fn one_step_bootstrap() {
        let mut buf = RolloutBuffer::new(1);
        buf.push(tr(2.0, 1.0, false));
        assert_abs_diff_eq!(buf.compute_advantages(0.9, 3.0)[0], 3.7, epsilon = 1e-12);
    }

    #[test]
    fn scripted_episode_matches_oracle() {
        let rewards = [1.0, 0.0, 2.0];
        let values = [0.5, 0.2, 0.1];
        let gamma = 0.93;
        let mut buf = RolloutBuffer::new(3);
        for i in 0..3 {
            buf.push(tr(rewards[i], values[i], i == 2));
        }
        let adv = buf.compute_advantages(gamma, 0.0);
        let expected = brute_force(&rewards, &values, &[false, false, true], gamma, 0.0);
        for (a, e) in adv.iter().zip(&expected) {
            assert_abs_diff_eq!(*a, *e, epsilon = 1e-12);
        }
    }

    #[test]
    fn episode_boundary_cuts_accumulation() {
        // Two episodes in one buffer; rewards after a done flag must not
        // leak into earlier advantages.
        let rewards = [1.0, 5.0, 1.0, 1.0];
        let values = [0.0, 0.0, 0.0, 0.0];
        let dones = [false, true, false, false];
        let gamma = 0.9;
        let mut buf = RolloutBuffer::new(4);
        for i in 0..4 {
            buf.push(tr(rewards[i], values[i], dones[i]));
        }
        let adv = buf.compute_advantages(gamma, 2.0);
        let expected = brute_force(&rewards, &values, &dones, gamma, 2.0);
        for (a, e) in adv.iter().zip(&expected) {
            assert_abs_diff_eq!(*a, *e, epsilon = 1e-12);
        }
        // First episode's advantage only sees its own rewards.
        assert_abs_diff_eq!(adv[0], 1.0 + 0.9 * 5.0, epsilon = 1e-12);
    }

    #[test]
    fn advantages_linear_in_rewards() {
        let rewards = [1.0, -2.0, 0.5, 3.0];
        let mut a = RolloutBuffer::new(4);
        let mut b = RolloutBuffer::new(4);
        for (i, &r) in rewards.iter().enumerate() {
            a.push(tr(r, 0.0, i == 3));
            b.push(tr(2.0 * r, 0.0, i == 3));
        }
        let adv_a = a.compute_advantages(0.8, 0.0);
        let adv_b = b.compute_advantages(0.8, 0.0);
        for (x, y) in adv_a.iter().zip(&adv_b) {
            assert_abs_diff_eq!(*y, 2.0 * *x, epsilon = 1e-12);
        }
    }

    #[test]
    #[should_panic(expected = "overflow")]
    fn overfilling_panics() {
        let mut buf = RolloutBuffer::new(1);
        buf.push(tr(0.0, 0.0, false));
        buf.push(tr(0.0, 0.0, false));
    }
}
