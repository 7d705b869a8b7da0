//! End-to-end acceptance gates, one per test. Each prints a single
//! pass/fail line; a failed gate also fails the test.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use auvsim::acoustics::AcousticConfig;
use auvsim::duplex::{g_of_beta, solve_beta_star, tdd_feasible, BetaStar, BETA_HI, BETA_LO};
use auvsim::env::{Action, Direction, DuplexMode, Env, EnvConfig};
use auvsim::harness::{metrics_csv, reference_energy_table, run_experiment, ExperimentConfig};
use auvsim::ppo::{
    ppo_loss, train, LossCoeffs, NetShape, Network, PpoHyperparams, RolloutBuffer, Sample,
    Transition,
};
use auvsim::uplink::{kappa, required_energy_approx, required_energy_exact, UplinkConfig};

fn verdict(name: &str, pass: bool) {
    println!("criterion {name}: {}", if pass { "pass" } else { "FAIL" });
    assert!(pass, "acceptance criterion failed: {name}");
}

fn cfgs() -> (UplinkConfig, AcousticConfig) {
    (UplinkConfig::default(), AcousticConfig::default())
}

#[test]
fn c1_reference_energy_table() {
    let started = Instant::now();
    let (u, a) = cfgs();
    let check = reference_energy_table(&u, &a).unwrap();
    let in_time = started.elapsed().as_secs_f64() < 1.0;
    if !check.all_pass {
        print!("{}", check.report());
    }
    verdict("1 reference-energy-table", check.all_pass && check.rows.len() == 24 && in_time);
}

#[test]
fn c2_uplink_energy_constant() {
    let (u, a) = cfgs();
    verdict("2 uplink-energy-constant", (kappa(&u, &a) - 23.105).abs() <= 0.01);
}

#[test]
fn c3_distance_only_approximation_tightness() {
    let (u, a) = cfgs();
    let mut worst: f64 = 0.0;
    for di in 0..=200 {
        let d = 100.0 + 4.0 * di as f64; // covers [100, 900]
        let approx = required_energy_approx(d, 40.0, &u, &a).unwrap();
        for bi in 0..=100 {
            let beta = 0.1 + 0.008 * bi as f64; // covers [0.1, 0.9]
            let exact = required_energy_exact(d, beta, 40.0, &u, &a).unwrap();
            worst = worst.max((exact - approx).abs() / approx);
        }
    }
    verdict("3 approximation-tightness", worst < 0.01);
}

#[test]
fn c4_split_feasibility_equivalence() {
    let started = Instant::now();
    let (u, a) = cfgs();

    // Sign agreement between the g/h comparison and the raw energy
    // comparison, 1000 random (d, beta) pairs per carrier.
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut signs_agree = true;
    for f in [10.0, 20.0, 40.0, 60.0] {
        for _ in 0..1000 {
            let d = rng.random_range(100.0..1000.0);
            let beta = rng.random_range(BETA_LO..BETA_HI);
            let h = auvsim::duplex::h_of_d(d, f, &a).unwrap();
            let alg = g_of_beta(beta, &u).unwrap() >= h;
            let energy = tdd_feasible(d, beta, f, &u, &a).unwrap();
            signs_agree &= alg == energy;
        }
    }

    // g strictly increasing on a 10^4-point grid.
    let mut increasing = true;
    let mut prev = f64::NEG_INFINITY;
    for i in 0..10_000 {
        let beta = BETA_LO + (BETA_HI - BETA_LO) * i as f64 / 9_999.0;
        let g = g_of_beta(beta, &u).unwrap();
        increasing &= g > prev;
        prev = g;
    }

    // Bisection vs a 10^6-point grid scan at interior-root distances.
    let mut bisection_ok = true;
    for d in [50.0, 100.0, 150.0] {
        let BetaStar::Critical(beta) = solve_beta_star(d, 40.0, &u, &a).unwrap() else {
            bisection_ok = false;
            continue;
        };
        let h = auvsim::duplex::h_of_d(d, 40.0, &a).unwrap();
        let n = 1_000_000;
        let mut best = (f64::INFINITY, 0.0);
        for i in 0..=n {
            let b = BETA_LO + i as f64 * (BETA_HI - BETA_LO) / n as f64;
            let gap = (g_of_beta(b, &u).unwrap() - h).abs();
            if gap < best.0 {
                best = (gap, b);
            }
        }
        bisection_ok &= (beta - best.1).abs() < 1e-5;
    }

    let in_time = started.elapsed().as_secs_f64() < 30.0;
    verdict(
        "4 split-feasibility-equivalence",
        signs_agree && increasing && bisection_ok && in_time,
    );
}

#[test]
fn c5_critical_split_curve_shape() {
    let (u, a) = cfgs();
    // beta*(d) non-decreasing per carrier over its feasible range, and
    // once out of range it stays out.
    let mut shape_ok = true;
    // First distance at which the critical split leaves the operating
    // interval (the 0.9 ceiling), per carrier.
    let mut ceiling_hit = std::collections::HashMap::new();
    for f in [10.0, 20.0, 40.0, 60.0] {
        let mut prev = 0.0;
        let mut infeasible_seen = false;
        for di in 0..=900 {
            let d = 100.0 + di as f64;
            match solve_beta_star(d, f, &u, &a).unwrap() {
                BetaStar::Critical(b) => {
                    shape_ok &= b >= prev - 1e-9 && !infeasible_seen;
                    prev = b;
                }
                BetaStar::AlwaysFeasible => shape_ok &= prev == 0.0,
                BetaStar::Infeasible => {
                    if !infeasible_seen {
                        ceiling_hit.insert(f as i64, d);
                    }
                    infeasible_seen = true;
                }
            }
        }
    }
    let ordered = match (ceiling_hit.get(&60), ceiling_hit.get(&10)) {
        (Some(d60), Some(d10)) => d60 < d10,
        (Some(_), None) => true, // 10 kHz stays feasible over the whole sweep
        _ => false,
    };
    verdict("5 critical-split-curve-shape", shape_ok && ordered);
}

fn random_action(env: &Env, rng: &mut ChaCha8Rng) -> Action {
    let k = env.config().k_nodes;
    let direction = Direction::ALL[rng.random_range(0..6)];
    match env.config().mode {
        DuplexMode::Tdd => Action::Tdd { direction, node: rng.random_range(0..k) },
        DuplexMode::Fdd => Action::Fdd {
            direction,
            wet_node: rng.random_range(0..k),
            uplink_node: rng.random_range(0..k),
        },
    }
}

#[test]
fn c6_environment_invariants() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut ok = true;
    for (half, mode) in [(0, DuplexMode::Tdd), (1, DuplexMode::Fdd)] {
        let config = EnvConfig { mode, ..EnvConfig::default() };
        let mut env = Env::new(config.clone(), 100 + half).unwrap();
        let mut steps = 0usize;
        while steps < 50_000 {
            if env.is_done() {
                env.reset();
            }
            let prev: Vec<(u32, f64)> =
                env.state().nodes.iter().map(|n| (n.aoi, n.energy)).collect();
            let action = random_action(&env, &mut rng);
            let out = env.step(&action).unwrap();
            steps += 1;

            // Position stays on the grid.
            ok &= config.grid.contains(env.state().auv_pos);
            // Reward decomposition identity.
            let r = &out.reward;
            ok &= (r.total - (r.base - (r.rho_location + r.rho_information + r.rho_occurrence)))
                .abs()
                < 1e-12;
            // At most one successful uplink per slot, AoI dichotomy,
            // battery ledger bounds.
            for (i, node) in env.state().nodes.iter().enumerate() {
                let (prev_aoi, prev_energy) = prev[i];
                if out.info.uplink_success == Some(i) {
                    ok &= node.aoi == 1;
                } else {
                    ok &= node.aoi == (prev_aoi + 1).min(config.a_max);
                }
                ok &= node.energy >= 0.0 && node.energy <= config.e_cap;
                // Only slot participants may see a battery change.
                let involved = match &action {
                    Action::Tdd { node: n, .. } => i == *n,
                    Action::Fdd { wet_node, uplink_node, .. } => {
                        i == *wet_node || i == *uplink_node
                    }
                };
                if !involved {
                    ok &= node.energy == prev_energy;
                }
            }
            ok &= out.info.harvested_j >= 0.0;
            if !ok {
                break;
            }
        }
    }
    let in_time = started.elapsed().as_secs_f64() < 60.0;
    verdict("6 environment-invariants", ok && in_time);
}

#[test]
fn c7_optimizer_numerics() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let coeffs = LossCoeffs { clip_epsilon: 0.2, c1_value: 0.5, c2_entropy: 0.01 };
    let shape = NetShape::new(4, vec![3, 2]);
    let net = Network::init(shape.clone(), &mut rng);

    let make_batch = |net: &Network, rng: &mut ChaCha8Rng, n: usize, shift: f64| -> Vec<Sample> {
        (0..n)
            .map(|_| {
                let obs: Vec<f64> =
                    (0..net.shape.obs_dim).map(|_| rng.random_range(-1.0..1.0)).collect();
                let cache = net.forward(&obs).unwrap();
                let action = cache.sample(rng);
                Sample {
                    old_log_prob: cache.log_prob(&action) + shift,
                    action,
                    obs,
                    advantage: rng.random_range(-2.0..2.0),
                    value_target: rng.random_range(-1.0..1.0),
                }
            })
            .collect()
    };

    // Probability ratio is exactly one on freshly collected samples.
    let batch = make_batch(&net, &mut rng, 32, 0.0);
    let (stats, _) = ppo_loss(&net, &batch, &coeffs).unwrap();
    let ratio_ok = (stats.mean_ratio - 1.0).abs() < 1e-12 && stats.clip_fraction == 0.0;

    // Clip property on instrumented ratios.
    let clip_ok = {
        let (r, eps, adv) = (1.5f64, 0.2, 1.0);
        let bound = (r * adv).min(r.clamp(1.0 - eps, 1.0 + eps) * adv);
        let (r2, adv2) = (0.5f64, -1.0);
        let bound2 = (r2 * adv2).min(r2.clamp(1.0 - eps, 1.0 + eps) * adv2);
        bound == 1.2 && bound2 == -0.8
    };

    // Analytic gradient against central finite differences.
    let mut batch = make_batch(&net, &mut rng, 2, 0.3);
    batch.extend(make_batch(&net, &mut rng, 2, -0.3));
    let (_, grad) = ppo_loss(&net, &batch, &coeffs).unwrap();
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    for i in 0..shape.param_count() {
        let mut plus = net.clone();
        plus.params[i] += h;
        let mut minus = net.clone();
        minus.params[i] -= h;
        let lp = ppo_loss(&plus, &batch, &coeffs).unwrap().0.loss;
        let lm = ppo_loss(&minus, &batch, &coeffs).unwrap().0.loss;
        let fd = (lp - lm) / (2.0 * h);
        let denom = fd.abs().max(grad[i].abs()).max(1e-6);
        worst = worst.max((fd - grad[i]).abs() / denom);
    }
    let grad_ok = worst < 1e-4;

    // Advantages against a brute-force discounted-sum oracle.
    let rewards = [1.0, 0.0, 2.0, -1.0];
    let values = [0.5, 0.2, 0.1, 0.4];
    let dones = [false, true, false, false];
    let gamma = 0.93;
    let terminal = 1.5;
    let mut buf = RolloutBuffer::new(4);
    for i in 0..4 {
        buf.push(Transition {
            obs: vec![],
            action: vec![],
            log_prob: 0.0,
            reward: rewards[i],
            value: values[i],
            done: dones[i],
        });
    }
    let adv = buf.compute_advantages(gamma, terminal);
    let mut adv_ok = true;
    for t in 0..4 {
        let mut ret = 0.0;
        let mut k = 0;
        let mut cut = false;
        for u in t..4 {
            ret += gamma.powi(k) * rewards[u];
            k += 1;
            if dones[u] {
                cut = true;
                break;
            }
        }
        if !cut {
            ret += gamma.powi(k) * terminal;
        }
        adv_ok &= (adv[t] - (ret - values[t])).abs() < 1e-12;
    }

    verdict("7 optimizer-numerics", ratio_ok && clip_ok && grad_ok && adv_ok);
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    values[values.len() / 2]
}

fn experiment(policy: &str, mode: DuplexMode) -> ExperimentConfig {
    ExperimentConfig {
        policy: policy.into(),
        seeds: vec![1, 2, 3, 4, 5],
        env: EnvConfig { mode, ..EnvConfig::default() },
        ..ExperimentConfig::default()
    }
}

#[test]
fn c8_policy_benchmark_ordering() {
    let collect = |policy: &str, mode: DuplexMode| {
        let rows = run_experiment(&experiment(policy, mode)).unwrap();
        let aoi = median(&mut rows.iter().map(|r| r.log.mean_aoi).collect::<Vec<_>>());
        let harv = median(&mut rows.iter().map(|r| r.log.harvested_j).collect::<Vec<_>>());
        let jain = median(&mut rows.iter().map(|r| r.log.jain).collect::<Vec<_>>());
        (aoi, harv, jain)
    };

    let rw = collect("rw", DuplexMode::Tdd);
    let rr = collect("rr", DuplexMode::Tdd);
    let ga = collect("ga", DuplexMode::Tdd);
    let ppo_tdd = collect("ppo", DuplexMode::Tdd);
    let ppo_fdd = collect("ppo", DuplexMode::Fdd);
    let rw_f = collect("rw", DuplexMode::Fdd);
    let rr_f = collect("rr", DuplexMode::Fdd);
    let ga_f = collect("ga", DuplexMode::Fdd);

    let a = rw.0 > rr.0 && rr.0 > ga.0;
    let b = ppo_tdd.0 < ga.0 && ppo_tdd.1 > rw.1 && ppo_tdd.1 > rr.1 && ppo_tdd.1 > ga.1;
    let c = ppo_fdd.1 >= ppo_tdd.1;
    let d = ppo_fdd.2 >= rw_f.2 && ppo_fdd.2 >= rr_f.2 && ppo_fdd.2 >= ga_f.2;

    println!(
        "  medians: aoi rw={:.2} rr={:.2} ga={:.2} ppo-tdd={:.2} | harvested rw={:.0} rr={:.0} \
         ga={:.0} ppo-tdd={:.0} ppo-fdd={:.0} | jain rw={:.3} rr={:.3} ga={:.3} ppo-fdd={:.3}",
        rw.0, rr.0, ga.0, ppo_tdd.0, rw.1, rr.1, ga.1, ppo_tdd.1, ppo_fdd.1, rw_f.2, rr_f.2,
        ga_f.2, ppo_fdd.2,
    );
    println!("  (a) baseline aoi ordering: {a}  (b) tdd agent: {b}  (c) fdd harvest: {c}  (d) fdd fairness: {d}");
    verdict("8 policy-benchmark-ordering", a && b && c && d);
}

#[test]
fn c9_determinism() {
    // Identical config + seeds give byte-identical metric CSVs.
    let config = experiment("ga", DuplexMode::Tdd);
    let csv_a = metrics_csv(&run_experiment(&config).unwrap());
    let csv_b = metrics_csv(&run_experiment(&config).unwrap());

    // And byte-identical training logs on a short run.
    let hp = PpoHyperparams { max_episodes: 40, ..PpoHyperparams::default() };
    let run = |seed: u64| {
        let mut env = Env::new(EnvConfig::default(), seed).unwrap();
        let result = train(&mut env, &hp, seed).unwrap();
        serde_json::to_string(&result.log).unwrap()
    };
    let log_a = run(9);
    let log_b = run(9);

    verdict("9 determinism", csv_a == csv_b && log_a == log_b);
}
