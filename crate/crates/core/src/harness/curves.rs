//! Plot-ready CSV sweeps: critical TDD split vs distance per carrier,
//! and harvested vs required energy vs distance per split.

use std::fmt::Write as _;

use crate::acoustics::{harvested_energy, received_level, AcousticConfig};
use crate::duplex::{solve_beta_star, BetaStar};
use crate::error::Result;
use crate::uplink::{required_energy_approx, required_energy_exact, UplinkConfig};

/// Carriers swept in the critical-split curves, kHz.
const CURVE_FREQS_KHZ: [f64; 4] = [10.0, 20.0, 40.0, 60.0];
/// Splits swept in the energy curves.
const CURVE_BETAS: [f64; 3] = [0.1, 0.5, 0.9];
const D_MIN: f64 = 100.0;
const D_MAX: f64 = 1000.0;
const D_STEP: f64 = 10.0;

fn distances() -> impl Iterator<Item = f64> {
    let n = ((D_MAX - D_MIN) / D_STEP) as usize;
    (0..=n).map(|i| D_MIN + D_STEP * i as f64)
}

/// CSV of the critical split beta* over distance, one row per
/// (carrier, distance). Out-of-interval cases are emitted as the
/// sentinel strings `always_feasible` / `infeasible`.
pub fn beta_curves(cfg: &UplinkConfig, acfg: &AcousticConfig) -> Result<String> {
    let mut out = String::from("f_khz,d_m,beta_star\n");
    for f_khz in CURVE_FREQS_KHZ {
        for d_m in distances() {
            let cell = match solve_beta_star(d_m, f_khz, cfg, acfg)? {
                BetaStar::Critical(b) => format!("{b:.6}"),
                BetaStar::AlwaysFeasible => "always_feasible".into(),
                BetaStar::Infeasible => "infeasible".into(),
            };
            writeln!(out, "{f_khz},{d_m},{cell}").unwrap();
        }
    }
    Ok(out)
}

/// CSV of harvested vs required (exact and approximate) slot energy over
/// distance at the charging carrier, one row per (split, distance).
pub fn energy_curves(cfg: &UplinkConfig, acfg: &AcousticConfig) -> Result<String> {
    let f_khz = acfg.f_charging_khz;
    let mut out = String::from("beta,d_m,e_harv_j,e_req_exact_j,e_req_approx_j\n");
    for beta in CURVE_BETAS {
        for d_m in distances() {
            let lb = received_level(d_m, f_khz, acfg)?;
            let e_harv = harvested_energy(lb.p_harv, beta * cfg.tau_s)?;
            let e_exact = required_energy_exact(d_m, beta, f_khz, cfg, acfg)?;
            let e_approx = required_energy_approx(d_m, f_khz, cfg, acfg)?;
            writeln!(out, "{beta},{d_m},{e_harv:.6},{e_exact:.6},{e_approx:.6}").unwrap();
        }
    }
    Ok(out)
}
