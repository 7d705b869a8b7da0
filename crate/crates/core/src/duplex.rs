//! TDD feasibility analysis: when does a `beta`-split slot harvest enough
//! energy to pay for the uplink in the remainder of the slot?
//!
//! The energy inequality `E_harv >= E_req` rewrites exactly into
//! `g(beta) >= h(d)` with `g` strictly increasing on (0, 1), so the
//! critical split `beta*` at each distance is the unique root of
//! `g(beta) = h(d)`, found here by bisection.

use serde::{Deserialize, Serialize};

use crate::acoustics::{
    attenuation, harvested_energy, received_level, source_level, AcousticConfig,
};
use crate::error::{Error, Result};
use crate::uplink::{required_energy_exact, UplinkConfig};

/// Practical operating range of the time-splitting factor.
pub const BETA_LO: f64 = 0.1;
pub const BETA_HI: f64 = 0.9;

/// A time split of one slot: `beta*tau` charging, `(1-beta)*tau` uplink.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TddSplit {
    pub beta: f64,
    pub tau_s: f64,
}

impl TddSplit {
    pub fn new(beta: f64, tau_s: f64) -> Result<Self> {
        if !(BETA_LO..=BETA_HI).contains(&beta) {
            return Err(Error::Domain(format!(
                "beta must be in [{BETA_LO}, {BETA_HI}], got {beta}"
            )));
        }
        Ok(Self { beta, tau_s })
    }
}

/// Outcome of solving `g(beta) = h(d)` on the operating interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum BetaStar {
    /// Unique interior root: the minimum split that makes the slot feasible.
    Critical(f64),
    /// Even the smallest split harvests enough; any beta works.
    AlwaysFeasible,
    /// Even the largest split cannot cover the uplink energy.
    Infeasible,
}

/// Left-hand side of the feasibility inequality; depends only on the split.
pub fn g_of_beta(beta: f64, cfg: &UplinkConfig) -> Result<f64> {
    if !(0.0 < beta && beta < 1.0) {
        return Err(Error::Domain(format!("beta must be in (0,1), got {beta}")));
    }
    let tau_data = (1.0 - beta) * cfg.tau_s;
    let snr = 2f64.powf(cfg.l_t_bits / (tau_data * cfg.bandwidth_hz)) - 1.0;
    Ok((beta / (1.0 - beta)).log10() - snr.log10())
}

/// Right-hand side of the feasibility inequality; depends only on the
/// path. `AL/5` comes from the `10^(AL/5)` round trip (downlink harvest
/// plus uplink loss), and `kappa3` folds the link-budget constants.
pub fn h_of_d(d_m: f64, f_khz: f64, acfg: &AcousticConfig) -> Result<f64> {
    let sl = source_level(acfg);
    let kappa2 = acfg.eta / (4.0 * acfg.rp) * 10f64.powf((acfg.rvs + sl - acfg.nl) / 10.0);
    let kappa3 = kappa2 * 10f64.powf(-acfg.nl / 10.0);
    let al = attenuation(d_m, f_khz, acfg)?;
    Ok(al / 5.0 - kappa3.log10())
}

/// Direct energy comparison: does a `beta`-split slot at distance `d_m`
/// harvest at least the exact uplink energy?
pub fn tdd_feasible(
    d_m: f64,
    beta: f64,
    f_khz: f64,
    cfg: &UplinkConfig,
    acfg: &AcousticConfig,
) -> Result<bool> {
    let lb = received_level(d_m, f_khz, acfg)?;
    let e_harv = harvested_energy(lb.p_harv, beta * cfg.tau_s)?;
    let e_req = required_energy_exact(d_m, beta, f_khz, cfg, acfg)?;
    Ok(e_harv >= e_req)
}

/// Tolerance on `|g(beta) - h(d)|` for the bisection root.
const SOLVE_TOL: f64 = 1e-9;

/// Find the critical split at distance `d_m`, or report that the whole
/// operating interval is feasible / infeasible.
pub fn solve_beta_star(
    d_m: f64,
    f_khz: f64,
    cfg: &UplinkConfig,
    acfg: &AcousticConfig,
) -> Result<BetaStar> {
    let h = h_of_d(d_m, f_khz, acfg)?;
    if g_of_beta(BETA_LO, cfg)? >= h {
        return Ok(BetaStar::AlwaysFeasible);
    }
    if g_of_beta(BETA_HI, cfg)? < h {
        return Ok(BetaStar::Infeasible);
    }
    let (mut lo, mut hi) = (BETA_LO, BETA_HI);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let g = g_of_beta(mid, cfg)?;
        if (g - h).abs() < SOLVE_TOL {
            return Ok(BetaStar::Critical(mid));
        }
        if g < h {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(BetaStar::Critical(0.5 * (lo + hi)))
}
