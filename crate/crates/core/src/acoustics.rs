//! Underwater acoustic link budget and the energy-harvesting chain.
//!
//! Everything here is a pure function of the configuration; the dB
//! bookkeeping follows the usual sonar-equation convention
//! `RL = SL - AL - NL`, and the harvesting chain converts a received
//! level into electrical watts at a matched hydrophone load.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Distances below this are clamped before taking `log10`.
/// Grid geometry keeps distinct cells >= one cell size apart, so the
/// clamp only guards the co-located AUV/node case.
pub const D_MIN_M: f64 = 1.0;

/// Which algebraic form of the attenuation level to use.
///
/// The two forms disagree: `MainText` applies a factor of 10 to the
/// absorption term and takes `log10` of the coefficient itself, which
/// produces attenuations in the thousands of dB at typical ranges.
/// `AppendixFit` treats the absorption coefficient as dB/km applied
/// linearly over the path, which matches the published energy tables,
/// and is the default everywhere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum AttenuationMode {
    MainText,
    #[default]
    AppendixFit,
}

/// Transmitter, receiver and channel constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AcousticConfig {
    /// Electrical input power at the source, W.
    pub p_elec: f64,
    /// Electro-acoustic / acoustic-electric conversion efficiency, in (0, 1].
    pub eta: f64,
    /// Directivity index, dB.
    pub di: f64,
    /// Receiving voltage sensitivity, dB re V/uPa.
    pub rvs: f64,
    /// Ambient noise level, dB.
    pub nl: f64,
    /// Geometric spreading factor, 1 (cylindrical) to 2 (spherical).
    pub ks: f64,
    /// Matched load resistance, Ohm.
    pub rp: f64,
    /// Carrier frequency used for energy transfer, kHz.
    pub f_charging_khz: f64,
    /// Carrier frequency used for the data uplink, kHz.
    pub f_data_khz: f64,
    pub attenuation_mode: AttenuationMode,
}

impl Default for AcousticConfig {
    fn default() -> Self {
        Self {
            p_elec: 2000.0,
            eta: 0.5,
            di: 20.0,
            rvs: -150.0,
            nl: 30.0,
            ks: 1.5,
            rp: 125.0,
            f_charging_khz: 40.0,
            f_data_khz: 30.0,
            attenuation_mode: AttenuationMode::AppendixFit,
        }
    }
}

impl AcousticConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return Err(Error::Config(format!("eta must be in (0,1], got {}", self.eta)));
        }
        if self.p_elec <= 0.0 {
            return Err(Error::Config(format!("p_elec must be > 0, got {}", self.p_elec)));
        }
        if self.rp <= 0.0 {
            return Err(Error::Config(format!("rp must be > 0, got {}", self.rp)));
        }
        if !(1.0..=2.0).contains(&self.ks) {
            return Err(Error::Config(format!("ks must be in [1,2], got {}", self.ks)));
        }
        if self.f_charging_khz <= 0.0 || self.f_data_khz <= 0.0 {
            return Err(Error::Config("carrier frequencies must be > 0".into()));
        }
        Ok(())
    }
}

/// One evaluated link: source level, path attenuation, received level and
/// the electrical power harvestable at that level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkBudget {
    pub sl: f64,
    pub al: f64,
    pub rl: f64,
    pub p_harv: f64,
}

/// Thorp's empirical absorption coefficient, dB/km, for `f_khz` in kHz.
pub fn thorp_absorption(f_khz: f64) -> Result<f64> {
    if f_khz <= 0.0 {
        return Err(Error::Domain(format!("frequency must be > 0 kHz, got {f_khz}")));
    }
    let f2 = f_khz * f_khz;
    Ok(0.11 * f2 / (f2 + 1.0) + 44.0 * f2 / (f2 + 4100.0) + 2.75e-4 * f2 + 0.003)
}

/// Source level of the transmitter, dB.
pub fn source_level(cfg: &AcousticConfig) -> f64 {
    170.8 + 10.0 * cfg.p_elec.log10() + 10.0 * cfg.eta.log10() + cfg.di
}

/// Total attenuation level over a path of `d_m` meters at `f_khz` kHz.
///
/// Distances below [`D_MIN_M`] are clamped rather than rejected.
pub fn attenuation(d_m: f64, f_khz: f64, cfg: &AcousticConfig) -> Result<f64> {
    let d = if d_m < D_MIN_M {
        log::warn!("distance {d_m} m below minimum, clamping to {D_MIN_M} m");
        D_MIN_M
    } else {
        d_m
    };
    let alpha = thorp_absorption(f_khz)?;
    Ok(match cfg.attenuation_mode {
        AttenuationMode::MainText => cfg.ks * 10.0 * d.log10() + d * 10.0 * alpha.log10(),
        AttenuationMode::AppendixFit => cfg.ks * d.log10() + (alpha / 1000.0) * d,
    })
}

/// Full downlink budget at distance `d_m` and frequency `f_khz`.
pub fn received_level(d_m: f64, f_khz: f64, cfg: &AcousticConfig) -> Result<LinkBudget> {
    let sl = source_level(cfg);
    let al = attenuation(d_m, f_khz, cfg)?;
    let rl = sl - al - cfg.nl;
    Ok(LinkBudget { sl, al, rl, p_harv: harvested_power(rl, cfg) })
}

/// Electrical power harvestable from a received level `rl_db`, W.
///
/// Collapses the pressure -> induced voltage -> available power ->
/// conversion chain into `eta * 10^((RL+RVS)/10) / (4 Rp)`.
pub fn harvested_power(rl_db: f64, cfg: &AcousticConfig) -> f64 {
    cfg.eta * 10f64.powf((rl_db + cfg.rvs) / 10.0) / (4.0 * cfg.rp)
}

/// Energy harvested over a charging window, J.
pub fn harvested_energy(p_harv_w: f64, tau_charging_s: f64) -> Result<f64> {
    if tau_charging_s < 0.0 {
        return Err(Error::Domain(format!(
            "charging duration must be >= 0, got {tau_charging_s}"
        )));
    }
    Ok(p_harv_w * tau_charging_s)
}
