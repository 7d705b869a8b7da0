//! Regression check of the uplink energy model against published
//! reference values: approximate and exact required energy at six
//! distances and three slot splits, 40 kHz carrier.

use std::fmt::Write as _;

use crate::acoustics::AcousticConfig;
use crate::error::Result;
use crate::uplink::{required_energy_approx, required_energy_exact, UplinkConfig};

/// Relative tolerance for a cell to count as reproduced.
pub const TABLE_TOL: f64 = 0.005;

const REF_FREQ_KHZ: f64 = 40.0;
const REF_BETAS: [f64; 3] = [0.1, 0.5, 0.9];

/// `(d_m, approx_j, exact_j at beta = 0.1 / 0.5 / 0.9)`.
const REFERENCE: [(f64, f64, [f64; 3]); 6] = [
    (100.0, 62.0503, [62.0819, 62.1075, 62.3377]),
    (200.0, 92.6695, [92.7167, 92.7548, 93.0986]),
    (300.0, 132.5527, [132.6202, 132.6747, 133.1665]),
    (700.0, 494.0117, [494.2635, 494.4666, 496.2996]),
    (800.0, 678.3817, [678.7274, 679.0063, 681.5234]),
    (900.0, 929.3624, [929.8360, 930.2181, 933.6665]),
];

/// One compared cell of the reference energy table.
#[derive(Debug, Clone, PartialEq)]
pub struct Table3Row {
    pub d_m: f64,
    /// `None` for the distance-only approximation column.
    pub beta: Option<f64>,
    pub reference_j: f64,
    pub computed_j: f64,
    pub rel_err: f64,
    pub pass: bool,
}

/// The full comparison plus an overall verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct Table3Check {
    pub rows: Vec<Table3Row>,
    pub all_pass: bool,
}

impl Table3Check {
    /// Human-readable report, one line per cell.
    pub fn report(&self) -> String {
        let mut out = String::new();
        for r in &self.rows {
            let col = match r.beta {
                Some(b) => format!("exact beta={b}"),
                None => "approx".into(),
            };
            writeln!(
                out,
                "d={:>5} m  {:<15} ref={:>9.4} J  computed={:>9.4} J  rel_err={:.2e}  {}",
                r.d_m,
                col,
                r.reference_j,
                r.computed_j,
                r.rel_err,
                if r.pass { "ok" } else { "FAIL" },
            )
            .unwrap();
        }
        writeln!(out, "overall: {}", if self.all_pass { "ok" } else { "FAIL" }).unwrap();
        out
    }
}

/// Recompute every cell of the reference table and compare within
/// [`TABLE_TOL`] relative error.
pub fn reference_energy_table(cfg: &UplinkConfig, acfg: &AcousticConfig) -> Result<Table3Check> {
    let mut rows = Vec::with_capacity(REFERENCE.len() * (1 + REF_BETAS.len()));
    for &(d_m, approx_ref, exact_refs) in &REFERENCE {
        let computed = required_energy_approx(d_m, REF_FREQ_KHZ, cfg, acfg)?;
        rows.push(cell(d_m, None, approx_ref, computed));
        for (beta, &exact_ref) in REF_BETAS.iter().copied().zip(&exact_refs) {
            let computed = required_energy_exact(d_m, beta, REF_FREQ_KHZ, cfg, acfg)?;
            rows.push(cell(d_m, Some(beta), exact_ref, computed));
        }
    }
    let all_pass = rows.iter().all(|r| r.pass);
    Ok(Table3Check { rows, all_pass })
}

fn cell(d_m: f64, beta: Option<f64>, reference_j: f64, computed_j: f64) -> Table3Row {
    let rel_err = (computed_j - reference_j).abs() / reference_j;
    Table3Row { d_m, beta, reference_j, computed_j, rel_err, pass: rel_err <= TABLE_TOL }
}
