//! Relative deviation of the traced occupancy `Z_t(u)` from `A_r t` and of
//! the attachment mass `T_t(u)` from `(2 + xi) m A_r t`.

use serde::{Deserialize, Serialize};

use crate::generators::{GenerationTrace, ModelConfig};
use crate::sphere::cap_area;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationRow {
    pub probe_index: usize,
    pub t: usize,
    pub z: u64,
    pub mass: u64,
    /// `|Z - A_r t| / (A_r t)`; `None` while the probe cap is empty.
    pub z_deviation: Option<f64>,
    /// `|T - (2+xi) m A_r t| / ((2+xi) m A_r t)`; `None` while the cap is empty.
    pub mass_deviation: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationReport {
    pub cap_area: f64,
    pub t_r: f64,
    pub rows: Vec<ConcentrationRow>,
    /// Rows with `t >= t_r` and a defined deviation.
    pub rows_considered: usize,
    /// Rows with `t >= t_r` whose probe cap was still empty.
    pub rows_undefined: usize,
    pub worst_z_deviation: Option<f64>,
    pub worst_mass_deviation: Option<f64>,
}

/// `(2 + xi) m A_r t`.
pub fn target_mass(cfg: &ModelConfig, t: usize) -> f64 {
    (2.0 + cfg.xi) * cfg.m as f64 * cap_area(cfg.r) * t as f64
}

pub fn concentration_report(trace: &GenerationTrace, cfg: &ModelConfig, t_r: f64) -> ConcentrationReport {
    let area = cap_area(cfg.r);
    let rows: Vec<ConcentrationRow> = trace
        .rows
        .iter()
        .map(|row| {
            let occupancy = area * row.t as f64;
            let mass = target_mass(cfg, row.t);
            let defined = row.z > 0;
            ConcentrationRow {
                probe_index: row.probe_index,
                t: row.t,
                z: row.z,
                mass: row.mass,
                z_deviation: defined.then(|| (row.z as f64 - occupancy).abs() / occupancy),
                mass_deviation: defined.then(|| (row.mass as f64 - mass).abs() / mass),
            }
        })
        .collect();
    let late: Vec<&ConcentrationRow> = rows.iter().filter(|r| r.t as f64 >= t_r).collect();
    let worst = |f: fn(&ConcentrationRow) -> Option<f64>| late.iter().filter_map(|r| f(r)).reduce(f64::max);
    ConcentrationReport {
        cap_area: area,
        t_r,
        rows_considered: late.iter().filter(|r| r.z_deviation.is_some()).count(),
        rows_undefined: late.iter().filter(|r| r.z_deviation.is_none()).count(),
        worst_z_deviation: worst(|r| r.z_deviation),
        worst_mass_deviation: worst(|r| r.mass_deviation),
        rows,
    }
}
