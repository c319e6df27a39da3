//! Asymptotic numerators of the IRP incertitude next to the ICP numerators.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pvalues::asymptotic::MAX_K;
use crate::pvalues::{asymptotic_constant, EngineConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub k: u32,
    /// `a_k` rounded to 3 decimals.
    pub irp: f64,
    /// ICP numerator `k + 1`.
    pub icp: u32,
    /// `a_k / (k + 1)` rounded to 3 decimals.
    pub ratio: f64,
    /// Unrounded `a_k`.
    pub a_k: f64,
    pub c_star: f64,
}

fn round3(x: f64) -> f64 {
    (x * 1000.0).round() / 1000.0
}

pub fn reproduce_table_k(k_max: u32, cfg: &EngineConfig) -> Result<Vec<TableRow>> {
    if k_max > MAX_K {
        return Err(Error::invalid(format!("k_max = {k_max} exceeds {MAX_K}")));
    }
    (0..=k_max)
        .map(|k| {
            let c = asymptotic_constant(k, cfg)?;
            Ok(TableRow {
                k,
                irp: round3(c.a_k),
                icp: k + 1,
                ratio: round3(c.a_k / f64::from(k + 1)),
                a_k: c.a_k,
                c_star: c.c_star,
            })
        })
        .collect()
}
