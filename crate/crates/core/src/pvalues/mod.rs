//! The p-value engine.
//!
//! Aggregating p-variables over binary summaries all implement
//! [`PVariable`]: the binary IRP p-value ([`BinaryIrp`]), the ICP rank
//! p-value ([`Icp`]) and the threshold construction that strictly dominates
//! the ICP ([`Dominating`]).

pub mod asymptotic;
pub mod binary;
pub mod icp;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::SummarySequence;

pub use asymptotic::{asymptotic_constant, AsymptoticConstant};
pub use binary::{
    binary_irp_pvalue, binary_irp_pvalue_by_stationary_points, exact_pvalue_k0, maximize_objective,
    objective, optimal_p_k1,
};
pub use icp::{dominating_pvalue, icp_pvalue, Rational};

pub const MIN_GRID_POINTS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EngineConfig {
    /// Points in each of the uniform and logarithmic maximization grids.
    pub grid_points: usize,
    /// Bracket width at which golden-section refinement stops.
    pub refine_tol: f64,
    /// Bracket width at which the asymptotic-constant bisection stops.
    pub constant_tol: f64,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            grid_points: 4096,
            refine_tol: 1e-14,
            constant_tol: 1e-13,
        }
    }
}

impl EngineConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grid_points < MIN_GRID_POINTS {
            return Err(Error::invalid(format!(
                "grid_points = {} is below the minimum {MIN_GRID_POINTS}",
                self.grid_points
            )));
        }
        for (name, tol) in [
            ("refine_tol", self.refine_tol),
            ("constant_tol", self.constant_tol),
        ] {
            if !(tol > 0.0 && tol.is_finite()) {
                return Err(Error::invalid(format!(
                    "{name} must be positive, got {tol}"
                )));
            }
        }
        Ok(())
    }
}

/// An aggregating p-variable on binary summary sequences.
pub trait PVariable: Sync {
    fn name(&self) -> String;
    fn pvalue(&self, summaries: &SummarySequence) -> f64;
}

impl<F> PVariable for F
where
    F: Fn(&SummarySequence) -> f64 + Sync,
{
    fn name(&self) -> String {
        "custom".into()
    }

    fn pvalue(&self, summaries: &SummarySequence) -> f64 {
        self(summaries)
    }
}

/// Binary IRP p-variable: 1 when the test summary is 0, otherwise the
/// maximized tail probability for the observed `k`.
#[derive(Debug, Clone, Copy)]
pub struct BinaryIrp {
    cfg: EngineConfig,
}

impl BinaryIrp {
    pub fn new(cfg: EngineConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self { cfg })
    }

    pub fn config(&self) -> &EngineConfig {
        &self.cfg
    }
}

/// p-value of the binary IRP for a full summary sequence. A conforming test
/// summary short-circuits to 1.
pub fn irp_pvalue(summaries: &SummarySequence, cfg: &EngineConfig) -> Result<f64> {
    if !summaries.test() {
        return Ok(1.0);
    }
    binary_irp_pvalue(summaries.m() as u64, summaries.k() as u64, cfg)
}

impl PVariable for BinaryIrp {
    fn name(&self) -> String {
        "binary_irp".into()
    }

    fn pvalue(&self, summaries: &SummarySequence) -> f64 {
        irp_pvalue(summaries, &self.cfg).expect("config validated at construction and k <= m")
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Icp;

impl PVariable for Icp {
    fn name(&self) -> String {
        "icp".into()
    }

    fn pvalue(&self, summaries: &SummarySequence) -> f64 {
        icp_pvalue(&summaries.calibration_alphas(), summaries.test_alpha())
            .expect("summary sequences are nonempty")
            .value()
    }
}

/// The dominating construction with a threshold strictly between the
/// summary values 0 and 1.
#[derive(Debug, Clone, Copy)]
pub struct Dominating {
    threshold: f64,
}

impl Dominating {
    pub fn new(threshold: f64) -> Result<Self> {
        if !(threshold > 0.0 && threshold < 1.0) {
            return Err(Error::invalid(format!(
                "threshold must lie strictly between the binary summaries 0 and 1, got {threshold}"
            )));
        }
        Ok(Self { threshold })
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }
}

impl PVariable for Dominating {
    fn name(&self) -> String {
        format!("dominating(a={})", self.threshold)
    }

    fn pvalue(&self, summaries: &SummarySequence) -> f64 {
        dominating_pvalue(
            &summaries.calibration_alphas(),
            summaries.test_alpha(),
            self.threshold,
        )
        .expect("threshold validated at construction")
    }
}
