//! Validity harness: exhaustive oracles, seeded Monte Carlo coverage and the
//! table of asymptotic numerators.

pub mod exact;
pub mod monte_carlo;
pub mod table;

use serde::{Deserialize, Serialize};

pub use exact::{
    audit_pvariable, check_dominance, irp_event, urp_binary_event, ClassCounts, Dominance,
    DominanceResult, DominanceWitness, MAX_EXACT_M,
};
pub use monte_carlo::{monte_carlo_coverage, GeneratorKind, GeneratorSpec, PipelineSpec};
pub use table::{reproduce_table_k, TableRow};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Exact,
    MonteCarlo,
}

/// One checked `(p-variable, ε)` pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidityCell {
    pub pvariable: String,
    pub epsilon: f64,
    /// Exact worst-case probability, or the empirical miscoverage rate.
    pub probability: f64,
    /// Binomial standard error; absent for exact cells.
    pub std_error: Option<f64>,
    /// Pass iff `probability <= threshold`.
    pub threshold: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidityReport {
    pub mode: Mode,
    pub m: usize,
    pub cells: Vec<ValidityCell>,
    pub seed: Option<u64>,
    pub trials: Option<u64>,
    /// Monte Carlo only: trials where the IRP and ICP prediction sets
    /// differed.
    pub set_mismatches: Option<u64>,
    pub passed: bool,
}

impl ValidityReport {
    pub fn new(mode: Mode, m: usize, cells: Vec<ValidityCell>) -> Self {
        let passed = cells.iter().all(|c| c.pass);
        Self {
            mode,
            m,
            cells,
            seed: None,
            trials: None,
            set_mismatches: None,
            passed,
        }
    }

    /// Appends the cells of `other`, which must share mode and `m`.
    pub fn extend(&mut self, other: ValidityReport) {
        debug_assert_eq!((self.mode, self.m), (other.mode, other.m));
        self.passed &= other.passed;
        self.cells.extend(other.cells);
    }
}
