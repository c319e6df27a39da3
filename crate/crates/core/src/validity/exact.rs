//! Exhaustive oracles over the binary outcome space `{0,1}^{m+1}`.
//!
//! The worst-case IID probability of an event over binary summaries is the
//! supremum over Bernoulli rates `p` of `B_p^{m+1}(event)`. An outcome with
//! `k` calibration ones and test bit `t` has probability
//! `p^{k+t} (1-p)^{m-k+1-t}`, so an event is fully described by how many of
//! its outcomes fall into each `(k, t)` class.
//!
//! Nothing here calls the p-value engine: class weights come from direct
//! enumeration or Pascal's triangle, probabilities from plain `powi`, and the
//! supremum from a uniform grid followed by ternary search.

use serde::{Deserialize, Serialize};

use super::{Mode, ValidityCell, ValidityReport};
use crate::error::{Error, Result};
use crate::pvalues::PVariable;
use crate::types::SummarySequence;

/// Largest calibration size accepted by the exhaustive oracles.
pub const MAX_EXACT_M: usize = 20;

/// Slack added to `ε` when checking `URP({P ≤ ε}) ≤ ε`.
pub const AUDIT_SLACK: f64 = 1e-9;

const ORACLE_GRID: usize = 4001;
const TERNARY_STEPS: usize = 200;

fn check_m(m: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::invalid("m must be at least 1"));
    }
    if m > MAX_EXACT_M {
        return Err(Error::invalid(format!(
            "m = {m} exceeds the exhaustive limit {MAX_EXACT_M}; use the Monte Carlo mode"
        )));
    }
    Ok(())
}

/// Number of member outcomes per `(k, t)` class: `counts[t][k]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassCounts {
    m: usize,
    counts: [Vec<u64>; 2],
}

impl ClassCounts {
    fn empty(m: usize) -> Self {
        Self {
            m,
            counts: [vec![0; m + 1], vec![0; m + 1]],
        }
    }

    /// Counts obtained by visiting every outcome in `{0,1}^{m+1}`.
    pub fn enumerate(m: usize, event: impl Fn(&[bool], bool) -> bool) -> Result<Self> {
        check_m(m)?;
        let mut out = Self::empty(m);
        let mut bits = vec![false; m];
        for mask in 0u32..(1u32 << m) {
            for (i, b) in bits.iter_mut().enumerate() {
                *b = mask >> i & 1 == 1;
            }
            let k = mask.count_ones() as usize;
            for t in [false, true] {
                if event(&bits, t) {
                    out.counts[usize::from(t)][k] += 1;
                }
            }
        }
        Ok(out)
    }

    /// Counts for an event that depends on the outcome only through
    /// `(k, t)`: member classes get their full size `C(m, k)`.
    pub fn from_classes(m: usize, member: impl Fn(usize, bool) -> bool) -> Result<Self> {
        check_m(m)?;
        let binom = pascal_row(m);
        let mut out = Self::empty(m);
        for t in [false, true] {
            for (k, &c) in binom.iter().enumerate() {
                if member(k, t) {
                    out.counts[usize::from(t)][k] = c;
                }
            }
        }
        Ok(out)
    }

    /// `B_p^{m+1}` probability of the event.
    pub fn probability(&self, p: f64) -> f64 {
        let q = 1.0 - p;
        let n = self.m as i32 + 1;
        let mut total = 0.0;
        for t in 0..2 {
            for (k, &c) in self.counts[t].iter().enumerate() {
                if c > 0 {
                    let ones = (k + t) as i32;
                    total += c as f64 * p.powi(ones) * q.powi(n - ones);
                }
            }
        }
        total
    }

    /// Supremum of [`Self::probability`] over `p ∈ [0, 1]`.
    pub fn supremum(&self) -> f64 {
        if self.counts.iter().all(|row| row.iter().all(|&c| c == 0)) {
            return 0.0;
        }
        let step = 1.0 / (ORACLE_GRID - 1) as f64;
        let vals: Vec<f64> = (0..ORACLE_GRID)
            .map(|j| self.probability(j as f64 * step))
            .collect();
        let mut best = vals.iter().copied().fold(0.0, f64::max);
        for j in 0..ORACLE_GRID {
            let left = j == 0 || vals[j] >= vals[j - 1];
            let right = j + 1 == ORACLE_GRID || vals[j] >= vals[j + 1];
            if !(left && right) {
                continue;
            }
            let mut lo = j.saturating_sub(1) as f64 * step;
            let mut hi = ((j + 1).min(ORACLE_GRID - 1)) as f64 * step;
            for _ in 0..TERNARY_STEPS {
                let a = lo + (hi - lo) / 3.0;
                let b = hi - (hi - lo) / 3.0;
                if self.probability(a) < self.probability(b) {
                    lo = a;
                } else {
                    hi = b;
                }
            }
            best = best.max(self.probability(0.5 * (lo + hi)));
        }
        best.min(1.0)
    }
}

/// Row `m` of Pascal's triangle.
fn pascal_row(m: usize) -> Vec<u64> {
    let mut row = vec![1u64];
    for _ in 0..m {
        let mut next = vec![1u64; row.len() + 1];
        for i in 1..row.len() {
            next[i] = row[i - 1] + row[i];
        }
        row = next;
    }
    row
}

/// Worst-case IID probability of `event`, evaluated by visiting all
/// `2^{m+1}` outcomes.
pub fn urp_binary_event(m: usize, event: impl Fn(&[bool], bool) -> bool) -> Result<f64> {
    Ok(ClassCounts::enumerate(m, event)?.supremum())
}

/// The event whose worst-case probability is the binary IRP p-value for
/// `k`: a nonconforming test summary and at most `k` calibration ones.
pub fn irp_event(k: usize) -> impl Fn(&[bool], bool) -> bool {
    move |bits, test| test && bits.iter().filter(|&&b| b).count() <= k
}

fn class_values(pv: &dyn PVariable, m: usize) -> Result<Vec<(usize, bool, f64)>> {
    let mut out = Vec::with_capacity(2 * (m + 1));
    for t in [false, true] {
        for k in 0..=m {
            let s = SummarySequence::canonical(m, k, t)?;
            out.push((k, t, pv.pvalue(&s)));
        }
    }
    Ok(out)
}

/// Checks `URP({P ≤ ε}) ≤ ε` at every realized value `ε` of a p-variable
/// that is symmetric in the calibration summaries.
pub fn audit_pvariable(pv: &dyn PVariable, m: usize) -> Result<ValidityReport> {
    check_m(m)?;
    let values = class_values(pv, m)?;
    let mut realized: Vec<f64> = values.iter().map(|v| v.2).collect();
    realized.sort_by(f64::total_cmp);
    realized.dedup();

    let name = pv.name();
    let mut cells = Vec::with_capacity(realized.len());
    for &eps in &realized {
        let member = |k: usize, t: bool| {
            values
                .iter()
                .any(|&(vk, vt, v)| vk == k && vt == t && v <= eps)
        };
        let prob = ClassCounts::from_classes(m, member)?.supremum();
        let threshold = eps + AUDIT_SLACK;
        cells.push(ValidityCell {
            pvariable: name.clone(),
            epsilon: eps,
            probability: prob,
            std_error: None,
            threshold,
            pass: prob <= threshold,
        });
    }
    Ok(ValidityReport::new(Mode::Exact, m, cells))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dominance {
    Strict,
    Weak,
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominanceWitness {
    pub k: usize,
    pub test: bool,
    pub p1: f64,
    pub p2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominanceResult {
    pub verdict: Dominance,
    pub m: usize,
    /// Strict: a configuration with `p1 < p2`. None: a counterexample with
    /// `p1 > p2`. Weak: absent.
    pub witness: Option<DominanceWitness>,
}

/// Compares two calibration-symmetric p-variables on every `(k, t)`
/// configuration.
pub fn check_dominance(
    p1: &dyn PVariable,
    p2: &dyn PVariable,
    m: usize,
) -> Result<DominanceResult> {
    check_m(m)?;
    let mut strict = None;
    for t in [true, false] {
        for k in 0..=m {
            let s = SummarySequence::canonical(m, k, t)?;
            let (v1, v2) = (p1.pvalue(&s), p2.pvalue(&s));
            let w = DominanceWitness {
                k,
                test: t,
                p1: v1,
                p2: v2,
            };
            if v1 > v2 {
                return Ok(DominanceResult {
                    verdict: Dominance::None,
                    m,
                    witness: Some(w),
                });
            }
            if v1 < v2 && strict.is_none() {
                strict = Some(w);
            }
        }
    }
    Ok(DominanceResult {
        verdict: if strict.is_some() {
            Dominance::Strict
        } else {
            Dominance::Weak
        },
        m,
        witness: strict,
    })
}
