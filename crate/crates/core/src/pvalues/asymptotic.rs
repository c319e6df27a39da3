//! Large-`m` constants of the binary IRP p-value.
//!
//! For fixed `k`, the maximizing rate behaves like `p ≈ c/m` and
//! `m · pvalue(m, k) → a_k = Σ_{i=0}^{k} c^{i+1} e^{−c} / i!`, where `c` is the
//! unique positive root of
//!
//! ```text
//! g(c) = Σ_{i=0}^{k} c^i / i!  −  c^{k+1} / k!
//! ```
//!
//! `g(0) = 1` and `g(k + 3) < 0` for every `k`, so `[0, k + 3]` always
//! brackets the root; it is found by bisection.

use serde::{Deserialize, Serialize};

use super::EngineConfig;
use crate::error::{Error, Result};

/// Largest `k` for which the bracket is certified (and the terms stay well
/// inside `f64` range).
pub const MAX_K: u32 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticConstant {
    pub k: u32,
    /// Optimal Bernoulli rate in units of `1/m`.
    pub c_star: f64,
    /// Numerator `a_k` of the asymptotic p-value `a_k / m`.
    pub a_k: f64,
}

impl AsymptoticConstant {
    /// `|g(c_star)|` divided by the scale `c_star^{k+1}/k!` of the terms
    /// being cancelled.
    pub fn relative_residual(&self) -> f64 {
        let (lhs, rhs) = stationarity_sides(self.k, self.c_star);
        (lhs - rhs).abs() / rhs
    }
}

/// Both sides of the stationarity equation,
/// `(Σ_{i≤k} c^i/i!, c^{k+1}/k!)`.
pub fn stationarity_sides(k: u32, c: f64) -> (f64, f64) {
    let mut term = 1.0;
    let mut sum = 0.0;
    for i in 0..=k {
        if i > 0 {
            term *= c / f64::from(i);
        }
        sum += term;
    }
    // term is now c^k / k!
    (sum, term * c)
}

/// `Σ_{i=0}^{k} c^{i+1} e^{−c} / i!`.
pub fn numerator(k: u32, c: f64) -> f64 {
    let mut term = c * (-c).exp();
    let mut sum = term;
    for i in 1..=k {
        term *= c / f64::from(i);
        sum += term;
    }
    sum
}

pub fn asymptotic_constant(k: u32, cfg: &EngineConfig) -> Result<AsymptoticConstant> {
    cfg.validate()?;
    if k > MAX_K {
        return Err(Error::invalid(format!(
            "k = {k} exceeds the supported maximum {MAX_K}"
        )));
    }
    let g = |c: f64| {
        let (lhs, rhs) = stationarity_sides(k, c);
        lhs - rhs
    };
    let (mut lo, mut hi) = (0.0, f64::from(k) + 3.0);
    let (g_lo, g_hi) = (g(lo), g(hi));
    if !(g_lo > 0.0 && g_hi < 0.0) {
        return Err(Error::RootBracket {
            k,
            lo,
            hi,
            g_lo,
            g_hi,
        });
    }
    while hi - lo > cfg.constant_tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let c_star = 0.5 * (lo + hi);
    Ok(AsymptoticConstant {
        k,
        c_star,
        a_k: numerator(k, c_star),
    })
}
