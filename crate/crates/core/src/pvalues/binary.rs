//! Binary IRP p-values.
//!
//! With `k` ones among `m` calibration summaries and a test summary of 1,
//! the p-value is the worst-case IID probability of "at most `k` ones in the
//! calibration bits and a 1 in the test bit":
//!
//! ```text
//! max_{p ∈ [0,1]}  Σ_{i=0}^{k} C(m,i) p^{i+1} (1-p)^{m-i}
//! ```
//!
//! The maximization does not assume the objective is unimodal in `p`: every
//! local maximum found on a dense grid is refined by golden-section search
//! and the best one wins.

use super::EngineConfig;
use crate::error::{Error, Result};

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Neumaier-compensated running sum.
#[derive(Default)]
struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

fn check_mk(m: u64, k: u64) -> Result<()> {
    if k > m {
        return Err(Error::invalid(format!("k = {k} exceeds m = {m}")));
    }
    Ok(())
}

fn check_p(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid(format!("p = {p} is outside [0, 1]")));
    }
    Ok(())
}

/// `Σ_{i=0}^{k} C(m,i) p^{i+1} (1-p)^{m-i}`, with every term evaluated in
/// log space.
pub fn objective(m: u64, k: u64, p: f64) -> Result<f64> {
    check_mk(m, k)?;
    check_p(p)?;
    Ok(objective_unchecked(m, k, p))
}

pub(crate) fn objective_unchecked(m: u64, k: u64, p: f64) -> f64 {
    if p == 0.0 {
        return 0.0;
    }
    if p == 1.0 {
        return if k == m { 1.0 } else { 0.0 };
    }
    let ln_p = p.ln();
    let ln_q = (-p).ln_1p();
    let mf = m as f64;
    let mut ln_binom = 0.0;
    let mut acc = CompensatedSum::default();
    for i in 0..=k {
        let fi = i as f64;
        acc.add((ln_binom + (fi + 1.0) * ln_p + (mf - fi) * ln_q).exp());
        ln_binom += (mf - fi).ln() - (fi + 1.0).ln();
    }
    acc.value().min(1.0)
}

/// Derivative of [`objective`] in `p`:
/// `P(Bin(m,p) ≤ k) − m·C(m−1,k)·p^{k+1}(1−p)^{m−1−k}` for `k < m`.
pub(crate) fn objective_derivative(m: u64, k: u64, p: f64) -> f64 {
    if k >= m {
        return 1.0;
    }
    if p == 0.0 {
        return 1.0;
    }
    if p == 1.0 {
        return 0.0;
    }
    let ln_p = p.ln();
    let ln_q = (-p).ln_1p();
    let mf = m as f64;
    let mut ln_binom = 0.0;
    let mut cdf = CompensatedSum::default();
    for i in 0..=k {
        let fi = i as f64;
        cdf.add((ln_binom + fi * ln_p + (mf - fi) * ln_q).exp());
        ln_binom += (mf - fi).ln() - (fi + 1.0).ln();
    }
    // ln C(m-1, k) = ln C(m, k) + ln((m-k)/m)
    let kf = k as f64;
    let ln_binom_k = ln_binom - (mf - kf).ln() + (kf + 1.0).ln();
    let ln_c = ln_binom_k + ((mf - kf) / mf).ln();
    let drop = (mf.ln() + ln_c + (kf + 1.0) * ln_p + (mf - 1.0 - kf) * ln_q).exp();
    cdf.value() - drop
}

/// Grid over `[0, 1]`: `n` uniform points merged with `n` log-spaced points
/// reaching down to `1e-3 / (m + 1)`, so that the peak near `p ≈ c/m` is
/// bracketed even when `m` far exceeds the grid size.
fn grid(m: u64, n: usize) -> Vec<f64> {
    let lo = 1e-3 / (m as f64 + 1.0);
    let ln_lo = lo.ln();
    let mut pts = Vec::with_capacity(2 * n + 1);
    pts.push(0.0);
    for j in 0..n {
        pts.push(j as f64 / (n - 1) as f64);
        pts.push((ln_lo * (1.0 - j as f64 / (n - 1) as f64)).exp());
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

/// Golden-section maximization of `f` on `[a, b]` until the bracket is no
/// wider than `tol`. Returns `(argmax, max)`.
pub(crate) fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        if c >= d {
            // bracket collapsed to floating-point resolution
            break;
        }
    }
    let x = 0.5 * (a + b);
    let fx = f(x);
    [(x, fx), (c, fc), (d, fd)].into_iter().fold(
        (x, fx),
        |best, cand| if cand.1 > best.1 { cand } else { best },
    )
}

/// Number of grid-local maxima refined by golden-section search.
const REFINED_PEAKS: usize = 4;

/// Maximizer and maximum of the objective.
pub fn maximize_objective(m: u64, k: u64, cfg: &EngineConfig) -> Result<(f64, f64)> {
    check_mk(m, k)?;
    cfg.validate()?;
    if k == m {
        return Ok((1.0, 1.0));
    }
    let pts = grid(m, cfg.grid_points);
    let vals: Vec<f64> = pts.iter().map(|&p| objective_unchecked(m, k, p)).collect();

    let last = pts.len() - 1;
    let mut peaks: Vec<usize> = (0..=last)
        .filter(|&j| (j == 0 || vals[j] >= vals[j - 1]) && (j == last || vals[j] >= vals[j + 1]))
        .collect();
    peaks.sort_by(|&a, &b| vals[b].total_cmp(&vals[a]));
    peaks.truncate(REFINED_PEAKS);

    let mut best = (pts[peaks[0]], vals[peaks[0]]);
    for j in peaks {
        let a = pts[j.saturating_sub(1)];
        let b = pts[(j + 1).min(last)];
        let cand = golden_max(|p| objective_unchecked(m, k, p), a, b, cfg.refine_tol);
        if cand.1 > best.1 {
            best = cand;
        }
    }
    Ok(best)
}

/// The binary IRP p-value for `k` ones among `m` calibration summaries and
/// a nonconforming test summary. Returns exactly 1 when `k == m`.
pub fn binary_irp_pvalue(m: u64, k: u64, cfg: &EngineConfig) -> Result<f64> {
    maximize_objective(m, k, cfg).map(|(_, v)| v)
}

/// Verification route for [`binary_irp_pvalue`]: locates every sign change
/// of the analytic derivative on a grid ten times denser than the engine's,
/// bisects each to `refine_tol`, and returns the best stationary value (or
/// endpoint value).
pub fn binary_irp_pvalue_by_stationary_points(m: u64, k: u64, cfg: &EngineConfig) -> Result<f64> {
    check_mk(m, k)?;
    cfg.validate()?;
    if k == m {
        return Ok(1.0);
    }
    let pts = grid(m, cfg.grid_points * 10);
    let mut best = objective_unchecked(m, k, 0.0).max(objective_unchecked(m, k, 1.0));
    let mut prev = (pts[0], objective_derivative(m, k, pts[0]));
    for &p in &pts[1..] {
        let d = objective_derivative(m, k, p);
        if prev.1 > 0.0 && d <= 0.0 {
            let (mut lo, mut hi) = (prev.0, p);
            while hi - lo > cfg.refine_tol {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if objective_derivative(m, k, mid) > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            best = best.max(objective_unchecked(m, k, 0.5 * (lo + hi)));
        }
        prev = (p, d);
    }
    Ok(best)
}

/// `m^m / (m+1)^{m+1}`, the p-value for `k = 0`. Evaluated as
/// `exp(−m·ln(1 + 1/m) − ln(m+1))`, which equals
/// `exp(m ln m − (m+1) ln(m+1))` without the cancellation. `m = 0` gives 1.
pub fn exact_pvalue_k0(m: u64) -> f64 {
    if m == 0 {
        return 1.0;
    }
    let mf = m as f64;
    (-mf * (1.0 / mf).ln_1p() - (mf + 1.0).ln()).exp()
}

/// Closed-form maximizer of the `k = 1` objective,
/// `(m − 2 + √(5m² − 4m)) / (2(m² − 1))`.
pub fn optimal_p_k1(m: u64) -> Result<f64> {
    if m < 2 {
        return Err(Error::invalid(format!(
            "optimal_p_k1 needs m >= 2, got {m} (k = 1 = m is the sure case)"
        )));
    }
    let mf = m as f64;
    Ok((mf - 2.0 + (5.0 * mf * mf - 4.0 * mf).sqrt()) / (2.0 * (mf * mf - 1.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cfg() -> EngineConfig {
        EngineConfig::default()
    }

    /// Direct evaluation with exact binomial coefficients; only for small m.
    fn naive_objective(m: u64, k: u64, p: f64) -> f64 {
        (0..=k)
            .map(|i| {
                let c: f64 = (0..i).map(|j| (m - j) as f64 / (j + 1) as f64).product();
                c * p.powi(i as i32 + 1) * (1.0 - p).powi((m - i) as i32)
            })
            .sum()
    }

    #[test]
    fn objective_edges() {
        for m in [1, 5, 40] {
            for k in 0..=m {
                assert_eq!(objective(m, k, 0.0).unwrap(), 0.0);
            }
            for p in [0.0, 0.2, 0.7, 1.0] {
                assert!((objective(m, m, p).unwrap() - p).abs() < 1e-14);
            }
        }
        assert!((objective(2, 0, 1.0 / 3.0).unwrap() - 4.0 / 27.0).abs() < 1e-15);
    }

    #[test]
    fn objective_rejects_bad_args() {
        assert!(objective(3, 4, 0.5).is_err());
        assert!(objective(3, 1, 1.5).is_err());
        assert!(objective(3, 1, -0.1).is_err());
        assert!(objective(3, 1, f64::NAN).is_err());
    }

    #[test]
    fn objective_does_not_underflow_at_large_m() {
        let m = 1_000_000;
        let v = objective(m, 3, 3.0 / m as f64).unwrap();
        assert!(v > 1e-7 && v < 1e-5, "{v}");
    }

    #[test]
    fn pvalue_m1_k0() {
        assert!((binary_irp_pvalue(1, 0, &cfg()).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn pvalue_k_equals_m_is_one() {
        for m in [1, 2, 9, 1000] {
            assert_eq!(binary_irp_pvalue(m, m, &cfg()).unwrap(), 1.0);
        }
        assert!(binary_irp_pvalue(3, 4, &cfg()).is_err());
    }

    #[test]
    fn pvalue_m100_k1_matches_closed_form_argmax() {
        // frozen from a 50-digit evaluation at p* = (98 + √49600)/19998;
        // a 1e-7 grid maximization gives the same value to 1e-10
        let expected = 0.008_373_921_240_647_723;
        let p_star = (98.0 + 49600f64.sqrt()) / 19998.0;
        assert!((objective(100, 1, p_star).unwrap() - expected).abs() < 1e-15);
        let v = binary_irp_pvalue(100, 1, &cfg()).unwrap();
        assert!((v - expected).abs() / expected < 1e-12, "{v}");
    }

    #[test]
    fn exact_k0_values() {
        assert_eq!(exact_pvalue_k0(1), 0.25);
        assert!((exact_pvalue_k0(2) - 4.0 / 27.0).abs() < 1e-16);
        let e1 = (-1f64).exp();
        let v = exact_pvalue_k0(1_000_000);
        assert!(v <= e1 / 1e6 && v >= 0.9 * e1 / 1e6);
    }

    #[test]
    fn optimal_p_k1_values() {
        assert!((optimal_p_k1(2).unwrap() - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let p = optimal_p_k1(1000).unwrap();
        assert!((p * 1000.0 / phi - 1.0).abs() < 0.005);
        assert!(optimal_p_k1(1).is_err());
        assert!(optimal_p_k1(0).is_err());
    }

    #[test]
    fn optimal_p_k1_is_stationary() {
        let h = 1e-8;
        for m in [2u64, 3, 7, 50, 400, 5000] {
            let p = optimal_p_k1(m).unwrap();
            let fd =
                (objective(m, 1, p + h).unwrap() - objective(m, 1, p - h).unwrap()) / (2.0 * h);
            assert!(fd.abs() < 1e-6, "m = {m}: {fd}");
        }
    }

    #[test]
    fn stationary_scan_agrees_with_engine() {
        for (m, k) in [(1, 0), (5, 2), (30, 4), (1000, 0), (1000, 7), (100_000, 3)] {
            let a = binary_irp_pvalue(m, k, &cfg()).unwrap();
            let b = binary_irp_pvalue_by_stationary_points(m, k, &cfg()).unwrap();
            assert!((a - b).abs() <= 1e-12 * a, "m={m} k={k}: {a} vs {b}");
        }
    }

    #[test]
    fn config_is_validated() {
        let bad = EngineConfig {
            grid_points: 10,
            ..EngineConfig::default()
        };
        assert!(binary_irp_pvalue(5, 1, &bad).is_err());
    }

    proptest! {
        #[test]
        fn log_space_matches_naive(m in 1u64..40, kf in 0.0f64..1.0, p in 0.0f64..=1.0) {
            let k = ((m as f64) * kf) as u64;
            let a = objective(m, k, p).unwrap();
            let b = naive_objective(m, k, p);
            prop_assert!((a - b).abs() <= 1e-13 * b.max(1e-300) + 1e-300);
        }

        #[test]
        fn monotone_in_k(m in 1u64..300, kf in 0.0f64..1.0) {
            let k = ((m as f64) * kf) as u64;
            prop_assume!(k < m);
            let lo = binary_irp_pvalue(m, k, &cfg()).unwrap();
            let hi = binary_irp_pvalue(m, k + 1, &cfg()).unwrap();
            prop_assert!(hi >= lo);
            prop_assert!(lo > 0.0 && hi <= 1.0);
        }

        #[test]
        fn k0_bound(m in 1u64..10_000_000) {
            let e1 = (-1f64).exp();
            prop_assert!(exact_pvalue_k0(m) <= e1 / m as f64);
        }
    }
}
