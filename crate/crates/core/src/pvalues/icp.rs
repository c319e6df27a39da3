//! The ICP rank p-value and a p-variable strictly dominating it.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::binary::exact_pvalue_k0;
use crate::error::{Error, Result};

/// Exact nonnegative fraction. Not reduced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rational {
    pub numerator: u64,
    pub denominator: u64,
}

impl Rational {
    pub fn new(numerator: u64, denominator: u64) -> Result<Self> {
        if denominator == 0 {
            return Err(Error::invalid("zero denominator"));
        }
        Ok(Self {
            numerator,
            denominator,
        })
    }

    pub fn value(&self) -> f64 {
        self.numerator as f64 / self.denominator as f64
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        let lhs = u128::from(self.numerator) * u128::from(other.denominator);
        let rhs = u128::from(other.numerator) * u128::from(self.denominator);
        lhs.cmp(&rhs)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numerator, self.denominator)
    }
}

fn check_alphas(calibration: &[f64], test: f64) -> Result<()> {
    if calibration.is_empty() {
        return Err(Error::invalid("calibration summaries must be nonempty"));
    }
    if test.is_nan() || calibration.iter().any(|a| a.is_nan()) {
        return Err(Error::invalid("summaries must not be NaN"));
    }
    Ok(())
}

/// `(1 + |{j : α_j ≥ α_test}|) / (m + 1)`.
pub fn icp_pvalue(calibration: &[f64], test: f64) -> Result<Rational> {
    check_alphas(calibration, test)?;
    let ties_or_above = calibration.iter().filter(|&&a| a >= test).count() as u64;
    Rational::new(1 + ties_or_above, calibration.len() as u64 + 1)
}

/// ICP p-value except on the configuration "test above `threshold`, every
/// calibration summary strictly below it", where the value drops to
/// `m^m/(m+1)^{m+1} < 1/(m+1)`.
pub fn dominating_pvalue(calibration: &[f64], test: f64, threshold: f64) -> Result<f64> {
    check_alphas(calibration, test)?;
    if !threshold.is_finite() {
        return Err(Error::invalid(format!(
            "threshold must be finite, got {threshold}"
        )));
    }
    if test > threshold && calibration.iter().all(|&a| a < threshold) {
        Ok(exact_pvalue_k0(calibration.len() as u64))
    } else {
        icp_pvalue(calibration, test).map(|r| r.value())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn icp_counts() {
        assert_eq!(
            icp_pvalue(&[0.1, 0.2, 0.3], 0.9).unwrap(),
            Rational::new(1, 4).unwrap()
        );
        assert_eq!(icp_pvalue(&[0.5; 6], 0.5).unwrap().value(), 1.0);
        let bits = [1.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0];
        assert_eq!(
            icp_pvalue(&bits, 1.0).unwrap(),
            Rational::new(4, 8).unwrap()
        );
        assert!(icp_pvalue(&[], 1.0).is_err());
        assert!(icp_pvalue(&[f64::NAN], 1.0).is_err());
    }

    #[test]
    fn rational_order_is_exact() {
        let a = Rational::new(1, 3).unwrap();
        let b = Rational::new(2, 6).unwrap();
        assert_eq!(a.cmp(&b), Ordering::Equal);
        assert!(Rational::new(3, 10).unwrap() < a);
        assert!(Rational::new(1, 0).is_err());
    }

    #[test]
    fn dominating_special_case() {
        let v = dominating_pvalue(&[0.1; 4], 0.9, 0.5).unwrap();
        assert!((v - 256.0 / 3125.0).abs() < 1e-16);
        assert!((v - 0.08192).abs() < 1e-15);
    }

    #[test]
    fn dominating_falls_through() {
        let cal = [0.1, 0.6, 0.1, 0.1];
        assert_eq!(dominating_pvalue(&cal, 0.9, 0.5).unwrap(), 0.2);
        // calibration alpha exactly at the threshold is not strictly below
        let cal = [0.1, 0.5, 0.1, 0.1];
        assert_eq!(dominating_pvalue(&cal, 0.9, 0.5).unwrap(), 0.2);
        // test at the threshold is not strictly above
        assert_eq!(dominating_pvalue(&[0.1; 4], 0.5, 0.5).unwrap(), 0.2);
        assert!(dominating_pvalue(&[0.1], 0.9, f64::NAN).is_err());
    }

    #[test]
    fn special_value_below_icp_floor() {
        for m in 1..=5000u64 {
            assert!(exact_pvalue_k0(m) < 1.0 / (m + 1) as f64);
        }
    }
}
