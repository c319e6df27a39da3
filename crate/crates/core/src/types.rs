//! Domain types shared by every module, plus the proper-training/calibration
//! split.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Whether labels are real numbers or elements of `{-1, +1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Regression,
    Classification,
}

/// An (object, label) pair.
///
/// Features are always finite. For classification the label is exactly
/// `-1.0` or `+1.0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Example {
    features: Vec<f64>,
    label: f64,
}

impl Example {
    pub fn regression(features: Vec<f64>, label: f64) -> Result<Self> {
        check_features(&features)?;
        if !label.is_finite() {
            return Err(Error::invalid(format!("non-finite label {label}")));
        }
        Ok(Self { features, label })
    }

    pub fn classification(features: Vec<f64>, label: f64) -> Result<Self> {
        check_features(&features)?;
        check_class_label(label)?;
        Ok(Self { features, label })
    }

    pub fn new(task: Task, features: Vec<f64>, label: f64) -> Result<Self> {
        match task {
            Task::Regression => Self::regression(features, label),
            Task::Classification => Self::classification(features, label),
        }
    }

    pub fn features(&self) -> &[f64] {
        &self.features
    }

    pub fn label(&self) -> f64 {
        self.label
    }

    pub fn dim(&self) -> usize {
        self.features.len()
    }
}

pub(crate) fn check_features(features: &[f64]) -> Result<()> {
    match features.iter().position(|v| !v.is_finite()) {
        Some(j) => Err(Error::invalid(format!(
            "feature {j} is not finite ({})",
            features[j]
        ))),
        None => Ok(()),
    }
}

pub(crate) fn check_class_label(label: f64) -> Result<()> {
    if label == 1.0 || label == -1.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "classification label must be -1 or +1, got {label}"
        )))
    }
}

/// The training sequence split into a proper training part (`l` examples,
/// used to fit the point predictor) and a calibration part (`m` examples).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataSplit {
    proper: Vec<Example>,
    calibration: Vec<Example>,
}

impl DataSplit {
    pub fn new(proper: Vec<Example>, calibration: Vec<Example>) -> Result<Self> {
        if proper.is_empty() || calibration.is_empty() {
            return Err(Error::invalid(format!(
                "need l >= 1 and m >= 1, got l = {}, m = {}",
                proper.len(),
                calibration.len()
            )));
        }
        Ok(Self {
            proper,
            calibration,
        })
    }

    pub fn proper(&self) -> &[Example] {
        &self.proper
    }

    pub fn calibration(&self) -> &[Example] {
        &self.calibration
    }

    /// Size `l` of the proper training sequence.
    pub fn l(&self) -> usize {
        self.proper.len()
    }

    /// Size `m` of the calibration sequence.
    pub fn m(&self) -> usize {
        self.calibration.len()
    }

    pub fn n(&self) -> usize {
        self.l() + self.m()
    }
}

/// Splits `examples` positionally: the first `l` form the proper training
/// sequence, the rest the calibration sequence. Order is preserved; callers
/// wanting a random split shuffle beforehand.
pub fn split_training(examples: Vec<Example>, l: usize) -> Result<DataSplit> {
    let n = examples.len();
    if l == 0 || l >= n {
        return Err(Error::invalid(format!(
            "split point l = {l} must satisfy 1 <= l <= {}",
            n.saturating_sub(1)
        )));
    }
    let mut proper = examples;
    let calibration = proper.split_off(l);
    DataSplit::new(proper, calibration)
}

/// Binary summaries of the calibration examples plus the test summary.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawSummaries")]
pub struct SummarySequence {
    calibration: Vec<bool>,
    test: bool,
    k: usize,
}

#[derive(Deserialize)]
struct RawSummaries {
    calibration: Vec<bool>,
    test: bool,
    k: usize,
}

impl TryFrom<RawSummaries> for SummarySequence {
    type Error = Error;

    fn try_from(raw: RawSummaries) -> Result<Self> {
        let s = SummarySequence::new(raw.calibration, raw.test)?;
        if s.k != raw.k {
            return Err(Error::invalid(format!(
                "k = {} does not match {} ones in calibration summaries",
                raw.k, s.k
            )));
        }
        Ok(s)
    }
}

impl SummarySequence {
    pub fn new(calibration: Vec<bool>, test: bool) -> Result<Self> {
        if calibration.is_empty() {
            return Err(Error::invalid("calibration summaries must be nonempty"));
        }
        let k = calibration.iter().filter(|&&b| b).count();
        Ok(Self {
            calibration,
            test,
            k,
        })
    }

    /// The canonical sequence with `k` leading ones among `m` calibration
    /// summaries.
    pub fn canonical(m: usize, k: usize, test: bool) -> Result<Self> {
        if k > m {
            return Err(Error::invalid(format!("k = {k} exceeds m = {m}")));
        }
        let calibration = (0..m).map(|i| i < k).collect();
        Self::new(calibration, test)
    }

    pub fn calibration(&self) -> &[bool] {
        &self.calibration
    }

    pub fn test(&self) -> bool {
        self.test
    }

    /// Number of ones among the calibration summaries.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn m(&self) -> usize {
        self.calibration.len()
    }

    /// Summaries as reals in `{0.0, 1.0}`: calibration first, test last.
    pub fn calibration_alphas(&self) -> Vec<f64> {
        self.calibration
            .iter()
            .map(|&b| f64::from(u8::from(b)))
            .collect()
    }

    pub fn test_alpha(&self) -> f64 {
        f64::from(u8::from(self.test))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ex(v: f64) -> Example {
        Example::regression(vec![v], v).unwrap()
    }

    #[test]
    fn split_three_at_two() {
        let s = split_training(vec![ex(1.0), ex(2.0), ex(3.0)], 2).unwrap();
        assert_eq!(s.proper(), &[ex(1.0), ex(2.0)]);
        assert_eq!(s.calibration(), &[ex(3.0)]);
        assert_eq!((s.l(), s.m(), s.n()), (2, 1, 3));
    }

    #[test]
    fn split_minimal() {
        let s = split_training(vec![ex(1.0), ex(2.0)], 1).unwrap();
        assert_eq!(s.proper(), &[ex(1.0)]);
        assert_eq!(s.calibration(), &[ex(2.0)]);
    }

    #[test]
    fn split_rejects_empty_calibration() {
        assert!(matches!(
            split_training(vec![ex(1.0), ex(2.0)], 2),
            Err(Error::InvalidArgument(_))
        ));
        assert!(split_training(vec![ex(1.0), ex(2.0)], 0).is_err());
        assert!(split_training(vec![], 0).is_err());
    }

    #[test]
    fn example_validation() {
        assert!(Example::regression(vec![f64::NAN], 0.0).is_err());
        assert!(Example::regression(vec![1.0], f64::INFINITY).is_err());
        assert!(Example::classification(vec![1.0], 0.0).is_err());
        assert!(Example::classification(vec![1.0], -1.0).is_ok());
    }

    #[test]
    fn summaries_count_ones() {
        let s = SummarySequence::new(vec![false, true, false, true], true).unwrap();
        assert_eq!((s.k(), s.m(), s.test()), (2, 4, true));
        assert!(SummarySequence::new(vec![], true).is_err());
        assert!(SummarySequence::canonical(3, 4, false).is_err());
    }

    #[test]
    fn summaries_deserialize_checks_k() {
        let bad = r#"{"calibration":[true,false],"test":true,"k":2}"#;
        assert!(serde_json::from_str::<SummarySequence>(bad).is_err());
        let good = r#"{"calibration":[true,false],"test":true,"k":1}"#;
        assert_eq!(
            serde_json::from_str::<SummarySequence>(good).unwrap().k(),
            1
        );
    }
}
