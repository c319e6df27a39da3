//! Binary inductive nonconformity measures.
//!
//! A measure is fitted on the proper training sequence only and then maps
//! any example to a summary bit: `1` means the example does not conform.
//!
//! * Regression: fit `ĝ`, let `h = max |y_i - ĝ(x_i)|` over the proper
//!   training sequence; an example scores 1 iff `|y - ĝ(x)| > h` (strict).
//! * Classification: fit a signed-score linear classifier; an example scores
//!   1 iff it is classified as `-y` and lies outside the margin,
//!   `|score(x)| > margin_width`.
//!
//! The point predictor is pluggable through [`PointPredictor`]; the
//! reference predictors are least squares ([`ols`]) and a hinge-loss linear
//! classifier ([`hinge`]).

pub mod hinge;
pub mod ols;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{check_class_label, check_features, Example, SummarySequence};

pub use hinge::{ClassifierSpec, LinearClassifier};
pub use ols::{LeastSquares, RegressorSpec};

/// A fitted point predictor. For regression `predict` is the predicted
/// label; for classification it is a signed score whose sign is the
/// predicted class.
pub trait PointPredictor: Send + Sync + fmt::Debug {
    fn predict(&self, features: &[f64]) -> f64;
}

/// Predicts the same value everywhere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantPredictor(pub f64);

impl PointPredictor for ConstantPredictor {
    fn predict(&self, _features: &[f64]) -> f64 {
        self.0
    }
}

/// Why a reference predictor fell back to a constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitFallback {
    /// The least-squares design matrix is rank deficient; the mean label is
    /// predicted instead.
    DegenerateDesign,
    /// The proper training sequence contains a single class; every object is
    /// assigned that class with an infinite score.
    SingleClass,
}

/// Anything that maps an example to a summary bit.
pub trait BinaryMeasure {
    fn score(&self, features: &[f64], label: f64) -> Result<bool>;
}

#[derive(Debug, Clone)]
pub struct FittedRegressionMeasure {
    predictor: Arc<dyn PointPredictor>,
    half_width: f64,
    dim: usize,
    fallback: Option<FitFallback>,
}

impl FittedRegressionMeasure {
    /// Wraps an already fitted predictor, computing the half-width on the
    /// proper training sequence.
    pub fn from_predictor(predictor: Arc<dyn PointPredictor>, proper: &[Example]) -> Result<Self> {
        let dim = common_dim(proper)?;
        let half_width = proper
            .iter()
            .map(|e| (e.label() - predictor.predict(e.features())).abs())
            .fold(0.0, f64::max);
        if !half_width.is_finite() {
            return Err(Error::invalid("predictor produced a non-finite residual"));
        }
        Ok(Self {
            predictor,
            half_width,
            dim,
            fallback: None,
        })
    }

    /// The half-width `h`.
    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    /// The point prediction `ĝ(x)`, centre of the prediction interval.
    pub fn predict(&self, features: &[f64]) -> Result<f64> {
        self.check_dim(features)?;
        Ok(self.predictor.predict(features))
    }

    pub fn fallback(&self) -> Option<FitFallback> {
        self.fallback
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn check_dim(&self, features: &[f64]) -> Result<()> {
        check_features(features)?;
        if features.len() != self.dim {
            return Err(Error::invalid(format!(
                "expected {} features, got {}",
                self.dim,
                features.len()
            )));
        }
        Ok(())
    }
}

/// Fits `spec` on `proper` and records the half-width of its residuals.
pub fn fit_regression_measure(
    proper: &[Example],
    spec: &RegressorSpec,
) -> Result<FittedRegressionMeasure> {
    let (predictor, fallback) = spec.fit(proper)?;
    let mut measure = FittedRegressionMeasure::from_predictor(predictor, proper)?;
    measure.fallback = fallback;
    Ok(measure)
}

/// Returns `true` iff `|y - ĝ(x)| > h`. Equality conforms.
pub fn score_regression(
    measure: &FittedRegressionMeasure,
    features: &[f64],
    y: f64,
) -> Result<bool> {
    if !y.is_finite() {
        return Err(Error::invalid(format!("non-finite label {y}")));
    }
    let centre = measure.predict(features)?;
    Ok((y - centre).abs() > measure.half_width)
}

impl BinaryMeasure for FittedRegressionMeasure {
    fn score(&self, features: &[f64], label: f64) -> Result<bool> {
        score_regression(self, features, label)
    }
}

#[derive(Debug, Clone)]
pub struct FittedMarginMeasure {
    classifier: Arc<dyn PointPredictor>,
    margin_width: f64,
    dim: usize,
    fallback: Option<FitFallback>,
}

impl FittedMarginMeasure {
    /// Wraps a fitted signed-score classifier. A point is outside the margin
    /// iff `|score| > margin_width`.
    pub fn from_classifier(
        classifier: Arc<dyn PointPredictor>,
        margin_width: f64,
        dim: usize,
    ) -> Result<Self> {
        if !(margin_width > 0.0 && margin_width.is_finite()) {
            return Err(Error::invalid(format!(
                "margin width must be positive and finite, got {margin_width}"
            )));
        }
        Ok(Self {
            classifier,
            margin_width,
            dim,
            fallback: None,
        })
    }

    pub fn margin_width(&self) -> f64 {
        self.margin_width
    }

    /// Signed classifier score at `features`.
    pub fn decision(&self, features: &[f64]) -> Result<f64> {
        check_features(features)?;
        if features.len() != self.dim {
            return Err(Error::invalid(format!(
                "expected {} features, got {}",
                self.dim,
                features.len()
            )));
        }
        Ok(self.classifier.predict(features))
    }

    pub fn outside_margin(&self, score: f64) -> bool {
        score.abs() > self.margin_width
    }

    pub fn fallback(&self) -> Option<FitFallback> {
        self.fallback
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

pub fn fit_margin_measure(
    proper: &[Example],
    spec: &ClassifierSpec,
) -> Result<FittedMarginMeasure> {
    let dim = common_dim(proper)?;
    for e in proper {
        check_class_label(e.label())?;
    }
    let (classifier, fallback) = spec.fit(proper)?;
    let mut measure =
        FittedMarginMeasure::from_classifier(classifier, hinge::FUNCTIONAL_MARGIN, dim)?;
    measure.fallback = fallback;
    Ok(measure)
}

/// Returns `true` iff `x` is classified as `-y` and lies outside the margin.
pub fn score_margin(measure: &FittedMarginMeasure, features: &[f64], y: f64) -> Result<bool> {
    check_class_label(y)?;
    let s = measure.decision(features)?;
    Ok(s * y < 0.0 && measure.outside_margin(s))
}

impl BinaryMeasure for FittedMarginMeasure {
    fn score(&self, features: &[f64], label: f64) -> Result<bool> {
        score_margin(self, features, label)
    }
}

/// Scores every calibration example and the test example.
pub fn summarize<M: BinaryMeasure + ?Sized>(
    measure: &M,
    calibration: &[Example],
    test_features: &[f64],
    test_label: f64,
) -> Result<SummarySequence> {
    let bits = calibration_summaries(measure, calibration)?;
    let test = measure.score(test_features, test_label)?;
    SummarySequence::new(bits, test)
}

pub(crate) fn calibration_summaries<M: BinaryMeasure + ?Sized>(
    measure: &M,
    calibration: &[Example],
) -> Result<Vec<bool>> {
    calibration
        .iter()
        .map(|e| measure.score(e.features(), e.label()))
        .collect()
}

fn common_dim(examples: &[Example]) -> Result<usize> {
    let first = examples
        .first()
        .ok_or_else(|| Error::invalid("proper training sequence is empty"))?;
    let dim = first.dim();
    if let Some(e) = examples.iter().find(|e| e.dim() != dim) {
        return Err(Error::invalid(format!(
            "inconsistent feature dimension: {} vs {dim}",
            e.dim()
        )));
    }
    Ok(dim)
}
