//! End-to-end IRP and ICP predictors producing hedged prediction sets.
//!
//! Fit once on the proper training sequence, summarize the calibration
//! sequence once, then predict any number of test objects. The prediction
//! set depends only on the proper training sequence; the calibration
//! sequence enters only through `k`, the number of nonconforming
//! calibration examples, and hence only through the incertitude.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pvalues::{binary_irp_pvalue, icp_pvalue, EngineConfig};
use crate::summaries::{
    calibration_summaries, fit_margin_measure, fit_regression_measure, ClassifierSpec, FitFallback,
    FittedMarginMeasure, FittedRegressionMeasure, RegressorSpec,
};
use crate::types::{check_class_label, DataSplit, Task};

/// How the incertitude is computed from the binary summaries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Irp,
    Icp,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PredictionSet {
    Interval {
        lower: f64,
        upper: f64,
    },
    RealLine,
    /// Sorted subset of `{-1, 1}`.
    Labels {
        labels: Vec<i8>,
    },
}

impl PredictionSet {
    pub fn whole(task: Task) -> Self {
        match task {
            Task::Regression => PredictionSet::RealLine,
            Task::Classification => PredictionSet::Labels {
                labels: vec![-1, 1],
            },
        }
    }

    pub fn contains(&self, y: f64) -> bool {
        match self {
            PredictionSet::Interval { lower, upper } => *lower <= y && y <= *upper,
            PredictionSet::RealLine => true,
            PredictionSet::Labels { labels } => labels.iter().any(|&l| f64::from(l) == y),
        }
    }

    pub fn is_whole(&self) -> bool {
        match self {
            PredictionSet::Interval { .. } => false,
            PredictionSet::RealLine => true,
            PredictionSet::Labels { labels } => labels.len() == 2,
        }
    }
}

/// Hedged prediction p-function: `f(y) = 1` on the conforming set and
/// `f(y) = incertitude` elsewhere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionPFunction {
    pub task: Task,
    pub conforming: PredictionSet,
    pub incertitude: f64,
}

impl PredictionPFunction {
    pub fn evaluate(&self, y: f64) -> f64 {
        if self.conforming.contains(y) {
            1.0
        } else {
            self.incertitude
        }
    }

    /// `c = 1` means every label conforms.
    pub fn is_degenerate(&self) -> bool {
        self.incertitude >= 1.0
    }

    /// `Γ^ε = {y : f(y) > ε}`.
    pub fn prediction_set(&self, epsilon: f64) -> Result<PredictionSet> {
        prediction_set(self, epsilon)
    }
}

/// `{y : f(y) > ε}`: the conforming set when `incertitude <= ε`, the whole
/// label space otherwise.
pub fn prediction_set(f: &PredictionPFunction, epsilon: f64) -> Result<PredictionSet> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::invalid(format!(
            "epsilon must lie in (0, 1), got {epsilon}"
        )));
    }
    if f.incertitude > epsilon {
        Ok(PredictionSet::whole(f.task))
    } else {
        Ok(f.conforming.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HedgedPrediction {
    pub task: Task,
    pub method: Method,
    pub set: PredictionSet,
    pub incertitude: f64,
    /// Point prediction (interval centre) or signed classifier score.
    pub point: f64,
    pub k: usize,
    pub m: usize,
    /// Incertitude 1: every label conforms.
    pub degenerate: bool,
    /// Classification object inside the margin: both labels conform.
    pub vacuous: bool,
}

impl HedgedPrediction {
    pub fn p_function(&self) -> PredictionPFunction {
        PredictionPFunction {
            task: self.task,
            conforming: self.set.clone(),
            incertitude: self.incertitude,
        }
    }

    pub fn prediction_set(&self, epsilon: f64) -> Result<PredictionSet> {
        prediction_set(&self.p_function(), epsilon)
    }
}

fn incertitude(method: Method, m: usize, k: usize, cfg: &EngineConfig) -> Result<f64> {
    match method {
        Method::Irp => binary_irp_pvalue(m as u64, k as u64, cfg),
        Method::Icp => {
            // test summary 1 for every excluded label; binary ties at 1 all count
            let mut alphas = vec![0.0; m];
            alphas[..k].fill(1.0);
            icp_pvalue(&alphas, 1.0).map(|r| r.value())
        }
    }
}

/// Regression predictor: intervals `[ĝ(x) − h, ĝ(x) + h]`.
#[derive(Debug, Clone)]
pub struct RegressionPipeline {
    measure: FittedRegressionMeasure,
    k: usize,
    m: usize,
}

impl RegressionPipeline {
    pub fn fit(split: &DataSplit, spec: &RegressorSpec) -> Result<Self> {
        let measure = fit_regression_measure(split.proper(), spec)?;
        let bits = calibration_summaries(&measure, split.calibration())?;
        let k = bits.iter().filter(|&&b| b).count();
        Ok(Self {
            measure,
            k,
            m: split.m(),
        })
    }

    pub fn measure(&self) -> &FittedRegressionMeasure {
        &self.measure
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn fallback(&self) -> Option<FitFallback> {
        self.measure.fallback()
    }

    pub fn predict(
        &self,
        features: &[f64],
        method: Method,
        cfg: &EngineConfig,
    ) -> Result<HedgedPrediction> {
        let centre = self.measure.predict(features)?;
        let h = self.measure.half_width();
        let c = incertitude(method, self.m, self.k, cfg)?;
        let degenerate = c >= 1.0;
        let set = if degenerate {
            PredictionSet::RealLine
        } else {
            PredictionSet::Interval {
                lower: centre - h,
                upper: centre + h,
            }
        };
        Ok(HedgedPrediction {
            task: Task::Regression,
            method,
            set,
            incertitude: c,
            point: centre,
            k: self.k,
            m: self.m,
            degenerate,
            vacuous: false,
        })
    }
}

/// Classification predictor: `{ŷ}` outside the margin, `{-1, 1}` inside.
#[derive(Debug, Clone)]
pub struct ClassificationPipeline {
    measure: FittedMarginMeasure,
    k: usize,
    m: usize,
}

impl ClassificationPipeline {
    pub fn fit(split: &DataSplit, spec: &ClassifierSpec) -> Result<Self> {
        for e in split.calibration() {
            check_class_label(e.label())?;
        }
        let measure = fit_margin_measure(split.proper(), spec)?;
        let bits = calibration_summaries(&measure, split.calibration())?;
        let k = bits.iter().filter(|&&b| b).count();
        Ok(Self {
            measure,
            k,
            m: split.m(),
        })
    }

    pub fn measure(&self) -> &FittedMarginMeasure {
        &self.measure
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn fallback(&self) -> Option<FitFallback> {
        self.measure.fallback()
    }

    pub fn predict(
        &self,
        features: &[f64],
        method: Method,
        cfg: &EngineConfig,
    ) -> Result<HedgedPrediction> {
        let score = self.measure.decision(features)?;
        let c = incertitude(method, self.m, self.k, cfg)?;
        let degenerate = c >= 1.0;
        let vacuous = !self.measure.outside_margin(score);
        let set = if vacuous || degenerate {
            PredictionSet::whole(Task::Classification)
        } else {
            PredictionSet::Labels {
                labels: vec![if score > 0.0 { 1 } else { -1 }],
            }
        };
        Ok(HedgedPrediction {
            task: Task::Classification,
            method,
            set,
            incertitude: c,
            point: score,
            k: self.k,
            m: self.m,
            degenerate,
            vacuous,
        })
    }
}

pub fn irp_predict_regression(
    split: &DataSplit,
    features: &[f64],
    cfg: &EngineConfig,
) -> Result<HedgedPrediction> {
    RegressionPipeline::fit(split, &RegressorSpec::default())?.predict(features, Method::Irp, cfg)
}

pub fn icp_predict_regression(split: &DataSplit, features: &[f64]) -> Result<HedgedPrediction> {
    RegressionPipeline::fit(split, &RegressorSpec::default())?.predict(
        features,
        Method::Icp,
        &EngineConfig::default(),
    )
}

pub fn irp_predict_classification(
    split: &DataSplit,
    features: &[f64],
    cfg: &EngineConfig,
) -> Result<HedgedPrediction> {
    ClassificationPipeline::fit(split, &ClassifierSpec::default())?.predict(
        features,
        Method::Irp,
        cfg,
    )
}

pub fn icp_predict_classification(split: &DataSplit, features: &[f64]) -> Result<HedgedPrediction> {
    ClassificationPipeline::fit(split, &ClassifierSpec::default())?.predict(
        features,
        Method::Icp,
        &EngineConfig::default(),
    )
}
