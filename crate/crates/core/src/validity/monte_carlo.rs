//! Seeded Monte Carlo coverage audits.
//!
//! Trial `i` draws its data from a ChaCha8 stream keyed by `(seed, i)`, so a
//! report depends only on `(seed, trials, specs)` and not on how trials are
//! scheduled across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Mode, ValidityCell, ValidityReport};
use crate::error::{Error, Result};
use crate::pipelines::{
    ClassificationPipeline, HedgedPrediction, Method, PredictionSet, RegressionPipeline,
};
use crate::pvalues::EngineConfig;
use crate::summaries::{ClassifierSpec, RegressorSpec};
use crate::types::{DataSplit, Example, Task};

/// One-sided pass slack in binomial standard errors.
pub const MC_SIGMA: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorKind {
    /// `x ~ U[-1,1]^d`, `y = 0.5 + Σ_j x_j/(j+1) + U[-noise, noise]`.
    LinearBoundedNoise,
    /// `x ~ U[-1,1]^d`, `y = sign(Σ_j x_j/(j+1))`, flipped with probability
    /// `noise`.
    NoisyHalfspace,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub kind: GeneratorKind,
    pub dim: usize,
    pub noise: f64,
    /// Proper training size `l`.
    pub proper: usize,
    /// Calibration size `m`.
    pub calibration: usize,
}

impl Default for GeneratorSpec {
    fn default() -> Self {
        Self {
            kind: GeneratorKind::LinearBoundedNoise,
            dim: 2,
            noise: 0.5,
            proper: 200,
            calibration: 20,
        }
    }
}

impl GeneratorSpec {
    pub fn task(&self) -> Task {
        match self.kind {
            GeneratorKind::LinearBoundedNoise => Task::Regression,
            GeneratorKind::NoisyHalfspace => Task::Classification,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::Generator("dim must be positive".into()));
        }
        if self.proper == 0 || self.calibration == 0 {
            return Err(Error::Generator(format!(
                "need proper >= 1 and calibration >= 1, got {} and {}",
                self.proper, self.calibration
            )));
        }
        let ok = match self.kind {
            GeneratorKind::LinearBoundedNoise => self.noise >= 0.0 && self.noise.is_finite(),
            GeneratorKind::NoisyHalfspace => (0.0..=0.5).contains(&self.noise),
        };
        if !ok {
            return Err(Error::Generator(format!(
                "noise {} out of range for {:?}",
                self.noise, self.kind
            )));
        }
        Ok(())
    }

    fn weights(&self) -> Vec<f64> {
        (0..self.dim).map(|j| 1.0 / (j + 1) as f64).collect()
    }

    pub fn sample(&self, rng: &mut impl Rng) -> Result<Example> {
        let x: Vec<f64> = (0..self.dim).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        let signal: f64 = self.weights().iter().zip(&x).map(|(w, v)| w * v).sum();
        match self.kind {
            GeneratorKind::LinearBoundedNoise => {
                let e = if self.noise > 0.0 {
                    rng.gen_range(-self.noise..=self.noise)
                } else {
                    0.0
                };
                Example::regression(x, 0.5 + signal + e)
            }
            GeneratorKind::NoisyHalfspace => {
                let clean = if signal >= 0.0 { 1.0 } else { -1.0 };
                let y = if rng.gen_bool(self.noise) {
                    -clean
                } else {
                    clean
                };
                Example::classification(x, y)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PipelineSpec {
    Hedged {
        method: Method,
        #[serde(default)]
        regressor: RegressorSpec,
        #[serde(default)]
        classifier: ClassifierSpec,
    },
    /// Always outputs the whole label space.
    WholeSpace,
}

impl PipelineSpec {
    pub fn hedged(method: Method) -> Self {
        PipelineSpec::Hedged {
            method,
            regressor: RegressorSpec::default(),
            classifier: ClassifierSpec::default(),
        }
    }

    fn name(&self, task: Task) -> String {
        let task = match task {
            Task::Regression => "regression",
            Task::Classification => "classification",
        };
        match self {
            PipelineSpec::Hedged {
                method: Method::Irp,
                ..
            } => format!("irp_{task}"),
            PipelineSpec::Hedged {
                method: Method::Icp,
                ..
            } => format!("icp_{task}"),
            PipelineSpec::WholeSpace => format!("whole_space_{task}"),
        }
    }
}

struct TrialOutcome {
    excluded: bool,
    set_mismatch: bool,
}

fn run_trial(
    pipeline: &PipelineSpec,
    generator: &GeneratorSpec,
    epsilon: f64,
    seed: u64,
    trial: u64,
    cfg: &EngineConfig,
) -> Result<TrialOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    let n = generator.proper + generator.calibration;
    let mut examples = (0..n)
        .map(|_| generator.sample(&mut rng))
        .collect::<Result<Vec<_>>>()?;
    let test = generator.sample(&mut rng)?;
    let calibration = examples.split_off(generator.proper);
    let split = DataSplit::new(examples, calibration)?;

    let (method, regressor, classifier) = match pipeline {
        PipelineSpec::WholeSpace => {
            return Ok(TrialOutcome {
                excluded: false,
                set_mismatch: false,
            })
        }
        PipelineSpec::Hedged {
            method,
            regressor,
            classifier,
        } => (*method, regressor, classifier),
    };
    enum Fitted {
        Regression(RegressionPipeline),
        Classification(ClassificationPipeline),
    }
    let fitted = match generator.task() {
        Task::Regression => Fitted::Regression(RegressionPipeline::fit(&split, regressor)?),
        Task::Classification => {
            Fitted::Classification(ClassificationPipeline::fit(&split, classifier)?)
        }
    };
    let predict = |m: Method| -> Result<HedgedPrediction> {
        match &fitted {
            Fitted::Regression(p) => p.predict(test.features(), m, cfg),
            Fitted::Classification(p) => p.predict(test.features(), m, cfg),
        }
    };
    let chosen = predict(method)?;
    let other = predict(match method {
        Method::Irp => Method::Icp,
        Method::Icp => Method::Irp,
    })?;
    let gamma: PredictionSet = chosen.prediction_set(epsilon)?;
    Ok(TrialOutcome {
        excluded: !gamma.contains(test.label()),
        set_mismatch: chosen.set != other.set,
    })
}

/// Empirical miscoverage of `pipeline` at level `epsilon` over `trials`
/// independent draws. The cell passes iff `rate <= ε + 3·SE`.
pub fn monte_carlo_coverage(
    pipeline: &PipelineSpec,
    generator: &GeneratorSpec,
    epsilon: f64,
    trials: u64,
    seed: u64,
    cfg: &EngineConfig,
) -> Result<ValidityReport> {
    generator.validate()?;
    cfg.validate()?;
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::invalid(format!(
            "epsilon must lie in (0, 1), got {epsilon}"
        )));
    }
    if trials == 0 {
        return Err(Error::invalid("trials must be at least 1"));
    }
    let outcomes = (0..trials)
        .into_par_iter()
        .map(|t| run_trial(pipeline, generator, epsilon, seed, t, cfg))
        .collect::<Result<Vec<_>>>()?;
    let errors = outcomes.iter().filter(|o| o.excluded).count() as u64;
    let mismatches = outcomes.iter().filter(|o| o.set_mismatch).count() as u64;

    let n = trials as f64;
    let rate = errors as f64 / n;
    let se = (rate * (1.0 - rate) / n).sqrt();
    let threshold = epsilon + MC_SIGMA * se;
    let cell = ValidityCell {
        pvariable: pipeline.name(generator.task()),
        epsilon,
        probability: rate,
        std_error: Some(se),
        threshold,
        pass: rate <= threshold,
    };
    let mut report = ValidityReport::new(Mode::MonteCarlo, generator.calibration, vec![cell]);
    report.seed = Some(seed);
    report.trials = Some(trials);
    report.set_mismatches = Some(mismatches);
    Ok(report)
}
