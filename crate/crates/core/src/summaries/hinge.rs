//! Large-margin linear classifier trained by full-batch subgradient descent
//! on the L2-regularized hinge loss
//!
//! ```text
//! (λ/2)‖w‖² + (1/l) Σ max(0, 1 − y_i (w·x_i + b))
//! ```
//!
//! The bias is not regularized. Step sizes decay as `lr / √t` and the
//! returned model is the average of the iterates over the second half of
//! training, which removes most of the subgradient oscillation.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{ConstantPredictor, FitFallback, PointPredictor};
use crate::error::{Error, Result};
use crate::types::Example;

/// Outside-the-margin threshold in score units: the functional margin of a
/// linear SVM.
pub const FUNCTIONAL_MARGIN: f64 = 1.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ClassifierSpec {
    pub learning_rate: f64,
    pub epochs: usize,
    pub regularization: f64,
    /// Half-width of the uniform initialization of weights and bias.
    pub init_scale: f64,
    pub seed: u64,
}

impl Default for ClassifierSpec {
    fn default() -> Self {
        Self {
            learning_rate: 0.5,
            epochs: 2000,
            regularization: 1e-3,
            init_scale: 0.01,
            seed: 0,
        }
    }
}

impl ClassifierSpec {
    fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::invalid(format!(
                "learning rate must be positive, got {}",
                self.learning_rate
            )));
        }
        if self.epochs == 0 {
            return Err(Error::invalid("epochs must be positive"));
        }
        if !(self.regularization >= 0.0 && self.regularization.is_finite()) {
            return Err(Error::invalid("regularization must be nonnegative"));
        }
        if !(self.init_scale >= 0.0 && self.init_scale.is_finite()) {
            return Err(Error::invalid("init_scale must be nonnegative"));
        }
        Ok(())
    }

    pub fn fit(
        &self,
        proper: &[Example],
    ) -> Result<(Arc<dyn PointPredictor>, Option<FitFallback>)> {
        self.validate()?;
        let first = proper
            .first()
            .ok_or_else(|| Error::invalid("cannot fit on an empty proper training sequence"))?;
        if proper.iter().all(|e| e.label() == first.label()) {
            let score = first.label() * f64::INFINITY;
            return Ok((
                Arc::new(ConstantPredictor(score)),
                Some(FitFallback::SingleClass),
            ));
        }
        Ok((Arc::new(LinearClassifier::train(proper, self)), None))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearClassifier {
    pub weights: Vec<f64>,
    pub bias: f64,
}

impl LinearClassifier {
    pub fn train(examples: &[Example], spec: &ClassifierSpec) -> Self {
        let dim = examples[0].dim();
        let l = examples.len() as f64;
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        let mut init = || {
            if spec.init_scale > 0.0 {
                rng.gen_range(-spec.init_scale..=spec.init_scale)
            } else {
                0.0
            }
        };
        let mut w: Vec<f64> = (0..dim).map(|_| init()).collect();
        let mut b = init();

        let average_from = spec.epochs / 2 + 1;
        let mut w_avg = vec![0.0; dim];
        let mut b_avg = 0.0;
        let mut averaged = 0usize;

        let mut grad_w = vec![0.0; dim];
        for t in 1..=spec.epochs {
            grad_w
                .iter_mut()
                .zip(&w)
                .for_each(|(g, wj)| *g = spec.regularization * wj);
            let mut grad_b = 0.0;
            for e in examples {
                let y = e.label();
                let s = dot(&w, e.features()) + b;
                if y * s < 1.0 {
                    for (g, x) in grad_w.iter_mut().zip(e.features()) {
                        *g -= y * x / l;
                    }
                    grad_b -= y / l;
                }
            }
            let step = spec.learning_rate / (t as f64).sqrt();
            for (wj, g) in w.iter_mut().zip(&grad_w) {
                *wj -= step * g;
            }
            b -= step * grad_b;

            if t >= average_from {
                averaged += 1;
                let a = 1.0 / averaged as f64;
                for (avg, wj) in w_avg.iter_mut().zip(&w) {
                    *avg += (wj - *avg) * a;
                }
                b_avg += (b - b_avg) * a;
            }
        }
        Self {
            weights: w_avg,
            bias: b_avg,
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl PointPredictor for LinearClassifier {
    fn predict(&self, features: &[f64]) -> f64 {
        dot(&self.weights, features) + self.bias
    }
}
