//! Ordinary least-squares linear regression with an intercept.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{ConstantPredictor, FitFallback, PointPredictor};
use crate::error::{Error, Result};
use crate::types::Example;

/// Relative singular-value cutoff below which the design is treated as
/// rank deficient.
const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegressorSpec {
    #[default]
    LeastSquares,
    MeanLabel,
}

impl RegressorSpec {
    pub fn fit(
        &self,
        proper: &[Example],
    ) -> Result<(Arc<dyn PointPredictor>, Option<FitFallback>)> {
        if proper.is_empty() {
            return Err(Error::invalid(
                "cannot fit on an empty proper training sequence",
            ));
        }
        match self {
            RegressorSpec::MeanLabel => Ok((Arc::new(mean_label(proper)), None)),
            RegressorSpec::LeastSquares => match LeastSquares::fit(proper) {
                Some(model) => Ok((Arc::new(model), None)),
                None => Ok((
                    Arc::new(mean_label(proper)),
                    Some(FitFallback::DegenerateDesign),
                )),
            },
        }
    }
}

fn mean_label(examples: &[Example]) -> ConstantPredictor {
    let sum: f64 = examples.iter().map(Example::label).sum();
    ConstantPredictor(sum / examples.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeastSquares {
    pub intercept: f64,
    pub weights: Vec<f64>,
}

impl LeastSquares {
    /// Solves the least-squares problem via SVD. Returns `None` when the
    /// design matrix `[1 | X]` does not have full column rank.
    pub fn fit(examples: &[Example]) -> Option<Self> {
        let rows = examples.len();
        let dim = examples.first()?.dim();
        let cols = dim + 1;
        if rows < cols {
            return None;
        }
        let design = DMatrix::from_fn(rows, cols, |i, j| {
            if j == 0 {
                1.0
            } else {
                examples[i].features()[j - 1]
            }
        });
        let target = DVector::from_iterator(rows, examples.iter().map(Example::label));
        let svd = design.svd(true, true);
        let max_sv = svd.singular_values.max();
        let min_sv = svd.singular_values.min();
        if max_sv.is_nan() || max_sv <= 0.0 || min_sv <= RANK_TOL * max_sv {
            return None;
        }
        let beta = svd.solve(&target, 0.0).ok()?;
        if beta.iter().any(|b| !b.is_finite()) {
            return None;
        }
        Some(Self {
            intercept: beta[0],
            weights: beta.iter().skip(1).copied().collect(),
        })
    }
}

impl PointPredictor for LeastSquares {
    fn predict(&self, features: &[f64]) -> f64 {
        self.intercept
            + self
                .weights
                .iter()
                .zip(features)
                .map(|(w, x)| w * x)
                .sum::<f64>()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_plane() {
        let ex: Vec<_> = [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (2.0, 3.0)]
            .iter()
            .map(|&(a, b)| Example::regression(vec![a, b], 1.0 + 2.0 * a - 3.0 * b).unwrap())
            .collect();
        let m = LeastSquares::fit(&ex).unwrap();
        assert!((m.intercept - 1.0).abs() < 1e-10);
        assert!((m.weights[0] - 2.0).abs() < 1e-10);
        assert!((m.weights[1] + 3.0).abs() < 1e-10);
    }

    #[test]
    fn collinear_design_is_degenerate() {
        // every object identical: intercept and slope not identifiable
        let ex: Vec<_> = (0..5)
            .map(|i| Example::regression(vec![2.0], i as f64).unwrap())
            .collect();
        assert!(LeastSquares::fit(&ex).is_none());
        let (p, fb) = RegressorSpec::LeastSquares.fit(&ex).unwrap();
        assert_eq!(fb, Some(FitFallback::DegenerateDesign));
        assert_eq!(p.predict(&[0.0]), 2.0);
    }

    #[test]
    fn mean_label_spec() {
        let ex: Vec<_> = (0..4)
            .map(|i| Example::regression(vec![i as f64], i as f64).unwrap())
            .collect();
        let (p, fb) = RegressorSpec::MeanLabel.fit(&ex).unwrap();
        assert_eq!(fb, None);
        assert_eq!(p.predict(&[10.0]), 1.5);
    }
}
