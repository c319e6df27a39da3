//! Inductive randomness predictors (IRPs) and inductive conformal predictors
//! (ICPs) over the binary summary space `{0, 1}`.
//!
//! The crate is organised bottom-up:
//!
//! * [`types`] holds the shared domain types and the positional
//!   proper-training/calibration split.
//! * [`summaries`] turns a fitted point predictor into a binary inductive
//!   nonconformity measure (regression half-width threshold, or
//!   wrong-side-of-the-margin for a linear classifier).
//! * [`pvalues`] is the p-value engine: the binary IRP p-value obtained by
//!   maximizing a Bernoulli tail objective over the success rate, its
//!   closed forms and large-`m` constants, the ICP rank p-value and a
//!   p-variable that strictly dominates the ICP.
//! * [`pipelines`] wires the above into hedged prediction sets.
//! * [`validity`] contains independent oracles: exhaustive worst-case
//!   probabilities, p-variable audits, dominance checks, seeded Monte Carlo
//!   coverage runs and the table of asymptotic numerators.

pub mod error;
pub mod pipelines;
pub mod pvalues;
pub mod summaries;
pub mod types;
pub mod validity;

pub use error::{Error, Result};
pub use pipelines::{HedgedPrediction, PredictionPFunction, PredictionSet};
pub use pvalues::{AsymptoticConstant, EngineConfig, Rational};
pub use types::{DataSplit, Example, SummarySequence, Task};
