//! Grouped false discovery rate control with correlation-adjusted step-up
//! thresholds (LCAST and QCAST), the grouped and ungrouped Benjamini–Hochberg
//! and Benjamini–Yekutieli benchmarks, and a Monte Carlo harness that
//! simulates grouped, block-correlated case/control data.
//!
//! The numeric core is generic over the scalar type (see [`scalar`]); the
//! aliases below fix it to `f64`, which is what the simulation, testing and
//! file-format layers use.

pub mod correlation;
pub mod error;
pub mod evaluation;
pub mod io;
pub mod pi0;
pub mod procedures;
pub mod pvalues;
pub mod scalar;
pub mod simulation;
pub mod testing;

pub use error::{CastError, Result, Violation};
pub use procedures::{run_adjustment, AdjustmentConfig, Method};
pub use pvalues::{FeatureId, GroupId, Record};

/// Exact rational scalar for the threshold factors.
pub type Rational = num_rational::Rational64;

pub type PValueSet = pvalues::GroupedPValueSet<f64>;
pub type Adjustment = procedures::AdjustmentResult<f64>;
pub type Correlation = correlation::GroupCorrelation<f64>;
pub type MeanCorrelations = correlation::MeanRowCorrelations<f64>;
pub type Summary = evaluation::EvaluationSummary<f64>;
