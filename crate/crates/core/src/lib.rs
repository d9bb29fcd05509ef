//! Exact finite-space computation of the Gibbs-algorithm generalization quantities
//! (loss CDFs, partition functions, the complexity `Lambda_beta`, bound right-hand
//! sides) and seeded Monte Carlo checks of the corresponding high-probability bounds.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod beyond;
pub mod bounds;
pub mod error;
pub mod gibbs;
pub mod harness;
pub mod margins;
pub mod measures;
pub mod model;
pub mod seed;

pub use beyond::{DensityFamily, FnDensity, MonotoneDensity, MonotoneDensityPosterior};
pub use bounds::BoundReport;
pub use error::{Error, Result};
pub use gibbs::{GibbsPosterior, LambdaValue};
pub use margins::{LabeledPoint, LinearGrid, LinearHypothesis, MarginResult};
pub use measures::KappaValue;
pub use model::{DataSet, FiniteDataDomain, FiniteHypothesisSpace, Instance, LossProfile, StepCdf};
