//! Solvers for two-stage robust bottleneck matching.
//!
//! A first batch of riders `R1` must be matched now, paying the average
//! distance; later a scenario `S` drawn from `R2` arrives and must be served
//! by the drivers left over, paying the bottleneck distance. The goal is to
//! pick the first-stage drivers so that the first-stage cost plus the worst
//! scenario's bottleneck is small.

pub mod bench;
pub mod cli;
pub mod error;
pub mod instances;
pub mod io;
pub mod evaluate;
pub mod matching;
pub mod model;
pub mod solvers;
pub mod variants;

#[cfg(test)]
mod testutil;

pub use error::{Error, Result};
pub use model::{FirstStageDecision, MetricInstance, ScenarioSet, SolveReport};
