//! Instance generators and trip-log ingestion.

pub mod counterexamples;
pub mod random;
pub mod reductions;
pub mod trips;

pub use counterexamples::{gen_line_counterexample, gen_surplus_counterexample};
pub use random::{gen_random_euclidean, ScenarioSpec};
pub use reductions::{gen_from_2partition, gen_from_3dm, gen_from_set_cover};
pub use trips::{ingest_trips_csv, BoundingBox, TripInstance, TripRecord, WindowSpec};

use crate::error::Result;
use crate::model::{MetricInstance, ScenarioSet};

/// Instance whose vertices are points on the real line, laid out as
/// `r1 ++ r2 ++ drivers`.
pub fn on_line(
    r1: &[f64],
    r2: &[f64],
    r2_labels: Vec<String>,
    drivers: &[f64],
    scenarios: ScenarioSet,
) -> Result<MetricInstance> {
    let xs: Vec<f64> = r1.iter().chain(r2).chain(drivers).copied().collect();
    let nv = xs.len();
    let dist = (0..nv * nv).map(|t| (xs[t / nv] - xs[t % nv]).abs()).collect();
    MetricInstance::new(r1.len(), r2_labels, drivers.len(), dist, scenarios)
}
