use crate::model::{MetricInstance, ScenarioSet};

/// Points on a line: R1 positions, R2 positions, driver positions.
pub fn line(r1: &[f64], r2: &[f64], drivers: &[f64], scenarios: ScenarioSet) -> MetricInstance {
    let xs: Vec<f64> = r1.iter().chain(r2).chain(drivers).copied().collect();
    let nv = xs.len();
    let dist = (0..nv * nv).map(|t| (xs[t / nv] - xs[t % nv]).abs()).collect();
    let labels = (0..r2.len()).map(|j| format!("s{j}")).collect();
    MetricInstance::new(r1.len(), labels, drivers.len(), dist, scenarios).unwrap()
}
