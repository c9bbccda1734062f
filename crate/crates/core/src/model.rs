//! Problem model: the metric instance, scenario sets, first-stage decisions
//! and the two stage cost functions.
//!
//! Vertices are laid out as `R1 ++ R2 ++ D` in one dense symmetric distance
//! matrix. Riders and drivers are addressed by their index inside their own
//! group; the `*_vertex` helpers translate to the global layout.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matching::{self, Matching, WeightMatrix, EPS};

/// Second-stage scenario family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ScenarioSet {
    /// Listed scenarios; each entry holds indices into `R2`.
    Explicit(Vec<Vec<usize>>),
    /// Every subset of `R2` with at most `k` riders.
    Implicit { k: usize },
}

impl ScenarioSet {
    pub fn explicit(&self) -> Option<&[Vec<usize>]> {
        match self {
            ScenarioSet::Explicit(s) => Some(s),
            ScenarioSet::Implicit { .. } => None,
        }
    }

    /// Common scenario size, if there is one.
    pub fn uniform_size(&self) -> Result<usize> {
        match self {
            ScenarioSet::Implicit { k } => Ok(*k),
            ScenarioSet::Explicit(list) => {
                let k = list.first().map_or(0, Vec::len);
                if list.iter().all(|s| s.len() == k) {
                    Ok(k)
                } else {
                    Err(Error::NonUniformScenarios)
                }
            }
        }
    }

    /// Largest scenario a decision must be able to serve.
    pub fn max_size(&self) -> usize {
        match self {
            ScenarioSet::Implicit { k } => *k,
            ScenarioSet::Explicit(list) => list.iter().map(Vec::len).max().unwrap_or(0),
        }
    }
}

/// Full distance structure over `V = R1 ∪ R2 ∪ D`, plus the scenario family.
///
/// Infinite distances mark forbidden rider/driver pairs (used by the
/// total-weight reduction gadget); every other entry is finite.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricInstance {
    n_r1: usize,
    r2_labels: Vec<String>,
    n_d: usize,
    dist: Vec<f64>,
    scenarios: ScenarioSet,
}

impl MetricInstance {
    /// Builds an instance from a full `|V| x |V|` row-major distance matrix.
    pub fn new(
        n_r1: usize,
        r2_labels: Vec<String>,
        n_d: usize,
        dist: Vec<f64>,
        scenarios: ScenarioSet,
    ) -> Result<Self> {
        let nv = n_r1 + r2_labels.len() + n_d;
        if dist.len() != nv * nv {
            return Err(Error::InvalidInstance(format!(
                "distance table has {} entries, expected {}",
                dist.len(),
                nv * nv
            )));
        }
        if n_r1 == 0 {
            return Err(Error::InvalidInstance("R1 must be nonempty".into()));
        }
        if dist.iter().any(|x| x.is_nan() || *x < 0.0) {
            return Err(Error::InvalidInstance("distances must be nonnegative numbers".into()));
        }
        let n = r2_labels.len();
        match &scenarios {
            ScenarioSet::Explicit(list) => {
                for (si, s) in list.iter().enumerate() {
                    if s.is_empty() {
                        return Err(Error::InvalidInstance(format!("scenario {si} is empty")));
                    }
                    let mut sorted = s.clone();
                    sorted.sort_unstable();
                    sorted.dedup();
                    if sorted.len() != s.len() {
                        return Err(Error::InvalidInstance(format!("scenario {si} repeats a rider")));
                    }
                    if let Some(&r) = s.iter().find(|&&r| r >= n) {
                        return Err(Error::InvalidInstance(format!("scenario {si} names rider {r} outside R2")));
                    }
                }
            }
            ScenarioSet::Implicit { k } => {
                if *k == 0 || *k > n {
                    return Err(Error::InvalidInstance(format!("implicit k={k} outside 1..={n}")));
                }
            }
        }
        Ok(MetricInstance { n_r1, r2_labels, n_d, dist, scenarios })
    }

    /// Same distances, different scenario family.
    pub fn with_scenarios(&self, scenarios: ScenarioSet) -> Result<Self> {
        MetricInstance::new(self.n_r1, self.r2_labels.clone(), self.n_d, self.dist.clone(), scenarios)
    }

    pub fn n_r1(&self) -> usize {
        self.n_r1
    }

    pub fn n_r2(&self) -> usize {
        self.r2_labels.len()
    }

    pub fn n_d(&self) -> usize {
        self.n_d
    }

    pub fn n_vertices(&self) -> usize {
        self.n_r1 + self.r2_labels.len() + self.n_d
    }

    pub fn r2_labels(&self) -> &[String] {
        &self.r2_labels
    }

    pub fn scenarios(&self) -> &ScenarioSet {
        &self.scenarios
    }

    pub fn r1_vertex(&self, i: usize) -> usize {
        i
    }

    pub fn r2_vertex(&self, j: usize) -> usize {
        self.n_r1 + j
    }

    pub fn driver_vertex(&self, k: usize) -> usize {
        self.n_r1 + self.r2_labels.len() + k
    }

    /// Distance between two global vertices.
    #[inline]
    pub fn d(&self, u: usize, v: usize) -> f64 {
        self.dist[u * self.n_vertices() + v]
    }

    pub fn dist_matrix(&self) -> &[f64] {
        &self.dist
    }

    pub fn d_r1(&self, rider: usize, driver: usize) -> f64 {
        self.d(self.r1_vertex(rider), self.driver_vertex(driver))
    }

    pub fn d_r2(&self, rider: usize, driver: usize) -> f64 {
        self.d(self.r2_vertex(rider), self.driver_vertex(driver))
    }

    pub fn d_r2_r2(&self, a: usize, b: usize) -> f64 {
        self.d(self.r2_vertex(a), self.r2_vertex(b))
    }

    pub fn d_drivers(&self, a: usize, b: usize) -> f64 {
        self.d(self.driver_vertex(a), self.driver_vertex(b))
    }

    pub fn all_drivers(&self) -> Vec<usize> {
        (0..self.n_d).collect()
    }

    /// `R1 x drivers` weight matrix; infinite distances are forbidden edges.
    pub fn r1_matrix(&self, drivers: &[usize]) -> WeightMatrix {
        WeightMatrix::from_fn(self.n_r1, drivers.len(), |i, j| finite(self.d_r1(i, drivers[j])))
    }

    /// `riders x drivers` weight matrix for second-stage riders.
    pub fn r2_matrix(&self, riders: &[usize], drivers: &[usize]) -> WeightMatrix {
        WeightMatrix::from_fn(riders.len(), drivers.len(), |i, j| finite(self.d_r2(riders[i], drivers[j])))
    }

    /// Drivers not in `d1`, in index order.
    pub fn complement(&self, d1: &[usize]) -> Vec<usize> {
        let mut used = vec![false; self.n_d];
        for &k in d1 {
            used[k] = true;
        }
        (0..self.n_d).filter(|&k| !used[k]).collect()
    }
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

/// First-stage decision: the driver set `D1` and a matching of `R1` onto it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FirstStageDecision {
    /// Sorted driver indices.
    pub drivers: Vec<usize>,
    /// Pairs `(R1 rider, driver index)`.
    pub matching: Matching,
}

impl FirstStageDecision {
    /// Decision induced by a min-weight perfect matching of `R1` into
    /// `drivers`; the driver set is recomputed from the matching.
    pub fn from_driver_set(inst: &MetricInstance, drivers: &[usize]) -> Result<Self> {
        let w = inst.r1_matrix(drivers);
        let m = matching::min_weight_perfect_matching(&w)?;
        let pairs: Vec<(usize, usize)> = m.pairs.iter().map(|&(i, j)| (i, drivers[j])).collect();
        let mut chosen: Vec<usize> = pairs.iter().map(|&(_, k)| k).collect();
        chosen.sort_unstable();
        Ok(FirstStageDecision {
            drivers: chosen,
            matching: Matching { pairs, total_weight: m.total_weight, bottleneck: m.bottleneck },
        })
    }

    pub fn check(&self, inst: &MetricInstance) -> Result<()> {
        let mut d = self.drivers.clone();
        d.sort_unstable();
        d.dedup();
        if d.len() != inst.n_r1() || d.len() != self.drivers.len() || d.iter().any(|&k| k >= inst.n_d()) {
            return Err(Error::InvalidArgument(format!(
                "decision must name {} distinct drivers below {}",
                inst.n_r1(),
                inst.n_d()
            )));
        }
        Ok(())
    }
}

/// Scenario cost row in a report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScenarioCost {
    pub riders: Vec<usize>,
    pub cost2: f64,
}

/// Objective decomposition for one decision.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolveReport {
    pub cost1: f64,
    /// One row per scenario; implicit evaluation keeps only the worst one.
    pub per_scenario_cost2: Vec<ScenarioCost>,
    pub worst_cost2: f64,
    /// Index of the worst row in `per_scenario_cost2` (lowest on ties).
    pub worst_scenario: Option<usize>,
    pub total: f64,
    pub solver_name: String,
    pub opt2_guess: Option<f64>,
}

impl SolveReport {
    pub(crate) fn from_rows(cost1: f64, rows: Vec<ScenarioCost>) -> Self {
        let mut worst = None;
        let mut worst_cost2 = 0.0;
        for (i, row) in rows.iter().enumerate() {
            if worst.is_none() || row.cost2 > worst_cost2 {
                worst = Some(i);
                worst_cost2 = row.cost2;
            }
        }
        SolveReport {
            cost1,
            per_scenario_cost2: rows,
            worst_cost2,
            worst_scenario: worst,
            total: cost1 + worst_cost2,
            solver_name: String::new(),
            opt2_guess: None,
        }
    }

    pub fn named(mut self, name: &str, guess: Option<f64>) -> Self {
        self.solver_name = name.to_string();
        self.opt2_guess = guess;
        self
    }
}

/// Average weight of the min-weight perfect matching of `R1` into the
/// decision's drivers, recomputed from scratch.
pub fn cost1(inst: &MetricInstance, d1: &FirstStageDecision) -> Result<f64> {
    Ok(cost1_of_drivers(inst, &d1.drivers)? / inst.n_r1() as f64)
}

/// Total weight of the min-weight perfect matching of `R1` into `drivers`.
pub(crate) fn cost1_of_drivers(inst: &MetricInstance, drivers: &[usize]) -> Result<f64> {
    if drivers.len() < inst.n_r1() {
        return Err(Error::InsufficientDrivers { needed: inst.n_r1(), available: drivers.len() });
    }
    Ok(matching::min_weight_perfect_matching(&inst.r1_matrix(drivers))?.total_weight)
}

/// Bottleneck value of matching scenario `s` into `available`.
pub fn cost2(inst: &MetricInstance, available: &[usize], s: &[usize]) -> Result<f64> {
    if available.len() < s.len() {
        return Err(Error::InsufficientDrivers { needed: s.len(), available: available.len() });
    }
    matching::bottleneck_value(&inst.r2_matrix(s, available)).map_err(|_| Error::InsufficientDrivers {
        needed: s.len(),
        available: available.len(),
    })
}

/// Driver surplus `|D| - |R1| - k`.
pub fn surplus(inst: &MetricInstance) -> Result<i64> {
    let k = inst.scenarios().uniform_size()?;
    Ok(inst.n_d() as i64 - inst.n_r1() as i64 - k as i64)
}

/// One broken metric axiom.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Violation {
    NonZeroDiagonal { vertex: usize, value: f64 },
    Asymmetric { a: usize, b: usize },
    Triangle { a: usize, b: usize, c: usize },
}

/// Lists every violated metric invariant (tolerance `1e-9`). A triangle
/// violation `(a, b, c)` with `a < c` means `d(a,c) > d(a,b) + d(b,c)`.
pub fn validate(inst: &MetricInstance) -> Vec<Violation> {
    validate_table(inst.n_vertices(), inst.dist_matrix())
}

pub(crate) fn validate_table(nv: usize, dist: &[f64]) -> Vec<Violation> {
    let d = |u: usize, v: usize| dist[u * nv + v];
    let mut out = Vec::new();
    for a in 0..nv {
        if d(a, a) != 0.0 {
            out.push(Violation::NonZeroDiagonal { vertex: a, value: d(a, a) });
        }
        for b in a + 1..nv {
            let (x, y) = (d(a, b), d(b, a));
            if x != y && !((x - y).abs() <= EPS) {
                out.push(Violation::Asymmetric { a, b });
            }
        }
    }
    for a in 0..nv {
        for b in 0..nv {
            let ab = d(a, b);
            if b == a || ab.is_infinite() {
                continue;
            }
            for c in a + 1..nv {
                if c == b {
                    continue;
                }
                let via = ab + d(b, c);
                if d(a, c) > via + EPS {
                    out.push(Violation::Triangle { a, b, c });
                }
            }
        }
    }
    out
}

/// All-pairs shortest-path completion of a partial distance table.
///
/// `raw[u][v] = None` means "no direct edge". Returns the full row-major
/// matrix. When `allow_disconnected` is false, an unreachable pair raises
/// `DisconnectedVertices`; otherwise it is left at infinity.
pub fn metric_closure(raw: &[Vec<Option<f64>>], allow_disconnected: bool) -> Result<Vec<f64>> {
    let nv = raw.len();
    let mut d = vec![f64::INFINITY; nv * nv];
    for u in 0..nv {
        if raw[u].len() != nv {
            return Err(Error::InvalidInstance("raw distance table is not square".into()));
        }
        d[u * nv + u] = 0.0;
        for v in 0..nv {
            if u == v {
                continue;
            }
            let x = [raw[u][v], raw[v][u]].into_iter().flatten().fold(f64::INFINITY, f64::min);
            if x < 0.0 {
                return Err(Error::InvalidInstance(format!("negative raw distance between {u} and {v}")));
            }
            d[u * nv + v] = d[u * nv + v].min(x);
        }
    }
    for k in 0..nv {
        for u in 0..nv {
            let uk = d[u * nv + k];
            if uk.is_infinite() {
                continue;
            }
            for v in 0..nv {
                let via = uk + d[k * nv + v];
                if via < d[u * nv + v] {
                    d[u * nv + v] = via;
                }
            }
        }
    }
    if !allow_disconnected {
        for u in 0..nv {
            for v in u + 1..nv {
                if d[u * nv + v].is_infinite() {
                    return Err(Error::DisconnectedVertices(u, v));
                }
            }
        }
    }
    Ok(d)
}
