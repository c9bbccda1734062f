//! Instances built from 3-dimensional matching, set cover and 2-partition.
//!
//! Rider-to-driver weights are set directly; everything else comes from the
//! shortest-path closure.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::model::{metric_closure, MetricInstance, ScenarioSet};

/// Partial table over `R1 ++ R2 ++ D` with only rider/driver edges.
struct RawTable {
    n_riders: usize,
    raw: Vec<Vec<Option<f64>>>,
}

impl RawTable {
    fn new(n_riders: usize, n_d: usize) -> Self {
        let nv = n_riders + n_d;
        RawTable { n_riders, raw: vec![vec![None; nv]; nv] }
    }

    fn set(&mut self, rider: usize, driver: usize, w: f64) {
        let d = self.n_riders + driver;
        self.raw[rider][d] = Some(w);
        self.raw[d][rider] = Some(w);
    }
}

/// Two or three scenarios from a 3-dimensional matching instance with
/// coordinate sets `0..n` and triples `(u, v, w)`.
///
/// Drivers are the triples. With two scenarios (`U` and `V`) every `w`
/// contributes one first-stage rider per extra triple containing it; with
/// three (`U`, `V`, `W`) there are `|T| - n` interchangeable first-stage
/// riders at distance 1 from every driver. A rider is 1 from the triples
/// that contain it and 3 from the rest.
pub fn gen_from_3dm(n: usize, triples: &[(usize, usize, usize)], n_scenarios: usize) -> Result<MetricInstance> {
    if !(n_scenarios == 2 || n_scenarios == 3) {
        return Err(Error::MalformedTriples(format!("{n_scenarios} scenarios requested, need 2 or 3")));
    }
    if n == 0 {
        return Err(Error::MalformedTriples("empty coordinate sets".into()));
    }
    let mut seen = HashSet::new();
    for &t in triples {
        if t.0 >= n || t.1 >= n || t.2 >= n {
            return Err(Error::MalformedTriples(format!("triple {t:?} leaves 0..{n}")));
        }
        if !seen.insert(t) {
            return Err(Error::MalformedTriples(format!("triple {t:?} repeated")));
        }
    }
    if triples.len() <= n {
        return Err(Error::MalformedTriples(format!("need more than {n} triples, got {}", triples.len())));
    }
    let mut degree = vec![0usize; n];
    for t in triples {
        degree[t.2] += 1;
    }
    if let Some(w) = degree.iter().position(|&c| c == 0) {
        return Err(Error::MalformedTriples(format!("third coordinate {w} appears in no triple")));
    }

    // First-stage riders: the `w` they copy, or `None` when generic.
    let r1: Vec<Option<usize>> = if n_scenarios == 2 {
        (0..n).flat_map(|w| std::iter::repeat_n(Some(w), degree[w] - 1)).collect()
    } else {
        vec![None; triples.len() - n]
    };
    let n_r2 = n * n_scenarios;
    let n_riders = r1.len() + n_r2;
    let mut raw = RawTable::new(n_riders, triples.len());
    for (e, &(u, v, w)) in triples.iter().enumerate() {
        let hit = |x: bool| if x { 1.0 } else { 3.0 };
        for (i, copy) in r1.iter().enumerate() {
            raw.set(i, e, copy.map_or(1.0, |c| hit(c == w)));
        }
        let base = r1.len();
        for x in 0..n {
            raw.set(base + x, e, hit(x == u));
            raw.set(base + n + x, e, hit(x == v));
            if n_scenarios == 3 {
                raw.set(base + 2 * n + x, e, hit(x == w));
            }
        }
    }
    let dist = metric_closure(&raw.raw, false)?;
    let mut labels: Vec<String> = (0..n).map(|x| format!("u{x}")).collect();
    labels.extend((0..n).map(|x| format!("v{x}")));
    if n_scenarios == 3 {
        labels.extend((0..n).map(|x| format!("w{x}")));
    }
    let scenarios = (0..n_scenarios).map(|s| (s * n..(s + 1) * n).collect()).collect();
    MetricInstance::new(r1.len(), labels, triples.len(), dist, ScenarioSet::Explicit(scenarios))
}

/// Drivers are the sets, `m - p` first-stage riders sit at distance 1 from
/// every driver, and each universe element is a second-stage rider that is 1
/// from the sets containing it and 3 from the others. Scenarios are single
/// elements.
pub fn gen_from_set_cover(universe_n: usize, sets: &[Vec<usize>], p_cover: usize) -> Result<MetricInstance> {
    let m = sets.len();
    if universe_n == 0 {
        return Err(Error::InvalidArgument("empty universe".into()));
    }
    if p_cover == 0 || p_cover >= m {
        return Err(Error::InvalidArgument(format!("cover size {p_cover} must lie in 1..{m}")));
    }
    let mut covered = vec![false; universe_n];
    for set in sets {
        for &x in set {
            if x >= universe_n {
                return Err(Error::InvalidArgument(format!("element {x} outside the universe")));
            }
            covered[x] = true;
        }
    }
    if let Some(x) = covered.iter().position(|c| !c) {
        return Err(Error::UncoveredElement(x));
    }
    let n_r1 = m - p_cover;
    let mut raw = RawTable::new(n_r1 + universe_n, m);
    for (j, set) in sets.iter().enumerate() {
        for i in 0..n_r1 {
            raw.set(i, j, 1.0);
        }
        for x in 0..universe_n {
            raw.set(n_r1 + x, j, if set.contains(&x) { 1.0 } else { 3.0 });
        }
    }
    let dist = metric_closure(&raw.raw, false)?;
    let labels = (0..universe_n).map(|x| format!("e{x}")).collect();
    MetricInstance::new(n_r1, labels, m, dist, ScenarioSet::Implicit { k: 1 })
}

/// Two-scenario total-weight instance from values `s_1..s_n`, with
/// `P = sum(s)`.
///
/// For each `j`: first-stage `r_j` reaches `delta_j` and `delta_{n+j}` at
/// `P`; the first-scenario rider reaches `delta_j` at `P` and
/// `delta_{n+j}` at `s_j`; the second-scenario rider reaches `delta_j` at
/// `s_j` and `delta_{n+j}` at `P`. Every other rider/driver pair is
/// forbidden, so distances across different `j` are infinite.
pub fn gen_from_2partition(s_values: &[u64]) -> Result<MetricInstance> {
    let n = s_values.len();
    if n == 0 || n % 2 == 1 {
        return Err(Error::OddCardinality(n));
    }
    if s_values.contains(&0) {
        return Err(Error::InvalidArgument("values must be positive".into()));
    }
    let p: f64 = s_values.iter().sum::<u64>() as f64;
    let mut raw = RawTable::new(3 * n, 2 * n);
    for (j, &s) in s_values.iter().enumerate() {
        let s = s as f64;
        raw.set(j, j, p);
        raw.set(j, n + j, p);
        raw.set(n + j, j, p);
        raw.set(n + j, n + j, s);
        raw.set(2 * n + j, j, s);
        raw.set(2 * n + j, n + j, p);
    }
    let dist = metric_closure(&raw.raw, true)?;
    let labels = (0..2 * n).map(|x| format!("r{}", n + x + 1)).collect();
    let scenarios = vec![(0..n).collect(), (n..2 * n).collect()];
    MetricInstance::new(n, labels, 2 * n, dist, ScenarioSet::Explicit(scenarios))
}
