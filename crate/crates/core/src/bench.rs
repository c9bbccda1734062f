//! In-sample and out-of-sample comparison of greedy against the
//! two-scenario solver.
//!
//! Per batch: both methods commit a first stage using the past-day
//! scenarios; each is then charged on the realized scenario `S*` and
//! compared with the exact single-scenario optimum for `S*`.

use std::fmt::Write as _;
use std::path::Path;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::evaluate::eval_explicit;
use crate::instances::trips::{build_trip_instance, BoundingBox, TripRecord, WindowSpec};
use crate::matching;
use crate::model::{self, FirstStageDecision, MetricInstance, ScenarioSet};
use crate::solvers::{solve_greedy, solve_p_scenarios, solve_single_scenario};

pub const CSV_HEADER: &str =
    "window,d,r1,s_star,greedy_over_opt,alg_over_opt,insample_ratio,bottleneck_ratio,total_weight_ratio";

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRow {
    pub window: String,
    pub d: usize,
    pub r1: usize,
    pub s_star: usize,
    /// `Gr(S*) / OPT(S*)`.
    pub greedy_over_opt: f64,
    /// `Alg(S*) / OPT(S*)`.
    pub alg_over_opt: f64,
    /// `Gr(S1,S2) / Alg(S1,S2)`.
    pub insample_ratio: f64,
    /// Greedy's bottleneck on `S*` over the solver's.
    pub bottleneck_ratio: f64,
    /// Greedy's total matching weight (both stages, `S*`) over the solver's.
    pub total_weight_ratio: f64,
}

impl BenchRow {
    pub fn to_csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.window,
            self.d,
            self.r1,
            self.s_star,
            self.greedy_over_opt,
            self.alg_over_opt,
            self.insample_ratio,
            self.bottleneck_ratio,
            self.total_weight_ratio
        )
    }
}

pub fn to_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        writeln!(out, "{}", r.to_csv_line()).expect("writing to a String");
    }
    out
}

/// `x / y` with `0 / 0 = 1`.
pub fn ratio(x: f64, y: f64) -> f64 {
    if y == 0.0 {
        if x == 0.0 {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        x / y
    }
}

/// Costs of one decision on the realized scenario.
struct Realized {
    total: f64,
    bottleneck: f64,
    total_weight: f64,
}

fn on_realized(inst: &MetricInstance, d1: &FirstStageDecision, s_star: &[usize]) -> Result<Realized> {
    let c1 = model::cost1(inst, d1)?;
    let w1 = c1 * inst.n_r1() as f64;
    if s_star.is_empty() {
        return Ok(Realized { total: c1, bottleneck: 0.0, total_weight: w1 });
    }
    let rest = inst.complement(&d1.drivers);
    let bottleneck = model::cost2(inst, &rest, s_star)?;
    let w2 = matching::min_weight_perfect_matching(&inst.r2_matrix(s_star, &rest))?.total_weight;
    Ok(Realized { total: c1 + bottleneck, bottleneck, total_weight: w1 + w2 })
}

/// Compares the two methods on `inst` (its explicit scenarios are the
/// prediction) against the realized riders `s_star`.
pub fn compare(label: &str, inst: &MetricInstance, s_star: &[usize]) -> Result<BenchRow> {
    let greedy = solve_greedy(inst)?;
    let alg = solve_p_scenarios(inst)?;
    let insample = ratio(eval_explicit(inst, &greedy)?.total, eval_explicit(inst, &alg)?.total);

    let opt_d1 = solve_single_scenario(inst, s_star)?;
    let opt = on_realized(inst, &opt_d1, s_star)?;
    let gr = on_realized(inst, &greedy, s_star)?;
    let al = on_realized(inst, &alg, s_star)?;
    Ok(BenchRow {
        window: label.to_string(),
        d: inst.n_d(),
        r1: inst.n_r1(),
        s_star: s_star.len(),
        greedy_over_opt: ratio(gr.total, opt.total),
        alg_over_opt: ratio(al.total, opt.total),
        insample_ratio: insample,
        bottleneck_ratio: ratio(gr.bottleneck, al.bottleneck),
        total_weight_ratio: ratio(gr.total_weight, al.total_weight),
    })
}

/// `count` per-repeat seeds derived from `base`.
pub fn repeat_seeds(base: u64, count: usize) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(base);
    (0..count).map(|_| rng.next_u64()).collect()
}

fn mean_row(rows: &[BenchRow]) -> BenchRow {
    let n = rows.len() as f64;
    let avg = |f: fn(&BenchRow) -> f64| rows.iter().map(f).sum::<f64>() / n;
    BenchRow {
        greedy_over_opt: avg(|r| r.greedy_over_opt),
        alg_over_opt: avg(|r| r.alg_over_opt),
        insample_ratio: avg(|r| r.insample_ratio),
        bottleneck_ratio: avg(|r| r.bottleneck_ratio),
        total_weight_ratio: avg(|r| r.total_weight_ratio),
        ..rows[0].clone()
    }
}

/// One batch of a trip log, averaged over `repeats` driver samples.
pub fn bench_window(
    records: &[TripRecord],
    label: &str,
    window: &WindowSpec,
    bbox: &BoundingBox,
    seed: u64,
    repeats: usize,
) -> Result<BenchRow> {
    if repeats == 0 {
        return Err(Error::InvalidArgument("repeats must be at least 1".into()));
    }
    let rows = repeat_seeds(seed, repeats)
        .into_iter()
        .map(|s| {
            let ti = build_trip_instance(records, window, bbox, s)?;
            compare(label, &ti.instance, &ti.realized)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(mean_row(&rows))
}

/// All batches in parallel; results keep the input order.
pub fn bench_trips(
    records: &[TripRecord],
    windows: &[(String, WindowSpec)],
    bbox: &BoundingBox,
    seed: u64,
    repeats: usize,
) -> Vec<Result<BenchRow>> {
    windows
        .par_iter()
        .map(|(label, w)| bench_window(records, label, w, bbox, seed, repeats))
        .collect()
}

/// Scenario roles for a stored instance: the first two scenarios predict
/// (the first one twice if alone) and the third, or else the last, is the
/// realized one.
pub fn split_stored(inst: &MetricInstance) -> Result<(MetricInstance, Vec<usize>)> {
    let list = inst.scenarios().explicit().ok_or(Error::WrongScenarioModel("bench needs explicit scenarios"))?;
    let s1 = list.first().ok_or_else(|| Error::InvalidArgument("instance has no scenarios".into()))?.clone();
    let s2 = list.get(1).cloned().unwrap_or_else(|| s1.clone());
    let s_star = list.get(2).or(list.last()).cloned().unwrap_or_default();
    Ok((inst.with_scenarios(ScenarioSet::Explicit(vec![s1, s2]))?, s_star))
}

/// Every `*.json` instance in `dir`, by file name.
pub fn bench_directory(dir: &Path) -> Result<Vec<Result<BenchRow>>> {
    let mut paths: Vec<_> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    Ok(paths
        .par_iter()
        .map(|p| {
            let label = p.file_stem().map_or_else(String::new, |s| s.to_string_lossy().into_owned());
            let inst = crate::io::read_instance(p)?;
            let (pred, s_star) = split_stored(&inst)?;
            compare(&label, &pred, &s_star)
        })
        .collect())
}
