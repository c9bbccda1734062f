#![allow(dead_code)]

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tsrm_core::matching::WeightMatrix;
use tsrm_core::model::{MetricInstance, ScenarioSet};

pub const TOL: f64 = 1e-9;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random weight matrix with `forbid` chance per missing edge. Half the
/// matrices use small integers so that ties are common.
pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, forbid: f64) -> WeightMatrix {
    let ints = rng.gen_bool(0.5);
    let cells: Vec<Option<f64>> = (0..rows * cols)
        .map(|_| {
            if rng.gen_bool(forbid) {
                None
            } else if ints {
                Some(rng.gen_range(0..6) as f64)
            } else {
                Some(rng.gen::<f64>() * 10.0)
            }
        })
        .collect();
    WeightMatrix::from_fn(rows, cols, |i, j| cells[i * cols + j])
}

/// Every row-saturating assignment, as `(total, max)` pairs.
pub fn saturating_assignments(w: &WeightMatrix) -> Vec<(f64, f64)> {
    fn go(w: &WeightMatrix, i: usize, used: &mut Vec<bool>, acc: (f64, f64), out: &mut Vec<(f64, f64)>) {
        if i == w.rows() {
            out.push(acc);
            return;
        }
        for j in 0..w.cols() {
            if let (false, Some(x)) = (used[j], w.weight(i, j)) {
                used[j] = true;
                go(w, i + 1, used, (acc.0 + x, acc.1.max(x)), out);
                used[j] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(w, 0, &mut vec![false; w.cols()], (0.0, 0.0), &mut out);
    out
}

/// `(max cardinality, min weight at that cardinality)` over all partial
/// matchings.
pub fn brute_max_card_min_weight(w: &WeightMatrix) -> (usize, f64) {
    fn go(w: &WeightMatrix, i: usize, used: &mut Vec<bool>, card: usize, weight: f64, best: &mut (usize, f64)) {
        if i == w.rows() {
            if card > best.0 || (card == best.0 && weight < best.1) {
                *best = (card, weight);
            }
            return;
        }
        go(w, i + 1, used, card, weight, best);
        for j in 0..w.cols() {
            if let (false, Some(x)) = (used[j], w.weight(i, j)) {
                used[j] = true;
                go(w, i + 1, used, card + 1, weight + x, best);
                used[j] = false;
            }
        }
    }
    let mut best = (0, 0.0);
    go(w, 0, &mut vec![false; w.cols()], 0, 0.0, &mut best);
    best
}

fn euclid(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).hypot(a.1 - b.1)
}

/// Instance over random plane points; with `grid` the points are integer so
/// distances tie often.
pub fn point_instance(rng: &mut ChaCha8Rng, r1: usize, r2: usize, d: usize, scenarios: ScenarioSet, grid: bool) -> MetricInstance {
    let nv = r1 + r2 + d;
    let pts: Vec<(f64, f64)> = (0..nv)
        .map(|_| {
            if grid {
                (rng.gen_range(0..6) as f64, rng.gen_range(0..6) as f64)
            } else {
                (rng.gen::<f64>() * 10.0, rng.gen::<f64>() * 10.0)
            }
        })
        .collect();
    let mut dist = vec![0.0; nv * nv];
    for u in 0..nv {
        for v in 0..nv {
            dist[u * nv + v] = euclid(pts[u], pts[v]);
        }
    }
    let labels = (0..r2).map(|j| format!("s{j}")).collect();
    MetricInstance::new(r1, labels, d, dist, scenarios).unwrap()
}

/// `p` random scenarios of sizes up to `max_size` over `0..n_r2`.
pub fn random_scenarios(rng: &mut ChaCha8Rng, n_r2: usize, p: usize, size: usize) -> Vec<Vec<usize>> {
    (0..p)
        .map(|_| {
            let mut s = rand::seq::index::sample(rng, n_r2, size).into_vec();
            s.sort_unstable();
            s
        })
        .collect()
}

/// Explicit instance with `p` scenarios of one size; `|R1| <= 4`, scenario
/// size `<= 4`, `|D| <= 9`.
pub fn small_explicit(seed: u64, p: usize) -> MetricInstance {
    let mut rng = rng(seed);
    let r1 = rng.gen_range(1..=4);
    let k = rng.gen_range(1..=4);
    let d = rng.gen_range(r1 + k..=9);
    let r2 = if p == 1 { k } else { rng.gen_range(k..=(k * p).min(8)) };
    let sc = random_scenarios(&mut rng, r2, p, k);
    let grid = rng.gen_bool(0.3);
    point_instance(&mut rng, r1, r2, d, ScenarioSet::Explicit(sc), grid)
}

/// Explicit instance with zero surplus.
pub fn no_surplus_explicit(seed: u64, p: usize) -> MetricInstance {
    let mut rng = rng(seed);
    let r1 = rng.gen_range(1..=4);
    let k = rng.gen_range(1..=3);
    let r2 = rng.gen_range(k..=(k * p).min(7));
    let sc = random_scenarios(&mut rng, r2, p, k);
    let grid = rng.gen_bool(0.3);
    point_instance(&mut rng, r1, r2, r1 + k, ScenarioSet::Explicit(sc), grid)
}

/// Implicit instance with surplus `l`.
pub fn implicit(seed: u64, r1: usize, n: usize, k: usize, l: usize) -> MetricInstance {
    let mut rng = rng(seed);
    let grid = rng.gen_bool(0.3);
    point_instance(&mut rng, r1, n, r1 + k + l, ScenarioSet::Implicit { k }, grid)
}

/// Trip log whose three second-stage windows (today, a week ago, two
/// weeks ago) hold pickups at identical positions.
pub fn planted_trip_log(seed: u64) -> String {
    const DAY: i64 = 86_400;
    let t0 = chrono::NaiveDate::from_ymd_opt(2013, 10, 22).unwrap().and_hms_opt(8, 0, 0).unwrap().and_utc().timestamp();
    let mut rng = rng(seed);
    let mut pos = || (114.0 + rng.gen::<f64>() * 0.15, 22.51 + rng.gen::<f64>() * 0.06);
    let fmt = |t: i64| chrono::DateTime::from_timestamp(t, 0).unwrap().format("%Y-%m-%d %H:%M:%S").to_string();
    let mut rows = Vec::new();
    let pickup = |rows: &mut Vec<(i64, String, (f64, f64), u8)>, id: String, t: i64, p: (f64, f64)| {
        rows.push((t, id.clone(), p, 0));
        rows.push((t + 5, id, p, 1));
    };
    for i in 0..3 {
        pickup(&mut rows, format!("p{i}"), t0 + 5 + i, pos());
    }
    let future: Vec<(f64, f64)> = (0..2).map(|_| pos()).collect();
    for days in [0, 7, 14] {
        for (j, &p) in future.iter().enumerate() {
            pickup(&mut rows, format!("q{days}_{j}"), t0 + 65 + j as i64 - days * DAY, p);
        }
    }
    for i in 0..10 {
        rows.push((t0 - 100, format!("d{i}"), pos(), 0));
    }
    rows.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
    let mut out = String::from("taxi_id,time,lon,lat,occupied,speed,direction\n");
    for (t, id, (lon, lat), occ) in rows {
        writeln!(out, "{id},{},{lon:.6},{lat:.6},{occ},0,0", fmt(t)).unwrap();
    }
    out
}

pub const PLANTED_WINDOW: &str = "2013-10-22 08:00:00";
