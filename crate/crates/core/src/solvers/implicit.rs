//! Implicit-scenario solvers: no surplus, small surplus, and single-rider
//! scenarios with arbitrary surplus.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::evaluate;
use crate::model::{self, FirstStageDecision, MetricInstance, ScenarioSet};

use super::explicit::{pick_lower, solve_single_scenario, Opt2Guess};
use super::Solution;

/// Driver whose `k` nearest second-stage riders are tightest.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CenterSelection {
    pub center: usize,
    /// The `k` nearest `R2` riders, nearest first.
    pub core_riders: Vec<usize>,
    pub core_radius: f64,
}

/// The `ℓ` farthest riders from the center, farthest first.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OutlierLadder {
    pub ordered: Vec<usize>,
}

fn implicit_k(inst: &MetricInstance) -> Result<usize> {
    match inst.scenarios() {
        ScenarioSet::Implicit { k } => Ok(*k),
        ScenarioSet::Explicit(_) => Err(Error::WrongScenarioModel("expected implicit scenarios")),
    }
}

fn nonnegative_surplus(inst: &MetricInstance) -> Result<i64> {
    let l = model::surplus(inst)?;
    if l < 0 {
        let needed = inst.n_r1() + inst.scenarios().max_size();
        return Err(Error::InsufficientDrivers { needed, available: inst.n_d() });
    }
    Ok(l)
}

/// Solves the single scenario made of the `k` lowest-index riders.
pub fn solve_no_surplus(inst: &MetricInstance) -> Result<FirstStageDecision> {
    let k = implicit_k(inst)?;
    let l = nonnegative_surplus(inst)?;
    if l != 0 {
        return Err(Error::SurplusNotZero(l));
    }
    let s: Vec<usize> = (0..k).collect();
    solve_single_scenario(inst, &s)
}

/// Riders sorted by distance to `driver`, ties by index.
fn riders_by_distance(inst: &MetricInstance, driver: usize) -> Vec<usize> {
    let mut rs: Vec<usize> = (0..inst.n_r2()).collect();
    rs.sort_by(|&a, &b| inst.d_r2(a, driver).total_cmp(&inst.d_r2(b, driver)).then(a.cmp(&b)));
    rs
}

pub fn select_center(inst: &MetricInstance) -> Result<CenterSelection> {
    let k = implicit_k(inst)?;
    let mut best: Option<CenterSelection> = None;
    for driver in 0..inst.n_d() {
        let core: Vec<usize> = riders_by_distance(inst, driver).into_iter().take(k).collect();
        let radius = core.last().map_or(0.0, |&r| inst.d_r2(r, driver));
        if best.as_ref().is_none_or(|b| radius < b.core_radius) {
            best = Some(CenterSelection { center: driver, core_riders: core, core_radius: radius });
        }
    }
    best.ok_or(Error::InsufficientDrivers { needed: 1, available: 0 })
}

pub fn outlier_ladder(inst: &MetricInstance, center: usize) -> Result<OutlierLadder> {
    let l = model::surplus(inst)?;
    if l < 0 {
        return Err(Error::NegativeSurplus(l));
    }
    let mut rs: Vec<usize> = (0..inst.n_r2()).collect();
    rs.sort_by(|&a, &b| inst.d_r2(b, center).total_cmp(&inst.d_r2(a, center)).then(a.cmp(&b)));
    rs.truncate(l as usize);
    Ok(OutlierLadder { ordered: rs })
}

/// Center and outlier configurations, scored on the two proxy scenarios.
pub fn solve_small_surplus(inst: &MetricInstance) -> Result<FirstStageDecision> {
    let k = implicit_k(inst)?;
    let l = nonnegative_surplus(inst)?;
    if l >= k as i64 {
        return Err(Error::SurplusTooLarge { surplus: l, k });
    }
    if 2 * k * k > inst.n_r2() {
        log::warn!("k = {k} exceeds sqrt(n/2) for n = {}; the 3/17 bound is not guaranteed", inst.n_r2());
    }
    let center = select_center(inst)?;
    let ladder = outlier_ladder(inst, center.center)?.ordered;
    let s1 = &center.core_riders;

    let best = (0..=ladder.len())
        .into_par_iter()
        .map(|j| -> Result<(f64, usize, FirstStageDecision)> {
            let mut s: Vec<usize> = s1.iter().chain(&ladder[..j]).copied().collect();
            s.sort_unstable();
            s.dedup();
            let d1 = solve_single_scenario(inst, &s)?;
            let beta = evaluate::eval_proxy(inst, &d1, s1, &ladder)?;
            log::trace!("configuration {j}: beta = {beta}");
            Ok((beta, j, d1))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .reduce(pick_lower)
        .expect("at least one configuration");
    Ok(best.2)
}

/// Threshold greedy for `p`-supplier with clients in `R2` and facilities
/// among drivers. Returns at most `p` centers, sorted, or `None` when no
/// radius works (only possible with forbidden distances).
pub(crate) fn p_supplier_centers(
    inst: &MetricInstance,
    clients: &[usize],
    facilities: &[usize],
    p: usize,
) -> Option<Vec<usize>> {
    if clients.is_empty() {
        return Some(Vec::new());
    }
    let mut radii: Vec<f64> = clients
        .iter()
        .flat_map(|&c| facilities.iter().map(move |&f| inst.d_r2(c, f)))
        .filter(|x| x.is_finite())
        .collect();
    radii.sort_by(f64::total_cmp);
    radii.dedup();
    let nearest = |c: usize| {
        facilities
            .iter()
            .copied()
            .min_by(|&a, &b| inst.d_r2(c, a).total_cmp(&inst.d_r2(c, b)).then(a.cmp(&b)))
    };
    'radius: for &r in &radii {
        let mut marked = vec![false; clients.len()];
        let mut centers = Vec::new();
        for ci in 0..clients.len() {
            if marked[ci] {
                continue;
            }
            let c = clients[ci];
            let f = nearest(c)?;
            if inst.d_r2(c, f) > r || centers.len() == p {
                continue 'radius;
            }
            centers.push(f);
            for (cj, &other) in clients.iter().enumerate() {
                if inst.d_r2_r2(c, other) <= 2.0 * r {
                    marked[cj] = true;
                }
            }
        }
        centers.sort_unstable();
        centers.dedup();
        return Some(centers);
    }
    None
}

/// `p` facilities whose covering radius is within three times optimal.
/// Leftover slots are filled with the lowest-index unused facilities.
pub fn p_supplier_3approx(inst: &MetricInstance, clients: &[usize], facilities: &[usize], p: usize) -> Result<Vec<usize>> {
    if p > facilities.len() {
        return Err(Error::InvalidArgument(format!("p = {p} exceeds {} facilities", facilities.len())));
    }
    if p == 0 && !clients.is_empty() {
        return Err(Error::InvalidArgument("p must be positive when there are clients".into()));
    }
    let mut centers = p_supplier_centers(inst, clients, facilities, p).ok_or(Error::NoPerfectMatching)?;
    let mut sorted_f = facilities.to_vec();
    sorted_f.sort_unstable();
    for f in sorted_f {
        if centers.len() >= p {
            break;
        }
        if !centers.contains(&f) {
            centers.push(f);
        }
    }
    centers.sort_unstable();
    Ok(centers)
}

/// Largest distance from a client to its nearest chosen facility.
pub fn supplier_radius(inst: &MetricInstance, clients: &[usize], chosen: &[usize]) -> f64 {
    clients
        .iter()
        .map(|&c| chosen.iter().map(|&f| inst.d_r2(c, f)).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max)
}

/// Drops, in index order, every remaining driver within `radius` of a
/// driver that is still present.
pub fn prune_reserved(inst: &MetricInstance, reserved: &[usize], radius: f64) -> Vec<usize> {
    let mut alive = vec![true; reserved.len()];
    for a in 0..reserved.len() {
        if !alive[a] {
            continue;
        }
        for b in 0..reserved.len() {
            if b != a && alive[b] && inst.d_drivers(reserved[a], reserved[b]) <= radius {
                alive[b] = false;
            }
        }
    }
    reserved.iter().zip(alive).filter(|(_, keep)| *keep).map(|(&d, _)| d).collect()
}

/// Reserve drivers by `p`-supplier, thin them at `8 * guess`, match `R1`
/// into the rest.
pub fn solve_k1(inst: &MetricInstance) -> Result<FirstStageDecision> {
    Ok(solve_k1_detailed(inst)?.decision)
}

pub fn solve_k1_detailed(inst: &MetricInstance) -> Result<Solution> {
    let k = implicit_k(inst)?;
    if k != 1 {
        return Err(Error::InvalidArgument(format!("k must be 1, found {k}")));
    }
    if inst.n_d() <= inst.n_r1() {
        return Err(Error::InsufficientDrivers { needed: inst.n_r1() + 1, available: inst.n_d() });
    }
    let p = inst.n_d() - inst.n_r1();
    let clients: Vec<usize> = (0..inst.n_r2()).collect();
    let reserved = p_supplier_centers(inst, &clients, &inst.all_drivers(), p).ok_or(Error::NoPerfectMatching)?;
    let guesses = Opt2Guess::for_riders(inst, &clients).candidates;

    let mut seen = HashSet::new();
    let mut jobs = Vec::new();
    for (gi, &g) in guesses.iter().enumerate() {
        let kept = prune_reserved(inst, &reserved, 8.0 * g);
        if seen.insert(kept.clone()) {
            jobs.push((gi, kept));
        }
    }

    let limit = inst.n_r2() as u128;
    let best = jobs
        .into_par_iter()
        .filter_map(|(gi, kept)| {
            let pool = inst.complement(&kept);
            let d1 = FirstStageDecision::from_driver_set(inst, &pool).ok()?;
            let total = evaluate::eval_implicit_bruteforce(inst, &d1, limit).ok()?.total;
            Some((total, gi, d1))
        })
        .reduce_with(pick_lower);
    let (_, gi, decision) = best.ok_or(Error::NoPerfectMatching)?;
    Ok(Solution { decision, opt2_guess: Some(guesses[gi]) })
}
