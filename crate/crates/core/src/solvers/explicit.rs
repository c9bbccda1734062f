//! Explicit-scenario solvers: greedy, exact single scenario, and the
//! representative-scenario approximations for two and `p` scenarios.

use std::cmp::Ordering;
use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::evaluate;
use crate::matching::{self, Matching, WeightMatrix, EPS};
use crate::model::{self, FirstStageDecision, MetricInstance};

use super::Solution;

/// Candidate values for the optimal second-stage bottleneck.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Opt2Guess {
    /// Sorted distinct rider-to-driver distances.
    pub candidates: Vec<f64>,
    pub chosen: Option<f64>,
}

impl Opt2Guess {
    /// Distinct finite distances between `riders` (indices into `R2`) and
    /// every driver.
    pub fn for_riders(inst: &MetricInstance, riders: &[usize]) -> Self {
        let mut candidates: Vec<f64> = riders
            .iter()
            .flat_map(|&r| (0..inst.n_d()).map(move |k| inst.d_r2(r, k)))
            .filter(|x| x.is_finite())
            .collect();
        candidates.sort_by(f64::total_cmp);
        candidates.dedup();
        Opt2Guess { candidates, chosen: None }
    }
}

/// Merged scenario standing in for a pair of scenarios.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RepresentativeScenario {
    /// Sorted `R2` indices.
    pub riders: Vec<usize>,
    /// `(rider of the first set, rider of the second set)` pairs.
    pub matched_pairs: Vec<(usize, usize)>,
    pub threshold: f64,
}

/// First-stage drivers of the cheapest perfect matching of `R1` into all of
/// `D`, scenarios ignored.
pub fn solve_greedy(inst: &MetricInstance) -> Result<FirstStageDecision> {
    if inst.n_d() < inst.n_r1() {
        return Err(Error::InsufficientDrivers { needed: inst.n_r1(), available: inst.n_d() });
    }
    FirstStageDecision::from_driver_set(inst, &inst.all_drivers())
}

/// Exact solver for a single scenario `s` (indices into `R2`).
///
/// For a threshold `w`, scenario riders may only use drivers within `w` at
/// zero cost while `R1` pays its true distances; the cheapest saturating
/// matching then gives the best first stage compatible with bottleneck `w`.
/// Feasibility is monotone in `w` and the first-stage part is nonincreasing,
/// so intervals whose lower bound cannot beat the incumbent are skipped
/// without losing exactness.
pub fn solve_single_scenario(inst: &MetricInstance, s: &[usize]) -> Result<FirstStageDecision> {
    if s.is_empty() {
        return solve_greedy(inst);
    }
    let needed = inst.n_r1() + s.len();
    if inst.n_d() < needed {
        return Err(Error::InsufficientDrivers { needed, available: inst.n_d() });
    }
    let ts = Opt2Guess::for_riders(inst, s).candidates;
    let scan = ThresholdScan { inst, s, ts: &ts };

    let top = ts.len().checked_sub(1).ok_or(Error::NoPerfectMatching)?;
    let Some(f_top) = scan.at(top) else {
        return Err(Error::NoPerfectMatching);
    };
    let (mut lo, mut hi) = (0usize, top);
    let mut f_lo = None;
    while lo < hi {
        let mid = (lo + hi) / 2;
        match scan.at(mid) {
            Some(c) => {
                hi = mid;
                f_lo = Some(c);
            }
            None => lo = mid + 1,
        }
    }
    let first = f_lo.unwrap_or_else(|| f_top.clone());

    let mut best = Best::default();
    best.offer(&scan, lo, &first)?;
    best.offer(&scan, top, &f_top)?;
    scan.refine(lo, &first, top, &f_top, &mut best)?;
    let drivers = best.drivers.expect("a feasible threshold exists");
    FirstStageDecision::from_driver_set(inst, &drivers)
}

/// Result of one threshold: average first-stage cost and the drivers used.
#[derive(Clone, Debug)]
struct Candidate {
    cost1: f64,
    drivers: Vec<usize>,
}

struct ThresholdScan<'a> {
    inst: &'a MetricInstance,
    s: &'a [usize],
    ts: &'a [f64],
}

impl ThresholdScan<'_> {
    fn at(&self, idx: usize) -> Option<Candidate> {
        let inst = self.inst;
        let m = inst.n_r1();
        let w = self.ts[idx];
        let matrix = WeightMatrix::from_fn(m + self.s.len(), inst.n_d(), |i, k| {
            if i < m {
                let x = inst.d_r1(i, k);
                x.is_finite().then_some(x)
            } else {
                (inst.d_r2(self.s[i - m], k) <= w).then_some(0.0)
            }
        });
        let mm = matching::min_weight_max_cardinality_matching(&matrix);
        if mm.len() < matrix.rows() {
            return None;
        }
        let mut drivers: Vec<usize> = mm.pairs.iter().filter(|&&(i, _)| i < m).map(|&(_, k)| k).collect();
        drivers.sort_unstable();
        Some(Candidate { cost1: mm.total_weight / m as f64, drivers })
    }

    /// Explores thresholds strictly between `lo` and `hi`.
    fn refine(&self, lo: usize, f_lo: &Candidate, hi: usize, f_hi: &Candidate, best: &mut Best) -> Result<()> {
        if hi <= lo + 1 || f_lo.cost1 <= f_hi.cost1 + 1e-12 {
            return Ok(());
        }
        if f_hi.cost1 + self.ts[lo + 1] >= best.total {
            return Ok(());
        }
        let mid = (lo + hi) / 2;
        let f_mid = self.at(mid).expect("feasibility is monotone in the threshold");
        best.offer(self, mid, &f_mid)?;
        self.refine(lo, f_lo, mid, &f_mid, best)?;
        self.refine(mid, &f_mid, hi, f_hi, best)
    }
}

#[derive(Default)]
struct Best {
    total: f64,
    idx: usize,
    drivers: Option<Vec<usize>>,
}

impl Best {
    fn offer(&mut self, scan: &ThresholdScan, idx: usize, c: &Candidate) -> Result<()> {
        let rest = scan.inst.complement(&c.drivers);
        let total = c.cost1 + model::cost2(scan.inst, &rest, scan.s)?;
        let better = match &self.drivers {
            None => true,
            Some(_) => total < self.total || (total == self.total && idx < self.idx),
        };
        if better {
            *self = Best { total, idx, drivers: Some(c.drivers.clone()) };
        }
        Ok(())
    }
}

/// `s1` plus the riders of `s2` left uncovered by a maximum matching of
/// `s1` against `s2` restricted to distances at most `threshold`.
pub fn build_representative(inst: &MetricInstance, s1: &[usize], s2: &[usize], threshold: f64) -> RepresentativeScenario {
    let w = WeightMatrix::from_fn(s1.len(), s2.len(), |i, j| {
        let x = inst.d_r2_r2(s1[i], s2[j]);
        (x <= threshold + EPS).then_some(x)
    });
    let m: Matching = matching::max_cardinality_matching(&w);
    let mut covered = vec![false; s2.len()];
    for &(_, j) in &m.pairs {
        covered[j] = true;
    }
    let mut riders: Vec<usize> = s1.to_vec();
    riders.extend(s2.iter().zip(&covered).filter(|(_, &c)| !c).map(|(&r, _)| r));
    riders.sort_unstable();
    riders.dedup();
    RepresentativeScenario {
        riders,
        matched_pairs: m.pairs.iter().map(|&(i, j)| (s1[i], s2[j])).collect(),
        threshold,
    }
}

/// Representative-scenario approximation for exactly two scenarios.
pub fn solve_two_scenarios(inst: &MetricInstance) -> Result<FirstStageDecision> {
    Ok(solve_two_scenarios_detailed(inst)?.decision)
}

pub fn solve_two_scenarios_detailed(inst: &MetricInstance) -> Result<Solution> {
    let list = explicit(inst)?;
    if list.len() != 2 {
        return Err(Error::InvalidArgument(format!("expected 2 scenarios, found {}", list.len())));
    }
    solve_p_scenarios_detailed(inst)
}

/// Recursive pairwise merging for `p` explicit scenarios.
pub fn solve_p_scenarios(inst: &MetricInstance) -> Result<FirstStageDecision> {
    Ok(solve_p_scenarios_detailed(inst)?.decision)
}

/// Merges the padded scenario list for one guess and returns the final
/// representative rider set.
pub fn merge_scenarios(inst: &MetricInstance, scenarios: &[Vec<usize>], guess: f64) -> Vec<usize> {
    let mut hat: Vec<Vec<usize>> = scenarios.to_vec();
    let padded = hat.len().next_power_of_two();
    let last = hat.last().cloned().unwrap_or_default();
    hat.resize(padded, last);
    let rounds = padded.trailing_zeros();
    let mut scale = 2.0;
    for i in 1..=rounds {
        let half = padded >> i;
        for j in 0..half {
            let rep = build_representative(inst, &hat[j], &hat[j + half], scale * guess);
            hat[j] = rep.riders;
        }
        scale *= 3.0;
    }
    let mut out = hat.swap_remove(0);
    out.sort_unstable();
    out
}

pub fn solve_p_scenarios_detailed(inst: &MetricInstance) -> Result<Solution> {
    let list = explicit(inst)?;
    if list.is_empty() {
        return Err(Error::InvalidArgument("no scenarios".into()));
    }
    let need = inst.n_r1() + inst.scenarios().max_size();
    if inst.n_d() < need {
        return Err(Error::InsufficientDrivers { needed: need, available: inst.n_d() });
    }
    if list.len() == 1 {
        let decision = solve_single_scenario(inst, &list[0])?;
        return Ok(Solution { decision, opt2_guess: None });
    }

    let mut all: Vec<usize> = list.iter().flatten().copied().collect();
    all.sort_unstable();
    all.dedup();
    let guesses = Opt2Guess::for_riders(inst, &all).candidates;

    // Several guesses often collapse to the same representative; solve each
    // distinct rider set once, attributing it to its lowest guess index.
    let mut first_use: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut jobs: Vec<(usize, Vec<usize>)> = Vec::new();
    for (gi, &g) in guesses.iter().enumerate() {
        let rep = merge_scenarios(inst, list, g);
        if !first_use.contains_key(&rep) {
            first_use.insert(rep.clone(), gi);
            jobs.push((gi, rep));
        }
    }

    let best = jobs
        .into_par_iter()
        .filter_map(|(gi, rep)| {
            let d1 = solve_single_scenario(inst, &rep).ok()?;
            let total = evaluate::eval_explicit(inst, &d1).ok()?.total;
            Some((total, gi, d1))
        })
        .reduce_with(pick_lower);
    let (_, gi, decision) = best.ok_or(Error::NoPerfectMatching)?;
    log::debug!("p-scenario solver settled on guess {} of {}", gi, guesses.len());
    Ok(Solution { decision, opt2_guess: Some(guesses[gi]) })
}

/// Deterministic `(total, index)` argmin reduction.
pub(crate) fn pick_lower<T>(a: (f64, usize, T), b: (f64, usize, T)) -> (f64, usize, T) {
    match a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal).then(a.1.cmp(&b.1)) {
        Ordering::Greater => b,
        _ => a,
    }
}

fn explicit(inst: &MetricInstance) -> Result<&[Vec<usize>]> {
    inst.scenarios().explicit().ok_or(Error::WrongScenarioModel("expected explicit scenarios"))
}
