//! Objective evaluation and the exhaustive oracle.

use std::cmp::Ordering;

use itertools::Itertools;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matching::{self, EPS};
use crate::model::{self, FirstStageDecision, MetricInstance, ScenarioCost, ScenarioSet, SolveReport};

/// Default cap on the number of evaluations an enumeration may perform.
pub const DEFAULT_ENUM_LIMIT: u128 = 2_000_000;

/// Optimal objective split as certified by exhaustive search.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OptDecomposition {
    pub opt1: f64,
    pub opt2: f64,
    pub total: f64,
    pub optimal_d1: FirstStageDecision,
}

/// Objective minimized by [`brute_force_opt_with`].
#[derive(Clone, Debug, PartialEq)]
pub enum Objective {
    /// Average first stage plus worst-case bottleneck.
    Robust,
    /// Average first stage plus expected bottleneck.
    Stochastic(Vec<f64>),
    /// Total weight in both stages, worst case.
    Tsrm,
}

/// Binomial coefficient, saturating.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(x) => x / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

fn explicit_list(inst: &MetricInstance) -> Result<&[Vec<usize>]> {
    inst.scenarios().explicit().ok_or(Error::WrongScenarioModel("expected explicit scenarios"))
}

fn check_room(inst: &MetricInstance, d1: &FirstStageDecision) -> Result<Vec<usize>> {
    d1.check(inst)?;
    let rest = inst.complement(&d1.drivers);
    let need = inst.scenarios().max_size();
    if rest.len() < need {
        return Err(Error::InsufficientDrivers { needed: need, available: rest.len() });
    }
    Ok(rest)
}

/// Exact worst case over the listed scenarios.
pub fn eval_explicit(inst: &MetricInstance, d1: &FirstStageDecision) -> Result<SolveReport> {
    let list = explicit_list(inst)?;
    let rest = check_room(inst, d1)?;
    let c1 = model::cost1(inst, d1)?;
    let rows = list
        .iter()
        .map(|s| Ok(ScenarioCost { riders: s.clone(), cost2: model::cost2(inst, &rest, s)? }))
        .collect::<Result<Vec<_>>>()?;
    Ok(SolveReport::from_rows(c1, rows))
}

/// Exact worst case over every size-`k` subset of `R2`.
pub fn eval_implicit_bruteforce(
    inst: &MetricInstance,
    d1: &FirstStageDecision,
    enum_limit: u128,
) -> Result<SolveReport> {
    let ScenarioSet::Implicit { k } = *inst.scenarios() else {
        return Err(Error::WrongScenarioModel("expected implicit scenarios"));
    };
    let count = binomial(inst.n_r2(), k);
    if count > enum_limit {
        return Err(Error::EnumerationTooLarge { count, limit: enum_limit });
    }
    let rest = check_room(inst, d1)?;
    let c1 = model::cost1(inst, d1)?;
    let (worst, riders) = implicit_worst(inst, &rest, k)?;
    Ok(SolveReport::from_rows(c1, vec![ScenarioCost { riders, cost2: worst }]))
}

/// Worst bottleneck over all size-`k` scenarios, first maximizer in
/// lexicographic subset order.
fn implicit_worst(inst: &MetricInstance, rest: &[usize], k: usize) -> Result<(f64, Vec<usize>)> {
    let mut best: Option<(f64, Vec<usize>)> = None;
    for s in (0..inst.n_r2()).combinations(k) {
        let c = model::cost2(inst, rest, &s)?;
        if best.as_ref().is_none_or(|(b, _)| c > *b) {
            best = Some((c, s));
        }
    }
    Ok(best.unwrap_or((0.0, Vec::new())))
}

/// Dispatches to the exact evaluator matching the scenario model.
pub fn evaluate(inst: &MetricInstance, d1: &FirstStageDecision, enum_limit: u128) -> Result<SolveReport> {
    match inst.scenarios() {
        ScenarioSet::Explicit(_) => eval_explicit(inst, d1),
        ScenarioSet::Implicit { .. } => eval_implicit_bruteforce(inst, d1, enum_limit),
    }
}

/// Cost of `d1` judged only on two proxy scenarios. An empty `s2`
/// contributes nothing.
pub fn eval_proxy(inst: &MetricInstance, d1: &FirstStageDecision, s1: &[usize], s2: &[usize]) -> Result<f64> {
    d1.check(inst)?;
    let rest = inst.complement(&d1.drivers);
    let c1 = model::cost1(inst, d1)?;
    let a = if s1.is_empty() { 0.0 } else { model::cost2(inst, &rest, s1)? };
    let b = if s2.is_empty() { 0.0 } else { model::cost2(inst, &rest, s2)? };
    Ok(c1 + a.max(b))
}

/// Checks that `probs` is a distribution over `p` scenarios.
pub fn check_distribution(probs: &[f64], p: usize) -> Result<()> {
    if probs.len() != p {
        return Err(Error::BadDistribution(format!("{} probabilities for {p} scenarios", probs.len())));
    }
    if probs.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
        return Err(Error::BadDistribution("probabilities must be finite and nonnegative".into()));
    }
    let sum: f64 = probs.iter().sum();
    if (sum - 1.0).abs() > EPS {
        return Err(Error::BadDistribution(format!("probabilities sum to {sum}")));
    }
    Ok(())
}

/// First-stage cost plus expected bottleneck.
pub fn eval_stochastic(inst: &MetricInstance, d1: &FirstStageDecision, probs: &[f64]) -> Result<f64> {
    let list = explicit_list(inst)?;
    check_distribution(probs, list.len())?;
    let rest = check_room(inst, d1)?;
    let mut total = model::cost1(inst, d1)?;
    for (s, &p) in list.iter().zip(probs) {
        if p > 0.0 {
            total += p * model::cost2(inst, &rest, s)?;
        }
    }
    Ok(total)
}

/// Total-weight objective in both stages.
pub fn eval_tsrm(inst: &MetricInstance, d1: &FirstStageDecision) -> Result<SolveReport> {
    let list = explicit_list(inst)?;
    let rest = check_room(inst, d1)?;
    let c1 = model::cost1_of_drivers(inst, &d1.drivers)?;
    let rows = list
        .iter()
        .map(|s| {
            let m = matching::min_weight_perfect_matching(&inst.r2_matrix(s, &rest))?;
            Ok(ScenarioCost { riders: s.clone(), cost2: m.total_weight })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SolveReport::from_rows(c1, rows))
}

/// `(first stage, second stage)` under `objective` for a raw driver set,
/// or `None` when the set is infeasible.
fn score(inst: &MetricInstance, objective: &Objective, drivers: &[usize]) -> Option<(f64, f64)> {
    let rest = inst.complement(drivers);
    if rest.len() < inst.scenarios().max_size() {
        return None;
    }
    let w1 = model::cost1_of_drivers(inst, drivers).ok()?;
    match (objective, inst.scenarios()) {
        (Objective::Robust, ScenarioSet::Explicit(list)) => {
            let mut worst = 0.0f64;
            for s in list {
                worst = worst.max(model::cost2(inst, &rest, s).ok()?);
            }
            Some((w1 / inst.n_r1() as f64, worst))
        }
        (Objective::Robust, ScenarioSet::Implicit { k }) => {
            let (worst, _) = implicit_worst(inst, &rest, *k).ok()?;
            Some((w1 / inst.n_r1() as f64, worst))
        }
        (Objective::Stochastic(probs), ScenarioSet::Explicit(list)) => {
            let mut exp = 0.0;
            for (s, &p) in list.iter().zip(probs) {
                if p > 0.0 {
                    exp += p * model::cost2(inst, &rest, s).ok()?;
                }
            }
            Some((w1 / inst.n_r1() as f64, exp))
        }
        (Objective::Tsrm, ScenarioSet::Explicit(list)) => {
            let mut worst = 0.0f64;
            for s in list {
                let m = matching::min_weight_perfect_matching(&inst.r2_matrix(s, &rest)).ok()?;
                worst = worst.max(m.total_weight);
            }
            Some((w1, worst))
        }
        _ => None,
    }
}

/// Exhaustive TSRMB optimum.
pub fn brute_force_opt(inst: &MetricInstance, enum_limit: u128) -> Result<OptDecomposition> {
    brute_force_opt_with(inst, &Objective::Robust, enum_limit)
}

/// Exhaustive optimum over every `|R1|`-subset of drivers. Ties go to the
/// lexicographically first subset.
pub fn brute_force_opt_with(inst: &MetricInstance, objective: &Objective, enum_limit: u128) -> Result<OptDecomposition> {
    let per_subset = match (objective, inst.scenarios()) {
        (Objective::Robust, ScenarioSet::Implicit { k }) => binomial(inst.n_r2(), *k),
        (Objective::Robust, ScenarioSet::Explicit(list)) => list.len() as u128,
        (Objective::Stochastic(probs), ScenarioSet::Explicit(list)) => {
            check_distribution(probs, list.len())?;
            list.len() as u128
        }
        (Objective::Tsrm, ScenarioSet::Explicit(list)) => list.len() as u128,
        _ => return Err(Error::WrongScenarioModel("objective needs explicit scenarios")),
    };
    let subsets = binomial(inst.n_d(), inst.n_r1());
    let count = subsets.saturating_mul(per_subset.max(1));
    if count > enum_limit {
        return Err(Error::EnumerationTooLarge { count, limit: enum_limit });
    }

    let best = (0..inst.n_d())
        .combinations(inst.n_r1())
        .enumerate()
        .par_bridge()
        .filter_map(|(idx, drivers)| score(inst, objective, &drivers).map(|(a, b)| (a + b, idx, a, b, drivers)))
        .reduce_with(|x, y| match x.0.partial_cmp(&y.0).unwrap_or(Ordering::Equal).then(x.1.cmp(&y.1)) {
            Ordering::Greater => y,
            _ => x,
        });
    let Some((total, _, opt1, opt2, drivers)) = best else {
        return Err(Error::InsufficientDrivers { needed: inst.n_r1() + inst.scenarios().max_size(), available: inst.n_d() });
    };
    Ok(OptDecomposition { opt1, opt2, total, optimal_d1: FirstStageDecision::from_driver_set(inst, &drivers)? })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::line;

    fn decision(inst: &MetricInstance, d: &[usize]) -> FirstStageDecision {
        FirstStageDecision::from_driver_set(inst, d).unwrap()
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(8, 3), 56);
        assert_eq!(binomial(3, 5), 0);
        assert_eq!(binomial(10, 0), 1);
        assert_eq!(binomial(500, 250), u128::MAX);
    }

    #[test]
    fn explicit_single_and_duplicate() {
        let one = line(&[0.0], &[5.0], &[1.0, 4.0, 6.0], ScenarioSet::Explicit(vec![vec![0]]));
        let r = eval_explicit(&one, &decision(&one, &[0])).unwrap();
        assert_eq!((r.cost1, r.worst_cost2, r.total), (1.0, 1.0, 2.0));

        let twice = one.with_scenarios(ScenarioSet::Explicit(vec![vec![0], vec![0]])).unwrap();
        let r = eval_explicit(&twice, &decision(&twice, &[0])).unwrap();
        assert_eq!(r.total, 2.0);
        assert_eq!(r.worst_scenario, Some(0));
    }

    #[test]
    fn implicit_k_equals_n_matches_explicit() {
        let r2 = [3.0, 7.0, -2.0];
        let imp = line(&[0.0], &r2, &[1.0, 2.0, 5.0, 8.0, -4.0], ScenarioSet::Implicit { k: 3 });
        let exp = imp.with_scenarios(ScenarioSet::Explicit(vec![vec![0, 1, 2]])).unwrap();
        let d1 = decision(&imp, &[1]);
        let a = eval_implicit_bruteforce(&imp, &d1, 100).unwrap();
        let b = eval_explicit(&exp, &d1).unwrap();
        assert!((a.total - b.total).abs() < 1e-12);
    }

    #[test]
    fn implicit_k1_is_worst_nearest() {
        let imp = line(&[0.0], &[3.0, 20.0, -2.0], &[0.0, 2.0, 10.0], ScenarioSet::Implicit { k: 1 });
        let r = eval_implicit_bruteforce(&imp, &decision(&imp, &[0]), 100).unwrap();
        assert_eq!(r.worst_cost2, 10.0);
        assert_eq!(r.per_scenario_cost2[0].riders, vec![1]);
    }

    #[test]
    fn implicit_limit() {
        let imp = line(&[0.0], &[1.0; 8], &[0.0; 4], ScenarioSet::Implicit { k: 3 });
        let err = eval_implicit_bruteforce(&imp, &decision(&imp, &[0]), 55).unwrap_err();
        assert!(matches!(err, Error::EnumerationTooLarge { count: 56, limit: 55 }));
    }

    #[test]
    fn proxy_cases() {
        let inst = line(&[0.0], &[5.0, 9.0], &[1.0, 4.0, 6.0, 10.0], ScenarioSet::Explicit(vec![vec![0], vec![1]]));
        let d1 = decision(&inst, &[0]);
        assert_eq!(eval_proxy(&inst, &d1, &[0], &[0]).unwrap(), 2.0);
        assert_eq!(eval_proxy(&inst, &d1, &[0], &[]).unwrap(), 2.0);
        assert_eq!(eval_proxy(&inst, &d1, &[0, 1], &[]).unwrap(), 2.0);
    }

    #[test]
    fn stochastic_cases() {
        let inst = line(&[0.0], &[5.0, 9.0, 30.0], &[1.0, 4.0, 6.0, 10.0], ScenarioSet::Explicit(vec![vec![0], vec![1], vec![2]]));
        let d1 = decision(&inst, &[0]);
        assert_eq!(eval_stochastic(&inst, &d1, &[1.0, 0.0, 0.0]).unwrap(), 2.0);
        let mean = eval_stochastic(&inst, &d1, &[1.0 / 3.0; 3]).unwrap();
        assert!((mean - (1.0 + (1.0 + 1.0 + 20.0) / 3.0)).abs() < 1e-9);
        assert!(matches!(eval_stochastic(&inst, &d1, &[0.5, 0.6, -0.1]), Err(Error::BadDistribution(_))));
        assert!(matches!(eval_stochastic(&inst, &d1, &[0.5, 0.5]), Err(Error::BadDistribution(_))));
    }

    #[test]
    fn tsrm_single_pair() {
        let inst = line(&[0.0], &[5.0], &[1.0, 7.0], ScenarioSet::Explicit(vec![vec![0]]));
        let r = eval_tsrm(&inst, &decision(&inst, &[0])).unwrap();
        assert_eq!(r.total, 3.0);
    }

    #[test]
    fn oracle_on_t1() {
        let inst = line(&[0.0], &[5.0], &[1.0, 4.0, 6.0], ScenarioSet::Explicit(vec![vec![0]]));
        let o = brute_force_opt(&inst, DEFAULT_ENUM_LIMIT).unwrap();
        assert_eq!(o.total, 2.0);
        assert_eq!(o.optimal_d1.drivers, vec![0]);
        assert!(matches!(brute_force_opt(&inst, 2), Err(Error::EnumerationTooLarge { count: 3, .. })));
    }

    #[test]
    fn oracle_two_drivers() {
        let inst = line(&[0.0], &[5.0], &[1.0, 4.0], ScenarioSet::Explicit(vec![vec![0]]));
        let o = brute_force_opt(&inst, DEFAULT_ENUM_LIMIT).unwrap();
        assert_eq!((o.opt1, o.opt2, o.total), (1.0, 1.0, 2.0));
        assert_eq!(o.optimal_d1.drivers, vec![0]);
    }
}
