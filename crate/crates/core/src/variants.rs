//! Related objectives: expected second stage (stochastic), total weight in
//! both stages, and a bottleneck first stage.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::evaluate::{self, check_distribution};
use crate::matching;
use crate::model::{self, FirstStageDecision, MetricInstance};
use crate::solvers::explicit::{pick_lower, solve_single_scenario};

/// Probabilities aligned with the explicit scenario list.
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioDistribution {
    probs: Vec<f64>,
}

impl ScenarioDistribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        check_distribution(&probs, probs.len())?;
        Ok(ScenarioDistribution { probs })
    }

    pub fn uniform(p: usize) -> Self {
        ScenarioDistribution { probs: vec![1.0 / p as f64; p] }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }
}

/// Explicit scenarios of one size with zero surplus.
fn uniform_no_surplus(inst: &MetricInstance) -> Result<&[Vec<usize>]> {
    let list = inst.scenarios().explicit().ok_or(Error::WrongScenarioModel("expected explicit scenarios"))?;
    let l = model::surplus(inst)?;
    if l < 0 {
        return Err(Error::InsufficientDrivers { needed: inst.n_r1() + inst.scenarios().max_size(), available: inst.n_d() });
    }
    if l != 0 {
        return Err(Error::SurplusNotZero(l));
    }
    Ok(list)
}

/// Best per-scenario exact solution under the expected objective.
pub fn solve_tssmb_no_surplus(inst: &MetricInstance, probs: &[f64]) -> Result<FirstStageDecision> {
    let list = uniform_no_surplus(inst)?;
    check_distribution(probs, list.len())?;
    let scored = list
        .par_iter()
        .enumerate()
        .map(|(i, s)| {
            let d1 = solve_single_scenario(inst, s)?;
            Ok((evaluate::eval_stochastic(inst, &d1, probs)?, i, d1))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(scored.into_iter().reduce(pick_lower).expect("nonempty scenario list").2)
}

/// Cheapest total-weight first-stage matching, scenarios ignored.
pub fn solve_tsrm_greedy(inst: &MetricInstance) -> Result<FirstStageDecision> {
    let need = inst.n_r1() + inst.scenarios().max_size();
    if inst.n_d() < need {
        return Err(Error::InsufficientDrivers { needed: need, available: inst.n_d() });
    }
    FirstStageDecision::from_driver_set(inst, &inst.all_drivers())
}

/// Reserves the cheapest home for the first scenario, then matches `R1`
/// into the remaining drivers.
pub fn solve_tsrm_no_surplus(inst: &MetricInstance) -> Result<FirstStageDecision> {
    let list = uniform_no_surplus(inst)?;
    let all = inst.all_drivers();
    let m = matching::min_weight_perfect_matching(&inst.r2_matrix(&list[0], &all))?;
    let reserved: Vec<usize> = m.pairs.iter().map(|&(_, k)| all[k]).collect();
    FirstStageDecision::from_driver_set(inst, &inst.complement(&reserved))
}

/// The cheaper of [`solve_tsrm_greedy`] and [`solve_tsrm_no_surplus`] under
/// the total-weight objective; ties keep the greedy decision.
pub fn solve_tsrm_balanced(inst: &MetricInstance) -> Result<FirstStageDecision> {
    let ns = solve_tsrm_no_surplus(inst)?;
    let greedy = solve_tsrm_greedy(inst)?;
    let a = evaluate::eval_tsrm(inst, &greedy)?.total;
    let b = evaluate::eval_tsrm(inst, &ns)?.total;
    Ok(if b < a { ns } else { greedy })
}

/// Bottleneck of the best first-stage matching into `d1.drivers`.
pub fn tsrbb_cost1(inst: &MetricInstance, d1: &FirstStageDecision) -> Result<f64> {
    matching::bottleneck_value(&inst.r1_matrix(&d1.drivers))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ScenarioSet;
    use crate::testutil::line;

    #[test]
    fn tssmb_single_scenario_is_exact() {
        let inst = line(&[0.0], &[5.0], &[1.0, 4.0], ScenarioSet::Explicit(vec![vec![0]]));
        let d1 = solve_tssmb_no_surplus(&inst, &[1.0]).unwrap();
        assert_eq!(evaluate::eval_stochastic(&inst, &d1, &[1.0]).unwrap(), 2.0);
    }

    #[test]
    fn tssmb_rejects_surplus_and_mixed_sizes() {
        let inst = line(&[0.0], &[5.0], &[1.0, 4.0, 6.0], ScenarioSet::Explicit(vec![vec![0]]));
        assert!(matches!(solve_tssmb_no_surplus(&inst, &[1.0]), Err(Error::SurplusNotZero(1))));
        let mixed = line(&[0.0], &[5.0, 6.0], &[1.0, 4.0, 6.0], ScenarioSet::Explicit(vec![vec![0], vec![0, 1]]));
        assert!(matches!(solve_tssmb_no_surplus(&mixed, &[0.5, 0.5]), Err(Error::NonUniformScenarios)));
    }

    #[test]
    fn tsrm_greedy_colocated() {
        let inst = line(&[3.0], &[5.0], &[3.0, 9.0], ScenarioSet::Explicit(vec![vec![0]]));
        let d1 = solve_tsrm_greedy(&inst).unwrap();
        assert_eq!(evaluate::eval_tsrm(&inst, &d1).unwrap().cost1, 0.0);
    }

    #[test]
    fn tsrm_no_surplus_reserves_scenario_home() {
        // The scenario rider sits on driver 0, R1 prefers it slightly.
        let inst = line(&[0.0], &[1.0], &[1.0, -1.5], ScenarioSet::Explicit(vec![vec![0]]));
        let ns = solve_tsrm_no_surplus(&inst).unwrap();
        assert_eq!(ns.drivers, vec![1]);
        let greedy = solve_tsrm_greedy(&inst).unwrap();
        assert_eq!(greedy.drivers, vec![0]);
        // Greedy: 1 + 2.5; reserve: 1.5 + 0.
        assert_eq!(solve_tsrm_balanced(&inst).unwrap(), ns);
    }

    #[test]
    fn balanced_keeps_greedy_on_ties() {
        let inst = line(&[0.0], &[10.0], &[1.0, 9.0], ScenarioSet::Explicit(vec![vec![0]]));
        assert_eq!(solve_tsrm_balanced(&inst).unwrap(), solve_tsrm_greedy(&inst).unwrap());
    }

    #[test]
    fn tsrbb_values() {
        let inst = line(&[0.0], &[5.0], &[2.0, 9.0], ScenarioSet::Explicit(vec![vec![0]]));
        let d1 = FirstStageDecision::from_driver_set(&inst, &[0]).unwrap();
        assert_eq!(tsrbb_cost1(&inst, &d1).unwrap(), 2.0);
        let two = line(&[0.0, 10.0], &[5.0], &[1.0, 15.0, 30.0], ScenarioSet::Explicit(vec![vec![0]]));
        let d1 = FirstStageDecision::from_driver_set(&two, &[0, 1]).unwrap();
        assert_eq!(tsrbb_cost1(&two, &d1).unwrap(), 5.0);
        assert!(tsrbb_cost1(&two, &d1).unwrap() >= model::cost1(&two, &d1).unwrap());
    }
}
