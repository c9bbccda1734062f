//! Solver registry and dispatch.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{FirstStageDecision, MetricInstance, ScenarioSet};
use crate::variants;

pub mod explicit;
pub mod implicit;

pub use explicit::{
    build_representative, merge_scenarios, solve_greedy, solve_p_scenarios, solve_single_scenario,
    solve_two_scenarios, Opt2Guess, RepresentativeScenario,
};
pub use implicit::{
    outlier_ladder, p_supplier_3approx, prune_reserved, select_center, solve_k1, solve_no_surplus,
    solve_small_surplus, supplier_radius, CenterSelection, OutlierLadder,
};

/// A decision together with the second-stage guess that produced it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Solution {
    pub decision: FirstStageDecision,
    pub opt2_guess: Option<f64>,
}

impl From<FirstStageDecision> for Solution {
    fn from(decision: FirstStageDecision) -> Self {
        Solution { decision, opt2_guess: None }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SolverKind {
    Greedy,
    Single,
    Two,
    PScen,
    NoSurplus,
    SmallSurplus,
    K1,
    Tssmb,
    TsrmGreedy,
    TsrmNs,
    TsrmBalanced,
}

impl SolverKind {
    pub const ALL: [SolverKind; 11] = [
        SolverKind::Greedy,
        SolverKind::Single,
        SolverKind::Two,
        SolverKind::PScen,
        SolverKind::NoSurplus,
        SolverKind::SmallSurplus,
        SolverKind::K1,
        SolverKind::Tssmb,
        SolverKind::TsrmGreedy,
        SolverKind::TsrmNs,
        SolverKind::TsrmBalanced,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SolverKind::Greedy => "greedy",
            SolverKind::Single => "single",
            SolverKind::Two => "two",
            SolverKind::PScen => "pscen",
            SolverKind::NoSurplus => "nosurplus",
            SolverKind::SmallSurplus => "smallsurplus",
            SolverKind::K1 => "k1",
            SolverKind::Tssmb => "tssmb",
            SolverKind::TsrmGreedy => "tsrm-greedy",
            SolverKind::TsrmNs => "tsrm-ns",
            SolverKind::TsrmBalanced => "tsrm-balanced",
        }
    }

    /// Whether reports for this solver use the total-weight objective.
    pub fn is_tsrm(self) -> bool {
        matches!(self, SolverKind::TsrmGreedy | SolverKind::TsrmNs | SolverKind::TsrmBalanced)
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SolverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SolverKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown solver {s:?}")))
    }
}

/// Runs `kind` on `inst`. `probs` is only read by the stochastic solver and
/// defaults to the uniform distribution.
pub fn run(inst: &MetricInstance, kind: SolverKind, probs: Option<&[f64]>) -> Result<Solution> {
    match kind {
        SolverKind::Greedy => solve_greedy(inst).map(Into::into),
        SolverKind::Single => {
            let s = match inst.scenarios() {
                ScenarioSet::Explicit(list) if list.len() == 1 => list[0].clone(),
                ScenarioSet::Explicit(_) => {
                    return Err(Error::InvalidArgument("the single-scenario solver needs exactly one scenario".into()))
                }
                ScenarioSet::Implicit { .. } => return Err(Error::WrongScenarioModel("expected explicit scenarios")),
            };
            solve_single_scenario(inst, &s).map(Into::into)
        }
        SolverKind::Two => explicit::solve_two_scenarios_detailed(inst),
        SolverKind::PScen => explicit::solve_p_scenarios_detailed(inst),
        SolverKind::NoSurplus => solve_no_surplus(inst).map(Into::into),
        SolverKind::SmallSurplus => solve_small_surplus(inst).map(Into::into),
        SolverKind::K1 => implicit::solve_k1_detailed(inst),
        SolverKind::Tssmb => {
            let p = inst.scenarios().explicit().map_or(0, <[_]>::len);
            let uniform;
            let probs = match probs {
                Some(x) => x,
                None => {
                    uniform = vec![1.0 / p.max(1) as f64; p];
                    &uniform
                }
            };
            variants::solve_tssmb_no_surplus(inst, probs).map(Into::into)
        }
        SolverKind::TsrmGreedy => variants::solve_tsrm_greedy(inst).map(Into::into),
        SolverKind::TsrmNs => variants::solve_tsrm_no_surplus(inst).map(Into::into),
        SolverKind::TsrmBalanced => variants::solve_tsrm_balanced(inst).map(Into::into),
    }
}
