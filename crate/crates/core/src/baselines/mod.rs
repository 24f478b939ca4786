//! Standalone construction heuristics and the best-of-portfolio reference.

mod construct;
mod dispatch;
mod local;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::instance::Instance;
use crate::schedule::{Simulator, Solution};

pub use construct::{clarke_wright, insert_open_pickups, max_regret, saving};
pub use dispatch::{dispatch, greedy_defer, nearest_neighbor, DeferDecision, DispatchState};
pub use local::{default_move_budget, two_opt_improve, two_opt_improve_with_budget};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BaselineError {
    #[error("no feasible solution could be constructed")]
    InstanceInfeasible,
    #[error("deferral multiplier {0} outside [5, 15]")]
    InvalidLambda(String),
    #[error("unknown baseline '{0}'")]
    UnknownKind(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BaselineKind {
    NearestNeighbor,
    MaxRegret,
    ClarkeWright,
    GreedyDefer,
}

impl BaselineKind {
    pub const ALL: [BaselineKind; 4] = [
        BaselineKind::NearestNeighbor,
        BaselineKind::MaxRegret,
        BaselineKind::ClarkeWright,
        BaselineKind::GreedyDefer,
    ];
}

impl fmt::Display for BaselineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BaselineKind::NearestNeighbor => "nn",
            BaselineKind::MaxRegret => "max-regret",
            BaselineKind::ClarkeWright => "clarke-wright",
            BaselineKind::GreedyDefer => "greedy-defer",
        })
    }
}

impl FromStr for BaselineKind {
    type Err = BaselineError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "nn" | "nearest-neighbor" => Ok(BaselineKind::NearestNeighbor),
            "max-regret" | "regret" => Ok(BaselineKind::MaxRegret),
            "clarke-wright" | "cw" | "savings" => Ok(BaselineKind::ClarkeWright),
            "greedy-defer" | "defer" => Ok(BaselineKind::GreedyDefer),
            _ => Err(BaselineError::UnknownKind(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaselineParams {
    /// Pickup cost multiplier for [`BaselineKind::GreedyDefer`].
    pub lambda: f64,
}

impl Default for BaselineParams {
    fn default() -> Self {
        Self { lambda: 10.0 }
    }
}

/// Runs one construction heuristic. All four are deterministic; `seed` is
/// accepted for interface symmetry with the randomized solvers.
pub fn run_baseline(
    inst: &Instance,
    kind: BaselineKind,
    params: BaselineParams,
    _seed: u64,
) -> Result<Solution, BaselineError> {
    let sol = match kind {
        BaselineKind::NearestNeighbor => nearest_neighbor(inst),
        BaselineKind::MaxRegret => max_regret(inst),
        BaselineKind::ClarkeWright => clarke_wright(inst),
        BaselineKind::GreedyDefer => {
            if !(5.0..=15.0).contains(&params.lambda) {
                return Err(BaselineError::InvalidLambda(params.lambda.to_string()));
            }
            greedy_defer(inst, params.lambda).map(|(s, _)| s)
        }
    };
    let sol = sol.ok_or(BaselineError::InstanceInfeasible)?;
    crate::schedule::evaluate(inst, &sol).map_err(|_| BaselineError::InstanceInfeasible)?;
    Ok(sol)
}

/// One member of the heuristic portfolio after local search.
#[derive(Debug, Clone, PartialEq)]
pub struct PortfolioEntry {
    pub name: String,
    pub solution: Solution,
    pub makespan: f64,
}

/// Runs NN, max-regret, Clarke-Wright and greedy deferral with
/// `lambda` in {5, 10, 15}, each followed by [`two_opt_improve`].
pub fn portfolio(inst: &Instance, seed: u64) -> Vec<PortfolioEntry> {
    let mut members: Vec<(String, BaselineKind, BaselineParams)> = vec![
        ("nn".into(), BaselineKind::NearestNeighbor, BaselineParams::default()),
        ("max-regret".into(), BaselineKind::MaxRegret, BaselineParams::default()),
        ("clarke-wright".into(), BaselineKind::ClarkeWright, BaselineParams::default()),
    ];
    for lambda in [5.0, 10.0, 15.0] {
        members.push((
            format!("greedy-defer-{lambda}"),
            BaselineKind::GreedyDefer,
            BaselineParams { lambda },
        ));
    }
    let mut sim = Simulator::new(inst);
    let mut out = Vec::new();
    for (name, kind, params) in members {
        let Ok(sol) = run_baseline(inst, kind, params, seed) else {
            continue;
        };
        let improved = two_opt_improve(inst, &sol);
        let makespan = sim
            .score(inst, &improved)
            .expect("local search keeps feasibility")
            .makespan;
        out.push(PortfolioEntry {
            name,
            solution: improved,
            makespan,
        });
    }
    out
}

/// Minimum-makespan member of [`portfolio`] (first one on ties).
pub fn best_heuristic(inst: &Instance, seed: u64) -> Solution {
    let entries = portfolio(inst, seed);
    let best = entries
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.makespan.total_cmp(&b.1.makespan).then(a.0.cmp(&b.0)))
        .expect("nearest neighbor always constructs a solution");
    best.1.solution.clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::evaluate;
    use crate::schedule::tests::toy;

    #[test]
    fn lambda_range_checked() {
        let inst = toy(1, 2);
        let err = run_baseline(&inst, BaselineKind::GreedyDefer, BaselineParams { lambda: 4.0 }, 0);
        assert!(matches!(err, Err(BaselineError::InvalidLambda(_))));
    }

    #[test]
    fn best_is_minimum_of_portfolio() {
        let inst = toy(2, 2);
        let entries = portfolio(&inst, 1);
        assert_eq!(entries.len(), 6);
        let best = best_heuristic(&inst, 1);
        let z = evaluate(&inst, &best).unwrap().makespan;
        for e in &entries {
            assert!(z <= e.makespan);
        }
        assert_eq!(best, best_heuristic(&inst, 1));
    }

    #[test]
    fn kind_names_round_trip() {
        for kind in BaselineKind::ALL {
            assert_eq!(kind.to_string().parse::<BaselineKind>().unwrap(), kind);
        }
    }
}
