//! Repair operators: cheapest insertion and regret variants.
//!
//! Every operator ranks placements of both operations (dropoff and pickup,
//! possibly on different vehicles) by the two-pass estimate. The estimate
//! ignores how waits delay later dropoffs, so the chosen customer's
//! [`SHORTLIST`] cheapest placements are re-scored by exact simulation and
//! the best deadlock-free one is committed. If the whole shortlist
//! deadlocks, the first deadlock-free placement further down the ranking is
//! used.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::AlnsError;
use crate::insertion::{apply, InsertionEngine, Placement, TIE_WEIGHT};
use crate::instance::Instance;
use crate::schedule::{Op, Simulator, Solution};

/// Number of estimate-ranked placements re-scored exactly before committing.
pub const SHORTLIST: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RepairOp {
    Greedy,
    Regret2,
    Regret3,
    RegretM,
}

impl RepairOp {
    pub const ALL: [RepairOp; 4] = [RepairOp::Greedy, RepairOp::Regret2, RepairOp::Regret3, RepairOp::RegretM];
}

impl fmt::Display for RepairOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Regret of a customer from its sorted option costs: `sum_{i<h} (c_i - c_0)`.
/// Missing alternatives count as infinitely worse.
pub fn regret(sorted_costs: &[f64], horizon: usize) -> f64 {
    let Some(&c1) = sorted_costs.first() else {
        return f64::INFINITY;
    };
    (1..horizon)
        .map(|i| sorted_costs.get(i).map_or(f64::INFINITY, |&c| c - c1))
        .sum()
}

/// Index of the customer to insert next: highest regret, then lowest best
/// cost, then first in list order. Greedy corresponds to `horizon = 1`.
pub fn pick_next(candidates: &[(f64, f64)]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &(reg, c1)) in candidates.iter().enumerate() {
        let better = match best {
            None => true,
            Some(b) => {
                let (br, bc) = candidates[b];
                reg > br || (reg == br && c1 < bc)
            }
        };
        if better {
            best = Some(i);
        }
    }
    best
}

/// Best option cost per alternative class of a customer, sorted. Regret-2
/// and Regret-3 compare (dropoff vehicle, pickup vehicle) assignments; the
/// fleet-wide regret compares dropoff vehicles. Greedy needs only the best.
fn alternatives(op: RepairOp, m: usize, options: &[(f64, Placement)]) -> Vec<f64> {
    let key = |pl: &Placement| -> usize {
        let dv = pl.drop.map_or(0, |d| d.0);
        match op {
            RepairOp::RegretM => dv,
            _ => dv * m + pl.pick.0,
        }
    };
    let classes = if op == RepairOp::RegretM { m } else { m * m };
    let mut best = vec![f64::INFINITY; classes];
    for (cost, pl) in options {
        let k = key(pl);
        best[k] = best[k].min(*cost);
    }
    let mut out: Vec<f64> = best.into_iter().filter(|c| c.is_finite()).collect();
    out.sort_by(f64::total_cmp);
    out
}

fn horizon(op: RepairOp, m: usize) -> usize {
    match op {
        RepairOp::Greedy => 1,
        RepairOp::Regret2 => 2,
        RepairOp::Regret3 => 3,
        RepairOp::RegretM => m.max(2),
    }
}

/// Reinserts every customer in `removed` into `partial`.
pub fn repair(inst: &Instance, partial: &Solution, removed: &[usize], op: RepairOp) -> Result<Solution, AlnsError> {
    let m = inst.m();
    let mut tours = partial.tours.clone();
    let mut pending: Vec<usize> = removed.to_vec();
    let mut eng = InsertionEngine::new(inst);
    let mut sim = Simulator::new(inst);
    let h = horizon(op, m);
    let mut options: Vec<(f64, Placement)> = Vec::new();
    while !pending.is_empty() {
        eng.rebuild(&tours).map_err(AlnsError::Infeasible)?;
        let mut scored: Vec<(f64, f64)> = Vec::with_capacity(pending.len());
        for &c in &pending {
            options.clear();
            eng.for_each_placement(&tours, c, |pl, est| options.push((est.cost(), pl)));
            if options.is_empty() {
                return Err(AlnsError::RepairFailed(c));
            }
            let alts = alternatives(op, m, &options);
            let reg = if h == 1 { 0.0 } else { regret(&alts, h) };
            scored.push((reg, alts[0]));
        }
        let idx = pick_next(&scored).expect("pending is nonempty");
        let c = pending.remove(idx);
        options.clear();
        eng.for_each_placement(&tours, c, |pl, est| options.push((est.cost(), pl)));
        options.sort_by(|a, b| a.0.total_cmp(&b.0));
        if !commit_first_valid(inst, &mut sim, &mut tours, c, &options) {
            return Err(AlnsError::RepairFailed(c));
        }
    }
    Ok(Solution::from_tours(tours))
}

/// Commits the exactly-best deadlock-free placement among the first
/// [`SHORTLIST`] options (sorted by estimate), falling back to the first
/// deadlock-free option beyond it.
pub(crate) fn commit_first_valid(
    inst: &Instance,
    sim: &mut Simulator,
    tours: &mut [Vec<Op>],
    c: usize,
    options: &[(f64, Placement)],
) -> bool {
    let head = options.len().min(SHORTLIST);
    let mut best: Option<(f64, Placement)> = None;
    for &(_, pl) in &options[..head] {
        apply(tours, c, pl);
        if let Ok(s) = sim.score_tours_unchecked(inst, tours) {
            let cost = s.makespan + TIE_WEIGHT * s.total_return;
            if best.is_none_or(|(b, _)| cost < b) {
                best = Some((cost, pl));
            }
        }
        undo(tours, c, pl);
    }
    if let Some((_, pl)) = best {
        apply(tours, c, pl);
        return true;
    }
    for &(_, pl) in &options[head..] {
        apply(tours, c, pl);
        if sim.score_tours_unchecked(inst, tours).is_ok() {
            return true;
        }
        undo(tours, c, pl);
    }
    false
}

fn undo(tours: &mut [Vec<Op>], c: usize, pl: Placement) {
    if let Some((dv, di)) = pl.drop {
        debug_assert_eq!(tours[dv][di], Op::drop(c));
        tours[dv].remove(di);
    }
    let (pv, pj) = pl.pick;
    debug_assert_eq!(tours[pv][pj], Op::pick(c));
    tours[pv].remove(pj);
}
