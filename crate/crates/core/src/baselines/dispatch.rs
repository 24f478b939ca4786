//! Time-ordered constructive dispatch.
//!
//! The vehicle with the earliest clock (lowest index on ties) picks its next
//! operation through a policy; the operation is executed immediately with
//! exact timing. Since every pickup is dispatched after its dropoff, the
//! dispatch order is a valid execution order and the resulting tours replay
//! identically in the evaluator.

use crate::instance::Instance;
use crate::schedule::{Op, Solution};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Status {
    Waiting,
    Dropped,
    Picked,
}

/// Construction state visible to dispatch policies.
#[derive(Debug, Clone)]
pub struct DispatchState<'a> {
    pub inst: &'a Instance,
    pub time: Vec<f64>,
    pub loc: Vec<usize>,
    pub load: Vec<usize>,
    pub tours: Vec<Vec<Op>>,
    pub t_drop: Vec<f64>,
    pub(crate) status: Vec<Status>,
    undropped: usize,
    unpicked: usize,
}

impl<'a> DispatchState<'a> {
    pub fn new(inst: &'a Instance) -> Self {
        let m = inst.m();
        let n = inst.n();
        let mut status = vec![Status::Waiting; n + 1];
        status[0] = Status::Picked;
        Self {
            inst,
            time: vec![0.0; m],
            loc: vec![0; m],
            load: vec![inst.k(); m],
            tours: vec![Vec::new(); m],
            t_drop: vec![f64::NAN; n + 1],
            status,
            undropped: n,
            unpicked: n,
        }
    }

    pub fn is_waiting(&self, c: usize) -> bool {
        self.status[c] == Status::Waiting
    }

    pub fn is_dropped(&self, c: usize) -> bool {
        self.status[c] == Status::Dropped
    }

    pub fn undropped(&self) -> usize {
        self.undropped
    }

    /// Completion time if vehicle `v` executed `op` next.
    pub fn completion(&self, v: usize, op: Op) -> f64 {
        let arrival = self.time[v] + self.inst.d(self.loc[v], op.customer);
        if op.is_drop() {
            arrival
        } else {
            arrival.max(self.t_drop[op.customer] + self.inst.p(op.customer))
        }
    }

    pub fn can_drop(&self, v: usize) -> bool {
        self.load[v] > 0 && self.undropped > 0
    }

    pub fn can_pick(&self, v: usize) -> bool {
        self.load[v] < self.inst.k() && self.unpicked > self.undropped
    }

    /// Customers currently waiting for their dropoff.
    pub fn waiting(&self) -> impl Iterator<Item = usize> + '_ {
        self.inst.customers().filter(|&c| self.status[c] == Status::Waiting)
    }

    /// Customers dropped but not yet picked up.
    pub fn open(&self) -> impl Iterator<Item = usize> + '_ {
        self.inst.customers().filter(|&c| self.status[c] == Status::Dropped)
    }

    /// Nearest waiting customer from the vehicle's location (lowest index on ties).
    pub fn nearest_waiting(&self, v: usize, allowed: impl Fn(usize) -> bool) -> Option<usize> {
        let mut best: Option<(f64, usize)> = None;
        for c in self.waiting().filter(|&c| allowed(c)) {
            let d = self.inst.d(self.loc[v], c);
            if best.is_none_or(|(bd, _)| d < bd) {
                best = Some((d, c));
            }
        }
        best.map(|(_, c)| c)
    }

    /// Open customer whose pickup by `v` completes first (lowest index on ties).
    pub fn soonest_pickup(&self, v: usize, allowed: impl Fn(usize) -> bool) -> Option<usize> {
        let mut best: Option<(f64, usize)> = None;
        for c in self.open().filter(|&c| allowed(c)) {
            let t = self.completion(v, Op::pick(c));
            if best.is_none_or(|(bt, _)| t < bt) {
                best = Some((t, c));
            }
        }
        best.map(|(_, c)| c)
    }

    pub fn execute(&mut self, v: usize, op: Op) {
        let c = op.customer;
        let t = self.completion(v, op);
        if op.is_drop() {
            debug_assert!(self.load[v] > 0 && self.status[c] == Status::Waiting);
            self.load[v] -= 1;
            self.t_drop[c] = t;
            self.status[c] = Status::Dropped;
            self.undropped -= 1;
        } else {
            debug_assert!(self.load[v] < self.inst.k() && self.status[c] == Status::Dropped);
            self.load[v] += 1;
            self.status[c] = Status::Picked;
            self.unpicked -= 1;
        }
        self.time[v] = t;
        self.loc[v] = c;
        self.tours[v].push(op);
    }

    pub fn done(&self) -> bool {
        self.unpicked == 0
    }

    pub fn into_solution(self) -> Solution {
        Solution::from_tours(self.tours)
    }
}

/// Runs the dispatch loop. The policy gets the state and the selected
/// vehicle and returns the next operation, or `None` when that vehicle has
/// nothing to do now (it is then skipped until another vehicle acts).
pub fn dispatch<'a>(
    inst: &'a Instance,
    mut policy: impl FnMut(&DispatchState<'a>, usize) -> Option<Op>,
) -> Option<Solution> {
    let mut st = DispatchState::new(inst);
    let m = inst.m();
    let mut idle = vec![false; m];
    while !st.done() {
        let v = (0..m)
            .filter(|&v| !idle[v])
            .min_by(|&a, &b| st.time[a].total_cmp(&st.time[b]).then(a.cmp(&b)))?;
        match policy(&st, v) {
            Some(op) => {
                st.execute(v, op);
                idle.fill(false);
            }
            None => idle[v] = true,
        }
    }
    Some(st.into_solution())
}

/// Nearest neighbor: drop at the closest waiting customer while carrying
/// resources; an empty vehicle (or one with nothing left to drop) collects
/// the resource it can pick up soonest.
pub fn nearest_neighbor(inst: &Instance) -> Option<Solution> {
    dispatch(inst, |st, v| {
        if st.can_drop(v) {
            st.nearest_waiting(v, |_| true).map(Op::drop)
        } else if st.can_pick(v) {
            st.soonest_pickup(v, |_| true).map(Op::pick)
        } else {
            None
        }
    })
}

/// One decision of the deferral heuristic, kept for auditing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeferDecision {
    pub vehicle: usize,
    pub op: Op,
    /// Cheapest raw dropoff cost (travel time) available to the vehicle.
    pub best_drop: Option<f64>,
    /// Cheapest raw pickup cost (completion delay) available to the vehicle.
    pub best_pick: Option<f64>,
}

/// Greedy deferral: the raw cost of a dropoff is its travel time, the raw
/// cost of a pickup is the delay until it completes; pickups are charged
/// `lambda` times their raw cost.
pub fn greedy_defer(inst: &Instance, lambda: f64) -> Option<(Solution, Vec<DeferDecision>)> {
    let mut log = Vec::new();
    let sol = dispatch(inst, |st, v| {
        let drop = if st.can_drop(v) {
            st.nearest_waiting(v, |_| true)
                .map(|c| (st.completion(v, Op::drop(c)) - st.time[v], c))
        } else {
            None
        };
        let pick = if st.can_pick(v) {
            st.soonest_pickup(v, |_| true)
                .map(|c| (st.completion(v, Op::pick(c)) - st.time[v], c))
        } else {
            None
        };
        let op = match (drop, pick) {
            (Some((dc, c)), Some((pc, p))) => {
                if lambda * pc < dc {
                    Op::pick(p)
                } else {
                    Op::drop(c)
                }
            }
            (Some((_, c)), None) => Op::drop(c),
            (None, Some((_, p))) => Op::pick(p),
            (None, None) => return None,
        };
        log.push(DeferDecision {
            vehicle: v,
            op,
            best_drop: drop.map(|x| x.0),
            best_pick: pick.map(|x| x.0),
        });
        Some(op)
    })?;
    Some((sol, log))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::evaluate;
    use crate::schedule::tests::toy;

    #[test]
    fn nn_visits_closest_first() {
        let inst = toy(1, 2);
        let sol = nearest_neighbor(&inst).unwrap();
        assert_eq!(sol.tours[0][0], Op::drop(1));
        let d1 = sol.tours[0].iter().position(|&o| o == Op::drop(1)).unwrap();
        let d2 = sol.tours[0].iter().position(|&o| o == Op::drop(2)).unwrap();
        assert!(d1 < d2);
        evaluate(&inst, &sol).unwrap();
    }

    #[test]
    fn dispatch_replays_exactly() {
        let inst = toy(2, 1);
        let mut st_times = Vec::new();
        let sol = dispatch(&inst, |st, v| {
            st_times.push(st.time[v]);
            if st.can_drop(v) {
                st.nearest_waiting(v, |_| true).map(Op::drop)
            } else if st.can_pick(v) {
                st.soonest_pickup(v, |_| true).map(Op::pick)
            } else {
                None
            }
        })
        .unwrap();
        let s = evaluate(&inst, &sol).unwrap();
        assert!(s.makespan >= 44.0);
    }

    #[test]
    fn defer_prefers_dropoffs() {
        let inst = toy(1, 2);
        let (sol, log) = greedy_defer(&inst, 10.0).unwrap();
        evaluate(&inst, &sol).unwrap();
        for d in &log {
            if !d.op.is_drop() {
                if let (Some(dc), Some(pc)) = (d.best_drop, d.best_pick) {
                    assert!(dc >= 10.0 * pc);
                }
            }
        }
    }
}
