//! Solution representation and exact event-driven schedule evaluation.
//!
//! A solution is one ordered tour of `(customer, kind)` operations per
//! vehicle. Evaluation replays the tours: vehicles leave the depot at t=0
//! carrying `k` resources, a dropoff happens on arrival, and a pickup happens
//! on departure once the resource has finished processing, no matter which
//! vehicle deployed it. Vehicles wait on site for unfinished resources.

mod metrics;
mod two_pass;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::instance::Instance;

pub use metrics::{coordination_metrics, CoordinationMetrics};
pub use two_pass::{two_pass_estimate, TwoPass};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("capacity violated on vehicle {vehicle} at position {position}")]
    CapacityViolation { vehicle: usize, position: usize },
    #[error("deadlock: {pending} operations can never execute")]
    Deadlock { pending: usize },
    #[error("malformed solution: {0}")]
    MalformedSolution(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum OpKind {
    #[serde(rename = "D")]
    Dropoff,
    #[serde(rename = "P")]
    Pickup,
}

/// One operation of a tour.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Op {
    pub customer: usize,
    pub kind: OpKind,
}

impl Op {
    #[inline]
    pub fn drop(customer: usize) -> Self {
        Self {
            customer,
            kind: OpKind::Dropoff,
        }
    }

    #[inline]
    pub fn pick(customer: usize) -> Self {
        Self {
            customer,
            kind: OpKind::Pickup,
        }
    }

    #[inline]
    pub fn is_drop(self) -> bool {
        self.kind == OpKind::Dropoff
    }
}

impl fmt::Display for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.is_drop() { 'D' } else { 'P' };
        write!(f, "{tag}{}", self.customer)
    }
}

impl Serialize for Op {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        (self.customer, self.kind).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Op {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let (customer, kind) = <(usize, OpKind)>::deserialize(d)?;
        Ok(Op { customer, kind })
    }
}

/// Per-vehicle ordered tours.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Solution {
    pub tours: Vec<Vec<Op>>,
}

impl Solution {
    pub fn empty(m: usize) -> Self {
        Self {
            tours: vec![Vec::new(); m],
        }
    }

    pub fn from_tours(tours: Vec<Vec<Op>>) -> Self {
        Self { tours }
    }

    pub fn num_ops(&self) -> usize {
        self.tours.iter().map(Vec::len).sum()
    }

    /// Removes both operations of every listed customer.
    pub fn remove_customers(&mut self, customers: &[usize]) {
        if customers.is_empty() {
            return;
        }
        let max = customers.iter().copied().max().unwrap_or(0);
        let mut gone = vec![false; max + 1];
        for &c in customers {
            gone[c] = true;
        }
        for tour in &mut self.tours {
            tour.retain(|op| op.customer > max || !gone[op.customer]);
        }
    }

    /// `(vehicle, position)` of a given operation, if present.
    pub fn locate(&self, op: Op) -> Option<(usize, usize)> {
        self.tours
            .iter()
            .enumerate()
            .find_map(|(v, t)| t.iter().position(|&o| o == op).map(|i| (v, i)))
    }

    /// Customers present in the tours, ascending.
    pub fn customers(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .tours
            .iter()
            .flatten()
            .filter(|op| op.is_drop())
            .map(|op| op.customer)
            .collect();
        out.sort_unstable();
        out
    }

    /// Checks structure: every present customer has exactly one dropoff and
    /// one pickup; with `complete`, all customers `1..=n` must be present.
    pub fn check_structure(&self, inst: &Instance, complete: bool) -> Result<(), EvalError> {
        if self.tours.len() != inst.m() {
            return Err(EvalError::MalformedSolution(format!(
                "expected {} tours, got {}",
                inst.m(),
                self.tours.len()
            )));
        }
        let n = inst.n();
        let mut seen = vec![[0u8; 2]; n + 1];
        for op in self.tours.iter().flatten() {
            if op.customer == 0 || op.customer > n {
                return Err(EvalError::MalformedSolution(format!(
                    "customer {} out of range 1..={n}",
                    op.customer
                )));
            }
            let slot = &mut seen[op.customer][op.kind as usize];
            *slot += 1;
            if *slot > 1 {
                return Err(EvalError::MalformedSolution(format!("duplicate {op}")));
            }
        }
        for (c, s) in seen.iter().enumerate().skip(1) {
            match (s[0], s[1], complete) {
                (1, 1, _) | (0, 0, false) => {}
                _ => {
                    return Err(EvalError::MalformedSolution(format!(
                        "customer {c} has {} dropoff(s) and {} pickup(s)",
                        s[0], s[1]
                    )))
                }
            }
        }
        Ok(())
    }

    /// Capacity check on each tour in isolation; loads depend only on the
    /// order of a vehicle's own operations.
    pub fn check_capacity(&self, k: usize) -> Result<(), EvalError> {
        check_tours_capacity(&self.tours, k)
    }

    pub fn to_file(&self, instance_label: &str) -> SolutionFile {
        SolutionFile {
            instance_label: instance_label.to_string(),
            tours: self.tours.clone(),
        }
    }
}

impl fmt::Display for Solution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (v, tour) in self.tours.iter().enumerate() {
            let ops: Vec<String> = tour.iter().map(Op::to_string).collect();
            writeln!(f, "v{v}: [{}]", ops.join(", "))?;
        }
        Ok(())
    }
}

/// Capacity check of raw tours; see [`Solution::check_capacity`].
pub fn check_tours_capacity(tours: &[Vec<Op>], k: usize) -> Result<(), EvalError> {
    for (v, tour) in tours.iter().enumerate() {
        let mut q = k;
        for (i, op) in tour.iter().enumerate() {
            if op.is_drop() {
                if q == 0 {
                    return Err(EvalError::CapacityViolation { vehicle: v, position: i });
                }
                q -= 1;
            } else {
                if q == k {
                    return Err(EvalError::CapacityViolation { vehicle: v, position: i });
                }
                q += 1;
            }
        }
    }
    Ok(())
}

/// On-disk solution document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionFile {
    pub instance_label: String,
    pub tours: Vec<Vec<Op>>,
}

impl SolutionFile {
    pub fn into_solution(self) -> Solution {
        Solution { tours: self.tours }
    }
}

/// Realized event times of an evaluated solution.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    /// `arrival[v][i]`: arrival time of vehicle `v` at its `i`-th stop.
    pub arrival: Vec<Vec<f64>>,
    /// `departure[v][i]`: departure time from the `i`-th stop.
    pub departure: Vec<Vec<f64>>,
    /// Indexed by customer; entry 0 unused (NaN for customers not served).
    pub t_drop: Vec<f64>,
    pub t_pickup: Vec<f64>,
    pub drop_vehicle: Vec<Option<usize>>,
    pub pick_vehicle: Vec<Option<usize>>,
    /// `load[v][0] = k`; `load[v][i + 1]` is the load after stop `i`.
    pub load: Vec<Vec<usize>>,
    pub return_time: Vec<f64>,
    pub makespan: f64,
}

impl Schedule {
    /// Vehicle whose return time equals the makespan (lowest index on ties).
    pub fn bottleneck(&self) -> usize {
        let mut best = 0;
        for (v, &r) in self.return_time.iter().enumerate() {
            if r > self.return_time[best] {
                best = v;
            }
        }
        best
    }

    /// Execution time of the operation at `(v, i)`: arrival for a dropoff,
    /// departure for a pickup.
    pub fn exec_time(&self, sol: &Solution, v: usize, i: usize) -> f64 {
        if sol.tours[v][i].is_drop() {
            self.arrival[v][i]
        } else {
            self.departure[v][i]
        }
    }

    /// Per-event rows `(vehicle, position, op, arrival, departure, load_after)`.
    pub fn event_rows(&self, sol: &Solution) -> Vec<EventRow> {
        let mut rows = Vec::new();
        for (v, tour) in sol.tours.iter().enumerate() {
            for (i, &op) in tour.iter().enumerate() {
                rows.push(EventRow {
                    vehicle: v,
                    position: i,
                    op,
                    arrival: self.arrival[v][i],
                    departure: self.departure[v][i],
                    load_after: self.load[v][i + 1],
                });
            }
        }
        rows
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EventRow {
    pub vehicle: usize,
    pub position: usize,
    pub op: Op,
    pub arrival: f64,
    pub departure: f64,
    pub load_after: usize,
}

/// Evaluates a complete solution.
pub fn evaluate(inst: &Instance, sol: &Solution) -> Result<Schedule, EvalError> {
    sol.check_structure(inst, true)?;
    sol.check_capacity(inst.k())?;
    Simulator::new(inst).run_recorded(inst, sol)
}

/// Evaluates a solution that may omit some customers entirely.
pub fn evaluate_partial(inst: &Instance, sol: &Solution) -> Result<Schedule, EvalError> {
    sol.check_structure(inst, false)?;
    sol.check_capacity(inst.k())?;
    Simulator::new(inst).run_recorded(inst, sol)
}

/// Makespan of a schedule.
pub fn makespan(schedule: &Schedule) -> f64 {
    schedule.makespan
}

/// Reusable scratch space for repeated exact evaluations.
#[derive(Debug, Clone)]
pub struct Simulator {
    t_drop: Vec<f64>,
    dropped: Vec<bool>,
    cursor: Vec<usize>,
    time: Vec<f64>,
    loc: Vec<usize>,
    returns: Vec<f64>,
}

/// Objective summary of a complete evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Score {
    pub makespan: f64,
    /// Sum of vehicle return times; secondary criterion for local moves.
    pub total_return: f64,
}

impl Score {
    pub const INFEASIBLE: Score = Score {
        makespan: f64::INFINITY,
        total_return: f64::INFINITY,
    };

    /// Lexicographic improvement that never increases the makespan.
    pub fn improves_on(&self, other: &Score) -> bool {
        const EPS: f64 = 1e-9;
        if self.makespan < other.makespan - EPS * other.makespan.abs().max(1.0) {
            return true;
        }
        self.makespan <= other.makespan && self.total_return < other.total_return - EPS * other.total_return.abs().max(1.0)
    }
}

trait Recorder {
    fn event(&mut self, v: usize, i: usize, op: Op, arrival: f64, departure: f64);
}

struct NoRecord;

impl Recorder for NoRecord {
    #[inline]
    fn event(&mut self, _: usize, _: usize, _: Op, _: f64, _: f64) {}
}

struct FullRecord {
    arrival: Vec<Vec<f64>>,
    departure: Vec<Vec<f64>>,
    t_pickup: Vec<f64>,
    drop_vehicle: Vec<Option<usize>>,
    pick_vehicle: Vec<Option<usize>>,
}

impl Recorder for FullRecord {
    #[inline]
    fn event(&mut self, v: usize, i: usize, op: Op, arrival: f64, departure: f64) {
        self.arrival[v][i] = arrival;
        self.departure[v][i] = departure;
        if op.is_drop() {
            self.drop_vehicle[op.customer] = Some(v);
        } else {
            self.pick_vehicle[op.customer] = Some(v);
            self.t_pickup[op.customer] = departure;
        }
    }
}

impl Simulator {
    pub fn new(inst: &Instance) -> Self {
        let n = inst.n();
        let m = inst.m();
        Self {
            t_drop: vec![f64::NAN; n + 1],
            dropped: vec![false; n + 1],
            cursor: vec![0; m],
            time: vec![0.0; m],
            loc: vec![0; m],
            returns: vec![0.0; m],
        }
    }

    /// Exact score of a solution that is known to be structurally valid and
    /// capacity-feasible (or that has been checked beforehand).
    pub fn score_unchecked(&mut self, inst: &Instance, sol: &Solution) -> Result<Score, EvalError> {
        self.score_tours_unchecked(inst, &sol.tours)
    }

    /// Exact score of raw tours without any checks. Dropoffs without a
    /// pickup are fine; a pickup without its dropoff reports a deadlock.
    pub fn score_tours_unchecked(&mut self, inst: &Instance, tours: &[Vec<Op>]) -> Result<Score, EvalError> {
        self.simulate(inst, tours, &mut NoRecord)?;
        Ok(Score {
            makespan: self.returns.iter().copied().fold(0.0, f64::max),
            total_return: self.returns.iter().sum(),
        })
    }

    /// Capacity check plus exact score, without materializing a [`Schedule`].
    pub fn score(&mut self, inst: &Instance, sol: &Solution) -> Result<Score, EvalError> {
        self.score_tours(inst, &sol.tours)
    }

    /// Capacity check plus exact score of raw (possibly partial) tours.
    pub fn score_tours(&mut self, inst: &Instance, tours: &[Vec<Op>]) -> Result<Score, EvalError> {
        check_tours_capacity(tours, inst.k())?;
        self.score_tours_unchecked(inst, tours)
    }

    pub fn return_times(&self) -> &[f64] {
        &self.returns
    }

    fn run_recorded(&mut self, inst: &Instance, sol: &Solution) -> Result<Schedule, EvalError> {
        let n = inst.n();
        let mut rec = FullRecord {
            arrival: sol.tours.iter().map(|t| vec![0.0; t.len()]).collect(),
            departure: sol.tours.iter().map(|t| vec![0.0; t.len()]).collect(),
            t_pickup: vec![f64::NAN; n + 1],
            drop_vehicle: vec![None; n + 1],
            pick_vehicle: vec![None; n + 1],
        };
        self.simulate(inst, &sol.tours, &mut rec)?;
        let k = inst.k();
        let load = sol
            .tours
            .iter()
            .map(|tour| {
                let mut q = k;
                let mut out = Vec::with_capacity(tour.len() + 1);
                out.push(q);
                for op in tour {
                    if op.is_drop() {
                        q -= 1;
                    } else {
                        q += 1;
                    }
                    out.push(q);
                }
                out
            })
            .collect();
        let mut t_drop = self.t_drop.clone();
        for (c, d) in self.dropped.iter().enumerate() {
            if !d {
                t_drop[c] = f64::NAN;
            }
        }
        let makespan = self.returns.iter().copied().fold(0.0, f64::max);
        Ok(Schedule {
            arrival: rec.arrival,
            departure: rec.departure,
            t_drop,
            t_pickup: rec.t_pickup,
            drop_vehicle: rec.drop_vehicle,
            pick_vehicle: rec.pick_vehicle,
            load,
            return_time: self.returns.clone(),
            makespan,
        })
    }

    /// Round-robin replay; a full round without progress is a deadlock.
    fn simulate<R: Recorder>(&mut self, inst: &Instance, tours: &[Vec<Op>], rec: &mut R) -> Result<(), EvalError> {
        let m = tours.len();
        if self.cursor.len() != m {
            self.cursor.resize(m, 0);
            self.time.resize(m, 0.0);
            self.loc.resize(m, 0);
            self.returns.resize(m, 0.0);
        }
        self.dropped.fill(false);
        self.cursor.fill(0);
        self.time.fill(0.0);
        self.loc.fill(0);
        let total: usize = tours.iter().map(Vec::len).sum();
        let mut done = 0;
        while done < total {
            let mut progressed = false;
            for v in 0..m {
                let tour = &tours[v];
                while self.cursor[v] < tour.len() {
                    let i = self.cursor[v];
                    let op = tour[i];
                    let c = op.customer;
                    let arrival = self.time[v] + inst.d(self.loc[v], c);
                    let departure = if op.is_drop() {
                        self.t_drop[c] = arrival;
                        self.dropped[c] = true;
                        arrival
                    } else {
                        if !self.dropped[c] {
                            break;
                        }
                        arrival.max(self.t_drop[c] + inst.p(c))
                    };
                    rec.event(v, i, op, arrival, departure);
                    self.time[v] = departure;
                    self.loc[v] = c;
                    self.cursor[v] += 1;
                    done += 1;
                    progressed = true;
                }
            }
            if !progressed {
                return Err(EvalError::Deadlock { pending: total - done });
            }
        }
        for v in 0..m {
            self.returns[v] = if tours[v].is_empty() {
                0.0
            } else {
                self.time[v] + inst.d(self.loc[v], 0)
            };
        }
        Ok(())
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    /// d(0,1)=10, d(0,2)=12, d(1,2)=5, p=20 for both customers.
    pub(crate) fn toy(m: usize, k: usize) -> Instance {
        Instance::from_rows(
            "toy",
            &[vec![0.0, 10.0, 12.0], vec![10.0, 0.0, 5.0], vec![12.0, 5.0, 0.0]],
            vec![20.0, 20.0],
            m,
            k,
        )
        .unwrap()
    }

    pub(crate) fn single(m: usize, k: usize) -> Instance {
        Instance::from_rows("one", &[vec![0.0, 10.0], vec![10.0, 0.0]], vec![20.0], m, k).unwrap()
    }

    /// Euclidean instance on random points in a 50x50 square, p in [0, 60).
    pub(crate) fn random_instance(rng: &mut impl rand::Rng, n: usize, m: usize, k: usize) -> Instance {
        let pts: Vec<(f64, f64)> = (0..=n).map(|_| (rng.gen_range(0.0..50.0), rng.gen_range(0.0..50.0))).collect();
        let rows: Vec<Vec<f64>> = pts
            .iter()
            .map(|a| pts.iter().map(|b| ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt()).collect())
            .collect();
        let p = (0..n).map(|_| rng.gen_range(0.0..60.0)).collect();
        Instance::from_rows("r", &rows, p, m, k).unwrap()
    }

    use Op as O;

    #[test]
    fn single_vehicle_single_customer() {
        let inst = single(1, 1);
        let sol = Solution::from_tours(vec![vec![O::drop(1), O::pick(1)]]);
        let s = evaluate(&inst, &sol).unwrap();
        assert_eq!(s.t_drop[1], 10.0);
        assert_eq!(s.t_pickup[1], 30.0);
        assert_eq!(s.makespan, 40.0);
        assert_eq!(makespan(&s), 40.0);
    }

    #[test]
    fn two_customers_interleaved() {
        let inst = toy(1, 2);
        let sol = Solution::from_tours(vec![vec![O::drop(1), O::drop(2), O::pick(1), O::pick(2)]]);
        let s = evaluate(&inst, &sol).unwrap();
        assert_eq!(s.arrival[0], vec![10.0, 15.0, 20.0, 35.0]);
        assert_eq!(s.departure[0], vec![10.0, 15.0, 30.0, 35.0]);
        assert_eq!(s.makespan, 47.0);
        assert_eq!(s.load[0], vec![2, 1, 0, 1, 2]);
    }

    #[test]
    fn pickup_first_vehicle_starts_full() {
        // A vehicle leaves the depot with q = k, so a tour starting with a
        // pickup is rejected whatever the other vehicles do.
        let inst = single(2, 1);
        let sol = Solution::from_tours(vec![vec![O::drop(1)], vec![O::pick(1)]]);
        assert_eq!(
            evaluate(&inst, &sol),
            Err(EvalError::CapacityViolation { vehicle: 1, position: 0 })
        );
    }

    #[test]
    fn cross_vehicle_wait() {
        // v0: D1@10, reaches c2 at 15, waits for D2@12 + 20, P2@32, back at 44.
        // v1: D2@12, reaches c1 at 17, waits for D1@10 + 20, P1@30, back at 40.
        let inst = toy(2, 1);
        let sol = Solution::from_tours(vec![vec![O::drop(1), O::pick(2)], vec![O::drop(2), O::pick(1)]]);
        let s = evaluate(&inst, &sol).unwrap();
        assert_eq!(s.arrival[0], vec![10.0, 15.0]);
        assert_eq!(s.departure[0], vec![10.0, 32.0]);
        assert_eq!(s.arrival[1], vec![12.0, 17.0]);
        assert_eq!(s.departure[1], vec![12.0, 30.0]);
        assert_eq!(s.return_time, vec![44.0, 40.0]);
        assert_eq!(s.makespan, 44.0);
        assert_eq!(s.bottleneck(), 0);
        assert_eq!(s.drop_vehicle[2], Some(1));
        assert_eq!(s.pick_vehicle[2], Some(0));
    }

    #[test]
    fn empty_tours_return_at_zero() {
        let inst = Instance::from_rows("z", &[vec![0.0, 1.0], vec![1.0, 0.0]], vec![0.0], 2, 1).unwrap();
        let sol = Solution::from_tours(vec![vec![], vec![O::drop(1), O::pick(1)]]);
        let s = evaluate(&inst, &sol).unwrap();
        assert_eq!(s.return_time[0], 0.0);
        assert_eq!(s.makespan, 2.0);
    }

    #[test]
    fn capacity_errors() {
        let inst = toy(1, 1);
        let sol = Solution::from_tours(vec![vec![O::drop(1), O::drop(2), O::pick(1), O::pick(2)]]);
        assert_eq!(
            evaluate(&inst, &sol),
            Err(EvalError::CapacityViolation { vehicle: 0, position: 1 })
        );
        let inst = toy(2, 1);
        let sol = Solution::from_tours(vec![vec![O::drop(1), O::drop(2)], vec![O::pick(1), O::pick(2)]]);
        assert!(matches!(evaluate(&inst, &sol), Err(EvalError::CapacityViolation { vehicle: 0, .. })));
        let sol = Solution::from_tours(vec![vec![O::pick(1), O::drop(1)], vec![O::drop(2), O::pick(2)]]);
        assert!(matches!(
            evaluate(&inst, &sol),
            Err(EvalError::CapacityViolation { vehicle: 0, position: 0 })
        ));
    }

    #[test]
    fn same_route_pickup_first_deadlocks() {
        let inst = toy(1, 2);
        let sol = Solution::from_tours(vec![vec![O::drop(2), O::pick(1), O::drop(1), O::pick(2)]]);
        assert_eq!(evaluate(&inst, &sol), Err(EvalError::Deadlock { pending: 3 }));
    }

    #[test]
    fn opposite_cross_pickups_are_fine() {
        let inst = toy(2, 2);
        let sol = Solution::from_tours(vec![vec![O::drop(1), O::pick(2)], vec![O::drop(2), O::pick(1)]]);
        let s = evaluate(&inst, &sol).unwrap();
        assert_eq!(s.drop_vehicle[1], Some(0));
        assert_eq!(s.pick_vehicle[1], Some(1));
    }

    #[test]
    fn circular_wait_deadlocks() {
        let rows: Vec<Vec<f64>> = (0..5)
            .map(|i| (0..5).map(|j| if i == j { 0.0 } else { 1.0 }).collect())
            .collect();
        let inst = Instance::from_rows("four", &rows, vec![1.0; 4], 2, 2).unwrap();
        // v0 waits at P2 for D2, which sits behind P1 on v1, which waits for D1 behind P2.
        let sol = Solution::from_tours(vec![
            vec![O::drop(3), O::pick(2), O::drop(1), O::pick(3)],
            vec![O::drop(4), O::pick(1), O::drop(2), O::pick(4)],
        ]);
        assert_eq!(evaluate(&inst, &sol), Err(EvalError::Deadlock { pending: 6 }));
    }
    #[test]
    fn malformed_missing_customer() {
        let inst = toy(1, 2);
        let sol = Solution::from_tours(vec![vec![O::drop(1), O::pick(1)]]);
        assert!(matches!(evaluate(&inst, &sol), Err(EvalError::MalformedSolution(_))));
        assert!(evaluate_partial(&inst, &sol).is_ok());
        let sol = Solution::from_tours(vec![vec![O::drop(3), O::pick(3)]]);
        assert!(matches!(evaluate_partial(&inst, &sol), Err(EvalError::MalformedSolution(_))));
        let sol = Solution::from_tours(vec![vec![], vec![]]);
        assert!(matches!(evaluate_partial(&inst, &sol), Err(EvalError::MalformedSolution(_))));
    }

    #[test]
    fn solution_json_shape() {
        let sol = Solution::from_tours(vec![vec![O::drop(1), O::pick(1)], vec![]]);
        let text = serde_json::to_string(&sol.to_file("toy")).unwrap();
        assert_eq!(text, r#"{"instance_label":"toy","tours":[[[1,"D"],[1,"P"]],[]]}"#);
        let back: SolutionFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back.into_solution(), sol);
    }

    #[test]
    fn simulator_score_matches_evaluate() {
        let inst = toy(2, 2);
        let sol = Solution::from_tours(vec![vec![O::drop(1), O::drop(2)], vec![O::pick(2)]]);
        assert!(evaluate(&inst, &sol).is_err());
        let sol = Solution::from_tours(vec![vec![O::drop(1), O::pick(2)], vec![O::drop(2), O::pick(1)]]);
        let s = evaluate(&inst, &sol).unwrap();
        let mut sim = Simulator::new(&inst);
        let score = sim.score(&inst, &sol).unwrap();
        assert_eq!(score.makespan, s.makespan);
        assert_eq!(score.total_return, s.return_time.iter().sum::<f64>());
    }
}
