use std::time::{Duration, Instant};

use super::OracleError;
use crate::instance::Instance;
use crate::schedule::{evaluate, Op, Solution};

/// Budgets for [`exact_solve`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleLimits {
    pub max_customers: usize,
    pub max_nodes: u64,
    pub time_limit: Option<Duration>,
}

impl Default for OracleLimits {
    fn default() -> Self {
        Self {
            max_customers: 6,
            max_nodes: 200_000_000,
            time_limit: None,
        }
    }
}

/// Hard ceiling on `max_customers`.
pub const MAX_ORACLE_CUSTOMERS: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub solution: Solution,
    pub makespan: f64,
    /// False when a budget ran out before the search completed.
    pub optimal: bool,
    pub nodes: u64,
}

const EPS: f64 = 1e-9;

struct Search<'a> {
    inst: &'a Instance,
    limits: OracleLimits,
    started: Instant,
    nodes: u64,
    aborted: bool,
    best: f64,
    best_tours: Vec<Vec<Op>>,
    // Per-vehicle state.
    time: Vec<f64>,
    loc: Vec<usize>,
    load: Vec<usize>,
    tours: Vec<Vec<Op>>,
    // Per-customer state.
    t_drop: Vec<f64>,
    dropped: Vec<bool>,
    picked: Vec<bool>,
    remaining: usize,
}

impl Search<'_> {
    fn used(&self, v: usize) -> bool {
        !self.tours[v].is_empty()
    }

    /// Lower bound on the makespan of any completion of the current prefix.
    fn bound(&self, last_exec: f64) -> f64 {
        let inst = self.inst;
        let m = self.tours.len();
        let mut lb: f64 = 0.0;
        for v in 0..m {
            if self.used(v) {
                lb = lb.max(self.time[v] + inst.d(self.loc[v], 0));
            }
        }
        for c in inst.customers() {
            if self.picked[c] {
                continue;
            }
            let reach = (0..m)
                .map(|v| self.time[v] + inst.d(self.loc[v], c))
                .fold(f64::INFINITY, f64::min)
                .max(last_exec);
            let pick = if self.dropped[c] {
                reach.max(self.t_drop[c] + inst.p(c))
            } else {
                reach + inst.p(c)
            };
            lb = lb.max(pick + inst.d(c, 0));
        }
        lb
    }

    fn out_of_budget(&mut self) -> bool {
        if self.nodes >= self.limits.max_nodes {
            self.aborted = true;
        } else if let Some(limit) = self.limits.time_limit {
            if self.nodes % 4096 == 0 && self.started.elapsed() > limit {
                self.aborted = true;
            }
        }
        self.aborted
    }

    /// Operations are appended in non-decreasing order of execution time, so
    /// each complete schedule is reached through its own time-sorted order.
    fn dfs(&mut self, last_exec: f64) {
        self.nodes += 1;
        if self.out_of_budget() {
            return;
        }
        if self.remaining == 0 {
            let z = (0..self.tours.len())
                .filter(|&v| self.used(v))
                .map(|v| self.time[v] + self.inst.d(self.loc[v], 0))
                .fold(0.0, f64::max);
            if z < self.best - EPS {
                self.best = z;
                self.best_tours = self.tours.clone();
            }
            return;
        }
        if self.bound(last_exec) >= self.best - EPS {
            return;
        }
        let inst = self.inst;
        let k = inst.k();
        let m = self.tours.len();
        let mut moves: Vec<(f64, usize, Op)> = Vec::new();
        let mut opened_empty = false;
        for v in 0..m {
            // Unused vehicles are interchangeable; branch on the first only.
            if !self.used(v) {
                if opened_empty {
                    continue;
                }
                opened_empty = true;
            }
            for c in inst.customers() {
                let arrival = self.time[v] + inst.d(self.loc[v], c);
                if !self.dropped[c] {
                    if self.load[v] > 0 && arrival >= last_exec - EPS {
                        moves.push((arrival, v, Op::drop(c)));
                    }
                } else if !self.picked[c] && self.load[v] < k {
                    let exec = arrival.max(self.t_drop[c] + inst.p(c));
                    if exec >= last_exec - EPS {
                        moves.push((exec, v, Op::pick(c)));
                    }
                }
            }
        }
        moves.sort_by(|a, b| a.0.total_cmp(&b.0));
        for (exec, v, op) in moves {
            let c = op.customer;
            let saved = (self.time[v], self.loc[v], self.load[v]);
            self.time[v] = exec;
            self.loc[v] = c;
            self.tours[v].push(op);
            if op.is_drop() {
                self.load[v] -= 1;
                self.dropped[c] = true;
                self.t_drop[c] = exec;
            } else {
                self.load[v] += 1;
                self.picked[c] = true;
                self.remaining -= 1;
            }
            self.dfs(exec.max(last_exec));
            if op.is_drop() {
                self.dropped[c] = false;
            } else {
                self.picked[c] = false;
                self.remaining += 1;
            }
            self.tours[v].pop();
            (self.time[v], self.loc[v], self.load[v]) = saved;
            if self.aborted {
                return;
            }
        }
    }
}

/// Exact minimum makespan by depth-first branch and bound.
pub fn exact_solve(inst: &Instance, limits: OracleLimits) -> Result<OracleResult, OracleError> {
    if limits.max_customers > MAX_ORACLE_CUSTOMERS {
        return Err(OracleError::InvalidLimits(limits.max_customers));
    }
    if inst.n() > limits.max_customers {
        return Err(OracleError::InstanceTooLarge {
            n: inst.n(),
            max: limits.max_customers,
        });
    }
    let m = inst.m();
    let n = inst.n();
    // Serial single-vehicle schedule as the first incumbent.
    let mut serial = Solution::empty(m);
    for c in inst.customers() {
        serial.tours[0].push(Op::drop(c));
        serial.tours[0].push(Op::pick(c));
    }
    let serial_z = evaluate(inst, &serial).map(|s| s.makespan).unwrap_or(f64::INFINITY);
    let mut search = Search {
        inst,
        limits,
        started: Instant::now(),
        nodes: 0,
        aborted: false,
        best: serial_z + EPS * 2.0 * serial_z.max(1.0),
        best_tours: serial.tours.clone(),
        time: vec![0.0; m],
        loc: vec![0; m],
        load: vec![inst.k(); m],
        tours: vec![Vec::new(); m],
        t_drop: vec![0.0; n + 1],
        dropped: vec![false; n + 1],
        picked: vec![false; n + 1],
        remaining: n,
    };
    search.dfs(0.0);
    let solution = Solution::from_tours(search.best_tours);
    let makespan = evaluate(inst, &solution)
        .expect("oracle incumbents are feasible")
        .makespan;
    let result = OracleResult {
        solution,
        makespan,
        optimal: !search.aborted,
        nodes: search.nodes,
    };
    if search.aborted {
        Err(OracleError::LimitExceeded(Box::new(result)))
    } else {
        Ok(result)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::tests::{single, toy};

    #[test]
    fn single_customer() {
        let r = exact_solve(&single(1, 1), OracleLimits::default()).unwrap();
        assert_eq!(r.makespan, 40.0);
        assert!(r.optimal);
    }

    #[test]
    fn toy_one_vehicle() {
        let r = exact_solve(&toy(1, 2), OracleLimits::default()).unwrap();
        assert_eq!(r.makespan, 47.0);
        assert_eq!(r.solution.tours[0], vec![Op::drop(1), Op::drop(2), Op::pick(1), Op::pick(2)]);
    }

    #[test]
    fn toy_two_vehicles_unit_capacity() {
        // Separate round trips: max(10+20+10, 12+20+12) = 44; the swapped
        // cross pickups also give 44 and nothing beats it.
        let r = exact_solve(&toy(2, 1), OracleLimits::default()).unwrap();
        assert_eq!(r.makespan, 44.0);
        assert!(r.makespan <= 47.0);
    }

    #[test]
    fn too_large() {
        let rows: Vec<Vec<f64>> = (0..8).map(|i| (0..8).map(|j| if i == j { 0.0 } else { 1.0 }).collect()).collect();
        let inst = Instance::from_rows("seven", &rows, vec![1.0; 7], 2, 2).unwrap();
        assert!(matches!(
            exact_solve(&inst, OracleLimits::default()),
            Err(OracleError::InstanceTooLarge { n: 7, max: 6 })
        ));
        let limits = OracleLimits {
            max_customers: 9,
            ..OracleLimits::default()
        };
        assert!(matches!(exact_solve(&inst, limits), Err(OracleError::InvalidLimits(9))));
    }

    #[test]
    fn node_budget_reports_best_found() {
        let inst = toy(2, 2);
        let limits = OracleLimits {
            max_nodes: 3,
            ..OracleLimits::default()
        };
        match exact_solve(&inst, limits) {
            Err(OracleError::LimitExceeded(best)) => {
                assert!(!best.optimal);
                assert!(best.makespan.is_finite());
            }
            other => panic!("expected LimitExceeded, got {other:?}"),
        }
    }
}
