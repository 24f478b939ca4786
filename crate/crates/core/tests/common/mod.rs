//! Shared generators and independent reference computations for the
//! integration tests.
#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use rpd_core::instance::Instance;
use rpd_core::schedule::{Op, Solution};

/// Euclidean instance on integer points in a 40x40 square, distances
/// rounded to integers, integer processing times in [0, 60]. Integer data
/// keeps every schedule time exact.
pub fn int_instance(rng: &mut impl Rng, n: usize, m: usize, k: usize) -> Instance {
    let pts: Vec<(i64, i64)> = (0..=n).map(|_| (rng.gen_range(0..40), rng.gen_range(0..40))).collect();
    let rows: Vec<Vec<f64>> = pts
        .iter()
        .map(|a| {
            pts.iter()
                .map(|b| (((a.0 - b.0).pow(2) + (a.1 - b.1).pow(2)) as f64).sqrt().round())
                .collect()
        })
        .collect();
    let p = (0..n).map(|_| rng.gen_range(0..=60) as f64).collect();
    Instance::from_rows("int", &rows, p, m, k).unwrap()
}

/// Every operation placed on a uniformly random vehicle, in uniformly random
/// order. Usually infeasible for larger `n`.
pub fn random_solution(rng: &mut impl Rng, n: usize, m: usize) -> Solution {
    let mut ops: Vec<Op> = (1..=n).flat_map(|c| [Op::drop(c), Op::pick(c)]).collect();
    ops.shuffle(rng);
    let mut tours = vec![Vec::new(); m];
    for op in ops {
        tours[rng.gen_range(0..m)].push(op);
    }
    Solution::from_tours(tours)
}

/// A random solution that respects capacity: each vehicle serves its own
/// customers, dropping and picking in a random order that never exceeds
/// `k` open resources. Pickups are then swapped across vehicles at random,
/// which preserves every route's load profile.
pub fn random_capacity_feasible(rng: &mut impl Rng, n: usize, m: usize, k: usize) -> Solution {
    let mut tours: Vec<Vec<Op>> = vec![Vec::new(); m];
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); m];
    for c in 1..=n {
        groups[rng.gen_range(0..m)].push(c);
    }
    for (v, group) in groups.iter_mut().enumerate() {
        group.shuffle(rng);
        let mut open: Vec<usize> = Vec::new();
        let mut pending = group.clone();
        while !pending.is_empty() || !open.is_empty() {
            let can_drop = !pending.is_empty() && open.len() < k;
            let can_pick = !open.is_empty();
            if can_drop && (!can_pick || rng.gen_bool(0.5)) {
                let c = pending.pop().unwrap();
                open.push(c);
                tours[v].push(Op::drop(c));
            } else {
                let i = rng.gen_range(0..open.len());
                tours[v].push(Op::pick(open.swap_remove(i)));
            }
        }
    }
    let picks: Vec<(usize, usize)> = tours
        .iter()
        .enumerate()
        .flat_map(|(v, t)| t.iter().enumerate().filter(|(_, o)| !o.is_drop()).map(move |(i, _)| (v, i)))
        .collect();
    for _ in 0..picks.len() {
        let a = picks[rng.gen_range(0..picks.len())];
        let b = picks[rng.gen_range(0..picks.len())];
        let tmp = tours[a.0][a.1];
        tours[a.0][a.1] = tours[b.0][b.1];
        tours[b.0][b.1] = tmp;
    }
    Solution::from_tours(tours)
}

#[derive(Debug, Clone, PartialEq)]
pub enum RefOutcome {
    Capacity { vehicle: usize, position: usize },
    Deadlock,
    Feasible { makespan: f64, t_drop: Vec<f64>, t_pick: Vec<f64> },
}

/// Reference evaluation. Capacity is a property of each route's own
/// operation order (first violation in vehicle order). Otherwise the
/// operations form a precedence graph (route order plus dropoff before
/// pickup); a cycle is a deadlock, and on an acyclic graph every time is
/// the longest-path recursion `dep = max(prev_dep + d, ready)`, evaluated in
/// Kahn order.
pub fn reference_evaluate(inst: &Instance, sol: &Solution) -> RefOutcome {
    let k = inst.k();
    for (v, tour) in sol.tours.iter().enumerate() {
        let mut open = 0usize;
        for (i, op) in tour.iter().enumerate() {
            if op.is_drop() {
                if open == k {
                    return RefOutcome::Capacity { vehicle: v, position: i };
                }
                open += 1;
            } else {
                if open == 0 {
                    return RefOutcome::Capacity { vehicle: v, position: i };
                }
                open -= 1;
            }
        }
    }
    // Nodes are (vehicle, position); edges route order and drop -> pick.
    let mut id = Vec::new();
    let mut where_op = std::collections::HashMap::new();
    for (v, tour) in sol.tours.iter().enumerate() {
        for (i, &op) in tour.iter().enumerate() {
            where_op.insert(op, id.len());
            id.push((v, i));
        }
    }
    let total = id.len();
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); total];
    let mut indeg = vec![0usize; total];
    for (x, &(v, i)) in id.iter().enumerate() {
        if i + 1 < sol.tours[v].len() {
            succ[x].push(x + 1);
            indeg[x + 1] += 1;
        }
        let op = sol.tours[v][i];
        if op.is_drop() {
            let y = where_op[&Op::pick(op.customer)];
            succ[x].push(y);
            indeg[y] += 1;
        }
    }
    let mut queue: Vec<usize> = (0..total).filter(|&x| indeg[x] == 0).collect();
    let mut order = Vec::with_capacity(total);
    while let Some(x) = queue.pop() {
        order.push(x);
        for &y in &succ[x] {
            indeg[y] -= 1;
            if indeg[y] == 0 {
                queue.push(y);
            }
        }
    }
    if order.len() < total {
        return RefOutcome::Deadlock;
    }
    let n = inst.n();
    let mut dep = vec![0.0; total];
    let mut t_drop = vec![f64::NAN; n + 1];
    let mut t_pick = vec![f64::NAN; n + 1];
    for &x in &order {
        let (v, i) = id[x];
        let op = sol.tours[v][i];
        let (prev_t, prev_loc) = if i == 0 {
            (0.0, 0)
        } else {
            (dep[x - 1], sol.tours[v][i - 1].customer)
        };
        let arrival = prev_t + inst.d(prev_loc, op.customer);
        if op.is_drop() {
            dep[x] = arrival;
            t_drop[op.customer] = arrival;
        } else {
            let ready = t_drop[op.customer] + inst.p(op.customer);
            dep[x] = arrival.max(ready);
            t_pick[op.customer] = dep[x];
        }
    }
    let mut makespan: f64 = 0.0;
    for (v, tour) in sol.tours.iter().enumerate() {
        if let Some(last) = tour.last() {
            let x = where_op[last];
            debug_assert_eq!(id[x].0, v);
            makespan = makespan.max(dep[x] + inst.d(last.customer, 0));
        }
    }
    RefOutcome::Feasible { makespan, t_drop, t_pick }
}

/// Exhaustive optimum: operations are inserted one at a time at every
/// position of every tour, so each distribution of the `2n` operations over
/// `m` ordered tours is visited exactly once and scored by
/// [`reference_evaluate`].
pub fn brute_force_optimum(inst: &Instance) -> f64 {
    let n = inst.n();
    let ops: Vec<Op> = (1..=n).flat_map(|c| [Op::drop(c), Op::pick(c)]).collect();
    let mut tours: Vec<Vec<Op>> = vec![Vec::new(); inst.m()];
    let mut best = f64::INFINITY;
    fn rec(inst: &Instance, ops: &[Op], tours: &mut Vec<Vec<Op>>, next: usize, best: &mut f64) {
        if next == ops.len() {
            let sol = Solution::from_tours(tours.clone());
            if let RefOutcome::Feasible { makespan, .. } = reference_evaluate(inst, &sol) {
                *best = best.min(makespan);
            }
            return;
        }
        for v in 0..tours.len() {
            for pos in 0..=tours[v].len() {
                tours[v].insert(pos, ops[next]);
                rec(inst, ops, tours, next + 1, best);
                tours[v].remove(pos);
            }
        }
    }
    rec(inst, &ops, &mut tours, 0, &mut best);
    best
}
