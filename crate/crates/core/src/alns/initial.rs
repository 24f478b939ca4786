//! Initial solution: coordinate-free sweep, workload balancing, per-vehicle
//! nearest-feasible construction, then local refinement.

use super::local::{cross_agent_relocation, pickup_repositioning};
use crate::instance::Instance;
use crate::schedule::{evaluate, Op, Solution};

/// Refinement rounds are capped; each round is improvement-only.
const MAX_REFINE_ROUNDS: usize = 50;

/// Estimated workload of a customer: depot round trip plus processing.
pub fn workload(inst: &Instance, c: usize) -> f64 {
    2.0 * inst.d(0, c) + inst.p(c)
}

/// Customers in sweep order. Anchors are `a = argmax d(0,c)` and
/// `b = argmax d(a,c)`; customers are sorted by `(d(a,c) - d(b,c), d(0,c))`.
pub fn sweep_order(inst: &Instance) -> Vec<usize> {
    let argmax = |f: &dyn Fn(usize) -> f64| {
        inst.customers()
            .fold(None::<(f64, usize)>, |acc, c| match acc {
                Some((v, _)) if f(c) <= v => acc,
                _ => Some((f(c), c)),
            })
            .map(|(_, c)| c)
    };
    let mut order: Vec<usize> = inst.customers().collect();
    let Some(a) = argmax(&|c| inst.d(0, c)) else {
        return order;
    };
    let b = argmax(&|c| inst.d(a, c)).unwrap_or(a);
    let key = |c: usize| (inst.d(a, c) - inst.d(b, c), inst.d(0, c));
    order.sort_by(|&x, &y| {
        let (kx, ky) = (key(x), key(y));
        kx.0.total_cmp(&ky.0).then(kx.1.total_cmp(&ky.1)).then(x.cmp(&y))
    });
    order
}

/// Cuts the sweep order into `m` contiguous sectors of near-equal size.
pub fn sectors(order: &[usize], m: usize) -> Vec<Vec<usize>> {
    let n = order.len();
    (0..m).map(|v| order[v * n / m..(v + 1) * n / m].to_vec()).collect()
}

/// Moves customers from the heaviest to the lightest sector while the
/// spread `(max - min) / mean` is at least 10% and a move shrinks the pair's
/// larger load. The moved customer is the one leaving the pair most even,
/// nearest to the receiving sector on ties.
pub fn balance(inst: &Instance, sectors: &mut [Vec<usize>]) {
    let m = sectors.len();
    if m < 2 {
        return;
    }
    let load = |s: &[usize]| s.iter().map(|&c| workload(inst, c)).sum::<f64>();
    let total: f64 = sectors.iter().map(|s| load(s)).sum();
    let mean = total / m as f64;
    let limit = inst.n() * m;
    for _ in 0..limit {
        let loads: Vec<f64> = sectors.iter().map(|s| load(s)).collect();
        let h = (0..m).fold(0, |a, v| if loads[v] > loads[a] { v } else { a });
        let l = (0..m).fold(0, |a, v| if loads[v] < loads[a] { v } else { a });
        if mean <= 0.0 || (loads[h] - loads[l]) / mean < 0.1 {
            return;
        }
        let near = |c: usize| {
            sectors[l]
                .iter()
                .map(|&x| inst.d(x, c))
                .fold(inst.d(0, c), f64::min)
        };
        let best = sectors[h]
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                let w = workload(inst, c);
                ((loads[h] - w).max(loads[l] + w), near(c), i)
            })
            .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        match best {
            Some((peak, _, i)) if peak < loads[h] => {
                let c = sectors[h].remove(i);
                sectors[l].push(c);
            }
            _ => return,
        }
    }
}

/// Single-vehicle route over `customers`: at each step take the feasible
/// operation (pending dropoff while loaded, or pickup of an own resource
/// while not full) that completes earliest; dropoffs win ties.
pub fn nearest_feasible_route(inst: &Instance, customers: &[usize]) -> Vec<Op> {
    let k = inst.k();
    let mut pending: Vec<usize> = customers.to_vec();
    let mut open: Vec<(usize, f64)> = Vec::new();
    let (mut t, mut loc, mut q) = (0.0, 0usize, k);
    let mut tour = Vec::with_capacity(2 * customers.len());
    while !pending.is_empty() || !open.is_empty() {
        let mut best: Option<(f64, bool, usize)> = None;
        let mut consider = |time: f64, is_drop: bool, idx: usize| {
            let better = match best {
                None => true,
                Some((bt, bd, _)) => time < bt || (time == bt && is_drop && !bd),
            };
            if better {
                best = Some((time, is_drop, idx));
            }
        };
        if q > 0 {
            for (i, &c) in pending.iter().enumerate() {
                consider(t + inst.d(loc, c), true, i);
            }
        }
        if q < k {
            for (i, &(c, td)) in open.iter().enumerate() {
                consider((t + inst.d(loc, c)).max(td + inst.p(c)), false, i);
            }
        }
        let (time, is_drop, idx) = best.expect("a loaded vehicle can drop, an emptied one can pick");
        if is_drop {
            let c = pending.remove(idx);
            open.push((c, time));
            tour.push(Op::drop(c));
            q -= 1;
            loc = c;
        } else {
            let (c, _) = open.remove(idx);
            tour.push(Op::pick(c));
            q += 1;
            loc = c;
        }
        t = time;
    }
    tour
}

/// Serial fallback: vehicle 0 serves every customer as a D,P pair.
pub fn serial_solution(inst: &Instance) -> Solution {
    let mut tours = vec![Vec::new(); inst.m()];
    for c in inst.customers() {
        tours[0].push(Op::drop(c));
        tours[0].push(Op::pick(c));
    }
    Solution::from_tours(tours)
}

/// Builds the starting solution for the search. Deterministic; the seed is
/// accepted for interface symmetry.
pub fn construct_initial(inst: &Instance, _seed: u64) -> Solution {
    let order = sweep_order(inst);
    let mut secs = sectors(&order, inst.m());
    balance(inst, &mut secs);
    let tours: Vec<Vec<Op>> = secs.iter().map(|s| nearest_feasible_route(inst, s)).collect();
    let mut sol = Solution::from_tours(tours);
    let Ok(sched) = evaluate(inst, &sol) else {
        return serial_solution(inst);
    };
    let mut z = sched.makespan;
    for _ in 0..MAX_REFINE_ROUNDS {
        let next = pickup_repositioning(inst, &cross_agent_relocation(inst, &sol));
        let nz = evaluate(inst, &next).map(|s| s.makespan).unwrap_or(f64::INFINITY);
        if nz >= z {
            break;
        }
        sol = next;
        z = nz;
    }
    sol
}
