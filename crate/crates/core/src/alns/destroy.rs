//! Destroy operators: each removes both operations of a set of customers.

use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::AlnsError;
use crate::insertion::TIE_WEIGHT;
use crate::instance::Instance;
use crate::schedule::{check_tours_capacity, evaluate, EvalError, Op, Simulator, Solution};

/// Power of the rank bias in worst removal.
pub const WORST_POWER: i32 = 6;
/// Shaw relatedness weights: travel time, dropoff-time gap, vehicle mismatch.
pub const SHAW_PHI: f64 = 9.0;
pub const SHAW_CHI: f64 = 3.0;
pub const SHAW_OMEGA: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DestroyOp {
    Random,
    Worst,
    Shaw,
    Cluster,
    Route,
    CriticalPath,
}

impl DestroyOp {
    pub const ALL: [DestroyOp; 6] = [
        DestroyOp::Random,
        DestroyOp::Worst,
        DestroyOp::Shaw,
        DestroyOp::Cluster,
        DestroyOp::Route,
        DestroyOp::CriticalPath,
    ];
}

impl fmt::Display for DestroyOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// `(q_min, q_max)` with `q_max = max(4, floor(0.05 n))` and
/// `q_min = max(4, floor(q_max / 2))`.
pub fn removal_bounds(n: usize) -> (usize, usize) {
    let q_max = 4.max(n / 20);
    let q_min = 4.max(q_max / 2);
    (q_min, q_max)
}

/// Shaw relatedness; lower is more related.
pub fn shaw_relatedness(d: f64, drop_gap: f64, same_drop_vehicle: bool, same_pick_vehicle: bool) -> f64 {
    let mut r = SHAW_PHI * d + SHAW_CHI * drop_gap.abs();
    if !same_drop_vehicle {
        r += SHAW_OMEGA / 2.0;
    }
    if !same_pick_vehicle {
        r += SHAW_OMEGA / 2.0;
    }
    r
}

/// Removes `q` customers chosen by `op` (clamped to the number present).
///
/// Route removal takes a whole route and tops up to `q_min` by proximity;
/// critical-path removal tops up to `q` by removal gain. Removing a customer
/// can leave another vehicle's pickup with no room (its route no longer
/// dropped the resource first), so customers owning the first such violation
/// are removed as well until the partial tours are capacity-feasible. The
/// returned list is exactly what was removed.
pub fn destroy(
    inst: &Instance,
    sol: &Solution,
    op: DestroyOp,
    q: usize,
    q_min: usize,
    rng: &mut impl Rng,
) -> Result<(Solution, Vec<usize>), AlnsError> {
    let present = sol.customers();
    if present.is_empty() {
        return Err(AlnsError::EmptySolution);
    }
    let q = q.min(present.len());
    let mut removed = match op {
        DestroyOp::Random => present.choose_multiple(rng, q).copied().collect(),
        DestroyOp::Worst => worst(inst, sol, q, rng),
        DestroyOp::Shaw => shaw(inst, sol, &present, q, rng)?,
        DestroyOp::Cluster => cluster(inst, &present, q, rng),
        DestroyOp::Route => route(inst, sol, &present, q_min.min(present.len()), rng),
        DestroyOp::CriticalPath => critical_path(inst, sol, q, rng)?,
    };
    let mut partial = sol.clone();
    partial.remove_customers(&removed);
    while let Err(EvalError::CapacityViolation { vehicle, position }) = check_tours_capacity(&partial.tours, inst.k()) {
        let c = partial.tours[vehicle][position].customer;
        removed.push(c);
        partial.remove_customers(&[c]);
    }
    Ok((partial, removed))
}

/// Cost used to rank removal gains: makespan with the summed return times
/// as a tie-breaker, so customers off the bottleneck route still differ.
fn cost(sim: &mut Simulator, inst: &Instance, tours: &[Vec<Op>]) -> f64 {
    match sim.score_tours_unchecked(inst, tours) {
        Ok(s) => s.makespan + TIE_WEIGHT * s.total_return,
        Err(_) => f64::INFINITY,
    }
}

/// Removal gain of every customer still in `tours`, sorted by decreasing
/// gain (lowest index on ties).
fn ranked_gains(inst: &Instance, sim: &mut Simulator, tours: &[Vec<Op>]) -> Vec<(f64, usize)> {
    let base = cost(sim, inst, tours);
    let mut gains = Vec::new();
    let mut scratch: Vec<Vec<Op>> = tours.to_vec();
    for c in Solution::from_tours(tours.to_vec()).customers() {
        for (t, s) in scratch.iter_mut().zip(tours) {
            t.clear();
            t.extend(s.iter().filter(|o| o.customer != c));
        }
        gains.push((base - cost(sim, inst, &scratch), c));
    }
    gains.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    gains
}

/// Worst removal: rank by removal gain, take rank `floor(y^p * len)`.
/// Gains are recomputed after every removal.
fn worst(inst: &Instance, sol: &Solution, q: usize, rng: &mut impl Rng) -> Vec<usize> {
    let mut sim = Simulator::new(inst);
    let mut tours = sol.tours.clone();
    let mut removed = Vec::with_capacity(q);
    while removed.len() < q {
        let ranked = ranked_gains(inst, &mut sim, &tours);
        let y: f64 = rng.gen();
        let idx = ((y.powi(WORST_POWER) * ranked.len() as f64) as usize).min(ranked.len() - 1);
        let c = ranked[idx].1;
        removed.push(c);
        for t in &mut tours {
            t.retain(|o| o.customer != c);
        }
    }
    removed
}

/// Shaw removal: grow from a random seed by repeatedly adding the unremoved
/// customer least distant (in relatedness) from a randomly chosen member of
/// the removed set.
fn shaw(
    inst: &Instance,
    sol: &Solution,
    present: &[usize],
    q: usize,
    rng: &mut impl Rng,
) -> Result<Vec<usize>, AlnsError> {
    let sched = evaluate(inst, sol).map_err(AlnsError::Infeasible)?;
    let mut removed = vec![*present.choose(rng).expect("nonempty")];
    let mut left: Vec<usize> = present.iter().copied().filter(|&c| c != removed[0]).collect();
    while removed.len() < q {
        let r = *removed.choose(rng).expect("nonempty");
        let (idx, _) = left
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                let rel = shaw_relatedness(
                    inst.d(r, c),
                    sched.t_drop[r] - sched.t_drop[c],
                    sched.drop_vehicle[r] == sched.drop_vehicle[c],
                    sched.pick_vehicle[r] == sched.pick_vehicle[c],
                );
                (i, rel)
            })
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("q <= present");
        removed.push(left.remove(idx));
    }
    Ok(removed)
}

/// Cluster removal: a random center and its `q - 1` nearest customers.
fn cluster(inst: &Instance, present: &[usize], q: usize, rng: &mut impl Rng) -> Vec<usize> {
    let center = *present.choose(rng).expect("nonempty");
    let mut others: Vec<usize> = present.iter().copied().filter(|&c| c != center).collect();
    others.sort_by(|&a, &b| inst.d(center, a).total_cmp(&inst.d(center, b)).then(a.cmp(&b)));
    let mut removed = vec![center];
    removed.extend(others.into_iter().take(q - 1));
    removed
}

/// Customers with at least one operation on route `v`, in route order.
fn route_customers(sol: &Solution, v: usize) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::new();
    for op in &sol.tours[v] {
        if !out.contains(&op.customer) {
            out.push(op.customer);
        }
    }
    out
}

/// Route removal: every customer touching a random nonempty route, topped up
/// to `q_min` with the customers nearest to the removed set.
fn route(inst: &Instance, sol: &Solution, present: &[usize], q_min: usize, rng: &mut impl Rng) -> Vec<usize> {
    let nonempty: Vec<usize> = (0..sol.tours.len()).filter(|&v| !sol.tours[v].is_empty()).collect();
    let v = *nonempty.choose(rng).expect("solution has customers");
    let mut removed = route_customers(sol, v);
    while removed.len() < q_min {
        let next = present
            .iter()
            .copied()
            .filter(|c| !removed.contains(c))
            .map(|c| {
                let d = removed.iter().map(|&r| inst.d(r, c)).fold(f64::INFINITY, f64::min);
                (d, c)
            })
            .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        match next {
            Some((_, c)) => removed.push(c),
            None => break,
        }
    }
    removed
}

/// Critical-path removal: `q` random customers touching the bottleneck
/// route, topped up by largest removal gain when that route is too short.
fn critical_path(inst: &Instance, sol: &Solution, q: usize, rng: &mut impl Rng) -> Result<Vec<usize>, AlnsError> {
    let sched = evaluate(inst, sol).map_err(AlnsError::Infeasible)?;
    let mut removed = route_customers(sol, sched.bottleneck());
    if removed.len() >= q {
        removed.shuffle(rng);
        removed.truncate(q);
        return Ok(removed);
    }
    let mut rest = sol.clone();
    rest.remove_customers(&removed);
    let mut sim = Simulator::new(inst);
    for (_, c) in ranked_gains(inst, &mut sim, &rest.tours) {
        if removed.len() == q {
            break;
        }
        removed.push(c);
    }
    Ok(removed)
}
