//! Deterministic intensification moves applied to the current solution.

use crate::instance::Instance;
use crate::schedule::{Op, Score, Simulator, Solution};

/// Vehicles whose return time is at least this fraction of the makespan
/// count as near-bottleneck.
pub const NEAR_BOTTLENECK: f64 = 0.9;
/// Passes per invocation.
pub const MAX_PASSES: usize = 3;

#[derive(Debug, Clone, Copy)]
enum Move {
    Relocate((usize, usize), (usize, usize)),
    Swap((usize, usize), (usize, usize)),
}

fn strictly_lower_makespan(a: &Score, b: &Score) -> bool {
    a.makespan < b.makespan - 1e-9 * b.makespan.abs().max(1.0)
}

fn better(a: &Score, b: &Score) -> bool {
    a.makespan < b.makespan || (a.makespan == b.makespan && a.total_return < b.total_return)
}

/// Repositions pickups served by near-bottleneck vehicles. Each pass
/// evaluates every relocation of such a pickup and every exchange of it with
/// a pickup on another vehicle, then applies the single best move that lowers
/// the makespan. Up to [`MAX_PASSES`] passes.
///
/// Every vehicle leaves full and may never exceed `k`, so each route performs
/// as many pickups as dropoffs; a lone pickup moved to another vehicle always
/// overflows it. Exchanges are the capacity-preserving way to hand a pickup
/// to a different vehicle.
pub fn pickup_repositioning(inst: &Instance, sol: &Solution) -> Solution {
    let mut sim = Simulator::new(inst);
    let Ok(mut score) = sim.score(inst, sol) else {
        return sol.clone();
    };
    let mut tours = sol.tours.clone();
    let m = tours.len();
    for _ in 0..MAX_PASSES {
        let returns = sim_returns(&mut sim, inst, &tours);
        let threshold = NEAR_BOTTLENECK * score.makespan;
        let mut best: Option<(Score, Move)> = None;
        let offer = |s: Score, mv: Move, best: &mut Option<(Score, Move)>| {
            if strictly_lower_makespan(&s, &score) && best.as_ref().is_none_or(|b| better(&s, &b.0)) {
                *best = Some((s, mv));
            }
        };
        for v in (0..m).filter(|&v| returns[v] >= threshold) {
            for i in 0..tours[v].len() {
                let op = tours[v][i];
                if op.is_drop() {
                    continue;
                }
                for w in (0..m).filter(|&w| w != v) {
                    for j in 0..tours[w].len() {
                        if tours[w][j].is_drop() {
                            continue;
                        }
                        tours[v][i] = tours[w][j];
                        tours[w][j] = op;
                        if let Ok(s) = sim.score_tours(inst, &tours) {
                            offer(s, Move::Swap((v, i), (w, j)), &mut best);
                        }
                        tours[w][j] = tours[v][i];
                        tours[v][i] = op;
                    }
                }
                tours[v].remove(i);
                let (dv, di) = locate(&tours, Op::drop(op.customer));
                for w in 0..m {
                    let start = if w == dv { di + 1 } else { 0 };
                    for j in start..=tours[w].len() {
                        if (w, j) == (v, i) {
                            continue;
                        }
                        tours[w].insert(j, op);
                        if let Ok(s) = sim.score_tours(inst, &tours) {
                            offer(s, Move::Relocate((v, i), (w, j)), &mut best);
                        }
                        tours[w].remove(j);
                    }
                }
                tours[v].insert(i, op);
            }
        }
        let Some((s, mv)) = best else { break };
        match mv {
            Move::Relocate((v, i), (w, j)) => {
                let op = tours[v].remove(i);
                tours[w].insert(j, op);
            }
            Move::Swap((v, i), (w, j)) => {
                let op = tours[v][i];
                tours[v][i] = tours[w][j];
                tours[w][j] = op;
            }
        }
        score = s;
    }
    Solution::from_tours(tours)
}

/// Moves whole customers (both operations) that touch the bottleneck route
/// onto another vehicle, trying every dropoff/pickup position pair there.
/// Each pass re-identifies the bottleneck and applies the best move that
/// lowers the makespan. Up to [`MAX_PASSES`] passes.
pub fn cross_agent_relocation(inst: &Instance, sol: &Solution) -> Solution {
    let m = inst.m();
    if m < 2 {
        return sol.clone();
    }
    let mut sim = Simulator::new(inst);
    let Ok(mut score) = sim.score(inst, sol) else {
        return sol.clone();
    };
    let mut tours = sol.tours.clone();
    for _ in 0..MAX_PASSES {
        let returns = sim_returns(&mut sim, inst, &tours);
        let b = (0..m).fold(0, |acc, v| if returns[v] > returns[acc] { v } else { acc });
        let mut customers: Vec<usize> = tours[b].iter().map(|o| o.customer).collect();
        customers.sort_unstable();
        customers.dedup();
        let mut best: Option<(Score, usize, usize, usize, usize)> = None;
        for &c in &customers {
            let mut base = tours.clone();
            for t in &mut base {
                t.retain(|o| o.customer != c);
            }
            for w in (0..m).filter(|&w| w != b) {
                let len = base[w].len();
                for di in 0..=len {
                    for pj in di..=len {
                        let mut cand = base.clone();
                        cand[w].insert(pj, Op::pick(c));
                        cand[w].insert(di, Op::drop(c));
                        if let Ok(s) = sim.score_tours(inst, &cand) {
                            if strictly_lower_makespan(&s, &score) && best.as_ref().is_none_or(|x| better(&s, &x.0)) {
                                best = Some((s, c, w, di, pj));
                            }
                        }
                    }
                }
            }
        }
        let Some((s, c, w, di, pj)) = best else { break };
        for t in &mut tours {
            t.retain(|o| o.customer != c);
        }
        tours[w].insert(pj, Op::pick(c));
        tours[w].insert(di, Op::drop(c));
        score = s;
    }
    Solution::from_tours(tours)
}

fn sim_returns(sim: &mut Simulator, inst: &Instance, tours: &[Vec<Op>]) -> Vec<f64> {
    sim.score_tours(inst, tours).expect("tours stay feasible");
    sim.return_times().to_vec()
}

fn locate(tours: &[Vec<Op>], op: Op) -> (usize, usize) {
    tours
        .iter()
        .enumerate()
        .find_map(|(v, t)| t.iter().position(|&o| o == op).map(|i| (v, i)))
        .expect("operation present")
}
