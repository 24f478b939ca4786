//! Multi-pass decoder from random keys to tours.

use super::{BrkgaParams, Chromosome};
use crate::instance::Instance;
use crate::schedule::{Op, Solution};

/// Output of [`decode`].
#[derive(Debug, Clone, PartialEq)]
pub struct DecodedResult {
    /// Tours of the scheduled operations; complete when
    /// `scheduled_count == 2n`.
    pub solution: Solution,
    /// Makespan of the scheduled operations.
    pub makespan: f64,
    /// `makespan + penalty * (2n - scheduled_count)`.
    pub fitness: f64,
    pub scheduled_count: usize,
}

impl DecodedResult {
    pub fn is_complete(&self, n: usize) -> bool {
        self.scheduled_count == 2 * n
    }
}

/// Vehicle suggested by a hint gene: `floor(m * alpha)`, guarded against
/// rounding just below an integer.
pub fn hint_vehicle(alpha: f64, m: usize) -> usize {
    ((m as f64 * alpha + 1e-9).floor() as usize).min(m - 1)
}

/// Decodes a chromosome. Operations are visited in ascending priority
/// (gene index on ties) for up to `2n` passes; each pass schedules every
/// still-pending operation that is feasible now on the vehicle completing it
/// earliest. Vehicles within `1e-9` of that completion time are separated by
/// distance to the hinted vehicle, then by index.
///
/// A dropoff is feasible on a vehicle holding a resource. A pickup is
/// feasible once its dropoff is scheduled, on a vehicle with a free slot;
/// with `wait_relaxation` it completes at `max(arrival, T_drop + p)`,
/// otherwise only vehicles whose clock already reached `T_drop + p` qualify.
pub fn decode(chrom: &Chromosome, inst: &Instance, params: &BrkgaParams) -> DecodedResult {
    let n = inst.n();
    let m = inst.m();
    let k = inst.k();
    debug_assert_eq!(chrom.len(), 4 * n);
    let total = 2 * n;
    let mut order: Vec<usize> = (0..total).collect();
    order.sort_by(|&a, &b| chrom.pi[a].total_cmp(&chrom.pi[b]).then(a.cmp(&b)));

    let mut time = vec![0.0; m];
    let mut loc = vec![0usize; m];
    let mut load = vec![k; m];
    let mut tours: Vec<Vec<Op>> = vec![Vec::new(); m];
    let mut t_drop = vec![f64::NAN; n + 1];
    let mut scheduled = vec![false; total];
    let mut count = 0;
    let mut visits = 0usize;

    for _pass in 0..total {
        let before = count;
        for &g in &order {
            if scheduled[g] {
                continue;
            }
            visits += 1;
            let op = Chromosome::op_of(g);
            let c = op.customer;
            let ready = if op.is_drop() {
                0.0
            } else if scheduled[g - 1] {
                t_drop[c] + inst.p(c)
            } else {
                continue;
            };
            let hint = hint_vehicle(chrom.alpha[g], m);
            let mut best: Option<(f64, usize)> = None;
            for v in 0..m {
                let arrival = time[v] + inst.d(loc[v], c);
                let done = if op.is_drop() {
                    if load[v] == 0 {
                        continue;
                    }
                    arrival
                } else {
                    if load[v] == k {
                        continue;
                    }
                    if params.wait_relaxation {
                        arrival.max(ready)
                    } else if time[v] >= ready {
                        arrival
                    } else {
                        continue;
                    }
                };
                best = match best {
                    None => Some((done, v)),
                    Some((bt, bv)) => {
                        let tol = 1e-9 * bt.abs().max(1.0);
                        if done < bt - tol {
                            Some((done, v))
                        } else if done <= bt + tol && v.abs_diff(hint) < bv.abs_diff(hint) {
                            Some((done.min(bt), v))
                        } else {
                            Some((bt, bv))
                        }
                    }
                };
            }
            let Some((_, v)) = best else { continue };
            let done = {
                let arrival = time[v] + inst.d(loc[v], c);
                if op.is_drop() {
                    arrival
                } else {
                    arrival.max(ready)
                }
            };
            if op.is_drop() {
                load[v] -= 1;
                t_drop[c] = done;
            } else {
                load[v] += 1;
            }
            time[v] = done;
            loc[v] = c;
            tours[v].push(op);
            scheduled[g] = true;
            count += 1;
        }
        if count == total || count == before {
            break;
        }
    }
    debug_assert!(visits <= total * total);

    let makespan = (0..m)
        .map(|v| if tours[v].is_empty() { 0.0 } else { time[v] + inst.d(loc[v], 0) })
        .fold(0.0, f64::max);
    let fitness = makespan + params.penalty * (total - count) as f64;
    DecodedResult {
        solution: Solution::from_tours(tours),
        makespan,
        fitness,
        scheduled_count: count,
    }
}
