//! Cheapest-insertion machinery shared by the repair operators and the
//! construction heuristics.
//!
//! Candidate placements are ranked by the two-pass estimate. Inserting an
//! operation shifts every later pass-1 time on its route by a constant detour,
//! so pass-1 times of a candidate are looked up in O(1) and only the routes
//! whose pass-2 times can change are rewalked.

use crate::instance::Instance;
use crate::schedule::{EvalError, Op};

/// Weight of the summed return times in the insertion cost. Keeps the
/// ranking sensitive to non-bottleneck routes without overriding makespan.
pub const TIE_WEIGHT: f64 = 1e-3;

/// Where to insert a customer's operations. Positions refer to the tours
/// before insertion (an operation is inserted in front of the element at
/// that index). When both land on the same route, `pick.1 >= drop.1` and the
/// dropoff comes first.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Placement {
    pub drop: Option<(usize, usize)>,
    pub pick: (usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub makespan: f64,
    pub total_return: f64,
}

impl Estimate {
    #[inline]
    pub fn cost(&self) -> f64 {
        self.makespan + TIE_WEIGHT * self.total_return
    }
}

/// Inserts the customer's operations according to `pl`.
pub fn apply(tours: &mut [Vec<Op>], customer: usize, pl: Placement) {
    let (pv, pj) = pl.pick;
    tours[pv].insert(pj, Op::pick(customer));
    // With both on one route `di <= pj`, so the dropoff lands in front.
    if let Some((dv, di)) = pl.drop {
        tours[dv].insert(di, Op::drop(customer));
    }
}

const NONE: usize = usize::MAX;

/// Candidate being priced: which routes it touches and by how much.
#[derive(Debug, Clone, Copy)]
struct Cand {
    c: usize,
    drop: Option<(usize, usize)>,
    pick: Option<(usize, usize)>,
    delta_drop: f64,
    delta_pick: f64,
    /// Pass-1 dropoff time of `c` when its dropoff is being inserted.
    new_drop1: f64,
}

/// Cached two-pass state of a set of (possibly partial) tours.
#[derive(Debug, Clone)]
pub struct InsertionEngine<'a> {
    inst: &'a Instance,
    /// Pass-1 departure times: `cum1[v][t]` is when op `t - 1` is left
    /// (`cum1[v][0] = 0`).
    cum1: Vec<Vec<f64>>,
    drop_route: Vec<usize>,
    drop_pos: Vec<usize>,
    /// `load[v][t]`: load in front of op `t`; `load[v][len]` is the final load.
    load: Vec<Vec<usize>>,
    suf_min: Vec<Vec<usize>>,
    suf_max: Vec<Vec<usize>>,
    /// Bit `r` of `deps[w]` is set when route `w` picks up a resource
    /// dropped by route `r != w`.
    deps: Vec<u64>,
    wide: bool,
    ret: Vec<f64>,
    base: Estimate,
}

impl<'a> InsertionEngine<'a> {
    pub fn new(inst: &'a Instance) -> Self {
        let n = inst.n();
        Self {
            inst,
            cum1: Vec::new(),
            drop_route: vec![NONE; n + 1],
            drop_pos: vec![NONE; n + 1],
            load: Vec::new(),
            suf_min: Vec::new(),
            suf_max: Vec::new(),
            deps: Vec::new(),
            wide: inst.m() > 64,
            ret: Vec::new(),
            base: Estimate {
                makespan: 0.0,
                total_return: 0.0,
            },
        }
    }

    /// Recomputes the cached state. Tours may omit customers and may contain
    /// dropoffs without pickups, but never a pickup without its dropoff.
    pub fn rebuild(&mut self, tours: &[Vec<Op>]) -> Result<(), EvalError> {
        let inst = self.inst;
        let k = inst.k();
        let m = tours.len();
        self.drop_route.fill(NONE);
        self.cum1.resize(m, Vec::new());
        self.load.resize(m, Vec::new());
        self.suf_min.resize(m, Vec::new());
        self.suf_max.resize(m, Vec::new());
        self.deps.clear();
        self.deps.resize(m, 0);
        self.ret.resize(m, 0.0);
        for (v, tour) in tours.iter().enumerate() {
            let cum = &mut self.cum1[v];
            cum.clear();
            cum.push(0.0);
            let load = &mut self.load[v];
            load.clear();
            load.push(k);
            let (mut t, mut loc, mut q) = (0.0, 0, k as isize);
            for (i, op) in tour.iter().enumerate() {
                t += inst.d(loc, op.customer);
                loc = op.customer;
                cum.push(t);
                if op.is_drop() {
                    self.drop_route[loc] = v;
                    self.drop_pos[loc] = i;
                    q -= 1;
                } else {
                    q += 1;
                }
                if q < 0 || q > k as isize {
                    return Err(EvalError::CapacityViolation { vehicle: v, position: i });
                }
                load.push(q as usize);
            }
            let len = load.len();
            let (smin, smax) = (&mut self.suf_min[v], &mut self.suf_max[v]);
            smin.clear();
            smin.resize(len, 0);
            smax.clear();
            smax.resize(len, 0);
            smin[len - 1] = load[len - 1];
            smax[len - 1] = load[len - 1];
            for t in (0..len - 1).rev() {
                smin[t] = smin[t + 1].min(load[t]);
                smax[t] = smax[t + 1].max(load[t]);
            }
        }
        for (w, tour) in tours.iter().enumerate() {
            for (i, op) in tour.iter().enumerate() {
                if op.is_drop() {
                    continue;
                }
                let r = self.drop_route[op.customer];
                if r == NONE {
                    return Err(EvalError::MalformedSolution(format!(
                        "pickup of {} without dropoff",
                        op.customer
                    )));
                }
                if r == w && self.drop_pos[op.customer] > i {
                    return Err(EvalError::Deadlock { pending: 1 });
                }
                if r != w && !self.wide {
                    self.deps[w] |= 1 << r;
                }
            }
        }
        let none = Cand {
            c: 0,
            drop: None,
            pick: None,
            delta_drop: 0.0,
            delta_pick: 0.0,
            new_drop1: 0.0,
        };
        let mut mk: f64 = 0.0;
        let mut total = 0.0;
        for w in 0..m {
            let r = self.walk(tours, w, &none);
            self.ret[w] = r;
            mk = mk.max(r);
            total += r;
        }
        self.base = Estimate {
            makespan: mk,
            total_return: total,
        };
        Ok(())
    }

    pub fn base(&self) -> Estimate {
        self.base
    }

    /// Pass-2 return estimates of the cached tours.
    pub fn return_times(&self) -> &[f64] {
        &self.ret
    }

    /// Pass-1 dropoff time of a customer present in the cached tours.
    pub fn drop_time(&self, c: usize) -> Option<f64> {
        let r = self.drop_route[c];
        (r != NONE).then(|| self.cum1[r][self.drop_pos[c] + 1])
    }

    pub fn drop_vehicle(&self, c: usize) -> Option<usize> {
        let r = self.drop_route[c];
        (r != NONE).then_some(r)
    }

    #[inline]
    fn loc(tour: &[Op], i: usize) -> usize {
        if i < tour.len() {
            tour[i].customer
        } else {
            0
        }
    }

    #[inline]
    fn detour(&self, tour: &[Op], at: usize, c: usize) -> f64 {
        let prev = if at == 0 { 0 } else { tour[at - 1].customer };
        let next = Self::loc(tour, at);
        self.inst.d(prev, c) + self.inst.d(c, next) - self.inst.d(prev, next)
    }

    /// Pass-1 dropoff time of existing customer `x` under candidate `cand`.
    #[inline]
    fn shifted_drop1(&self, x: usize, cand: &Cand) -> f64 {
        let r = self.drop_route[x];
        let pos = self.drop_pos[x];
        let mut t = self.cum1[r][pos + 1];
        if let Some((dv, di)) = cand.drop {
            if dv == r && pos >= di {
                t += cand.delta_drop;
            }
        }
        if let Some((pv, pj)) = cand.pick {
            if pv == r && pos >= pj {
                t += cand.delta_pick;
            }
        }
        t
    }

    /// Pass-2 walk of route `w` with the candidate's operations spliced in.
    fn walk(&self, tours: &[Vec<Op>], w: usize, cand: &Cand) -> f64 {
        let inst = self.inst;
        let tour = &tours[w];
        let ins_d = cand.drop.filter(|&(v, _)| v == w).map(|(_, i)| i);
        let ins_p = cand.pick.filter(|&(v, _)| v == w).map(|(_, j)| j);
        if tour.is_empty() && ins_d.is_none() && ins_p.is_none() {
            return 0.0;
        }
        let (mut t, mut loc) = (0.0, 0usize);
        let c = cand.c;
        let drop_ready = |this: &Self| -> f64 {
            if cand.drop.is_some() {
                cand.new_drop1 + inst.p(c)
            } else {
                this.shifted_drop1(c, cand) + inst.p(c)
            }
        };
        for pos in 0..=tour.len() {
            if ins_d == Some(pos) {
                t += inst.d(loc, c);
                loc = c;
            }
            if ins_p == Some(pos) {
                t += inst.d(loc, c);
                loc = c;
                t = t.max(drop_ready(self));
            }
            if pos == tour.len() {
                break;
            }
            let op = tour[pos];
            t += inst.d(loc, op.customer);
            loc = op.customer;
            if !op.is_drop() {
                t = t.max(self.shifted_drop1(op.customer, cand) + inst.p(op.customer));
            }
        }
        t + inst.d(loc, 0)
    }

    fn price(&self, tours: &[Vec<Op>], cand: &Cand) -> Estimate {
        let m = tours.len();
        let mut changed = 0u64;
        if let Some((v, _)) = cand.drop {
            changed |= 1 << (v & 63);
        }
        if let Some((v, _)) = cand.pick {
            changed |= 1 << (v & 63);
        }
        let mut mk: f64 = 0.0;
        let mut total = 0.0;
        for w in 0..m {
            let touched = cand.drop.is_some_and(|(v, _)| v == w) || cand.pick.is_some_and(|(v, _)| v == w);
            let r = if self.wide || touched || self.deps[w] & changed != 0 {
                self.walk(tours, w, cand)
            } else {
                self.ret[w]
            };
            mk = mk.max(r);
            total += r;
        }
        Estimate {
            makespan: mk,
            total_return: total,
        }
    }

    /// Prices every capacity-feasible placement of both operations of a
    /// customer absent from the cached tours.
    pub fn for_each_placement(&self, tours: &[Vec<Op>], c: usize, mut f: impl FnMut(Placement, Estimate)) {
        let k = self.inst.k();
        let m = tours.len();
        for dv in 0..m {
            let dt = &tours[dv];
            for di in 0..=dt.len() {
                if self.load[dv][di] < 1 {
                    continue;
                }
                // With the pickup elsewhere, every later load drops by one.
                let cross_ok = self.suf_min[dv][di] >= 1;
                let prev = if di == 0 { 0 } else { dt[di - 1].customer };
                let new_drop1 = self.cum1[dv][di] + self.inst.d(prev, c);
                let delta_drop = self.detour(dt, di, c);
                for pv in 0..m {
                    let pt = &tours[pv];
                    if pv != dv && !cross_ok {
                        continue;
                    }
                    let start = if pv == dv { di } else { 0 };
                    for pj in start..=pt.len() {
                        let delta_pick = if pv == dv {
                            // Loads between the two inserted operations drop by one.
                            if self.load[dv][pj] < 1 {
                                break;
                            }
                            if pj == di {
                                0.0
                            } else {
                                self.detour(pt, pj, c)
                            }
                        } else {
                            if self.suf_max[pv][pj] >= k {
                                continue;
                            }
                            self.detour(pt, pj, c)
                        };
                        let cand = Cand {
                            c,
                            drop: Some((dv, di)),
                            pick: Some((pv, pj)),
                            delta_drop,
                            delta_pick,
                            new_drop1,
                        };
                        let pl = Placement {
                            drop: Some((dv, di)),
                            pick: (pv, pj),
                        };
                        f(pl, self.price(tours, &cand));
                    }
                }
            }
        }
    }

    /// Prices every feasible pickup position for a customer whose dropoff is
    /// already in the cached tours and whose pickup is not.
    pub fn for_each_pickup_placement(&self, tours: &[Vec<Op>], c: usize, mut f: impl FnMut(Placement, Estimate)) {
        let k = self.inst.k();
        let dr = self.drop_route[c];
        debug_assert!(dr != NONE, "customer {c} has no dropoff");
        for (pv, pt) in tours.iter().enumerate() {
            let start = if pv == dr { self.drop_pos[c] + 1 } else { 0 };
            for pj in start..=pt.len() {
                if self.suf_max[pv][pj] >= k {
                    continue;
                }
                let cand = Cand {
                    c,
                    drop: None,
                    pick: Some((pv, pj)),
                    delta_drop: 0.0,
                    delta_pick: self.detour(pt, pj, c),
                    new_drop1: 0.0,
                };
                f(
                    Placement {
                        drop: None,
                        pick: (pv, pj),
                    },
                    self.price(tours, &cand),
                );
            }
        }
    }

    /// Prices appending a dropoff-only operation at `(v, i)`; used by
    /// constructions that place pickups later.
    pub fn drop_only(&self, tours: &[Vec<Op>], c: usize, v: usize, i: usize) -> Option<Estimate> {
        if self.suf_min[v][i] < 1 {
            return None;
        }
        let dt = &tours[v];
        let prev = if i == 0 { 0 } else { dt[i - 1].customer };
        let cand = Cand {
            c,
            drop: Some((v, i)),
            pick: None,
            delta_drop: self.detour(dt, i, c),
            delta_pick: 0.0,
            new_drop1: self.cum1[v][i] + self.inst.d(prev, c),
        };
        Some(self.price(tours, &cand))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::tests::{random_instance, toy};
    use crate::schedule::TwoPass;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Every priced placement must equal a from-scratch two-pass estimate of
    /// the tours with the placement applied.
    #[test]
    fn incremental_prices_match_full_two_pass() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for round in 0..40 {
            let n = 3 + round % 5;
            let m = 1 + round % 3;
            let k = 1 + round % 3;
            let inst = random_instance(&mut rng, n, m, k);
            let mut tours = vec![Vec::new(); m];
            let mut eng = InsertionEngine::new(&inst);
            let mut tp = TwoPass::new(&inst);
            for c in 1..=n {
                eng.rebuild(&tours).unwrap();
                let mut options = Vec::new();
                eng.for_each_placement(&tours, c, |pl, est| {
                    let mut t = tours.clone();
                    apply(&mut t, c, pl);
                    let full = tp.estimate(&inst, &t).unwrap();
                    assert!((full - est.makespan).abs() < 1e-9, "{full} vs {}", est.makespan);
                    let sum: f64 = tp.return_times().iter().sum();
                    assert!((sum - est.total_return).abs() < 1e-9);
                    options.push(pl);
                });
                assert!(!options.is_empty());
                let pl = options[rng.gen_range(0..options.len())];
                apply(&mut tours, c, pl);
            }
        }
    }

    #[test]
    fn pickup_only_prices_match() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..30 {
            let inst = random_instance(&mut rng, 5, 2, 3);
            // Drops spread over the routes, pickups added one at a time.
            let mut tours = vec![vec![Op::drop(1), Op::drop(2)], vec![Op::drop(3), Op::drop(4), Op::drop(5)]];
            let mut eng = InsertionEngine::new(&inst);
            let mut tp = TwoPass::new(&inst);
            for c in 1..=5 {
                eng.rebuild(&tours).unwrap();
                let mut options = Vec::new();
                eng.for_each_pickup_placement(&tours, c, |pl, est| {
                    let mut t = tours.clone();
                    apply(&mut t, c, pl);
                    let full = tp.estimate(&inst, &t).unwrap();
                    assert!((full - est.makespan).abs() < 1e-9);
                    options.push(pl);
                });
                let pl = options[rng.gen_range(0..options.len())];
                apply(&mut tours, c, pl);
            }
            let sol = crate::schedule::Solution::from_tours(tours);
            sol.check_capacity(3).unwrap();
        }
    }

    #[test]
    fn capacity_gates() {
        let inst = toy(2, 1);
        let tours = vec![vec![Op::drop(1)], vec![]];
        let mut eng = InsertionEngine::new(&inst);
        eng.rebuild(&tours).unwrap();
        let mut seen = Vec::new();
        eng.for_each_placement(&tours, 2, |pl, _| seen.push(pl));
        // Route 0 is empty-handed after D1, so a dropoff there must be picked
        // up again on route 0 before D1.
        for pl in &seen {
            assert_ne!(pl.drop, Some((0, 1)));
            if pl.drop == Some((0, 0)) {
                assert_eq!(pl.pick, (0, 0));
            }
        }
        assert!(seen.contains(&Placement {
            drop: Some((0, 0)),
            pick: (0, 0)
        }));
        assert!(seen.contains(&Placement {
            drop: Some((1, 0)),
            pick: (0, 1)
        }));
        assert!(seen.contains(&Placement {
            drop: Some((1, 0)),
            pick: (1, 0)
        }));
        assert!(!seen.contains(&Placement {
            drop: Some((1, 0)),
            pick: (0, 0)
        }));
    }

    #[test]
    fn apply_same_route_order() {
        let mut tours = vec![vec![Op::drop(1), Op::pick(1)]];
        apply(
            &mut tours,
            2,
            Placement {
                drop: Some((0, 1)),
                pick: (0, 1),
            },
        );
        assert_eq!(tours[0], vec![Op::drop(1), Op::drop(2), Op::pick(2), Op::pick(1)]);
        let mut tours = vec![vec![Op::drop(1), Op::pick(1)]];
        apply(
            &mut tours,
            2,
            Placement {
                drop: Some((0, 0)),
                pick: (0, 2),
            },
        );
        assert_eq!(tours[0], vec![Op::drop(2), Op::drop(1), Op::pick(1), Op::pick(2)]);
    }
}
