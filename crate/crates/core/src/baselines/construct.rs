//! Insertion-based constructions: max-regret and Clarke-Wright savings.

use crate::insertion::{apply, InsertionEngine, Placement};
use crate::instance::Instance;
use crate::schedule::{Op, Simulator, Solution};

/// Regret-2 insertion of whole customers, dropoff and pickup on the same
/// vehicle. The customer whose best and second-best positions differ most
/// goes first; a customer with a single feasible position has infinite regret.
pub fn max_regret(inst: &Instance) -> Option<Solution> {
    let m = inst.m();
    let mut tours: Vec<Vec<Op>> = vec![Vec::new(); m];
    let mut pending: Vec<usize> = inst.customers().collect();
    let mut eng = InsertionEngine::new(inst);
    while !pending.is_empty() {
        eng.rebuild(&tours).ok()?;
        // (regret, best cost, customer, placement)
        let mut pick: Option<(f64, f64, usize, Placement)> = None;
        for &c in &pending {
            let mut c1: Option<(f64, Placement)> = None;
            let mut c2 = f64::INFINITY;
            eng.for_each_placement(&tours, c, |pl, est| {
                if pl.drop.map(|d| d.0) != Some(pl.pick.0) {
                    return;
                }
                let cost = est.cost();
                match c1 {
                    Some((b, _)) if cost >= b => c2 = c2.min(cost),
                    Some((b, _)) => {
                        c2 = b;
                        c1 = Some((cost, pl));
                    }
                    None => c1 = Some((cost, pl)),
                }
            });
            let Some((best, pl)) = c1 else { continue };
            let regret = c2 - best;
            let better = match pick {
                None => true,
                Some((r, b, _, _)) => regret > r || (regret == r && best < b),
            };
            if better {
                pick = Some((regret, best, c, pl));
            }
        }
        let (_, _, c, pl) = pick?;
        apply(&mut tours, c, pl);
        pending.retain(|&x| x != c);
    }
    Some(Solution::from_tours(tours))
}

/// Inserts the pickups of `customers` (whose dropoffs are already placed)
/// one at a time at the cheapest two-pass position that keeps the tours
/// deadlock-free. When no interior position works, the pickup is appended to
/// the end of a route with spare room, which can never close a wait cycle.
pub fn insert_open_pickups(inst: &Instance, tours: &mut [Vec<Op>], customers: &[usize]) -> Option<()> {
    let mut eng = InsertionEngine::new(inst);
    let mut sim = Simulator::new(inst);
    for &c in customers {
        eng.rebuild(tours).ok()?;
        let mut options: Vec<(f64, Placement)> = Vec::new();
        eng.for_each_pickup_placement(tours, c, |pl, est| options.push((est.cost(), pl)));
        options.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut placed = false;
        for (_, pl) in options {
            apply(tours, c, pl);
            if sim.score_tours(inst, tours).is_ok() {
                placed = true;
                break;
            }
            let (v, j) = pl.pick;
            tours[v].remove(j);
        }
        if !placed {
            let v = (0..tours.len()).find(|&v| {
                let drops = tours[v].iter().filter(|o| o.is_drop()).count() as isize;
                let picks = tours[v].len() as isize - drops;
                picks < drops
            })?;
            tours[v].push(Op::pick(c));
        }
    }
    Some(())
}

/// Clarke-Wright savings on dropoff chains followed by pickup insertion.
///
/// Savings merges join chain endpoints while the merged chain's workload
/// (sum of `2 d(0,c) + p_c`) stays within 10% above the per-vehicle mean;
/// leftover chains beyond `m` are merged pairwise, lightest first. Each chain
/// becomes one vehicle's dropoff sequence; when the vehicle runs empty it
/// first collects its own resource that is ready soonest. Remaining pickups
/// go in by [`insert_open_pickups`] in dropoff order.
pub fn clarke_wright(inst: &Instance) -> Option<Solution> {
    let n = inst.n();
    let m = inst.m();
    let k = inst.k();
    let work = |c: usize| 2.0 * inst.d(0, c) + inst.p(c);
    let cap = 1.1 * inst.customers().map(work).sum::<f64>() / m as f64;

    let mut chains: Vec<Vec<usize>> = inst.customers().map(|c| vec![c]).collect();
    let mut chain_of: Vec<usize> = (0..=n).map(|c| c.saturating_sub(1)).collect();
    let mut load: Vec<f64> = inst.customers().map(work).collect();
    let mut alive = n;

    let mut savings: Vec<(f64, usize, usize)> = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 1..=n {
        for j in i + 1..=n {
            savings.push((saving(inst, i, j), i, j));
        }
    }
    savings.sort_by(|a, b| b.0.total_cmp(&a.0).then((a.1, a.2).cmp(&(b.1, b.2))));

    for &(_, i, j) in &savings {
        if alive <= m {
            break;
        }
        let (a, b) = (chain_of[i], chain_of[j]);
        if a == b || load[a] + load[b] > cap {
            continue;
        }
        let (ca, cb) = (&chains[a], &chains[b]);
        let i_end = *ca.last().unwrap() == i;
        let i_start = ca[0] == i;
        let j_start = cb[0] == j;
        let j_end = *cb.last().unwrap() == j;
        if !(i_end || i_start) || !(j_start || j_end) {
            continue;
        }
        let mut left = std::mem::take(&mut chains[a]);
        let mut right = std::mem::take(&mut chains[b]);
        if !i_end {
            left.reverse();
        }
        if !j_start {
            right.reverse();
        }
        left.extend(right);
        for &c in &left {
            chain_of[c] = a;
        }
        chains[a] = left;
        load[a] += load[b];
        load[b] = 0.0;
        alive -= 1;
    }

    let mut live: Vec<(Vec<usize>, f64)> = chains
        .into_iter()
        .zip(load)
        .filter(|(c, _)| !c.is_empty())
        .collect();
    while live.len() > m {
        live.sort_by(|a, b| a.1.total_cmp(&b.1));
        let (second, w2) = live.remove(1);
        let (first, w1) = &mut live[0];
        // Join in the orientation with the larger saving.
        let (fa, fz) = (first[0], *first.last().unwrap());
        let (sa, sz) = (second[0], *second.last().unwrap());
        let s = |x, y| saving(inst, x, y);
        let options = [(s(fz, sa), false, false), (s(fz, sz), false, true), (s(fa, sa), true, false)];
        let best = options.iter().copied().fold(options[0], |acc, o| if o.0 > acc.0 { o } else { acc });
        if best.1 {
            first.reverse();
        }
        let mut second = second;
        if best.2 {
            second.reverse();
        }
        first.extend(second);
        *w1 += w2;
    }

    let mut tours: Vec<Vec<Op>> = vec![Vec::new(); m];
    for (v, (chain, _)) in live.iter().enumerate() {
        let tour = &mut tours[v];
        let (mut t, mut loc, mut q) = (0.0, 0usize, k);
        let mut open: Vec<(usize, f64)> = Vec::new();
        for &c in chain {
            if q == 0 {
                // Forced pickup: the own resource that completes first.
                let (idx, _) = open
                    .iter()
                    .enumerate()
                    .map(|(i, &(o, td))| (i, (t + inst.d(loc, o)).max(td + inst.p(o))))
                    .min_by(|a, b| a.1.total_cmp(&b.1))?;
                let (o, td) = open.remove(idx);
                t = (t + inst.d(loc, o)).max(td + inst.p(o));
                loc = o;
                q += 1;
                tour.push(Op::pick(o));
            }
            t += inst.d(loc, c);
            loc = c;
            q -= 1;
            open.push((c, t));
            tour.push(Op::drop(c));
        }
    }

    let mut sim = Simulator::new(inst);
    sim.score_tours(inst, &tours).ok()?;
    let mut remaining: Vec<(f64, usize)> = Vec::new();
    let mut seen_pick = vec![false; n + 1];
    for op in tours.iter().flatten() {
        if !op.is_drop() {
            seen_pick[op.customer] = true;
        }
    }
    let mut eng = InsertionEngine::new(inst);
    eng.rebuild(&tours).ok()?;
    for c in inst.customers() {
        if !seen_pick[c] {
            remaining.push((eng.drop_time(c)?, c));
        }
    }
    remaining.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let order: Vec<usize> = remaining.into_iter().map(|(_, c)| c).collect();
    insert_open_pickups(inst, &mut tours, &order)?;
    Some(Solution::from_tours(tours))
}

/// Classic savings value of joining `i` and `j`.
pub fn saving(inst: &Instance, i: usize, j: usize) -> f64 {
    inst.d(0, i) + inst.d(0, j) - inst.d(i, j)
}
