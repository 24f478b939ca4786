use serde::{Deserialize, Serialize};

use super::{Schedule, Solution};
use crate::instance::Instance;

/// Coordination statistics of a schedule, as percentages of all customers.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CoordinationMetrics {
    /// Customers whose dropoff and pickup are done by different vehicles.
    pub cross_agent_pct: f64,
    /// Customers for which the dropoff or pickup vehicle executes another
    /// customer's operation strictly between their dropoff and pickup times.
    pub interleaved_pct: f64,
}

pub fn coordination_metrics(inst: &Instance, sol: &Solution, schedule: &Schedule) -> CoordinationMetrics {
    let n = inst.n();
    if n == 0 {
        return CoordinationMetrics::default();
    }
    // Execution times per vehicle, tagged with the customer.
    let exec: Vec<Vec<(usize, f64)>> = sol
        .tours
        .iter()
        .enumerate()
        .map(|(v, tour)| {
            (0..tour.len())
                .map(|i| (tour[i].customer, schedule.exec_time(sol, v, i)))
                .collect()
        })
        .collect();

    let mut cross = 0usize;
    let mut interleaved = 0usize;
    for c in inst.customers() {
        let (Some(dv), Some(pv)) = (schedule.drop_vehicle[c], schedule.pick_vehicle[c]) else {
            continue;
        };
        if dv != pv {
            cross += 1;
        }
        let (lo, hi) = (schedule.t_drop[c], schedule.t_pickup[c]);
        let busy = |v: usize| exec[v].iter().any(|&(x, t)| x != c && t > lo && t < hi);
        if busy(dv) || (pv != dv && busy(pv)) {
            interleaved += 1;
        }
    }
    CoordinationMetrics {
        cross_agent_pct: 100.0 * cross as f64 / n as f64,
        interleaved_pct: 100.0 * interleaved as f64 / n as f64,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::tests::{single, toy};
    use crate::schedule::{evaluate, Op};

    #[test]
    fn cross_agent_pickup() {
        // v0 = [D1, P2], v1 = [D2, P1]: D1@10 P1@30 with v1's D2@12 inside;
        // D2@12 P2@32 with v1's P1@30 inside.
        let inst = toy(2, 1);
        let sol = Solution::from_tours(vec![vec![Op::drop(1), Op::pick(2)], vec![Op::drop(2), Op::pick(1)]]);
        let m = coordination_metrics(&inst, &sol, &evaluate(&inst, &sol).unwrap());
        assert_eq!(m.cross_agent_pct, 100.0);
        assert_eq!(m.interleaved_pct, 100.0);
    }

    #[test]
    fn nothing_between() {
        let inst = single(1, 1);
        let sol = Solution::from_tours(vec![vec![Op::drop(1), Op::pick(1)]]);
        let m = coordination_metrics(&inst, &sol, &evaluate(&inst, &sol).unwrap());
        assert_eq!(m.cross_agent_pct, 0.0);
        assert_eq!(m.interleaved_pct, 0.0);
    }

    #[test]
    fn interleaved_single_route() {
        // D1@10, D2@15, P1@30, P2@35: D2 lies inside (10, 30) and P1 inside (15, 35).
        let inst = toy(1, 2);
        let sol = Solution::from_tours(vec![vec![Op::drop(1), Op::drop(2), Op::pick(1), Op::pick(2)]]);
        let m = coordination_metrics(&inst, &sol, &evaluate(&inst, &sol).unwrap());
        assert_eq!(m.interleaved_pct, 100.0);
        let sol = Solution::from_tours(vec![vec![Op::drop(1), Op::pick(1), Op::drop(2), Op::pick(2)]]);
        let m = coordination_metrics(&inst, &sol, &evaluate(&inst, &sol).unwrap());
        assert_eq!(m.interleaved_pct, 0.0);
    }

    #[test]
    fn other_vehicles_do_not_count() {
        let inst = toy(2, 1);
        let sol = Solution::from_tours(vec![vec![Op::drop(1), Op::pick(1)], vec![Op::drop(2), Op::pick(2)]]);
        let m = coordination_metrics(&inst, &sol, &evaluate(&inst, &sol).unwrap());
        assert_eq!(m.interleaved_pct, 0.0);
        assert_eq!(m.cross_agent_pct, 0.0);
    }
}
