//! Construction heuristics used only as warm-start seeds.

use crate::alns::{nearest_feasible_route, workload};
use crate::baselines::{dispatch, nearest_neighbor};
use crate::instance::Instance;
use crate::schedule::{Op, Solution};

/// Longest-workload-first assignment of customers to the least-loaded
/// vehicle (lowest index on ties), then one nearest-feasible route per
/// vehicle.
pub fn load_balanced(inst: &Instance) -> Solution {
    let m = inst.m();
    let mut customers: Vec<usize> = inst.customers().collect();
    customers.sort_by(|&a, &b| workload(inst, b).total_cmp(&workload(inst, a)).then(a.cmp(&b)));
    let mut loads = vec![0.0; m];
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); m];
    for c in customers {
        let v = (0..m).fold(0, |a, v| if loads[v] < loads[a] { v } else { a });
        loads[v] += workload(inst, c);
        groups[v].push(c);
    }
    Solution::from_tours(groups.iter().map(|g| nearest_feasible_route(inst, g)).collect())
}

/// Shortest processing time first: a loaded vehicle drops at the waiting
/// customer with the smallest `p_c` (nearest, then lowest index, on ties);
/// a vehicle that cannot drop collects the resource it can pick up soonest.
pub fn shortest_processing_time(inst: &Instance) -> Option<Solution> {
    dispatch(inst, |st, v| {
        if st.can_drop(v) {
            st.waiting()
                .min_by(|&a, &b| {
                    let key = |c: usize| (inst.p(c), inst.d(st.loc[v], c));
                    let (ka, kb) = (key(a), key(b));
                    ka.0.total_cmp(&kb.0).then(ka.1.total_cmp(&kb.1)).then(a.cmp(&b))
                })
                .map(Op::drop)
        } else if st.can_pick(v) {
            st.soonest_pickup(v, |_| true).map(Op::pick)
        } else {
            None
        }
    })
}

/// The construction seeds in warm-start order: nearest neighbor,
/// load-balanced, shortest processing time.
pub fn construction_seeds(inst: &Instance) -> Vec<Solution> {
    let mut out = Vec::with_capacity(3);
    out.extend(nearest_neighbor(inst));
    out.push(load_balanced(inst));
    out.extend(shortest_processing_time(inst));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::evaluate;
    use crate::schedule::tests::random_instance;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn seeds_are_feasible() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for round in 0..30 {
            let inst = random_instance(&mut rng, 1 + round % 10, 1 + round % 3, 1 + round % 3);
            let seeds = construction_seeds(&inst);
            assert_eq!(seeds.len(), 3);
            for s in &seeds {
                evaluate(&inst, s).unwrap();
            }
        }
    }

    #[test]
    fn spt_drops_in_ascending_processing_time() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..10 {
            let inst = random_instance(&mut rng, 8, 1, 3);
            let sol = shortest_processing_time(&inst).unwrap();
            let drops: Vec<f64> = sol.tours[0].iter().filter(|o| o.is_drop()).map(|o| inst.p(o.customer)).collect();
            assert!(drops.windows(2).all(|w| w[0] <= w[1]), "{drops:?}");
        }
    }
}
