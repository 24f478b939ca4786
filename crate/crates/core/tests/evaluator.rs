mod common;

use common::{int_instance, random_capacity_feasible, random_solution, reference_evaluate, RefOutcome};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rpd_core::schedule::{evaluate, two_pass_estimate, EvalError, Solution};

fn check_against_reference(seed: u64, n: usize, m: usize, k: usize, capacity_feasible: bool) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inst = int_instance(&mut rng, n, m, k);
    let sol = if capacity_feasible {
        random_capacity_feasible(&mut rng, n, m, k)
    } else {
        random_solution(&mut rng, n, m)
    };
    match (evaluate(&inst, &sol), reference_evaluate(&inst, &sol)) {
        (Ok(s), RefOutcome::Feasible { makespan, t_drop, t_pick }) => {
            assert_eq!(s.makespan, makespan);
            for c in inst.customers() {
                assert_eq!(s.t_drop[c], t_drop[c]);
                assert_eq!(s.t_pickup[c], t_pick[c]);
                assert!(s.t_pickup[c] - s.t_drop[c] >= inst.p(c));
            }
            for loads in &s.load {
                assert_eq!(loads[0], k);
                assert!(loads.iter().all(|&q| q <= k));
            }
        }
        (Err(EvalError::CapacityViolation { vehicle, position }), RefOutcome::Capacity { vehicle: rv, position: rp }) => {
            assert_eq!((vehicle, position), (rv, rp));
        }
        (Err(EvalError::Deadlock { .. }), RefOutcome::Deadlock) => {}
        (got, want) => panic!("evaluate {got:?} but reference {want:?}\n{sol}"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(5000))]

    #[test]
    fn arbitrary_solutions_match_reference(seed in any::<u64>(), n in 1usize..6, m in 1usize..4, k in 1usize..4) {
        check_against_reference(seed, n, m, k, false);
    }

    #[test]
    fn capacity_feasible_solutions_match_reference(seed in any::<u64>(), n in 1usize..7, m in 1usize..4, k in 1usize..4) {
        check_against_reference(seed, n, m, k, true);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn vehicle_permutation_keeps_makespan(seed in any::<u64>(), n in 1usize..7, m in 2usize..4, k in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = int_instance(&mut rng, n, m, k);
        let sol = random_capacity_feasible(&mut rng, n, m, k);
        let mut rotated = sol.tours.clone();
        rotated.rotate_left(1);
        let a = evaluate(&inst, &sol).map(|s| s.makespan);
        let b = evaluate(&inst, &Solution::from_tours(rotated)).map(|s| s.makespan);
        prop_assert_eq!(a.is_ok(), b.is_ok());
        if let (Ok(a), Ok(b)) = (a, b) {
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn longer_processing_never_shortens(seed in any::<u64>(), n in 1usize..7, m in 1usize..4, k in 1usize..4, extra in 0.0f64..50.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = int_instance(&mut rng, n, m, k);
        let sol = random_capacity_feasible(&mut rng, n, m, k);
        let Ok(before) = evaluate(&inst, &sol) else { return Ok(()); };
        let c = 1 + (seed as usize) % n;
        let mut p = inst.processing_times().to_vec();
        p[c - 1] += extra;
        let slower = rpd_core::instance::Instance::from_rows("slow", &inst.matrix().rows(), p, m, k).unwrap();
        let after = evaluate(&slower, &sol).unwrap();
        prop_assert!(after.makespan >= before.makespan);
    }

    #[test]
    fn estimate_is_exact_when_drops_never_wait(seed in any::<u64>(), n in 1usize..7, m in 1usize..4) {
        // Every route drops everything before its first pickup, so no
        // dropoff time depends on a pickup wait.
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = int_instance(&mut rng, n, m, n);
        let mut sol = random_capacity_feasible(&mut rng, n, m, n);
        for tour in &mut sol.tours {
            tour.sort_by_key(|op| !op.is_drop());
        }
        let exact = evaluate(&inst, &sol).unwrap().makespan;
        prop_assert_eq!(two_pass_estimate(&inst, &sol).unwrap(), exact);
    }
}
