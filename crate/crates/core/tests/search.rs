mod common;

use common::int_instance;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rpd_core::alns::{construct_initial, destroy, removal_bounds, repair, DestroyOp, RepairOp};
use rpd_core::baselines::best_heuristic;
use rpd_core::brkga::{decode, encode, evolve, perturb, BrkgaParams, Chromosome};
use rpd_core::schedule::evaluate;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn relaxed_decodes_are_complete_and_replay(seed in any::<u64>(), n in 1usize..12, m in 1usize..4, k in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = int_instance(&mut rng, n, m, k);
        let chrom = Chromosome::random(n, &mut rng);
        prop_assert_eq!(chrom.len(), 4 * n);
        let out = decode(&chrom, &inst, &BrkgaParams::default());
        prop_assert!(out.is_complete(n));
        prop_assert_eq!(evaluate(&inst, &out.solution).unwrap().makespan, out.fitness);
    }

    #[test]
    fn strict_decodes_charge_the_penalty(seed in any::<u64>(), n in 1usize..10, m in 1usize..4, k in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = int_instance(&mut rng, n, m, k);
        let params = BrkgaParams { wait_relaxation: false, ..BrkgaParams::default() };
        let out = decode(&Chromosome::random(n, &mut rng), &inst, &params);
        let missing = (2 * n - out.scheduled_count) as f64;
        prop_assert_eq!(out.fitness, out.makespan + params.penalty * missing);
        if out.is_complete(n) {
            prop_assert_eq!(evaluate(&inst, &out.solution).unwrap().makespan, out.fitness);
        }
    }

    #[test]
    fn encoded_solutions_decode_completely(seed in any::<u64>(), n in 1usize..12, m in 1usize..4, k in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = int_instance(&mut rng, n, m, k);
        let sol = best_heuristic(&inst, 0);
        let chrom = encode(&inst, &sol);
        prop_assert!(chrom.genes().all(|g| (0.0..1.0).contains(&g)));
        prop_assert!(decode(&chrom, &inst, &BrkgaParams::default()).is_complete(n));
        let noisy = perturb(&chrom, &mut rng);
        for (a, b) in chrom.genes().zip(noisy.genes()) {
            prop_assert!((a - b).abs() <= 0.03 + 1e-12 && (0.0..1.0).contains(&b));
        }
    }

    #[test]
    fn elites_survive_evolution(seed in any::<u64>(), np in 7usize..40) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pop: Vec<Chromosome> = (0..np).map(|_| Chromosome::random(3, &mut rng)).collect();
        let fit: Vec<f64> = (0..np).map(|_| rand::Rng::gen::<f64>(&mut rng)).collect();
        let params = BrkgaParams::default();
        let next = evolve(&pop, &fit, &params, &mut rng).unwrap();
        prop_assert_eq!(next.len(), np);
        let best = (0..np).min_by(|&a, &b| fit[a].total_cmp(&fit[b])).unwrap();
        prop_assert_eq!(&next[0], &pop[best]);
    }

    #[test]
    fn destroy_then_repair_stays_feasible(seed in any::<u64>(), n in 2usize..10, m in 1usize..4, k in 1usize..4, d in 0usize..6, r in 0usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = int_instance(&mut rng, n, m, k);
        let sol = construct_initial(&inst, 0);
        let (q_min, q_max) = removal_bounds(n);
        let q = q_min.max(1).min(q_max.max(1)).min(n);
        let (partial, removed) = destroy(&inst, &sol, DestroyOp::ALL[d], q, q_min.min(n), &mut rng).unwrap();
        prop_assert!(removed.len() >= q.min(n));
        let out = repair(&inst, &partial, &removed, RepairOp::ALL[r]).unwrap();
        prop_assert_eq!(out.customers(), (1..=n).collect::<Vec<_>>());
        evaluate(&inst, &out).unwrap();
    }
}
