//! Worker pools sharing an incumbent.
//!
//! Every worker publishes a new best solution to its pool's incumbent as
//! soon as it finds one, and every `best_check_interval` iterations adopts
//! the pool incumbent when another worker owns it and it beats the worker's
//! current solution. With several pools, the first worker of each pool
//! exchanges the pool incumbent with a global one every
//! `pool_sync_interval` iterations.

use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use super::{AlnsError, AlnsParams, RunStats, Worker};
use crate::instance::{derive_seed, Instance};
use crate::schedule::Solution;

#[derive(Debug, Clone)]
struct Incumbent {
    solution: Solution,
    makespan: f64,
    owner: usize,
}

impl Incumbent {
    /// Replaces the incumbent when `other` is strictly better.
    fn offer(&mut self, solution: &Solution, makespan: f64, owner: usize) -> bool {
        if makespan < self.makespan {
            self.solution = solution.clone();
            self.makespan = makespan;
            self.owner = owner;
            true
        } else {
            false
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoolStats {
    pub best_makespan: f64,
    /// Global index (`pool * workers_per_pool + worker`) of the worker that
    /// found the returned solution.
    pub best_worker: usize,
    pub workers: Vec<RunStats>,
}

/// Runs `params.pools` pools of `pool_size` workers each. Worker `g` uses
/// seed `derive_seed(seed, g)`, so a single worker reproduces
/// `run_alns(inst, params, derive_seed(seed, 0))` exactly.
pub fn run_pool(
    inst: &Instance,
    params: &AlnsParams,
    pool_size: usize,
    seed: u64,
) -> Result<(Solution, PoolStats), AlnsError> {
    params.validate()?;
    if pool_size == 0 {
        return Err(AlnsError::InvalidParams("pool_size must be at least 1".into()));
    }
    let pools = params.pools;
    let start = Worker::new(inst, params, derive_seed(seed, 0));
    let seed_incumbent = Incumbent {
        solution: start.best.clone(),
        makespan: start.z_best,
        owner: usize::MAX,
    };
    drop(start);
    let pool_inc: Vec<Mutex<Incumbent>> = (0..pools).map(|_| Mutex::new(seed_incumbent.clone())).collect();
    let global = Mutex::new(seed_incumbent);

    let run_worker = |p: usize, w: usize| -> RunStats {
        let g = p * pool_size + w;
        let mut worker = Worker::new(inst, params, derive_seed(seed, g as u64));
        let mut published = f64::INFINITY;
        for iter in 1..=params.max_iter {
            if inst.n() == 0 {
                break;
            }
            worker.step(iter);
            if worker.z_best < published {
                pool_inc[p].lock().expect("lock").offer(&worker.best, worker.z_best, g);
                published = worker.z_best;
            }
            if iter % params.best_check_interval == 0 {
                let inc = pool_inc[p].lock().expect("lock").clone();
                if inc.owner != g && inc.owner != usize::MAX && inc.makespan < worker.z {
                    worker.adopt(inc.solution, inc.makespan, iter);
                    worker.stats.imports += 1;
                    published = published.min(worker.z_best);
                }
            }
            if pools > 1 && w == 0 && iter % params.pool_sync_interval == 0 {
                let mut local = pool_inc[p].lock().expect("lock");
                let mut glob = global.lock().expect("lock");
                let (s, z, o) = (local.solution.clone(), local.makespan, local.owner);
                glob.offer(&s, z, o);
                let (s, z, o) = (glob.solution.clone(), glob.makespan, glob.owner);
                local.offer(&s, z, o);
            }
        }
        pool_inc[p].lock().expect("lock").offer(&worker.best, worker.z_best, g);
        worker.finish().1
    };

    let mut workers: Vec<RunStats> = Vec::with_capacity(pools * pool_size);
    if pools * pool_size == 1 {
        workers.push(run_worker(0, 0));
    } else {
        std::thread::scope(|scope| {
            let handles: Vec<_> = (0..pools)
                .flat_map(|p| (0..pool_size).map(move |w| (p, w)))
                .map(|(p, w)| {
                    let run = &run_worker;
                    scope.spawn(move || run(p, w))
                })
                .collect();
            for h in handles {
                workers.push(h.join().expect("worker panicked"));
            }
        });
    }

    let mut best = global.into_inner().expect("lock");
    for inc in pool_inc {
        let inc = inc.into_inner().expect("lock");
        best.offer(&inc.solution, inc.makespan, inc.owner);
    }
    let best_worker = if best.owner == usize::MAX { 0 } else { best.owner };
    Ok((
        best.solution,
        PoolStats {
            best_makespan: best.makespan,
            best_worker,
            workers,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alns::run_alns;
    use crate::schedule::evaluate;
    use crate::schedule::tests::random_instance;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn params(iters: usize) -> AlnsParams {
        AlnsParams {
            max_iter: iters,
            best_check_interval: 50,
            pool_sync_interval: 20,
            ..AlnsParams::default()
        }
    }

    #[test]
    fn single_worker_matches_run_alns() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let inst = random_instance(&mut rng, 9, 2, 2);
        let p = params(300);
        let (a, stats) = run_pool(&inst, &p, 1, 77).unwrap();
        let (b, sb) = run_alns(&inst, &p, derive_seed(77, 0)).unwrap();
        assert_eq!(a, b);
        assert_eq!(stats.workers[0], sb);
    }

    #[test]
    fn incumbent_is_min_over_workers() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let inst = random_instance(&mut rng, 9, 2, 2);
        for pools in [1, 2] {
            let p = AlnsParams { pools, ..params(300) };
            let (sol, stats) = run_pool(&inst, &p, 3, 5).unwrap();
            assert_eq!(stats.workers.len(), 3 * pools);
            let z = evaluate(&inst, &sol).unwrap().makespan;
            assert_eq!(z, stats.best_makespan);
            let min = stats.workers.iter().map(|s| s.best_makespan).fold(f64::INFINITY, f64::min);
            assert!(z <= min);
            for s in &stats.workers {
                for w in s.best_updates.windows(2) {
                    assert!(w[1].1 < w[0].1, "imports never raise a worker's best");
                }
            }
        }
    }
}
