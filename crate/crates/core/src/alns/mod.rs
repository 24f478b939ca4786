//! Adaptive large neighborhood search with simulated-annealing acceptance,
//! adaptive operator weights, reheating, periodic local search and a
//! multi-worker pool sharing an incumbent.

mod destroy;
mod initial;
mod local;
mod pool;
mod repair;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::instance::Instance;
use crate::schedule::{evaluate, EvalError, Simulator, Solution};

pub use destroy::{destroy, removal_bounds, shaw_relatedness, DestroyOp, SHAW_CHI, SHAW_OMEGA, SHAW_PHI, WORST_POWER};
pub use initial::{
    balance, construct_initial, nearest_feasible_route, sectors, serial_solution, sweep_order, workload,
};
pub use local::{cross_agent_relocation, pickup_repositioning, MAX_PASSES, NEAR_BOTTLENECK};
pub use pool::{run_pool, PoolStats};
pub use repair::{pick_next, regret, repair, RepairOp, SHORTLIST};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlnsError {
    #[error("solution has no customers to remove")]
    EmptySolution,
    #[error("no feasible insertion for customer {0}")]
    RepairFailed(usize),
    #[error("infeasible input: {0}")]
    Infeasible(EvalError),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

/// Search hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AlnsParams {
    /// Initial temperature as a fraction of the initial makespan.
    pub t0: f64,
    pub alpha: f64,
    pub reheat_factor: f64,
    pub stagnation_threshold: usize,
    /// Weight update interval.
    pub weight_interval: usize,
    /// Reaction factor of the weight update.
    pub reaction: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    pub sigma3: f64,
    pub min_weight: f64,
    pub max_iter: usize,
    pub workers_per_pool: usize,
    /// Number of pools; pools exchange incumbents every `pool_sync_interval`.
    pub pools: usize,
    pub pickup_reposition_interval: usize,
    pub cross_agent_interval: usize,
    pub best_check_interval: usize,
    pub pool_sync_interval: usize,
}

impl Default for AlnsParams {
    fn default() -> Self {
        Self {
            t0: 0.30,
            alpha: 0.9998,
            reheat_factor: 0.50,
            stagnation_threshold: 2000,
            weight_interval: 100,
            reaction: 0.1,
            sigma1: 33.0,
            sigma2: 9.0,
            sigma3: 13.0,
            min_weight: 0.1,
            max_iter: 20_000,
            workers_per_pool: 32,
            pools: 1,
            pickup_reposition_interval: 200,
            cross_agent_interval: 500,
            best_check_interval: 1000,
            pool_sync_interval: 100,
        }
    }
}

impl AlnsParams {
    pub fn validate(&self) -> Result<(), AlnsError> {
        let bad = |msg: &str| Err(AlnsError::InvalidParams(msg.to_string()));
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return bad("alpha must lie in (0, 1)");
        }
        if !(self.t0 > 0.0) {
            return bad("t0 must be positive");
        }
        if !(self.sigma1 > self.sigma3 && self.sigma3 > self.sigma2 && self.sigma2 > 0.0) {
            return bad("scores must satisfy sigma1 > sigma3 > sigma2 > 0");
        }
        if !(0.0..=1.0).contains(&self.reaction) {
            return bad("reaction must lie in [0, 1]");
        }
        if !(self.min_weight > 0.0) {
            return bad("min_weight must be positive");
        }
        let intervals = [
            self.stagnation_threshold,
            self.weight_interval,
            self.pickup_reposition_interval,
            self.cross_agent_interval,
            self.best_check_interval,
            self.pool_sync_interval,
            self.workers_per_pool,
            self.pools,
        ];
        if intervals.contains(&0) {
            return bad("intervals and pool sizes must be at least 1");
        }
        Ok(())
    }
}

/// Weights, scores and attempt counts of one operator family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorBank {
    pub weights: Vec<f64>,
    pub scores: Vec<f64>,
    pub attempts: Vec<u64>,
}

impl OperatorBank {
    pub fn new(len: usize) -> Self {
        Self {
            weights: vec![1.0; len],
            scores: vec![0.0; len],
            attempts: vec![0; len],
        }
    }

    /// Roulette-wheel selection with probability `w_i / sum w`.
    pub fn select(&self, rng: &mut impl Rng) -> usize {
        let total: f64 = self.weights.iter().sum();
        let mut u = rng.gen::<f64>() * total;
        for (i, &w) in self.weights.iter().enumerate() {
            if u < w {
                return i;
            }
            u -= w;
        }
        self.weights.len() - 1
    }

    /// `w <- max(min_weight, (1 - r) w + r s / a)` with `s / a = 0` when
    /// `a = 0`; scores and attempts reset afterwards.
    pub fn update(&mut self, reaction: f64, min_weight: f64) {
        for i in 0..self.weights.len() {
            let rate = if self.attempts[i] == 0 {
                0.0
            } else {
                self.scores[i] / self.attempts[i] as f64
            };
            self.weights[i] = min_weight.max((1.0 - reaction) * self.weights[i] + reaction * rate);
        }
        self.scores.fill(0.0);
        self.attempts.fill(0);
    }
}

/// Simulated-annealing acceptance with one uniform draw `u`: improving
/// candidates always pass, others pass when `u < exp(-(z' - z) / T)`.
pub fn sa_accept(z_candidate: f64, z_current: f64, temperature: f64, u: f64) -> bool {
    z_candidate < z_current || u < (-(z_candidate - z_current) / temperature).exp()
}

/// Periodic snapshot of the search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub iteration: usize,
    pub best_makespan: f64,
    pub current_makespan: f64,
    pub temperature: f64,
    pub destroy_weights: Vec<f64>,
    pub repair_weights: Vec<f64>,
}

/// Statistics of one search run.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RunStats {
    pub iterations: usize,
    pub initial_makespan: f64,
    pub best_makespan: f64,
    /// `(iteration, makespan)` at every improvement of the best solution.
    pub best_updates: Vec<(usize, f64)>,
    pub destroy_usage: Vec<u64>,
    pub repair_usage: Vec<u64>,
    /// Candidates discarded because repair found no deadlock-free insertion.
    pub failed_repairs: u64,
    pub accepted: u64,
    pub reheats: u64,
    pub imports: u64,
    pub trace: Vec<TraceRow>,
}

/// One search worker; the pool drives several of these.
pub(crate) struct Worker<'a> {
    inst: &'a Instance,
    params: AlnsParams,
    rng: ChaCha8Rng,
    sim: Simulator,
    pub(crate) current: Solution,
    pub(crate) z: f64,
    pub(crate) best: Solution,
    pub(crate) z_best: f64,
    temperature: f64,
    t_init: f64,
    stagnation: usize,
    destroy_bank: OperatorBank,
    repair_bank: OperatorBank,
    q_bounds: (usize, usize),
    pub(crate) stats: RunStats,
}

impl<'a> Worker<'a> {
    pub(crate) fn new(inst: &'a Instance, params: &AlnsParams, seed: u64) -> Self {
        let start = construct_initial(inst, seed);
        let z = evaluate(inst, &start).expect("initial solution is feasible").makespan;
        let temperature = (params.t0 * z).max(f64::MIN_POSITIVE);
        Self {
            inst,
            params: params.clone(),
            rng: ChaCha8Rng::seed_from_u64(seed),
            sim: Simulator::new(inst),
            current: start.clone(),
            z,
            best: start,
            z_best: z,
            temperature,
            t_init: temperature,
            stagnation: 0,
            destroy_bank: OperatorBank::new(DestroyOp::ALL.len()),
            repair_bank: OperatorBank::new(RepairOp::ALL.len()),
            q_bounds: removal_bounds(inst.n()),
            stats: RunStats {
                initial_makespan: z,
                best_makespan: z,
                destroy_usage: vec![0; DestroyOp::ALL.len()],
                repair_usage: vec![0; RepairOp::ALL.len()],
                ..RunStats::default()
            },
        }
    }

    fn record_best(&mut self, iter: usize) {
        self.stats.best_makespan = self.z_best;
        self.stats.best_updates.push((iter, self.z_best));
    }

    /// Replaces the current solution; also the best one if it improves it.
    pub(crate) fn adopt(&mut self, sol: Solution, z: f64, iter: usize) {
        if z < self.z_best {
            self.best = sol.clone();
            self.z_best = z;
            self.stagnation = 0;
            self.record_best(iter);
        }
        self.current = sol;
        self.z = z;
    }

    fn score(&mut self, sol: &Solution) -> Option<f64> {
        self.sim.score(self.inst, sol).ok().map(|s| s.makespan)
    }

    /// One iteration (1-based `iter`).
    pub(crate) fn step(&mut self, iter: usize) {
        let di = self.destroy_bank.select(&mut self.rng);
        let ri = self.repair_bank.select(&mut self.rng);
        self.destroy_bank.attempts[di] += 1;
        self.repair_bank.attempts[ri] += 1;
        self.stats.destroy_usage[di] += 1;
        self.stats.repair_usage[ri] += 1;

        let (q_min, q_max) = self.q_bounds;
        let q = self.rng.gen_range(q_min..=q_max);
        let candidate = destroy(self.inst, &self.current, DestroyOp::ALL[di], q, q_min, &mut self.rng)
            .and_then(|(partial, removed)| repair(self.inst, &partial, &removed, RepairOp::ALL[ri]));
        let scored = candidate.ok().and_then(|c| self.score(&c).map(|z| (c, z)));

        match scored {
            None => self.stats.failed_repairs += 1,
            Some((cand, z_new)) => {
                #[cfg(debug_assertions)]
                cand.check_structure(self.inst, true).expect("repair restores every customer");
                let (s1, s2, s3) = (self.params.sigma1, self.params.sigma2, self.params.sigma3);
                if z_new < self.z {
                    self.destroy_bank.scores[di] += s2;
                    self.repair_bank.scores[ri] += s2;
                    if z_new < self.z_best {
                        self.destroy_bank.scores[di] += s1 - s2;
                        self.repair_bank.scores[ri] += s1 - s2;
                    }
                    self.stats.accepted += 1;
                    self.adopt(cand, z_new, iter);
                } else if sa_accept(z_new, self.z, self.temperature, self.rng.gen()) {
                    self.destroy_bank.scores[di] += s3;
                    self.repair_bank.scores[ri] += s3;
                    self.stats.accepted += 1;
                    self.current = cand;
                    self.z = z_new;
                }
            }
        }

        let p = &self.params;
        self.temperature *= p.alpha;
        self.stagnation += 1;
        if self.stagnation >= p.stagnation_threshold && self.temperature < 0.01 * self.t_init {
            self.temperature = p.reheat_factor * p.t0 * self.z_best;
            self.stagnation = 0;
            self.stats.reheats += 1;
        }
        if iter % p.pickup_reposition_interval == 0 {
            let next = pickup_repositioning(self.inst, &self.current);
            self.local_result(next, iter);
        }
        if iter % self.params.cross_agent_interval == 0 {
            let next = cross_agent_relocation(self.inst, &self.current);
            self.local_result(next, iter);
        }
        let p = &self.params;
        if iter % p.weight_interval == 0 {
            let (r, w) = (p.reaction, p.min_weight);
            self.destroy_bank.update(r, w);
            self.repair_bank.update(r, w);
            self.stats.trace.push(TraceRow {
                iteration: iter,
                best_makespan: self.z_best,
                current_makespan: self.z,
                temperature: self.temperature,
                destroy_weights: self.destroy_bank.weights.clone(),
                repair_weights: self.repair_bank.weights.clone(),
            });
        }
        self.stats.iterations = iter;
    }

    fn local_result(&mut self, next: Solution, iter: usize) {
        if let Some(z) = self.score(&next) {
            if z < self.z {
                self.adopt(next, z, iter);
            }
        }
    }

    pub(crate) fn finish(mut self) -> (Solution, RunStats) {
        self.stats.best_makespan = self.z_best;
        (self.best, self.stats)
    }
}

/// Single-threaded search; deterministic for a given seed.
pub fn run_alns(inst: &Instance, params: &AlnsParams, seed: u64) -> Result<(Solution, RunStats), AlnsError> {
    params.validate()?;
    let mut w = Worker::new(inst, params, seed);
    if inst.n() > 0 {
        for iter in 1..=params.max_iter {
            w.step(iter);
        }
    }
    Ok(w.finish())
}
