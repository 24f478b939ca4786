//! Two-stage pipeline: the search pool produces an incumbent, which seeds
//! the genetic algorithm; the better of the two solutions is returned.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::alns::{run_pool, AlnsError, AlnsParams, PoolStats};
use crate::brkga::{run_brkga, warm_start_population, BrkgaError, BrkgaParams, BrkgaStats};
use crate::instance::{derive_seed, Instance};
use crate::schedule::{evaluate, Solution};

/// RNG stream tags derived from the pipeline seed.
const WARM_STREAM: u64 = 0xB4_0001;
const BRKGA_STREAM: u64 = 0xB4_0002;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Alns(#[from] AlnsError),
    #[error(transparent)]
    Brkga(#[from] BrkgaError),
}

/// Parameters of both stages.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineParams {
    pub alns: AlnsParams,
    pub brkga: BrkgaParams,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineResult {
    pub alns_solution: Solution,
    pub alns_makespan: f64,
    /// Better of the incumbent and the genetic algorithm's best (incumbent
    /// on ties).
    pub solution: Solution,
    pub makespan: f64,
    pub alns_stats: PoolStats,
    pub brkga_stats: BrkgaStats,
}

/// Runs the search pool with `alns.workers_per_pool` workers, then the
/// genetic algorithm warm-started from its incumbent.
pub fn run_pipeline(inst: &Instance, params: &PipelineParams, seed: u64) -> Result<PipelineResult, PipelineError> {
    let (alns_solution, alns_stats) = run_pool(inst, &params.alns, params.alns.workers_per_pool, seed)?;
    let alns_makespan = alns_stats.best_makespan;
    let (solution, makespan, brkga_stats) = refine(inst, &params.brkga, &alns_solution, alns_makespan, seed)?;
    Ok(PipelineResult {
        alns_solution,
        alns_makespan,
        solution,
        makespan,
        alns_stats,
        brkga_stats,
    })
}

/// Second stage on its own: returns the better of `incumbent` and the
/// warm-started genetic algorithm's best.
pub fn refine(
    inst: &Instance,
    params: &BrkgaParams,
    incumbent: &Solution,
    incumbent_makespan: f64,
    seed: u64,
) -> Result<(Solution, f64, BrkgaStats), PipelineError> {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, WARM_STREAM));
    let warm = warm_start_population(inst, incumbent, params, &mut rng);
    let (best, stats) = run_brkga(inst, params, warm, derive_seed(seed, BRKGA_STREAM))?;
    if best.is_complete(inst.n()) && best.fitness < incumbent_makespan {
        let z = evaluate(inst, &best.solution)
            .expect("complete decodes replay in the evaluator")
            .makespan;
        return Ok((best.solution, z, stats));
    }
    Ok((incumbent.clone(), incumbent_makespan, stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::tests::random_instance;

    #[test]
    fn pipeline_never_worse_than_search() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for round in 0..4 {
            let inst = random_instance(&mut rng, 6 + round, 2, 2);
            let params = PipelineParams {
                alns: AlnsParams {
                    max_iter: 200,
                    workers_per_pool: 1,
                    ..AlnsParams::default()
                },
                brkga: BrkgaParams {
                    population: 40,
                    generations: 20,
                    ..BrkgaParams::default()
                },
            };
            let out = run_pipeline(&inst, &params, round as u64).unwrap();
            assert!(out.makespan <= out.alns_makespan);
            assert_eq!(evaluate(&inst, &out.solution).unwrap().makespan, out.makespan);
            assert_eq!(evaluate(&inst, &out.alns_solution).unwrap().makespan, out.alns_makespan);
        }
    }
}
