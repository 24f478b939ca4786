//! Biased random-key genetic algorithm over (priority, vehicle-hint) keys,
//! warm-started from a search incumbent and construction heuristics.

mod decode;
mod seeds;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::instance::Instance;
use crate::schedule::{Op, Solution};

pub use decode::{decode, hint_vehicle, DecodedResult};
pub use seeds::{construction_seeds, load_balanced, shortest_processing_time};

/// Half-width of the warm-start perturbation noise.
pub const PERTURB_EPS: f64 = 0.03;
/// Number of warm-start seed chromosomes.
pub const WARM_SEEDS: usize = 20;
/// Largest `f64` below 1, the upper clamp of every gene.
const BELOW_ONE: f64 = 1.0 - f64::EPSILON / 2.0;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BrkgaError {
    #[error("population too small: {elite} elites and {non_elite} non-elites")]
    PopulationTooSmall { elite: usize, non_elite: usize },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

/// Genetic algorithm hyperparameters. Defaults are desk scale; the original
/// scale is `population = 30000`, `generations = 20000`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BrkgaParams {
    pub population: usize,
    pub elite_fraction: f64,
    pub mutant_fraction: f64,
    /// Probability of inheriting a gene from the elite parent.
    pub elite_bias: f64,
    pub generations: usize,
    pub warm_start_fraction: f64,
    /// Fitness penalty per unscheduled operation.
    pub penalty: f64,
    /// Let a pickup wait on site for its resource.
    pub wait_relaxation: bool,
}

impl Default for BrkgaParams {
    fn default() -> Self {
        Self {
            population: 500,
            elite_fraction: 0.15,
            mutant_fraction: 0.15,
            elite_bias: 0.7,
            generations: 200,
            warm_start_fraction: 0.15,
            penalty: 1e6,
            wait_relaxation: true,
        }
    }
}

/// `floor(x)` and `ceil(x)` that ignore representation error such as
/// `0.15 * 100 = 15.000000000000002`.
fn floor_count(x: f64) -> usize {
    (x + 1e-9).floor() as usize
}

fn ceil_count(x: f64) -> usize {
    (x - 1e-9).ceil().max(0.0) as usize
}

impl BrkgaParams {
    pub fn validate(&self) -> Result<(), BrkgaError> {
        let bad = |s: &str| Err(BrkgaError::InvalidParams(s.into()));
        if !(self.elite_fraction >= 0.0 && self.mutant_fraction >= 0.0) {
            return bad("fractions must be non-negative");
        }
        if self.elite_fraction + self.mutant_fraction >= 1.0 {
            return bad("elite + mutant fractions must be below 1");
        }
        if !(self.elite_bias > 0.5 && self.elite_bias <= 1.0) {
            return bad("elite_bias must lie in (0.5, 1]");
        }
        if !(0.0..=1.0).contains(&self.warm_start_fraction) {
            return bad("warm_start_fraction must lie in [0, 1]");
        }
        if !(self.penalty >= 0.0) {
            return bad("penalty must be non-negative");
        }
        Ok(())
    }

    /// `(elites, mutants, offspring)` for a population of `np`: fractions are
    /// floored and the remainder goes to offspring.
    pub fn split(&self, np: usize) -> (usize, usize, usize) {
        let ne = floor_count(self.elite_fraction * np as f64);
        let nm = floor_count(self.mutant_fraction * np as f64);
        (ne, nm, np.saturating_sub(ne + nm))
    }

    /// Number of warm-start slots, `ceil(warm_start_fraction * np)`.
    pub fn warm_slots(&self, np: usize) -> usize {
        ceil_count(self.warm_start_fraction * np as f64).min(np)
    }
}

/// Priority genes `pi` and vehicle-hint genes `alpha`, both indexed
/// `D_1, P_1, ..., D_n, P_n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Chromosome {
    pub pi: Vec<f64>,
    pub alpha: Vec<f64>,
}

impl Chromosome {
    /// Gene index of an operation.
    pub fn gene(op: Op) -> usize {
        2 * (op.customer - 1) + usize::from(!op.is_drop())
    }

    /// Operation of a gene index.
    pub fn op_of(g: usize) -> Op {
        let c = g / 2 + 1;
        if g % 2 == 0 {
            Op::drop(c)
        } else {
            Op::pick(c)
        }
    }

    pub fn random(n: usize, rng: &mut impl Rng) -> Self {
        Self {
            pi: (0..2 * n).map(|_| rng.gen::<f64>()).collect(),
            alpha: (0..2 * n).map(|_| rng.gen::<f64>()).collect(),
        }
    }

    /// Total number of genes, `4n`.
    pub fn len(&self) -> usize {
        self.pi.len() + self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn genes(&self) -> impl Iterator<Item = f64> + '_ {
        self.pi.iter().chain(&self.alpha).copied()
    }
}

/// Encodes a solution: the operation at 1-based position `r` of a tour of
/// length `L_v` on vehicle `v` gets `pi = (r - 1) / L_v` and `alpha = v / m`.
pub fn encode(inst: &Instance, sol: &Solution) -> Chromosome {
    let n = inst.n();
    let m = sol.tours.len().max(1);
    let mut chrom = Chromosome {
        pi: vec![0.0; 2 * n],
        alpha: vec![0.0; 2 * n],
    };
    for (v, tour) in sol.tours.iter().enumerate() {
        let len = tour.len() as f64;
        for (i, &op) in tour.iter().enumerate() {
            let g = Chromosome::gene(op);
            chrom.pi[g] = i as f64 / len;
            chrom.alpha[g] = v as f64 / m as f64;
        }
    }
    chrom
}

/// Adds independent `U(-0.03, 0.03)` noise to every gene and clamps the
/// result into `[0, 1)`.
pub fn perturb(chrom: &Chromosome, rng: &mut impl Rng) -> Chromosome {
    let mut noisy = |x: f64| clamp_gene(x + rng.gen_range(-PERTURB_EPS..=PERTURB_EPS));
    Chromosome {
        pi: chrom.pi.iter().map(|&x| noisy(x)).collect(),
        alpha: chrom.alpha.iter().map(|&x| noisy(x)).collect(),
    }
}

pub fn clamp_gene(x: f64) -> f64 {
    x.clamp(0.0, BELOW_ONE)
}

/// Ranking key: complete decodes first, then fitness, then index.
fn ranking(n: usize, results: &[DecodedResult]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..results.len()).collect();
    idx.sort_by(|&a, &b| {
        let (ra, rb) = (&results[a], &results[b]);
        (!ra.is_complete(n))
            .cmp(&!rb.is_complete(n))
            .then(ra.fitness.total_cmp(&rb.fitness))
            .then(a.cmp(&b))
    });
    idx
}

/// Sorts a population best-first by its decoded results.
fn sort_population(
    n: usize,
    population: Vec<Chromosome>,
    results: Vec<DecodedResult>,
) -> (Vec<Chromosome>, Vec<DecodedResult>) {
    let order = ranking(n, &results);
    let mut pop: Vec<Option<Chromosome>> = population.into_iter().map(Some).collect();
    let mut res: Vec<Option<DecodedResult>> = results.into_iter().map(Some).collect();
    order
        .iter()
        .map(|&i| (pop[i].take().expect("index once"), res[i].take().expect("index once")))
        .unzip()
}

/// One generation step. Returns the next population: the `N_e` best
/// chromosomes copied verbatim (best first), `N_m` uniform-random mutants,
/// then offspring of one uniformly drawn elite and one uniformly drawn
/// non-elite parent, inheriting each gene from the elite with probability
/// `elite_bias`.
pub fn evolve(
    population: &[Chromosome],
    fitnesses: &[f64],
    params: &BrkgaParams,
    rng: &mut impl Rng,
) -> Result<Vec<Chromosome>, BrkgaError> {
    let mut order: Vec<usize> = (0..population.len()).collect();
    order.sort_by(|&a, &b| fitnesses[a].total_cmp(&fitnesses[b]).then(a.cmp(&b)));
    let sorted: Vec<&Chromosome> = order.iter().map(|&i| &population[i]).collect();
    next_generation(&sorted, params, rng)
}

fn next_generation(
    sorted: &[&Chromosome],
    params: &BrkgaParams,
    rng: &mut impl Rng,
) -> Result<Vec<Chromosome>, BrkgaError> {
    let np = sorted.len();
    let (ne, nm, no) = params.split(np);
    if ne < 1 || np <= ne {
        return Err(BrkgaError::PopulationTooSmall {
            elite: ne,
            non_elite: np.saturating_sub(ne),
        });
    }
    let half = sorted[0].pi.len();
    let mut next: Vec<Chromosome> = sorted[..ne].iter().map(|&c| c.clone()).collect();
    for _ in 0..nm {
        next.push(Chromosome::random(half / 2, rng));
    }
    for _ in 0..no {
        let elite = sorted[rng.gen_range(0..ne)];
        let other = sorted[rng.gen_range(ne..np)];
        let mut pick = |e: &[f64], o: &[f64]| -> Vec<f64> {
            e.iter()
                .zip(o)
                .map(|(&x, &y)| if rng.gen::<f64>() < params.elite_bias { x } else { y })
                .collect()
        };
        let pi = pick(&elite.pi, &other.pi);
        let alpha = pick(&elite.alpha, &other.alpha);
        next.push(Chromosome { pi, alpha });
    }
    Ok(next)
}

/// Initial population: the warm-start seeds fill `ceil(0.15 * N_p)` slots
/// and the rest are uniform-random.
///
/// The 20 seeds are the encoded incumbent (verbatim), the encoded
/// nearest-neighbor, load-balanced and shortest-processing-time
/// constructions, and perturbations of the incumbent. Slots beyond 20 cycle
/// through the seeds with fresh perturbations.
pub fn warm_start_population(
    inst: &Instance,
    incumbent: &Solution,
    params: &BrkgaParams,
    rng: &mut impl Rng,
) -> Vec<Chromosome> {
    let np = params.population;
    let base = encode(inst, incumbent);
    let mut seeds = vec![base.clone()];
    seeds.extend(construction_seeds(inst).iter().map(|s| encode(inst, s)));
    while seeds.len() < WARM_SEEDS {
        seeds.push(perturb(&base, rng));
    }
    let slots = params.warm_slots(np);
    let mut pop: Vec<Chromosome> = Vec::with_capacity(np);
    for i in 0..slots {
        if i < WARM_SEEDS {
            pop.push(seeds[i].clone());
        } else {
            pop.push(perturb(&seeds[i % WARM_SEEDS], rng));
        }
    }
    while pop.len() < np {
        pop.push(Chromosome::random(inst.n(), rng));
    }
    pop
}

/// Statistics of a genetic algorithm run.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct BrkgaStats {
    pub generations: usize,
    /// Best fitness of generation 0, 1, ..., `generations`.
    pub trace: Vec<f64>,
    pub initial_best: f64,
    pub best_fitness: f64,
    /// Whether the best chromosome schedules all operations.
    pub complete: bool,
    pub decodes: u64,
}

/// Runs the genetic algorithm from `initial` (topped up with random
/// chromosomes to `population`, truncated if longer). Elites keep their
/// decoded results; every new chromosome is decoded, in parallel.
pub fn run_brkga(
    inst: &Instance,
    params: &BrkgaParams,
    initial: Vec<Chromosome>,
    seed: u64,
) -> Result<(DecodedResult, BrkgaStats), BrkgaError> {
    params.validate()?;
    let n = inst.n();
    let np = params.population;
    let (ne, _, _) = params.split(np);
    if ne < 1 || np <= ne {
        return Err(BrkgaError::PopulationTooSmall {
            elite: ne,
            non_elite: np.saturating_sub(ne),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut population = initial;
    population.truncate(np);
    while population.len() < np {
        population.push(Chromosome::random(n, &mut rng));
    }
    let decode_all = |chroms: &[Chromosome]| -> Vec<DecodedResult> {
        chroms.par_iter().map(|c| decode(c, inst, params)).collect()
    };
    let results = decode_all(&population);
    let mut stats = BrkgaStats {
        decodes: np as u64,
        ..BrkgaStats::default()
    };
    let (mut population, mut results) = sort_population(n, population, results);
    stats.initial_best = results[0].fitness;
    stats.trace.push(results[0].fitness);
    for _ in 0..params.generations {
        let refs: Vec<&Chromosome> = population.iter().collect();
        let next = next_generation(&refs, params, &mut rng)?;
        let mut fresh = decode_all(&next[ne..]);
        stats.decodes += fresh.len() as u64;
        results.truncate(ne);
        results.append(&mut fresh);
        (population, results) = sort_population(n, next, results);
        stats.generations += 1;
        stats.trace.push(results[0].fitness);
    }
    let best = results.swap_remove(0);
    stats.best_fitness = best.fitness;
    stats.complete = best.is_complete(n);
    Ok((best, stats))
}
