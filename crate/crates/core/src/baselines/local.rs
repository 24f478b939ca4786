//! First-improvement local search with 2-opt, relocate and swap moves.

use crate::instance::Instance;
use crate::schedule::{Op, Score, Simulator, Solution};

/// Default move budget: `max(50 n, 2000)` evaluated moves.
pub fn default_move_budget(n: usize) -> usize {
    (50 * n).max(2000)
}

struct Search<'a> {
    inst: &'a Instance,
    sim: Simulator,
    tours: Vec<Vec<Op>>,
    score: Score,
    budget: usize,
}

impl Search<'_> {
    /// `None` once the budget is spent; checked before a move is applied.
    fn budget_left(&self) -> Option<()> {
        (self.budget > 0).then_some(())
    }

    /// Scores the current tours and keeps them if they improve; otherwise
    /// the caller undoes the move.
    fn try_current(&mut self) -> bool {
        self.budget -= 1;
        match self.sim.score_tours(self.inst, &self.tours) {
            Ok(s) if s.improves_on(&self.score) => {
                self.score = s;
                true
            }
            _ => false,
        }
    }

    fn two_opt(&mut self) -> Option<bool> {
        let mut improved = false;
        for v in 0..self.tours.len() {
            let mut i = 0;
            while i + 1 < self.tours[v].len() {
                let mut j = i + 1;
                while j < self.tours[v].len() {
                    self.budget_left()?;
                    self.tours[v][i..=j].reverse();
                    if self.try_current() {
                        improved = true;
                    } else {
                        self.tours[v][i..=j].reverse();
                    }
                    j += 1;
                }
                i += 1;
            }
        }
        Some(improved)
    }

    fn relocate(&mut self) -> Option<bool> {
        let mut improved = false;
        let m = self.tours.len();
        for v in 0..m {
            let mut i = 0;
            while i < self.tours[v].len() {
                let mut moved = false;
                'targets: for w in 0..m {
                    let len_w = self.tours[w].len() + usize::from(w != v);
                    for j in 0..len_w {
                        if w == v && j == i {
                            continue;
                        }
                        self.budget_left()?;
                        let op = self.tours[v].remove(i);
                        self.tours[w].insert(j, op);
                        if self.try_current() {
                            improved = true;
                            moved = true;
                            break 'targets;
                        }
                        self.tours[w].remove(j);
                        self.tours[v].insert(i, op);
                    }
                }
                if !moved {
                    i += 1;
                }
            }
        }
        Some(improved)
    }

    fn swap(&mut self) -> Option<bool> {
        let mut improved = false;
        let m = self.tours.len();
        for v in 0..m {
            for i in 0..self.tours[v].len() {
                for w in v..m {
                    let start = if w == v { i + 1 } else { 0 };
                    for j in start..self.tours[w].len() {
                        let (a, b) = (self.tours[v][i], self.tours[w][j]);
                        if a.customer == b.customer {
                            continue;
                        }
                        self.budget_left()?;
                        self.tours[v][i] = b;
                        self.tours[w][j] = a;
                        if self.try_current() {
                            improved = true;
                        } else {
                            self.tours[v][i] = a;
                            self.tours[w][j] = b;
                        }
                    }
                }
            }
        }
        Some(improved)
    }
}

/// Improves a feasible solution with first-improvement passes of intra-route
/// 2-opt reversal, single-operation relocation and pairwise swaps until a full
/// round finds nothing or `budget` moves have been evaluated. A move is kept
/// when it lowers the makespan, or keeps it and lowers the summed return
/// times. Infeasible neighbors are simply rejected.
pub fn two_opt_improve_with_budget(inst: &Instance, sol: &Solution, budget: usize) -> Solution {
    let mut sim = Simulator::new(inst);
    let Ok(score) = sim.score(inst, sol) else {
        return sol.clone();
    };
    let mut s = Search {
        inst,
        sim,
        tours: sol.tours.clone(),
        score,
        budget,
    };
    loop {
        let mut any = false;
        for step in [Search::two_opt, Search::relocate, Search::swap] {
            match step(&mut s) {
                Some(improved) => any |= improved,
                None => return Solution::from_tours(s.tours),
            }
        }
        if !any {
            return Solution::from_tours(s.tours);
        }
    }
}

pub fn two_opt_improve(inst: &Instance, sol: &Solution) -> Solution {
    two_opt_improve_with_budget(inst, sol, default_move_budget(inst.n()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{exact_solve, OracleLimits};
    use crate::schedule::evaluate;
    use crate::schedule::tests::toy;

    #[test]
    fn reaches_toy_optimum() {
        let inst = toy(1, 2);
        let start = Solution::from_tours(vec![vec![Op::drop(2), Op::drop(1), Op::pick(2), Op::pick(1)]]);
        let before = evaluate(&inst, &start).unwrap().makespan;
        let out = two_opt_improve(&inst, &start);
        let after = evaluate(&inst, &out).unwrap().makespan;
        let opt = exact_solve(&inst, OracleLimits::default()).unwrap().makespan;
        assert!(after <= before);
        assert_eq!(after, opt);
    }

    #[test]
    fn small_budgets_keep_feasibility() {
        use crate::schedule::tests::random_instance;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(12);
        let inst = random_instance(&mut rng, 8, 2, 2);
        let start = crate::baselines::nearest_neighbor(&inst).unwrap();
        let z0 = evaluate(&inst, &start).unwrap().makespan;
        for budget in 0..200 {
            let out = two_opt_improve_with_budget(&inst, &start, budget);
            assert!(evaluate(&inst, &out).unwrap().makespan <= z0);
        }
    }

    #[test]
    fn fixed_point_is_unchanged() {
        let inst = toy(1, 2);
        let opt = Solution::from_tours(vec![vec![Op::drop(1), Op::drop(2), Op::pick(1), Op::pick(2)]]);
        let out = two_opt_improve(&inst, &opt);
        assert_eq!(out, two_opt_improve(&inst, &out));
        assert_eq!(evaluate(&inst, &out).unwrap().makespan, 47.0);
    }
}
