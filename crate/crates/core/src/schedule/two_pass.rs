use super::{EvalError, Op, Solution};
use crate::instance::Instance;

/// Two-pass makespan approximation.
///
/// Pass 1 walks every route ignoring pickup waits and records dropoff times.
/// Pass 2 rewalks the routes with waits `max(arrival, ready)` where the ready
/// time comes from pass 1. Cross-route waits that cascade through several
/// routes are not propagated, so the value can underestimate the exact
/// makespan; it is exact when no dropoff is delayed by an earlier wait.
pub fn two_pass_estimate(inst: &Instance, sol: &Solution) -> Result<f64, EvalError> {
    sol.check_structure(inst, true)?;
    sol.check_capacity(inst.k())?;
    TwoPass::new(inst).estimate(inst, &sol.tours)
}

/// Scratch buffers for repeated two-pass estimates.
#[derive(Debug, Clone)]
pub struct TwoPass {
    drop1: Vec<f64>,
    drop_route: Vec<usize>,
    returns: Vec<f64>,
}

impl TwoPass {
    pub fn new(inst: &Instance) -> Self {
        Self {
            drop1: vec![0.0; inst.n() + 1],
            drop_route: vec![usize::MAX; inst.n() + 1],
            returns: vec![0.0; inst.m()],
        }
    }

    /// Estimate over possibly partial tours. Dropoffs without a pickup are
    /// allowed; a pickup whose dropoff is missing is malformed. Capacity is
    /// not checked here.
    pub fn estimate(&mut self, inst: &Instance, tours: &[Vec<Op>]) -> Result<f64, EvalError> {
        self.drop_route.fill(usize::MAX);
        self.returns.resize(tours.len(), 0.0);
        for (v, tour) in tours.iter().enumerate() {
            let (mut t, mut loc) = (0.0, 0);
            for op in tour {
                t += inst.d(loc, op.customer);
                loc = op.customer;
                if op.is_drop() {
                    self.drop1[loc] = t;
                    self.drop_route[loc] = v;
                }
            }
        }
        let mut seen = vec![false; self.drop1.len()];
        for (v, tour) in tours.iter().enumerate() {
            let (mut t, mut loc) = (0.0, 0);
            for op in tour {
                let c = op.customer;
                t += inst.d(loc, c);
                loc = c;
                if op.is_drop() {
                    seen[c] = true;
                } else {
                    let r = self.drop_route[c];
                    if r == usize::MAX {
                        return Err(EvalError::MalformedSolution(format!("pickup of {c} without dropoff")));
                    }
                    if r == v && !seen[c] {
                        return Err(EvalError::Deadlock { pending: 1 });
                    }
                    t = t.max(self.drop1[c] + inst.p(c));
                }
            }
            self.returns[v] = if tour.is_empty() { 0.0 } else { t + inst.d(loc, 0) };
        }
        Ok(self.returns.iter().copied().fold(0.0, f64::max))
    }

    pub fn return_times(&self) -> &[f64] {
        &self.returns
    }
}
