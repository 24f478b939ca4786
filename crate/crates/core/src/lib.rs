//! Solvers for vehicle routing with resource-constrained pickup and delivery.
//!
//! Vehicles leave the depot carrying `k` identical resources, drop them at
//! customers where they process autonomously for `p_c`, and collect them
//! again later, possibly with a different vehicle. The objective is the
//! makespan: the time the last vehicle returns to the depot.

pub mod instance;
pub mod alns;
pub mod baselines;
pub mod brkga;
pub mod insertion;
pub mod oracle;
pub mod pipeline;
pub mod schedule;
