//! Exact optimum for tiny instances and LP export of the mixed-integer model.

mod exact;
mod milp;

use thiserror::Error;

pub use exact::{exact_solve, OracleLimits, OracleResult, MAX_ORACLE_CUSTOMERS};
pub use milp::{count_rows, default_big_m, export_milp, Family};

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("instance has {n} customers, oracle limit is {max}")]
    InstanceTooLarge { n: usize, max: usize },
    #[error("max_customers = {0} exceeds the hard ceiling of 8")]
    InvalidLimits(usize),
    #[error("search budget exhausted; best found makespan {}", .0.makespan)]
    LimitExceeded(Box<OracleResult>),
}
