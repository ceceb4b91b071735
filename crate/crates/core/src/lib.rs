//! Simulation and optimization of dependency-task offloading across
//! cooperating edge-computing UAVs.
//!
//! The crate is organised bottom-up: [`scenario`] describes the world,
//! [`channel`] turns geometry into link rates, [`timing`] turns rates and
//! placements into latencies and energy, [`evaluator`] schedules a whole
//! decision, [`solvers`] search over decisions and bandwidth shares, and
//! [`experiments`] runs seeded sweeps and writes result files.

// `!(x > 0.0)` deliberately rejects NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod error;
pub mod evaluator;
pub mod experiments;
pub mod scenario;
pub mod seeding;
pub mod solvers;
pub mod timing;

pub use error::{Error, Result};
