//! Exhaustive enumeration over all `V^M` decisions.
//!
//! Decision index `i` is read in mixed radix with the first sub-task as the
//! least significant digit. Workers split the index range; the reduction
//! keeps the smallest objective and, among equal objectives, the smallest
//! index, so the answer does not depend on the thread count.

use std::time::Instant;

use rayon::prelude::*;

use super::SolverRun;
use crate::channel::BandwidthAllocation;
use crate::error::{Error, Result};
use crate::evaluator::{EvalOptions, Evaluator, OffloadDecision};
use crate::scenario::Scenario;

pub const DEFAULT_STATE_CAP: u64 = 10_000_000;

/// `V^M` as a float so that overflow is impossible.
pub fn state_space_size(scenario: &Scenario) -> f64 {
    (scenario.uav_count() as f64).powi(scenario.decision_len() as i32)
}

pub fn decode_index(mut index: u64, len: usize, uav_count: usize) -> OffloadDecision {
    let v = uav_count as u64;
    OffloadDecision(
        (0..len)
            .map(|_| {
                let d = index % v;
                index /= v;
                d as usize
            })
            .collect(),
    )
}

/// Lowest-objective energy-feasible decision. Infeasible decisions are
/// skipped, never penalized.
pub fn exhaustive_solve(
    scenario: &Scenario,
    beta: &BandwidthAllocation,
    eval: EvalOptions,
    cap: u64,
) -> Result<SolverRun> {
    let started = Instant::now();
    let size = state_space_size(scenario);
    if size > cap as f64 || scenario.uav_count() == 0 {
        return Err(Error::StateSpaceTooLarge { size, cap });
    }
    let total = size as u64;
    let len = scenario.decision_len();
    let v = scenario.uav_count();
    let evaluator = Evaluator::new(scenario, beta, eval)?;
    let best = (0..total)
        .into_par_iter()
        .map(|i| -> Result<Option<(f64, u64)>> {
            let r = evaluator.evaluate(&decode_index(i, len, v))?;
            Ok(r.feasible.then_some((r.objective_s, i)))
        })
        .try_reduce(
            || None,
            |a, b| {
                Ok(match (a, b) {
                    (Some(x), Some(y)) => Some(if (y.0, y.1) < (x.0, x.1) { y } else { x }),
                    (x, None) => x,
                    (None, y) => y,
                })
            },
        )?;
    let Some((objective_s, index)) = best else {
        return Err(Error::NoFeasibleDecision);
    };
    Ok(SolverRun {
        solver: "exhaustive".into(),
        allocator: String::new(),
        seed: 0,
        config: serde_json::json!({ "state_cap": cap, "eval": eval }),
        trace: vec![objective_s],
        outer_trace: vec![],
        decision: decode_index(index, len, v),
        beta: beta.clone(),
        objective_s,
        penalized_s: objective_s,
        feasible: true,
        evaluations: total,
        wall_time_s: started.elapsed().as_secs_f64(),
    })
}
