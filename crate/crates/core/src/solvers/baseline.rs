//! The no-collaboration baseline: every sub-task stays on its owner's UAV.

use std::time::Instant;

use super::{score, SolverRun};
use crate::channel::BandwidthAllocation;
use crate::error::Result;
use crate::evaluator::{EvalOptions, Evaluator, OffloadDecision, PenaltyConfig};
use crate::scenario::Scenario;

pub fn associated_decision(scenario: &Scenario) -> OffloadDecision {
    OffloadDecision(
        scenario
            .tasks
            .iter()
            .flat_map(|t| std::iter::repeat_n(scenario.home_uav(t), t.real_count()))
            .collect(),
    )
}

pub fn associated_solve(
    scenario: &Scenario,
    beta: &BandwidthAllocation,
    penalty: &PenaltyConfig,
    eval: EvalOptions,
) -> Result<SolverRun> {
    let started = Instant::now();
    let evaluator = Evaluator::new(scenario, beta, eval)?;
    let decision = associated_decision(scenario);
    let (objective_s, penalized_s, feasible) = score(&evaluator, &decision, penalty)?;
    Ok(SolverRun {
        solver: "associated".into(),
        allocator: String::new(),
        seed: 0,
        config: serde_json::json!({ "penalty": penalty, "eval": eval }),
        trace: vec![penalized_s],
        outer_trace: vec![],
        decision,
        beta: beta.clone(),
        objective_s,
        penalized_s,
        feasible,
        evaluations: 1,
        wall_time_s: started.elapsed().as_secs_f64(),
    })
}
