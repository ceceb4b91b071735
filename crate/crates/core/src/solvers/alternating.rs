//! Block coordinate descent over the decision and the bandwidth fractions.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::{alloc_optimal, dwoa_solve, score, SolverRun, WoaConfig};
use crate::channel::BandwidthAllocation;
use crate::error::Result;
use crate::evaluator::{EvalOptions, Evaluator};
use crate::scenario::Scenario;
use crate::seeding::{child_seed, DOMAIN_SOLVER};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlternatingConfig {
    pub woa: WoaConfig,
    pub eval: EvalOptions,
    /// `1` gives the single-pass pipeline.
    pub max_outer: usize,
    /// Stop once a round improves the penalized objective by less than this
    /// fraction.
    pub tol: f64,
}

impl Default for AlternatingConfig {
    fn default() -> Self {
        Self {
            woa: WoaConfig::default(),
            eval: EvalOptions::default(),
            max_outer: 10,
            tol: 1e-6,
        }
    }
}

/// Starts from the equal split. Each round runs D-WOA under the current β,
/// warm-started from the previous round's decision, then replaces β by the
/// optimal allocation for that decision. Both the decision under the old β
/// and under the new one are candidates; the best pair seen is returned, so
/// `trace` and `outer_trace` never increase.
pub fn alternating_solve(scenario: &Scenario, cfg: &AlternatingConfig) -> Result<SolverRun> {
    let started = Instant::now();
    let mut beta = BandwidthAllocation::equal(scenario);
    let mut best: Option<SolverRun> = None;
    let mut trace = Vec::new();
    let mut outer_trace = Vec::new();
    let mut evaluations = 0;
    for round in 0..cfg.max_outer.max(1) {
        let mut woa = cfg.woa.clone();
        woa.seed = child_seed(cfg.woa.seed, DOMAIN_SOLVER, round as u64);
        let warm = best.as_ref().map(|b| b.decision.clone());
        let previous = best.as_ref().map_or(f64::INFINITY, |b| b.penalized_s);
        let inner = dwoa_solve(scenario, &beta, &woa, cfg.eval, warm.as_ref())?;
        evaluations += inner.evaluations + 1;
        trace.extend(inner.trace.iter().map(|&v| v.min(previous)));

        beta = alloc_optimal(scenario, &inner.decision)?;
        let evaluator = Evaluator::new(scenario, &beta, cfg.eval)?;
        let (objective_s, penalized_s, feasible) = score(&evaluator, &inner.decision, &cfg.woa.penalty)?;
        let reallocated = SolverRun {
            beta: beta.clone(),
            objective_s,
            penalized_s,
            feasible,
            ..inner.clone()
        };
        for candidate in [inner, reallocated] {
            if best.as_ref().is_none_or(|b| candidate.penalized_s < b.penalized_s) {
                best = Some(candidate);
            }
        }
        let current = best.as_ref().map_or(f64::INFINITY, |b| b.penalized_s);
        if let Some(last) = trace.last_mut() {
            *last = last.min(current);
        }
        outer_trace.push(current);
        if previous.is_finite() && (previous - current) <= cfg.tol * previous.abs() {
            break;
        }
    }
    let mut floor = f64::INFINITY;
    for v in &mut trace {
        floor = floor.min(*v);
        *v = floor;
    }
    let mut run = best.expect("at least one round runs");
    run.solver = "dwoa".into();
    run.seed = cfg.woa.seed;
    run.config = serde_json::to_value(cfg)?;
    run.trace = trace;
    run.outer_trace = outer_trace;
    run.evaluations = evaluations;
    run.wall_time_s = started.elapsed().as_secs_f64();
    Ok(run)
}
