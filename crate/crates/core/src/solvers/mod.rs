//! Offloading and bandwidth solvers.
//!
//! Every solver returns a [`SolverRun`]; they differ only in how the
//! offloading decision and the bandwidth fractions are chosen.

mod alloc;
mod alternating;
mod baseline;
mod exhaustive;
mod woa;

use serde::{Deserialize, Serialize};

pub use alloc::{alloc_equal, alloc_optimal, alloc_proportional, allocate, Allocator};
pub use alternating::{alternating_solve, AlternatingConfig};
pub use baseline::{associated_decision, associated_solve};
pub use exhaustive::{decode_index, exhaustive_solve, state_space_size, DEFAULT_STATE_CAP};
pub use woa::{discretize, dwoa_solve, move_agent, woa_step, WoaConfig, WoaState};

use crate::channel::BandwidthAllocation;
use crate::error::Result;
use crate::evaluator::{penalized_objective, EvalOptions, Evaluator, OffloadDecision, PenaltyConfig};
use crate::scenario::Scenario;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverKind {
    Dwoa,
    Exhaustive,
    Associated,
}

impl SolverKind {
    pub fn name(self) -> &'static str {
        match self {
            SolverKind::Dwoa => "dwoa",
            SolverKind::Exhaustive => "exhaustive",
            SolverKind::Associated => "associated",
        }
    }
}

/// Outcome of one solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverRun {
    pub solver: String,
    pub allocator: String,
    pub seed: u64,
    pub config: serde_json::Value,
    /// Best penalized objective after each iteration; never increases.
    pub trace: Vec<f64>,
    /// Objective after each outer round of the alternating loop.
    pub outer_trace: Vec<f64>,
    pub decision: OffloadDecision,
    pub beta: BandwidthAllocation,
    pub objective_s: f64,
    pub penalized_s: f64,
    pub feasible: bool,
    pub evaluations: u64,
    pub wall_time_s: f64,
}

impl SolverRun {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Everything needed to run one scheme end to end.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeConfig {
    pub solver: SolverKind,
    pub allocator: Allocator,
    pub woa: WoaConfig,
    pub eval: EvalOptions,
    pub max_outer: usize,
    pub tol: f64,
    pub state_cap: u64,
}

impl Default for SchemeConfig {
    fn default() -> Self {
        Self {
            solver: SolverKind::Dwoa,
            allocator: Allocator::Optimal,
            woa: WoaConfig::default(),
            eval: EvalOptions::default(),
            max_outer: 10,
            tol: 1e-6,
            state_cap: DEFAULT_STATE_CAP,
        }
    }
}

/// Runs a scheme. D-WOA with the optimal allocator goes through the
/// alternating loop; every other combination fixes β from the allocator
/// first and then searches the decision once.
pub fn solve_scheme(scenario: &Scenario, cfg: &SchemeConfig) -> Result<SolverRun> {
    let mut run = match (cfg.solver, cfg.allocator) {
        (SolverKind::Dwoa, Allocator::Optimal) => alternating_solve(
            scenario,
            &AlternatingConfig {
                woa: cfg.woa.clone(),
                eval: cfg.eval,
                max_outer: cfg.max_outer,
                tol: cfg.tol,
            },
        )?,
        (solver, allocator) => {
            let beta = allocate(allocator, scenario, &associated_decision(scenario))?;
            match solver {
                SolverKind::Dwoa => dwoa_solve(scenario, &beta, &cfg.woa, cfg.eval, None)?,
                SolverKind::Exhaustive => exhaustive_solve(scenario, &beta, cfg.eval, cfg.state_cap)?,
                SolverKind::Associated => associated_solve(scenario, &beta, &cfg.woa.penalty, cfg.eval)?,
            }
        }
    };
    run.allocator = cfg.allocator.name().to_string();
    Ok(run)
}

/// Scores a decision: `(plain objective, penalized objective, feasible)`.
pub(crate) fn score(
    evaluator: &Evaluator<'_>,
    decision: &OffloadDecision,
    penalty: &PenaltyConfig,
) -> Result<(f64, f64, bool)> {
    let r = evaluator.evaluate(decision)?;
    let p = penalized_objective(&r, penalty, &evaluator.scenario().uavs);
    Ok((r.objective_s, p, r.feasible))
}
