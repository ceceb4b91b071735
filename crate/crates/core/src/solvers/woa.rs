//! Discrete whale optimization.
//!
//! Agents move in the continuous box `[1, V]^M`; coordinate `k` of a position
//! names the UAV for the `k`-th real sub-task once rounded. Each iteration an
//! agent draws one `r` (shared by `A = 2ar − a` and `C = 2r`), a phase coin
//! `p` and a spiral parameter `l ∈ [−1, 1]`, then
//!
//! * `p < 0.5, |A| < 1`: encircles the best position, `X* − A·|C·X* − X|`;
//! * `p < 0.5, |A| ≥ 1`: circles a random agent instead of the best;
//! * `p ≥ 0.5`: follows the spiral `|X* − X|·e^{bl}·cos(2πl) + X*`.
//!
//! `a` decays linearly from 2 to 0. Every agent owns an RNG stream derived
//! from the master seed, and all moves in an iteration read the population
//! as it stood at the start of that iteration, so parallel fitness
//! evaluation cannot change the outcome.

use std::f64::consts::PI;
use std::time::Instant;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{score, SolverRun};
use crate::channel::BandwidthAllocation;
use crate::error::{Error, Result};
use crate::evaluator::{EvalOptions, Evaluator, OffloadDecision, PenaltyConfig};
use crate::scenario::Scenario;
use crate::seeding::{child_rng, DOMAIN_SOLVER};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WoaConfig {
    pub agents: usize,
    pub max_iter: usize,
    pub spiral_b: f64,
    pub penalty: PenaltyConfig,
    pub seed: u64,
}

impl Default for WoaConfig {
    fn default() -> Self {
        Self {
            agents: 100,
            max_iter: 50,
            spiral_b: 1.0,
            penalty: PenaltyConfig::default(),
            seed: 0,
        }
    }
}

/// Rounds to the nearest UAV (ties go to the lower one), clamps to `[1, V]`
/// and returns zero-based ids.
pub fn discretize(position: &[f64], uav_count: usize) -> OffloadDecision {
    let hi = uav_count.max(1) as f64;
    OffloadDecision(
        position
            .iter()
            .map(|&x| {
                let k = (x - 0.5).ceil();
                let k = if k.is_nan() { 1.0 } else { k.clamp(1.0, hi) };
                k as usize - 1
            })
            .collect(),
    )
}

pub struct WoaState {
    pub agents: Vec<Vec<f64>>,
    pub fitness: Vec<f64>,
    pub best_position: Vec<f64>,
    pub best_value: f64,
    pub a: f64,
    pub iteration: usize,
    pub max_iter: usize,
    pub spiral_b: f64,
    pub uav_count: usize,
    rngs: Vec<ChaCha8Rng>,
}

impl WoaState {
    /// Draws `agents` uniform positions in `[1, V]^dims` and scores them.
    /// A warm start, if given, replaces agent 0.
    pub fn new<F>(dims: usize, uav_count: usize, cfg: &WoaConfig, warm_start: Option<&[f64]>, fitness: &F) -> Result<Self>
    where
        F: Fn(&OffloadDecision) -> Result<f64> + Sync,
    {
        if cfg.agents == 0 {
            return Err(Error::InvalidParameter("whale optimization needs at least one agent".into()));
        }
        if uav_count == 0 {
            return Err(Error::InvalidParameter("no UAVs to offload to".into()));
        }
        let hi = uav_count as f64;
        let mut rngs: Vec<ChaCha8Rng> = (0..cfg.agents)
            .map(|i| child_rng(cfg.seed, DOMAIN_SOLVER, i as u64))
            .collect();
        let mut agents: Vec<Vec<f64>> = rngs
            .iter_mut()
            .map(|rng| (0..dims).map(|_| 1.0 + (hi - 1.0) * rng.random::<f64>()).collect())
            .collect();
        if let Some(w) = warm_start {
            if w.len() != dims {
                return Err(Error::InvalidParameter(format!(
                    "warm start has {} coordinates, expected {dims}",
                    w.len()
                )));
            }
            agents[0] = w.iter().map(|x| x.clamp(1.0, hi)).collect();
        }
        let fit = agents
            .par_iter()
            .map(|x| fitness(&discretize(x, uav_count)))
            .collect::<Result<Vec<f64>>>()?;
        let (bi, bv) = argmin(&fit);
        Ok(Self {
            best_position: agents[bi].clone(),
            best_value: bv,
            agents,
            fitness: fit,
            a: 2.0,
            iteration: 0,
            max_iter: cfg.max_iter,
            spiral_b: cfg.spiral_b,
            uav_count,
            rngs,
        })
    }

    pub fn best_decision(&self) -> OffloadDecision {
        discretize(&self.best_position, self.uav_count)
    }
}

/// Index and value of the smallest entry; the first one wins ties.
fn argmin(v: &[f64]) -> (usize, f64) {
    v.iter()
        .enumerate()
        .fold((0, f64::INFINITY), |(bi, bv), (i, &x)| if x < bv { (i, x) } else { (bi, bv) })
}

/// Moves one agent. `r`, `p`, `l` are the per-agent draws; `reference` is
/// the random agent used when `|A| ≥ 1`.
#[allow(clippy::too_many_arguments)]
pub fn move_agent(
    x: &[f64],
    best: &[f64],
    reference: &[f64],
    a: f64,
    r: f64,
    p: f64,
    l: f64,
    b: f64,
    hi: f64,
) -> Vec<f64> {
    let big_a = 2.0 * a * r - a;
    let big_c = 2.0 * r;
    let out = if p < 0.5 {
        let target = if big_a.abs() < 1.0 { best } else { reference };
        x.iter()
            .zip(target)
            .map(|(&xi, &ti)| ti - big_a * (big_c * ti - xi).abs())
            .collect::<Vec<_>>()
    } else {
        let k = (b * l).exp() * (2.0 * PI * l).cos();
        x.iter()
            .zip(best)
            .map(|(&xi, &bi)| (bi - xi).abs() * k + bi)
            .collect()
    };
    out.into_iter().map(|v| v.clamp(1.0, hi)).collect()
}

/// One iteration: move every agent, rescore on the discretized positions and
/// keep the best-so-far.
pub fn woa_step<F>(state: &mut WoaState, fitness: &F) -> Result<()>
where
    F: Fn(&OffloadDecision) -> Result<f64> + Sync,
{
    let a = if state.max_iter == 0 {
        0.0
    } else {
        2.0 - 2.0 * state.iteration as f64 / state.max_iter as f64
    };
    state.a = a;
    let hi = state.uav_count as f64;
    let b = state.spiral_b;
    let snapshot = state.agents.clone();
    let best = state.best_position.clone();
    let n = snapshot.len();
    let uavs = state.uav_count;
    let moved = state
        .rngs
        .par_iter_mut()
        .zip(snapshot.par_iter())
        .map(|(rng, x)| {
            let r: f64 = rng.random();
            let p: f64 = rng.random();
            let l: f64 = rng.random_range(-1.0..=1.0);
            let big_a = 2.0 * a * r - a;
            let reference = if p < 0.5 && big_a.abs() >= 1.0 {
                &snapshot[rng.random_range(0..n)]
            } else {
                &best
            };
            let nx = move_agent(x, &best, reference, a, r, p, l, b, hi);
            let f = fitness(&discretize(&nx, uavs))?;
            Ok((nx, f))
        })
        .collect::<Result<Vec<_>>>()?;
    for (i, (nx, f)) in moved.into_iter().enumerate() {
        if f < state.best_value {
            state.best_value = f;
            state.best_position = nx.clone();
        }
        state.agents[i] = nx;
        state.fitness[i] = f;
    }
    state.iteration += 1;
    Ok(())
}

/// Full D-WOA run with a fixed bandwidth allocation. `MaxIT = 0` returns the
/// best of the random initial population.
pub fn dwoa_solve(
    scenario: &Scenario,
    beta: &BandwidthAllocation,
    cfg: &WoaConfig,
    eval: EvalOptions,
    warm_start: Option<&OffloadDecision>,
) -> Result<SolverRun> {
    let started = Instant::now();
    let evaluator = Evaluator::new(scenario, beta, eval)?;
    let fitness = |d: &OffloadDecision| score(&evaluator, d, &cfg.penalty).map(|s| s.1);
    let warm: Option<Vec<f64>> = warm_start.map(|d| d.0.iter().map(|&v| v as f64 + 1.0).collect());
    let mut state = WoaState::new(
        scenario.decision_len(),
        scenario.uav_count(),
        cfg,
        warm.as_deref(),
        &fitness,
    )?;
    let mut trace = Vec::with_capacity(cfg.max_iter);
    for _ in 0..cfg.max_iter {
        woa_step(&mut state, &fitness)?;
        trace.push(state.best_value);
    }
    let decision = state.best_decision();
    let (objective_s, penalized_s, feasible) = score(&evaluator, &decision, &cfg.penalty)?;
    Ok(SolverRun {
        solver: "dwoa".into(),
        allocator: String::new(),
        seed: cfg.seed,
        config: serde_json::to_value(cfg)?,
        trace,
        outer_trace: vec![],
        decision,
        beta: beta.clone(),
        objective_s,
        penalized_s,
        feasible,
        evaluations: (cfg.agents * (cfg.max_iter + 1)) as u64,
        wall_time_s: started.elapsed().as_secs_f64(),
    })
}
