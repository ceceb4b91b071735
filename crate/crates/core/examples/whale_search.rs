//! Runs the discrete whale search under a fixed allocation and prints its
//! convergence trace.

use uavoffload::evaluator::EvalOptions;
use uavoffload::scenario::{generate_scenario, ScenarioParams};
use uavoffload::solvers::{alloc_optimal, associated_decision, dwoa_solve, WoaConfig};

fn main() -> uavoffload::Result<()> {
    let s = generate_scenario(1, &ScenarioParams::default())?;
    let beta = alloc_optimal(&s, &associated_decision(&s))?;
    let cfg = WoaConfig {
        seed: 42,
        ..WoaConfig::default()
    };
    let run = dwoa_solve(&s, &beta, &cfg, EvalOptions::default(), None)?;
    for (t, v) in run.trace.iter().enumerate().step_by(5) {
        println!("iteration {:>3}: {v:.4} s", t + 1);
    }
    println!(
        "best {:.4} s (penalized {:.4} s, feasible {}) after {} evaluations in {:.2} s",
        run.objective_s, run.penalized_s, run.feasible, run.evaluations, run.wall_time_s
    );
    println!("decision {:?}", run.decision.0);
    Ok(())
}
