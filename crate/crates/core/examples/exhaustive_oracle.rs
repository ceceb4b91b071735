//! Compares the whale search with full enumeration on a tiny instance.

use uavoffload::evaluator::EvalOptions;
use uavoffload::scenario::{generate_scenario, ActiveUsers, ScenarioParams};
use uavoffload::solvers::{
    alloc_optimal, associated_decision, dwoa_solve, exhaustive_solve, state_space_size, WoaConfig, DEFAULT_STATE_CAP,
};

fn main() -> uavoffload::Result<()> {
    let mut p = ScenarioParams::default();
    p.uav_count = 3;
    p.task.subtasks = 3;
    p.active = ActiveUsers::Total { count: 2 };
    for seed in 0..5 {
        let s = generate_scenario(seed, &p)?;
        let beta = alloc_optimal(&s, &associated_decision(&s))?;
        let opt = exhaustive_solve(&s, &beta, EvalOptions::default(), DEFAULT_STATE_CAP)?;
        let cfg = WoaConfig {
            seed,
            ..WoaConfig::default()
        };
        let woa = dwoa_solve(&s, &beta, &cfg, EvalOptions::default(), None)?;
        println!(
            "seed {seed}: {} decisions, optimum {:.4} s, whale {:.4} s, ratio {:.4}",
            state_space_size(&s),
            opt.objective_s,
            woa.objective_s,
            woa.objective_s / opt.objective_s
        );
    }
    Ok(())
}
