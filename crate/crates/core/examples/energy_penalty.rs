//! Solves one energy-bound instance under several penalty factors, under the
//! hard constraint and without any budget.

use uavoffload::evaluator::{EnergyMode, PenaltyMode};
use uavoffload::scenario::{generate_scenario, ScenarioParams};
use uavoffload::solvers::{solve_scheme, SchemeConfig};

fn main() -> uavoffload::Result<()> {
    let mut p = ScenarioParams::default();
    p.task.subtasks = 20;
    let s = generate_scenario(2, &p)?;
    let budget = s.uavs[0].energy_budget_j;
    let show = |label: &str, cfg: &SchemeConfig| -> uavoffload::Result<()> {
        let run = solve_scheme(&s, cfg)?;
        println!(
            "{label:<14} objective {:.3} s, penalized {:.3} s, feasible {}",
            run.objective_s, run.penalized_s, run.feasible
        );
        Ok(())
    };
    println!("budget {budget:.0} J per UAV");
    for lambda in [1e-4, 0.01, 0.1, 0.5] {
        let mut cfg = SchemeConfig::default();
        cfg.woa.penalty.lambda = lambda;
        show(&format!("lambda {lambda}"), &cfg)?;
    }
    let mut cfg = SchemeConfig::default();
    cfg.woa.penalty.mode = PenaltyMode::Hard;
    show("hard", &cfg)?;
    cfg.eval.energy_mode = EnergyMode::Unlimited;
    show("unlimited", &cfg)?;
    Ok(())
}
