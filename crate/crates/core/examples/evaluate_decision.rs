//! Generates a default scenario, keeps every sub-task on its owner's UAV and
//! prints the schedule, the latency split and the per-UAV energy ledger.

use uavoffload::channel::BandwidthAllocation;
use uavoffload::evaluator::{decision_latency_breakdown, evaluate, EvalOptions, OffloadDecision};
use uavoffload::scenario::{generate_scenario, ScenarioParams};

fn main() -> uavoffload::Result<()> {
    let scenario = generate_scenario(7, &ScenarioParams::default())?;
    let decision = OffloadDecision(
        scenario
            .tasks
            .iter()
            .flat_map(|t| std::iter::repeat_n(scenario.home_uav(t), t.real_count()))
            .collect(),
    );
    let beta = BandwidthAllocation::equal(&scenario);
    let result = evaluate(&decision, &beta, &scenario, EvalOptions::default())?;
    for (t, task) in result.tasks.iter().enumerate() {
        println!(
            "task {t}: user {} on UAV {}, makespan {:.3} s, upload {:.3} s",
            task.owner_user, task.home_uav, task.makespan_s, task.upload_s
        );
    }
    let split = decision_latency_breakdown(&result);
    println!(
        "objective {:.3} s (computation {:.3} s, distributed {:.3} s)",
        split.total_s, split.computation_s, split.distributed_s
    );
    for (v, (e, uav)) in result.energy.uavs.iter().zip(&scenario.uavs).enumerate() {
        println!(
            "UAV {v}: exec {:.1} J, forward {:.1} J, report {:.3} J, hover {:.1} J over {:.3} s, total {:.1} / {:.0} J",
            e.exec_j, e.forward_j, e.report_j, e.hover_j, e.hover_time_s, e.total_j, uav.energy_budget_j
        );
    }
    println!("feasible: {}", result.feasible);
    Ok(())
}
