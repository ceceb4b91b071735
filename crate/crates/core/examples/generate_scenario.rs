//! Generates a scenario from a seed, checks it and writes it as TOML.
//!
//! `cargo run --example generate_scenario -- [seed] [out.toml]`

use uavoffload::scenario::{generate_scenario, validate_scenario, ScenarioParams};

fn main() -> uavoffload::Result<()> {
    let mut args = std::env::args().skip(1);
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(1);
    let scenario = generate_scenario(seed, &ScenarioParams::default())?;
    assert!(validate_scenario(&scenario).is_empty());
    for uav in &scenario.uavs {
        println!(
            "UAV {} at {:?}, {:.2} GHz, budget {:.0} J, {} users",
            uav.id,
            uav.position_m,
            uav.max_compute_cycles_per_s / 1e9,
            uav.energy_budget_j,
            scenario.users_of(uav.id).count()
        );
    }
    for task in &scenario.tasks {
        let edges: usize = task.sub_tasks.iter().map(|s| s.predecessors.len()).sum();
        println!(
            "user {} task: {} sub-tasks, {} edges, {:.1} MB input",
            task.owner_user,
            task.real_count(),
            edges,
            task.total_input_bits() / 8e6
        );
    }
    match args.next() {
        Some(path) => scenario.save(&path)?,
        None => print!("{}", scenario.to_toml_string()?),
    }
    Ok(())
}
