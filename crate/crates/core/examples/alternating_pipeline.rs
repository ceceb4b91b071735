//! Alternates whale search and closed-form allocation, then compares the
//! result with the no-collaboration baseline.

use uavoffload::scenario::{generate_scenario, ScenarioParams};
use uavoffload::solvers::{solve_scheme, SchemeConfig, SolverKind};

fn main() -> uavoffload::Result<()> {
    let s = generate_scenario(10, &ScenarioParams::default())?;
    let mut cfg = SchemeConfig::default();
    cfg.woa.seed = 3;
    let ours = solve_scheme(&s, &cfg)?;
    for (round, v) in ours.outer_trace.iter().enumerate() {
        println!("round {round}: {v:.4} s");
    }
    cfg.solver = SolverKind::Associated;
    let base = solve_scheme(&s, &cfg)?;
    println!(
        "collaborative {:.4} s, associated {:.4} s, improvement {:.1}%",
        ours.objective_s,
        base.objective_s,
        (base.objective_s - ours.objective_s) / base.objective_s * 100.0
    );
    println!("{}", ours.to_json()?);
    Ok(())
}
