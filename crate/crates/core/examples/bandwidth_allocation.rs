//! Compares the three bandwidth allocators on mean upload latency as the
//! number of users per UAV grows.

use uavoffload::evaluator::{evaluate, EvalOptions};
use uavoffload::scenario::{generate_scenario, ActiveUsers, ScenarioParams};
use uavoffload::solvers::{allocate, associated_decision, Allocator};

fn main() -> uavoffload::Result<()> {
    let allocators = [Allocator::Optimal, Allocator::Proportional, Allocator::Equal];
    println!("users  optimal  proportional  equal   (mean upload, s)");
    for n in 2..=10 {
        let mut p = ScenarioParams::default();
        p.users_per_uav = [n, n];
        p.active = ActiveUsers::PerUav { fraction: 0.5 };
        let s = generate_scenario(5, &p)?;
        let x = associated_decision(&s);
        let mut cols = Vec::new();
        for kind in allocators {
            let beta = allocate(kind, &s, &x)?;
            let r = evaluate(&x, &beta, &s, EvalOptions::default())?;
            cols.push(r.tasks.iter().map(|t| t.upload_s).sum::<f64>() / r.tasks.len() as f64);
        }
        println!("{n:>5}  {:>7.3}  {:>12.3}  {:>5.3}", cols[0], cols[1], cols[2]);
    }
    Ok(())
}
