//! Runs a small sweep from an inline spec, summarizes it and emits plot data.
//!
//! `cargo run --example run_sweep -- [out_dir]`

use std::path::PathBuf;

use uavoffload::experiments::{emit_plot_data, run_experiment, summarize, write_summary, ExperimentSpec, Figure};

const SPEC: &str = r#"
id = "users-demo"
replications = 3

[scenario]
source = "generate"
params = { task = { subtasks = 6 }, active = { kind = "per_uav", fraction = 0.5 } }

[axis]
name = "users"
values = [2, 4, 6]

[[schemes]]
solver = "associated"
allocator = "optimal"

[[schemes]]
solver = "associated"
allocator = "equal"
"#;

fn main() -> uavoffload::Result<()> {
    let out: PathBuf = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("uavdag-run-sweep"));
    let spec = ExperimentSpec::from_toml_str(SPEC)?;
    let outcome = run_experiment(&spec, &out)?;
    let summary = summarize(&outcome.rows)?;
    write_summary(&summary, &out)?;
    for r in &summary.rows {
        println!("users {:>2} {:<20} median {:.3} s", r.axis_value, r.scheme, r.median_s);
    }
    for i in &summary.improvements {
        println!(
            "users {:>2}: {} vs {} {:.1}%",
            i.axis_value, i.scheme_a, i.scheme_b, i.improvement_pct
        );
    }
    let files = emit_plot_data(&out, Figure::LatencyVsUsers, &out.join("plots"))?;
    println!("{} rows and {} series files under {}", outcome.rows.len(), files.len(), out.display());
    Ok(())
}
