use std::path::Path;

use proptest::prelude::*;
use uavoffload::error::Error;
use uavoffload::experiments::{
    emit_plot_data, read_results, run_experiment, summarize, write_results, write_summary, ExperimentSpec, Figure,
    ResultRow,
};

const AGENTS_SPEC: &str = r#"
id = "agents-mini"
replications = 30
base_seed = 4

[scenario]
source = "generate"
scenario_seed = 1
params = { uav_count = 3, task = { subtasks = 3 } }

[axis]
name = "agents"
values = [50, 100, 200]

[[schemes]]
solver = "dwoa"
allocator = "proportional"

[solver]
max_iter = 3
"#;

fn spec(toml: &str) -> ExperimentSpec {
    ExperimentSpec::from_toml_str(toml).unwrap()
}

#[test]
fn agents_sweep_writes_every_cell_and_trace() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_experiment(&spec(AGENTS_SPEC), dir.path()).unwrap();
    assert_eq!(out.rows.len(), 90);
    let traces = std::fs::read_dir(dir.path().join("traces")).unwrap().count();
    assert_eq!(traces, 90);
    for name in ["results.csv", "manifest.json", "timings.csv"] {
        assert!(dir.path().join(name).is_file(), "{name}");
    }
    let rows = read_results(dir.path().join("results.csv")).unwrap();
    assert_eq!(rows, out.rows);
    assert!(rows.iter().all(|r| r.error.is_empty() && r.uav_energy().len() == 3));

    let plots = tempfile::tempdir().unwrap();
    let files = emit_plot_data(dir.path(), Figure::Convergence, plots.path()).unwrap();
    assert_eq!(files.len(), 3);
    assert!(matches!(
        emit_plot_data(dir.path(), Figure::RateVsUsers, plots.path()),
        Err(Error::MissingCoverage(_))
    ));
}

#[test]
fn failing_cell_becomes_error_row() {
    let toml = r#"
id = "too-big"
seeds = [1, 2]

[scenario]
source = "generate"
params = { uav_count = 4, task = { subtasks = 10 } }

[axis]
name = "subtasks"
values = [2, 12]

[[schemes]]
solver = "exhaustive"
allocator = "equal"

[solver]
state_cap = 100000
"#;
    let dir = tempfile::tempdir().unwrap();
    let out = run_experiment(&spec(toml), dir.path()).unwrap();
    assert_eq!(out.rows.len(), 4);
    let (bad, good): (Vec<&ResultRow>, Vec<&ResultRow>) = out.rows.iter().partition(|r| r.axis_value == "12");
    assert!(bad.iter().all(|r| !r.error.is_empty() && r.objective_s.is_none()));
    assert!(good.iter().all(|r| r.error.is_empty() && r.objective_s.is_some()));
    let summary = summarize(&out.rows).unwrap();
    let big = summary.rows.iter().find(|r| r.axis_value == "12").unwrap();
    assert_eq!((big.runs, big.errors), (2, 2));
}

#[test]
fn summary_of_identical_rows_has_no_spread() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_experiment(&spec(AGENTS_SPEC), dir.path()).unwrap();
    let row = out.rows[0].clone();
    let rows: Vec<ResultRow> = (0..5).map(|k| ResultRow { seed: k, ..row.clone() }).collect();
    let s = summarize(&rows).unwrap();
    assert_eq!(s.rows.len(), 1);
    let r = &s.rows[0];
    assert_eq!(r.runs, 5);
    assert_eq!(r.min_s, r.max_s);
    assert_eq!(r.mean_s, r.median_s);
    write_summary(&s, dir.path()).unwrap();
    assert!(dir.path().join("summary.csv").is_file());
    assert!(matches!(summarize(&[]), Err(Error::EmptyInput(_))));
}

#[test]
fn limited_vs_unlimited_needs_both_modes() {
    let toml = r#"
id = "subtasks-limited"
seeds = [1]

[scenario]
source = "generate"
params = { uav_count = 2 }

[axis]
name = "subtasks"
values = [2, 3]

[[schemes]]
solver = "associated"
allocator = "optimal"
"#;
    let dir = tempfile::tempdir().unwrap();
    run_experiment(&spec(toml), dir.path()).unwrap();
    let plots = tempfile::tempdir().unwrap();
    assert!(emit_plot_data(dir.path(), Figure::LatencyVsSubtasks, plots.path()).is_ok());
    assert!(matches!(
        emit_plot_data(dir.path(), Figure::LimitedVsUnlimited, plots.path()),
        Err(Error::MissingCoverage(_))
    ));
}

fn arb_row() -> impl Strategy<Value = ResultRow> {
    (
        any::<u64>(),
        prop::option::of(0.0f64..1e4),
        prop::option::of(any::<bool>()),
        prop::collection::vec(0.0f64..1e5, 0..5),
        "[a-z0-9 ,\"]{0,12}",
    )
        .prop_map(|(seed, obj, feasible, energy, error)| ResultRow {
            experiment: "e".into(),
            axis: "users".into(),
            axis_value: "4".into(),
            seed,
            scheme: "dwoa-optimal".into(),
            solver: "dwoa".into(),
            allocator: "optimal".into(),
            penalty_mode: "penalty".into(),
            energy_mode: "limited".into(),
            lambda: 0.1,
            agents: 100,
            objective_s: obj,
            penalized_s: obj,
            computation_s: obj,
            distributed_s: obj.map(|_| 0.0),
            comm_latency_s: obj,
            mean_rate_bps: obj,
            uav_energy_j: energy.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(";"),
            feasible,
            trace_file: String::new(),
            error,
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn results_csv_round_trips(rows in prop::collection::vec(arb_row(), 1..8)) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("results.csv");
        write_results(&rows, &path).unwrap();
        prop_assert_eq!(read_results(Path::new(&path)).unwrap(), rows);
    }
}
