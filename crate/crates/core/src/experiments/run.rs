use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::spec::{Axis, ExperimentSpec, ScenarioSource, Scheme};
use crate::error::Result;
use crate::evaluator::{decision_latency_breakdown, EnergyMode, EvalOptions, Evaluator, PenaltyConfig, PenaltyMode};
use crate::scenario::{generate_scenario, Scenario};
use crate::solvers::{solve_scheme, SchemeConfig, SolverRun, WoaConfig};

/// One line of `results.csv`. Numeric fields are empty when the cell failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub experiment: String,
    pub axis: String,
    pub axis_value: String,
    pub seed: u64,
    pub scheme: String,
    pub solver: String,
    pub allocator: String,
    pub penalty_mode: String,
    pub energy_mode: String,
    pub lambda: f64,
    pub agents: usize,
    pub objective_s: Option<f64>,
    pub penalized_s: Option<f64>,
    pub computation_s: Option<f64>,
    pub distributed_s: Option<f64>,
    /// Mean whole-task upload latency.
    pub comm_latency_s: Option<f64>,
    /// Mean uplink rate of the active users.
    pub mean_rate_bps: Option<f64>,
    /// Per-UAV total energy, `;`-separated in UAV order.
    pub uav_energy_j: String,
    pub feasible: Option<bool>,
    pub trace_file: String,
    pub error: String,
}

impl ResultRow {
    pub fn uav_energy(&self) -> Vec<f64> {
        self.uav_energy_j
            .split(';')
            .filter(|s| !s.is_empty())
            .filter_map(|s| s.parse().ok())
            .collect()
    }
}

/// Written next to the results; `spec` is self-contained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub software: String,
    pub version: String,
    pub spec: ExperimentSpec,
    pub rows: usize,
}

impl Manifest {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub dir: PathBuf,
    pub rows: Vec<ResultRow>,
}

impl ExperimentOutcome {
    pub fn any_feasible(&self) -> bool {
        self.rows.iter().any(|r| r.feasible == Some(true))
    }
}

struct Cell {
    axis_index: usize,
    seed: u64,
    scheme: Scheme,
}

fn cell_config(spec: &ExperimentSpec, cell: &Cell) -> (SchemeConfig, Scheme) {
    let s = &spec.solver;
    let mut scheme = cell.scheme;
    let mut woa = WoaConfig {
        agents: s.agents,
        max_iter: s.max_iter,
        spiral_b: s.spiral_b,
        penalty: PenaltyConfig {
            lambda: s.lambda,
            mode: scheme.penalty_mode,
        },
        seed: cell.seed,
    };
    let i = cell.axis_index;
    match &spec.axis {
        Axis::Agents(v) => woa.agents = v[i],
        Axis::PenaltyLambda(v) => woa.penalty.lambda = v[i],
        Axis::EnergyMode(v) => scheme.energy_mode = v[i],
        Axis::Allocator(v) => scheme.allocator = v[i],
        Axis::Solver(v) => scheme.solver = v[i],
        Axis::Users(_) | Axis::Subtasks(_) => {}
    }
    let cfg = SchemeConfig {
        solver: scheme.solver,
        allocator: scheme.allocator,
        woa,
        eval: EvalOptions {
            upload_model: s.upload_model,
            energy_mode: scheme.energy_mode,
        },
        max_outer: s.max_outer,
        tol: s.tol,
        state_cap: s.state_cap,
    };
    (cfg, scheme)
}

fn cell_scenario(spec: &ExperimentSpec, fixed: Option<&Scenario>, cell: &Cell) -> Result<Scenario> {
    if let Some(s) = fixed {
        return Ok(s.clone());
    }
    let ScenarioSource::Generate { params, scenario_seed } = &spec.scenario else {
        unreachable!("non-generated sources are loaded once");
    };
    let mut params = params.clone();
    match &spec.axis {
        Axis::Users(v) => params.users_per_uav = [v[cell.axis_index]; 2],
        Axis::Subtasks(v) => params.task.subtasks = v[cell.axis_index],
        _ => {}
    }
    generate_scenario(scenario_seed.unwrap_or(cell.seed), &params)
}

struct Metrics {
    computation_s: f64,
    distributed_s: f64,
    comm_latency_s: f64,
    mean_rate_bps: f64,
    uav_energy_j: String,
}

fn metrics(scenario: &Scenario, run: &SolverRun, eval: EvalOptions) -> Result<Metrics> {
    let ev = Evaluator::new(scenario, &run.beta, eval)?;
    let r = ev.evaluate(&run.decision)?;
    let split = decision_latency_breakdown(&r);
    let n = r.tasks.len().max(1) as f64;
    Ok(Metrics {
        computation_s: split.computation_s,
        distributed_s: split.distributed_s,
        comm_latency_s: r.tasks.iter().map(|t| t.upload_s).sum::<f64>() / n,
        mean_rate_bps: ev.links().uplink_bps.iter().sum::<f64>() / n,
        uav_energy_j: r
            .energy
            .uavs
            .iter()
            .map(|e| e.total_j.to_string())
            .collect::<Vec<_>>()
            .join(";"),
    })
}

fn mode_name(m: PenaltyMode) -> &'static str {
    match m {
        PenaltyMode::Penalty => "penalty",
        PenaltyMode::Hard => "hard",
    }
}

fn energy_name(m: EnergyMode) -> &'static str {
    match m {
        EnergyMode::Limited => "limited",
        EnergyMode::Unlimited => "unlimited",
    }
}

fn write_trace(path: &Path, trace: &[f64]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["iteration", "best_penalized_s"])?;
    for (i, v) in trace.iter().enumerate() {
        w.write_record([(i + 1).to_string(), v.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

fn run_cell(
    spec: &ExperimentSpec,
    fixed: Option<&Scenario>,
    cell: &Cell,
    traces: &Path,
) -> (ResultRow, f64) {
    let started = Instant::now();
    let (cfg, scheme) = cell_config(spec, cell);
    let axis_value = spec.axis.label(cell.axis_index);
    let label = scheme.label();
    let trace_name = format!("{axis_value}_{label}_{}.csv", cell.seed);
    let mut row = ResultRow {
        experiment: spec.id.clone(),
        axis: spec.axis.name().to_string(),
        axis_value,
        seed: cell.seed,
        scheme: label,
        solver: scheme.solver.name().to_string(),
        allocator: scheme.allocator.name().to_string(),
        penalty_mode: mode_name(scheme.penalty_mode).to_string(),
        energy_mode: energy_name(scheme.energy_mode).to_string(),
        lambda: cfg.woa.penalty.lambda,
        agents: cfg.woa.agents,
        objective_s: None,
        penalized_s: None,
        computation_s: None,
        distributed_s: None,
        comm_latency_s: None,
        mean_rate_bps: None,
        uav_energy_j: String::new(),
        feasible: None,
        trace_file: String::new(),
        error: String::new(),
    };
    let outcome = (|| -> Result<()> {
        let scenario = cell_scenario(spec, fixed, cell)?;
        let run = solve_scheme(&scenario, &cfg)?;
        let m = metrics(&scenario, &run, cfg.eval)?;
        write_trace(&traces.join(&trace_name), &run.trace)?;
        row.objective_s = Some(run.objective_s);
        row.penalized_s = Some(run.penalized_s);
        row.computation_s = Some(m.computation_s);
        row.distributed_s = Some(m.distributed_s);
        row.comm_latency_s = Some(m.comm_latency_s);
        row.mean_rate_bps = Some(m.mean_rate_bps);
        row.uav_energy_j = m.uav_energy_j;
        row.feasible = Some(run.feasible);
        row.trace_file = format!("traces/{trace_name}");
        Ok(())
    })();
    if let Err(e) = outcome {
        row.error = e.to_string();
    }
    (row, started.elapsed().as_secs_f64())
}

pub fn write_results(rows: &[ResultRow], path: impl AsRef<Path>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_results(path: impl AsRef<Path>) -> Result<Vec<ResultRow>> {
    let mut r = csv::Reader::from_path(path)?;
    Ok(r.deserialize().collect::<std::result::Result<Vec<ResultRow>, _>>()?)
}

/// Runs every cell and writes the result files under `out_dir`. Failed
/// cells become rows with a non-empty `error`.
pub fn run_experiment(spec: &ExperimentSpec, out_dir: &Path) -> Result<ExperimentOutcome> {
    spec.validate()?;
    let resolved = spec.resolved()?;
    let fixed = match &resolved.scenario {
        ScenarioSource::Inline { scenario } => Some(scenario.as_ref().clone()),
        ScenarioSource::Generate {
            params,
            scenario_seed: Some(seed),
        } if !matches!(resolved.axis, Axis::Users(_) | Axis::Subtasks(_)) => Some(generate_scenario(*seed, params)?),
        ScenarioSource::Generate { .. } => None,
        ScenarioSource::File { .. } => unreachable!("resolved specs inline file scenarios"),
    };
    let traces = out_dir.join("traces");
    fs::create_dir_all(&traces)?;

    let seeds = resolved.run_seeds();
    let mut schemes: Vec<(String, Scheme)> = resolved.schemes.iter().map(|s| (s.label(), *s)).collect();
    schemes.sort_by(|a, b| a.0.cmp(&b.0));
    schemes.dedup_by(|a, b| a.0 == b.0);
    let mut order: Vec<u64> = seeds.clone();
    order.sort_unstable();
    let cells: Vec<Cell> = (0..resolved.axis.len())
        .flat_map(|axis_index| {
            let schemes = &schemes;
            order.iter().flat_map(move |&seed| {
                schemes.iter().map(move |(_, scheme)| Cell {
                    axis_index,
                    seed,
                    scheme: *scheme,
                })
            })
        })
        .collect();

    let done: Vec<(ResultRow, f64)> = cells
        .par_iter()
        .map(|c| run_cell(&resolved, fixed.as_ref(), c, &traces))
        .collect();
    let rows: Vec<ResultRow> = done.iter().map(|(r, _)| r.clone()).collect();

    write_results(&rows, out_dir.join("results.csv"))?;
    let mut t = csv::Writer::from_path(out_dir.join("timings.csv"))?;
    t.write_record(["axis_value", "seed", "scheme", "wall_time_s"])?;
    for (r, secs) in &done {
        t.write_record([r.axis_value.clone(), r.seed.to_string(), r.scheme.clone(), secs.to_string()])?;
    }
    t.flush()?;
    let manifest = Manifest {
        software: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        spec: ExperimentSpec {
            output_dir: None,
            ..resolved
        },
        rows: rows.len(),
    };
    fs::write(out_dir.join("manifest.json"), serde_json::to_string_pretty(&manifest)? + "\n")?;
    Ok(ExperimentOutcome {
        dir: out_dir.to_path_buf(),
        rows,
    })
}

/// Groups rows by a key while keeping first-appearance order.
pub(crate) fn group_by<'a, T, K: Ord + Clone>(rows: &'a [T], key: impl Fn(&T) -> K) -> Vec<(K, Vec<&'a T>)> {
    let mut index: BTreeMap<K, usize> = BTreeMap::new();
    let mut out: Vec<(K, Vec<&T>)> = Vec::new();
    for r in rows {
        let k = key(r);
        let i = *index.entry(k.clone()).or_insert_with(|| {
            out.push((k, Vec::new()));
            out.len() - 1
        });
        out[i].1.push(r);
    }
    out
}

