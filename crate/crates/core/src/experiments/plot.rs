//! Tidy series files for plotting. Nothing is drawn here.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::run::{group_by, read_results, ResultRow};
use super::summary::median;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Figure {
    Convergence,
    LatencyBars,
    EnergyBars,
    RateVsUsers,
    LatencyVsUsers,
    LatencyVsSubtasks,
    LimitedVsUnlimited,
    PenaltyFactors,
}

impl Figure {
    pub const ALL: [Figure; 8] = [
        Figure::Convergence,
        Figure::LatencyBars,
        Figure::EnergyBars,
        Figure::RateVsUsers,
        Figure::LatencyVsUsers,
        Figure::LatencyVsSubtasks,
        Figure::LimitedVsUnlimited,
        Figure::PenaltyFactors,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Figure::Convergence => "convergence",
            Figure::LatencyBars => "latency-bars",
            Figure::EnergyBars => "energy-bars",
            Figure::RateVsUsers => "rate-vs-users",
            Figure::LatencyVsUsers => "latency-vs-users",
            Figure::LatencyVsSubtasks => "latency-vs-subtasks",
            Figure::LimitedVsUnlimited => "limited-vs-unlimited",
            Figure::PenaltyFactors => "penalty-factors",
        }
    }

    /// Axis the results must sweep, if any.
    fn required_axis(self) -> Option<&'static str> {
        match self {
            Figure::Convergence => Some("agents"),
            Figure::RateVsUsers | Figure::LatencyVsUsers => Some("users"),
            Figure::LatencyVsSubtasks | Figure::LimitedVsUnlimited => Some("subtasks"),
            Figure::PenaltyFactors => Some("penalty_lambda"),
            Figure::LatencyBars | Figure::EnergyBars => None,
        }
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Figure {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Figure::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown figure {s:?}")))
    }
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn values(rows: &[&ResultRow], f: impl Fn(&ResultRow) -> Option<f64>) -> Vec<f64> {
    rows.iter().filter_map(|r| f(r)).collect()
}

struct SeriesWriter {
    dir: PathBuf,
    written: Vec<PathBuf>,
}

impl SeriesWriter {
    fn write(&mut self, name: &str, header: &[&str], records: Vec<Vec<String>>) -> Result<()> {
        let path = self.dir.join(format!("{name}.csv"));
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(header)?;
        for r in records {
            w.write_record(r)?;
        }
        w.flush()?;
        self.written.push(path);
        Ok(())
    }
}

/// Sorts numeric axis values numerically and everything else lexically.
fn axis_sorted<'a>(mut g: Vec<(String, Vec<&'a ResultRow>)>) -> Vec<(String, Vec<&'a ResultRow>)> {
    g.sort_by(|a, b| match (a.0.parse::<f64>(), b.0.parse::<f64>()) {
        (Ok(x), Ok(y)) => x.total_cmp(&y),
        _ => a.0.cmp(&b.0),
    });
    g
}

fn read_trace(path: &Path) -> Result<Vec<f64>> {
    let mut r = csv::Reader::from_path(path)?;
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let v: f64 = rec
            .get(1)
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::InvalidParameter(format!("malformed trace {}", path.display())))?;
        out.push(v);
    }
    Ok(out)
}

/// Writes the series of `figure` into `out_dir/<figure>/`, reading
/// `results.csv` (and, for convergence, the traces) from `results_dir`.
pub fn emit_plot_data(results_dir: &Path, figure: Figure, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let rows = read_results(results_dir.join("results.csv"))?;
    let ok: Vec<ResultRow> = rows.into_iter().filter(|r| r.error.is_empty()).collect();
    if ok.is_empty() {
        return Err(Error::MissingCoverage(format!("{figure}: no successful rows")));
    }
    if let Some(axis) = figure.required_axis() {
        if ok.iter().any(|r| r.axis != axis) {
            return Err(Error::MissingCoverage(format!("{figure} needs a sweep over {axis}")));
        }
    }
    let dir = out_dir.join(figure.name());
    std::fs::create_dir_all(&dir)?;
    let mut out = SeriesWriter {
        dir,
        written: Vec::new(),
    };
    let axis = ok[0].axis.clone();
    let num = |v: f64| v.to_string();

    match figure {
        Figure::Convergence => {
            for ((value, scheme), group) in group_by(&ok, |r| (r.axis_value.clone(), r.scheme.clone())) {
                let traces = group
                    .iter()
                    .map(|r| read_trace(&results_dir.join(&r.trace_file)))
                    .collect::<Result<Vec<_>>>()?;
                let len = traces.iter().map(Vec::len).max().unwrap_or(0);
                let mut records = Vec::with_capacity(len);
                for i in 0..len {
                    let mut col: Vec<f64> = traces
                        .iter()
                        .filter_map(|t| t.get(i).or(t.last()).copied())
                        .collect();
                    let m = mean(&col);
                    let lo = col.iter().copied().fold(f64::INFINITY, f64::min);
                    let hi = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                    records.push(vec![(i + 1).to_string(), num(median(&mut col)), num(m), num(lo), num(hi)]);
                }
                out.write(
                    &format!("{axis}-{value}_{scheme}"),
                    &["iteration", "median_s", "mean_s", "min_s", "max_s"],
                    records,
                )?;
            }
        }
        Figure::LatencyBars => {
            for ((value, scheme), group) in group_by(&ok, |r| (r.axis_value.clone(), r.scheme.clone())) {
                let records = [
                    ("computation", values(&group, |r| r.computation_s)),
                    ("distributed", values(&group, |r| r.distributed_s)),
                    ("total", values(&group, |r| r.objective_s)),
                ]
                .into_iter()
                .map(|(k, v)| vec![k.to_string(), num(mean(&v))])
                .collect();
                out.write(&format!("{axis}-{value}_{scheme}"), &["component", "mean_s"], records)?;
            }
        }
        Figure::EnergyBars => {
            for ((value, scheme), group) in group_by(&ok, |r| (r.axis_value.clone(), r.scheme.clone())) {
                let per_run: Vec<Vec<f64>> = group.iter().map(|r| r.uav_energy()).collect();
                let uavs = per_run.iter().map(Vec::len).min().unwrap_or(0);
                let records = (0..uavs)
                    .map(|v| {
                        let col: Vec<f64> = per_run.iter().map(|e| e[v]).collect();
                        vec![v.to_string(), num(mean(&col))]
                    })
                    .collect();
                out.write(&format!("{axis}-{value}_{scheme}"), &["uav", "mean_energy_j"], records)?;
            }
        }
        Figure::RateVsUsers | Figure::LatencyVsUsers | Figure::LatencyVsSubtasks => {
            for (scheme, group) in group_by(&ok, |r| r.scheme.clone()) {
                let owned: Vec<ResultRow> = group.into_iter().cloned().collect();
                let mut records = Vec::new();
                for (value, cell) in axis_sorted(group_by(&owned, |r| r.axis_value.clone())) {
                    let mut obj = values(&cell, |r| r.objective_s);
                    let rec = match figure {
                        Figure::RateVsUsers => vec![value, num(mean(&values(&cell, |r| r.mean_rate_bps)))],
                        Figure::LatencyVsUsers => vec![
                            value,
                            num(mean(&values(&cell, |r| r.comm_latency_s))),
                            num(mean(&obj)),
                        ],
                        _ => vec![
                            value,
                            num(mean(&obj)),
                            num(median(&mut obj)),
                            num(mean(&values(&cell, |r| r.computation_s))),
                        ],
                    };
                    records.push(rec);
                }
                let header: &[&str] = match figure {
                    Figure::RateVsUsers => &["users", "mean_rate_bps"],
                    Figure::LatencyVsUsers => &["users", "mean_comm_latency_s", "mean_objective_s"],
                    _ => &["subtasks", "mean_objective_s", "median_objective_s", "mean_computation_s"],
                };
                out.write(&scheme, header, records)?;
            }
        }
        Figure::LimitedVsUnlimited => {
            let modes: Vec<&str> = ok.iter().map(|r| r.energy_mode.as_str()).collect();
            if !modes.contains(&"limited") || !modes.contains(&"unlimited") {
                return Err(Error::MissingCoverage(format!(
                    "{figure} needs both limited and unlimited energy rows"
                )));
            }
            for (scheme, group) in group_by(&ok, |r| r.scheme.clone()) {
                let owned: Vec<ResultRow> = group.into_iter().cloned().collect();
                let records = axis_sorted(group_by(&owned, |r| r.axis_value.clone()))
                    .into_iter()
                    .map(|(value, cell)| {
                        let mut obj = values(&cell, |r| r.objective_s);
                        let feasible = cell.iter().filter(|r| r.feasible == Some(true)).count() as f64;
                        vec![
                            value,
                            num(median(&mut obj)),
                            num(mean(&obj)),
                            num(feasible / cell.len() as f64),
                        ]
                    })
                    .collect();
                out.write(
                    &scheme,
                    &["subtasks", "median_objective_s", "mean_objective_s", "feasible_rate"],
                    records,
                )?;
            }
        }
        Figure::PenaltyFactors => {
            let header = ["seed", "objective_s", "penalized_s", "feasible"];
            let record = |r: &ResultRow| {
                vec![
                    r.seed.to_string(),
                    r.objective_s.map(num).unwrap_or_default(),
                    r.penalized_s.map(num).unwrap_or_default(),
                    r.feasible.map(|f| f.to_string()).unwrap_or_default(),
                ]
            };
            let (hard, soft): (Vec<ResultRow>, Vec<ResultRow>) =
                ok.iter().cloned().partition(|r| r.penalty_mode == "hard");
            for ((value, scheme), group) in group_by(&soft, |r| (r.axis_value.clone(), r.scheme.clone())) {
                out.write(
                    &format!("lambda-{value}_{scheme}"),
                    &header,
                    group.iter().map(|r| record(r)).collect(),
                )?;
            }
            for (scheme, group) in group_by(&hard, |r| r.scheme.clone()) {
                // λ has no effect in hard mode: keep one run per seed
                let first = group[0].axis_value.clone();
                out.write(
                    &format!("hard_{scheme}"),
                    &header,
                    group.iter().filter(|r| r.axis_value == first).map(|r| record(r)).collect(),
                )?;
            }
        }
    }
    Ok(out.written)
}
