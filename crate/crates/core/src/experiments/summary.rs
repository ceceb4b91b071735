use std::path::Path;

use serde::{Deserialize, Serialize};

use super::run::{group_by, ResultRow};
use crate::error::{Error, Result};

/// Statistics of the objective over the seeds of one (axis value, scheme).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub axis_value: String,
    pub scheme: String,
    pub runs: usize,
    pub errors: usize,
    pub feasible_rate: f64,
    pub median_s: f64,
    pub mean_s: f64,
    pub min_s: f64,
    pub max_s: f64,
}

/// How much better scheme `a` is than scheme `b` at one axis value, as a
/// percentage of `b`'s mean objective.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Improvement {
    pub axis_value: String,
    pub scheme_a: String,
    pub scheme_b: String,
    pub mean_a_s: f64,
    pub mean_b_s: f64,
    pub improvement_pct: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub rows: Vec<SummaryRow>,
    pub improvements: Vec<Improvement>,
}

/// `(b − a) / b` in percent.
pub fn improvement_pct(a: f64, b: f64) -> f64 {
    (b - a) / b * 100.0
}

pub(crate) fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

pub fn summarize(rows: &[ResultRow]) -> Result<Summary> {
    if rows.is_empty() {
        return Err(Error::EmptyInput("no result rows to summarize".into()));
    }
    let mut out = Vec::new();
    for ((axis_value, scheme), group) in group_by(rows, |r| (r.axis_value.clone(), r.scheme.clone())) {
        let mut obj: Vec<f64> = group.iter().filter_map(|r| r.objective_s).collect();
        let ok = obj.len();
        let feasible = group.iter().filter(|r| r.feasible == Some(true)).count();
        let (median_s, mean_s, min_s, max_s) = if ok == 0 {
            (f64::NAN, f64::NAN, f64::NAN, f64::NAN)
        } else {
            let mean = obj.iter().sum::<f64>() / ok as f64;
            let min = obj.iter().copied().fold(f64::INFINITY, f64::min);
            let max = obj.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            (median(&mut obj), mean, min, max)
        };
        out.push(SummaryRow {
            axis_value,
            scheme,
            runs: group.len(),
            errors: group.len() - ok,
            feasible_rate: feasible as f64 / group.len() as f64,
            median_s,
            mean_s,
            min_s,
            max_s,
        });
    }
    let mut improvements = Vec::new();
    for (axis_value, group) in group_by(&out, |r| r.axis_value.clone()) {
        for a in group.iter().filter(|r| !r.mean_s.is_nan()) {
            for b in group.iter().filter(|r| !r.mean_s.is_nan()) {
                if a.scheme != b.scheme {
                    improvements.push(Improvement {
                        axis_value: axis_value.clone(),
                        scheme_a: a.scheme.clone(),
                        scheme_b: b.scheme.clone(),
                        mean_a_s: a.mean_s,
                        mean_b_s: b.mean_s,
                        improvement_pct: improvement_pct(a.mean_s, b.mean_s),
                    });
                }
            }
        }
    }
    Ok(Summary { rows: out, improvements })
}

/// Writes `summary.csv` and `improvements.csv` into `dir`.
pub fn write_summary(summary: &Summary, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;
    let mut w = csv::Writer::from_path(dir.join("summary.csv"))?;
    for r in &summary.rows {
        w.serialize(r)?;
    }
    w.flush()?;
    let mut w = csv::Writer::from_path(dir.join("improvements.csv"))?;
    for r in &summary.improvements {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn percentage_convention() {
        assert!((improvement_pct(8286.0, 18186.0) - 54.4375).abs() < 1e-3);
        assert!((improvement_pct(8286.0, 10248.0) - 19.1452).abs() < 1e-3);
    }
}
