//! Schedule evaluation: the fitness function shared by every solver.
//!
//! For each task the sub-tasks are visited in topological order. A sub-task
//! arrives once its input has been uploaded (and forwarded, if it runs away
//! from home), becomes ready when every predecessor has finished and shipped
//! its dependency payload, and starts at the ready time. Compute contention
//! is modelled only through the static shares of [`compute_shares`].

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::channel::BandwidthAllocation;
use crate::error::{Error, Result};
use crate::scenario::{Scenario, UavNode};
use crate::timing::{
    check_energy_feasible, compute_shares, dependency_latency, energy_ledger, exec_latency,
    transfer_latencies, EnergyCheck, EnergyLedger, Links, Placement,
};

/// One executing UAV per real sub-task, flattened task-major in `scenario.tasks`
/// order and, within a task, in `sub_tasks` order with the dummy skipped.
/// Entries are zero-based UAV ids.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OffloadDecision(pub Vec<usize>);

impl OffloadDecision {
    pub fn assignments(&self) -> &[usize] {
        &self.0
    }

    pub fn validate(&self, scenario: &Scenario) -> Result<()> {
        let m = scenario.decision_len();
        if self.0.len() != m {
            return Err(Error::InvalidDecision(format!(
                "decision has {} entries, scenario needs {m}",
                self.0.len()
            )));
        }
        let v = scenario.uav_count();
        if let Some(bad) = self.0.iter().find(|&&x| x >= v) {
            return Err(Error::InvalidDecision(format!("UAV {bad} does not exist")));
        }
        Ok(())
    }

    pub fn placement(&self, scenario: &Scenario) -> Placement {
        let mut it = self.0.iter().copied();
        scenario
            .tasks
            .iter()
            .map(|t| {
                t.sub_tasks
                    .iter()
                    .map(|st| if st.is_dummy { None } else { it.next() })
                    .collect()
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum UploadModel {
    /// Inputs share one uplink and go up one after another in topological order.
    #[default]
    Cumulative,
    /// Every input is uploaded on its own, all starting at release.
    Independent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum EnergyMode {
    #[default]
    Limited,
    Unlimited,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct EvalOptions {
    pub upload_model: UploadModel,
    pub energy_mode: EnergyMode,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubTaskTiming {
    pub index: usize,
    /// `None` for the dummy, which stays with the user.
    pub uav: Option<usize>,
    pub arrival_s: f64,
    pub ready_s: f64,
    pub start_s: f64,
    pub finish_s: f64,
    pub exec_s: f64,
    pub upload_s: f64,
    pub forward_s: f64,
    pub share_cycles_per_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskSchedule {
    pub owner_user: usize,
    pub home_uav: usize,
    pub sub_tasks: Vec<SubTaskTiming>,
    /// Last finish minus the dummy start.
    pub makespan_s: f64,
    /// Whole-task upload latency.
    pub upload_s: f64,
    /// Inter-UAV transfer time along the critical path.
    pub distributed_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleResult {
    pub tasks: Vec<TaskSchedule>,
    pub energy: EnergyLedger,
    pub energy_checks: Vec<EnergyCheck>,
    pub energy_limited: bool,
    /// Mean over tasks of makespan plus upload latency.
    pub objective_s: f64,
    pub feasible: bool,
}

/// Precomputed links and orders for repeated evaluation against one
/// `(scenario, β)` pair.
pub struct Evaluator<'a> {
    scenario: &'a Scenario,
    links: Links,
    orders: Vec<Vec<usize>>,
    options: EvalOptions,
}

impl<'a> Evaluator<'a> {
    pub fn new(scenario: &'a Scenario, beta: &BandwidthAllocation, options: EvalOptions) -> Result<Self> {
        let links = Links::new(scenario, beta)?;
        let orders = scenario
            .tasks
            .iter()
            .map(|t| t.topological_order())
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            scenario,
            links,
            orders,
            options,
        })
    }

    pub fn scenario(&self) -> &Scenario {
        self.scenario
    }

    pub fn links(&self) -> &Links {
        &self.links
    }

    pub fn options(&self) -> EvalOptions {
        self.options
    }

    pub fn evaluate(&self, decision: &OffloadDecision) -> Result<ScheduleResult> {
        let scenario = self.scenario;
        decision.validate(scenario)?;
        let placement = decision.placement(scenario);
        let shares = compute_shares(&placement, scenario);
        let transfers = transfer_latencies(&placement, &self.links, scenario)?;

        let mut tasks = Vec::with_capacity(scenario.tasks.len());
        let mut exec_all = Vec::with_capacity(scenario.tasks.len());
        for (t, task) in scenario.tasks.iter().enumerate() {
            let n = task.sub_tasks.len();
            let rel = task.release_time_s;
            let mut timing = vec![None::<SubTaskTiming>; n];
            let mut exec = vec![0.0; n];
            let mut uploaded = 0.0;
            for &j in &self.orders[t] {
                let st = &task.sub_tasks[j];
                let x = placement[t][j];
                if st.is_dummy {
                    timing[j] = Some(SubTaskTiming {
                        index: j,
                        uav: None,
                        arrival_s: rel,
                        ready_s: rel,
                        start_s: rel,
                        finish_s: rel,
                        exec_s: 0.0,
                        upload_s: 0.0,
                        forward_s: 0.0,
                        share_cycles_per_s: 0.0,
                    });
                    continue;
                }
                let share = shares.cycles_per_s[t][j];
                let exec_s = exec_latency(st, task.cycles_per_bit, share)?;
                exec[j] = exec_s;
                let tr = transfers[t].per_subtask[j];
                let upload_done = match self.options.upload_model {
                    UploadModel::Cumulative => {
                        uploaded += tr.upload_s;
                        uploaded
                    }
                    UploadModel::Independent => tr.upload_s,
                };
                let arrival_s = rel + upload_done + tr.forward_s;
                let mut ready_s = arrival_s;
                for dep in &st.predecessors {
                    let p = timing[dep.from].expect("topological order visits predecessors first");
                    let d = dependency_latency(dep.bits, placement[t][dep.from], x, &self.links)?;
                    ready_s = ready_s.max(p.finish_s + d);
                }
                timing[j] = Some(SubTaskTiming {
                    index: j,
                    uav: x,
                    arrival_s,
                    ready_s,
                    start_s: ready_s,
                    finish_s: ready_s + exec_s,
                    exec_s,
                    upload_s: tr.upload_s,
                    forward_s: tr.forward_s,
                    share_cycles_per_s: share,
                });
            }
            let sub_tasks: Vec<SubTaskTiming> = timing.into_iter().map(|x| x.expect("every sub-task visited")).collect();
            let dummy_start = task.dummy_index().map(|d| sub_tasks[d].start_s).unwrap_or(rel);
            let last = sub_tasks
                .iter()
                .filter(|s| s.uav.is_some())
                .map(|s| s.finish_s)
                .fold(dummy_start, f64::max);
            let distributed_s = self.critical_transfer(t, &sub_tasks, &placement[t])?;
            tasks.push(TaskSchedule {
                owner_user: task.owner_user,
                home_uav: scenario.home_uav(task),
                sub_tasks,
                makespan_s: last - dummy_start,
                upload_s: transfers[t].upload_total_s,
                distributed_s,
            });
            exec_all.push(exec);
        }

        let energy = energy_ledger(&placement, &shares, &exec_all, &transfers, &self.links, scenario);
        let energy_checks = check_energy_feasible(&energy, &scenario.uavs);
        let energy_limited = self.options.energy_mode == EnergyMode::Limited;
        let feasible = !energy_limited || energy_checks.iter().all(|c| c.feasible);
        let objective_s = if tasks.is_empty() {
            0.0
        } else {
            tasks.iter().map(|t| t.makespan_s + t.upload_s).sum::<f64>() / tasks.len() as f64
        };
        Ok(ScheduleResult {
            tasks,
            energy,
            energy_checks,
            energy_limited,
            objective_s,
            feasible,
        })
    }

    /// Walks back from the last-finishing sub-task along whichever constraint
    /// set each ready time, adding forwarding and dependency transfer time.
    fn critical_transfer(&self, t: usize, timing: &[SubTaskTiming], placement: &[Option<usize>]) -> Result<f64> {
        let task = &self.scenario.tasks[t];
        let Some(mut j) = timing
            .iter()
            .filter(|s| s.uav.is_some())
            .fold(None::<&SubTaskTiming>, |best, s| match best {
                Some(b) if b.finish_s >= s.finish_s => Some(b),
                _ => Some(s),
            })
            .map(|s| s.index)
        else {
            return Ok(0.0);
        };
        let mut total = 0.0;
        loop {
            let st = &task.sub_tasks[j];
            if st.is_dummy {
                return Ok(total);
            }
            let mut binding: Option<(usize, f64, f64)> = None;
            for dep in &st.predecessors {
                let d = dependency_latency(dep.bits, placement[dep.from], placement[j], &self.links)?;
                let at = timing[dep.from].finish_s + d;
                if binding.is_none_or(|(_, best, _)| at > best) {
                    binding = Some((dep.from, at, d));
                }
            }
            match binding {
                Some((p, at, d)) if at > timing[j].arrival_s => {
                    total += d;
                    j = p;
                }
                _ => return Ok(total + timing[j].forward_s),
            }
        }
    }
}

/// One-shot evaluation.
pub fn evaluate(
    decision: &OffloadDecision,
    beta: &BandwidthAllocation,
    scenario: &Scenario,
    options: EvalOptions,
) -> Result<ScheduleResult> {
    Evaluator::new(scenario, beta, options)?.evaluate(decision)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum PenaltyMode {
    #[default]
    Penalty,
    Hard,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PenaltyConfig {
    pub lambda: f64,
    pub mode: PenaltyMode,
}

impl Default for PenaltyConfig {
    fn default() -> Self {
        Self {
            lambda: 0.1,
            mode: PenaltyMode::Penalty,
        }
    }
}

/// Objective assigned to rejected decisions in hard-constraint mode.
pub const REJECTED_OBJECTIVE: f64 = 1.0e12;

/// `M + λ Σ_v G_v (E_v − E_max_v)²`, or [`REJECTED_OBJECTIVE`] for an
/// infeasible result in hard mode.
pub fn penalized_objective(result: &ScheduleResult, cfg: &PenaltyConfig, uavs: &[UavNode]) -> f64 {
    if !result.energy_limited {
        return result.objective_s;
    }
    match cfg.mode {
        PenaltyMode::Hard if !result.feasible => REJECTED_OBJECTIVE,
        PenaltyMode::Hard => result.objective_s,
        PenaltyMode::Penalty => {
            let excess: f64 = result
                .energy
                .uavs
                .iter()
                .zip(uavs)
                .filter(|(e, u)| e.total_j > u.energy_budget_j)
                .map(|(e, u)| (e.total_j - u.energy_budget_j).powi(2))
                .sum();
            result.objective_s + cfg.lambda * excess
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatencyBreakdown {
    pub computation_s: f64,
    pub distributed_s: f64,
    pub total_s: f64,
}

/// Splits the objective into inter-UAV transfer time on each task's critical
/// path (averaged like the objective) and everything else.
pub fn decision_latency_breakdown(result: &ScheduleResult) -> LatencyBreakdown {
    let distributed_s = if result.tasks.is_empty() {
        0.0
    } else {
        result.tasks.iter().map(|t| t.distributed_s).sum::<f64>() / result.tasks.len() as f64
    };
    LatencyBreakdown {
        computation_s: result.objective_s - distributed_s,
        distributed_s,
        total_s: result.objective_s,
    }
}

/// CSV trace with columns `task,subtask,uav,AT,RT,ST,FT`. The dummy's UAV
/// column reads `local`.
pub fn write_schedule_csv<W: Write>(result: &ScheduleResult, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["task", "subtask", "uav", "AT", "RT", "ST", "FT"])?;
    for (t, task) in result.tasks.iter().enumerate() {
        for s in &task.sub_tasks {
            w.write_record([
                t.to_string(),
                s.index.to_string(),
                s.uav.map_or_else(|| "local".to_string(), |v| v.to_string()),
                s.arrival_s.to_string(),
                s.ready_s.to_string(),
                s.start_s.to_string(),
                s.finish_s.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}
