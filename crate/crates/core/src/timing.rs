//! Latency and energy primitives: compute shares, execution time, transfer
//! times and the per-UAV energy ledger.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::channel::{dbm_to_watts, u2b_rate, u2u_rate, user_uplink_rate, BandwidthAllocation};
use crate::error::{Error, Result};
use crate::scenario::{HoverParams, Scenario, SubTask, UavNode};

/// Per-task view of a decision: `Some(uav)` for real sub-tasks, `None` for the dummy.
pub type Placement = Vec<Vec<Option<usize>>>;

/// Every link rate an evaluation needs, computed once per bandwidth allocation.
#[derive(Debug, Clone)]
pub struct Links {
    /// Uplink rate of each task's owner, indexed like `scenario.tasks`.
    pub uplink_bps: Vec<f64>,
    /// `u2u_bps[v][w]`; zero on the diagonal and for coincident UAVs.
    pub u2u_bps: Vec<Vec<f64>>,
    pub u2b_bps: Vec<f64>,
}

impl Links {
    pub fn new(scenario: &Scenario, beta: &BandwidthAllocation) -> Result<Self> {
        beta.validate(scenario)?;
        let phys = &scenario.physics;
        let mut uplink_bps = Vec::with_capacity(scenario.tasks.len());
        for task in &scenario.tasks {
            let user = &scenario.users[task.owner_user];
            let uav = &scenario.uavs[user.associated_uav];
            uplink_bps.push(user_uplink_rate(user, uav, beta.fraction(user.id), phys)?.rate_bps);
        }
        let v = scenario.uav_count();
        let mut u2u_bps = vec![vec![0.0; v]; v];
        for a in 0..v {
            for b in 0..v {
                if a != b {
                    if let Ok(l) = u2u_rate(&scenario.uavs[a], &scenario.uavs[b], phys) {
                        u2u_bps[a][b] = l.rate_bps;
                    }
                }
            }
        }
        let u2b_bps = scenario
            .uavs
            .iter()
            .map(|u| u2b_rate(u, scenario.bs_position_m, phys).rate_bps)
            .collect();
        Ok(Self {
            uplink_bps,
            u2u_bps,
            u2b_bps,
        })
    }

    pub fn u2u(&self, from: usize, to: usize) -> Result<f64> {
        let r = self.u2u_bps[from][to];
        if r > 0.0 {
            Ok(r)
        } else {
            Err(Error::ZeroRate(format!("no link from UAV {from} to UAV {to}")))
        }
    }
}

/// Allocated cycles/s per `(task, sub-task)`; zero for the dummy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComputeShare {
    pub cycles_per_s: Vec<Vec<f64>>,
}

/// Static proportional sharing: each sub-task on UAV `v` gets
/// `H / (sum of H assigned to v) · F_max(v)`.
pub fn compute_shares(placement: &Placement, scenario: &Scenario) -> ComputeShare {
    let mut load = vec![0.0; scenario.uav_count()];
    for (task, assigned) in scenario.tasks.iter().zip(placement) {
        for (st, x) in task.sub_tasks.iter().zip(assigned) {
            if let Some(v) = x {
                load[*v] += st.input_size_bits;
            }
        }
    }
    let cycles_per_s = scenario
        .tasks
        .iter()
        .zip(placement)
        .map(|(task, assigned)| {
            task.sub_tasks
                .iter()
                .zip(assigned)
                .map(|(st, x)| match x {
                    Some(v) => st.input_size_bits / load[*v] * scenario.uavs[*v].max_compute_cycles_per_s,
                    None => 0.0,
                })
                .collect()
        })
        .collect();
    ComputeShare { cycles_per_s }
}

/// `C · H / f`; the dummy takes no time.
pub fn exec_latency(sub_task: &SubTask, cycles_per_bit: f64, share: f64) -> Result<f64> {
    if sub_task.is_dummy {
        return Ok(0.0);
    }
    if !(share > 0.0) {
        return Err(Error::InvalidDecision(format!(
            "sub-task {} has no compute share",
            sub_task.index
        )));
    }
    Ok(cycles_per_bit * sub_task.input_size_bits / share)
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SubTransfer {
    /// User to associated UAV.
    pub upload_s: f64,
    /// Associated UAV to executing UAV; zero when executed at home.
    pub forward_s: f64,
}

impl SubTransfer {
    pub fn load_s(&self) -> f64 {
        self.upload_s + self.forward_s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TaskTransfers {
    pub per_subtask: Vec<SubTransfer>,
    /// Whole-task upload latency `sum(H) / R_up`.
    pub upload_total_s: f64,
}

pub fn transfer_latencies(placement: &Placement, links: &Links, scenario: &Scenario) -> Result<Vec<TaskTransfers>> {
    scenario
        .tasks
        .iter()
        .zip(placement)
        .enumerate()
        .map(|(t, (task, assigned))| {
            let home = scenario.home_uav(task);
            let up = links.uplink_bps[t];
            let per_subtask = task
                .sub_tasks
                .iter()
                .zip(assigned)
                .map(|(st, x)| match x {
                    Some(v) => Ok(SubTransfer {
                        upload_s: st.input_size_bits / up,
                        forward_s: if *v == home {
                            0.0
                        } else {
                            st.input_size_bits / links.u2u(home, *v)?
                        },
                    }),
                    None => Ok(SubTransfer::default()),
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(TaskTransfers {
                per_subtask,
                upload_total_s: task.total_input_bits() / up,
            })
        })
        .collect()
}

/// Latency of moving `bits` of dependency payload between the executors of
/// two sub-tasks. Zero when co-located or when either end is the dummy.
pub fn dependency_latency(bits: f64, from: Option<usize>, to: Option<usize>, links: &Links) -> Result<f64> {
    match (from, to) {
        (Some(a), Some(b)) if a != b && bits > 0.0 => Ok(bits / links.u2u(a, b)?),
        _ => Ok(0.0),
    }
}

/// Rotor hover power in W: `η√η / (φ √(2π q r² ϰ))`.
pub fn hover_power(hover: &HoverParams, air_density: f64) -> f64 {
    let eta = hover.thrust_n;
    let r = hover.rotor_diameter_m;
    eta * eta.sqrt()
        / (hover.power_efficiency * (2.0 * PI * hover.rotor_count as f64 * r * r * air_density).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct UavEnergy {
    pub exec_j: f64,
    pub forward_j: f64,
    pub report_j: f64,
    pub hover_j: f64,
    pub hover_time_s: f64,
    pub total_j: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyLedger {
    pub uavs: Vec<UavEnergy>,
    /// Uplink energy spent by each task's owner, indexed like `scenario.tasks`.
    pub user_uplink_j: Vec<f64>,
}

/// Builds the energy ledger.
///
/// Execution energy is `k f² C H` per sub-task. Forwarding energy is charged
/// to the forwarding (associated) UAV; dependency payload transfers carry no
/// energy cost. Hover time of UAV `v` is the worst case over its users of
/// upload + report + max(local exec, forward + remote exec), where each span
/// is a plain sum over that user's sub-tasks.
pub fn energy_ledger(
    placement: &Placement,
    shares: &ComputeShare,
    exec_s: &[Vec<f64>],
    transfers: &[TaskTransfers],
    links: &Links,
    scenario: &Scenario,
) -> EnergyLedger {
    let phys = &scenario.physics;
    let v_count = scenario.uav_count();
    let mut uavs = vec![UavEnergy::default(); v_count];
    let report_s: Vec<f64> = scenario
        .uavs
        .iter()
        .zip(&links.u2b_bps)
        .map(|(u, r)| u.info_payload_bits / r)
        .collect();

    // worst user term per UAV, starting from zero for users without a task
    let mut hover_term = vec![0.0f64; v_count];
    let mut user_uplink_j = Vec::with_capacity(scenario.tasks.len());

    for (t, task) in scenario.tasks.iter().enumerate() {
        let home = scenario.home_uav(task);
        let p_home = dbm_to_watts(scenario.uavs[home].tx_power_u2u_dbm);
        let mut local = 0.0;
        let mut remote_com = 0.0;
        let mut remote_exe = 0.0;
        for (j, st) in task.sub_tasks.iter().enumerate() {
            let Some(v) = placement[t][j] else { continue };
            let f = shares.cycles_per_s[t][j];
            uavs[v].exec_j += phys.switched_capacitance * f * f * task.cycles_per_bit * st.input_size_bits;
            let fwd = transfers[t].per_subtask[j].forward_s;
            if v == home {
                local += exec_s[t][j];
            } else {
                uavs[home].forward_j += p_home * fwd;
                remote_com += fwd;
                remote_exe += exec_s[t][j];
            }
        }
        let up = transfers[t].upload_total_s;
        let user = &scenario.users[task.owner_user];
        user_uplink_j.push(dbm_to_watts(user.tx_power_dbm) * up);
        let term = up + local.max(remote_com + remote_exe);
        hover_term[home] = hover_term[home].max(term);
    }

    for (v, e) in uavs.iter_mut().enumerate() {
        let uav: &UavNode = &scenario.uavs[v];
        e.report_j = dbm_to_watts(uav.tx_power_to_bs_dbm) * report_s[v];
        e.hover_time_s = report_s[v] + hover_term[v];
        e.hover_j = hover_power(&uav.hover, phys.air_density_kg_per_m3) * e.hover_time_s;
        e.total_j = e.exec_j + e.forward_j + e.report_j + e.hover_j;
    }
    EnergyLedger { uavs, user_uplink_j }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyCheck {
    pub feasible: bool,
    /// Budget minus total; negative when over budget.
    pub margin_j: f64,
}

pub fn check_energy_feasible(ledger: &EnergyLedger, uavs: &[UavNode]) -> Vec<EnergyCheck> {
    ledger
        .uavs
        .iter()
        .zip(uavs)
        .map(|(e, u)| EnergyCheck {
            feasible: e.total_j <= u.energy_budget_j,
            margin_j: u.energy_budget_j - e.total_j,
        })
        .collect()
}
