//! Bandwidth allocators.
//!
//! Every input bit of a task crosses the owner's uplink no matter where it is
//! executed, so the uplink load `H_u` of a user is its task's total input
//! size and none of the allocators below actually depend on the decision.

use serde::{Deserialize, Serialize};

use crate::channel::{user_spectral_efficiency, BandwidthAllocation};
use crate::error::Result;
use crate::evaluator::OffloadDecision;
use crate::scenario::Scenario;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Allocator {
    Optimal,
    Proportional,
    Equal,
}

impl Allocator {
    pub fn name(self) -> &'static str {
        match self {
            Allocator::Optimal => "optimal",
            Allocator::Proportional => "proportional",
            Allocator::Equal => "equal",
        }
    }
}

pub fn allocate(kind: Allocator, scenario: &Scenario, decision: &OffloadDecision) -> Result<BandwidthAllocation> {
    match kind {
        Allocator::Optimal => alloc_optimal(scenario, decision),
        Allocator::Proportional => alloc_proportional(scenario, decision),
        Allocator::Equal => Ok(alloc_equal(scenario)),
    }
}

fn uplink_bits(scenario: &Scenario) -> Vec<f64> {
    let mut h = vec![0.0; scenario.users.len()];
    for t in &scenario.tasks {
        h[t.owner_user] += t.total_input_bits();
    }
    h
}

/// Per-user upload time at full bandwidth, `H_u / (B_v Γ_u)`; the upload
/// time at fraction `β` is this divided by `β`. Zero for users without bits.
pub fn upload_weights(scenario: &Scenario) -> Result<Vec<f64>> {
    let h = uplink_bits(scenario);
    scenario
        .users
        .iter()
        .map(|u| {
            if h[u.id] <= 0.0 {
                return Ok(0.0);
            }
            let uav = &scenario.uavs[u.associated_uav];
            let gamma = user_spectral_efficiency(u, uav, &scenario.physics, uav.bandwidth_users_hz)?;
            Ok(h[u.id] / (uav.bandwidth_users_hz * gamma))
        })
        .collect()
}

/// Normalizes `w` within each UAV's user set; UAVs with no weight give
/// every user zero.
fn normalize_per_uav(scenario: &Scenario, w: &[f64]) -> BandwidthAllocation {
    let mut totals = vec![0.0; scenario.uav_count()];
    for u in &scenario.users {
        totals[u.associated_uav] += w[u.id];
    }
    BandwidthAllocation {
        fractions: scenario
            .users
            .iter()
            .map(|u| {
                let t = totals[u.associated_uav];
                if t > 0.0 {
                    w[u.id] / t
                } else {
                    0.0
                }
            })
            .collect(),
    }
}

/// Minimizes each UAV's summed upload time `Σ a_u / β_u` subject to
/// `Σ β_u ≤ 1`. Stationarity gives `β_u ∝ √a_u`.
pub fn alloc_optimal(scenario: &Scenario, _decision: &OffloadDecision) -> Result<BandwidthAllocation> {
    let w: Vec<f64> = upload_weights(scenario)?.into_iter().map(f64::sqrt).collect();
    Ok(normalize_per_uav(scenario, &w))
}

/// `β_u = H_u / Σ H` over the UAV's users.
pub fn alloc_proportional(scenario: &Scenario, _decision: &OffloadDecision) -> Result<BandwidthAllocation> {
    Ok(normalize_per_uav(scenario, &uplink_bits(scenario)))
}

/// `β_u = 1 / |U_v|`, inactive users included.
pub fn alloc_equal(scenario: &Scenario) -> BandwidthAllocation {
    BandwidthAllocation::equal(scenario)
}
