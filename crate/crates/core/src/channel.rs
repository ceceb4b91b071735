//! Link budgets: air-to-ground, UAV-to-UAV and the mmWave UAV-to-BS link.
//!
//! All powers are configured in dBm and converted with
//! `P_w = 10^((P_dBm - 30) / 10)`; SNRs are linear.

use std::f64::consts::{LN_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scenario::{LossForm, NoiseModel, PhysicsConstants, Scenario, UavNode, UserNode};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkBudget {
    pub distance_m: f64,
    pub path_loss_db: f64,
    pub channel_gain_linear: f64,
    pub snr_linear: f64,
    pub rate_bps: f64,
}

/// Bandwidth fraction of its UAV's user pool granted to each user, indexed
/// by user id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandwidthAllocation {
    pub fractions: Vec<f64>,
}

impl BandwidthAllocation {
    /// Equal split among every associated user of each UAV, active or not.
    pub fn equal(scenario: &Scenario) -> Self {
        let mut counts = vec![0usize; scenario.uav_count()];
        for u in &scenario.users {
            if let Some(c) = counts.get_mut(u.associated_uav) {
                *c += 1;
            }
        }
        Self {
            fractions: scenario
                .users
                .iter()
                .map(|u| 1.0 / counts.get(u.associated_uav).copied().unwrap_or(1) as f64)
                .collect(),
        }
    }

    pub fn fraction(&self, user: usize) -> f64 {
        self.fractions[user]
    }

    pub fn uav_total(&self, scenario: &Scenario, uav: usize) -> f64 {
        scenario.users_of(uav).map(|u| self.fractions[u.id]).sum()
    }

    /// Every fraction in `[0, 1]` and each UAV's fractions sum to at most 1.
    pub fn validate(&self, scenario: &Scenario) -> Result<()> {
        if self.fractions.len() != scenario.users.len() {
            return Err(Error::InvalidAllocation(format!(
                "{} fractions for {} users",
                self.fractions.len(),
                scenario.users.len()
            )));
        }
        if let Some((u, b)) = self
            .fractions
            .iter()
            .enumerate()
            .find(|(_, b)| !(0.0..=1.0).contains(*b))
        {
            return Err(Error::InvalidAllocation(format!("user {u} has fraction {b}")));
        }
        for v in 0..scenario.uav_count() {
            let total = self.uav_total(scenario, v);
            if total > 1.0 + 1e-9 {
                return Err(Error::InvalidAllocation(format!(
                    "UAV {v} hands out {total} of its bandwidth"
                )));
            }
        }
        Ok(())
    }
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

/// `G = 10^(-L/10)`.
pub fn gain_from_loss_db(loss_db: f64) -> f64 {
    10f64.powf(-loss_db / 10.0)
}

pub fn loss_db_from_gain(gain: f64) -> f64 {
    10.0 * (1.0 / gain).log10()
}

fn dist3(a: [f64; 3], b: [f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

/// Elevation angle in degrees of a UAV seen from a ground point. Directly
/// overhead is 90°.
pub fn elevation_deg(ground: [f64; 2], uav: [f64; 3]) -> f64 {
    let horizontal = ((uav[0] - ground[0]).powi(2) + (uav[1] - ground[1]).powi(2)).sqrt();
    uav[2].atan2(horizontal).to_degrees()
}

/// Sigmoid line-of-sight probability for the given elevation angle.
pub fn los_probability(elevation_deg: f64, physics: &PhysicsConstants) -> f64 {
    let c = physics.los_env_c;
    let d = physics.los_env_d;
    1.0 / (1.0 + c * (-d * (elevation_deg - c)).exp())
}

/// Distance-dependent part of the air-to-ground loss, before the LoS/NLoS
/// excess terms.
pub fn a2g_free_space_db(distance_m: f64, physics: &PhysicsConstants) -> f64 {
    let ratio = 4.0 * PI * distance_m * physics.carrier_freq_a2g_hz / physics.speed_of_light_m_per_s;
    let n = physics.path_loss_exponent;
    match physics.a2g_loss_form {
        LossForm::AsPrinted => 2.0 * n * ratio.log2(),
        LossForm::StandardFspl => 10.0 * n * ratio.log10(),
    }
}

/// Mixed LoS/NLoS path loss from a user to a UAV, in dB.
pub fn a2g_path_loss(user: [f64; 2], uav: [f64; 3], physics: &PhysicsConstants) -> Result<f64> {
    let d = dist3([user[0], user[1], 0.0], uav);
    if !(d > 0.0) {
        return Err(Error::CoincidentPositions("user and UAV".into()));
    }
    let free = a2g_free_space_db(d, physics);
    let p_los = los_probability(elevation_deg(user, uav), physics);
    let p_nlos = 1.0 - p_los;
    Ok(p_los * (free + physics.loss_los_db) + p_nlos * (free + physics.loss_nlos_db))
}

/// The free-space term of the UAV-to-UAV loss at `distance_m`.
pub fn u2u_free_space_db(distance_m: f64, physics: &PhysicsConstants) -> f64 {
    let k = match physics.u2u_loss_form {
        LossForm::AsPrinted => 2.0 * PI,
        LossForm::StandardFspl => 4.0 * PI,
    };
    20.0 * distance_m.log10()
        + 20.0 * physics.carrier_freq_a2g_hz.log10()
        + 10.0 * (k / physics.speed_of_light_m_per_s).powi(2).log10()
}

/// LoS UAV-to-UAV path loss in dB: free-space term plus the LoS attenuation.
pub fn u2u_path_loss(a: [f64; 3], b: [f64; 3], physics: &PhysicsConstants) -> Result<f64> {
    let d = dist3(a, b);
    if !(d > 0.0) {
        return Err(Error::CoincidentPositions("two UAVs".into()));
    }
    Ok(u2u_free_space_db(d, physics) + physics.attenuation_los_db)
}

fn noise_watts(physics: &PhysicsConstants, bandwidth_hz: f64) -> f64 {
    let n = dbm_to_watts(physics.noise_power_dbm);
    match physics.noise_model {
        NoiseModel::Total => n,
        NoiseModel::PerHz => n * bandwidth_hz,
    }
}

/// Uplink spectrum efficiency (bit/s/Hz). `allocated_hz` only matters in
/// per-Hz noise mode.
pub fn user_spectral_efficiency(
    user: &UserNode,
    uav: &UavNode,
    physics: &PhysicsConstants,
    allocated_hz: f64,
) -> Result<f64> {
    let loss = a2g_path_loss(user.position_m, uav.position_m, physics)?;
    let snr = dbm_to_watts(user.tx_power_dbm) * gain_from_loss_db(loss) / noise_watts(physics, allocated_hz);
    Ok(log2_1p(snr))
}

/// User-to-UAV uplink with bandwidth fraction `beta` of the UAV's user pool.
pub fn user_uplink_rate(
    user: &UserNode,
    uav: &UavNode,
    beta: f64,
    physics: &PhysicsConstants,
) -> Result<LinkBudget> {
    if !(0.0..=1.0).contains(&beta) {
        return Err(Error::InvalidAllocation(format!(
            "bandwidth fraction {beta} of user {} outside [0, 1]",
            user.id
        )));
    }
    if beta == 0.0 {
        return Err(Error::ZeroRate(format!("user {} has no bandwidth", user.id)));
    }
    let allocated = beta * uav.bandwidth_users_hz;
    let distance_m = dist3([user.position_m[0], user.position_m[1], 0.0], uav.position_m);
    let path_loss_db = a2g_path_loss(user.position_m, uav.position_m, physics)?;
    let channel_gain_linear = gain_from_loss_db(path_loss_db);
    let snr_linear = dbm_to_watts(user.tx_power_dbm) * channel_gain_linear / noise_watts(physics, allocated);
    Ok(LinkBudget {
        distance_m,
        path_loss_db,
        channel_gain_linear,
        snr_linear,
        rate_bps: allocated * log2_1p(snr_linear),
    })
}

/// `log2(1 + x)` without losing tiny SNRs to rounding.
fn log2_1p(x: f64) -> f64 {
    x.ln_1p() / LN_2
}

/// Direct link from UAV `a` to UAV `b`, using `a`'s transmit power and
/// inter-UAV bandwidth.
pub fn u2u_rate(a: &UavNode, b: &UavNode, physics: &PhysicsConstants) -> Result<LinkBudget> {
    let path_loss_db = u2u_path_loss(a.position_m, b.position_m, physics)?;
    let channel_gain_linear = gain_from_loss_db(path_loss_db);
    let snr_linear = dbm_to_watts(a.tx_power_u2u_dbm) * channel_gain_linear
        / noise_watts(physics, a.bandwidth_u2u_hz);
    Ok(LinkBudget {
        distance_m: dist3(a.position_m, b.position_m),
        path_loss_db,
        channel_gain_linear,
        snr_linear,
        rate_bps: a.bandwidth_u2u_hz * log2_1p(snr_linear),
    })
}

/// mmWave report link from a UAV to the ground base station. The received
/// power is `P G_tx G_rx c / (4π d f_mm)` and the noise is `B σ²` with the
/// same bandwidth as the rate prefactor.
pub fn u2b_rate(uav: &UavNode, bs: [f64; 2], physics: &PhysicsConstants) -> LinkBudget {
    let d = dist3(uav.position_m, [bs[0], bs[1], 0.0]);
    let spreading = physics.speed_of_light_m_per_s / (4.0 * PI * d * physics.carrier_freq_mmwave_hz);
    let received = dbm_to_watts(uav.tx_power_to_bs_dbm) * uav.antenna_gain_tx * uav.antenna_gain_rx_bs * spreading;
    let b = uav.bandwidth_to_bs_hz;
    let snr_linear = received / (b * dbm_to_watts(physics.noise_power_dbm));
    LinkBudget {
        distance_m: d,
        path_loss_db: loss_db_from_gain(spreading),
        channel_gain_linear: spreading,
        snr_linear,
        rate_bps: b * log2_1p(snr_linear),
    }
}
