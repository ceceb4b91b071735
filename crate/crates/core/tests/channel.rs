//! Link budgets against values computed independently in double precision.

use proptest::prelude::*;
use uavoffload::channel::{
    a2g_path_loss, elevation_deg, los_probability, u2b_rate, u2u_rate, user_uplink_rate,
};
use uavoffload::scenario::{HoverParams, PhysicsConstants, UavNode, UserNode};

fn uav(p: [f64; 3]) -> UavNode {
    UavNode {
        id: 0,
        position_m: p,
        max_compute_cycles_per_s: 1e9,
        tx_power_u2u_dbm: 30.0,
        tx_power_to_bs_dbm: 30.0,
        antenna_gain_tx: 1.0,
        antenna_gain_rx_bs: 1.0,
        bandwidth_users_hz: 3.0e6,
        bandwidth_u2u_hz: 8.0e6,
        bandwidth_to_bs_hz: 100.0e6,
        energy_budget_j: 1e4,
        hover: HoverParams::default(),
        info_payload_bits: 1e6,
    }
}

fn user(p: [f64; 2]) -> UserNode {
    UserNode {
        id: 0,
        position_m: p,
        tx_power_dbm: 23.0,
        associated_uav: 0,
        active: true,
    }
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    ((a - b) / b).abs() <= rel
}

#[test]
fn uplink_golden() {
    let phys = PhysicsConstants::default();
    let theta = elevation_deg([0.0, 0.0], [100.0, 0.0, 100.0]);
    assert!((theta - 45.0).abs() < 1e-12);
    assert!((los_probability(theta, &phys) - 0.6970863690250678).abs() < 1e-12);
    let link = user_uplink_rate(&user([0.0, 0.0]), &uav([100.0, 0.0, 100.0]), 1.0, &phys).unwrap();
    assert!((link.path_loss_db - 60.88463064217672).abs() < 1e-9);
    assert!(close(link.rate_bps, 135649640.88471714, 1e-12));
}

#[test]
fn u2u_golden() {
    let phys = PhysicsConstants::default();
    let link = u2u_rate(&uav([0.0, 0.0, 50.0]), &uav([500.0, 0.0, 50.0]), &phys).unwrap();
    assert!((link.path_loss_db - 86.42117227276907).abs() < 1e-9);
    assert!(close(link.rate_bps, 312470728.9528278, 1e-12));
}

#[test]
fn u2b_golden() {
    let phys = PhysicsConstants::default();
    let link = u2b_rate(&uav([100.0, 0.0, 50.0]), [0.0, 0.0], &phys);
    assert!(close(link.snr_linear, 19155714.377853744, 1e-12));
    assert!(close(link.rate_bps, 2419127156.9002833, 1e-12));
}

proptest! {
    #[test]
    fn los_probability_is_a_probability(theta in 0.0f64..=90.0) {
        let p = los_probability(theta, &PhysicsConstants::default());
        prop_assert!(p > 0.0 && p < 1.0);
    }

    #[test]
    fn rates_fall_with_distance(d in 10.0f64..2000.0, step in 1.0f64..500.0) {
        let phys = PhysicsConstants::default();
        let near = u2u_rate(&uav([0.0, 0.0, 50.0]), &uav([d, 0.0, 50.0]), &phys).unwrap();
        let far = u2u_rate(&uav([0.0, 0.0, 50.0]), &uav([d + step, 0.0, 50.0]), &phys).unwrap();
        prop_assert!(far.rate_bps < near.rate_bps);

        let near = u2b_rate(&uav([d, 0.0, 50.0]), [0.0, 0.0], &phys);
        let far = u2b_rate(&uav([d + step, 0.0, 50.0]), [0.0, 0.0], &phys);
        prop_assert!(far.rate_bps < near.rate_bps);
    }

    #[test]
    fn a2g_loss_is_finite_and_positive(x in -1000.0f64..1000.0, y in -1000.0f64..1000.0) {
        let loss = a2g_path_loss([x, y], [0.0, 0.0, 50.0], &PhysicsConstants::default()).unwrap();
        prop_assert!(loss.is_finite() && loss > 0.0);
    }
}
