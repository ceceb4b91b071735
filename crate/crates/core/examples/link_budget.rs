//! Prints uplink, inter-UAV and report link budgets for a generated scenario.

use uavoffload::channel::{u2b_rate, u2u_rate, user_uplink_rate, BandwidthAllocation};
use uavoffload::scenario::{generate_scenario, ScenarioParams};

fn main() -> uavoffload::Result<()> {
    let s = generate_scenario(3, &ScenarioParams::default())?;
    let beta = BandwidthAllocation::equal(&s);
    for u in s.users.iter().filter(|u| u.active) {
        let link = user_uplink_rate(u, &s.uavs[u.associated_uav], beta.fraction(u.id), &s.physics)?;
        println!(
            "user {} -> UAV {}: {:.1} m, loss {:.2} dB, {:.2} Mbit/s at beta {:.3}",
            u.id,
            u.associated_uav,
            link.distance_m,
            link.path_loss_db,
            link.rate_bps / 1e6,
            beta.fraction(u.id)
        );
    }
    for a in &s.uavs {
        for b in s.uavs.iter().filter(|b| b.id > a.id) {
            let link = u2u_rate(a, b, &s.physics)?;
            println!(
                "UAV {} -> UAV {}: {:.1} m, loss {:.2} dB, {:.1} Mbit/s",
                a.id,
                b.id,
                link.distance_m,
                link.path_loss_db,
                link.rate_bps / 1e6
            );
        }
        let report = u2b_rate(a, s.bs_position_m, &s.physics);
        println!("UAV {} -> base station: {:.1} Mbit/s", a.id, report.rate_bps / 1e6);
    }
    Ok(())
}
