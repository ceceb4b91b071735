//! Seed splitting.
//!
//! All randomness flows from one master `u64`. Child seeds are derived as
//! `splitmix64(splitmix64(master ^ domain) ^ index)` where `domain` is a fixed
//! per-purpose constant below. Each child seeds its own `ChaCha8Rng`, so
//! streams never overlap and adding a consumer never perturbs another one.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const DOMAIN_LAYOUT: u64 = 0x4c41_594f_5554_0001;
pub const DOMAIN_USERS: u64 = 0x5553_4552_5300_0002;
pub const DOMAIN_TASKS: u64 = 0x5441_534b_5300_0003;
pub const DOMAIN_ACTIVE: u64 = 0x4143_5449_5645_0004;
pub const DOMAIN_SOLVER: u64 = 0x534f_4c56_4552_0005;
pub const DOMAIN_REPLICATION: u64 = 0x5245_504c_4943_0006;

pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn child_seed(master: u64, domain: u64, index: u64) -> u64 {
    splitmix64(splitmix64(master ^ domain) ^ index)
}

pub fn child_rng(master: u64, domain: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(child_seed(master, domain, index))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn children_are_distinct() {
        let a = child_seed(42, DOMAIN_TASKS, 0);
        let b = child_seed(42, DOMAIN_TASKS, 1);
        let c = child_seed(42, DOMAIN_USERS, 0);
        assert_ne!(a, b);
        assert_ne!(a, c);
        assert_eq!(a, child_seed(42, DOMAIN_TASKS, 0));
    }
}
