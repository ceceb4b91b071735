use proptest::prelude::*;
use uavoffload::scenario::{generate_scenario, validate_scenario, ActiveUsers, Scenario, ScenarioParams};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn generated_scenarios_are_valid(seed in any::<u64>(), subtasks in 1usize..=20, active in 1usize..=4) {
        let mut p = ScenarioParams::default();
        p.task.subtasks = subtasks;
        p.active = ActiveUsers::Total { count: active };
        let s = generate_scenario(seed, &p).unwrap();
        prop_assert!(validate_scenario(&s).is_empty());
        prop_assert_eq!(s.tasks.len(), active);
        for t in &s.tasks {
            prop_assert_eq!(t.real_count(), subtasks);
            let order = t.topological_order().unwrap();
            prop_assert_eq!(order[0], t.dummy_index().unwrap());
            prop_assert_eq!(order.len(), subtasks + 1);
        }
        prop_assert_eq!(s.decision_len(), subtasks * active);
    }
}

#[test]
fn toml_file_round_trip() {
    let s = generate_scenario(3, &ScenarioParams::default()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.toml");
    s.save(&path).unwrap();
    assert_eq!(Scenario::load(&path).unwrap(), s);
}

#[test]
fn per_uav_activity_covers_every_cell() {
    let mut p = ScenarioParams::default();
    p.users_per_uav = [6, 6];
    p.active = ActiveUsers::PerUav { fraction: 0.5 };
    let s = generate_scenario(1, &p).unwrap();
    for v in 0..s.uav_count() {
        assert_eq!(s.users_of(v).filter(|u| u.active).count(), 3);
    }
}
