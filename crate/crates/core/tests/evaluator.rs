use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use uavoffload::channel::{u2u_rate, user_uplink_rate, BandwidthAllocation};
use uavoffload::evaluator::{
    decision_latency_breakdown, evaluate, penalized_objective, write_schedule_csv, EvalOptions, OffloadDecision,
    PenaltyConfig, PenaltyMode, UploadModel, REJECTED_OBJECTIVE,
};
use uavoffload::scenario::{generate_scenario, ActiveUsers, Dependency, Scenario, ScenarioParams, SubTask};
use uavoffload::solvers::associated_decision;

/// One task whose graph is replaced by `subs` (index 0 must be the dummy).
fn single_task(subs: Vec<SubTask>) -> Scenario {
    let mut p = ScenarioParams::default();
    p.active = ActiveUsers::Total { count: 1 };
    p.task.release_time_s = 0.5;
    let mut s = generate_scenario(4, &p).unwrap();
    s.tasks[0].sub_tasks = subs;
    s
}

fn sub(index: usize, bits: f64, preds: &[(usize, f64)]) -> SubTask {
    SubTask {
        index,
        input_size_bits: bits,
        predecessors: preds.iter().map(|&(from, bits)| Dependency { from, bits }).collect(),
        is_dummy: index == 0,
    }
}

fn random_case(seed: u64) -> (Scenario, OffloadDecision) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut p = ScenarioParams::default();
    p.task.subtasks = rng.random_range(1..=8);
    let s = generate_scenario(seed, &p).unwrap();
    let x = OffloadDecision((0..s.decision_len()).map(|_| rng.random_range(0..s.uav_count())).collect());
    (s, x)
}

#[test]
fn local_chain_by_hand() {
    let (ha, hb) = (4.0e7, 2.0e7);
    let s = single_task(vec![sub(0, 0.0, &[]), sub(1, ha, &[(0, 0.0)]), sub(2, hb, &[(1, 3e5)])]);
    let home = s.home_uav(&s.tasks[0]);
    let beta = BandwidthAllocation::equal(&s);
    let r = evaluate(&OffloadDecision(vec![home, home]), &beta, &s, EvalOptions::default()).unwrap();

    let u = &s.users[s.tasks[0].owner_user];
    let up = user_uplink_rate(u, &s.uavs[home], beta.fraction(u.id), &s.physics)
        .unwrap()
        .rate_bps;
    let c = s.tasks[0].cycles_per_bit;
    let f = s.uavs[home].max_compute_cycles_per_s;
    let rel = 0.5;
    let ft_a = rel + ha / up + c * (ha + hb) / f;
    let at_b = rel + (ha + hb) / up;
    let ft_b = at_b.max(ft_a) + c * (ha + hb) / f;

    let t = &r.tasks[0];
    let tol = 1e-9;
    assert_eq!((t.sub_tasks[0].start_s, t.sub_tasks[0].finish_s), (rel, rel));
    assert!((t.sub_tasks[1].finish_s - ft_a).abs() < tol);
    assert!((t.sub_tasks[2].start_s - at_b.max(ft_a)).abs() < tol);
    assert!((t.sub_tasks[2].finish_s - ft_b).abs() < tol);
    assert!((t.makespan_s - (ft_b - rel)).abs() < tol);
    assert!((r.objective_s - (ft_b - rel + (ha + hb) / up)).abs() < tol);
    assert_eq!(t.distributed_s, 0.0);
}

#[test]
fn forwarded_single_subtask_counts_its_forwarding_as_distributed() {
    let h = 3.0e7;
    let s = single_task(vec![sub(0, 0.0, &[]), sub(1, h, &[(0, 0.0)])]);
    let home = s.home_uav(&s.tasks[0]);
    let other = (home + 1) % s.uav_count();
    let r = evaluate(&OffloadDecision(vec![other]), &BandwidthAllocation::equal(&s), &s, EvalOptions::default())
        .unwrap();
    let fwd = h / u2u_rate(&s.uavs[home], &s.uavs[other], &s.physics).unwrap().rate_bps;
    assert!((r.tasks[0].distributed_s - fwd).abs() < 1e-12);
    assert!((r.tasks[0].sub_tasks[1].forward_s - fwd).abs() < 1e-12);
}

#[test]
fn parallel_equal_subtasks_start_together_with_independent_upload() {
    let s = single_task(vec![sub(0, 0.0, &[]), sub(1, 2e7, &[(0, 0.0)]), sub(2, 2e7, &[(0, 0.0)])]);
    let home = s.home_uav(&s.tasks[0]);
    let opts = EvalOptions {
        upload_model: UploadModel::Independent,
        ..EvalOptions::default()
    };
    let r = evaluate(&OffloadDecision(vec![home, home]), &BandwidthAllocation::equal(&s), &s, opts).unwrap();
    let st = &r.tasks[0].sub_tasks;
    assert_eq!(st[1].start_s, st[2].start_s);
    assert_eq!(st[1].finish_s, st[2].finish_s);
}

#[test]
fn associated_decision_has_no_distributed_latency() {
    for seed in 0..20 {
        let s = generate_scenario(seed, &ScenarioParams::default()).unwrap();
        let r = evaluate(&associated_decision(&s), &BandwidthAllocation::equal(&s), &s, EvalOptions::default())
            .unwrap();
        let b = decision_latency_breakdown(&r);
        assert_eq!(b.distributed_s, 0.0);
        assert_eq!(b.computation_s, r.objective_s);
    }
}

#[test]
fn penalty_is_lambda_times_squared_excess() {
    let (mut s, x) = random_case(11);
    for u in &mut s.uavs {
        u.energy_budget_j = 10.0;
    }
    let r = evaluate(&x, &BandwidthAllocation::equal(&s), &s, EvalOptions::default()).unwrap();
    assert!(!r.feasible);
    let excess: f64 = r
        .energy
        .uavs
        .iter()
        .zip(&s.uavs)
        .map(|(e, u)| (e.total_j - u.energy_budget_j).max(0.0).powi(2))
        .sum();
    let cfg = PenaltyConfig {
        lambda: 0.3,
        mode: PenaltyMode::Penalty,
    };
    let got = penalized_objective(&r, &cfg, &s.uavs);
    assert!((got - (r.objective_s + 0.3 * excess)).abs() <= 1e-9 * got);
    let hard = PenaltyConfig {
        mode: PenaltyMode::Hard,
        ..cfg
    };
    assert_eq!(penalized_objective(&r, &hard, &s.uavs), REJECTED_OBJECTIVE);
}

#[test]
fn schedule_csv_has_header_and_local_dummy() {
    let (s, x) = random_case(2);
    let r = evaluate(&x, &BandwidthAllocation::equal(&s), &s, EvalOptions::default()).unwrap();
    let mut buf = Vec::new();
    write_schedule_csv(&r, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("task,subtask,uav,AT,RT,ST,FT"));
    assert!(lines.next().unwrap().starts_with("0,0,local,"));
    let subs: usize = s.tasks.iter().map(|t| t.sub_tasks.len()).sum();
    assert_eq!(text.lines().count(), subs + 1);
}

#[test]
fn wrong_length_decision_is_rejected() {
    let (s, mut x) = random_case(5);
    x.0.push(0);
    assert!(evaluate(&x, &BandwidthAllocation::equal(&s), &s, EvalOptions::default()).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn objective_is_mean_of_makespan_plus_upload(seed in 0u64..10_000) {
        let (s, x) = random_case(seed);
        let r = evaluate(&x, &BandwidthAllocation::equal(&s), &s, EvalOptions::default()).unwrap();
        let m = r.tasks.iter().map(|t| t.makespan_s + t.upload_s).sum::<f64>() / r.tasks.len() as f64;
        prop_assert!((r.objective_s - m).abs() <= 1e-12 * m);
        for (t, task) in r.tasks.iter().enumerate() {
            let d = &task.sub_tasks[0];
            prop_assert_eq!(d.start_s, s.tasks[t].release_time_s);
            prop_assert_eq!(d.finish_s, d.start_s);
            for st in &task.sub_tasks {
                prop_assert!(st.ready_s >= st.arrival_s && st.finish_s >= st.start_s);
            }
        }
    }

    #[test]
    fn penalty_dominates_objective(seed in 0u64..10_000, budget in 0.0f64..60_000.0, lambda in 0.0f64..1.0) {
        let (mut s, x) = random_case(seed);
        for u in &mut s.uavs {
            u.energy_budget_j = budget;
        }
        let r = evaluate(&x, &BandwidthAllocation::equal(&s), &s, EvalOptions::default()).unwrap();
        let low = PenaltyConfig { lambda, mode: PenaltyMode::Penalty };
        let high = PenaltyConfig { lambda: lambda + 0.5, mode: PenaltyMode::Penalty };
        let p = penalized_objective(&r, &low, &s.uavs);
        prop_assert!(p >= r.objective_s);
        prop_assert!(penalized_objective(&r, &high, &s.uavs) >= p);
        if r.feasible {
            prop_assert_eq!(p, r.objective_s);
        } else {
            prop_assert!(penalized_objective(&r, &high, &s.uavs) > r.objective_s);
        }
    }

    #[test]
    fn growing_a_subtask_never_shortens_the_objective(seed in 0u64..10_000, pick in any::<prop::sample::Index>(), grow in 1.0f64..3.0) {
        let (s, x) = random_case(seed);
        let beta = BandwidthAllocation::equal(&s);
        let base = evaluate(&x, &beta, &s, EvalOptions::default()).unwrap().objective_s;
        let mut bigger = s.clone();
        let t = pick.index(bigger.tasks.len());
        let j = 1 + pick.index(bigger.tasks[t].sub_tasks.len() - 1);
        bigger.tasks[t].sub_tasks[j].input_size_bits *= grow;
        let grown = evaluate(&x, &beta, &bigger, EvalOptions::default()).unwrap().objective_s;
        prop_assert!(grown >= base - 1e-12 * base);
    }

    #[test]
    fn energy_ledger_is_consistent(seed in 0u64..10_000) {
        let (s, x) = random_case(seed);
        let r = evaluate(&x, &BandwidthAllocation::equal(&s), &s, EvalOptions::default()).unwrap();
        for e in &r.energy.uavs {
            for part in [e.exec_j, e.forward_j, e.report_j, e.hover_j] {
                prop_assert!(part >= 0.0);
            }
            let sum = e.exec_j + e.forward_j + e.report_j + e.hover_j;
            prop_assert!((sum - e.total_j).abs() <= 1e-12 * e.total_j);
        }
    }
}
