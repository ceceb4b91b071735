//! Independent oracles and fixtures shared by the integration tests.

#![allow(dead_code)]

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use uavoffload::channel::BandwidthAllocation;
use uavoffload::evaluator::OffloadDecision;
use uavoffload::scenario::{ActiveUsers, Scenario, ScenarioParams};
use uavoffload::timing::Links;

pub fn median(v: &[f64]) -> f64 {
    let mut v = v.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

/// Three UAVs, two active users with three sub-tasks each: `3^6 = 729` decisions.
pub fn small_params() -> ScenarioParams {
    let mut p = ScenarioParams::default();
    p.uav_count = 3;
    p.task.subtasks = 3;
    p.active = ActiveUsers::Total { count: 2 };
    p
}

/// Start and finish time of every sub-task, indexed `[task][sub-task]`.
#[derive(Debug, Clone)]
pub struct SimTimes {
    pub start: Vec<Vec<f64>>,
    pub finish: Vec<Vec<f64>>,
}

#[derive(Debug, PartialEq)]
struct Event {
    time: f64,
    seq: u64,
    task: usize,
    node: usize,
    kind: EventKind,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum EventKind {
    InputArrived,
    PayloadArrived,
    Finished,
}

impl Eq for Event {}

impl Ord for Event {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on (time, seq)
        other
            .time
            .total_cmp(&self.time)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Upload order: repeatedly take the lowest-index sub-task whose
/// predecessors have all been taken.
fn upload_order(preds: &[Vec<usize>]) -> Vec<usize> {
    let n = preds.len();
    let mut taken = vec![false; n];
    let mut order = Vec::with_capacity(n);
    while order.len() < n {
        let next = (0..n)
            .find(|&j| !taken[j] && preds[j].iter().all(|&p| taken[p]))
            .expect("acyclic");
        taken[next] = true;
        order.push(next);
    }
    order
}

/// Discrete-event simulation of one decision under cumulative uploads.
///
/// Every sub-task waits for its input and for one payload per predecessor;
/// it starts when the last of those events fires and finishes after
/// `cycles · H / share` with `share = H / (bits on that UAV) · F_max`.
pub fn simulate(scenario: &Scenario, decision: &OffloadDecision, beta: &BandwidthAllocation) -> SimTimes {
    let links = Links::new(scenario, beta).expect("valid allocation");
    let v = scenario.uav_count();

    let mut where_: Vec<Vec<Option<usize>>> = Vec::new();
    let mut k = 0;
    for t in &scenario.tasks {
        where_.push(
            t.sub_tasks
                .iter()
                .map(|s| {
                    if s.is_dummy {
                        None
                    } else {
                        k += 1;
                        Some(decision.0[k - 1])
                    }
                })
                .collect(),
        );
    }
    let mut bits_on = vec![0.0; v];
    for (t, task) in scenario.tasks.iter().enumerate() {
        for (j, s) in task.sub_tasks.iter().enumerate() {
            if let Some(u) = where_[t][j] {
                bits_on[u] += s.input_size_bits;
            }
        }
    }

    let mut heap = BinaryHeap::new();
    let mut seq = 0u64;
    let mut push = |heap: &mut BinaryHeap<Event>, time, task, node, kind| {
        seq += 1;
        heap.push(Event { time, seq, task, node, kind });
    };

    let mut waiting: Vec<Vec<usize>> = Vec::new();
    let mut start = Vec::new();
    let mut finish = Vec::new();
    let mut succ: Vec<Vec<Vec<(usize, f64)>>> = Vec::new();
    for (t, task) in scenario.tasks.iter().enumerate() {
        let n = task.sub_tasks.len();
        let preds: Vec<Vec<usize>> = task
            .sub_tasks
            .iter()
            .map(|s| s.predecessors.iter().map(|d| d.from).collect())
            .collect();
        let mut s_list = vec![Vec::new(); n];
        for (j, s) in task.sub_tasks.iter().enumerate() {
            for d in &s.predecessors {
                s_list[d.from].push((j, d.bits));
            }
        }
        succ.push(s_list);
        waiting.push(task.sub_tasks.iter().map(|s| s.predecessors.len() + usize::from(!s.is_dummy)).collect());
        start.push(vec![f64::NAN; n]);
        finish.push(vec![f64::NAN; n]);

        let home = scenario.users[task.owner_user].associated_uav;
        let mut clock = task.release_time_s;
        for j in upload_order(&preds) {
            let s = &task.sub_tasks[j];
            if s.is_dummy {
                continue;
            }
            clock += s.input_size_bits / links.uplink_bps[t];
            let dest = where_[t][j].unwrap();
            let arrive = if dest == home {
                clock
            } else {
                clock + s.input_size_bits / links.u2u_bps[home][dest]
            };
            push(&mut heap, arrive, t, j, EventKind::InputArrived);
        }
        for (j, s) in task.sub_tasks.iter().enumerate() {
            if s.is_dummy && s.predecessors.is_empty() {
                start[t][j] = task.release_time_s;
                push(&mut heap, task.release_time_s, t, j, EventKind::Finished);
            }
        }
    }

    while let Some(e) = heap.pop() {
        let (t, j) = (e.task, e.node);
        match e.kind {
            EventKind::Finished => {
                finish[t][j] = e.time;
                for &(s, bits) in &succ[t][j] {
                    let delay = match (where_[t][j], where_[t][s]) {
                        (Some(a), Some(b)) if a != b && bits > 0.0 => bits / links.u2u_bps[a][b],
                        _ => 0.0,
                    };
                    push(&mut heap, e.time + delay, t, s, EventKind::PayloadArrived);
                }
            }
            EventKind::InputArrived | EventKind::PayloadArrived => {
                waiting[t][j] -= 1;
                if waiting[t][j] == 0 {
                    start[t][j] = e.time;
                    let task = &scenario.tasks[t];
                    let s = &task.sub_tasks[j];
                    let exec = match where_[t][j] {
                        Some(u) => {
                            let share = s.input_size_bits / bits_on[u] * scenario.uavs[u].max_compute_cycles_per_s;
                            task.cycles_per_bit * s.input_size_bits / share
                        }
                        None => 0.0,
                    };
                    push(&mut heap, e.time + exec, t, j, EventKind::Finished);
                }
            }
        }
    }
    SimTimes { start, finish }
}

/// Minimizes `Σ a_u / β_u` over `{β ≥ 0, Σ β = 1}` by projected gradient
/// descent with backtracking.
pub fn projected_gradient(a: &[f64]) -> Vec<f64> {
    let n = a.len();
    let f = |b: &[f64]| -> f64 { a.iter().zip(b).map(|(ai, bi)| ai / bi).sum() };
    let mut b = vec![1.0 / n as f64; n];
    let mut step = 1e-3;
    for _ in 0..200_000 {
        let g: Vec<f64> = a.iter().zip(&b).map(|(ai, bi)| -ai / (bi * bi)).collect();
        let fb = f(&b);
        let mut moved = false;
        let mut s = step * 2.0;
        while s > 1e-30 {
            let trial: Vec<f64> = b.iter().zip(&g).map(|(bi, gi)| bi - s * gi).collect();
            let p = project_simplex(&trial);
            if p.iter().all(|&x| x > 0.0) {
                let dec: f64 = g.iter().zip(p.iter().zip(&b)).map(|(gi, (pi, bi))| gi * (pi - bi)).sum();
                if f(&p) <= fb + 1e-4 * dec {
                    let change = p.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
                    b = p;
                    step = s;
                    moved = change > 1e-15;
                    break;
                }
            }
            s *= 0.5;
        }
        if !moved {
            break;
        }
    }
    b
}

/// Euclidean projection onto the probability simplex.
pub fn project_simplex(y: &[f64]) -> Vec<f64> {
    let mut u = y.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (i, ui) in u.iter().enumerate() {
        cum += ui;
        let t = (cum - 1.0) / (i + 1) as f64;
        if ui - t > 0.0 {
            theta = t;
        }
    }
    y.iter().map(|yi| (yi - theta).max(0.0)).collect()
}
