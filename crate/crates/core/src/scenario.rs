//! World description: UAVs, users, task DAGs and physical constants.
//!
//! Everything here is plain data. [`generate_scenario`] and
//! [`generate_task_dag`] build instances reproducibly from a seed, and
//! [`validate_scenario`] reports every broken invariant as data.
//!
//! Scenarios are persisted as TOML. Field names carry their units
//! (`_bits`, `_hz`, `_m`, `_dbm`, `_j`, `_s`) and a `schema_version` key is
//! mandatory.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seeding::{
    child_rng, child_seed, DOMAIN_ACTIVE, DOMAIN_LAYOUT, DOMAIN_TASKS, DOMAIN_USERS,
};

pub const SCHEMA_VERSION: u32 = 1;

/// Which free-space term a path-loss formula uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum LossForm {
    /// The closed forms exactly as the model states them: `2n·log2(4π d f / c)`
    /// for air-to-ground and `(2π/c)^2` inside the UAV-to-UAV term.
    #[default]
    AsPrinted,
    /// Textbook free-space loss: `10n·log10(4π d f / c)` and `(4π/c)^2`.
    StandardFspl,
}

/// How the configured noise power enters user uplink SNRs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseModel {
    /// `noise_power_dbm` is the total noise power.
    #[default]
    Total,
    /// `noise_power_dbm` is a density per Hz, scaled by the allocated bandwidth.
    PerHz,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PhysicsConstants {
    pub speed_of_light_m_per_s: f64,
    pub carrier_freq_a2g_hz: f64,
    pub carrier_freq_mmwave_hz: f64,
    pub noise_power_dbm: f64,
    pub path_loss_exponent: f64,
    pub loss_los_db: f64,
    pub loss_nlos_db: f64,
    pub los_env_c: f64,
    pub los_env_d: f64,
    pub attenuation_los_db: f64,
    pub air_density_kg_per_m3: f64,
    /// J·s²/cycle³.
    pub switched_capacitance: f64,
    #[serde(default)]
    pub a2g_loss_form: LossForm,
    #[serde(default)]
    pub u2u_loss_form: LossForm,
    #[serde(default)]
    pub noise_model: NoiseModel,
}

impl Default for PhysicsConstants {
    fn default() -> Self {
        Self {
            speed_of_light_m_per_s: 3.0e8,
            carrier_freq_a2g_hz: 2.0e9,
            carrier_freq_mmwave_hz: 28.0e9,
            noise_power_dbm: -174.0,
            path_loss_exponent: 2.0,
            loss_los_db: 1.0,
            loss_nlos_db: 20.0,
            los_env_c: 11.9,
            los_env_d: 0.1,
            attenuation_los_db: 0.0,
            air_density_kg_per_m3: 1.225,
            switched_capacitance: 5.0e-27,
            a2g_loss_form: LossForm::AsPrinted,
            u2u_loss_form: LossForm::AsPrinted,
            noise_model: NoiseModel::Total,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HoverParams {
    pub thrust_n: f64,
    /// In (0, 1].
    pub power_efficiency: f64,
    pub rotor_count: u32,
    pub rotor_diameter_m: f64,
}

impl Default for HoverParams {
    fn default() -> Self {
        Self {
            thrust_n: 30.0,
            power_efficiency: 0.7,
            rotor_count: 4,
            rotor_diameter_m: 0.254,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UavNode {
    pub id: usize,
    pub position_m: [f64; 3],
    pub max_compute_cycles_per_s: f64,
    pub tx_power_u2u_dbm: f64,
    pub tx_power_to_bs_dbm: f64,
    pub antenna_gain_tx: f64,
    pub antenna_gain_rx_bs: f64,
    pub bandwidth_users_hz: f64,
    pub bandwidth_u2u_hz: f64,
    pub bandwidth_to_bs_hz: f64,
    pub energy_budget_j: f64,
    pub hover: HoverParams,
    pub info_payload_bits: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserNode {
    pub id: usize,
    pub position_m: [f64; 2],
    pub tx_power_dbm: f64,
    pub associated_uav: usize,
    pub active: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Dependency {
    pub from: usize,
    pub bits: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubTask {
    pub index: usize,
    pub input_size_bits: f64,
    #[serde(default)]
    pub predecessors: Vec<Dependency>,
    #[serde(default)]
    pub is_dummy: bool,
}

/// One user's job. `sub_tasks[0]` is the dummy root by construction of the
/// generator, but any position is accepted as long as exactly one dummy exists.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskGraph {
    pub owner_user: usize,
    pub cycles_per_bit: f64,
    pub release_time_s: f64,
    pub sub_tasks: Vec<SubTask>,
}

impl TaskGraph {
    pub fn dummy_index(&self) -> Option<usize> {
        self.sub_tasks.iter().position(|s| s.is_dummy)
    }

    /// Number of real (non-dummy) sub-tasks.
    pub fn real_count(&self) -> usize {
        self.sub_tasks.iter().filter(|s| !s.is_dummy).count()
    }

    /// Sum of the real sub-tasks' input sizes.
    pub fn total_input_bits(&self) -> f64 {
        self.sub_tasks
            .iter()
            .filter(|s| !s.is_dummy)
            .map(|s| s.input_size_bits)
            .sum()
    }

    /// Kahn's algorithm with the dummy forced first and the smallest ready
    /// index taken next, so the order is deterministic.
    pub fn topological_order(&self) -> Result<Vec<usize>> {
        let n = self.sub_tasks.len();
        let mut indegree = vec![0usize; n];
        let mut successors = vec![Vec::new(); n];
        for (j, st) in self.sub_tasks.iter().enumerate() {
            for dep in &st.predecessors {
                if dep.from >= n || dep.from == j {
                    return Err(Error::CyclicGraph {
                        user: self.owner_user,
                    });
                }
                indegree[j] += 1;
                successors[dep.from].push(j);
            }
        }
        let mut ready: BTreeSet<usize> = (0..n).filter(|&j| indegree[j] == 0).collect();
        let mut order = Vec::with_capacity(n);
        if let Some(d) = self.dummy_index() {
            if ready.remove(&d) {
                order.push(d);
                for &s in &successors[d] {
                    indegree[s] -= 1;
                    if indegree[s] == 0 {
                        ready.insert(s);
                    }
                }
            }
        }
        while let Some(j) = ready.pop_first() {
            order.push(j);
            for &s in &successors[j] {
                indegree[s] -= 1;
                if indegree[s] == 0 {
                    ready.insert(s);
                }
            }
        }
        if order.len() != n {
            return Err(Error::CyclicGraph {
                user: self.owner_user,
            });
        }
        Ok(order)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub schema_version: u32,
    pub region_m: [f64; 2],
    pub bs_position_m: [f64; 2],
    pub physics: PhysicsConstants,
    pub uavs: Vec<UavNode>,
    pub users: Vec<UserNode>,
    pub tasks: Vec<TaskGraph>,
}

impl Scenario {
    pub fn uav_count(&self) -> usize {
        self.uavs.len()
    }

    /// Total number of real sub-tasks over all tasks (the decision length).
    pub fn decision_len(&self) -> usize {
        self.tasks.iter().map(TaskGraph::real_count).sum()
    }

    pub fn users_of(&self, uav: usize) -> impl Iterator<Item = &UserNode> {
        self.users.iter().filter(move |u| u.associated_uav == uav)
    }

    pub fn task_of_user(&self, user: usize) -> Option<&TaskGraph> {
        self.tasks.iter().find(|t| t.owner_user == user)
    }

    /// UAV serving the owner of `task`.
    pub fn home_uav(&self, task: &TaskGraph) -> usize {
        self.users[task.owner_user].associated_uav
    }

    pub fn to_toml_string(&self) -> Result<String> {
        Ok(toml::to_string_pretty(self)?)
    }

    pub fn from_toml_str(s: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Version {
            schema_version: Option<u32>,
        }
        let v: Version = toml::from_str(s)?;
        match v.schema_version {
            Some(SCHEMA_VERSION) => Ok(toml::from_str(s)?),
            Some(found) => Err(Error::SchemaVersion {
                found,
                expected: SCHEMA_VERSION,
            }),
            None => Err(Error::InvalidParameter(
                "scenario file lacks schema_version".into(),
            )),
        }
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_toml_string()?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }
}

// ---------------------------------------------------------------------------
// Generation
// ---------------------------------------------------------------------------

/// Layered random DAG settings. Sizes are given in MB and Kb and converted with
/// the two `bits_per_*` factors, so the unit reading can be overridden.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TaskParams {
    pub subtasks: usize,
    pub layer_mean: f64,
    pub layer_var: f64,
    pub size_mean_mb: f64,
    /// Spread of the sub-task size, in MB (the standard deviation).
    pub size_sd_mb: f64,
    pub dep_range_kb: [f64; 2],
    pub bits_per_megabyte: f64,
    pub bits_per_kilobit: f64,
    pub cycles_per_bit: f64,
    pub release_time_s: f64,
}

impl Default for TaskParams {
    fn default() -> Self {
        Self {
            subtasks: 10,
            layer_mean: 2.0,
            layer_var: 1.0,
            size_mean_mb: 6.0,
            size_sd_mb: 1.0,
            dep_range_kb: [150.0, 250.0],
            bits_per_megabyte: 8.0e6,
            bits_per_kilobit: 1.0e3,
            cycles_per_bit: DEFAULT_CYCLES_PER_BIT,
            release_time_s: 0.0,
        }
    }
}

/// CPU cycles per input bit. With 1000 cycles/bit the hover energy of even
/// the best decision is far beyond `2000 J` per sub-task; at 20 the budget
/// starts to bind around 15 to 20 sub-tasks per task and is still reachable.
pub const DEFAULT_CYCLES_PER_BIT: f64 = 20.0;

/// How active users (the ones with a task) are picked.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ActiveUsers {
    /// `count` users drawn uniformly over the whole network.
    Total { count: usize },
    /// The first `ceil(fraction · n_v)` users of every UAV.
    PerUav { fraction: f64 },
}

/// Transmit and platform parameters shared by every generated UAV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct UavDefaults {
    pub tx_power_u2u_dbm: f64,
    pub tx_power_to_bs_dbm: f64,
    pub antenna_gain_tx: f64,
    pub antenna_gain_rx_bs: f64,
    pub bandwidth_users_hz: f64,
    pub bandwidth_u2u_hz: f64,
    pub bandwidth_to_bs_hz: f64,
    pub info_payload_bits: f64,
    pub hover: HoverParams,
}

impl Default for UavDefaults {
    fn default() -> Self {
        Self {
            tx_power_u2u_dbm: 30.0,
            tx_power_to_bs_dbm: 30.0,
            antenna_gain_tx: 10.0,
            antenna_gain_rx_bs: 10.0,
            bandwidth_users_hz: 3.0e6,
            bandwidth_u2u_hz: 8.0e6,
            bandwidth_to_bs_hz: 100.0e6,
            info_payload_bits: 1.0e6,
            hover: HoverParams::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScenarioParams {
    pub region_m: [f64; 2],
    pub uav_count: usize,
    pub users_per_uav: [usize; 2],
    pub altitude_m: f64,
    pub max_compute_range_hz: [f64; 2],
    pub user_tx_power_dbm: f64,
    /// Energy budget per UAV is this times the per-task sub-task count.
    pub energy_per_subtask_j: f64,
    pub active: ActiveUsers,
    pub task: TaskParams,
    pub uav: UavDefaults,
    pub physics: PhysicsConstants,
}

impl Default for ScenarioParams {
    fn default() -> Self {
        Self {
            region_m: [1000.0, 1000.0],
            uav_count: 4,
            users_per_uav: [2, 10],
            altitude_m: 50.0,
            max_compute_range_hz: [800.0e6, 1000.0e6],
            user_tx_power_dbm: 23.0,
            energy_per_subtask_j: 2000.0,
            active: ActiveUsers::Total { count: 3 },
            task: TaskParams::default(),
            uav: UavDefaults::default(),
            physics: PhysicsConstants::default(),
        }
    }
}

impl ScenarioParams {
    fn check(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.to_string()));
        if !(self.region_m[0] > 0.0 && self.region_m[1] > 0.0) {
            return bad("region must have positive area");
        }
        if self.uav_count == 0 {
            return bad("uav_count must be at least 1");
        }
        let [lo, hi] = self.users_per_uav;
        if lo == 0 || hi < lo {
            return bad("users_per_uav must satisfy 1 <= min <= max");
        }
        if !(self.altitude_m > 0.0) {
            return bad("altitude must be positive");
        }
        let [flo, fhi] = self.max_compute_range_hz;
        if !(flo > 0.0 && fhi >= flo) {
            return bad("max_compute_range_hz must satisfy 0 < min <= max");
        }
        if !(self.energy_per_subtask_j > 0.0) {
            return bad("energy_per_subtask_j must be positive");
        }
        match self.active {
            ActiveUsers::Total { count: 0 } => return bad("no active users"),
            ActiveUsers::PerUav { fraction } if !(fraction > 0.0 && fraction <= 1.0) => {
                return bad("active fraction must lie in (0, 1]")
            }
            _ => {}
        }
        self.task.check()
    }
}

impl TaskParams {
    fn check(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.to_string()));
        if self.subtasks == 0 {
            return bad("total_subtasks must be at least 1");
        }
        if !(self.layer_var >= 0.0 && self.size_sd_mb >= 0.0) {
            return bad("spreads must be nonnegative");
        }
        if !(self.dep_range_kb[0] >= 0.0 && self.dep_range_kb[1] >= self.dep_range_kb[0]) {
            return bad("dep_range_kb must satisfy 0 <= lo <= hi");
        }
        if !(self.cycles_per_bit > 0.0) {
            return bad("cycles_per_bit must be positive");
        }
        Ok(())
    }
}

/// Layered DAG generator. Layer widths follow `round(N(layer_mean, layer_var))`
/// floored at one node; every node past the first layer draws a uniformly
/// random nonempty subset of the previous layer as predecessors; the dummy
/// root is prepended at index 0 with zero-payload edges to the first layer.
pub fn generate_task_dag(seed: u64, owner_user: usize, params: &TaskParams) -> Result<TaskGraph> {
    params.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let width_dist = Normal::new(params.layer_mean, params.layer_var.sqrt())
        .map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let size_dist = Normal::new(
        params.size_mean_mb * params.bits_per_megabyte,
        params.size_sd_mb * params.bits_per_megabyte,
    )
    .map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let dep_lo = params.dep_range_kb[0] * params.bits_per_kilobit;
    let dep_hi = params.dep_range_kb[1] * params.bits_per_kilobit;

    let mut layers: Vec<Vec<usize>> = Vec::new();
    let mut next = 1usize;
    let mut remaining = params.subtasks;
    while remaining > 0 {
        let w = (width_dist.sample(&mut rng).round().max(1.0) as usize).min(remaining);
        layers.push((next..next + w).collect());
        next += w;
        remaining -= w;
    }

    let mut sub_tasks = Vec::with_capacity(params.subtasks + 1);
    sub_tasks.push(SubTask {
        index: 0,
        input_size_bits: 0.0,
        predecessors: Vec::new(),
        is_dummy: true,
    });
    for (l, layer) in layers.iter().enumerate() {
        for &j in layer {
            let input_size_bits = size_dist.sample(&mut rng).max(1.0);
            let predecessors = if l == 0 {
                vec![Dependency { from: 0, bits: 0.0 }]
            } else {
                let prev = &layers[l - 1];
                pick_nonempty_subset(&mut rng, prev.len())
                    .into_iter()
                    .map(|k| Dependency {
                        from: prev[k],
                        bits: if dep_hi > dep_lo {
                            rng.random_range(dep_lo..=dep_hi)
                        } else {
                            dep_lo
                        },
                    })
                    .collect()
            };
            sub_tasks.push(SubTask {
                index: j,
                input_size_bits,
                predecessors,
                is_dummy: false,
            });
        }
    }
    Ok(TaskGraph {
        owner_user,
        cycles_per_bit: params.cycles_per_bit,
        release_time_s: params.release_time_s,
        sub_tasks,
    })
}

fn pick_nonempty_subset<R: Rng>(rng: &mut R, k: usize) -> Vec<usize> {
    if k < 64 {
        let mask: u64 = rng.random_range(1..(1u64 << k));
        (0..k).filter(|i| mask >> i & 1 == 1).collect()
    } else {
        loop {
            let picked: Vec<usize> = (0..k).filter(|_| rng.random_bool(0.5)).collect();
            if !picked.is_empty() {
                return picked;
            }
        }
    }
}

/// Builds a scenario from `(seed, params)` alone.
///
/// The region is cut into a `ceil(sqrt V)`-column grid and UAV `v` hovers at
/// the center of cell `v`. Users are placed uniformly inside their UAV's cell
/// from a per-UAV stream, and tasks are seeded per `(uav, local user index)`,
/// so the first `n` users of a UAV are the same whatever the drawn count is.
pub fn generate_scenario(seed: u64, params: &ScenarioParams) -> Result<Scenario> {
    params.check()?;
    let v_count = params.uav_count;
    let cols = (v_count as f64).sqrt().ceil() as usize;
    let rows = v_count.div_ceil(cols);
    let cell_w = params.region_m[0] / cols as f64;
    let cell_h = params.region_m[1] / rows as f64;

    let mut layout = child_rng(seed, DOMAIN_LAYOUT, 0);
    let budget = params.energy_per_subtask_j * params.task.subtasks as f64;
    let mut uavs = Vec::with_capacity(v_count);
    let mut counts = Vec::with_capacity(v_count);
    for v in 0..v_count {
        let (cx, cy) = (v % cols, v / cols);
        let [flo, fhi] = params.max_compute_range_hz;
        let f = if fhi > flo {
            layout.random_range(flo..=fhi)
        } else {
            flo
        };
        let [lo, hi] = params.users_per_uav;
        counts.push(layout.random_range(lo..=hi));
        let d = &params.uav;
        uavs.push(UavNode {
            id: v,
            position_m: [
                (cx as f64 + 0.5) * cell_w,
                (cy as f64 + 0.5) * cell_h,
                params.altitude_m,
            ],
            max_compute_cycles_per_s: f,
            tx_power_u2u_dbm: d.tx_power_u2u_dbm,
            tx_power_to_bs_dbm: d.tx_power_to_bs_dbm,
            antenna_gain_tx: d.antenna_gain_tx,
            antenna_gain_rx_bs: d.antenna_gain_rx_bs,
            bandwidth_users_hz: d.bandwidth_users_hz,
            bandwidth_u2u_hz: d.bandwidth_u2u_hz,
            bandwidth_to_bs_hz: d.bandwidth_to_bs_hz,
            energy_budget_j: budget,
            hover: d.hover.clone(),
            info_payload_bits: d.info_payload_bits,
        });
    }

    // (global id, uav, local index)
    let mut users = Vec::new();
    let mut slots = Vec::new();
    for (v, &n) in counts.iter().enumerate() {
        let (cx, cy) = ((v % cols) as f64, (v / cols) as f64);
        let mut rng = child_rng(seed, DOMAIN_USERS, v as u64);
        for k in 0..n {
            let x = rng.random_range(cx * cell_w..(cx + 1.0) * cell_w);
            let y = rng.random_range(cy * cell_h..(cy + 1.0) * cell_h);
            slots.push((users.len(), v, k));
            users.push(UserNode {
                id: users.len(),
                position_m: [x, y],
                tx_power_dbm: params.user_tx_power_dbm,
                associated_uav: v,
                active: false,
            });
        }
    }

    match params.active {
        ActiveUsers::Total { count } => {
            if count > users.len() {
                return Err(Error::InvalidParameter(format!(
                    "{count} active users requested but only {} exist",
                    users.len()
                )));
            }
            let mut rng = child_rng(seed, DOMAIN_ACTIVE, 0);
            for i in sample(&mut rng, users.len(), count) {
                users[i].active = true;
            }
        }
        ActiveUsers::PerUav { fraction } => {
            for &(id, v, k) in &slots {
                let quota = (fraction * counts[v] as f64).ceil() as usize;
                users[id].active = k < quota;
            }
        }
    }

    let mut tasks = Vec::new();
    for &(id, v, k) in &slots {
        if users[id].active {
            let task_seed = child_seed(seed, DOMAIN_TASKS, ((v as u64) << 32) | k as u64);
            tasks.push(generate_task_dag(task_seed, id, &params.task)?);
        }
    }

    Ok(Scenario {
        schema_version: SCHEMA_VERSION,
        region_m: params.region_m,
        bs_position_m: [params.region_m[0] / 2.0, params.region_m[1] / 2.0],
        physics: params.physics.clone(),
        uavs,
        users,
        tasks,
    })
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Invariant {
    Schema,
    Physics,
    Uav,
    Association,
    UniqueMembership,
    Region,
    Dummy,
    Dag,
    SubTask,
    Task,
}

impl fmt::Display for Invariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Invariant::Schema => "schema",
            Invariant::Physics => "physics",
            Invariant::Uav => "uav",
            Invariant::Association => "association",
            Invariant::UniqueMembership => "unique-membership",
            Invariant::Region => "region",
            Invariant::Dummy => "dummy",
            Invariant::Dag => "DAG",
            Invariant::SubTask => "subtask",
            Invariant::Task => "task",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub entity: String,
    pub invariant: Invariant,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{}]: {}", self.entity, self.invariant, self.detail)
    }
}

struct Violations(Vec<Violation>);

impl Violations {
    fn push(&mut self, entity: impl Into<String>, invariant: Invariant, detail: impl Into<String>) {
        self.0.push(Violation {
            entity: entity.into(),
            invariant,
            detail: detail.into(),
        });
    }

    fn check(&mut self, ok: bool, entity: &str, invariant: Invariant, detail: &str) {
        if !ok {
            self.push(entity, invariant, detail);
        }
    }
}

fn check_physics(p: &PhysicsConstants, out: &mut Violations) {
    let positive = [
        ("speed_of_light_m_per_s", p.speed_of_light_m_per_s),
        ("carrier_freq_a2g_hz", p.carrier_freq_a2g_hz),
        ("carrier_freq_mmwave_hz", p.carrier_freq_mmwave_hz),
        ("los_env_c", p.los_env_c),
        ("los_env_d", p.los_env_d),
        ("air_density_kg_per_m3", p.air_density_kg_per_m3),
        ("switched_capacitance", p.switched_capacitance),
    ];
    for (name, value) in positive {
        out.check(value > 0.0 && value.is_finite(), "physics", Invariant::Physics, &format!("{name} must be positive"));
    }
    for (name, value) in [
        ("noise_power_dbm", p.noise_power_dbm),
        ("loss_los_db", p.loss_los_db),
        ("loss_nlos_db", p.loss_nlos_db),
        ("attenuation_los_db", p.attenuation_los_db),
    ] {
        out.check(value.is_finite(), "physics", Invariant::Physics, &format!("{name} must be finite"));
    }
    out.check(p.path_loss_exponent >= 2.0, "physics", Invariant::Physics, "path_loss_exponent must be >= 2");
}

fn check_uav(u: &UavNode, index: usize, out: &mut Violations) {
    let entity = format!("uav {index}");
    out.check(u.id == index, &entity, Invariant::Uav, "id must equal list position");
    out.check(u.position_m.iter().all(|c| c.is_finite()), &entity, Invariant::Uav, "position must be finite");
    out.check(u.position_m[2] > 0.0, &entity, Invariant::Uav, "altitude must be positive");
    out.check(u.max_compute_cycles_per_s > 0.0, &entity, Invariant::Uav, "max_compute must be positive");
    out.check(u.energy_budget_j > 0.0, &entity, Invariant::Uav, "energy_budget must be positive");
    out.check(
        u.hover.power_efficiency > 0.0 && u.hover.power_efficiency <= 1.0,
        &entity,
        Invariant::Uav,
        "power_efficiency must lie in (0, 1]",
    );
    out.check(
        u.hover.thrust_n > 0.0 && u.hover.rotor_count > 0 && u.hover.rotor_diameter_m > 0.0,
        &entity,
        Invariant::Uav,
        "hover parameters must be positive",
    );
    out.check(
        u.bandwidth_users_hz > 0.0 && u.bandwidth_u2u_hz > 0.0 && u.bandwidth_to_bs_hz > 0.0,
        &entity,
        Invariant::Uav,
        "bandwidths must be positive",
    );
    out.check(u.info_payload_bits >= 0.0, &entity, Invariant::Uav, "info payload must be nonnegative");
}

/// Structural checks on one task graph: the dummy root, payload signs and
/// acyclicity.
pub fn validate_task_graph(task: &TaskGraph) -> Vec<Violation> {
    let mut out = Violations(Vec::new());
    check_task(task, &mut out);
    out.0
}

fn check_task(task: &TaskGraph, out: &mut Violations) {
    let entity = format!("task of user {}", task.owner_user);
    let dummies: Vec<&SubTask> = task.sub_tasks.iter().filter(|s| s.is_dummy).collect();
    if dummies.len() != 1 {
        out.push(&entity, Invariant::Dummy, format!("expected exactly one dummy root, found {}", dummies.len()));
    }
    for d in dummies {
        out.check(
            d.input_size_bits == 0.0 && d.predecessors.is_empty(),
            &entity,
            Invariant::Dummy,
            "dummy must have zero input and no predecessors",
        );
    }
    out.check(task.cycles_per_bit > 0.0, &entity, Invariant::Task, "cycles_per_bit must be positive");
    out.check(
        task.release_time_s.is_finite() && task.release_time_s >= 0.0,
        &entity,
        Invariant::Task,
        "release time must be finite and nonnegative",
    );
    let n = task.sub_tasks.len();
    let dummy = task.dummy_index();
    let mut structural_ok = true;
    for (j, st) in task.sub_tasks.iter().enumerate() {
        let e = format!("{entity}, sub-task {j}");
        out.check(st.index == j, &e, Invariant::SubTask, "index must equal list position");
        if !st.is_dummy {
            out.check(st.input_size_bits > 0.0, &e, Invariant::SubTask, "input size must be positive");
        }
        for dep in &st.predecessors {
            if dep.from >= n {
                structural_ok = false;
                out.push(&e, Invariant::Dag, format!("predecessor {} out of range", dep.from));
            }
            out.check(dep.bits >= 0.0, &e, Invariant::SubTask, "dependency payload must be nonnegative");
            if Some(dep.from) == dummy {
                out.check(dep.bits == 0.0, &e, Invariant::Dummy, "dummy edges carry zero payload");
            }
        }
    }
    if structural_ok && task.topological_order().is_err() {
        out.push(&entity, Invariant::Dag, "graph has a cycle");
    }
}

/// Returns every broken invariant; an empty list means the scenario is sound.
pub fn validate_scenario(s: &Scenario) -> Vec<Violation> {
    let mut out = Violations(Vec::new());
    out.check(s.schema_version == SCHEMA_VERSION, "scenario", Invariant::Schema, "unsupported schema version");
    check_physics(&s.physics, &mut out);
    out.check(!s.uavs.is_empty(), "scenario", Invariant::Uav, "at least one UAV required");
    for (i, u) in s.uavs.iter().enumerate() {
        check_uav(u, i, &mut out);
    }
    let [w, h] = s.region_m;
    let inside = |x: f64, y: f64| (0.0..=w).contains(&x) && (0.0..=h).contains(&y);
    out.check(w > 0.0 && h > 0.0, "scenario", Invariant::Region, "region must have positive area");
    out.check(inside(s.bs_position_m[0], s.bs_position_m[1]), "base station", Invariant::Region, "outside region");
    for u in &s.uavs {
        out.check(
            inside(u.position_m[0], u.position_m[1]),
            &format!("uav {}", u.id),
            Invariant::Region,
            "outside region",
        );
    }
    for (i, user) in s.users.iter().enumerate() {
        let entity = format!("user {i}");
        out.check(user.id == i, &entity, Invariant::UniqueMembership, "id must equal list position");
        out.check(user.associated_uav < s.uavs.len(), &entity, Invariant::Association, "associated UAV does not exist");
        out.check(inside(user.position_m[0], user.position_m[1]), &entity, Invariant::Region, "outside region");
    }
    let mut owners = BTreeSet::new();
    for task in &s.tasks {
        let entity = format!("task of user {}", task.owner_user);
        match s.users.get(task.owner_user) {
            None => out.push(&entity, Invariant::Association, "owner user does not exist"),
            Some(u) => out.check(u.active, &entity, Invariant::Task, "owner must be an active user"),
        }
        if !owners.insert(task.owner_user) {
            out.push(&entity, Invariant::UniqueMembership, "user owns more than one task");
        }
        check_task(task, &mut out);
    }
    for u in s.users.iter().filter(|u| u.active) {
        out.check(
            owners.contains(&u.id),
            &format!("user {}", u.id),
            Invariant::Task,
            "active user has no task",
        );
    }
    out.0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_params() -> ScenarioParams {
        ScenarioParams::default()
    }

    #[test]
    fn same_seed_gives_identical_scenarios() {
        let a = generate_scenario(42, &small_params()).unwrap();
        let b = generate_scenario(42, &small_params()).unwrap();
        assert_eq!(a.to_toml_string().unwrap(), b.to_toml_string().unwrap());
        let c = generate_scenario(43, &small_params()).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn four_uavs_at_subregion_centers() {
        let s = generate_scenario(1, &small_params()).unwrap();
        let centers: Vec<[f64; 3]> = s.uavs.iter().map(|u| u.position_m).collect();
        assert_eq!(
            centers,
            vec![
                [250.0, 250.0, 50.0],
                [750.0, 250.0, 50.0],
                [250.0, 750.0, 50.0],
                [750.0, 750.0, 50.0]
            ]
        );
        assert_eq!(s.bs_position_m, [500.0, 500.0]);
    }

    #[test]
    fn users_per_uav_within_range_and_inside_cell() {
        for seed in 0..50 {
            let s = generate_scenario(seed, &small_params()).unwrap();
            for v in 0..4 {
                let n = s.users_of(v).count();
                assert!((2..=10).contains(&n), "uav {v} has {n} users");
                let [cx, cy, _] = s.uavs[v].position_m;
                for u in s.users_of(v) {
                    assert!((u.position_m[0] - cx).abs() <= 250.0);
                    assert!((u.position_m[1] - cy).abs() <= 250.0);
                }
            }
            assert_eq!(s.tasks.len(), 3);
            assert!(validate_scenario(&s).is_empty());
        }
    }

    #[test]
    fn rejects_degenerate_parameters() {
        let mut p = small_params();
        p.region_m = [0.0, 1000.0];
        assert!(generate_scenario(0, &p).is_err());
        let mut p = small_params();
        p.users_per_uav = [0, 0];
        assert!(generate_scenario(0, &p).is_err());
        let mut p = small_params();
        p.uav_count = 0;
        assert!(generate_scenario(0, &p).is_err());
    }

    #[test]
    fn dag_has_dummy_root_and_requested_size() {
        let t = generate_task_dag(7, 0, &TaskParams::default()).unwrap();
        assert_eq!(t.sub_tasks.len(), 11);
        let d = &t.sub_tasks[0];
        assert!(d.is_dummy);
        assert_eq!(d.input_size_bits, 0.0);
        assert!(d.predecessors.is_empty());
        for st in &t.sub_tasks[1..] {
            assert!(!st.predecessors.is_empty());
            for dep in &st.predecessors {
                if dep.from == 0 {
                    assert_eq!(dep.bits, 0.0);
                } else {
                    assert!((150_000.0..=250_000.0).contains(&dep.bits));
                }
            }
        }
    }

    #[test]
    fn cyclic_graph_is_reported() {
        let mut s = generate_scenario(3, &small_params()).unwrap();
        let t = &mut s.tasks[0];
        let last = t.sub_tasks.len() - 1;
        t.sub_tasks[1].predecessors.push(Dependency { from: last, bits: 1.0 });
        // make sure there is a path 1 -> ... -> last
        t.sub_tasks[last].predecessors.push(Dependency { from: 1, bits: 1.0 });
        let v = validate_scenario(&s);
        assert!(v.iter().any(|x| x.invariant == Invariant::Dag), "{v:?}");
        assert_eq!(Invariant::Dag.to_string(), "DAG");
    }

    #[test]
    fn dangling_association_is_reported() {
        let mut s = generate_scenario(3, &small_params()).unwrap();
        s.users[0].associated_uav = 99;
        let v = validate_scenario(&s);
        assert!(v.iter().any(|x| x.invariant == Invariant::Association));
        assert_eq!(Invariant::Association.to_string(), "association");
    }

    #[test]
    fn toml_round_trip_and_version_check() {
        let s = generate_scenario(11, &small_params()).unwrap();
        let text = s.to_toml_string().unwrap();
        assert!(text.contains("schema_version = 1"));
        let back = Scenario::from_toml_str(&text).unwrap();
        assert_eq!(back, s);
        let bumped = text.replace("schema_version = 1", "schema_version = 9");
        assert!(matches!(
            Scenario::from_toml_str(&bumped),
            Err(Error::SchemaVersion { found: 9, .. })
        ));
        let missing = text.replace("schema_version = 1\n", "");
        assert!(Scenario::from_toml_str(&missing).is_err());
    }

    #[test]
    fn per_uav_activity_is_nested_in_user_count() {
        let mut p = small_params();
        p.active = ActiveUsers::PerUav { fraction: 0.5 };
        p.users_per_uav = [4, 4];
        let four = generate_scenario(5, &p).unwrap();
        p.users_per_uav = [6, 6];
        let six = generate_scenario(5, &p).unwrap();
        for v in 0..4 {
            let a: Vec<_> = four.users_of(v).collect();
            let b: Vec<_> = six.users_of(v).collect();
            for (x, y) in a.iter().zip(&b) {
                assert_eq!(x.position_m, y.position_m);
            }
            assert_eq!(a.iter().filter(|u| u.active).count(), 2);
            assert_eq!(b.iter().filter(|u| u.active).count(), 3);
        }
    }
}
