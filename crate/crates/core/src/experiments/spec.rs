//! Experiment specification files.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluator::{EnergyMode, PenaltyMode, UploadModel};
use crate::scenario::{Scenario, ScenarioParams};
use crate::seeding::{child_seed, DOMAIN_REPLICATION};
use crate::solvers::{Allocator, SolverKind, DEFAULT_STATE_CAP};

/// Environment variable naming the default output directory.
pub const OUTPUT_DIR_ENV: &str = "UAVDAG_OUTPUT_DIR";
pub const DEFAULT_OUTPUT_DIR: &str = "results";

/// Where each cell's scenario comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "kebab-case")]
pub enum ScenarioSource {
    /// Scenario file, relative to the spec file.
    File { path: PathBuf },
    /// A scenario embedded in the spec; manifests always use this form.
    Inline { scenario: Box<Scenario> },
    /// Generated per cell. With `scenario_seed` every cell shares one
    /// scenario and only the solver seed varies; without it the run seed
    /// drives both.
    Generate {
        #[serde(default)]
        params: ScenarioParams,
        #[serde(default)]
        scenario_seed: Option<u64>,
    },
}

/// The swept parameter and its values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", content = "values", rename_all = "snake_case")]
pub enum Axis {
    Agents(Vec<usize>),
    /// Users per UAV; every UAV gets exactly this many.
    Users(Vec<usize>),
    /// Real sub-tasks per task.
    Subtasks(Vec<usize>),
    PenaltyLambda(Vec<f64>),
    EnergyMode(Vec<EnergyMode>),
    Allocator(Vec<Allocator>),
    Solver(Vec<SolverKind>),
}

impl Axis {
    pub fn name(&self) -> &'static str {
        match self {
            Axis::Agents(_) => "agents",
            Axis::Users(_) => "users",
            Axis::Subtasks(_) => "subtasks",
            Axis::PenaltyLambda(_) => "penalty_lambda",
            Axis::EnergyMode(_) => "energy_mode",
            Axis::Allocator(_) => "allocator",
            Axis::Solver(_) => "solver",
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Axis::Agents(v) | Axis::Users(v) | Axis::Subtasks(v) => v.len(),
            Axis::PenaltyLambda(v) => v.len(),
            Axis::EnergyMode(v) => v.len(),
            Axis::Allocator(v) => v.len(),
            Axis::Solver(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Display form of value `i`, as written to result files.
    pub fn label(&self, i: usize) -> String {
        match self {
            Axis::Agents(v) | Axis::Users(v) | Axis::Subtasks(v) => v[i].to_string(),
            Axis::PenaltyLambda(v) => v[i].to_string(),
            Axis::EnergyMode(v) => match v[i] {
                EnergyMode::Limited => "limited".into(),
                EnergyMode::Unlimited => "unlimited".into(),
            },
            Axis::Allocator(v) => v[i].name().into(),
            Axis::Solver(v) => v[i].name().into(),
        }
    }
}

/// One compared scheme. The axis overrides whichever field it sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scheme {
    pub solver: SolverKind,
    pub allocator: Allocator,
    #[serde(default)]
    pub penalty_mode: PenaltyMode,
    #[serde(default)]
    pub energy_mode: EnergyMode,
}

impl Scheme {
    /// `solver-allocator`, suffixed with `-hard` / `-unlimited` when those
    /// modes are selected. Safe as a file name.
    pub fn label(&self) -> String {
        let mut s = format!("{}-{}", self.solver.name(), self.allocator.name());
        if self.penalty_mode == PenaltyMode::Hard {
            s.push_str("-hard");
        }
        if self.energy_mode == EnergyMode::Unlimited {
            s.push_str("-unlimited");
        }
        s
    }
}

/// Solver settings shared by every cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverSettings {
    pub agents: usize,
    pub max_iter: usize,
    pub spiral_b: f64,
    pub lambda: f64,
    pub upload_model: UploadModel,
    pub max_outer: usize,
    pub tol: f64,
    pub state_cap: u64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            agents: 100,
            max_iter: 50,
            spiral_b: 1.0,
            lambda: 0.1,
            upload_model: UploadModel::Cumulative,
            max_outer: 10,
            tol: 1e-6,
            state_cap: DEFAULT_STATE_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub id: String,
    pub scenario: ScenarioSource,
    pub axis: Axis,
    pub schemes: Vec<Scheme>,
    /// Explicit run seeds. When absent, `replications` seeds are derived
    /// from `base_seed`.
    #[serde(default)]
    pub seeds: Option<Vec<u64>>,
    #[serde(default)]
    pub replications: Option<usize>,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default)]
    pub solver: SolverSettings,
    /// Falls back to `$UAVDAG_OUTPUT_DIR`, then `results`.
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

impl ExperimentSpec {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        Ok(toml::from_str(s)?)
    }

    /// Reads a spec and resolves a `File` scenario relative to the spec.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut spec = Self::from_toml_str(&std::fs::read_to_string(path)?)?;
        if let ScenarioSource::File { path: p } = &spec.scenario {
            let full = match path.parent() {
                Some(dir) if p.is_relative() => dir.join(p),
                _ => p.clone(),
            };
            spec.scenario = ScenarioSource::File { path: full };
        }
        Ok(spec)
    }

    pub fn run_seeds(&self) -> Vec<u64> {
        match (&self.seeds, self.replications) {
            (Some(s), _) => s.clone(),
            (None, Some(n)) => (0..n as u64)
                .map(|k| child_seed(self.base_seed, DOMAIN_REPLICATION, k))
                .collect(),
            (None, None) => vec![self.base_seed],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSpec(m));
        if self.axis.is_empty() {
            return bad("axis needs at least one value".into());
        }
        if self.schemes.is_empty() {
            return bad("at least one scheme is required".into());
        }
        if self.replications == Some(0) {
            return bad("replications must be at least 1".into());
        }
        let seeds = self.run_seeds();
        if seeds.is_empty() {
            return bad("seed list is empty".into());
        }
        let mut sorted = seeds.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != seeds.len() {
            return bad("seeds must be distinct".into());
        }
        let generated = matches!(self.scenario, ScenarioSource::Generate { .. });
        if matches!(self.axis, Axis::Users(_) | Axis::Subtasks(_)) && !generated {
            return bad(format!("axis {} needs a generated scenario", self.axis.name()));
        }
        if let Axis::PenaltyLambda(v) = &self.axis {
            if v.iter().any(|l| !(*l > 0.0)) {
                return bad("penalty factors must be positive".into());
            }
        }
        if let Axis::Agents(v) = &self.axis {
            if v.contains(&0) {
                return bad("agent counts must be positive".into());
            }
        }
        if !(self.solver.lambda > 0.0) {
            return bad("penalty factor must be positive".into());
        }
        Ok(())
    }

    pub fn resolved_output_dir(&self) -> PathBuf {
        self.output_dir.clone().unwrap_or_else(|| {
            std::env::var_os(OUTPUT_DIR_ENV)
                .map(PathBuf::from)
                .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR))
        })
    }

    /// The self-contained form stored in a manifest: file scenarios are
    /// inlined and seeds listed explicitly.
    pub fn resolved(&self) -> Result<Self> {
        let mut out = self.clone();
        if let ScenarioSource::File { path } = &self.scenario {
            out.scenario = ScenarioSource::Inline {
                scenario: Box::new(Scenario::load(path)?),
            };
        }
        out.seeds = Some(self.run_seeds());
        out.replications = None;
        Ok(out)
    }
}
