//! Command-line front end. Exit status: 0 on success, 2 when every outcome is
//! energy-infeasible, 1 on error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};

use uavoffload::evaluator::{evaluate, write_schedule_csv, EnergyMode, PenaltyMode};
use uavoffload::experiments::{
    emit_plot_data, read_results, run_experiment, summarize, write_summary, ExperimentSpec, Figure, Manifest,
    OUTPUT_DIR_ENV,
};
use uavoffload::scenario::{generate_scenario, Scenario, ScenarioParams};
use uavoffload::solvers::{solve_scheme, Allocator, SchemeConfig, SolverKind};

#[derive(Parser)]
#[command(name = "uavdag", version, about = "DAG task offloading across cooperating MEC UAVs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum SolverArg {
    Dwoa,
    Exhaustive,
    Associated,
}

#[derive(Clone, Copy, ValueEnum)]
enum AllocArg {
    Optimal,
    Proportional,
    Equal,
}

#[derive(Clone, Copy, ValueEnum)]
enum PenaltyArg {
    Penalty,
    Hard,
}

#[derive(Clone, Copy, ValueEnum)]
enum EnergyArg {
    Limited,
    Unlimited,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a scenario file.
    Generate {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Generator parameters (TOML); defaults otherwise.
        #[arg(long)]
        params: Option<PathBuf>,
        #[arg(long)]
        uavs: Option<usize>,
        #[arg(long)]
        subtasks: Option<usize>,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Solve one instance.
    Solve {
        /// Scenario file; a default scenario generated from --seed otherwise.
        #[arg(long)]
        scenario: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "dwoa")]
        solver: SolverArg,
        #[arg(long, value_enum, default_value = "optimal")]
        alloc: AllocArg,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        agents: usize,
        #[arg(long, default_value_t = 50)]
        iters: usize,
        #[arg(long, default_value_t = 0.1)]
        lambda: f64,
        #[arg(long, value_enum, default_value = "penalty")]
        penalty_mode: PenaltyArg,
        #[arg(long, value_enum, default_value = "limited")]
        energy_mode: EnergyArg,
        /// Write the full run as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Write the schedule trace as CSV.
        #[arg(long)]
        schedule: Option<PathBuf>,
    },
    /// Run an experiment spec, or re-run a manifest.
    Sweep {
        /// Experiment spec (TOML) or manifest (JSON).
        spec: PathBuf,
        #[arg(long, short, env = OUTPUT_DIR_ENV)]
        out: Option<PathBuf>,
    },
    /// Summary statistics and pairwise improvements of a results directory.
    Summarize {
        results: PathBuf,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Tidy data series for one figure, or all that the results cover.
    PlotData {
        results: PathBuf,
        #[arg(long, default_value = "all")]
        figure: String,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
}

enum Outcome {
    Done,
    InfeasibleOnly,
}

fn results_dir(p: &Path) -> &Path {
    if p.is_file() {
        p.parent().unwrap_or(Path::new("."))
    } else {
        p
    }
}

fn run(cli: Cli) -> anyhow::Result<Outcome> {
    match cli.command {
        Command::Generate {
            seed,
            params,
            uavs,
            subtasks,
            out,
        } => {
            let mut p = match params {
                Some(path) => toml::from_str::<ScenarioParams>(&std::fs::read_to_string(&path)?)
                    .with_context(|| format!("reading {}", path.display()))?,
                None => ScenarioParams::default(),
            };
            if let Some(v) = uavs {
                p.uav_count = v;
            }
            if let Some(n) = subtasks {
                p.task.subtasks = n;
            }
            let s = generate_scenario(seed, &p)?;
            s.save(&out)?;
            println!(
                "wrote {} ({} UAVs, {} users, {} tasks)",
                out.display(),
                s.uavs.len(),
                s.users.len(),
                s.tasks.len()
            );
            Ok(Outcome::Done)
        }
        Command::Solve {
            scenario,
            solver,
            alloc,
            seed,
            agents,
            iters,
            lambda,
            penalty_mode,
            energy_mode,
            json,
            schedule,
        } => {
            let scenario = match scenario {
                Some(p) => Scenario::load(&p).with_context(|| format!("loading {}", p.display()))?,
                None => generate_scenario(seed, &ScenarioParams::default())?,
            };
            let mut cfg = SchemeConfig {
                solver: match solver {
                    SolverArg::Dwoa => SolverKind::Dwoa,
                    SolverArg::Exhaustive => SolverKind::Exhaustive,
                    SolverArg::Associated => SolverKind::Associated,
                },
                allocator: match alloc {
                    AllocArg::Optimal => Allocator::Optimal,
                    AllocArg::Proportional => Allocator::Proportional,
                    AllocArg::Equal => Allocator::Equal,
                },
                ..SchemeConfig::default()
            };
            cfg.woa.seed = seed;
            cfg.woa.agents = agents;
            cfg.woa.max_iter = iters;
            cfg.woa.penalty.lambda = lambda;
            cfg.woa.penalty.mode = match penalty_mode {
                PenaltyArg::Penalty => PenaltyMode::Penalty,
                PenaltyArg::Hard => PenaltyMode::Hard,
            };
            cfg.eval.energy_mode = match energy_mode {
                EnergyArg::Limited => EnergyMode::Limited,
                EnergyArg::Unlimited => EnergyMode::Unlimited,
            };
            let run = solve_scheme(&scenario, &cfg)?;
            println!(
                "{} + {}: objective {:.6} s, penalized {:.6} s, feasible {}, {} evaluations",
                run.solver, run.allocator, run.objective_s, run.penalized_s, run.feasible, run.evaluations
            );
            println!("decision {:?}", run.decision.0);
            if let Some(p) = json {
                std::fs::write(&p, run.to_json()? + "\n")?;
            }
            if let Some(p) = schedule {
                let r = evaluate(&run.decision, &run.beta, &scenario, cfg.eval)?;
                write_schedule_csv(&r, std::fs::File::create(&p)?)?;
            }
            Ok(if run.feasible { Outcome::Done } else { Outcome::InfeasibleOnly })
        }
        Command::Sweep { spec, out } => {
            let spec_obj = if spec.extension().is_some_and(|e| e == "json") {
                Manifest::load(&spec)?.spec
            } else {
                ExperimentSpec::load(&spec)?
            };
            let dir = out.unwrap_or_else(|| spec_obj.resolved_output_dir());
            let outcome = run_experiment(&spec_obj, &dir)?;
            let failed = outcome.rows.iter().filter(|r| !r.error.is_empty()).count();
            println!(
                "{} rows written to {} ({failed} failed cells)",
                outcome.rows.len(),
                dir.join("results.csv").display()
            );
            Ok(if outcome.any_feasible() {
                Outcome::Done
            } else {
                Outcome::InfeasibleOnly
            })
        }
        Command::Summarize { results, out } => {
            let dir = results_dir(&results);
            let rows = read_results(dir.join("results.csv"))?;
            let summary = summarize(&rows)?;
            let mut w = csv::Writer::from_writer(std::io::stdout());
            for r in &summary.rows {
                w.serialize(r)?;
            }
            w.flush()?;
            write_summary(&summary, out.as_deref().unwrap_or(dir))?;
            Ok(Outcome::Done)
        }
        Command::PlotData { results, figure, out } => {
            let dir = results_dir(&results);
            let out = out.unwrap_or_else(|| dir.join("plot-data"));
            let figures: Vec<Figure> = if figure == "all" {
                Figure::ALL.to_vec()
            } else {
                vec![figure.parse()?]
            };
            let mut written = 0;
            for f in &figures {
                match emit_plot_data(dir, *f, &out) {
                    Ok(files) => {
                        written += files.len();
                        println!("{f}: {} series", files.len());
                    }
                    Err(e) if figures.len() > 1 => println!("{f}: skipped ({e})"),
                    Err(e) => return Err(e.into()),
                }
            }
            if written == 0 {
                bail!("results cover none of the requested figures");
            }
            Ok(Outcome::Done)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::InfeasibleOnly) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
