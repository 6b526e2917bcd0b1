use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use mapc_core::exact::ExactConfig;
use mapc_core::heuristic::CapacityMetric;
use mapc_core::propagation::generate_scenario;
use mapc_core::{check_feasibility, Allocation, Scenario};
use mapc_experiments::solve::{read_json, write_json};
use mapc_experiments::spec::read_config;
use mapc_experiments::{
    run_sweep, solve_one, write_sweep_outputs, ExperimentError, ScenarioConfig, SolveOptions, SolverKind,
    SweepSpec,
};

#[derive(Parser)]
#[command(name = "mapc", version, about = "Joint RU allocation and coordinated spatial reuse for multi-AP WiFi")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Metric {
    MinSinr,
    SumRate,
}

impl From<Metric> for CapacityMetric {
    fn from(m: Metric) -> Self {
        match m {
            Metric::MinSinr => CapacityMetric::MinSinr,
            Metric::SumRate => CapacityMetric::SumRate,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random scenario as JSON.
    Generate {
        /// TOML/JSON with n_aps, n_stas, params and placement.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Overrides placement.seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        aps: Option<usize>,
        #[arg(long)]
        stas: Option<usize>,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve one scenario and print the report as JSON.
    Solve {
        scenario: PathBuf,
        #[arg(long, value_enum, default_value = "heuristic")]
        solver: SolverKind,
        #[arg(long, value_enum, default_value = "min-sinr")]
        metric: Metric,
        /// Baseline RNG seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Exact solver settings (TOML/JSON).
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a sweep from a TOML/JSON spec and write CSV and SVG.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; overrides output_dir in the spec.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides the master seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long, value_enum)]
        metric: Option<Metric>,
    },
    /// Check an allocation against a scenario; exits 1 on any violation.
    Check {
        scenario: PathBuf,
        allocation: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<ExitCode, ExperimentError> {
    match cli.command {
        Command::Generate {
            config,
            seed,
            aps,
            stas,
            out,
        } => {
            let mut cfg: ScenarioConfig = match config {
                Some(p) => read_config(&p)?,
                None => ScenarioConfig::default(),
            };
            if let Some(s) = seed {
                cfg.placement.seed = s;
            }
            cfg.n_aps = aps.unwrap_or(cfg.n_aps);
            cfg.n_stas = stas.unwrap_or(cfg.n_stas);
            let scenario = generate_scenario(cfg.n_aps, cfg.n_stas, &cfg.params, &cfg.placement)?;
            write_json(&scenario, out.as_deref())?;
        }
        Command::Solve {
            scenario,
            solver,
            metric,
            seed,
            config,
            out,
        } => {
            let scenario: Scenario = read_json(&scenario)?;
            let exact: ExactConfig = match config {
                Some(p) => read_config(&p)?,
                None => ExactConfig::default(),
            };
            let options = SolveOptions {
                metric: metric.into(),
                seed,
                exact,
                ..Default::default()
            };
            let report = solve_one(&scenario, solver, &options)?;
            write_json(&report, out.as_deref())?;
        }
        Command::Sweep {
            config,
            out,
            seed,
            workers,
            metric,
        } => {
            let mut spec = SweepSpec::from_path(&config)?;
            if let Some(dir) = out {
                spec.output_dir = dir;
            }
            if let Some(s) = seed {
                spec.seed = s;
            }
            if workers.is_some() {
                spec.workers = workers;
            }
            if let Some(m) = metric {
                spec.metric = m.into();
            }
            let rows = run_sweep(&spec)?;
            for path in write_sweep_outputs(&spec, &rows)? {
                eprintln!("wrote {}", path.display());
            }
        }
        Command::Check {
            scenario,
            allocation,
            out,
        } => {
            let scenario: Scenario = read_json(&scenario)?;
            let allocation: Allocation = read_json(&allocation)?;
            allocation.validate_structure(&scenario)?;
            let report = check_feasibility(&scenario, &allocation);
            write_json(&report, out.as_deref())?;
            if !report.is_feasible() {
                for v in &report.violations {
                    eprintln!("{}: {}", v.constraint, v.message);
                }
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
