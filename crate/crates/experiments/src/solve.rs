use std::fs;
use std::path::{Path, PathBuf};

use mapc_core::baseline::{non_coordinated_allocate, BaselineConfig, CapMode};
use mapc_core::exact::{solve_exact, ExactConfig};
use mapc_core::heuristic::{run_heuristic_traced, CapacityMetric, HeuristicConfig};
use mapc_core::propagation::build_gain_matrix;
use mapc_core::{check_feasibility, evaluate, Allocation, EvaluationResult, FeasibilityReport, Scenario};
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{ExperimentError, Result};
use crate::output::{emit_csv, emit_plot_svg};
use crate::spec::{SolverKind, SweepSpec};
use crate::sweep::SweepRow;

#[derive(Debug, Clone, Default)]
pub struct SolveOptions {
    pub metric: CapacityMetric,
    /// Baseline RNG seed.
    pub seed: u64,
    pub cap_mode: CapMode,
    pub exact: ExactConfig,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExactStats {
    pub grid_objective_bps: f64,
    pub groupings_explored: usize,
    pub nodes_explored: u64,
    pub pruned: u64,
    pub proven_optimal: bool,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    pub solver: SolverKind,
    pub total_throughput_bps: f64,
    pub feasible: bool,
    pub allocation: Allocation,
    pub evaluation: EvaluationResult,
    pub feasibility: FeasibilityReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<ExactStats>,
    /// Per-RU heuristic trace lines.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<String>>,
}

pub fn solve_one(scenario: &Scenario, solver: SolverKind, options: &SolveOptions) -> Result<SolveReport> {
    let gains = build_gain_matrix(scenario)?;
    let mut exact = None;
    let mut trace = None;
    let allocation = match solver {
        SolverKind::Exact => {
            let r = solve_exact(scenario, &gains, &options.exact)?;
            exact = Some(ExactStats {
                grid_objective_bps: r.grid_objective_bps,
                groupings_explored: r.groupings_explored,
                nodes_explored: r.nodes_explored,
                pruned: r.pruned,
                proven_optimal: r.proven_optimal,
                wall_time_s: r.wall_time_s,
            });
            r.allocation
        }
        SolverKind::Heuristic => {
            let config = HeuristicConfig::for_params(&scenario.params).with_metric(options.metric);
            let out = run_heuristic_traced(scenario, &gains, &config)?;
            trace = Some(out.trace.iter().map(ToString::to_string).collect());
            out.allocation
        }
        SolverKind::Baseline => {
            let config = BaselineConfig {
                seed: options.seed,
                cap_mode: options.cap_mode,
            };
            non_coordinated_allocate(scenario, &gains, &config)
        }
    };
    let evaluation = evaluate(scenario, &gains, &allocation)?;
    let feasibility = check_feasibility(scenario, &allocation);
    Ok(SolveReport {
        solver,
        total_throughput_bps: evaluation.total_throughput,
        feasible: feasibility.is_feasible(),
        allocation,
        evaluation,
        feasibility,
        exact,
        trace,
    })
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| ExperimentError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| ExperimentError::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

/// Pretty JSON with a trailing newline, to `path` or stdout.
pub fn write_json<T: Serialize>(value: &T, path: Option<&Path>) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    match path {
        Some(p) => fs::write(p, text).map_err(|e| ExperimentError::io(p, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Writes `sweep.csv` and, with two or more points, `sweep.svg` into the
/// spec's output directory. Returns the paths written.
pub fn write_sweep_outputs(spec: &SweepSpec, rows: &[SweepRow]) -> Result<Vec<PathBuf>> {
    let csv = spec.output_dir.join("sweep.csv");
    emit_csv(rows, &csv)?;
    let mut written = vec![csv];
    if spec.points.len() >= 2 {
        let svg = spec.output_dir.join("sweep.svg");
        emit_plot_svg(rows, spec.kind, &svg)?;
        written.push(svg);
    }
    Ok(written)
}
