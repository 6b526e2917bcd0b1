use std::fs;

use mapc_core::baseline::{non_coordinated_allocate, BaselineConfig};
use mapc_core::exact::solve_exact;
use mapc_core::heuristic::run_heuristic;
use mapc_core::propagation::{build_gain_matrix, generate_scenario, with_ap_spacing, PlacementConfig};
use mapc_core::{evaluate, gain_percent, GainMatrix, ModelError, Scenario};
use rand::RngCore;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{ExperimentError, Result};
use crate::spec::{SolverKind, SweepKind, SweepSpec};

/// `(near-user fraction, Rayleigh divisor)` pairs; instance `i` uses entry
/// `i % 5`.
pub const PLACEMENT_VARIANTS: [(f64, f64); 5] = [(0.30, 2.0), (0.375, 2.5), (0.45, 3.0), (0.525, 3.5), (0.60, 4.0)];

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RowStatus {
    Ok,
    Skipped,
}

/// Aggregate of one solver at one sweep value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub sweep_value: f64,
    pub solver: SolverKind,
    pub status: RowStatus,
    /// Why the row was skipped.
    pub note: String,
    pub mean_total_throughput_bps: Option<f64>,
    pub std_total_throughput_bps: Option<f64>,
    /// Mean of the per-instance gains; `None` without a baseline.
    pub mean_gain_vs_baseline_pct: Option<f64>,
    pub std_gain_vs_baseline_pct: Option<f64>,
    pub throughput_bps: Vec<f64>,
    /// Per-instance gain; `None` where the baseline carried nothing.
    pub gain_pct: Vec<Option<f64>>,
    pub seeds: Vec<u64>,
}

/// Seed of one instance. Sweeps that keep the topology fixed across points
/// (distance, power cap) reuse the same seed at every point.
pub fn instance_seed(spec: &SweepSpec, point_index: usize, instance: usize) -> u64 {
    let point = if spec.kind == SweepKind::StaCount {
        point_index as u64
    } else {
        0
    };
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream((point << 32) | instance as u64);
    rng.next_u64()
}

/// The scenario every solver sees for `(point, instance)`.
pub fn build_instance(spec: &SweepSpec, point_index: usize, instance: usize) -> Result<(Scenario, GainMatrix)> {
    let value = spec.points[point_index];
    let params = spec.params_at(value);
    let (near_fraction, rayleigh_shape_divisor) = PLACEMENT_VARIANTS[instance % PLACEMENT_VARIANTS.len()];
    let placement = PlacementConfig {
        near_fraction,
        rayleigh_shape_divisor,
        seed: instance_seed(spec, point_index, instance),
        ..spec.placement.clone()
    };
    let n_stas = match spec.kind {
        SweepKind::StaCount => value as usize,
        _ => spec.n_stas,
    };
    let mut scenario = generate_scenario(spec.n_aps, n_stas, &params, &placement)?;
    if spec.kind == SweepKind::ApDistance {
        scenario = with_ap_spacing(&scenario, value);
    }
    let gains = build_gain_matrix(&scenario)?;
    Ok((scenario, gains))
}

/// Total throughput of each solver, in `spec.solvers` order; `Err` marks a
/// size refusal.
type InstanceOutcome = Vec<std::result::Result<f64, String>>;

fn run_instance(spec: &SweepSpec, point_index: usize, instance: usize) -> Result<InstanceOutcome> {
    let (scenario, gains) = build_instance(spec, point_index, instance)?;
    let seed = instance_seed(spec, point_index, instance);
    let mut out = Vec::with_capacity(spec.solvers.len());
    for &solver in &spec.solvers {
        let total = match solver {
            SolverKind::Exact => match solve_exact(&scenario, &gains, &spec.exact_at(&scenario.params)) {
                Ok(report) => Ok(report.objective_bps),
                Err(ModelError::SizeLimit(why)) => Err(why),
                Err(e) => return Err(e.into()),
            },
            SolverKind::Heuristic => {
                let config = spec.heuristic_at(&scenario.params);
                let alloc = run_heuristic(&scenario, &gains, &config)?;
                Ok(evaluate(&scenario, &gains, &alloc)?.total_throughput)
            }
            SolverKind::Baseline => {
                let config = BaselineConfig {
                    seed,
                    cap_mode: spec.baseline_cap_mode,
                };
                let alloc = non_coordinated_allocate(&scenario, &gains, &config);
                Ok(evaluate(&scenario, &gains, &alloc)?.total_throughput)
            }
        };
        out.push(total);
    }
    Ok(out)
}

/// Runs every solver on every instance of every point.
///
/// Instances run in parallel on a pool of `spec.workers` threads; results
/// are gathered by (point, instance) so the rows are identical for any
/// worker count. The output directory is created up front so an unwritable
/// destination fails before any work is done.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    fs::create_dir_all(&spec.output_dir).map_err(|e| ExperimentError::io(&spec.output_dir, e))?;

    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = spec.workers {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| ExperimentError::InvalidSpec(format!("thread pool: {e}")))?;

    let jobs: Vec<(usize, usize)> = (0..spec.points.len())
        .flat_map(|p| (0..spec.instances_per_point).map(move |i| (p, i)))
        .collect();
    let outcomes: Vec<InstanceOutcome> = pool.install(|| {
        jobs.par_iter()
            .map(|&(p, i)| run_instance(spec, p, i))
            .collect::<Result<_>>()
    })?;

    let baseline_col = spec.solvers.iter().position(|&s| s == SolverKind::Baseline);
    let mut rows = Vec::with_capacity(spec.points.len() * spec.solvers.len());
    for (p, chunk) in outcomes.chunks(spec.instances_per_point).enumerate() {
        let seeds: Vec<u64> = (0..spec.instances_per_point)
            .map(|i| instance_seed(spec, p, i))
            .collect();
        for (col, &solver) in spec.solvers.iter().enumerate() {
            let mut row = SweepRow {
                sweep_value: spec.points[p],
                solver,
                status: RowStatus::Ok,
                note: String::new(),
                mean_total_throughput_bps: None,
                std_total_throughput_bps: None,
                mean_gain_vs_baseline_pct: None,
                std_gain_vs_baseline_pct: None,
                throughput_bps: Vec::new(),
                gain_pct: Vec::new(),
                seeds: seeds.clone(),
            };
            if let Some(Err(why)) = chunk.iter().map(|o| &o[col]).find(|r| r.is_err()) {
                eprintln!("warning: {} skipped at {}: {why}", solver.name(), spec.points[p]);
                row.status = RowStatus::Skipped;
                row.note = why.clone();
                rows.push(row);
                continue;
            }
            row.throughput_bps = chunk.iter().map(|o| *o[col].as_ref().unwrap()).collect();
            (row.mean_total_throughput_bps, row.std_total_throughput_bps) = mean_std(&row.throughput_bps);

            if let Some(b) = baseline_col.filter(|&b| b != col) {
                row.gain_pct = chunk
                    .iter()
                    .zip(&row.throughput_bps)
                    .map(|(o, &test)| gain_percent(test, *o[b].as_ref().unwrap()).ok())
                    .collect();
                let defined: Vec<f64> = row.gain_pct.iter().flatten().copied().collect();
                (row.mean_gain_vs_baseline_pct, row.std_gain_vs_baseline_pct) = mean_std(&defined);
            }
            rows.push(row);
        }
    }
    Ok(rows)
}

/// Mean and sample standard deviation; the deviation needs two values.
pub fn mean_std(values: &[f64]) -> (Option<f64>, Option<f64>) {
    let n = values.len();
    if n == 0 {
        return (None, None);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (Some(mean), None);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (Some(mean), Some(var.sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_spec(dir: &std::path::Path) -> SweepSpec {
        SweepSpec {
            points: vec![8.0, 10.0],
            instances_per_point: 3,
            output_dir: dir.to_path_buf(),
            ..Default::default()
        }
    }

    #[test]
    fn mean_std_basics() {
        assert_eq!(mean_std(&[]), (None, None));
        assert_eq!(mean_std(&[3.0]), (Some(3.0), None));
        let (m, s) = mean_std(&[1.0, 3.0]);
        assert_eq!(m, Some(2.0));
        assert!((s.unwrap() - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn one_row_per_point_and_solver_with_paired_gains() {
        let dir = tempfile::tempdir().unwrap();
        let rows = run_sweep(&small_spec(dir.path())).unwrap();
        assert_eq!(rows.len(), 4);
        assert_eq!(rows[0].solver, SolverKind::Heuristic);
        assert_eq!(rows[1].solver, SolverKind::Baseline);
        assert!(rows[1].mean_gain_vs_baseline_pct.is_none());
        let (h, b) = (&rows[0], &rows[1]);
        for i in 0..3 {
            let expect = 100.0 * (h.throughput_bps[i] - b.throughput_bps[i]) / b.throughput_bps[i];
            assert_eq!(h.gain_pct[i], Some(expect));
        }
    }

    #[test]
    fn no_gain_column_without_baseline() {
        let dir = tempfile::tempdir().unwrap();
        let spec = SweepSpec {
            solvers: vec![SolverKind::Heuristic],
            ..small_spec(dir.path())
        };
        let rows = run_sweep(&spec).unwrap();
        assert!(rows.iter().all(|r| r.mean_gain_vs_baseline_pct.is_none() && r.gain_pct.is_empty()));
    }

    #[test]
    fn exact_beyond_limits_is_a_skip_row() {
        let dir = tempfile::tempdir().unwrap();
        let spec = SweepSpec {
            solvers: vec![SolverKind::Exact, SolverKind::Baseline],
            instances_per_point: 1,
            ..small_spec(dir.path())
        };
        let rows = run_sweep(&spec).unwrap();
        assert_eq!(rows[0].status, RowStatus::Skipped);
        assert!(rows[0].mean_total_throughput_bps.is_none());
        assert_eq!(rows[1].status, RowStatus::Ok);
    }

    #[test]
    fn fixed_topology_sweeps_share_instances_across_points() {
        let spec = SweepSpec {
            kind: SweepKind::ApDistance,
            points: vec![5.87, 11.74, 17.61],
            ..Default::default()
        };
        let (a, _) = build_instance(&spec, 0, 2).unwrap();
        let (b, _) = build_instance(&spec, 2, 2).unwrap();
        assert_eq!(a.association, b.association);
        for u in 0..a.n_stas() {
            let ap = a.ap_of(u);
            let da = a.sta_positions[u].distance(&a.ap_positions[ap]);
            let db = b.sta_positions[u].distance(&b.ap_positions[ap]);
            assert!((da - db).abs() < 1e-9);
        }
        let sta = SweepSpec::default();
        assert_ne!(instance_seed(&sta, 0, 1), instance_seed(&sta, 1, 1));
    }

    #[test]
    fn unwritable_output_dir_is_an_io_error() {
        let dir = tempfile::tempdir().unwrap();
        let file = dir.path().join("taken");
        fs::write(&file, "x").unwrap();
        let spec = SweepSpec {
            output_dir: file.join("sub"),
            ..small_spec(dir.path())
        };
        let err = run_sweep(&spec).unwrap_err();
        assert_eq!(err.exit_code(), 3);
    }
}
