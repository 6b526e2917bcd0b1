//! Acceptance criteria 1-9. Every criterion is evaluated in order, one
//! PASS/FAIL line is written per criterion, and the test fails if any
//! criterion failed.

use std::io::Write;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use mapc_core::exact::{solve_exact, ExactConfig};
use mapc_core::feasibility::check_feasibility;
use mapc_core::eval::set_sinrs;
use mapc_core::heuristic::{run_heuristic, run_heuristic_traced, HeuristicConfig};
use mapc_core::propagation::{channel_gain, path_loss_db};
use mapc_core::testkit::{brute_force_optimum, instance, random_feasible_grid_allocation, small_instance};
use mapc_core::{evaluate, NetworkParams};
use mapc_experiments::{run_sweep, SolverKind, SweepKind, SweepRow, SweepSpec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GRID: [f64; 3] = [5.0, 10.0, 15.0];

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn row(rows: &[SweepRow], value: f64, solver: SolverKind) -> &SweepRow {
    rows.iter()
        .find(|r| r.sweep_value == value && r.solver == solver)
        .expect("row present")
}

fn gain(rows: &[SweepRow], value: f64) -> f64 {
    row(rows, value, SolverKind::Heuristic)
        .mean_gain_vs_baseline_pct
        .expect("gain present")
}

fn mean(rows: &[SweepRow], value: f64) -> f64 {
    row(rows, value, SolverKind::Heuristic)
        .mean_total_throughput_bps
        .expect("mean present")
}

fn sweep(kind: SweepKind, points: Vec<f64>, n_stas: usize, dir: &Path) -> SweepSpec {
    SweepSpec {
        kind,
        points,
        n_stas,
        instances_per_point: 20,
        solvers: vec![SolverKind::Heuristic, SolverKind::Baseline],
        output_dir: dir.to_path_buf(),
        ..Default::default()
    }
}

/// Average ranks, ties sharing the mean rank.
fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut r = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        for &k in &idx[i..=j] {
            r[k] = (i + j) as f64 / 2.0 + 1.0;
        }
        i = j + 1;
    }
    r
}

fn spearman(x: &[f64], y: &[f64]) -> f64 {
    let (rx, ry) = (ranks(x), ranks(y));
    let n = x.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    cov / (vx * vy).sqrt()
}

/// Criteria 1 and 3 share the 50 small instances.
fn oracle_and_ratio() -> (Verdict, Verdict) {
    let mut mismatches = Vec::new();
    let mut dominated = 0;
    let mut slowest: f64 = 0.0;
    let mut ratios = Vec::new();
    for seed in 0..50 {
        let (s, g) = small_instance(seed);
        let started = Instant::now();
        let report = solve_exact(&s, &g, &ExactConfig::default()).unwrap();
        slowest = slowest.max(started.elapsed().as_secs_f64());
        let (oracle, _) = brute_force_optimum(&s, &g, &GRID);
        if report.objective_bps.to_bits() != oracle.to_bits() || !report.proven_optimal {
            mismatches.push(seed);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..1000 {
            let a = random_feasible_grid_allocation(&mut rng, &s, &GRID);
            if evaluate(&s, &g, &a).unwrap().total_throughput > report.objective_bps {
                dominated += 1;
            }
        }
        let h = run_heuristic(&s, &g, &HeuristicConfig::for_params(&s.params)).unwrap();
        let h_total = evaluate(&s, &g, &h).unwrap().total_throughput;
        ratios.push(h_total / report.objective_bps);
    }
    let c1 = verdict(
        mismatches.is_empty() && dominated == 0 && slowest < 60.0,
        format!(
            "oracle mismatches {mismatches:?}, random allocations beating exact {dominated}, slowest instance {slowest:.3} s"
        ),
    );
    let avg = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let worst = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let c3 = verdict(
        avg >= 0.80,
        format!("heuristic / exact mean {:.1}% (worst {:.1}%)", 100.0 * avg, 100.0 * worst),
    );
    (c1, c3)
}

fn heuristic_feasibility() -> Verdict {
    let mut violations = 0;
    let mut low_sinr = 0;
    let mut min_seen = f64::INFINITY;
    for seed in 0..200u64 {
        let n_stas = 8 + 2 * (seed as usize % 9);
        let (s, g) = instance(1_000 + seed, 4, n_stas, 10);
        let out = run_heuristic_traced(&s, &g, &HeuristicConfig::for_params(&s.params)).unwrap();
        violations += check_feasibility(&s, &out.allocation).violations.len();
        for d in &out.decisions {
            let (members, powers): (Vec<usize>, Vec<f64>) = d.members.iter().copied().unzip();
            for sinr in set_sinrs(&s, &g, &members, &powers) {
                min_seen = min_seen.min(sinr);
                if sinr < s.params.sinr_threshold_linear - 1e-9 {
                    low_sinr += 1;
                }
            }
        }
    }
    verdict(
        violations == 0 && low_sinr == 0,
        format!("violations {violations}, committed STAs below threshold {low_sinr}, lowest SINR {min_seen:.3}"),
    )
}

fn gain_shape(rows: &[SweepRow], elapsed: f64) -> Verdict {
    let (g14, g24) = (gain(rows, 14.0), gain(rows, 24.0));
    verdict(
        g14 >= 30.0 && g24 < g14 && elapsed < 120.0,
        format!("gain {g14:.1}% at 14 STAs, {g24:.1}% at 24 STAs, sweep {elapsed:.2} s"),
    )
}

fn distance_trend(dir: &Path) -> Verdict {
    let points = vec![5.87, 11.74, 17.61];
    let rows = run_sweep(&sweep(SweepKind::ApDistance, points.clone(), 16, dir)).unwrap();
    let means: Vec<f64> = points.iter().map(|&d| mean(&rows, d)).collect();
    let (g_near, g_far) = (gain(&rows, 5.87), gain(&rows, 17.61));
    let monotone = means.windows(2).all(|w| w[0] <= w[1]);
    verdict(
        g_near > g_far && monotone,
        format!(
            "gain {g_near:.1}% at 5.87 m vs {g_far:.1}% at 17.61 m, heuristic Mbps {:?}",
            means.iter().map(|m| (m / 1e5).round() / 10.0).collect::<Vec<_>>()
        ),
    )
}

fn power_trend(dir: &Path) -> Verdict {
    let points = vec![10.0, 15.0, 20.0, 25.0, 30.0];
    let rows = run_sweep(&sweep(SweepKind::Pmax, points.clone(), 20, dir)).unwrap();
    let means: Vec<f64> = points.iter().map(|&p| mean(&rows, p)).collect();
    let rho = spearman(&points, &means);
    let (g10, g30) = (gain(&rows, 10.0), gain(&rows, 30.0));
    verdict(
        rho > 0.0 && g30 >= g10,
        format!(
            "Spearman {rho:.2}, gain {g10:.1}% at 10 mW vs {g30:.1}% at 30 mW, heuristic Mbps {:?}",
            means.iter().map(|m| (m / 1e5).round() / 10.0).collect::<Vec<_>>()
        ),
    )
}

fn propagation_values() -> Verdict {
    let p = NetworkParams::default();
    let pl = path_loss_db(1.0, &p).unwrap();
    let g = channel_gain(10.0, &p).unwrap();
    verdict(
        (pl - 40.05).abs() <= 0.02 && (g - 3.13e-7).abs() <= 0.01 * 3.13e-7,
        format!("PL(1 m) = {pl:.4} dB, gain(10 m) = {g:.4e}"),
    )
}

fn golden_files(dir: &Path) -> Verdict {
    let config = dir.join("spec.toml");
    std::fs::write(
        &config,
        "kind = \"STA_COUNT\"\npoints = [8, 12, 16]\ninstances_per_point = 5\nseed = 42\nsolvers = [\"HEURISTIC\", \"BASELINE\"]\n",
    )
    .unwrap();
    let run = |name: &str, workers: &str| -> (Vec<u8>, Vec<u8>) {
        let out = dir.join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_mapc"))
            .args(["sweep", "--config"])
            .arg(&config)
            .arg("--out")
            .arg(&out)
            .args(["--workers", workers])
            .output()
            .unwrap();
        assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
        (
            std::fs::read(out.join("sweep.csv")).unwrap(),
            std::fs::read(out.join("sweep.svg")).unwrap(),
        )
    };
    let first = run("a", "4");
    let second = run("b", "4");
    let single = run("c", "1");
    verdict(
        first == second && first == single && !first.0.is_empty(),
        format!(
            "repeat run identical: {}, 1 vs 4 workers identical: {} ({} CSV bytes, {} SVG bytes)",
            first == second,
            first == single,
            first.0.len(),
            first.1.len()
        ),
    )
}

fn performance(fig3_elapsed: f64) -> Verdict {
    let (s, g) = instance(3, 4, 24, 10);
    let config = HeuristicConfig::for_params(&s.params);
    let started = Instant::now();
    run_heuristic(&s, &g, &config).unwrap();
    let one = started.elapsed().as_secs_f64();
    verdict(
        one < 1.0 && fig3_elapsed < 300.0,
        format!("heuristic U=24 J=10 in {:.1} ms, STA-count sweep 9x20 in {fig3_elapsed:.2} s", one * 1e3),
    )
}

#[test]
fn acceptance_criteria() {
    let dir = tempfile::tempdir().unwrap();

    let (c1, c3) = oracle_and_ratio();
    let c2 = heuristic_feasibility();

    let started = Instant::now();
    let fig3 = run_sweep(&sweep(SweepKind::StaCount, (8..=24).step_by(2).map(f64::from).collect(), 16, dir.path()))
        .unwrap();
    let fig3_elapsed = started.elapsed().as_secs_f64();
    assert_eq!(fig3.len(), 18);
    let c4 = gain_shape(&fig3, fig3_elapsed);

    let c5 = distance_trend(dir.path());
    let c6 = power_trend(dir.path());
    let c7 = propagation_values();
    let c8 = golden_files(dir.path());
    let c9 = performance(fig3_elapsed);

    let names = [
        "oracle optimality",
        "heuristic feasibility",
        "heuristic vs exact",
        "gain-curve shape",
        "distance trend",
        "power trend",
        "propagation values",
        "determinism golden files",
        "performance envelope",
    ];
    let verdicts = [c1, c2, c3, c4, c5, c6, c7, c8, c9];
    let mut stderr = std::io::stderr().lock();
    let mut failed = Vec::new();
    for (i, (name, v)) in names.iter().zip(&verdicts).enumerate() {
        let tag = if v.pass { "PASS" } else { "FAIL" };
        writeln!(stderr, "criterion {} [{tag}] {name}: {}", i + 1, v.detail).unwrap();
        if !v.pass {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
