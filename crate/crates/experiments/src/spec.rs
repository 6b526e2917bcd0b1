use std::fs;
use std::path::{Path, PathBuf};

use mapc_core::baseline::CapMode;
use mapc_core::exact::ExactConfig;
use mapc_core::heuristic::{CapacityMetric, HeuristicConfig, SetSizeRule};
use mapc_core::propagation::PlacementConfig;
use mapc_core::NetworkParams;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{ExperimentError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SweepKind {
    /// Number of STAs in the network.
    StaCount,
    /// Mean inter-AP distance in metres.
    ApDistance,
    /// Per-STA power cap in mW.
    Pmax,
}

impl SweepKind {
    pub fn axis_label(self) -> &'static str {
        match self {
            SweepKind::StaCount => "Number of STAs",
            SweepKind::ApDistance => "Mean inter-AP distance (m)",
            SweepKind::Pmax => "Per-STA power cap (mW)",
        }
    }
}

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, clap::ValueEnum,
)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SolverKind {
    Exact,
    Heuristic,
    Baseline,
}

impl SolverKind {
    pub fn name(self) -> &'static str {
        match self {
            SolverKind::Exact => "EXACT",
            SolverKind::Heuristic => "HEURISTIC",
            SolverKind::Baseline => "BASELINE",
        }
    }
}

/// One experiment: a swept parameter, the values it takes, and how many
/// random instances are averaged at each value.
///
/// Instance seeds derive from `seed`; `placement.seed` is ignored, and the
/// near-user fraction and Rayleigh divisor cycle through five fixed variants
/// by instance index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSpec {
    pub kind: SweepKind,
    pub points: Vec<f64>,
    pub instances_per_point: usize,
    pub solvers: Vec<SolverKind>,
    pub base_params: NetworkParams,
    pub placement: PlacementConfig,
    pub n_aps: usize,
    /// STA count for the sweeps that do not vary it.
    pub n_stas: usize,
    pub seed: u64,
    /// Worker threads; all cores when unset. Results do not depend on it.
    pub workers: Option<usize>,
    pub metric: CapacityMetric,
    pub set_size_rule: SetSizeRule,
    /// Heuristic `(P_min, P_mid)` held fixed while a PMAX sweep moves the
    /// top level.
    pub pmax_sweep_low_levels_mw: [f64; 2],
    pub exact: ExactConfig,
    pub baseline_cap_mode: CapMode,
    pub output_dir: PathBuf,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            kind: SweepKind::StaCount,
            points: (8..=24).step_by(2).map(f64::from).collect(),
            instances_per_point: 20,
            solvers: vec![SolverKind::Heuristic, SolverKind::Baseline],
            base_params: NetworkParams::default(),
            placement: PlacementConfig::default(),
            n_aps: 4,
            n_stas: 16,
            seed: 0,
            workers: None,
            metric: CapacityMetric::MinSinr,
            set_size_rule: SetSizeRule::Rebalanced,
            pmax_sweep_low_levels_mw: [5.0, 10.0],
            exact: ExactConfig::default(),
            baseline_cap_mode: CapMode::Scale,
            output_dir: PathBuf::from("out"),
        }
    }
}

impl SweepSpec {
    /// Reads a spec from TOML, or JSON when the extension is `.json`.
    pub fn from_path(path: &Path) -> Result<Self> {
        read_config(path)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(ExperimentError::InvalidSpec(m));
        if self.points.is_empty() {
            return bad("no sweep points".into());
        }
        if !self.points.iter().all(|p| p.is_finite()) {
            return bad(format!("non-finite sweep point in {:?}", self.points));
        }
        if !self.points.windows(2).all(|w| w[0] < w[1]) {
            return bad(format!("points must be strictly increasing, got {:?}", self.points));
        }
        if self.instances_per_point == 0 {
            return bad("instances_per_point must be >= 1".into());
        }
        if self.solvers.is_empty() {
            return bad("no solvers selected".into());
        }
        let mut seen = self.solvers.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.solvers.len() {
            return bad(format!("duplicate solver in {:?}", self.solvers));
        }
        if self.workers == Some(0) {
            return bad("workers must be >= 1".into());
        }
        if self.n_aps == 0 {
            return bad("n_aps must be >= 1".into());
        }
        self.base_params.validate()?;
        self.placement.validate()?;
        match self.kind {
            SweepKind::StaCount => {
                for &p in &self.points {
                    if p.fract() != 0.0 || p < self.n_aps as f64 {
                        return bad(format!("STA count {p} must be an integer >= n_aps = {}", self.n_aps));
                    }
                }
            }
            SweepKind::ApDistance => {
                if self.points[0] < 0.0 {
                    return bad(format!("negative AP distance {}", self.points[0]));
                }
            }
            SweepKind::Pmax => {
                let [lo, mid] = self.pmax_sweep_low_levels_mw;
                if !(lo > 0.0 && lo < mid) {
                    return bad(format!("need 0 < P_min < P_mid, got {lo}, {mid}"));
                }
                if self.points[0] <= lo {
                    return bad(format!("P_max {} must exceed P_min {lo}", self.points[0]));
                }
            }
        }
        if self.kind != SweepKind::StaCount && self.n_stas < self.n_aps {
            return bad(format!("n_stas {} < n_aps {}", self.n_stas, self.n_aps));
        }
        Ok(())
    }

    /// Network parameters at one sweep value.
    pub fn params_at(&self, value: f64) -> NetworkParams {
        let mut params = self.base_params.clone();
        if self.kind == SweepKind::Pmax {
            params.p_max_sta_mw = value;
        }
        params
    }

    /// Heuristic settings at one sweep value. In a PMAX sweep the low levels
    /// stay fixed; when the cap does not clear `P_mid`, the middle level
    /// moves halfway between `P_min` and the cap to keep the levels distinct.
    pub fn heuristic_at(&self, params: &NetworkParams) -> HeuristicConfig {
        let mut config = HeuristicConfig::for_params(params).with_metric(self.metric);
        config.set_size_rule = self.set_size_rule;
        if self.kind == SweepKind::Pmax {
            let [lo, mid] = self.pmax_sweep_low_levels_mw;
            let top = params.p_max_sta_mw;
            let mid = if mid < top { mid } else { 0.5 * (lo + top) };
            config.power_levels_mw = [lo, mid, top];
        }
        config
    }

    /// Exact solver settings at one sweep value. A PMAX sweep searches the
    /// heuristic's three levels so both see the same cap.
    pub fn exact_at(&self, params: &NetworkParams) -> ExactConfig {
        let mut config = self.exact.clone();
        if self.kind == SweepKind::Pmax {
            config.power_grid_mw = self.heuristic_at(params).power_levels_mw.to_vec();
        }
        config
    }
}

/// Scenario-generation settings for the `generate` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub n_aps: usize,
    pub n_stas: usize,
    pub params: NetworkParams,
    pub placement: PlacementConfig,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            n_aps: 4,
            n_stas: 16,
            params: NetworkParams::default(),
            placement: PlacementConfig::default(),
        }
    }
}

/// Deserializes TOML, or JSON for a `.json` extension.
pub fn read_config<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| ExperimentError::io(path, e))?;
    let parsed = if path.extension().is_some_and(|e| e == "json") {
        serde_json::from_str(&text).map_err(|e| e.to_string())
    } else {
        toml::from_str(&text).map_err(|e| e.to_string())
    };
    parsed.map_err(|message| ExperimentError::Parse {
        path: path.to_path_buf(),
        message,
    })
}
