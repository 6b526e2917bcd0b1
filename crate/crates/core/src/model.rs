//! Domain types shared by every solver: network parameters, scenarios, the
//! channel-gain matrix and the joint RU / power / AP-grouping decision.
//!
//! Powers are linear milliwatts everywhere inside the crate. The dBm helpers
//! at the bottom of this module are for I/O boundaries only.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{ModelError, Result};

/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Physical and regulatory parameters of one network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NetworkParams {
    pub frequency_hz: f64,
    pub pathloss_exponent: f64,
    pub ref_distance_m: f64,
    pub noise_power_mw: f64,
    /// Per-STA, per-RU power cap.
    pub p_max_sta_mw: f64,
    /// Total transmit power cap of one AP.
    pub p_max_ap_mw: f64,
    pub num_rus: usize,
    pub ru_bandwidth_hz: f64,
    /// Maximum number of active AP groups.
    pub g_max: usize,
    pub sinr_threshold_linear: f64,
    /// Optional cap on the number of APs in one group. `None` means N,
    /// i.e. group membership only has to activate the group.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_aps_per_group: Option<usize>,
}

impl Default for NetworkParams {
    /// 2.4 GHz, eta = 2.5, d0 = 1 m, N0 = -96 dBm, 15 mW per STA, 100 mW per
    /// AP, ten 2 MHz RUs, four groups, 2 dB SINR threshold.
    fn default() -> Self {
        Self {
            frequency_hz: 2.4e9,
            pathloss_exponent: 2.5,
            ref_distance_m: 1.0,
            noise_power_mw: dbm_to_mw(-96.0),
            p_max_sta_mw: 15.0,
            p_max_ap_mw: 100.0,
            num_rus: 10,
            ru_bandwidth_hz: 2.0e6,
            g_max: 4,
            sinr_threshold_linear: db_to_linear(2.0),
            max_aps_per_group: None,
        }
    }
}

impl NetworkParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("frequency_hz", self.frequency_hz),
            ("pathloss_exponent", self.pathloss_exponent),
            ("ref_distance_m", self.ref_distance_m),
            ("noise_power_mw", self.noise_power_mw),
            ("p_max_sta_mw", self.p_max_sta_mw),
            ("p_max_ap_mw", self.p_max_ap_mw),
            ("ru_bandwidth_hz", self.ru_bandwidth_hz),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(ModelError::InvalidParams(format!(
                    "{name} must be finite and > 0, got {v}"
                )));
            }
        }
        if !(self.sinr_threshold_linear.is_finite() && self.sinr_threshold_linear >= 0.0) {
            return Err(ModelError::InvalidParams(format!(
                "sinr_threshold_linear must be finite and >= 0, got {}",
                self.sinr_threshold_linear
            )));
        }
        if self.num_rus == 0 {
            return Err(ModelError::InvalidParams("num_rus must be >= 1".into()));
        }
        if self.g_max == 0 {
            return Err(ModelError::InvalidParams("g_max must be >= 1".into()));
        }
        if self.max_aps_per_group == Some(0) {
            return Err(ModelError::InvalidParams(
                "max_aps_per_group must be >= 1 when set".into(),
            ));
        }
        if self.p_max_sta_mw > self.p_max_ap_mw {
            return Err(ModelError::InvalidParams(format!(
                "p_max_sta_mw ({}) exceeds p_max_ap_mw ({})",
                self.p_max_sta_mw, self.p_max_ap_mw
            )));
        }
        Ok(())
    }

    /// Carrier wavelength in meters.
    pub fn wavelength_m(&self) -> f64 {
        SPEED_OF_LIGHT / self.frequency_hz
    }
}

/// A 2D position in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// One network instance: AP and STA positions, the STA to AP association and
/// the parameters everything is evaluated under.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ScenarioFile")]
pub struct Scenario {
    pub params: NetworkParams,
    pub ap_positions: Vec<Point>,
    pub sta_positions: Vec<Point>,
    /// `association[u]` is the serving AP of STA `u`.
    pub association: Vec<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    params: NetworkParams,
    ap_positions: Vec<Point>,
    sta_positions: Vec<Point>,
    association: Vec<usize>,
}

impl TryFrom<ScenarioFile> for Scenario {
    type Error = ModelError;

    fn try_from(f: ScenarioFile) -> Result<Self> {
        Scenario::new(f.params, f.ap_positions, f.sta_positions, f.association)
    }
}

impl Scenario {
    pub fn new(
        params: NetworkParams,
        ap_positions: Vec<Point>,
        sta_positions: Vec<Point>,
        association: Vec<usize>,
    ) -> Result<Self> {
        let s = Self {
            params,
            ap_positions,
            sta_positions,
            association,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.ap_positions.is_empty() {
            return Err(ModelError::InvalidScenario("no APs".into()));
        }
        if self.association.len() != self.sta_positions.len() {
            return Err(ModelError::Dimension {
                what: "association",
                got: self.association.len(),
                expected: self.sta_positions.len(),
            });
        }
        let n = self.ap_positions.len();
        let mut served = vec![0usize; n];
        for (u, &ap) in self.association.iter().enumerate() {
            if ap >= n {
                return Err(ModelError::InvalidScenario(format!(
                    "STA {u} associated to unknown AP {ap}"
                )));
            }
            served[ap] += 1;
        }
        if let Some(ap) = served.iter().position(|&c| c == 0) {
            return Err(ModelError::InvalidScenario(format!(
                "AP {ap} has no associated STA"
            )));
        }
        let finite = |p: &Point| p.x.is_finite() && p.y.is_finite();
        if !self.ap_positions.iter().all(finite) || !self.sta_positions.iter().all(finite) {
            return Err(ModelError::InvalidScenario("non-finite position".into()));
        }
        Ok(())
    }

    pub fn n_aps(&self) -> usize {
        self.ap_positions.len()
    }

    pub fn n_stas(&self) -> usize {
        self.sta_positions.len()
    }

    pub fn ap_of(&self, sta: usize) -> usize {
        self.association[sta]
    }

    /// STAs served by `ap`, ascending.
    pub fn stas_of(&self, ap: usize) -> Vec<usize> {
        (0..self.n_stas())
            .filter(|&u| self.association[u] == ap)
            .collect()
    }

    /// Writes AP and STA positions as CSV (`kind,index,x_m,y_m,ap`).
    pub fn positions_csv(&self) -> String {
        let mut out = String::from("kind,index,x_m,y_m,ap\n");
        for (n, p) in self.ap_positions.iter().enumerate() {
            out.push_str(&format!("ap,{n},{},{},{n}\n", p.x, p.y));
        }
        for (u, p) in self.sta_positions.iter().enumerate() {
            out.push_str(&format!("sta,{u},{},{},{}\n", p.x, p.y, self.association[u]));
        }
        out
    }
}

/// Linear channel gains `H[u][n]` from every AP `n` to every STA `u`.
#[derive(Debug, Clone, PartialEq)]
pub struct GainMatrix {
    n_aps: usize,
    gains: Vec<f64>,
}

impl GainMatrix {
    /// Builds a matrix from one row per STA. Every entry must lie in (0, 1].
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n_aps = rows.first().map_or(0, Vec::len);
        let mut gains = Vec::with_capacity(rows.len() * n_aps);
        for (u, row) in rows.into_iter().enumerate() {
            if row.len() != n_aps {
                return Err(ModelError::Dimension {
                    what: "gain row",
                    got: row.len(),
                    expected: n_aps,
                });
            }
            for (n, g) in row.into_iter().enumerate() {
                if !(g > 0.0 && g <= 1.0) {
                    return Err(ModelError::Structure(format!(
                        "gain H[{u}][{n}] = {g} outside (0, 1]"
                    )));
                }
                gains.push(g);
            }
        }
        Ok(Self { n_aps, gains })
    }

    #[inline]
    pub fn get(&self, sta: usize, ap: usize) -> f64 {
        self.gains[sta * self.n_aps + ap]
    }

    pub fn n_stas(&self) -> usize {
        if self.n_aps == 0 {
            0
        } else {
            self.gains.len() / self.n_aps
        }
    }

    pub fn n_aps(&self) -> usize {
        self.n_aps
    }

    pub fn row(&self, sta: usize) -> &[f64] {
        &self.gains[sta * self.n_aps..(sta + 1) * self.n_aps]
    }

    /// Gain of STA `u` from its own serving AP.
    pub fn own_gain(&self, scenario: &Scenario, sta: usize) -> f64 {
        self.get(sta, scenario.ap_of(sta))
    }

    pub fn check_dims(&self, scenario: &Scenario) -> Result<()> {
        if self.n_aps() != scenario.n_aps() {
            return Err(ModelError::Dimension {
                what: "gain matrix columns",
                got: self.n_aps(),
                expected: scenario.n_aps(),
            });
        }
        if self.n_stas() != scenario.n_stas() {
            return Err(ModelError::Dimension {
                what: "gain matrix rows",
                got: self.n_stas(),
                expected: scenario.n_stas(),
            });
        }
        Ok(())
    }
}

/// AP grouping: which group each AP belongs to and which groups are active.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(into = "wire::GroupingWire", try_from = "wire::GroupingWire")]
pub struct ApGrouping {
    pub group_of_ap: Vec<Option<usize>>,
    pub active_groups: BTreeSet<usize>,
}

impl ApGrouping {
    /// Every AP in group 0, which is active.
    pub fn single(n_aps: usize) -> Self {
        Self {
            group_of_ap: vec![Some(0); n_aps],
            active_groups: BTreeSet::from([0]),
        }
    }

    /// Grouping from a block label per AP; every used label becomes active.
    pub fn from_labels(labels: &[usize]) -> Self {
        Self {
            group_of_ap: labels.iter().map(|&g| Some(g)).collect(),
            active_groups: labels.iter().copied().collect(),
        }
    }

    /// Relabels groups in order of their smallest member AP. Active groups
    /// without members keep their relative order after the populated ones.
    pub fn canonical(&self) -> ApGrouping {
        let mut relabel: BTreeMap<usize, usize> = BTreeMap::new();
        for g in self.group_of_ap.iter().flatten() {
            let next = relabel.len();
            relabel.entry(*g).or_insert(next);
        }
        for g in &self.active_groups {
            let next = relabel.len();
            relabel.entry(*g).or_insert(next);
        }
        ApGrouping {
            group_of_ap: self.group_of_ap.iter().map(|g| g.map(|g| relabel[&g])).collect(),
            active_groups: self.active_groups.iter().map(|g| relabel[g]).collect(),
        }
    }

    /// True when APs `a` and `b` are both grouped and share a group.
    pub fn same_group(&self, a: usize, b: usize) -> bool {
        matches!(
            (self.group_of_ap.get(a), self.group_of_ap.get(b)),
            (Some(Some(x)), Some(Some(y))) if x == y
        )
    }
}

impl PartialEq for ApGrouping {
    fn eq(&self, other: &Self) -> bool {
        let (a, b) = (self.canonical(), other.canonical());
        a.group_of_ap == b.group_of_ap && a.active_groups == b.active_groups
    }
}

/// The decision variables: RU and power per STA, plus the AP grouping.
///
/// A `None` grouping means the producer never built one (the greedy
/// heuristic), so the grouping constraints are not applicable to it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "wire::AllocationWire", try_from = "wire::AllocationWire")]
pub struct Allocation {
    pub ru_of_sta: Vec<Option<usize>>,
    pub power_of_sta: Vec<f64>,
    pub grouping: Option<ApGrouping>,
}

impl Allocation {
    pub fn unassigned(n_stas: usize) -> Self {
        Self {
            ru_of_sta: vec![None; n_stas],
            power_of_sta: vec![0.0; n_stas],
            grouping: None,
        }
    }

    pub fn with_grouping(mut self, grouping: ApGrouping) -> Self {
        self.grouping = Some(grouping);
        self
    }

    pub fn assign(&mut self, sta: usize, ru: usize, power_mw: f64) {
        self.ru_of_sta[sta] = Some(ru);
        self.power_of_sta[sta] = power_mw;
    }

    pub fn unassign(&mut self, sta: usize) {
        self.ru_of_sta[sta] = None;
        self.power_of_sta[sta] = 0.0;
    }

    pub fn n_stas(&self) -> usize {
        self.ru_of_sta.len()
    }

    pub fn assigned_count(&self) -> usize {
        self.ru_of_sta.iter().filter(|r| r.is_some()).count()
    }

    /// STAs on RU `ru`, ascending.
    pub fn stas_on_ru(&self, ru: usize) -> Vec<usize> {
        (0..self.n_stas())
            .filter(|&u| self.ru_of_sta[u] == Some(ru))
            .collect()
    }

    /// Checks that the allocation can be evaluated against `scenario`:
    /// lengths match, RU indices exist, powers are finite.
    pub fn validate_structure(&self, scenario: &Scenario) -> Result<()> {
        let u_t = scenario.n_stas();
        if self.ru_of_sta.len() != u_t {
            return Err(ModelError::Dimension {
                what: "ru_of_sta",
                got: self.ru_of_sta.len(),
                expected: u_t,
            });
        }
        if self.power_of_sta.len() != u_t {
            return Err(ModelError::Dimension {
                what: "power_of_sta",
                got: self.power_of_sta.len(),
                expected: u_t,
            });
        }
        let j = scenario.params.num_rus;
        for (u, ru) in self.ru_of_sta.iter().enumerate() {
            if let Some(ru) = ru {
                if *ru >= j {
                    return Err(ModelError::Structure(format!(
                        "STA {u} on RU {ru}, but only {j} RUs exist"
                    )));
                }
            }
        }
        if let Some((u, p)) = self
            .power_of_sta
            .iter()
            .enumerate()
            .find(|(_, p)| !p.is_finite())
        {
            return Err(ModelError::Structure(format!("STA {u} has power {p}")));
        }
        if let Some(g) = &self.grouping {
            if g.group_of_ap.len() != scenario.n_aps() {
                return Err(ModelError::Dimension {
                    what: "group_of_ap",
                    got: g.group_of_ap.len(),
                    expected: scenario.n_aps(),
                });
            }
        }
        Ok(())
    }
}

/// Per-STA SINR and throughput, their total, and per-AP power use.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(into = "wire::EvaluationWire")]
pub struct EvaluationResult {
    pub sinr_of_sta: Vec<f64>,
    pub throughput_of_sta: Vec<f64>,
    pub total_throughput: f64,
    pub power_used_by_ap: Vec<f64>,
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

pub fn dbm_to_mw(dbm: f64) -> f64 {
    db_to_linear(dbm)
}

pub fn mw_to_dbm(mw: f64) -> f64 {
    linear_to_db(mw)
}

/// JSON shapes. Index-keyed maps so files read as `{"3": {...}}` per STA.
mod wire {
    use super::*;

    #[derive(Serialize, Deserialize)]
    #[serde(deny_unknown_fields)]
    pub struct StaWire {
        pub ru: Option<usize>,
        pub power_mw: f64,
    }

    #[derive(Serialize, Deserialize)]
    #[serde(deny_unknown_fields)]
    pub struct GroupingWire {
        pub group_of_ap: BTreeMap<usize, Option<usize>>,
        pub active_groups: BTreeSet<usize>,
    }

    #[derive(Serialize, Deserialize)]
    #[serde(deny_unknown_fields)]
    pub struct AllocationWire {
        pub stas: BTreeMap<usize, StaWire>,
        #[serde(default)]
        pub grouping: Option<ApGrouping>,
    }

    #[derive(Serialize)]
    pub struct EvaluationWire {
        pub sinr: BTreeMap<usize, f64>,
        pub throughput_bps: BTreeMap<usize, f64>,
        pub total_throughput_bps: f64,
        pub power_used_mw: BTreeMap<usize, f64>,
    }

    fn dense<T>(map: BTreeMap<usize, T>, what: &str) -> Result<Vec<T>> {
        let n = map.len();
        map.into_iter()
            .enumerate()
            .map(|(i, (k, v))| {
                if i == k {
                    Ok(v)
                } else {
                    Err(ModelError::Structure(format!(
                        "{what} keys must be 0..{n} without gaps, missing {i}"
                    )))
                }
            })
            .collect()
    }

    impl From<ApGrouping> for GroupingWire {
        fn from(g: ApGrouping) -> Self {
            Self {
                group_of_ap: g.group_of_ap.into_iter().enumerate().collect(),
                active_groups: g.active_groups,
            }
        }
    }

    impl TryFrom<GroupingWire> for ApGrouping {
        type Error = ModelError;

        fn try_from(w: GroupingWire) -> Result<Self> {
            Ok(Self {
                group_of_ap: dense(w.group_of_ap, "group_of_ap")?,
                active_groups: w.active_groups,
            })
        }
    }

    impl From<Allocation> for AllocationWire {
        fn from(a: Allocation) -> Self {
            Self {
                stas: a
                    .ru_of_sta
                    .into_iter()
                    .zip(a.power_of_sta)
                    .map(|(ru, power_mw)| StaWire { ru, power_mw })
                    .enumerate()
                    .collect(),
                grouping: a.grouping,
            }
        }
    }

    impl TryFrom<AllocationWire> for Allocation {
        type Error = ModelError;

        fn try_from(w: AllocationWire) -> Result<Self> {
            let stas = dense(w.stas, "stas")?;
            Ok(Self {
                ru_of_sta: stas.iter().map(|s| s.ru).collect(),
                power_of_sta: stas.iter().map(|s| s.power_mw).collect(),
                grouping: w.grouping,
            })
        }
    }

    impl From<EvaluationResult> for EvaluationWire {
        fn from(e: EvaluationResult) -> Self {
            Self {
                sinr: e.sinr_of_sta.into_iter().enumerate().collect(),
                throughput_bps: e.throughput_of_sta.into_iter().enumerate().collect(),
                total_throughput_bps: e.total_throughput,
                power_used_mw: e.power_used_by_ap.into_iter().enumerate().collect(),
            }
        }
    }
}
