//! Greedy per-RU construction of co-channel STA sets with three-level power
//! assignment.
//!
//! RUs are filled one at a time. For each RU the best-channel unallocated STA
//! seeds a set of size `G_j`, completed with STAs of other APs in order of
//! least interference to the seed. Every power combination of every
//! candidate set is scored; combinations in which any member falls below the
//! SINR threshold are discarded. If nothing survives, `G_j` shrinks by one.
//! After a commit, APs left with no more than `P_min` of budget drop out.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{ModelError, Result};
use crate::eval::set_sinrs;
use crate::model::{Allocation, GainMatrix, NetworkParams, Scenario};

const BUDGET_TOLERANCE_MW: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum CapacityMetric {
    /// `log2(1 + min SINR)` over the set.
    #[default]
    MinSinr,
    /// `sum log2(1 + SINR)` over the set.
    SumRate,
}

/// How the target set size of each RU is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum SetSizeRule {
    /// `ceil(U_T / J)` for every RU. Once every STA is placed the remaining
    /// RUs stay idle, so with U_T slightly above J whole RUs go unused.
    Fixed,
    /// `ceil(unallocated / RUs left)`, re-estimated before each RU so the
    /// sets spread over all RUs. Equals `ceil(U_T / J)` on the first RU.
    #[default]
    Rebalanced,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeuristicConfig {
    /// `(P_min, P_mid, P_max)` in mW.
    pub power_levels_mw: [f64; 3],
    pub sinr_threshold_linear: f64,
    #[serde(default)]
    pub capacity_metric: CapacityMetric,
    /// Maximum number of candidate STA sets scored per RU and set size.
    pub candidate_beam_width: usize,
    #[serde(default)]
    pub set_size_rule: SetSizeRule,
}

impl HeuristicConfig {
    pub const DEFAULT_BEAM_WIDTH: usize = 64;

    /// Levels 5 / 10 / `p_max_sta_mw` mW and the scenario's SINR threshold.
    pub fn for_params(params: &NetworkParams) -> Self {
        Self {
            power_levels_mw: [5.0, 10.0, params.p_max_sta_mw],
            sinr_threshold_linear: params.sinr_threshold_linear,
            capacity_metric: CapacityMetric::MinSinr,
            candidate_beam_width: Self::DEFAULT_BEAM_WIDTH,
            set_size_rule: SetSizeRule::Rebalanced,
        }
    }

    pub fn with_metric(mut self, metric: CapacityMetric) -> Self {
        self.capacity_metric = metric;
        self
    }

    pub fn p_min(&self) -> f64 {
        self.power_levels_mw[0]
    }

    pub fn validate(&self, params: &NetworkParams) -> Result<()> {
        let [lo, mid, hi] = self.power_levels_mw;
        if !(0.0 < lo && lo < mid && mid < hi && hi <= params.p_max_sta_mw) {
            return Err(ModelError::InvalidConfig(format!(
                "power levels must satisfy 0 < P_min < P_mid < P_max <= {} mW, got {:?}",
                params.p_max_sta_mw, self.power_levels_mw
            )));
        }
        if !(self.sinr_threshold_linear.is_finite() && self.sinr_threshold_linear >= 0.0) {
            return Err(ModelError::InvalidConfig(format!(
                "SINR threshold must be finite and >= 0, got {}",
                self.sinr_threshold_linear
            )));
        }
        if self.candidate_beam_width == 0 {
            return Err(ModelError::InvalidConfig("beam width must be >= 1".into()));
        }
        Ok(())
    }
}

/// STAs and powers committed to one RU. At most one STA per AP.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuDecision {
    pub ru: usize,
    pub members: Vec<(usize, f64)>,
}

/// Winning power assignment for one STA set.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerChoice {
    /// Powers in the order of the STA set.
    pub powers_mw: Vec<f64>,
    pub sinrs: Vec<f64>,
    pub metric: f64,
}

impl PowerChoice {
    fn total_power(&self) -> f64 {
        self.powers_mw.iter().sum()
    }

    /// Ordering used to pick a winner: higher metric, then lower total
    /// power. Equal keys keep the earlier candidate.
    fn beats(&self, other: &PowerChoice) -> bool {
        match self.metric.partial_cmp(&other.metric) {
            Some(Ordering::Greater) => true,
            Some(Ordering::Equal) => self.total_power() < other.total_power(),
            _ => false,
        }
    }
}

/// One line of the per-RU trace.
#[derive(Debug, Clone, PartialEq)]
pub struct RuTrace {
    pub ru: usize,
    /// Set sizes tried, in order.
    pub attempts: Vec<usize>,
    pub decision: Option<RuDecision>,
    pub metric: Option<f64>,
}

impl fmt::Display for RuTrace {
    /// `ru=<j> attempts=<g,..> set=<u,..> powers=<mW,..> metric=<x>`, with
    /// `-` for empty fields.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn list<T: fmt::Display>(items: impl Iterator<Item = T>) -> String {
            let s: Vec<String> = items.map(|x| x.to_string()).collect();
            if s.is_empty() {
                "-".into()
            } else {
                s.join(",")
            }
        }
        let members = self.decision.as_ref().map_or(&[][..], |d| &d.members[..]);
        write!(
            f,
            "ru={} attempts={} set={} powers={} metric={}",
            self.ru,
            list(self.attempts.iter()),
            list(members.iter().map(|m| m.0)),
            list(members.iter().map(|m| m.1)),
            self.metric.map_or("-".into(), |m| format!("{m:.6}")),
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeuristicOutcome {
    pub allocation: Allocation,
    pub decisions: Vec<RuDecision>,
    pub trace: Vec<RuTrace>,
}

impl HeuristicOutcome {
    pub fn trace_text(&self) -> String {
        self.trace.iter().map(|t| format!("{t}\n")).collect()
    }
}

/// STAs by descending gain to their own AP, ties by ascending index.
pub fn sort_stas_by_gain(scenario: &Scenario, gains: &GainMatrix) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scenario.n_stas()).collect();
    order.sort_by(|&a, &b| {
        gains
            .own_gain(scenario, b)
            .total_cmp(&gains.own_gain(scenario, a))
            .then(a.cmp(&b))
    });
    order
}

/// Candidate STA sets of exactly `size` members seeded by `first_sta`.
///
/// The other members come from distinct APs other than the seed's, taken
/// from `unallocated`. APs are ranked by ascending gain toward the seed
/// (least interfering first) and each AP's STAs by descending own gain. Sets
/// are emitted in lexicographic order of those ranks and truncated at the
/// beam width. Returns nothing when fewer than `size - 1` other APs have
/// unallocated STAs.
pub fn candidate_sets(
    first_sta: usize,
    unallocated: &[usize],
    size: usize,
    scenario: &Scenario,
    gains: &GainMatrix,
    config: &HeuristicConfig,
) -> Vec<Vec<usize>> {
    if size == 0 {
        return Vec::new();
    }
    let home = scenario.ap_of(first_sta);
    let mut by_ap: Vec<Vec<usize>> = vec![Vec::new(); scenario.n_aps()];
    for &u in unallocated {
        if u != first_sta && scenario.ap_of(u) != home {
            by_ap[scenario.ap_of(u)].push(u);
        }
    }
    for stas in &mut by_ap {
        stas.sort_by(|&a, &b| {
            gains
                .own_gain(scenario, b)
                .total_cmp(&gains.own_gain(scenario, a))
                .then(a.cmp(&b))
        });
    }
    let mut aps: Vec<usize> = (0..scenario.n_aps()).filter(|&n| !by_ap[n].is_empty()).collect();
    aps.sort_by(|&a, &b| {
        gains
            .get(first_sta, a)
            .total_cmp(&gains.get(first_sta, b))
            .then(a.cmp(&b))
    });
    if aps.len() < size - 1 {
        return Vec::new();
    }

    let mut out = Vec::new();
    let mut current = vec![first_sta];
    extend_sets(&aps, &by_ap, 0, size, config.candidate_beam_width, &mut current, &mut out);
    out
}

fn extend_sets(
    aps: &[usize],
    by_ap: &[Vec<usize>],
    start: usize,
    size: usize,
    beam: usize,
    current: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if current.len() == size {
        out.push(current.clone());
        return;
    }
    let missing = size - current.len();
    for rank in start..aps.len() {
        if aps.len() - rank < missing {
            break;
        }
        for &u in &by_ap[aps[rank]] {
            if out.len() >= beam {
                return;
            }
            current.push(u);
            extend_sets(aps, by_ap, rank + 1, size, beam, current, out);
            current.pop();
        }
    }
}

/// Best power assignment for a set of STAs from distinct APs.
///
/// Enumerates every combination of the configured power levels (first
/// member varying slowest, levels ascending), skips combinations that exceed
/// a member AP's remaining budget or leave any member below the SINR
/// threshold, and keeps the best by metric, then lower total power, then
/// enumeration order. SINRs count interference from the set only.
pub fn best_combo(
    sta_set: &[usize],
    scenario: &Scenario,
    gains: &GainMatrix,
    config: &HeuristicConfig,
    remaining_budget_mw: &[f64],
) -> Option<PowerChoice> {
    if sta_set.is_empty() {
        return None;
    }
    let levels = &config.power_levels_mw;
    let k = sta_set.len();
    let allowed: Vec<Vec<f64>> = sta_set
        .iter()
        .map(|&u| {
            let budget = remaining_budget_mw[scenario.ap_of(u)] + BUDGET_TOLERANCE_MW;
            levels.iter().copied().filter(|&p| p <= budget).collect()
        })
        .collect();
    if allowed.iter().any(Vec::is_empty) {
        return None;
    }

    let mut idx = vec![0usize; k];
    let mut powers = vec![0.0; k];
    let mut best: Option<PowerChoice> = None;
    loop {
        for i in 0..k {
            powers[i] = allowed[i][idx[i]];
        }
        let sinrs = set_sinrs(scenario, gains, sta_set, &powers);
        let min = sinrs.iter().copied().fold(f64::INFINITY, f64::min);
        if min >= config.sinr_threshold_linear {
            let metric = match config.capacity_metric {
                CapacityMetric::MinSinr => (1.0 + min).log2(),
                CapacityMetric::SumRate => sinrs.iter().map(|s| (1.0 + s).log2()).sum(),
            };
            let choice = PowerChoice {
                powers_mw: powers.clone(),
                sinrs,
                metric,
            };
            if best.as_ref().is_none_or(|b| choice.beats(b)) {
                best = Some(choice);
            }
        }

        // Odometer, last member fastest.
        let mut pos = k;
        loop {
            if pos == 0 {
                return best;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < allowed[pos].len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

pub fn run_heuristic(scenario: &Scenario, gains: &GainMatrix, config: &HeuristicConfig) -> Result<Allocation> {
    Ok(run_heuristic_traced(scenario, gains, config)?.allocation)
}

/// Runs the heuristic and keeps the per-RU decisions and trace. The
/// allocation carries no AP grouping.
pub fn run_heuristic_traced(
    scenario: &Scenario,
    gains: &GainMatrix,
    config: &HeuristicConfig,
) -> Result<HeuristicOutcome> {
    gains.check_dims(scenario)?;
    config.validate(&scenario.params)?;

    let params = &scenario.params;
    let n_rus = params.num_rus;
    let initial_size = scenario.n_stas().div_ceil(n_rus);

    let mut pool = sort_stas_by_gain(scenario, gains);
    let mut spent = vec![0.0; scenario.n_aps()];
    let mut allocation = Allocation::unassigned(scenario.n_stas());
    let mut decisions = Vec::new();
    let mut trace = Vec::with_capacity(n_rus);

    for ru in 0..n_rus {
        let mut size = match config.set_size_rule {
            SetSizeRule::Fixed => initial_size,
            SetSizeRule::Rebalanced => pool.len().div_ceil(n_rus - ru),
        };
        let mut line = RuTrace {
            ru,
            attempts: Vec::new(),
            decision: None,
            metric: None,
        };
        while let Some(&first) = pool.first() {
            if size == 0 {
                break;
            }
            line.attempts.push(size);
            let remaining: Vec<f64> = spent.iter().map(|s| params.p_max_ap_mw - s).collect();
            let mut winner: Option<(Vec<usize>, PowerChoice)> = None;
            for set in candidate_sets(first, &pool, size, scenario, gains, config) {
                if let Some(choice) = best_combo(&set, scenario, gains, config, &remaining) {
                    // Across candidates only a strictly better metric wins.
                    if winner.as_ref().is_none_or(|(_, w)| choice.metric > w.metric) {
                        winner = Some((set, choice));
                    }
                }
            }

            match winner {
                Some((set, choice)) => {
                    let members: Vec<(usize, f64)> =
                        set.iter().copied().zip(choice.powers_mw.iter().copied()).collect();
                    for &(u, p) in &members {
                        allocation.assign(u, ru, p);
                        spent[scenario.ap_of(u)] += p;
                    }
                    pool.retain(|u| !set.contains(u));
                    let exhausted: Vec<bool> = spent
                        .iter()
                        .map(|s| params.p_max_ap_mw - s <= config.p_min())
                        .collect();
                    pool.retain(|&u| !exhausted[scenario.ap_of(u)]);

                    let decision = RuDecision { ru, members };
                    line.decision = Some(decision.clone());
                    line.metric = Some(choice.metric);
                    decisions.push(decision);
                    break;
                }
                None => size -= 1,
            }
        }
        trace.push(line);
    }

    Ok(HeuristicOutcome {
        allocation,
        decisions,
        trace,
    })
}
