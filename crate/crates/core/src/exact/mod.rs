//! Exhaustive solver for the joint grouping / RU / power problem at desk
//! scale.
//!
//! The search runs over every admissible AP partition, every RU map allowed
//! by that partition, and every grid power per assigned STA. Two facts keep
//! it tractable:
//!
//! * RUs are orthogonal, so for a fixed RU map the objective is a sum of
//!   per-RU terms. When no AP can overrun its budget even at the top grid
//!   level, each RU's best powers are found independently and memoized by
//!   member set (RU labels do not matter).
//! * Otherwise powers are searched jointly, cutting any branch whose partial
//!   per-AP power already exceeds the AP budget.
//!
//! Partitions are explored in parallel and merged in partition order, so the
//! result does not depend on the number of worker threads.

mod assignments;
mod groupings;

pub use assignments::{enumerate_assignments, AssignmentIter};
pub use groupings::{enumerate_groupings, largest_block};

use std::collections::HashMap;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ModelError, Result};
use crate::eval::{evaluate, ru_throughput, set_sinrs};
use crate::model::{Allocation, ApGrouping, EvaluationResult, GainMatrix, Scenario};

const BUDGET_TOLERANCE_MW: f64 = 1e-9;
const POLISH_SWEEPS: usize = 50;
const GOLDEN_ITERATIONS: usize = 60;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExactLimits {
    pub max_stas: usize,
    pub max_rus: usize,
    pub max_aps: usize,
    pub max_grid_levels: usize,
}

impl Default for ExactLimits {
    fn default() -> Self {
        Self {
            max_stas: 8,
            max_rus: 4,
            max_aps: 4,
            max_grid_levels: 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExactConfig {
    /// Allowed powers for an assigned STA, ascending, all in (0, P_max].
    pub power_grid_mw: Vec<f64>,
    /// Overrides the scenario's G_max when set.
    pub max_groups: Option<usize>,
    pub limits: ExactLimits,
    /// Continuous coordinate-ascent polish of the grid optimum.
    pub refine_powers: bool,
    /// Wall-clock cap; on expiry the best allocation so far is returned and
    /// flagged as not proven optimal.
    pub time_budget_s: Option<f64>,
}

impl Default for ExactConfig {
    fn default() -> Self {
        Self {
            power_grid_mw: vec![5.0, 10.0, 15.0],
            max_groups: None,
            limits: ExactLimits::default(),
            refine_powers: false,
            time_budget_s: None,
        }
    }
}

impl ExactConfig {
    fn validate(&self, scenario: &Scenario) -> Result<()> {
        let l = &self.limits;
        if l.max_stas == 0 || l.max_rus == 0 || l.max_aps == 0 || l.max_grid_levels == 0 {
            return Err(ModelError::InvalidConfig("solver limits must be positive".into()));
        }
        if self.power_grid_mw.is_empty() {
            return Err(ModelError::InvalidConfig("power grid is empty".into()));
        }
        let p_max = scenario.params.p_max_sta_mw;
        if !self.power_grid_mw.iter().all(|&p| p > 0.0 && p <= p_max) {
            return Err(ModelError::InvalidConfig(format!(
                "grid levels must lie in (0, {p_max}] mW, got {:?}",
                self.power_grid_mw
            )));
        }
        if !self.power_grid_mw.windows(2).all(|w| w[0] < w[1]) {
            return Err(ModelError::InvalidConfig(
                "power grid must be strictly ascending".into(),
            ));
        }
        if self.max_groups == Some(0) {
            return Err(ModelError::InvalidConfig("max_groups must be >= 1".into()));
        }
        if let Some(t) = self.time_budget_s {
            if !(t > 0.0) {
                return Err(ModelError::InvalidConfig(format!("time budget must be > 0, got {t}")));
            }
        }
        Ok(())
    }

    /// Refuses instances beyond the configured limits.
    pub fn check_limits(&self, scenario: &Scenario) -> Result<()> {
        let l = &self.limits;
        let checks = [
            ("STAs", scenario.n_stas(), l.max_stas),
            ("RUs", scenario.params.num_rus, l.max_rus),
            ("APs", scenario.n_aps(), l.max_aps),
            ("grid levels", self.power_grid_mw.len(), l.max_grid_levels),
        ];
        for (what, got, max) in checks {
            if got > max {
                return Err(ModelError::SizeLimit(format!("{got} {what} > limit {max}")));
            }
        }
        // Member sets are kept as u64 bit masks.
        if scenario.n_stas() > 64 {
            return Err(ModelError::SizeLimit(format!("{} STAs > 64", scenario.n_stas())));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactReport {
    pub objective_bps: f64,
    /// Objective of the best grid allocation, before any polish.
    pub grid_objective_bps: f64,
    pub allocation: Allocation,
    pub evaluation: EvaluationResult,
    pub groupings_explored: usize,
    /// RU maps visited plus power combinations scored.
    pub nodes_explored: u64,
    /// Power branches cut by the AP budget.
    pub pruned: u64,
    /// False when the time budget ran out before the search finished.
    pub proven_optimal: bool,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone)]
struct RuBest {
    value: f64,
    /// Powers of the set's members, ascending STA order.
    powers: Vec<f64>,
}

#[derive(Debug, Clone)]
struct Incumbent {
    value: f64,
    ru_of_sta: Vec<Option<usize>>,
    power_of_sta: Vec<f64>,
}

#[derive(Debug)]
struct PartitionResult {
    best: Option<Incumbent>,
    nodes: u64,
    pruned: u64,
    timed_out: bool,
}

struct Search<'a> {
    scenario: &'a Scenario,
    gains: &'a GainMatrix,
    grid: &'a [f64],
    memo: HashMap<u64, RuBest>,
    nodes: u64,
    pruned: u64,
}

fn members_of(mask: u64) -> Vec<usize> {
    (0..64).filter(|b| mask & (1u64 << b) != 0).collect()
}

impl<'a> Search<'a> {
    fn new(scenario: &'a Scenario, gains: &'a GainMatrix, grid: &'a [f64]) -> Self {
        Self {
            scenario,
            gains,
            grid,
            memo: HashMap::new(),
            nodes: 0,
            pruned: 0,
        }
    }

    fn set_value(&self, members: &[usize], powers: &[f64]) -> f64 {
        set_sinrs(self.scenario, self.gains, members, powers)
            .into_iter()
            .map(|s| ru_throughput(self.scenario, s))
            .sum()
    }

    /// Best grid powers for one RU's member set, ignoring AP budgets.
    fn ru_best(&mut self, mask: u64) -> RuBest {
        if let Some(b) = self.memo.get(&mask) {
            return b.clone();
        }
        let members = members_of(mask);
        let k = members.len();
        let mut idx = vec![0usize; k];
        let mut powers = vec![0.0; k];
        let mut best: Option<RuBest> = None;
        'outer: loop {
            for i in 0..k {
                powers[i] = self.grid[idx[i]];
            }
            self.nodes += 1;
            let value = self.set_value(&members, &powers);
            if best.as_ref().is_none_or(|b| value > b.value) {
                best = Some(RuBest {
                    value,
                    powers: powers.clone(),
                });
            }
            let mut pos = k;
            loop {
                if pos == 0 {
                    break 'outer;
                }
                pos -= 1;
                idx[pos] += 1;
                if idx[pos] < self.grid.len() {
                    break;
                }
                idx[pos] = 0;
            }
        }
        let best = best.expect("at least one combination");
        self.memo.insert(mask, best.clone());
        best
    }

    /// Best powers for a full RU map. Returns the objective and per-STA
    /// powers, or `None` if no grid choice fits the AP budgets.
    fn best_powers(&mut self, ru_of_sta: &[Option<usize>]) -> Option<(f64, Vec<f64>)> {
        let s = self.scenario;
        let n_rus = s.params.num_rus;
        let top = *self.grid.last().expect("non-empty grid");
        let mut masks = vec![0u64; n_rus];
        let mut per_ap = vec![0usize; s.n_aps()];
        for (u, ru) in ru_of_sta.iter().enumerate() {
            if let Some(ru) = ru {
                masks[*ru] |= 1u64 << u;
                per_ap[s.ap_of(u)] += 1;
            }
        }

        let budget = s.params.p_max_ap_mw + BUDGET_TOLERANCE_MW;
        let mut power_of_sta = vec![0.0; ru_of_sta.len()];
        if per_ap.iter().all(|&c| c as f64 * top <= budget) {
            let mut total = 0.0;
            for &mask in masks.iter().filter(|&&m| m != 0) {
                let best = self.ru_best(mask);
                total += best.value;
                for (u, p) in members_of(mask).into_iter().zip(best.powers) {
                    power_of_sta[u] = p;
                }
            }
            return Some((total, power_of_sta));
        }

        let assigned: Vec<usize> = (0..ru_of_sta.len()).filter(|&u| ru_of_sta[u].is_some()).collect();
        let mut spent = vec![0.0; s.n_aps()];
        let mut best: Option<(f64, Vec<f64>)> = None;
        self.joint(&assigned, 0, &masks, &mut power_of_sta, &mut spent, budget, &mut best);
        best
    }

    #[allow(clippy::too_many_arguments)]
    fn joint(
        &mut self,
        assigned: &[usize],
        depth: usize,
        masks: &[u64],
        powers: &mut Vec<f64>,
        spent: &mut Vec<f64>,
        budget: f64,
        best: &mut Option<(f64, Vec<f64>)>,
    ) {
        if depth == assigned.len() {
            self.nodes += 1;
            let mut total = 0.0;
            for &mask in masks.iter().filter(|&&m| m != 0) {
                let members = members_of(mask);
                let p: Vec<f64> = members.iter().map(|&u| powers[u]).collect();
                total += self.set_value(&members, &p);
            }
            if best.as_ref().is_none_or(|(v, _)| total > *v) {
                *best = Some((total, powers.clone()));
            }
            return;
        }
        let u = assigned[depth];
        let ap = self.scenario.ap_of(u);
        for (i, &p) in self.grid.iter().enumerate() {
            if spent[ap] + p > budget {
                // Grid is ascending, so every higher level is cut too.
                self.pruned += (self.grid.len() - i) as u64;
                break;
            }
            spent[ap] += p;
            powers[u] = p;
            self.joint(assigned, depth + 1, masks, powers, spent, budget, best);
            spent[ap] -= p;
        }
        powers[u] = 0.0;
    }
}

fn search_partition(
    scenario: &Scenario,
    gains: &GainMatrix,
    grid: &[f64],
    labels: &[usize],
    deadline: Option<Instant>,
) -> PartitionResult {
    let mut search = Search::new(scenario, gains, grid);
    let mut best: Option<Incumbent> = None;
    let mut timed_out = false;
    for (i, ru_of_sta) in enumerate_assignments(scenario, labels).enumerate() {
        if i % 256 == 0 {
            if let Some(d) = deadline {
                if Instant::now() >= d {
                    timed_out = true;
                    break;
                }
            }
        }
        search.nodes += 1;
        if let Some((value, power_of_sta)) = search.best_powers(&ru_of_sta) {
            if best.as_ref().is_none_or(|b| value > b.value) {
                best = Some(Incumbent {
                    value,
                    ru_of_sta,
                    power_of_sta,
                });
            }
        }
    }
    PartitionResult {
        best,
        nodes: search.nodes,
        pruned: search.pruned,
        timed_out,
    }
}

/// Maximizes total throughput over AP partitions, RU maps and grid powers,
/// subject to every constraint of the model.
pub fn solve_exact(scenario: &Scenario, gains: &GainMatrix, config: &ExactConfig) -> Result<ExactReport> {
    let started = Instant::now();
    gains.check_dims(scenario)?;
    config.validate(scenario)?;
    config.check_limits(scenario)?;

    let params = &scenario.params;
    let g_max = config.max_groups.unwrap_or(params.g_max);
    let size_cap = params.max_aps_per_group.unwrap_or(scenario.n_aps());
    let partitions: Vec<Vec<usize>> = enumerate_groupings(scenario.n_aps(), g_max)
        .into_iter()
        .filter(|l| largest_block(l) <= size_cap)
        .collect();
    let deadline = config
        .time_budget_s
        .map(|t| started + Duration::from_secs_f64(t));

    let results: Vec<PartitionResult> = partitions
        .par_iter()
        .map(|labels| search_partition(scenario, gains, &config.power_grid_mw, labels, deadline))
        .collect();

    let mut nodes = 0;
    let mut pruned = 0;
    let mut timed_out = false;
    let mut best: Option<(usize, Incumbent)> = None;
    for (i, r) in results.into_iter().enumerate() {
        nodes += r.nodes;
        pruned += r.pruned;
        timed_out |= r.timed_out;
        if let Some(inc) = r.best {
            if best.as_ref().is_none_or(|(_, b)| inc.value > b.value) {
                best = Some((i, inc));
            }
        }
    }

    let mut allocation = match best {
        Some((i, inc)) => Allocation {
            ru_of_sta: inc.ru_of_sta,
            power_of_sta: inc.power_of_sta,
            grouping: Some(ApGrouping::from_labels(&partitions[i])),
        },
        // Only reachable when the deadline hit before the first RU map, or
        // when the size cap rules out every partition.
        None => Allocation::unassigned(scenario.n_stas())
            .with_grouping(ApGrouping::from_labels(&vec![0; scenario.n_aps()])),
    };
    // Re-evaluated so the reported objective sums per STA like `evaluate`.
    let grid_objective_bps = evaluate(scenario, gains, &allocation)?.total_throughput;
    if config.refine_powers {
        polish_powers(scenario, gains, &mut allocation)?;
    }
    let evaluation = evaluate(scenario, gains, &allocation)?;

    Ok(ExactReport {
        objective_bps: evaluation.total_throughput,
        grid_objective_bps,
        allocation,
        evaluation,
        groupings_explored: partitions.len(),
        nodes_explored: nodes,
        pruned,
        proven_optimal: !timed_out,
        wall_time_s: started.elapsed().as_secs_f64(),
    })
}

/// Cyclic single-coordinate ascent on the powers of assigned STAs, within
/// `[0, P_max]` and the AP budget. Only strict improvements are accepted, so
/// the objective never decreases.
pub fn polish_powers(scenario: &Scenario, gains: &GainMatrix, alloc: &mut Allocation) -> Result<()> {
    let params = &scenario.params;
    let mut current = evaluate(scenario, gains, alloc)?.total_throughput;
    let assigned: Vec<usize> = (0..alloc.n_stas()).filter(|&u| alloc.ru_of_sta[u].is_some()).collect();

    for _ in 0..POLISH_SWEEPS {
        let mut improved = false;
        for &u in &assigned {
            let ap = scenario.ap_of(u);
            let others: f64 = assigned
                .iter()
                .filter(|&&k| k != u && scenario.ap_of(k) == ap)
                .map(|&k| alloc.power_of_sta[k])
                .sum();
            let hi = params.p_max_sta_mw.min(params.p_max_ap_mw - others).max(0.0);
            let original = alloc.power_of_sta[u];

            let objective_at = |p: f64, alloc: &mut Allocation| -> Result<f64> {
                alloc.power_of_sta[u] = p;
                Ok(evaluate(scenario, gains, alloc)?.total_throughput)
            };

            let (mut a, mut b) = (0.0, hi);
            let ratio = (5f64.sqrt() - 1.0) / 2.0;
            let mut c = b - ratio * (b - a);
            let mut d = a + ratio * (b - a);
            let mut fc = objective_at(c, alloc)?;
            let mut fd = objective_at(d, alloc)?;
            for _ in 0..GOLDEN_ITERATIONS {
                if fc >= fd {
                    b = d;
                    d = c;
                    fd = fc;
                    c = b - ratio * (b - a);
                    fc = objective_at(c, alloc)?;
                } else {
                    a = c;
                    c = d;
                    fc = fd;
                    d = a + ratio * (b - a);
                    fd = objective_at(d, alloc)?;
                }
            }

            let mut best_p = original;
            let mut best_v = current;
            for p in [(a + b) / 2.0, hi] {
                let v = objective_at(p, alloc)?;
                if v > best_v {
                    best_p = p;
                    best_v = v;
                }
            }
            alloc.power_of_sta[u] = best_p;
            if best_v > current * (1.0 + 1e-12) {
                improved = true;
            }
            current = best_v;
        }
        if !improved {
            break;
        }
    }
    Ok(())
}
