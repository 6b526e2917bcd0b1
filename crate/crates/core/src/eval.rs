//! SINR and throughput evaluation of an arbitrary allocation.

use crate::error::{ModelError, Result};
use crate::model::{Allocation, EvaluationResult, GainMatrix, Scenario};

/// Downlink SINR of STA `u` under `alloc`, in linear units.
///
/// Interference comes from every other STA on the same RU, received through
/// the gain between `u` and the interferer's serving AP. Unassigned STAs have
/// SINR 0.
pub fn compute_sinr(scenario: &Scenario, gains: &GainMatrix, alloc: &Allocation, u: usize) -> f64 {
    let Some(ru) = alloc.ru_of_sta[u] else {
        return 0.0;
    };
    let signal = alloc.power_of_sta[u] * gains.get(u, scenario.ap_of(u));
    let mut interference = 0.0;
    for k in 0..alloc.n_stas() {
        if k != u && alloc.ru_of_sta[k] == Some(ru) {
            interference += alloc.power_of_sta[k] * gains.get(u, scenario.ap_of(k));
        }
    }
    signal / (interference + scenario.params.noise_power_mw)
}

/// SINRs of a set of co-channel STAs, each interfered only by the others in
/// the set. `members` should be ascending for results bit-identical to
/// [`compute_sinr`].
pub fn set_sinrs(scenario: &Scenario, gains: &GainMatrix, members: &[usize], powers: &[f64]) -> Vec<f64> {
    debug_assert_eq!(members.len(), powers.len());
    let noise = scenario.params.noise_power_mw;
    members
        .iter()
        .enumerate()
        .map(|(i, &u)| {
            let signal = powers[i] * gains.get(u, scenario.ap_of(u));
            let mut interference = 0.0;
            for (k, &v) in members.iter().enumerate() {
                if k != i {
                    interference += powers[k] * gains.get(u, scenario.ap_of(v));
                }
            }
            signal / (interference + noise)
        })
        .collect()
}

/// Shannon throughput of one RU at the given SINR (bits/s).
#[inline]
pub fn ru_throughput(scenario: &Scenario, sinr: f64) -> f64 {
    scenario.params.ru_bandwidth_hz * (1.0 + sinr).log2()
}

pub fn evaluate(scenario: &Scenario, gains: &GainMatrix, alloc: &Allocation) -> Result<EvaluationResult> {
    gains.check_dims(scenario)?;
    alloc.validate_structure(scenario)?;

    let n = alloc.n_stas();
    let sinr_of_sta: Vec<f64> = (0..n)
        .map(|u| compute_sinr(scenario, gains, alloc, u))
        .collect();
    let throughput_of_sta: Vec<f64> = (0..n)
        .map(|u| match alloc.ru_of_sta[u] {
            Some(_) => ru_throughput(scenario, sinr_of_sta[u]),
            None => 0.0,
        })
        .collect();
    let total_throughput = throughput_of_sta.iter().sum();

    let mut power_used_by_ap = vec![0.0; scenario.n_aps()];
    for u in 0..n {
        if alloc.ru_of_sta[u].is_some() {
            power_used_by_ap[scenario.ap_of(u)] += alloc.power_of_sta[u];
        }
    }

    Ok(EvaluationResult {
        sinr_of_sta,
        throughput_of_sta,
        total_throughput,
        power_used_by_ap,
    })
}

/// Relative throughput gain of `test` over `baseline`, in percent.
pub fn throughput_gain(test: &EvaluationResult, baseline: &EvaluationResult) -> Result<f64> {
    gain_percent(test.total_throughput, baseline.total_throughput)
}

pub fn gain_percent(test_total: f64, baseline_total: f64) -> Result<f64> {
    if baseline_total == 0.0 {
        return Err(ModelError::UndefinedGain);
    }
    Ok(100.0 * (test_total - baseline_total) / baseline_total)
}
