//! Test support: instance builders and brute-force oracles written
//! independently of the solver code paths they check.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{Allocation, ApGrouping, GainMatrix, NetworkParams, Scenario};
use crate::propagation::{build_gain_matrix, generate_scenario, PlacementConfig};

/// A generated instance with the default parameters except the RU count.
pub fn instance(seed: u64, n_aps: usize, n_stas: usize, n_rus: usize) -> (Scenario, GainMatrix) {
    let params = NetworkParams {
        num_rus: n_rus,
        ..Default::default()
    };
    let variants = [(0.30, 2.0), (0.375, 2.5), (0.45, 3.0), (0.525, 3.5), (0.60, 4.0)];
    let (near_fraction, rayleigh_shape_divisor) = variants[(seed % 5) as usize];
    let placement = PlacementConfig {
        near_fraction,
        rayleigh_shape_divisor,
        seed,
        ..Default::default()
    };
    let s = generate_scenario(n_aps, n_stas, &params, &placement).expect("valid instance");
    let g = build_gain_matrix(&s).expect("valid gains");
    (s, g)
}

/// Small instance with 2-3 APs, 4-6 STAs and 2-3 RUs drawn from `seed`.
pub fn small_instance(seed: u64) -> (Scenario, GainMatrix) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_0f0a_c1e5);
    let n_aps = rng.gen_range(2..=3);
    let n_stas = rng.gen_range(4..=6);
    let n_rus = rng.gen_range(2..=3);
    instance(seed, n_aps, n_stas, n_rus)
}

/// Total throughput computed from first principles: log-distance gains are
/// taken from `gains`, everything else is recomputed here. Summation order
/// (interferers by ascending index, then STAs by ascending index) matches the
/// model definition so equal allocations give bit-equal totals.
pub fn objective(scenario: &Scenario, gains: &GainMatrix, ru: &[Option<usize>], power: &[f64]) -> f64 {
    let n = ru.len();
    let mut total = 0.0;
    for u in 0..n {
        let Some(j) = ru[u] else { continue };
        let mut interference = 0.0;
        for k in 0..n {
            if k != u && ru[k] == Some(j) {
                interference += power[k] * gains.get(u, scenario.association[k]);
            }
        }
        let sinr = power[u] * gains.get(u, scenario.association[u])
            / (interference + scenario.params.noise_power_mw);
        total += scenario.params.ru_bandwidth_hz * (1.0 + sinr).log2();
    }
    total
}

/// Maximum total throughput over every (RU or none) x grid power choice per
/// STA that respects one-RU-per-BSS reuse and the AP budgets. Assumes no
/// per-group size cap, in which case putting all APs in one group makes any
/// such choice admissible.
///
/// Enumerates STAs from the last to the first, RUs in descending order with
/// "unassigned" last, powers descending.
pub fn brute_force_optimum(scenario: &Scenario, gains: &GainMatrix, grid: &[f64]) -> (f64, Allocation) {
    assert!(scenario.params.max_aps_per_group.is_none());
    let n = scenario.n_stas();
    let mut ru = vec![None; n];
    let mut power = vec![0.0; n];
    let mut spent = vec![0.0; scenario.n_aps()];
    let mut best = (f64::NEG_INFINITY, Allocation::unassigned(n));
    recurse(scenario, gains, grid, n, &mut ru, &mut power, &mut spent, &mut best);
    best.1.grouping = Some(ApGrouping::single(scenario.n_aps()));
    best
}

#[allow(clippy::too_many_arguments)]
fn recurse(
    s: &Scenario,
    gains: &GainMatrix,
    grid: &[f64],
    remaining: usize,
    ru: &mut Vec<Option<usize>>,
    power: &mut Vec<f64>,
    spent: &mut Vec<f64>,
    best: &mut (f64, Allocation),
) {
    if remaining == 0 {
        let v = objective(s, gains, ru, power);
        if v > best.0 {
            best.0 = v;
            best.1.ru_of_sta = ru.clone();
            best.1.power_of_sta = power.clone();
        }
        return;
    }
    let u = remaining - 1;
    let ap = s.association[u];
    for j in (0..s.params.num_rus).rev() {
        let clash = (u + 1..ru.len()).any(|k| s.association[k] == ap && ru[k] == Some(j));
        if clash {
            continue;
        }
        for &p in grid.iter().rev() {
            if spent[ap] + p > s.params.p_max_ap_mw + 1e-9 {
                continue;
            }
            ru[u] = Some(j);
            power[u] = p;
            spent[ap] += p;
            recurse(s, gains, grid, remaining - 1, ru, power, spent, best);
            spent[ap] -= p;
        }
    }
    ru[u] = None;
    power[u] = 0.0;
    recurse(s, gains, grid, remaining - 1, ru, power, spent, best);
}

/// A random allocation on the power grid satisfying every model constraint
/// under a single all-AP group.
pub fn random_feasible_grid_allocation<R: Rng>(rng: &mut R, scenario: &Scenario, grid: &[f64]) -> Allocation {
    let n = scenario.n_stas();
    let j = scenario.params.num_rus;
    let mut alloc = Allocation::unassigned(n).with_grouping(ApGrouping::single(scenario.n_aps()));
    let mut spent = vec![0.0; scenario.n_aps()];
    for u in 0..n {
        let ap = scenario.association[u];
        let choice = rng.gen_range(0..=j);
        if choice == j {
            continue;
        }
        let taken = (0..u).any(|k| scenario.association[k] == ap && alloc.ru_of_sta[k] == Some(choice));
        let p = grid[rng.gen_range(0..grid.len())];
        if taken || spent[ap] + p > scenario.params.p_max_ap_mw {
            continue;
        }
        spent[ap] += p;
        alloc.assign(u, choice, p);
    }
    alloc
}
