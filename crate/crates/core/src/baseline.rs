//! Non-coordinated benchmark: every AP picks RUs for its own STAs at random
//! and transmits at full per-STA power, with no knowledge of its neighbours.

use rand::seq::{index, SliceRandom};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::model::{Allocation, ApGrouping, GainMatrix, Scenario};

/// What to do when `P_max` on every served STA overruns the AP budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum CapMode {
    /// Scale all of the AP's powers down uniformly to the budget.
    #[default]
    Scale,
    /// Drop the AP's weakest-channel STAs until the rest fit at `P_max`.
    Truncate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineConfig {
    pub seed: u64,
    #[serde(default)]
    pub cap_mode: CapMode,
}

impl BaselineConfig {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            cap_mode: CapMode::Scale,
        }
    }
}

/// Random per-AP RU assignment at maximum power.
///
/// Each AP draws from its own ChaCha stream (stream id = AP index), so the
/// outcome for one AP does not depend on the others. If an AP has more STAs
/// than RUs a uniform subset is served. All APs are put in one group, which
/// makes cross-BSS collisions on an RU legal.
///
/// `gains` is only consulted by [`CapMode::Truncate`].
pub fn non_coordinated_allocate(scenario: &Scenario, gains: &GainMatrix, config: &BaselineConfig) -> Allocation {
    let params = &scenario.params;
    let n_rus = params.num_rus;
    let mut alloc = Allocation::unassigned(scenario.n_stas()).with_grouping(ApGrouping::single(scenario.n_aps()));

    for ap in 0..scenario.n_aps() {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(ap as u64);

        let mut stas = scenario.stas_of(ap);
        if stas.len() > n_rus {
            stas.shuffle(&mut rng);
            stas.truncate(n_rus);
            stas.sort_unstable();
        }
        let rus = index::sample(&mut rng, n_rus, stas.len());
        for (&u, ru) in stas.iter().zip(rus.iter()) {
            alloc.assign(u, ru, params.p_max_sta_mw);
        }

        let demand = stas.len() as f64 * params.p_max_sta_mw;
        if demand > params.p_max_ap_mw {
            match config.cap_mode {
                CapMode::Scale => {
                    let p = params.p_max_ap_mw / stas.len() as f64;
                    for &u in &stas {
                        alloc.power_of_sta[u] = p;
                    }
                }
                CapMode::Truncate => {
                    let keep = (params.p_max_ap_mw / params.p_max_sta_mw).floor() as usize;
                    let mut by_gain = stas.clone();
                    by_gain.sort_by(|&a, &b| {
                        gains
                            .own_gain(scenario, b)
                            .total_cmp(&gains.own_gain(scenario, a))
                            .then(a.cmp(&b))
                    });
                    for &u in &by_gain[keep..] {
                        alloc.unassign(u);
                    }
                }
            }
        }
    }
    alloc
}
