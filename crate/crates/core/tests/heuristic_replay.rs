use mapc_core::eval::set_sinrs;
use mapc_core::feasibility::check_feasibility;
use mapc_core::heuristic::{run_heuristic_traced, sort_stas_by_gain, CapacityMetric, HeuristicConfig};
use mapc_core::testkit::instance;

fn table_instance(seed: u64) -> (mapc_core::Scenario, mapc_core::GainMatrix) {
    let n_stas = 8 + 2 * (seed as usize % 9);
    instance(seed, 4, n_stas, 10)
}

#[test]
fn committed_sets_clear_threshold_and_model_constraints() {
    for seed in 0..40 {
        let (s, g) = table_instance(seed);
        let config = HeuristicConfig::for_params(&s.params);
        let out = run_heuristic_traced(&s, &g, &config).unwrap();
        let report = check_feasibility(&s, &out.allocation);
        assert!(report.is_feasible(), "seed {seed}: {:?}", report.violations);
        assert!(!report.grouping_checked);
        for d in &out.decisions {
            let (members, powers): (Vec<usize>, Vec<f64>) = d.members.iter().copied().unzip();
            for sinr in set_sinrs(&s, &g, &members, &powers) {
                assert!(sinr >= s.params.sinr_threshold_linear - 1e-9);
            }
        }
    }
}

/// No other admissible level combination for a committed set does better on
/// the configured metric.
#[test]
fn committed_powers_are_best_for_their_set() {
    for metric in [CapacityMetric::MinSinr, CapacityMetric::SumRate] {
        for seed in 0..20 {
            let (s, g) = table_instance(seed);
            let config = HeuristicConfig::for_params(&s.params).with_metric(metric);
            let out = run_heuristic_traced(&s, &g, &config).unwrap();
            let mut spent = vec![0.0; s.n_aps()];
            for d in &out.decisions {
                let (members, chosen): (Vec<usize>, Vec<f64>) = d.members.iter().copied().unzip();
                let score = |p: &[f64]| -> Option<f64> {
                    for (i, &u) in members.iter().enumerate() {
                        if spent[s.ap_of(u)] + p[i] > s.params.p_max_ap_mw + 1e-9 {
                            return None;
                        }
                    }
                    let sinrs = set_sinrs(&s, &g, &members, p);
                    if sinrs.iter().any(|&x| x < config.sinr_threshold_linear) {
                        return None;
                    }
                    Some(match metric {
                        CapacityMetric::MinSinr => (1.0 + sinrs.iter().copied().fold(f64::INFINITY, f64::min)).log2(),
                        CapacityMetric::SumRate => sinrs.iter().map(|x| (1.0 + x).log2()).sum(),
                    })
                };
                let best_chosen = score(&chosen).expect("committed combo is admissible");
                let k = members.len();
                for code in 0..3usize.pow(k as u32) {
                    let p: Vec<f64> = (0..k)
                        .map(|i| config.power_levels_mw[(code / 3usize.pow(i as u32)) % 3])
                        .collect();
                    if let Some(v) = score(&p) {
                        assert!(v <= best_chosen, "seed {seed}: {p:?} beats {chosen:?}");
                    }
                }
                for &(u, p) in &d.members {
                    spent[s.ap_of(u)] += p;
                }
            }
        }
    }
}

#[test]
fn first_decision_is_seeded_by_strongest_sta() {
    for seed in 0..20 {
        let (s, g) = table_instance(seed);
        let strongest = (0..s.n_stas())
            .max_by(|&a, &b| g.own_gain(&s, a).total_cmp(&g.own_gain(&s, b)).then(b.cmp(&a)))
            .unwrap();
        assert_eq!(sort_stas_by_gain(&s, &g)[0], strongest);
        let out = run_heuristic_traced(&s, &g, &HeuristicConfig::for_params(&s.params)).unwrap();
        let first = out.decisions.first().expect("some RU gets a set");
        assert_eq!(first.ru, 0);
        assert_eq!(first.members[0].0, strongest);
    }
}

#[test]
fn runs_are_deterministic() {
    let (s, g) = table_instance(5);
    let config = HeuristicConfig::for_params(&s.params);
    let a = run_heuristic_traced(&s, &g, &config).unwrap();
    let b = run_heuristic_traced(&s, &g, &config).unwrap();
    assert_eq!(a.allocation, b.allocation);
    assert_eq!(a.trace_text(), b.trace_text());
}
