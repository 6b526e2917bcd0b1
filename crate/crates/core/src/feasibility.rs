//! Constraint-by-constraint feasibility check of an allocation.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::model::{Allocation, Scenario};

/// Absolute slack (mW) when comparing powers against their caps.
pub const POWER_TOLERANCE_MW: f64 = 1e-9;

/// Constraint families of the joint allocation model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Constraint {
    /// At most one RU per STA. The per-STA map cannot express a breach, so
    /// this family never fires for a structurally valid allocation.
    OneRu,
    /// 0 <= P_u <= P_max, and P_u = 0 when the STA has no RU.
    StaPower,
    /// An RU is used at most once inside one BSS.
    NoIntraBssReuse,
    /// Total power of an AP's STAs stays within P_max^AP.
    ApPower,
    /// Each AP sits in exactly one active group, within the optional size cap.
    OneGroup,
    /// At most G_max active groups.
    GroupCap,
    /// STAs of different APs share an RU only if their APs share a group.
    GroupRuReuse,
}

impl Constraint {
    pub const ALL: [Constraint; 7] = [
        Constraint::OneRu,
        Constraint::StaPower,
        Constraint::NoIntraBssReuse,
        Constraint::ApPower,
        Constraint::OneGroup,
        Constraint::GroupCap,
        Constraint::GroupRuReuse,
    ];

    /// Constraints that only make sense when a grouping exists.
    pub fn needs_grouping(self) -> bool {
        matches!(
            self,
            Constraint::OneGroup | Constraint::GroupCap | Constraint::GroupRuReuse
        )
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Constraint::OneRu => "ONE_RU(5)",
            Constraint::StaPower => "STA_POWER(6)",
            Constraint::NoIntraBssReuse => "NO_INTRA_BSS_REUSE(7)",
            Constraint::ApPower => "AP_POWER(8)",
            Constraint::OneGroup => "ONE_GROUP(9)+(10)",
            Constraint::GroupCap => "GROUP_CAP(11)",
            Constraint::GroupRuReuse => "GROUP_RU_REUSE(12)",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub constraint: Constraint,
    /// STA, AP, RU or group indices involved, as described in `message`.
    pub indices: Vec<usize>,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityReport {
    pub violations: Vec<Violation>,
    /// False when the allocation carries no grouping; the group constraints
    /// were then not applicable and were skipped.
    pub grouping_checked: bool,
}

impl FeasibilityReport {
    pub fn is_feasible(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn families(&self) -> Vec<Constraint> {
        let mut f: Vec<Constraint> = self.violations.iter().map(|v| v.constraint).collect();
        f.sort();
        f.dedup();
        f
    }

    pub fn count(&self, c: Constraint) -> usize {
        self.violations.iter().filter(|v| v.constraint == c).count()
    }
}

/// Reports every breached (constraint, index) pair. Expects a structurally
/// valid allocation (see [`Allocation::validate_structure`]).
pub fn check_feasibility(scenario: &Scenario, alloc: &Allocation) -> FeasibilityReport {
    let params = &scenario.params;
    let mut violations = Vec::new();

    for (u, (&ru, &p)) in alloc.ru_of_sta.iter().zip(&alloc.power_of_sta).enumerate() {
        if p < 0.0 {
            violations.push(Violation {
                constraint: Constraint::StaPower,
                indices: vec![u],
                message: format!("STA {u} has negative power {p} mW"),
            });
        } else if ru.is_none() && p > 0.0 {
            violations.push(Violation {
                constraint: Constraint::StaPower,
                indices: vec![u],
                message: format!("STA {u} has no RU but {p} mW of power"),
            });
        } else if p > params.p_max_sta_mw + POWER_TOLERANCE_MW {
            violations.push(Violation {
                constraint: Constraint::StaPower,
                indices: vec![u],
                message: format!("STA {u} power {p} mW exceeds {} mW", params.p_max_sta_mw),
            });
        }
    }

    // (AP, RU) -> STAs using it.
    let mut users: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (u, ru) in alloc.ru_of_sta.iter().enumerate() {
        if let Some(ru) = ru {
            users.entry((scenario.ap_of(u), *ru)).or_default().push(u);
        }
    }
    for ((ap, ru), stas) in &users {
        if stas.len() > 1 {
            violations.push(Violation {
                constraint: Constraint::NoIntraBssReuse,
                indices: stas.clone(),
                message: format!("AP {ap} uses RU {ru} for STAs {stas:?}"),
            });
        }
    }

    let mut ap_power = vec![0.0; scenario.n_aps()];
    // Power on unassigned STAs is already a STA_POWER breach.
    for (u, &p) in alloc.power_of_sta.iter().enumerate() {
        if alloc.ru_of_sta[u].is_some() {
            ap_power[scenario.ap_of(u)] += p;
        }
    }
    for (ap, &total) in ap_power.iter().enumerate() {
        if total > params.p_max_ap_mw + POWER_TOLERANCE_MW {
            violations.push(Violation {
                constraint: Constraint::ApPower,
                indices: vec![ap],
                message: format!("AP {ap} transmits {total} mW, cap {} mW", params.p_max_ap_mw),
            });
        }
    }

    let grouping_checked = alloc.grouping.is_some();
    if let Some(grouping) = &alloc.grouping {
        let size_cap = params.max_aps_per_group.unwrap_or(scenario.n_aps());
        let mut members: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (ap, g) in grouping.group_of_ap.iter().enumerate() {
            match g {
                None => violations.push(Violation {
                    constraint: Constraint::OneGroup,
                    indices: vec![ap],
                    message: format!("AP {ap} belongs to no group"),
                }),
                Some(g) => {
                    members.entry(*g).or_default().push(ap);
                    if !grouping.active_groups.contains(g) {
                        violations.push(Violation {
                            constraint: Constraint::OneGroup,
                            indices: vec![ap, *g],
                            message: format!("AP {ap} is in inactive group {g}"),
                        });
                    }
                }
            }
        }
        for (g, aps) in &members {
            if aps.len() > size_cap {
                violations.push(Violation {
                    constraint: Constraint::OneGroup,
                    indices: vec![*g],
                    message: format!("group {g} has {} APs, cap {size_cap}", aps.len()),
                });
            }
        }
        if grouping.active_groups.len() > params.g_max {
            violations.push(Violation {
                constraint: Constraint::GroupCap,
                indices: grouping.active_groups.iter().copied().collect(),
                message: format!(
                    "{} active groups, cap {}",
                    grouping.active_groups.len(),
                    params.g_max
                ),
            });
        }

        let mut by_ru: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (u, ru) in alloc.ru_of_sta.iter().enumerate() {
            if let Some(ru) = ru {
                by_ru.entry(*ru).or_default().push(u);
            }
        }
        for (ru, stas) in &by_ru {
            for (i, &u) in stas.iter().enumerate() {
                for &v in &stas[i + 1..] {
                    let (a, b) = (scenario.ap_of(u), scenario.ap_of(v));
                    if a != b && !grouping.same_group(a, b) {
                        violations.push(Violation {
                            constraint: Constraint::GroupRuReuse,
                            indices: vec![u, v],
                            message: format!(
                                "STAs {u} (AP {a}) and {v} (AP {b}) share RU {ru} across groups"
                            ),
                        });
                    }
                }
            }
        }
    }

    FeasibilityReport {
        violations,
        grouping_checked,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ApGrouping, NetworkParams, Point};

    fn scenario(assoc: Vec<usize>, n_aps: usize) -> Scenario {
        let aps = (0..n_aps).map(|n| Point::new(20.0 * n as f64, 0.0)).collect();
        let stas = assoc
            .iter()
            .enumerate()
            .map(|(u, &n)| Point::new(20.0 * n as f64 + 1.0 + u as f64 * 0.1, 2.0))
            .collect();
        Scenario::new(NetworkParams::default(), aps, stas, assoc).unwrap()
    }

    #[test]
    fn same_ap_same_ru_is_intra_bss_reuse() {
        let s = scenario(vec![0, 0], 1);
        let mut a = Allocation::unassigned(2).with_grouping(ApGrouping::single(1));
        a.assign(0, 3, 5.0);
        a.assign(1, 3, 5.0);
        let r = check_feasibility(&s, &a);
        assert_eq!(r.families(), vec![Constraint::NoIntraBssReuse]);
        assert_eq!(r.violations[0].indices, vec![0, 1]);
    }

    #[test]
    fn seven_stas_at_cap_overload_the_ap() {
        // 7 x 15 mW = 105 mW > 100 mW.
        let s = scenario(vec![0; 7], 1);
        let mut a = Allocation::unassigned(7).with_grouping(ApGrouping::single(1));
        for u in 0..7 {
            a.assign(u, u, 15.0);
        }
        let r = check_feasibility(&s, &a);
        assert_eq!(r.families(), vec![Constraint::ApPower]);
        assert_eq!(r.violations[0].indices, vec![0]);
    }

    #[test]
    fn co_ru_in_shared_group_is_feasible() {
        let s = scenario(vec![0, 1, 2], 3);
        let mut a = Allocation::unassigned(3).with_grouping(ApGrouping::from_labels(&[0, 0, 1]));
        a.assign(0, 2, 15.0);
        a.assign(1, 2, 10.0);
        a.assign(2, 5, 5.0);
        let r = check_feasibility(&s, &a);
        assert!(r.is_feasible(), "{:?}", r.violations);
        assert!(r.grouping_checked);
    }

    #[test]
    fn co_ru_across_groups_is_reported() {
        let s = scenario(vec![0, 1], 2);
        let mut a = Allocation::unassigned(2).with_grouping(ApGrouping::from_labels(&[0, 1]));
        a.assign(0, 0, 15.0);
        a.assign(1, 0, 15.0);
        assert_eq!(check_feasibility(&s, &a).families(), vec![Constraint::GroupRuReuse]);
    }

    #[test]
    fn sta_power_breaches() {
        let s = scenario(vec![0, 0, 0], 1);
        let mut a = Allocation::unassigned(3).with_grouping(ApGrouping::single(1));
        a.assign(0, 0, 15.5);
        a.assign(1, 1, -1.0);
        a.power_of_sta[2] = 3.0;
        let r = check_feasibility(&s, &a);
        assert_eq!(r.count(Constraint::StaPower), 3);
        assert_eq!(r.families(), vec![Constraint::StaPower]);
    }

    #[test]
    fn group_breaches() {
        let mut s = scenario(vec![0, 1, 2], 3);
        let mut a = Allocation::unassigned(3);
        a.grouping = Some(ApGrouping {
            group_of_ap: vec![None, Some(1), Some(1)],
            active_groups: [1].into(),
        });
        assert_eq!(check_feasibility(&s, &a).families(), vec![Constraint::OneGroup]);

        a.grouping = Some(ApGrouping {
            group_of_ap: vec![Some(0), Some(1), Some(1)],
            active_groups: [1].into(),
        });
        assert_eq!(check_feasibility(&s, &a).families(), vec![Constraint::OneGroup]);

        s.params.g_max = 2;
        a.grouping = Some(ApGrouping::from_labels(&[0, 1, 2]));
        assert_eq!(check_feasibility(&s, &a).families(), vec![Constraint::GroupCap]);

        s.params.g_max = 4;
        s.params.max_aps_per_group = Some(2);
        a.grouping = Some(ApGrouping::single(3));
        assert_eq!(check_feasibility(&s, &a).families(), vec![Constraint::OneGroup]);
    }

    #[test]
    fn ungrouped_allocation_skips_group_families() {
        let s = scenario(vec![0, 1], 2);
        let mut a = Allocation::unassigned(2);
        a.assign(0, 0, 15.0);
        a.assign(1, 0, 15.0);
        let r = check_feasibility(&s, &a);
        assert!(r.is_feasible());
        assert!(!r.grouping_checked);
    }

    #[test]
    fn cap_comparisons_allow_rounding_slack() {
        let s = scenario(vec![0; 3], 1);
        let mut a = Allocation::unassigned(3).with_grouping(ApGrouping::single(1));
        let third = 100.0 / 3.0;
        // Per-STA cap is 15 mW, so lift it for this check.
        let mut s = s;
        s.params.p_max_sta_mw = 40.0;
        for u in 0..3 {
            a.assign(u, u, third);
        }
        assert!(check_feasibility(&s, &a).is_feasible());
    }
}
