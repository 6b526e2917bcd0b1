use std::f64::consts::{PI, TAU};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ModelError, Result};
use crate::model::{NetworkParams, Point, Scenario};

/// Where APs go and how STAs are scattered around them.
///
/// A `near_fraction` share of the STAs is clustered near its AP with a
/// Rayleigh radius of scale `coverage_radius_m / rayleigh_shape_divisor`;
/// the rest are edge users, uniform in radius over `[R/2, R]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlacementConfig {
    pub coverage_radius_m: f64,
    pub mean_inter_ap_distance_m: f64,
    pub near_fraction: f64,
    pub rayleigh_shape_divisor: f64,
    pub seed: u64,
}

impl Default for PlacementConfig {
    fn default() -> Self {
        Self {
            coverage_radius_m: 10.0,
            mean_inter_ap_distance_m: 11.74,
            near_fraction: 0.3,
            rayleigh_shape_divisor: 2.0,
            seed: 0,
        }
    }
}

impl PlacementConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.coverage_radius_m.is_finite() && self.coverage_radius_m > 0.0) {
            return Err(ModelError::InvalidConfig(format!(
                "coverage radius must be > 0, got {}",
                self.coverage_radius_m
            )));
        }
        if !(self.mean_inter_ap_distance_m.is_finite() && self.mean_inter_ap_distance_m >= 0.0) {
            return Err(ModelError::InvalidConfig(format!(
                "mean inter-AP distance must be >= 0, got {}",
                self.mean_inter_ap_distance_m
            )));
        }
        if !(0.0..=1.0).contains(&self.near_fraction) {
            return Err(ModelError::InvalidConfig(format!(
                "near fraction must be in [0, 1], got {}",
                self.near_fraction
            )));
        }
        if !(self.rayleigh_shape_divisor.is_finite() && self.rayleigh_shape_divisor > 0.0) {
            return Err(ModelError::InvalidConfig(format!(
                "Rayleigh shape divisor must be > 0, got {}",
                self.rayleigh_shape_divisor
            )));
        }
        Ok(())
    }

    pub fn rayleigh_sigma_m(&self) -> f64 {
        self.coverage_radius_m / self.rayleigh_shape_divisor
    }
}

/// APs on a regular polygon centred at the origin, scaled so the mean of all
/// pairwise AP distances equals `mean_inter_ap_distance_m`. Four APs give an
/// axis-aligned square of side `mean * 6 / (4 + 2 sqrt 2)`.
pub fn place_aps(n_aps: usize, config: &PlacementConfig) -> Vec<Point> {
    match n_aps {
        0 => return Vec::new(),
        1 => return vec![Point::new(0.0, 0.0)],
        _ => {}
    }
    let offset = PI / n_aps as f64;
    let unit: Vec<Point> = (0..n_aps)
        .map(|k| {
            let angle = offset + TAU * k as f64 / n_aps as f64;
            Point::new(angle.cos(), angle.sin())
        })
        .collect();
    let mut sum = 0.0;
    let mut pairs = 0usize;
    for i in 0..n_aps {
        for j in i + 1..n_aps {
            sum += unit[i].distance(&unit[j]);
            pairs += 1;
        }
    }
    let scale = config.mean_inter_ap_distance_m / (sum / pairs as f64);
    unit.into_iter()
        .map(|p| Point::new(p.x * scale, p.y * scale))
        .collect()
}

/// Rayleigh(sigma) radius conditioned on `r <= max`, by rejection.
pub fn sample_truncated_rayleigh<R: Rng + ?Sized>(rng: &mut R, sigma: f64, max: f64) -> f64 {
    loop {
        let u: f64 = rng.gen();
        let r = sigma * (-2.0 * (1.0 - u).ln()).sqrt();
        if r <= max {
            return r;
        }
    }
}

/// Generates a reproducible scenario from `config.seed`.
pub fn generate_scenario(
    n_aps: usize,
    n_stas: usize,
    params: &NetworkParams,
    config: &PlacementConfig,
) -> Result<Scenario> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    generate_scenario_with_rng(n_aps, n_stas, params, config, &mut rng)
}

/// Same as [`generate_scenario`] but draws from a caller-provided stream;
/// `config.seed` is ignored.
///
/// Association happens first (every AP gets one random STA, the remaining
/// STAs pick an AP uniformly), then each STA is placed around its own AP.
pub fn generate_scenario_with_rng<R: Rng + ?Sized>(
    n_aps: usize,
    n_stas: usize,
    params: &NetworkParams,
    config: &PlacementConfig,
    rng: &mut R,
) -> Result<Scenario> {
    config.validate()?;
    if n_aps == 0 || n_stas < n_aps {
        return Err(ModelError::InfeasibleAssociation {
            aps: n_aps,
            stas: n_stas,
        });
    }
    let ap_positions = place_aps(n_aps, config);

    let mut order: Vec<usize> = (0..n_stas).collect();
    order.shuffle(rng);
    let mut association = vec![0usize; n_stas];
    for (i, &u) in order.iter().enumerate() {
        association[u] = if i < n_aps { i } else { rng.gen_range(0..n_aps) };
    }

    let n_near = (config.near_fraction * n_stas as f64).round() as usize;
    order.shuffle(rng);
    let mut near = vec![false; n_stas];
    for &u in &order[..n_near] {
        near[u] = true;
    }

    let radius = config.coverage_radius_m;
    let sigma = config.rayleigh_sigma_m();
    let sta_positions = (0..n_stas)
        .map(|u| {
            let r = if near[u] {
                sample_truncated_rayleigh(rng, sigma, radius)
            } else {
                rng.gen_range(0.5 * radius..=radius)
            };
            let theta = rng.gen_range(0.0..TAU);
            let ap = ap_positions[association[u]];
            Point::new(ap.x + r * theta.cos(), ap.y + r * theta.sin())
        })
        .collect();

    Scenario::new(params.clone(), ap_positions, sta_positions, association)
}

/// Moves the APs to a layout with a new mean spacing, carrying every STA
/// along with its AP so STA-to-own-AP offsets are unchanged.
pub fn with_ap_spacing(scenario: &Scenario, mean_inter_ap_distance_m: f64) -> Scenario {
    let config = PlacementConfig {
        mean_inter_ap_distance_m,
        ..Default::default()
    };
    let new_aps = place_aps(scenario.n_aps(), &config);
    let sta_positions = scenario
        .sta_positions
        .iter()
        .zip(&scenario.association)
        .map(|(p, &ap)| {
            let (old, new) = (scenario.ap_positions[ap], new_aps[ap]);
            Point::new(p.x - old.x + new.x, p.y - old.y + new.y)
        })
        .collect();
    Scenario {
        params: scenario.params.clone(),
        ap_positions: new_aps,
        sta_positions,
        association: scenario.association.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mean_pairwise(points: &[Point]) -> f64 {
        let mut sum = 0.0;
        let mut n = 0;
        for i in 0..points.len() {
            for j in i + 1..points.len() {
                sum += points[i].distance(&points[j]);
                n += 1;
            }
        }
        sum / n as f64
    }

    fn config(mean: f64) -> PlacementConfig {
        PlacementConfig {
            mean_inter_ap_distance_m: mean,
            ..Default::default()
        }
    }

    #[test]
    fn square_layout_side_from_mean_distance() {
        let aps = place_aps(4, &config(11.74));
        assert_eq!(aps.len(), 4);
        let side = aps[0].distance(&aps[1]);
        assert!((side - 10.315699166609797).abs() < 1e-9, "{side}");
        assert!((mean_pairwise(&aps) - 11.74).abs() < 1e-9);
        // Axis aligned.
        assert!((aps[0].y - aps[1].y).abs() < 1e-9);

        let half = place_aps(4, &config(5.87));
        assert!((half[0].distance(&half[1]) - 5.157849583304898).abs() < 1e-9);
    }

    #[test]
    fn other_ap_counts_match_target_mean() {
        for n in 2..=7 {
            let aps = place_aps(n, &config(17.61));
            assert!((mean_pairwise(&aps) - 17.61).abs() < 1e-9, "n = {n}");
        }
        assert_eq!(place_aps(1, &config(11.74)), vec![Point::new(0.0, 0.0)]);
    }

    #[test]
    fn same_seed_same_scenario() {
        let p = NetworkParams::default();
        let c = PlacementConfig {
            seed: 77,
            ..Default::default()
        };
        let a = generate_scenario(4, 16, &p, &c).unwrap();
        let b = generate_scenario(4, 16, &p, &c).unwrap();
        assert_eq!(a, b);
        let other = generate_scenario(4, 16, &p, &PlacementConfig { seed: 78, ..c }).unwrap();
        assert_ne!(a.sta_positions, other.sta_positions);
    }

    #[test]
    fn zero_near_fraction_places_only_edge_users() {
        let p = NetworkParams::default();
        let c = PlacementConfig {
            near_fraction: 0.0,
            seed: 5,
            ..Default::default()
        };
        let s = generate_scenario(4, 24, &p, &c).unwrap();
        for u in 0..s.n_stas() {
            let r = s.sta_positions[u].distance(&s.ap_positions[s.ap_of(u)]);
            assert!((5.0 - 1e-9..=10.0 + 1e-9).contains(&r), "r = {r}");
        }
    }

    #[test]
    fn too_few_stas_is_infeasible() {
        let err = generate_scenario(4, 3, &NetworkParams::default(), &PlacementConfig::default());
        assert_eq!(err, Err(ModelError::InfeasibleAssociation { aps: 4, stas: 3 }));
    }

    #[test]
    fn generated_radii_and_coverage_hold_across_seeds() {
        let p = NetworkParams::default();
        for seed in 0..50 {
            let c = PlacementConfig {
                near_fraction: 0.525,
                rayleigh_shape_divisor: 3.5,
                seed,
                ..Default::default()
            };
            let s = generate_scenario(4, 16, &p, &c).unwrap();
            let mut served = [0; 4];
            for u in 0..16 {
                served[s.ap_of(u)] += 1;
                let r = s.sta_positions[u].distance(&s.ap_positions[s.ap_of(u)]);
                assert!(r <= 10.0 + 1e-9);
            }
            assert!(served.iter().all(|&c| c >= 1));
        }
    }

    #[test]
    fn respacing_keeps_sta_offsets() {
        let s = generate_scenario(4, 12, &NetworkParams::default(), &config(11.74)).unwrap();
        let t = with_ap_spacing(&s, 5.87);
        assert!((mean_pairwise(&t.ap_positions) - 5.87).abs() < 1e-9);
        for u in 0..12 {
            let ap = s.ap_of(u);
            let before = s.sta_positions[u].distance(&s.ap_positions[ap]);
            let after = t.sta_positions[u].distance(&t.ap_positions[ap]);
            assert!((before - after).abs() < 1e-9);
        }
    }
}
