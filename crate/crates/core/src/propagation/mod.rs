//! Log-distance path loss, channel gains, and the scenario generator.

mod placement;

pub use placement::{
    generate_scenario, generate_scenario_with_rng, place_aps, sample_truncated_rayleigh,
    with_ap_spacing, PlacementConfig,
};

use crate::error::{ModelError, Result};
use crate::model::{GainMatrix, NetworkParams, Scenario};

/// Free-space loss at the reference distance, `20 log10(4 pi d0 / lambda)`.
pub fn reference_loss_db(params: &NetworkParams) -> f64 {
    20.0 * (4.0 * std::f64::consts::PI * params.ref_distance_m / params.wavelength_m()).log10()
}

/// Log-distance path loss in dB. Distances below the reference distance are
/// clamped to it, since the model is undefined there.
pub fn path_loss_db(distance_m: f64, params: &NetworkParams) -> Result<f64> {
    if !(distance_m > 0.0) {
        return Err(ModelError::Domain(distance_m));
    }
    Ok(clamped_path_loss_db(distance_m, params))
}

fn clamped_path_loss_db(distance_m: f64, params: &NetworkParams) -> f64 {
    let d = distance_m.max(params.ref_distance_m);
    reference_loss_db(params) + 10.0 * params.pathloss_exponent * (d / params.ref_distance_m).log10()
}

/// Linear channel gain `10^(-PL/10)`.
pub fn channel_gain(distance_m: f64, params: &NetworkParams) -> Result<f64> {
    Ok(10f64.powf(-path_loss_db(distance_m, params)? / 10.0))
}

/// Gains between every STA and every AP, not only the serving links.
/// Coincident STA/AP positions are treated as the reference distance.
pub fn build_gain_matrix(scenario: &Scenario) -> Result<GainMatrix> {
    let params = &scenario.params;
    let rows = scenario
        .sta_positions
        .iter()
        .map(|sta| {
            scenario
                .ap_positions
                .iter()
                .map(|ap| {
                    let pl = clamped_path_loss_db(sta.distance(ap), params);
                    10f64.powf(-pl / 10.0)
                })
                .collect()
        })
        .collect();
    GainMatrix::from_rows(rows)
}
