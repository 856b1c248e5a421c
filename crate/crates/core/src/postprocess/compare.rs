//! Full versus electrochemical model comparison.

use crate::config::ScenarioConfig;
use crate::integrator::run;
use crate::physics::ModelMode;
use crate::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub scenario: String,
    pub model: String,
    pub p_avg_w_per_dm3: f64,
    /// `(P_electrochemical - P_full) / |P_full|`; zero on the full-model row.
    pub rel_diff: f64,
}

pub fn relative_difference(electrochemical: f64, full: f64) -> f64 {
    if electrochemical == full {
        0.0
    } else {
        (electrochemical - full) / full.abs()
    }
}

/// Runs a scenario in both model modes. When the scenario has an output
/// directory each run writes into a subdirectory named after its mode.
pub fn compare_models(config: &ScenarioConfig) -> Result<Vec<ComparisonRow>> {
    let mut power = Vec::new();
    for mode in [ModelMode::Full, ModelMode::Electrochemical] {
        let mut c = config.clone();
        c.mode = mode;
        c.output.dir = config.output.dir.as_ref().map(|d| d.join(mode.name()));
        power.push(run(&c)?.power.w_per_dm3());
    }
    let rel = relative_difference(power[1], power[0]);
    Ok(vec![
        ComparisonRow {
            scenario: config.name.clone(),
            model: ModelMode::Full.name().into(),
            p_avg_w_per_dm3: power[0],
            rel_diff: 0.0,
        },
        ComparisonRow {
            scenario: config.name.clone(),
            model: ModelMode::Electrochemical.name().into(),
            p_avg_w_per_dm3: power[1],
            rel_diff: rel,
        },
    ])
}
