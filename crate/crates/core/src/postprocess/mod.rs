//! Quantities of interest, stress fields and file outputs.

pub mod compare;
pub mod export;

pub use compare::{compare_models, relative_difference, ComparisonRow};
pub use export::{
    export_mesh_vtk, export_timeseries_csv, export_vtk, format_comparison, read_timeseries_csv,
    write_comparison_csv, TimeSeriesWriter, CSV_HEADER,
};

use crate::fem::{FieldSpace, Support};
use crate::materials::{von_mises, Electrode};
use crate::physics::state::{
    DISPLACEMENT, ELECTROLYTE_POTENTIAL, SOLID_CONCENTRATION, SOLID_POTENTIAL, THETA,
};
use crate::physics::{CellModel, Field, SimState};
use crate::units::{Dim, ScaleSet};
use crate::{Error, Result};

/// One row of the time series, in SI units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeSeriesRecord {
    pub t: f64,
    pub v_out: f64,
    pub phi_e_avg: f64,
    pub soc_anode: f64,
    pub soc_cathode: f64,
    pub temperature: f64,
    pub u_max: f64,
    pub vm_max: f64,
    pub clamp_events: usize,
}

impl TimeSeriesRecord {
    pub fn temperature_celsius(&self) -> f64 {
        self.temperature - 273.15
    }
}

/// Mean of a scalar field over the part of its support in `region`.
pub fn subdomain_average(space: &FieldSpace, coeffs: &[f64], region: Support) -> Result<f64> {
    let (total, measure) = space.integrate(coeffs, region);
    if measure <= 0.0 {
        return Err(Error::Postprocess(format!(
            "region {region:?} has no elements in the field support"
        )));
    }
    Ok(total / measure)
}

/// Mean solid potential on the positive collector, in volts.
pub fn cell_voltage(model: &CellModel, state: &SimState) -> f64 {
    let space = model.space(Field::SolidPotential);
    let phi = &state.s[SOLID_POTENTIAL];
    let mut total = 0.0;
    let mut length = 0.0;
    for e in &model.collector().edges {
        for (q, w) in e.weights.iter().enumerate() {
            total += w * e.trace.value(space, phi, q);
            length += w;
        }
    }
    total / length / model.params.volt
}

/// Von Mises stress at the solid quadrature points (SI).
#[derive(Debug, Clone, PartialEq)]
pub struct VonMisesField {
    /// `(element, position in m, stress in Pa)`
    pub samples: Vec<(usize, [f64; 2], f64)>,
    pub max: f64,
    pub argmax: [f64; 2],
}

pub fn von_mises_field(model: &CellModel, state: &SimState, scales: &ScaleSet) -> VonMisesField {
    let pa = scales.unit(Dim::PRESSURE);
    let len = model.mesh().length_unit;
    let mut max = 0.0;
    let mut argmax = [0.0; 2];
    let samples = model
        .stress_samples(state)
        .into_iter()
        .map(|(e, x, s)| {
            let v = von_mises(&s) * pa;
            let x = [x[0] * len, x[1] * len];
            if v > max {
                max = v;
                argmax = x;
            }
            (e, x, v)
        })
        .collect();
    VonMisesField {
        samples,
        max,
        argmax,
    }
}

/// Quantities of interest of one state.
pub fn record(
    model: &CellModel,
    state: &SimState,
    scales: &ScaleSet,
    t_seconds: f64,
    clamp_events: usize,
) -> Result<TimeSeriesRecord> {
    let m = &model.params.mats;
    let cs = model.space(Field::SolidConcentration);
    let soc = |e: Electrode, region| -> Result<f64> {
        Ok(subdomain_average(cs, &state.d[SOLID_CONCENTRATION], region)? / m.electrode(e).max_concentration)
    };
    let phi_e = subdomain_average(
        model.space(Field::ElectrolytePotential),
        &state.s[ELECTROLYTE_POTENTIAL],
        Support::Electrolyte,
    )? / model.params.volt;
    let theta = subdomain_average(model.space(Field::Temperature), &state.d[THETA], Support::All)?;
    let u = &state.s[DISPLACEMENT];
    let u_max = u
        .chunks(2)
        .map(|c| (c[0] * c[0] + c[1] * c[1]).sqrt())
        .fold(0.0, f64::max)
        * model.mesh().length_unit;
    Ok(TimeSeriesRecord {
        t: t_seconds,
        v_out: cell_voltage(model, state),
        phi_e_avg: phi_e,
        soc_anode: soc(Electrode::Anode, Support::Anode)?,
        soc_cathode: soc(Electrode::Cathode, Support::Cathode)?,
        temperature: scales.to_si(theta, Dim::TEMPERATURE),
        u_max,
        vm_max: von_mises_field(model, state, scales).max,
        clamp_events,
    })
}

/// Time-averaged electric power per unit cell volume.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerDensity {
    pub w_per_m3: f64,
}

impl PowerDensity {
    pub fn w_per_dm3(&self) -> f64 {
        self.w_per_m3 * 1e-3
    }
}

/// `(1 / (t_end |cell|)) int V_out I_app |collector| dt` by the trapezoidal
/// rule over `(t, V_out)` samples. Lengths and areas are per unit depth.
pub fn power_density(
    series: &[(f64, f64)],
    applied_current: f64,
    collector_length: f64,
    cell_area: f64,
) -> Result<PowerDensity> {
    let scale = applied_current * collector_length / cell_area;
    match series {
        [] => Err(Error::Postprocess("power density of an empty series".into())),
        [(_, v)] => Ok(PowerDensity {
            w_per_m3: v * scale,
        }),
        _ => {
            let t0 = series[0].0;
            let t1 = series[series.len() - 1].0;
            let integral: f64 = series
                .windows(2)
                .map(|w| 0.5 * (w[0].1 + w[1].1) * (w[1].0 - w[0].0))
                .sum();
            Ok(PowerDensity {
                w_per_m3: scale * integral / (t1 - t0),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_power() {
        let s: Vec<(f64, f64)> = (0..5).map(|k| (k as f64 * 10.0, 4.0)).collect();
        let p = power_density(&s, 20.0, 1e-4, 1e-7).unwrap();
        assert!((p.w_per_m3 - 4.0 * 20.0 * 1e-4 / 1e-7).abs() < 1e-6);
        let q = power_density(&s, -20.0, 1e-4, 1e-7).unwrap();
        assert_eq!(q.w_per_m3, -p.w_per_m3);
        assert!(power_density(&[], 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn trapezoid_on_linear_voltage() {
        let s = vec![(0.0, 4.0), (5.0, 3.5), (10.0, 3.0)];
        let p = power_density(&s, 1.0, 1.0, 1.0).unwrap();
        assert!((p.w_per_m3 - 3.5).abs() < 1e-14);
    }
}
