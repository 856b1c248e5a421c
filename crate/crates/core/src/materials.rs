//! Constitutive laws and default material parameters.
//!
//! All laws are written in a unit-agnostic way: they are valid for any
//! consistent unit system, so the same [`MaterialSet`] type carries SI values
//! or internal values (see [`MaterialSet::to_internal`]). The open-circuit
//! potential fits are the exception; they map a dimensionless state of charge
//! to volts.

use thiserror::Error;

use crate::units::{Dim, ScaleSet};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MaterialError {
    #[error("state of charge {0} is outside the domain of the open-circuit fit")]
    OcpDomain(f64),
    #[error("invalid material parameters: {}", .0.join("; "))]
    Invalid(Vec<String>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Electrode {
    Anode,
    Cathode,
}

impl Electrode {
    pub const ALL: [Electrode; 2] = [Electrode::Anode, Electrode::Cathode];

    pub fn name(self) -> &'static str {
        match self {
            Electrode::Anode => "anode",
            Electrode::Cathode => "cathode",
        }
    }
}

/// Solid electrode parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct ElectrodeRecord {
    /// J m^-3 K^-1
    pub heat_capacity: f64,
    /// W m^-1 K^-1
    pub thermal_conductivity: f64,
    /// Pa
    pub youngs_modulus: f64,
    pub poisson_ratio: f64,
    /// K^-1
    pub thermal_expansion: f64,
    /// m^3 mol^-1
    pub chemical_expansion: f64,
    /// S m^-1
    pub electronic_conductivity: f64,
    /// m^2 s^-1
    pub reference_diffusivity: f64,
    /// mol m^-3
    pub max_concentration: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ElectrolyteRecord {
    pub heat_capacity: f64,
    pub thermal_conductivity: f64,
    /// S m^-1
    pub ionic_conductivity: f64,
    pub diffusivity: f64,
    pub transference_number: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaterialSet {
    pub anode: ElectrodeRecord,
    pub cathode: ElectrodeRecord,
    pub electrolyte: ElectrolyteRecord,
    /// m^2.5 mol^-0.5 s^-1
    pub rate_constant: f64,
    pub diffusivity_concentration_factor: f64,
    pub diffusivity_pressure_factor: f64,
    /// Pa
    pub pressure_saturation: f64,
    /// K
    pub reference_temperature: f64,
    /// mol m^-3
    pub initial_electrolyte_concentration: f64,
    pub gas_constant: f64,
    pub faraday: f64,
}

impl Default for MaterialSet {
    fn default() -> Self {
        MaterialSet {
            anode: ElectrodeRecord {
                heat_capacity: 3.8235e6,
                thermal_conductivity: 1.04,
                youngs_modulus: 3.64e9,
                poisson_ratio: 0.3,
                thermal_expansion: 1e-5,
                chemical_expansion: 3.499e-6,
                electronic_conductivity: 100.0,
                reference_diffusivity: 3.9e-14,
                max_concentration: 3.1507e4,
            },
            cathode: ElectrodeRecord {
                heat_capacity: 9.0371e5,
                thermal_conductivity: 6.2,
                youngs_modulus: 2.5e9,
                poisson_ratio: 0.3,
                thermal_expansion: 1e-5,
                chemical_expansion: 3.499e-6,
                electronic_conductivity: 3.8,
                reference_diffusivity: 1e-13,
                max_concentration: 2.286e4,
            },
            electrolyte: ElectrolyteRecord {
                heat_capacity: 1.9979e6,
                thermal_conductivity: 0.344,
                ionic_conductivity: 0.2,
                diffusivity: 7.5e-11,
                transference_number: 0.363,
            },
            rate_constant: 1.1e-11,
            diffusivity_concentration_factor: 6.0,
            diffusivity_pressure_factor: 1.5,
            pressure_saturation: 1e9,
            reference_temperature: 298.15,
            initial_electrolyte_concentration: 2000.0,
            gas_constant: 8.314462618,
            faraday: 96485.33212,
        }
    }
}

impl MaterialSet {
    pub fn electrode(&self, e: Electrode) -> &ElectrodeRecord {
        match e {
            Electrode::Anode => &self.anode,
            Electrode::Cathode => &self.cathode,
        }
    }

    pub fn electrode_mut(&mut self, e: Electrode) -> &mut ElectrodeRecord {
        match e {
            Electrode::Anode => &mut self.anode,
            Electrode::Cathode => &mut self.cathode,
        }
    }

    /// Checks sign and range invariants, returning every violation.
    pub fn validate(&self) -> Result<(), MaterialError> {
        let mut bad = Vec::new();
        let mut positive = |name: String, v: f64| {
            if !(v.is_finite() && v > 0.0) {
                bad.push(format!("{name} = {v} must be positive"));
            }
        };
        for e in Electrode::ALL {
            let r = self.electrode(e);
            let n = e.name();
            positive(format!("{n}.heat_capacity"), r.heat_capacity);
            positive(format!("{n}.thermal_conductivity"), r.thermal_conductivity);
            positive(format!("{n}.youngs_modulus"), r.youngs_modulus);
            positive(format!("{n}.thermal_expansion"), r.thermal_expansion);
            positive(format!("{n}.chemical_expansion"), r.chemical_expansion);
            positive(format!("{n}.electronic_conductivity"), r.electronic_conductivity);
            positive(format!("{n}.reference_diffusivity"), r.reference_diffusivity);
            positive(format!("{n}.max_concentration"), r.max_concentration);
        }
        let el = &self.electrolyte;
        positive("electrolyte.heat_capacity".into(), el.heat_capacity);
        positive("electrolyte.thermal_conductivity".into(), el.thermal_conductivity);
        positive("electrolyte.ionic_conductivity".into(), el.ionic_conductivity);
        positive("electrolyte.diffusivity".into(), el.diffusivity);
        positive("rate_constant".into(), self.rate_constant);
        positive("diffusivity_concentration_factor".into(), self.diffusivity_concentration_factor);
        positive("diffusivity_pressure_factor".into(), self.diffusivity_pressure_factor);
        positive("pressure_saturation".into(), self.pressure_saturation);
        positive("reference_temperature".into(), self.reference_temperature);
        positive("initial_electrolyte_concentration".into(), self.initial_electrolyte_concentration);
        positive("gas_constant".into(), self.gas_constant);
        positive("faraday".into(), self.faraday);
        for e in Electrode::ALL {
            let nu = self.electrode(e).poisson_ratio;
            if !(nu > 0.0 && nu < 0.5) {
                bad.push(format!("{}.poisson_ratio = {nu} must lie in (0, 0.5)", e.name()));
            }
        }
        let tp = el.transference_number;
        if !(tp > 0.0 && tp < 1.0) {
            bad.push(format!("electrolyte.transference_number = {tp} must lie in (0, 1)"));
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(MaterialError::Invalid(bad))
        }
    }

    fn convert(&self, f: impl Fn(f64, Dim) -> f64) -> MaterialSet {
        let electrode = |r: &ElectrodeRecord| ElectrodeRecord {
            heat_capacity: f(r.heat_capacity, Dim::HEAT_CAPACITY),
            thermal_conductivity: f(r.thermal_conductivity, Dim::THERMAL_CONDUCTIVITY),
            youngs_modulus: f(r.youngs_modulus, Dim::PRESSURE),
            poisson_ratio: r.poisson_ratio,
            thermal_expansion: f(r.thermal_expansion, Dim::INV_TEMPERATURE),
            chemical_expansion: f(r.chemical_expansion, Dim::MOLAR_VOLUME),
            electronic_conductivity: f(r.electronic_conductivity, Dim::ELECTRIC_CONDUCTIVITY),
            reference_diffusivity: f(r.reference_diffusivity, Dim::DIFFUSIVITY),
            max_concentration: f(r.max_concentration, Dim::CONCENTRATION),
        };
        let el = &self.electrolyte;
        MaterialSet {
            anode: electrode(&self.anode),
            cathode: electrode(&self.cathode),
            electrolyte: ElectrolyteRecord {
                heat_capacity: f(el.heat_capacity, Dim::HEAT_CAPACITY),
                thermal_conductivity: f(el.thermal_conductivity, Dim::THERMAL_CONDUCTIVITY),
                ionic_conductivity: f(el.ionic_conductivity, Dim::ELECTRIC_CONDUCTIVITY),
                diffusivity: f(el.diffusivity, Dim::DIFFUSIVITY),
                transference_number: el.transference_number,
            },
            rate_constant: f(self.rate_constant, Dim::RATE_CONSTANT),
            diffusivity_concentration_factor: self.diffusivity_concentration_factor,
            diffusivity_pressure_factor: self.diffusivity_pressure_factor,
            pressure_saturation: f(self.pressure_saturation, Dim::PRESSURE),
            reference_temperature: f(self.reference_temperature, Dim::TEMPERATURE),
            initial_electrolyte_concentration: f(
                self.initial_electrolyte_concentration,
                Dim::CONCENTRATION,
            ),
            gas_constant: f(self.gas_constant, Dim::GAS_CONSTANT),
            faraday: f(self.faraday, Dim::FARADAY),
        }
    }

    /// Converts an SI parameter set to internal units.
    pub fn to_internal(&self, scales: &ScaleSet) -> MaterialSet {
        self.convert(|v, d| scales.to_internal(v, d))
    }

    /// Converts an internal parameter set back to SI.
    pub fn to_si(&self, scales: &ScaleSet) -> MaterialSet {
        self.convert(|v, d| scales.to_si(v, d))
    }
}

/// Diffusional conductivity of the electrolyte; negative for `t_+ < 1`.
pub fn diffusional_conductivity(theta: f64, mats: &MaterialSet) -> f64 {
    let el = &mats.electrolyte;
    -2.0 * mats.gas_constant * theta * el.ionic_conductivity / mats.faraday
        * (1.0 - el.transference_number)
}

/// Open-circuit potential of the anode (V) as a function of state of charge.
pub fn ocp_anode(soc: f64) -> f64 {
    -0.16 + 1.32 * (-3.0 * soc).exp() + 10.0 * (-2000.0 * soc).exp()
}

/// Pole of the cathode fit.
pub const CATHODE_OCP_POLE: f64 = 1.00167;

/// Open-circuit potential of the cathode (V); undefined at and beyond the pole.
pub fn ocp_cathode(soc: f64) -> Result<f64, MaterialError> {
    if !(soc < CATHODE_OCP_POLE) || !soc.is_finite() {
        return Err(MaterialError::OcpDomain(soc));
    }
    Ok(4.06279 + 0.0677504 * (-21.8502 * soc + 12.8262).tanh()
        - 0.105734 * ((CATHODE_OCP_POLE - soc).powf(-0.379571) - 1.576)
        - 0.045 * (-71.69 * soc.powi(8)).exp()
        + 0.01 * (-200.0 * (soc - 0.19)).exp())
}

pub fn open_circuit(electrode: Electrode, soc: f64) -> Result<f64, MaterialError> {
    match electrode {
        Electrode::Anode => {
            if soc.is_finite() {
                Ok(ocp_anode(soc))
            } else {
                Err(MaterialError::OcpDomain(soc))
            }
        }
        Electrode::Cathode => ocp_cathode(soc),
    }
}

const OCP_MARGIN: f64 = 1e-6;

/// Open-circuit potential with the argument clamped into the fit's domain.
pub fn open_circuit_guarded(electrode: Electrode, soc: f64) -> f64 {
    let hi = match electrode {
        Electrode::Anode => 1.0,
        Electrode::Cathode => CATHODE_OCP_POLE - OCP_MARGIN,
    };
    let soc_in = if soc.is_nan() { 0.5 } else { soc };
    let clamped = soc_in.clamp(OCP_MARGIN, hi);
    if clamped != soc {
        log::warn!(
            "{} open-circuit argument {soc} clamped to {clamped}",
            electrode.name()
        );
    }
    match electrode {
        Electrode::Anode => ocp_anode(clamped),
        Electrode::Cathode => ocp_cathode(clamped).expect("clamped into domain"),
    }
}

/// Stress- and concentration-dependent solid diffusivity.
pub fn stress_diffusivity(
    concentration: f64,
    pressure: f64,
    rec: &ElectrodeRecord,
    mats: &MaterialSet,
) -> f64 {
    let p = pressure.clamp(0.0, mats.pressure_saturation);
    let exponent = mats.diffusivity_concentration_factor * concentration / rec.max_concentration
        - mats.diffusivity_pressure_factor * p / mats.pressure_saturation;
    rec.reference_diffusivity * exponent.exp()
}

/// Shear and bulk moduli from Young's modulus and Poisson's ratio.
pub fn lame_from_e_nu(youngs: f64, poisson: f64) -> (f64, f64) {
    (
        youngs / (2.0 * (1.0 + poisson)),
        youngs / (3.0 * (1.0 - 2.0 * poisson)),
    )
}

/// Cauchy stress with the out-of-plane component of a plane-strain state.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StressState {
    pub s11: f64,
    pub s22: f64,
    pub s12: f64,
    pub s33: f64,
}

impl StressState {
    pub fn trace(&self) -> f64 {
        self.s11 + self.s22 + self.s33
    }
}

/// Isotropic Hooke law under plane strain with thermal and chemical
/// eigenstrains. `dtheta` and `dconc` are deviations from the stress-free
/// reference temperature and concentration.
pub fn hooke_plane_strain(
    strain: [[f64; 2]; 2],
    dtheta: f64,
    dconc: f64,
    rec: &ElectrodeRecord,
) -> StressState {
    let (g, k) = lame_from_e_nu(rec.youngs_modulus, rec.poisson_ratio);
    let eigen = rec.thermal_expansion * dtheta + rec.chemical_expansion * dconc;
    let e11 = strain[0][0] - eigen;
    let e22 = strain[1][1] - eigen;
    let e33 = -eigen;
    let e12 = 0.5 * (strain[0][1] + strain[1][0]);
    let lam = k - 2.0 * g / 3.0;
    let tr = e11 + e22 + e33;
    StressState {
        s11: 2.0 * g * e11 + lam * tr,
        s22: 2.0 * g * e22 + lam * tr,
        s12: 2.0 * g * e12,
        s33: 2.0 * g * e33 + lam * tr,
    }
}

pub fn hydrostatic_pressure(s: &StressState) -> f64 {
    -s.trace() / 3.0
}

pub fn von_mises(s: &StressState) -> f64 {
    let d1 = s.s11 - s.s22;
    let d2 = s.s22 - s.s33;
    let d3 = s.s33 - s.s11;
    (0.5 * (d1 * d1 + d2 * d2 + d3 * d3) + 3.0 * s.s12 * s.s12).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        MaterialSet::default().validate().unwrap();
    }

    #[test]
    fn invalid_values_all_reported() {
        let mut m = MaterialSet::default();
        m.anode.poisson_ratio = 0.6;
        m.electrolyte.transference_number = 1.2;
        m.rate_constant = -1.0;
        match m.validate() {
            Err(MaterialError::Invalid(v)) => assert_eq!(v.len(), 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn kappa_d_is_linear_in_temperature() {
        let m = MaterialSet::default();
        let a = diffusional_conductivity(300.0, &m);
        let b = diffusional_conductivity(600.0, &m);
        assert!(a < 0.0);
        assert!((b / a - 2.0).abs() < 1e-14);
        let mut m1 = m.clone();
        m1.electrolyte.transference_number = 1.0;
        assert_eq!(diffusional_conductivity(300.0, &m1), 0.0);
    }

    #[test]
    fn cathode_pole_is_rejected() {
        assert!(ocp_cathode(CATHODE_OCP_POLE).is_err());
        assert!(ocp_cathode(1.1).is_err());
        assert!(ocp_cathode(0.99).is_ok());
    }

    #[test]
    fn anode_ocp_at_zero() {
        assert!((ocp_anode(0.0) - 11.16).abs() < 1e-12);
    }

    #[test]
    fn guarded_ocp_never_fails() {
        assert!(open_circuit_guarded(Electrode::Cathode, 2.0).is_finite());
        assert!(open_circuit_guarded(Electrode::Anode, -1.0).is_finite());
    }

    #[test]
    fn diffusivity_branches() {
        let m = MaterialSet::default();
        let r = &m.cathode;
        assert_eq!(stress_diffusivity(0.0, -5e8, r, &m), r.reference_diffusivity);
        let at = stress_diffusivity(0.3 * r.max_concentration, m.pressure_saturation, r, &m);
        let above = stress_diffusivity(0.3 * r.max_concentration, 3.0 * m.pressure_saturation, r, &m);
        assert_eq!(at, above);
    }

    #[test]
    fn lame_simple() {
        let (g, k) = lame_from_e_nu(1.0, 0.0);
        assert!((g - 0.5).abs() < 1e-15 && (k - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn zero_state_is_stress_free() {
        let m = MaterialSet::default();
        let s = hooke_plane_strain([[0.0; 2]; 2], 0.0, 0.0, &m.anode);
        assert_eq!(s, StressState::default());
    }

    #[test]
    fn von_mises_cases() {
        let s = StressState {
            s11: 3.0,
            ..Default::default()
        };
        assert!((von_mises(&s) - 3.0).abs() < 1e-14);
        let h = StressState {
            s11: -2.0,
            s22: -2.0,
            s33: -2.0,
            s12: 0.0,
        };
        assert!(von_mises(&h).abs() < 1e-14);
        assert!((hydrostatic_pressure(&h) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn unit_round_trip() {
        let m = MaterialSet::default();
        let s = ScaleSet::default();
        let back = m.to_internal(&s).to_si(&s);
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * b.abs();
        assert!(close(back.faraday, m.faraday));
        assert!(close(back.rate_constant, m.rate_constant));
        assert!(close(back.anode.electronic_conductivity, m.anode.electronic_conductivity));
        assert!(close(back.cathode.chemical_expansion, m.cathode.chemical_expansion));
    }
}
