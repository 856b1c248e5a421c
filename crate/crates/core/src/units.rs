//! Internal unit system.
//!
//! Every quantity is stored internally as `si_value / unit`, where the unit
//! is built from six reference magnitudes. Mass and current references are
//! derived so that stress and potential references are exact.

use std::fmt;

/// Exponents over the SI base set (m, s, mol, A, K, kg).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dim {
    pub m: f64,
    pub s: f64,
    pub mol: f64,
    pub amp: f64,
    pub kelvin: f64,
    pub kg: f64,
}

impl Dim {
    pub const fn new(m: f64, s: f64, mol: f64, amp: f64, kelvin: f64, kg: f64) -> Self {
        Dim {
            m,
            s,
            mol,
            amp,
            kelvin,
            kg,
        }
    }

    pub const NONE: Dim = Dim::new(0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    pub const LENGTH: Dim = Dim::new(1.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    pub const AREA: Dim = Dim::new(2.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    pub const TIME: Dim = Dim::new(0.0, 1.0, 0.0, 0.0, 0.0, 0.0);
    pub const TEMPERATURE: Dim = Dim::new(0.0, 0.0, 0.0, 0.0, 1.0, 0.0);
    pub const INV_TEMPERATURE: Dim = Dim::new(0.0, 0.0, 0.0, 0.0, -1.0, 0.0);
    pub const CONCENTRATION: Dim = Dim::new(-3.0, 0.0, 1.0, 0.0, 0.0, 0.0);
    pub const MOLAR_VOLUME: Dim = Dim::new(3.0, 0.0, -1.0, 0.0, 0.0, 0.0);
    pub const DIFFUSIVITY: Dim = Dim::new(2.0, -1.0, 0.0, 0.0, 0.0, 0.0);
    pub const PRESSURE: Dim = Dim::new(-1.0, -2.0, 0.0, 0.0, 0.0, 1.0);
    /// J m^-3 K^-1
    pub const HEAT_CAPACITY: Dim = Dim::new(-1.0, -2.0, 0.0, 0.0, -1.0, 1.0);
    /// W m^-1 K^-1
    pub const THERMAL_CONDUCTIVITY: Dim = Dim::new(1.0, -3.0, 0.0, 0.0, -1.0, 1.0);
    /// S m^-1
    pub const ELECTRIC_CONDUCTIVITY: Dim = Dim::new(-3.0, 3.0, 0.0, 2.0, 0.0, -1.0);
    pub const POTENTIAL: Dim = Dim::new(2.0, -3.0, 0.0, -1.0, 0.0, 1.0);
    pub const CURRENT_DENSITY: Dim = Dim::new(-2.0, 0.0, 0.0, 1.0, 0.0, 0.0);
    /// W m^-3
    pub const POWER_DENSITY: Dim = Dim::new(-1.0, -3.0, 0.0, 0.0, 0.0, 1.0);
    /// m^2.5 mol^-0.5 s^-1
    pub const RATE_CONSTANT: Dim = Dim::new(2.5, -1.0, -0.5, 0.0, 0.0, 0.0);
    /// J mol^-1 K^-1
    pub const GAS_CONSTANT: Dim = Dim::new(2.0, -2.0, -1.0, 0.0, -1.0, 1.0);
    /// C mol^-1
    pub const FARADAY: Dim = Dim::new(0.0, 1.0, -1.0, 1.0, 0.0, 0.0);
}

/// Reference magnitudes of the internal unit system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleSet {
    /// m
    pub length: f64,
    /// s
    pub time: f64,
    /// mol m^-3
    pub concentration: f64,
    /// V
    pub potential: f64,
    /// K
    pub temperature: f64,
    /// Pa
    pub stress: f64,
}

impl Default for ScaleSet {
    fn default() -> Self {
        ScaleSet {
            length: 1e-4,
            time: 60.0,
            concentration: 1e3,
            potential: 1.0,
            temperature: 1.0,
            stress: 1e6,
        }
    }
}

impl ScaleSet {
    /// Identity scaling: internal values equal SI values.
    pub fn si() -> Self {
        ScaleSet {
            length: 1.0,
            time: 1.0,
            concentration: 1.0,
            potential: 1.0,
            temperature: 1.0,
            stress: 1.0,
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        let all = [
            ("length", self.length),
            ("time", self.time),
            ("concentration", self.concentration),
            ("potential", self.potential),
            ("temperature", self.temperature),
            ("stress", self.stress),
        ];
        let bad: Vec<String> = all
            .iter()
            .filter(|(_, v)| !(v.is_finite() && *v > 0.0))
            .map(|(k, v)| format!("scale.{k} = {v} must be positive"))
            .collect();
        if bad.is_empty() {
            Ok(())
        } else {
            Err(bad.join("; "))
        }
    }

    fn mass(&self) -> f64 {
        self.stress * self.length * self.time * self.time
    }

    fn amount(&self) -> f64 {
        self.concentration * self.length.powi(3)
    }

    fn current(&self) -> f64 {
        self.mass() * self.length * self.length / (self.time.powi(3) * self.potential)
    }

    /// SI magnitude of one internal unit of dimension `d`.
    pub fn unit(&self, d: Dim) -> f64 {
        self.length.powf(d.m)
            * self.time.powf(d.s)
            * self.amount().powf(d.mol)
            * self.current().powf(d.amp)
            * self.temperature.powf(d.kelvin)
            * self.mass().powf(d.kg)
    }

    pub fn to_internal(&self, si: f64, d: Dim) -> f64 {
        si / self.unit(d)
    }

    pub fn to_si(&self, internal: f64, d: Dim) -> f64 {
        internal * self.unit(d)
    }
}

impl fmt::Display for ScaleSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "length_m = {}\ntime_s = {}\nconcentration_mol_m3 = {}\npotential_V = {}\ntemperature_K = {}\nstress_Pa = {}",
            self.length, self.time, self.concentration, self.potential, self.temperature, self.stress
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn length_scaling() {
        let s = ScaleSet::default();
        assert!((s.to_internal(30e-6, Dim::LENGTH) - 0.3).abs() < 1e-14);
    }

    #[test]
    fn derived_units_are_consistent() {
        let s = ScaleSet::default();
        // V = W / A, and S m^-1 * V / m = A m^-2
        let lhs = s.unit(Dim::ELECTRIC_CONDUCTIVITY) * s.unit(Dim::POTENTIAL) / s.unit(Dim::LENGTH);
        assert!((lhs / s.unit(Dim::CURRENT_DENSITY) - 1.0).abs() < 1e-12);
        assert!((s.unit(Dim::POTENTIAL) - 1.0).abs() < 1e-14);
        assert!((s.unit(Dim::PRESSURE) / 1e6 - 1.0).abs() < 1e-12);
        // R theta / F has units of volts
        let rtf = s.unit(Dim::GAS_CONSTANT) * s.unit(Dim::TEMPERATURE) / s.unit(Dim::FARADAY);
        assert!((rtf / s.unit(Dim::POTENTIAL) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn si_is_identity() {
        let s = ScaleSet::si();
        for d in [Dim::RATE_CONSTANT, Dim::FARADAY, Dim::HEAT_CAPACITY, Dim::PRESSURE] {
            assert!((s.unit(d) - 1.0).abs() < 1e-15);
        }
    }
}
