//! Interface kinetics, current densities, heat sources and bound guarding.

use std::sync::atomic::{AtomicUsize, Ordering};

use super::PhysicsError;
use crate::materials::{
    diffusional_conductivity, open_circuit_guarded, Electrode, ElectrodeRecord, MaterialSet,
};

/// Largest admissible `|F eta / (2 R theta)|` before the exponential is
/// treated as divergence.
pub const SINH_ARGUMENT_LIMIT: f64 = 500.0;

/// Exchange current density `k F sqrt(c_e) sqrt(c_max - c_s) sqrt(c_s)`.
pub fn exchange_current(
    c_s: f64,
    c_e: f64,
    rec: &ElectrodeRecord,
    mats: &MaterialSet,
) -> Result<f64, PhysicsError> {
    if !(c_e >= 0.0) || !(c_s >= 0.0) || !(c_s <= rec.max_concentration) {
        return Err(PhysicsError::OutOfRange(format!(
            "exchange current needs c_e >= 0 and 0 <= c_s <= c_max, got c_e = {c_e}, c_s = {c_s}"
        )));
    }
    Ok(mats.rate_constant
        * mats.faraday
        * c_e.sqrt()
        * (rec.max_concentration - c_s).sqrt()
        * c_s.sqrt())
}

/// Butler-Volmer reaction current `2 I_c sinh(F eta / (2 R theta))`.
pub fn butler_volmer(
    exchange: f64,
    overpotential: f64,
    theta: f64,
    mats: &MaterialSet,
) -> Result<f64, PhysicsError> {
    let arg = mats.faraday * overpotential / (2.0 * mats.gas_constant * theta);
    if !(arg.abs() <= SINH_ARGUMENT_LIMIT) {
        return Err(PhysicsError::KineticsOverflow {
            argument: arg,
            overpotential,
        });
    }
    Ok(2.0 * exchange * arg.sinh())
}

/// Coefficient `I_c F / (R theta)` of the linearised reaction current.
pub fn linearized_conductance(exchange: f64, theta: f64, mats: &MaterialSet) -> f64 {
    exchange * mats.faraday / (mats.gas_constant * theta)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GuardAction {
    Clamp,
    Abort,
}

/// Floors keeping concentrations away from the singular points of the
/// kinetics during coefficient evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GuardPolicy {
    /// Lower bound for the electrolyte concentration.
    pub electrolyte_floor: f64,
    /// Margin of the solid concentration from zero and from saturation.
    pub solid_margin: f64,
    pub action: GuardAction,
}

impl GuardPolicy {
    /// `1e-3 c_e0` and `1e-4` of the smaller saturation concentration.
    pub fn for_materials(mats: &MaterialSet) -> Self {
        GuardPolicy {
            electrolyte_floor: 1e-3 * mats.initial_electrolyte_concentration,
            solid_margin: 1e-4
                * mats
                    .anode
                    .max_concentration
                    .min(mats.cathode.max_concentration),
            action: GuardAction::Clamp,
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        let mut bad = Vec::new();
        if !(self.electrolyte_floor > 0.0) {
            bad.push(format!("electrolyte floor {} must be positive", self.electrolyte_floor));
        }
        if !(self.solid_margin > 0.0) {
            bad.push(format!("solid margin {} must be positive", self.solid_margin));
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(bad.join("; "))
        }
    }
}

/// Applies a [`GuardPolicy`] at evaluation points and counts clamp events.
#[derive(Debug)]
pub struct Guard {
    pub policy: GuardPolicy,
    events: AtomicUsize,
}

impl Guard {
    pub fn new(policy: GuardPolicy) -> Self {
        Guard {
            policy,
            events: AtomicUsize::new(0),
        }
    }

    pub fn events(&self) -> usize {
        self.events.load(Ordering::Relaxed)
    }

    pub fn reset(&self) -> usize {
        self.events.swap(0, Ordering::Relaxed)
    }

    fn hit(&self, what: &'static str, value: f64, bound: f64, at: [f64; 2]) -> Result<f64, PhysicsError> {
        self.events.fetch_add(1, Ordering::Relaxed);
        log::debug!("clamped {what} {value:e} to {bound:e} at ({:.4}, {:.4})", at[0], at[1]);
        match self.policy.action {
            GuardAction::Clamp => Ok(bound),
            GuardAction::Abort => Err(PhysicsError::Guard {
                quantity: what,
                value,
                position: at,
            }),
        }
    }

    pub fn electrolyte(&self, c: f64, at: [f64; 2]) -> Result<f64, PhysicsError> {
        let lo = self.policy.electrolyte_floor;
        if c >= lo {
            Ok(c)
        } else {
            self.hit("electrolyte concentration", c, lo, at)
        }
    }

    pub fn solid(&self, c: f64, max: f64, at: [f64; 2]) -> Result<f64, PhysicsError> {
        let m = self.policy.solid_margin;
        if c < m || c.is_nan() {
            self.hit("solid concentration", c, m, at)
        } else if c > max - m {
            self.hit("solid concentration", c, max - m, at)
        } else {
            Ok(c)
        }
    }
}

/// Traces and derived kinetic quantities at one interface point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterfaceSample {
    pub c_s: f64,
    pub c_e: f64,
    pub phi_s: f64,
    pub phi_e: f64,
    pub theta: f64,
    pub soc: f64,
    pub open_circuit: f64,
    pub overpotential: f64,
    pub exchange: f64,
    pub reaction: f64,
}

/// Raw field traces at an interface point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Traces {
    pub c_s: f64,
    pub c_e: f64,
    pub phi_s: f64,
    pub phi_e: f64,
    pub theta: f64,
}

impl InterfaceSample {
    /// Evaluates the kinetics from guarded traces. `volt` is the internal
    /// value of one volt.
    pub fn evaluate(
        electrode: Electrode,
        raw: Traces,
        at: [f64; 2],
        mats: &MaterialSet,
        volt: f64,
        guard: &Guard,
    ) -> Result<InterfaceSample, PhysicsError> {
        let rec = mats.electrode(electrode);
        let c_s = guard.solid(raw.c_s, rec.max_concentration, at)?;
        let c_e = guard.electrolyte(raw.c_e, at)?;
        let soc = c_s / rec.max_concentration;
        let open_circuit = open_circuit_guarded(electrode, soc) * volt;
        let overpotential = raw.phi_s - raw.phi_e - open_circuit;
        let exchange = exchange_current(c_s, c_e, rec, mats)?;
        let reaction = butler_volmer(exchange, overpotential, raw.theta, mats)?;
        Ok(InterfaceSample {
            c_s,
            c_e,
            phi_s: raw.phi_s,
            phi_e: raw.phi_e,
            theta: raw.theta,
            soc,
            open_circuit,
            overpotential,
            exchange,
            reaction,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Medium {
    Solid(Electrode),
    Electrolyte,
}

/// Current density: `-gamma grad phi` in a solid, `-kappa grad phi -
/// kappa_D grad ln c_e` in the electrolyte. `with_diffusional` switches the
/// concentration term.
pub fn current_density(
    medium: Medium,
    grad_phi: [f64; 2],
    grad_ce: [f64; 2],
    c_e: f64,
    theta: f64,
    mats: &MaterialSet,
    with_diffusional: bool,
) -> Result<[f64; 2], PhysicsError> {
    match medium {
        Medium::Solid(e) => {
            let g = mats.electrode(e).electronic_conductivity;
            Ok([-g * grad_phi[0], -g * grad_phi[1]])
        }
        Medium::Electrolyte => {
            if !(c_e > 0.0) {
                return Err(PhysicsError::OutOfRange(format!(
                    "electrolyte current needs c_e > 0, got {c_e}"
                )));
            }
            let k = mats.electrolyte.ionic_conductivity;
            let kd = if with_diffusional {
                diffusional_conductivity(theta, mats)
            } else {
                0.0
            };
            Ok([
                -k * grad_phi[0] - kd * grad_ce[0] / c_e,
                -k * grad_phi[1] - kd * grad_ce[1] / c_e,
            ])
        }
    }
}

/// Sign convention of the Ohmic and reaction heat sources.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeatSign {
    /// `Q = -i . grad phi` and interface source `eta I_BV`; both nonnegative
    /// in a solid conductor.
    Physical,
    /// `Q = i . grad phi` and interface source `-eta I_BV`.
    Reversed,
}

pub fn ohmic_heat(current: [f64; 2], grad_phi: [f64; 2], sign: HeatSign) -> f64 {
    let p = current[0] * grad_phi[0] + current[1] * grad_phi[1];
    match sign {
        HeatSign::Physical => -p,
        HeatSign::Reversed => p,
    }
}

pub fn reaction_heat(overpotential: f64, reaction: f64, sign: HeatSign) -> f64 {
    match sign {
        HeatSign::Physical => overpotential * reaction,
        HeatSign::Reversed => -overpotential * reaction,
    }
}
