//! Scenario configuration: presets, flat `key = value` files, validation,
//! conversion to internal units and run manifests.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::fem::{SolverMethod, SolverOptions};
use crate::geometry::{CellDimensions, MeshSpec};
use crate::integrator::{StepConfig, TimeGrid};
use crate::materials::{Electrode, MaterialSet, CATHODE_OCP_POLE};
use crate::physics::{GuardAction, GuardPolicy, HeatSign, ModelMode, ModelParams};
use crate::units::{Dim, ScaleSet};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("{}", .0.join("\n"))]
    Syntax(Vec<String>),
    #[error("invalid scenario: {}", .0.join("; "))]
    Invalid(Vec<String>),
    #[error("unknown preset '{name}'{}", suggestion_text(.suggestion))]
    UnknownPreset {
        name: String,
        suggestion: Option<String>,
    },
}

fn suggestion_text(s: &Option<String>) -> String {
    s.as_ref()
        .map(|s| format!(" (did you mean '{s}'?)"))
        .unwrap_or_default()
}

pub const PRESETS: [&str; 4] = ["low_discharge", "high_discharge", "low_charge", "high_charge"];

#[derive(Debug, Clone, PartialEq)]
pub struct OutputConfig {
    /// Run directory; no files are written when unset.
    pub dir: Option<PathBuf>,
    /// Simulated seconds between VTK snapshots (the final step is always
    /// written).
    pub snapshot_interval: f64,
    pub write_vtk: bool,
}

/// Optional overrides of the default guard floors (SI).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GuardConfig {
    pub electrolyte_floor: Option<f64>,
    pub solid_margin: Option<f64>,
    pub action: GuardAction,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub name: String,
    /// A m^-2, positive for discharge.
    pub applied_current: f64,
    /// s
    pub t_end: f64,
    /// s
    pub dt: f64,
    /// Initial state of charge of anode and cathode.
    pub soc_init: [f64; 2],
    pub mode: ModelMode,
    pub heat_sign: HeatSign,
    pub diffusional_conductivity: bool,
    pub dims: CellDimensions,
    pub mesh: MeshSpec,
    pub guard: GuardConfig,
    pub step: StepConfig,
    pub warmup_steps: usize,
    pub output: OutputConfig,
    pub scales: ScaleSet,
    pub materials: MaterialSet,
    pub solver: SolverOptions,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            name: "custom".into(),
            applied_current: 0.0,
            t_end: 3600.0,
            dt: 3.0,
            soc_init: [0.5, 0.5],
            mode: ModelMode::Full,
            heat_sign: HeatSign::Physical,
            diffusional_conductivity: true,
            dims: CellDimensions::default(),
            mesh: MeshSpec::default(),
            guard: GuardConfig {
                electrolyte_floor: None,
                solid_margin: None,
                action: GuardAction::Clamp,
            },
            step: StepConfig::default(),
            warmup_steps: 2,
            output: OutputConfig {
                dir: None,
                snapshot_interval: 60.0,
                write_vtk: true,
            },
            scales: ScaleSet::default(),
            materials: MaterialSet::default(),
            solver: SolverOptions::default(),
        }
    }
}

fn closest(word: &str, candidates: impl IntoIterator<Item = String>) -> Option<String> {
    candidates
        .into_iter()
        .map(|c| (strsim::jaro_winkler(word, &c), c))
        .filter(|(s, _)| *s > 0.8)
        .max_by(|a, b| a.0.total_cmp(&b.0))
        .map(|(_, c)| c)
}

const ELECTRODE_FIELDS: [&str; 9] = [
    "heat_capacity",
    "thermal_conductivity",
    "youngs_modulus",
    "poisson_ratio",
    "thermal_expansion",
    "chemical_expansion",
    "electronic_conductivity",
    "reference_diffusivity",
    "max_concentration",
];
const ELECTROLYTE_FIELDS: [&str; 5] = [
    "heat_capacity",
    "thermal_conductivity",
    "ionic_conductivity",
    "diffusivity",
    "transference_number",
];
const SHARED_MATERIAL_KEYS: [&str; 8] = [
    "rate_constant",
    "diffusivity_concentration_factor",
    "diffusivity_pressure_factor",
    "pressure_saturation",
    "reference_temperature",
    "initial_electrolyte_concentration",
    "gas_constant",
    "faraday",
];
const SCENARIO_KEYS: [&str; 35] = [
    "preset",
    "name",
    "applied_current",
    "t_end",
    "dt",
    "soc_init",
    "soc_anode",
    "soc_cathode",
    "model",
    "reversed_heat_sign",
    "diffusional_conductivity",
    "half_thickness",
    "channel",
    "digit_length",
    "tip_gap",
    "end_cap",
    "mesh.base_size",
    "mesh.layers",
    "mesh.grading_ratio",
    "mesh.degree",
    "mesh.normal_degree",
    "guard.electrolyte_floor",
    "guard.solid_margin",
    "guard.action",
    "extra_fp_iters",
    "sweep_tol",
    "warmup_steps",
    "snapshot_interval",
    "write_vtk",
    "solver",
    "solver.rtol",
    "solver.max_iter",
    "scale.length",
    "scale.time",
    "scale.concentration",
];
const SCALE_KEYS_REST: [&str; 3] = ["scale.potential", "scale.temperature", "scale.stress"];

/// Every key accepted in a scenario file.
pub fn known_keys() -> Vec<String> {
    let mut keys: Vec<String> = SCENARIO_KEYS.iter().map(|s| s.to_string()).collect();
    keys.extend(SCALE_KEYS_REST.iter().map(|s| s.to_string()));
    for e in Electrode::ALL {
        keys.extend(ELECTRODE_FIELDS.iter().map(|f| format!("{}.{f}", e.name())));
    }
    keys.extend(ELECTROLYTE_FIELDS.iter().map(|f| format!("electrolyte.{f}")));
    keys.extend(SHARED_MATERIAL_KEYS.iter().map(|s| s.to_string()));
    keys
}

fn material_slot<'a>(m: &'a mut MaterialSet, key: &str) -> Option<&'a mut f64> {
    let (head, field) = key.split_once('.').unwrap_or(("", key));
    let electrode = |r: &'a mut crate::materials::ElectrodeRecord| -> Option<&'a mut f64> {
        Some(match field {
            "heat_capacity" => &mut r.heat_capacity,
            "thermal_conductivity" => &mut r.thermal_conductivity,
            "youngs_modulus" => &mut r.youngs_modulus,
            "poisson_ratio" => &mut r.poisson_ratio,
            "thermal_expansion" => &mut r.thermal_expansion,
            "chemical_expansion" => &mut r.chemical_expansion,
            "electronic_conductivity" => &mut r.electronic_conductivity,
            "reference_diffusivity" => &mut r.reference_diffusivity,
            "max_concentration" => &mut r.max_concentration,
            _ => return None,
        })
    };
    match head {
        "anode" => electrode(&mut m.anode),
        "cathode" => electrode(&mut m.cathode),
        "electrolyte" => {
            let r = &mut m.electrolyte;
            Some(match field {
                "heat_capacity" => &mut r.heat_capacity,
                "thermal_conductivity" => &mut r.thermal_conductivity,
                "ionic_conductivity" => &mut r.ionic_conductivity,
                "diffusivity" => &mut r.diffusivity,
                "transference_number" => &mut r.transference_number,
                _ => return None,
            })
        }
        "" => Some(match field {
            "rate_constant" => &mut m.rate_constant,
            "diffusivity_concentration_factor" => &mut m.diffusivity_concentration_factor,
            "diffusivity_pressure_factor" => &mut m.diffusivity_pressure_factor,
            "pressure_saturation" => &mut m.pressure_saturation,
            "reference_temperature" => &mut m.reference_temperature,
            "initial_electrolyte_concentration" => &mut m.initial_electrolyte_concentration,
            "gas_constant" => &mut m.gas_constant,
            "faraday" => &mut m.faraday,
            _ => return None,
        }),
        _ => None,
    }
}

fn parse_f64(v: &str) -> Result<f64, String> {
    v.parse::<f64>().map_err(|_| format!("'{v}' is not a number"))
}

fn parse_usize(v: &str) -> Result<usize, String> {
    v.parse::<usize>()
        .map_err(|_| format!("'{v}' is not a nonnegative integer"))
}

fn parse_bool(v: &str) -> Result<bool, String> {
    match v.to_ascii_lowercase().as_str() {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(format!("'{v}' is not a boolean")),
    }
}

pub fn parse_mode(v: &str) -> Result<ModelMode, String> {
    match v {
        "full" => Ok(ModelMode::Full),
        "electrochemical" => Ok(ModelMode::Electrochemical),
        _ => Err(format!("model '{v}' is neither 'full' nor 'electrochemical'")),
    }
}

impl ScenarioConfig {
    /// One of the four built-in scenarios.
    pub fn preset(name: &str) -> Result<ScenarioConfig, ConfigError> {
        let (current, t_end) = match name {
            "low_discharge" => (5.0, 14_400.0),
            "high_discharge" => (20.0, 3_600.0),
            "low_charge" => (-5.0, 14_400.0),
            "high_charge" => (-20.0, 3_600.0),
            _ => {
                return Err(ConfigError::UnknownPreset {
                    name: name.into(),
                    suggestion: closest(name, PRESETS.iter().map(|s| s.to_string())),
                })
            }
        };
        Ok(ScenarioConfig {
            name: name.into(),
            applied_current: current,
            t_end,
            ..ScenarioConfig::default()
        })
    }

    /// Sets one key; the error is a message without location.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let f = || parse_f64(value);
        match key {
            "preset" => {
                let keep = self.output.clone();
                *self = ScenarioConfig::preset(value).map_err(|e| e.to_string())?;
                self.output = keep;
            }
            "name" => self.name = value.to_string(),
            "applied_current" => self.applied_current = f()?,
            "t_end" => self.t_end = f()?,
            "dt" => self.dt = f()?,
            "soc_init" => self.soc_init = [f()?; 2],
            "soc_anode" => self.soc_init[0] = f()?,
            "soc_cathode" => self.soc_init[1] = f()?,
            "model" => self.mode = parse_mode(value)?,
            "reversed_heat_sign" => {
                self.heat_sign = if parse_bool(value)? {
                    HeatSign::Reversed
                } else {
                    HeatSign::Physical
                }
            }
            "diffusional_conductivity" => self.diffusional_conductivity = parse_bool(value)?,
            "half_thickness" => self.dims.half_thickness = f()?,
            "channel" => self.dims.channel = f()?,
            "digit_length" => self.dims.digit_length = f()?,
            "tip_gap" => self.dims.tip_gap = f()?,
            "end_cap" => self.dims.end_cap = f()?,
            "mesh.base_size" => self.mesh.base_size = f()?,
            "mesh.layers" => self.mesh.layers = parse_usize(value)?,
            "mesh.grading_ratio" => self.mesh.grading_ratio = f()?,
            "mesh.degree" => self.mesh.degree = parse_usize(value)?,
            "mesh.normal_degree" => self.mesh.normal_degree = parse_usize(value)?,
            "guard.electrolyte_floor" => self.guard.electrolyte_floor = Some(f()?),
            "guard.solid_margin" => self.guard.solid_margin = Some(f()?),
            "guard.action" => {
                self.guard.action = match value {
                    "clamp" => GuardAction::Clamp,
                    "abort" => GuardAction::Abort,
                    _ => return Err(format!("guard action '{value}' is neither 'clamp' nor 'abort'")),
                }
            }
            "extra_fp_iters" => self.step.extra_sweeps = parse_usize(value)?,
            "sweep_tol" => self.step.sweep_tol = f()?,
            "warmup_steps" => self.warmup_steps = parse_usize(value)?,
            "snapshot_interval" => self.output.snapshot_interval = f()?,
            "write_vtk" => self.output.write_vtk = parse_bool(value)?,
            "solver" => {
                self.solver.method = match value {
                    "direct" => SolverMethod::Direct,
                    "cg" => SolverMethod::ConjugateGradient,
                    _ => return Err(format!("solver '{value}' is neither 'direct' nor 'cg'")),
                }
            }
            "solver.rtol" => self.solver.rtol = f()?,
            "solver.max_iter" => self.solver.max_iter = parse_usize(value)?,
            "scale.length" => self.scales.length = f()?,
            "scale.time" => self.scales.time = f()?,
            "scale.concentration" => self.scales.concentration = f()?,
            "scale.potential" => self.scales.potential = f()?,
            "scale.temperature" => self.scales.temperature = f()?,
            "scale.stress" => self.scales.stress = f()?,
            _ => {
                let v = f()?;
                match material_slot(&mut self.materials, key) {
                    Some(slot) => *slot = v,
                    None => return Err(format!("unknown key '{key}'")),
                }
            }
        }
        Ok(())
    }

    /// Parses `key = value` lines (`#` starts a comment). A `preset` line is
    /// applied first wherever it appears; other keys override it in order.
    pub fn parse_str(text: &str, base: ScenarioConfig) -> Result<ScenarioConfig, ConfigError> {
        let keys = known_keys();
        let mut errors = Vec::new();
        let mut entries = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                errors.push(format!("line {}: expected 'key = value', found '{line}'", n + 1));
                continue;
            };
            let (k, v) = (k.trim(), v.trim());
            if !keys.iter().any(|x| x == k) {
                let hint = suggestion_text(&closest(k, keys.iter().cloned()));
                errors.push(format!("line {}: unknown key '{k}'{hint}", n + 1));
                continue;
            }
            entries.push((n + 1, k.to_string(), v.to_string()));
        }
        let mut cfg = base;
        entries.sort_by_key(|(_, k, _)| k != "preset");
        for (line, k, v) in entries {
            if let Err(e) = cfg.set(&k, &v) {
                errors.push(format!("line {line}: {k}: {e}"));
            }
        }
        if !errors.is_empty() {
            return Err(ConfigError::Syntax(errors));
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Parses a scenario file on top of the default configuration.
    pub fn parse_file(path: impl AsRef<Path>) -> crate::Result<ScenarioConfig> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| crate::Error::io(path, e))?;
        Ok(ScenarioConfig::parse_str(&text, ScenarioConfig::default())?)
    }

    /// A preset name or a path to a scenario file.
    pub fn resolve(spec: &str) -> crate::Result<ScenarioConfig> {
        if PRESETS.contains(&spec) {
            return Ok(ScenarioConfig::preset(spec)?);
        }
        let p = Path::new(spec);
        if p.exists() {
            return ScenarioConfig::parse_file(p);
        }
        Err(ConfigError::UnknownPreset {
            name: spec.into(),
            suggestion: closest(spec, PRESETS.iter().map(|s| s.to_string())),
        }
        .into())
    }

    /// Checks every invariant and reports all violations together.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let mut bad = Vec::new();
        if !self.applied_current.is_finite() {
            bad.push(format!("applied_current = {} must be finite", self.applied_current));
        }
        if self.t_end > 0.0 && self.dt > self.t_end {
            bad.push(format!("dt = {} exceeds t_end = {}", self.dt, self.t_end));
        }
        if let Err(e) = TimeGrid::new(self.dt, self.t_end) {
            bad.push(e);
        }
        for (name, s) in [("soc_anode", self.soc_init[0]), ("soc_cathode", self.soc_init[1])] {
            if !(s > 0.0 && s < 1.0) {
                bad.push(format!("{name} = {s} must lie in (0, 1)"));
            }
        }
        if self.soc_init[1] >= CATHODE_OCP_POLE {
            bad.push("soc_cathode lies beyond the cathode fit's pole".into());
        }
        for r in [
            self.dims.validate().err().map(|e| e.to_string()),
            self.mesh.validate().err().map(|e| e.to_string()),
            self.materials.validate().err().map(|e| e.to_string()),
            self.scales.validate().err(),
        ]
        .into_iter()
        .flatten()
        {
            bad.push(r);
        }
        for (name, v) in [
            ("guard.electrolyte_floor", self.guard.electrolyte_floor),
            ("guard.solid_margin", self.guard.solid_margin),
        ] {
            if let Some(v) = v {
                if !(v > 0.0) {
                    bad.push(format!("{name} = {v} must be positive"));
                }
            }
        }
        if !(self.step.sweep_tol >= 0.0) {
            bad.push(format!("sweep_tol = {} must be nonnegative", self.step.sweep_tol));
        }
        if !(self.output.snapshot_interval > 0.0) {
            bad.push(format!(
                "snapshot_interval = {} must be positive",
                self.output.snapshot_interval
            ));
        }
        if !(self.solver.rtol > 0.0 && self.solver.rtol < 1.0) {
            bad.push(format!("solver.rtol = {} must lie in (0, 1)", self.solver.rtol));
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(ConfigError::Invalid(bad))
        }
    }

    /// Guard policy in SI units, defaults filled from the materials.
    pub fn guard_policy(&self) -> GuardPolicy {
        let d = GuardPolicy::for_materials(&self.materials);
        GuardPolicy {
            electrolyte_floor: self.guard.electrolyte_floor.unwrap_or(d.electrolyte_floor),
            solid_margin: self.guard.solid_margin.unwrap_or(d.solid_margin),
            action: self.guard.action,
        }
    }

    /// Canonical text form; parsing it reproduces this configuration.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        put("name", self.name.clone());
        put("applied_current", self.applied_current.to_string());
        put("t_end", self.t_end.to_string());
        put("dt", self.dt.to_string());
        put("soc_anode", self.soc_init[0].to_string());
        put("soc_cathode", self.soc_init[1].to_string());
        put("model", self.mode.name().into());
        put(
            "reversed_heat_sign",
            (self.heat_sign == HeatSign::Reversed).to_string(),
        );
        put("diffusional_conductivity", self.diffusional_conductivity.to_string());
        put("half_thickness", self.dims.half_thickness.to_string());
        put("channel", self.dims.channel.to_string());
        put("digit_length", self.dims.digit_length.to_string());
        put("tip_gap", self.dims.tip_gap.to_string());
        put("end_cap", self.dims.end_cap.to_string());
        put("mesh.base_size", self.mesh.base_size.to_string());
        put("mesh.layers", self.mesh.layers.to_string());
        put("mesh.grading_ratio", self.mesh.grading_ratio.to_string());
        put("mesh.degree", self.mesh.degree.to_string());
        put("mesh.normal_degree", self.mesh.normal_degree.to_string());
        let g = self.guard_policy();
        put("guard.electrolyte_floor", g.electrolyte_floor.to_string());
        put("guard.solid_margin", g.solid_margin.to_string());
        put(
            "guard.action",
            match g.action {
                GuardAction::Clamp => "clamp",
                GuardAction::Abort => "abort",
            }
            .into(),
        );
        put("extra_fp_iters", self.step.extra_sweeps.to_string());
        put("sweep_tol", self.step.sweep_tol.to_string());
        put("warmup_steps", self.warmup_steps.to_string());
        put("snapshot_interval", self.output.snapshot_interval.to_string());
        put("write_vtk", self.output.write_vtk.to_string());
        put(
            "solver",
            match self.solver.method {
                SolverMethod::Direct => "direct",
                SolverMethod::ConjugateGradient => "cg",
            }
            .into(),
        );
        put("solver.rtol", self.solver.rtol.to_string());
        put("solver.max_iter", self.solver.max_iter.to_string());
        let sc = &self.scales;
        for (k, v) in [
            ("scale.length", sc.length),
            ("scale.time", sc.time),
            ("scale.concentration", sc.concentration),
            ("scale.potential", sc.potential),
            ("scale.temperature", sc.temperature),
            ("scale.stress", sc.stress),
        ] {
            put(k, v.to_string());
        }
        let mut mats = self.materials.clone();
        for k in known_keys() {
            if let Some(v) = material_slot(&mut mats, &k) {
                put(&k, v.to_string());
            }
        }
        s
    }

    /// SHA-256 of the canonical text, hex encoded.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.to_text().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Run manifest: code version, configuration hash, scale set and every
    /// parameter value.
    pub fn manifest(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# voltacell run manifest");
        let _ = writeln!(s, "code_version = {}", env!("CARGO_PKG_VERSION"));
        let _ = writeln!(s, "config_hash = {}", self.hash());
        let _ = writeln!(s, "power_density_basis = per unit out-of-plane depth");
        let _ = writeln!(s, "# scale set");
        for line in self.scales.to_string().lines() {
            let _ = writeln!(s, "scaleset.{line}");
        }
        let _ = writeln!(s, "# parameters");
        s.push_str(&self.to_text());
        s
    }
}

/// Internal-unit inputs derived from a configuration.
#[derive(Debug, Clone)]
pub struct Nondimensional {
    pub scales: ScaleSet,
    pub params: ModelParams,
    pub dt: f64,
    pub t_end: f64,
}

/// Converts every model coefficient to the internal unit system.
pub fn nondimensionalize(cfg: &ScenarioConfig) -> Nondimensional {
    let sc = cfg.scales;
    let mats = cfg.materials.to_internal(&sc);
    let g = cfg.guard_policy();
    let mut params = ModelParams::new(mats, sc.to_internal(1.0, Dim::POTENTIAL));
    params.mode = cfg.mode;
    params.heat_sign = cfg.heat_sign;
    params.diffusional = cfg.diffusional_conductivity;
    params.guard = GuardPolicy {
        electrolyte_floor: sc.to_internal(g.electrolyte_floor, Dim::CONCENTRATION),
        solid_margin: sc.to_internal(g.solid_margin, Dim::CONCENTRATION),
        action: g.action,
    };
    params.soc_init = cfg.soc_init;
    params.applied_current = sc.to_internal(cfg.applied_current, Dim::CURRENT_DENSITY);
    params.solver = cfg.solver;
    Nondimensional {
        scales: sc,
        params,
        dt: sc.to_internal(cfg.dt, Dim::TIME),
        t_end: sc.to_internal(cfg.t_end, Dim::TIME),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_match_scenarios() {
        let c = ScenarioConfig::preset("high_discharge").unwrap();
        assert_eq!((c.applied_current, c.t_end), (20.0, 3600.0));
        let c = ScenarioConfig::preset("low_charge").unwrap();
        assert_eq!((c.applied_current, c.t_end), (-5.0, 14_400.0));
        let e = ScenarioConfig::preset("high_dischrge").unwrap_err();
        assert!(e.to_string().contains("high_discharge"));
    }

    #[test]
    fn file_overrides_preset() {
        let c = ScenarioConfig::parse_str("dt = 6\npreset = high_discharge\n", ScenarioConfig::default())
            .unwrap();
        assert_eq!(c.dt, 6.0);
        assert_eq!(c.applied_current, 20.0);
    }

    #[test]
    fn errors_carry_lines_and_suggestions() {
        let e = ScenarioConfig::parse_str("dt = 3\napplied_curent = 4\nt_end = x\n", ScenarioConfig::default())
            .unwrap_err();
        let msg = e.to_string();
        assert!(msg.contains("line 2") && msg.contains("applied_current"), "{msg}");
        assert!(msg.contains("line 3"), "{msg}");
    }

    #[test]
    fn invalid_soc_rejected() {
        let e = ScenarioConfig::parse_str("soc_init = 1.5\ndt = -1\n", ScenarioConfig::default())
            .unwrap_err();
        match e {
            ConfigError::Invalid(v) => assert!(v.len() >= 3, "{v:?}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn canonical_text_round_trips() {
        let mut c = ScenarioConfig::preset("low_charge").unwrap();
        c.materials.cathode.youngs_modulus = 2.7e9;
        c.mode = ModelMode::Electrochemical;
        let back = ScenarioConfig::parse_str(&c.to_text(), ScenarioConfig::default()).unwrap();
        assert_eq!(back.to_text(), c.to_text());
        assert_eq!(back.hash(), c.hash());
    }

    #[test]
    fn identity_scales_leave_values_unchanged() {
        let mut c = ScenarioConfig::default();
        c.scales = ScaleSet::si();
        let n = nondimensionalize(&c);
        assert_eq!(n.params.mats, c.materials);
        assert_eq!(n.dt, c.dt);
    }
}
