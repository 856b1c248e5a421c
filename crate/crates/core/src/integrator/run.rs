//! Scenario driver: mesh, model, warm-up, stepping and outputs.

use std::path::Path;
use std::sync::Arc;

use super::{step, warmup, History, StepConfig, TimeGrid};
use crate::config::{nondimensionalize, ScenarioConfig};
use crate::fem::Support;
use crate::geometry::{generate_layered_mesh, BoundaryPart, DomainGeometry};
use crate::physics::state::{ELECTROLYTE_CONCENTRATION, SOLID_CONCENTRATION, THETA};
use crate::physics::{CellModel, Field, SimState};
use crate::postprocess::{
    export_mesh_vtk, export_vtk, power_density, record, PowerDensity, TimeSeriesRecord,
    TimeSeriesWriter,
};
use crate::units::ScaleSet;
use crate::{Error, Result};

/// Balance and iteration data of one step, in internal units.
#[derive(Debug, Clone, PartialEq)]
pub struct StepDiagnostics {
    pub step: usize,
    pub t: f64,
    pub sweeps: usize,
    pub updates: Vec<f64>,
    pub clamp_events: usize,
    /// Change of the lithium content of each electrode (anode, cathode).
    pub solid_change: [f64; 2],
    /// `-dt/F` times the interface reaction integral of each electrode.
    pub solid_expected: [f64; 2],
    pub electrolyte_change: f64,
    pub electrolyte_expected: f64,
    pub min_heat_product: f64,
    pub weighted_temperature: f64,
    pub reaction_by_electrode: [f64; 2],
}

/// A scenario being advanced step by step.
pub struct Simulation {
    pub config: ScenarioConfig,
    pub scales: ScaleSet,
    pub model: CellModel,
    pub history: History,
    pub grid: TimeGrid,
    pub step_index: usize,
}

impl Simulation {
    pub fn new(config: &ScenarioConfig) -> Result<Simulation> {
        config.validate()?;
        let nd = nondimensionalize(config);
        let geom = DomainGeometry::interdigitated(config.dims)?;
        let mesh = generate_layered_mesh(&geom, &config.mesh, nd.scales.length)?;
        let model = CellModel::new(Arc::new(mesh), nd.params)?;
        let grid = TimeGrid::new(nd.dt, nd.t_end).map_err(|e| {
            crate::config::ConfigError::Invalid(vec![format!("internal time grid: {e}")])
        })?;
        let history = History::start(model.initial_state());
        Ok(Simulation {
            config: config.clone(),
            scales: nd.scales,
            model,
            history,
            grid,
            step_index: 0,
        })
    }

    /// Unloaded warm-up steps that provide the two-level history.
    pub fn warmup(&mut self) -> Result<()> {
        if self.config.warmup_steps > 0 {
            let s0 = self.history.latest.clone();
            self.history = warmup(
                &mut self.model,
                s0,
                self.grid.dt,
                self.config.warmup_steps,
                &self.config.step,
            )?;
        }
        Ok(())
    }

    pub fn state(&self) -> &SimState {
        &self.history.latest
    }

    /// Time of the latest level in seconds, counted on the SI grid.
    pub fn time_s(&self) -> f64 {
        self.step_index as f64 * self.config.dt
    }

    pub fn is_finished(&self) -> bool {
        self.step_index >= self.grid.steps
    }

    fn contents(&self, s: &SimState) -> ([f64; 2], f64) {
        let m = &self.model;
        let cs = &s.d[SOLID_CONCENTRATION];
        (
            [
                m.integral(Field::SolidConcentration, cs, Support::Anode),
                m.integral(Field::SolidConcentration, cs, Support::Cathode),
            ],
            m.integral(
                Field::ElectrolyteConcentration,
                &s.d[ELECTROLYTE_CONCENTRATION],
                Support::All,
            ),
        )
    }

    /// Advances one step.
    pub fn advance(&mut self) -> Result<StepDiagnostics> {
        self.advance_with(&self.config.step.clone())
    }

    pub fn advance_with(&mut self, cfg: &StepConfig) -> Result<StepDiagnostics> {
        let dt = self.grid.dt;
        let (before_s, before_e) = self.contents(&self.history.latest);
        let out = step(&mut self.model, &self.history, dt, cfg)?;
        let (after_s, after_e) = self.contents(&out.state);
        let rep = self.model.last_report();
        let m = &self.model.params.mats;
        let f = m.faraday;
        let tp = m.electrolyte.transference_number;
        let r = rep.reaction_by_electrode;
        self.step_index += 1;
        let diag = StepDiagnostics {
            step: self.step_index,
            t: out.state.t,
            sweeps: out.sweeps,
            updates: out.updates,
            clamp_events: rep.clamp_events,
            solid_change: [after_s[0] - before_s[0], after_s[1] - before_s[1]],
            solid_expected: [-dt / f * r[0], -dt / f * r[1]],
            electrolyte_change: after_e - before_e,
            electrolyte_expected: dt * (1.0 - tp) / f * (r[0] + r[1]),
            min_heat_product: rep.min_heat_product,
            weighted_temperature: self.model.weighted_temperature(&out.state.d[THETA]),
            reaction_by_electrode: r,
        };
        self.history.push(out.state);
        Ok(diag)
    }

    pub fn record(&self, clamp_events: usize) -> Result<TimeSeriesRecord> {
        record(
            &self.model,
            &self.history.latest,
            &self.scales,
            self.time_s(),
            clamp_events,
        )
    }

    /// Collector length and cell area per unit depth, in SI.
    pub fn power_geometry(&self) -> (f64, f64) {
        let mesh = self.model.mesh();
        (
            mesh.boundary_length(BoundaryPart::CollectorPlus) * mesh.length_unit,
            self.config.dims.width() * self.config.dims.height(),
        )
    }
}

/// Results of a complete run.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub records: Vec<TimeSeriesRecord>,
    pub diagnostics: Vec<StepDiagnostics>,
    pub power: PowerDensity,
    pub final_state: SimState,
    pub dofs: [usize; 6],
    pub elements: usize,
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Runs a scenario to its end time. With an output directory the manifest,
/// the time series (written row by row), the mesh and field snapshots are
/// written there.
pub fn run(config: &ScenarioConfig) -> Result<RunOutput> {
    let mut sim = Simulation::new(config)?;
    sim.warmup()?;
    let dir = config.output.dir.clone();
    let mut writer = None;
    if let Some(d) = &dir {
        std::fs::create_dir_all(d).map_err(|e| Error::io(d, e))?;
        write_text(&d.join("manifest.txt"), &config.manifest())?;
        export_mesh_vtk(sim.model.mesh(), d.join("mesh.vtk"))?;
        writer = Some(TimeSeriesWriter::create(d.join("timeseries.csv"))?);
    }
    let snapshot_every = ((config.output.snapshot_interval / config.dt).round() as usize).max(1);
    let snapshot = |sim: &Simulation, k: usize| -> Result<()> {
        match &dir {
            Some(d) if config.output.write_vtk => export_vtk(
                &sim.model,
                sim.state(),
                &sim.scales,
                d.join(format!("snapshot_{k:06}.vtk")),
            ),
            _ => Ok(()),
        }
    };
    let mut records = vec![sim.record(0)?];
    if let Some(w) = writer.as_mut() {
        w.append(&records[0])?;
    }
    snapshot(&sim, 0)?;
    let mut diagnostics = Vec::with_capacity(sim.grid.steps);
    while !sim.is_finished() {
        let k = sim.step_index + 1;
        let diag = sim.advance().map_err(|e| Error::Step {
            step: k,
            source: Box::new(e),
        })?;
        let rec = sim.record(diag.clamp_events)?;
        log::info!(
            "{} step {k}/{} t = {:.1} s  V = {:.5} V  T = {:.4} K  sweeps = {}",
            config.name,
            sim.grid.steps,
            rec.t,
            rec.v_out,
            rec.temperature,
            diag.sweeps
        );
        if let Some(w) = writer.as_mut() {
            w.append(&rec)?;
        }
        if k % snapshot_every == 0 || k == sim.grid.steps {
            snapshot(&sim, k)?;
        }
        records.push(rec);
        diagnostics.push(diag);
    }
    let series: Vec<(f64, f64)> = records.iter().map(|r| (r.t, r.v_out)).collect();
    let (collector, area) = sim.power_geometry();
    let power = power_density(&series, config.applied_current, collector, area)?;
    if let Some(d) = &dir {
        write_text(
            &d.join("summary.txt"),
            &format!(
                "scenario = {}\nmodel = {}\np_avg_w_per_m3 = {}\np_avg_w_per_dm3 = {}\n",
                config.name,
                config.mode.name(),
                power.w_per_m3,
                power.w_per_dm3()
            ),
        )?;
    }
    Ok(RunOutput {
        records,
        diagnostics,
        power,
        final_state: sim.history.latest.clone(),
        dofs: sim.model.dof_counts(),
        elements: sim.model.mesh().elements.len(),
    })
}
