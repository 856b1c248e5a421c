//! Two-stage staggered semi-implicit midpoint scheme.
//!
//! Stage 1 advances the dynamic fields with coefficients frozen at the
//! midpoint of the previous state and a predictor; stage 2 solves the
//! quasi-static fields from the new dynamic fields. Extra sweeps replace the
//! predictor by the latest iterate.

pub mod run;
pub mod surrogate;

pub use run::{run, RunOutput, Simulation, StepDiagnostics};
pub use surrogate::LinearSurrogate;

use crate::physics::{relative_change, CellModel, SimState};
use crate::Result;

/// A semi-discrete system `M d' = f_d(d, s)`, `s = f_s(d)` advanced by the
/// staggered scheme.
pub trait Staggered {
    /// `f_d` at a state, used by the first-step predictor.
    fn rate(&mut self, state: &SimState) -> Result<Vec<Vec<f64>>>;
    /// New dynamic fields from the previous state and the frozen midpoint.
    fn stage1(&mut self, prev: &SimState, mid: &SimState, dt: f64) -> Result<Vec<Vec<f64>>>;
    /// Quasi-static fields from dynamic fields `d`; coupled quasi-static
    /// partners are taken from `partner`.
    fn stage2(&mut self, d: &[Vec<f64>], partner: &[Vec<f64>]) -> Result<Vec<Vec<f64>>>;
    /// Lower bounds of the per-field magnitudes used in relative update norms.
    fn update_floors(&self) -> (Vec<f64>, Vec<f64>);
    /// Switches external loading on or off (warm-up runs unloaded).
    fn set_loaded(&mut self, _loaded: bool) {}
}

impl Staggered for CellModel {
    fn rate(&mut self, state: &SimState) -> Result<Vec<Vec<f64>>> {
        Ok(CellModel::rate(self, state)?)
    }

    fn stage1(&mut self, prev: &SimState, mid: &SimState, dt: f64) -> Result<Vec<Vec<f64>>> {
        Ok(CellModel::stage1(self, prev, mid, dt)?)
    }

    fn stage2(&mut self, d: &[Vec<f64>], partner: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        Ok(CellModel::stage2(self, d, partner)?)
    }

    fn update_floors(&self) -> (Vec<f64>, Vec<f64>) {
        CellModel::update_floors(self)
    }

    fn set_loaded(&mut self, loaded: bool) {
        CellModel::set_loaded(self, loaded)
    }
}

/// The two most recent time levels.
#[derive(Debug, Clone, PartialEq)]
pub struct History {
    pub latest: SimState,
    pub previous: Option<SimState>,
}

impl History {
    pub fn start(state: SimState) -> Self {
        History {
            latest: state,
            previous: None,
        }
    }

    pub fn push(&mut self, state: SimState) {
        let old = std::mem::replace(&mut self.latest, state);
        self.previous = Some(old);
    }
}

/// Uniform time grid `t_n = n dt`, `n = 0..=steps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub dt: f64,
    pub steps: usize,
}

impl TimeGrid {
    pub fn new(dt: f64, t_end: f64) -> std::result::Result<TimeGrid, String> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(format!("time step {dt} must be positive"));
        }
        if !(t_end >= 0.0 && t_end.is_finite()) {
            return Err(format!("end time {t_end} must be nonnegative"));
        }
        let n = (t_end / dt).round();
        if (n * dt - t_end).abs() > 1e-9 * t_end.max(dt) {
            return Err(format!("end time {t_end} is not a multiple of the time step {dt}"));
        }
        Ok(TimeGrid {
            dt,
            steps: n as usize,
        })
    }

    pub fn t_end(&self) -> f64 {
        self.dt * self.steps as f64
    }
}

/// Fixed-point sweep controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepConfig {
    /// Sweeps after the first stage-1/stage-2 pass.
    pub extra_sweeps: usize,
    /// Early exit once the relative update falls below this value.
    pub sweep_tol: f64,
}

impl Default for StepConfig {
    fn default() -> Self {
        StepConfig {
            extra_sweeps: 4,
            sweep_tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub state: SimState,
    /// Stage passes performed (first pass included).
    pub sweeps: usize,
    /// Relative update of each pass against the iterate it replaced.
    pub updates: Vec<f64>,
}

/// Predictor for the next level: forward Euler plus a quasi-static solve
/// when only one level is known, linear extrapolation otherwise.
pub fn predict<S: Staggered>(system: &mut S, history: &History, dt: f64) -> Result<SimState> {
    let latest = &history.latest;
    match &history.previous {
        Some(prev) => {
            let mut p = SimState::combine(2.0, latest, -1.0, prev);
            p.t = latest.t + dt;
            Ok(p)
        }
        None => {
            let rate = system.rate(latest)?;
            let d: Vec<Vec<f64>> = latest
                .d
                .iter()
                .zip(&rate)
                .map(|(x, r)| x.iter().zip(r).map(|(x, r)| x + dt * r).collect())
                .collect();
            let s = system.stage2(&d, &latest.s)?;
            Ok(SimState {
                t: latest.t + dt,
                d,
                s,
            })
        }
    }
}

/// One step of the staggered midpoint scheme with extra sweeps.
pub fn step<S: Staggered>(
    system: &mut S,
    history: &History,
    dt: f64,
    cfg: &StepConfig,
) -> Result<StepOutcome> {
    let prev = &history.latest;
    let (d_floor, s_floor) = system.update_floors();
    let mut iterate = predict(system, history, dt)?;
    let mut updates = Vec::with_capacity(cfg.extra_sweeps + 1);
    for _ in 0..=cfg.extra_sweeps {
        let mid = SimState::midpoint(prev, &iterate);
        let d = system.stage1(prev, &mid, dt)?;
        let s = system.stage2(&d, &iterate.s)?;
        let next = SimState {
            t: prev.t + dt,
            d,
            s,
        };
        let upd = relative_change(&next, &iterate, &d_floor, &s_floor);
        updates.push(upd);
        iterate = next;
        if upd < cfg.sweep_tol {
            break;
        }
    }
    Ok(StepOutcome {
        state: iterate,
        sweeps: updates.len(),
        updates,
    })
}

/// Unloaded steps filling the two-level history. Afterwards the latest level
/// is relabelled `t = 0` and the one before `t = -dt`.
pub fn warmup<S: Staggered>(
    system: &mut S,
    state0: SimState,
    dt: f64,
    steps: usize,
    cfg: &StepConfig,
) -> Result<History> {
    system.set_loaded(false);
    let mut history = History::start(state0);
    let result: Result<()> = (0..steps).try_for_each(|_| {
        let out = step(system, &history, dt, cfg)?;
        history.push(out.state);
        Ok(())
    });
    system.set_loaded(true);
    result?;
    history.latest.t = 0.0;
    if let Some(p) = history.previous.as_mut() {
        p.t = -dt;
    }
    Ok(history)
}
