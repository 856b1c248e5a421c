mod common;

use common::*;
use voltacell::config::ScenarioConfig;
use voltacell::integrator::{run, Simulation, StepConfig};
use voltacell::materials::{open_circuit, Electrode};
use voltacell::physics::{relative_change, GuardAction, HeatSign, ModelMode};
use voltacell::verification::{poisson_h1_error, temporal_study};
use voltacell::Error;

#[test]
fn scheme_is_second_order_on_surrogate() {
    let s = temporal_study(&[8.0, 4.0, 2.0, 1.0], 64.0, &StepConfig::default()).unwrap();
    for p in s.points.iter().skip(1) {
        assert!(p.order.unwrap() > 1.9, "{}", s.table());
    }
}

#[test]
fn refinement_reduces_poisson_error_at_rate_p() {
    for p in 1..=3 {
        let e0 = poisson_h1_error(3, p).unwrap();
        let e1 = poisson_h1_error(6, p).unwrap();
        let rate = (e0 / e1).log2();
        assert!((rate - p as f64).abs() < 0.2, "p = {p}: rate {rate}");
    }
}

#[test]
fn initial_voltage_is_open_circuit_difference() {
    let sim = Simulation::new(&desk("low_charge")).unwrap();
    let v = sim.record(0).unwrap().v_out;
    let oracle = OPEN_CIRCUIT_VOLTAGE_HALF;
    assert!((v - oracle).abs() < 1e-9, "{v} vs {oracle}");
    let from_laws = open_circuit(Electrode::Cathode, 0.5).unwrap() - open_circuit(Electrode::Anode, 0.5).unwrap();
    assert!((from_laws - oracle).abs() < 1e-12);
}

#[test]
fn unloaded_cell_stays_at_equilibrium_through_warmup() {
    let mut c = desk("low_discharge");
    c.applied_current = 0.0;
    let mut sim = Simulation::new(&c).unwrap();
    let s0 = sim.state().clone();
    sim.warmup().unwrap();
    let (df, sf) = sim.model.update_floors();
    for _ in 0..5 {
        sim.advance().unwrap();
    }
    assert!(relative_change(sim.state(), &s0, &df, &sf) < 1e-7);
}

#[test]
fn reaction_directions_follow_current_sign() {
    for (name, sign) in [("high_discharge", 1.0), ("high_charge", -1.0)] {
        let mut sim = Simulation::new(&desk(name)).unwrap();
        sim.warmup().unwrap();
        let d = sim.advance().unwrap();
        let [ra, rc] = d.reaction_by_electrode;
        assert!(sign * ra > 0.0 && sign * rc < 0.0, "{name}: {ra} {rc}");
        assert!(d.solid_change[0] * sign < 0.0);
        assert!(d.solid_change[1] * sign > 0.0);
    }
}

#[test]
fn lithium_inventory_is_conserved_per_step() {
    let mut c = desk("low_charge");
    c.t_end = 60.0;
    let mut sim = Simulation::new(&c).unwrap();
    sim.warmup().unwrap();
    while !sim.is_finished() {
        let d = sim.advance().unwrap();
        let scale = d.solid_expected[0].abs().max(d.solid_expected[1].abs());
        for k in 0..2 {
            assert!((d.solid_change[k] - d.solid_expected[k]).abs() <= 1e-8 * scale);
        }
        // total lithium in both solids and the electrolyte changes only by
        // the transference share of the net reaction
        let net = d.solid_change[0] + d.solid_change[1] + d.electrolyte_change;
        let tp = sim.model.params.mats.electrolyte.transference_number;
        let expected = -sim.grid.dt / sim.model.params.mats.faraday
            * tp
            * (d.reaction_by_electrode[0] + d.reaction_by_electrode[1]);
        assert!((net - expected).abs() <= 1e-8 * scale, "{net} vs {expected}");
    }
}

#[test]
fn electrochemical_mode_is_isothermal_and_stress_free() {
    let mut c = desk("high_discharge");
    c.mode = ModelMode::Electrochemical;
    c.t_end = 60.0;
    let out = run(&c).unwrap();
    for r in &out.records {
        assert!((r.temperature - 298.15).abs() < 1e-9);
        assert_eq!(r.vm_max, 0.0);
        assert_eq!(r.u_max, 0.0);
    }
}

#[test]
fn full_model_heats_and_strains() {
    let mut c = desk("high_discharge");
    c.t_end = 60.0;
    let out = run(&c).unwrap();
    let first = &out.records[0];
    let last = out.records.last().unwrap();
    assert!(last.temperature > first.temperature);
    assert!(last.u_max > first.u_max && last.vm_max > 0.0);
}

#[test]
fn reversed_heat_sign_cools_the_reaction_front() {
    let mut c = desk("high_discharge");
    c.t_end = 60.0;
    c.diffusional_conductivity = false;
    let physical = run(&c).unwrap();
    c.heat_sign = HeatSign::Reversed;
    let reversed = run(&c).unwrap();
    let t = |o: &voltacell::integrator::RunOutput| o.diagnostics.last().unwrap().weighted_temperature;
    assert!(t(&reversed) < t(&physical));
}

#[test]
fn extra_sweeps_contract_over_pairs() {
    let mut c = desk("high_discharge");
    c.t_end = 30.0;
    let mut sim = Simulation::new(&c).unwrap();
    sim.warmup().unwrap();
    let d = sim.advance_with(&StepConfig { extra_sweeps: 6, sweep_tol: 0.0 }).unwrap();
    assert_eq!(d.sweeps, 7);
    // the two potentials are coupled Jacobi-style, so updates alternate
    for w in d.updates.windows(3) {
        assert!(w[2] < w[0], "{:?}", d.updates);
    }
}

#[test]
fn abort_guard_reports_failing_step() {
    let mut c: ScenarioConfig = desk("high_discharge");
    c.applied_current = 2000.0;
    c.guard.action = GuardAction::Abort;
    match run(&c) {
        Err(Error::Step { step, .. }) => assert_eq!(step, 1),
        other => panic!("expected a step failure, got {:?}", other.map(|o| o.records.len())),
    }
}
