//! Acceptance suite: one PASS/FAIL line per criterion. Exits nonzero when
//! any criterion fails.

mod common;

use std::sync::Arc;
use std::time::{Duration, Instant};

use common::*;
use nalgebra::DMatrix;
use voltacell::config::ScenarioConfig;
use voltacell::fem::{
    assemble_elasticity, assemble_interface_mass, assemble_mass, assemble_stiffness, Arity,
    FieldSpace, InterfaceQuadrature, InterfaceSide, Support,
};
use voltacell::geometry::{Mesh, MeshSpec, Subdomain};
use voltacell::integrator::{run, RunOutput, Simulation, StepConfig};
use voltacell::materials::{diffusional_conductivity, open_circuit, Electrode, MaterialSet};
use voltacell::physics::{exchange_current, relative_change, ModelMode};
use voltacell::verification::{spatial_study, temporal_study};

const TEMPORAL_MIN_ORDER: f64 = 1.9;
const TEMPORAL_BUDGET: Duration = Duration::from_secs(10);
const SPATIAL_ORDER_TOL: f64 = 0.15;
const SPATIAL_BUDGET: Duration = Duration::from_secs(60);
const EQUILIBRIUM_TOL: f64 = 1e-7;
const EQUILIBRIUM_BUDGET: Duration = Duration::from_secs(60);
const BOOKKEEPING_TOL: f64 = 1e-8;
const BOOKKEEPING_STEPS: usize = 20;
const KAPPA_D_TOL: f64 = 1e-6;
const OCP_ANODE_TOL: f64 = 1e-5;
const OCP_CATHODE_TOL: f64 = 1e-3;
const EXCHANGE_TOL: f64 = 1e-3;
const V0_TARGET: f64 = 3.988;
const V0_TOL: f64 = 0.01;
const REFERENCE_TEMPERATURE: f64 = 298.15;
const ISOTHERMAL_TOL: f64 = 1e-9;
const SYMMETRY_TOL: f64 = 1e-12;
const DENSE_PD_MAX_DOFS: usize = 500;
const ORACLE_TOL: f64 = 1e-12;
const ORACLE_MAX_ELEMENTS: usize = 8;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn c1_temporal_order() -> Outcome {
    let t0 = Instant::now();
    let s = temporal_study(&[8.0, 4.0, 2.0, 1.0], 64.0, &StepConfig::default()).map_err(|e| e.to_string())?;
    let elapsed = t0.elapsed();
    let orders: Vec<f64> = s.points.iter().filter_map(|p| p.order).collect();
    let min = orders.iter().cloned().fold(f64::INFINITY, f64::min);
    check(
        min >= TEMPORAL_MIN_ORDER && elapsed < TEMPORAL_BUDGET,
        format!("orders {orders:.3?}, min {min:.3} >= {TEMPORAL_MIN_ORDER}, {elapsed:.2?}"),
    )
}

fn c2_spatial_order() -> Outcome {
    let t0 = Instant::now();
    let studies = spatial_study(&[1, 2, 3], &[2, 4, 8, 16]).map_err(|e| e.to_string())?;
    let elapsed = t0.elapsed();
    let mut ok = elapsed < SPATIAL_BUDGET;
    let mut detail = Vec::new();
    for (p, s) in [1.0, 2.0, 3.0].iter().zip(&studies) {
        let orders: Vec<f64> = s.points.iter().filter_map(|q| q.order).collect();
        ok &= orders.len() == 3 && orders.iter().all(|o| (o - p).abs() <= SPATIAL_ORDER_TOL);
        detail.push(format!("p={p}: {orders:.3?}"));
    }
    check(ok, format!("{}, {elapsed:.2?}", detail.join("; ")))
}

fn c3_equilibrium() -> Outcome {
    let t0 = Instant::now();
    let mut c = desk("high_discharge");
    c.applied_current = 0.0;
    let mut sim = Simulation::new(&c).map_err(|e| e.to_string())?;
    let s0 = sim.state().clone();
    let (df, sf) = sim.model.update_floors();
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        sim.advance().map_err(|e| e.to_string())?;
        worst = worst.max(relative_change(sim.state(), &s0, &df, &sf));
    }
    let elapsed = t0.elapsed();
    check(
        worst < EQUILIBRIUM_TOL && elapsed < EQUILIBRIUM_BUDGET,
        format!("max relative change {worst:.3e} < {EQUILIBRIUM_TOL:e} over 10 steps, {elapsed:.2?}"),
    )
}

fn c4_bookkeeping() -> Outcome {
    let mut c = desk("high_discharge");
    c.t_end = c.dt * BOOKKEEPING_STEPS as f64;
    let mut sim = Simulation::new(&c).map_err(|e| e.to_string())?;
    sim.warmup().map_err(|e| e.to_string())?;
    let tp = sim.model.params.mats.electrolyte.transference_number;
    let f = sim.model.params.mats.faraday;
    let mut worst_s: f64 = 0.0;
    let mut worst_e: f64 = 0.0;
    for _ in 0..BOOKKEEPING_STEPS {
        let d = sim.advance().map_err(|e| e.to_string())?;
        let scale_s = d.solid_expected[0].abs().max(d.solid_expected[1].abs());
        for k in 0..2 {
            worst_s = worst_s.max((d.solid_change[k] - d.solid_expected[k]).abs() / scale_s);
        }
        let r = d.reaction_by_electrode;
        let scale_e = sim.grid.dt * (1.0 - tp) / f * r[0].abs().max(r[1].abs());
        worst_e = worst_e.max((d.electrolyte_change - d.electrolyte_expected).abs() / scale_e);
    }
    check(
        worst_s <= BOOKKEEPING_TOL && worst_e <= BOOKKEEPING_TOL,
        format!("solid {worst_s:.2e}, electrolyte {worst_e:.2e} <= {BOOKKEEPING_TOL:e} over {BOOKKEEPING_STEPS} steps"),
    )
}

struct DeskRuns {
    runs: Vec<(String, ModelMode, RunOutput)>,
}

impl DeskRuns {
    fn get(&self, name: &str, mode: ModelMode) -> &RunOutput {
        &self
            .runs
            .iter()
            .find(|(n, m, _)| n == name && *m == mode)
            .expect("desk run present")
            .2
    }
}

fn desk_runs() -> Result<DeskRuns, String> {
    let mut runs = Vec::new();
    for name in voltacell::config::PRESETS {
        for mode in [ModelMode::Full, ModelMode::Electrochemical] {
            let mut c = desk(name);
            c.mode = mode;
            runs.push((name.to_string(), mode, run(&c).map_err(|e| e.to_string())?));
        }
    }
    Ok(DeskRuns { runs })
}

fn c5_heat_sign(desk: &DeskRuns) -> Outcome {
    let mut min_product = f64::INFINITY;
    for (_, _, r) in &desk.runs {
        for d in &r.diagnostics {
            min_product = min_product.min(d.min_heat_product);
        }
    }
    let mut worst_drop: f64 = 0.0;
    for name in voltacell::config::PRESETS {
        let mut c: ScenarioConfig = common::desk(name);
        c.diffusional_conductivity = false;
        let r = run(&c).map_err(|e| e.to_string())?;
        for w in r.diagnostics.windows(2) {
            worst_drop = worst_drop.max(w[0].weighted_temperature - w[1].weighted_temperature);
        }
    }
    check(
        min_product >= 0.0 && worst_drop <= 0.0,
        format!("min eta*I_BV {min_product:.3e} >= 0; largest step-over-step drop of weighted temperature without kappa_D {worst_drop:.3e} <= 0"),
    )
}

fn c6_golden() -> Outcome {
    let m = MaterialSet::default();
    let kd = diffusional_conductivity(298.15, &m);
    let ua = open_circuit(Electrode::Anode, 0.5).map_err(|e| e.to_string())?;
    let uc = open_circuit(Electrode::Cathode, 0.5).map_err(|e| e.to_string())?;
    let ic = exchange_current(0.5 * m.anode.max_concentration, 2000.0, &m.anode, &m)
        .map_err(|e| e.to_string())?;
    let gaps = [
        (kd - KAPPA_D_298).abs() <= KAPPA_D_TOL && (kd - (-6.546e-3)).abs() <= KAPPA_D_TOL,
        (ua - OCP_ANODE_HALF).abs() <= OCP_ANODE_TOL && (ua - 0.13453).abs() <= OCP_ANODE_TOL,
        (uc - OCP_CATHODE_HALF).abs() <= OCP_CATHODE_TOL && (uc - 4.1225).abs() <= OCP_CATHODE_TOL,
        (ic - EXCHANGE_ANODE_HALF).abs() <= EXCHANGE_TOL && (ic - 0.7478).abs() <= EXCHANGE_TOL,
    ];
    check(
        gaps.iter().all(|g| *g),
        format!("kappa_D {kd:.6e}, U_a {ua:.6}, U_c {uc:.5}, I_c {ic:.5}"),
    )
}

fn c7_initial_voltage(desk: &DeskRuns) -> Outcome {
    let mut worst: f64 = 0.0;
    let mut v = 0.0;
    for (_, _, r) in &desk.runs {
        v = r.records[0].v_out;
        worst = worst.max((v - V0_TARGET).abs());
    }
    check(
        worst <= V0_TOL && (v - OPEN_CIRCUIT_VOLTAGE_HALF).abs() <= V0_TOL,
        format!("V_out(0) = {v:.5} V, max |V_out(0) - {V0_TARGET}| over runs {worst:.2e} <= {V0_TOL}"),
    )
}

fn c8_qualitative(desk: &DeskRuns) -> Outcome {
    let mut failures = Vec::new();
    for (name, mode, r) in &desk.runs {
        let discharge = name.ends_with("discharge");
        let rec = &r.records;
        let v0 = rec[0].v_out;
        for w in rec.windows(2) {
            let (a, b) = (&w[0], &w[1]);
            let soc_ok = if discharge {
                b.soc_anode < a.soc_anode && b.soc_cathode > a.soc_cathode
            } else {
                b.soc_anode > a.soc_anode && b.soc_cathode < a.soc_cathode
            };
            if !soc_ok {
                failures.push(format!("{name}/{}: SoC trend at t = {}", mode.name(), b.t));
                break;
            }
            let temp_ok = match mode {
                ModelMode::Full => b.temperature > a.temperature,
                ModelMode::Electrochemical => {
                    (b.temperature - REFERENCE_TEMPERATURE).abs() <= ISOTHERMAL_TOL
                }
            };
            if !temp_ok {
                failures.push(format!("{name}/{}: temperature at t = {}", mode.name(), b.t));
                break;
            }
        }
        let v_ok = rec[1..]
            .iter()
            .all(|r| if discharge { r.v_out < v0 } else { r.v_out > v0 });
        if !v_ok {
            failures.push(format!("{name}/{}: voltage relative to V_out(0)", mode.name()));
        }
    }
    check(
        failures.is_empty(),
        if failures.is_empty() {
            format!("{} runs: SoC, voltage and mean temperature trends hold", desk.runs.len())
        } else {
            failures.join("; ")
        },
    )
}

fn c9_comparison(desk: &DeskRuns) -> Outcome {
    let rel = |name: &str| {
        let full = desk.get(name, ModelMode::Full).power.w_per_dm3();
        let ec = desk.get(name, ModelMode::Electrochemical).power.w_per_dm3();
        voltacell::postprocess::relative_difference(ec, full).abs()
    };
    let (hd, ld, hc, lc) = (
        rel("high_discharge"),
        rel("low_discharge"),
        rel("high_charge"),
        rel("low_charge"),
    );
    check(
        hd > ld && hc > lc,
        format!(
            "|dP/P| discharge high {:.4}% > low {:.4}%, charge high {:.4}% > low {:.4}%",
            100.0 * hd,
            100.0 * ld,
            100.0 * hc,
            100.0 * lc
        ),
    )
}

fn dense_pd(a: &voltacell::fem::SparseSym) -> bool {
    let n = a.n();
    let d = a.to_dense();
    let m = DMatrix::from_fn(n, n, |i, j| d[i][j]);
    nalgebra::Cholesky::new(m).is_some()
}

fn c10_structure() -> Outcome {
    let mut worst_asym: f64 = 0.0;
    let mut checked_pd = 0;
    let mut failures = Vec::new();
    let small = MeshSpec {
        base_size: 400e-6,
        layers: 1,
        grading_ratio: 0.5,
        degree: 1,
        normal_degree: 1,
    };
    for mesh in [MeshSpec::coarse(), small] {
        for name in ["high_discharge", "high_charge"] {
            let mut c = desk(name);
            c.mesh = mesh.clone();
            let mut sim = Simulation::new(&c).map_err(|e| e.to_string())?;
            sim.warmup().map_err(|e| e.to_string())?;
            for _ in 0..3 {
                sim.advance().map_err(|e| e.to_string())?;
            }
            let state = sim.state().clone();
            let dt = sim.grid.dt;
            for (label, a) in sim.model.system_matrices(&state, dt).map_err(|e| e.to_string())? {
                worst_asym = worst_asym.max(a.asymmetry());
                if a.n() <= DENSE_PD_MAX_DOFS {
                    checked_pd += 1;
                    if !dense_pd(&a) {
                        failures.push(format!("{label} ({} dofs) not positive definite", a.n()));
                    }
                }
            }
        }
    }
    check(
        worst_asym <= SYMMETRY_TOL && checked_pd > 0 && failures.is_empty(),
        format!(
            "max relative asymmetry {worst_asym:.2e} <= {SYMMETRY_TOL:e}; {checked_pd} matrices with <= {DENSE_PD_MAX_DOFS} dofs pass dense Cholesky{}",
            if failures.is_empty() { String::new() } else { format!("; {}", failures.join(", ")) }
        ),
    )
}

fn c11_oracle() -> Outcome {
    let xs = [0.0, 1.0, 2.5, 3.0];
    let ys = [0.0, 0.8, 2.0];
    let mut worst: [f64; 4] = [0.0; 4];
    for (col, row) in [([1, 1, 1], [1, 1]), ([2, 3, 2], [3, 2]), ([4, 2, 3], [2, 4])] {
        let base = Mesh::tensor(
            &xs,
            &ys,
            &col,
            &row,
            |c| if c[0] < 1.0 { Subdomain::Cathode } else { Subdomain::Electrolyte },
            1.0,
        )
        .map_err(|e| e.to_string())?;
        let mut nodes = base.nodes.clone();
        nodes[6][0] += 0.21;
        nodes[6][1] -= 0.13;
        let mesh = Arc::new(Mesh::new(nodes, base.elements.clone(), 1.0).map_err(|e| e.to_string())?);
        if mesh.elements.len() > ORACLE_MAX_ELEMENTS {
            return Err("oracle mesh too large".into());
        }
        let s = FieldSpace::build(&mesh, Support::All, Arity::Scalar, &[]).map_err(|e| e.to_string())?;
        let rho = |x: [f64; 2]| 1.0 + 0.5 * x[0] * x[1];
        worst[0] = worst[0].max(relative_gap(&assemble_mass(&s, |c| rho(c.x())).to_dense(), &dense_mass(&s, rho)));
        let k = assemble_stiffness(&s, |c| rho(c.x())).map_err(|e| e.to_string())?;
        worst[1] = worst[1].max(relative_gap(&k.to_dense(), &dense_stiffness(&s, rho)));
        let solid = FieldSpace::build(&mesh, Support::Solid, Arity::Scalar, &[]).map_err(|e| e.to_string())?;
        let iq = InterfaceQuadrature::new(&mesh);
        let im = assemble_interface_mass(&solid, &iq, InterfaceSide::Solid, |_, _| 1.0);
        worst[2] = worst[2].max(relative_gap(&im.to_dense(), &dense_interface_mass(&solid, true)));
        let v = FieldSpace::build(&mesh, Support::All, Arity::Vector, &[]).map_err(|e| e.to_string())?;
        let el = assemble_elasticity(&v, |_| (0.7, 1.9));
        worst[3] = worst[3].max(relative_gap(&el.to_dense(), &dense_elasticity(&v, 0.7, 1.9)));
    }
    check(
        worst.iter().all(|w| *w <= ORACLE_TOL),
        format!(
            "mass {:.1e}, stiffness {:.1e}, interface mass {:.1e}, elasticity {:.1e} <= {ORACLE_TOL:e}",
            worst[0], worst[1], worst[2], worst[3]
        ),
    )
}

fn main() {
    let mut results: Vec<(&str, Outcome)> = vec![
        ("C1 temporal order", c1_temporal_order()),
        ("C2 spatial order", c2_spatial_order()),
        ("C3 equilibrium preservation", c3_equilibrium()),
        ("C4 interface mass bookkeeping", c4_bookkeeping()),
    ];
    match desk_runs() {
        Ok(desk) => {
            results.push(("C5 heat-source sign", c5_heat_sign(&desk)));
            results.push(("C6 material golden values", c6_golden()));
            results.push(("C7 initial cell voltage", c7_initial_voltage(&desk)));
            results.push(("C8 scenario behaviour", c8_qualitative(&desk)));
            results.push(("C9 model comparison pattern", c9_comparison(&desk)));
        }
        Err(e) => {
            for name in [
                "C5 heat-source sign",
                "C7 initial cell voltage",
                "C8 scenario behaviour",
                "C9 model comparison pattern",
            ] {
                results.push((name, Err(format!("desk runs failed: {e}"))));
            }
            results.push(("C6 material golden values", c6_golden()));
        }
    }
    results.push(("C10 matrix structure", c10_structure()));
    results.push(("C11 assembly oracle", c11_oracle()));
    results.sort_by_key(|(n, _)| n[1..].split(' ').next().unwrap().parse::<usize>().unwrap());
    let mut failed = 0;
    for (name, r) in &results {
        match r {
            Ok(d) => println!("PASS {name}: {d}"),
            Err(d) => {
                failed += 1;
                println!("FAIL {name}: {d}");
            }
        }
    }
    println!("{} of {} criteria pass", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
