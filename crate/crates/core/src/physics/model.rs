//! The coupled cell model: field spaces, cached operators and the stage
//! systems of the staggered scheme.

use std::sync::{Arc, Mutex};

use super::kinetics::{
    current_density, linearized_conductance, ohmic_heat, reaction_heat, Guard, GuardPolicy,
    HeatSign, InterfaceSample, Medium, Traces,
};
use super::state::{
    SimState, DISPLACEMENT, ELECTROLYTE_CONCENTRATION, ELECTROLYTE_POTENTIAL, SOLID_CONCENTRATION,
    SOLID_POTENTIAL, THETA,
};
use super::PhysicsError;
use crate::fem::{
    assemble_boundary_source, assemble_dilatation_source, assemble_elasticity,
    assemble_flux_source, assemble_interface_mass, assemble_interface_source, assemble_mass,
    assemble_source, assemble_stiffness, Arity, BoundaryQuadrature, Constraint, FieldSpace,
    InterfaceQuadrature, InterfaceSide, QpCtx, SolverOptions, SparseSym, SpdSolver, Support,
};
use crate::geometry::{BoundaryPart, Mesh, Subdomain};
use crate::materials::{
    diffusional_conductivity, hooke_plane_strain, hydrostatic_pressure, lame_from_e_nu,
    open_circuit_guarded, stress_diffusivity, Electrode, MaterialSet, StressState,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelMode {
    /// All six fields coupled.
    Full,
    /// Isothermal and strain-free: temperature and displacement are frozen.
    Electrochemical,
}

impl ModelMode {
    pub fn name(self) -> &'static str {
        match self {
            ModelMode::Full => "full",
            ModelMode::Electrochemical => "electrochemical",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    Temperature,
    SolidConcentration,
    ElectrolyteConcentration,
    SolidPotential,
    ElectrolytePotential,
    Displacement,
}

/// Model inputs in internal units.
#[derive(Debug, Clone)]
pub struct ModelParams {
    pub mats: MaterialSet,
    /// Internal value of one volt.
    pub volt: f64,
    pub mode: ModelMode,
    pub heat_sign: HeatSign,
    /// Include the diffusional conductivity term in the electrolyte current.
    pub diffusional: bool,
    pub guard: GuardPolicy,
    /// Initial state of charge of anode and cathode.
    pub soc_init: [f64; 2],
    pub applied_current: f64,
    pub solver: SolverOptions,
}

impl ModelParams {
    /// Defaults for an internal parameter set.
    pub fn new(mats: MaterialSet, volt: f64) -> Self {
        let guard = GuardPolicy::for_materials(&mats);
        ModelParams {
            mats,
            volt,
            mode: ModelMode::Full,
            heat_sign: HeatSign::Physical,
            diffusional: true,
            guard,
            soc_init: [0.5, 0.5],
            applied_current: 0.0,
            solver: SolverOptions::default(),
        }
    }
}

/// Interface diagnostics of the most recent stage-1 build.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StageReport {
    /// Integral of the reaction current over the whole interface.
    pub reaction_integral: f64,
    /// Same integral split by electrode (anode, cathode).
    pub reaction_by_electrode: [f64; 2],
    /// Smallest `eta * I_BV` over all interface points.
    pub min_heat_product: f64,
    pub clamp_events: usize,
}

pub fn electrode_of(s: Subdomain) -> Option<Electrode> {
    match s {
        Subdomain::Anode => Some(Electrode::Anode),
        Subdomain::Cathode => Some(Electrode::Cathode),
        Subdomain::Electrolyte => None,
    }
}

fn electrode_index(e: Electrode) -> usize {
    match e {
        Electrode::Anode => 0,
        Electrode::Cathode => 1,
    }
}

/// First error raised inside a parallel coefficient closure.
struct ErrorSlot(Mutex<Option<PhysicsError>>);

impl ErrorSlot {
    fn new() -> Self {
        ErrorSlot(Mutex::new(None))
    }

    fn keep(&self, r: Result<f64, PhysicsError>, fallback: f64) -> f64 {
        match r {
            Ok(v) => v,
            Err(e) => {
                let mut g = self.0.lock().expect("error slot poisoned");
                if g.is_none() {
                    *g = Some(e);
                }
                fallback
            }
        }
    }

    fn finish(self) -> Result<(), PhysicsError> {
        match self.0.into_inner().expect("error slot poisoned") {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }
}

struct StageOneCache {
    dt: f64,
    theta: SpdSolver,
    electrolyte: SpdSolver,
}

pub struct CellModel {
    pub params: ModelParams,
    mesh: Arc<Mesh>,
    theta: FieldSpace,
    c_s: FieldSpace,
    c_e: FieldSpace,
    phi_s: FieldSpace,
    phi_e: FieldSpace,
    u: FieldSpace,
    interface: InterfaceQuadrature,
    interface_electrode: Vec<Electrode>,
    collector: BoundaryQuadrature,
    mass_theta: SparseSym,
    stiff_theta: SparseSym,
    mass_cs: SparseSym,
    mass_ce: SparseSym,
    stiff_ce: SparseSym,
    stiff_phi_s: SparseSym,
    stiff_phi_e: SparseSym,
    stage1_cache: Option<StageOneCache>,
    mass_solvers: Option<[SpdSolver; 3]>,
    elastic: Option<SpdSolver>,
    /// Stress-free solid concentration per electrode.
    reference_concentration: [f64; 2],
    guard: Guard,
    last_report: StageReport,
    loaded: bool,
}

impl CellModel {
    pub fn new(mesh: Arc<Mesh>, params: ModelParams) -> Result<CellModel, PhysicsError> {
        params.mats.validate()?;
        params
            .guard
            .validate()
            .map_err(PhysicsError::OutOfRange)?;
        for s in params.soc_init {
            if !(s > 0.0 && s < 1.0) {
                return Err(PhysicsError::OutOfRange(format!(
                    "initial state of charge {s} outside (0, 1)"
                )));
            }
        }
        let theta = FieldSpace::build(&mesh, Support::All, Arity::Scalar, &[])?;
        let c_s = FieldSpace::build(&mesh, Support::Solid, Arity::Scalar, &[])?;
        let c_e = FieldSpace::build(&mesh, Support::Electrolyte, Arity::Scalar, &[])?;
        let phi_s = FieldSpace::build(
            &mesh,
            Support::Solid,
            Arity::Scalar,
            &[Constraint {
                part: BoundaryPart::CollectorMinus,
                component: None,
            }],
        )?;
        let phi_e = FieldSpace::build(&mesh, Support::Electrolyte, Arity::Scalar, &[])?;
        let slip = |part, c| Constraint {
            part,
            component: Some(c),
        };
        let u = FieldSpace::build(
            &mesh,
            Support::Solid,
            Arity::Vector,
            &[
                slip(BoundaryPart::CollectorMinus, 0),
                slip(BoundaryPart::CollectorPlus, 0),
                slip(BoundaryPart::Bottom, 1),
                slip(BoundaryPart::Top, 1),
            ],
        )?;
        let interface = InterfaceQuadrature::new(&mesh);
        if interface.edges.is_empty() {
            return Err(PhysicsError::Singular(
                "mesh has no electrode/electrolyte interface".into(),
            ));
        }
        let interface_electrode = interface
            .edges
            .iter()
            .map(|e| {
                electrode_of(mesh.elements[e.solid.element].subdomain)
                    .expect("interface edge without electrode element")
            })
            .collect();
        let collector = BoundaryQuadrature::new(&mesh, BoundaryPart::CollectorPlus);
        let m = &params.mats;
        let sub = |ctx: &QpCtx| mesh.elements[ctx.element].subdomain;
        let mass_theta = assemble_mass(&theta, |c| match electrode_of(sub(c)) {
            Some(e) => m.electrode(e).heat_capacity,
            None => m.electrolyte.heat_capacity,
        });
        let stiff_theta = assemble_stiffness(&theta, |c| match electrode_of(sub(c)) {
            Some(e) => m.electrode(e).thermal_conductivity,
            None => m.electrolyte.thermal_conductivity,
        })?;
        let mass_cs = assemble_mass(&c_s, |_| 1.0);
        let mass_ce = assemble_mass(&c_e, |_| 1.0);
        let stiff_ce = assemble_stiffness(&c_e, |_| m.electrolyte.diffusivity)?;
        let stiff_phi_s = assemble_stiffness(&phi_s, |c| {
            m.electrode(electrode_of(sub(c)).expect("solid element"))
                .electronic_conductivity
        })?;
        let stiff_phi_e = assemble_stiffness(&phi_e, |_| m.electrolyte.ionic_conductivity)?;
        let reference_concentration = [
            params.soc_init[0] * m.anode.max_concentration,
            params.soc_init[1] * m.cathode.max_concentration,
        ];
        let guard = Guard::new(params.guard);
        Ok(CellModel {
            params,
            mesh,
            theta,
            c_s,
            c_e,
            phi_s,
            phi_e,
            u,
            interface,
            interface_electrode,
            collector,
            mass_theta,
            stiff_theta,
            mass_cs,
            mass_ce,
            stiff_ce,
            stiff_phi_s,
            stiff_phi_e,
            stage1_cache: None,
            mass_solvers: None,
            elastic: None,
            reference_concentration,
            guard,
            last_report: StageReport::default(),
            loaded: true,
        })
    }

    pub fn mesh(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    pub fn space(&self, f: Field) -> &FieldSpace {
        match f {
            Field::Temperature => &self.theta,
            Field::SolidConcentration => &self.c_s,
            Field::ElectrolyteConcentration => &self.c_e,
            Field::SolidPotential => &self.phi_s,
            Field::ElectrolytePotential => &self.phi_e,
            Field::Displacement => &self.u,
        }
    }

    pub fn interface(&self) -> &InterfaceQuadrature {
        &self.interface
    }

    pub fn interface_electrode(&self) -> &[Electrode] {
        &self.interface_electrode
    }

    pub fn collector(&self) -> &BoundaryQuadrature {
        &self.collector
    }

    pub fn reference_concentration(&self) -> [f64; 2] {
        self.reference_concentration
    }

    pub fn last_report(&self) -> StageReport {
        self.last_report
    }

    pub fn set_applied_current(&mut self, current: f64) {
        self.params.applied_current = current;
    }

    /// With loading off the collector current is zero regardless of
    /// [`ModelParams::applied_current`].
    pub fn set_loaded(&mut self, loaded: bool) {
        self.loaded = loaded;
    }

    fn applied(&self) -> f64 {
        if self.loaded {
            self.params.applied_current
        } else {
            0.0
        }
    }

    /// Magnitude floors for relative update norms: reference temperature,
    /// saturation and initial electrolyte concentration, one volt, one
    /// micrometre.
    pub fn update_floors(&self) -> (Vec<f64>, Vec<f64>) {
        let m = &self.params.mats;
        let v = self.params.volt;
        (
            vec![
                m.reference_temperature,
                m.anode.max_concentration.max(m.cathode.max_concentration),
                m.initial_electrolyte_concentration,
            ],
            vec![v, v, 1e-6 / self.mesh.length_unit],
        )
    }

    /// Integral of a scalar field over the part of its support in `region`.
    pub fn integral(&self, field: Field, coeffs: &[f64], region: Support) -> f64 {
        self.space(field).integrate(coeffs, region).0
    }

    /// Heat-capacity weighted mean temperature.
    pub fn weighted_temperature(&self, theta: &[f64]) -> f64 {
        let ones = vec![1.0; theta.len()];
        let mt = self.mass_theta.matvec(theta);
        let m1 = self.mass_theta.matvec(&ones);
        mt.iter().sum::<f64>() / m1.iter().sum::<f64>()
    }

    /// Number of free DOFs per field, in [`Field`] order.
    pub fn dof_counts(&self) -> [usize; 6] {
        [
            self.theta.n_free(),
            self.c_s.n_free(),
            self.c_e.n_free(),
            self.phi_s.n_free(),
            self.phi_e.n_free(),
            self.u.n_free(),
        ]
    }

    fn fill_by_subdomain(space: &FieldSpace, mesh: &Mesh, f: impl Fn(Subdomain) -> f64) -> Vec<f64> {
        let mut v = vec![0.0; space.n_dofs()];
        for (l, &e) in space.elements().iter().enumerate() {
            let val = f(mesh.elements[e].subdomain);
            for n in space.element_nodes(l) {
                v[*n] = val;
            }
        }
        v
    }

    /// Electrochemical equilibrium at the configured state of charge: zero
    /// anode potential, uniform concentrations and zero overpotential.
    pub fn initial_state(&self) -> SimState {
        let m = &self.params.mats;
        let soc = self.params.soc_init;
        let ocp_a = open_circuit_guarded(Electrode::Anode, soc[0]) * self.params.volt;
        let ocp_c = open_circuit_guarded(Electrode::Cathode, soc[1]) * self.params.volt;
        let phi_e0 = -ocp_a;
        let theta = vec![m.reference_temperature; self.theta.n_dofs()];
        let rc = self.reference_concentration;
        let c_s = Self::fill_by_subdomain(&self.c_s, &self.mesh, |s| match s {
            Subdomain::Anode => rc[0],
            _ => rc[1],
        });
        let c_e = vec![m.initial_electrolyte_concentration; self.c_e.n_dofs()];
        let phi_s = Self::fill_by_subdomain(&self.phi_s, &self.mesh, |s| match s {
            Subdomain::Anode => 0.0,
            _ => phi_e0 + ocp_c,
        });
        let phi_e = vec![phi_e0; self.phi_e.n_dofs()];
        let u = vec![0.0; self.u.n_dofs()];
        SimState {
            t: 0.0,
            d: vec![theta, c_s, c_e],
            s: vec![phi_s, phi_e, u],
        }
    }

    /// Kinetics at every interface point, with concentrations and
    /// temperature from `d` and potentials from `s`.
    pub fn interface_samples(
        &self,
        d: &[Vec<f64>],
        s: &[Vec<f64>],
    ) -> Result<Vec<InterfaceSample>, PhysicsError> {
        let mut out = Vec::with_capacity(self.interface.n_points);
        for (ei, e) in self.interface.edges.iter().enumerate() {
            for q in 0..e.weights.len() {
                let raw = Traces {
                    c_s: e.solid.value(&self.c_s, &d[SOLID_CONCENTRATION], q),
                    c_e: e.electrolyte.value(&self.c_e, &d[ELECTROLYTE_CONCENTRATION], q),
                    phi_s: e.solid.value(&self.phi_s, &s[SOLID_POTENTIAL], q),
                    phi_e: e.electrolyte.value(&self.phi_e, &s[ELECTROLYTE_POTENTIAL], q),
                    theta: e.solid.value(&self.theta, &d[THETA], q),
                };
                out.push(InterfaceSample::evaluate(
                    self.interface_electrode[ei],
                    raw,
                    e.x[q],
                    &self.params.mats,
                    self.params.volt,
                    &self.guard,
                )?);
            }
        }
        Ok(out)
    }

    fn report(&self, samples: &[InterfaceSample]) -> StageReport {
        let mut r = StageReport {
            min_heat_product: f64::INFINITY,
            ..StageReport::default()
        };
        for (ei, e) in self.interface.edges.iter().enumerate() {
            let k = electrode_index(self.interface_electrode[ei]);
            for (q, w) in e.weights.iter().enumerate() {
                let s = &samples[e.offset + q];
                r.reaction_by_electrode[k] += w * s.reaction;
                r.min_heat_product = r.min_heat_product.min(s.overpotential * s.reaction);
            }
        }
        r.reaction_integral = r.reaction_by_electrode[0] + r.reaction_by_electrode[1];
        r
    }

    /// Stress at a volume quadrature point of a solid element.
    fn stress_at(&self, ctx: &QpCtx, d: &[Vec<f64>], u: &[f64]) -> StressState {
        let e = electrode_of(self.mesh.elements[ctx.element].subdomain).expect("solid element");
        let rec = self.params.mats.electrode(e);
        let (_, grad) = ctx.vector_field(&self.u, u);
        let (theta, _) = ctx.field(&self.theta, &d[THETA]);
        let (c, _) = ctx.field(&self.c_s, &d[SOLID_CONCENTRATION]);
        hooke_plane_strain(
            grad,
            theta - self.params.mats.reference_temperature,
            c - self.reference_concentration[electrode_index(e)],
            rec,
        )
    }

    /// Solid diffusion stiffness with coefficients from `mid`.
    fn solid_diffusion(&self, mid: &SimState) -> Result<SparseSym, PhysicsError> {
        let m = &self.params.mats;
        let full = self.params.mode == ModelMode::Full;
        let slot = ErrorSlot::new();
        let k = assemble_stiffness(&self.c_s, |ctx| {
            let e = electrode_of(self.mesh.elements[ctx.element].subdomain).expect("solid");
            let rec = m.electrode(e);
            let (c, _) = ctx.field(&self.c_s, &mid.d[SOLID_CONCENTRATION]);
            let c = slot.keep(self.guard.solid(c, rec.max_concentration, ctx.x()), rec.max_concentration * 0.5);
            let p = if full {
                hydrostatic_pressure(&self.stress_at(ctx, &mid.d, &mid.s[DISPLACEMENT]))
            } else {
                0.0
            };
            stress_diffusivity(c, p, rec, m)
        })?;
        slot.finish()?;
        Ok(k)
    }

    /// Ohmic plus reaction heat load for the temperature equation.
    fn heat_load(&self, mid: &SimState, samples: &[InterfaceSample]) -> Result<Vec<f64>, PhysicsError> {
        let m = &self.params.mats;
        let sign = self.params.heat_sign;
        let slot = ErrorSlot::new();
        let mut b = assemble_source(&self.theta, |ctx| {
            let (theta, _) = ctx.field(&self.theta, &mid.d[THETA]);
            match electrode_of(self.mesh.elements[ctx.element].subdomain) {
                Some(e) => {
                    let (_, g) = ctx.field(&self.phi_s, &mid.s[SOLID_POTENTIAL]);
                    let i = current_density(Medium::Solid(e), g, [0.0; 2], 0.0, theta, m, false);
                    slot.keep(i.map(|i| ohmic_heat(i, g, sign)), 0.0)
                }
                None => {
                    let (_, g) = ctx.field(&self.phi_e, &mid.s[ELECTROLYTE_POTENTIAL]);
                    let (c, gc) = ctx.field(&self.c_e, &mid.d[ELECTROLYTE_CONCENTRATION]);
                    let r = self.guard.electrolyte(c, ctx.x()).and_then(|c| {
                        current_density(Medium::Electrolyte, g, gc, c, theta, m, self.params.diffusional)
                    });
                    slot.keep(r.map(|i| ohmic_heat(i, g, sign)), 0.0)
                }
            }
        });
        slot.finish()?;
        let iface = assemble_interface_source(&self.theta, &self.interface, InterfaceSide::Solid, |ei, q| {
            let s = &samples[self.interface.edges[ei].offset + q];
            reaction_heat(s.overpotential, s.reaction, sign)
        });
        b.iter_mut().zip(iface).for_each(|(b, i)| *b += i);
        Ok(b)
    }

    fn reaction_loads(&self, samples: &[InterfaceSample]) -> (Vec<f64>, Vec<f64>) {
        let m = &self.params.mats;
        let f = m.faraday;
        let tp = m.electrolyte.transference_number;
        let at = |ei: usize, q: usize| samples[self.interface.edges[ei].offset + q].reaction;
        let solid = assemble_interface_source(&self.c_s, &self.interface, InterfaceSide::Solid, |ei, q| {
            -at(ei, q) / f
        });
        let electrolyte = assemble_interface_source(
            &self.c_e,
            &self.interface,
            InterfaceSide::Electrolyte,
            |ei, q| (1.0 - tp) * at(ei, q) / f,
        );
        (solid, electrolyte)
    }

    fn stage1_solvers(&mut self, dt: f64) -> Result<&StageOneCache, PhysicsError> {
        let stale = self.stage1_cache.as_ref().is_none_or(|c| c.dt != dt);
        if stale {
            let opts = self.params.solver;
            let theta = SpdSolver::new(self.mass_theta.plus(0.5 * dt, &self.stiff_theta), opts)?;
            let electrolyte = SpdSolver::new(self.mass_ce.plus(0.5 * dt, &self.stiff_ce), opts)?;
            self.stage1_cache = Some(StageOneCache {
                dt,
                theta,
                electrolyte,
            });
        }
        Ok(self.stage1_cache.as_ref().expect("cache filled"))
    }

    fn full(&self) -> bool {
        self.params.mode == ModelMode::Full
    }

    /// Stage 1: midpoint rule for the dynamic fields with coefficients frozen
    /// at `mid`. Solved in increment form
    /// `(M + dt/2 K) delta = dt (b - K d_prev)`.
    pub fn stage1(&mut self, prev: &SimState, mid: &SimState, dt: f64) -> Result<Vec<Vec<f64>>, PhysicsError> {
        self.guard.reset();
        let samples = self.interface_samples(&mid.d, &mid.s)?;
        let k_cs = self.solid_diffusion(mid)?;
        let heat = if self.full() {
            Some(self.heat_load(mid, &samples)?)
        } else {
            None
        };
        let (b_cs, b_ce) = self.reaction_loads(&samples);
        let mut report = self.report(&samples);
        let opts = self.params.solver;
        let increment = |k: &SparseSym, b: &[f64], d: &[f64]| -> Vec<f64> {
            let kd = k.matvec(d);
            b.iter().zip(kd).map(|(b, kd)| dt * (b - kd)).collect()
        };
        let theta_rhs = heat.map(|h| increment(&self.stiff_theta, &h, &prev.d[THETA]));
        let ce_rhs = increment(&self.stiff_ce, &b_ce, &prev.d[ELECTROLYTE_CONCENTRATION]);
        let cs_rhs = increment(&k_cs, &b_cs, &prev.d[SOLID_CONCENTRATION]);
        let cs_lhs = SpdSolver::new(self.mass_cs.plus(0.5 * dt, &k_cs), opts)?;
        let d_cs = cs_lhs.solve(&cs_rhs)?;
        let cache = self.stage1_solvers(dt)?;
        let d_theta = match theta_rhs {
            Some(r) => Some(cache.theta.solve(&r)?),
            None => None,
        };
        let d_ce = cache.electrolyte.solve(&ce_rhs)?;
        let add = |a: &[f64], b: &[f64]| -> Vec<f64> { a.iter().zip(b).map(|(a, b)| a + b).collect() };
        let theta = match d_theta {
            Some(dth) => add(&prev.d[THETA], &dth),
            None => prev.d[THETA].clone(),
        };
        report.clamp_events = self.guard.reset();
        self.last_report = report;
        Ok(vec![
            theta,
            add(&prev.d[SOLID_CONCENTRATION], &d_cs),
            add(&prev.d[ELECTROLYTE_CONCENTRATION], &d_ce),
        ])
    }

    /// Time derivative of the dynamic fields, `M^-1 (b - K d)`.
    pub fn rate(&mut self, state: &SimState) -> Result<Vec<Vec<f64>>, PhysicsError> {
        if self.mass_solvers.is_none() {
            let o = self.params.solver;
            self.mass_solvers = Some([
                SpdSolver::new(self.mass_theta.clone(), o)?,
                SpdSolver::new(self.mass_cs.clone(), o)?,
                SpdSolver::new(self.mass_ce.clone(), o)?,
            ]);
        }
        let samples = self.interface_samples(&state.d, &state.s)?;
        let k_cs = self.solid_diffusion(state)?;
        let (b_cs, b_ce) = self.reaction_loads(&samples);
        let residual = |k: &SparseSym, b: &[f64], d: &[f64]| -> Vec<f64> {
            let kd = k.matvec(d);
            b.iter().zip(kd).map(|(b, kd)| b - kd).collect()
        };
        let theta = if self.full() {
            let h = self.heat_load(state, &samples)?;
            Some(residual(&self.stiff_theta, &h, &state.d[THETA]))
        } else {
            None
        };
        let r_cs = residual(&k_cs, &b_cs, &state.d[SOLID_CONCENTRATION]);
        let r_ce = residual(&self.stiff_ce, &b_ce, &state.d[ELECTROLYTE_CONCENTRATION]);
        let ms = self.mass_solvers.as_ref().expect("mass solvers built");
        let theta = match theta {
            Some(r) => ms[0].solve(&r)?,
            None => vec![0.0; state.d[THETA].len()],
        };
        self.guard.reset();
        Ok(vec![theta, ms[1].solve(&r_cs)?, ms[2].solve(&r_ce)?])
    }

    /// Solid potential system: bulk conduction plus the linearised interface
    /// reaction, with the electrolyte potential taken from `partner`.
    pub fn solid_potential_system(
        &self,
        samples: &[InterfaceSample],
        phi_e: &[f64],
    ) -> (SparseSym, Vec<f64>) {
        let m = &self.params.mats;
        let iq = &self.interface;
        let conductance = |ei: usize, q: usize| {
            let s = &samples[iq.edges[ei].offset + q];
            linearized_conductance(s.exchange, s.theta, m)
        };
        let a = self.stiff_phi_s.plus(
            1.0,
            &assemble_interface_mass(&self.phi_s, iq, InterfaceSide::Solid, conductance),
        );
        let mut b = assemble_interface_source(&self.phi_s, iq, InterfaceSide::Solid, |ei, q| {
            let e = &iq.edges[ei];
            let pe = e.electrolyte.value(&self.phi_e, phi_e, q);
            conductance(ei, q) * (pe + samples[e.offset + q].open_circuit)
        });
        let i_app = self.applied();
        let collector = assemble_boundary_source(&self.phi_s, &self.collector, |_| i_app);
        b.iter_mut().zip(collector).for_each(|(b, c)| *b -= c);
        (a, b)
    }

    /// Electrolyte potential system with the solid potential from `partner`.
    pub fn electrolyte_potential_system(
        &self,
        d: &[Vec<f64>],
        samples: &[InterfaceSample],
        phi_s: &[f64],
    ) -> Result<(SparseSym, Vec<f64>), PhysicsError> {
        let m = &self.params.mats;
        let iq = &self.interface;
        let conductance = |ei: usize, q: usize| {
            let s = &samples[iq.edges[ei].offset + q];
            linearized_conductance(s.exchange, s.theta, m)
        };
        let a = self.stiff_phi_e.plus(
            1.0,
            &assemble_interface_mass(&self.phi_e, iq, InterfaceSide::Electrolyte, conductance),
        );
        let mut b = assemble_interface_source(&self.phi_e, iq, InterfaceSide::Electrolyte, |ei, q| {
            let e = &iq.edges[ei];
            let ps = e.solid.value(&self.phi_s, phi_s, q);
            conductance(ei, q) * (ps - samples[e.offset + q].open_circuit)
        });
        if self.params.diffusional {
            let slot = ErrorSlot::new();
            let flux = assemble_flux_source(&self.phi_e, |ctx| {
                let (theta, _) = ctx.field(&self.theta, &d[THETA]);
                let (c, g) = ctx.field(&self.c_e, &d[ELECTROLYTE_CONCENTRATION]);
                let c = slot.keep(self.guard.electrolyte(c, ctx.x()), 1.0);
                let kd = diffusional_conductivity(theta, m);
                [kd * g[0] / c, kd * g[1] / c]
            });
            slot.finish()?;
            b.iter_mut().zip(flux).for_each(|(b, f)| *b -= f);
        }
        Ok((a, b))
    }

    fn elastic_solver(&mut self) -> Result<&SpdSolver, PhysicsError> {
        if self.elastic.is_none() {
            let m = &self.params.mats;
            let mesh = &self.mesh;
            let k = assemble_elasticity(&self.u, |ctx| {
                let rec = m.electrode(electrode_of(mesh.elements[ctx.element].subdomain).expect("solid"));
                lame_from_e_nu(rec.youngs_modulus, rec.poisson_ratio)
            });
            let zero = vec![0.0; self.u.n_dofs()];
            let (kf, _) = self.u.constrain(&k, &zero);
            self.elastic = Some(SpdSolver::new(kf, self.params.solver)?);
        }
        Ok(self.elastic.as_ref().expect("elastic solver built"))
    }

    /// Thermal and chemical eigenstrain load `int 3K (alpha dtheta + omega dc) div v`.
    pub fn elastic_load(&self, d: &[Vec<f64>]) -> Vec<f64> {
        let m = &self.params.mats;
        assemble_dilatation_source(&self.u, |ctx| {
            let e = electrode_of(self.mesh.elements[ctx.element].subdomain).expect("solid");
            let rec = m.electrode(e);
            let (_, bulk) = lame_from_e_nu(rec.youngs_modulus, rec.poisson_ratio);
            let (theta, _) = ctx.field(&self.theta, &d[THETA]);
            let (c, _) = ctx.field(&self.c_s, &d[SOLID_CONCENTRATION]);
            let dc = c - self.reference_concentration[electrode_index(e)];
            3.0 * bulk
                * (rec.thermal_expansion * (theta - m.reference_temperature) + rec.chemical_expansion * dc)
        })
    }

    /// Stage 2: potentials from the new dynamic fields `d` (each potential
    /// against the other's value in `partner`), then the displacement.
    pub fn stage2(&mut self, d: &[Vec<f64>], partner: &[Vec<f64>]) -> Result<Vec<Vec<f64>>, PhysicsError> {
        let samples = self.interface_samples(d, partner)?;
        let opts = self.params.solver;
        let (a, b) = self.solid_potential_system(&samples, &partner[ELECTROLYTE_POTENTIAL]);
        let (af, bf) = self.phi_s.constrain(&a, &b);
        let phi_s = self.phi_s.expand(&SpdSolver::new(af, opts)?.solve(&bf)?);
        let (a, b) = self.electrolyte_potential_system(d, &samples, &partner[SOLID_POTENTIAL])?;
        let phi_e = SpdSolver::new(a, opts)?.solve(&b)?;
        let u = if self.full() {
            let rhs = self.u.restrict(&self.elastic_load(d));
            let x = self.elastic_solver()?.solve(&rhs)?;
            self.u.expand(&x)
        } else {
            vec![0.0; self.u.n_dofs()]
        };
        self.guard.reset();
        Ok(vec![phi_s, phi_e, u])
    }

    /// Stress at every volume quadrature point of the solid, with positions.
    /// Zero in electrochemical mode.
    pub fn stress_samples(&self, state: &SimState) -> Vec<(usize, [f64; 2], StressState)> {
        let mut out = Vec::new();
        for l in 0..self.u.elements().len() {
            let e = self.u.elements()[l];
            for (q, g) in self.u.qp_geometry(l).iter().enumerate() {
                let ctx = QpCtx {
                    element: e,
                    local: l,
                    q,
                    geo: g,
                };
                let s = if self.full() {
                    self.stress_at(&ctx, &state.d, &state.s[DISPLACEMENT])
                } else {
                    StressState::default()
                };
                out.push((e, g.x, s));
            }
        }
        out
    }

    /// Stress at a reference point of a solid element (for field output).
    pub fn stress_at_point(&self, state: &SimState, element: usize, r: [f64; 2]) -> StressState {
        if !self.full() {
            return StressState::default();
        }
        let Some(e) = electrode_of(self.mesh.elements[element].subdomain) else {
            return StressState::default();
        };
        let rec = self.params.mats.electrode(e);
        let (_, grad) = self.u.eval_vec(&state.s[DISPLACEMENT], element, r);
        let (theta, _) = self.theta.eval(&state.d[THETA], element, r);
        let (c, _) = self.c_s.eval(&state.d[SOLID_CONCENTRATION], element, r);
        hooke_plane_strain(
            grad,
            theta - self.params.mats.reference_temperature,
            c - self.reference_concentration[electrode_index(e)],
            rec,
        )
    }

    /// Every system matrix of one step at `state`, after elimination of
    /// constrained DOFs, labelled by equation.
    pub fn system_matrices(&mut self, state: &SimState, dt: f64) -> Result<Vec<(&'static str, SparseSym)>, PhysicsError> {
        let samples = self.interface_samples(&state.d, &state.s)?;
        let k_cs = self.solid_diffusion(state)?;
        let (a_s, b_s) = self.solid_potential_system(&samples, &state.s[ELECTROLYTE_POTENTIAL]);
        let (a_s, _) = self.phi_s.constrain(&a_s, &b_s);
        let (a_e, _) = self.electrolyte_potential_system(&state.d, &samples, &state.s[SOLID_POTENTIAL])?;
        let mut out = vec![
            ("temperature", self.mass_theta.plus(0.5 * dt, &self.stiff_theta)),
            ("solid concentration", self.mass_cs.plus(0.5 * dt, &k_cs)),
            ("electrolyte concentration", self.mass_ce.plus(0.5 * dt, &self.stiff_ce)),
            ("solid potential", a_s),
            ("electrolyte potential", a_e),
        ];
        let k_u = self.elastic_solver()?.matrix().clone();
        out.push(("displacement", k_u));
        self.guard.reset();
        Ok(out)
    }
}
