use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use voltacell::config::{ScenarioConfig, PRESETS};
use voltacell::geometry::{generate_layered_mesh, validate_mesh, DomainGeometry, MeshSpec};
use voltacell::integrator::{run, StepConfig};
use voltacell::physics::ModelMode;
use voltacell::postprocess::{
    compare_models, export_mesh_vtk, format_comparison, write_comparison_csv,
};
use voltacell::verification::{spatial_study, temporal_study};

#[derive(Parser, Debug)]
#[command(name = "voltacell", version, about = "Coupled hp-FEM simulator for interdigitated Li-ion cells")]
#[command(arg_required_else_help = true)]
struct Cli {
    /// Worker threads for element assembly (default: all cores).
    #[arg(long, global = true, env = "VOLTACELL_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Debug, Clone)]
struct ScenarioArgs {
    /// Preset name or path to a scenario file.
    #[arg(long)]
    scenario: String,
    /// Override a scenario key, e.g. `--set dt=6`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Use the coarse quick-look mesh.
    #[arg(long)]
    coarse: bool,
    /// Time step in seconds.
    #[arg(long)]
    dt: Option<f64>,
    /// End time in seconds.
    #[arg(long = "tend")]
    t_end: Option<f64>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Model {
    Full,
    Electrochemical,
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq)]
enum StudyKind {
    Temporal,
    Spatial,
    Both,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one scenario and write its outputs.
    Run {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long, value_enum, default_value = "full")]
        model: Model,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        /// Skip VTK snapshots.
        #[arg(long)]
        no_vtk: bool,
    },
    /// Run full and electrochemical models and tabulate average power.
    Compare {
        /// Preset names or scenario files; all presets when omitted.
        #[arg(long = "scenario", num_args = 1..)]
        scenarios: Vec<String>,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
        #[arg(long)]
        coarse: bool,
        #[arg(long, default_value = "compare")]
        out: PathBuf,
    },
    /// Temporal and spatial convergence studies.
    Convergence {
        #[arg(long = "case", value_enum, default_value = "both")]
        kind: StudyKind,
        /// Directory for the study tables.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate the mesh of a scenario, report its quality and write VTK.
    Mesh {
        /// Preset name or path to a scenario file.
        #[arg(long = "spec")]
        spec: String,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
        #[arg(long)]
        coarse: bool,
        #[arg(long)]
        out: PathBuf,
        /// Largest accepted element aspect ratio.
        #[arg(long, default_value_t = 1000.0)]
        aspect_bound: f64,
    },
}

fn mkdir(d: &Path) -> voltacell::Result<()> {
    std::fs::create_dir_all(d).map_err(|e| voltacell::Error::Io {
        path: d.to_path_buf(),
        source: e,
    })
}

fn write(p: &Path, text: &str) -> voltacell::Result<()> {
    std::fs::write(p, text).map_err(|e| voltacell::Error::Io {
        path: p.to_path_buf(),
        source: e,
    })
}

fn load(spec: &str, set: &[String], coarse: bool, dt: Option<f64>, t_end: Option<f64>) -> voltacell::Result<ScenarioConfig> {
    let mut c = ScenarioConfig::resolve(spec)?;
    if coarse {
        c.mesh = MeshSpec::coarse();
    }
    if let Some(dt) = dt {
        c.dt = dt;
    }
    if let Some(t) = t_end {
        c.t_end = t;
    }
    if set.is_empty() {
        c.validate()?;
        return Ok(c);
    }
    Ok(ScenarioConfig::parse_str(&set.join("\n"), c)?)
}

fn load_args(a: &ScenarioArgs) -> voltacell::Result<ScenarioConfig> {
    load(&a.scenario, &a.set, a.coarse, a.dt, a.t_end)
}

fn execute(cli: Cli) -> voltacell::Result<()> {
    match cli.command {
        Command::Run {
            scenario,
            model,
            out,
            no_vtk,
        } => {
            let mut c = load_args(&scenario)?;
            c.mode = match model {
                Model::Full => ModelMode::Full,
                Model::Electrochemical => ModelMode::Electrochemical,
            };
            c.output.dir = Some(out.clone());
            c.output.write_vtk &= !no_vtk;
            let r = run(&c)?;
            let last = r.records.last().expect("a run has at least one record");
            println!("scenario        {}", c.name);
            println!("model           {}", c.mode.name());
            println!("elements        {}", r.elements);
            println!("dofs            {:?}", r.dofs);
            println!("final V_out     {:.6} V", last.v_out);
            println!("final T         {:.4} C", last.temperature_celsius());
            println!("max von Mises   {:.4e} Pa", last.vm_max);
            println!("P_avg           {:.6} W/dm3", r.power.w_per_dm3());
            println!("outputs         {}", out.display());
        }
        Command::Compare {
            scenarios,
            set,
            coarse,
            out,
        } => {
            let names: Vec<String> = if scenarios.is_empty() {
                PRESETS.iter().map(|s| s.to_string()).collect()
            } else {
                scenarios
            };
            let mut rows = Vec::new();
            for n in &names {
                let mut c = load(n, &set, coarse, None, None)?;
                c.output.dir = Some(out.join(&c.name));
                rows.extend(compare_models(&c)?);
            }
            mkdir(&out)?;
            write_comparison_csv(&rows, out.join("comparison.csv"))?;
            print!("{}", format_comparison(&rows));
        }
        Command::Convergence { kind, out } => {
            let mut studies = Vec::new();
            if kind != StudyKind::Spatial {
                studies.push(("temporal".to_string(), temporal_study(&[8.0, 4.0, 2.0, 1.0], 64.0, &StepConfig::default())?));
            }
            if kind != StudyKind::Temporal {
                for (p, s) in [1, 2, 3].into_iter().zip(spatial_study(&[1, 2, 3], &[2, 4, 8, 16])?) {
                    studies.push((format!("spatial_p{p}"), s));
                }
            }
            if let Some(d) = &out {
                mkdir(d)?;
            }
            for (name, s) in &studies {
                println!("{}", s.table());
                if let Some(d) = &out {
                    write(&d.join(format!("{name}.csv")), &s.csv())?;
                }
            }
        }
        Command::Mesh {
            spec,
            set,
            coarse,
            out,
            aspect_bound,
        } => {
            let c = load(&spec, &set, coarse, None, None)?;
            let geom = DomainGeometry::interdigitated(c.dims)?;
            let mesh = generate_layered_mesh(&geom, &c.mesh, c.scales.length)?;
            let q = validate_mesh(&mesh, aspect_bound);
            println!("elements        {}", q.elements);
            println!("interface edges {}", q.interface_edges);
            println!("boundary edges  {}", q.boundary_edges);
            println!("max aspect      {:.3}", q.max_aspect);
            println!("min jacobian    {:.4e}", q.min_jacobian);
            for v in &q.violations {
                println!("violation       {v}");
            }
            mkdir(&out)?;
            let path = out.join("mesh.vtk");
            export_mesh_vtk(&mesh, &path)?;
            println!("written         {}", path.display());
            if !q.is_valid() {
                return Err(voltacell::Error::Postprocess("mesh quality check failed".into()));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: thread pool: {e}");
            return ExitCode::FAILURE;
        }
    }
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
