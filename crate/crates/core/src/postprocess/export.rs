//! CSV time series, legacy VTK snapshots and comparison tables.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use super::{ComparisonRow, TimeSeriesRecord};
use crate::fem::basis::node_position;
use crate::geometry::{Mesh, Subdomain};
use crate::materials::von_mises;
use crate::physics::{CellModel, Field, SimState};
use crate::units::{Dim, ScaleSet};
use crate::{Error, Result};

pub const CSV_HEADER: &str =
    "t_s,V_out_V,phi_e_avg_V,soc_anode,soc_cathode,temp_K,u_max_m,vm_max_Pa,clamp_events";

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

fn row(r: &TimeSeriesRecord) -> String {
    format!(
        "{},{},{},{},{},{},{:e},{:e},{}",
        r.t, r.v_out, r.phi_e_avg, r.soc_anode, r.soc_cathode, r.temperature, r.u_max, r.vm_max, r.clamp_events
    )
}

/// Appends records to a CSV file as they are produced, flushing each row so
/// that a failed run leaves its completed prefix on disk.
pub struct TimeSeriesWriter {
    path: PathBuf,
    out: BufWriter<File>,
}

impl TimeSeriesWriter {
    pub fn create(path: impl Into<PathBuf>) -> Result<Self> {
        let path = path.into();
        let mut out = create(&path)?;
        writeln!(out, "{CSV_HEADER}").map_err(|e| Error::io(&path, e))?;
        out.flush().map_err(|e| Error::io(&path, e))?;
        Ok(TimeSeriesWriter { path, out })
    }

    pub fn append(&mut self, r: &TimeSeriesRecord) -> Result<()> {
        writeln!(self.out, "{}", row(r))
            .and_then(|_| self.out.flush())
            .map_err(|e| Error::io(&self.path, e))
    }
}

pub fn export_timeseries_csv(records: &[TimeSeriesRecord], path: impl AsRef<Path>) -> Result<()> {
    let mut w = TimeSeriesWriter::create(path.as_ref())?;
    records.iter().try_for_each(|r| w.append(r))
}

pub fn read_timeseries_csv(path: impl AsRef<Path>) -> Result<Vec<TimeSeriesRecord>> {
    let path = path.as_ref();
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (n, line) in BufReader::new(f).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if n == 0 {
            if line != CSV_HEADER {
                return Err(Error::Postprocess(format!("{}: unexpected header", path.display())));
            }
            continue;
        }
        let bad = || Error::Postprocess(format!("{}: malformed row {}", path.display(), n + 1));
        let v: Vec<&str> = line.split(',').collect();
        if v.len() != 9 {
            return Err(bad());
        }
        let f = |i: usize| v[i].parse::<f64>().map_err(|_| bad());
        out.push(TimeSeriesRecord {
            t: f(0)?,
            v_out: f(1)?,
            phi_e_avg: f(2)?,
            soc_anode: f(3)?,
            soc_cathode: f(4)?,
            temperature: f(5)?,
            u_max: f(6)?,
            vm_max: f(7)?,
            clamp_events: v[8].parse().map_err(|_| bad())?,
        });
    }
    Ok(out)
}

fn write_grid(
    out: &mut impl Write,
    title: &str,
    points: &[[f64; 2]],
    cells: &[[usize; 4]],
) -> std::io::Result<()> {
    writeln!(out, "# vtk DataFile Version 3.0")?;
    writeln!(out, "{title}")?;
    writeln!(out, "ASCII")?;
    writeln!(out, "DATASET UNSTRUCTURED_GRID")?;
    writeln!(out, "POINTS {} double", points.len())?;
    for p in points {
        writeln!(out, "{} {} 0", p[0], p[1])?;
    }
    writeln!(out, "CELLS {} {}", cells.len(), cells.len() * 5)?;
    for c in cells {
        writeln!(out, "4 {} {} {} {}", c[0], c[1], c[2], c[3])?;
    }
    writeln!(out, "CELL_TYPES {}", cells.len())?;
    for _ in cells {
        writeln!(out, "9")?;
    }
    Ok(())
}

fn write_scalars(out: &mut impl Write, name: &str, v: &[f64]) -> std::io::Result<()> {
    writeln!(out, "SCALARS {name} double 1")?;
    writeln!(out, "LOOKUP_TABLE default")?;
    for x in v {
        writeln!(out, "{x}")?;
    }
    Ok(())
}

/// Snapshot with each element split into `px * py` linear quads on its
/// Gauss-Lobatto nodes. Fields are in SI units and zero outside their support.
pub fn export_vtk(
    model: &CellModel,
    state: &SimState,
    scales: &ScaleSet,
    path: impl AsRef<Path>,
) -> Result<()> {
    let path = path.as_ref();
    let mesh = model.mesh();
    let len = mesh.length_unit;
    let volt = model.params.volt;
    let conc = scales.unit(Dim::CONCENTRATION);
    let temp = scales.unit(Dim::TEMPERATURE);
    let pa = scales.unit(Dim::PRESSURE);
    let scalar_fields = [
        ("phi_s", Field::SolidPotential, 0usize, 1.0 / volt),
        ("phi_e", Field::ElectrolytePotential, 1, 1.0 / volt),
        ("c_s", Field::SolidConcentration, 1, conc),
        ("c_e", Field::ElectrolyteConcentration, 2, conc),
        ("theta", Field::Temperature, 0, temp),
    ];
    let mut points = Vec::new();
    let mut cells = Vec::new();
    let mut scalars = vec![Vec::new(); scalar_fields.len()];
    let mut u = Vec::new();
    let mut vm = Vec::new();
    let u_space = model.space(Field::Displacement);
    for (e, el) in mesh.elements.iter().enumerate() {
        let [px, py] = el.degree;
        let base = points.len();
        for k in 0..(px + 1) * (py + 1) {
            let r = node_position(el.degree, k);
            let (x, _) = mesh.map(e, r);
            points.push([x[0] * len, x[1] * len]);
            for (i, (_, f, slot, unit)) in scalar_fields.iter().enumerate() {
                let space = model.space(*f);
                let coeffs = if matches!(f, Field::SolidPotential | Field::ElectrolytePotential) {
                    &state.s[*slot]
                } else {
                    &state.d[*slot]
                };
                let v = space
                    .local_index(e)
                    .map_or(0.0, |l| coeffs[space.element_nodes(l)[k]] * unit);
                scalars[i].push(v);
            }
            match u_space.local_index(e) {
                Some(l) => {
                    let n = u_space.element_nodes(l)[k];
                    let c = &state.s[2];
                    u.push([c[2 * n] * len, c[2 * n + 1] * len]);
                    vm.push(von_mises(&model.stress_at_point(state, e, r)) * pa);
                }
                None => {
                    u.push([0.0; 2]);
                    vm.push(0.0);
                }
            }
        }
        let id = |a: usize, b: usize| base + b * (px + 1) + a;
        for b in 0..py {
            for a in 0..px {
                cells.push([id(a, b), id(a + 1, b), id(a + 1, b + 1), id(a, b + 1)]);
            }
        }
    }
    let mut out = create(path)?;
    let write = |out: &mut BufWriter<File>| -> std::io::Result<()> {
        write_grid(out, &format!("voltacell snapshot t = {} s", state.t * scales.time), &points, &cells)?;
        writeln!(out, "POINT_DATA {}", points.len())?;
        for ((name, ..), v) in scalar_fields.iter().zip(&scalars) {
            write_scalars(out, name, v)?;
        }
        writeln!(out, "VECTORS u double")?;
        for v in &u {
            writeln!(out, "{} {} 0", v[0], v[1])?;
        }
        write_scalars(out, "von_mises", &vm)?;
        out.flush()
    };
    write(&mut out).map_err(|e| Error::io(path, e))
}

/// Mesh with subdomain and degree cell data (lengths in metres).
pub fn export_mesh_vtk(mesh: &Mesh, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let len = mesh.length_unit;
    let points: Vec<[f64; 2]> = mesh.nodes.iter().map(|p| [p[0] * len, p[1] * len]).collect();
    let cells: Vec<[usize; 4]> = mesh.elements.iter().map(|e| e.vertices).collect();
    let mut out = create(path)?;
    let write = |out: &mut BufWriter<File>| -> std::io::Result<()> {
        write_grid(out, "voltacell mesh", &points, &cells)?;
        writeln!(out, "CELL_DATA {}", cells.len())?;
        writeln!(out, "SCALARS subdomain int 1")?;
        writeln!(out, "LOOKUP_TABLE default")?;
        for e in &mesh.elements {
            let id = match e.subdomain {
                Subdomain::Anode => 0,
                Subdomain::Cathode => 1,
                Subdomain::Electrolyte => 2,
            };
            writeln!(out, "{id}")?;
        }
        for (k, name) in ["degree_xi", "degree_eta"].iter().enumerate() {
            writeln!(out, "SCALARS {name} int 1")?;
            writeln!(out, "LOOKUP_TABLE default")?;
            for e in &mesh.elements {
                writeln!(out, "{}", e.degree[k])?;
            }
        }
        out.flush()
    };
    write(&mut out).map_err(|e| Error::io(path, e))
}

pub fn write_comparison_csv(rows: &[ComparisonRow], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = create(path)?;
    let mut write = || -> std::io::Result<()> {
        writeln!(out, "scenario,model,p_avg_w_per_dm3,rel_diff")?;
        for r in rows {
            writeln!(out, "{},{},{},{}", r.scenario, r.model, r.p_avg_w_per_dm3, r.rel_diff)?;
        }
        out.flush()
    };
    write().map_err(|e| Error::io(path, e))
}

pub fn format_comparison(rows: &[ComparisonRow]) -> String {
    let mut s = format!(
        "{:<16} {:<16} {:>16} {:>12}\n",
        "scenario", "model", "P_avg [W/dm3]", "rel. diff"
    );
    for r in rows {
        s.push_str(&format!(
            "{:<16} {:<16} {:>16.6} {:>11.4}%\n",
            r.scenario,
            r.model,
            r.p_avg_w_per_dm3,
            100.0 * r.rel_diff
        ));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_series_is_header_only() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("ts.csv");
        export_timeseries_csv(&[], &p).unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), format!("{CSV_HEADER}\n"));
    }
}
