use super::{DomainGeometry, GeometryError, Mesh};

/// Layered anisotropic mesh controls.
#[derive(Debug, Clone, PartialEq)]
pub struct MeshSpec {
    /// Target element size away from the interface (m).
    pub base_size: f64,
    /// Geometric layers inserted in the element touching each interface line.
    pub layers: usize,
    /// Thickness ratio between consecutive layers, in (0, 1).
    pub grading_ratio: f64,
    pub degree: usize,
    /// Degree across the interface in the finest layer.
    pub normal_degree: usize,
}

impl Default for MeshSpec {
    fn default() -> Self {
        MeshSpec {
            base_size: 30e-6,
            layers: 4,
            grading_ratio: 0.5,
            degree: 3,
            normal_degree: 4,
        }
    }
}

impl MeshSpec {
    /// A coarse mesh for quick runs.
    pub fn coarse() -> Self {
        MeshSpec {
            base_size: 200e-6,
            layers: 1,
            grading_ratio: 0.5,
            degree: 2,
            normal_degree: 2,
        }
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        let mut bad = Vec::new();
        if !(self.base_size.is_finite() && self.base_size > 0.0) {
            bad.push(format!("base_size = {} must be positive", self.base_size));
        }
        if !(self.grading_ratio > 0.0 && self.grading_ratio < 1.0) {
            bad.push(format!("grading_ratio = {} must lie in (0, 1)", self.grading_ratio));
        }
        if self.degree < 1 {
            bad.push("degree must be at least 1".into());
        }
        if self.normal_degree < 1 {
            bad.push("normal_degree must be at least 1".into());
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(GeometryError::InvalidSpec(bad))
        }
    }
}

/// One axis of the tensor grid: node coordinates and, per cell, whether it is
/// the finest layer touching an interface line.
struct Axis {
    nodes: Vec<f64>,
    finest: Vec<bool>,
}

fn grade_axis(breaks: &[f64], interfaces: &[f64], spec: &MeshSpec) -> Result<Axis, GeometryError> {
    let scale = breaks.last().copied().unwrap_or(1.0);
    let is_iface = |x: f64| interfaces.iter().any(|&y| (x - y).abs() <= 1e-12 * scale);
    let mut nodes = vec![breaks[0]];
    let mut finest = Vec::new();
    for seg in breaks.windows(2) {
        let (a, b) = (seg[0], seg[1]);
        let len = b - a;
        let left = spec.layers > 0 && is_iface(a);
        let right = spec.layers > 0 && is_iface(b);
        let mut n = ((len / spec.base_size) - 1e-9).ceil().max(1.0) as usize;
        if left && right && n < 2 {
            n = 2;
        }
        let h = len / n as f64;
        let thinnest = h * spec.grading_ratio.powi(spec.layers as i32);
        if (left || right) && thinnest < 1e-6 * len {
            return Err(GeometryError::LayerBudget {
                thickness: thinnest,
                interval: len,
            });
        }
        // Layer thicknesses ordered from the interior toward the interface.
        let r = spec.grading_ratio;
        let mut layers: Vec<f64> = (0..spec.layers)
            .map(|k| h * r.powi(k as i32) * (1.0 - r))
            .collect();
        layers.push(h * r.powi(spec.layers as i32));
        let mut cells: Vec<(f64, bool)> = Vec::new();
        if left {
            for (k, t) in layers.iter().enumerate().rev() {
                cells.push((*t, k == spec.layers));
            }
        } else {
            cells.push((h, false));
        }
        for _ in 1..n.saturating_sub(1) {
            cells.push((h, false));
        }
        if n > 1 {
            if right {
                for (k, t) in layers.iter().enumerate() {
                    cells.push((*t, k == spec.layers));
                }
            } else {
                cells.push((h, false));
            }
        } else if right {
            // single cell graded on the right only
            cells.clear();
            for (k, t) in layers.iter().enumerate() {
                cells.push((*t, k == spec.layers));
            }
        }
        let mut x = a;
        let last = cells.len() - 1;
        for (i, (t, f)) in cells.into_iter().enumerate() {
            x = if i == last { b } else { x + t };
            nodes.push(x);
            finest.push(f);
        }
    }
    Ok(Axis { nodes, finest })
}

/// Tensor-product mesh aligned with every corner of the layout, graded
/// geometrically toward the interface lines.
pub fn generate_layered_mesh(
    geom: &DomainGeometry,
    spec: &MeshSpec,
    length_unit: f64,
) -> Result<Mesh, GeometryError> {
    spec.validate()?;
    let (bx, by) = geom.breakpoints();
    let (ix, iy) = geom.interface_lines();
    let ax = grade_axis(&bx, &ix, spec)?;
    let ay = grade_axis(&by, &iy, spec)?;
    let pick = |f: &bool| if *f { spec.normal_degree } else { spec.degree };
    let px: Vec<usize> = ax.finest.iter().map(pick).collect();
    let py: Vec<usize> = ay.finest.iter().map(pick).collect();
    let xs: Vec<f64> = ax.nodes.iter().map(|x| x / length_unit).collect();
    let ys: Vec<f64> = ay.nodes.iter().map(|y| y / length_unit).collect();
    Mesh::tensor(
        &xs,
        &ys,
        &px,
        &py,
        |c| geom.classify([c[0] * length_unit, c[1] * length_unit]),
        length_unit,
    )
}
