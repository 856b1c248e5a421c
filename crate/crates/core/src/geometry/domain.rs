use super::GeometryError;

/// Material region of the cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Subdomain {
    Anode,
    Cathode,
    Electrolyte,
}

impl Subdomain {
    pub fn is_solid(self) -> bool {
        !matches!(self, Subdomain::Electrolyte)
    }

    pub fn name(self) -> &'static str {
        match self {
            Subdomain::Anode => "anode",
            Subdomain::Cathode => "cathode",
            Subdomain::Electrolyte => "electrolyte",
        }
    }
}

/// Exterior boundary portions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundaryPart {
    /// Left wall, anode current collector.
    CollectorMinus,
    /// Right wall, cathode current collector.
    CollectorPlus,
    Top,
    Bottom,
}

impl BoundaryPart {
    pub const ALL: [BoundaryPart; 4] = [
        BoundaryPart::CollectorMinus,
        BoundaryPart::CollectorPlus,
        BoundaryPart::Top,
        BoundaryPart::Bottom,
    ];
}

/// Dimensions of the interdigitated cell, in metres.
///
/// The digit length is measured from the current collector, so the cell is
/// `end_cap + digit_length + tip_gap` wide and `2 * half_thickness +
/// channel` tall.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellDimensions {
    /// Electrode digit half-thickness.
    pub half_thickness: f64,
    /// Electrolyte channel thickness.
    pub channel: f64,
    pub digit_length: f64,
    /// Gap between a digit tip and the opposite end cap.
    pub tip_gap: f64,
    pub end_cap: f64,
}

impl Default for CellDimensions {
    fn default() -> Self {
        CellDimensions {
            half_thickness: 30e-6,
            channel: 40e-6,
            digit_length: 900e-6,
            tip_gap: 40e-6,
            end_cap: 60e-6,
        }
    }
}

impl CellDimensions {
    pub fn validate(&self) -> Result<(), GeometryError> {
        let mut bad = Vec::new();
        for (name, v) in [
            ("half_thickness", self.half_thickness),
            ("channel", self.channel),
            ("digit_length", self.digit_length),
            ("tip_gap", self.tip_gap),
            ("end_cap", self.end_cap),
        ] {
            if !(v.is_finite() && v > 0.0) {
                bad.push(format!("{name} = {v} must be positive"));
            }
        }
        if self.tip_gap >= self.digit_length {
            bad.push(format!(
                "tip_gap {} must be smaller than digit_length {}",
                self.tip_gap, self.digit_length
            ));
        }
        if self.digit_length <= self.end_cap {
            bad.push(format!(
                "digit_length {} must exceed end_cap {}",
                self.digit_length, self.end_cap
            ));
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(GeometryError::InvalidDimensions(bad))
        }
    }

    pub fn width(&self) -> f64 {
        self.end_cap + self.digit_length + self.tip_gap
    }

    pub fn height(&self) -> f64 {
        2.0 * self.half_thickness + self.channel
    }
}

/// Polygonal description of the cell (metres).
#[derive(Debug, Clone)]
pub struct DomainGeometry {
    pub dims: CellDimensions,
    pub anode: Vec<[f64; 2]>,
    pub cathode: Vec<[f64; 2]>,
    pub electrolyte: Vec<[f64; 2]>,
    /// One polyline per electrode, anode first.
    pub interface: [Vec<[f64; 2]>; 2],
    pub boundary: Vec<(BoundaryPart, [[f64; 2]; 2])>,
}

impl DomainGeometry {
    /// Anode digit enters from the left wall along the bottom, cathode digit
    /// from the right wall along the top; the electrolyte fills the rest.
    pub fn interdigitated(dims: CellDimensions) -> Result<Self, GeometryError> {
        dims.validate()?;
        let hs = dims.half_thickness;
        let l = dims.end_cap;
        let len = dims.digit_length;
        let w = dims.tip_gap;
        let width = dims.width();
        let height = dims.height();
        let anode = vec![
            [0.0, 0.0],
            [len, 0.0],
            [len, hs],
            [l, hs],
            [l, height],
            [0.0, height],
        ];
        let cathode = vec![
            [width - l, 0.0],
            [width, 0.0],
            [width, height],
            [l + w, height],
            [l + w, height - hs],
            [width - l, height - hs],
        ];
        let electrolyte = vec![
            [len, 0.0],
            [width - l, 0.0],
            [width - l, height - hs],
            [l + w, height - hs],
            [l + w, height],
            [l, height],
            [l, hs],
            [len, hs],
        ];
        let interface = [
            vec![[len, 0.0], [len, hs], [l, hs], [l, height]],
            vec![
                [width - l, 0.0],
                [width - l, height - hs],
                [l + w, height - hs],
                [l + w, height],
            ],
        ];
        let boundary = vec![
            (BoundaryPart::CollectorMinus, [[0.0, 0.0], [0.0, height]]),
            (BoundaryPart::CollectorPlus, [[width, 0.0], [width, height]]),
            (BoundaryPart::Bottom, [[0.0, 0.0], [width, 0.0]]),
            (BoundaryPart::Top, [[0.0, height], [width, height]]),
        ];
        let geom = DomainGeometry {
            dims,
            anode,
            cathode,
            electrolyte,
            interface,
            boundary,
        };
        for (name, poly) in [
            ("anode", &geom.anode),
            ("cathode", &geom.cathode),
            ("electrolyte", &geom.electrolyte),
        ] {
            if polygon_area(poly) <= 0.0 || self_intersecting(poly) {
                return Err(GeometryError::DegeneratePolygon(name));
            }
        }
        let built = geom.bounding_box();
        let expected = [width, height];
        if (built[0] - expected[0]).abs() > 1e-12 * width
            || (built[1] - expected[1]).abs() > 1e-12 * height
        {
            return Err(GeometryError::BoundingBox { built, expected });
        }
        Ok(geom)
    }

    pub fn width(&self) -> f64 {
        self.dims.width()
    }

    pub fn height(&self) -> f64 {
        self.dims.height()
    }

    pub fn bounding_box(&self) -> [f64; 2] {
        let mut hi = [f64::MIN; 2];
        let mut lo = [f64::MAX; 2];
        for p in self.anode.iter().chain(&self.cathode).chain(&self.electrolyte) {
            for k in 0..2 {
                hi[k] = hi[k].max(p[k]);
                lo[k] = lo[k].min(p[k]);
            }
        }
        [hi[0] - lo[0], hi[1] - lo[1]]
    }

    pub fn area(&self, sub: Subdomain) -> f64 {
        polygon_area(match sub {
            Subdomain::Anode => &self.anode,
            Subdomain::Cathode => &self.cathode,
            Subdomain::Electrolyte => &self.electrolyte,
        })
    }

    /// Region containing an interior point.
    pub fn classify(&self, p: [f64; 2]) -> Subdomain {
        if point_in_polygon(p, &self.anode) {
            Subdomain::Anode
        } else if point_in_polygon(p, &self.cathode) {
            Subdomain::Cathode
        } else {
            Subdomain::Electrolyte
        }
    }

    /// Sorted distinct vertex abscissae and ordinates.
    pub fn breakpoints(&self) -> (Vec<f64>, Vec<f64>) {
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for p in self.anode.iter().chain(&self.cathode).chain(&self.electrolyte) {
            xs.push(p[0]);
            ys.push(p[1]);
        }
        (dedup_sorted(xs, self.width()), dedup_sorted(ys, self.height()))
    }

    /// Abscissae and ordinates of interface segments.
    pub fn interface_lines(&self) -> (Vec<f64>, Vec<f64>) {
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for line in &self.interface {
            for seg in line.windows(2) {
                if seg[0][0] == seg[1][0] {
                    xs.push(seg[0][0]);
                } else {
                    ys.push(seg[0][1]);
                }
            }
        }
        (dedup_sorted(xs, self.width()), dedup_sorted(ys, self.height()))
    }

    pub fn interface_length(&self) -> f64 {
        self.interface
            .iter()
            .flat_map(|l| l.windows(2))
            .map(|s| ((s[1][0] - s[0][0]).powi(2) + (s[1][1] - s[0][1]).powi(2)).sqrt())
            .sum()
    }
}

fn dedup_sorted(mut v: Vec<f64>, scale: f64) -> Vec<f64> {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * scale);
    v
}

pub(crate) fn polygon_area(poly: &[[f64; 2]]) -> f64 {
    let n = poly.len();
    let mut a = 0.0;
    for i in 0..n {
        let p = poly[i];
        let q = poly[(i + 1) % n];
        a += p[0] * q[1] - q[0] * p[1];
    }
    0.5 * a
}

fn point_in_polygon(p: [f64; 2], poly: &[[f64; 2]]) -> bool {
    let n = poly.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (poly[i], poly[j]);
        if (a[1] > p[1]) != (b[1] > p[1]) {
            let x = a[0] + (p[1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
            if p[0] < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

fn segments_cross(a: [f64; 2], b: [f64; 2], c: [f64; 2], d: [f64; 2]) -> bool {
    let orient = |p: [f64; 2], q: [f64; 2], r: [f64; 2]| {
        (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])
    };
    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);
    ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
}

fn self_intersecting(poly: &[[f64; 2]]) -> bool {
    let n = poly.len();
    for i in 0..n {
        for j in (i + 2)..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            if segments_cross(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n]) {
                return true;
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_layout() {
        let g = DomainGeometry::interdigitated(CellDimensions::default()).unwrap();
        let bb = g.bounding_box();
        assert!((bb[0] - 1000e-6).abs() < 1e-15);
        assert!((bb[1] - 100e-6).abs() < 1e-15);
        let total: f64 = [Subdomain::Anode, Subdomain::Cathode, Subdomain::Electrolyte]
            .iter()
            .map(|s| g.area(*s))
            .sum();
        assert!((total - 1000e-6 * 100e-6).abs() < 1e-20);
        assert_eq!(g.interface.len(), 2);
    }

    #[test]
    fn gap_not_shorter_than_digit_rejected() {
        let d = CellDimensions {
            tip_gap: 900e-6,
            ..Default::default()
        };
        assert!(DomainGeometry::interdigitated(d).is_err());
    }

    #[test]
    fn classify_points() {
        let g = DomainGeometry::interdigitated(CellDimensions::default()).unwrap();
        assert_eq!(g.classify([10e-6, 50e-6]), Subdomain::Anode);
        assert_eq!(g.classify([500e-6, 10e-6]), Subdomain::Anode);
        assert_eq!(g.classify([500e-6, 50e-6]), Subdomain::Electrolyte);
        assert_eq!(g.classify([500e-6, 90e-6]), Subdomain::Cathode);
        assert_eq!(g.classify([990e-6, 10e-6]), Subdomain::Cathode);
    }
}
