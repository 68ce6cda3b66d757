//! 3D realization of the 3x3 net, measure-back checks, self-intersection
//! tests and the bundle / OBJ writers.

use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use nalgebra::{Matrix2, Matrix3, Vector2, Vector3};
use serde::{Deserialize, Serialize};

use crate::angles::NetAngles;
use crate::kinematics::{angle_distance, DihedralState};
use crate::qsnet::Sign;
use crate::{Error, Result};

pub type Point = Vector3<f64>;

/// Tolerance of every measure-back and congruence check.
pub const MEASURE_TOL: f64 = 1e-9;
/// Contact tolerance of the intersection test, relative to the bounding-box diameter.
pub const CONTACT_TOL: f64 = 1e-9;

pub const BUNDLE_SCHEMA: &str = "kokonet/flexion-bundle/1";

/// Vertex labels in storage order.
pub const LABELS: [&str; 12] = ["A1", "A2", "A3", "A4", "B1", "B2", "B3", "B4", "C1", "C2", "C3", "C4"];

const A: usize = 0;
const B: usize = 4;
const C: usize = 8;

/// Central quad, four side quads, four corner triangles.
pub const FACES: [&[usize]; 9] = [
    &[A, A + 1, A + 2, A + 3],
    &[B, A, A + 1, B + 1],
    &[C + 1, A + 1, A + 2, C + 2],
    &[B + 2, A + 2, A + 3, B + 3],
    &[C + 3, A + 3, A, C],
    &[B, A, C],
    &[B + 1, A + 1, C + 1],
    &[B + 2, A + 2, C + 2],
    &[B + 3, A + 3, C + 3],
];

// Central neighbour on the alpha side and on the gamma side of each A_i.
const ALPHA_SIDE: [usize; 4] = [1, 0, 3, 2];
const GAMMA_SIDE: [usize; 4] = [3, 2, 1, 0];

/// Free edge lengths of a realization. The angles fix everything else.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeLengths {
    #[serde(rename = "A1A2")]
    pub a1a2: f64,
    #[serde(rename = "A2A3")]
    pub a2a3: f64,
    /// `|A_i B_i|`
    #[serde(rename = "B")]
    pub wing_b: [f64; 4],
    /// `|A_i C_i|`
    #[serde(rename = "C")]
    pub wing_c: [f64; 4],
}

impl Default for EdgeLengths {
    fn default() -> Self {
        EdgeLengths { a1a2: 1.0, a2a3: 1.0, wing_b: [1.0; 4], wing_c: [1.0; 4] }
    }
}

impl EdgeLengths {
    fn validate(&self) -> Result<()> {
        let all = [self.a1a2, self.a2a3].into_iter().chain(self.wing_b).chain(self.wing_c);
        for l in all {
            if !(l.is_finite() && l > 0.0) {
                return Err(Error::Domain(format!("edge length {l} must be positive")));
            }
        }
        Ok(())
    }

    /// Wing lengths that make every side quad a trapezoid whose far edge is
    /// parallel to its central edge, at height at most one.
    pub fn fitted(net: &NetAngles, a1a2: f64, a2a3: f64) -> Result<Self> {
        let quad = build_central_quad(net.deltas(), a1a2, a2a3)?;
        let mut out = EdgeLengths { a1a2, a2a3, ..Default::default() };
        for (i, j, a, b) in side_quads(net) {
            let base = (quad[j] - quad[i]).norm();
            let cot_sum = 1.0 / a.tan() + 1.0 / b.tan();
            let h = if cot_sum > 0.0 { (0.5 * base / cot_sum).min(1.0) } else { 1.0 };
            *out.wing_mut(i, j) = h / a.sin();
            *out.wing_mut(j, i) = h / b.sin();
        }
        out.validate()?;
        Ok(out)
    }

    /// The wing at `A_i` lying in the side quad over `A_i A_j`.
    fn wing(&self, i: usize, j: usize) -> f64 {
        if ALPHA_SIDE[i] == j {
            self.wing_b[i]
        } else {
            self.wing_c[i]
        }
    }

    fn wing_mut(&mut self, i: usize, j: usize) -> &mut f64 {
        if ALPHA_SIDE[i] == j {
            &mut self.wing_b[i]
        } else {
            &mut self.wing_c[i]
        }
    }

    /// Unit lengths when they give convex side quads, [`EdgeLengths::fitted`] otherwise.
    pub fn convex_default(net: &NetAngles) -> Result<Self> {
        let unit = EdgeLengths::default();
        if side_quads_convex(net, &unit)? {
            Ok(unit)
        } else {
            EdgeLengths::fitted(net, unit.a1a2, unit.a2a3)
        }
    }
}

/// The four side quads as `(i, j, angle at A_i, angle at A_j)`.
fn side_quads(net: &NetAngles) -> [(usize, usize, f64, f64); 4] {
    let v = &net.vertices;
    [
        (0, 1, v[0].alpha, v[1].alpha),
        (1, 2, v[1].gamma, v[2].gamma),
        (2, 3, v[2].alpha, v[3].alpha),
        (3, 0, v[3].gamma, v[0].gamma),
    ]
}

/// Whether every side quad is convex, from its planar shape alone.
pub fn side_quads_convex(net: &NetAngles, lengths: &EdgeLengths) -> Result<bool> {
    lengths.validate()?;
    let quad = build_central_quad(net.deltas(), lengths.a1a2, lengths.a2a3)?;
    Ok(side_quads(net).iter().all(|&(i, j, a, b)| {
        let base = (quad[j] - quad[i]).norm();
        let (p, q) = (lengths.wing(i, j), lengths.wing(j, i));
        let pts = [
            Vector2::new(0.0, 0.0),
            Vector2::new(base, 0.0),
            Vector2::new(base - q * b.cos(), q * b.sin()),
            Vector2::new(p * a.cos(), p * a.sin()),
        ];
        (0..4).all(|k| {
            let (u, v, w) = (pts[k], pts[(k + 1) % 4], pts[(k + 2) % 4]);
            (v - u).perp(&(w - v)) > 0.0
        })
    }))
}

/// A realized net: twelve labelled points, faces per [`FACES`].
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddedNet {
    pub vertices: [Point; 12],
    pub lengths: EdgeLengths,
}

fn angle_between(u: &Point, v: &Point) -> f64 {
    // atan2 keeps precision near 0 and pi where acos does not.
    u.cross(v).norm().atan2(u.dot(v))
}

/// Planar central quad with `A2` at the origin, `A1` on the positive x axis
/// and the quad in `y >= 0`. Interior angles are the `deltas`.
pub fn build_central_quad(deltas: [f64; 4], a1a2: f64, a2a3: f64) -> Result<[Point; 4]> {
    if deltas.iter().any(|d| !(*d > 0.0 && *d < PI)) {
        return Err(Error::DegenerateQuad(format!("deltas {deltas:?} outside (0, pi)")));
    }
    let defect = deltas.iter().sum::<f64>() - TAU;
    if defect.abs() > 1e-9 {
        return Err(Error::DegenerateQuad(format!("delta sum off 2pi by {defect:e}")));
    }
    let a2 = Point::zeros();
    let a1 = Point::new(a1a2, 0.0, 0.0);
    let a3 = a2a3 * Point::new(deltas[1].cos(), deltas[1].sin(), 0.0);
    let d1 = Vector2::new(-deltas[0].cos(), deltas[0].sin());
    // A3 -> A2 turned by delta_3 towards A1's side of the line A2A3.
    let back = (a2 - a3).xy().normalize();
    let turn = |a: f64| Vector2::new(a.cos() * back.x - a.sin() * back.y, a.sin() * back.x + a.cos() * back.y);
    let side = |v: &Vector2<f64>| back.perp(v);
    let reference = side(&(a1 - a3).xy());
    let d3 = [turn(deltas[2]), turn(-deltas[2])]
        .into_iter()
        .find(|v| side(v) * reference > 0.0)
        .ok_or_else(|| Error::DegenerateQuad("no interior direction at A3".into()))?;
    let m = Matrix2::from_columns(&[d1, -d3]);
    let st =
        m.lu().solve(&(a3 - a1).xy()).ok_or_else(|| Error::DegenerateQuad("parallel sides at A1 and A3".into()))?;
    if !(st.x > 0.0 && st.y > 0.0) {
        return Err(Error::DegenerateQuad(format!("side lengths {} and {} not positive", st.x, st.y)));
    }
    let a4 = a1 + Point::new(d1.x, d1.y, 0.0) * st.x;
    let quad = [a1, a2, a3, a4];
    let measured = quad_angles(&quad);
    for (m, d) in measured.iter().zip(deltas) {
        if (m - d).abs() > MEASURE_TOL {
            return Err(Error::DegenerateQuad(format!("angle {m} built for delta {d}")));
        }
    }
    Ok(quad)
}

fn quad_angles(q: &[Point; 4]) -> [f64; 4] {
    std::array::from_fn(|i| angle_between(&(q[(i + 3) % 4] - q[i]), &(q[(i + 1) % 4] - q[i])))
}

/// Unit vector along `A_i A_j` and the in-plane unit normal pointing into the quad.
fn edge_frame(quad: &[Point; 4], i: usize, j: usize) -> (Point, Point) {
    let e = (quad[j] - quad[i]).normalize();
    let mut n = Point::z().cross(&e);
    let centre = quad.iter().sum::<Point>() / 4.0;
    if n.dot(&(centre - quad[i])) < 0.0 {
        n = -n;
    }
    (e, n)
}

/// Realizes the net in the given state. Each wing edge is the quad edge
/// turned by its flat angle and lifted out of the plane by the adjacent
/// dihedral angle; `theta = pi` keeps the wing in the plane.
pub fn embed(net: &NetAngles, state: &DihedralState, lengths: &EdgeLengths) -> Result<EmbeddedNet> {
    lengths.validate()?;
    let quad = build_central_quad(net.deltas(), lengths.a1a2, lengths.a2a3)?;
    let z = Point::z();
    let mut v = [Point::zeros(); 12];
    v[..4].copy_from_slice(&quad);
    for i in 0..4 {
        let g = &net.vertices[i];
        let (xi, eta) = state.xi_eta(i + 1);
        let (e, n) = edge_frame(&quad, i, ALPHA_SIDE[i]);
        let dir = g.alpha.cos() * e + g.alpha.sin() * (xi.cos() * n + xi.sin() * z);
        v[B + i] = quad[i] + lengths.wing_b[i] * dir;
        let (e, n) = edge_frame(&quad, i, GAMMA_SIDE[i]);
        let dir = g.gamma.cos() * e + g.gamma.sin() * (eta.cos() * n + eta.sin() * z);
        v[C + i] = quad[i] + lengths.wing_c[i] * dir;
    }
    let e = EmbeddedNet { vertices: v, lengths: *lengths };
    let dev = e.deviation(net, state);
    if dev.worst() > MEASURE_TOL {
        return Err(Error::EmbedInconsistent(dev.describe()));
    }
    Ok(e)
}

/// Largest deviations found by re-measuring an embedding.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasureDeviation {
    pub flat: f64,
    pub flat_at: (usize, usize),
    pub dihedral: f64,
    pub dihedral_at: usize,
    pub planarity: f64,
    pub convex: bool,
}

impl MeasureDeviation {
    pub fn worst(&self) -> f64 {
        let convexity = if self.convex { 0.0 } else { f64::INFINITY };
        self.flat.max(self.dihedral).max(self.planarity).max(convexity)
    }

    fn describe(&self) -> String {
        const NAMES: [&str; 4] = ["alpha", "beta", "gamma", "delta"];
        if !self.convex {
            return "a quad face is not convex".into();
        }
        if self.flat >= self.dihedral && self.flat >= self.planarity {
            let (i, k) = self.flat_at;
            format!("{}_{} off by {:e}", NAMES[k], i + 1, self.flat)
        } else if self.dihedral >= self.planarity {
            format!("theta_{} off by {:e}", self.dihedral_at + 1, self.dihedral)
        } else {
            format!("quad faces non-planar by {:e}", self.planarity)
        }
    }
}

impl EmbeddedNet {
    pub fn point(&self, label: &str) -> Option<Point> {
        LABELS.iter().position(|l| *l == label).map(|k| self.vertices[k])
    }

    pub fn diameter(&self) -> f64 {
        let mut lo = self.vertices[0];
        let mut hi = self.vertices[0];
        for p in &self.vertices {
            lo = lo.inf(p);
            hi = hi.sup(p);
        }
        (hi - lo).norm()
    }

    /// Flat angles `(alpha, beta, gamma, delta)` at each `A_i`, measured from the points.
    pub fn flat_angles(&self) -> [[f64; 4]; 4] {
        let v = &self.vertices;
        std::array::from_fn(|i| {
            let a = v[A + i];
            let to_b = v[B + i] - a;
            let to_c = v[C + i] - a;
            let to_alpha = v[A + ALPHA_SIDE[i]] - a;
            let to_gamma = v[A + GAMMA_SIDE[i]] - a;
            [
                angle_between(&to_b, &to_alpha),
                angle_between(&to_b, &to_c),
                angle_between(&to_c, &to_gamma),
                angle_between(&to_alpha, &to_gamma),
            ]
        })
    }

    /// Oriented dihedral angles at the four central edges, `pi` when flat.
    pub fn dihedral_angles(&self) -> [f64; 4] {
        let p = |k: usize| self.vertices[k];
        let (a1, a2, a3, a4) = (p(A), p(A + 1), p(A + 2), p(A + 3));
        let n0 = (a1 - a2).cross(&(a3 - a2));
        let normals = [
            (p(B + 1) - a2).cross(&(a1 - a2)),
            (a3 - a2).cross(&(p(C + 1) - a2)),
            (a4 - a3).cross(&(p(B + 2) - a3)),
            (p(C) - a1).cross(&(a4 - a1)),
        ];
        let quad = [a1, a2, a3, a4];
        std::array::from_fn(|i| {
            let n = normals[i];
            let edge = quad[i] - quad[(i + 1) % 4];
            let det = Matrix3::from_columns(&[n, n0, edge]).determinant();
            let sign = if det < 0.0 { -1.0 } else { 1.0 };
            let theta = sign * (PI - angle_between(&n0, &n));
            if theta <= -PI {
                theta + TAU
            } else {
                theta
            }
        })
    }

    /// Largest point-to-plane distance over the quad faces, relative to the diameter.
    pub fn planarity(&self) -> f64 {
        let diam = self.diameter();
        FACES
            .iter()
            .filter(|f| f.len() == 4)
            .map(|f| {
                let p: Vec<Point> = f.iter().map(|&k| self.vertices[k]).collect();
                let n = (p[2] - p[0]).cross(&(p[3] - p[1])).normalize();
                let c = p.iter().sum::<Point>() / 4.0;
                p.iter().map(|q| (q - c).dot(&n).abs()).fold(0.0, f64::max) / diam
            })
            .fold(0.0, f64::max)
    }

    /// Whether every quad face is strictly convex.
    pub fn quads_convex(&self) -> bool {
        FACES.iter().filter(|f| f.len() == 4).all(|f| {
            let p: Vec<Point> = f.iter().map(|&k| self.vertices[k]).collect();
            let n = (p[2] - p[0]).cross(&(p[3] - p[1]));
            (0..4).all(|k| {
                let turn = (p[(k + 1) % 4] - p[k]).cross(&(p[(k + 2) % 4] - p[(k + 1) % 4]));
                turn.dot(&n) > 0.0
            })
        })
    }

    /// Re-measures everything and compares with the inputs.
    pub fn deviation(&self, net: &NetAngles, state: &DihedralState) -> MeasureDeviation {
        let mut d = MeasureDeviation {
            flat: 0.0,
            flat_at: (0, 0),
            dihedral: 0.0,
            dihedral_at: 0,
            planarity: self.planarity(),
            convex: self.quads_convex(),
        };
        for (i, row) in self.flat_angles().iter().enumerate() {
            for (k, m) in row.iter().enumerate() {
                let dev = (m - net.vertices[i].as_array()[k]).abs();
                if dev > d.flat {
                    d.flat = dev;
                    d.flat_at = (i, k);
                }
            }
        }
        for (i, m) in self.dihedral_angles().iter().enumerate() {
            let dev = angle_distance(*m, state.theta[i]);
            if dev > d.dihedral {
                d.dihedral = dev;
                d.dihedral_at = i;
            }
        }
        d
    }

    /// Edge lengths and interior angles of every face, in a fixed order.
    pub fn face_signature(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for f in FACES {
            let n = f.len();
            for k in 0..n {
                let p = self.vertices[f[k]];
                let next = self.vertices[f[(k + 1) % n]];
                let prev = self.vertices[f[(k + n - 1) % n]];
                out.push((next - p).norm());
                out.push(angle_between(&(next - p), &(prev - p)));
            }
        }
        out
    }

    /// Fan triangulation of every face, as vertex-index triples tagged with the face.
    pub fn triangles(&self) -> Vec<(usize, [usize; 3])> {
        let mut out = Vec::new();
        for (fi, f) in FACES.iter().enumerate() {
            for k in 1..f.len() - 1 {
                out.push((fi, [f[0], f[k], f[k + 1]]));
            }
        }
        out
    }

    /// Face pairs whose triangles cross. Triangle pairs sharing a vertex are skipped.
    pub fn intersecting_faces(&self) -> Vec<(usize, usize)> {
        let tol = CONTACT_TOL * self.diameter();
        let tris = self.triangles();
        let mut hits = Vec::new();
        for (i, (fa, ta)) in tris.iter().enumerate() {
            for (fb, tb) in &tris[i + 1..] {
                if fa == fb || ta.iter().any(|k| tb.contains(k)) {
                    continue;
                }
                let pa = ta.map(|k| self.vertices[k]);
                let pb = tb.map(|k| self.vertices[k]);
                if triangles_intersect(&pa, &pb, tol) && !hits.contains(&(*fa, *fb)) {
                    hits.push((*fa, *fb));
                }
            }
        }
        hits
    }

    pub fn self_intersects(&self) -> bool {
        !self.intersecting_faces().is_empty()
    }
}

/// Whether the segment `p q` pierces the interior of `tri` by more than `tol`.
fn segment_crosses_triangle(p: &Point, q: &Point, tri: &[Point; 3], tol: f64) -> bool {
    let [a, b, c] = tri;
    let n = (b - a).cross(&(c - a));
    let len = n.norm();
    if len == 0.0 {
        return false;
    }
    let n = n / len;
    let dp = n.dot(&(p - a));
    let dq = n.dot(&(q - a));
    // Touching or coplanar contact does not count.
    if dp * dq > 0.0 || dp.abs() <= tol || dq.abs() <= tol {
        return false;
    }
    let x = p + (q - p) * (dp / (dp - dq));
    let edge_side = |u: &Point, v: &Point| n.dot(&(v - u).cross(&(x - u))) / (v - u).norm();
    let s = [edge_side(a, b), edge_side(b, c), edge_side(c, a)];
    s.iter().all(|v| *v > tol) || s.iter().all(|v| *v < -tol)
}

/// Two triangles intersect when an edge of one pierces the other.
pub fn triangles_intersect(t1: &[Point; 3], t2: &[Point; 3], tol: f64) -> bool {
    (0..3).any(|k| {
        segment_crosses_triangle(&t1[k], &t1[(k + 1) % 3], t2, tol)
            || segment_crosses_triangle(&t2[k], &t2[(k + 1) % 3], t1, tol)
    })
}

/// Largest difference between two face signatures.
pub fn congruence_deviation(a: &EmbeddedNet, b: &EmbeddedNet) -> f64 {
    a.face_signature().iter().zip(b.face_signature()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Where the states of a bundle came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    ClosedForm,
    Traced,
    Search,
}

/// Vertex coordinates keyed by label.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct VertexMap {
    pub A1: [f64; 3],
    pub A2: [f64; 3],
    pub A3: [f64; 3],
    pub A4: [f64; 3],
    pub B1: [f64; 3],
    pub B2: [f64; 3],
    pub B3: [f64; 3],
    pub B4: [f64; 3],
    pub C1: [f64; 3],
    pub C2: [f64; 3],
    pub C3: [f64; 3],
    pub C4: [f64; 3],
}

impl VertexMap {
    pub fn from_points(v: &[Point; 12]) -> Self {
        let p = |k: usize| [v[k].x, v[k].y, v[k].z];
        VertexMap {
            A1: p(0),
            A2: p(1),
            A3: p(2),
            A4: p(3),
            B1: p(4),
            B2: p(5),
            B3: p(6),
            B4: p(7),
            C1: p(8),
            C2: p(9),
            C3: p(10),
            C4: p(11),
        }
    }

    pub fn to_points(&self) -> [Point; 12] {
        [self.A1, self.A2, self.A3, self.A4, self.B1, self.B2, self.B3, self.B4, self.C1, self.C2, self.C3, self.C4]
            .map(Point::from)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BundleSample {
    pub t: f64,
    pub theta: [f64; 4],
    pub vertices: VertexMap,
}

/// A sampled flexion with its realizations, as exchanged with the viewer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlexionBundle {
    pub schema: String,
    pub net: NetAngles,
    pub lengths: EdgeLengths,
    /// `null` when the states do not come from a signed closed form.
    pub branch: Option<Sign>,
    pub samples: Vec<BundleSample>,
    pub provenance: Provenance,
}

impl FlexionBundle {
    /// Embeds every state; fails on the first state that does not realize.
    pub fn build(
        net: &NetAngles,
        lengths: &EdgeLengths,
        branch: Option<Sign>,
        provenance: Provenance,
        samples: &[(f64, DihedralState)],
    ) -> Result<Self> {
        let samples = samples
            .iter()
            .map(|(t, s)| {
                let e = embed(net, s, lengths)?;
                Ok(BundleSample { t: *t, theta: s.theta, vertices: VertexMap::from_points(&e.vertices) })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(FlexionBundle { schema: BUNDLE_SCHEMA.into(), net: *net, lengths: *lengths, branch, samples, provenance })
    }

    pub fn embedded(&self, k: usize) -> EmbeddedNet {
        EmbeddedNet { vertices: self.samples[k].vertices.to_points(), lengths: self.lengths }
    }

    /// Serialized form. Floats are written in shortest round-trip form, so
    /// reading back restores every value bit for bit.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("bundle serializes")
    }

    pub fn from_json(text: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()).map_err(|source| Error::Io { path: path.into(), source })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| Error::Io { path: path.into(), source })?;
        let b = Self::from_json(&text).map_err(|source| Error::Json { path: path.into(), source })?;
        if b.schema != BUNDLE_SCHEMA {
            return Err(Error::Domain(format!("unsupported bundle schema {:?}", b.schema)));
        }
        Ok(b)
    }

    /// Re-measures every sample and compares faces across samples.
    pub fn check(&self) -> BundleCheck {
        let mut check = BundleCheck {
            samples: self.samples.len(),
            flat_deviation: 0.0,
            dihedral_deviation: 0.0,
            planarity: 0.0,
            all_convex: true,
            congruence_deviation: 0.0,
            self_intersecting: Vec::with_capacity(self.samples.len()),
        };
        let first = (!self.samples.is_empty()).then(|| self.embedded(0));
        for (k, s) in self.samples.iter().enumerate() {
            let e = self.embedded(k);
            let d = e.deviation(&self.net, &DihedralState { theta: s.theta });
            check.flat_deviation = check.flat_deviation.max(d.flat);
            check.dihedral_deviation = check.dihedral_deviation.max(d.dihedral);
            check.planarity = check.planarity.max(d.planarity);
            check.all_convex &= d.convex;
            if let Some(f) = &first {
                check.congruence_deviation = check.congruence_deviation.max(congruence_deviation(f, &e));
            }
            check.self_intersecting.push(e.self_intersects());
        }
        check
    }
}

/// Validation summary of a bundle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BundleCheck {
    pub samples: usize,
    pub flat_deviation: f64,
    pub dihedral_deviation: f64,
    pub planarity: f64,
    pub all_convex: bool,
    pub congruence_deviation: f64,
    /// One flag per sample.
    pub self_intersecting: Vec<bool>,
}

impl BundleCheck {
    pub fn valid(&self) -> bool {
        self.flat_deviation <= MEASURE_TOL
            && self.dihedral_deviation <= MEASURE_TOL
            && self.planarity <= MEASURE_TOL
            && self.all_convex
            && self.congruence_deviation <= MEASURE_TOL
    }

    pub fn any_self_intersection(&self) -> bool {
        self.self_intersecting.iter().any(|b| *b)
    }
}

/// ASCII OBJ text: labelled vertices in storage order, polygon faces, and
/// the flat and dihedral angles in degrees as header comments.
pub fn obj_string(e: &EmbeddedNet, net: &NetAngles, state: &DihedralState) -> String {
    let mut out = String::new();
    let flat: Vec<String> = net.to_degrees().iter().flatten().map(|d| format!("{d}")).collect();
    let theta: Vec<String> = state.theta.iter().map(|t| format!("{}", t.to_degrees())).collect();
    let _ = writeln!(out, "# kokonet flat-angles-deg: {}", flat.join(" "));
    let _ = writeln!(out, "# kokonet dihedral-angles-deg: {}", theta.join(" "));
    let _ = writeln!(out, "# vertex order: {}", LABELS.join(" "));
    for p in &e.vertices {
        let _ = writeln!(out, "v {} {} {}", p.x, p.y, p.z);
    }
    for f in FACES {
        let idx: Vec<String> = f.iter().map(|k| (k + 1).to_string()).collect();
        let _ = writeln!(out, "f {}", idx.join(" "));
    }
    out
}

pub fn export_obj(e: &EmbeddedNet, net: &NetAngles, state: &DihedralState, path: &Path) -> Result<()> {
    fs::write(path, obj_string(e, net, state)).map_err(|source| Error::Io { path: path.into(), source })
}
