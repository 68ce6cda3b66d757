//! Dihedral-angle kinematics of the 3x3 net.
//!
//! At vertex `A_i` the two wing edges `A_iB_i` and `A_iC_i` are rotated about
//! the two central edges through the dihedral angles adjacent to `A_i`. The
//! wing on the `alpha` side turns through `xi` and the wing on the `gamma` side
//! through `eta`; the angle between the wings must equal `beta`:
//!
//! ```text
//! cos(beta) = P(xi) + Q(xi) cos(eta) + R(xi) sin(eta)
//! P = cos a cos g cos d + cos xi sin a cos g sin d
//! Q = sin g (cos a sin d - cos xi sin a cos d)
//! R = sin a sin g sin xi
//! ```
//!
//! Vertices 1 and 3 have `xi = theta_i`, `eta = theta_{i-1}`; vertices 2 and 4
//! have `xi = theta_{i-1}`, `eta = theta_i`, with `theta_0 = theta_4`. The
//! relation is symmetric under `(alpha, xi) <-> (gamma, eta)`.
//!
//! Dihedral angles use the convention in which `pi` is a flat fold.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::angles::{derive_net, DerivedVertexQuantities, NetAngles, VertexGermAngles};
use crate::error::{Error, Result};

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap_angle(a: f64) -> f64 {
    let w = (a + PI).rem_euclid(2.0 * PI) - PI;
    if w <= -PI {
        w + 2.0 * PI
    } else {
        w
    }
}

/// Distance between two angles on the circle.
pub fn angle_distance(a: f64, b: f64) -> f64 {
    wrap_angle(a - b).abs()
}

/// `theta` with `cot(theta / 2) = num / den`, in `(-pi, pi]`.
pub fn theta_from_cot_parts(num: f64, den: f64) -> Result<f64> {
    if num == 0.0 && den == 0.0 {
        return Err(Error::Numeric("cot(theta/2) is 0/0".into()));
    }
    Ok(wrap_angle(2.0 * den.atan2(num)))
}

pub fn theta_from_cot(c: f64) -> f64 {
    wrap_angle(2.0 * 1f64.atan2(c))
}

/// The four oriented dihedral angles at the central edges `A1A2`, `A2A3`, `A3A4`, `A4A1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DihedralState {
    pub theta: [f64; 4],
}

impl DihedralState {
    pub fn new(theta: [f64; 4]) -> Self {
        DihedralState { theta: theta.map(wrap_angle) }
    }

    pub fn from_degrees(theta: [f64; 4]) -> Self {
        Self::new(theta.map(f64::to_radians))
    }

    /// `theta_i` for `i` in `0..=4`, where `theta_0 = theta_4`.
    pub fn get(&self, i: usize) -> f64 {
        if i == 0 {
            self.theta[3]
        } else {
            self.theta[i - 1]
        }
    }

    /// `(xi, eta)` at vertex `i` (1-based).
    pub fn xi_eta(&self, i: usize) -> (f64, f64) {
        let (cur, prev) = (self.get(i), self.get(i - 1));
        if i % 2 == 1 {
            (cur, prev)
        } else {
            (prev, cur)
        }
    }

    /// Largest angular distance over the four angles.
    pub fn distance(&self, other: &DihedralState) -> f64 {
        (0..4).map(|k| angle_distance(self.theta[k], other.theta[k])).fold(0.0, f64::max)
    }
}

/// `cos(angle between the wings) - cos(beta)` at one vertex.
pub fn vertex_defect(germ: &VertexGermAngles, xi: f64, eta: f64) -> f64 {
    wing_cosine(germ, xi, eta) - germ.beta.cos()
}

/// Cosine of the angle between the two wing edges for the given dihedral
/// angles; `beta` of the germ is ignored.
pub fn wing_cosine(germ: &VertexGermAngles, xi: f64, eta: f64) -> f64 {
    let (p, q, r) = transfer_coefficients(germ, xi);
    p + q * eta.cos() + r * eta.sin()
}

fn transfer_coefficients(germ: &VertexGermAngles, xi: f64) -> (f64, f64, f64) {
    let (sa, ca) = germ.alpha.sin_cos();
    let (sg, cg) = germ.gamma.sin_cos();
    let (sd, cd) = germ.delta.sin_cos();
    let (sx, cx) = xi.sin_cos();
    let p = ca * cg * cd + cx * sa * cg * sd;
    let q = sg * (ca * sd - cx * sa * cd);
    let r = sa * sg * sx;
    (p, q, r)
}

/// All `eta` in `(-pi, pi]` solving the vertex relation for the given `xi`, ascending.
pub fn vertex_transfer(germ: &VertexGermAngles, xi: f64) -> Vec<f64> {
    let (p, q, r) = transfer_coefficients(germ, xi);
    let c = germ.beta.cos() - p;
    let rho = q.hypot(r);
    if rho < 1e-14 {
        return Vec::new();
    }
    let ratio = c / rho;
    if ratio.abs() > 1.0 + 1e-12 {
        return Vec::new();
    }
    let spread = ratio.clamp(-1.0, 1.0).acos();
    let phase = r.atan2(q);
    let mut out = vec![wrap_angle(phase - spread), wrap_angle(phase + spread)];
    out.sort_by(f64::total_cmp);
    if angle_distance(out[0], out[1]) < 1e-15 {
        out.truncate(1);
    }
    out
}

/// Solves vertex `i` for its unknown dihedral given the known one.
///
/// `forward` means the known angle is `xi` and the result is `eta`.
fn solve_vertex(germ: &VertexGermAngles, known: f64, forward: bool) -> Vec<f64> {
    if forward {
        vertex_transfer(germ, known)
    } else {
        vertex_transfer(&germ.mirrored(), known)
    }
}

/// Which of the (at most two) solutions at a vertex to follow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    Lower,
    Upper,
}

impl Branch {
    pub const BOTH: [Branch; 2] = [Branch::Lower, Branch::Upper];

    fn pick(self, sols: &[f64]) -> Option<f64> {
        match (self, sols.len()) {
            (_, 0) => None,
            (_, 1) => Some(sols[0]),
            (Branch::Lower, _) => Some(sols[0]),
            (Branch::Upper, _) => Some(sols[1]),
        }
    }
}

/// All 16 branch choices in a fixed order.
pub fn all_branch_choices() -> Vec<[Branch; 4]> {
    let mut out = Vec::with_capacity(16);
    for a in Branch::BOTH {
        for b in Branch::BOTH {
            for c in Branch::BOTH {
                for d in Branch::BOTH {
                    out.push([a, b, c, d]);
                }
            }
        }
    }
    out
}

// Walking 2 -> 3 -> 4 -> 1 from theta_1: vertex 2 maps theta_1 (its xi) to
// theta_2 (its eta); vertex 3 maps theta_2 (eta) to theta_3 (xi); vertex 4
// maps theta_3 (xi) to theta_4 (eta); vertex 1 maps theta_4 (eta) back to theta_1 (xi).
const WALK: [(usize, bool); 4] = [(2, true), (3, false), (4, true), (1, false)];

/// Propagates `theta_1` around the four vertices and measures how far the
/// returning `theta_1` lands from the start.
pub fn propagate(net: &NetAngles, theta1: f64, branches: [Branch; 4]) -> Result<(DihedralState, f64)> {
    let mut theta = [theta1, 0.0, 0.0, 0.0];
    let mut known = theta1;
    for (step, &(vertex, forward)) in WALK.iter().enumerate() {
        let sols = solve_vertex(&net.vertices[vertex - 1], known, forward);
        let next = branches[step].pick(&sols).ok_or(Error::PropagationDead { vertex })?;
        if step < 3 {
            theta[step + 1] = next;
        }
        known = next;
    }
    let closure = angle_distance(known, theta1);
    Ok((DihedralState::new(theta), closure))
}

/// The branch choice with the smallest closure residual, if any branch survives.
pub fn propagate_best(net: &NetAngles, theta1: f64) -> Option<(DihedralState, f64, [Branch; 4])> {
    let mut best: Option<(DihedralState, f64, [Branch; 4])> = None;
    for br in all_branch_choices() {
        if let Ok((s, c)) = propagate(net, theta1, br) {
            if best.as_ref().is_none_or(|b| c < b.1) {
                best = Some((s, c, br));
            }
        }
    }
    best
}

/// Largest absolute vertex defect of a state; zero on the configuration space.
pub fn closure_defect(net: &NetAngles, state: &DihedralState) -> f64 {
    (1..=4)
        .map(|i| {
            let (xi, eta) = state.xi_eta(i);
            vertex_defect(&net.vertices[i - 1], xi, eta).abs()
        })
        .fold(0.0, f64::max)
}

/// Angular closure of a complete state: how far each vertex is from
/// accepting the given pair of dihedral angles, measured on `eta`.
pub fn state_closure(net: &NetAngles, state: &DihedralState) -> f64 {
    let mut worst = 0.0f64;
    for i in 1..=4 {
        let (xi, eta) = state.xi_eta(i);
        let sols = vertex_transfer(&net.vertices[i - 1], xi);
        let d = sols.iter().map(|&s| angle_distance(s, eta)).fold(f64::INFINITY, f64::min);
        worst = worst.max(d);
    }
    worst
}

/// Largest jump between consecutive states a trace accepts.
pub const TRACE_MAX_STEP: f64 = 0.5;
/// Closure above which a traced branch is abandoned.
pub const TRACE_CLOSURE_TOL: f64 = 1e-8;

/// Outcome of a continuation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    /// Parameter values `t = cot(theta_1 / 2)` actually reached.
    pub t: Vec<f64>,
    pub states: Vec<DihedralState>,
    pub closures: Vec<f64>,
    /// Why the trace stopped early, if it did.
    pub diagnostic: Option<String>,
}

/// Follows the flexion through the given `t = cot(theta_1 / 2)` values. At
/// each step every branch path is propagated and the closing state nearest
/// the previous one is kept, so folds of a single vertex relation are crossed.
pub fn flexion_trace(net: &NetAngles, start: &DihedralState, ts: &[f64]) -> Result<Trace> {
    let start_closure = state_closure(net, start);
    if start_closure > 1e-10 {
        return Err(Error::Domain(format!("start state does not close: {start_closure:e}")));
    }
    let mut trace = Trace { t: Vec::new(), states: Vec::new(), closures: Vec::new(), diagnostic: None };
    let mut prev = *start;
    for &t in ts {
        let theta1 = theta_from_cot(t);
        let mut best: Option<(DihedralState, f64)> = None;
        let mut any = false;
        for br in all_branch_choices() {
            let Ok((state, closure)) = propagate(net, theta1, br) else {
                continue;
            };
            any = true;
            if closure > TRACE_CLOSURE_TOL {
                continue;
            }
            if best.as_ref().is_none_or(|b| state.distance(&prev) < b.0.distance(&prev)) {
                best = Some((state, closure));
            }
        }
        let Some((state, closure)) = best else {
            trace.diagnostic = Some(if any {
                format!("no closing branch at t = {t}")
            } else {
                format!("no real solution at t = {t}")
            });
            break;
        };
        let jump = state.distance(&prev);
        if jump > TRACE_MAX_STEP {
            trace.diagnostic = Some(format!("jump of {jump} rad at t = {t}"));
            break;
        }
        trace.t.push(t);
        trace.states.push(state);
        trace.closures.push(closure);
        prev = state;
    }
    Ok(trace)
}

/// The coefficients `A_ij`, `i` the vertex and `j` the term, both 1-based in the formula.
pub fn bricard_coefficients(state: &DihedralState) -> [[f64; 4]; 4] {
    let mut a = [[0.0; 4]; 4];
    for (ii, row) in a.iter_mut().enumerate() {
        let i = (ii + 1) as f64;
        let (ti, tim) = (state.get(ii + 1), state.get(ii));
        for (jj, cell) in row.iter_mut().enumerate() {
            let j = (jj + 1) as f64;
            let shift = |k: f64| PI / 4.0 * k * j * (j - 1.0) + PI * j / 2.0;
            let c1 = (ti / 2.0 + shift(i)).cos();
            let c2 = (tim / 2.0 + shift(i - 1.0)).cos();
            *cell = 4.0 * c1 * c1 * c2 * c2;
        }
    }
    a
}

/// Right-hand sides of the two per-vertex relations between the search
/// parameters and the angles, as `(cos delta, sin theta_i sin theta_{i-1})`.
///
/// Returns `None` when the common radicand is not positive.
pub fn vertex_equation_rhs(u: f64, x: f64, y: f64, z: f64, epsilon: f64, a_row: &[f64; 4]) -> Option<(f64, f64)> {
    let rad = x * y * u * (1.0 + z) * (1.0 + u * z);
    if !(rad > 0.0) {
        return None;
    }
    let den = 2.0 * rad.sqrt();
    let cos_delta = epsilon * (1.0 - y * z * u - x * z * u + x * y * u) / den;
    let kin = epsilon * (a_row[0] + a_row[1] * y * z * u + a_row[2] * x * z * u + a_row[3] * x * y * u) / den;
    Some((cos_delta, kin))
}

/// Residuals of the four `cos delta_i` relations followed by the four dihedral relations.
pub fn vertex_equation_residuals(net: &NetAngles, state: &DihedralState) -> Result<[f64; 8]> {
    let q = derive_net(net)?;
    let a = bricard_coefficients(state);
    let mut out = [0.0; 8];
    for i in 0..4 {
        let d: &DerivedVertexQuantities = &q[i];
        let (cd, kin) = vertex_equation_rhs(d.u, d.x, d.y, d.z, f64::from(d.epsilon), &a[i])
            .ok_or_else(|| Error::Domain(format!("negative radicand at vertex {}", i + 1)))?;
        out[i] = (net.vertices[i].delta.cos() - cd).abs();
        out[4 + i] = (state.get(i + 1).sin() * state.get(i).sin() - kin).abs();
    }
    Ok(out)
}

/// The nine unknowns of the search system. The remaining per-vertex values
/// follow from `x2 = x1`, `x4 = x3`, `y4 = y1`, `y3 = y2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchParameters {
    pub u: f64,
    pub x1: f64,
    pub x3: f64,
    pub y1: f64,
    pub y2: f64,
    pub z: [f64; 4],
}

impl SearchParameters {
    pub fn from_array(p: [f64; 9]) -> Self {
        SearchParameters { u: p[0], x1: p[1], x3: p[2], y1: p[3], y2: p[4], z: [p[5], p[6], p[7], p[8]] }
    }

    pub fn to_array(&self) -> [f64; 9] {
        [self.u, self.x1, self.x3, self.y1, self.y2, self.z[0], self.z[1], self.z[2], self.z[3]]
    }

    /// `(x_i, y_i, z_i)` at vertex `i` (0-based).
    pub fn vertex(&self, i: usize) -> (f64, f64, f64) {
        match i {
            0 => (self.x1, self.y1, self.z[0]),
            1 => (self.x1, self.y2, self.z[1]),
            2 => (self.x3, self.y2, self.z[2]),
            _ => (self.x3, self.y1, self.z[3]),
        }
    }

    /// Parameters read off a net's derived quantities, averaging the pairs
    /// that coincide on equimodular nets.
    pub fn from_derived(q: &[DerivedVertexQuantities; 4]) -> Self {
        SearchParameters {
            u: q.iter().map(|d| d.u).sum::<f64>() / 4.0,
            x1: 0.5 * (q[0].x + q[1].x),
            x3: 0.5 * (q[2].x + q[3].x),
            y1: 0.5 * (q[0].y + q[3].y),
            y2: 0.5 * (q[1].y + q[2].y),
            z: [q[0].z, q[1].z, q[2].z, q[3].z],
        }
    }

    /// Checks the denominators of the angle-recovery formulas.
    pub fn check_guards(&self) -> Result<()> {
        let u = self.u;
        if u == 0.0 || !u.is_finite() {
            return Err(Error::Domain(format!("u = {u} must be finite and nonzero")));
        }
        for i in 0..4 {
            let (x, y, z) = self.vertex(i);
            for (name, v) in [("x", x), ("y", y), ("z", z)] {
                if !v.is_finite() || v == 0.0 || v == -1.0 || u * v == -1.0 {
                    return Err(Error::Domain(format!("{name}_{} = {v} hits a guard (0, -1 or u*{name} = -1)", i + 1)));
                }
            }
        }
        Ok(())
    }
}

/// Cosines of `(alpha, beta, gamma, delta, sigma)` at one vertex from `(x, y, z, u)`.
pub fn recovery_cosines(x: f64, y: f64, z: f64, u: f64, epsilon: f64) -> Result<[f64; 5]> {
    let root = |v: f64, what: &str| -> Result<f64> {
        if v > 0.0 {
            Ok(v.sqrt())
        } else {
            Err(Error::NonRealAngles(format!("radicand for {what} is {v}")))
        }
    };
    let ca = epsilon * (1.0 - y * z * u + x * z * u - x * y * u)
        / (2.0 * root(x * z * u * (1.0 + y) * (1.0 + u * y), "alpha")?);
    let cg = epsilon * (1.0 + y * z * u - x * z * u - x * y * u)
        / (2.0 * root(y * z * u * (1.0 + x) * (1.0 + u * x), "gamma")?);
    let cd = epsilon * (1.0 - y * z * u - x * z * u + x * y * u)
        / (2.0 * root(x * y * u * (1.0 + z) * (1.0 + u * z), "delta")?);
    let cs = (1.0 - u * (x * y + x * z + y * z + 2.0 * x * y * z))
        / (2.0 * root(x * y * z * u * u * (1.0 + x) * (1.0 + y) * (1.0 + z), "sigma")?);
    let (px, py, pz) = ((1.0 + x) * (1.0 + y) * (1.0 + z), (1.0 + u * x), (1.0 + u * y));
    let uz = 1.0 + u * z;
    let cb = epsilon * (u * px + py * pz * uz - u * x * y * z * (u - 1.0) * (u - 1.0))
        / (2.0 * root(u * px * py * pz * uz, "beta")?);
    Ok([ca, cb, cg, cd, cs])
}

/// Flat angles from search parameters and the four signs of `sin sigma_i`.
pub fn recover_flat_angles(params: &SearchParameters, epsilons: [i8; 4]) -> Result<NetAngles> {
    params.check_guards()?;
    let mut v = [VertexGermAngles { alpha: 0.0, beta: 0.0, gamma: 0.0, delta: 0.0 }; 4];
    for (i, slot) in v.iter_mut().enumerate() {
        let (x, y, z) = params.vertex(i);
        let c = recovery_cosines(x, y, z, params.u, f64::from(epsilons[i]))?;
        for (k, &val) in c[..4].iter().enumerate() {
            if !(-1.0..=1.0).contains(&val) {
                return Err(Error::NonRealAngles(format!(
                    "cosine {val} of angle {k} at vertex {} outside [-1, 1]",
                    i + 1
                )));
            }
        }
        let g = VertexGermAngles::new(c[0].acos(), c[1].acos(), c[2].acos(), c[3].acos())?;
        let sigma_check = (0.5 * g.as_array().iter().sum::<f64>()).cos() - c[4];
        if sigma_check.abs() > 1e-10 {
            return Err(Error::NonRealAngles(format!("sigma consistency at vertex {} off by {sigma_check:e}", i + 1)));
        }
        *slot = g;
    }
    Ok(NetAngles::new(v))
}

/// Decision of the local rigidity probe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Rigidity {
    Flexes,
    Isolated,
    Inconclusive,
}

/// Tunable thresholds of [`rigidity_probe`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeConfig {
    pub samples_per_side: usize,
    /// A sample counts as closing at or below this residual.
    pub close_tol: f64,
    /// A sample counts as clearly open above this residual.
    pub open_tol: f64,
    /// Fraction of closing samples needed to call the state flexible.
    pub flex_fraction: f64,
    /// Closing states farther than `locality * sqrt(radius)` from the probed
    /// state belong to another component and are ignored.
    pub locality: f64,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig { samples_per_side: 10, close_tol: 1e-8, open_tol: 1e-6, flex_fraction: 0.9, locality: 3.0 }
    }
}

/// Decides whether a closing state admits nearby closing states.
pub fn rigidity_probe(net: &NetAngles, state: &DihedralState, radius: f64, cfg: &ProbeConfig) -> Result<Rigidity> {
    let c = state_closure(net, state);
    if c > 1e-10 {
        return Err(Error::Domain(format!("probed state does not close: {c:e}")));
    }
    let reach = cfg.locality * radius.sqrt();
    let n = cfg.samples_per_side.max(1);
    let (mut closing, mut any_below_open, mut total) = (0usize, false, 0usize);
    for side in [-1.0, 1.0] {
        for k in 1..=n {
            let theta1 = state.theta[0] + side * radius * k as f64 / n as f64;
            let mut best = f64::INFINITY;
            for br in all_branch_choices() {
                if let Ok((s, closure)) = propagate(net, theta1, br) {
                    if s.distance(state) <= reach {
                        best = best.min(closure);
                    }
                }
            }
            total += 1;
            if best <= cfg.close_tol {
                closing += 1;
            }
            if best <= cfg.open_tol {
                any_below_open = true;
            }
        }
    }
    if closing as f64 >= cfg.flex_fraction * total as f64 {
        Ok(Rigidity::Flexes)
    } else if !any_below_open {
        Ok(Rigidity::Isolated)
    } else {
        Ok(Rigidity::Inconclusive)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn germ() -> VertexGermAngles {
        VertexGermAngles::new(1.1, 0.9, 1.7, 1.3).unwrap()
    }

    #[test]
    fn wrap_range() {
        assert_eq!(wrap_angle(PI), PI);
        assert_eq!(wrap_angle(-PI), PI);
        assert!((wrap_angle(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-15);
        assert!((theta_from_cot(0.0) - PI).abs() < 1e-15);
        assert!((theta_from_cot(1.0) - PI / 2.0).abs() < 1e-15);
        assert!(theta_from_cot_parts(0.0, 0.0).is_err());
    }

    #[test]
    fn transfer_solutions_satisfy_relation() {
        let g = germ();
        for k in 0..50 {
            let xi = -3.0 + 0.12 * f64::from(k);
            for eta in vertex_transfer(&g, xi) {
                assert!(vertex_defect(&g, xi, eta).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn flat_xi_gives_symmetric_pair() {
        // sin(xi) = 0 removes the sin(eta) term.
        let g = germ();
        let s = vertex_transfer(&g, 0.0);
        if s.len() == 2 {
            assert!((s[0] + s[1]).abs() < 1e-12);
        }
    }

    #[test]
    fn coefficients_bounded_and_periodic() {
        let s = DihedralState::new([0.3, -1.2, 2.0, 0.9]);
        let a = bricard_coefficients(&s);
        let shifted = DihedralState { theta: [0.3 + 2.0 * PI, -1.2, 2.0, 0.9 - 2.0 * PI] };
        let b = bricard_coefficients(&shifted);
        for i in 0..4 {
            for j in 0..4 {
                assert!((0.0..=4.0).contains(&a[i][j]));
                assert!((a[i][j] - b[i][j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn coefficients_at_right_angles() {
        // Every half-angle is pi/4, so each A_ij is 4 cos^2(pi/4 + s1) cos^2(pi/4 + s2)
        // with shifts that are multiples of pi/2 or pi/4.
        let s = DihedralState::new([PI / 2.0; 4]);
        let a = bricard_coefficients(&s);
        // j = 1: shifts pi/2 on both factors.
        for row in &a {
            assert!((row[0] - 1.0).abs() < 1e-12);
        }
        // i = 2, j = 2: shifts 2pi/4*2 + pi = 2pi and pi/2 + pi.
        assert!((a[1][1] - 1.0).abs() < 1e-12);
        // i = 1, j = 2: first shift pi/2 + pi, second pi.
        let expect = 4.0 * (PI / 4.0 + 1.5 * PI).cos().powi(2) * (PI / 4.0 + PI).cos().powi(2);
        assert!((a[0][1] - expect).abs() < 1e-12);
    }

    #[test]
    fn guards_reject_degenerate_parameters() {
        let mut p = SearchParameters::from_array([0.5, 3.0, 2.0 / 3.0, 0.5, 1.2, 1.0, 4.0 / 3.0, 1.5, 2.0]);
        assert!(p.check_guards().is_ok());
        p.z[3] = -2.0; // u * z = -1
        assert!(recover_flat_angles(&p, [1; 4]).is_err());
        let zero = SearchParameters::from_array([0.0; 9]);
        assert!(zero.check_guards().is_err());
    }
}
