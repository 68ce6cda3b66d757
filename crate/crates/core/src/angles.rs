//! Flat angles at the four interior vertices and the quantities derived from them.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Below this distance from `0 mod 2pi` a signed angle sum counts as vanishing.
pub const ELLIPTIC_TOL: f64 = 1e-9;

/// The four flat angles `(alpha, beta, gamma, delta)` at one interior vertex, in radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VertexGermAngles {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
}

impl VertexGermAngles {
    pub fn new(alpha: f64, beta: f64, gamma: f64, delta: f64) -> Result<Self> {
        let g = VertexGermAngles { alpha, beta, gamma, delta };
        for (name, v) in g.named() {
            if !(v > 0.0 && v < PI) {
                return Err(Error::Domain(format!("{name} = {v} rad outside (0, pi)")));
            }
        }
        Ok(g)
    }

    pub fn from_degrees(alpha: f64, beta: f64, gamma: f64, delta: f64) -> Result<Self> {
        Self::new(alpha.to_radians(), beta.to_radians(), gamma.to_radians(), delta.to_radians())
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.alpha, self.beta, self.gamma, self.delta]
    }

    fn named(&self) -> [(&'static str, f64); 4] {
        [("alpha", self.alpha), ("beta", self.beta), ("gamma", self.gamma), ("delta", self.delta)]
    }

    /// Every angle replaced by its complement to `pi`.
    pub fn complement(&self) -> Self {
        VertexGermAngles {
            alpha: PI - self.alpha,
            beta: PI - self.beta,
            gamma: PI - self.gamma,
            delta: PI - self.delta,
        }
    }

    /// The germ with the roles of `alpha` and `gamma` exchanged.
    pub fn mirrored(&self) -> Self {
        VertexGermAngles { alpha: self.gamma, beta: self.beta, gamma: self.alpha, delta: self.delta }
    }
}

/// Flat angles of the whole 3x3 net, vertices `A1..A4` at indices `0..4`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NetAngles {
    pub vertices: [VertexGermAngles; 4],
}

impl NetAngles {
    pub fn new(vertices: [VertexGermAngles; 4]) -> Self {
        NetAngles { vertices }
    }

    pub fn from_degrees(rows: [[f64; 4]; 4]) -> Result<Self> {
        let mut v = [VertexGermAngles { alpha: 0.0, beta: 0.0, gamma: 0.0, delta: 0.0 }; 4];
        for (slot, r) in v.iter_mut().zip(rows) {
            *slot = VertexGermAngles::from_degrees(r[0], r[1], r[2], r[3])?;
        }
        Ok(NetAngles { vertices: v })
    }

    pub fn deltas(&self) -> [f64; 4] {
        self.vertices.map(|g| g.delta)
    }

    /// `delta_1 + ... + delta_4 - 2 pi`.
    pub fn delta_defect(&self) -> f64 {
        self.deltas().iter().sum::<f64>() - 2.0 * PI
    }

    pub fn complement(&self) -> Self {
        NetAngles { vertices: self.vertices.map(|g| g.complement()) }
    }

    pub fn to_degrees(&self) -> [[f64; 4]; 4] {
        self.vertices.map(|g| g.as_array().map(f64::to_degrees))
    }
}

/// A square root of a real number, kept on one of the two rays `R>0` or `iR>0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Amplitude {
    pub magnitude: f64,
    pub imaginary: bool,
}

impl Amplitude {
    pub fn sqrt_of(v: f64) -> Self {
        Amplitude { magnitude: v.abs().sqrt(), imaginary: v < 0.0 }
    }

    /// The square this amplitude was taken from.
    pub fn square(&self) -> f64 {
        if self.imaginary {
            -self.magnitude * self.magnitude
        } else {
            self.magnitude * self.magnitude
        }
    }
}

/// Everything computed from one germ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedVertexQuantities {
    pub sigma: f64,
    pub alpha_bar: f64,
    pub beta_bar: f64,
    pub gamma_bar: f64,
    pub delta_bar: f64,
    pub epsilon: i8,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    #[serde(rename = "M")]
    pub m: f64,
    pub r: f64,
    pub s: f64,
    pub f: f64,
    pub u: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub p: Amplitude,
    pub q: Amplitude,
}

fn distance_to_2pi_multiple(v: f64) -> f64 {
    let w = v.rem_euclid(2.0 * PI);
    w.min(2.0 * PI - w)
}

/// The first signed sum `alpha +- beta +- gamma +- delta` that vanishes mod `2 pi`.
pub fn failing_combination(germ: &VertexGermAngles) -> Option<String> {
    let [a, b, c, d] = germ.as_array();
    for sb in [1.0, -1.0] {
        for sc in [1.0, -1.0] {
            for sd in [1.0, -1.0] {
                let v = a + sb * b + sc * c + sd * d;
                if distance_to_2pi_multiple(v) < ELLIPTIC_TOL {
                    let sym = |s: f64| if s > 0.0 { '+' } else { '-' };
                    return Some(format!("alpha {} beta {} gamma {} delta", sym(sb), sym(sc), sym(sd)));
                }
            }
        }
    }
    None
}

/// True iff no signed sum of the four angles vanishes mod `2 pi`.
pub fn is_elliptic(germ: &VertexGermAngles) -> bool {
    failing_combination(germ).is_none()
}

/// Derived quantities at one vertex; `vertex` only labels errors (1-based).
pub fn derive_at(germ: &VertexGermAngles, vertex: usize) -> Result<DerivedVertexQuantities> {
    if let Some(combination) = failing_combination(germ) {
        return Err(Error::NotElliptic { vertex, combination });
    }
    let [al, be, ga, de] = germ.as_array();
    let sigma = 0.5 * (al + be + ga + de);
    let (alpha_bar, beta_bar, gamma_bar, delta_bar) = (sigma - al, sigma - be, sigma - ga, sigma - de);
    let a = al.sin() / alpha_bar.sin();
    let b = be.sin() / beta_bar.sin();
    let c = ga.sin() / gamma_bar.sin();
    let d = de.sin() / delta_bar.sin();
    let m = a * b * c * d;
    let (r, s, f) = (a * d, c * d, a * c);
    let epsilon = if sigma.sin() > 0.0 { 1 } else { -1 };
    Ok(DerivedVertexQuantities {
        sigma,
        alpha_bar,
        beta_bar,
        gamma_bar,
        delta_bar,
        epsilon,
        a,
        b,
        c,
        d,
        m,
        r,
        s,
        f,
        u: 1.0 - m,
        x: 1.0 / (r - 1.0),
        y: 1.0 / (s - 1.0),
        z: 1.0 / (f - 1.0),
        p: Amplitude::sqrt_of(r - 1.0),
        q: Amplitude::sqrt_of(s - 1.0),
    })
}

pub fn derive(germ: &VertexGermAngles) -> Result<DerivedVertexQuantities> {
    derive_at(germ, 1)
}

/// Derived quantities at all four vertices.
pub fn derive_net(net: &NetAngles) -> Result<[DerivedVertexQuantities; 4]> {
    let mut out = Vec::with_capacity(4);
    for (i, g) in net.vertices.iter().enumerate() {
        out.push(derive_at(g, i + 1)?);
    }
    Ok([out[0], out[1], out[2], out[3]])
}

/// Absolute differences between the two sides of the seven sine-product identities
/// for `1-ab`, `1-bc`, `1-bd`, `cd-1`, `ad-1`, `ac-1` and `1-M`.
pub fn sine_identity_residuals(germ: &VertexGermAngles) -> [f64; 7] {
    let [al, be, ga, de] = germ.as_array();
    let sigma = 0.5 * (al + be + ga + de);
    let (sa, sb, sg, sd) = ((sigma - al).sin(), (sigma - be).sin(), (sigma - ga).sin(), (sigma - de).sin());
    let a = al.sin() / sa;
    let b = be.sin() / sb;
    let c = ga.sin() / sg;
    let d = de.sin() / sd;
    let ss = sigma.sin();
    let ab = (sigma - al - be).sin();
    let gb = (sigma - ga - be).sin();
    let db = (sigma - de - be).sin();
    [
        (1.0 - a * b) - ss * ab / (sa * sb),
        (1.0 - b * c) - ss * gb / (sb * sg),
        (1.0 - b * d) - ss * db / (sb * sd),
        (c * d - 1.0) - ss * ab / (sg * sd),
        (a * d - 1.0) - ss * gb / (sa * sd),
        (a * c - 1.0) - ss * db / (sa * sg),
        (1.0 - a * b * c * d) - ss * ab * gb * db / (sa * sb * sg * sd),
    ]
    .map(f64::abs)
}

/// The sign constraints every germ with `M > 0` satisfies.
pub fn admissible(q: &DerivedVertexQuantities) -> bool {
    admissible_rsfm(q.r, q.s, q.f, q.m)
}

pub fn admissible_rsfm(r: f64, s: f64, f: f64, m: f64) -> bool {
    r > 0.0
        && s > 0.0
        && f > 0.0
        && (r - 1.0) * (r - m) > 0.0
        && (s - 1.0) * (s - m) > 0.0
        && (f - 1.0) * (f - m) > 0.0
        && (r - 1.0) * (s - 1.0) * (f - 1.0) * (1.0 - m) > 0.0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ex41_v1() -> VertexGermAngles {
        VertexGermAngles::from_degrees(105.0, 15.0, 120.0, 90.0).unwrap()
    }

    #[test]
    fn barred_angles_of_first_qs_example() {
        let q = derive(&ex41_v1()).unwrap();
        let deg = |v: f64| v.to_degrees();
        assert!((deg(q.sigma) - 165.0).abs() < 1e-12);
        assert!((deg(q.alpha_bar) - 60.0).abs() < 1e-12);
        assert!((deg(q.beta_bar) - 150.0).abs() < 1e-12);
        assert!((deg(q.gamma_bar) - 45.0).abs() < 1e-12);
        assert!((deg(q.delta_bar) - 75.0).abs() < 1e-12);
        assert!((q.m - (3f64.sqrt() - 1.0)).abs() < 1e-12);
        assert_eq!(q.epsilon, 1);
    }

    #[test]
    fn ellipticity_degeneracies() {
        assert!(is_elliptic(&ex41_v1()));
        let g = VertexGermAngles::from_degrees(40.0, 40.0, 70.0, 70.0).unwrap();
        assert!(!is_elliptic(&g));
        let g = VertexGermAngles::from_degrees(90.0, 90.0, 90.0, 90.0).unwrap();
        assert!(!is_elliptic(&g));
        assert!(matches!(derive(&g), Err(Error::NotElliptic { .. })));
    }

    #[test]
    fn germ_rejects_angles_outside_open_interval() {
        assert!(VertexGermAngles::new(0.0, 1.0, 1.0, 1.0).is_err());
        assert!(VertexGermAngles::new(1.0, PI, 1.0, 1.0).is_err());
    }

    #[test]
    fn complement_is_involution_and_preserves_moduli() {
        let g = ex41_v1();
        let c = g.complement();
        let expect = VertexGermAngles::from_degrees(75.0, 165.0, 60.0, 90.0).unwrap();
        for (a, b) in c.as_array().iter().zip(expect.as_array()) {
            assert!((a - b).abs() < 1e-15);
        }
        for (a, b) in c.complement().as_array().iter().zip(g.as_array()) {
            assert!((a - b).abs() <= 4.0 * f64::EPSILON);
        }
        let (q, qc) = (derive(&g).unwrap(), derive(&c).unwrap());
        assert!((q.m - qc.m).abs() < 1e-12);
        assert!((q.r - qc.r).abs() < 1e-12);
    }

    #[test]
    fn sine_identities_at_sigma_pi() {
        // sigma = pi: both sides of the sin(sigma) identities vanish.
        let g = VertexGermAngles::new(1.0, 1.5, 2.0, 2.0 * PI - 4.5).unwrap();
        for r in sine_identity_residuals(&g) {
            assert!(r < 1e-12);
        }
    }

    #[test]
    fn admissible_sign_arithmetic() {
        assert!(admissible_rsfm(4.0 / 3.0, 3.0, 2.0, 0.5));
        assert!(!admissible_rsfm(1.2, 0.8, 2.0, 0.5));
    }

    #[test]
    fn amplitude_rays() {
        let p = Amplitude::sqrt_of(-0.25);
        assert!(p.imaginary);
        assert!((p.magnitude - 0.5).abs() < 1e-15);
        assert!((p.square() + 0.25).abs() < 1e-15);
    }
}
