//! Quasi-symmetric nets and their closed-form flexion.
//!
//! A seed `(alpha1, beta1, gamma1)` together with `delta1 = pi/2` fixes all
//! sixteen flat angles. The flexion is parametrized by `t = cot(theta_2 / 2)`.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::angles::{derive, DerivedVertexQuantities, NetAngles, VertexGermAngles};
use crate::error::{Error, Result};
use crate::kinematics::{theta_from_cot_parts, DihedralState};

/// The three free flat angles of a quasi-symmetric net, in radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QsSeed {
    pub alpha1: f64,
    pub beta1: f64,
    pub gamma1: f64,
}

impl QsSeed {
    pub fn from_degrees(alpha1: f64, beta1: f64, gamma1: f64) -> Self {
        QsSeed { alpha1: alpha1.to_radians(), beta1: beta1.to_radians(), gamma1: gamma1.to_radians() }
    }

    fn germ1(&self) -> Result<VertexGermAngles> {
        VertexGermAngles::new(self.alpha1, self.beta1, self.gamma1, FRAC_PI_2)
    }
}

/// Flat angles of the quasi-symmetric net generated by `seed`.
pub fn build_qs_net(seed: &QsSeed) -> Result<NetAngles> {
    let g1 = seed.germ1()?;
    let q = derive(&g1)?;
    for (name, v) in
        [("alpha_bar", q.alpha_bar), ("beta_bar", q.beta_bar), ("gamma_bar", q.gamma_bar), ("delta_bar", q.delta_bar)]
    {
        if !(v > 0.0 && v < PI) {
            return Err(Error::InvalidSeed(format!("{name}_1 = {} deg outside (0, 180)", v.to_degrees())));
        }
    }
    let (a, b, c, d) = (g1.alpha, g1.beta, g1.gamma, g1.delta);
    let g2 = VertexGermAngles::new(d, c, b, a)?;
    let g3 = VertexGermAngles::new(PI - d, PI - c, PI - b, PI - a)?;
    let net = NetAngles::new([g1, g2, g3, g1]);
    for (i, g) in net.vertices.iter().enumerate() {
        crate::angles::derive_at(g, i + 1)?;
    }
    Ok(net)
}

/// Which sign is taken in every `+-` of the closed form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        }
    }
}

impl std::str::FromStr for Sign {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "+" | "plus" => Ok(Sign::Plus),
            "-" | "minus" => Ok(Sign::Minus),
            other => Err(Error::Domain(format!("branch must be + or -, got {other:?}"))),
        }
    }
}

/// An open interval of the flexion parameter; ends may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn contains(&self, t: f64) -> bool {
        t > self.lo && t < self.hi
    }

    /// `n` interior points, evenly spaced in `atan(t)` so unbounded ends are covered.
    pub fn samples(&self, n: usize) -> Vec<f64> {
        let (a, b) = (self.lo.atan(), self.hi.atan());
        (1..=n).map(|k| (a + (b - a) * k as f64 / (n + 1) as f64).tan()).collect()
    }
}

/// Coefficients of the closed-form flexion of one quasi-symmetric net.
#[derive(Debug, Clone, PartialEq)]
pub struct QsFlexion {
    pub seed: QsSeed,
    pub branch: Sign,
    pub net: NetAngles,
    pub derived: DerivedVertexQuantities,
    /// `s_2`, the amplitude selecting the shape of the valid set.
    pub s2: f64,
    pub intervals: Vec<Interval>,
    sin_beta: f64,
    // Denominator of theta_1 and theta_3: den13_0 + t^2 den13_2.
    den13: [f64; 2],
    // Denominator of theta_4.
    den4: [f64; 2],
    // Factors of the discriminant, each c0 + c2 t^2.
    d_first: [f64; 2],
    d_second: [f64; 2],
}

/// Cotangents of the four half dihedral angles at one parameter value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CotHalves {
    pub num: [f64; 4],
    pub den: [f64; 4],
}

impl CotHalves {
    pub fn values(&self) -> [f64; 4] {
        [0, 1, 2, 3].map(|k| self.num[k] / self.den[k])
    }
}

pub fn qs_flexion(seed: &QsSeed, branch: Sign) -> Result<QsFlexion> {
    let net = build_qs_net(seed)?;
    let q = derive(&net.vertices[0])?;
    let beta = seed.beta1;
    let (sa, sb, sg, sd) = (q.alpha_bar.sin(), q.beta_bar.sin(), q.gamma_bar.sin(), q.delta_bar.sin());
    let s2 = crate::angles::derive(&net.vertices[1])?.s;
    let m = q.m;
    let intervals = valid_intervals(s2, m);
    Ok(QsFlexion {
        seed: *seed,
        branch,
        net,
        derived: q,
        s2,
        intervals,
        sin_beta: beta.sin(),
        den13: [sd * (q.alpha_bar - beta).sin(), sa * (q.delta_bar - beta).sin()],
        den4: [sg * sd, (q.gamma_bar - beta).sin() * (q.delta_bar - beta).sin()],
        d_first: [q.sigma.sin() * (q.alpha_bar - beta).sin(), sa * sb],
        d_second: [sg * sd, (q.gamma_bar - beta).sin() * (q.delta_bar - beta).sin()],
    })
}

/// Where the discriminant is positive, by the signs of `s_2 - 1` and `M - 1`.
pub fn valid_intervals(s2: f64, m: f64) -> Vec<Interval> {
    let inf = f64::INFINITY;
    match (s2 > 1.0, m > 1.0) {
        (false, false) => vec![Interval { lo: -inf, hi: inf }],
        (true, false) => {
            let (a, b) = ((s2 - 1.0).sqrt(), ((s2 - 1.0) / (1.0 - m)).sqrt());
            vec![Interval { lo: -b, hi: -a }, Interval { lo: a, hi: b }]
        }
        (true, true) => {
            let a = (s2 - 1.0).sqrt();
            vec![Interval { lo: -inf, hi: -a }, Interval { lo: a, hi: inf }]
        }
        (false, true) => {
            let b = ((1.0 - s2) / (m - 1.0)).sqrt();
            vec![Interval { lo: -b, hi: b }]
        }
    }
}

impl QsFlexion {
    /// `D(t)` from its defining product.
    pub fn discriminant(&self, t: f64) -> f64 {
        let t2 = t * t;
        (self.d_first[0] + t2 * self.d_first[1]) * (self.d_second[0] + t2 * self.d_second[1])
    }

    /// `D(t)` from the factorized form in `s_2` and `M`.
    pub fn discriminant_factored(&self, t: f64) -> f64 {
        let q = &self.derived;
        let s = q.alpha_bar.sin() * q.beta_bar.sin() * q.gamma_bar.sin() * q.delta_bar.sin();
        let t2 = t * t;
        s * (1.0 - self.s2 + t2) * ((1.0 - q.m) / (1.0 - self.s2) * t2 + 1.0)
    }

    pub fn in_range(&self, t: f64) -> bool {
        self.intervals.iter().any(|iv| iv.contains(t))
    }

    /// Numerators and denominators of `cot(theta_i / 2)`.
    pub fn cot_halves(&self, t: f64) -> Result<CotHalves> {
        if !t.is_finite() || !self.in_range(t) {
            return Err(Error::OutOfRange { t });
        }
        let disc = self.discriminant(t);
        if disc < 0.0 {
            return Err(Error::NegativeDiscriminant { t, value: disc });
        }
        let root = self.branch.value() * disc.sqrt();
        let t2 = t * t;
        let d13 = self.den13[0] + t2 * self.den13[1];
        let d4 = self.den4[0] + t2 * self.den4[1];
        Ok(CotHalves { num: [-t * self.sin_beta + root, t, t * self.sin_beta + root, root], den: [d13, 1.0, d13, d4] })
    }

    pub fn eval(&self, t: f64) -> Result<DihedralState> {
        let c = self.cot_halves(t)?;
        let mut theta = [0.0; 4];
        for k in 0..4 {
            theta[k] = theta_from_cot_parts(c.num[k], c.den[k])?;
        }
        Ok(DihedralState::new(theta))
    }

    /// `n` parameter values inside the valid set, spread over all intervals.
    pub fn sample_ts(&self, n: usize) -> Vec<f64> {
        let k = self.intervals.len();
        let mut out = Vec::with_capacity(n);
        for (idx, iv) in self.intervals.iter().enumerate() {
            let share = n / k + usize::from(idx < n % k);
            out.extend(iv.samples(share));
        }
        out
    }
}

/// Cotangent of the half angle, for comparisons with closed forms.
pub fn cot_half(theta: f64) -> f64 {
    let h = 0.5 * theta;
    h.cos() / h.sin()
}
