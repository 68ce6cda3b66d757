//! Complete elliptic integrals and Jacobi elliptic functions.
//!
//! Only the pieces the classifier needs are provided: real-argument
//! `sn`, `cn`, `dn` by descending Landen (AGM) recursion, and the values of
//! `dn` and `sn^2` on the vertical lines `mK + i(0, K')`, where both are real.
//! Those come from Jacobi's imaginary transformation
//! `dn(iv, k) = dn(v, k') / cn(v, k')` together with the quarter-period shift
//! `dn(u + K) = k' / dn(u)` and 2K-periodicity of `dn`.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const AGM_MAX_ITER: usize = 32;
const AGM_TOL: f64 = 1e-15;
/// Fraction of `K'` kept clear of the pole of `dn` on even lines.
pub const POLE_MARGIN: f64 = 1e-9;
const BISECTION_STEPS: usize = 80;
const NEWTON_STEPS: usize = 5;

fn agm(mut a: f64, mut b: f64) -> f64 {
    for _ in 0..AGM_MAX_ITER {
        if (a - b).abs() <= AGM_TOL * a {
            break;
        }
        let next = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = next;
    }
    0.5 * (a + b)
}

/// Complete elliptic integral of the first kind `K(k)` for modulus `k`.
pub fn complete_k(k: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&k) {
        return Err(Error::Domain(format!("modulus k = {k} outside [0, 1)")));
    }
    Ok(quarter_period_from_complement((1.0 - k * k).sqrt()))
}

/// `K(k)` computed from the complementary modulus `k' = sqrt(1 - k^2)`,
/// which avoids cancellation when `k` is close to 1.
fn quarter_period_from_complement(k_prime: f64) -> f64 {
    FRAC_PI_2 / agm(1.0, k_prime)
}

/// Values of the three Jacobi elliptic functions at one argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jacobi {
    pub sn: f64,
    pub cn: f64,
    pub dn: f64,
}

/// `sn`, `cn`, `dn` of a real argument `u` for modulus `k` in `[0, 1)`.
pub fn jacobi_real(u: f64, k: f64) -> Result<Jacobi> {
    if !(0.0..1.0).contains(&k) {
        return Err(Error::Domain(format!("modulus k = {k} outside [0, 1)")));
    }
    if !u.is_finite() {
        return Err(Error::Domain(format!("argument u = {u} is not finite")));
    }
    let k_prime = (1.0 - k * k).sqrt();
    Ok(jacobi_with_complement(u, k, k_prime))
}

fn jacobi_with_complement(u: f64, k: f64, k_prime: f64) -> Jacobi {
    if k == 0.0 {
        return Jacobi { sn: u.sin(), cn: u.cos(), dn: 1.0 };
    }
    // Reduce modulo the real period 4K so the 2^N scaling below stays accurate.
    let period = 4.0 * quarter_period_from_complement(k_prime);
    let u = u - period * (u / period).round();

    let mut a = [0.0f64; AGM_MAX_ITER + 1];
    let mut c = [0.0f64; AGM_MAX_ITER + 1];
    a[0] = 1.0;
    c[0] = k;
    let mut b = k_prime;
    let mut n = 0;
    while n < AGM_MAX_ITER && c[n].abs() > AGM_TOL {
        let an = a[n];
        a[n + 1] = 0.5 * (an + b);
        c[n + 1] = 0.5 * (an - b);
        b = (an * b).sqrt();
        n += 1;
    }
    let mut phi = 2f64.powi(n as i32) * a[n] * u;
    for j in (1..=n).rev() {
        let ratio = (c[j] / a[j] * phi.sin()).clamp(-1.0, 1.0);
        phi = 0.5 * (phi + ratio.asin());
    }
    let sn = phi.sin();
    let cn = phi.cos();
    let dn = (1.0 - k * k * sn * sn).max(0.0).sqrt();
    Jacobi { sn, cn, dn }
}

/// Shape of the period lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LatticeKind {
    /// Generators `4K` and `2iK'` (modulus below one).
    Rectangular,
    /// Generators `4K` and `2K + 2iK'` (modulus above one).
    Rhombic,
}

/// Elliptic data shared by all four vertices of an equimodular net.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EllipticContext {
    /// The common modulus `M` of the net.
    pub modulus: f64,
    pub k: f64,
    pub k_prime: f64,
    pub quarter_period: f64,
    pub quarter_period_prime: f64,
    pub lattice: LatticeKind,
}

impl EllipticContext {
    pub fn new(modulus: f64) -> Result<Self> {
        if !(modulus.is_finite() && modulus > 0.0) {
            return Err(Error::Domain(format!("modulus M = {modulus} must be positive")));
        }
        if (modulus - 1.0).abs() < 1e-12 {
            return Err(Error::Domain("modulus M = 1 has no elliptic modulus".into()));
        }
        let (k, k_prime, lattice) = if modulus < 1.0 {
            ((1.0 - modulus).sqrt(), modulus.sqrt(), LatticeKind::Rectangular)
        } else {
            ((1.0 - 1.0 / modulus).sqrt(), 1.0 / modulus.sqrt(), LatticeKind::Rhombic)
        };
        Ok(EllipticContext {
            modulus,
            k,
            k_prime,
            quarter_period: quarter_period_from_complement(k_prime),
            quarter_period_prime: quarter_period_from_complement(k),
            lattice,
        })
    }

    /// The two lattice generators as complex numbers.
    pub fn generators(&self) -> (Complex64, Complex64) {
        let big_k = self.quarter_period;
        let big_kp = self.quarter_period_prime;
        match self.lattice {
            LatticeKind::Rectangular => (Complex64::new(4.0 * big_k, 0.0), Complex64::new(0.0, 2.0 * big_kp)),
            LatticeKind::Rhombic => (Complex64::new(4.0 * big_k, 0.0), Complex64::new(2.0 * big_k, 2.0 * big_kp)),
        }
    }
}

/// A point `t = m K + i v` on one of the four vertical lines carrying the phase shifts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseShift {
    pub m: u8,
    pub v: f64,
}

impl PhaseShift {
    pub fn to_complex(self, ctx: &EllipticContext) -> Complex64 {
        Complex64::new(f64::from(self.m) * ctx.quarter_period, self.v)
    }
}

/// Sign class of the product `p q` of the two amplitudes at a vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PqClass {
    PosReal,
    PosImag,
    NegReal,
}

impl PqClass {
    /// Classifies `p q` where `p^2 = r - 1` and `q^2 = s - 1`.
    pub fn from_amplitudes(r: f64, s: f64) -> Self {
        match (r > 1.0, s > 1.0) {
            (true, true) => PqClass::PosReal,
            (false, false) => PqClass::NegReal,
            _ => PqClass::PosImag,
        }
    }
}

/// Which vertical line a phase shift lies on, by sign class and `sigma < pi`.
pub fn line_index(pq: PqClass, sigma_below_pi: bool) -> u8 {
    match (pq, sigma_below_pi) {
        (PqClass::PosReal, true) => 0,
        (PqClass::PosImag, true) => 1,
        (PqClass::NegReal, true) => 2,
        (PqClass::PosReal, false) => 2,
        (PqClass::PosImag, false) => 3,
        (PqClass::NegReal, false) => 0,
    }
}

fn check_line(t: PhaseShift, ctx: &EllipticContext) -> Result<Jacobi> {
    if t.m > 3 {
        return Err(Error::Domain(format!("line index m = {} outside 0..=3", t.m)));
    }
    let kp_big = ctx.quarter_period_prime;
    if !(t.v >= 0.0 && t.v < kp_big) {
        return Err(Error::Domain(format!("v = {} outside [0, K' = {kp_big})", t.v)));
    }
    if t.m.is_multiple_of(2) && t.v > kp_big * (1.0 - POLE_MARGIN) {
        return Err(Error::Overflow(format!("v = {} within {POLE_MARGIN:e} K' of the pole at K' = {kp_big}", t.v)));
    }
    // Imaginary transformation: functions of iv with modulus k are
    // functions of v with the complementary modulus.
    Ok(jacobi_with_complement(t.v, ctx.k_prime, ctx.k))
}

/// `dn(mK + iv, k)`, real and positive on these lines.
pub fn dn_vertical(t: PhaseShift, ctx: &EllipticContext) -> Result<f64> {
    let j = check_line(t, ctx)?;
    let dn_even = j.dn / j.cn;
    Ok(if t.m.is_multiple_of(2) { dn_even } else { ctx.k_prime / dn_even })
}

/// `sn^2(mK + iv, k)`: negative on even lines, positive on odd ones.
pub fn sn_vertical_sq(t: PhaseShift, ctx: &EllipticContext) -> Result<f64> {
    let j = check_line(t, ctx)?;
    Ok(if t.m.is_multiple_of(2) {
        let sc = j.sn / j.cn;
        -sc * sc
    } else {
        1.0 / (j.dn * j.dn)
    })
}

/// Derivative of `dn_vertical` with respect to `v`.
fn dn_vertical_dv(t: PhaseShift, ctx: &EllipticContext) -> Result<f64> {
    let j = check_line(t, ctx)?;
    // d/dv [dn'/cn'] = k^2 sn' / cn'^2 for modulus k' functions.
    let even = ctx.k * ctx.k * j.sn / (j.cn * j.cn);
    if t.m.is_multiple_of(2) {
        Ok(even)
    } else {
        let g = j.dn / j.cn;
        Ok(-ctx.k_prime * even / (g * g))
    }
}

/// Locates the phase shift `t` with `dn t = sqrt(f)` (M < 1) or `1/sqrt(f)` (M > 1)
/// on the vertical line selected by the sign class of `p q` and by `sigma < pi`.
pub fn invert_phase_shift(f: f64, ctx: &EllipticContext, pq: PqClass, sigma_below_pi: bool) -> Result<PhaseShift> {
    if !(f.is_finite() && f > 0.0) {
        return Err(Error::PhaseShiftInconsistent(format!("f = {f} is not positive")));
    }
    let target = if ctx.modulus < 1.0 { f.sqrt() } else { 1.0 / f.sqrt() };
    let m = line_index(pq, sigma_below_pi);
    let increasing = m.is_multiple_of(2);
    let lo_end = 0.0;
    let hi_end = ctx.quarter_period_prime * (1.0 - POLE_MARGIN);
    let at = |v: f64| dn_vertical(PhaseShift { m, v }, ctx);
    let (low_val, high_val) = (at(lo_end)?, at(hi_end)?);
    let (range_min, range_max) = if increasing { (low_val, high_val) } else { (high_val, low_val) };
    if !(target > range_min && target < range_max) {
        return Err(Error::PhaseShiftInconsistent(format!(
            "dn target {target} outside ({range_min}, {range_max}) on line m = {m}"
        )));
    }

    let (mut lo, mut hi) = (lo_end, hi_end);
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        let above = at(mid)? > target;
        if above == increasing {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let mut v = 0.5 * (lo + hi);
    for _ in 0..NEWTON_STEPS {
        let t = PhaseShift { m, v };
        let residual = dn_vertical(t, ctx)? - target;
        if residual.abs() <= 1e-13 * target {
            break;
        }
        let slope = dn_vertical_dv(t, ctx)?;
        if slope == 0.0 || !slope.is_finite() {
            break;
        }
        let next = v - residual / slope;
        if !(next > lo_end && next < hi_end) {
            break;
        }
        v = next;
    }
    if v <= 0.0 {
        return Err(Error::PhaseShiftInconsistent(format!(
            "phase shift collapsed onto the line end v = 0 (target {target})"
        )));
    }
    Ok(PhaseShift { m, v })
}

/// Distance from `s` to the nearest point of the period lattice.
pub fn lattice_residual(s: Complex64, ctx: &EllipticContext) -> f64 {
    let (w1, w2) = ctx.generators();
    // Coordinates in the (w1, w2) basis; w1 is real.
    let n = s.im / w2.im;
    let m = (s.re - n * w2.re) / w1.re;
    let (m0, n0) = (m.round(), n.round());
    let mut best = f64::INFINITY;
    for dm in -1..=1 {
        for dn in -1..=1 {
            let p = w1 * (m0 + f64::from(dm)) + w2 * (n0 + f64::from(dn));
            best = best.min((s - p).norm());
        }
    }
    best
}
