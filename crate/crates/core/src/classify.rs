//! The equimodular elliptic predicate, boundary-strip switching and numeric
//! exclusion tests for neighbouring classes.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::angles::{derive_net, failing_combination, NetAngles};
use crate::elliptic::{invert_phase_shift, lattice_residual, EllipticContext, PhaseShift, PqClass};
use crate::error::{Error, Result};
use crate::kinematics::{wrap_angle, DihedralState};

/// Tolerance for nets given in closed form.
pub const CLOSED_FORM_TOL: f64 = 1e-9;
/// Tolerance for nets typed in from truncated decimals.
pub const TRUNCATED_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub elliptic: bool,
    pub moduli_equal: bool,
    pub amplitudes_match: bool,
    pub phase_shifts: Option<[PhaseShift; 4]>,
    pub period_signs: Option<[i8; 3]>,
    pub period_residual: Option<f64>,
    pub verdict: bool,
    pub moduli: [f64; 4],
    pub moduli_deviation: f64,
    pub amplitudes_deviation: f64,
    /// The common modulus used for the phase shifts.
    pub modulus: Option<f64>,
    pub diagnostic: Option<String>,
}

/// Runs the three equimodularity conditions on a net.
pub fn classify(net: &NetAngles, tol: f64) -> Result<ClassificationReport> {
    for (i, g) in net.vertices.iter().enumerate() {
        if let Some(combination) = failing_combination(g) {
            return Err(Error::NotElliptic { vertex: i + 1, combination });
        }
    }
    let q = derive_net(net)?;
    let moduli = q.map(|d| d.m);
    let moduli_deviation =
        moduli.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b)) - moduli.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    let amplitudes_deviation =
        [(q[0].r - q[1].r).abs(), (q[0].s - q[3].s).abs(), (q[2].r - q[3].r).abs(), (q[1].s - q[2].s).abs()]
            .into_iter()
            .fold(0.0, f64::max);
    let mut report = ClassificationReport {
        elliptic: true,
        moduli_equal: moduli_deviation <= tol,
        amplitudes_match: amplitudes_deviation <= tol,
        phase_shifts: None,
        period_signs: None,
        period_residual: None,
        verdict: false,
        moduli,
        moduli_deviation,
        amplitudes_deviation,
        modulus: None,
        diagnostic: None,
    };
    if !(report.moduli_equal && report.amplitudes_match) {
        report.diagnostic = Some("moduli or amplitudes differ; phase shifts not computed".into());
        return Ok(report);
    }
    let m = moduli.iter().sum::<f64>() / 4.0;
    report.modulus = Some(m);
    let ctx = match EllipticContext::new(m) {
        Ok(c) => c,
        Err(e) => {
            report.diagnostic = Some(e.to_string());
            return Ok(report);
        }
    };
    let mut shifts = [PhaseShift { m: 0, v: 0.0 }; 4];
    for (i, d) in q.iter().enumerate() {
        let pq = PqClass::from_amplitudes(d.r, d.s);
        match invert_phase_shift(d.f, &ctx, pq, d.sigma < PI) {
            Ok(t) => shifts[i] = t,
            Err(e) => {
                report.diagnostic = Some(format!("vertex {}: {e}", i + 1));
                return Ok(report);
            }
        }
    }
    report.phase_shifts = Some(shifts);
    let (signs, residual) = best_period_signs(&shifts, &ctx);
    report.period_residual = Some(residual);
    if residual <= tol {
        report.period_signs = Some(signs);
        report.verdict = true;
    } else {
        report.diagnostic = Some(format!("phase-shift sum misses the lattice by {residual:e}"));
    }
    Ok(report)
}

/// The sign triple minimizing the lattice distance of `t1 + e1 t2 + e2 t3 + e3 t4`.
pub fn best_period_signs(shifts: &[PhaseShift; 4], ctx: &EllipticContext) -> ([i8; 3], f64) {
    let t = shifts.map(|s| s.to_complex(ctx));
    let mut best = ([1, 1, 1], f64::INFINITY);
    for e1 in [1i8, -1] {
        for e2 in [1i8, -1] {
            for e3 in [1i8, -1] {
                let sum: Complex64 = t[0] + t[1] * f64::from(e1) + t[2] * f64::from(e2) + t[3] * f64::from(e3);
                let r = lattice_residual(sum, ctx);
                if r < best.1 {
                    best = ([e1, e2, e3], r);
                }
            }
        }
    }
    best
}

/// One of the four boundary strips of the 3x3 net.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Strip {
    /// Faces along `A4A1`; complements `beta, gamma` at vertices 1 and 4.
    Right,
    /// Faces along `A2A3`; complements `beta, gamma` at vertices 2 and 3.
    Left,
    /// Faces along `A3A4`; complements `alpha, beta` at vertices 3 and 4.
    Top,
    /// Faces along `A1A2`; complements `alpha, beta` at vertices 1 and 2.
    Bottom,
}

impl Strip {
    pub const ALL: [Strip; 4] = [Strip::Right, Strip::Left, Strip::Top, Strip::Bottom];

    /// Index (0-based) of the dihedral angle shifted by `pi`.
    pub fn dihedral_index(self) -> usize {
        match self {
            Strip::Bottom => 0,
            Strip::Left => 1,
            Strip::Top => 2,
            Strip::Right => 3,
        }
    }

    fn vertices(self) -> [usize; 2] {
        match self {
            Strip::Right => [0, 3],
            Strip::Left => [1, 2],
            Strip::Top => [2, 3],
            Strip::Bottom => [0, 1],
        }
    }
}

/// Replaces the strip's wing by its opposite ray: four flat angles are complemented.
pub fn switch_strip(net: &NetAngles, which: Strip) -> NetAngles {
    let mut out = *net;
    for i in which.vertices() {
        let g = &mut out.vertices[i];
        g.beta = PI - g.beta;
        match which {
            Strip::Right | Strip::Left => g.gamma = PI - g.gamma,
            Strip::Top | Strip::Bottom => g.alpha = PI - g.alpha,
        }
    }
    out
}

/// The dihedral angles seen after switching `which`.
pub fn switch_state(state: &DihedralState, which: Strip) -> DihedralState {
    let mut theta = state.theta;
    let k = which.dihedral_index();
    theta[k] = wrap_angle(theta[k] - PI);
    DihedralState::new(theta)
}

/// All 16 subsets of strips, as bit masks over [`Strip::ALL`].
pub fn strip_variants() -> impl Iterator<Item = Vec<Strip>> {
    (0u8..16).map(|mask| Strip::ALL.iter().enumerate().filter(|(k, _)| mask & (1 << k) != 0).map(|(_, s)| *s).collect())
}

fn apply_variant(net: &NetAngles, states: &[DihedralState], strips: &[Strip]) -> (NetAngles, Vec<DihedralState>) {
    let mut n = *net;
    let mut s = states.to_vec();
    for &st in strips {
        n = switch_strip(&n, st);
        for x in &mut s {
            *x = switch_state(x, st);
        }
    }
    (n, s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExclusivityReport {
    pub orthodiagonal_ruled_out: bool,
    pub conjugate_modular_ruled_out: bool,
    pub trivial_ruled_out: bool,
    pub linear_compound_ruled_out: bool,
    pub strip_variants_checked: usize,
}

/// Numeric tolerances of [`exclusivity`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExclusivityConfig {
    /// Absolute tolerance of the angle identities.
    pub tol: f64,
    /// Relative spread below which a sampled quantity counts as constant.
    pub constancy_tol: f64,
}

impl Default for ExclusivityConfig {
    fn default() -> Self {
        ExclusivityConfig { tol: 1e-9, constancy_tol: 1e-8 }
    }
}

pub const MIN_EXCLUSIVITY_SAMPLES: usize = 8;

/// Standard deviation over root mean square; zero for a constant sequence.
pub fn relative_spread(v: &[f64]) -> f64 {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    let rms = (v.iter().map(|x| x * x).sum::<f64>() / n).sqrt();
    if rms == 0.0 {
        0.0
    } else {
        var.sqrt() / rms
    }
}

/// Numeric rule-out of the orthodiagonal, conjugate-modular, trivial and
/// linear compound classes over all 16 strip variants.
pub fn exclusivity(net: &NetAngles, samples: &[DihedralState], cfg: &ExclusivityConfig) -> Result<ExclusivityReport> {
    if samples.len() < MIN_EXCLUSIVITY_SAMPLES {
        return Err(Error::TooFewSamples { needed: MIN_EXCLUSIVITY_SAMPLES, got: samples.len() });
    }
    let mut rep = ExclusivityReport {
        orthodiagonal_ruled_out: true,
        conjugate_modular_ruled_out: true,
        trivial_ruled_out: true,
        linear_compound_ruled_out: true,
        strip_variants_checked: 0,
    };
    for strips in strip_variants() {
        let (n, states) = apply_variant(net, samples, &strips);
        rep.strip_variants_checked += 1;

        let ortho =
            n.vertices.iter().any(|g| (g.alpha.cos() * g.gamma.cos() - g.beta.cos() * g.delta.cos()).abs() > cfg.tol);
        rep.orthodiagonal_ruled_out &= ortho;

        let q = derive_net(&n)?;
        let conj = (0..4).any(|i| (1.0 / q[i].m + 1.0 / q[(i + 1) % 4].m - 1.0).abs() > cfg.tol);
        rep.conjugate_modular_ruled_out &= conj;

        let trivial = (0..4).all(|k| {
            let v: Vec<f64> = states.iter().map(|s| s.theta[k]).collect();
            let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            hi - lo > cfg.tol
        });
        rep.trivial_ruled_out &= trivial;

        let w1: Vec<f64> = states.iter().map(|s| crate::qsnet::cot_half(s.theta[0])).collect();
        let w3: Vec<f64> = states.iter().map(|s| crate::qsnet::cot_half(s.theta[2])).collect();
        let ratio: Vec<f64> = w1.iter().zip(&w3).map(|(a, b)| a / b).collect();
        let product: Vec<f64> = w1.iter().zip(&w3).map(|(a, b)| a * b).collect();
        let lc = relative_spread(&ratio) > cfg.constancy_tol && relative_spread(&product) > cfg.constancy_tol;
        rep.linear_compound_ruled_out &= lc;
    }
    Ok(rep)
}
