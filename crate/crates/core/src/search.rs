//! Multi-start search for equimodular nets with prescribed central angles
//! `delta_i` and a prescribed state `theta_i`, followed by full verification.

use std::f64::consts::{PI, TAU};
use std::path::Path;

use nalgebra::{SMatrix, SVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::angles::{admissible_rsfm, derive_at, NetAngles, VertexGermAngles};
use crate::classify::{classify, ClassificationReport};
use crate::kinematics::{
    bricard_coefficients, recover_flat_angles, state_closure, vertex_equation_residuals, vertex_equation_rhs,
    wing_cosine, DihedralState, SearchParameters,
};
use crate::{Error, Result};

type Vec9 = SVector<f64, 9>;
type Mat9 = SMatrix<f64, 9, 9>;

/// Value substituted for residuals that are not finite.
pub const PENALTY: f64 = 1e6;

/// How starting points are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeedMode {
    /// Uniform `u`, `x`, `y`, `z` inside the configured bounds.
    Parameters,
    /// Uniform `alpha`, `beta`, `gamma` per vertex with the target `delta`,
    /// mapped to parameters and symmetrized.
    Angles,
    /// Uniform `alpha`, `gamma` per vertex, `beta` chosen so the vertex
    /// closes at the target state, then mapped and symmetrized as for `Angles`.
    Closing,
}

/// Tolerances of the search pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Solver stops once every scaled squared residual is below this.
    pub converge: f64,
    /// Unsquared relations, closure and classification of accepted nets.
    pub validate: f64,
    /// A sign assignment is rejected when its residual exceeds this.
    pub sign_reject: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { converge: 1e-11, validate: 1e-9, sign_reject: 1e-6 }
    }
}

/// Sampling box for [`SeedMode::Parameters`], also the accepted solution box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Bounds {
    pub u_min: f64,
    pub xyz_max: f64,
    /// Half-width of the excluded neighbourhoods of `0` and `-1`.
    pub guard: f64,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds { u_min: -10.0, xyz_max: 50.0, guard: 1e-3 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchConfig {
    /// Central angles in radians; they must sum to `2 pi`.
    pub deltas: [f64; 4],
    /// Dihedral angles of the target state in radians, each in `(0, pi)`.
    pub thetas: [f64; 4],
    pub seed_count: usize,
    pub rng_seed: u64,
    pub solver_max_iter: usize,
    /// Max-norm distance in parameter space below which solutions merge.
    pub dedupe_radius: f64,
    pub seed_mode: SeedMode,
    /// Draws the sampler may reject before giving up on one seed.
    pub max_draws_per_seed: u64,
    pub bounds: Bounds,
    pub tolerances: Tolerances,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            deltas: [PI / 2.0; 4],
            thetas: [PI / 2.0; 4],
            seed_count: 10_000,
            rng_seed: 1,
            solver_max_iter: 200,
            dedupe_radius: 1e-6,
            seed_mode: SeedMode::Closing,
            max_draws_per_seed: 10_000,
            bounds: Bounds::default(),
            tolerances: Tolerances::default(),
        }
    }
}

impl SearchConfig {
    pub fn from_degrees(deltas: [f64; 4], thetas: [f64; 4]) -> Self {
        SearchConfig { deltas: deltas.map(f64::to_radians), thetas: thetas.map(f64::to_radians), ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let defect = self.deltas.iter().sum::<f64>() - TAU;
        if defect.abs() > 1e-12 {
            return Err(Error::Domain(format!("deltas sum to 2pi {defect:+e}")));
        }
        if self.deltas.iter().any(|d| !(*d > 0.0 && *d < PI)) {
            return Err(Error::Domain("each delta must lie in (0, pi)".into()));
        }
        if self.thetas.iter().any(|t| !(*t > 0.0 && *t < PI)) {
            return Err(Error::Domain("each theta must lie in (0, pi)".into()));
        }
        if !(self.bounds.u_min < 0.0 && self.bounds.xyz_max > 1.0 && self.bounds.guard > 0.0) {
            return Err(Error::Domain(format!("bounds {:?} are empty", self.bounds)));
        }
        if self.solver_max_iter == 0 || self.max_draws_per_seed == 0 || !(self.dedupe_radius >= 0.0) {
            return Err(Error::Domain(
                "solver_max_iter and max_draws_per_seed must be positive and dedupe_radius nonnegative".into(),
            ));
        }
        Ok(())
    }

    /// Reads a JSON or TOML file, chosen by extension.
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.into(), source })?;
        let cfg: SearchConfig = if path.extension().is_some_and(|e| e == "toml") {
            toml::from_str(&text).map_err(|e| Error::Domain(format!("{}: {e}", path.display())))?
        } else {
            serde_json::from_str(&text).map_err(|source| Error::Json { path: path.into(), source })?
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn state(&self) -> DihedralState {
        DihedralState { theta: self.thetas }
    }
}

/// The squared relations with denominators cleared, followed by a zero row
/// that makes the system square. Each component is divided by the size of
/// its terms so one tolerance fits all.
pub fn residual_system(params: &SearchParameters, cfg: &SearchConfig) -> [f64; 9] {
    let a = bricard_coefficients(&cfg.state());
    let state = cfg.state();
    let u = params.u;
    let mut out = [0.0; 9];
    for i in 0..4 {
        let (x, y, z) = params.vertex(i);
        let den = 4.0 * x * y * u * (1.0 + z) * (1.0 + u * z);
        let num = 1.0 - y * z * u - x * z * u + x * y * u;
        let c2 = cfg.deltas[i].cos().powi(2) * den;
        out[i] = scaled(c2 - num * num, c2.abs() + num * num);
        let row = &a[i];
        let kin = row[0] + row[1] * y * z * u + row[2] * x * z * u + row[3] * x * y * u;
        let s2 = (state.get(i + 1).sin() * state.get(i).sin()).powi(2) * den;
        out[4 + i] = scaled(s2 - kin * kin, s2.abs() + kin * kin);
    }
    out
}

fn scaled(v: f64, size: f64) -> f64 {
    let r = v / size.max(1.0);
    if r.is_finite() {
        r
    } else {
        PENALTY
    }
}

fn max_abs(r: &[f64]) -> f64 {
    r.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Rejects parameters outside the box, near a guard, or violating the sign
/// constraints on `M = 1 - u` and `r, s, f = 1 + 1/x, 1 + 1/y, 1 + 1/z`.
pub fn params_admissible(p: &SearchParameters, bounds: &Bounds) -> bool {
    let u = p.u;
    if !(u > bounds.u_min && u < 1.0) || u.abs() < bounds.guard {
        return false;
    }
    (0..4).all(|i| {
        let (x, y, z) = p.vertex(i);
        [x, y, z].iter().all(|v| {
            v.abs() <= bounds.xyz_max
                && v.abs() >= bounds.guard
                && (v + 1.0).abs() >= bounds.guard
                && (u * v + 1.0).abs() >= bounds.guard
        }) && admissible_rsfm(1.0 + 1.0 / x, 1.0 + 1.0 / y, 1.0 + 1.0 / z, 1.0 - u)
    })
}

/// Deterministic stream of admissible starting points.
pub struct SeedSampler<'a> {
    cfg: &'a SearchConfig,
    rng: ChaCha8Rng,
    pub drawn: u64,
    pub accepted: u64,
}

impl<'a> SeedSampler<'a> {
    pub fn new(cfg: &'a SearchConfig, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
        rng.set_stream(stream);
        SeedSampler { cfg, rng, drawn: 0, accepted: 0 }
    }

    fn draw(&mut self) -> Option<SearchParameters> {
        let b = self.cfg.bounds;
        match self.cfg.seed_mode {
            SeedMode::Parameters => {
                let u = self.rng.random_range(b.u_min..1.0);
                let mut v = [0.0; 8];
                for x in &mut v {
                    *x = self.rng.random_range(-b.xyz_max..b.xyz_max);
                }
                Some(SearchParameters { u, x1: v[0], x3: v[1], y1: v[2], y2: v[3], z: [v[4], v[5], v[6], v[7]] })
            }
            SeedMode::Angles | SeedMode::Closing => {
                let state = self.cfg.state();
                let mut q = Vec::with_capacity(4);
                for i in 0..4 {
                    let mut g = VertexGermAngles {
                        alpha: self.rng.random_range(0.0..PI),
                        beta: self.rng.random_range(0.0..PI),
                        gamma: self.rng.random_range(0.0..PI),
                        delta: self.cfg.deltas[i],
                    };
                    if self.cfg.seed_mode == SeedMode::Closing {
                        let (xi, eta) = state.xi_eta(i + 1);
                        let c = wing_cosine(&g, xi, eta);
                        if !(-1.0..=1.0).contains(&c) {
                            return None;
                        }
                        g.beta = c.acos();
                    }
                    q.push(derive_at(&g, i + 1).ok()?);
                }
                let q: [_; 4] = q.try_into().ok()?;
                Some(SearchParameters::from_derived(&q))
            }
        }
    }

    pub fn acceptance_rate(&self) -> f64 {
        if self.drawn == 0 {
            0.0
        } else {
            self.accepted as f64 / self.drawn as f64
        }
    }
}

impl Iterator for SeedSampler<'_> {
    type Item = SearchParameters;

    fn next(&mut self) -> Option<SearchParameters> {
        // Bounded so a configuration with no admissible region terminates.
        for _ in 0..self.cfg.max_draws_per_seed {
            self.drawn += 1;
            if let Some(p) = self.draw() {
                if params_admissible(&p, &self.cfg.bounds) {
                    self.accepted += 1;
                    return Some(p);
                }
            }
        }
        None
    }
}

fn residual_vec(p: &Vec9, cfg: &SearchConfig) -> Vec9 {
    let params = SearchParameters::from_array((*p).into());
    Vec9::from(residual_system(&params, cfg))
}

fn jacobian(p: &Vec9, cfg: &SearchConfig) -> Mat9 {
    let mut j = Mat9::zeros();
    for k in 0..9 {
        let h = 1e-7 * (1.0 + p[k].abs());
        let mut hi = *p;
        let mut lo = *p;
        hi[k] += h;
        lo[k] -= h;
        let col = (residual_vec(&hi, cfg) - residual_vec(&lo, cfg)) / (2.0 * h);
        j.set_column(k, &col);
    }
    j
}

/// Levenberg-Marquardt from one start, run until the residuals reach the
/// convergence tolerance or stop decreasing. Returns the last iterate and
/// its largest residual.
pub fn levenberg_marquardt(seed: &SearchParameters, cfg: &SearchConfig) -> (SearchParameters, f64) {
    let tol = cfg.tolerances.converge;
    let mut p = Vec9::from(seed.to_array());
    let mut r = residual_vec(&p, cfg);
    let mut cost = r.norm_squared();
    let mut lambda = 1e-3;
    for _ in 0..cfg.solver_max_iter {
        if r.amax() <= tol {
            break;
        }
        let j = jacobian(&p, cfg);
        let jtj = j.transpose() * j;
        let g = j.transpose() * r;
        let mut improved = false;
        for _ in 0..12 {
            let mut a = jtj;
            for k in 0..9 {
                a[(k, k)] += lambda * jtj[(k, k)].max(1e-12);
            }
            let Some(step) = a.cholesky().map(|c| c.solve(&-g)) else {
                lambda *= 10.0;
                continue;
            };
            let cand = p + step;
            let rc = residual_vec(&cand, cfg);
            let cc = rc.norm_squared();
            if cc.is_finite() && cc < cost {
                p = cand;
                r = rc;
                cost = cc;
                lambda = (lambda / 3.0).max(1e-15);
                improved = true;
                break;
            }
            lambda *= 4.0;
        }
        if !improved {
            break;
        }
    }
    (SearchParameters::from_array(p.into()), r.amax())
}

/// The converged point from one start, or `None` when the residuals do not
/// reach the convergence tolerance.
pub fn solve_from_seed(seed: &SearchParameters, cfg: &SearchConfig) -> Option<SearchParameters> {
    let (p, r) = levenberg_marquardt(seed, cfg);
    (r <= cfg.tolerances.converge).then_some(p)
}

/// Largest residual of the unsquared relations for one choice of signs.
pub fn signed_residual(params: &SearchParameters, epsilons: [i8; 4], cfg: &SearchConfig) -> f64 {
    let state = cfg.state();
    let a = bricard_coefficients(&state);
    let mut worst = 0.0f64;
    for i in 0..4 {
        let (x, y, z) = params.vertex(i);
        let Some((cd, kin)) = vertex_equation_rhs(params.u, x, y, z, f64::from(epsilons[i]), &a[i]) else {
            return f64::INFINITY;
        };
        worst =
            worst.max((cfg.deltas[i].cos() - cd).abs()).max((state.get(i + 1).sin() * state.get(i).sin() - kin).abs());
    }
    worst
}

/// The unique sign assignment passing the unsquared relations, if there is one.
pub fn resolve_signs(params: &SearchParameters, cfg: &SearchConfig) -> std::result::Result<[i8; 4], usize> {
    let mut passing = Vec::new();
    let mut unclear = 0;
    for mask in 0..16u8 {
        let eps: [i8; 4] = std::array::from_fn(|k| if mask >> k & 1 == 0 { 1 } else { -1 });
        let r = signed_residual(params, eps, cfg);
        if r <= cfg.tolerances.validate {
            passing.push(eps);
        } else if r <= cfg.tolerances.sign_reject {
            unclear += 1;
        }
    }
    if passing.len() == 1 && unclear == 0 {
        Ok(passing[0])
    } else {
        Err(passing.len() + unclear)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifiedSolution {
    pub params: SearchParameters,
    pub epsilons: [i8; 4],
    pub net: NetAngles,
    pub report: ClassificationReport,
    /// Largest unsquared residual, closure included.
    pub residual_max: f64,
    pub seed_index: usize,
}

impl VerifiedSolution {
    pub fn modulus(&self) -> f64 {
        1.0 - self.params.u
    }
}

/// Why candidates were dropped, for the run summary.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    pub seeds: usize,
    pub sampler_drawn: u64,
    pub sampler_accepted: u64,
    /// Seeds for which the sampler found no admissible start.
    pub sampler_exhausted: usize,
    pub not_converged: usize,
    pub inadmissible: usize,
    /// More than one sign assignment fits, or one sits near the threshold.
    pub ambiguous_signs: usize,
    /// Roots of the squared system that no sign assignment fits.
    pub no_consistent_sign: usize,
    pub non_real_angles: usize,
    pub unverified: usize,
    pub not_equimodular: usize,
    /// Passed everything up to the period condition and failed only that.
    pub period_rejected: usize,
    pub duplicates: usize,
    pub verified: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub solutions: Vec<VerifiedSolution>,
    pub stats: SearchStats,
}

enum Rejection {
    Exhausted,
    NotConverged,
    Inadmissible,
    AmbiguousSigns,
    NoSign,
    NonReal,
    Unverified,
    NotEquimodular,
    Period,
}

struct SeedResult {
    drawn: u64,
    accepted: u64,
    outcome: std::result::Result<VerifiedSolution, Rejection>,
}

fn process_seed(index: usize, cfg: &SearchConfig) -> SeedResult {
    let mut sampler = SeedSampler::new(cfg, index as u64);
    let seed = sampler.next();
    let (drawn, accepted) = (sampler.drawn, sampler.accepted);
    let outcome = seed.ok_or(Rejection::Exhausted).and_then(|s| verify(index, &s, cfg));
    SeedResult { drawn, accepted, outcome }
}

fn verify(
    index: usize,
    seed: &SearchParameters,
    cfg: &SearchConfig,
) -> std::result::Result<VerifiedSolution, Rejection> {
    let params = solve_from_seed(seed, cfg).ok_or(Rejection::NotConverged)?;
    if !params_admissible(&params, &Bounds { guard: 0.0, ..cfg.bounds }) {
        return Err(Rejection::Inadmissible);
    }
    let epsilons =
        resolve_signs(&params, cfg).map_err(|n| if n == 0 { Rejection::NoSign } else { Rejection::AmbiguousSigns })?;
    let net = recover_flat_angles(&params, epsilons).map_err(|_| Rejection::NonReal)?;
    let tol = cfg.tolerances.validate;
    let state = cfg.state();
    let delta_dev = net.vertices.iter().zip(cfg.deltas).map(|(g, d)| (g.delta - d).abs()).fold(0.0, f64::max);
    let eq = vertex_equation_residuals(&net, &state).map_err(|_| Rejection::Unverified)?;
    let residual_max = max_abs(&eq).max(state_closure(&net, &state)).max(delta_dev);
    if residual_max > tol {
        return Err(Rejection::Unverified);
    }
    let report = classify(&net, tol).map_err(|_| Rejection::NotEquimodular)?;
    if !report.verdict {
        return Err(if report.phase_shifts.is_some() { Rejection::Period } else { Rejection::NotEquimodular });
    }
    Ok(VerifiedSolution { params, epsilons, net, report, residual_max, seed_index: index })
}

fn param_distance(a: &SearchParameters, b: &SearchParameters) -> f64 {
    a.to_array().iter().zip(b.to_array()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Sample, solve, filter, verify. Seeds are independent and processed in
/// parallel; results are merged in seed order, so the output does not
/// depend on the thread count.
pub fn run_search(cfg: &SearchConfig) -> Result<SearchOutcome> {
    cfg.validate()?;
    let results: Vec<SeedResult> = (0..cfg.seed_count).into_par_iter().map(|i| process_seed(i, cfg)).collect();
    let mut stats = SearchStats { seeds: cfg.seed_count, ..Default::default() };
    let mut solutions: Vec<VerifiedSolution> = Vec::new();
    for r in results {
        stats.sampler_drawn += r.drawn;
        stats.sampler_accepted += r.accepted;
        match r.outcome {
            Ok(sol) => {
                if solutions.iter().any(|s| param_distance(&s.params, &sol.params) < cfg.dedupe_radius) {
                    stats.duplicates += 1;
                } else {
                    solutions.push(sol);
                }
            }
            Err(Rejection::Exhausted) => stats.sampler_exhausted += 1,
            Err(Rejection::NotConverged) => stats.not_converged += 1,
            Err(Rejection::Inadmissible) => stats.inadmissible += 1,
            Err(Rejection::AmbiguousSigns) => stats.ambiguous_signs += 1,
            Err(Rejection::NoSign) => stats.no_consistent_sign += 1,
            Err(Rejection::NonReal) => stats.non_real_angles += 1,
            Err(Rejection::Unverified) => stats.unverified += 1,
            Err(Rejection::NotEquimodular) => stats.not_equimodular += 1,
            Err(Rejection::Period) => stats.period_rejected += 1,
        }
    }
    stats.verified = solutions.len();
    solutions.sort_by(|a, b| a.residual_max.total_cmp(&b.residual_max).then(a.seed_index.cmp(&b.seed_index)));
    Ok(SearchOutcome { solutions, stats })
}

/// Rounds to the given number of significant digits.
pub fn round_sig(v: f64, digits: usize) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return v;
    }
    format!("{:.*e}", digits - 1, v).parse().unwrap_or(v)
}

/// Output record of one solution: angles in radians and degrees, 15 significant digits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionRecord {
    pub modulus: f64,
    pub params: [f64; 9],
    pub epsilons: [i8; 4],
    /// Rows `(alpha, beta, gamma, delta)` per vertex.
    pub angles_rad: [[f64; 4]; 4],
    pub angles_deg: [[f64; 4]; 4],
    pub residual_max: f64,
    pub period_residual: Option<f64>,
    pub period_signs: Option<[i8; 3]>,
    pub seed_index: usize,
}

impl From<&VerifiedSolution> for SolutionRecord {
    fn from(s: &VerifiedSolution) -> Self {
        let r = |v: f64| round_sig(v, 15);
        SolutionRecord {
            modulus: r(s.modulus()),
            params: s.params.to_array().map(r),
            epsilons: s.epsilons,
            angles_rad: s.net.vertices.map(|g| g.as_array().map(r)),
            angles_deg: s.net.to_degrees().map(|row| row.map(r)),
            residual_max: r(s.residual_max),
            period_residual: s.report.period_residual.map(r),
            period_signs: s.report.period_signs,
            seed_index: s.seed_index,
        }
    }
}
