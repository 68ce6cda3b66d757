//! Request and response types shared by the command line and the HTTP service.

use std::path::Path;

use kokonet::angles::NetAngles;
use kokonet::classify::{classify, ClassificationReport, CLOSED_FORM_TOL};
use kokonet::geometry::{BundleCheck, EdgeLengths, FlexionBundle, Provenance};
use kokonet::kinematics::{flexion_trace, DihedralState};
use kokonet::qsnet::{cot_half, qs_flexion, QsSeed, Sign};
use kokonet::search::{run_search, SearchConfig, SearchStats, SolutionRecord};
use kokonet::{Error, Result};
use serde::{Deserialize, Serialize};

use crate::angle::Angle;

/// A net as accepted on input: radians as stored by every writer, a table in
/// degrees, or any document with a `net` field (bundles, search solutions).
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum NetInput {
    Radians(NetAngles),
    Degrees { angles_deg: [[f64; 4]; 4] },
    Wrapped { net: NetAngles },
}

impl NetInput {
    pub fn resolve(&self) -> Result<NetAngles> {
        match self {
            NetInput::Radians(n) | NetInput::Wrapped { net: n } => {
                for g in &n.vertices {
                    kokonet::angles::VertexGermAngles::new(g.alpha, g.beta, g.gamma, g.delta)?;
                }
                Ok(*n)
            }
            NetInput::Degrees { angles_deg } => NetAngles::from_degrees(*angles_deg),
        }
    }
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.into(), source })?;
    serde_json::from_str(&text).map_err(|source| Error::Json { path: path.into(), source })
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("output serializes")
}

fn default_samples() -> usize {
    50
}

fn default_branch() -> Sign {
    Sign::Plus
}

fn resolve_lengths(given: Option<EdgeLengths>, net: &NetAngles) -> Result<EdgeLengths> {
    given.map_or_else(|| EdgeLengths::convex_default(net), Ok)
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct QsRequest {
    pub alpha: Angle,
    pub beta: Angle,
    pub gamma: Angle,
    #[serde(default = "default_branch")]
    pub branch: Sign,
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Unit lengths, or fitted wings where unit wings give a non-convex quad.
    #[serde(default)]
    pub lengths: Option<EdgeLengths>,
}

pub struct QsOutput {
    pub report: ClassificationReport,
    pub bundle: FlexionBundle,
}

/// Builds the net, samples its closed-form flexion and embeds every sample.
pub fn run_qs(req: &QsRequest) -> Result<QsOutput> {
    let seed = QsSeed { alpha1: req.alpha.0, beta1: req.beta.0, gamma1: req.gamma.0 };
    let fl = qs_flexion(&seed, req.branch)?;
    let report = classify(&fl.net, CLOSED_FORM_TOL)?;
    let states = fl.sample_ts(req.samples).into_iter().map(|t| Ok((t, fl.eval(t)?))).collect::<Result<Vec<_>>>()?;
    let lengths = resolve_lengths(req.lengths, &fl.net)?;
    let bundle = FlexionBundle::build(&fl.net, &lengths, Some(req.branch), Provenance::ClosedForm, &states)?;
    Ok(QsOutput { report, bundle })
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct ClassifyRequest {
    pub net: NetInput,
    #[serde(default)]
    pub tol: Option<f64>,
}

pub fn run_classify(req: &ClassifyRequest) -> Result<ClassificationReport> {
    let tol = req.tol.unwrap_or(CLOSED_FORM_TOL);
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    classify(&req.net.resolve()?, tol)
}

/// File and response format of a search run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    pub config: SearchConfig,
    pub stats: SearchStats,
    pub solutions: Vec<SolutionRecord>,
}

pub fn run_search_report(cfg: &SearchConfig) -> Result<SearchReport> {
    let out = run_search(cfg)?;
    Ok(SearchReport {
        config: cfg.clone(),
        stats: out.stats,
        solutions: out.solutions.iter().map(Into::into).collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct FlexRequest {
    pub net: NetInput,
    /// A closing state; its `cot(theta_1 / 2)` is where the trace starts.
    pub start: [Angle; 4],
    /// Last value of `t = cot(theta_1 / 2)`.
    pub t_end: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Unit lengths, or fitted wings where unit wings give a non-convex quad.
    #[serde(default)]
    pub lengths: Option<EdgeLengths>,
}

pub struct FlexOutput {
    pub bundle: FlexionBundle,
    /// Set when the trace stopped before `t_end`.
    pub diagnostic: Option<String>,
}

/// Traces from the start state to `t_end` in equal steps of `t`.
pub fn run_flex(req: &FlexRequest) -> Result<FlexOutput> {
    let net = req.net.resolve()?;
    let start = DihedralState::new(req.start.map(|a| a.0));
    if req.samples == 0 || !req.t_end.is_finite() {
        return Err(Error::Domain("samples must be positive and t_end finite".into()));
    }
    let t0 = cot_half(start.theta[0]);
    let ts: Vec<f64> = (1..=req.samples).map(|k| t0 + (req.t_end - t0) * k as f64 / req.samples as f64).collect();
    let trace = flexion_trace(&net, &start, &ts)?;
    let mut states = vec![(t0, start)];
    states.extend(trace.t.iter().copied().zip(trace.states.iter().copied()));
    let lengths = resolve_lengths(req.lengths, &net)?;
    let bundle = FlexionBundle::build(&net, &lengths, None, Provenance::Traced, &states)?;
    Ok(FlexOutput { bundle, diagnostic: trace.diagnostic })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub valid: bool,
    pub self_intersecting_samples: Vec<usize>,
    pub check: BundleCheck,
}

impl CheckReport {
    pub fn summary(&self) -> String {
        let n = self.check.samples;
        let validity = if self.valid { "measure-back ok" } else { "measure-back FAILED" };
        if self.self_intersecting_samples.is_empty() {
            format!("{validity}; no self-intersection across {n} samples")
        } else {
            format!("{validity}; self-intersection at {} of {n} samples", self.self_intersecting_samples.len())
        }
    }
}

pub fn run_check(bundle: &FlexionBundle) -> CheckReport {
    let check = bundle.check();
    let self_intersecting_samples =
        check.self_intersecting.iter().enumerate().filter(|(_, f)| **f).map(|(k, _)| k).collect();
    CheckReport { valid: check.valid(), self_intersecting_samples, check }
}
