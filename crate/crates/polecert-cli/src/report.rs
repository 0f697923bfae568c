use crate::request::{DesignRequest, PlantCoeffs};
use polecert_core::placement::{ControllerDesign, ExpEstimate, RegionLabel, RootPair, RootTriple, TauSearch};
use polecert_core::spectrum::SpectrumReport;
use serde::Serialize;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ToolInfo {
    pub name: &'static str,
    pub version: &'static str,
}

pub fn tool_info() -> ToolInfo {
    ToolInfo { name: "polecert", version: env!("CARGO_PKG_VERSION") }
}

#[derive(Debug, Clone, Serialize)]
pub struct SimSummary {
    pub history: String,
    pub horizon: f64,
    pub step: f64,
    pub samples: usize,
    pub terminal_value: f64,
    pub fit_window: [f64; 2],
    /// Least-squares envelope slope; absent when the signal sits at the
    /// numeric floor or the window holds too few delay intervals.
    pub fitted_decay_rate: Option<f64>,
}

/// The self-contained design report: re-running the echoed `request`
/// reproduces every number bit-exactly.
#[derive(Debug, Clone, Serialize)]
pub struct ReportDocument {
    pub tool: ToolInfo,
    pub request: DesignRequest,
    /// Synthesized gains; carries the dominance certificate.
    pub design: ControllerDesign,
    pub spectrum: Option<SpectrumReport>,
    pub estimate: Option<ExpEstimate>,
    pub simulation: Option<SimSummary>,
}

#[derive(Debug, Clone, Serialize)]
pub struct GainNorms {
    pub max: f64,
    pub sum: f64,
    pub euclid: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ComparisonInequalities {
    pub tau_pd_gt_tau_p: bool,
    pub p_gain_gt_max: bool,
    pub p_gain_gt_sum: bool,
    pub p_gain_gt_euclid: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ComparisonBranch {
    pub design: ControllerDesign,
    pub simulation: SimSummary,
    /// Degeneracy flag, e.g. the coincident-pair design.
    pub note: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ComparisonReport {
    pub tool: ToolInfo,
    pub plant: PlantCoeffs,
    pub pd: ComparisonBranch,
    pub p: ComparisonBranch,
    pub tau_pd: f64,
    pub tau_p: f64,
    pub tau_ratio: f64,
    pub pd_gain_norms: GainNorms,
    pub p_gain: f64,
    pub inequalities: ComparisonInequalities,
}

#[derive(Debug, Clone, Serialize)]
pub struct TauStarReport {
    pub tool: ToolInfo,
    pub roots: RootTriple,
    pub tau_star: f64,
    /// a(τ*); zero up to solver tolerance.
    pub a_at_tau_star: f64,
    pub equidistributed: bool,
    pub a_target: Option<f64>,
    /// Present when an a-target was requested.
    pub search: Option<TauSearch>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RegionThresholds {
    pub phi1: f64,
    pub phi2: f64,
    pub phi3: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RegionsReport {
    pub tool: ToolInfo,
    pub pair: RootPair,
    pub a: f64,
    pub tau: f64,
    pub lambda3: f64,
    pub thresholds: RegionThresholds,
    pub label: RegionLabel,
}
