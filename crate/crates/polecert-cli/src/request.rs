use crate::fail::{input_err, Failure};
use polecert_core::placement::ControllerKind;
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Hopfield plant coefficients; the linearized feedback coefficient is ν − μ.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlantCoeffs {
    pub nu: f64,
    pub mu: f64,
}

/// Optional request knobs. Command-line flags override file values; the
/// report echoes the resolved values so a re-run needs no flags.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RequestOptions {
    /// Decay-bound margin ε (default 0.1).
    pub epsilon: Option<f64>,
    /// Certification height (default 20π/τ).
    pub im_limit: Option<f64>,
    /// Simulation horizon; absent means no simulation summary.
    pub horizon: Option<f64>,
    /// Integrator step (default τ/64).
    pub step: Option<f64>,
    /// Initial history expression (default "1+sin(t)").
    pub history: Option<String>,
}

/// A design request document. `roots` carries two values for a P controller
/// and three for a PD controller, strictly decreasing when distinct.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignRequest {
    pub plant: PlantCoeffs,
    pub controller: ControllerKind,
    pub roots: Vec<f64>,
    #[serde(default)]
    pub options: RequestOptions,
}

impl DesignRequest {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| input_err(format!("{}: {e}", path.display())))?;
        let req: DesignRequest = serde_json::from_str(&text)
            .map_err(|e| input_err(format!("{}: {e}", path.display())))?;
        req.validate()?;
        Ok(req)
    }

    pub fn validate(&self) -> Result<(), Failure> {
        if !self.roots.iter().all(|r| r.is_finite()) {
            return Err(input_err("roots: every value must be finite"));
        }
        let o = &self.options;
        for (name, v) in [
            ("epsilon", o.epsilon),
            ("im_limit", o.im_limit),
            ("horizon", o.horizon),
            ("step", o.step),
        ] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(input_err(format!(
                        "options.{name}: must be positive and finite, got {v}"
                    )));
                }
            }
        }
        Ok(())
    }
}
