use serde::{Deserialize, Serialize};

use crate::bubbles::{ground_state_level, sobolev_constants};
use crate::error::Result;

use super::nehari::MountainPassResult;
use super::{Regime, SolverConfig};

pub const SUBCRITICAL_THRESHOLD_LABEL: &str = "+∞ (global PS)";

/// A computed level against the compactness threshold of its regime.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub regime: Regime,
    pub s: f64,
    pub s_trace: f64,
    pub c_inf: f64,
    /// `None` in the subcritical regime, where every level is compact.
    pub threshold: Option<f64>,
    pub threshold_label: String,
    pub level: f64,
    /// `threshold − level`, `None` when the threshold is infinite.
    pub margin: Option<f64>,
    /// `c_∞ < S^{N/2}/(2N)`
    pub cross_ordering: bool,
}

impl ThresholdReport {
    /// Below the threshold (always true without one).
    pub fn below_threshold(&self) -> bool {
        self.margin.is_none_or(|m| m > 0.0)
    }
}

pub fn threshold_report(
    result: &MountainPassResult,
    cfg: &SolverConfig,
) -> Result<ThresholdReport> {
    let dim = cfg.dim;
    let n = dim as f64;
    let consts = sobolev_constants(dim)?;
    let c_inf = ground_state_level(dim)?;
    let regime = cfg.regime();
    let threshold = regime.threshold(dim)?;
    Ok(ThresholdReport {
        regime,
        s: consts.s,
        s_trace: consts.s_trace,
        c_inf,
        threshold,
        threshold_label: match threshold {
            Some(t) => format!("{t:.17e}"),
            None => SUBCRITICAL_THRESHOLD_LABEL.to_string(),
        },
        level: result.level,
        margin: threshold.map(|t| t - result.level),
        cross_ordering: c_inf < consts.s.powf(n / 2.0) / (2.0 * n),
    })
}
