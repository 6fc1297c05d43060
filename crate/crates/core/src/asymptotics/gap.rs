//! Energy of rescaled bubbles on a bounded curved domain against the
//! compactness thresholds.

use serde::{Deserialize, Serialize};

use crate::bubbles::{
    critical_exponent, critical_trace_exponent, ground_state_level, sobolev_constants, BubbleKind,
    BubbleSpec, Density, EnergyBreakdown,
};
use crate::error::{Error, Result};
use crate::fibering::{fibering_maximizer, fibering_value};
use crate::quadrature::{bounded_model_boundary, bounded_model_volume, BoundaryModel, SphereRule};

/// Which exponents are critical.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GapRegime {
    /// `r = 2*`, `q < 2_*`; interior bubble; threshold `S^{N/2}/(2N)`.
    VolCrit,
    /// `r < 2*`, `q = 2_*`; trace bubble; threshold `S_T^{N-1}/(2(N-1))`.
    TraceCrit,
    /// `r = 2*`, `q = 2_*`; corner bubble; threshold `c_∞`.
    DoubleCrit,
}

impl GapRegime {
    pub const ALL: [GapRegime; 3] = [
        GapRegime::VolCrit,
        GapRegime::TraceCrit,
        GapRegime::DoubleCrit,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GapRegime::VolCrit => "vol-crit",
            GapRegime::TraceCrit => "trace-crit",
            GapRegime::DoubleCrit => "double-crit",
        }
    }

    pub fn bubble(self) -> BubbleKind {
        match self {
            GapRegime::VolCrit => BubbleKind::Interior,
            GapRegime::TraceCrit => BubbleKind::Trace,
            GapRegime::DoubleCrit => BubbleKind::Corner,
        }
    }

    /// Compactness threshold of the regime in dimension `dim`.
    pub fn threshold(self, dim: usize) -> Result<f64> {
        let n = dim as f64;
        Ok(match self {
            GapRegime::VolCrit => sobolev_constants(dim)?.s.powf(n / 2.0) / (2.0 * n),
            GapRegime::TraceCrit => {
                sobolev_constants(dim)?.s_trace.powf(n - 1.0) / (2.0 * (n - 1.0))
            }
            GapRegime::DoubleCrit => ground_state_level(dim)?,
        })
    }

    /// `(r, q)` for the regime, filling the critical slots.
    pub fn exponents(self, dim: usize, subcritical: Option<f64>) -> Result<(f64, f64)> {
        let crit = critical_exponent(dim);
        let trace = critical_trace_exponent(dim);
        let need = |cap: f64| -> Result<f64> {
            match subcritical {
                Some(s) if s > 2.0 && s < cap => Ok(s),
                Some(s) => Err(Error::Parameter {
                    name: "subcritical_exponent",
                    value: s,
                    reason: "must lie strictly between 2 and the critical exponent",
                }),
                None => Err(Error::Parameter {
                    name: "subcritical_exponent",
                    value: f64::NAN,
                    reason: "this regime needs the subcritical exponent",
                }),
            }
        };
        match self {
            GapRegime::VolCrit => Ok((crit, need(trace)?)),
            GapRegime::TraceCrit => Ok((need(crit)?, trace)),
            GapRegime::DoubleCrit => match subcritical {
                None => Ok((crit, trace)),
                Some(s) => Err(Error::Parameter {
                    name: "subcritical_exponent",
                    value: s,
                    reason: "both exponents are critical in this regime",
                }),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapOptions {
    /// Radius of the ball that bounds the model domain.
    pub radius: f64,
    pub rule: SphereRule,
}

impl Default for GapOptions {
    fn default() -> Self {
        GapOptions {
            radius: 1.0,
            rule: SphereRule::Auto,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdGap {
    pub regime: GapRegime,
    pub dim: usize,
    pub eps: f64,
    pub t_eps: f64,
    pub sup_level: f64,
    pub threshold: f64,
    /// `threshold − sup_level`
    pub gap: f64,
    /// Energy terms of the unscaled bubble on the domain.
    pub energy: EnergyBreakdown,
}

pub fn threshold_gap(
    regime: GapRegime,
    dim: usize,
    model: &BoundaryModel,
    eps: f64,
    subcritical_exponent: Option<f64>,
) -> Result<ThresholdGap> {
    threshold_gap_with(
        regime,
        dim,
        model,
        eps,
        subcritical_exponent,
        &GapOptions::default(),
    )
}

/// `sup_t I(t u_ε)` on the model domain intersected with `B_R`, compared
/// with the regime's threshold.
pub fn threshold_gap_with(
    regime: GapRegime,
    dim: usize,
    model: &BoundaryModel,
    eps: f64,
    subcritical_exponent: Option<f64>,
    opts: &GapOptions,
) -> Result<ThresholdGap> {
    if model.dim() != dim {
        return Err(Error::Dimension {
            dim: model.dim(),
            reason: "boundary model dimension differs from the requested one",
        });
    }
    if !(eps > 0.0 && eps < model.patch_radius() / 10.0) {
        return Err(Error::Parameter {
            name: "eps",
            value: eps,
            reason: "must be positive and below a tenth of the patch radius",
        });
    }
    let (r, q) = regime.exponents(dim, subcritical_exponent)?;
    let spec = BubbleSpec::new(regime.bubble(), dim, eps)?;
    let vol = |d: Density| bounded_model_volume(&spec, d, model, opts.radius, opts.rule);
    let dirichlet = vol(Density::GradSq)?;
    let mass = vol(Density::Power(2.0))?;
    let volume_nl = vol(Density::Power(r))?;
    let boundary_nl = bounded_model_boundary(&spec, q, model, opts.radius, opts.rule)?;
    let energy = EnergyBreakdown::new(dirichlet, Some(mass), volume_nl, boundary_nl, r, q);

    let a = dirichlet + mass;
    let t_eps = fibering_maximizer(a, volume_nl, r, boundary_nl, q)?;
    let sup_level = fibering_value(t_eps, a, volume_nl, r, boundary_nl, q);
    let threshold = regime.threshold(dim)?;
    Ok(ThresholdGap {
        regime,
        dim,
        eps,
        t_eps,
        sup_level,
        threshold,
        gap: threshold - sup_level,
        energy,
    })
}
