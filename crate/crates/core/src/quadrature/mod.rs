//! Radial and axisymmetric integrals: sphere areas, one-dimensional moment
//! integrals `∫ r^a/(c+r²)^b`, the moment identities behind the curvature
//! sign conditions, and integrals over perturbed half-spaces.

mod model;
mod region;

pub use model::{BoundaryModel, SphereRule};
pub use region::{
    bounded_model_boundary, bounded_model_volume, graph_excess, halfspace_region_integral,
    halfspace_region_integral_with, slab_integral, RegionIntegrand,
};

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::bubbles::BubbleSpec;
use crate::error::{check_dim, Error, Result};
use crate::integrate::{integrate_to_infinity, Tolerance};

const RADIAL_TOL: Tolerance = Tolerance::relative(1e-13);

/// Surface area `2π^{d/2}/Γ(d/2)` of the unit sphere in `ℝ^d`.
pub fn unit_sphere_area(ambient_dim: usize) -> Result<f64> {
    check_dim(
        ambient_dim,
        1,
        "sphere needs an ambient dimension of at least 1",
    )?;
    let half = ambient_dim as f64 / 2.0;
    Ok(2.0 * (half * std::f64::consts::PI.ln() - ln_gamma(half)).exp())
}

/// `∫₀^∞ r^a / (c + r²)^b dr`
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialIntegralSpec {
    num_power: f64,
    den_power: f64,
    shift: f64,
}

impl RadialIntegralSpec {
    pub fn new(num_power: f64, den_power: f64, shift: f64) -> Result<Self> {
        if !(num_power.is_finite() && num_power >= 0.0) {
            return Err(Error::Parameter {
                name: "num_power",
                value: num_power,
                reason: "must be finite and nonnegative",
            });
        }
        crate::error::check_positive("den_power", den_power)?;
        crate::error::check_positive("shift", shift)?;
        if 2.0 * den_power - num_power <= 1.0 {
            return Err(Error::Divergent(format!(
                "r^{num_power}/(c+r^2)^{den_power} is not integrable at infinity"
            )));
        }
        Ok(RadialIntegralSpec {
            num_power,
            den_power,
            shift,
        })
    }

    pub fn num_power(&self) -> f64 {
        self.num_power
    }

    pub fn den_power(&self) -> f64 {
        self.den_power
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }
}

pub fn radial_integral(spec: &RadialIntegralSpec) -> Result<f64> {
    let RadialIntegralSpec {
        num_power: a,
        den_power: b,
        shift: c,
    } = *spec;
    let est = integrate_to_infinity(
        |r: f64| r.powf(a) * (c + r * r).powf(-b),
        0.0,
        c.sqrt(),
        2.0 * b - a,
        RADIAL_TOL,
    )?;
    Ok(est.value)
}

fn moment(a: f64, b: f64, c: f64) -> Result<f64> {
    radial_integral(&RadialIntegralSpec::new(a, b, c)?)
}

/// Both sides of a numerically checked identity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub rel_err: f64,
}

impl IdentityCheck {
    fn new(lhs: f64, rhs: f64) -> Self {
        IdentityCheck {
            lhs,
            rhs,
            rel_err: ((lhs - rhs) / rhs).abs(),
        }
    }
}

fn check_identity_dim(dim: usize) -> Result<()> {
    check_dim(dim, 4, "moment identities divide by N - 3")
}

/// `∫ r^N/(1+r²)^{N-1} = 2(N-1)/(N-3) · ∫ r^N/(1+r²)^N`
pub fn power_shift_identity(dim: usize) -> Result<IdentityCheck> {
    check_identity_dim(dim)?;
    let n = dim as f64;
    let lhs = moment(n, n - 1.0, 1.0)?;
    let rhs = 2.0 * (n - 1.0) / (n - 3.0) * moment(n, n, 1.0)?;
    Ok(IdentityCheck::new(lhs, rhs))
}

/// Shift `c = 1 + (x_N^0)² = 2(N-1)/(N-2)` of the corner-bubble moments.
pub fn corner_shift(dim: usize) -> f64 {
    let n = dim as f64;
    2.0 * (n - 1.0) / (n - 2.0)
}

/// Ratio `2(N-1)(N+1)/((N-2)(N-3))` between the corner moments of orders
/// `N+2` and `N`.
pub fn corner_moment_ratio(dim: usize) -> f64 {
    let n = dim as f64;
    2.0 * (n - 1.0) * (n + 1.0) / ((n - 2.0) * (n - 3.0))
}

/// `∫ r^{N+2}/(c+r²)^N = ratio · ∫ r^N/(c+r²)^N` with `c = 2(N-1)/(N-2)`.
pub fn corner_moment_identity(dim: usize) -> Result<IdentityCheck> {
    check_identity_dim(dim)?;
    let n = dim as f64;
    let c = corner_shift(dim);
    let lhs = moment(n + 2.0, n, c)?;
    let rhs = corner_moment_ratio(dim) * moment(n, n, c)?;
    Ok(IdentityCheck::new(lhs, rhs))
}

/// Leading-order curvature conditions whose negativity gives the energy
/// gap below the compactness threshold.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SignCondition {
    /// Trace bubble, critical boundary exponent.
    TraceCritical,
    /// Corner bubble, both exponents critical.
    DoubleCritical,
}

impl SignCondition {
    pub fn name(self) -> &'static str {
        match self {
            SignCondition::TraceCritical => "trace-critical",
            SignCondition::DoubleCritical => "double-critical",
        }
    }
}

/// `∫_{ℝ^{N-1}} g(x') w(|x'|) dx'` for the quadratic form `g = Σ α_i x_i²`
/// and the radial weight `w(r) = r^{extra}/(c + r²)^b`, computed as a
/// product of a sphere integral of `g` (separable Gauss–Legendre) and an adaptive
/// radial integral.
pub fn curvature_weighted_integral(
    dim: usize,
    curvatures: &[f64],
    extra: f64,
    b: f64,
    c: f64,
) -> Result<f64> {
    check_dim(dim, 3, "curvature integrals need N >= 3")?;
    if curvatures.len() != dim - 1 {
        return Err(Error::Dimension {
            dim: curvatures.len(),
            reason: "need N - 1 principal curvatures",
        });
    }
    let n = dim as f64;
    let sphere: f64 = model::sphere_second_moments(dim - 1, 24)
        .iter()
        .zip(curvatures)
        .map(|(m, a)| a * m)
        .sum();
    Ok(sphere * moment(n + extra, b, c)?)
}

/// Left-hand side of a sign condition for an arbitrary set of curvatures.
/// Linear in the curvatures; no positivity is required.
pub fn sign_condition_for_curvatures(
    which: SignCondition,
    dim: usize,
    curvatures: &[f64],
) -> Result<f64> {
    check_identity_dim(dim)?;
    if curvatures.len() != dim - 1 {
        return Err(Error::Dimension {
            dim: curvatures.len(),
            reason: "need N - 1 principal curvatures",
        });
    }
    let n = dim as f64;
    match which {
        SignCondition::TraceCritical => {
            let k = (n - 2.0).powf(n);
            let near = curvature_weighted_integral(dim, curvatures, 0.0, n, 1.0)?;
            let far = curvature_weighted_integral(dim, curvatures, 0.0, n - 1.0, 1.0)?;
            Ok(k * near - 0.5 * k * far)
        }
        SignCondition::DoubleCritical => {
            let c = corner_shift(dim);
            let x0_sq = c - 1.0;
            let p = n.powf((n - 2.0) / 2.0) * (n - 2.0).powf((n + 2.0) / 2.0);
            let q = n.powf(n / 2.0) * (n - 2.0).powf(n / 2.0);
            let plain = curvature_weighted_integral(dim, curvatures, 0.0, n, c)?;
            let weighted = curvature_weighted_integral(dim, curvatures, 2.0, n, c)? + x0_sq * plain;
            Ok(-0.5 * p * weighted + 0.5 * p * plain + q * plain)
        }
    }
}

/// Left-hand side of a sign condition for the curvatures of `model`.
pub fn sign_condition(which: SignCondition, dim: usize, model: &BoundaryModel) -> Result<f64> {
    check_identity_dim(dim)?;
    if model.dim() != dim {
        return Err(Error::Dimension {
            dim: model.dim(),
            reason: "boundary model dimension differs from the requested one",
        });
    }
    let h = model.mean_curvature();
    if h <= 0.0 {
        return Err(Error::Parameter {
            name: "mean_curvature",
            value: h,
            reason: "sign conditions need positive mean curvature",
        });
    }
    sign_condition_for_curvatures(which, dim, model.curvatures())
}

/// Closed-form reduction of a sign condition through the mean curvature
/// and a single radial moment.
pub fn sign_condition_closed_form(
    which: SignCondition,
    dim: usize,
    mean_curvature: f64,
) -> Result<f64> {
    check_identity_dim(dim)?;
    let n = dim as f64;
    let omega = unit_sphere_area(dim - 1)?;
    match which {
        SignCondition::TraceCritical => {
            Ok(-(n - 2.0).powf(n) * mean_curvature * omega / (n - 3.0) * moment(n, n, 1.0)?)
        }
        SignCondition::DoubleCritical => {
            let c = corner_shift(dim);
            Ok(
                -2.0 * n.powf((n - 2.0) / 2.0) * (n - 2.0).powf(n / 2.0) * (n - 1.0) / (n - 3.0)
                    * mean_curvature
                    * omega
                    * moment(n, n, c)?,
            )
        }
    }
}

pub(crate) fn check_model_for(spec: &BubbleSpec, model: &BoundaryModel) -> Result<()> {
    if spec.dim() != model.dim() {
        return Err(Error::Dimension {
            dim: model.dim(),
            reason: "boundary model dimension differs from the bubble dimension",
        });
    }
    Ok(())
}
