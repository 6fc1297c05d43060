//! Bubble integrals over half-spaces whose boundary carries a curved patch.
//!
//! The model domain is `{x_N > h(x')}` over the patch `|x'| < δ` and
//! `{x_N > 0}` outside it, so it differs from the flat half-space by the
//! slab `{|x'| < δ, 0 < x_N < h(x')}`. Its boundary is the graph of `h`,
//! the vertical wall `{|x'| = δ, 0 < x_N < h}` and the flat exterior.

use serde::{Deserialize, Serialize};

use crate::bubbles::{
    flat_boundary_integral, half_ball_integral, hemisphere_integral, BubbleKind, BubbleSpec,
    Density,
};
use crate::error::{check_positive, Error, Result};
use crate::integrate::{integrate, integrate_graded, Tolerance};

use super::check_model_for;
use super::model::{BoundaryModel, Direction, SphereRule};

const INNER_TOL: Tolerance = Tolerance::relative(1e-12);
const OUTER_TOL: Tolerance = Tolerance::relative(1e-11);
/// Absolute error floor of cancelling integrands, relative to the size of
/// the cancelling terms.
const CANCELLATION_FLOOR: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum RegionIntegrand {
    /// A density over the slab between the flat boundary and the patch.
    Slab(Density),
    /// `∫ u^q dS` over the patch graph and the wall, minus the flat disc it replaces.
    BoundaryExcess(f64),
}

/// Integral over the slab `{|x'| < δ, 0 < x_N < h(x')}`.
pub fn slab_integral(
    spec: &BubbleSpec,
    density: Density,
    model: &BoundaryModel,
    rule: SphereRule,
) -> Result<f64> {
    check_model_for(spec, model)?;
    if model.is_flat() {
        return Ok(0.0);
    }
    let pow = spec.dim() as i32 - 2;
    let delta = model.patch_radius();
    model.integrate_directions(rule, |dir: Direction| {
        let mut failure = None;
        let radial = |rho: f64| -> f64 {
            let h = model.height(dir, rho);
            if h <= 0.0 {
                return 0.0;
            }
            match integrate(|t| spec.density_at(density, rho, t), 0.0, h, INNER_TOL) {
                Ok(e) => e.value * rho.powi(pow),
                Err(e) => {
                    failure.get_or_insert(e);
                    0.0
                }
            }
        };
        let value = integrate_graded(radial, delta, spec.eps().min(delta), OUTER_TOL)?.value;
        match failure {
            Some(e) => Err(e),
            None => Ok(value),
        }
    })
}

/// Boundary integral of `u^q` over the patch graph plus wall, minus the
/// same integral over the flat disc `|x'| < δ`.
pub fn graph_excess(
    spec: &BubbleSpec,
    q: f64,
    model: &BoundaryModel,
    rule: SphereRule,
) -> Result<f64> {
    check_model_for(spec, model)?;
    check_positive("q", q)?;
    if model.is_flat() {
        return Ok(0.0);
    }
    let pow = spec.dim() as i32 - 2;
    let delta = model.patch_radius();
    // The integrand is a difference of two nearly equal terms; for small
    // curvature a purely relative target sits below roundoff, so the error
    // is also allowed a floor relative to the flat term.
    let flat = integrate_graded(
        |rho: f64| spec.value_at(rho, 0.0).powf(q) * rho.powi(pow),
        delta,
        spec.eps().min(delta),
        Tolerance::relative(1e-6),
    )?
    .value;
    let tol = Tolerance::new(OUTER_TOL.rel, CANCELLATION_FLOOR * flat);
    model.integrate_directions(rule, |dir: Direction| {
        let graph = integrate_graded(
            |rho: f64| {
                let h = model.height(dir, rho);
                let lifted =
                    spec.value_at(rho, h).powf(q) * (1.0 + model.grad_height_sq(dir, rho)).sqrt();
                (lifted - spec.value_at(rho, 0.0).powf(q)) * rho.powi(pow)
            },
            delta,
            spec.eps().min(delta),
            tol,
        )?
        .value;
        let rim = model.height(dir, delta);
        let wall = integrate(|t| spec.value_at(delta, t).powf(q), 0.0, rim, INNER_TOL)?.value;
        Ok(graph + delta.powi(pow) * wall)
    })
}

/// Region integral with the default sphere rule (axisymmetric when the
/// curvatures agree).
pub fn halfspace_region_integral(
    integrand: RegionIntegrand,
    kind: BubbleKind,
    model: &BoundaryModel,
    eps: f64,
) -> Result<f64> {
    halfspace_region_integral_with(integrand, kind, model, eps, SphereRule::Auto)
}

pub fn halfspace_region_integral_with(
    integrand: RegionIntegrand,
    kind: BubbleKind,
    model: &BoundaryModel,
    eps: f64,
    rule: SphereRule,
) -> Result<f64> {
    let spec = BubbleSpec::new(kind, model.dim(), eps)?;
    match integrand {
        RegionIntegrand::Slab(d) => slab_integral(&spec, d, model, rule),
        RegionIntegrand::BoundaryExcess(q) => graph_excess(&spec, q, model, rule),
    }
}

fn check_inside_ball(model: &BoundaryModel, radius: f64) -> Result<()> {
    check_positive("radius", radius)?;
    let d = model.patch_radius();
    let h = model.max_height();
    if d * d + h * h >= radius * radius {
        return Err(Error::Parameter {
            name: "radius",
            value: radius,
            reason: "the curved patch must lie inside the ball",
        });
    }
    Ok(())
}

/// `∫` of a density over the model domain intersected with `B_R`.
pub fn bounded_model_volume(
    spec: &BubbleSpec,
    density: Density,
    model: &BoundaryModel,
    radius: f64,
    rule: SphereRule,
) -> Result<f64> {
    check_inside_ball(model, radius)?;
    Ok(half_ball_integral(spec, density, radius)? - slab_integral(spec, density, model, rule)?)
}

/// `∮ u^q dS` over the full boundary of the model domain intersected with
/// `B_R`: patch graph, wall, flat annulus and spherical cap.
pub fn bounded_model_boundary(
    spec: &BubbleSpec,
    q: f64,
    model: &BoundaryModel,
    radius: f64,
    rule: SphereRule,
) -> Result<f64> {
    check_inside_ball(model, radius)?;
    Ok(flat_boundary_integral(spec, q, Some(radius))?
        + graph_excess(spec, q, model, rule)?
        + hemisphere_integral(spec, q, radius)?)
}
