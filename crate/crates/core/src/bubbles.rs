//! The three explicit solution families of the half-space limit problems.
//!
//! Every family has the form
//!
//! ```text
//! u(x) = A ε^{(N-2)/2} / (k² ε² + |x'|² + (x_N + c)²)^{(N-2)/2}
//! ```
//!
//! | kind     | A                    | k | c        | solves                                    |
//! |----------|----------------------|---|----------|-------------------------------------------|
//! | Interior | [N(N-2)]^{(N-2)/4}   | 1 | 0        | -Δu = u^{2*-1}, ∂_ν u = 0                 |
//! | Trace    | (N-2)^{(N-2)/2}      | 0 | ε        | -Δu = 0, ∂_ν u = u^{2_*-1}                |
//! | Corner   | [N(N-2)]^{(N-2)/4}   | 1 | ε x_N^0  | -Δu = u^{2*-1}, ∂_ν u = u^{2_*-1}         |
//!
//! with `x_N^0 = sqrt(N/(N-2))`, `2* = 2N/(N-2)` and `2_* = 2(N-1)/(N-2)`.
//! All of them are radial about the point `(0, -c)`, which is what the
//! axisymmetric integrals below exploit.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, check_positive, Error, Result};
use crate::integrate::{integrate, integrate_graded, integrate_to_infinity, Tolerance};
use crate::quadrature::unit_sphere_area;

const INNER_TOL: Tolerance = Tolerance::relative(1e-13);
const OUTER_TOL: Tolerance = Tolerance::relative(1e-12);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BubbleKind {
    Interior,
    Trace,
    Corner,
}

impl BubbleKind {
    pub const ALL: [BubbleKind; 3] = [BubbleKind::Interior, BubbleKind::Trace, BubbleKind::Corner];

    pub fn name(self) -> &'static str {
        match self {
            BubbleKind::Interior => "interior",
            BubbleKind::Trace => "trace",
            BubbleKind::Corner => "corner",
        }
    }
}

/// Critical Sobolev exponent `2N/(N-2)`.
pub fn critical_exponent(dim: usize) -> f64 {
    2.0 * dim as f64 / (dim as f64 - 2.0)
}

/// Critical trace exponent `2(N-1)/(N-2)`.
pub fn critical_trace_exponent(dim: usize) -> f64 {
    2.0 * (dim as f64 - 1.0) / (dim as f64 - 2.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BubbleSpec {
    kind: BubbleKind,
    dim: usize,
    eps: f64,
}

impl BubbleSpec {
    pub fn new(kind: BubbleKind, dim: usize, eps: f64) -> Result<Self> {
        check_dim(dim, 3, "bubbles need N >= 3")?;
        check_positive("eps", eps)?;
        Ok(BubbleSpec { kind, dim, eps })
    }

    pub fn kind(&self) -> BubbleKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn with_eps(&self, eps: f64) -> Result<Self> {
        BubbleSpec::new(self.kind, self.dim, eps)
    }

    /// Height `x_N^0 = sqrt(N/(N-2))` of the corner bubble's centre below
    /// the boundary, in units of ε.
    pub fn corner_offset(dim: usize) -> f64 {
        (dim as f64 / (dim as f64 - 2.0)).sqrt()
    }

    fn n(&self) -> f64 {
        self.dim as f64
    }

    /// `A ε^{(N-2)/2}`
    fn amplitude(&self) -> f64 {
        let n = self.n();
        let a = match self.kind {
            BubbleKind::Interior | BubbleKind::Corner => (n * (n - 2.0)).powf((n - 2.0) / 4.0),
            BubbleKind::Trace => (n - 2.0).powf((n - 2.0) / 2.0),
        };
        a * self.eps.powf((n - 2.0) / 2.0)
    }

    /// `k² ε²`
    fn core_sq(&self) -> f64 {
        match self.kind {
            BubbleKind::Interior | BubbleKind::Corner => self.eps * self.eps,
            BubbleKind::Trace => 0.0,
        }
    }

    /// Depth `c` of the centre below `x_N = 0`.
    pub fn centre_depth(&self) -> f64 {
        match self.kind {
            BubbleKind::Interior => 0.0,
            BubbleKind::Trace => self.eps,
            BubbleKind::Corner => self.eps * Self::corner_offset(self.dim),
        }
    }

    fn denom(&self, rho: f64, t: f64) -> f64 {
        let y = t + self.centre_depth();
        self.core_sq() + rho * rho + y * y
    }

    /// `u` at `|x'| = rho`, `x_N = t`.
    pub fn value_at(&self, rho: f64, t: f64) -> f64 {
        self.amplitude() * self.denom(rho, t).powf(-(self.n() - 2.0) / 2.0)
    }

    /// `|∇u|²` at `|x'| = rho`, `x_N = t`.
    pub fn grad_sq_at(&self, rho: f64, t: f64) -> f64 {
        let n = self.n();
        let y = t + self.centre_depth();
        let amp = self.amplitude();
        (n - 2.0) * (n - 2.0) * amp * amp * (rho * rho + y * y) * self.denom(rho, t).powf(-n)
    }

    /// `∂u/∂x_N` at `|x'| = rho`, `x_N = t`.
    pub fn dt_at(&self, rho: f64, t: f64) -> f64 {
        let n = self.n();
        let y = t + self.centre_depth();
        -(n - 2.0) * self.amplitude() * y * self.denom(rho, t).powf(-n / 2.0)
    }

    pub fn density_at(&self, density: Density, rho: f64, t: f64) -> f64 {
        match density {
            Density::GradSq => self.grad_sq_at(rho, t),
            Density::Power(p) => self.value_at(rho, t).powf(p),
        }
    }

    fn split_point<'a>(&self, point: &'a [f64]) -> Result<(&'a [f64], f64)> {
        if point.len() != self.dim {
            return Err(Error::Dimension {
                dim: point.len(),
                reason: "point length must equal the bubble dimension",
            });
        }
        if point.iter().any(|v| !v.is_finite()) {
            return Err(Error::Parameter {
                name: "point",
                value: f64::NAN,
                reason: "coordinates must be finite",
            });
        }
        let (xp, xn) = point.split_at(self.dim - 1);
        let t = xn[0];
        if t < 0.0 {
            return Err(Error::Parameter {
                name: "x_N",
                value: t,
                reason: "points must lie in the closed upper half-space",
            });
        }
        Ok((xp, t))
    }

    fn laplacian(&self, xp: &[f64], t: f64) -> f64 {
        let n = self.n();
        let y_n = t + self.centre_depth();
        let rho_sq: f64 = xp.iter().map(|v| v * v).sum();
        let d = self.core_sq() + rho_sq + y_n * y_n;
        let base = d.powf(-n / 2.0);
        let next = base / d;
        let scale = -(n - 2.0) * self.amplitude();
        xp.iter()
            .copied()
            .chain(std::iter::once(y_n))
            .map(|yi| scale * (base - n * yi * yi * next))
            .sum()
    }
}

/// Quantity integrated over a region: `|∇u|²` or `u^p`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Density {
    GradSq,
    Power(f64),
}

impl Density {
    /// Exponent `d` such that `density · s^{N-1} ~ s^{-d}` as `s → ∞`.
    fn decay(self, dim: usize) -> f64 {
        let n = dim as f64;
        match self {
            Density::GradSq => n - 1.0,
            Density::Power(p) => (n - 2.0) * p - (n - 1.0),
        }
    }
}

/// Closed-form value of the bubble at `point = (x', x_N)`.
pub fn eval_bubble(spec: &BubbleSpec, point: &[f64]) -> Result<f64> {
    let (xp, t) = spec.split_point(point)?;
    let rho = xp.iter().map(|v| v * v).sum::<f64>().sqrt();
    Ok(spec.value_at(rho, t))
}

/// Analytic gradient of the bubble at `point`.
pub fn bubble_gradient(spec: &BubbleSpec, point: &[f64]) -> Result<Vec<f64>> {
    let (xp, t) = spec.split_point(point)?;
    let n = spec.n();
    let y_n = t + spec.centre_depth();
    let rho_sq: f64 = xp.iter().map(|v| v * v).sum();
    let factor =
        -(n - 2.0) * spec.amplitude() * (spec.core_sq() + rho_sq + y_n * y_n).powf(-n / 2.0);
    Ok(xp
        .iter()
        .map(|v| factor * v)
        .chain(std::iter::once(factor * y_n))
        .collect())
}

/// Largest residuals of the limit problem over a sample set.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    /// max |−Δu − f(u)| over points with `x_N > 0`; zero when there are none.
    pub interior_max: f64,
    /// max |−∂u/∂x_N − f_b(u)| over points with `x_N = 0`; zero when there are none.
    pub boundary_max: f64,
}

/// Residuals of the limit problem solved by `spec`, from analytic second
/// derivatives.
pub fn pde_residual(spec: &BubbleSpec, points: &[Vec<f64>]) -> Result<Residuals> {
    if points.is_empty() {
        return Err(Error::Empty("sample set"));
    }
    let n = spec.n();
    let vol_power = (n + 2.0) / (n - 2.0);
    let bdry_power = n / (n - 2.0);
    let mut res = Residuals {
        interior_max: 0.0,
        boundary_max: 0.0,
    };
    for p in points {
        let (xp, t) = spec.split_point(p)?;
        let rho = xp.iter().map(|v| v * v).sum::<f64>().sqrt();
        let u = spec.value_at(rho, t);
        if t > 0.0 {
            let minus_lap = -spec.laplacian(xp, t);
            let r = match spec.kind {
                BubbleKind::Interior | BubbleKind::Corner => minus_lap - u.powf(vol_power),
                BubbleKind::Trace => minus_lap,
            };
            res.interior_max = res.interior_max.max(r.abs());
        } else {
            let outward = -spec.dt_at(rho, 0.0);
            let r = match spec.kind {
                BubbleKind::Interior => outward,
                BubbleKind::Trace | BubbleKind::Corner => outward - u.powf(bdry_power),
            };
            res.boundary_max = res.boundary_max.max(r.abs());
        }
    }
    Ok(res)
}

/// The four terms of the energy functional and its value
/// `dirichlet/2 + mass/2 − volume_nl/r − boundary_nl/q`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    pub dirichlet: f64,
    /// `None` where `∫u²` is not finite (half-space energies).
    pub mass: Option<f64>,
    pub volume_nl: f64,
    pub boundary_nl: f64,
    pub volume_exponent: f64,
    pub boundary_exponent: f64,
    pub total: f64,
}

impl EnergyBreakdown {
    pub fn new(
        dirichlet: f64,
        mass: Option<f64>,
        volume_nl: f64,
        boundary_nl: f64,
        volume_exponent: f64,
        boundary_exponent: f64,
    ) -> Self {
        let mut e = EnergyBreakdown {
            dirichlet,
            mass,
            volume_nl,
            boundary_nl,
            volume_exponent,
            boundary_exponent,
            total: 0.0,
        };
        e.total = e.recomputed_total();
        e
    }

    pub fn recomputed_total(&self) -> f64 {
        0.5 * self.dirichlet + 0.5 * self.mass.unwrap_or(0.0)
            - self.volume_nl / self.volume_exponent
            - self.boundary_nl / self.boundary_exponent
    }
}

/// `∫_0^{π/2} f(s cos φ, s sin φ) cos^{N-2} φ dφ`
fn polar_shell<F: Fn(f64, f64) -> f64>(f: &F, s: f64, dim: usize) -> Result<f64> {
    let pow = dim as i32 - 2;
    integrate(
        |phi: f64| {
            let (sin, cos) = phi.sin_cos();
            f(s * cos, s * sin) * cos.powi(pow)
        },
        0.0,
        std::f64::consts::FRAC_PI_2,
        INNER_TOL,
    )
    .map(|e| e.value)
}

/// `∫` of an axisymmetric function `f(|x'|, x_N)` over `{x_N > 0, |x| < radius}`
/// (`radius = None` for the whole half-space, in which case `decay` is the
/// far-field exponent of `f · s^{N-1}`).
pub(crate) fn axisymmetric_upper<F: Fn(f64, f64) -> f64>(
    f: F,
    dim: usize,
    scale: f64,
    radius: Option<f64>,
    decay: f64,
) -> Result<f64> {
    let omega = unit_sphere_area(dim - 1)?;
    let pow = dim as i32 - 1;
    let radial = |s: f64| -> f64 {
        if s == 0.0 {
            return 0.0;
        }
        // Errors are impossible on this smooth shell integrand; NaN would
        // surface in the outer estimate.
        polar_shell(&f, s, dim).unwrap_or(f64::NAN) * s.powi(pow)
    };
    let est = match radius {
        Some(r) => integrate_graded(radial, r, scale, OUTER_TOL)?,
        None => integrate_to_infinity(radial, 0.0, scale, decay, OUTER_TOL)?,
    };
    Ok(omega * est.value)
}

fn check_convergent(spec: &BubbleSpec, density: Density) -> Result<f64> {
    let decay = density.decay(spec.dim);
    if decay <= 1.0 {
        return Err(Error::Divergent(format!(
            "{density:?} of the {} bubble over an unbounded region in dimension {}",
            spec.kind.name(),
            spec.dim
        )));
    }
    Ok(decay)
}

/// `∫_{ℝ^N_+}` of a bubble density.
pub fn halfspace_integral(spec: &BubbleSpec, density: Density) -> Result<f64> {
    let decay = check_convergent(spec, density)?;
    axisymmetric_upper(
        |r, t| spec.density_at(density, r, t),
        spec.dim,
        spec.eps,
        None,
        decay,
    )
}

/// `∫_{B_R ∩ ℝ^N_+}` of a bubble density.
pub fn half_ball_integral(spec: &BubbleSpec, density: Density, radius: f64) -> Result<f64> {
    check_positive("radius", radius)?;
    axisymmetric_upper(
        |r, t| spec.density_at(density, r, t),
        spec.dim,
        spec.eps.min(radius),
        Some(radius),
        0.0,
    )
}

/// `∫ u(x', 0)^q dx'` over `ℝ^{N-1}` (`radius = None`) or the disc `|x'| < radius`.
pub fn flat_boundary_integral(spec: &BubbleSpec, q: f64, radius: Option<f64>) -> Result<f64> {
    let n = spec.n();
    let omega = unit_sphere_area(spec.dim - 1)?;
    let pow = spec.dim as i32 - 2;
    let f = |r: f64| spec.value_at(r, 0.0).powf(q) * r.powi(pow);
    let est = match radius {
        Some(r) => {
            check_positive("radius", r)?;
            integrate_graded(f, r, spec.eps.min(r), OUTER_TOL)?
        }
        None => {
            let decay = (n - 2.0) * q - (n - 2.0);
            if decay <= 1.0 {
                return Err(Error::Divergent(format!(
                    "boundary integral of u^{q} in dimension {}",
                    spec.dim
                )));
            }
            integrate_to_infinity(f, 0.0, spec.eps, decay, OUTER_TOL)?
        }
    };
    Ok(omega * est.value)
}

/// `∫ u^q dS` over the upper hemisphere `{|x| = R, x_N > 0}`.
pub fn hemisphere_integral(spec: &BubbleSpec, q: f64, radius: f64) -> Result<f64> {
    check_positive("radius", radius)?;
    let omega = unit_sphere_area(spec.dim - 1)?;
    let shell = polar_shell(&|r, t| spec.value_at(r, t).powf(q), radius, spec.dim)?;
    Ok(omega * radius.powi(spec.dim as i32 - 1) * shell)
}

/// `∫_{ℝ^N}` of a density of the interior bubble (radial about the origin).
fn whole_space_interior(spec: &BubbleSpec, density: Density) -> Result<f64> {
    debug_assert_eq!(spec.kind, BubbleKind::Interior);
    let decay = check_convergent(spec, density)?;
    let omega = unit_sphere_area(spec.dim)?;
    let pow = spec.dim as i32 - 1;
    let est = integrate_to_infinity(
        |s| spec.density_at(density, s, 0.0) * s.powi(pow),
        0.0,
        spec.eps,
        decay,
        OUTER_TOL,
    )?;
    Ok(omega * est.value)
}

/// Energies of a bubble over the half-space, with the critical exponents
/// `r = 2*`, `q = 2_*` in the total. The mass term is omitted.
pub fn bubble_energy_halfspace(spec: &BubbleSpec) -> Result<EnergyBreakdown> {
    let r = critical_exponent(spec.dim);
    let q = critical_trace_exponent(spec.dim);
    let dirichlet = halfspace_integral(spec, Density::GradSq)?;
    let volume_nl = halfspace_integral(spec, Density::Power(r))?;
    let boundary_nl = flat_boundary_integral(spec, q, None)?;
    Ok(EnergyBreakdown::new(
        dirichlet,
        None,
        volume_nl,
        boundary_nl,
        r,
        q,
    ))
}

/// Best Sobolev constant `S` and best trace constant `S_T`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SobolevConstants {
    pub s: f64,
    pub s_trace: f64,
}

/// Sobolev constants from the extremals at the canonical scale `ε = 1`.
pub fn sobolev_constants(dim: usize) -> Result<SobolevConstants> {
    sobolev_constants_at(dim, 1.0)
}

/// Sobolev constants evaluated through extremals of scale `eps`.
pub fn sobolev_constants_at(dim: usize, eps: f64) -> Result<SobolevConstants> {
    let interior = BubbleSpec::new(BubbleKind::Interior, dim, eps)?;
    let r = critical_exponent(dim);
    let grad = whole_space_interior(&interior, Density::GradSq)?;
    let vol = whole_space_interior(&interior, Density::Power(r))?;
    let s = grad / vol.powf(2.0 / r);

    let trace = BubbleSpec::new(BubbleKind::Trace, dim, eps)?;
    let q = critical_trace_exponent(dim);
    let grad_t = halfspace_integral(&trace, Density::GradSq)?;
    let bdry_t = flat_boundary_integral(&trace, q, None)?;
    let s_trace = grad_t / bdry_t.powf(2.0 / q);
    Ok(SobolevConstants { s, s_trace })
}

/// Ground state level `c_∞` of the doubly critical half-space problem,
/// the energy of the corner bubble at `ε = 1`.
pub fn ground_state_level(dim: usize) -> Result<f64> {
    ground_state_level_at(dim, 1.0)
}

pub fn ground_state_level_at(dim: usize, eps: f64) -> Result<f64> {
    let spec = BubbleSpec::new(BubbleKind::Corner, dim, eps)?;
    Ok(bubble_energy_halfspace(&spec)?.total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(kind: BubbleKind, dim: usize, eps: f64) -> BubbleSpec {
        BubbleSpec::new(kind, dim, eps).unwrap()
    }

    #[test]
    fn values_at_origin() {
        let u = eval_bubble(&spec(BubbleKind::Interior, 4, 1.0), &[0.0; 4]).unwrap();
        assert!((u - 8f64.sqrt()).abs() < 1e-14);
        let u = eval_bubble(&spec(BubbleKind::Trace, 3, 1.0), &[0.0; 3]).unwrap();
        assert!((u - 1.0).abs() < 1e-15);
        let u = eval_bubble(&spec(BubbleKind::Corner, 3, 1.0), &[0.0; 3]).unwrap();
        assert!((u - 3f64.powf(0.25) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn corner_offset_is_positive() {
        for n in 3..12 {
            let x0 = BubbleSpec::corner_offset(n);
            assert!(x0 > 1.0);
            assert!((x0 * x0 - n as f64 / (n as f64 - 2.0)).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(matches!(
            BubbleSpec::new(BubbleKind::Interior, 2, 1.0),
            Err(Error::Dimension { .. })
        ));
        assert!(BubbleSpec::new(BubbleKind::Trace, 3, 0.0).is_err());
        assert!(BubbleSpec::new(BubbleKind::Trace, 3, -1.0).is_err());
        let s = spec(BubbleKind::Interior, 3, 1.0);
        assert!(eval_bubble(&s, &[0.0, 0.0, -0.1]).is_err());
        assert!(eval_bubble(&s, &[0.0, 0.0]).is_err());
        assert!(pde_residual(&s, &[]).is_err());
    }

    #[test]
    fn gradient_at_centre_and_trace_example() {
        for n in 3..7 {
            let g = bubble_gradient(&spec(BubbleKind::Interior, n, 0.7), &vec![0.0; n]).unwrap();
            assert!(g.iter().all(|v| *v == 0.0));
        }
        let g = bubble_gradient(&spec(BubbleKind::Trace, 3, 1.0), &[0.0, 0.0, 1.0]).unwrap();
        assert_eq!(g[0], 0.0);
        assert_eq!(g[1], 0.0);
        assert!((g[2] + 0.25).abs() < 1e-15);
    }

    #[test]
    fn energy_total_identity() {
        let e = bubble_energy_halfspace(&spec(BubbleKind::Corner, 5, 1.0)).unwrap();
        assert!((e.total - e.recomputed_total()).abs() < 1e-14 * e.total.abs().max(1.0));
        assert!(e.mass.is_none());
        assert!(e.dirichlet > 0.0 && e.volume_nl > 0.0 && e.boundary_nl > 0.0);
    }

    #[test]
    fn interior_mass_diverges_in_low_dimension() {
        let s = spec(BubbleKind::Interior, 4, 1.0);
        assert!(matches!(
            halfspace_integral(&s, Density::Power(2.0)),
            Err(Error::Divergent(_))
        ));
        let s = spec(BubbleKind::Interior, 5, 1.0);
        assert!(halfspace_integral(&s, Density::Power(2.0)).unwrap() > 0.0);
    }
}
