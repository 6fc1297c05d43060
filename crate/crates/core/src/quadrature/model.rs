use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, check_positive, Error, Result};
use crate::integrate::gauss_legendre;

use super::unit_sphere_area;

/// Boundary patch `x_N = h(x') = Σ α_i x_i² + κ|x'|^p` over the disc
/// `|x'| < δ`, flat (`x_N = 0`) outside it. The domain is the region above.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryModel {
    dim: usize,
    curvatures: Vec<f64>,
    curvature_bounds: Option<(f64, f64)>,
    patch_radius: f64,
    perturbation: f64,
    perturbation_exponent: f64,
}

/// How the `N-2` angular directions of `ℝ^{N-1}` are integrated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SphereRule {
    /// Axisymmetric when all curvatures agree, otherwise a product rule.
    Auto,
    /// Single direction times the sphere area; needs equal curvatures.
    Axisymmetric,
    /// Gauss–Legendre in each hyperspherical angle over the positive orthant.
    Product { nodes: usize },
}

pub(crate) const DEFAULT_PRODUCT_NODES: usize = 8;

impl BoundaryModel {
    pub fn new(dim: usize, curvatures: Vec<f64>, patch_radius: f64) -> Result<Self> {
        if curvatures.iter().any(|a| !(a.is_finite() && *a > 0.0)) {
            return Err(Error::Parameter {
                name: "curvatures",
                value: curvatures.iter().copied().fold(f64::INFINITY, f64::min),
                reason: "every principal curvature coefficient must be positive",
            });
        }
        Self::build(dim, curvatures, patch_radius)
    }

    /// Equal coefficients `α_i = alpha`.
    pub fn uniform(dim: usize, alpha: f64, patch_radius: f64) -> Result<Self> {
        check_dim(dim, 2, "boundary model needs N >= 2")?;
        Self::new(dim, vec![alpha; dim - 1], patch_radius)
    }

    /// The flat reference boundary `h ≡ 0` (zero curvature).
    pub fn flat(dim: usize, patch_radius: f64) -> Result<Self> {
        check_dim(dim, 2, "boundary model needs N >= 2")?;
        Self::build(dim, vec![0.0; dim - 1], patch_radius)
    }

    fn build(dim: usize, curvatures: Vec<f64>, patch_radius: f64) -> Result<Self> {
        check_dim(dim, 3, "boundary models are used for N >= 3")?;
        if curvatures.len() != dim - 1 {
            return Err(Error::Dimension {
                dim: curvatures.len(),
                reason: "need N - 1 curvature coefficients",
            });
        }
        check_positive("patch_radius", patch_radius)?;
        let model = BoundaryModel {
            dim,
            curvatures,
            curvature_bounds: None,
            patch_radius,
            perturbation: 0.0,
            perturbation_exponent: 2.5,
        };
        model.validate()?;
        Ok(model)
    }

    /// Adds `κ|x'|^p` to the quadratic part; `p > 2` keeps it `o(|x'|²)`.
    pub fn with_perturbation(mut self, kappa: f64, exponent: f64) -> Result<Self> {
        if !kappa.is_finite() {
            return Err(Error::Parameter {
                name: "kappa",
                value: kappa,
                reason: "must be finite",
            });
        }
        if !(exponent.is_finite() && exponent > 2.0) {
            return Err(Error::Parameter {
                name: "perturbation_exponent",
                value: exponent,
                reason: "must exceed 2",
            });
        }
        self.perturbation = kappa;
        self.perturbation_exponent = exponent;
        self.validate()?;
        Ok(self)
    }

    /// Requires `a|x'|² ≤ h(x') ≤ A|x'|²` on the patch.
    pub fn with_curvature_bounds(mut self, lower: f64, upper: f64) -> Result<Self> {
        check_positive("lower curvature bound", lower)?;
        if !(upper.is_finite() && upper >= lower) {
            return Err(Error::Parameter {
                name: "upper curvature bound",
                value: upper,
                reason: "must be finite and at least the lower bound",
            });
        }
        self.curvature_bounds = Some((lower, upper));
        self.validate()?;
        Ok(self)
    }

    /// Same patch with every curvature coefficient and `κ` multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let mut m = self.clone();
        m.curvatures.iter_mut().for_each(|a| *a *= factor);
        m.perturbation *= factor;
        m.curvature_bounds = self.curvature_bounds.map(|(a, b)| (a * factor, b * factor));
        m.validate()?;
        Ok(m)
    }

    fn validate(&self) -> Result<()> {
        let d = self.patch_radius;
        let kd = self.perturbation * d.powf(self.perturbation_exponent - 2.0);
        let (lo, hi) = self.curvature_range();
        // h(x')/|x'|² ranges over [lo + min(0, κδ^{p-2}), hi + max(0, κδ^{p-2})].
        let ratio_min = lo + kd.min(0.0);
        let ratio_max = hi + kd.max(0.0);
        if ratio_min < 0.0 {
            return Err(Error::Parameter {
                name: "kappa",
                value: self.perturbation,
                reason: "patch height must stay nonnegative",
            });
        }
        if ratio_max * d >= 1.0 {
            return Err(Error::Parameter {
                name: "patch_radius",
                value: d,
                reason: "exceeds the validity radius: the patch must satisfy h(x') < |x'|",
            });
        }
        if let Some((a, b)) = self.curvature_bounds {
            if ratio_min < a * (1.0 - 1e-12) || ratio_max > b * (1.0 + 1e-12) {
                return Err(Error::Parameter {
                    name: "curvature_bounds",
                    value: a,
                    reason: "patch height leaves the band a|x'|^2 <= h <= A|x'|^2",
                });
            }
        }
        Ok(())
    }

    fn curvature_range(&self) -> (f64, f64) {
        let lo = self
            .curvatures
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        let hi = self
            .curvatures
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn curvatures(&self) -> &[f64] {
        &self.curvatures
    }

    pub fn curvature_bounds(&self) -> Option<(f64, f64)> {
        self.curvature_bounds
    }

    pub fn patch_radius(&self) -> f64 {
        self.patch_radius
    }

    /// `(κ, p)`
    pub fn perturbation(&self) -> (f64, f64) {
        (self.perturbation, self.perturbation_exponent)
    }

    /// `H(0) = (2/(N-1)) Σ α_i`
    pub fn mean_curvature(&self) -> f64 {
        2.0 / (self.dim as f64 - 1.0) * self.curvatures.iter().sum::<f64>()
    }

    pub fn is_flat(&self) -> bool {
        self.curvatures.iter().all(|a| *a == 0.0) && self.perturbation == 0.0
    }

    pub fn is_axisymmetric(&self) -> bool {
        let (lo, hi) = self.curvature_range();
        lo == hi
    }

    /// Height `h(ρθ)` along a direction with `G = Σ α_i θ_i²`.
    pub(crate) fn height(&self, dir: Direction, rho: f64) -> f64 {
        dir.g * rho * rho + self.perturbation * rho.powf(self.perturbation_exponent)
    }

    /// `|∇h(ρθ)|²` along a direction with `G = Σ α_i θ_i²`, `G2 = Σ α_i² θ_i²`.
    pub(crate) fn grad_height_sq(&self, dir: Direction, rho: f64) -> f64 {
        let p = self.perturbation_exponent;
        let radial = 2.0 * dir.g * rho + self.perturbation * p * rho.powf(p - 1.0);
        radial * radial + 4.0 * rho * rho * (dir.g2 - dir.g * dir.g).max(0.0)
    }

    /// Largest patch height, reached on the rim.
    pub(crate) fn max_height(&self) -> f64 {
        let (_, hi) = self.curvature_range();
        self.height(Direction { g: hi, g2: hi * hi }, self.patch_radius)
    }

    /// `∫_{S^{N-2}} f(direction) dθ` under the chosen rule.
    pub(crate) fn integrate_directions<F>(&self, rule: SphereRule, f: F) -> Result<f64>
    where
        F: Fn(Direction) -> Result<f64> + Sync,
    {
        let rule = match rule {
            SphereRule::Auto if self.is_axisymmetric() => SphereRule::Axisymmetric,
            SphereRule::Auto => SphereRule::Product {
                nodes: DEFAULT_PRODUCT_NODES,
            },
            r => r,
        };
        match rule {
            SphereRule::Axisymmetric => {
                if !self.is_axisymmetric() {
                    return Err(Error::Parameter {
                        name: "sphere_rule",
                        value: f64::NAN,
                        reason: "axisymmetric rule needs equal curvature coefficients",
                    });
                }
                let a = self.curvatures[0];
                Ok(unit_sphere_area(self.dim - 1)? * f(Direction { g: a, g2: a * a })?)
            }
            SphereRule::Product { nodes } => {
                if nodes == 0 {
                    return Err(Error::Empty("sphere rule nodes"));
                }
                let points = orthant_points(self.dim - 1, nodes);
                let values: Vec<Result<f64>> = points
                    .par_iter()
                    .map(|(theta_sq, w)| {
                        let g = self
                            .curvatures
                            .iter()
                            .zip(theta_sq)
                            .map(|(a, t)| a * t)
                            .sum();
                        let g2 = self
                            .curvatures
                            .iter()
                            .zip(theta_sq)
                            .map(|(a, t)| a * a * t)
                            .sum();
                        f(Direction { g, g2 }).map(|v| v * w)
                    })
                    .collect();
                let mut total = 0.0;
                for v in values {
                    total += v?;
                }
                Ok(total)
            }
            SphereRule::Auto => unreachable!(),
        }
    }
}

/// Curvature data of one direction `θ ∈ S^{N-2}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Direction {
    pub g: f64,
    pub g2: f64,
}

/// Points `θ²` (squared coordinates) and weights of a product Gauss–Legendre
/// rule for `S^{d-1} ⊂ ℝ^d`, restricted to the positive orthant and scaled
/// by `2^d`; exact symmetrization for integrands even in each coordinate.
fn orthant_points(d: usize, nodes: usize) -> Vec<(Vec<f64>, f64)> {
    let orthants = 2f64.powi(d as i32);
    if d == 1 {
        return vec![(vec![1.0], orthants)];
    }
    let (x, w) = gauss_legendre(nodes);
    let half = std::f64::consts::FRAC_PI_4;
    let angles: Vec<(f64, f64)> = x
        .iter()
        .zip(&w)
        .map(|(x, w)| (half * (x + 1.0), half * w))
        .collect();
    let mut out = Vec::new();
    let mut idx = vec![0usize; d - 1];
    loop {
        let mut theta_sq = Vec::with_capacity(d);
        let mut weight = orthants;
        let mut carry = 1.0;
        for (k, &i) in idx.iter().enumerate() {
            let (phi, wk) = angles[i];
            let (s, c) = phi.sin_cos();
            theta_sq.push(carry * c * c);
            weight *= wk * s.powi((d - 2 - k) as i32);
            carry *= s * s;
        }
        theta_sq.push(carry);
        out.push((theta_sq, weight));
        let mut k = 0;
        loop {
            if k == idx.len() {
                return out;
            }
            idx[k] += 1;
            if idx[k] < nodes {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// `∫_{S^{d-1}} θ_i² dθ` for every `i`, from the same product rule as
/// [`orthant_points`] evaluated one angle at a time: each `θ_i²` and the
/// weight factor over the angles, so the cost is linear in `d`.
pub(crate) fn sphere_second_moments(d: usize, nodes: usize) -> Vec<f64> {
    let orthants = 2f64.powi(d as i32);
    if d == 1 {
        return vec![orthants];
    }
    let (x, w) = gauss_legendre(nodes);
    let half = std::f64::consts::FRAC_PI_4;
    // per angle k: (∫ w_k, ∫ sin² w_k, ∫ cos² w_k)
    let sums: Vec<(f64, f64, f64)> = (0..d - 1)
        .map(|k| {
            x.iter().zip(&w).fold((0.0, 0.0, 0.0), |acc, (x, w)| {
                let (s, c) = (half * (x + 1.0)).sin_cos();
                let wk = half * w * s.powi((d - 2 - k) as i32);
                (acc.0 + wk, acc.1 + wk * s * s, acc.2 + wk * c * c)
            })
        })
        .collect();
    (0..d)
        .map(|i| {
            orthants
                * sums
                    .iter()
                    .enumerate()
                    .map(|(k, &(plain, sin_sq, cos_sq))| match k.cmp(&i) {
                        std::cmp::Ordering::Less => sin_sq,
                        std::cmp::Ordering::Equal => cos_sq,
                        std::cmp::Ordering::Greater => plain,
                    })
                    .product::<f64>()
        })
        .collect()
}

/// `∫_{S^{d-1}} f(θ²) dθ` for `f` depending only on squared coordinates.
#[cfg(test)]
fn sphere_quadrature<F: Fn(&[f64]) -> f64>(d: usize, nodes: usize, f: F) -> f64 {
    orthant_points(d, nodes).iter().map(|(t, w)| w * f(t)).sum()
}
