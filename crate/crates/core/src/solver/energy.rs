use crate::bubbles::EnergyBreakdown;
use crate::error::Result;
use crate::quadrature::unit_sphere_area;

use super::mesh::{DiscreteField, RadialMesh};
use super::tridiag::Tridiagonal;
use super::SolverConfig;

/// A configuration with its mesh and precomputed quadrature weights.
#[derive(Clone, Debug)]
pub struct RadialProblem {
    pub config: SolverConfig,
    mesh: RadialMesh,
    /// `σ ∫ρ^{N-1}` over the dual cells
    weights: Vec<f64>,
    /// `σ ρ_{mid}^{N-1} / h`
    stiffness: Vec<f64>,
    /// `σ R^{N-1}`
    boundary_weight: f64,
}

impl RadialProblem {
    pub fn new(config: &SolverConfig) -> Result<Self> {
        config.validate()?;
        Self::with_mesh(config, config.mesh()?)
    }

    pub fn with_mesh(config: &SolverConfig, mesh: RadialMesh) -> Result<Self> {
        config.validate()?;
        let sigma = unit_sphere_area(config.dim)?;
        let weights = mesh
            .dual_volumes(config.dim)
            .into_iter()
            .map(|w| sigma * w)
            .collect();
        let stiffness = mesh
            .cell_stiffness(config.dim)
            .into_iter()
            .map(|k| sigma * k)
            .collect();
        let boundary_weight = sigma * mesh.radius().powi(config.dim as i32 - 1);
        Ok(RadialProblem {
            config: config.clone(),
            mesh,
            weights,
            stiffness,
            boundary_weight,
        })
    }

    pub fn mesh(&self) -> &RadialMesh {
        &self.mesh
    }

    pub fn len(&self) -> usize {
        self.mesh.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mesh.is_empty()
    }

    pub fn energy(&self, u: &DiscreteField) -> Result<EnergyBreakdown> {
        u.check_len(&self.mesh)?;
        let v = &u.values;
        let (r, q) = (self.config.r_exp, self.config.q_exp);
        let dirichlet: f64 = self
            .stiffness
            .iter()
            .zip(v.windows(2))
            .map(|(k, w)| k * (w[1] - w[0]).powi(2))
            .sum();
        let mass: f64 = self.weights.iter().zip(v).map(|(w, x)| w * x * x).sum();
        let volume_nl: f64 = self
            .weights
            .iter()
            .zip(v)
            .map(|(w, x)| w * x.abs().powf(r))
            .sum();
        let boundary_nl = self.boundary_weight * v[v.len() - 1].abs().powf(q);
        Ok(EnergyBreakdown::new(
            dirichlet,
            Some(mass),
            volume_nl,
            boundary_nl,
            r,
            q,
        ))
    }

    /// `∂I/∂u_i`
    pub fn gradient(&self, u: &DiscreteField) -> Result<Vec<f64>> {
        u.check_len(&self.mesh)?;
        let v = &u.values;
        let (r, q) = (self.config.r_exp, self.config.q_exp);
        let mut g: Vec<f64> = self
            .weights
            .iter()
            .zip(v)
            .map(|(w, x)| w * (x - x.abs().powf(r - 2.0) * x))
            .collect();
        for (e, k) in self.stiffness.iter().enumerate() {
            let d = k * (v[e + 1] - v[e]);
            g[e] -= d;
            g[e + 1] += d;
        }
        let last = v.len() - 1;
        g[last] -= self.boundary_weight * v[last].abs().powf(q - 2.0) * v[last];
        Ok(g)
    }

    /// The `H¹` Gram matrix `A` with `uᵀAu = ∫|∇u|² + u²`.
    pub fn gram(&self) -> Tridiagonal {
        let mut a = Tridiagonal::zeros(self.len());
        a.diag.copy_from_slice(&self.weights);
        for (e, k) in self.stiffness.iter().enumerate() {
            a.diag[e] += k;
            a.diag[e + 1] += k;
            a.lower[e] -= k;
            a.upper[e] -= k;
        }
        a
    }

    /// Hessian of the discrete energy.
    pub fn hessian(&self, u: &DiscreteField) -> Result<Tridiagonal> {
        u.check_len(&self.mesh)?;
        let (r, q) = (self.config.r_exp, self.config.q_exp);
        let mut h = self.gram();
        for (i, x) in u.values.iter().enumerate() {
            h.diag[i] -= self.weights[i] * (r - 1.0) * x.abs().powf(r - 2.0);
        }
        let last = self.len() - 1;
        h.diag[last] -= self.boundary_weight * (q - 1.0) * u.values[last].abs().powf(q - 2.0);
        Ok(h)
    }

    /// `H¹` Riesz representative `A⁻¹g` of a gradient and its norm `√(gᵀA⁻¹g)`.
    pub fn sobolev_gradient(&self, g: &[f64]) -> Result<(Vec<f64>, f64)> {
        let d = self.gram().solve(g)?;
        let n: f64 = g.iter().zip(&d).map(|(a, b)| a * b).sum();
        Ok((d, n.max(0.0).sqrt()))
    }

    /// `‖u‖_{H¹}`
    pub fn h1_norm(&self, u: &DiscreteField) -> Result<f64> {
        let e = self.energy(u)?;
        Ok((e.dirichlet + e.mass.unwrap_or(0.0)).sqrt())
    }

    /// `⟨I′(u), u⟩ = ‖u‖² − ∫|u|^r − ∮|u|^q`
    pub fn nehari_residual(&self, u: &DiscreteField) -> Result<f64> {
        let e = self.energy(u)?;
        Ok(e.dirichlet + e.mass.unwrap_or(0.0) - e.volume_nl - e.boundary_nl)
    }
}

pub fn assemble_energy(field: &DiscreteField, cfg: &SolverConfig) -> Result<EnergyBreakdown> {
    RadialProblem::new(cfg)?.energy(field)
}

/// Gradient of the discrete energy with respect to the nodal values.
pub fn energy_gradient(field: &DiscreteField, cfg: &SolverConfig) -> Result<DiscreteField> {
    Ok(DiscreteField::new(
        RadialProblem::new(cfg)?.gradient(field)?,
    ))
}
