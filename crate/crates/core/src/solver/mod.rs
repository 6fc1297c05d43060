//! Radial critical points of
//! `I(u) = ½∫(|∇u|² + u²) − (1/r)∫|u|^r − (1/q)∮|u|^q` on balls `B_R`.
//!
//! Fields are continuous piecewise-linear in `ρ = |x|`. The Dirichlet part
//! uses the midpoint rule on each cell and the volume terms the dual-cell
//! rule `Σ w_i F(u_i)`, `w_i = ∫ρ^{N-1}` over `[ρ_{i-½}, ρ_{i+½}]`. The
//! resulting nodal equations are the conservative finite-volume scheme,
//! consistent at the origin and exact on constant fields, and the discrete
//! functional has them as its exact gradient.
//!
//! Ground states minimize `I` on the Nehari set by projected `H¹`-gradient
//! descent finished with Newton steps; sign-changing states do the same on
//! the nodal Nehari set.

mod energy;
mod excited;
mod mesh;
mod nehari;
mod threshold;
mod tridiag;
mod verify;

pub use energy::{assemble_energy, energy_gradient, RadialProblem};
pub use excited::find_excited_state;
pub use mesh::{DiscreteField, RadialMesh};
pub use nehari::{
    default_starts, find_ground_state, find_ground_state_multistart, nehari_scale,
    MountainPassResult,
};
pub use threshold::{threshold_report, ThresholdReport, SUBCRITICAL_THRESHOLD_LABEL};
pub use tridiag::Tridiagonal;
pub use verify::{verify_solution, SolutionResiduals};

use serde::{Deserialize, Serialize};

use crate::asymptotics::GapRegime;
use crate::bubbles::{critical_exponent, critical_trace_exponent};
use crate::error::{check_dim, check_positive, Error, Result};

/// Relative tolerance for calling an exponent critical.
const CRITICAL_MATCH: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// `r < 2*`, `q < 2_*`
    Subcritical,
    /// `r = 2*`, `q < 2_*`
    VolumeCritical,
    /// `r < 2*`, `q = 2_*`
    TraceCritical,
    /// `r = 2*`, `q = 2_*`
    DoubleCritical,
}

impl Regime {
    pub fn name(self) -> &'static str {
        match self {
            Regime::Subcritical => "subcritical",
            Regime::VolumeCritical => "volume-critical",
            Regime::TraceCritical => "trace-critical",
            Regime::DoubleCritical => "double-critical",
        }
    }

    pub fn classify(dim: usize, r: f64, q: f64) -> Regime {
        let at = |x: f64, c: f64| ((x - c) / c).abs() <= CRITICAL_MATCH;
        match (
            at(r, critical_exponent(dim)),
            at(q, critical_trace_exponent(dim)),
        ) {
            (false, false) => Regime::Subcritical,
            (true, false) => Regime::VolumeCritical,
            (false, true) => Regime::TraceCritical,
            (true, true) => Regime::DoubleCritical,
        }
    }

    /// The energy-gap regime with the same compactness threshold.
    pub fn gap_regime(self) -> Option<GapRegime> {
        match self {
            Regime::Subcritical => None,
            Regime::VolumeCritical => Some(GapRegime::VolCrit),
            Regime::TraceCritical => Some(GapRegime::TraceCrit),
            Regime::DoubleCritical => Some(GapRegime::DoubleCrit),
        }
    }

    /// Compactness threshold; `None` when compactness holds at every level.
    pub fn threshold(self, dim: usize) -> Result<Option<f64>> {
        self.gap_regime().map(|g| g.threshold(dim)).transpose()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub dim: usize,
    pub radius: f64,
    pub r_exp: f64,
    pub q_exp: f64,
    /// Number of mesh cells.
    pub mesh_size: usize,
    /// Target dual `H¹` norm of the energy gradient.
    pub tol_grad: f64,
    pub max_iterations: usize,
}

impl SolverConfig {
    pub fn new(
        dim: usize,
        radius: f64,
        r_exp: f64,
        q_exp: f64,
        mesh_size: usize,
        tol_grad: f64,
    ) -> Result<Self> {
        let cfg = SolverConfig {
            dim,
            radius,
            r_exp,
            q_exp,
            mesh_size,
            tol_grad,
            max_iterations: 20_000,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        check_dim(self.dim, 3, "the solver needs N >= 3")?;
        check_positive("radius", self.radius)?;
        check_positive("tol_grad", self.tol_grad)?;
        let crit = critical_exponent(self.dim) * (1.0 + CRITICAL_MATCH);
        let trace = critical_trace_exponent(self.dim) * (1.0 + CRITICAL_MATCH);
        if !(self.r_exp > 2.0 && self.r_exp <= crit) {
            return Err(Error::Parameter {
                name: "r_exp",
                value: self.r_exp,
                reason: "must lie in (2, 2N/(N-2)]",
            });
        }
        if !(self.q_exp > 2.0 && self.q_exp <= trace) {
            return Err(Error::Parameter {
                name: "q_exp",
                value: self.q_exp,
                reason: "must lie in (2, 2(N-1)/(N-2)]",
            });
        }
        if self.mesh_size < 8 {
            return Err(Error::Parameter {
                name: "mesh_size",
                value: self.mesh_size as f64,
                reason: "need at least 8 cells",
            });
        }
        if self.max_iterations == 0 {
            return Err(Error::Parameter {
                name: "max_iterations",
                value: 0.0,
                reason: "must be positive",
            });
        }
        Ok(())
    }

    pub fn regime(&self) -> Regime {
        Regime::classify(self.dim, self.r_exp, self.q_exp)
    }

    pub fn mesh(&self) -> Result<RadialMesh> {
        RadialMesh::graded(self.radius, self.mesh_size)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classification_is_total() {
        assert_eq!(Regime::classify(3, 3.0, 3.0), Regime::Subcritical);
        assert_eq!(Regime::classify(3, 6.0, 3.0), Regime::VolumeCritical);
        assert_eq!(Regime::classify(3, 3.0, 4.0), Regime::TraceCritical);
        assert_eq!(Regime::classify(3, 6.0, 4.0), Regime::DoubleCritical);
        assert_eq!(
            Regime::classify(5, 10.0 / 3.0, 8.0 / 3.0),
            Regime::DoubleCritical
        );
    }

    #[test]
    fn config_ranges() {
        assert!(SolverConfig::new(3, 1.0, 3.0, 3.0, 100, 1e-8).is_ok());
        assert!(SolverConfig::new(3, 1.0, 6.0, 4.0, 100, 1e-8).is_ok());
        assert!(SolverConfig::new(3, 1.0, 6.5, 3.0, 100, 1e-8).is_err());
        assert!(SolverConfig::new(3, 1.0, 3.0, 2.0, 100, 1e-8).is_err());
        assert!(SolverConfig::new(2, 1.0, 3.0, 3.0, 100, 1e-8).is_err());
        assert!(SolverConfig::new(3, 0.0, 3.0, 3.0, 100, 1e-8).is_err());
        assert!(SolverConfig::new(3, 1.0, 3.0, 3.0, 4, 1e-8).is_err());
    }

    #[test]
    fn thresholds_by_regime() {
        assert_eq!(Regime::Subcritical.threshold(4).unwrap(), None);
        let s = crate::bubbles::sobolev_constants(4).unwrap().s;
        let t = Regime::VolumeCritical.threshold(4).unwrap().unwrap();
        assert!((t - s * s / 8.0).abs() < 1e-12 * t);
    }
}
