use serde::{Deserialize, Serialize};

use crate::error::{check_positive, Error, Result};

/// Nodes `0 = ρ₀ < … < ρ_M = R` of a radial mesh.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialMesh {
    nodes: Vec<f64>,
}

/// Refinement depth of the graded mesh: end cells are this fraction of
/// the mean cell.
const END_CELL_RATIO: f64 = 0.5;

impl RadialMesh {
    pub fn new(nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 3 {
            return Err(Error::Parameter {
                name: "mesh nodes",
                value: nodes.len() as f64,
                reason: "a radial mesh needs at least 3 nodes",
            });
        }
        if nodes[0] != 0.0 {
            return Err(Error::Parameter {
                name: "first node",
                value: nodes[0],
                reason: "radial meshes start at the origin",
            });
        }
        if nodes.iter().any(|x| !x.is_finite()) || nodes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Parameter {
                name: "mesh nodes",
                value: f64::NAN,
                reason: "nodes must be finite and strictly increasing",
            });
        }
        Ok(RadialMesh { nodes })
    }

    /// `cells` cells on `[0, radius]`, refined smoothly towards both ends.
    ///
    /// The map `s ↦ s − a sin(2πs)/(2π)` has slope `1 − a` at `s = 0, 1`
    /// and is smooth, so the cell sizes vary slowly and second-order
    /// accuracy survives.
    pub fn graded(radius: f64, cells: usize) -> Result<Self> {
        check_positive("radius", radius)?;
        if cells < 2 {
            return Err(Error::Parameter {
                name: "mesh_size",
                value: cells as f64,
                reason: "need at least 2 cells",
            });
        }
        let a = 1.0 - END_CELL_RATIO;
        let tau = std::f64::consts::TAU;
        let mut nodes: Vec<f64> = (0..=cells)
            .map(|i| {
                let s = i as f64 / cells as f64;
                radius * (s - a * (tau * s).sin() / tau)
            })
            .collect();
        nodes[0] = 0.0;
        nodes[cells] = radius;
        RadialMesh::new(nodes)
    }

    pub fn uniform(radius: f64, cells: usize) -> Result<Self> {
        check_positive("radius", radius)?;
        RadialMesh::new(
            (0..=cells)
                .map(|i| radius * i as f64 / cells as f64)
                .collect(),
        )
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn radius(&self) -> f64 {
        *self.nodes.last().unwrap_or(&0.0)
    }

    pub fn cells(&self) -> usize {
        self.nodes.len() - 1
    }

    /// `∫ ρ^{N-1} dρ` over each dual cell `[ρ_{i-½}, ρ_{i+½}]` (clipped to
    /// `[0, R]`).
    pub fn dual_volumes(&self, dim: usize) -> Vec<f64> {
        let n = dim as i32;
        let x = &self.nodes;
        let last = x.len() - 1;
        (0..x.len())
            .map(|i| {
                let a = if i == 0 { 0.0 } else { 0.5 * (x[i - 1] + x[i]) };
                let b = if i == last {
                    x[i]
                } else {
                    0.5 * (x[i] + x[i + 1])
                };
                (b.powi(n) - a.powi(n)) / dim as f64
            })
            .collect()
    }

    /// `ρ_{mid}^{N-1} / h` for each cell: the midpoint-rule weight of `(Δu)²`.
    pub fn cell_stiffness(&self, dim: usize) -> Vec<f64> {
        let m = dim as i32 - 1;
        self.nodes
            .windows(2)
            .map(|c| (0.5 * (c[0] + c[1])).powi(m) / (c[1] - c[0]))
            .collect()
    }
}

/// Nodal values of a piecewise-linear radial field.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscreteField {
    pub values: Vec<f64>,
}

impl DiscreteField {
    pub fn new(values: Vec<f64>) -> Self {
        DiscreteField { values }
    }

    pub fn zeros(len: usize) -> Self {
        DiscreteField {
            values: vec![0.0; len],
        }
    }

    /// Samples `f(ρ)` at the mesh nodes.
    pub fn from_fn(mesh: &RadialMesh, f: impl Fn(f64) -> f64) -> Self {
        DiscreteField {
            values: mesh.nodes().iter().map(|&r| f(r)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v == 0.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn scaled(&self, t: f64) -> Self {
        DiscreteField {
            values: self.values.iter().map(|v| t * v).collect(),
        }
    }

    /// Number of sign changes along the mesh, ignoring exact zeros.
    pub fn sign_changes(&self) -> usize {
        let mut last = 0.0f64;
        let mut count = 0;
        for &v in &self.values {
            if v != 0.0 {
                if last != 0.0 && v.signum() != last.signum() {
                    count += 1;
                }
                last = v;
            }
        }
        count
    }

    pub(crate) fn check_len(&self, mesh: &RadialMesh) -> Result<()> {
        if self.values.len() != mesh.len() {
            Err(Error::Mismatch {
                mesh: mesh.len(),
                field: self.values.len(),
            })
        } else {
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graded_mesh_shape() {
        let m = RadialMesh::graded(2.0, 100).unwrap();
        assert_eq!(m.len(), 101);
        assert_eq!(m.radius(), 2.0);
        let h: Vec<f64> = m.nodes().windows(2).map(|w| w[1] - w[0]).collect();
        let mid = h[50];
        assert!(h[0] < 0.6 * mid && h[99] < 0.6 * mid);
        for w in h.windows(2) {
            assert!((w[1] / w[0] - 1.0).abs() < 0.05);
        }
    }

    #[test]
    fn dual_volumes_partition_the_ball() {
        let m = RadialMesh::graded(1.5, 37).unwrap();
        for dim in 3..=9 {
            let total: f64 = m.dual_volumes(dim).iter().sum();
            let exact = 1.5f64.powi(dim as i32) / dim as f64;
            assert!((total / exact - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn midpoint_stiffness_is_second_order() {
        // ∫_0^1 (u′)² ρ² with u = ρ² is 4/5.
        let err = |cells: usize| {
            let m = RadialMesh::graded(1.0, cells).unwrap();
            let e: f64 = m
                .cell_stiffness(3)
                .iter()
                .zip(m.nodes().windows(2))
                .map(|(k, w)| k * (w[1] * w[1] - w[0] * w[0]).powi(2))
                .sum();
            (e - 0.8).abs()
        };
        let order = (err(100) / err(200)).log2();
        assert!(order > 1.9, "{order}");
    }

    #[test]
    fn rejects_bad_nodes() {
        assert!(RadialMesh::new(vec![0.0, 1.0]).is_err());
        assert!(RadialMesh::new(vec![0.1, 0.5, 1.0]).is_err());
        assert!(RadialMesh::new(vec![0.0, 0.5, 0.5, 1.0]).is_err());
        assert!(RadialMesh::graded(-1.0, 10).is_err());
    }

    #[test]
    fn counts_sign_changes() {
        let f = DiscreteField::new(vec![1.0, 0.5, 0.0, -0.2, -1.0, 0.0, 0.3]);
        assert_eq!(f.sign_changes(), 2);
        assert_eq!(DiscreteField::zeros(4).sign_changes(), 0);
    }
}
