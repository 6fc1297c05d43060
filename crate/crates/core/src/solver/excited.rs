//! Sign-changing radial states by minimization on the nodal Nehari set
//! `{u : ⟨I′(u), u_j⟩ = 0 for every nodal piece u_j}`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

use super::energy::RadialProblem;
use super::mesh::DiscreteField;
use super::nehari::{
    default_starts, descend, find_ground_state_multistart, finish, MountainPassResult,
};
use super::SolverConfig;

/// A radial solution with `node_count` sign changes; `node_count = 0` is
/// the ground state.
pub fn find_excited_state(cfg: &SolverConfig, node_count: usize) -> Result<MountainPassResult> {
    if node_count == 0 {
        return find_ground_state_multistart(cfg, &default_starts(cfg)?);
    }
    if cfg.regime() != super::Regime::Subcritical {
        return Err(Error::Parameter {
            name: "node_count",
            value: node_count as f64,
            reason: "nodal states are computed for subcritical exponents only",
        });
    }
    let p = RadialProblem::new(cfg)?;
    let k = node_count as f64;
    let r = cfg.radius;
    let init = DiscreteField::from_fn(p.mesh(), |x| (k * std::f64::consts::PI * x / r).cos());
    let project = |u: &DiscreteField| nodal_projection(&p, u, node_count);
    let keep = |u: &DiscreteField| u.sign_changes() == node_count;
    let (u, iterations) = descend(&p, &init, &project, keep)?;
    let found = u.sign_changes();
    if found != node_count {
        return Err(Error::NodalStructure {
            expected: node_count,
            found,
        });
    }
    finish(&p, u, iterations)
}

/// Splits `u` into its nodal pieces (maximal runs of one sign; zeros join
/// the preceding run).
fn nodal_pieces(u: &DiscreteField) -> Vec<Vec<f64>> {
    let n = u.len();
    let mut pieces: Vec<Vec<f64>> = Vec::new();
    let mut sign = 0.0f64;
    for (i, &v) in u.values.iter().enumerate() {
        if v != 0.0 && v.signum() != sign {
            sign = v.signum();
            pieces.push(vec![0.0; n]);
        }
        if let Some(last) = pieces.last_mut() {
            last[i] = v;
        }
    }
    pieces
}

/// Scales each nodal piece so that the pieces are jointly stationary for
/// `t ↦ I(Σ t_j u_j)`; `None` when the nodal count is wrong or the
/// scaling does not exist.
fn nodal_projection(
    p: &RadialProblem,
    u: &DiscreteField,
    nodes: usize,
) -> Result<Option<DiscreteField>> {
    if !u.is_finite() {
        return Ok(None);
    }
    let pieces = nodal_pieces(u);
    if pieces.len() != nodes + 1 {
        return Ok(None);
    }
    let m = pieces.len();
    let (r, q) = (p.config.r_exp, p.config.q_exp);
    let gram = p.gram();
    let a_pieces: Vec<Vec<f64>> = pieces.iter().map(|c| gram.mul_vec(c)).collect();
    let quad = DMatrix::from_fn(m, m, |i, j| dot(&pieces[i], &a_pieces[j]));
    let mut vol = Vec::with_capacity(m);
    let mut bdry = Vec::with_capacity(m);
    for c in &pieces {
        let e = p.energy(&DiscreteField::new(c.clone()))?;
        vol.push(e.volume_nl);
        bdry.push(e.boundary_nl);
    }
    // Gauss–Seidel on Φ'(t)_j = (Qt)_j − V_j t_j^{r-1} − B_j t_j^{q-1}. The
    // off-diagonal Q_jl are nonnegative (adjacent pieces have opposite
    // signs), so each one-dimensional equation has a unique positive root.
    let mut t = vec![1.0; m];
    let mut settled = false;
    for _ in 0..500 {
        let mut change = 0.0f64;
        for j in 0..m {
            let c: f64 = (0..m)
                .filter(|&l| l != j)
                .map(|l| quad[(j, l)] * t[l])
                .sum();
            let Some(tj) = piece_scale(quad[(j, j)], c, vol[j], r, bdry[j], q) else {
                return Ok(None);
            };
            change = change.max((tj - t[j]).abs() / tj);
            t[j] = tj;
        }
        if change <= 1e-15 {
            settled = true;
            break;
        }
    }
    if !settled {
        return Ok(None);
    }
    let mut out = vec![0.0; u.len()];
    for (c, tj) in pieces.iter().zip(&t) {
        for (o, v) in out.iter_mut().zip(c) {
            *o += tj * v;
        }
    }
    Ok(Some(DiscreteField::new(out)))
}

/// Positive root of `a + c/t − v t^{r-2} − b t^{q-2}` (strictly decreasing
/// for `c ≥ 0`).
fn piece_scale(a: f64, c: f64, v: f64, r: f64, b: f64, q: f64) -> Option<f64> {
    if !(a > 0.0 && c >= 0.0 && v + b > 0.0) {
        return None;
    }
    let h = |t: f64| a + c / t - v * t.powf(r - 2.0) - b * t.powf(q - 2.0);
    let (mut lo, mut hi) = (1.0, 1.0);
    while h(lo) <= 0.0 {
        lo *= 0.5;
        if lo < 1e-300 {
            return None;
        }
    }
    while h(hi) > 0.0 {
        hi *= 2.0;
        if hi > 1e300 {
            return None;
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if h(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-16 * hi {
            break;
        }
    }
    Some(0.5 * (lo + hi))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
