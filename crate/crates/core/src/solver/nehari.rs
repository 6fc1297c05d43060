use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bubbles::EnergyBreakdown;
use crate::error::{Error, Result};
use crate::fibering::fibering_maximizer;

use super::energy::RadialProblem;
use super::mesh::DiscreteField;
use super::{Regime, SolverConfig};

/// Levels closer than this are ties in multistart.
const LEVEL_TIE: f64 = 1e-10;
/// Armijo constant of the descent line search.
const ARMIJO: f64 = 1e-4;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MountainPassResult {
    pub field: DiscreteField,
    /// Mesh nodes of `field`.
    pub nodes: Vec<f64>,
    pub level: f64,
    /// Dual `H¹` norm of the energy gradient.
    pub grad_norm: f64,
    /// `⟨I′(u), u⟩`
    pub nehari_residual: f64,
    pub iterations: usize,
    pub energy: EnergyBreakdown,
    pub h1_norm: f64,
    pub sign_changes: usize,
    pub regime: Regime,
}

/// The `t > 0` maximizing `t ↦ I(t·field)`.
pub fn nehari_scale(field: &DiscreteField, cfg: &SolverConfig) -> Result<f64> {
    scale_on(&RadialProblem::new(cfg)?, field)
}

pub(crate) fn scale_on(p: &RadialProblem, u: &DiscreteField) -> Result<f64> {
    let e = p.energy(u)?;
    if u.is_zero() {
        return Err(Error::TrivialSolution);
    }
    fibering_maximizer(
        e.dirichlet + e.mass.unwrap_or(0.0),
        e.volume_nl,
        p.config.r_exp,
        e.boundary_nl,
        p.config.q_exp,
    )
}

/// Positive starting fields: flat, centre-peaked, boundary-peaked and a
/// mid-radius bump.
pub fn default_starts(cfg: &SolverConfig) -> Result<Vec<DiscreteField>> {
    let mesh = cfg.mesh()?;
    let r = cfg.radius;
    Ok(vec![
        DiscreteField::from_fn(&mesh, |_| 1.0),
        DiscreteField::from_fn(&mesh, |x| (-4.0 * (x / r).powi(2)).exp()),
        DiscreteField::from_fn(&mesh, |x| 0.05 + (x / r).powi(2)),
        DiscreteField::from_fn(&mesh, |x| 0.05 + (-16.0 * (x / r - 0.5).powi(2)).exp()),
    ])
}

/// Nehari minimization from one start.
pub fn find_ground_state(cfg: &SolverConfig, init: &DiscreteField) -> Result<MountainPassResult> {
    let p = RadialProblem::new(cfg)?;
    init.check_len(p.mesh())?;
    if init.is_zero() || !init.is_finite() {
        return Err(Error::TrivialSolution);
    }
    let project = |u: &DiscreteField| -> Result<Option<DiscreteField>> {
        if u.is_zero() || !u.is_finite() {
            return Ok(None);
        }
        Ok(Some(u.scaled(scale_on(&p, u)?)))
    };
    let (u, iterations) = descend(&p, init, &project, |_| true)?;
    finish(&p, u, iterations)
}

/// Lowest level over several starts; ties go to the smaller `H¹` norm and
/// then to the earlier start.
pub fn find_ground_state_multistart(
    cfg: &SolverConfig,
    starts: &[DiscreteField],
) -> Result<MountainPassResult> {
    if starts.is_empty() {
        return Err(Error::Empty("multistart set"));
    }
    let runs: Vec<Result<MountainPassResult>> = starts
        .par_iter()
        .map(|s| find_ground_state(cfg, s))
        .collect();
    let mut best: Option<MountainPassResult> = None;
    let mut first_err = None;
    for run in runs {
        match run {
            Ok(r) => {
                let better = match &best {
                    None => true,
                    Some(b) => {
                        r.level < b.level - LEVEL_TIE
                            || ((r.level - b.level).abs() <= LEVEL_TIE && r.h1_norm < b.h1_norm)
                    }
                };
                if better {
                    best = Some(r);
                }
            }
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    best.ok_or_else(|| first_err.unwrap_or(Error::TrivialSolution))
}

pub(crate) fn finish(
    p: &RadialProblem,
    u: DiscreteField,
    iterations: usize,
) -> Result<MountainPassResult> {
    let g = p.gradient(&u)?;
    let (_, grad_norm) = p.sobolev_gradient(&g)?;
    let energy = p.energy(&u)?;
    let h1_norm = (energy.dirichlet + energy.mass.unwrap_or(0.0)).sqrt();
    if h1_norm <= 1e-10 {
        return Err(Error::TrivialSolution);
    }
    if grad_norm > p.config.tol_grad {
        return Err(Error::NoConvergence {
            iterations,
            grad_norm,
        });
    }
    Ok(MountainPassResult {
        nodes: p.mesh().nodes().to_vec(),
        level: energy.total,
        grad_norm,
        nehari_residual: p.nehari_residual(&u)?,
        iterations,
        h1_norm,
        sign_changes: u.sign_changes(),
        regime: p.config.regime(),
        energy,
        field: u,
    })
}

/// Projected `H¹`-gradient descent followed by Newton polishing.
///
/// `project` maps a field back onto the constraint set (`None` when it
/// left the admissible cone); `keep` vets Newton iterates.
pub(crate) fn descend(
    p: &RadialProblem,
    init: &DiscreteField,
    project: &dyn Fn(&DiscreteField) -> Result<Option<DiscreteField>>,
    keep: impl Fn(&DiscreteField) -> bool,
) -> Result<(DiscreteField, usize)> {
    let tol = p.config.tol_grad;
    let mut u = project(init)?.ok_or(Error::TrivialSolution)?;
    let mut level = p.energy(&u)?.total;
    let mut tau = 0.5;
    let mut iterations = 0;
    let mut switch = 1e-3;
    let mut grad_norm = f64::INFINITY;

    while iterations < p.config.max_iterations {
        let g = p.gradient(&u)?;
        let (d, gn) = p.sobolev_gradient(&g)?;
        grad_norm = gn;
        if gn <= tol {
            return Ok((u, iterations));
        }
        let scale = p.h1_norm(&u)?.max(1.0);
        if gn <= switch * scale {
            if let Some((v, used)) = newton(p, &u, &keep)? {
                return Ok((v, iterations + used));
            }
            // Newton left the basin: descend further before retrying.
            switch *= 0.01;
        }
        iterations += 1;
        let mut accepted = false;
        while tau > 1e-14 {
            let trial =
                DiscreteField::new(u.values.iter().zip(&d).map(|(a, b)| a - tau * b).collect());
            if let Some(v) = project(&trial)? {
                let e = p.energy(&v)?.total;
                if e <= level - ARMIJO * tau * gn * gn {
                    u = v;
                    level = e;
                    tau = (tau * 1.5).min(4.0);
                    accepted = true;
                    break;
                }
            }
            tau *= 0.5;
        }
        if !accepted {
            // Line search stalled at round-off level: polish or give up.
            return match newton(p, &u, &keep)? {
                Some((v, used)) => Ok((v, iterations + used)),
                None => Err(Error::NoConvergence {
                    iterations,
                    grad_norm,
                }),
            };
        }
    }
    Err(Error::NoConvergence {
        iterations,
        grad_norm,
    })
}

/// Newton iteration on `∇I = 0`; `None` if it does not settle quickly.
fn newton(
    p: &RadialProblem,
    start: &DiscreteField,
    keep: &impl Fn(&DiscreteField) -> bool,
) -> Result<Option<(DiscreteField, usize)>> {
    let tol = p.config.tol_grad;
    let mut u = start.clone();
    let mut gn = p.sobolev_gradient(&p.gradient(&u)?)?.1;
    for it in 1..=40 {
        let g = p.gradient(&u)?;
        let h = p.hessian(&u)?;
        let step = match h.solve(&g) {
            Ok(s) => s,
            Err(_) => return Ok(None),
        };
        let mut lambda = 1.0;
        let mut next = None;
        for _ in 0..8 {
            let v = DiscreteField::new(
                u.values
                    .iter()
                    .zip(&step)
                    .map(|(a, s)| a - lambda * s)
                    .collect(),
            );
            if v.is_finite() {
                let vn = p.sobolev_gradient(&p.gradient(&v)?)?.1;
                if vn < gn {
                    next = Some((v, vn));
                    break;
                }
            }
            lambda *= 0.5;
        }
        let Some((v, vn)) = next else {
            return Ok(if gn <= tol && keep(&u) {
                Some((u, it))
            } else {
                None
            });
        };
        u = v;
        gn = vn;
        if !keep(&u) || p.h1_norm(&u)? <= 1e-10 {
            return Ok(None);
        }
        if gn <= tol {
            // One more step costs nothing and lands near round-off.
            let g = p.gradient(&u)?;
            if let Ok(s) = p.hessian(&u)?.solve(&g) {
                let v = DiscreteField::new(u.values.iter().zip(&s).map(|(a, s)| a - s).collect());
                if v.is_finite() && keep(&v) && p.sobolev_gradient(&p.gradient(&v)?)?.1 < gn {
                    u = v;
                }
            }
            return Ok(Some((u, it)));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> SolverConfig {
        SolverConfig::new(3, 1.0, 3.0, 3.0, 200, 1e-10).unwrap()
    }

    #[test]
    fn scale_of_a_nehari_field_is_one() {
        let c = cfg();
        let p = RadialProblem::new(&c).unwrap();
        let u = DiscreteField::from_fn(p.mesh(), |r| 1.0 + r);
        let t = nehari_scale(&u, &c).unwrap();
        let on = u.scaled(t);
        assert!((nehari_scale(&on, &c).unwrap() - 1.0).abs() < 1e-12);
        assert!(p.nehari_residual(&on).unwrap().abs() < 1e-10 * p.h1_norm(&on).unwrap().powi(2));
        // Equal exponents: homogeneity gives exactly 1/2.
        assert!((nehari_scale(&on.scaled(2.0), &c).unwrap() - 0.5).abs() < 1e-12);
        assert!(nehari_scale(&DiscreteField::zeros(p.len()), &c).is_err());
    }

    #[test]
    fn ground_state_is_positive_critical_point() {
        let c = cfg();
        let starts = default_starts(&c).unwrap();
        let res = find_ground_state_multistart(&c, &starts).unwrap();
        assert!(res.grad_norm <= c.tol_grad);
        assert!(res.level > 0.0);
        assert!(res.field.values.iter().all(|v| *v > 0.0));
        assert!(res.nehari_residual.abs() <= c.tol_grad * res.h1_norm);
    }

    #[test]
    fn starts_agree() {
        let c = cfg();
        let levels: Vec<f64> = default_starts(&c)
            .unwrap()
            .iter()
            .map(|s| find_ground_state(&c, s).unwrap().level)
            .collect();
        for l in &levels {
            assert!((l - levels[0]).abs() < 1e-10 * levels[0]);
        }
    }
}
