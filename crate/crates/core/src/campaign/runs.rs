//! One runner per command. Each returns its tables and checks in a fixed
//! order; parallel work is collected back in input order.

use rayon::prelude::*;
use statrs::function::gamma::ln_gamma;

use crate::asymptotics::{
    threshold_gap_with, verify_lemma_with, GapOptions, GapRegime, ItemCheck, Lemma, LemmaOptions,
    LemmaReport,
};
use crate::bubbles::{
    critical_exponent, critical_trace_exponent, ground_state_level, halfspace_integral,
    pde_residual, sobolev_constants, BubbleKind, BubbleSpec, Density,
};
use crate::quadrature::{
    corner_moment_identity, power_shift_identity, sign_condition, sign_condition_closed_form,
    BoundaryModel, SignCondition, SphereRule,
};
use serde::{Deserialize, Serialize};

use crate::solver::{
    find_excited_state, threshold_report, verify_solution, MountainPassResult, SolutionResiduals,
    SolverConfig, ThresholdReport,
};
use crate::Result;

use super::config::CampaignConfig;
use super::table::{Cell, Table};
use super::Check;

/// Relative agreement required between the quadrature and closed-form
/// Sobolev constants, and between sign conditions and their reductions.
pub const CLOSED_FORM_TOL: f64 = 1e-8;

/// Bubble scales probed by `bubbles`.
pub const BUBBLE_SCALES: [f64; 3] = [0.25, 1.0, 4.0];

/// Sample points per residual check.
pub const BUBBLE_SAMPLES: usize = 200;

pub(super) struct Outcome {
    pub tables: Vec<Table>,
    pub checks: Vec<Check>,
    /// Extra JSON documents `(file name, text)`, written whatever the
    /// table format.
    pub documents: Vec<(String, String)>,
}

impl Outcome {
    fn new(tables: Vec<Table>, checks: Vec<Check>) -> Outcome {
        Outcome {
            tables,
            checks,
            documents: Vec::new(),
        }
    }
}

/// Full record of one solve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveRecord {
    pub dim: usize,
    pub r: f64,
    pub q: f64,
    pub nodes: usize,
    pub result: MountainPassResult,
    pub residuals: SolutionResiduals,
    pub threshold: ThresholdReport,
}

pub const SOLVE_RECORDS_FILE: &str = "solve_records.json";

fn err_check(name: String, dim: usize, e: &crate::Error) -> Check {
    Check::new(name, Some(dim), false, format!("error: {e}"))
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

/// `S` from the Aubin–Talenti closed form.
pub fn sobolev_closed_form(dim: usize) -> f64 {
    let n = dim as f64;
    let ratio = (ln_gamma(n / 2.0) - ln_gamma(n)).exp();
    std::f64::consts::PI * n * (n - 2.0) * ratio.powf(2.0 / n)
}

/// `S_T` from Escobar's closed form.
pub fn trace_sobolev_closed_form(dim: usize) -> f64 {
    let n = dim as f64;
    let area = 2.0 * std::f64::consts::PI.powf(n / 2.0) / ln_gamma(n / 2.0).exp();
    0.5 * (n - 2.0) * area.powf(1.0 / (n - 1.0))
}

pub(super) fn constants(cfg: &CampaignConfig) -> Outcome {
    let mut table = Table::new(
        "constants",
        &[
            "dim",
            "S",
            "S_T",
            "c_inf",
            "vol_threshold",
            "trace_threshold",
            "S_rel_err",
            "S_T_rel_err",
            "verdict",
        ],
    );
    let mut checks = Vec::new();
    let rows: Vec<_> = cfg
        .dims
        .par_iter()
        .map(|&dim| -> Result<_> { Ok((sobolev_constants(dim)?, ground_state_level(dim)?)) })
        .collect();
    for (&dim, row) in cfg.dims.iter().zip(rows) {
        let (consts, c_inf) = match row {
            Ok(v) => v,
            Err(e) => {
                checks.push(err_check("constants".into(), dim, &e));
                continue;
            }
        };
        let n = dim as f64;
        let vol = consts.s.powf(n / 2.0) / (2.0 * n);
        let trace = consts.s_trace.powf(n - 1.0) / (2.0 * (n - 1.0));
        let s_err = rel(consts.s, sobolev_closed_form(dim));
        let st_err = rel(consts.s_trace, trace_sobolev_closed_form(dim));
        let ordered = c_inf < vol;
        let closed = s_err <= CLOSED_FORM_TOL && st_err <= CLOSED_FORM_TOL;
        checks.push(Check::new(
            "c_inf_below_volume_threshold".into(),
            Some(dim),
            ordered,
            format!("c_inf = {c_inf:.12e}, S^(N/2)/(2N) = {vol:.12e}"),
        ));
        checks.push(Check::new(
            "sobolev_closed_form".into(),
            Some(dim),
            closed,
            format!("S rel err {s_err:.2e}, S_T rel err {st_err:.2e}"),
        ));
        table.push(vec![
            Cell::int(dim),
            Cell::float(consts.s),
            Cell::float(consts.s_trace),
            Cell::float(c_inf),
            Cell::float(vol),
            Cell::float(trace),
            Cell::float(s_err),
            Cell::float(st_err),
            Cell::verdict(ordered && closed),
        ]);
    }
    Outcome::new(vec![table], checks)
}

/// Deterministic sample points in the closed upper half-space at scale
/// `eps`: three quarters interior, the rest on `x_N = 0`. Coordinates come
/// from a Kronecker sequence in `[-3ε, 3ε]^{N-1} × (0, 3ε]`.
pub fn sample_points(dim: usize, eps: f64, count: usize) -> Vec<Vec<f64>> {
    const PRIMES: [f64; 12] = [2., 3., 5., 7., 11., 13., 17., 19., 23., 29., 31., 37.];
    let interior = count * 3 / 4;
    (0..count)
        .map(|i| {
            let k = (i + 1) as f64;
            let mut p: Vec<f64> = (0..dim)
                .map(|j| (k * PRIMES[j % PRIMES.len()].sqrt().fract() + 0.5 * j as f64).fract())
                .collect();
            for v in p.iter_mut().take(dim - 1) {
                *v = eps * (6.0 * *v - 3.0);
            }
            p[dim - 1] = if i < interior {
                eps * 3.0 * (1.0 - p[dim - 1])
            } else {
                0.0
            };
            p
        })
        .collect()
}

pub(super) fn bubbles(cfg: &CampaignConfig) -> Outcome {
    let tol = cfg.tolerances.residual;
    let mut residuals = Table::new(
        "bubble_residuals",
        &[
            "kind",
            "dim",
            "eps",
            "interior_max",
            "boundary_max",
            "verdict",
        ],
    );
    let mut energies = Table::new(
        "bubble_energies",
        &["kind", "dim", "dirichlet", "expected", "rel_err", "verdict"],
    );
    let mut checks = Vec::new();
    let grid: Vec<(BubbleKind, usize, f64)> = BubbleKind::ALL
        .iter()
        .flat_map(|&k| {
            cfg.dims
                .iter()
                .flat_map(move |&d| BUBBLE_SCALES.map(|e| (k, d, e)))
        })
        .collect();
    let results: Vec<_> = grid
        .par_iter()
        .map(|&(kind, dim, eps)| {
            let spec = BubbleSpec::new(kind, dim, eps)?;
            pde_residual(&spec, &sample_points(dim, eps, BUBBLE_SAMPLES))
        })
        .collect();
    for (&(kind, dim, eps), res) in grid.iter().zip(results) {
        let name = format!("residual/{}/eps={eps}", kind.name());
        match res {
            Ok(r) => {
                let ok = r.interior_max < tol && r.boundary_max < tol;
                checks.push(Check::new(
                    name,
                    Some(dim),
                    ok,
                    format!(
                        "interior {:.2e}, boundary {:.2e}",
                        r.interior_max, r.boundary_max
                    ),
                ));
                residuals.push(vec![
                    Cell::text(kind.name()),
                    Cell::int(dim),
                    Cell::float(eps),
                    Cell::float(r.interior_max),
                    Cell::float(r.boundary_max),
                    Cell::verdict(ok),
                ]);
            }
            Err(e) => checks.push(err_check(name, dim, &e)),
        }
    }

    let grid: Vec<(BubbleKind, usize)> = [BubbleKind::Interior, BubbleKind::Trace]
        .iter()
        .flat_map(|&k| cfg.dims.iter().map(move |&d| (k, d)))
        .collect();
    let results: Vec<_> = grid
        .par_iter()
        .map(|&(kind, dim)| -> Result<(f64, f64)> {
            let spec = BubbleSpec::new(kind, dim, 1.0)?;
            let dirichlet = halfspace_integral(&spec, Density::GradSq)?;
            let c = sobolev_constants(dim)?;
            let n = dim as f64;
            let expected = match kind {
                BubbleKind::Trace => c.s_trace.powf(n - 1.0),
                _ => 0.5 * c.s.powf(n / 2.0),
            };
            Ok((dirichlet, expected))
        })
        .collect();
    for (&(kind, dim), res) in grid.iter().zip(results) {
        let name = format!("dirichlet_energy/{}", kind.name());
        match res {
            Ok((d, expected)) => {
                let err = rel(d, expected);
                let ok = err <= cfg.tolerances.energy;
                checks.push(Check::new(
                    name,
                    Some(dim),
                    ok,
                    format!("rel err {err:.2e}"),
                ));
                energies.push(vec![
                    Cell::text(kind.name()),
                    Cell::int(dim),
                    Cell::float(d),
                    Cell::float(expected),
                    Cell::float(err),
                    Cell::verdict(ok),
                ]);
            }
            Err(e) => checks.push(err_check(name, dim, &e)),
        }
    }
    Outcome::new(vec![residuals, energies], checks)
}

/// `(check, lhs, rhs, rel_err, passed)`
type IdentityRow = (&'static str, f64, f64, f64, bool);

pub(super) fn identities(cfg: &CampaignConfig) -> Outcome {
    let mut table = Table::new(
        "identities",
        &["check", "dim", "lhs", "rhs", "rel_err", "verdict"],
    );
    let mut checks = Vec::new();
    let results: Vec<_> = cfg
        .dims
        .par_iter()
        .map(|&dim| -> Result<Vec<IdentityRow>> {
            let tol = cfg.tolerances.identity;
            let mut rows = Vec::new();
            for (name, c) in [
                ("power_shift", power_shift_identity(dim)?),
                ("corner_moment", corner_moment_identity(dim)?),
            ] {
                rows.push((name, c.lhs, c.rhs, c.rel_err, c.rel_err <= tol));
            }
            let model = BoundaryModel::uniform(dim, cfg.curvature, cfg.patch_radius)?;
            for (name, which) in [
                ("sign_trace_critical", SignCondition::TraceCritical),
                ("sign_double_critical", SignCondition::DoubleCritical),
            ] {
                let lhs = sign_condition(which, dim, &model)?;
                let rhs = sign_condition_closed_form(which, dim, model.mean_curvature())?;
                let err = rel(lhs, rhs);
                rows.push((name, lhs, rhs, err, lhs < 0.0 && err <= CLOSED_FORM_TOL));
            }
            Ok(rows)
        })
        .collect();
    for (&dim, res) in cfg.dims.iter().zip(results) {
        match res {
            Ok(rows) => {
                for (name, lhs, rhs, err, ok) in rows {
                    checks.push(Check::new(
                        name.into(),
                        Some(dim),
                        ok,
                        format!("lhs {lhs:.15e}, rhs {rhs:.15e}, rel err {err:.2e}"),
                    ));
                    table.push(vec![
                        Cell::text(name),
                        Cell::int(dim),
                        Cell::float(lhs),
                        Cell::float(rhs),
                        Cell::float(err),
                        Cell::verdict(ok),
                    ]);
                }
            }
            Err(e) => checks.push(err_check("identities".into(), dim, &e)),
        }
    }
    Outcome::new(vec![table], checks)
}

/// Boundary model of the lemma audits and threshold gaps.
pub fn campaign_model(cfg: &CampaignConfig, dim: usize) -> Result<BoundaryModel> {
    let m = BoundaryModel::uniform(dim, cfg.curvature, cfg.patch_radius)?;
    if dim == 3 {
        m.with_curvature_bounds(cfg.curvature, cfg.curvature)
    } else {
        Ok(m)
    }
}

pub fn lemma_options(cfg: &CampaignConfig) -> LemmaOptions {
    LemmaOptions {
        eps_min: cfg.eps_min,
        eps_max: cfg.eps_max,
        points: cfg.eps_points,
        coeff_tol: cfg.tolerances.coeff,
        c0_tol: cfg.tolerances.c0,
        power_tol: cfg.tolerances.power,
        ..LemmaOptions::default()
    }
}

fn check_label(check: &ItemCheck) -> String {
    match check {
        ItemCheck::Coefficient { .. } => "coefficient".into(),
        ItemCheck::Power { .. } => "power".into(),
        ItemCheck::LogRate => "log-rate".into(),
        ItemCheck::LinearLoss => "linear-loss".into(),
        ItemCheck::Bounded { rate } => format!("bounded({rate})"),
    }
}

pub(super) fn lemmas(cfg: &CampaignConfig) -> Outcome {
    let mut table = Table::new(
        "lemmas",
        &[
            "lemma",
            "item",
            "dim",
            "coeff_fitted",
            "coeff_closed_form",
            "rel_dev",
            "verdict",
            "quantity",
            "check",
            "c0_rel_dev",
            "log_coeff",
            "fit_residual",
        ],
    );
    let mut sweeps = Table::new(
        "lemma_sweeps",
        &["lemma", "item", "dim", "window", "eps", "value"],
    );
    let mut checks = Vec::new();
    let opts = lemma_options(cfg);
    let grid: Vec<(Lemma, usize)> = cfg
        .dims
        .iter()
        .flat_map(|&d| BubbleKind::ALL.map(|k| (Lemma::for_dim(k, d), d)))
        .collect();
    let reports: Vec<Result<LemmaReport>> = grid
        .par_iter()
        .map(|&(lemma, dim)| verify_lemma_with(lemma, dim, &campaign_model(cfg, dim)?, &opts))
        .collect();
    for (&(lemma, dim), report) in grid.iter().zip(reports) {
        let report = match report {
            Ok(r) => r,
            Err(e) => {
                checks.push(err_check(format!("lemma/{}", lemma.name()), dim, &e));
                continue;
            }
        };
        for item in &report.items {
            let c0 = item
                .refit
                .as_ref()
                .map(|r| r.c0_rel_dev)
                .or(item.c0_rel_dev);
            checks.push(Check::new(
                format!("lemma/{}/{}", lemma.name(), item.item),
                Some(dim),
                item.passed,
                format!(
                    "{} {}: fitted {:.6e}, reference {}, rel dev {}, c0 rel dev {}",
                    item.quantity,
                    check_label(&item.check),
                    item.fitted,
                    item.reference.map_or("-".into(), |v| format!("{v:.6e}")),
                    item.rel_dev.map_or("-".into(), |v| format!("{v:.2e}")),
                    c0.map_or("-".into(), |v| format!("{v:.2e}")),
                ),
            ));
            table.push(vec![
                Cell::text(lemma.name()),
                Cell::text(item.item.clone()),
                Cell::int(dim),
                Cell::float(item.fitted),
                Cell::opt(item.reference),
                Cell::opt(item.rel_dev),
                Cell::verdict(item.passed),
                Cell::text(item.quantity.clone()),
                Cell::text(check_label(&item.check)),
                Cell::opt(c0),
                Cell::float(item.fit.log_coeff),
                Cell::float(item.fit.fit_residual),
            ]);
            let windows = std::iter::once(("main", &item.samples))
                .chain(item.refit.as_ref().map(|r| ("shifted", &r.samples)));
            for (window, samples) in windows {
                for &(eps, value) in samples {
                    sweeps.push(vec![
                        Cell::text(lemma.name()),
                        Cell::text(item.item.clone()),
                        Cell::int(dim),
                        Cell::text(window),
                        Cell::float(eps),
                        Cell::float(value),
                    ]);
                }
            }
        }
    }
    Outcome::new(vec![table, sweeps], checks)
}

/// Subcritical exponent used for a gap regime in dimension `dim`: the
/// configured one, else `q = (2 + 2_*)/2` for the volume regime and
/// `r = min(3, (2 + 2*)/2)` for the trace regime.
pub fn gap_subcritical(cfg: &CampaignConfig, regime: GapRegime, dim: usize) -> Option<f64> {
    match regime {
        GapRegime::VolCrit => {
            let cap = critical_trace_exponent(dim);
            Some(
                cfg.q_values
                    .first()
                    .map_or(0.5 * (2.0 + cap), |e| e.resolve(cap)),
            )
        }
        GapRegime::TraceCrit => {
            let cap = critical_exponent(dim);
            Some(
                cfg.r_values
                    .first()
                    .map_or((0.5 * (2.0 + cap)).min(3.0), |e| e.resolve(cap)),
            )
        }
        GapRegime::DoubleCrit => None,
    }
}

pub(super) fn thresholds(cfg: &CampaignConfig) -> Outcome {
    let mut table = Table::new(
        "thresholds",
        &[
            "regime",
            "dim",
            "eps",
            "r",
            "q",
            "t_eps",
            "sup_level",
            "threshold",
            "gap",
            "verdict",
        ],
    );
    let mut checks = Vec::new();
    let grid: Vec<(GapRegime, usize)> = cfg
        .dims
        .iter()
        .flat_map(|&d| GapRegime::ALL.map(|g| (g, d)))
        .collect();
    let opts = GapOptions {
        radius: cfg.ball_radius,
        rule: SphereRule::Auto,
    };
    let results: Vec<_> = grid
        .par_iter()
        .map(|&(regime, dim)| {
            let sub = gap_subcritical(cfg, regime, dim);
            let exps = regime.exponents(dim, sub)?;
            let model = campaign_model(cfg, dim)?;
            Ok((
                exps,
                threshold_gap_with(regime, dim, &model, cfg.gap_eps_for(dim), sub, &opts)?,
            ))
        })
        .collect::<Vec<Result<_>>>();
    for (&(regime, dim), res) in grid.iter().zip(results) {
        let name = format!("gap/{}", regime.name());
        match res {
            Ok(((r, q), g)) => {
                let ok = g.gap > 0.0 && g.t_eps > 0.9 && g.t_eps < 1.1;
                checks.push(Check::new(
                    name,
                    Some(dim),
                    ok,
                    format!("eps {:.1e}: t_eps {:.6}, gap {:.6e}", g.eps, g.t_eps, g.gap),
                ));
                table.push(vec![
                    Cell::text(regime.name()),
                    Cell::int(dim),
                    Cell::float(g.eps),
                    Cell::float(r),
                    Cell::float(q),
                    Cell::float(g.t_eps),
                    Cell::float(g.sup_level),
                    Cell::float(g.threshold),
                    Cell::float(g.gap),
                    Cell::verdict(ok),
                ]);
            }
            Err(e) => checks.push(err_check(name, dim, &e)),
        }
    }
    Outcome::new(vec![table], checks)
}

/// Compact exponent label for file names: `3`, `3.5`, `3.3333`.
pub fn exponent_label(x: f64) -> String {
    let s = format!("{x:.4}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

struct SolvePoint {
    dim: usize,
    r: f64,
    q: f64,
    nodes: usize,
}

pub(super) fn solve(cfg: &CampaignConfig) -> Outcome {
    let mut table = Table::new(
        "solves",
        &[
            "dim",
            "r",
            "q",
            "regime",
            "level",
            "threshold",
            "margin",
            "grad_norm",
            "nodes",
            "sign_changes",
            "nehari_residual",
            "ode_residual",
            "iterations",
            "verdict",
        ],
    );
    let mut solutions = Vec::new();
    let mut records = Vec::new();
    let mut checks = Vec::new();
    let mut grid = Vec::new();
    for &dim in &cfg.dims {
        for r in &cfg.r_values {
            for q in &cfg.q_values {
                for &nodes in &cfg.nodes {
                    grid.push(SolvePoint {
                        dim,
                        r: r.resolve(critical_exponent(dim)),
                        q: q.resolve(critical_trace_exponent(dim)),
                        nodes,
                    });
                }
            }
        }
    }
    let results: Vec<_> = grid
        .par_iter()
        .map(|p| -> Result<_> {
            let sc = SolverConfig::new(p.dim, cfg.ball_radius, p.r, p.q, cfg.mesh, cfg.tol)?;
            let res: MountainPassResult = find_excited_state(&sc, p.nodes)?;
            let resid = verify_solution(&res, &sc)?;
            let report = threshold_report(&res, &sc)?;
            Ok((res, resid, report))
        })
        .collect();
    for (p, res) in grid.iter().zip(results) {
        let tag = format!(
            "n{}_r{}_q{}_k{}",
            p.dim,
            exponent_label(p.r),
            exponent_label(p.q),
            p.nodes
        );
        let name = format!("solve/{tag}");
        let (res, resid, report) = match res {
            Ok(v) => v,
            Err(e) => {
                checks.push(err_check(name, p.dim, &e));
                table.push(vec![
                    Cell::int(p.dim),
                    Cell::float(p.r),
                    Cell::float(p.q),
                    Cell::Null,
                    Cell::Null,
                    Cell::Null,
                    Cell::Null,
                    Cell::Null,
                    Cell::int(p.nodes),
                    Cell::Null,
                    Cell::Null,
                    Cell::Null,
                    Cell::Null,
                    Cell::verdict(false),
                ]);
                continue;
            }
        };
        let converged = res.grad_norm <= cfg.tol;
        let nodal = res.sign_changes == p.nodes;
        let below = report.below_threshold();
        let ok = converged && nodal && below && !resid.trivial && res.level > 0.0;
        checks.push(Check::new(
            name,
            Some(p.dim),
            ok,
            format!(
                "{}: level {:.12e}, threshold {}, grad norm {:.2e}, sign changes {}",
                report.regime.name(),
                res.level,
                report.threshold_label,
                res.grad_norm,
                res.sign_changes
            ),
        ));
        table.push(vec![
            Cell::int(p.dim),
            Cell::float(p.r),
            Cell::float(p.q),
            Cell::text(report.regime.name()),
            Cell::float(res.level),
            Cell::opt(report.threshold),
            Cell::opt(report.margin),
            Cell::float(res.grad_norm),
            Cell::int(p.nodes),
            Cell::int(res.sign_changes),
            Cell::float(res.nehari_residual),
            Cell::float(resid.ode_residual_max),
            Cell::int(res.iterations),
            Cell::verdict(ok),
        ]);
        let mut sol = Table::new(format!("solution_{tag}"), &["rho", "u"]);
        for (rho, u) in res.nodes.iter().zip(&res.field.values) {
            sol.push(vec![Cell::float(*rho), Cell::float(*u)]);
        }
        solutions.push(sol);
        records.push(SolveRecord {
            dim: p.dim,
            r: p.r,
            q: p.q,
            nodes: p.nodes,
            result: res,
            residuals: resid,
            threshold: report,
        });
    }
    let mut tables = vec![table];
    tables.extend(solutions);
    let mut text = serde_json::to_string_pretty(&records).expect("records serialize");
    text.push('\n');
    Outcome {
        tables,
        checks,
        documents: vec![(SOLVE_RECORDS_FILE.to_string(), text)],
    }
}
