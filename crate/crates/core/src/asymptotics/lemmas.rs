//! Item-by-item audits of the first-order curvature expansions of the
//! three bubble families.

use serde::{Deserialize, Serialize};

use crate::bubbles::{critical_trace_exponent, BubbleKind};
use crate::error::{Error, Result};
use crate::quadrature::{corner_shift, curvature_weighted_integral, BoundaryModel};

use super::{epsilon_sweep, fit_expansion, log_spaced, ExpansionFit, ModelForm, QuantityId};

/// Expansion families: one per bubble kind, split by dimension (`N ≥ 4`
/// gives explicit first-order coefficients, `N = 3` only signs and rates).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Lemma {
    Interior,
    Interior3d,
    Trace,
    Trace3d,
    Corner,
    Corner3d,
}

impl Lemma {
    pub const ALL: [Lemma; 6] = [
        Lemma::Interior,
        Lemma::Interior3d,
        Lemma::Trace,
        Lemma::Trace3d,
        Lemma::Corner,
        Lemma::Corner3d,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Lemma::Interior => "interior",
            Lemma::Interior3d => "interior-3d",
            Lemma::Trace => "trace",
            Lemma::Trace3d => "trace-3d",
            Lemma::Corner => "corner",
            Lemma::Corner3d => "corner-3d",
        }
    }

    pub fn parse(s: &str) -> Option<Lemma> {
        Lemma::ALL.into_iter().find(|l| l.name() == s)
    }

    pub fn kind(self) -> BubbleKind {
        match self {
            Lemma::Interior | Lemma::Interior3d => BubbleKind::Interior,
            Lemma::Trace | Lemma::Trace3d => BubbleKind::Trace,
            Lemma::Corner | Lemma::Corner3d => BubbleKind::Corner,
        }
    }

    pub fn three_dimensional(self) -> bool {
        matches!(self, Lemma::Interior3d | Lemma::Trace3d | Lemma::Corner3d)
    }

    /// The lemma matching a bubble kind and dimension.
    pub fn for_dim(kind: BubbleKind, dim: usize) -> Lemma {
        match (kind, dim == 3) {
            (BubbleKind::Interior, false) => Lemma::Interior,
            (BubbleKind::Interior, true) => Lemma::Interior3d,
            (BubbleKind::Trace, false) => Lemma::Trace,
            (BubbleKind::Trace, true) => Lemma::Trace3d,
            (BubbleKind::Corner, false) => Lemma::Corner,
            (BubbleKind::Corner, true) => Lemma::Corner3d,
        }
    }

    fn check_dim(self, dim: usize) -> Result<()> {
        let ok = if self.three_dimensional() {
            dim == 3
        } else {
            dim >= 4
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Dimension {
                dim,
                reason: if self.three_dimensional() {
                    "three-dimensional expansions need N = 3"
                } else {
                    "first-order expansions with explicit coefficients need N >= 4"
                },
            })
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaOptions {
    pub eps_min: f64,
    pub eps_max: f64,
    pub points: usize,
    /// Relative tolerance on first-order coefficients.
    pub coeff_tol: f64,
    /// Relative tolerance on the constant term against the flat value.
    pub c0_tol: f64,
    /// Absolute tolerance on fitted powers.
    pub power_tol: f64,
    /// Largest allowed max/min ratio of `value / rate(ε)` for `O(·)` items.
    pub ratio_spread: f64,
    /// Boundary exponents for the subcritical boundary item; `None` picks
    /// three points inside `(2, 2_*)`.
    pub boundary_q: Option<Vec<f64>>,
    /// Fit used for first-order coefficients.
    pub coefficient_form: ModelForm,
    /// Items with a constant term are refitted on the window shifted down
    /// by this factor, with `ε²` added to the model; the constant term is
    /// judged there, where the neglected higher-order terms are smaller.
    /// `None` judges it on the main window.
    pub refit_shift: Option<f64>,
}

impl Default for LemmaOptions {
    fn default() -> Self {
        LemmaOptions {
            eps_min: 1e-3,
            eps_max: 1e-2,
            points: 8,
            coeff_tol: 0.05,
            c0_tol: 1e-6,
            power_tol: 0.02,
            ratio_spread: 3.0,
            boundary_q: None,
            coefficient_form: ModelForm::LinearPlusQuadratic,
            refit_shift: Some(10.0),
        }
    }
}

/// What an item asserts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum ItemCheck {
    /// First-order coefficient against a closed form; constant term
    /// against the flat value.
    Coefficient { reference: f64 },
    /// Power-law exponent.
    Power { expected: f64 },
    /// Negative `ε|ln ε|` coefficient, clearly above the fit residual.
    LogRate,
    /// Loss linear in ε with a positive constant: `value ≈ flat − Cε`.
    LinearLoss,
    /// `value / rate(ε)` bounded over the window.
    Bounded { rate: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ItemReport {
    pub item: String,
    pub quantity: String,
    pub check: ItemCheck,
    pub fit: ExpansionFit,
    /// The fitted number compared by the check (coefficient, exponent,
    /// log coefficient or bounded ratio).
    pub fitted: f64,
    pub reference: Option<f64>,
    pub rel_dev: Option<f64>,
    pub flat_value: Option<f64>,
    pub c0_rel_dev: Option<f64>,
    /// Refit on the shifted window, when one was run.
    pub refit: Option<WindowRefit>,
    pub passed: bool,
    pub samples: Vec<(f64, f64)>,
}

/// Window sensitivity of a fit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowRefit {
    pub fit: ExpansionFit,
    pub c0_rel_dev: f64,
    /// Relative change of the checked coefficient against the main window.
    pub fitted_shift: f64,
    pub samples: Vec<(f64, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub lemma: Lemma,
    pub dim: usize,
    pub items: Vec<ItemReport>,
    pub passed: bool,
}

fn p_factor(n: f64) -> f64 {
    n.powf((n - 2.0) / 2.0) * (n - 2.0).powf((n + 2.0) / 2.0)
}

fn q_factor(n: f64) -> f64 {
    n.powf(n / 2.0) * (n - 2.0).powf(n / 2.0)
}

/// Closed-form first-order coefficients `(item, c1)` of a lemma for the
/// curvature coefficients `curvatures`, evaluated by quadrature.
pub fn reference_coefficients(
    lemma: Lemma,
    dim: usize,
    curvatures: &[f64],
) -> Result<Vec<(&'static str, f64)>> {
    lemma.check_dim(dim)?;
    let n = dim as f64;
    let w = |extra: f64, b: f64, c: f64| curvature_weighted_integral(dim, curvatures, extra, b, c);
    Ok(match lemma {
        Lemma::Interior => vec![
            ("i", -p_factor(n) * w(2.0, n, 1.0)?),
            ("ii", -q_factor(n) * w(0.0, n, 1.0)?),
        ],
        Lemma::Trace => vec![
            ("i", -(n - 2.0).powf(n) * w(0.0, n - 1.0, 1.0)?),
            (
                "ii",
                -2.0 * (n - 1.0) * (n - 2.0).powf(n - 1.0) * w(0.0, n, 1.0)?,
            ),
        ],
        Lemma::Corner => {
            let c = corner_shift(dim);
            let x0_sq = c - 1.0;
            let plain = w(0.0, n, c)?;
            vec![
                ("i", -p_factor(n) * (w(2.0, n, c)? + x0_sq * plain)),
                ("ii", -q_factor(n) * plain),
                (
                    "iii",
                    -2.0 * (n - 1.0) * n.powf(n / 2.0) * (n - 2.0).powf((n - 2.0) / 2.0) * plain,
                ),
            ]
        }
        _ => Vec::new(),
    })
}

/// Audit with default options.
pub fn verify_lemma(lemma: Lemma, dim: usize, model: &BoundaryModel) -> Result<LemmaReport> {
    verify_lemma_with(lemma, dim, model, &LemmaOptions::default())
}

pub fn verify_lemma_with(
    lemma: Lemma,
    dim: usize,
    model: &BoundaryModel,
    opts: &LemmaOptions,
) -> Result<LemmaReport> {
    lemma.check_dim(dim)?;
    if model.dim() != dim {
        return Err(Error::Dimension {
            dim: model.dim(),
            reason: "boundary model dimension differs from the requested one",
        });
    }
    let kind = lemma.kind();
    let n = dim as f64;
    let eps = log_spaced(opts.eps_min, opts.eps_max, opts.points);
    let refs = reference_coefficients(lemma, dim, model.curvatures())?;
    let reference = |item: &str| refs.iter().find(|(i, _)| *i == item).map(|(_, v)| *v);
    let trace_q = critical_trace_exponent(dim);

    let mut items = Vec::new();
    let mut run = |item: String, quantity: QuantityId, check: ItemCheck| -> Result<()> {
        let samples = epsilon_sweep(&quantity, model, &eps)?;
        let shifted = match (refit_form(&check, opts), opts.refit_shift) {
            (Some(_), Some(f)) => {
                let lower: Vec<f64> = eps.iter().map(|e| e / f).collect();
                Some(epsilon_sweep(&quantity, model, &lower)?)
            }
            _ => None,
        };
        items.push(assess(item, quantity, check, samples, shifted, dim, opts)?);
        Ok(())
    };

    let mass_rate = if dim == 3 {
        "eps"
    } else if dim == 4 {
        "eps^2|ln eps|"
    } else {
        "eps^2"
    };
    let mass = |run: &mut dyn FnMut(String, QuantityId, ItemCheck) -> Result<()>, item: &str| {
        run(
            item.to_string(),
            QuantityId::mass_sq(kind),
            ItemCheck::Bounded {
                rate: mass_rate.to_string(),
            },
        )
    };

    match lemma {
        Lemma::Interior | Lemma::Interior3d => {
            if dim == 3 {
                run("i".into(), QuantityId::grad_sq(kind), ItemCheck::LogRate)?;
                run(
                    "ii".into(),
                    QuantityId::volume_crit(kind),
                    ItemCheck::LinearLoss,
                )?;
            } else {
                let r = reference("i").unwrap_or(f64::NAN);
                run(
                    "i".into(),
                    QuantityId::grad_sq(kind),
                    ItemCheck::Coefficient { reference: r },
                )?;
                let r = reference("ii").unwrap_or(f64::NAN);
                run(
                    "ii".into(),
                    QuantityId::volume_crit(kind),
                    ItemCheck::Coefficient { reference: r },
                )?;
            }
            let qs = opts.boundary_q.clone().unwrap_or_else(|| {
                [0.2, 0.5, 0.8]
                    .iter()
                    .map(|f| 2.0 + f * (trace_q - 2.0))
                    .collect()
            });
            for q in qs {
                if !(q > 2.0 && q < trace_q) {
                    return Err(Error::Parameter {
                        name: "boundary_q",
                        value: q,
                        reason:
                            "subcritical boundary exponents lie strictly between 2 and 2(N-1)/(N-2)",
                    });
                }
                run(
                    format!("iii(q={q})"),
                    QuantityId::boundary(kind, q)?,
                    ItemCheck::Power {
                        expected: (n - 1.0) - (n - 2.0) * q / 2.0,
                    },
                )?;
            }
            mass(&mut run, "iv")?;
        }
        Lemma::Trace | Lemma::Trace3d => {
            if dim == 3 {
                run("i".into(), QuantityId::grad_sq(kind), ItemCheck::LogRate)?;
                run(
                    "ii".into(),
                    QuantityId::boundary(kind, trace_q)?,
                    ItemCheck::LinearLoss,
                )?;
            } else {
                let r = reference("i").unwrap_or(f64::NAN);
                run(
                    "i".into(),
                    QuantityId::grad_sq(kind),
                    ItemCheck::Coefficient { reference: r },
                )?;
                let r = reference("ii").unwrap_or(f64::NAN);
                run(
                    "ii".into(),
                    QuantityId::boundary(kind, trace_q)?,
                    ItemCheck::Coefficient { reference: r },
                )?;
            }
            mass(&mut run, "iii")?;
        }
        Lemma::Corner | Lemma::Corner3d => {
            if dim == 3 {
                run("i".into(), QuantityId::grad_sq(kind), ItemCheck::LogRate)?;
                run(
                    "ii".into(),
                    QuantityId::volume_crit(kind),
                    ItemCheck::LinearLoss,
                )?;
                run(
                    "iii".into(),
                    QuantityId::boundary(kind, trace_q)?,
                    ItemCheck::LinearLoss,
                )?;
            } else {
                let quantities = [
                    ("i", QuantityId::grad_sq(kind)),
                    ("ii", QuantityId::volume_crit(kind)),
                    ("iii", QuantityId::boundary(kind, trace_q)?),
                ];
                for (item, quantity) in quantities {
                    let r = reference(item).unwrap_or(f64::NAN);
                    run(
                        item.into(),
                        quantity,
                        ItemCheck::Coefficient { reference: r },
                    )?;
                }
            }
            mass(&mut run, "iv")?;
        }
    }
    let passed = items.iter().all(|i| i.passed);
    Ok(LemmaReport {
        lemma,
        dim,
        items,
        passed,
    })
}

fn rate(name: &str, eps: f64) -> f64 {
    match name {
        "eps" => eps,
        "eps^2|ln eps|" => eps * eps * eps.ln().abs(),
        _ => eps * eps,
    }
}

fn assess(
    item: String,
    quantity: QuantityId,
    check: ItemCheck,
    samples: Vec<(f64, f64)>,
    shifted: Option<Vec<(f64, f64)>>,
    dim: usize,
    opts: &LemmaOptions,
) -> Result<ItemReport> {
    let eps_ref = samples.last().map(|s| s.0).unwrap_or(opts.eps_min);
    let report = |fit: ExpansionFit,
                  fitted: f64,
                  reference: Option<f64>,
                  rel_dev: Option<f64>,
                  flat: Option<f64>,
                  c0_rel_dev: Option<f64>,
                  passed: bool| ItemReport {
        item: item.clone(),
        quantity: quantity.label(),
        check: check.clone(),
        fit,
        fitted,
        reference,
        rel_dev,
        flat_value: flat,
        c0_rel_dev,
        refit: None,
        passed,
        samples: samples.clone(),
    };
    // Constant-term items: main fit, optional refit, c0 verdict.
    let with_c0 = |form: ModelForm, pick: fn(&ExpansionFit) -> f64| -> Result<_> {
        let fit = fit_expansion(&samples, form)?;
        let flat = quantity.flat_value(dim, eps_ref)?;
        let c0_dev = ((fit.c0 - flat) / flat).abs();
        let refit = match (&shifted, refit_form(&check, opts)) {
            (Some(lower), Some(form)) => {
                let f = fit_expansion(lower, form)?;
                Some(WindowRefit {
                    c0_rel_dev: ((f.c0 - flat) / flat).abs(),
                    fitted_shift: ((pick(&f) - pick(&fit)) / pick(&fit)).abs(),
                    fit: f,
                    samples: lower.clone(),
                })
            }
            _ => None,
        };
        let c0_ok = refit.as_ref().map_or(c0_dev, |r| r.c0_rel_dev) <= opts.c0_tol;
        Ok((fit, flat, c0_dev, refit, c0_ok))
    };
    Ok(match &check {
        ItemCheck::Coefficient { reference } => {
            let (fit, flat, c0_dev, refit, c0_ok) = with_c0(opts.coefficient_form, |f| f.c1)?;
            let dev = ((fit.c1 - reference) / reference).abs();
            let ok = dev <= opts.coeff_tol && c0_ok;
            let c1 = fit.c1;
            let mut out = report(
                fit,
                c1,
                Some(*reference),
                Some(dev),
                Some(flat),
                Some(c0_dev),
                ok,
            );
            out.refit = refit;
            out
        }
        ItemCheck::Power { expected } => {
            let fit = fit_expansion(&samples, ModelForm::PurePower)?;
            let dev = (fit.c1 - expected).abs();
            let ok = dev <= opts.power_tol && fit.c0 > 0.0;
            let p = fit.c1;
            report(fit, p, Some(*expected), Some(dev), None, None, ok)
        }
        ItemCheck::LogRate => {
            let (fit, flat, c0_dev, refit, c0_ok) =
                with_c0(ModelForm::LinearPlusLog, |f| f.log_coeff)?;
            let ok = fit.log_coeff < 0.0 && fit.log_coeff.abs() > 5.0 * fit.fit_residual && c0_ok;
            let l = fit.log_coeff;
            let mut out = report(fit, l, None, None, Some(flat), Some(c0_dev), ok);
            out.refit = refit;
            out
        }
        ItemCheck::LinearLoss => {
            let (fit, flat, c0_dev, refit, c0_ok) = with_c0(ModelForm::Linear, |f| f.c1)?;
            let ratios: Vec<f64> = samples.iter().map(|(e, v)| (flat - v) / e).collect();
            let ok = fit.c1 < 0.0 && spread_ok(&ratios, opts.ratio_spread) && c0_ok;
            let c1 = fit.c1;
            let mut out = report(fit, c1, None, None, Some(flat), Some(c0_dev), ok);
            out.refit = refit;
            out
        }
        ItemCheck::Bounded { rate: name } => {
            let fit = fit_expansion(&samples, ModelForm::PurePower)?;
            let ratios: Vec<f64> = samples.iter().map(|(e, v)| v / rate(name, *e)).collect();
            let ok = spread_ok(&ratios, opts.ratio_spread);
            let last = *ratios.last().unwrap_or(&f64::NAN);
            report(fit, last, None, None, None, None, ok)
        }
    })
}

/// Model used on the shifted window, for items with a constant term.
fn refit_form(check: &ItemCheck, opts: &LemmaOptions) -> Option<ModelForm> {
    match check {
        ItemCheck::Coefficient { .. } => Some(match opts.coefficient_form {
            ModelForm::LinearPlusLog => ModelForm::LogPlusQuadratic,
            ModelForm::Linear => ModelForm::LinearPlusQuadratic,
            f => f,
        }),
        ItemCheck::LogRate => Some(ModelForm::LogPlusQuadratic),
        ItemCheck::LinearLoss => Some(ModelForm::LinearPlusQuadratic),
        _ => None,
    }
}

fn spread_ok(ratios: &[f64], spread: f64) -> bool {
    if ratios.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
        return false;
    }
    let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().copied().fold(0.0, f64::max);
    hi / lo <= spread
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for l in Lemma::ALL {
            assert_eq!(Lemma::parse(l.name()), Some(l));
            assert_eq!(
                Lemma::for_dim(l.kind(), if l.three_dimensional() { 3 } else { 5 }),
                l
            );
        }
    }

    #[test]
    fn dimension_hypotheses() {
        let m3 = BoundaryModel::uniform(3, 0.5, 0.5).unwrap();
        assert!(verify_lemma(Lemma::Interior, 3, &m3).is_err());
        let m4 = BoundaryModel::uniform(4, 0.5, 0.5).unwrap();
        assert!(verify_lemma(Lemma::Trace3d, 4, &m4).is_err());
        assert!(verify_lemma(Lemma::Corner, 5, &m4).is_err());
    }

    #[test]
    fn reference_coefficients_are_negative_and_linear() {
        for lemma in [Lemma::Interior, Lemma::Trace, Lemma::Corner] {
            let a = reference_coefficients(lemma, 5, &[0.5; 4]).unwrap();
            let b = reference_coefficients(lemma, 5, &[1.0; 4]).unwrap();
            for ((_, x), (_, y)) in a.iter().zip(&b) {
                assert!(*x < 0.0);
                assert!((y / x - 2.0).abs() < 1e-12);
            }
        }
    }
}
