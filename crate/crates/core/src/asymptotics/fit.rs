use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const MAX_CONDITION: f64 = 1e12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelForm {
    /// `c0 + c1 ε`
    Linear,
    /// `c0 + c1 ε + log_coeff ε|ln ε|`
    LinearPlusLog,
    /// `c0 + c1 ε + c2 ε²`
    LinearPlusQuadratic,
    /// `c0 + c1 ε + log_coeff ε|ln ε| + c2 ε²`
    LogPlusQuadratic,
    /// `c0 ε^{c1}`
    PurePower,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpansionFit {
    pub form: ModelForm,
    pub c0: f64,
    /// First-order coefficient, or the exponent for [`ModelForm::PurePower`].
    pub c1: f64,
    pub log_coeff: f64,
    /// `ε²` coefficient, zero when absent.
    pub c2: f64,
    /// Largest relative deviation of the model from the samples.
    pub fit_residual: f64,
    pub eps_window: (f64, f64),
    /// Condition number of the column-scaled design matrix.
    pub condition: f64,
}

impl ExpansionFit {
    pub fn predict(&self, eps: f64) -> f64 {
        match self.form {
            ModelForm::Linear => self.c0 + self.c1 * eps,
            ModelForm::LinearPlusLog => {
                self.c0 + self.c1 * eps + self.log_coeff * eps * eps.ln().abs()
            }
            ModelForm::LinearPlusQuadratic => self.c0 + self.c1 * eps + self.c2 * eps * eps,
            ModelForm::LogPlusQuadratic => {
                self.c0
                    + self.c1 * eps
                    + self.log_coeff * eps * eps.ln().abs()
                    + self.c2 * eps * eps
            }
            ModelForm::PurePower => self.c0 * eps.powf(self.c1),
        }
    }
}

/// Least-squares fit of `samples = [(ε, value)]` to a model form.
pub fn fit_expansion(samples: &[(f64, f64)], form: ModelForm) -> Result<ExpansionFit> {
    if samples.len() < 4 {
        return Err(Error::Parameter {
            name: "samples",
            value: samples.len() as f64,
            reason: "need at least 4 samples",
        });
    }
    if samples
        .iter()
        .any(|(e, v)| !(e.is_finite() && *e > 0.0 && v.is_finite()))
    {
        return Err(Error::Parameter {
            name: "samples",
            value: f64::NAN,
            reason: "scales must be positive and values finite",
        });
    }
    let lo = samples.iter().map(|s| s.0).fold(f64::INFINITY, f64::min);
    let hi = samples.iter().map(|s| s.0).fold(0.0, f64::max);
    if hi / lo < 10.0 * (1.0 - 1e-9) {
        return Err(Error::Parameter {
            name: "eps window",
            value: hi / lo,
            reason: "samples must span at least one decade",
        });
    }

    let sign = if form == ModelForm::PurePower {
        let s = samples[0].1.signum();
        if samples.iter().any(|(_, v)| *v == 0.0 || v.signum() != s) {
            return Err(Error::Parameter {
                name: "samples",
                value: f64::NAN,
                reason: "a power law needs nonzero values of one sign",
            });
        }
        s
    } else {
        1.0
    };

    let columns: Vec<fn(f64) -> f64> = match form {
        ModelForm::Linear => vec![|_| 1.0, |e| e],
        ModelForm::LinearPlusLog => vec![|_| 1.0, |e| e, |e| e * e.ln().abs()],
        ModelForm::LinearPlusQuadratic => vec![|_| 1.0, |e| e, |e| e * e],
        ModelForm::LogPlusQuadratic => vec![|_| 1.0, |e| e, |e| e * e.ln().abs(), |e| e * e],
        ModelForm::PurePower => vec![|_| 1.0, |e| e.ln()],
    };
    let rows = samples.len();
    let cols = columns.len();
    let mut a = DMatrix::from_fn(rows, cols, |i, j| columns[j](samples[i].0));
    let y = DVector::from_iterator(
        rows,
        samples.iter().map(|(_, v)| match form {
            ModelForm::PurePower => (v * sign).ln(),
            _ => *v,
        }),
    );
    let scales: Vec<f64> = (0..cols).map(|j| a.column(j).norm()).collect();
    for (j, s) in scales.iter().enumerate() {
        a.column_mut(j).scale_mut(1.0 / s);
    }
    let svd = a.svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition = if smin > 0.0 {
        smax / smin
    } else {
        f64::INFINITY
    };
    if condition > MAX_CONDITION {
        return Err(Error::IllConditioned(condition));
    }
    let beta = svd
        .solve(&y, 0.0)
        .map_err(|_| Error::IllConditioned(condition))?;
    let coeff: Vec<f64> = (0..cols).map(|j| beta[j] / scales[j]).collect();

    let mut fit = ExpansionFit {
        form,
        c0: coeff[0],
        c1: coeff[1],
        log_coeff: match form {
            ModelForm::LinearPlusLog | ModelForm::LogPlusQuadratic => coeff[2],
            _ => 0.0,
        },
        c2: match form {
            ModelForm::LinearPlusQuadratic => coeff[2],
            ModelForm::LogPlusQuadratic => coeff[3],
            _ => 0.0,
        },
        fit_residual: 0.0,
        eps_window: (lo, hi),
        condition,
    };
    if form == ModelForm::PurePower {
        fit.c0 = sign * coeff[0].exp();
    }
    fit.fit_residual = samples
        .iter()
        .map(|(e, v)| ((fit.predict(*e) - v) / v).abs())
        .fold(0.0, f64::max);
    Ok(fit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asymptotics::log_spaced;

    fn samples(f: impl Fn(f64) -> f64) -> Vec<(f64, f64)> {
        log_spaced(1e-3, 1e-2, 8)
            .into_iter()
            .map(|e| (e, f(e)))
            .collect()
    }

    #[test]
    fn exact_linear() {
        let fit = fit_expansion(&samples(|e| 1.0 - 2.0 * e), ModelForm::Linear).unwrap();
        assert!((fit.c0 - 1.0).abs() < 1e-10);
        assert!((fit.c1 + 2.0).abs() < 1e-10);
        assert!(fit.fit_residual < 1e-12);
    }

    #[test]
    fn exact_log() {
        let f = |e: f64| 3.0 + 0.5 * e - 1.5 * e * e.ln().abs();
        let fit = fit_expansion(&samples(f), ModelForm::LinearPlusLog).unwrap();
        assert!((fit.log_coeff + 1.5).abs() < 1e-8);
        assert!((fit.c1 - 0.5).abs() < 1e-7);
    }

    #[test]
    fn exact_quadratic() {
        let fit = fit_expansion(
            &samples(|e| 2.0 - 7.0 * e + 40.0 * e * e),
            ModelForm::LinearPlusQuadratic,
        )
        .unwrap();
        assert!((fit.c0 - 2.0).abs() < 1e-11);
        assert!((fit.c1 + 7.0).abs() < 1e-8);
        assert!((fit.c2 - 40.0).abs() < 1e-5);
    }

    #[test]
    fn exact_log_quadratic() {
        let f = |e: f64| 3.0 + 0.5 * e - 1.5 * e * e.ln().abs() + 20.0 * e * e;
        let fit = fit_expansion(&samples(f), ModelForm::LogPlusQuadratic).unwrap();
        assert!((fit.c0 - 3.0).abs() < 1e-10);
        assert!((fit.log_coeff + 1.5).abs() < 1e-6);
        assert!((fit.c2 - 20.0).abs() < 1e-3);
        assert!(fit.fit_residual < 1e-12);
    }

    #[test]
    fn exact_power() {
        let fit = fit_expansion(&samples(|e| -2.0 * e.powf(0.75)), ModelForm::PurePower).unwrap();
        assert!((fit.c0 + 2.0).abs() < 1e-10);
        assert!((fit.c1 - 0.75).abs() < 1e-12);
    }

    #[test]
    fn preconditions() {
        let few: Vec<_> = samples(|e| e).into_iter().take(3).collect();
        assert!(fit_expansion(&few, ModelForm::Linear).is_err());
        let narrow: Vec<_> = log_spaced(1e-3, 5e-3, 8)
            .into_iter()
            .map(|e| (e, e))
            .collect();
        assert!(fit_expansion(&narrow, ModelForm::Linear).is_err());
        assert!(fit_expansion(&samples(|e| e - 0.005), ModelForm::PurePower).is_err());
    }

    #[test]
    fn duplicated_column_is_ill_conditioned() {
        let mut s = samples(|e| e);
        for p in s.iter_mut() {
            p.0 = 1e-3;
        }
        s[0].0 = 1e-2;
        // Only two distinct abscissae: three columns cannot be resolved.
        assert!(matches!(
            fit_expansion(&s, ModelForm::LinearPlusLog),
            Err(Error::IllConditioned(_))
        ));
    }
}
