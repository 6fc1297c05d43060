//! ε-expansions of bubble integrals over curved model domains.
//!
//! A sweep evaluates one quantity (Dirichlet energy, critical volume
//! integral, boundary integral of `u^q`, or local `L²` mass) on the model
//! domain of a [`BoundaryModel`] for a list of scales; fits then extract the
//! constant term, the first-order coefficient and, in three dimensions, the
//! `ε|ln ε|` rate.

mod fit;
mod gap;
mod lemmas;

pub use fit::{fit_expansion, ExpansionFit, ModelForm};
pub use gap::{threshold_gap, threshold_gap_with, GapOptions, GapRegime, ThresholdGap};
pub use lemmas::{
    reference_coefficients, verify_lemma, verify_lemma_with, ItemCheck, ItemReport, Lemma,
    LemmaOptions, LemmaReport, WindowRefit,
};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bubbles::{
    critical_exponent, flat_boundary_integral, half_ball_integral, halfspace_integral, BubbleKind,
    BubbleSpec, Density,
};
use crate::error::{Error, Result};
use crate::quadrature::{graph_excess, slab_integral, BoundaryModel, SphereRule};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum QuantityTag {
    /// `∫_Ω |∇u_ε|²`
    GradSq,
    /// `∫_Ω u_ε^{2*}`
    VolumeCrit,
    /// `∫_{∂Ω} u_ε^q`
    BoundaryQ,
    /// `∫_{Ω ∩ B_1} u_ε²`
    MassSq,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuantityId {
    tag: QuantityTag,
    kind: BubbleKind,
    exponent_q: Option<f64>,
}

impl QuantityId {
    pub fn new(tag: QuantityTag, kind: BubbleKind, exponent_q: Option<f64>) -> Result<Self> {
        match (tag, exponent_q) {
            (QuantityTag::BoundaryQ, Some(q)) if q.is_finite() && q > 1.0 => {}
            (QuantityTag::BoundaryQ, _) => {
                return Err(Error::Parameter {
                    name: "exponent_q",
                    value: exponent_q.unwrap_or(f64::NAN),
                    reason: "boundary quantities need an exponent q > 1",
                })
            }
            (_, Some(q)) => {
                return Err(Error::Parameter {
                    name: "exponent_q",
                    value: q,
                    reason: "only boundary quantities take an exponent",
                })
            }
            _ => {}
        }
        Ok(QuantityId {
            tag,
            kind,
            exponent_q,
        })
    }

    pub fn grad_sq(kind: BubbleKind) -> Self {
        QuantityId {
            tag: QuantityTag::GradSq,
            kind,
            exponent_q: None,
        }
    }

    pub fn volume_crit(kind: BubbleKind) -> Self {
        QuantityId {
            tag: QuantityTag::VolumeCrit,
            kind,
            exponent_q: None,
        }
    }

    pub fn mass_sq(kind: BubbleKind) -> Self {
        QuantityId {
            tag: QuantityTag::MassSq,
            kind,
            exponent_q: None,
        }
    }

    pub fn boundary(kind: BubbleKind, q: f64) -> Result<Self> {
        Self::new(QuantityTag::BoundaryQ, kind, Some(q))
    }

    pub fn tag(&self) -> QuantityTag {
        self.tag
    }

    pub fn kind(&self) -> BubbleKind {
        self.kind
    }

    pub fn exponent_q(&self) -> Option<f64> {
        self.exponent_q
    }

    /// Value of the quantity on the flat half-space (no curvature), when it
    /// is finite. `MassSq` is taken over the half-ball of radius one.
    pub fn flat_value(&self, dim: usize, eps: f64) -> Result<f64> {
        let spec = BubbleSpec::new(self.kind, dim, eps)?;
        match self.tag {
            QuantityTag::GradSq => halfspace_integral(&spec, Density::GradSq),
            QuantityTag::VolumeCrit => {
                halfspace_integral(&spec, Density::Power(critical_exponent(dim)))
            }
            QuantityTag::BoundaryQ => {
                flat_boundary_integral(&spec, self.exponent_q.unwrap_or(2.0), None)
            }
            QuantityTag::MassSq => half_ball_integral(&spec, Density::Power(2.0), 1.0),
        }
    }

    /// Value of the quantity on the model domain at scale `eps`.
    pub fn value(&self, model: &BoundaryModel, eps: f64) -> Result<f64> {
        let spec = BubbleSpec::new(self.kind, model.dim(), eps)?;
        let rule = SphereRule::Auto;
        let flat = self.flat_value(model.dim(), eps)?;
        let excess = match self.tag {
            QuantityTag::GradSq => -slab_integral(&spec, Density::GradSq, model, rule)?,
            QuantityTag::VolumeCrit => -slab_integral(
                &spec,
                Density::Power(critical_exponent(model.dim())),
                model,
                rule,
            )?,
            QuantityTag::BoundaryQ => {
                graph_excess(&spec, self.exponent_q.unwrap_or(2.0), model, rule)?
            }
            QuantityTag::MassSq => {
                let d = model.patch_radius();
                if d >= 1.0 {
                    return Err(Error::Parameter {
                        name: "patch_radius",
                        value: d,
                        reason: "mass is measured in the unit ball, the patch must fit inside it",
                    });
                }
                -slab_integral(&spec, Density::Power(2.0), model, rule)?
            }
        };
        Ok(flat + excess)
    }

    pub fn label(&self) -> String {
        let tag = match self.tag {
            QuantityTag::GradSq => "grad-sq",
            QuantityTag::VolumeCrit => "volume-crit",
            QuantityTag::BoundaryQ => "boundary",
            QuantityTag::MassSq => "mass-sq",
        };
        match self.exponent_q {
            Some(q) => format!("{}/{tag}(q={q})", self.kind.name()),
            None => format!("{}/{tag}", self.kind.name()),
        }
    }
}

/// `count` logarithmically spaced scales from `eps_max` down to `eps_min`.
pub fn log_spaced(eps_min: f64, eps_max: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![eps_max];
    }
    let (lo, hi) = (eps_min.ln(), eps_max.ln());
    (0..count)
        .map(|i| (hi + (lo - hi) * i as f64 / (count - 1) as f64).exp())
        .collect()
}

/// `(ε, value)` pairs of a quantity on the model domain, in the order of
/// `eps_list` (which must be strictly decreasing and below `δ/10`).
pub fn epsilon_sweep(
    quantity: &QuantityId,
    model: &BoundaryModel,
    eps_list: &[f64],
) -> Result<Vec<(f64, f64)>> {
    if eps_list.is_empty() {
        return Err(Error::Empty("eps list"));
    }
    if eps_list.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Parameter {
            name: "eps_list",
            value: f64::NAN,
            reason: "scales must be strictly decreasing",
        });
    }
    let cap = model.patch_radius() / 10.0;
    if let Some(&e) = eps_list.iter().find(|e| !(**e > 0.0 && **e < cap)) {
        return Err(Error::Parameter {
            name: "eps",
            value: e,
            reason: "scales must be positive and below a tenth of the patch radius",
        });
    }
    eps_list
        .par_iter()
        .map(|&eps| quantity.value(model, eps).map(|v| (eps, v)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantity_exponent_rules() {
        assert!(QuantityId::new(QuantityTag::BoundaryQ, BubbleKind::Interior, None).is_err());
        assert!(QuantityId::new(QuantityTag::GradSq, BubbleKind::Interior, Some(2.5)).is_err());
        assert!(QuantityId::boundary(BubbleKind::Trace, 3.0).is_ok());
    }

    #[test]
    fn sweep_preconditions() {
        let m = BoundaryModel::uniform(4, 0.5, 0.5).unwrap();
        let q = QuantityId::grad_sq(BubbleKind::Interior);
        assert!(epsilon_sweep(&q, &m, &[]).is_err());
        assert!(epsilon_sweep(&q, &m, &[0.01, 0.02]).is_err());
        assert!(epsilon_sweep(&q, &m, &[0.06, 0.01]).is_err());
    }

    #[test]
    fn flat_model_is_constant() {
        let m = BoundaryModel::flat(4, 0.5).unwrap();
        let q = QuantityId::grad_sq(BubbleKind::Interior);
        let s = epsilon_sweep(&q, &m, &[0.02, 0.01, 0.005]).unwrap();
        for w in s.windows(2) {
            assert!(((w[0].1 - w[1].1) / w[0].1).abs() < 1e-10);
        }
    }

    #[test]
    fn log_spacing() {
        let e = log_spaced(1e-3, 1e-2, 8);
        assert_eq!(e.len(), 8);
        assert!((e[0] - 1e-2).abs() < 1e-15);
        assert!((e[7] - 1e-3).abs() < 1e-16);
        assert!(e.windows(2).all(|w| w[1] < w[0]));
    }
}
