//! Maximum of the fibering map
//! `φ(t) = a t²/2 − v t^r/r − b t^q/q` over `t > 0`.
//!
//! For `a > 0`, `v, b ≥ 0` (not both zero) and `r, q > 2` the derivative
//! `φ'(t) = t (a − v t^{r-2} − b t^{q-2})` has exactly one positive zero.

use crate::error::{Error, Result};

/// Positive maximizer `t*` of the fibering map.
pub fn fibering_maximizer(a: f64, v: f64, r: f64, b: f64, q: f64) -> Result<f64> {
    if !(a.is_finite() && a > 0.0) {
        return Err(Error::Parameter {
            name: "quadratic coefficient",
            value: a,
            reason: "must be positive for a nontrivial fibering maximum",
        });
    }
    if !(v >= 0.0 && b >= 0.0 && v + b > 0.0 && v.is_finite() && b.is_finite()) {
        return Err(Error::Parameter {
            name: "nonlinear coefficients",
            value: v + b,
            reason: "need nonnegative finite coefficients, not both zero",
        });
    }
    if !(r > 2.0 && q > 2.0) {
        return Err(Error::Parameter {
            name: "exponent",
            value: r.min(q),
            reason: "both exponents must exceed 2",
        });
    }
    // ψ(t) = a − v t^{r-2} − b t^{q-2} is strictly decreasing with ψ(0) = a.
    let psi = |t: f64| a - v * t.powf(r - 2.0) - b * t.powf(q - 2.0);
    let dpsi = |t: f64| -(r - 2.0) * v * t.powf(r - 3.0) - (q - 2.0) * b * t.powf(q - 3.0);
    let mut lo = 0.0;
    let mut hi = 1.0;
    let mut grow = 0;
    while psi(hi) > 0.0 {
        lo = hi;
        hi *= 2.0;
        grow += 1;
        if grow > 2000 {
            return Err(Error::Bracket("fibering derivative stays positive"));
        }
    }
    let mut t = 0.5 * (lo + hi);
    for _ in 0..200 {
        let f = psi(t);
        if f == 0.0 {
            break;
        }
        if f > 0.0 {
            lo = t;
        } else {
            hi = t;
        }
        let d = dpsi(t);
        let step = f / d;
        if d < 0.0 && step.abs() <= 1e-15 * t {
            break;
        }
        let newton = t - step;
        t = if d < 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    Ok(t)
}

/// `φ(t)`
pub fn fibering_value(t: f64, a: f64, v: f64, r: f64, b: f64, q: f64) -> f64 {
    0.5 * a * t * t - v * t.powf(r) / r - b * t.powf(q) / q
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pure_power_closed_form() {
        // a = v t^{r-2}  ⇒  t = (a/v)^{1/(r-2)}
        let t = fibering_maximizer(3.0, 2.0, 4.0, 0.0, 3.0).unwrap();
        assert!((t - 1.5f64.sqrt()).abs() < 1e-14);
        let t = fibering_maximizer(1.0, 0.5, 3.0, 0.5, 3.0).unwrap();
        assert!((t - 1.0).abs() < 1e-14);
        // Equal exponents: Newton is exact after one step from the midpoint.
        let t = fibering_maximizer(19.5, 0.03, 3.0, 19.6, 3.0).unwrap();
        assert!((t - 19.5 / 19.63).abs() < 1e-14);
    }

    #[test]
    fn stationary_and_maximal() {
        let (a, v, r, b, q) = (2.0, 0.3, 3.5, 1.1, 2.7);
        let t = fibering_maximizer(a, v, r, b, q).unwrap();
        let f = fibering_value(t, a, v, r, b, q);
        for dt in [1e-3, -1e-3, 0.1, -0.1] {
            assert!(fibering_value(t + dt, a, v, r, b, q) < f);
        }
    }

    #[test]
    fn rejects_degenerate_input() {
        assert!(fibering_maximizer(0.0, 1.0, 3.0, 1.0, 3.0).is_err());
        assert!(fibering_maximizer(1.0, 0.0, 3.0, 0.0, 3.0).is_err());
        assert!(fibering_maximizer(1.0, 1.0, 2.0, 1.0, 3.0).is_err());
    }
}
