//! Tridiagonal solves with partial pivoting (the Jacobians met during Newton
//! polishing are indefinite, so plain elimination is not safe).

use crate::error::{Error, Result};

/// Tridiagonal matrix with sub-diagonal `lower[i] = A[i+1][i]`, diagonal
/// `diag[i] = A[i][i]` and super-diagonal `upper[i] = A[i][i+1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Tridiagonal {
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Tridiagonal {
    pub fn zeros(n: usize) -> Self {
        Tridiagonal {
            lower: vec![0.0; n.saturating_sub(1)],
            diag: vec![0.0; n],
            upper: vec![0.0; n.saturating_sub(1)],
        }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i] * x[i];
                if i > 0 {
                    s += self.lower[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    s += self.upper[i] * x[i + 1];
                }
                s
            })
            .collect()
    }

    /// Solves `A x = b` by Gaussian elimination with row interchanges.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let n = self.len();
        if b.len() != n {
            return Err(Error::Mismatch {
                mesh: n,
                field: b.len(),
            });
        }
        if n == 0 {
            return Ok(Vec::new());
        }
        // Row i of the eliminated system: d[i] x_i + u1[i] x_{i+1} + u2[i] x_{i+2}.
        let mut d = self.diag.clone();
        let mut u1: Vec<f64> = self.upper.clone();
        u1.push(0.0);
        let mut u2 = vec![0.0; n];
        let mut l = self.lower.clone();
        let mut x = b.to_vec();
        let scale = d
            .iter()
            .chain(&u1)
            .chain(&l)
            .fold(0.0f64, |m, v| m.max(v.abs()));
        for i in 0..n.saturating_sub(1) {
            if l[i].abs() > d[i].abs() {
                // Swap rows i and i+1.
                let (di, u1i, u2i) = (d[i], u1[i], u2[i]);
                d[i] = l[i];
                u1[i] = d[i + 1];
                u2[i] = u1[i + 1];
                l[i] = di;
                d[i + 1] = u1i;
                u1[i + 1] = u2i;
                x.swap(i, i + 1);
            }
            if d[i] == 0.0 {
                return Err(Error::IllConditioned(f64::INFINITY));
            }
            let m = l[i] / d[i];
            d[i + 1] -= m * u1[i];
            u1[i + 1] -= m * u2[i];
            x[i + 1] -= m * x[i];
        }
        if d[n - 1].abs() <= 1e-300 || d.iter().any(|v| v.abs() <= f64::EPSILON * scale * 1e-6) {
            return Err(Error::IllConditioned(f64::INFINITY));
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            if i + 1 < n {
                s -= u1[i] * x[i + 1];
            }
            if i + 2 < n {
                s -= u2[i] * x[i + 2];
            }
            x[i] = s / d[i];
        }
        Ok(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(t: &Tridiagonal, x: &[f64]) {
        let b = t.mul_vec(x);
        let y = t.solve(&b).unwrap();
        for (a, e) in y.iter().zip(x) {
            assert!((a - e).abs() < 1e-12 * (1.0 + e.abs()), "{a} vs {e}");
        }
    }

    #[test]
    fn spd_system() {
        let n = 50;
        let t = Tridiagonal {
            lower: vec![-1.0; n - 1],
            diag: vec![2.5; n],
            upper: vec![-1.0; n - 1],
        };
        let x: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin()).collect();
        check(&t, &x);
    }

    #[test]
    fn needs_pivoting() {
        // Zero leading pivot and an indefinite diagonal.
        let t = Tridiagonal {
            lower: vec![1.0, 3.0, -2.0],
            diag: vec![0.0, -1.0, 0.5, 4.0],
            upper: vec![2.0, 1.0, 1.0],
        };
        check(&t, &[1.0, -2.0, 3.0, 0.5]);
    }

    #[test]
    fn singular_is_reported() {
        let t = Tridiagonal {
            lower: vec![1.0],
            diag: vec![1.0, 1.0],
            upper: vec![1.0],
        };
        assert!(t.solve(&[1.0, 2.0]).is_err());
    }
}
