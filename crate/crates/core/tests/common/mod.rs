//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use statrs::function::gamma::ln_gamma;

pub fn beta(a: f64, b: f64) -> f64 {
    (ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)).exp()
}

/// `∫₀^∞ r^a/(c + r²)^b dr` through the Beta function.
pub fn moment(a: f64, b: f64, c: f64) -> f64 {
    let s = (a + 1.0) / 2.0;
    0.5 * c.powf(s - b) * beta(s, b - s)
}

/// Area of the unit sphere in `ℝ^d`.
pub fn sphere_area(d: usize) -> f64 {
    let h = d as f64 / 2.0;
    2.0 * std::f64::consts::PI.powf(h) / ln_gamma(h).exp()
}

/// `S` from the Dirichlet and critical norms of `(1 + |x|²)^{-(N-2)/2}`,
/// each a Beta integral.
pub fn sobolev_oracle(dim: usize) -> f64 {
    let n = dim as f64;
    let area = sphere_area(dim);
    let grad = (n - 2.0).powi(2) * area * moment(n + 1.0, n, 1.0);
    let vol = area * moment(n - 1.0, n, 1.0);
    grad / vol.powf((n - 2.0) / n)
}

/// `S_T` from `((1 + x_N)² + |x'|²)^{-(N-2)/2}`, harmonic with
/// `-∂_N u = (N-2) u^{N/(N-2)}` on the boundary, so its Dirichlet energy is
/// `(N-2)` times its critical boundary norm.
pub fn trace_sobolev_oracle(dim: usize) -> f64 {
    let n = dim as f64;
    let boundary = sphere_area(dim - 1) * moment(n - 2.0, n - 1.0, 1.0);
    (n - 2.0) * boundary.powf(1.0 / (n - 1.0))
}

/// A radial solution from shooting.
#[derive(Clone, Debug)]
pub struct ShotSolution {
    pub centre: f64,
    pub level: f64,
    pub zeros: usize,
}

/// Shooting for `u'' + (N-1)u'/ρ = u - |u|^{r-2}u` on `(0, R)` with
/// `u'(0) = 0` and `u'(R) = |u(R)|^{q-2}u(R)`, by classical RK4 from a
/// series start at `ρ = 1e-6`.
pub struct Shooter {
    pub dim: usize,
    pub radius: f64,
    pub r: f64,
    pub q: f64,
    pub steps: usize,
}

struct Shot {
    u: f64,
    du: f64,
    /// `∫ |u|^r ρ^{N-1} dρ`
    power: f64,
    zeros: usize,
}

impl Shooter {
    pub fn new(dim: usize, radius: f64, r: f64, q: f64) -> Self {
        Shooter {
            dim,
            radius,
            r,
            q,
            steps: 20_000,
        }
    }

    fn shoot(&self, a: f64) -> Shot {
        let n = self.dim as f64;
        let r = self.r;
        let f = |u: f64| u - u.abs().powf(r - 2.0) * u;
        let rhs = |rho: f64, y: [f64; 3]| {
            [
                y[1],
                -(n - 1.0) / rho * y[1] + f(y[0]),
                y[0].abs().powf(r) * rho.powf(n - 1.0),
            ]
        };
        let rho0 = 1e-6;
        let c = f(a) / (2.0 * n);
        let mut y = [
            a + c * rho0 * rho0,
            2.0 * c * rho0,
            a.abs().powf(r) * rho0.powf(n) / n,
        ];
        let h = (self.radius - rho0) / self.steps as f64;
        let mut rho = rho0;
        let mut zeros = 0;
        for _ in 0..self.steps {
            let k1 = rhs(rho, y);
            let k2 = rhs(rho + h / 2.0, add(y, k1, h / 2.0));
            let k3 = rhs(rho + h / 2.0, add(y, k2, h / 2.0));
            let k4 = rhs(rho + h, add(y, k3, h));
            let prev = y[0];
            for i in 0..3 {
                y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
            rho += h;
            if prev != 0.0 && prev.signum() != y[0].signum() {
                zeros += 1;
            }
        }
        Shot {
            u: y[0],
            du: y[1],
            power: y[2],
            zeros,
        }
    }

    fn mismatch(&self, s: &Shot) -> f64 {
        s.du - s.u.abs().powf(self.q - 2.0) * s.u
    }

    fn level(&self, s: &Shot) -> f64 {
        let n = self.dim as f64;
        let area = sphere_area(self.dim);
        let boundary = self.radius.powf(n - 1.0) * s.u.abs().powf(self.q);
        area * ((0.5 - 1.0 / self.r) * s.power + (0.5 - 1.0 / self.q) * boundary)
    }

    /// Least-energy solution with `zeros` sign changes among the shooting
    /// roots for centres in `[1e-3, 1e4]`.
    pub fn least_energy(&self, zeros: usize) -> Option<ShotSolution> {
        let grid: Vec<f64> = (0..=350)
            .map(|i| 10f64.powf(-3.0 + 7.0 * i as f64 / 350.0))
            .collect();
        let shots: Vec<(f64, Shot)> = grid.iter().map(|&a| (a, self.shoot(a))).collect();
        let mut best: Option<ShotSolution> = None;
        for w in shots.windows(2) {
            let ((a0, s0), (a1, s1)) = (&w[0], &w[1]);
            if s0.zeros != zeros || s1.zeros != zeros {
                continue;
            }
            let (f0, f1) = (self.mismatch(s0), self.mismatch(s1));
            if f0.signum() == f1.signum() {
                continue;
            }
            let (mut lo, mut hi, mut flo) = (*a0, *a1, f0);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                let fm = self.mismatch(&self.shoot(mid));
                if fm.signum() == flo.signum() {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
                if hi - lo <= 1e-14 * hi {
                    break;
                }
            }
            let a = 0.5 * (lo + hi);
            let shot = self.shoot(a);
            if shot.zeros != zeros {
                continue;
            }
            let cand = ShotSolution {
                centre: a,
                level: self.level(&shot),
                zeros,
            };
            if best.as_ref().is_none_or(|b| cand.level < b.level) {
                best = Some(cand);
            }
        }
        best
    }
}

fn add(y: [f64; 3], k: [f64; 3], h: f64) -> [f64; 3] {
    [y[0] + h * k[0], y[1] + h * k[1], y[2] + h * k[2]]
}
