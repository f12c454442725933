//! Dense quadratic-program oracle for small SVM duals.
//!
//! Minimizes `0.5 a'Qa + p'a` subject to `y'a = 0` and `0 <= a <= C` by
//! accelerated projected gradient, then polishes by solving the KKT system on
//! the detected free set.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Qp {
    pub q: Vec<Vec<f64>>,
    pub p: Vec<f64>,
    pub y: Vec<f64>,
    pub c: f64,
}

pub fn gaussian(u: &[f64], v: &[f64], gamma: f64) -> f64 {
    let mut d = 0.0;
    for k in 0..u.len() {
        d += (u[k] - v[k]).powi(2);
    }
    (-gamma * d).exp()
}

pub fn gram(x: &[Vec<f64>], gamma: f64) -> Vec<Vec<f64>> {
    x.iter()
        .map(|a| x.iter().map(|b| gaussian(a, b, gamma)).collect())
        .collect()
}

impl Qp {
    pub fn classification(x: &[Vec<f64>], y: &[f64], c: f64, gamma: f64) -> Qp {
        let k = gram(x, gamma);
        let l = x.len();
        let q = (0..l)
            .map(|i| (0..l).map(|j| y[i] * y[j] * k[i][j]).collect())
            .collect();
        Qp {
            q,
            p: vec![-1.0; l],
            y: y.to_vec(),
            c,
        }
    }

    /// Variables are `[alpha; alpha*]`.
    pub fn regression(x: &[Vec<f64>], z: &[f64], c: f64, gamma: f64, eps: f64) -> Qp {
        let k = gram(x, gamma);
        let l = x.len();
        let sign = |i: usize| if i < l { 1.0 } else { -1.0 };
        let q = (0..2 * l)
            .map(|s| (0..2 * l).map(|t| sign(s) * sign(t) * k[s % l][t % l]).collect())
            .collect();
        let mut p: Vec<f64> = z.iter().map(|v| eps - v).collect();
        p.extend(z.iter().map(|v| eps + v));
        Qp {
            q,
            p,
            y: (0..2 * l).map(sign).collect(),
            c,
        }
    }

    pub fn objective(&self, a: &[f64]) -> f64 {
        let n = a.len();
        let mut v = 0.0;
        for i in 0..n {
            let qa: f64 = self.q[i].iter().zip(a).map(|(q, x)| q * x).sum();
            v += 0.5 * a[i] * qa + self.p[i] * a[i];
        }
        v
    }

    fn gradient(&self, a: &[f64]) -> Vec<f64> {
        (0..a.len())
            .map(|i| (0..a.len()).map(|j| self.q[i][j] * a[j]).sum::<f64>() + self.p[i])
            .collect()
    }

    /// Euclidean projection onto the feasible set, by bisection on the
    /// multiplier of the equality constraint.
    fn project(&self, v: &[f64]) -> Vec<f64> {
        let c = self.c;
        let at = |lam: f64| -> Vec<f64> {
            v.iter()
                .zip(&self.y)
                .map(|(vi, yi)| (vi - lam * yi).clamp(0.0, c))
                .collect()
        };
        let residual = |a: &[f64]| a.iter().zip(&self.y).map(|(x, y)| x * y).sum::<f64>();
        let span = v.iter().map(|x| x.abs()).fold(0.0, f64::max) + c + 1.0;
        let (mut lo, mut hi) = (-span, span);
        while hi - lo > 1e-15 * span {
            let mid = 0.5 * (lo + hi);
            if residual(&at(mid)) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        at(0.5 * (lo + hi))
    }

    fn lipschitz(&self) -> f64 {
        let n = self.p.len();
        let mut v = vec![1.0; n];
        let mut lam = 1.0;
        for _ in 0..200 {
            let w: Vec<f64> = (0..n).map(|i| (0..n).map(|j| self.q[i][j] * v[j]).sum()).collect();
            let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm == 0.0 {
                return 1.0;
            }
            lam = norm;
            v = w.into_iter().map(|x| x / norm).collect();
        }
        lam * 1.01
    }

    fn solve_linear(mut m: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
        let n = b.len();
        for col in 0..n {
            let piv = (col..n).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
            if m[piv][col].abs() < 1e-14 {
                return None;
            }
            m.swap(col, piv);
            b.swap(col, piv);
            for r in 0..n {
                if r != col {
                    let f = m[r][col] / m[col][col];
                    let pivot_row = m[col].clone();
                    for (dst, src) in m[r][col..].iter_mut().zip(&pivot_row[col..]) {
                        *dst -= f * src;
                    }
                    b[r] -= f * b[col];
                }
            }
        }
        Some((0..n).map(|i| b[i] / m[i][i]).collect())
    }

    /// Re-solves with bounded variables fixed and free ones unconstrained.
    /// Returns the point and the equality multiplier.
    fn polish(&self, a: &[f64]) -> Option<(Vec<f64>, f64)> {
        let n = a.len();
        let tol = 1e-7 * self.c.max(1.0);
        let is_free: Vec<bool> = a.iter().map(|&v| v > tol && v < self.c - tol).collect();
        let free: Vec<usize> = (0..n).filter(|&i| is_free[i]).collect();
        let mut out: Vec<f64> = (0..n)
            .map(|i| if !is_free[i] && a[i] >= self.c - tol { self.c } else { 0.0 })
            .collect();
        if free.is_empty() {
            // multiplier chosen at the midpoint of the feasible interval
            let g = self.gradient(&out);
            let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
            for i in 0..n {
                // at 0: g + lam*y >= 0, at C: g + lam*y <= 0
                let bound = -g[i] * self.y[i];
                let lower = (out[i] == 0.0) == (self.y[i] > 0.0);
                if lower { lo = lo.max(bound) } else { hi = hi.min(bound) }
            }
            let lam = if lo.is_finite() && hi.is_finite() { 0.5 * (lo + hi) } else if lo.is_finite() { lo } else { hi };
            return Some((out, if lam.is_finite() { lam } else { 0.0 }));
        }
        let f = free.len();
        // [Q_FF y_F; y_F' 0] [a_F; lambda] = [-p_F - Q_FB a_B; -y_B' a_B]
        let mut m = vec![vec![0.0; f + 1]; f + 1];
        let mut rhs = vec![0.0; f + 1];
        for (r, &i) in free.iter().enumerate() {
            for (s, &j) in free.iter().enumerate() {
                m[r][s] = self.q[i][j];
            }
            m[r][f] = self.y[i];
            m[f][r] = self.y[i];
            rhs[r] = -self.p[i] - (0..n).filter(|&j| !is_free[j]).map(|j| self.q[i][j] * out[j]).sum::<f64>();
        }
        rhs[f] = -(0..n).filter(|&j| !is_free[j]).map(|j| self.y[j] * out[j]).sum::<f64>();
        let sol = Self::solve_linear(m, rhs)?;
        for (r, &i) in free.iter().enumerate() {
            if sol[r] < 0.0 || sol[r] > self.c {
                return None;
            }
            out[i] = sol[r];
        }
        Some((out, sol[f]))
    }

    /// True when `a` with multiplier `lam` satisfies the optimality conditions.
    fn certified(&self, a: &[f64], lam: f64) -> bool {
        let g = self.gradient(a);
        let tol = 1e-10;
        (0..a.len()).all(|i| {
            let r = g[i] + lam * self.y[i];
            if a[i] == 0.0 {
                r >= -tol
            } else if a[i] == self.c {
                r <= tol
            } else {
                r.abs() <= 1e-8
            }
        })
    }

    /// Returns the optimal objective value.
    pub fn solve(&self) -> f64 {
        let n = self.p.len();
        let step = 1.0 / self.lipschitz();
        let mut a = self.project(&vec![0.0; n]);
        let mut z = a.clone();
        let mut t = 1.0f64;
        let mut prev_obj = self.objective(&a);
        for it in 0..50_000 {
            if it % 25 == 0 {
                if let Some((p, lam)) = self.polish(&a) {
                    if self.certified(&p, lam) {
                        return self.objective(&p);
                    }
                }
            }
            let g = self.gradient(&z);
            let next = self.project(&z.iter().zip(&g).map(|(zi, gi)| zi - step * gi).collect::<Vec<_>>());
            let obj = self.objective(&next);
            if obj > prev_obj {
                // adaptive restart
                t = 1.0;
                z = a.clone();
                continue;
            }
            let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
            let beta = (t - 1.0) / t_next;
            z = next.iter().zip(&a).map(|(x, xo)| x + beta * (x - xo)).collect();
            a = next;
            t = t_next;
            prev_obj = obj;
        }
        self.objective(&a)
    }
}

pub struct ClassProblem {
    pub x: Vec<Vec<f64>>,
    pub y: Vec<f64>,
    pub c: f64,
    pub gamma: f64,
}

pub struct RegProblem {
    pub x: Vec<Vec<f64>>,
    pub z: Vec<f64>,
    pub c: f64,
    pub gamma: f64,
    pub eps: f64,
}

pub fn random_points(rng: &mut ChaCha8Rng, n: usize, dim: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect()
}

pub fn class_problem(seed: u64, max_points: usize) -> ClassProblem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(2..=max_points);
    let dim = rng.random_range(1..=3);
    let x = random_points(&mut rng, n, dim);
    let mut y: Vec<f64> = (0..n).map(|_| if rng.random_bool(0.5) { 1.0 } else { -1.0 }).collect();
    y[0] = 1.0;
    y[1] = -1.0;
    ClassProblem {
        x,
        y,
        c: [0.1, 1.0, 10.0][rng.random_range(0..3)],
        gamma: [0.5, 1.0, 2.0][rng.random_range(0..3)],
    }
}

pub fn reg_problem(seed: u64, max_points: usize) -> RegProblem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(2..=max_points);
    let dim = rng.random_range(1..=3);
    let x = random_points(&mut rng, n, dim);
    let z = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    RegProblem {
        x,
        z,
        c: [0.1, 1.0, 10.0][rng.random_range(0..3)],
        gamma: [0.5, 1.0, 2.0][rng.random_range(0..3)],
        eps: [0.05, 0.1, 0.2][rng.random_range(0..3)],
    }
}
