//! SMO solver for the box- and equality-constrained dual
//!
//!   min 0.5 a'Qa + p'a   s.t.  y'a = 0,  0 <= a_t <= C,  y_t in {-1, +1}
//!
//! where `Q_st = y_s y_t K(x_s, x_t)`. Each step picks the maximal violating
//! pair and solves the two-variable subproblem analytically.

use std::rc::Rc;

use super::kernel::KernelCache;

pub const DEFAULT_TOLERANCE: f64 = 1e-3;

const TAU: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Stop once the maximal KKT violation drops below this.
    pub tolerance: f64,
    pub max_iterations: usize,
    pub cache_bytes: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tolerance: DEFAULT_TOLERANCE,
            max_iterations: 1_000_000,
            cache_bytes: 64 << 20,
        }
    }
}

/// Dual variables `t` map onto training samples `sample[t]`.
pub(crate) struct Dual<'a> {
    pub kernel: KernelCache<'a>,
    pub sample: Vec<usize>,
    pub y: Vec<f64>,
    pub p: Vec<f64>,
    pub c: f64,
}

pub(crate) struct Solution {
    pub alpha: Vec<f64>,
    pub rho: f64,
    pub objective: f64,
    pub iterations: usize,
    pub gap: f64,
}

impl Dual<'_> {
    fn column(&mut self, i: usize) -> Vec<f64> {
        let row: Rc<Vec<f64>> = self.kernel.row(self.sample[i]);
        let yi = self.y[i];
        self.sample
            .iter()
            .zip(&self.y)
            .map(|(&s, &yt)| yi * yt * row[s])
            .collect()
    }

    pub fn solve(mut self, cfg: &SolverConfig) -> Solution {
        let l = self.y.len();
        let c = self.c;
        let mut alpha = vec![0.0; l];
        let mut grad = self.p.clone();
        let up = |a: f64, y: f64| (y > 0.0 && a < c) || (y < 0.0 && a > 0.0);
        let low = |a: f64, y: f64| (y > 0.0 && a > 0.0) || (y < 0.0 && a < c);

        let mut iterations = 0;
        let mut gap;
        loop {
            let (mut gmax, mut gmin) = (f64::NEG_INFINITY, f64::INFINITY);
            let (mut i, mut j) = (usize::MAX, usize::MAX);
            for t in 0..l {
                let v = -self.y[t] * grad[t];
                if up(alpha[t], self.y[t]) && v >= gmax {
                    gmax = v;
                    i = t;
                }
                if low(alpha[t], self.y[t]) && v <= gmin {
                    gmin = v;
                    j = t;
                }
            }
            gap = gmax - gmin;
            if i == usize::MAX || j == usize::MAX || gap < cfg.tolerance {
                break;
            }
            if iterations >= cfg.max_iterations {
                log::warn!("SMO stopped at the iteration limit with KKT gap {gap:.3e}");
                break;
            }
            iterations += 1;

            let qi = self.column(i);
            let qj = self.column(j);
            let (old_i, old_j) = (alpha[i], alpha[j]);
            let (mut ai, mut aj) = (old_i, old_j);
            if self.y[i] != self.y[j] {
                let quad = (qi[i] + qj[j] + 2.0 * qi[j]).max(TAU);
                let delta = (-grad[i] - grad[j]) / quad;
                let diff = ai - aj;
                ai += delta;
                aj += delta;
                if diff > 0.0 {
                    if aj < 0.0 {
                        aj = 0.0;
                        ai = diff;
                    }
                } else if ai < 0.0 {
                    ai = 0.0;
                    aj = -diff;
                }
                if diff > 0.0 {
                    if ai > c {
                        ai = c;
                        aj = c - diff;
                    }
                } else if aj > c {
                    aj = c;
                    ai = c + diff;
                }
            } else {
                let quad = (qi[i] + qj[j] - 2.0 * qi[j]).max(TAU);
                let delta = (grad[i] - grad[j]) / quad;
                let sum = ai + aj;
                ai -= delta;
                aj += delta;
                if sum > c {
                    if ai > c {
                        ai = c;
                        aj = sum - c;
                    }
                } else if aj < 0.0 {
                    aj = 0.0;
                    ai = sum;
                }
                if sum > c {
                    if aj > c {
                        aj = c;
                        ai = sum - c;
                    }
                } else if ai < 0.0 {
                    ai = 0.0;
                    aj = sum;
                }
            }
            alpha[i] = snap(ai, c);
            alpha[j] = snap(aj, c);
            let (di, dj) = (alpha[i] - old_i, alpha[j] - old_j);
            for t in 0..l {
                grad[t] += qi[t] * di + qj[t] * dj;
            }
        }

        let rho = self.rho(&alpha, &grad);
        let objective = 0.5
            * alpha
                .iter()
                .zip(grad.iter().zip(&self.p))
                .map(|(a, (g, p))| a * (g + p))
                .sum::<f64>();
        Solution {
            alpha,
            rho,
            objective,
            iterations,
            gap: gap.max(0.0),
        }
    }

    /// Offset from the free variables, or the midpoint of the feasible
    /// interval when every variable sits at a bound.
    fn rho(&self, alpha: &[f64], grad: &[f64]) -> f64 {
        let c = self.c;
        let (mut ub, mut lb) = (f64::INFINITY, f64::NEG_INFINITY);
        let (mut free, mut sum_free) = (0usize, 0.0);
        for t in 0..alpha.len() {
            let yg = self.y[t] * grad[t];
            if alpha[t] >= c {
                if self.y[t] < 0.0 {
                    ub = ub.min(yg);
                } else {
                    lb = lb.max(yg);
                }
            } else if alpha[t] <= 0.0 {
                if self.y[t] > 0.0 {
                    ub = ub.min(yg);
                } else {
                    lb = lb.max(yg);
                }
            } else {
                free += 1;
                sum_free += yg;
            }
        }
        if free > 0 {
            sum_free / free as f64
        } else {
            let (ub, lb) = (if ub.is_finite() { ub } else { lb }, if lb.is_finite() { lb } else { ub });
            (ub + lb) / 2.0
        }
    }
}

/// Values within rounding distance of a bound are set to the bound, so bound
/// membership (and hence the bias) does not depend on update arithmetic.
fn snap(a: f64, c: f64) -> f64 {
    let eps = 1e-12 * c.max(1.0);
    if a < eps {
        0.0
    } else if a > c - eps {
        c
    } else {
        a
    }
}
