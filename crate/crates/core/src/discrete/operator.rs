use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sl_ode::FullLineProblem;

/// Real tridiagonal matrix; `lower[k]` sits at `(k+1, k)`, `upper[k]` at `(k, k+1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tridiagonal {
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Tridiagonal {
    pub fn n(&self) -> usize {
        self.diag.len()
    }

    pub fn dense(&self) -> faer::Mat<f64> {
        let n = self.n();
        faer::Mat::from_fn(n, n, |i, j| {
            if i == j {
                self.diag[i]
            } else if i == j + 1 {
                self.lower[j]
            } else if j == i + 1 {
                self.upper[i]
            } else {
                0.0
            }
        })
    }

    /// Gershgorin bound on the real parts of the spectrum.
    pub fn real_hull(&self) -> (f64, f64) {
        let n = self.n();
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for i in 0..n {
            let mut r = 0.0;
            if i > 0 {
                r += self.lower[i - 1].abs();
            }
            if i + 1 < n {
                r += self.upper[i].abs();
            }
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }
}

/// `A_h = J_h L_h` on the staggered grid `x_k = −X + (k + 1/2)h`, `h = 2X/n`, with zero
/// boundary values one half-step outside the grid. `q` and `|r|` are cell means over
/// `[x_k − h/2, x_k + h/2]`, which keeps jumps second-order accurate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscretizedOperator {
    pub x: Vec<f64>,
    pub h: f64,
    pub half_width: f64,
    /// `|r(x_k)|`.
    pub weight: Vec<f64>,
    /// `sgn x_k`.
    pub sign: Vec<f64>,
    pub q: Vec<f64>,
    /// `A_h` itself.
    pub matrix: Tridiagonal,
}

pub fn discretize(fp: &FullLineProblem, half_width: f64, n: usize) -> Result<DiscretizedOperator> {
    if n < 16 {
        return Err(Error::Invalid(format!("need n >= 16 grid points, got {n}")));
    }
    if !(half_width > 0.0 && half_width.is_finite()) {
        return Err(Error::Invalid(format!("half width must be positive, got {half_width}")));
    }
    assemble(fp, half_width, n)
}

fn assemble(fp: &FullLineProblem, half_width: f64, n: usize) -> Result<DiscretizedOperator> {
    let h = 2.0 * half_width / n as f64;
    let x: Vec<f64> = (0..n).map(|k| -half_width + (k as f64 + 0.5) * h).collect();
    let cells: Vec<(f64, f64)> = (0..n).map(|k| (-half_width + k as f64 * h, -half_width + (k + 1) as f64 * h)).collect();
    let weight: Vec<f64> = cells.iter().map(|&(a, b)| cell_average(fp, a, b, |t| fp.weight_at(t))).collect();
    if let Some(k) = weight.iter().position(|w| !(*w > 0.0 && w.is_finite())) {
        return Err(Error::Invalid(format!("weight |r| not positive at x = {}", x[k])));
    }
    let sign: Vec<f64> = x.iter().map(|&t| t.signum()).collect();
    let q: Vec<f64> = cells.iter().map(|&(a, b)| cell_average(fp, a, b, |t| fp.q_at(t))).collect();
    let h2 = h * h;
    let scale: Vec<f64> = (0..n).map(|k| sign[k] / weight[k]).collect();
    let matrix = Tridiagonal {
        lower: (1..n).map(|k| -scale[k] / h2).collect(),
        diag: (0..n).map(|k| scale[k] * (2.0 / h2 + q[k])).collect(),
        upper: (0..n - 1).map(|k| -scale[k] / h2).collect(),
    };
    Ok(DiscretizedOperator {
        x,
        h,
        half_width,
        weight,
        sign,
        q,
        matrix,
    })
}

/// Mean of `g` over `[a, b]`, split at 0 and at the breakpoints of `q` and `|r|`.
fn cell_average<G: Fn(f64) -> f64>(fp: &FullLineProblem, a: f64, b: f64, g: G) -> f64 {
    const NODES: [f64; 3] = [-0.774_596_669_241_483_4, 0.0, 0.774_596_669_241_483_4];
    const WEIGHTS: [f64; 3] = [5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0];
    let mut cuts = vec![a, b];
    if a < 0.0 && b > 0.0 {
        cuts.push(0.0);
    }
    for c in [&fp.plus.q, &fp.plus.weight_abs, &fp.minus.q, &fp.minus.weight_abs] {
        cuts.extend(c.breakpoints(a, b));
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut sum = 0.0;
    for w in cuts.windows(2) {
        let (c, r) = (0.5 * (w[0] + w[1]), 0.5 * (w[1] - w[0]));
        sum += r * NODES.iter().zip(WEIGHTS).map(|(t, wt)| wt * g(c + r * t)).sum::<f64>();
    }
    sum / (b - a)
}

impl DiscretizedOperator {
    pub fn n(&self) -> usize {
        self.x.len()
    }

    /// `L_h = J_h A_h`.
    pub fn l_matrix(&self) -> Tridiagonal {
        let m = &self.matrix;
        let s = &self.sign;
        Tridiagonal {
            lower: m.lower.iter().enumerate().map(|(k, v)| s[k + 1] * v).collect(),
            diag: m.diag.iter().zip(s).map(|(v, s)| s * v).collect(),
            upper: m.upper.iter().zip(s).map(|(v, s)| s * v).collect(),
        }
    }

    /// `max |W L − Lᵀ W| / max |W L|` with `W = diag(|r| h)`.
    pub fn symmetry_residual(&self) -> f64 {
        let l = self.l_matrix();
        let w: Vec<f64> = self.weight.iter().map(|r| r * self.h).collect();
        let mut num: f64 = 0.0;
        let mut den: f64 = 0.0;
        for k in 0..self.n() - 1 {
            let a = w[k] * l.upper[k];
            let b = w[k + 1] * l.lower[k];
            num = num.max((a - b).abs());
            den = den.max(a.abs()).max(b.abs());
        }
        for k in 0..self.n() {
            den = den.max((w[k] * l.diag[k]).abs());
        }
        num / den
    }
}
