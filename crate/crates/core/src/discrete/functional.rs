use faer::complex_native::c64;
use faer::prelude::SpSolver;
use faer::Mat;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::operator::{DiscretizedOperator, Tridiagonal};
use super::spectrum::eigenvalues_of;
use crate::error::{Error, Result};
use crate::numerics::{integrate_adaptive_par, least_squares_slope};

/// Real test operator for the functional.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatrixOperator {
    Tridiagonal(Tridiagonal),
    /// Row-major.
    Dense(Vec<Vec<f64>>),
}

impl MatrixOperator {
    pub fn n(&self) -> usize {
        match self {
            MatrixOperator::Tridiagonal(t) => t.n(),
            MatrixOperator::Dense(rows) => rows.len(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            MatrixOperator::Tridiagonal(t) => {
                let n = t.n();
                if n == 0 || t.lower.len() + 1 != n || t.upper.len() + 1 != n {
                    return Err(Error::Invalid("tridiagonal bands have inconsistent lengths".into()));
                }
            }
            MatrixOperator::Dense(rows) => {
                if rows.is_empty() || rows.iter().any(|r| r.len() != rows.len()) {
                    return Err(Error::Invalid("dense matrix must be square and nonempty".into()));
                }
            }
        }
        Ok(())
    }

    fn dense(&self) -> Mat<f64> {
        match self {
            MatrixOperator::Tridiagonal(t) => t.dense(),
            MatrixOperator::Dense(rows) => Mat::from_fn(rows.len(), rows.len(), |i, j| rows[i][j]),
        }
    }

    /// `(T − z)⁻¹ f`.
    pub fn solve_shifted(&self, z: Complex64, f: &[f64]) -> Result<Vec<Complex64>> {
        let out = match self {
            MatrixOperator::Tridiagonal(t) => tridiagonal_solve(t, z, f),
            MatrixOperator::Dense(rows) => {
                let n = rows.len();
                let a = Mat::<c64>::from_fn(n, n, |i, j| {
                    let d = if i == j { Complex64::from(rows[i][j]) - z } else { Complex64::from(rows[i][j]) };
                    c64::new(d.re, d.im)
                });
                let b = Mat::<c64>::from_fn(n, 1, |i, _| c64::new(f[i], 0.0));
                let x = a.partial_piv_lu().solve(&b);
                (0..n).map(|i| Complex64::new(x.read(i, 0).re, x.read(i, 0).im)).collect()
            }
        };
        if out.iter().all(|v| v.is_finite()) {
            Ok(out)
        } else {
            Err(Error::SolverBreakdown { eta: z.re })
        }
    }
}

impl From<&DiscretizedOperator> for MatrixOperator {
    fn from(op: &DiscretizedOperator) -> Self {
        MatrixOperator::Tridiagonal(op.matrix.clone())
    }
}

/// Gaussian elimination with partial pivoting on `T − z`.
fn tridiagonal_solve(t: &Tridiagonal, z: Complex64, f: &[f64]) -> Vec<Complex64> {
    let n = t.n();
    let mut d: Vec<Complex64> = t.diag.iter().map(|&v| Complex64::from(v) - z).collect();
    let mut du: Vec<Complex64> = t.upper.iter().map(|&v| v.into()).collect();
    let mut du2 = vec![Complex64::from(0.0); n.saturating_sub(2)];
    let mut b: Vec<Complex64> = f.iter().map(|&v| v.into()).collect();
    for i in 0..n.saturating_sub(1) {
        let dl = Complex64::from(t.lower[i]);
        if d[i].norm() >= dl.norm() {
            let fact = dl / d[i];
            d[i + 1] -= fact * du[i];
            b[i + 1] = b[i + 1] - fact * b[i];
        } else {
            let fact = d[i] / dl;
            let next = d[i + 1];
            d[i] = dl;
            d[i + 1] = du[i] - fact * next;
            du[i] = next;
            if i + 2 < n {
                du2[i] = du[i + 1];
                du[i + 1] = -fact * du2[i];
            }
            let bi = b[i];
            b[i] = b[i + 1];
            b[i + 1] = bi - fact * b[i + 1];
        }
    }
    let mut x = vec![Complex64::from(0.0); n];
    for i in (0..n).rev() {
        let mut v = b[i];
        if i + 1 < n {
            v -= du[i] * x[i + 1];
        }
        if i + 2 < n {
            v -= du2[i] * x[i + 2];
        }
        x[i] = v / d[i];
    }
    x
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionalOptions {
    #[serde(default = "default_rel")]
    pub rel_tol: f64,
    #[serde(default = "default_panels")]
    pub max_panels: usize,
    /// η-window; defaults to the real hull of the spectrum widened by `max(1e4·ε, 1)`.
    #[serde(default)]
    pub window: Option<(f64, f64)>,
}

fn default_rel() -> f64 {
    1e-6
}
fn default_panels() -> usize {
    400_000
}

impl Default for FunctionalOptions {
    fn default() -> Self {
        Self {
            rel_tol: default_rel(),
            max_panels: default_panels(),
            window: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FunctionalValue {
    pub eps: f64,
    pub value: f64,
    /// Quadrature error plus the window tail estimate.
    pub error_bar: f64,
    pub quad_error: f64,
    pub tail_bound: f64,
    pub window: (f64, f64),
    pub panels: usize,
}

/// An operator with its eigenvalues, reused across `ε` and `f`.
#[derive(Debug, Clone)]
pub struct FunctionalPlan {
    pub op: MatrixOperator,
    pub eigs: Vec<Complex64>,
}

impl FunctionalPlan {
    pub fn new(op: MatrixOperator) -> Result<Self> {
        op.validate()?;
        let eigs = eigenvalues_of(op.dense().as_ref())?;
        if eigs.iter().any(|z| !z.is_finite()) {
            return Err(Error::Eigensolver("non-finite eigenvalue".into()));
        }
        Ok(Self { op, eigs })
    }

    fn hull(&self) -> (f64, f64) {
        self.eigs
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), z| (lo.min(z.re), hi.max(z.re)))
    }

    /// `ε ∫ ‖(T − (η + iε))⁻¹ f‖² dη` over the window.
    pub fn value(&self, f: &[f64], eps: f64, opts: &FunctionalOptions) -> Result<FunctionalValue> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::Invalid(format!("eps must be positive, got {eps}")));
        }
        if f.len() != self.op.n() {
            return Err(Error::Invalid(format!("vector length {} does not match n = {}", f.len(), self.op.n())));
        }
        if !(opts.rel_tol > 0.0) {
            return Err(Error::Invalid("rel_tol must be positive".into()));
        }
        let (lo, hi) = self.hull();
        let window = match opts.window {
            Some((a, b)) => {
                if !(a <= lo - 10.0 * eps && b >= hi + 10.0 * eps) {
                    return Err(Error::Invalid(format!(
                        "window [{a}, {b}] must cover the spectrum [{lo}, {hi}] with margin 10·eps"
                    )));
                }
                (a, b)
            }
            None => {
                let m = (1e4 * eps).max(1.0);
                (lo - m, hi + m)
            }
        };
        let f2: f64 = f.iter().map(|v| v * v).sum();
        // normal-operator estimate ‖(T − z)⁻¹‖ ≈ 1/dist outside the window
        let tail_bound = eps * f2 * (1.0 / (lo - window.0) + 1.0 / (window.1 - hi));
        let breaks = breakpoints(&self.eigs, eps, window);
        let integrand = |eta: f64| -> Result<f64> {
            let x = self.op.solve_shifted(Complex64::new(eta, eps), f)?;
            Ok(eps * x.iter().map(|v| v.norm_sqr()).sum::<f64>())
        };
        let q = integrate_adaptive_par(integrand, &breaks, 1e-300, opts.rel_tol, opts.max_panels)?;
        Ok(FunctionalValue {
            eps,
            value: q.value,
            error_bar: q.error + tail_bound,
            quad_error: q.error,
            tail_bound,
            window,
            panels: q.panels,
        })
    }

    pub fn ladder(&self, f: &[f64], eps: &[f64], opts: &FunctionalOptions) -> Result<Vec<FunctionalValue>> {
        eps.iter().map(|&e| self.value(f, e, opts)).collect()
    }
}

/// Panel ends at each `Re λ ± {0, 1, 10}·(ε + |Im λ|)` inside the window.
fn breakpoints(eigs: &[Complex64], eps: f64, (a, b): (f64, f64)) -> Vec<f64> {
    let mut v = vec![a, b];
    for z in eigs {
        let w = eps + z.im.abs();
        for k in [-10.0, -1.0, 0.0, 1.0, 10.0] {
            let t = z.re + k * w;
            if t > a && t < b {
                v.push(t);
            }
        }
    }
    v.sort_by(f64::total_cmp);
    let min_gap = 1e-3 * eps;
    let mut out: Vec<f64> = Vec::with_capacity(v.len());
    for t in v {
        if out.last().map_or(true, |&l| t - l > min_gap) {
            out.push(t);
        }
    }
    if let Some(l) = out.last_mut() {
        *l = b;
    }
    out
}

/// Single functional evaluation.
pub fn resolvent_functional(op: &MatrixOperator, f: &[f64], eps: f64, opts: &FunctionalOptions) -> Result<FunctionalValue> {
    FunctionalPlan::new(op.clone())?.value(f, eps, opts)
}

/// Slope of `log value` against `log ε`.
pub fn eps_exponent(ladder: &[FunctionalValue]) -> f64 {
    let pts: Vec<(f64, f64)> = ladder.iter().map(|v| (v.eps.ln(), v.value.ln())).collect();
    least_squares_slope(&pts).0
}

/// Smooth random test vector: three Gaussian bumps with centres in `[−4, 4]`.
pub fn random_bumps(x: &[f64], rng: &mut ChaCha8Rng) -> Vec<f64> {
    let bumps: Vec<(f64, f64, f64)> = (0..3)
        .map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-4.0..4.0), rng.gen_range(0.5..2.0)))
        .collect();
    x.iter()
        .map(|&t| bumps.iter().map(|(a, c, s)| a * (-(t - c).powi(2) / (2.0 * s * s)).exp()).sum())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthContrast {
    pub eps_coarse: f64,
    pub eps_fine: f64,
    /// `F(ε_fine)/F(ε_coarse)` per trial.
    pub ratios: Vec<f64>,
    pub worst: f64,
}

/// Worst-case growth of the functional from `eps_coarse` to `eps_fine` over random smooth `f`.
/// This is evidence only: finitely many `ε` and `f` are sampled.
pub fn growth_contrast(
    op: &DiscretizedOperator,
    trials: usize,
    seed: u64,
    eps_coarse: f64,
    eps_fine: f64,
    opts: &FunctionalOptions,
) -> Result<GrowthContrast> {
    let plan = FunctionalPlan::new(op.into())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ratios = Vec::with_capacity(trials);
    for _ in 0..trials {
        let f = random_bumps(&op.x, &mut rng);
        let c = plan.value(&f, eps_coarse, opts)?;
        let fine = plan.value(&f, eps_fine, opts)?;
        ratios.push(fine.value / c.value);
    }
    let worst = ratios.iter().copied().fold(0.0, f64::max);
    Ok(GrowthContrast {
        eps_coarse,
        eps_fine,
        ratios,
        worst,
    })
}
