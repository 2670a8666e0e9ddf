use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::integrator::{integrate, C};
use super::problem::{Boundary, HalfLineProblem, Local, Oriented, Truncation};
use crate::error::{Error, Result};
use crate::special::sqrt_cut;

/// Boundary value of the Weyl solution at one λ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeylSolutionSample {
    pub lambda: Complex64,
    pub m_value: Complex64,
    /// `∫|ψ|²|r| dx` over the half-line (quadrature on `[0, X]` plus the WKB tail beyond X).
    pub psi_norm_sq: f64,
    /// `|m(X) − m(2X)|`, or 0 when doubling is disabled.
    pub error_estimate: f64,
    pub truncation_radius: f64,
}

/// Decay exponent `∫₀^X Im k` required by the automatic truncation rule.
const DECAY_TARGET: f64 = 9.0;
const X_CAP: f64 = 1e7;

/// Truncation radius used at `lambda`.
pub fn truncation_for(p: &HalfLineProblem, lambda: Complex64) -> f64 {
    match p.truncation {
        Truncation::Fixed(x) => x,
        Truncation::Auto => auto_radius(&Oriented::new(p), lambda),
    }
}

fn auto_radius(or: &Oriented, lambda: Complex64) -> f64 {
    let al = lambda.norm().max(1e-300);
    let base = match or.w.power_at_infinity() {
        Some((coef, alpha)) if alpha != 0.0 || coef != 1.0 => {
            (1e3 / (al * coef)).powf(1.0 / (alpha + 2.0)).max(1.0)
        }
        _ => 40f64.max(40.0 / al.sqrt()),
    };
    // extend until the WKB decay accumulated from 0 reaches the target
    let dx = base / 400.0;
    let mut acc = 0.0;
    let mut x = 0.0;
    while x < X_CAP {
        let xm = x + 0.5 * dx;
        let k = sqrt_cut(lambda * or.w.eval(xm) - or.q.eval(xm));
        acc += k.im.max(0.0) * dx;
        x += dx;
        if x >= base && acc >= DECAY_TARGET {
            break;
        }
    }
    x.max(base).min(X_CAP)
}

/// Riccati state: `u = f′/f` with `G = F/|f|²`, or `v = f/f′` with `H = F/|f′|²`,
/// where `F(x) = ∫_x^∞ |f|²|r|`.
#[derive(Debug, Clone, Copy)]
enum Mode {
    U,
    V,
}

struct RunOut {
    m: Complex64,
    norm: f64,
}

fn riccati_run(or: &Oriented, lambda: Complex64, x_end: f64, p: &HalfLineProblem) -> Result<RunOut> {
    let ctl = p.settings.control();
    let q_end = or.q.eval(x_end * (1.0 - 1e-12));
    let w_end = or.w.eval(x_end * (1.0 - 1e-12));
    let k = sqrt_cut(lambda * w_end - q_end);
    if !(k.im > 1e-12 * k.norm().max(1e-300)) {
        return Err(Error::NonDecayingTail { x: x_end, lambda });
    }
    let mut mode = Mode::U;
    let mut y = [C::new(0.0, 1.0) * k, C::new(w_end / (2.0 * k.im), 0.0)];
    let nodes = or.nodes(x_end);
    let mut h = 0.0;
    for w in nodes.windows(2).rev() {
        let (a, b) = (w[0], w[1]);
        let (map, ta, tb) = or.map(a, b);
        let mut pos = tb;
        loop {
            // switching thresholds scale with the local wavenumber
            let scale_at = |l: &Local| ((lambda * l.wj - l.qj).norm() / l.jac.max(1e-300)).sqrt().max(1.0);
            let reached = match mode {
                Mode::U => integrate(
                    |t, y: &[C; 2]| {
                        let l = or.local(map, t);
                        let v = C::new(l.qj, 0.0) - lambda * l.wj;
                        [v - y[0] * y[0] * l.jac, C::new(-l.wj - 2.0 * l.jac * y[0].re * y[1].re, 0.0)]
                    },
                    pos,
                    y,
                    ta,
                    &ctl,
                    &mut h,
                    |t, y| y[0].norm() > 10.0 * scale_at(&or.local(map, t)),
                )?,
                Mode::V => integrate(
                    |t, y: &[C; 2]| {
                        let l = or.local(map, t);
                        let v = C::new(l.qj, 0.0) - lambda * l.wj;
                        let qv = v * y[0];
                        [C::new(l.jac, 0.0) - qv * y[0], C::new(-l.wj * y[0].norm_sqr() - 2.0 * qv.re * y[1].re, 0.0)]
                    },
                    pos,
                    y,
                    ta,
                    &ctl,
                    &mut h,
                    |t, y| y[0].norm() * scale_at(&or.local(map, t)) > 10.0,
                )?,
            };
            y = reached.y;
            pos = reached.x;
            if !reached.stopped {
                break;
            }
            // flip representation: v = 1/u, H = G|v|²
            let z = y[0];
            match mode {
                Mode::U => {
                    let v = C::new(1.0, 0.0) / z;
                    y = [v, C::new(y[1].re * v.norm_sqr(), 0.0)];
                    mode = Mode::V;
                }
                Mode::V => {
                    let u = C::new(1.0, 0.0) / z;
                    y = [u, C::new(y[1].re * u.norm_sqr(), 0.0)];
                    mode = Mode::U;
                }
            }
        }
    }
    // m = −f(0)/f′(0); ∫|ψ|² = F(0)/|f′(0)|² for ψ = f/f′(0)
    let (m, norm_n, norm_d) = match mode {
        Mode::U => (-C::new(1.0, 0.0) / y[0], y[1].re / y[0].norm_sqr(), y[1].re),
        Mode::V => (-y[0], y[1].re, y[1].re / y[0].norm_sqr()),
    };
    match p.boundary {
        Boundary::Neumann => Ok(RunOut { m, norm: norm_n }),
        // Dirichlet: m̃ = −1/m = f′(0)/f(0), ψ̃ = f/f(0)
        Boundary::Dirichlet => Ok(RunOut {
            m: -C::new(1.0, 0.0) / m,
            norm: norm_d,
        }),
    }
}

/// Titchmarsh–Weyl coefficient by inward Riccati integration from a WKB start at X.
///
/// ```
/// use indefinite_sl::sl_ode::{m_numeric, CoefficientFn, HalfLineProblem, Side};
/// use num_complex::Complex64;
/// let p = HalfLineProblem::new(Side::Plus, CoefficientFn::zero(), CoefficientFn::one());
/// let w = m_numeric(&p, Complex64::new(0.0, 1.0)).unwrap();
/// let exact = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
/// assert!((w.m_value - exact).norm() < 1e-8);
/// ```
pub fn m_numeric(p: &HalfLineProblem, lambda: Complex64) -> Result<WeylSolutionSample> {
    if lambda.im == 0.0 && lambda.re >= 0.0 {
        return Err(Error::Domain(format!("m_numeric needs λ off [0, ∞), got {lambda}")));
    }
    let or = Oriented::new(p);
    let x = match p.truncation {
        Truncation::Fixed(x) => x,
        Truncation::Auto => auto_radius(&or, lambda),
    };
    let first = riccati_run(&or, lambda, x, p)?;
    if !p.settings.verify_doubling {
        return Ok(WeylSolutionSample {
            lambda,
            m_value: first.m,
            psi_norm_sq: first.norm,
            error_estimate: 0.0,
            truncation_radius: x,
        });
    }
    let second = riccati_run(&or, lambda, 2.0 * x, p)?;
    let delta = (first.m - second.m).norm();
    let tol = 100.0 * p.settings.rtol * second.m.norm().max(1.0);
    if delta > tol {
        return Err(Error::TruncationUnconverged { lambda, delta });
    }
    Ok(WeylSolutionSample {
        lambda,
        m_value: second.m,
        psi_norm_sq: second.norm,
        error_estimate: delta,
        truncation_radius: 2.0 * x,
    })
}

/// `(∫|ψ|²|r|, Im m(λ)/Im λ)` for comparison.
pub fn verify_psi_identity(p: &HalfLineProblem, lambda: Complex64) -> Result<(f64, f64)> {
    if lambda.im == 0.0 {
        return Err(Error::Domain("verify_psi_identity needs Im λ ≠ 0".into()));
    }
    let w = m_numeric(p, lambda)?;
    Ok((w.psi_norm_sq, w.m_value.im / lambda.im))
}
