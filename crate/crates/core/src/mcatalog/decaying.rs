use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sl_ode::{moment_mass, solve_cs_augmented, HalfLineProblem, Truncation};
use crate::special::sqrt_cut;

/// Largest first-moment mass tolerated beyond the truncation radius.
pub const TAIL_TOL: f64 = 1e-8;

/// `a(λ)`, `b(λ)` and `m = a/b`, together with the radius used.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AbSample {
    pub a: Complex64,
    pub b: Complex64,
    pub m: Complex64,
    pub radius: f64,
}

fn check_weight(p: &HalfLineProblem, x: f64) -> Result<()> {
    let w = p.oriented_weight();
    let n = 256;
    for k in 0..=n {
        let t = x * k as f64 / n as f64;
        if (w.eval(t) - 1.0).abs() > 1e-14 {
            return Err(Error::Invalid("the a/b representation needs |r| = 1".into()));
        }
    }
    Ok(())
}

/// Radius beyond which the first moment of `q` is below [`TAIL_TOL`].
pub fn tail_radius(p: &HalfLineProblem) -> Result<f64> {
    let q = p.oriented_q();
    let tail = |x: f64| -> Result<f64> {
        if q.vanishes_beyond(x) {
            Ok(0.0)
        } else {
            moment_mass(&q, x, 1e3 * x)
        }
    };
    match p.truncation {
        Truncation::Fixed(x) => {
            let m = tail(x)?;
            if m > TAIL_TOL {
                return Err(Error::TailMassTooLarge { mass: m, x });
            }
            Ok(x)
        }
        Truncation::Auto => {
            let mut x = 8.0;
            let mut m = f64::INFINITY;
            while x <= 1e5 {
                m = tail(x)?;
                if m <= TAIL_TOL {
                    return Ok(x);
                }
                x *= 2.0;
            }
            Err(Error::TailMassTooLarge { mass: m, x: x / 2.0 })
        }
    }
}

/// `ã = 1 + ∫q e^{ikt} s dt` and `b̃ = ∫q e^{ikt} c dt` with `k = √λ`.
fn tilde(p: &HalfLineProblem, lambda: Complex64, x: f64) -> Result<(Complex64, Complex64)> {
    let k = sqrt_cut(lambda);
    let ik = Complex64::new(0.0, 1.0) * k;
    let y = solve_cs_augmented(p, lambda, x, |t, q, c, s| {
        let e = (ik * t).exp() * q;
        [e * s, e * c]
    })?;
    Ok((1.0 + y[0], y[1]))
}

/// `m₊ = a/b` from the integral representation for a decaying potential with `|r| ≡ 1`.
pub fn m_decaying_ab(p: &HalfLineProblem, lambda: Complex64) -> Result<AbSample> {
    p.validate()?;
    let x = tail_radius(p)?;
    check_weight(p, x)?;
    if lambda.norm() == 0.0 {
        return Err(Error::Domain("lambda = 0 is not admissible".into()));
    }
    let (at, bt) = tilde(p, lambda, x)?;
    let i = Complex64::new(0.0, 1.0);
    let sq = sqrt_cut(lambda);
    let a = i / (2.0 * sq) * at;
    let b = 0.5 + i / (2.0 * sq) * bt;
    if b.norm() == 0.0 {
        return Err(Error::Pole { lambda });
    }
    Ok(AbSample { a, b, m: a / b, radius: x })
}

/// `(a₊, b₊) = (1 + ∫q s(t,0)dt, ∫q c(t,0)dt)`.
pub fn ab_constants(p: &HalfLineProblem) -> Result<(f64, f64)> {
    p.validate()?;
    let x = tail_radius(p)?;
    check_weight(p, x)?;
    let (a, b) = tilde(p, Complex64::new(0.0, 0.0), x)?;
    Ok((a.re, b.re))
}
