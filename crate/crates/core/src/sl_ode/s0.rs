use serde::{Deserialize, Serialize};

use super::coeff::CoefficientFn;
use super::fundamental::propagate;
use super::integrator::C;
use super::problem::{HalfLineProblem, Oriented, OdeSettings, Side};
use crate::error::{Error, Result};
use crate::numerics::{integrate_adaptive, least_squares_slope};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum S0Verdict {
    Bounded,
    Unbounded,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct S0Report {
    pub verdict: S0Verdict,
    pub slope: f64,
    pub threshold: f64,
    pub s_at_x: f64,
    /// `∫_X^{4X} (1+x)|q|`, a proxy for the first-moment tail.
    pub tail_mass: f64,
}

/// First-moment mass `∫_a^b (1+x)|q(x)| dx` of an outward-oriented potential.
pub fn moment_mass(q: &CoefficientFn, a: f64, b: f64) -> Result<f64> {
    let mut br = vec![a];
    br.extend(q.breakpoints(a, b));
    br.push(b);
    Ok(integrate_adaptive(|x| Ok((1.0 + x) * q.eval(x).abs()), &br, 1e-14, 1e-9, 4000)?.value)
}

/// Classifies `s(·, 0)` on `[X, 2X]` by its fitted slope.
pub fn s0_report(q: &CoefficientFn, x: f64) -> Result<S0Report> {
    if !(x > 0.0) {
        return Err(Error::Invalid(format!("window X must be positive, got {x}")));
    }
    let p = HalfLineProblem::new(Side::Plus, q.clone(), CoefficientFn::one()).with_settings(OdeSettings {
        rtol: 1e-11,
        atol: 1e-14,
        ..OdeSettings::default()
    });
    let or = Oriented::new(&p);
    let n = 21;
    let stops: Vec<f64> = (0..n).map(|k| x + x * k as f64 / (n - 1) as f64).collect();
    let zero = C::new(0.0, 0.0);
    let ys = propagate(&or, 2.0 * x, &stops, [zero, C::new(1.0, 0.0)], &p.settings.control(), |l, y| {
        [y[1] * l.jac, y[0] * l.qj]
    })?;
    let pts: Vec<(f64, f64)> = stops.iter().zip(&ys).map(|(&t, y)| (t, y[0].re)).collect();
    let (slope, _, _) = least_squares_slope(&pts);
    let s_x = ys[0][0].re;
    let threshold = 1e-3 * (s_x.abs() / x).max(1.0);
    let verdict = if slope.abs() < threshold {
        S0Verdict::Bounded
    } else if slope.abs() > 10.0 * threshold {
        S0Verdict::Unbounded
    } else {
        S0Verdict::Inconclusive
    };
    Ok(S0Report {
        verdict,
        slope,
        threshold,
        s_at_x: s_x,
        tail_mass: moment_mass(q, x, 4.0 * x)?,
    })
}

/// `Bounded`, `Unbounded` or `Inconclusive` for `s(·, 0)` on the window `[X, 2X]`.
pub fn s0_boundedness(q: &CoefficientFn, x: f64) -> Result<S0Verdict> {
    Ok(s0_report(q, x)?.verdict)
}
