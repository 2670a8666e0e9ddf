use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::integrator::{integrate, StepControl, C};
use super::problem::{HalfLineProblem, Local, Oriented, Side, Truncation};
use crate::error::{Error, Result};

/// Values of the fundamental system `c`, `s` at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FundamentalSample {
    pub x: f64,
    pub lambda: Complex64,
    pub c: Complex64,
    pub c_prime: Complex64,
    pub s: Complex64,
    pub s_prime: Complex64,
}

impl FundamentalSample {
    pub fn wronskian(&self) -> Complex64 {
        self.c * self.s_prime - self.c_prime * self.s
    }
}

/// Integrates an augmented system outward from `t = 0`, returning the state at each of `stops`
/// (sorted ascending, within `[0, t_end]`).
pub(crate) fn propagate<const N: usize, F>(
    or: &Oriented,
    t_end: f64,
    stops: &[f64],
    y0: [C; N],
    ctl: &StepControl,
    rhs: F,
) -> Result<Vec<[C; N]>>
where
    F: Fn(&Local, &[C; N]) -> [C; N],
{
    let nodes = or.nodes(t_end);
    let mut out = Vec::with_capacity(stops.len());
    let mut si = 0;
    let mut y = y0;
    let mut h = 0.0;
    while si < stops.len() && stops[si] <= 0.0 {
        out.push(y);
        si += 1;
    }
    for w in nodes.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (map, _, _) = or.map(a, b);
        let mut pos = or.param(map, a);
        let f = |t: f64, y: &[C; N]| rhs(&or.local(map, t), y);
        while si < stops.len() && stops[si] <= b {
            let target = or.param(map, stops[si]);
            y = integrate(f, pos, y, target, ctl, &mut h, |_, _| false)?.y;
            pos = target;
            out.push(y);
            si += 1;
        }
        let end = or.param(map, b);
        y = integrate(f, pos, y, end, ctl, &mut h, |_, _| false)?.y;
        if si == stops.len() {
            break;
        }
    }
    Ok(out)
}

/// The fundamental system with `c(0)=s′(0)=1`, `c′(0)=s(0)=0` at the requested points.
///
/// For the minus side the targets are non-positive and integration runs leftward.
pub fn solve_cs(p: &HalfLineProblem, lambda: Complex64, x_targets: &[f64]) -> Result<Vec<FundamentalSample>> {
    let sgn = p.side.sign();
    let mut idx: Vec<usize> = (0..x_targets.len()).collect();
    for &x in x_targets {
        let t = x * sgn;
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::Invalid(format!("target {x} is not on the {:?} half-line", p.side)));
        }
        if let Truncation::Fixed(xm) = p.truncation {
            if t > xm * (1.0 + 1e-12) {
                return Err(Error::Invalid(format!("target {x} beyond truncation radius {xm}")));
            }
        }
    }
    idx.sort_by(|&i, &j| (x_targets[i] * sgn).total_cmp(&(x_targets[j] * sgn)));
    let stops: Vec<f64> = idx.iter().map(|&i| x_targets[i] * sgn).collect();
    let t_end = stops.last().copied().unwrap_or(0.0);
    let or = Oriented::new(p);
    let one = C::new(1.0, 0.0);
    let zero = C::new(0.0, 0.0);
    let y0 = [one, zero, zero, one * sgn];
    let lam = lambda;
    let states = propagate(&or, t_end.max(1e-300), &stops, y0, &p.settings.control(), |l, y| {
        let v = C::new(l.qj, 0.0) - lam * l.wj;
        [y[1] * l.jac, v * y[0], y[3] * l.jac, v * y[2]]
    })?;
    let mut out = vec![
        FundamentalSample {
            x: 0.0,
            lambda,
            c: one,
            c_prime: zero,
            s: zero,
            s_prime: one,
        };
        x_targets.len()
    ];
    for (k, &i) in idx.iter().enumerate() {
        let y = states[k];
        out[i] = FundamentalSample {
            x: x_targets[i],
            lambda,
            c: y[0],
            c_prime: y[1] * sgn,
            s: y[2],
            s_prime: y[3] * sgn,
        };
    }
    if p.side == Side::Minus {
        debug_assert!(out.iter().all(|s| s.x <= 0.0));
    }
    Ok(out)
}

/// Integrates `c`, `s` outward to `x_end` together with two accumulated integrals
/// `∫ extra(t, q(t), c, s) dt`, returning the integrals.
pub(crate) fn solve_cs_augmented<F>(p: &HalfLineProblem, lambda: Complex64, x_end: f64, extra: F) -> Result<[C; 2]>
where
    F: Fn(f64, f64, C, C) -> [C; 2],
{
    let or = Oriented::new(p);
    let one = C::new(1.0, 0.0);
    let zero = C::new(0.0, 0.0);
    let y0 = [one, zero, zero, one, zero, zero];
    let lam = lambda;
    let states = propagate(&or, x_end, &[x_end], y0, &p.settings.control(), |l, y| {
        let v = C::new(l.qj, 0.0) - lam * l.wj;
        let e = extra(l.x, l.qj, y[0], y[2]);
        [y[1] * l.jac, v * y[0], y[3] * l.jac, v * y[2], e[0], e[1]]
    })?;
    let y = states[0];
    Ok([y[4], y[5]])
}
