//! Adaptive Dormand–Prince 5(4) for small complex systems.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C = Complex64;

#[derive(Debug, Clone, Copy)]
pub struct StepControl {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn comb<const N: usize>(y: &[C; N], h: f64, terms: &[(f64, &[C; N])]) -> [C; N] {
    let mut out = *y;
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = C::new(0.0, 0.0);
        for (c, k) in terms {
            acc += k[i] * *c;
        }
        *o += acc * h;
    }
    out
}

/// How an integration segment ended.
#[derive(Debug, Clone, Copy)]
pub struct Reached<const N: usize> {
    pub x: f64,
    pub y: [C; N],
    /// `true` when `stop` fired before the end of the segment.
    pub stopped: bool,
    #[allow(dead_code)]
    pub steps: usize,
}

/// Integrates `y' = f(x, y)` from `x0` to `x1` (either direction).
///
/// `h` carries the step size between calls; `stop` is consulted after every accepted step.
pub fn integrate<const N: usize, F, S>(
    mut f: F,
    x0: f64,
    y0: [C; N],
    x1: f64,
    ctl: &StepControl,
    h: &mut f64,
    mut stop: S,
) -> Result<Reached<N>>
where
    F: FnMut(f64, &[C; N]) -> [C; N],
    S: FnMut(f64, &[C; N]) -> bool,
{
    let span = x1 - x0;
    if span == 0.0 {
        return Ok(Reached {
            x: x0,
            y: y0,
            stopped: false,
            steps: 0,
        });
    }
    let dir = span.signum();
    let len = span.abs();
    let mut hh = if *h > 0.0 { h.min(len) } else { (len * 1e-3).max(1e-6).min(len) };
    let h_min = 1e-14 * (x0.abs().max(x1.abs()) + len);
    let mut x = x0;
    let mut y = y0;
    let mut k1 = f(x, &y);
    let mut steps = 0;
    loop {
        let remaining = (x1 - x) * dir;
        if remaining <= 1e-15 * (1.0 + x1.abs()) {
            *h = hh;
            return Ok(Reached {
                x: x1,
                y,
                stopped: false,
                steps,
            });
        }
        let last = hh >= remaining;
        let step = if last { remaining } else { hh };
        let s = step * dir;
        let y2 = comb(&y, s, &[(A21, &k1)]);
        let k2 = f(x + s / 5.0, &y2);
        let y3 = comb(&y, s, &[(A31, &k1), (A32, &k2)]);
        let k3 = f(x + s * 0.3, &y3);
        let y4 = comb(&y, s, &[(A41, &k1), (A42, &k2), (A43, &k3)]);
        let k4 = f(x + s * 0.8, &y4);
        let y5 = comb(&y, s, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]);
        let k5 = f(x + s * 8.0 / 9.0, &y5);
        let y6 = comb(&y, s, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]);
        let xn = if last { x1 } else { x + s };
        let k6 = f(xn, &y6);
        let yn = comb(&y, s, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
        let k7 = f(xn, &yn);
        let mut err = 0.0;
        for i in 0..N {
            let e = (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7) * step;
            let sc = ctl.atol + ctl.rtol * y[i].norm().max(yn[i].norm());
            err += (e.norm() / sc).powi(2);
        }
        let err = (err / N as f64).sqrt();
        if !err.is_finite() {
            hh = step * 0.1;
            if hh < h_min {
                return Err(Error::StepUnderflow { x });
            }
            continue;
        }
        if err <= 1.0 {
            x = xn;
            y = yn;
            k1 = k7;
            steps += 1;
            let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            if !last {
                hh = step * fac;
            }
            if steps > ctl.max_steps {
                return Err(Error::StepBudget { x });
            }
            if stop(x, &y) {
                *h = hh;
                return Ok(Reached {
                    x,
                    y,
                    stopped: true,
                    steps,
                });
            }
        } else {
            hh = step * (0.9 * err.powf(-0.2)).max(0.1);
            if hh < h_min {
                return Err(Error::StepUnderflow { x });
            }
        }
    }
}
