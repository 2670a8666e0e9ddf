use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::mcatalog::MEvaluator;
use crate::poly;

/// Axis-parallel rectangle `[re_lo, re_hi] × [im_lo, im_hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Rect {
    pub re_lo: f64,
    pub re_hi: f64,
    pub im_lo: f64,
    pub im_hi: f64,
}

impl Rect {
    pub fn new(re_lo: f64, re_hi: f64, im_lo: f64, im_hi: f64) -> Self {
        Self {
            re_lo,
            re_hi,
            im_lo,
            im_hi,
        }
    }

    fn corners(&self) -> [Complex64; 4] {
        [
            Complex64::new(self.re_lo, self.im_lo),
            Complex64::new(self.re_hi, self.im_lo),
            Complex64::new(self.re_hi, self.im_hi),
            Complex64::new(self.re_lo, self.im_hi),
        ]
    }

    fn size(&self) -> f64 {
        (self.re_hi - self.re_lo).max(self.im_hi - self.im_lo)
    }

    fn center(&self) -> Complex64 {
        Complex64::new(0.5 * (self.re_lo + self.re_hi), 0.5 * (self.im_lo + self.im_hi))
    }

    fn contains(&self, z: Complex64) -> bool {
        z.re >= self.re_lo && z.re <= self.re_hi && z.im >= self.im_lo && z.im <= self.im_hi
    }

    fn quarters(&self) -> [Rect; 4] {
        let c = self.center();
        [
            Rect::new(self.re_lo, c.re, self.im_lo, c.im),
            Rect::new(c.re, self.re_hi, self.im_lo, c.im),
            Rect::new(self.re_lo, c.re, c.im, self.im_hi),
            Rect::new(c.re, self.re_hi, c.im, self.im_hi),
        ]
    }

    fn grown(&self, f: f64) -> Rect {
        let (dx, dy) = (f * (self.re_hi - self.re_lo), f * (self.im_hi - self.im_lo));
        Rect::new(self.re_lo - dx, self.re_hi + dx, (self.im_lo - dy).max(0.5 * self.im_lo), self.im_hi + dy)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.re_hi > self.re_lo && self.im_hi > self.im_lo && self.im_lo > 0.0) {
            return Err(Error::Invalid("rectangle must be nondegenerate and lie in Im λ > 0".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NonrealEig {
    pub lambda: Complex64,
    pub multiplicity: usize,
}

/// `F(λ) = M₋(λ) − D·M₊(λ) − C`.
struct Target<'a> {
    mp: &'a MEvaluator,
    mm: &'a MEvaluator,
    d: f64,
    c: f64,
}

impl Target<'_> {
    fn eval(&self, l: Complex64) -> Result<Complex64> {
        Ok(self.mm.big_m(l)? - self.d * self.mp.big_m(l)? - self.c)
    }

    fn scale_at(&self, l: Complex64) -> Result<f64> {
        Ok(self.mm.big_m(l)?.norm() + self.d.abs() * self.mp.big_m(l)?.norm() + self.c.abs())
    }
}

const EDGE_SAMPLES: usize = 32;
const MAX_ARG_STEP: f64 = PI / 6.0;
const MAX_DEPTH: usize = 12;

fn zero_on_contour(l: Complex64) -> Error {
    Error::EvaluationFailed {
        lambda: l,
        reason: "zero on contour".into(),
    }
}

/// Winding of `F` along the segment `a → b`, refining until each step turns by less than π/6.
fn edge_winding(t: &Target, a: Complex64, b: Complex64) -> Result<f64> {
    let pts: Vec<Complex64> = (0..=EDGE_SAMPLES)
        .map(|k| a + (b - a) * (k as f64 / EDGE_SAMPLES as f64))
        .collect();
    let vals = pts.par_iter().map(|&l| t.eval(l)).collect::<Result<Vec<_>>>()?;
    let mut total = 0.0;
    for k in 0..EDGE_SAMPLES {
        total += piece(t, pts[k], pts[k + 1], vals[k], vals[k + 1], 0)?;
    }
    Ok(total)
}

fn piece(t: &Target, a: Complex64, b: Complex64, fa: Complex64, fb: Complex64, depth: usize) -> Result<f64> {
    for (l, f) in [(a, fa), (b, fb)] {
        if f.norm() <= 1e-10 * t.scale_at(l)?.max(1e-300) {
            return Err(zero_on_contour(l));
        }
    }
    let step = (fb / fa).arg();
    if step.abs() < MAX_ARG_STEP {
        return Ok(step);
    }
    if depth >= MAX_DEPTH {
        return Err(zero_on_contour(0.5 * (a + b)));
    }
    let m = 0.5 * (a + b);
    let fm = t.eval(m)?;
    Ok(piece(t, a, m, fa, fm, depth + 1)? + piece(t, m, b, fm, fb, depth + 1)?)
}

fn winding(t: &Target, r: &Rect) -> Result<i64> {
    let c = r.corners();
    let mut total = 0.0;
    for k in 0..4 {
        total += edge_winding(t, c[k], c[(k + 1) % 4])?;
    }
    let w = total / (2.0 * PI);
    if (w - w.round()).abs() > 0.1 {
        return Err(zero_on_contour(r.center()));
    }
    Ok(w.round() as i64)
}

/// Winding number with up to five contour perturbations.
fn robust_winding(t: &Target, r: &Rect) -> Result<(i64, Rect)> {
    let mut rr = *r;
    for attempt in 0..=5 {
        match winding(t, &rr) {
            Ok(n) => return Ok((n, rr)),
            Err(Error::EvaluationFailed { reason, .. }) if reason == "zero on contour" => {
                rr = r.grown(0.013 * (attempt + 1) as f64);
            }
            Err(e) => return Err(e),
        }
    }
    Err(Error::ZeroOnContour { attempts: 5 })
}

fn newton(t: &Target, z0: Complex64, r: &Rect) -> Result<Complex64> {
    let mut z = z0;
    let h0 = 1e-6 * r.size().max(1e-3);
    for _ in 0..50 {
        let f = t.eval(z)?;
        let d = (t.eval(z + h0)? - t.eval(z - h0)?) / (2.0 * h0);
        let step = f / d;
        if !step.is_finite() {
            break;
        }
        z -= step;
        if step.norm() < 1e-12 * z.norm().max(1.0) {
            break;
        }
    }
    Ok(z)
}

/// Zeros of `M₋ − D·M₊ − C` inside `rect` by the argument principle with quadrisection.
pub fn find_nonreal_eigs(mp: &MEvaluator, mm: &MEvaluator, rect: Rect, d: f64, c: f64) -> Result<Vec<NonrealEig>> {
    rect.validate()?;
    let t = Target { mp, mm, d, c };
    let mut out = Vec::new();
    let (n, r) = robust_winding(&t, &rect)?;
    if n < 0 {
        return Err(Error::EvaluationFailed {
            lambda: rect.center(),
            reason: format!("negative winding {n}: F has poles inside"),
        });
    }
    let mut stack = vec![(r, n, 0usize)];
    while let Some((r, n, depth)) = stack.pop() {
        if n == 0 {
            continue;
        }
        if n == 1 || r.size() < 1e-4 || depth > 20 {
            let z = newton(&t, r.center(), &r)?;
            let z = if r.grown(0.5).contains(z) { z } else { r.center() };
            out.push(NonrealEig {
                lambda: z,
                multiplicity: n as usize,
            });
            continue;
        }
        let mut sum = 0;
        let mut parts = Vec::new();
        for q in r.quarters() {
            let (k, qq) = robust_winding(&t, &q)?;
            sum += k;
            parts.push((qq, k, depth + 1));
        }
        if sum != n {
            // a zero sat on an internal edge; perturbed sub-rectangles overlap, so fall back to Newton
            let z = newton(&t, r.center(), &r)?;
            out.push(NonrealEig {
                lambda: z,
                multiplicity: n as usize,
            });
            continue;
        }
        stack.extend(parts);
    }
    out.sort_by(|a, b| a.lambda.re.total_cmp(&b.lambda.re));
    Ok(out)
}

/// Winding number of `M₋ − D·M₊ − C` around `rect`.
pub fn count_zeros(mp: &MEvaluator, mm: &MEvaluator, rect: Rect, d: f64, c: f64) -> Result<i64> {
    rect.validate()?;
    Ok(robust_winding(&Target { mp, mm, d, c }, &rect)?.0)
}

/// `z Π (z − z_j)^{k_j}(z − z̄_j)^{k_j}` (ascending real coefficients) and whether every `k_j = 1`.
pub fn definitizing_poly(zeros: &[NonrealEig]) -> (Vec<f64>, bool) {
    let mut p = vec![0.0, 1.0];
    for z in zeros {
        let quad = [z.lambda.norm_sqr(), -2.0 * z.lambda.re, 1.0];
        for _ in 0..z.multiplicity {
            p = poly::mul(&p, &quad);
        }
    }
    (p, zeros.iter().all(|z| z.multiplicity == 1))
}
