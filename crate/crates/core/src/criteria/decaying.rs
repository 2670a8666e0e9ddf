use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::mcatalog::{ab_constants, m_decaying_ab};
use crate::numerics::geomspace;
use crate::sl_ode::{m_numeric, s0_report, HalfLineProblem, S0Report, S0Verdict};
use crate::special::sqrt_cut;

/// Relative residual above which a near-zero fit is rejected.
pub const FIT_TOL: f64 = 0.05;

/// Near-zero form of `m` on one side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecayCase {
    /// `m ≈ a/(b − i√λ)`.
    Unbounded { a: f64, b: f64 },
    /// `m ≈ ik√λ`.
    Bounded { k: f64 },
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayingSide {
    pub s0: S0Report,
    pub case: DecayCase,
    pub fit_residual: f64,
    /// `(a₊, b₊)` from the integral formulas.
    pub quadrature: Option<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayingClassification {
    pub plus: DecayingSide,
    pub minus: DecayingSide,
    /// `a₊/b₊ − a₋/b₋` when both sides are in the unbounded case with `b ≠ 0`.
    pub shift_candidate: Option<f64>,
}

/// Window `|λ| ∈ [1e−7, 1e−5]` on three rays in ℂ₊.
fn fit_points() -> Vec<Complex64> {
    let rays = [PI / 4.0, PI / 2.0, 3.0 * PI / 4.0];
    geomspace(1e-7, 1e-5, 5)
        .into_iter()
        .flat_map(|r| rays.iter().map(move |&t| Complex64::from_polar(r, t)))
        .collect()
}

/// Least-squares `y ≈ u + v x` over complex samples.
fn complex_line(xs: &[Complex64], ys: &[Complex64]) -> (Complex64, Complex64) {
    let n = xs.len() as f64;
    let mx: Complex64 = xs.iter().sum::<Complex64>() / n;
    let my: Complex64 = ys.iter().sum::<Complex64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).norm_sqr()).sum();
    let sxy: Complex64 = xs.iter().zip(ys).map(|(x, y)| (x - mx).conj() * (y - my)).sum();
    let v = sxy / sxx;
    (my - v * mx, v)
}

/// Fits `m` near 0 to the form predicted by the boundedness of `s(·, 0)`.
pub fn fit_near_zero(p: &HalfLineProblem, verdict: S0Verdict) -> Result<(DecayCase, f64)> {
    let pts = fit_points();
    let ms = pts
        .par_iter()
        .map(|&l| Ok(m_numeric(p, l)?.m_value))
        .collect::<Result<Vec<Complex64>>>()?;
    let i = Complex64::new(0.0, 1.0);
    let ks: Vec<Complex64> = pts.iter().map(|&l| i * sqrt_cut(l)).collect();
    let residual_of = |a: f64, b: f64| {
        ms.iter()
            .zip(&ks)
            .map(|(m, k)| (a / (b - k) - m).norm() / m.norm())
            .fold(0.0, f64::max)
    };
    let unbounded = || -> Result<(DecayCase, f64)> {
        // ã = −2i√λ·a and b̃ = −2i√λ·(b − 1/2) extrapolated to λ = 0
        let ab = pts.par_iter().map(|&l| m_decaying_ab(p, l)).collect::<Result<Vec<_>>>();
        let (a, b) = match ab {
            Ok(ab) => {
                let at: Vec<Complex64> = ab.iter().zip(&ks).map(|(s, k)| -2.0 * k * s.a).collect();
                let bt: Vec<Complex64> = ab.iter().zip(&ks).map(|(s, k)| -2.0 * k * (s.b - 0.5)).collect();
                (complex_line(&ks, &at).0.re, complex_line(&ks, &bt).0.re)
            }
            Err(Error::TailMassTooLarge { .. }) => {
                // only a/b is identifiable from m alone; 1/m = b/a − (1/a)·i√λ to leading order
                let inv: Vec<Complex64> = ms.iter().map(|m| 1.0 / m).collect();
                let (u, v) = complex_line(&ks, &inv);
                let a = (-1.0 / v).re;
                (a, (u * a).re)
            }
            Err(e) => return Err(e),
        };
        Ok((DecayCase::Unbounded { a, b }, residual_of(a, b)))
    };
    let bounded = || {
        let k = ms.iter().zip(&ks).map(|(m, k)| (m / k).re).sum::<f64>() / ms.len() as f64;
        let res = ms
            .iter()
            .zip(&ks)
            .map(|(m, kk)| (kk * k - m).norm() / m.norm())
            .fold(0.0, f64::max);
        (DecayCase::Bounded { k }, res)
    };
    let (case, res) = match verdict {
        S0Verdict::Unbounded => unbounded()?,
        S0Verdict::Bounded => bounded(),
        S0Verdict::Inconclusive => {
            let (u, b) = (unbounded()?, bounded());
            if u.1 <= b.1 {
                u
            } else {
                b
            }
        }
    };
    if res > FIT_TOL {
        return Ok((DecayCase::Inconclusive, res));
    }
    Ok((case, res))
}

fn classify_side(p: &HalfLineProblem, window: f64) -> Result<DecayingSide> {
    let s0 = s0_report(&p.oriented_q(), window)?;
    let (case, fit_residual) = fit_near_zero(p, s0.verdict)?;
    let quadrature = match ab_constants(p) {
        Ok(v) => Some(v),
        Err(Error::TailMassTooLarge { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(DecayingSide {
        s0,
        case,
        fit_residual,
        quadrature,
    })
}

/// Near-zero classification of both half-lines of a decaying potential.
pub fn classify_decaying(p_plus: &HalfLineProblem, p_minus: &HalfLineProblem, window: f64) -> Result<DecayingClassification> {
    let plus = classify_side(p_plus, window)?;
    let minus = classify_side(p_minus, window)?;
    let shift_candidate = match (plus.quadrature, minus.quadrature, plus.case, minus.case) {
        (Some((ap, bp)), Some((am, bm)), DecayCase::Unbounded { .. }, DecayCase::Unbounded { .. })
            if bp.abs() > 1e-12 && bm.abs() > 1e-12 =>
        {
            Some(ap / bp - am / bm)
        }
        _ => None,
    };
    Ok(DecayingClassification {
        plus,
        minus,
        shift_candidate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sl_ode::{CoefficientFn, Side};

    fn side(q: CoefficientFn, s: Side) -> HalfLineProblem {
        HalfLineProblem::new(s, q, CoefficientFn::one())
    }

    #[test]
    fn free_case_one() {
        let q = CoefficientFn::zero();
        let r = classify_decaying(&side(q.clone(), Side::Plus), &side(q, Side::Minus), 50.0).unwrap();
        match r.plus.case {
            DecayCase::Unbounded { a, b } => {
                assert!((a - 1.0).abs() < 1e-3 && b.abs() < 1e-3, "{a} {b}");
            }
            c => panic!("{c:?}"),
        }
        assert_eq!(r.plus.quadrature, Some((1.0, 0.0)));
        assert!(r.shift_candidate.is_none());
    }

    #[test]
    fn bounded_well_case_two() {
        let q = CoefficientFn::characteristic(0.0, PI / 2.0, -1.0);
        let r = classify_side(&side(q, Side::Plus), 50.0).unwrap();
        assert_eq!(r.s0.verdict, S0Verdict::Bounded);
        match r.case {
            DecayCase::Bounded { k } => assert!(k > 0.0),
            c => panic!("{c:?}"),
        }
    }

    #[test]
    fn shallow_well_matches_quadrature() {
        let q = CoefficientFn::characteristic(0.0, 1.0, -1.0);
        let r = classify_side(&side(q, Side::Plus), 50.0).unwrap();
        let (aq, bq) = r.quadrature.unwrap();
        match r.case {
            DecayCase::Unbounded { a, b } => {
                assert!((a - aq).abs() < 0.02 * aq.abs(), "{a} vs {aq}");
                assert!((b - bq).abs() < 0.02 * bq.abs().max(0.1), "{b} vs {bq}");
            }
            c => panic!("{c:?}"),
        }
    }
}
