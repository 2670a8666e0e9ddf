use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mcatalog::MEvaluator;
use crate::numerics::geomspace;

/// m-values within this distance of 0 on ℝ₋ count as boundary-compliant.
pub const SIGN_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StieltjesVerdict {
    S,
    SInverse,
    Neither,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum JNonnegVerdict {
    Likely,
    Violated,
}

/// Log grid `−10^{hi} … −10^{lo}` on the negative axis, ordered left to right.
pub fn negative_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let mut g: Vec<f64> = geomspace(10f64.powf(lo), 10f64.powf(hi), n).into_iter().map(|x| -x).collect();
    g.sort_by(f64::total_cmp);
    g
}

fn real_values(f: impl Fn(Complex64) -> Result<Complex64>, grid: &[f64]) -> Result<Option<Vec<f64>>> {
    let mut out = Vec::with_capacity(grid.len());
    for &x in grid {
        if !(x < 0.0) {
            return Err(Error::Invalid(format!("Stieltjes grid point {x} is not negative")));
        }
        match f(Complex64::new(x, 0.0)) {
            Ok(v) if v.is_finite() => out.push(v.re),
            // a pole on ℝ₋ rules out both classes
            Ok(_) | Err(Error::Pole { .. }) => return Ok(None),
            Err(e) => {
                return Err(Error::EvaluationFailed {
                    lambda: Complex64::new(x, 0.0),
                    reason: e.to_string(),
                })
            }
        }
    }
    Ok(Some(out))
}

fn verdict(vals: &[f64]) -> StieltjesVerdict {
    let scale = vals.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let tol = SIGN_TOL * scale;
    let increasing = vals.windows(2).all(|w| w[1] >= w[0] - tol);
    if vals.iter().all(|&v| v >= -tol) && increasing {
        StieltjesVerdict::S
    } else if vals.iter().all(|&v| v <= tol) {
        StieltjesVerdict::SInverse
    } else {
        StieltjesVerdict::Neither
    }
}

/// Class of `m` judged from its values on a grid of negative reals.
pub fn stieltjes_check(m: &MEvaluator, grid: &[f64]) -> Result<StieltjesVerdict> {
    Ok(match real_values(|l| m.m(l), grid)? {
        Some(v) => verdict(&v),
        None => StieltjesVerdict::Neither,
    })
}

/// `L ≥ 0` exactly when `−1/m₊ − 1/m₋ ∈ (S⁻¹)`; for even problems `m₊ ∈ (S)` suffices.
pub fn j_nonneg_check(mp: &MEvaluator, mm: &MEvaluator, grid: &[f64], even: bool) -> Result<JNonnegVerdict> {
    if even && stieltjes_check(mp, grid)? == StieltjesVerdict::S {
        return Ok(JNonnegVerdict::Likely);
    }
    let g = |l: Complex64| -> Result<Complex64> { Ok(-1.0 / mp.m(l)? - 1.0 / mm.m(l)?) };
    Ok(match real_values(g, grid)? {
        Some(v) if v.iter().all(|&x| x <= SIGN_TOL * v.iter().fold(1.0f64, |m, y| m.max(y.abs()))) => {
            JNonnegVerdict::Likely
        }
        _ => JNonnegVerdict::Violated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mcatalog::MKind;
    use crate::sl_ode::{CoefficientFn, HalfLineProblem, Side};

    fn grid() -> Vec<f64> {
        negative_grid(-3.0, 2.0, 21)
    }

    #[test]
    fn free_is_s() {
        let m = MEvaluator::new(MKind::Free, Side::Plus).unwrap();
        assert_eq!(stieltjes_check(&m, &grid()).unwrap(), StieltjesVerdict::S);
        let mm = MEvaluator::new(MKind::Free, Side::Minus).unwrap();
        assert_eq!(j_nonneg_check(&m, &mm, &grid(), false).unwrap(), JNonnegVerdict::Likely);
    }

    #[test]
    fn q0_is_s() {
        let m = MEvaluator::new(MKind::ExampleQ0, Side::Plus).unwrap();
        assert_eq!(stieltjes_check(&m, &grid()).unwrap(), StieltjesVerdict::S);
    }

    #[test]
    fn deep_well_violates() {
        let q = CoefficientFn::characteristic(-1.0, 1.0, -5.0);
        let w = CoefficientFn::one();
        let p = MEvaluator::new(MKind::Numeric(HalfLineProblem::new(Side::Plus, q.clone(), w.clone())), Side::Plus).unwrap();
        let m = MEvaluator::new(MKind::Numeric(HalfLineProblem::new(Side::Minus, q, w)), Side::Minus).unwrap();
        let g = negative_grid(-2.0, 1.5, 15);
        assert_ne!(stieltjes_check(&p, &g).unwrap(), StieltjesVerdict::S);
        assert_eq!(j_nonneg_check(&p, &m, &g, true).unwrap(), JNonnegVerdict::Violated);
    }
}
