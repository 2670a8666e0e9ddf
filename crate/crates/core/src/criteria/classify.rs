use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::eigs::{definitizing_poly, find_nonreal_eigs, NonrealEig, Rect};
use super::ratio::{optimize_shift, CriticalPointVerdict, ScanRegion, ShiftResult};
use super::stieltjes::{j_nonneg_check, negative_grid, stieltjes_check, JNonnegVerdict, StieltjesVerdict};
use crate::error::Result;
use crate::mcatalog::MEvaluator;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassifyOptions {
    #[serde(default = "default_zero")]
    pub near_zero: ScanRegion,
    #[serde(default = "default_inf")]
    pub near_infinity: ScanRegion,
    /// Rectangle searched for nonreal eigenvalues; skipped when absent.
    #[serde(default)]
    pub rect: Option<Rect>,
    /// Exponents `(lo, hi, n)` of the negative grid `−10^hi … −10^lo`.
    #[serde(default = "default_neg")]
    pub negative_grid: (f64, f64, usize),
    /// `q` and `|r|` even, so `m₊ = m₋`.
    #[serde(default)]
    pub even: bool,
    #[serde(default)]
    pub shift_seed: Option<f64>,
    #[serde(default = "default_herglotz")]
    pub herglotz_samples: usize,
}

fn default_zero() -> ScanRegion {
    ScanRegion::near_zero(0.1)
}
fn default_inf() -> ScanRegion {
    ScanRegion::near_infinity(10.0)
}
fn default_neg() -> (f64, f64, usize) {
    (-3.0, 2.0, 21)
}
fn default_herglotz() -> usize {
    50
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self {
            near_zero: default_zero(),
            near_infinity: default_inf(),
            rect: None,
            negative_grid: default_neg(),
            even: false,
            shift_seed: None,
            herglotz_samples: default_herglotz(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub herglotz_ok: bool,
    pub stieltjes_verdict: StieltjesVerdict,
    pub j_nonneg_verdict: JNonnegVerdict,
    pub critical_point_zero: CriticalPointVerdict,
    pub critical_point_infinity: CriticalPointVerdict,
    pub shift_zero: f64,
    pub shift_infinity: f64,
    pub nonreal_eigs: Vec<NonrealEig>,
    pub definitizing_poly: Option<Vec<f64>>,
    pub similar_to_normal: Option<bool>,
}

/// `Im λ · Im M ≥ −1e−10·|M|` for both evaluators at random points of ℂ₊.
pub fn herglotz_sample(mp: &MEvaluator, mm: &MEvaluator, n: usize, seed: u64) -> Result<bool> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..n {
        let r = 10f64.powf(rng.gen_range(-2.0..2.0));
        let t = rng.gen_range(0.05..std::f64::consts::PI - 0.05);
        let l = Complex64::from_polar(r, t);
        for e in [mp, mm] {
            let v = e.big_m(l)?;
            if v.im < -1e-10 * v.norm() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn downgrade(v: CriticalPointVerdict, j: JNonnegVerdict) -> CriticalPointVerdict {
    // the ratio criteria presuppose J-nonnegativity
    match (v, j) {
        (CriticalPointVerdict::BoundedRatio, JNonnegVerdict::Violated) => CriticalPointVerdict::Inconclusive,
        _ => v,
    }
}

pub fn classify(mp: &MEvaluator, mm: &MEvaluator, opts: &ClassifyOptions, seed: u64) -> Result<ClassificationReport> {
    let herglotz_ok = herglotz_sample(mp, mm, opts.herglotz_samples, seed)?;
    let (lo, hi, n) = opts.negative_grid;
    let grid = negative_grid(lo, hi, n);
    let stieltjes_verdict = stieltjes_check(mp, &grid)?;
    let mut j = j_nonneg_check(mp, mm, &grid, opts.even)?;
    let zero: ShiftResult = optimize_shift(mp, mm, &opts.near_zero, opts.shift_seed)?;
    let inf: ShiftResult = optimize_shift(mp, mm, &opts.near_infinity, None)?;
    let nonreal_eigs = match opts.rect {
        Some(r) => find_nonreal_eigs(mp, mm, r, 1.0, 0.0)?,
        None => Vec::new(),
    };
    if !nonreal_eigs.is_empty() {
        j = JNonnegVerdict::Violated;
    }
    let (definitizing_poly, similar_to_normal) = if opts.rect.is_some() {
        let (p, normal) = definitizing_poly(&nonreal_eigs);
        (Some(p), Some(normal))
    } else {
        (None, None)
    };
    Ok(ClassificationReport {
        herglotz_ok,
        stieltjes_verdict,
        j_nonneg_verdict: j,
        critical_point_zero: downgrade(zero.result.verdict, j),
        critical_point_infinity: downgrade(inf.result.verdict, j),
        shift_zero: zero.c_best,
        shift_infinity: inf.c_best,
        nonreal_eigs,
        definitizing_poly,
        similar_to_normal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mcatalog::MKind;
    use crate::sl_ode::Side;

    #[test]
    fn free_report() {
        let p = MEvaluator::new(MKind::Free, Side::Plus).unwrap();
        let m = MEvaluator::new(MKind::Free, Side::Minus).unwrap();
        let opts = ClassifyOptions {
            rect: Some(Rect::new(-2.0, 2.0, 0.5, 2.0)),
            even: true,
            ..ClassifyOptions::default()
        };
        let r = classify(&p, &m, &opts, 1).unwrap();
        assert!(r.herglotz_ok);
        assert_eq!(r.stieltjes_verdict, StieltjesVerdict::S);
        assert_eq!(r.j_nonneg_verdict, JNonnegVerdict::Likely);
        assert_eq!(r.critical_point_zero, CriticalPointVerdict::BoundedRatio);
        assert_eq!(r.critical_point_infinity, CriticalPointVerdict::BoundedRatio);
        assert!(r.nonreal_eigs.is_empty());
        assert_eq!(r.definitizing_poly, Some(vec![0.0, 1.0]));
    }
}
