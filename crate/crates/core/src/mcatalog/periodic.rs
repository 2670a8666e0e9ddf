use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::brent;
use crate::sl_ode::{solve_cs, CoefficientFn, HalfLineProblem, OdeSettings, Side};

/// A `T`-periodic potential with `|r| ≡ 1`.
#[derive(Debug, Clone)]
pub struct PeriodicData {
    pub q: CoefficientFn,
    pub period: f64,
    pub settings: OdeSettings,
}

impl PeriodicData {
    pub fn new(q: CoefficientFn, period: f64) -> Result<Self> {
        if !(period > 0.0 && period.is_finite()) {
            return Err(Error::Invalid(format!("period must be positive, got {period}")));
        }
        let q = if q.period().is_none() { q.with_period(period) } else { q };
        Ok(Self {
            q,
            period,
            settings: OdeSettings {
                rtol: 1e-12,
                atol: 1e-15,
                ..OdeSettings::default()
            },
        })
    }

    /// Same data with `q` replaced by `q + c`.
    pub fn shifted(&self, c: f64) -> Self {
        Self {
            q: self.q.shifted(c),
            ..self.clone()
        }
    }

    fn problem(&self) -> HalfLineProblem {
        HalfLineProblem::new(Side::Plus, self.q.clone(), CoefficientFn::one())
            .with_truncation(self.period)
            .with_settings(self.settings)
    }
}

/// Monodromy over one period and the half-trace / half-difference `Δ±`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonodromySample {
    pub lambda: Complex64,
    pub c_t: Complex64,
    pub c_t_prime: Complex64,
    pub s_t: Complex64,
    pub s_t_prime: Complex64,
    pub delta_plus: Complex64,
    pub delta_minus: Complex64,
}

impl MonodromySample {
    pub fn determinant(&self) -> Complex64 {
        self.c_t * self.s_t_prime - self.c_t_prime * self.s_t
    }
}

pub fn monodromy(p: &PeriodicData, lambda: Complex64) -> Result<MonodromySample> {
    let s = solve_cs(&p.problem(), lambda, &[p.period])?[0];
    Ok(MonodromySample {
        lambda,
        c_t: s.c,
        c_t_prime: s.c_prime,
        s_t: s.s,
        s_t_prime: s.s_prime,
        delta_plus: (s.c + s.s_prime) / 2.0,
        delta_minus: (s.c - s.s_prime) / 2.0,
    })
}

/// m± from the Floquet solution decaying toward ±∞.
///
/// The root of `Δ₊² − 1` is the one whose multiplier `Δ₊ + √(Δ₊²−1)` lies inside the unit disc.
pub fn m_periodic(p: &PeriodicData, lambda: Complex64, side: Side) -> Result<Complex64> {
    let ms = monodromy(p, lambda)?;
    let d = ms.delta_plus;
    let mut r = (d * d - 1.0).sqrt();
    let (a, b) = ((d + r).norm(), (d - r).norm());
    if (a - b).abs() < 1e-10 * (a + b) {
        return Err(Error::BranchAmbiguous { lambda });
    }
    if a > b {
        r = -r;
    }
    let sgn = side.sign();
    let mt = (-ms.delta_minus * sgn + r) / ms.s_t;
    if mt.norm() == 0.0 || !mt.is_finite() {
        return Err(Error::Pole { lambda });
    }
    let m = -1.0 / mt;
    if lambda.im != 0.0 && m.im * lambda.im < -1e-8 * m.norm() {
        return Err(Error::BranchAmbiguous { lambda });
    }
    Ok(m)
}

/// Lowest periodic eigenvalue with its certificate `Δ₊′(λ₀) < 0`, `s(T, λ₀) > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandEdge {
    pub lambda0: f64,
    pub delta_prime: f64,
    pub s_t: f64,
}

fn delta_plus_real(p: &PeriodicData, l: f64) -> Result<f64> {
    Ok(monodromy(p, Complex64::new(l, 0.0))?.delta_plus.re)
}

pub fn band_edge(p: &PeriodicData) -> Result<BandEdge> {
    let t = p.period;
    let qmin = p.q.sampled_min(0.0, t, 4000);
    let n = 4000;
    let qmean = (0..n).map(|k| p.q.eval((k as f64 + 0.5) * t / n as f64)).sum::<f64>() / n as f64;
    let lo0 = qmin - 1.0;
    let hi_max = qmean + 1e-6 * (1.0 + qmean.abs());
    let step = ((std::f64::consts::PI / t).powi(2) / 8.0).min((hi_max - lo0) / 64.0);
    let f = |l: f64| delta_plus_real(p, l).map(|d| d - 1.0);
    let mut lo = lo0;
    let mut flo = f(lo)?;
    if flo <= 0.0 {
        return Err(Error::RootNotBracketed { lo: lo0, hi: hi_max });
    }
    let root = loop {
        let hi = (lo + step).min(hi_max);
        let fhi = f(hi)?;
        if fhi <= 0.0 {
            break brent(f, lo, hi, 1e-14 * (1.0 + hi.abs()))?;
        }
        if hi >= hi_max {
            return Err(Error::RootNotBracketed { lo: lo0, hi: hi_max });
        }
        lo = hi;
        flo = fhi;
    };
    let _ = flo;
    let h = 1e-5 * (1.0 + root.abs());
    let dprime = (delta_plus_real(p, root + h)? - delta_plus_real(p, root - h)?) / (2.0 * h);
    let s_t = monodromy(p, Complex64::new(root, 0.0))?.s_t.re;
    if !(dprime < 0.0 && s_t > 0.0) {
        return Err(Error::EvaluationFailed {
            lambda: Complex64::new(root, 0.0),
            reason: format!("band edge certificate failed: Δ₊′ = {dprime}, s(T) = {s_t}"),
        });
    }
    Ok(BandEdge {
        lambda0: root,
        delta_prime: dprime,
        s_t,
    })
}

/// Leftmost root of `Δ₊(λ) = 1`.
pub fn lowest_band_edge(p: &PeriodicData) -> Result<f64> {
    Ok(band_edge(p)?.lambda0)
}

/// Leading constant `s(T,0)/√(−2Δ₊′(0))` of `M± ∼ ±iC₁/√(±λ)` when `λ₀ = 0` and `Δ₋(0) = 0`.
pub fn case1_constant(p: &PeriodicData) -> Result<f64> {
    let e = band_edge(p)?;
    Ok(e.s_t / (-2.0 * e.delta_prime).sqrt())
}

/// Shift `2 s(T,0)/Δ₋(0)` used when `Δ₋(0) ≠ 0`; `None` in the symmetric case.
pub fn periodic_shift(p: &PeriodicData) -> Result<Option<f64>> {
    let ms = monodromy(p, Complex64::new(0.0, 0.0))?;
    let dm = ms.delta_minus.re;
    if dm.abs() < 1e-10 {
        Ok(None)
    } else {
        Ok(Some(2.0 * ms.s_t.re / dm))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sl_ode::Term;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn free() -> PeriodicData {
        PeriodicData::new(CoefficientFn::zero(), PI).unwrap()
    }

    fn mathieu() -> PeriodicData {
        PeriodicData::new(
            CoefficientFn::periodic(
                vec![Term::Cosine {
                    amplitude: 2.0,
                    frequency: 2.0,
                    phase: 0.0,
                }],
                PI,
            ),
            PI,
        )
        .unwrap()
    }

    #[test]
    fn free_monodromy() {
        let m = monodromy(&free(), c(1.0, 0.0)).unwrap();
        assert!((m.c_t + 1.0).norm() < 1e-10);
        assert!(m.s_t.norm() < 1e-10);
        assert!((m.s_t_prime + 1.0).norm() < 1e-10);
        assert!((m.delta_plus + 1.0).norm() < 1e-10);
        assert!(m.delta_minus.norm() < 1e-10);
    }

    #[test]
    fn unimodular() {
        for lam in [c(0.3, 2.0), c(-4.0, 0.1), c(10.0, -3.0)] {
            let m = monodromy(&mathieu(), lam).unwrap();
            assert!((m.determinant() - 1.0).norm() < 1e-10);
        }
    }

    #[test]
    fn meissner_matches_propagators() {
        let t = 2.0;
        let cq = 3.0;
        let q = CoefficientFn::periodic(
            vec![Term::Characteristic {
                from: 0.0,
                to: 1.0,
                value: cq,
            }],
            t,
        );
        let p = PeriodicData::new(q, t).unwrap();
        let lam = c(1.7, 0.4);
        let prop = |k: Complex64, l: f64| -> [[Complex64; 2]; 2] {
            [[(k * l).cos(), (k * l).sin() / k], [-k * (k * l).sin(), (k * l).cos()]]
        };
        let a = prop((lam - cq).sqrt(), 1.0);
        let b = prop(lam.sqrt(), 1.0);
        let m = [
            [b[0][0] * a[0][0] + b[0][1] * a[1][0], b[0][0] * a[0][1] + b[0][1] * a[1][1]],
            [b[1][0] * a[0][0] + b[1][1] * a[1][0], b[1][0] * a[0][1] + b[1][1] * a[1][1]],
        ];
        let ms = monodromy(&p, lam).unwrap();
        assert!((ms.c_t - m[0][0]).norm() < 1e-9);
        assert!((ms.s_t - m[0][1]).norm() < 1e-9);
        assert!((ms.c_t_prime - m[1][0]).norm() < 1e-9);
        assert!((ms.s_t_prime - m[1][1]).norm() < 1e-9);
    }

    #[test]
    fn free_recovers_m() {
        let lam = c(1.0, 1.0);
        for side in [Side::Plus, Side::Minus] {
            let m = m_periodic(&free(), lam, side).unwrap();
            assert!((m - Complex64::new(0.0, 1.0) / lam.sqrt()).norm() < 1e-8);
        }
    }

    #[test]
    fn free_band_edge_and_constant() {
        let e = band_edge(&free()).unwrap();
        assert!(e.lambda0.abs() < 1e-10);
        assert!((e.delta_prime + PI * PI / 2.0).abs() < 1e-5);
        assert!((e.s_t - PI).abs() < 1e-9);
        assert!((case1_constant(&free()).unwrap() - 1.0).abs() < 1e-5);
    }

    #[test]
    fn mathieu_edge_and_shift() {
        let l0 = lowest_band_edge(&mathieu()).unwrap();
        assert!((l0 + 0.455_139).abs() < 1e-5, "{l0}");
        let l1 = lowest_band_edge(&mathieu().shifted(-l0)).unwrap();
        assert!(l1.abs() < 1e-8);
    }
}
