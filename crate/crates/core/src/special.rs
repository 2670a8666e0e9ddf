//! Branched powers, Gamma and Hankel functions.
//!
//! All branches cut along the positive real axis with `arg z ∈ [0, 2π)`;
//! a value on the cut is the limit from the upper half-plane.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// A complex number tagged with the branch convention it was produced under.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchedComplex {
    pub value: Complex64,
    pub branch: Branch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    CutAlongPositiveReals,
}

/// Argument in `[0, 2π)`, with `+0.0` imaginary parts on the positive axis read as the upper edge.
pub fn arg_cut(z: Complex64) -> f64 {
    let a = z.im.atan2(z.re);
    if a < 0.0 || (a == 0.0 && z.im.is_sign_negative() && z.re < 0.0) {
        a + 2.0 * PI
    } else {
        a
    }
}

/// Square root with `√(−1) = i` and cut along ℝ₊.
///
/// ```
/// use indefinite_sl::special::sqrt_cut;
/// use num_complex::Complex64;
/// let w = sqrt_cut(Complex64::new(-1.0, 0.0));
/// assert!((w - Complex64::new(0.0, 1.0)).norm() < 1e-15);
/// ```
pub fn sqrt_cut(z: Complex64) -> Complex64 {
    let w = z.sqrt();
    // principal root has Re w ≥ 0; flip into the upper half-plane
    if w.im < 0.0 || (w.im == 0.0 && w.re < 0.0) {
        -w
    } else {
        w
    }
}

/// `z^nu` with `arg z ∈ (0, 2π)`.
pub fn power_cut(z: Complex64, nu: f64) -> Result<Complex64> {
    if z == Complex64::new(0.0, 0.0) {
        return Err(Error::Domain("power_cut at z = 0".into()));
    }
    let th = arg_cut(z);
    Ok(Complex64::from_polar(z.norm().powf(nu), nu * th))
}

pub fn branched_sqrt(z: Complex64) -> BranchedComplex {
    BranchedComplex {
        value: sqrt_cut(z),
        branch: Branch::CutAlongPositiveReals,
    }
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma function for positive arguments.
pub fn gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("gamma needs x > 0, got {x}")));
    }
    if x < 0.5 {
        return Ok(gamma(x + 1.0)? / x);
    }
    let x = x - 1.0;
    let mut a = LANCZOS[0];
    let t = x + LANCZOS_G + 0.5;
    for (k, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (x + k as f64);
    }
    Ok((2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HankelKind {
    First,
    Second,
}

/// Below this modulus the series or integral representations are used.
pub const HANKEL_SWITCH: f64 = 12.0;
/// Past the Stokes line the expansion misses a subdominant term of relative size `e^{−2|Im z|}`,
/// so the growing kind keeps the series up to this modulus.
pub const HANKEL_SWITCH_GROWING: f64 = 30.0;
const SECTOR_MARGIN: f64 = 0.05;
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Hankel function `H_nu^{(1,2)}(z)` for `nu ∈ (0, 1]` and `|arg z| ≤ π − 0.05`.
pub fn hankel(nu: f64, z: Complex64, kind: HankelKind) -> Result<Complex64> {
    if !(nu > 0.0 && nu <= 1.0) {
        return Err(Error::Domain(format!("hankel order {nu} outside (0, 1]")));
    }
    check_sector(z)?;
    Ok(hankel_raw(nu, z, kind))
}

/// `dH_nu/dz` via `H_{nu-1} − (nu/z) H_nu`.
pub fn hankel_prime(nu: f64, z: Complex64, kind: HankelKind) -> Result<Complex64> {
    let h = hankel(nu, z, kind)?;
    let mu = 1.0 - nu;
    let rot = match kind {
        HankelKind::First => Complex64::from_polar(1.0, mu * PI),
        HankelKind::Second => Complex64::from_polar(1.0, -mu * PI),
    };
    let lower = rot * hankel_raw(mu, z, kind);
    Ok(lower - h * nu / z)
}

fn check_sector(z: Complex64) -> Result<()> {
    if z.norm() == 0.0 {
        return Err(Error::Domain("hankel at z = 0".into()));
    }
    if z.arg().abs() > PI - SECTOR_MARGIN {
        return Err(Error::Domain(format!("arg z = {} outside the sector", z.arg())));
    }
    Ok(())
}

/// Order in `[0, 1]`, no validation.
fn growth(z: Complex64, kind: HankelKind) -> f64 {
    let s = (PI / 8.0).sin() * z.norm();
    let im = match kind {
        HankelKind::First => z.im,
        HankelKind::Second => -z.im,
    };
    if im > s {
        1.0
    } else if im < -s {
        -1.0
    } else {
        0.0
    }
}

fn hankel_raw(nu: f64, z: Complex64, kind: HankelKind) -> Complex64 {
    let g = growth(z, kind);
    if g < 0.0 && z.norm() < HANKEL_SWITCH_GROWING {
        return hankel_series(nu, z, kind);
    }
    if z.norm() >= HANKEL_SWITCH {
        return hankel_asymptotic(nu, z, kind);
    }
    if g > 0.0 {
        match kind {
            HankelKind::First => hankel1_integral(nu, z),
            HankelKind::Second => hankel1_integral(nu, z.conj()).conj(),
        }
    } else {
        hankel_series(nu, z, kind)
    }
}

/// Large-argument expansion, summed until the terms stop decreasing.
pub fn hankel_asymptotic(nu: f64, z: Complex64, kind: HankelKind) -> Complex64 {
    let s = match kind {
        HankelKind::First => 1.0,
        HankelKind::Second => -1.0,
    };
    let mu4 = 4.0 * nu * nu;
    let step = Complex64::new(0.0, s) / z;
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut last = f64::INFINITY;
    for k in 1..200 {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        term *= step * (mu4 - odd * odd) / (8.0 * kf);
        let t = term.norm();
        if k > 3 && (t > last || t < 1e-17 * sum.norm()) {
            break;
        }
        sum += term;
        last = t;
    }
    let phase = Complex64::new(0.0, s) * (z - nu * PI / 2.0 - PI / 4.0);
    (Complex64::new(2.0 / PI, 0.0) / z).sqrt() * phase.exp() * sum
}

/// Leading term of the large-argument expansion.
pub fn hankel_leading(nu: f64, z: Complex64, kind: HankelKind) -> Complex64 {
    let s = match kind {
        HankelKind::First => 1.0,
        HankelKind::Second => -1.0,
    };
    let phase = Complex64::new(0.0, s) * (z - nu * PI / 2.0 - PI / 4.0);
    (Complex64::new(2.0 / PI, 0.0) / z).sqrt() * phase.exp()
}

fn bessel_j_series(nu: f64, z: Complex64) -> Complex64 {
    let half = z / 2.0;
    let q = -half * half;
    let mut term = half.powf(nu) / gamma_any(nu + 1.0);
    let mut sum = term;
    for k in 1..400 {
        let kf = k as f64;
        term *= q / (kf * (kf + nu));
        sum += term;
        if term.norm() < 1e-18 * sum.norm().max(1e-300) && k > 4 {
            break;
        }
    }
    sum
}

/// Gamma on the positive reals extended by the recurrence for `x ∈ (−1, 0)`.
fn gamma_any(x: f64) -> f64 {
    if x > 0.0 {
        gamma(x).unwrap_or(f64::NAN)
    } else {
        gamma(x + 1.0).unwrap_or(f64::NAN) / x
    }
}

fn hankel_series(nu: f64, z: Complex64, kind: HankelKind) -> Complex64 {
    let (j, y) = if (nu - 1.0).abs() < 1e-14 {
        (bessel_j_series(1.0, z), bessel_y1(z))
    } else if nu.abs() < 1e-14 {
        (bessel_j_series(0.0, z), bessel_y0(z))
    } else {
        let jp = bessel_j_series(nu, z);
        let jm = bessel_j_series(-nu, z);
        let y = (jp * (nu * PI).cos() - jm) / (nu * PI).sin();
        (jp, y)
    };
    match kind {
        HankelKind::First => j + I * y,
        HankelKind::Second => j - I * y,
    }
}

fn bessel_y0(z: Complex64) -> Complex64 {
    let j0 = bessel_j_series(0.0, z);
    let q = z * z / 4.0;
    let mut term = Complex64::new(1.0, 0.0);
    let mut harm = 0.0;
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 1..400 {
        let kf = k as f64;
        term *= -q / (kf * kf);
        harm += 1.0 / kf;
        let add = -term * harm;
        sum += add;
        if add.norm() < 1e-18 * sum.norm().max(1e-300) && k > 4 {
            break;
        }
    }
    ((z / 2.0).ln() + EULER_GAMMA) * j0 * (2.0 / PI) + sum * (2.0 / PI)
}

fn bessel_y1(z: Complex64) -> Complex64 {
    let j1 = bessel_j_series(1.0, z);
    let half = z / 2.0;
    let q = -half * half;
    let mut term = half; // (z/2)^{2k+1}/(k!(k+1)!) · (−1)^k at k = 0
    let mut psi_sum = -2.0 * EULER_GAMMA + 1.0; // ψ(1) + ψ(2)
    let mut sum = term * psi_sum;
    let mut hk = 0.0;
    for k in 1..400 {
        let kf = k as f64;
        term *= q / (kf * (kf + 1.0));
        hk += 1.0 / kf;
        psi_sum = -2.0 * EULER_GAMMA + 2.0 * hk + 1.0 / (kf + 1.0);
        let add = term * psi_sum;
        sum += add;
        if add.norm() < 1e-18 * sum.norm().max(1e-300) && k > 4 {
            break;
        }
    }
    j1 * half.ln() * (2.0 / PI) - Complex64::new(2.0 / PI, 0.0) / z - sum / PI
}

/// `H^{(1)}_nu(z) = (2/(iπ)) e^{−iνπ/2} K_nu(−iz)` with `K_nu(w) = ∫₀^∞ e^{−w cosh t} cosh(νt) dt`,
/// summed by the trapezoid rule (exponentially convergent for this entire, even integrand).
fn hankel1_integral(nu: f64, z: Complex64) -> Complex64 {
    let w = -I * z;
    let h = 0.04;
    let mut sum = Complex64::new(0.5, 0.0) * (-w).exp();
    let mut k = 1;
    loop {
        let t = k as f64 * h;
        let term = (-w * t.cosh()).exp() * (nu * t).cosh();
        sum += term;
        if w.re * t.cosh() - nu * t > 50.0 || k > 20_000 {
            break;
        }
        k += 1;
    }
    let kv = sum * h;
    Complex64::new(0.0, -2.0 / PI) * Complex64::from_polar(1.0, -nu * PI / 2.0) * kv
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn sqrt_examples() {
        assert!((sqrt_cut(c(-1.0, 0.0)) - c(0.0, 1.0)).norm() < 1e-15);
        assert!((sqrt_cut(c(4.0, 0.0)) - c(2.0, 0.0)).norm() < 1e-15);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((sqrt_cut(c(0.0, 1.0)) - c(r, r)).norm() < 1e-15);
        // lower half-plane maps to the second quadrant
        let w = sqrt_cut(c(0.0, -1.0));
        assert!((w - c(-r, r)).norm() < 1e-15);
    }

    #[test]
    fn power_examples() {
        let w = power_cut(c(-1.0, 0.0), 0.25).unwrap();
        assert!((w - Complex64::from_polar(1.0, PI / 4.0)).norm() < 1e-15);
        assert!((power_cut(c(1.0, 0.0), 0.3).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
        assert!((power_cut(c(-4.0, 0.0), 0.5).unwrap() - c(0.0, 2.0)).norm() < 1e-14);
        assert!(power_cut(c(0.0, 0.0), 0.5).is_err());
    }

    #[test]
    fn gamma_examples() {
        let sp = PI.sqrt();
        assert!((gamma(1.0).unwrap() - 1.0).abs() < 1e-14);
        assert!((gamma(0.5).unwrap() - sp).abs() < 1e-13);
        assert!((gamma(1.5).unwrap() - sp / 2.0).abs() < 1e-13);
        assert!((gamma(6.0).unwrap() - 120.0).abs() < 1e-10);
        assert!(gamma(0.0).is_err());
        assert!(gamma(-1.0).is_err());
    }

    #[test]
    fn gamma_recurrence() {
        for k in 1..1000 {
            let x = k as f64 * 0.01;
            let lhs = gamma(x + 1.0).unwrap();
            let rhs = x * gamma(x).unwrap();
            assert!((lhs - rhs).abs() < 1e-11 * lhs.abs(), "x = {x}");
        }
    }

    #[test]
    fn hankel_half_order() {
        let h = hankel(0.5, c(1.0, 0.0), HankelKind::First).unwrap();
        let exact = -I * (2.0 / PI).sqrt() * I.exp();
        assert!((h - exact).norm() < 1e-12 * exact.norm());
        assert!((h - c(0.67139, -0.43110)).norm() < 1e-5);
        // the closed form holds everywhere in the sector
        for &z in &[c(0.3, 2.0), c(5.0, 5.0), c(-3.0, 1.0), c(11.0, -4.0), c(30.0, 2.0)] {
            let h = hankel(0.5, z, HankelKind::First).unwrap();
            let exact = -I * (Complex64::new(2.0 / PI, 0.0) / z).sqrt() * (I * z).exp();
            assert!((h - exact).norm() < 1e-10 * exact.norm(), "z = {z}");
        }
    }

    fn wronskian_err(nu: f64, z: Complex64) -> f64 {
        let h1 = hankel(nu, z, HankelKind::First).unwrap();
        let h2 = hankel(nu, z, HankelKind::Second).unwrap();
        let d1 = hankel_prime(nu, z, HankelKind::First).unwrap();
        let d2 = hankel_prime(nu, z, HankelKind::Second).unwrap();
        let w = h1 * d2 - d1 * h2;
        let exact = Complex64::new(0.0, -4.0 / PI) / z;
        (w - exact).norm() / exact.norm()
    }

    #[test]
    fn wronskian_example() {
        assert!(wronskian_err(0.25, c(2.0, 1.0)) < 1e-10);
    }

    #[test]
    fn wronskian_grid() {
        let mut worst: f64 = 0.0;
        for &nu in &[0.25, 0.5, 2.0 / 3.0, 0.9, 1.0] {
            for i in 0..=40 {
                let r = 0.1 * 1000f64.powf(i as f64 / 40.0);
                for j in 0..=12 {
                    let th = -0.75 * PI + 1.5 * PI * j as f64 / 12.0;
                    let z = Complex64::from_polar(r, th);
                    worst = worst.max(wronskian_err(nu, z));
                }
            }
        }
        assert!(worst < 1e-8, "worst Wronskian error {worst:e}");
    }

    fn below_switch(nu: f64, z: Complex64, kind: HankelKind) -> Complex64 {
        if growth(z, kind) > 0.0 {
            match kind {
                HankelKind::First => hankel1_integral(nu, z),
                HankelKind::Second => hankel1_integral(nu, z.conj()).conj(),
            }
        } else {
            hankel_series(nu, z, kind)
        }
    }

    fn band_err(nu: f64, r: f64, th: f64, kind: HankelKind) -> f64 {
        let z = Complex64::from_polar(r, th);
        let a = hankel_asymptotic(nu, z, kind);
        (a - below_switch(nu, z, kind)).norm() / a.norm()
    }

    #[test]
    fn switchover_band_agrees() {
        for &nu in &[0.25, 0.75] {
            for i in 0..=8 {
                let r = 10.0 + 0.5 * i as f64;
                for j in 0..=8 {
                    let th = -0.75 * PI + 1.5 * PI * j as f64 / 8.0;
                    for kind in [HankelKind::First, HankelKind::Second] {
                        if growth(Complex64::from_polar(r, th), kind) < 0.0 {
                            continue;
                        }
                        let e = band_err(nu, r, th, kind);
                        assert!(e < 1e-8, "nu {nu} r {r} th {th} {kind:?}: {e:e}");
                    }
                }
            }
        }
    }

    #[test]
    fn growing_switchover_band_agrees() {
        for &nu in &[0.25, 0.75] {
            for i in 0..=8 {
                let r = 28.0 + 0.5 * i as f64;
                for &th in &[-0.75 * PI, -0.5 * PI, -0.25 * PI] {
                    let e = band_err(nu, r, th, HankelKind::First);
                    assert!(e < 1e-8, "nu {nu} r {r} th {th}: {e:e}");
                    let e = band_err(nu, r, -th, HankelKind::Second);
                    assert!(e < 1e-8, "nu {nu} r {r} th {}: {e:e}", -th);
                }
            }
        }
    }

    #[test]
    fn leading_term_at_fifty() {
        let z = c(50.0, 0.0);
        let h = hankel(0.25, z, HankelKind::First).unwrap();
        let l = hankel_leading(0.25, z, HankelKind::First);
        assert!((h - l).norm() < 1e-2 * h.norm());
    }

    #[test]
    fn leading_term_residual_decays_like_inverse_z() {
        let rs: Vec<f64> = (0..8).map(|k| 30.0 * 2f64.powi(k)).collect();
        let pts: Vec<(f64, f64)> = rs
            .iter()
            .map(|&r| {
                let z = Complex64::from_polar(r, 0.01);
                let h = hankel(0.25, z, HankelKind::First).unwrap();
                let l = hankel_leading(0.25, z, HankelKind::First);
                (r.ln(), ((h - l).norm() / h.norm()).ln())
            })
            .collect();
        let slope = crate::numerics::least_squares_slope(&pts).0;
        assert!(-slope >= 0.9, "decay exponent {}", -slope);
    }

    #[test]
    fn sector_and_order_domain() {
        assert!(hankel(0.5, c(0.0, 0.0), HankelKind::First).is_err());
        assert!(hankel(0.5, c(-1.0, 0.01), HankelKind::First).is_err());
        assert!(hankel(1.5, c(1.0, 0.0), HankelKind::First).is_err());
    }

    proptest! {
        #[test]
        fn sqrt_squares_back(re in -1e3f64..1e3, im in -1e3f64..1e3) {
            let z = c(re, im);
            let w = sqrt_cut(z);
            prop_assert!((w * w - z).norm() <= 1e-14 * z.norm().max(1e-300));
            prop_assert!(w.im >= 0.0);
        }

        #[test]
        fn power_half_is_sqrt(re in -1e3f64..1e3, im in 1e-6f64..1e3, flip in any::<bool>()) {
            let z = c(re, if flip { -im } else { im });
            let a = power_cut(z, 0.5).unwrap();
            prop_assert!((a - sqrt_cut(z)).norm() <= 1e-13 * a.norm());
        }
    }
}
