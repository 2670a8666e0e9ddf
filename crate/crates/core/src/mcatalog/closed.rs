use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::sl_ode::{CoefficientFn, Segment, Term};
use crate::special::{gamma, power_cut, sqrt_cut};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `m = i/√λ` of `−y″ = λy` on a half-line.
pub fn m_free(lambda: Complex64) -> Result<Complex64> {
    if lambda.norm() == 0.0 {
        return Err(Error::Pole { lambda });
    }
    Ok(I / sqrt_cut(lambda))
}

/// `ν = 1/(α+2)` and `C_ν = Γ(1+ν)/(ν^{2ν} Γ(1−ν))`.
pub fn power_constants(alpha: f64) -> Result<(f64, f64)> {
    if !(alpha > -1.0) || !alpha.is_finite() {
        return Err(Error::Domain(format!("power weight needs alpha > -1, got {alpha}")));
    }
    let nu = 1.0 / (alpha + 2.0);
    let c = gamma(1.0 + nu)? / (nu.powf(2.0 * nu) * gamma(1.0 - nu)?);
    Ok((nu, c))
}

/// `m_α(λ) = C_ν e^{iπν} λ^{−ν}` for the weight `|x|^α`, `q = 0`.
///
/// ```
/// use indefinite_sl::mcatalog::m_power;
/// use num_complex::Complex64;
/// let m = m_power(0.0, Complex64::new(0.0, 1.0)).unwrap();
/// assert!((m - Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4)).norm() < 1e-14);
/// ```
pub fn m_power(alpha: f64, lambda: Complex64) -> Result<Complex64> {
    let (nu, c) = power_constants(alpha)?;
    let l = power_cut(lambda, nu)?;
    Ok(Complex64::from_polar(c, PI * nu) / l)
}

/// `m₁(λ) = (1 − i√λ)/(1 − i√λ − λ)`.
pub fn m1_helper(lambda: Complex64) -> Result<Complex64> {
    let a = 1.0 - I * sqrt_cut(lambda);
    let d = a - lambda;
    if d.norm() < 1e-300 {
        return Err(Error::Pole { lambda });
    }
    Ok(a / d)
}

fn sinc_over(a: f64, k: Complex64) -> Complex64 {
    // sin(a k)/k, regular at k = 0
    let z = k * a;
    if z.norm() < 1e-4 {
        let z2 = z * z;
        a * (1.0 - z2 / 6.0 + z2 * z2 / 120.0)
    } else {
        z.sin() / k
    }
}

/// Continues `m₁` across the well `[0, π/4]` with wavenumber `k`.
fn across_well(lambda: Complex64, k: Complex64) -> Result<Complex64> {
    let m1 = m1_helper(lambda)?;
    let a = PI / 4.0;
    let (s, c) = ((k * a).sin(), (k * a).cos());
    let num = sinc_over(a, k) + m1 * c;
    let den = c - m1 * k * s;
    if den.norm() < 1e-14 * (num.norm() + 1.0) {
        return Err(Error::Pole { lambda });
    }
    Ok(num / den)
}

fn tail_segments() -> Vec<Segment> {
    let a = PI / 4.0;
    let tail = vec![Term::Rational {
        coef: 2.0,
        shift: 1.0 - a,
        power: 2.0,
    }];
    vec![
        Segment {
            from: Some(a),
            to: None,
            terms: tail.clone(),
        },
        Segment {
            from: None,
            to: Some(-a),
            terms: tail,
        },
    ]
}

/// Even extension of `q₀`: `−1` on `|x| < π/4`, `2(1+|x|−π/4)⁻²` beyond.
pub fn q0_potential() -> CoefficientFn {
    let a = PI / 4.0;
    let mut segs = vec![Segment {
        from: Some(-a),
        to: Some(a),
        terms: vec![Term::Constant { value: -1.0 }],
    }];
    segs.extend(tail_segments());
    CoefficientFn::piecewise(segs)
}

/// `q₀` without the well.
pub fn a1_potential() -> CoefficientFn {
    CoefficientFn::piecewise(tail_segments())
}

/// m-coefficient of `q₀ = −χ[0,π/4] + 2(1+x−π/4)⁻² χ(π/4,∞)`, Neumann at 0.
pub fn m_example_q0(lambda: Complex64) -> Result<Complex64> {
    across_well(lambda, sqrt_cut(lambda + 1.0))
}

/// m-coefficient for the comparison operator with potential `2(1+|x|−π/4)⁻² χ(π/4,∞)(|x|)`.
pub fn m_example_a1(lambda: Complex64) -> Result<Complex64> {
    across_well(lambda, sqrt_cut(lambda))
}
