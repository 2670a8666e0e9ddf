use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly;
use crate::sl_ode::Side;
use crate::special::sqrt_cut;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Spectral data of a finite-zone potential: `σ = [μ^r₀, ∞)` minus the gaps, written as
/// the left edge `μ^r₀` followed by the bands `[μ^l_j, μ^r_j]` that bound each gap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZoneData {
    pub mu_r0: f64,
    pub bands: Vec<(f64, f64)>,
    pub xi: Vec<f64>,
    pub eps: Vec<i8>,
}

impl ZoneData {
    pub fn n(&self) -> usize {
        self.bands.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.bands.len();
        if self.xi.len() != n || self.eps.len() != n {
            return Err(Error::Invalid(format!(
                "zone data needs {n} xi and eps values, got {} and {}",
                self.xi.len(),
                self.eps.len()
            )));
        }
        let mut prev = self.mu_r0;
        if !prev.is_finite() {
            return Err(Error::Invalid("mu_r0 must be finite".into()));
        }
        for (j, &(l, r)) in self.bands.iter().enumerate() {
            if !(l > prev && r > l && r.is_finite()) {
                return Err(Error::Invalid(format!("band {} = ({l}, {r}) breaks the strict ordering", j + 1)));
            }
            let x = self.xi[j];
            if !(x >= l && x <= r) {
                return Err(Error::Invalid(format!("xi_{} = {x} outside [{l}, {r}]", j + 1)));
            }
            if self.eps[j] != 1 && self.eps[j] != -1 {
                return Err(Error::Invalid(format!("eps_{} must be +1 or -1", j + 1)));
            }
            prev = r;
        }
        Ok(())
    }

    /// Roots of `R`: `μ^r₀` and every band edge.
    pub fn r_roots(&self) -> Vec<f64> {
        let mut v = vec![self.mu_r0];
        for &(l, r) in &self.bands {
            v.push(l);
            v.push(r);
        }
        v
    }
}

/// `P`, `Q`, `R`, `S` (ascending coefficients) with `PS − Q² = R`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZonePolynomials {
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    pub r: Vec<f64>,
    pub s: Vec<f64>,
    /// Real roots of `S`, ascending.
    pub s_roots: Vec<f64>,
    /// `‖PS − Q² − R‖/‖R‖`.
    pub residual: f64,
    pub source: ZoneData,
}

/// `Π (λ − ξ_k)/(ξ_j − ξ_k)` over `k ≠ j`, ascending coefficients.
fn lagrange_basis(xi: &[f64], j: usize) -> Vec<f64> {
    let mut b = vec![1.0];
    for (k, &x) in xi.iter().enumerate() {
        if k != j {
            b = poly::mul(&b, &[-x / (xi[j] - x), 1.0 / (xi[j] - x)]);
        }
    }
    b
}

pub fn finitezone_build(z: &ZoneData) -> Result<ZonePolynomials> {
    z.validate()?;
    let p = poly::from_roots(&z.xi);
    let r = poly::from_roots(&z.r_roots());
    let mut q = vec![0.0];
    for j in 0..z.n() {
        let rx = poly::eval(&r, z.xi[j]);
        // −R(ξ_j) ≥ 0 inside a band; clip rounding noise at the edges
        if rx > 1e-12 * (1.0 + poly::max_abs(&r)) {
            return Err(Error::Invalid(format!("R(xi_{}) = {rx} > 0", j + 1)));
        }
        let c = f64::from(z.eps[j]) * (-rx).max(0.0).sqrt();
        q = poly::add(&q, &poly::scale(&lagrange_basis(&z.xi, j), c));
    }
    let num = poly::add(&poly::mul(&q, &q), &r);
    let (s, rem) = poly::divmod(&num, &p);
    let s = if z.n() == 0 { num.clone() } else { s };
    let scale = poly::max_abs(&r).max(1e-300);
    let div_res = if z.n() == 0 { 0.0 } else { poly::max_abs(&rem) / scale };
    if div_res > 1e-10 {
        return Err(Error::IdentityViolated { residual: div_res });
    }
    let check = poly::add(&poly::add(&poly::mul(&p, &s), &poly::scale(&poly::mul(&q, &q), -1.0)), &poly::scale(&r, -1.0));
    let residual = poly::max_abs(&check) / scale;
    if residual > 1e-10 {
        return Err(Error::IdentityViolated { residual });
    }
    let s_roots = verify_s_roots(z, &s)?;
    Ok(ZonePolynomials {
        p,
        q: poly::trim(q),
        r,
        s,
        s_roots,
        residual,
        source: z.clone(),
    })
}

/// `τ₀ ≤ μ^r₀` and `τ_j ∈ [μ^l_j, μ^r_j]`.
fn verify_s_roots(z: &ZoneData, s: &[f64]) -> Result<Vec<f64>> {
    let rts = poly::roots(s);
    let scale = 1.0 + z.r_roots().iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let tol = 1e-7 * scale;
    let mut real: Vec<f64> = Vec::with_capacity(rts.len());
    for r in &rts {
        if r.im.abs() > tol {
            return Err(Error::EvaluationFailed {
                lambda: *r,
                reason: "S has a nonreal root".into(),
            });
        }
        real.push(r.re);
    }
    real.sort_by(f64::total_cmp);
    let bad = |t: f64| Error::EvaluationFailed {
        lambda: Complex64::new(t, 0.0),
        reason: "root of S violates the interlacing".into(),
    };
    if real[0] > z.mu_r0 + tol {
        return Err(bad(real[0]));
    }
    for (j, &(l, r)) in z.bands.iter().enumerate() {
        let t = real[j + 1];
        if t < l - tol || t > r + tol {
            return Err(bad(t));
        }
    }
    Ok(real)
}

/// `√R(λ)` continuous off the bands and positive above `μ^r_N`.
pub fn sqrt_r(z: &ZoneData, lambda: Complex64) -> Complex64 {
    z.r_roots().iter().map(|&a| sqrt_cut(lambda - a)).product()
}

/// `m±` in both representations `±P/(Q ∓ i√R)` and `±(Q ± i√R)/S`.
fn both(zp: &ZonePolynomials, lambda: Complex64, side: Side) -> (Complex64, Complex64, f64) {
    let p = poly::eval_c(&zp.p, lambda);
    let q = poly::eval_c(&zp.q, lambda);
    let s = poly::eval_c(&zp.s, lambda);
    let w = I * sqrt_r(&zp.source, lambda);
    let sg = side.sign();
    let first = sg * p / (q - sg * w);
    let second = sg * (q + sg * w) / s;
    // conditioning of the comparison: the two forms differ by (PS − Q² − R)/(S(Q ∓ i√R))
    let cond = (q.norm_sqr() + w.norm_sqr() + (p * s).norm()) / (s * (q - sg * w)).norm().max(1e-300);
    (first, second, cond)
}

/// `m±(λ)` of the finite-zone potential, cross-checked between the two representations.
pub fn m_finitezone(zp: &ZonePolynomials, lambda: Complex64, side: Side) -> Result<Complex64> {
    let (a, b, cond) = both(zp, lambda, side);
    if !a.is_finite() && !b.is_finite() {
        return Err(Error::Pole { lambda });
    }
    let m = if a.is_finite() { a } else { b };
    if a.is_finite() && b.is_finite() {
        let d = (a - b).norm();
        let tol = 1e-9 * a.norm().max(b.norm()).max(1.0) * cond.max(1.0) * (1.0 + zp.residual / 1e-15).min(1e3);
        if d > tol {
            return Err(Error::IdentityViolated {
                residual: d / a.norm().max(1e-300),
            });
        }
    }
    if lambda.im != 0.0 && m.im * lambda.im < -1e-10 * m.norm() {
        return Err(Error::BranchAmbiguous { lambda });
    }
    Ok(m)
}

/// `C₁ = Π ξ_j (Π μ^l_j μ^r_j)^{−1/2}` of `M± ∼ ±iC₁/√(±λ)` when `μ^r₀ = 0` and `Q(0) = 0`.
pub fn zone_case_a_constant(z: &ZoneData) -> f64 {
    z.bands
        .iter()
        .zip(&z.xi)
        .map(|(&(l, r), &x)| x / (l * r).sqrt())
        .product()
}

/// `(C₂, C₃)` of `M± = C₂ ± iC₃√(±λ) + o(√λ)` when `μ^r₀ = 0` and `Q(0) ≠ 0`.
pub fn zone_case_b_constants(zp: &ZonePolynomials) -> Result<(f64, f64)> {
    let s0 = poly::eval(&zp.s, 0.0);
    if s0.abs() < 1e-14 * poly::max_abs(&zp.s) {
        return Err(Error::Pole {
            lambda: Complex64::new(0.0, 0.0),
        });
    }
    let c2 = poly::eval(&zp.q, 0.0) / s0;
    // √R(λ) ≈ √λ Π (i√μ^l)(i√μ^r)
    let n = zp.source.n() as i32;
    let root: f64 = zp.source.bands.iter().map(|&(l, r)| (l * r).sqrt()).product();
    Ok((c2, (-1f64).powi(n) * root / s0))
}
