use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sl_ode::Side;
use crate::special::sqrt_cut;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Generator for countably many bands.
///
/// `μ^l_j = scale·j^exponent`, `μ^r_j = μ^l_j + width·ratio^j`,
/// `ξ_j = μ^l_j + xi_fraction·(μ^r_j − μ^l_j)`, `ε_j = eps`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BandRule {
    pub scale: f64,
    pub exponent: f64,
    pub width: f64,
    pub ratio: f64,
    pub xi_fraction: f64,
    pub eps: i8,
}

impl Default for BandRule {
    fn default() -> Self {
        Self {
            scale: 1.0,
            exponent: 2.0,
            width: 1.0,
            ratio: 0.25,
            xi_fraction: 0.5,
            eps: 1,
        }
    }
}

/// One band of the sequence. Widths are kept separately since they can fall below the
/// resolution of `μ^l_j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub mu_l: f64,
    pub width: f64,
    /// `ξ_j − μ^l_j`.
    pub xi_offset: f64,
    pub eps: i8,
}

impl Band {
    pub fn mu_r(&self) -> f64 {
        self.mu_l + self.width
    }

    pub fn xi(&self) -> f64 {
        self.mu_l + self.xi_offset
    }

    /// `λ − μ^l`, `λ − μ^r`.
    fn offsets(&self, l: Complex64) -> (Complex64, Complex64) {
        let d = l - self.mu_l;
        (d, d - self.width)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZoneSequenceData {
    pub mu_r0: f64,
    pub rule: BandRule,
}

impl ZoneSequenceData {
    pub fn band(&self, j: usize) -> Band {
        let r = &self.rule;
        let jf = j as f64;
        let mu_l = r.scale * jf.powf(r.exponent);
        let width = r.width * r.ratio.powf(jf);
        Band {
            mu_l,
            width,
            xi_offset: r.xi_fraction * width,
            eps: r.eps,
        }
    }

    pub fn bands(&self, n: usize) -> Vec<Band> {
        (1..=n).map(|j| self.band(j)).collect()
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        let r = &self.rule;
        if !(r.scale > 0.0 && r.exponent > 0.0 && r.width > 0.0 && r.ratio > 0.0) {
            return Err(Error::Invalid("band rule parameters must be positive".into()));
        }
        if !(0.0..=1.0).contains(&r.xi_fraction) || (r.eps != 1 && r.eps != -1) {
            return Err(Error::Invalid("xi_fraction must lie in [0, 1] and eps in {-1, 1}".into()));
        }
        let mut prev = self.mu_r0;
        for (j, b) in self.bands(n).iter().enumerate() {
            if !(b.mu_l > prev && b.width > 0.0) {
                return Err(Error::Invalid(format!("band {} breaks the strict ordering", j + 1)));
            }
            prev = b.mu_r();
        }
        Ok(())
    }
}

/// Partial sums of `Σ μ^r_j(μ^r_j − μ^l_j)` and `Σ 1/μ^l_j` at `N` and `2N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SummabilityReport {
    pub n: usize,
    pub gap_sum: f64,
    pub inverse_sum: f64,
    /// `|S(2N) − S(N)|/|S(N)|`, worst of the two sums.
    pub tail: f64,
    /// Same quantity at `N/2`; a converging series shrinks it.
    pub previous_tail: f64,
    pub passed: bool,
}

pub fn summability_report(zs: &ZoneSequenceData, n: usize, tol: f64) -> SummabilityReport {
    let sums = |k: usize| -> (f64, f64) {
        zs.bands(k)
            .iter()
            .fold((0.0, 0.0), |(a, b), bd| (a + bd.mu_r() * bd.width, b + 1.0 / bd.mu_l))
    };
    let rel = |k: usize| -> f64 {
        let (a1, b1) = sums(k);
        let (a2, b2) = sums(2 * k);
        ((a2 - a1).abs() / a1.abs().max(1e-300)).max((b2 - b1).abs() / b1.abs().max(1e-300))
    };
    let (gap_sum, inverse_sum) = sums(n);
    let tail = rel(n);
    let previous_tail = rel((n / 2).max(1));
    SummabilityReport {
        n,
        gap_sum,
        inverse_sum,
        tail,
        previous_tail,
        passed: tail < tol && tail <= previous_tail,
    }
}

/// `g_N`, `f_N`, `√f_N`, `k_N` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZoneFunctions {
    pub g: Complex64,
    pub f: Complex64,
    pub sqrt_f: Complex64,
    pub k: Complex64,
}

impl ZoneFunctions {
    /// `h = (f + k²)/g`.
    pub fn h(&self) -> Complex64 {
        (self.f + self.k * self.k) / self.g
    }
}

/// Normalized `√f_N`: each factor `−√(λ−μ^l)√(λ−μ^r)/μ^l` tends to 1 as `μ^l → ∞`.
fn sqrt_f(mu_r0: f64, bands: &[Band], l: Complex64) -> Complex64 {
    bands.iter().fold(sqrt_cut(l - mu_r0), |acc, b| {
        let (dl, dr) = b.offsets(l);
        acc * (-sqrt_cut(dl) * sqrt_cut(dr) / b.mu_l)
    })
}

/// `f_N(ξ_j)` with the band-`j` factor taken from the offsets directly.
fn f_at_xi(mu_r0: f64, bands: &[Band], j: usize) -> f64 {
    let bj = bands[j];
    let x = bj.xi();
    bands.iter().enumerate().fold(x - mu_r0, |acc, (i, b)| {
        let (dl, dr) = if i == j {
            (bj.xi_offset, bj.xi_offset - bj.width)
        } else {
            let d = (bj.mu_l - b.mu_l) + bj.xi_offset;
            (d, d - b.width)
        };
        acc * dl * dr / (b.mu_l * b.mu_l)
    })
}

pub fn zone_functions(zs: &ZoneSequenceData, n: usize, lambda: Complex64) -> ZoneFunctions {
    let bands = zs.bands(n);
    let g = bands
        .iter()
        .fold(Complex64::new(1.0, 0.0), |acc, b| acc * -(b.offsets(lambda).0 - b.xi_offset) / b.mu_l);
    let f = bands.iter().fold(lambda - zs.mu_r0, |acc, b| {
        let (dl, dr) = b.offsets(lambda);
        acc * dl * dr / (b.mu_l * b.mu_l)
    });
    // k_N = Σ ε_j √(−f(ξ_j)) G_j(λ)/G_j(ξ_j), G_j = Π_{i≠j} (ξ_i − ·)/μ^l_i
    let mut k = Complex64::new(0.0, 0.0);
    for (j, bj) in bands.iter().enumerate() {
        let amp = (-f_at_xi(zs.mu_r0, &bands, j)).max(0.0).sqrt();
        if amp == 0.0 {
            continue;
        }
        let mut ratio = Complex64::new(1.0, 0.0);
        for (i, bi) in bands.iter().enumerate() {
            if i != j {
                ratio *= -(bi.offsets(lambda).0 - bi.xi_offset) / ((bi.mu_l - bj.mu_l) + (bi.xi_offset - bj.xi_offset));
            }
        }
        k += f64::from(bj.eps) * amp * ratio;
    }
    ZoneFunctions {
        g,
        f,
        sqrt_f: sqrt_f(zs.mu_r0, &bands, lambda),
        k,
    }
}

/// `|hg − k² − f|/max(|f|, |k²|)`.
pub fn hgk_residual(zs: &ZoneSequenceData, n: usize, lambda: Complex64) -> f64 {
    let z = zone_functions(zs, n, lambda);
    let lhs = z.h() * z.g - z.k * z.k;
    (lhs - z.f).norm() / z.f.norm().max((z.k * z.k).norm()).max(1e-300)
}

fn m_at(zs: &ZoneSequenceData, n: usize, lambda: Complex64, side: Side) -> Result<Complex64> {
    let z = zone_functions(zs, n, lambda);
    let sg = side.sign();
    let den = z.k - sg * I * z.sqrt_f;
    if den.norm() == 0.0 {
        return Err(Error::Pole { lambda });
    }
    let m = sg * z.g / den;
    if !m.is_finite() {
        return Err(Error::Pole { lambda });
    }
    Ok(m)
}

/// `m±` at truncation `N` with the change to `2N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InfZoneValue {
    pub m: Complex64,
    pub delta_2n: f64,
}

/// Checks summability at `N` (tail tolerance `0.1`) and evaluates `m±` with its `N → 2N` change.
pub fn m_infzone_report(zs: &ZoneSequenceData, n: usize, lambda: Complex64, side: Side) -> Result<InfZoneValue> {
    zs.validate(2 * n)?;
    let rep = summability_report(zs, n, 0.1);
    if !rep.passed {
        return Err(Error::SummabilityFailed { tail: rep.tail });
    }
    let m = m_at(zs, n, lambda, side)?;
    let m2 = m_at(zs, 2 * n, lambda, side)?;
    if lambda.im != 0.0 && m.im * lambda.im < -1e-10 * m.norm() {
        return Err(Error::BranchAmbiguous { lambda });
    }
    Ok(InfZoneValue {
        m,
        delta_2n: (m - m2).norm(),
    })
}

pub fn m_infzone_truncated(zs: &ZoneSequenceData, n: usize, lambda: Complex64, side: Side) -> Result<Complex64> {
    Ok(m_infzone_report(zs, n, lambda, side)?.m)
}

/// `C₂ = k(0)/h(0)` and `C₃` with `M± = C₂ ± iC₃√(±λ) + …` when `μ^r₀ = 0`.
pub fn infzone_case_b_constants(zs: &ZoneSequenceData, n: usize) -> Result<(f64, f64)> {
    let z = zone_functions(zs, n, Complex64::new(0.0, 0.0));
    let h0 = (z.k * z.k / z.g).re;
    if h0.abs() < 1e-300 || z.k.norm() == 0.0 {
        return Err(Error::Pole {
            lambda: Complex64::new(0.0, 0.0),
        });
    }
    let root: f64 = zs.bands(n).iter().map(|b| (1.0 + b.width / b.mu_l).sqrt()).product();
    Ok((z.k.re / h0, root / h0))
}

/// `C₁ = Π ξ_j/√(μ^l_j μ^r_j)` for `M± ∼ ±iC₁/√(±λ)` when `k(0) = 0`.
pub fn infzone_case_a_constant(zs: &ZoneSequenceData, n: usize) -> f64 {
    zs.bands(n).iter().map(|b| b.xi() / (b.mu_l * b.mu_r()).sqrt()).product()
}
