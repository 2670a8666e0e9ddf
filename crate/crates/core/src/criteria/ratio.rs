use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::mcatalog::MEvaluator;
use crate::numerics::{geomspace, golden_section, least_squares_slope};

/// Points with `|M₊ − M₋|` below this fraction of `|M₊| + |M₋|` are excluded from scans.
pub const DENOMINATOR_TOL: f64 = 1e-12;

/// `|(M₊ + M₋ − C)/(M₊ − M₋)|`.
pub fn ratio_values(mp: Complex64, mm: Complex64, c: f64, lambda: Complex64) -> Result<f64> {
    let den = mp - mm;
    if den.norm() <= DENOMINATOR_TOL * (mp.norm() + mm.norm()) {
        return Err(Error::DenominatorVanishes { lambda });
    }
    Ok(((mp + mm - c) / den).norm())
}

/// `|Im(M₊ + M₋)|/|M₊ − M₋|`.
pub fn necessary_values(mp: Complex64, mm: Complex64, lambda: Complex64) -> Result<f64> {
    let den = mp - mm;
    if den.norm() <= DENOMINATOR_TOL * (mp.norm() + mm.norm()) {
        return Err(Error::DenominatorVanishes { lambda });
    }
    Ok((mp + mm).im.abs() / den.norm())
}

pub fn ratio(mp: &MEvaluator, mm: &MEvaluator, lambda: Complex64, c: f64) -> Result<f64> {
    if !(lambda.im > 0.0) {
        return Err(Error::Domain(format!("ratio needs Im lambda > 0, got {lambda}")));
    }
    ratio_values(mp.big_m(lambda)?, mm.big_m(lambda)?, c, lambda)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum RegionKind {
    NearZero { r: f64 },
    NearInfinity { r: f64 },
    FullUpperHalfPlane { rmin: f64, rmax: f64 },
}

/// Log-radial × uniform-angular grid in ℂ₊.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanRegion {
    pub kind: RegionKind,
    #[serde(default = "default_radial")]
    pub radial_points: usize,
    #[serde(default = "default_angular")]
    pub angular_points: usize,
    /// Radial extent below `R` (near 0) or above `R` (near ∞).
    #[serde(default = "default_decades")]
    pub decades: f64,
}

fn default_radial() -> usize {
    13
}
fn default_angular() -> usize {
    9
}
fn default_decades() -> f64 {
    3.0
}

impl ScanRegion {
    pub fn near_zero(r: f64) -> Self {
        Self {
            kind: RegionKind::NearZero { r },
            radial_points: default_radial(),
            angular_points: default_angular(),
            decades: default_decades(),
        }
    }

    pub fn near_infinity(r: f64) -> Self {
        Self {
            kind: RegionKind::NearInfinity { r },
            ..Self::near_zero(1.0)
        }
    }

    pub fn with_grid(mut self, radial: usize, angular: usize) -> Self {
        self.radial_points = radial;
        self.angular_points = angular;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match self.kind {
            RegionKind::NearZero { r } | RegionKind::NearInfinity { r } => r > 0.0 && r.is_finite(),
            RegionKind::FullUpperHalfPlane { rmin, rmax } => rmin > 0.0 && rmax > rmin && rmax.is_finite(),
        };
        if !ok {
            return Err(Error::Invalid("scan region radii must be positive and ordered".into()));
        }
        if self.radial_points < 2 || self.angular_points < 1 {
            return Err(Error::Invalid("scan grid needs at least 2 radii and 1 angle".into()));
        }
        if !(self.decades >= 2.0) {
            return Err(Error::Invalid("scan region must span at least two decades".into()));
        }
        Ok(())
    }

    pub fn radii(&self) -> Vec<f64> {
        match self.kind {
            RegionKind::NearZero { r } => geomspace(r * 10f64.powf(-self.decades), r, self.radial_points),
            RegionKind::NearInfinity { r } => geomspace(r, r * 10f64.powf(self.decades), self.radial_points),
            RegionKind::FullUpperHalfPlane { rmin, rmax } => geomspace(rmin, rmax, self.radial_points),
        }
    }

    pub fn angles(&self) -> Vec<f64> {
        let n = self.angular_points;
        (0..n).map(|j| PI * (j as f64 + 0.5) / n as f64).collect()
    }

    /// Row-major grid: radius outer, angle inner.
    pub fn points(&self) -> Vec<Complex64> {
        let angles = self.angles();
        self.radii()
            .into_iter()
            .flat_map(|r| angles.iter().map(move |&t| Complex64::from_polar(r, t)))
            .collect()
    }

    /// `+1` when growth means growth toward 0.
    fn orientation(&self) -> f64 {
        match self.kind {
            RegionKind::NearZero { .. } => -1.0,
            _ => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CriticalPointVerdict {
    BoundedRatio,
    GrowthDetected { p: f64 },
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanSample {
    pub lambda: Complex64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioScanResult {
    pub sup_value: f64,
    pub argmax_lambda: Complex64,
    pub shift_c: f64,
    /// Growth of the angular maximum toward the critical point, as a power of `|λ|`.
    pub growth_exponent: f64,
    pub fit_residual: f64,
    pub verdict: CriticalPointVerdict,
    pub samples: Vec<ScanSample>,
    /// Points dropped because `M₊ − M₋` (nearly) vanishes there.
    pub excluded: Vec<Complex64>,
}

/// `M₊`, `M₋` on a scan grid; `None` where the denominator vanishes.
#[derive(Debug, Clone)]
pub struct GridValues {
    pub region: ScanRegion,
    pub points: Vec<Complex64>,
    pub values: Vec<(Complex64, Complex64)>,
}

pub fn grid_values(mp: &MEvaluator, mm: &MEvaluator, region: &ScanRegion) -> Result<GridValues> {
    region.validate()?;
    let points = region.points();
    let values = points
        .par_iter()
        .map(|&l| Ok((mp.big_m(l)?, mm.big_m(l)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(GridValues {
        region: *region,
        points,
        values,
    })
}

pub fn verdict_for(p: f64, sup: f64) -> CriticalPointVerdict {
    if p < 0.05 && sup.is_finite() {
        CriticalPointVerdict::BoundedRatio
    } else if p >= 0.1 {
        CriticalPointVerdict::GrowthDetected { p }
    } else {
        CriticalPointVerdict::Inconclusive
    }
}

fn summarize<F>(g: &GridValues, c: f64, f: F) -> RatioScanResult
where
    F: Fn(Complex64, Complex64, Complex64) -> Result<f64>,
{
    let mut samples = Vec::with_capacity(g.points.len());
    let mut excluded = Vec::new();
    for (&l, &(a, b)) in g.points.iter().zip(&g.values) {
        match f(a, b, l) {
            Ok(r) => samples.push(ScanSample { lambda: l, ratio: r }),
            Err(_) => excluded.push(l),
        }
    }
    let (sup_value, argmax_lambda) = samples
        .iter()
        .fold((0.0, Complex64::new(0.0, 0.0)), |(m, at), s| if s.ratio > m { (s.ratio, s.lambda) } else { (m, at) });
    let mut pts = Vec::new();
    for r in g.region.radii() {
        let row = samples
            .iter()
            .filter(|s| (s.lambda.norm() / r - 1.0).abs() < 1e-9)
            .map(|s| s.ratio)
            .fold(0.0f64, f64::max);
        if row > 0.0 {
            pts.push((r.ln(), row.ln()));
        }
    }
    let (slope, _, rms) = if pts.len() >= 2 {
        least_squares_slope(&pts)
    } else {
        (f64::NAN, 0.0, f64::NAN)
    };
    let p = slope * g.region.orientation();
    let verdict = if p.is_nan() {
        CriticalPointVerdict::Inconclusive
    } else {
        verdict_for(p, sup_value)
    };
    RatioScanResult {
        sup_value,
        argmax_lambda,
        shift_c: c,
        growth_exponent: p,
        fit_residual: rms,
        verdict,
        samples,
        excluded,
    }
}

pub fn scan_grid(g: &GridValues, c: f64) -> RatioScanResult {
    summarize(g, c, |a, b, l| ratio_values(a, b, c, l))
}

pub fn scan_sup(mp: &MEvaluator, mm: &MEvaluator, region: &ScanRegion, c: f64) -> Result<RatioScanResult> {
    Ok(scan_grid(&grid_values(mp, mm, region)?, c))
}

pub fn necessary_grid(g: &GridValues) -> RatioScanResult {
    summarize(g, 0.0, necessary_values)
}

pub fn necessary_ratio_scan(mp: &MEvaluator, mm: &MEvaluator, region: &ScanRegion) -> Result<RatioScanResult> {
    Ok(necessary_grid(&grid_values(mp, mm, region)?))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftResult {
    pub c_best: f64,
    /// The sup barely moves with `C`; `C = 0` is returned.
    pub flat: bool,
    pub result: RatioScanResult,
}

fn sup_at(g: &GridValues, c: f64) -> f64 {
    g.points
        .iter()
        .zip(&g.values)
        .filter_map(|(&l, &(a, b))| ratio_values(a, b, c, l).ok())
        .fold(0.0, f64::max)
}

/// Minimizes the grid sup over `C`, seeded with `seed` when given.
pub fn optimize_shift_grid(g: &GridValues, seed: Option<f64>) -> Result<ShiftResult> {
    let scale = g
        .values
        .iter()
        .map(|(a, b)| (a + b).re.abs())
        .fold(0.0f64, f64::max)
        .max(seed.map_or(0.0, f64::abs))
        .max(1e-12);
    let c_max = 2.0 * scale;
    let n = 200;
    let mut cands: Vec<f64> = (0..=n).map(|k| -c_max + 2.0 * c_max * k as f64 / n as f64).collect();
    cands.push(0.0);
    cands.extend(seed);
    let vals: Vec<f64> = cands.par_iter().map(|&c| sup_at(g, c)).collect();
    let (lo_v, hi_v) = vals.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
    if hi_v - lo_v <= 1e-6 * lo_v.max(1e-300) {
        return Ok(ShiftResult {
            c_best: 0.0,
            flat: true,
            result: scan_grid(g, 0.0),
        });
    }
    let best = (0..cands.len()).min_by(|&i, &j| vals[i].total_cmp(&vals[j])).expect("nonempty");
    let h = 2.0 * c_max / n as f64;
    let (c_ref, v_ref) = golden_section(|c| Ok(sup_at(g, c)), cands[best] - h, cands[best] + h, 1e-10 * scale)?;
    let c_best = if v_ref <= vals[best] { c_ref } else { cands[best] };
    Ok(ShiftResult {
        c_best,
        flat: false,
        result: scan_grid(g, c_best),
    })
}

pub fn optimize_shift(mp: &MEvaluator, mm: &MEvaluator, region: &ScanRegion, seed: Option<f64>) -> Result<ShiftResult> {
    optimize_shift_grid(&grid_values(mp, mm, region)?, seed)
}
