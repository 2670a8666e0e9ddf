use serde::{Deserialize, Serialize};

use super::coeff::CoefficientFn;
use super::integrator::StepControl;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Plus,
    Minus,
}

impl Side {
    pub fn sign(self) -> f64 {
        match self {
            Side::Plus => 1.0,
            Side::Minus => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    Neumann,
    Dirichlet,
}

/// Truncation radius: fixed, or chosen per λ from the local decay rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Truncation {
    Fixed(f64),
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OdeSettings {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    /// Recompute at `2X` and compare.
    pub verify_doubling: bool,
}

impl Default for OdeSettings {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-13,
            max_steps: 5_000_000,
            verify_doubling: true,
        }
    }
}

impl OdeSettings {
    pub fn control(&self) -> StepControl {
        StepControl {
            rtol: self.rtol,
            atol: self.atol,
            max_steps: self.max_steps,
        }
    }
}

/// The spectral equation `−y″ + q y = λ |r| y` on one half-line, in full-line coordinates.
#[derive(Debug, Clone)]
pub struct HalfLineProblem {
    pub side: Side,
    pub q: CoefficientFn,
    pub weight_abs: CoefficientFn,
    pub truncation: Truncation,
    pub boundary: Boundary,
    pub settings: OdeSettings,
}

impl HalfLineProblem {
    pub fn new(side: Side, q: CoefficientFn, weight_abs: CoefficientFn) -> Self {
        Self {
            side,
            q,
            weight_abs,
            truncation: Truncation::Auto,
            boundary: Boundary::Neumann,
            settings: OdeSettings::default(),
        }
    }

    pub fn with_truncation(mut self, x: f64) -> Self {
        self.truncation = Truncation::Fixed(x);
        self
    }

    pub fn with_settings(mut self, s: OdeSettings) -> Self {
        self.settings = s;
        self
    }

    pub fn with_boundary(mut self, b: Boundary) -> Self {
        self.boundary = b;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if let Truncation::Fixed(x) = self.truncation {
            if !(x > 0.0 && x.is_finite()) {
                return Err(Error::Invalid(format!("truncation radius must be positive, got {x}")));
            }
        }
        let s = &self.settings;
        if !(s.rtol > 0.0 && s.atol > 0.0) {
            return Err(Error::Invalid("tolerances must be positive".into()));
        }
        let probe = match self.truncation {
            Truncation::Fixed(x) => x,
            Truncation::Auto => 40.0,
        };
        let w = self.oriented_weight();
        if w.sampled_min(1e-9, probe, 2000) <= 0.0 {
            return Err(Error::Invalid("weight |r| must be positive on the half-line".into()));
        }
        Ok(())
    }

    /// Potential in the outward coordinate `t = ±x ≥ 0`.
    pub fn oriented_q(&self) -> CoefficientFn {
        match self.side {
            Side::Plus => self.q.clone(),
            Side::Minus => self.q.reflected(),
        }
    }

    /// Weight in the outward coordinate.
    pub fn oriented_weight(&self) -> CoefficientFn {
        match self.side {
            Side::Plus => self.weight_abs.clone(),
            Side::Minus => self.weight_abs.reflected(),
        }
    }

    /// Limit-point proxy: `∫_1^X x² |r| dx` grows with X (so `x ∉ L²` on the window).
    pub fn limit_point_proxy(&self, x: f64) -> bool {
        let w = self.oriented_weight();
        let mass = |b: f64| -> f64 {
            let n = 400;
            let h = (b - 1.0) / n as f64;
            (0..n)
                .map(|k| {
                    let t = 1.0 + (k as f64 + 0.5) * h;
                    t * t * w.eval(t) * h
                })
                .sum()
        };
        x > 1.0 && mass(2.0 * x) > 1.5 * mass(x)
    }
}

/// Both half-lines; the turning point sits at 0.
#[derive(Debug, Clone)]
pub struct FullLineProblem {
    pub plus: HalfLineProblem,
    pub minus: HalfLineProblem,
}

impl FullLineProblem {
    /// Builds both halves from full-line coefficients `q`, `|r|`.
    pub fn new(q: CoefficientFn, weight_abs: CoefficientFn) -> Self {
        Self {
            plus: HalfLineProblem::new(Side::Plus, q.clone(), weight_abs.clone()),
            minus: HalfLineProblem::new(Side::Minus, q, weight_abs),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.plus.side != Side::Plus || self.minus.side != Side::Minus {
            return Err(Error::Invalid("full-line problem needs plus and minus halves".into()));
        }
        self.plus.validate()?;
        self.minus.validate()
    }

    pub fn q_at(&self, x: f64) -> f64 {
        if x >= 0.0 {
            self.plus.q.eval(x)
        } else {
            self.minus.q.eval(x)
        }
    }

    pub fn weight_at(&self, x: f64) -> f64 {
        if x >= 0.0 {
            self.plus.weight_abs.eval(x)
        } else {
            self.minus.weight_abs.eval(x)
        }
    }
}

/// How one integration segment is parametrized.
#[derive(Debug, Clone, Copy)]
pub(crate) enum SegmentMap {
    /// Coefficients are sampled strictly inside `(lo, hi)` so jumps resolve to this segment.
    Identity { lo: f64, hi: f64 },
    /// `x = t^k` with `|r| = coef·x^α`, `k = 1/(1+α)`, so `|r|·dx/dt = coef·k`.
    Power { k: f64, coef: f64, hi: f64 },
}

fn inside(x: f64, lo: f64, hi: f64) -> f64 {
    let d = 1e-12 * (1.0 + x.abs());
    if hi - lo > 4.0 * d {
        x.clamp(lo + d, hi - d)
    } else {
        0.5 * (lo + hi)
    }
}

/// Coefficients in the outward coordinate, split into smooth segments.
#[derive(Debug, Clone)]
pub(crate) struct Oriented {
    pub q: CoefficientFn,
    pub w: CoefficientFn,
    zero_power: Option<(f64, f64)>,
}

/// Coefficient values at a parameter point: `(x, dx/dt, q·dx/dt, |r|·dx/dt)`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Local {
    pub x: f64,
    pub jac: f64,
    pub qj: f64,
    pub wj: f64,
}

impl Oriented {
    pub fn new(p: &HalfLineProblem) -> Self {
        let q = p.oriented_q();
        let w = p.oriented_weight();
        let zero_power = w.power_near_zero().filter(|&(_, a)| a < 0.0 && a > -1.0);
        Self { q, w, zero_power }
    }

    /// Segment end points from 0 to `x_end`, including all breakpoints.
    pub fn nodes(&self, x_end: f64) -> Vec<f64> {
        let mut v = vec![0.0];
        let mut inner: Vec<f64> = self
            .q
            .breakpoints(0.0, x_end)
            .into_iter()
            .chain(self.w.breakpoints(0.0, x_end))
            .collect();
        if self.zero_power.is_some() {
            inner.push(x_end.min(1.0));
        }
        inner.sort_by(f64::total_cmp);
        inner.dedup_by(|a, b| (*a - *b).abs() <= 1e-13 * (1.0 + a.abs()));
        v.extend(inner.into_iter().filter(|&x| x > 0.0 && x < x_end));
        v.push(x_end);
        v
    }

    /// Parametrization of the segment `[a, b]` and its parameter range.
    pub fn map(&self, a: f64, b: f64) -> (SegmentMap, f64, f64) {
        match self.zero_power {
            Some((coef, alpha)) if a == 0.0 => {
                let k = 1.0 / (1.0 + alpha);
                (SegmentMap::Power { k, coef, hi: b }, 0.0, b.powf(1.0 + alpha))
            }
            _ => (SegmentMap::Identity { lo: a, hi: b }, a, b),
        }
    }

    pub fn local(&self, map: SegmentMap, t: f64) -> Local {
        match map {
            SegmentMap::Identity { lo, hi } => {
                let xe = inside(t, lo, hi);
                Local {
                    x: t,
                    jac: 1.0,
                    qj: self.q.eval(xe),
                    wj: self.w.eval(xe),
                }
            }
            SegmentMap::Power { k, coef, hi } => {
                let x = t.powf(k);
                let jac = k * t.powf(k - 1.0);
                Local {
                    x,
                    jac,
                    qj: self.q.eval(inside(x, 0.0, hi)) * jac,
                    wj: coef * k,
                }
            }
        }
    }

    /// Parameter value of `x` under `map`.
    pub fn param(&self, map: SegmentMap, x: f64) -> f64 {
        match map {
            SegmentMap::Identity { .. } => x,
            SegmentMap::Power { k, .. } => x.powf(1.0 / k),
        }
    }
}
