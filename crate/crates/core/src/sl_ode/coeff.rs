use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A named built-in term; `Power` and `Rational` depend on `|x|` so they mirror to the negative axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Term {
    Constant { value: f64 },
    /// `Σ coeffs[k]·x^k`
    Polynomial { coeffs: Vec<f64> },
    /// `coef·|x|^exponent`
    Power { coef: f64, exponent: f64 },
    /// `amplitude·cos(frequency·x + phase)`
    Cosine {
        amplitude: f64,
        frequency: f64,
        #[serde(default)]
        phase: f64,
    },
    /// `value` on `[from, to)`, zero elsewhere
    Characteristic { from: f64, to: f64, value: f64 },
    /// `coef·(|x| + shift)^(−power)`
    Rational { coef: f64, shift: f64, power: f64 },
}

impl Term {
    fn eval(&self, x: f64) -> f64 {
        match *self {
            Term::Constant { value } => value,
            Term::Polynomial { ref coeffs } => coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c),
            Term::Power { coef, exponent } => coef * x.abs().powf(exponent),
            Term::Cosine {
                amplitude,
                frequency,
                phase,
            } => amplitude * (frequency * x + phase).cos(),
            Term::Characteristic { from, to, value } => {
                if x >= from && x < to {
                    value
                } else {
                    0.0
                }
            }
            Term::Rational { coef, shift, power } => coef * (x.abs() + shift).powf(-power),
        }
    }

    fn breaks(&self, out: &mut Vec<f64>) {
        match *self {
            Term::Characteristic { from, to, .. } => {
                out.push(from);
                out.push(to);
            }
            Term::Power { .. } | Term::Rational { .. } => out.push(0.0),
            _ => {}
        }
    }

    fn is_constant(&self) -> bool {
        matches!(self, Term::Constant { .. } | Term::Characteristic { .. })
    }
}

/// One piece of a piecewise descriptor: the sum of `terms` on `[from, to)`; `None` bounds are infinite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Segment {
    #[serde(default)]
    pub from: Option<f64>,
    #[serde(default)]
    pub to: Option<f64>,
    pub terms: Vec<Term>,
}

impl Segment {
    fn contains(&self, x: f64) -> bool {
        self.from.map_or(true, |a| x >= a) && self.to.map_or(true, |b| x < b)
    }
}

/// Serializable form of a coefficient: segments plus an optional period.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientSpec {
    pub segments: Vec<Segment>,
    #[serde(default)]
    pub period: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CoefficientKind {
    PiecewiseConstant,
    PiecewisePolynomial,
    PowerTimesSmooth,
    Callable,
}

type Callable = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Repr {
    Piecewise(Vec<Segment>),
    Callable { f: Callable, breaks: Vec<f64> },
}

/// A locally integrable coefficient on ℝ (potential or weight).
///
/// Values outside every segment are zero. With a period `T` the segments describe `[0, T)`.
#[derive(Clone)]
pub struct CoefficientFn {
    repr: Repr,
    period: Option<f64>,
    shift: f64,
    reflect: bool,
}

impl fmt::Debug for CoefficientFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Piecewise(s) => f
                .debug_struct("CoefficientFn")
                .field("segments", s)
                .field("period", &self.period)
                .field("shift", &self.shift)
                .field("reflect", &self.reflect)
                .finish(),
            Repr::Callable { breaks, .. } => f
                .debug_struct("CoefficientFn")
                .field("callable_breaks", breaks)
                .finish(),
        }
    }
}

impl CoefficientFn {
    pub fn from_spec(spec: &CoefficientSpec) -> Result<Self> {
        if let Some(t) = spec.period {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::Invalid(format!("period must be positive, got {t}")));
            }
        }
        for s in &spec.segments {
            if let (Some(a), Some(b)) = (s.from, s.to) {
                if !(a < b) {
                    return Err(Error::Invalid(format!("empty segment [{a}, {b})")));
                }
            }
            for t in &s.terms {
                if let Term::Power { exponent, .. } = t {
                    if *exponent <= -1.0 {
                        return Err(Error::Invalid(format!(
                            "power exponent {exponent} is not locally integrable"
                        )));
                    }
                }
            }
        }
        Ok(Self {
            repr: Repr::Piecewise(spec.segments.clone()),
            period: spec.period,
            shift: 0.0,
            reflect: false,
        })
    }

    /// The serializable description, when the coefficient is not a closure.
    pub fn to_spec(&self) -> Option<CoefficientSpec> {
        match &self.repr {
            Repr::Piecewise(s) if !self.reflect && self.shift == 0.0 => Some(CoefficientSpec {
                segments: s.clone(),
                period: self.period,
            }),
            _ => None,
        }
    }

    fn whole_line(terms: Vec<Term>) -> Self {
        Self {
            repr: Repr::Piecewise(vec![Segment {
                from: None,
                to: None,
                terms,
            }]),
            period: None,
            shift: 0.0,
            reflect: false,
        }
    }

    pub fn constant(value: f64) -> Self {
        Self::whole_line(vec![Term::Constant { value }])
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn one() -> Self {
        Self::constant(1.0)
    }

    /// `coef·|x|^exponent` on the whole line.
    pub fn power(coef: f64, exponent: f64) -> Self {
        Self::whole_line(vec![Term::Power { coef, exponent }])
    }

    /// `value·χ_[from, to)`.
    pub fn characteristic(from: f64, to: f64, value: f64) -> Self {
        Self::whole_line(vec![Term::Characteristic { from, to, value }])
    }

    pub fn terms(terms: Vec<Term>) -> Self {
        Self::whole_line(terms)
    }

    pub fn piecewise(segments: Vec<Segment>) -> Self {
        Self {
            repr: Repr::Piecewise(segments),
            period: None,
            shift: 0.0,
            reflect: false,
        }
    }

    /// Periodic extension of `terms` with period `t`.
    pub fn periodic(terms: Vec<Term>, period: f64) -> Self {
        Self {
            repr: Repr::Piecewise(vec![Segment {
                from: Some(0.0),
                to: Some(period),
                terms,
            }]),
            period: Some(period),
            shift: 0.0,
            reflect: false,
        }
    }

    /// An arbitrary closure; `breaks` lists points where it is not smooth.
    pub fn callable<F: Fn(f64) -> f64 + Send + Sync + 'static>(f: F, breaks: Vec<f64>) -> Self {
        Self {
            repr: Repr::Callable {
                f: Arc::new(f),
                breaks,
            },
            period: None,
            shift: 0.0,
            reflect: false,
        }
    }

    pub fn with_period(mut self, period: f64) -> Self {
        self.period = Some(period);
        self
    }

    pub fn period(&self) -> Option<f64> {
        self.period
    }

    /// `self + c`.
    pub fn shifted(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.shift += c;
        out
    }

    /// `x ↦ self(−x)`.
    pub fn reflected(&self) -> Self {
        let mut out = self.clone();
        out.reflect = !out.reflect;
        out
    }

    pub fn kind(&self) -> CoefficientKind {
        match &self.repr {
            Repr::Callable { .. } => CoefficientKind::Callable,
            Repr::Piecewise(segs) => {
                let terms = segs.iter().flat_map(|s| s.terms.iter());
                let mut all_const = true;
                for t in terms {
                    if matches!(t, Term::Power { .. }) {
                        return CoefficientKind::PowerTimesSmooth;
                    }
                    all_const &= t.is_constant();
                }
                if all_const {
                    CoefficientKind::PiecewiseConstant
                } else {
                    CoefficientKind::PiecewisePolynomial
                }
            }
        }
    }

    fn base_eval(&self, x: f64) -> f64 {
        let x = match self.period {
            Some(t) => x.rem_euclid(t),
            None => x,
        };
        match &self.repr {
            Repr::Callable { f, .. } => f(x),
            Repr::Piecewise(segs) => segs
                .iter()
                .find(|s| s.contains(x))
                .map_or(0.0, |s| s.terms.iter().map(|t| t.eval(x)).sum()),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let x = if self.reflect { -x } else { x };
        self.base_eval(x) + self.shift
    }

    fn base_breaks(&self) -> Vec<f64> {
        let mut out = Vec::new();
        match &self.repr {
            Repr::Callable { breaks, .. } => out.extend(breaks),
            Repr::Piecewise(segs) => {
                for s in segs {
                    out.extend(s.from);
                    out.extend(s.to);
                    for t in &s.terms {
                        t.breaks(&mut out);
                    }
                }
            }
        }
        out
    }

    /// Sorted non-smooth points strictly inside `(a, b)`.
    pub fn breakpoints(&self, a: f64, b: f64) -> Vec<f64> {
        let mut raw = self.base_breaks();
        if let Some(t) = self.period {
            let base: Vec<f64> = raw.iter().map(|x| x.rem_euclid(t)).collect();
            raw.clear();
            let (lo, hi) = if self.reflect { (-b, -a) } else { (a, b) };
            let k0 = (lo / t).floor() as i64 - 1;
            let k1 = (hi / t).ceil() as i64 + 1;
            if k1 - k0 < 1_000_000 {
                for k in k0..=k1 {
                    raw.extend(base.iter().map(|x| x + k as f64 * t));
                }
            }
        }
        let mut out: Vec<f64> = raw
            .into_iter()
            .map(|x| if self.reflect { -x } else { x })
            .filter(|&x| x > a && x < b)
            .collect();
        out.sort_by(f64::total_cmp);
        out.dedup_by(|x, y| (*x - *y).abs() <= 1e-14 * (1.0 + x.abs()));
        out
    }

    fn segment_at(&self, x: f64) -> Option<&Segment> {
        let x = if self.reflect { -x } else { x };
        match &self.repr {
            Repr::Piecewise(segs) if self.period.is_none() => segs.iter().find(|s| s.contains(x)),
            _ => None,
        }
    }

    fn single_power(&self, x: f64) -> Option<(f64, f64)> {
        if self.shift != 0.0 {
            return None;
        }
        match self.segment_at(x)?.terms.as_slice() {
            [Term::Power { coef, exponent }] => Some((*coef, *exponent)),
            _ => None,
        }
    }

    /// `(coef, exponent)` when the coefficient is `coef·|x|^exponent` just right of 0.
    pub fn power_near_zero(&self) -> Option<(f64, f64)> {
        self.single_power(1e-300)
    }

    /// `(coef, exponent)` when the coefficient is `coef·|x|^exponent` for all large x.
    pub fn power_at_infinity(&self) -> Option<(f64, f64)> {
        let seg = self.segment_at(1e300)?;
        let unbounded = if self.reflect { seg.from.is_none() } else { seg.to.is_none() };
        if !unbounded {
            return None;
        }
        self.single_power(1e300)
    }

    /// Sampled minimum on `[a, b]` (used for positivity checks and scan floors).
    pub fn sampled_min(&self, a: f64, b: f64, n: usize) -> f64 {
        let mut pts: Vec<f64> = (0..=n).map(|k| a + (b - a) * k as f64 / n as f64).collect();
        for x in self.breakpoints(a, b) {
            pts.push(x);
            pts.push(x - 1e-12 * (1.0 + x.abs()));
        }
        pts.into_iter().map(|x| self.eval(x)).fold(f64::INFINITY, f64::min)
    }

    /// True when the coefficient vanishes identically beyond `x` (segment-level check).
    pub fn vanishes_beyond(&self, x: f64) -> bool {
        if self.period.is_some() || self.shift != 0.0 {
            return false;
        }
        let Repr::Piecewise(segs) = &self.repr else {
            return false;
        };
        let oriented = |a: Option<f64>, b: Option<f64>| -> (f64, f64) {
            let a = a.unwrap_or(f64::NEG_INFINITY);
            let b = b.unwrap_or(f64::INFINITY);
            if self.reflect {
                (-b, -a)
            } else {
                (a, b)
            }
        };
        segs.iter().all(|s| {
            let (_, hi) = oriented(s.from, s.to);
            if hi <= x {
                return true;
            }
            s.terms.iter().all(|t| match *t {
                Term::Constant { value } => value == 0.0,
                Term::Characteristic { from, to, value } => {
                    value == 0.0 || oriented(Some(from), Some(to)).1 <= x
                }
                _ => false,
            })
        })
    }
}
