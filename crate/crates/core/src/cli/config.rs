use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::criteria::{ClassifyOptions, Rect, ScanRegion};
use crate::discrete::{FunctionalOptions, MatrixOperator};
use crate::error::{Error, Result};
use crate::mcatalog::{
    a1_potential, finitezone_build, lowest_band_edge, power_constants, q0_potential, MEvaluator, MKind, PeriodicData,
    ZoneData, ZoneSequenceData,
};
use crate::sl_ode::{CoefficientFn, CoefficientSpec, FullLineProblem, OdeSettings, Side, Truncation};

/// How m-coefficients of a coefficient problem are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    #[default]
    Numeric,
    /// Integral representation for decaying `q`, `|r| = 1`.
    DecayingAb,
}

/// The operator, either by coefficients or as a catalogued pair of m-coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProblemSpec {
    Coefficients {
        q: CoefficientSpec,
        /// `|r|`; defaults to 1.
        #[serde(default)]
        weight: Option<CoefficientSpec>,
        /// Fixed truncation radius; automatic when absent.
        #[serde(default)]
        truncation: Option<f64>,
        #[serde(default)]
        ode: Option<OdeSettings>,
        #[serde(default)]
        method: Method,
    },
    Free,
    PowerWeight {
        alpha: f64,
    },
    ExampleQ0,
    ExampleA1,
    Periodic {
        q: CoefficientSpec,
        period: f64,
        /// Constant subtracted from `q`.
        #[serde(default)]
        shift: f64,
        /// Subtract the lowest band edge as well.
        #[serde(default)]
        shift_to_band_edge: bool,
    },
    FiniteZone {
        zone: ZoneData,
    },
    InfiniteZone {
        data: ZoneSequenceData,
        bands: usize,
    },
}

impl ProblemSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            ProblemSpec::Coefficients {
                q,
                weight,
                truncation,
                ode,
                ..
            } => {
                CoefficientFn::from_spec(q)?;
                if let Some(w) = weight {
                    CoefficientFn::from_spec(w)?;
                }
                if let Some(x) = truncation {
                    positive("truncation", *x)?;
                }
                if let Some(o) = ode {
                    positive("ode.rtol", o.rtol)?;
                    positive("ode.atol", o.atol)?;
                }
                self.full_line().map(|p| p.expect("coefficient problem"))?.validate()
            }
            ProblemSpec::PowerWeight { alpha } => power_constants(*alpha).map(|_| ()),
            ProblemSpec::Periodic { q, period, .. } => {
                CoefficientFn::from_spec(q)?;
                positive("period", *period)
            }
            ProblemSpec::FiniteZone { zone } => zone.validate(),
            ProblemSpec::InfiniteZone { data, bands } => data.validate(*bands),
            ProblemSpec::Free | ProblemSpec::ExampleQ0 | ProblemSpec::ExampleA1 => Ok(()),
        }
    }

    /// Full-line coefficients when the problem has them.
    pub fn full_line(&self) -> Result<Option<FullLineProblem>> {
        let one = CoefficientFn::one;
        let p = match self {
            ProblemSpec::Coefficients {
                q,
                weight,
                truncation,
                ode,
                ..
            } => {
                let w = match weight {
                    Some(w) => CoefficientFn::from_spec(w)?,
                    None => one(),
                };
                let mut p = FullLineProblem::new(CoefficientFn::from_spec(q)?, w);
                for h in [&mut p.plus, &mut p.minus] {
                    if let Some(x) = truncation {
                        h.truncation = Truncation::Fixed(*x);
                    }
                    if let Some(o) = ode {
                        h.settings = *o;
                    }
                }
                p
            }
            ProblemSpec::Free => FullLineProblem::new(CoefficientFn::zero(), one()),
            ProblemSpec::PowerWeight { alpha } => FullLineProblem::new(CoefficientFn::zero(), CoefficientFn::power(1.0, *alpha)),
            ProblemSpec::ExampleQ0 => FullLineProblem::new(q0_potential(), one()),
            ProblemSpec::ExampleA1 => FullLineProblem::new(a1_potential(), one()),
            ProblemSpec::Periodic { .. } => {
                let d = self.periodic_data()?.expect("periodic");
                FullLineProblem::new(d.q, one())
            }
            ProblemSpec::FiniteZone { .. } | ProblemSpec::InfiniteZone { .. } => return Ok(None),
        };
        Ok(Some(p))
    }

    fn periodic_data(&self) -> Result<Option<PeriodicData>> {
        let ProblemSpec::Periodic {
            q,
            period,
            shift,
            shift_to_band_edge,
        } = self
        else {
            return Ok(None);
        };
        let mut d = PeriodicData::new(CoefficientFn::from_spec(q)?, *period)?.shifted(-shift);
        if *shift_to_band_edge {
            let l0 = lowest_band_edge(&d)?;
            d = d.shifted(-l0);
        }
        Ok(Some(d))
    }

    /// `(m₊, m₋)` evaluators.
    pub fn evaluators(&self) -> Result<(MEvaluator, MEvaluator)> {
        let pair = |k: MKind| -> Result<(MEvaluator, MEvaluator)> {
            Ok((MEvaluator::new(k.clone(), Side::Plus)?, MEvaluator::new(k, Side::Minus)?))
        };
        match self {
            ProblemSpec::Coefficients { method, .. } => {
                let p = self.full_line()?.expect("coefficient problem");
                let (kp, km) = match method {
                    Method::Numeric => (MKind::Numeric(p.plus), MKind::Numeric(p.minus)),
                    Method::DecayingAb => (MKind::DecayingAB(p.plus), MKind::DecayingAB(p.minus)),
                };
                Ok((MEvaluator::new(kp, Side::Plus)?, MEvaluator::new(km, Side::Minus)?))
            }
            ProblemSpec::Free => pair(MKind::Free),
            ProblemSpec::PowerWeight { alpha } => pair(MKind::PowerWeight(*alpha)),
            ProblemSpec::ExampleQ0 => pair(MKind::ExampleQ0),
            ProblemSpec::ExampleA1 => pair(MKind::ExampleA1),
            ProblemSpec::Periodic { .. } => pair(MKind::Periodic(self.periodic_data()?.expect("periodic"))),
            ProblemSpec::FiniteZone { zone } => pair(MKind::FiniteZone(finitezone_build(zone)?)),
            ProblemSpec::InfiniteZone { data, bands } => pair(MKind::InfiniteZoneTruncated(*data, *bands)),
        }
    }

    /// SHA-256 of the canonical JSON form, hex encoded.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("problem serializes");
        Sha256::digest(json).iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn truncation(&self) -> serde_json::Value {
        match self {
            ProblemSpec::Coefficients {
                truncation: Some(x), ..
            } => serde_json::json!({ "mode": "fixed", "radius": x }),
            ProblemSpec::Coefficients { .. } => serde_json::json!({ "mode": "auto" }),
            ProblemSpec::Periodic { period, .. } => serde_json::json!({ "mode": "one_period", "radius": period }),
            ProblemSpec::InfiniteZone { bands, .. } => serde_json::json!({ "mode": "bands", "bands": bands }),
            _ => serde_json::json!({ "mode": "closed_form" }),
        }
    }
}

pub(crate) fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Invalid(format!("{name} must be positive, got {v}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MEvalParams {
    /// `[re, im]` pairs.
    #[serde(default = "default_lambdas")]
    pub lambdas: Vec<[f64; 2]>,
}

fn default_lambdas() -> Vec<[f64; 2]> {
    vec![[0.0, 1.0]]
}

impl Default for MEvalParams {
    fn default() -> Self {
        Self {
            lambdas: default_lambdas(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanParams {
    #[serde(default = "default_region")]
    pub region: ScanRegion,
    /// Fixed `C`; optimized when absent.
    #[serde(default)]
    pub shift: Option<f64>,
    #[serde(default)]
    pub shift_seed: Option<f64>,
    /// Scan `(M₊+M₋)/(M₊−M₋)` without a shift instead.
    #[serde(default)]
    pub necessary: bool,
}

fn default_region() -> ScanRegion {
    ScanRegion::near_zero(0.1)
}

impl Default for ScanParams {
    fn default() -> Self {
        Self {
            region: default_region(),
            shift: None,
            shift_seed: None,
            necessary: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EigsParams {
    pub rect: Rect,
    #[serde(default = "one")]
    pub d: f64,
    #[serde(default)]
    pub c: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiscreteParams {
    #[serde(default = "default_half_width")]
    pub half_width: f64,
    #[serde(default = "default_n")]
    pub n: usize,
    /// Compute the eigenvector condition number.
    #[serde(default)]
    pub condition: bool,
}

fn default_half_width() -> f64 {
    40.0
}
fn default_n() -> usize {
    2000
}

impl Default for DiscreteParams {
    fn default() -> Self {
        Self {
            half_width: default_half_width(),
            n: default_n(),
            condition: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionalParams {
    #[serde(default = "default_eps")]
    pub eps: Vec<f64>,
    /// Random test vectors when `vector` is absent.
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub vector: Option<Vec<f64>>,
    /// Explicit matrix instead of a discretized problem.
    #[serde(default)]
    pub matrix: Option<MatrixOperator>,
    #[serde(default)]
    pub options: FunctionalOptions,
}

fn default_eps() -> Vec<f64> {
    vec![0.1, 0.01, 0.001]
}
fn default_trials() -> usize {
    20
}

impl Default for FunctionalParams {
    fn default() -> Self {
        Self {
            eps: default_eps(),
            trials: default_trials(),
            vector: None,
            matrix: None,
            options: FunctionalOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum CommandName {
    MEval,
    CriterionScan,
    Classify,
    ZoneBuild,
    EigsFind,
    DiscreteSpectrum,
    DiscreteFunctional,
}

impl CommandName {
    pub fn as_str(self) -> &'static str {
        match self {
            CommandName::MEval => "m-eval",
            CommandName::CriterionScan => "criterion-scan",
            CommandName::Classify => "classify",
            CommandName::ZoneBuild => "zone-build",
            CommandName::EigsFind => "eigs-find",
            CommandName::DiscreteSpectrum => "discrete-spectrum",
            CommandName::DiscreteFunctional => "discrete-functional",
        }
    }
}

/// One run. Blocks not used by the command are ignored but still validated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Must match the subcommand when given.
    #[serde(default)]
    pub command: Option<CommandName>,
    #[serde(default)]
    pub problem: Option<ProblemSpec>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub m_eval: MEvalParams,
    #[serde(default)]
    pub scan: ScanParams,
    #[serde(default)]
    pub classify: ClassifyOptions,
    #[serde(default)]
    pub eigs: Option<EigsParams>,
    #[serde(default)]
    pub discrete: DiscreteParams,
    #[serde(default)]
    pub functional: FunctionalParams,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Invalid(format!("config: {e}")))
    }

    pub fn validate(&self, cmd: CommandName) -> Result<()> {
        if let Some(c) = self.command {
            if c != cmd {
                return Err(Error::Invalid(format!(
                    "config is for `{}` but `{}` was requested",
                    c.as_str(),
                    cmd.as_str()
                )));
            }
        }
        if let Some(p) = &self.problem {
            p.validate()?;
        }
        for l in &self.m_eval.lambdas {
            if !(l[0].is_finite() && l[1].is_finite()) {
                return Err(Error::Invalid("lambdas must be finite".into()));
            }
        }
        self.scan.region.validate()?;
        self.classify.near_zero.validate()?;
        self.classify.near_infinity.validate()?;
        if let Some(r) = self.classify.rect {
            r.validate()?;
        }
        if let Some(e) = &self.eigs {
            e.rect.validate()?;
        }
        positive("discrete.half_width", self.discrete.half_width)?;
        if self.discrete.n < 16 {
            return Err(Error::Invalid(format!("discrete.n must be at least 16, got {}", self.discrete.n)));
        }
        let f = &self.functional;
        if f.eps.is_empty() {
            return Err(Error::Invalid("functional.eps must not be empty".into()));
        }
        for &e in &f.eps {
            positive("functional.eps", e)?;
        }
        positive("functional.options.rel_tol", f.options.rel_tol)?;
        if f.vector.is_none() && f.trials == 0 {
            return Err(Error::Invalid("functional.trials must be positive".into()));
        }
        if let Some(m) = &f.matrix {
            m.validate()?;
            if let Some(v) = &f.vector {
                if v.len() != m.n() {
                    return Err(Error::Invalid("functional.vector length does not match the matrix".into()));
                }
            }
        }
        let needs_problem = match cmd {
            CommandName::DiscreteFunctional => f.matrix.is_none(),
            CommandName::ZoneBuild => {
                if !matches!(self.problem, Some(ProblemSpec::FiniteZone { .. })) {
                    return Err(Error::Invalid("zone-build needs a finite_zone problem".into()));
                }
                true
            }
            CommandName::EigsFind => {
                if self.eigs.is_none() {
                    return Err(Error::Invalid("eigs-find needs an `eigs` block with a rectangle".into()));
                }
                true
            }
            _ => true,
        };
        if needs_problem && self.problem.is_none() {
            return Err(Error::Invalid(format!("`{}` needs a `problem` block", cmd.as_str())));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_rejected() {
        assert!(RunConfig::parse(r#"{"problem": {"type": "free"}, "bogus": 1}"#).is_err());
        assert!(RunConfig::parse(r#"{"problem": {"type": "power_weight", "alpha": 1, "beta": 2}}"#).is_err());
        assert!(RunConfig::parse(r#"{"scan": {"region": {"kind": {"near_zero": {"r": 0.1}}, "extra": 1}}}"#).is_err());
        assert!(RunConfig::parse(r#"{"problem": {"type": "free"}}"#).is_ok());
    }

    #[test]
    fn alpha_domain_is_a_config_error() {
        let c = RunConfig::parse(r#"{"problem": {"type": "power_weight", "alpha": -1.5}}"#).unwrap();
        let e = c.validate(CommandName::MEval).unwrap_err();
        assert!(e.to_string().contains("alpha > -1"), "{e}");
    }

    #[test]
    fn hash_is_stable() {
        let p = ProblemSpec::PowerWeight { alpha: 1.0 };
        assert_eq!(p.hash(), p.clone().hash());
        assert_eq!(p.hash().len(), 64);
        assert_ne!(p.hash(), ProblemSpec::Free.hash());
    }
}
