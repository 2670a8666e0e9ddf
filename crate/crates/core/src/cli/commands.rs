use std::path::Path;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use super::config::{CommandName, ProblemSpec, RunConfig};
use super::output::{write_csv, write_json, Cell};
use super::CliError;
use crate::criteria::{
    classify, definitizing_poly, find_nonreal_eigs, grid_values, necessary_grid, optimize_shift_grid, scan_grid,
    DENOMINATOR_TOL, FIT_TOL, SIGN_TOL,
};
use crate::discrete::{
    discretize, eps_exponent, random_bumps, spectrum_of, DiscretizedOperator, FunctionalPlan, FunctionalValue,
    MatrixOperator, PAIR_TOL,
};
use crate::error::Error;
use crate::mcatalog::{finitezone_build, zone_case_a_constant, zone_case_b_constants, MEvaluator, MKind, TAIL_TOL};
use crate::sl_ode::{m_numeric, OdeSettings};

const BRANCH_ANCHORS: [&str; 4] = [
    "sqrt(lambda) takes arg lambda in [0, 2pi), so it lies in the closed upper half-plane",
    "M_plus(lambda) = m_plus(lambda), M_minus(lambda) = -m_minus(-lambda)",
    "lambda^(-nu) for power weights uses the same cut as the square root",
    "finite-zone sqrt(R) is the product of sqrt(lambda - root) over the roots of R",
];

#[derive(Serialize)]
struct Sidecar<'a, S: Serialize> {
    command: &'static str,
    /// Data file this sidecar describes.
    data: Option<&'a str>,
    columns: Option<&'a [&'a str]>,
    problem_hash: Option<String>,
    seed: u64,
    tolerances: Value,
    truncation_radii: Value,
    branch_anchors: &'a [&'a str],
    config: &'a RunConfig,
    summary: S,
}

pub(crate) struct Ctx<'a> {
    pub cmd: CommandName,
    pub cfg: &'a RunConfig,
    pub out: &'a Path,
    pub seed: u64,
}

impl Ctx<'_> {
    fn tolerances(&self) -> Value {
        let ode = match &self.cfg.problem {
            Some(ProblemSpec::Coefficients { ode: Some(o), .. }) => *o,
            _ => OdeSettings::default(),
        };
        json!({
            "ode_rtol": ode.rtol,
            "ode_atol": ode.atol,
            "denominator": DENOMINATOR_TOL,
            "fit": FIT_TOL,
            "sign": SIGN_TOL,
            "tail_mass": TAIL_TOL,
            "pair_imag": PAIR_TOL,
            "functional_rel": self.cfg.functional.options.rel_tol,
        })
    }

    fn emit<S: Serialize>(
        &self,
        stem: &str,
        csv: Option<(&[&str], Vec<Vec<Cell>>)>,
        truncation: Value,
        summary: S,
    ) -> Result<(), CliError> {
        let data = format!("{stem}.csv");
        let columns = csv.as_ref().map(|(h, _)| *h);
        if let Some((header, rows)) = &csv {
            write_csv(&self.out.join(&data), header, rows)?;
        }
        let side = Sidecar {
            command: self.cmd.as_str(),
            data: csv.as_ref().map(|_| data.as_str()),
            columns,
            problem_hash: self.cfg.problem.as_ref().map(|p| p.hash()),
            seed: self.seed,
            tolerances: self.tolerances(),
            truncation_radii: truncation,
            branch_anchors: &BRANCH_ANCHORS,
            config: self.cfg,
            summary,
        };
        write_json(&self.out.join(format!("{stem}.json")), &side)?;
        Ok(())
    }

    fn problem(&self) -> &ProblemSpec {
        self.cfg.problem.as_ref().expect("validated")
    }

    fn truncation(&self) -> Value {
        self.cfg.problem.as_ref().map_or(Value::Null, |p| p.truncation())
    }
}

fn config_err(e: Error) -> CliError {
    match e {
        Error::Invalid(_) | Error::Domain(_) => CliError::Config(e.to_string()),
        e => CliError::Numerical(e),
    }
}

/// Builds evaluators, treating invalid data as a configuration error.
fn evaluators(ctx: &Ctx) -> Result<(MEvaluator, MEvaluator), CliError> {
    ctx.problem().evaluators().map_err(config_err)
}

fn m_with_radius(e: &MEvaluator, l: Complex64) -> crate::Result<(Complex64, Option<f64>)> {
    match &e.kind {
        MKind::Numeric(p) => {
            let s = m_numeric(p, l)?;
            Ok((s.m_value, Some(s.truncation_radius)))
        }
        _ => Ok((e.m(l)?, None)),
    }
}

pub(crate) fn m_eval(ctx: &Ctx) -> Result<(), CliError> {
    let (mp, mm) = evaluators(ctx)?;
    let lambdas: Vec<Complex64> = ctx.cfg.m_eval.lambdas.iter().map(|l| Complex64::new(l[0], l[1])).collect();
    let vals = lambdas
        .par_iter()
        .map(|&l| Ok((m_with_radius(&mp, l)?, m_with_radius(&mm, l)?)))
        .collect::<crate::Result<Vec<_>>>()?;
    let header = ["re_lambda", "im_lambda", "re_m_plus", "im_m_plus", "re_m_minus", "im_m_minus"];
    let rows = lambdas
        .iter()
        .zip(&vals)
        .map(|(l, ((p, _), (m, _)))| vec![l.re.into(), l.im.into(), p.re.into(), p.im.into(), m.re.into(), m.im.into()])
        .collect();
    let radii: Vec<Value> = vals.iter().map(|((_, rp), (_, rm))| json!({"plus": rp, "minus": rm})).collect();
    let truncation = json!({"rule": ctx.truncation(), "per_lambda": radii});
    ctx.emit("m_eval", Some((&header, rows)), truncation, json!({"points": lambdas.len()}))
}

pub(crate) fn criterion_scan(ctx: &Ctx) -> Result<(), CliError> {
    let (mp, mm) = evaluators(ctx)?;
    let p = &ctx.cfg.scan;
    let g = grid_values(&mp, &mm, &p.region)?;
    let (mut result, flat) = if p.necessary {
        (necessary_grid(&g), false)
    } else if let Some(c) = p.shift {
        (scan_grid(&g, c), false)
    } else {
        let s = optimize_shift_grid(&g, p.shift_seed)?;
        (s.result, s.flat)
    };
    let header = ["abs_lambda", "arg_lambda", "ratio"];
    let rows = result
        .samples
        .iter()
        .map(|s| vec![s.lambda.norm().into(), s.lambda.arg().into(), s.ratio.into()])
        .collect();
    result.samples.clear();
    let summary = json!({
        "mode": if p.necessary { "necessary" } else { "sufficient" },
        "shift_flat": flat,
        "result": result,
        "wording": "criterion satisfied or violated on the sampled grid; this is evidence, not a proof",
    });
    ctx.emit("ratio", Some((&header, rows)), ctx.truncation(), summary)
}

pub(crate) fn classify_cmd(ctx: &Ctx) -> Result<(), CliError> {
    let (mp, mm) = evaluators(ctx)?;
    let report = classify(&mp, &mm, &ctx.cfg.classify, ctx.seed)?;
    ctx.emit("classify", None, ctx.truncation(), report)
}

pub(crate) fn zone_build(ctx: &Ctx) -> Result<(), CliError> {
    let Some(ProblemSpec::FiniteZone { zone }) = &ctx.cfg.problem else {
        return Err(CliError::Config("zone-build needs a finite_zone problem".into()));
    };
    let zp = finitezone_build(zone).map_err(config_err)?;
    let b = zone_case_b_constants(&zp).ok();
    let summary = json!({
        "polynomials": zp,
        "case_a_constant": zone_case_a_constant(zone),
        "case_b_constants": b,
    });
    ctx.emit("zone", None, ctx.truncation(), summary)
}

pub(crate) fn eigs_find(ctx: &Ctx) -> Result<(), CliError> {
    let (mp, mm) = evaluators(ctx)?;
    let e = ctx.cfg.eigs.as_ref().expect("validated");
    let eigs = find_nonreal_eigs(&mp, &mm, e.rect, e.d, e.c)?;
    let (poly, normal) = definitizing_poly(&eigs);
    let header = ["re", "im", "kind"];
    let rows = eigs
        .iter()
        .map(|z| vec![z.lambda.re.into(), z.lambda.im.into(), Cell::Text("pair")])
        .collect();
    let summary = json!({"eigenvalues": eigs, "definitizing_poly": poly, "simple": normal});
    ctx.emit("eigs", Some((&header, rows)), ctx.truncation(), summary)
}

fn discretized(ctx: &Ctx) -> Result<DiscretizedOperator, CliError> {
    let fp = ctx
        .problem()
        .full_line()
        .map_err(config_err)?
        .ok_or_else(|| CliError::Config("discrete commands need a problem with coefficients".into()))?;
    let d = ctx.cfg.discrete;
    discretize(&fp, d.half_width, d.n).map_err(config_err)
}

fn finite_or_text(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        json!("inf")
    }
}

pub(crate) fn discrete_spectrum(ctx: &Ctx) -> Result<(), CliError> {
    let op = discretized(ctx)?;
    let s = spectrum_of(op.matrix.dense().as_ref(), PAIR_TOL, ctx.cfg.discrete.condition)?;
    let header = ["re", "im", "kind"];
    let mut rows: Vec<Vec<Cell>> = s.real_eigs.iter().map(|&r| vec![r.into(), 0.0.into(), Cell::Text("real")]).collect();
    rows.extend(s.complex_pairs.iter().map(|z| vec![z.re.into(), z.im.into(), Cell::Text("pair")]));
    let summary = json!({
        "n": op.n(),
        "h": op.h,
        "real_count": s.real_eigs.len(),
        "pair_count": s.complex_pairs.len(),
        "eigvec_condition": s.eigvec_condition.map(finite_or_text),
        "symmetry_residual": op.symmetry_residual(),
    });
    let truncation = json!({"dirichlet_half_width": op.half_width});
    ctx.emit("spectrum", Some((&header, rows)), truncation, summary)
}

pub(crate) fn discrete_functional(ctx: &Ctx) -> Result<(), CliError> {
    let f = &ctx.cfg.functional;
    let (op, grid, truncation) = match &f.matrix {
        Some(m) => (m.clone(), None, Value::Null),
        None => {
            let d = discretized(ctx)?;
            let t = json!({"dirichlet_half_width": d.half_width});
            (MatrixOperator::from(&d), Some(d.x), t)
        }
    };
    let plan = FunctionalPlan::new(op)?;
    let vectors: Vec<Vec<f64>> = match (&f.vector, &grid) {
        (Some(v), _) => {
            if v.len() != plan.op.n() {
                return Err(CliError::Config("functional.vector length does not match the operator".into()));
            }
            vec![v.clone()]
        }
        (None, Some(x)) => {
            let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
            (0..f.trials).map(|_| random_bumps(x, &mut rng)).collect()
        }
        (None, None) => {
            let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
            (0..f.trials)
                .map(|_| (0..plan.op.n()).map(|_| rng.gen_range(-1.0..1.0)).collect())
                .collect()
        }
    };
    let ladders = vectors
        .iter()
        .map(|v| plan.ladder(v, &f.eps, &f.options))
        .collect::<crate::Result<Vec<Vec<FunctionalValue>>>>()?;
    let (lo, hi) = extreme_eps(&f.eps);
    let growth: Vec<f64> = ladders.iter().map(|l| l[lo].value / l[hi].value).collect();
    let worst = (0..growth.len()).fold(0, |b, k| if growth[k] > growth[b] { k } else { b });
    let lad = &ladders[worst];
    let header = ["eps", "value", "error_bar"];
    let rows = lad.iter().map(|v| vec![v.eps.into(), v.value.into(), v.error_bar.into()]).collect();
    let summary = json!({
        "label": "evidence: finitely many eps and test vectors are sampled",
        "trials": vectors.len(),
        "worst_trial": worst,
        "growth_fine_over_coarse": growth,
        "eps_exponent": if lad.len() >= 2 { Some(eps_exponent(lad)) } else { None },
        "ladder": lad,
    });
    ctx.emit("functional", Some((&header, rows)), truncation, summary)
}

/// Indices of the smallest and largest `ε`.
fn extreme_eps(eps: &[f64]) -> (usize, usize) {
    let mut lo = 0;
    let mut hi = 0;
    for (k, &e) in eps.iter().enumerate() {
        if e < eps[lo] {
            lo = k;
        }
        if e > eps[hi] {
            hi = k;
        }
    }
    (lo, hi)
}
