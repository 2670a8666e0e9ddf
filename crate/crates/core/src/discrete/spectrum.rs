use faer::complex_native::c64;
use faer::{Mat, MatRef};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::operator::DiscretizedOperator;
use crate::error::{Error, Result};

/// Eigenvalues with `|Im λ|` at or below this count as real.
pub const PAIR_TOL: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub real_eigs: Vec<f64>,
    /// One representative with `Im λ > 0` per conjugate pair.
    pub complex_pairs: Vec<Complex64>,
    /// Condition number of the unit-column eigenvector matrix; `None` when not requested.
    pub eigvec_condition: Option<f64>,
    pub imag_tol: f64,
}

fn to_c(z: c64) -> Complex64 {
    Complex64::new(z.re, z.im)
}

fn split(eigs: &[Complex64], imag_tol: f64) -> Result<(Vec<f64>, Vec<Complex64>)> {
    if let Some(z) = eigs.iter().find(|z| !z.is_finite()) {
        return Err(Error::Eigensolver(format!("non-finite eigenvalue {z}")));
    }
    let mut real: Vec<f64> = eigs.iter().filter(|z| z.im.abs() <= imag_tol).map(|z| z.re).collect();
    let mut upper: Vec<Complex64> = eigs.iter().filter(|z| z.im > imag_tol).copied().collect();
    let lower = eigs.iter().filter(|z| z.im < -imag_tol).count();
    if lower != upper.len() {
        return Err(Error::Eigensolver(format!(
            "unpaired nonreal eigenvalues: {} above the axis, {lower} below",
            upper.len()
        )));
    }
    real.sort_by(f64::total_cmp);
    upper.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok((real, upper))
}

/// Eigenvalues of a dense real matrix.
pub fn eigenvalues_of(a: MatRef<'_, f64>) -> Result<Vec<Complex64>> {
    if a.nrows() != a.ncols() {
        return Err(Error::Invalid("matrix must be square".into()));
    }
    Ok(a.eigenvalues::<c64>().into_iter().map(to_c).collect())
}

/// Full eigendecomposition of a dense real matrix.
pub fn spectrum_of(a: MatRef<'_, f64>, imag_tol: f64, with_condition: bool) -> Result<Spectrum> {
    if a.nrows() != a.ncols() {
        return Err(Error::Invalid("matrix must be square".into()));
    }
    let (eigs, cond) = if with_condition {
        let evd = a.eigendecomposition::<c64>();
        let s = evd.s().column_vector();
        let eigs: Vec<Complex64> = (0..a.nrows()).map(|i| to_c(s.read(i))).collect();
        (eigs, Some(condition(evd.u())))
    } else {
        (eigenvalues_of(a)?, None)
    };
    let (real_eigs, complex_pairs) = split(&eigs, imag_tol)?;
    Ok(Spectrum {
        real_eigs,
        complex_pairs,
        eigvec_condition: cond,
        imag_tol,
    })
}

fn condition(u: MatRef<'_, c64>) -> f64 {
    let n = u.nrows();
    let mut v = Mat::<c64>::zeros(n, n);
    for j in 0..n {
        let norm = (0..n).map(|i| to_c(u.read(i, j)).norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return f64::INFINITY;
        }
        for i in 0..n {
            let z = u.read(i, j);
            v.write(i, j, c64::new(z.re / norm, z.im / norm));
        }
    }
    let sv = v.singular_values();
    let (hi, lo) = (sv[0], sv[n - 1]);
    if lo <= hi * 1e-300 || !(hi / lo).is_finite() {
        f64::INFINITY
    } else {
        hi / lo
    }
}

/// Spectrum of `A_h` with eigenvector conditioning.
pub fn spectrum(op: &DiscretizedOperator) -> Result<Spectrum> {
    spectrum_of(op.matrix.dense().as_ref(), PAIR_TOL, true)
}

/// Spectrum of `A_h` without eigenvectors.
pub fn eigenvalues(op: &DiscretizedOperator) -> Result<Spectrum> {
    spectrum_of(op.matrix.dense().as_ref(), PAIR_TOL, false)
}
