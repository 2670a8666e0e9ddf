//! Real polynomials as ascending coefficient vectors.

use num_complex::Complex64;

pub fn eval(p: &[f64], x: f64) -> f64 {
    p.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

pub fn eval_c(p: &[f64], z: Complex64) -> Complex64 {
    p.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

pub fn mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|k| a.get(k).copied().unwrap_or(0.0) + b.get(k).copied().unwrap_or(0.0))
        .collect()
}

pub fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

/// Monic polynomial with the given real roots.
pub fn from_roots(roots: &[f64]) -> Vec<f64> {
    roots.iter().fold(vec![1.0], |acc, &r| mul(&acc, &[-r, 1.0]))
}

pub fn derivative(p: &[f64]) -> Vec<f64> {
    p.iter().enumerate().skip(1).map(|(k, &c)| c * k as f64).collect()
}

/// Drops trailing zero coefficients (exact zeros only).
pub fn trim(mut p: Vec<f64>) -> Vec<f64> {
    while p.len() > 1 && *p.last().expect("nonempty") == 0.0 {
        p.pop();
    }
    p
}

pub fn degree(p: &[f64]) -> usize {
    trim(p.to_vec()).len().saturating_sub(1)
}

/// Synthetic division `num = q·den + r`, `deg r < deg den`.
pub fn divmod(num: &[f64], den: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let den = trim(den.to_vec());
    let dn = den.len() - 1;
    let lead = den[dn];
    let mut r = num.to_vec();
    if r.len() <= dn {
        return (vec![0.0], r);
    }
    let mut q = vec![0.0; r.len() - dn];
    for k in (0..q.len()).rev() {
        let c = r[k + dn] / lead;
        q[k] = c;
        for (j, &d) in den.iter().enumerate() {
            r[k + j] -= c * d;
        }
    }
    r.truncate(dn.max(1));
    (q, r)
}

pub fn max_abs(p: &[f64]) -> f64 {
    p.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// All complex roots by Aberth–Ehrlich iteration followed by Newton polishing.
pub fn roots(p: &[f64]) -> Vec<Complex64> {
    let p = trim(p.to_vec());
    let n = p.len() - 1;
    if n == 0 {
        return Vec::new();
    }
    let dp = derivative(&p);
    let bound = 1.0 + p[..n].iter().map(|c| (c / p[n]).abs()).fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(0.5 * bound, 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64))
        .collect();
    for _ in 0..500 {
        let mut moved: f64 = 0.0;
        for k in 0..n {
            let ratio = eval_c(&p, z[k]) / eval_c(&dp, z[k]);
            let sum: Complex64 = (0..n).filter(|&j| j != k).map(|j| 1.0 / (z[k] - z[j])).sum();
            let w = ratio / (1.0 - ratio * sum);
            if w.is_finite() {
                z[k] -= w;
                moved = moved.max(w.norm() / z[k].norm().max(1.0));
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    for r in z.iter_mut() {
        for _ in 0..3 {
            let d = eval_c(&dp, *r);
            if d.norm() > 0.0 {
                let step = eval_c(&p, *r) / d;
                if step.is_finite() {
                    *r -= step;
                }
            }
        }
        if r.im.abs() < 1e-10 * r.norm().max(1.0) {
            r.im = 0.0;
        }
    }
    z.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    z
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn divide_exactly() {
        let a = from_roots(&[1.0, -2.0, 3.0]);
        let (q, r) = divmod(&a, &[-1.0, 1.0]);
        assert!(max_abs(&r) < 1e-14);
        assert!(max_abs(&add(&q, &scale(&from_roots(&[-2.0, 3.0]), -1.0))) < 1e-14);
    }

    #[test]
    fn finds_roots() {
        let rts = roots(&from_roots(&[-0.15, 1.65, 4.0, 7.5]));
        let want = [-0.15, 1.65, 4.0, 7.5];
        for (r, w) in rts.iter().zip(want) {
            assert!((r.re - w).abs() < 1e-12 && r.im == 0.0);
        }
        let cplx = roots(&[1.0, 0.0, 1.0]);
        assert!((cplx[0].im.abs() - 1.0).abs() < 1e-14);
    }
}
