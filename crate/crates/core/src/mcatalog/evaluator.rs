use num_complex::Complex64;

use super::closed::{m_example_a1, m_example_q0, m_free, m_power};
use super::decaying::m_decaying_ab;
use super::infzone::{m_infzone_truncated, ZoneSequenceData};
use super::periodic::{m_periodic, PeriodicData};
use super::zone::{m_finitezone, ZonePolynomials};
use crate::error::{Error, Result};
use crate::sl_ode::{m_numeric, HalfLineProblem, Side};

/// Source of an m-coefficient.
#[derive(Debug, Clone)]
pub enum MKind {
    Numeric(HalfLineProblem),
    Free,
    PowerWeight(f64),
    ExampleQ0,
    ExampleA1,
    Periodic(PeriodicData),
    FiniteZone(ZonePolynomials),
    InfiniteZoneTruncated(ZoneSequenceData, usize),
    DecayingAB(HalfLineProblem),
}

/// `m_side` from one source, with `M_side(λ) = ±m_side(±λ)`.
#[derive(Debug, Clone)]
pub struct MEvaluator {
    pub kind: MKind,
    pub side: Side,
}

impl MEvaluator {
    pub fn new(kind: MKind, side: Side) -> Result<Self> {
        match &kind {
            MKind::Numeric(p) | MKind::DecayingAB(p) if p.side != side => Err(Error::Invalid(format!(
                "problem is posed on the {:?} side, evaluator on {side:?}",
                p.side
            ))),
            _ => Ok(Self { kind, side }),
        }
    }

    /// `m_side(λ)`.
    pub fn m(&self, lambda: Complex64) -> Result<Complex64> {
        match &self.kind {
            MKind::Numeric(p) => Ok(m_numeric(p, lambda)?.m_value),
            MKind::Free => m_free(lambda),
            MKind::PowerWeight(alpha) => m_power(*alpha, lambda),
            MKind::ExampleQ0 => m_example_q0(lambda),
            MKind::ExampleA1 => m_example_a1(lambda),
            MKind::Periodic(p) => m_periodic(p, lambda, self.side),
            MKind::FiniteZone(zp) => m_finitezone(zp, lambda, self.side),
            MKind::InfiniteZoneTruncated(zs, n) => m_infzone_truncated(zs, *n, lambda, self.side),
            MKind::DecayingAB(p) => Ok(m_decaying_ab(p, lambda)?.m),
        }
    }

    /// `M_side(λ) = ±m_side(±λ)`.
    pub fn big_m(&self, lambda: Complex64) -> Result<Complex64> {
        let s = self.side.sign();
        Ok(self.m(lambda * s)? * s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_pair() {
        let l = Complex64::new(0.5, 2.0);
        let p = MEvaluator::new(MKind::Free, Side::Plus).unwrap();
        let m = MEvaluator::new(MKind::Free, Side::Minus).unwrap();
        let i = Complex64::new(0.0, 1.0);
        assert!((p.big_m(l).unwrap() - i / l.sqrt()).norm() < 1e-14);
        assert!((m.big_m(l).unwrap() + i / crate::special::sqrt_cut(-l)).norm() < 1e-14);
        // both M± are Herglotz
        assert!(p.big_m(l).unwrap().im > 0.0 && m.big_m(l).unwrap().im > 0.0);
    }

    #[test]
    fn side_mismatch() {
        let p = HalfLineProblem::new(
            Side::Plus,
            crate::sl_ode::CoefficientFn::zero(),
            crate::sl_ode::CoefficientFn::one(),
        );
        assert!(MEvaluator::new(MKind::Numeric(p), Side::Minus).is_err());
    }
}
