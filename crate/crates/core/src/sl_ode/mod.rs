//! Half-line Sturm–Liouville problems and the Weyl–Titchmarsh m-coefficient.

mod coeff;
mod fundamental;
mod integrator;
mod problem;
mod s0;
mod weyl;

pub use coeff::{CoefficientFn, CoefficientKind, CoefficientSpec, Segment, Term};
pub(crate) use fundamental::solve_cs_augmented;
pub use fundamental::{solve_cs, FundamentalSample};
pub use integrator::StepControl;
pub use problem::{Boundary, FullLineProblem, HalfLineProblem, OdeSettings, Side, Truncation};
pub use s0::{moment_mass, s0_boundedness, s0_report, S0Report, S0Verdict};
pub use weyl::{m_numeric, truncation_for, verify_psi_identity, WeylSolutionSample};
