//! Finite-difference oracle: `A_h` on a staggered grid, its spectrum and the resolvent functional.

mod functional;
mod operator;
mod spectrum;

pub use functional::{
    eps_exponent, growth_contrast, random_bumps, resolvent_functional, FunctionalOptions, FunctionalPlan, FunctionalValue,
    GrowthContrast, MatrixOperator,
};
pub use operator::{discretize, DiscretizedOperator, Tridiagonal};
pub use spectrum::{eigenvalues, eigenvalues_of, spectrum, spectrum_of, Spectrum, PAIR_TOL};
