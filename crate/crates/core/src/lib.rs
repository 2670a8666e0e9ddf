//! Weyl–Titchmarsh m-coefficients of indefinite Sturm–Liouville operators
//! `(sgn x)/|r(x)| (−d²/dx² + q(x))` and similarity tests built on them.

pub mod cli;
pub mod criteria;
pub mod discrete;
pub mod error;
pub mod mcatalog;
pub mod numerics;
pub mod poly;
pub mod sl_ode;
pub mod special;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/m_coefficients.md")]
    mod m_coefficients {}
    #[doc = include_str!("../../../book/src/catalog.md")]
    mod catalog {}
    #[doc = include_str!("../../../book/src/criteria.md")]
    mod criteria {}
    #[doc = include_str!("../../../book/src/discrete.md")]
    mod discrete {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
