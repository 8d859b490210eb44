//! Reference computations for validating the `axireg-core` numerics.
//!
//! Everything in this crate is deliberately independent of the production
//! code paths: integrals are evaluated with a different quadrature rule on
//! denser grids, derivatives come from exact symbolic manipulation of
//! Gaussian-polynomial expressions or from plain finite differences, and
//! convergence orders are fitted from scratch. Test suites compare the
//! production results against these references.

pub mod fit;
pub mod mms;
pub mod quad;
pub mod sym;

pub use fit::{central_diff, fit_order};
pub use mms::Manufactured;
pub use quad::{integral_cyl, integral_cyl_rcut};
pub use sym::GaussPoly;
