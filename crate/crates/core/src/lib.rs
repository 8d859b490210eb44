//! Axisymmetric Navier-Stokes laboratory.
//!
//! The crate simulates the incompressible axisymmetric equations in
//! primitive variables on a truncated cylindrical domain and evaluates the
//! weighted swirl/vorticity functionals, exponent windows, inequality
//! chains, and Gronwall-type envelopes that a conditional-regularity
//! diagnostic needs. Modules:
//!
//! - [`grid`], [`field`], [`state`], [`checkpoint`]: domain, scalar fields,
//!   quadrature, flow snapshots, and the binary checkpoint format.
//! - [`operators`]: cylindrical finite-difference operators with parity
//!   handling at the axis.
//! - [`solver`]: explicit two-stage time stepping with pressure projection.
//! - [`exponents`]: the exponent family, its validity windows, and the
//!   weighted Serrin balance.
//! - [`functionals`]: weighted norms, the three coupling integrals, cutoff
//!   profiles, and discrete energy-identity term records.
//! - [`ensemble`]: seeded random divergence-free test fields.
//! - [`verifier`]: Young/Hoelder chains with explicit constants, empirical
//!   weighted-estimate calibration, and the Sobolev step.
//! - [`monitor`]: trajectory recording, Gronwall and double-log envelopes,
//!   run persistence, and verdicts.
//! - [`config`]: plain-text run configuration.

pub mod checkpoint;
pub mod config;
pub mod ensemble;
pub mod error;
pub mod exponents;
pub mod field;
pub mod functionals;
pub mod grid;
pub mod monitor;
pub mod operators;
pub mod solver;
pub mod state;
pub mod verifier;

pub use checkpoint::{read_checkpoint, write_checkpoint};
pub use error::{Error, Result};
pub use field::{integrate_cyl, weighted_lp, Field2D};
pub use grid::{CylGrid, GridRef};
pub use state::AxisymState;
