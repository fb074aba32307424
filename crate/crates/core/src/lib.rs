//! Local Euler-Maclaurin cone coefficients for integral polytopes.
//!
//! Given a complement map on the dual space `W`, this crate computes the
//! coefficients `mu(L)` attached to rational cones `L` as truncated power
//! series, uses them to count lattice points of integral polytopes through
//! the local formula `|P ∩ M| = sum_F mu_0(C(P, F)) vol(F)`, and checks the
//! exponential identity `S(P) = sum_F mu(C(P, F)) I(F)` exactly along a
//! line.

pub mod cli;
pub mod complement;
pub mod error;
pub mod exact;
pub mod geometry;
pub mod interpolator;
pub mod io;
pub mod series;
pub mod valuations;

pub use error::{Error, ErrorClass, Result};
