//! Exact rational toolkit for lattice polytopes and the stability invariants
//! of the filtrations they induce.
//!
//! Everything here is computed over arbitrary-precision rationals; no
//! floating point appears anywhere. The main pipeline:
//!
//! * [`polytope`] — convex hulls with exact predicates, reflexivity, duals,
//!   lattice point enumeration, triangulations, lattice-normalized facet
//!   charts.
//! * [`plfunc`] — piecewise linear concave/convex functions, linearity
//!   subdivisions, overlays, and the exact radical-affineness test.
//! * [`stability`] — interior and boundary integrals and the two stability
//!   invariants of the test configuration attached to a PL function.
//! * [`roots`] — root enumeration on reflexive polytopes and the normalized
//!   presentation attached to a unique unipotent root, with the induced
//!   height function and its paired invariant reports.
//! * [`filtration`] — finite-dimensional modules with nilpotent commuting
//!   derivations, descending image and ascending kernel filtrations, their
//!   closed forms on section spaces, and multiplicativity checks.

pub mod error;
pub mod filtration;
pub mod io;
pub mod linalg;
pub mod plfunc;
pub mod polytope;
pub mod rational;
pub mod roots;
pub mod stability;

pub use error::{Error, Result};
pub use rational::Rational;
