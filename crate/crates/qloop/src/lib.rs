//! Exact-arithmetic machinery for braided tensor algebras with Hopf pairings,
//! quantum-group representations of U_q(Lsl2) and its hbar-variant, the
//! commutation condition for perturbed-defect modules, T-system and T-Q exact
//! sequences, cyclic representations at roots of unity, and the bimodule
//! cocycle structure of the compactified free boson.
//!
//! Everything is computed over an exact coefficient field ([`scalar`]); no
//! floating point enters any verified statement.

pub mod boson;
pub mod braidcat;
pub mod commcheck;
pub mod intertwine;
pub mod linalg;
pub mod qrep;
pub mod relations;
pub mod scalar;
pub mod tensoralg;

pub use scalar::{QScalar, Rat, ScalarContext, ScalarError, ScalarMode};
