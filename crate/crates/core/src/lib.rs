//! Power-series laboratory for `F(x) = exp(G(x))`.
//!
//! The crate computes coefficients of `exp(G)` exactly, measures ratio
//! behaviour of the result, checks saddle-point asymptotics for polynomial
//! `G`, builds counterexamples with infinitely many ratio violations, and
//! evaluates numeric 0-1 law criteria for adequate classes of structures.
//! Every generating-series count can be cross-checked against brute-force
//! enumeration in [`oracles`].

pub mod classes;
pub mod coeffbox;
pub mod counterexample;
pub mod diagnostics;
pub mod error;
pub mod exec;
pub mod oracles;
pub mod saddle;
pub mod series;
pub mod smoothing;

pub use coeffbox::{Backend, Coeff, Precision, Rational, Real, SequenceRule};
pub use error::{Error, Result};
pub use exec::ExecMode;
pub use series::Series;
