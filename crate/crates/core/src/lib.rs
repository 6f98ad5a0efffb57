//! High-precision eigenvalues of one-dimensional Schrödinger operators
//! `H = -d²/dx² + V(x)` with even polynomial potentials.
//!
//! Three discretizations are provided: a sine/cosine basis on `[-L, L]`
//! ([`trigbasis`]) with several rules for choosing `L` ([`lengths`]), the
//! harmonic-oscillator basis with a tuned frequency ([`hobasis`]), and sinc
//! collocation on a uniform mesh ([`sinc`]). Matrices are diagonalized with a
//! multiprecision Jacobi solver ([`eigen`]).

pub mod eigen;
pub mod error;
pub mod hobasis;
pub mod lengths;
pub mod par;
pub mod potentials;
pub mod precision;
pub mod reference;
pub mod sinc;
pub mod solve;
pub mod specialfns;
pub mod spectrum;
pub mod studies;
pub mod trigbasis;

pub use error::{Error, Result};
pub use par::Exec;
pub use potentials::Potential;
pub use precision::{BigReal, Precision};
pub use solve::{solve, Method, Parameter, Problem, Sector};
pub use spectrum::SpectrumReport;
