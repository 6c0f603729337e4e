//! Abelianity lines of the quadratic subalgebras living on the critical
//! surfaces `S_{m,n}` of the elliptic quantum algebra.
//!
//! The crate is split into four layers:
//!
//! - [`lattice`]: exact integer/rational geometry of the critical surfaces and
//!   the diophantine classification of abelianity lines.
//! - [`oracle`]: an exact symbolic cancellation check of the exchange function,
//!   written as multiset reduction of `U`-argument exponents modulo 1.
//! - [`elliptic`]: floating-point evaluation of the short Jacobi theta function,
//!   `U`, `F_a`, the exchange function `Y_{m,n}` and the centrality ratio.
//! - [`poisson`]: the Poisson structure function `f(x)` on abelianity lines,
//!   by a compact log-derivative route and an independent series route.

pub mod elliptic;
pub mod error;
pub mod lattice;
pub mod oracle;
pub mod poisson;
pub mod rational;

pub use error::{Error, Result};
pub use rational::Rational;
