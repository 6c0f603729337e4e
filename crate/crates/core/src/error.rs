use thiserror::Error;

use crate::lattice::{Disjointness, Surface};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("S_(0,0) is not a critical surface: 1 = q^-N has no solution for |q| < 1")]
    ZeroSurface,

    #[error("surfaces do not intersect ({0})")]
    NoIntersection(Disjointness),

    #[error("lambda/m or lambda*/n is undefined on {0}")]
    DegenerateParametrization(Surface),

    #[error("lambda + lambda* = {0}, expected 1")]
    LambdaSumNotOne(String),

    #[error("no condition-2 family exists on {0}")]
    EmptyFamily(Surface),

    #[error("lambda is an integer; the reduced form degenerates")]
    IntegerLambdaShortcut,

    #[error("could not realize the line as {wanted} intersections, found {found}")]
    ConstructionFailed { wanted: usize, found: usize },

    #[error("internal cross-check failed: {0}")]
    CrossCheck(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid rational {0:?}")]
    ParseRational(String),

    #[error("zero denominator")]
    ZeroDenominator,

    #[error("argument outside the domain: {0}")]
    Domain(String),

    #[error("evaluation point lies on a pole: {0}")]
    Pole(String),
}
