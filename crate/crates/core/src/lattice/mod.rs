//! Exact geometry of the critical surfaces `S_{m,n}` and the diophantine
//! classification of their abelianity lines.
//!
//! Everything here is integer/rational arithmetic. A point of the moduli
//! space is described by the half-nome exponents `(e_p, e_p*)`, defined by
//! `-p^{1/2} = q^{N e_p}` and `-p*^{1/2} = q^{N e_p*}`; the surface `S_{m,n}`
//! is the affine line `m e_p + n e_p* = -1` in those coordinates.

mod bezout;
mod classify;
mod family;
mod super_abelian;

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::Rational;

pub use bezout::{bezout, canonical_bezout, gcd, Bezout};
pub use classify::{
    classify_intersection, classify_lambda, AbelianityVerdict, IntersectionVerdicts, SideVerdict,
    TheoremCase, VerdictTag, Witness,
};
pub use family::{
    realize_line_as_intersections, solve_condition2, surfaces_through_line, Construction,
    LambdaFamily, Realization,
};
pub use super_abelian::{super_abelianity_check, SuperAbelianity, SuperOutcome};

/// Integer label `(m, n)` of the critical surface
/// `(-p^{1/2})^m (-p*^{1/2})^n = q^{-N}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Surface {
    m: i64,
    n: i64,
}

impl Surface {
    pub fn new(m: i64, n: i64) -> Result<Self> {
        if m == 0 && n == 0 {
            return Err(Error::ZeroSurface);
        }
        Ok(Surface { m, n })
    }

    pub fn m(&self) -> i64 {
        self.m
    }

    pub fn n(&self) -> i64 {
        self.n
    }

    /// `S_{1,-1}` or `S_{-1,1}`: the critical level `c = -N`.
    pub fn is_critical_level(&self) -> bool {
        (self.m, self.n) == (1, -1) || (self.m, self.n) == (-1, 1)
    }

    /// `S_{0,n}` or `S_{m,0}`, where the λ-parametrization breaks down.
    pub fn has_zero_index(&self) -> bool {
        self.m == 0 || self.n == 0
    }
}

impl fmt::Display for Surface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "S_({},{})", self.m, self.n)
    }
}

/// A line of the moduli space, as exact half-nome exponents.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct LineParams {
    e_p: Rational,
    e_pstar: Rational,
    #[serde(rename = "c_over_N")]
    c_over_n: Rational,
}

impl LineParams {
    /// `c/N = e_p - e_p*` follows from `p* = p q^{-2c}`.
    pub fn new(e_p: Rational, e_pstar: Rational) -> Self {
        LineParams {
            e_p,
            e_pstar,
            c_over_n: e_p - e_pstar,
        }
    }

    pub fn e_p(&self) -> Rational {
        self.e_p
    }

    pub fn e_pstar(&self) -> Rational {
        self.e_pstar
    }

    pub fn c_over_n(&self) -> Rational {
        self.c_over_n
    }

    /// Whether `|p| < 1` and `|p*| < 1` for real `q` in `(0, 1)`.
    pub fn algebra_valid(&self) -> bool {
        self.e_p.is_positive() && self.e_pstar.is_positive()
    }

    /// Whether the surface passes through this line: `m e_p + n e_p* = -1`.
    pub fn lies_on(&self, s: &Surface) -> bool {
        self.e_p * s.m + self.e_pstar * s.n == Rational::integer(-1)
    }

    /// Coordinates `(λ, λ*)` of this line seen on `s`.
    pub fn lambda_on(&self, s: &Surface) -> Result<LambdaPair> {
        if s.has_zero_index() {
            return Err(Error::DegenerateParametrization(*s));
        }
        if !self.lies_on(s) {
            return Err(Error::Precondition(format!("line does not lie on {s}")));
        }
        LambdaPair::from_parts(-self.e_p * s.m, -self.e_pstar * s.n)
    }
}

/// On-surface coordinates with `-p^{1/2} = q^{-Nλ/m}`, `-p*^{1/2} = q^{-Nλ*/n}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct LambdaPair {
    lambda: Rational,
    lambda_star: Rational,
}

impl LambdaPair {
    pub fn new(lambda: Rational) -> Self {
        LambdaPair {
            lambda,
            lambda_star: Rational::ONE - lambda,
        }
    }

    pub fn from_parts(lambda: Rational, lambda_star: Rational) -> Result<Self> {
        let sum = lambda + lambda_star;
        if sum != Rational::ONE {
            return Err(Error::LambdaSumNotOne(sum.to_string()));
        }
        Ok(LambdaPair {
            lambda,
            lambda_star,
        })
    }

    pub fn lambda(&self) -> Rational {
        self.lambda
    }

    pub fn lambda_star(&self) -> Rational {
        self.lambda_star
    }

    /// The line `(e_p, e_p*) = (-λ/m, -λ*/n)` on `s`.
    pub fn line_params(&self, s: &Surface) -> Result<LineParams> {
        if s.has_zero_index() {
            return Err(Error::DegenerateParametrization(*s));
        }
        Ok(LineParams::new(-self.lambda / s.m, -self.lambda_star / s.n))
    }
}

/// Why two surfaces fail to intersect.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Disjointness {
    SameM,
    SameN,
    ZeroDeterminant,
}

impl fmt::Display for Disjointness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Disjointness::SameM => "m = m'",
            Disjointness::SameN => "n = n'",
            Disjointness::ZeroDeterminant => "m'n - mn' = 0",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Intersection {
    Line(LineParams),
    Empty(Disjointness),
}

impl Intersection {
    pub fn line(&self) -> Option<&LineParams> {
        match self {
            Intersection::Line(l) => Some(l),
            Intersection::Empty(_) => None,
        }
    }

    pub fn into_result(self) -> Result<LineParams> {
        match self {
            Intersection::Line(l) => Ok(l),
            Intersection::Empty(why) => Err(Error::NoIntersection(why)),
        }
    }
}

fn determinant(a: &Surface, b: &Surface) -> i64 {
    b.m * a.n - a.m * b.n
}

/// The line `S_{m,n} ∩ S_{m',n'}`, symmetric in its arguments.
pub fn intersect_surfaces(a: &Surface, b: &Surface) -> Intersection {
    if a.m == b.m {
        return Intersection::Empty(Disjointness::SameM);
    }
    if a.n == b.n {
        return Intersection::Empty(Disjointness::SameN);
    }
    let det = determinant(a, b);
    if det == 0 {
        return Intersection::Empty(Disjointness::ZeroDeterminant);
    }
    let line = LineParams::new(
        Rational::frac(b.n - a.n, det),
        Rational::frac(a.m - b.m, det),
    );
    debug_assert_eq!(line.c_over_n, Rational::frac(b.m + b.n - a.m - a.n, det));
    Intersection::Line(line)
}

/// `(λ, λ*)` of `S_{m,n} ∩ S_{m',n'}` viewed on the first surface.
pub fn lambda_of_intersection(a: &Surface, b: &Surface) -> Result<LambdaPair> {
    intersect_surfaces(a, b).into_result()?;
    if a.has_zero_index() {
        return Err(Error::DegenerateParametrization(*a));
    }
    let det = determinant(a, b);
    let lambda = Rational::frac(a.m * (a.n - b.n), det);
    let lambda_star = Rational::frac(a.n * (b.m - a.m), det);
    LambdaPair::from_parts(lambda, lambda_star)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn s(m: i64, n: i64) -> Surface {
        Surface::new(m, n).unwrap()
    }

    fn r(n: i64, d: i64) -> Rational {
        Rational::frac(n, d)
    }

    #[test]
    fn zero_surface_rejected() {
        assert_eq!(Surface::new(0, 0), Err(Error::ZeroSurface));
    }

    #[test]
    fn intersect_3_6_with_2_5() {
        let line = intersect_surfaces(&s(3, 6), &s(2, 5))
            .into_result()
            .unwrap();
        assert_eq!(line.e_p(), r(1, 3));
        assert_eq!(line.e_pstar(), r(-1, 3));
        assert_eq!(line.c_over_n(), r(2, 3));
        assert!(line.lies_on(&s(3, 6)) && line.lies_on(&s(2, 5)));
    }

    #[test]
    fn intersect_1_2_with_2_1() {
        let line = intersect_surfaces(&s(1, 2), &s(2, 1))
            .into_result()
            .unwrap();
        assert_eq!(line.e_p(), r(-1, 3));
        assert_eq!(line.e_pstar(), r(-1, 3));
        assert_eq!(line.c_over_n(), Rational::ZERO);
    }

    #[test]
    fn disjoint_cases() {
        assert_eq!(
            intersect_surfaces(&s(1, 2), &s(1, 5)),
            Intersection::Empty(Disjointness::SameM)
        );
        assert_eq!(
            intersect_surfaces(&s(1, 2), &s(4, 2)),
            Intersection::Empty(Disjointness::SameN)
        );
        assert_eq!(
            intersect_surfaces(&s(1, 2), &s(2, 4)),
            Intersection::Empty(Disjointness::ZeroDeterminant)
        );
        assert_eq!(
            lambda_of_intersection(&s(3, 6), &s(3, 6)),
            Err(Error::NoIntersection(Disjointness::SameM))
        );
    }

    #[test]
    fn antidiagonal_surfaces_never_meet() {
        for m in 1..10 {
            for n in 1..10 {
                if m != n {
                    assert!(intersect_surfaces(&s(m, -m), &s(n, -n)).line().is_none());
                }
            }
        }
    }

    #[test]
    fn lambda_values() {
        let l = lambda_of_intersection(&s(3, 6), &s(2, 5)).unwrap();
        assert_eq!((l.lambda(), l.lambda_star()), (r(-1, 1), r(2, 1)));
        let l = lambda_of_intersection(&s(1, 2), &s(2, 1)).unwrap();
        assert_eq!((l.lambda(), l.lambda_star()), (r(1, 3), r(2, 3)));
    }

    #[test]
    fn lambda_on_zero_index_surface_is_degenerate() {
        assert_eq!(
            lambda_of_intersection(&s(0, 3), &s(2, 5)),
            Err(Error::DegenerateParametrization(s(0, 3)))
        );
        // the other side is fine
        let l = lambda_of_intersection(&s(2, 5), &s(0, 3)).unwrap();
        assert_eq!(l.lambda_star(), r(5, 3));
    }

    #[test]
    fn lambda_pair_sum_checked() {
        assert!(LambdaPair::from_parts(r(1, 2), r(1, 3)).is_err());
        assert_eq!(LambdaPair::new(r(1, 3)).lambda_star(), r(2, 3));
    }

    fn small_surface() -> impl Strategy<Value = Surface> {
        (-8i64..=8, -8i64..=8)
            .prop_filter("(0,0)", |&(m, n)| (m, n) != (0, 0))
            .prop_map(|(m, n)| s(m, n))
    }

    proptest! {
        #[test]
        fn intersection_is_symmetric_and_consistent(a in small_surface(), b in small_surface()) {
            let ab = intersect_surfaces(&a, &b);
            prop_assert_eq!(ab, intersect_surfaces(&b, &a));
            if let Intersection::Line(line) = ab {
                prop_assert_eq!(line.c_over_n(), line.e_p() - line.e_pstar());
                prop_assert!(line.lies_on(&a) && line.lies_on(&b));
                if !a.has_zero_index() {
                    let lam = lambda_of_intersection(&a, &b).unwrap();
                    prop_assert_eq!(lam.lambda() + lam.lambda_star(), Rational::ONE);
                    prop_assert_eq!(lam.line_params(&a).unwrap(), line);
                    prop_assert_eq!(line.lambda_on(&a).unwrap(), lam);
                }
            }
        }
    }
}
