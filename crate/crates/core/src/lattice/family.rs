use std::ops::RangeInclusive;

use serde::Serialize;

use super::{
    canonical_bezout, classify_lambda, gcd, intersect_surfaces, lambda_of_intersection, LambdaPair,
    Surface, VerdictTag,
};
use crate::error::{Error, Result};
use crate::rational::Rational;

/// Surfaces `s2 + t (s1 - s2)/g₀` for `t` in `t_range`, with `g₀` the gcd of
/// the difference. Every member is checked to cut out the same line.
pub fn surfaces_through_line(
    s1: &Surface,
    s2: &Surface,
    t_range: RangeInclusive<i64>,
) -> Result<Vec<Surface>> {
    let line = intersect_surfaces(s1, s2).into_result()?;
    let (dm, dn) = (s1.m() - s2.m(), s1.n() - s2.n());
    let g0 = gcd(dm, dn);
    let (dm, dn) = (dm / g0, dn / g0);
    let mut out = Vec::new();
    for t in t_range {
        let (m, n) = (s2.m() + t * dm, s2.n() + t * dn);
        let Ok(s) = Surface::new(m, n) else { continue };
        let partner = if s == *s1 { s2 } else { s1 };
        if intersect_surfaces(&s, partner).line() != Some(&line) {
            return Err(Error::CrossCheck(format!(
                "{s} does not reproduce the line of {s1} and {s2}"
            )));
        }
        out.push(s);
    }
    Ok(out)
}

/// One family of condition-2 solutions on a surface, indexed by `k ∈ ℤ`:
/// `λ/m = γ'ℓ + γ/d + k n/g`, `λ*/n = γ'ℓ' + γ/d - k m/g`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct LambdaFamily {
    pub surface: Surface,
    pub d: i64,
    pub gamma: i64,
    pub gamma_prime: i64,
    pub g: i64,
    /// Bézout pair `ℓ m + ℓ' n = g`.
    pub ell: i64,
    pub ell_prime: i64,
}

impl LambdaFamily {
    pub fn member(&self, k: i64) -> LambdaPair {
        let (m, n) = (self.surface.m(), self.surface.n());
        let shift = Rational::frac(self.gamma, self.d);
        let lambda = (shift + self.gamma_prime * self.ell + Rational::frac(k * n, self.g)) * m;
        let lambda_star =
            (shift + self.gamma_prime * self.ell_prime - Rational::frac(k * m, self.g)) * n;
        LambdaPair::from_parts(lambda, lambda_star)
            .expect("family members satisfy λ + λ* = 1 by construction")
    }
}

/// Every condition-2 family on `s`.
///
/// Pairs `(d, γ)` with `d | m` are skipped: they give integer λ, which is
/// classified as [`VerdictTag::IntegerLambda`] instead.
pub fn solve_condition2(s: &Surface) -> Result<Vec<LambdaFamily>> {
    if s.has_zero_index() {
        return Err(Error::DegenerateParametrization(*s));
    }
    let (m, n) = (s.m(), s.n());
    let total = m + n;
    if total == 0 {
        return Err(Error::Precondition(format!("m + n = 0 on {s}")));
    }
    let b = canonical_bezout(m, n);
    let mut out = Vec::new();
    for d in divisors(total.abs()) {
        if m % d == 0 {
            continue;
        }
        for gamma in 1..d {
            if gcd(gamma, d) != 1 {
                continue;
            }
            let rest = 1 - gamma * (total / d);
            if rest % b.g != 0 {
                continue;
            }
            let family = LambdaFamily {
                surface: *s,
                d,
                gamma,
                gamma_prime: rest / b.g,
                g: b.g,
                ell: b.x,
                ell_prime: b.y,
            };
            for k in -2..=2 {
                let v = classify_lambda(s, &family.member(k), 3);
                if v.tag != VerdictTag::Condition2 || v.d() != Some(d) {
                    return Err(Error::CrossCheck(format!(
                        "family (d={d}, γ={gamma}) member k={k} on {s} classified {:?}",
                        v.tag
                    )));
                }
            }
            out.push(family);
        }
    }
    if out.is_empty() {
        return Err(Error::EmptyFamily(*s));
    }
    Ok(out)
}

fn divisors(n: i64) -> impl Iterator<Item = i64> {
    (1..=n).filter(move |d| n % d == 0)
}

/// Which explicit construction produced the seed surfaces.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Construction {
    /// `m' = m(ℓ₀ + kλ*)`, `n' = n(ℓ₀' - kλ)` with `ℓ₀λ + ℓ₀'λ* = 1`.
    IntegerLambda,
    /// `m' = m - b v/g`, `n' = n + a v/g` where `λ/m = a/d`, `λ*/n = b/d`.
    Condition2,
    /// `m' = (1-a)m + d`, `n' = (1-a)n` for `λ/m = a/d`, scaled by `k`.
    Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Realization {
    /// Surfaces through the line, nearest to `s` first, walking toward the origin.
    pub surfaces: Vec<Surface>,
    pub construction: Construction,
    /// Verified output of the explicit construction.
    pub constructed: Vec<Surface>,
    /// Construction candidates that failed verification.
    pub rejected: Vec<Surface>,
}

/// Exhibit `count` surfaces cutting `s` along the line with coordinates `lam`.
///
/// The explicit construction is run first and each candidate verified with
/// [`lambda_of_intersection`]. The returned list then walks the primitive
/// direction of the line, which contains every surface through it.
pub fn realize_line_as_intersections(
    s: &Surface,
    lam: &LambdaPair,
    count: usize,
) -> Result<Realization> {
    if s.has_zero_index() {
        return Err(Error::DegenerateParametrization(*s));
    }
    let failed = |found| Error::ConstructionFailed {
        wanted: count,
        found,
    };
    let (m, n) = (s.m(), s.n());
    let (a, b) = (lam.lambda() / m, lam.lambda_star() / n);
    if a.is_zero() || b.is_zero() {
        // every surface through the line shares m or n with s
        return Err(failed(0));
    }

    let verifies = |c: &Surface| lambda_of_intersection(s, c).as_ref() == Ok(lam);
    let mut constructed = Vec::new();
    let mut rejected = Vec::new();
    let mut offer = |m2: i64, n2: i64| {
        let Ok(c) = Surface::new(m2, n2) else { return };
        if c == *s || constructed.contains(&c) || rejected.contains(&c) {
            return;
        }
        if verifies(&c) {
            constructed.push(c);
        } else {
            rejected.push(c);
        }
    };

    let construction = if lam.lambda().is_integer() {
        let (l, ls) = (lam.lambda().numer(), lam.lambda_star().numer());
        let bz = canonical_bezout(l, ls);
        for k in (-(count as i64) - 2)..=(count as i64 + 2) {
            offer(m * (bz.x + k * ls), n * (bz.y - k * l));
        }
        Construction::IntegerLambda
    } else if (a - b).is_integer() {
        let (an, bn) = (a.numer(), b.numer());
        let g = gcd(an, bn);
        for v in (1..=count as i64 + 1).flat_map(|v| [v, -v]) {
            offer(m - bn / g * v, n + an / g * v);
        }
        Construction::Condition2
    } else {
        let (an, d) = (a.numer(), a.denom());
        for k in 1..=count as i64 + 1 {
            // the unsigned variant realizes -a/d; kept behind the gate
            offer((an * k + 1) * m + d * k, (an * k + 1) * n);
            offer((1 - an * k) * m + d * k, (1 - an * k) * n);
        }
        Construction::Rational
    };

    // primitive direction of m'a + n'b = 1
    let l = num_integer::lcm(a.denom(), b.denom());
    let (dm, dn) = ((b * l).numer(), -(a * l).numer());
    let g = gcd(dm, dn);
    let (dm, dn) = (dm / g, dn / g);
    let sign = if (m - dm).abs() + (n - dn).abs() < (m + dm).abs() + (n + dn).abs() {
        -1
    } else {
        1
    };
    let mut surfaces = Vec::with_capacity(count);
    let mut t = 0i64;
    while surfaces.len() < count {
        t += sign;
        let Ok(c) = Surface::new(m + t * dm, n + t * dn) else {
            continue;
        };
        if !verifies(&c) {
            return Err(Error::CrossCheck(format!("{c} is off the line on {s}")));
        }
        surfaces.push(c);
    }
    if constructed.is_empty() {
        return Err(failed(0));
    }
    for c in &constructed {
        let (em, en) = (c.m() - m, c.n() - n);
        if em * dn != en * dm {
            return Err(Error::CrossCheck(format!(
                "constructed {c} is not on the primitive family of {s}"
            )));
        }
    }
    Ok(Realization {
        surfaces,
        construction,
        constructed,
        rejected,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(m: i64, n: i64) -> Surface {
        Surface::new(m, n).unwrap()
    }

    #[test]
    fn family_through_3_6_and_2_5() {
        assert_eq!(
            surfaces_through_line(&s(3, 6), &s(2, 5), 0..=2).unwrap(),
            vec![s(2, 5), s(3, 6), s(4, 7)]
        );
        assert_eq!(
            surfaces_through_line(&s(3, 6), &s(2, 5), -2..=-1).unwrap(),
            vec![s(0, 3), s(1, 4)]
        );
        assert_eq!(
            surfaces_through_line(&s(1, 2), &s(2, 1), 0..=0).unwrap(),
            vec![s(2, 1)]
        );
    }

    #[test]
    fn family_needs_an_intersection() {
        assert!(surfaces_through_line(&s(1, 2), &s(1, 5), 0..=3).is_err());
    }

    #[test]
    fn condition2_on_1_2() {
        let fams = solve_condition2(&s(1, 2)).unwrap();
        assert_eq!(fams.len(), 2);
        assert!(fams.iter().all(|f| f.d == 3));
        let found = fams
            .iter()
            .flat_map(|f| (-3..=3).map(move |k| f.member(k).lambda()))
            .any(|l| l == Rational::frac(1, 3));
        assert!(found);
    }

    #[test]
    fn condition2_on_2_2() {
        let fams = solve_condition2(&s(2, 2)).unwrap();
        let pairs: Vec<_> = fams.iter().map(|f| (f.d, f.gamma)).collect();
        assert_eq!(pairs, vec![(4, 1), (4, 3)]);
    }

    #[test]
    fn condition2_preconditions() {
        assert!(matches!(
            solve_condition2(&s(1, -1)),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            solve_condition2(&s(0, 4)),
            Err(Error::DegenerateParametrization(_))
        ));
        // m + n = ±1 leaves only d = 1
        assert_eq!(
            solve_condition2(&s(3, -2)),
            Err(Error::EmptyFamily(s(3, -2)))
        );
    }

    #[test]
    fn condition2_families_are_complete() {
        // brute force over λ/m = a/d, d | m+n, against the enumerated families
        for m in -5i64..=5 {
            for n in -5i64..=5 {
                if m == 0 || n == 0 || m + n == 0 {
                    continue;
                }
                let surf = s(m, n);
                let fams = solve_condition2(&surf).unwrap_or_default();
                for d in divisors((m + n).abs()) {
                    for a in -3 * d..3 * d {
                        let lam = LambdaPair::new(Rational::frac(a, d) * m);
                        if classify_lambda(&surf, &lam, 3).tag != VerdictTag::Condition2 {
                            continue;
                        }
                        let hit = fams.iter().any(|f| {
                            let base = f.member(0).lambda() / m;
                            let step = Rational::frac(n, f.g);
                            ((lam.lambda() / m - base) / step).is_integer()
                        });
                        assert!(hit, "λ = {} on {surf} missing", lam.lambda());
                    }
                }
            }
        }
    }

    #[test]
    fn realize_integer_line() {
        let lam = LambdaPair::new(Rational::integer(-1));
        let r = realize_line_as_intersections(&s(3, 6), &lam, 2).unwrap();
        assert_eq!(r.surfaces, vec![s(2, 5), s(1, 4)]);
        assert_eq!(r.construction, Construction::IntegerLambda);
        assert!(!r.constructed.is_empty());
        for c in &r.constructed {
            assert_eq!(lambda_of_intersection(&s(3, 6), c).unwrap(), lam);
            assert_eq!(c.m() % 3, 0);
        }
    }

    #[test]
    fn realize_condition2_line() {
        let lam = LambdaPair::new(Rational::frac(1, 3));
        let r = realize_line_as_intersections(&s(1, 2), &lam, 1).unwrap();
        assert_eq!(r.construction, Construction::Condition2);
        assert!(r.constructed.contains(&s(2, 1)));
        assert!(r.rejected.is_empty());
    }

    #[test]
    fn realize_generic_rational_rejects_unsigned_variant() {
        // not abelian, but the line still exists
        let lam = LambdaPair::new(Rational::frac(-2, 3));
        let r = realize_line_as_intersections(&s(2, 5), &lam, 3).unwrap();
        assert_eq!(r.construction, Construction::Rational);
        assert!(!r.rejected.is_empty());
        assert_eq!(r.surfaces.len(), 3);
        for c in r.surfaces.iter().chain(&r.constructed) {
            assert_eq!(lambda_of_intersection(&s(2, 5), c).unwrap(), lam);
        }
    }

    #[test]
    fn realize_fails_on_vanishing_lambda() {
        let lam = LambdaPair::new(Rational::ZERO);
        assert_eq!(
            realize_line_as_intersections(&s(2, 3), &lam, 3),
            Err(Error::ConstructionFailed {
                wanted: 3,
                found: 0
            })
        );
    }
}
