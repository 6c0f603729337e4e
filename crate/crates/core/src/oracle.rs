//! Exact cancellation oracle for products of `U` functions.
//!
//! A factor `U(q^{N t} x)` depends on `t` only modulo 1 (the `q^N`
//! periodicity of `U`), and on the sign of its argument not at all. A ratio of
//! such factors is therefore captured by a signed multiset of `t mod 1`; the
//! ratio is identically 1 when every entry cancels. This is independent of the
//! diophantine classification in [`crate::lattice`] and serves as its oracle.

use std::collections::BTreeMap;

use num_integer::Integer;
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::lattice::{LambdaPair, Surface};
use crate::rational::Rational;

/// Signed multiset of exponents in `[0, 1)`: positive multiplicity for
/// numerator factors, negative for denominator factors.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExponentMultiset {
    entries: BTreeMap<Rational, i64>,
}

impl ExponentMultiset {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_lists<'a>(
        numerator: impl IntoIterator<Item = &'a Rational>,
        denominator: impl IntoIterator<Item = &'a Rational>,
    ) -> Self {
        let mut out = Self::new();
        numerator.into_iter().for_each(|t| out.add(*t, 1));
        denominator.into_iter().for_each(|t| out.add(*t, -1));
        out
    }

    /// Add `multiplicity` copies of `t mod 1`.
    pub fn add(&mut self, t: Rational, multiplicity: i64) {
        let key = t.mod_one();
        let e = self.entries.entry(key).or_insert(0);
        *e += multiplicity;
        if *e == 0 {
            self.entries.remove(&key);
        }
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn multiplicity(&self, t: Rational) -> i64 {
        self.entries.get(&t.mod_one()).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Rational, i64)> + '_ {
        self.entries.iter().map(|(t, k)| (*t, *k))
    }
}

impl Serialize for ExponentMultiset {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Entry {
            t: Rational,
            multiplicity: i64,
        }
        let mut seq = serializer.serialize_seq(Some(self.len()))?;
        for (t, multiplicity) in self.iter() {
            seq.serialize_element(&Entry { t, multiplicity })?;
        }
        seq.end()
    }
}

/// Exponents of `Y_{m,n}` on the line `lam` of `s`.
///
/// With `s = q^{-Nλ/m}`, `s* = q^{-Nλ*/n}`,
/// `Y = F*_n(x) F*_{-n}(x) / (F_m(x) F_{-m}(x))`. On `S_{0,n}` the relation
/// `s*^n = q^{-N}` is used directly and `lam` is ignored; `S_{m,0}` likewise.
pub fn exchange_exponents(s: &Surface, lam: &LambdaPair) -> ExponentMultiset {
    let (m, n) = (s.m(), s.n());
    let mut out = ExponentMultiset::new();
    if m == 0 || n == 0 {
        // s_*^{-ℓ} x with s_*^{|k|} = q^{∓N}: t = ℓ/k
        let k = if m == 0 { n } else { m };
        for l in 0..k.abs() {
            out.add(Rational::frac(-l, k), 1);
        }
        for l in 1..=k.abs() {
            out.add(Rational::frac(l, k), -1);
        }
        return out;
    }
    let a = lam.lambda() / m;
    let b = lam.lambda_star() / n;
    for l in 1..=m.abs() {
        out.add(a * l, 1);
    }
    for l in 1..n.abs() {
        out.add(-b * l, 1);
    }
    for l in 1..m.abs() {
        out.add(-a * l, -1);
    }
    for l in 1..=n.abs() {
        out.add(b * l, -1);
    }
    out
}

pub fn is_abelian(mset: &ExponentMultiset) -> bool {
    mset.is_empty()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReducedForm {
    pub numerator: Vec<Rational>,
    pub denominator: Vec<Rational>,
}

impl ReducedForm {
    pub fn to_multiset(&self) -> ExponentMultiset {
        ExponentMultiset::from_lists(&self.numerator, &self.denominator)
    }
}

/// The products left after the within-side cancellations, before any
/// cross-cancellation: with `λ/m = a/d`, `λ*/n = b/d'`, `|m| = ds + μ` and
/// `μ̄ = min(μ, d-μ)`, numerator `{aj/d}_{j≤μ̄} ∪ {bj'/d'}_{j'>d'-μ̄'}` and
/// denominator `{aj/d}_{j>d-μ̄} ∪ {bj'/d'}_{j'≤μ̄'}`.
pub fn reduced_form(s: &Surface, lam: &LambdaPair) -> Result<ReducedForm> {
    if s.has_zero_index() {
        return Err(Error::DegenerateParametrization(*s));
    }
    if lam.lambda().is_integer() {
        return Err(Error::IntegerLambdaShortcut);
    }
    let (m, n) = (s.m(), s.n());
    let side = |r: Rational, len: i64| {
        let (a, d) = (r.numer(), r.denom());
        let mu = len.abs().mod_floor(&d);
        let mu_bar = mu.min(d - mu);
        let low: Vec<_> = (1..=mu_bar)
            .map(|j| Rational::frac(a * j, d).mod_one())
            .collect();
        let high: Vec<_> = (d - mu_bar + 1..d)
            .map(|j| Rational::frac(a * j, d).mod_one())
            .collect();
        (low, high)
    };
    let (a_low, a_high) = side(lam.lambda() / m, m);
    let (b_low, b_high) = side(lam.lambda_star() / n, n);
    Ok(ReducedForm {
        numerator: a_low.into_iter().chain(b_high).collect(),
        denominator: a_high.into_iter().chain(b_low).collect(),
    })
}

/// Exponents of `∏_{k=1}^{m} U(s*^{-k}x)/U(s^{-k}x)` on `S_{m,-m}`.
pub fn centrality_exponents(m: i64, lambda: i64) -> Result<ExponentMultiset> {
    if m <= 0 {
        return Err(Error::Precondition(format!("m = {m} must be positive")));
    }
    let mut out = ExponentMultiset::new();
    for k in 1..=m {
        out.add(Rational::frac((lambda - 1) * k, m), 1);
        out.add(Rational::frac(lambda * k, m), -1);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{classify_lambda, super_abelianity_check};
    use proptest::prelude::*;

    fn s(m: i64, n: i64) -> Surface {
        Surface::new(m, n).unwrap()
    }

    fn lam(a: i64, d: i64) -> LambdaPair {
        LambdaPair::new(Rational::frac(a, d))
    }

    #[test]
    fn examples() {
        assert!(exchange_exponents(&s(1, 2), &lam(1, 3)).is_empty());
        assert!(exchange_exponents(&s(0, 3), &lam(5, 7)).is_empty());
        assert!(exchange_exponents(&s(4, 0), &lam(5, 7)).is_empty());
        assert!(!exchange_exponents(&s(2, 5), &lam(-2, 3)).is_empty());
        assert!(is_abelian(&exchange_exponents(&s(3, 6), &lam(-1, 1))));
        let mut one = ExponentMultiset::new();
        one.add(Rational::frac(1, 3), 1);
        assert!(!is_abelian(&one));
        assert!(is_abelian(&ExponentMultiset::new()));
    }

    #[test]
    fn multiset_reduces_and_cancels() {
        let mut ms = ExponentMultiset::new();
        ms.add(Rational::frac(4, 3), 2);
        ms.add(Rational::frac(-2, 3), -2);
        assert!(ms.is_empty());
        ms.add(Rational::frac(-1, 4), 1);
        assert_eq!(ms.multiplicity(Rational::frac(3, 4)), 1);
    }

    #[test]
    fn reduced_form_examples() {
        let r = reduced_form(&s(1, 2), &lam(1, 3)).unwrap();
        assert_eq!(r.numerator, vec![Rational::frac(1, 3)]);
        assert_eq!(r.denominator, vec![Rational::frac(1, 3)]);
        assert_eq!(
            reduced_form(&s(3, 6), &lam(-1, 1)),
            Err(Error::IntegerLambdaShortcut)
        );
        let r = reduced_form(&s(2, 5), &lam(-2, 3)).unwrap();
        assert!(!r.to_multiset().is_empty());
    }

    #[test]
    fn centrality_examples() {
        assert!(centrality_exponents(3, 2).unwrap().is_empty());
        assert!(!centrality_exponents(9, 4).unwrap().is_empty());
        assert!(centrality_exponents(9, 2).unwrap().is_empty());
        assert!(centrality_exponents(0, 2).is_err());
    }

    #[test]
    fn centrality_matches_super_abelianity() {
        for m in (1..=15).step_by(2) {
            for l in -15i64..=15 {
                let exact = super_abelianity_check(m, l).unwrap().is_super_abelian();
                assert_eq!(
                    centrality_exponents(m, l).unwrap().is_empty(),
                    exact,
                    "m={m} λ={l}"
                );
            }
        }
    }

    #[test]
    fn oracle_matches_lattice_exhaustively() {
        // λ ∈ {0, 1} puts a nome on |p| = 1 and is excluded
        let mut checked = 0;
        for m in -6i64..=6 {
            for n in -6i64..=6 {
                if (m, n) == (0, 0) {
                    continue;
                }
                let surf = s(m, n);
                for d in 1..=12 {
                    for a in -3 * d..=3 * d {
                        if a.gcd(&d) != 1 || a == 0 || a == d {
                            continue;
                        }
                        let l = lam(a, d);
                        let exact = is_abelian(&exchange_exponents(&surf, &l));
                        let lattice = classify_lambda(&surf, &l, 3).is_abelian();
                        assert_eq!(exact, lattice, "{surf} λ={}", l.lambda());
                        checked += 1;
                    }
                }
            }
        }
        assert_eq!(checked, 46200);
    }

    proptest! {
        #[test]
        fn reduced_form_reproduces_exchange(m in -9i64..=9, n in -9i64..=9, a in -40i64..40, d in 2i64..15) {
            prop_assume!(m != 0 && n != 0);
            let l = lam(a, d);
            prop_assume!(!l.lambda().is_integer());
            let r = reduced_form(&s(m, n), &l).unwrap();
            prop_assert_eq!(r.to_multiset(), exchange_exponents(&s(m, n), &l));
        }

        #[test]
        fn exponents_ignore_sign_of_surface(m in 1i64..=8, n in 1i64..=8, a in -30i64..30, d in 1i64..12) {
            // (m,n) -> (-m,-n) flips s, s* to their inverses; U(z) = U(1/z) leaves Y invariant
            let l = lam(a, d);
            let plus = exchange_exponents(&s(m, n), &l);
            let minus = exchange_exponents(&s(-m, -n), &l);
            prop_assert_eq!(plus.is_empty(), minus.is_empty());
        }
    }
}
