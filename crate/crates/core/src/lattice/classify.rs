use serde::Serialize;

use super::{gcd, intersect_surfaces, lambda_of_intersection, LambdaPair, LineParams, Surface};
use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum VerdictTag {
    NotAbelian,
    /// λ, λ* non-vanishing integers.
    IntegerLambda,
    /// `λ/m - λ*/n ∈ ℤ` and the common reduced denominator `d` divides `m + n`.
    Condition2,
    /// `S_{0,n}` or `S_{m,0}`: abelian everywhere on the surface.
    WholeSurface,
    /// `S_{±(1,-1)}`: the critical level, generators in the extended center.
    ExtendedCenter,
    SuperAbelian,
}

impl VerdictTag {
    pub fn is_abelian(self) -> bool {
        !matches!(self, VerdictTag::NotAbelian)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "kind")]
pub enum Witness {
    /// `λ/m ≡ γ/d (mod 1)`, `g = gcd(m,n)`, `γ' g + γ (m+n)/d = 1`.
    Condition2 {
        d: i64,
        gamma: i64,
        gamma_prime: i64,
        g: i64,
    },
    /// `β₀ m - β₀' λ = 1` with `1 <= β₀' <= m-1`.
    Bezout { beta0: i64, beta0_prime: i64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct AbelianityVerdict {
    pub tag: VerdictTag,
    pub witness: Option<Witness>,
    /// For `N = 2` the conditions are only known to be sufficient.
    pub n_caveat: bool,
}

impl AbelianityVerdict {
    fn bare(tag: VerdictTag, n: u32) -> Self {
        AbelianityVerdict {
            tag,
            witness: None,
            n_caveat: n == 2,
        }
    }

    pub fn is_abelian(&self) -> bool {
        self.tag.is_abelian()
    }

    /// The condition-2 denominator `d`, when present.
    pub fn d(&self) -> Option<i64> {
        match self.witness {
            Some(Witness::Condition2 { d, .. }) => Some(d),
            _ => None,
        }
    }
}

/// Classify the line with coordinates `lam` on `s` for `gl(N)`.
///
/// λ = 0 or λ* = 0 puts a nome on `|p| = 1` and is reported as not abelian.
pub fn classify_lambda(s: &Surface, lam: &LambdaPair, n: u32) -> AbelianityVerdict {
    if s.has_zero_index() {
        return AbelianityVerdict::bare(VerdictTag::WholeSurface, n);
    }
    if s.is_critical_level() {
        return AbelianityVerdict::bare(VerdictTag::ExtendedCenter, n);
    }
    let (lambda, lambda_star) = (lam.lambda(), lam.lambda_star());
    if lambda.is_integer() {
        let tag = if lambda.is_zero() || lambda_star.is_zero() {
            VerdictTag::NotAbelian
        } else {
            VerdictTag::IntegerLambda
        };
        return AbelianityVerdict::bare(tag, n);
    }
    match condition2_witness(s, lam) {
        Some(w) => AbelianityVerdict {
            tag: VerdictTag::Condition2,
            witness: Some(w),
            n_caveat: n == 2,
        },
        None => AbelianityVerdict::bare(VerdictTag::NotAbelian, n),
    }
}

/// Witness for condition 2, or `None` when it fails. Requires `m, n != 0`.
pub(crate) fn condition2_witness(s: &Surface, lam: &LambdaPair) -> Option<Witness> {
    let (m, n) = (s.m(), s.n());
    let a = lam.lambda() / m;
    let b = lam.lambda_star() / n;
    if !(a - b).is_integer() {
        return None;
    }
    // a - b integral forces equal reduced denominators
    let d = a.denom();
    debug_assert_eq!(d, b.denom());
    if (m + n) % d != 0 {
        return None;
    }
    let g = gcd(m, n);
    let gamma = a.mod_one().numer();
    let rest = 1 - gamma * ((m + n) / d);
    debug_assert_eq!(rest % g, 0, "surface condition forces g | 1 - γ(m+n)/d");
    Some(Witness::Condition2 {
        d,
        gamma,
        gamma_prime: rest / g,
        g,
    })
}

/// Which clause of the intersection criterion fired.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum TheoremCase {
    /// `m(n-n')/(m'n-mn') ∈ ℤ`
    A,
    /// `(m+n-m'-n')/(m'n-mn') ∈ ℤ`, `(m+n)(m'+n') != 0`
    B,
    /// the other surface is `S_{±(1,-1)}`
    C,
    /// this surface is `S_{±(1,-1)}`
    CPrime,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SideVerdict {
    pub surface: Surface,
    pub lambda: Option<LambdaPair>,
    pub verdict: AbelianityVerdict,
    pub case: Option<TheoremCase>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct IntersectionVerdicts {
    pub line: LineParams,
    pub first: SideVerdict,
    pub second: SideVerdict,
}

/// Classify `S_{m,n} ∩ S_{m',n'}` on both surfaces from the integer criterion,
/// cross-checked against [`classify_lambda`] on each side.
pub fn classify_intersection(a: &Surface, b: &Surface, n: u32) -> Result<IntersectionVerdicts> {
    let line = intersect_surfaces(a, b).into_result()?;
    Ok(IntersectionVerdicts {
        line,
        first: classify_side(a, b, n)?,
        second: classify_side(b, a, n)?,
    })
}

fn classify_side(this: &Surface, other: &Surface, n: u32) -> Result<SideVerdict> {
    if this.has_zero_index() {
        return Ok(SideVerdict {
            surface: *this,
            lambda: None,
            verdict: AbelianityVerdict::bare(VerdictTag::WholeSurface, n),
            case: None,
        });
    }
    let (m, nn, mp, np) = (this.m(), this.n(), other.m(), other.n());
    let det = mp * nn - m * np;
    let case = if this.is_critical_level() {
        Some(TheoremCase::CPrime)
    } else if Rational::frac(m * (nn - np), det).is_integer() {
        Some(TheoremCase::A)
    } else if Rational::frac(m + nn - mp - np, det).is_integer() && (m + nn) * (mp + np) != 0 {
        Some(TheoremCase::B)
    } else if other.is_critical_level() {
        Some(TheoremCase::C)
    } else {
        None
    };
    let expected = match case {
        Some(TheoremCase::CPrime) => VerdictTag::ExtendedCenter,
        Some(TheoremCase::A) => VerdictTag::IntegerLambda,
        Some(TheoremCase::B) | Some(TheoremCase::C) => VerdictTag::Condition2,
        None => VerdictTag::NotAbelian,
    };
    let lam = lambda_of_intersection(this, other)?;
    let verdict = classify_lambda(this, &lam, n);
    if verdict.tag != expected {
        return Err(Error::CrossCheck(format!(
            "{this} ∩ {other}: integer criterion gives {expected:?}, λ = {} gives {:?}",
            lam.lambda(),
            verdict.tag
        )));
    }
    Ok(SideVerdict {
        surface: *this,
        lambda: Some(lam),
        verdict,
        case,
    })
}
