//! The quadratic Poisson structure `{t(z), t(w)} = f(z/w) t(z) t(w)` on
//! abelianity lines.
//!
//! Each `f` is available twice: a compact route assembling `x d/dx ln U_a`
//! from the θ log-derivative of its four factors, and a series route that sums
//! the `I(x)` double series directly in `x²`. The two only agree through the
//! inversion identity `V(w) + V(1/w) = -1` of the θ log-derivative.

use num_complex::Complex64;
use serde::Serialize;

use crate::elliptic::{check_levels, half_step_offsets, EllipticContext};
use crate::error::{Error, Result};
use crate::lattice::{gcd, Surface};
use crate::rational::Rational;

const POLE_TOL: f64 = 1e-9;
const MAX_TERMS: f64 = 1e6;

/// `Σ_{s>=start} w a^s / (1 - w a^s)`.
fn geometric_sum(w: Complex64, a: f64, start: u32, eps: f64) -> Result<Complex64> {
    let r = w.norm();
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::Domain(format!("θ log-derivative argument {w}")));
    }
    let tail = ((eps * (1.0 - a)).ln() - r.ln()) / a.ln();
    if tail.is_nan() || tail >= MAX_TERMS {
        return Err(Error::Domain(format!(
            "θ log-derivative at {w} (nome {a}) needs more than {MAX_TERMS} terms"
        )));
    }
    let end = (tail.ceil().max(0.0) as u32).max(start) + 1;
    let mut acc = Complex64::new(0.0, 0.0);
    let mut term = w * a.powi(start as i32);
    for _ in start..end {
        let den = 1.0 - term;
        if den.norm() < POLE_TOL {
            return Err(Error::Pole(format!("θ log-derivative at {w} (nome {a})")));
        }
        // for |term| > 1 divide through by term to keep |den|² representable
        acc += if term.norm() > 1.0 {
            (term.inv() - 1.0).inv()
        } else {
            term / den
        };
        term *= a;
    }
    if !acc.is_finite() {
        return Err(Error::Domain(format!("θ log-derivative at {w} overflowed")));
    }
    Ok(acc)
}

/// `-x d/dx ln θ_a(x) = Σ_{s>=0} x a^s/(1 - x a^s) - Σ_{s>=1} x⁻¹ a^s/(1 - x⁻¹ a^s)`.
pub fn theta_logderiv_series(a: f64, x: Complex64, eps: f64) -> Result<Complex64> {
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::Domain(format!("nome {a} outside (0, 1)")));
    }
    if x.norm() == 0.0 || !x.is_finite() {
        return Err(Error::Domain(format!("argument {x}")));
    }
    Ok(geometric_sum(x, a, 0, eps)? - geometric_sum(x.inv(), a, 1, eps)?)
}

/// `x d/dx ln U_a(x)`: each `θ_a(c x^{±2})` contributes `∓2 V(c x^{±2})`.
pub fn logderiv_ua(ctx: &EllipticContext, a: f64, x: Complex64) -> Result<Complex64> {
    let eps = ctx.eps_trunc();
    let v = |w| theta_logderiv_series(a, w, eps);
    let q2 = ctx.q() * ctx.q();
    let x2 = x * x;
    Ok(2.0 * (v(x2)? - v(x2.inv())? - v(q2 * x2)? + v(q2 / x2)?))
}

/// Type (a) data: `λ ∈ ℤ`, `ℓ = m/w`, `ℓ* = n/w*` with `w = ±gcd(λ, m)`
/// carrying the sign of `m` (and `w*` that of `n`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PoissonParamsA {
    pub surface: Surface,
    pub lambda: i64,
    pub w: i64,
    pub w_star: i64,
    pub ell: i64,
    pub ell_star: i64,
}

impl PoissonParamsA {
    pub fn new(surface: Surface, lambda: i64) -> Result<Self> {
        let (m, n) = (surface.m(), surface.n());
        if surface.has_zero_index() {
            return Err(Error::DegenerateParametrization(surface));
        }
        let lambda_star = 1 - lambda;
        if lambda == 0 || lambda_star == 0 {
            return Err(Error::Precondition("λ and λ* must be non-zero".into()));
        }
        let w = gcd(lambda, m) * m.signum();
        let w_star = gcd(lambda_star, n) * n.signum();
        Ok(PoissonParamsA {
            surface,
            lambda,
            w,
            w_star,
            ell: m / w,
            ell_star: n / w_star,
        })
    }
}

/// Type (b) data: `λ/m` and `λ*/n` share the reduced denominator `d`,
/// `d | m + n`, and `μ = m mod d`.
///
/// `μ = 0` happens only when λ is an integer; that is the overlap with type (a).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PoissonParamsB {
    pub surface: Surface,
    pub lambda: Rational,
    pub d: i64,
    pub mu: i64,
}

impl PoissonParamsB {
    pub fn new(surface: Surface, lambda: Rational) -> Result<Self> {
        let (m, n) = (surface.m(), surface.n());
        if surface.has_zero_index() {
            return Err(Error::DegenerateParametrization(surface));
        }
        let a = lambda / m;
        let b = (Rational::ONE - lambda) / n;
        let d = a.denom();
        if !(a - b).is_integer() || (m + n) % d != 0 {
            return Err(Error::Precondition(format!(
                "λ = {lambda} on {surface} is not a type (b) line"
            )));
        }
        Ok(PoissonParamsB {
            surface,
            lambda,
            d,
            mu: m.rem_euclid(d),
        })
    }

    fn mn(&self) -> f64 {
        (self.surface.m() * self.surface.n()) as f64
    }

    /// `s² = p = q^{-2Nλ/m}`.
    fn p(&self, ctx: &EllipticContext) -> f64 {
        ctx.q_pow_n(self.lambda / self.surface.m() * -2)
    }

    fn prefactor(&self, ctx: &EllipticContext) -> f64 {
        let m_plus_n = (self.surface.m() + self.surface.n()) as f64;
        -(ctx.n() as f64) * self.lambda.to_f64() * ctx.q().ln() * m_plus_n / self.d as f64
    }
}

/// Compact form of `f` on a type (a) line.
pub fn f_type_a(ctx: &EllipticContext, params: &PoissonParamsA, x: Complex64) -> Result<Complex64> {
    let (m, n) = (params.surface.m() as f64, params.surface.n() as f64);
    let two_n = 2.0 * ctx.n() as f64;
    let a = ctx.q().powf(two_n / params.ell as f64);
    let a_star = ctx.q().powf(two_n / params.ell_star as f64);
    let bracket = m / params.ell as f64 * logderiv_ua(ctx, a, x)?
        + n / params.ell_star as f64 * logderiv_ua(ctx, a_star, x)?;
    Ok(-(ctx.n() as f64) * params.lambda as f64 * ctx.q().ln() * bracket)
}

/// `2I(x) - I(qx) - I(x/q)` for an `I` given as a function of `x²`.
fn second_difference(
    ctx: &EllipticContext,
    x: Complex64,
    i_of_x2: impl Fn(Complex64) -> Result<Complex64>,
) -> Result<Complex64> {
    let q2 = ctx.q() * ctx.q();
    let x2 = x * x;
    Ok(2.0 * i_of_x2(x2)? - i_of_x2(q2 * x2)? - i_of_x2(x2 / q2)?)
}

/// `Σ_{s>=0} y a^s/(1-y a^s) - Σ_{s>=1} y⁻¹ a^s/(1-y⁻¹ a^s)` at `y = x²`.
fn split_series(y: Complex64, a: f64, eps: f64) -> Result<Complex64> {
    Ok(geometric_sum(y, a, 0, eps)? - geometric_sum(y.inv(), a, 1, eps)?)
}

/// Series form of `f` on a type (a) line.
pub fn f_type_a_series(
    ctx: &EllipticContext,
    params: &PoissonParamsA,
    x: Complex64,
) -> Result<Complex64> {
    let (m, n) = (params.surface.m() as f64, params.surface.n() as f64);
    let (ell, ell_star) = (params.ell as f64, params.ell_star as f64);
    let two_n = 2.0 * ctx.n() as f64;
    let a = ctx.q().powf(two_n / ell);
    let a_star = ctx.q().powf(two_n / ell_star);
    let eps = ctx.eps_trunc();
    let i =
        |y| Ok(m / ell * split_series(y, a, eps)? + n / ell_star * split_series(y, a_star, eps)?);
    let prefactor = -two_n * params.lambda as f64 * ctx.q().ln();
    Ok(prefactor * second_difference(ctx, x, i)?)
}

/// Compact form of `f` on a type (b) line.
pub fn f_type_b(ctx: &EllipticContext, params: &PoissonParamsB, x: Complex64) -> Result<Complex64> {
    let (d, mu, mn) = (params.d as f64, params.mu as f64, params.mn());
    let big = ctx.nome();
    let small = ctx.q().powf(2.0 * ctx.n() as f64 / d);
    let shift = -params.lambda / params.surface.m();
    let mut bracket = (1.0 + mu * mu / mn) * logderiv_ua(ctx, small, x)?
        - d * mu / mn * logderiv_ua(ctx, big, x)?;
    for k in 1..params.mu {
        // s^k = q^{N kλ'} with λ' = -λ/m; U is q^N-periodic, so only kλ' mod 1 matters
        let sk = ctx.q_pow_n((shift * k).mod_one());
        let pair = logderiv_ua(ctx, big, sk * x)? + logderiv_ua(ctx, big, x / sk)?;
        bracket += d / mn * (k as f64 - mu) * pair;
    }
    Ok(params.prefactor(ctx) * bracket)
}

/// Series form of `f` on a type (b) line.
pub fn f_type_b_series(
    ctx: &EllipticContext,
    params: &PoissonParamsB,
    x: Complex64,
) -> Result<Complex64> {
    let (d, mu, mn) = (params.d as f64, params.mu as f64, params.mn());
    let big = ctx.nome();
    let small = ctx.q().powf(2.0 * ctx.n() as f64 / d);
    let p = params.p(ctx);
    let eps = ctx.eps_trunc();
    let i = |y: Complex64| {
        let mut acc = (1.0 + mu * mu / mn) * split_series(y, small, eps)?
            + d * mu / mn * split_series(y, big, eps)?;
        for k in 0..params.mu {
            let (pk, pmk) = (p.powi(k as i32), p.powi(-(k as i32)));
            let inner = geometric_sum(y * pk, big, 0, eps)? + geometric_sum(y * pmk, big, 1, eps)?
                - geometric_sum(y.inv() * pk, big, 0, eps)?
                - geometric_sum(y.inv() * pmk, big, 1, eps)?;
            acc += d / mn * (k as f64 - mu) * inner;
        }
        Ok(acc)
    };
    Ok(2.0 * params.prefactor(ctx) * second_difference(ctx, x, i)?)
}

/// An abelianity line with its Poisson data.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "type")]
pub enum PoissonLine {
    A(PoissonParamsA),
    B(PoissonParamsB),
}

impl PoissonLine {
    pub fn f(&self, ctx: &EllipticContext, x: Complex64) -> Result<Complex64> {
        match self {
            PoissonLine::A(p) => f_type_a(ctx, p, x),
            PoissonLine::B(p) => f_type_b(ctx, p, x),
        }
    }

    pub fn f_series(&self, ctx: &EllipticContext, x: Complex64) -> Result<Complex64> {
        match self {
            PoissonLine::A(p) => f_type_a_series(ctx, p, x),
            PoissonLine::B(p) => f_type_b_series(ctx, p, x),
        }
    }
}

/// `f^{(k,k')}(x) = Σ_{i,j} f(q^{i-j} x)`.
pub fn f_kk(
    ctx: &EllipticContext,
    line: &PoissonLine,
    k: u32,
    kp: u32,
    x: Complex64,
) -> Result<Complex64> {
    check_levels(ctx, k, kp)?;
    half_step_offsets(k, kp)
        .into_iter()
        .try_fold(Complex64::new(0.0, 0.0), |acc, o| {
            Ok(acc + line.f(ctx, x * ctx.q().powf(o))?)
        })
}
