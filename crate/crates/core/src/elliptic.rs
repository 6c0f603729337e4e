//! Floating-point evaluation of the short Jacobi θ, the structure function
//! `U`, and the exchange functions built from them.
//!
//! θ is evaluated in the log domain after reducing its argument into the
//! annulus `a <= |z| < 1`, so arguments far outside the unit circle neither
//! overflow nor lose the truncation guarantee.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::{LambdaPair, Surface};
use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EllipticContext {
    n: u32,
    q: f64,
    eps_trunc: f64,
    tol: f64,
}

impl EllipticContext {
    pub fn new(n: u32, q: f64) -> Result<Self> {
        Self::with_tolerances(n, q, 1e-16, 1e-10)
    }

    pub fn with_tolerances(n: u32, q: f64, eps_trunc: f64, tol: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::Domain(format!("N = {n}, expected N >= 2")));
        }
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::Domain(format!("q = {q} outside (0, 1)")));
        }
        if !(eps_trunc > 0.0 && tol > 0.0) {
            return Err(Error::Domain("tolerances must be positive".into()));
        }
        Ok(EllipticContext {
            n,
            q,
            eps_trunc,
            tol,
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn eps_trunc(&self) -> f64 {
        self.eps_trunc
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// `q^{2N}`, the nome of the θ factors in `U`.
    pub fn nome(&self) -> f64 {
        self.q.powi(2 * self.n as i32)
    }

    /// `q^{N t}`.
    pub fn q_pow_n(&self, t: Rational) -> f64 {
        self.q.powf(self.n as f64 * t.to_f64())
    }
}

fn check_nome(a: f64) -> Result<()> {
    if a > 0.0 && a < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("nome {a} outside (0, 1)")))
    }
}

fn check_arg(z: Complex64) -> Result<()> {
    if z == Complex64::new(0.0, 0.0) || !z.is_finite() {
        Err(Error::Domain(format!("θ argument {z}")))
    } else {
        Ok(())
    }
}

fn truncation(a: f64, eps: f64) -> usize {
    ((eps * (1.0 - a)).ln() / a.ln()).ceil().max(1.0) as usize
}

/// `ln θ_a(z)` on some branch, or `None` at a zero of θ.
pub fn ln_theta(a: f64, z: Complex64, eps: f64) -> Result<Option<Complex64>> {
    check_nome(a)?;
    check_arg(z)?;
    // z = a^k z0 with a <= |z0| < 1
    let k = (z.norm().ln() / a.ln()).ceil() - 1.0;
    let z0 = z * a.powf(-k);
    let mut acc = Complex64::new(0.0, 0.0);
    let mut ak = 1.0;
    for _ in 0..truncation(a, eps) {
        for w in [z0 * ak, a * ak / z0] {
            let f = Complex64::new(1.0, 0.0) - w;
            if f.norm() == 0.0 {
                return Ok(None);
            }
            acc += f.ln();
        }
        ak *= a;
    }
    let shift = Complex64::new(-k * (k - 1.0) / 2.0 * a.ln(), k * PI) - k * z0.ln();
    Ok(Some(acc + shift))
}

/// `θ_a(z) = (z; a)_∞ (a/z; a)_∞`.
pub fn theta(a: f64, z: Complex64, eps: f64) -> Result<Complex64> {
    Ok(ln_theta(a, z, eps)?.map_or(Complex64::new(0.0, 0.0), |l| l.exp()))
}

/// The truncated product without argument reduction; only reliable near the
/// unit circle. Kept as an independent reference for [`theta`].
pub fn theta_product(a: f64, z: Complex64, terms: usize) -> Result<Complex64> {
    check_nome(a)?;
    check_arg(z)?;
    let one = Complex64::new(1.0, 0.0);
    let mut acc = one;
    let mut ak = 1.0;
    for _ in 0..terms {
        acc *= (one - z * ak) * (one - a * ak / z);
        ak *= a;
    }
    Ok(acc)
}

fn on_lattice(w: Complex64, a: f64, tol: f64) -> bool {
    let k = (w.norm().ln() / a.ln()).round();
    (w * a.powf(-k) - 1.0).norm() < tol
}

/// `U_a(z) = q^{2/N-2} θ_a(q²z²) θ_a(q²z⁻²) / (θ_a(z²) θ_a(z⁻²))`.
pub fn ufunc_a(ctx: &EllipticContext, a: f64, z: Complex64) -> Result<Complex64> {
    check_nome(a)?;
    check_arg(z)?;
    let z2 = z * z;
    if on_lattice(z2, a, 10.0 * ctx.tol) {
        return Err(Error::Pole(format!("U at z = {z}: z² ∈ a^ℤ")));
    }
    let q2 = ctx.q * ctx.q;
    let eps = ctx.eps_trunc;
    let (Some(n1), Some(n2)) = (ln_theta(a, q2 * z2, eps)?, ln_theta(a, q2 / z2, eps)?) else {
        return Ok(Complex64::new(0.0, 0.0));
    };
    let d1 = ln_theta(a, z2, eps)?;
    let d2 = ln_theta(a, z2.inv(), eps)?;
    let (Some(d1), Some(d2)) = (d1, d2) else {
        return Err(Error::Pole(format!("U at z = {z}")));
    };
    let pref = (2.0 / ctx.n as f64 - 2.0) * ctx.q.ln();
    Ok((n1 + n2 - d1 - d2 + pref).exp())
}

/// `U(z)`, the case `a = q^{2N}` of [`ufunc_a`].
pub fn ufunc(ctx: &EllipticContext, z: Complex64) -> Result<Complex64> {
    ufunc_a(ctx, ctx.nome(), z)
}

/// `F_a(x)` for a complex half-nome `s`.
pub fn calf_half_nome(
    ctx: &EllipticContext,
    s: Complex64,
    a: i64,
    x: Complex64,
) -> Result<Complex64> {
    let mut acc = Complex64::new(1.0, 0.0);
    if a > 0 {
        for l in 0..a {
            acc *= ufunc(ctx, s.powi(l as i32) * x)?;
        }
    } else {
        for l in 1..=-a {
            acc /= nonzero(ufunc(ctx, s.powi(-l as i32) * x)?, x)?;
        }
    }
    Ok(acc)
}

/// `F_a(x)` with `s = q^{N s_exponent}`.
pub fn calf(
    ctx: &EllipticContext,
    s_exponent: Rational,
    a: i64,
    x: Complex64,
) -> Result<Complex64> {
    calf_half_nome(ctx, Complex64::new(ctx.q_pow_n(s_exponent), 0.0), a, x)
}

fn nonzero(u: Complex64, x: Complex64) -> Result<Complex64> {
    if u.norm() == 0.0 {
        Err(Error::Pole(format!(
            "vanishing U in a denominator at x = {x}"
        )))
    } else {
        Ok(u)
    }
}

/// `Y_{m,n}(x) = F*_n F*_{-n} / (F_m F_{-m})` for arbitrary complex half-nomes
/// `s = -p^{1/2}`, `s* = -p*^{1/2}`, evaluated factor by factor.
pub fn yfunc_half_nomes(
    ctx: &EllipticContext,
    s: &Surface,
    half: Complex64,
    half_star: Complex64,
    x: Complex64,
) -> Result<Complex64> {
    let num =
        calf_half_nome(ctx, half_star, s.n(), x)? * calf_half_nome(ctx, half_star, -s.n(), x)?;
    let den = calf_half_nome(ctx, half, s.m(), x)? * calf_half_nome(ctx, half, -s.m(), x)?;
    Ok(num / nonzero(den, x)?)
}

/// `Y_{m,n}(x)` on the line `lam` of `s`, with `s = q^{-Nλ/m}`, `s* = q^{-Nλ*/n}`.
///
/// Each factor `U(q^{Nt} x)` is evaluated at `t mod 1`. On `S_{0,n}` the
/// half-nome is fixed by `s*^n = q^{-N}` and `lam` plays no role.
pub fn yfunc(
    ctx: &EllipticContext,
    s: &Surface,
    lam: &LambdaPair,
    x: Complex64,
) -> Result<Complex64> {
    let (m, n) = (s.m(), s.n());
    let mut num = Vec::new();
    let mut den = Vec::new();
    if m == 0 || n == 0 {
        let k = if m == 0 { n } else { m };
        num.extend((0..k.abs()).map(|l| Rational::frac(-l, k)));
        den.extend((1..=k.abs()).map(|l| Rational::frac(l, k)));
    } else {
        let a = lam.lambda() / m;
        let b = lam.lambda_star() / n;
        num.extend((1..=m.abs()).map(|l| a * l));
        num.extend((1..n.abs()).map(|l| -b * l));
        den.extend((1..m.abs()).map(|l| -a * l));
        den.extend((1..=n.abs()).map(|l| b * l));
    }
    let at = |t: &Rational| ufunc(ctx, x * ctx.q_pow_n(t.mod_one()));
    let mut acc = Complex64::new(1.0, 0.0);
    for t in &num {
        acc *= at(t)?;
    }
    for t in &den {
        acc /= nonzero(at(t)?, x)?;
    }
    Ok(acc)
}

/// Offsets `i - j` for `i ∈ {(1-k)/2, ..., (k-1)/2}`, `j` likewise for `k'`.
pub(crate) fn half_step_offsets(k: u32, kp: u32) -> Vec<f64> {
    let half = |k: u32| (0..k).map(move |i| i as f64 - (k as f64 - 1.0) / 2.0);
    half(k).flat_map(|i| half(kp).map(move |j| i - j)).collect()
}

pub(crate) fn check_levels(ctx: &EllipticContext, k: u32, kp: u32) -> Result<()> {
    if k == 0 || kp == 0 || k > ctx.n || kp > ctx.n {
        return Err(Error::Domain(format!(
            "need 1 <= k, k' <= N, got ({k}, {kp})"
        )));
    }
    Ok(())
}

/// `∏_{i,j} Y(q^{i-j} x)`, the exchange function of `t^{(k)}` with `t^{(k')}`.
pub fn exchange_factor(
    ctx: &EllipticContext,
    s: &Surface,
    lam: &LambdaPair,
    k: u32,
    kp: u32,
    x: Complex64,
) -> Result<Complex64> {
    check_levels(ctx, k, kp)?;
    half_step_offsets(k, kp)
        .into_iter()
        .try_fold(Complex64::new(1.0, 0.0), |acc, o| {
            Ok(acc * yfunc(ctx, s, lam, x * ctx.q.powf(o))?)
        })
}

/// `∏_{k=1}^{m} U(s*^{-k}x) / U(s^{-k}x)` on `S_{m,-m}`, with
/// `s = q^{-Nλ/m}`, `s* = q^{-N(λ-1)/m}`. No periodicity reduction is applied.
pub fn centrality_ratio(
    ctx: &EllipticContext,
    m: i64,
    lambda: i64,
    x: Complex64,
) -> Result<Complex64> {
    if m <= 0 {
        return Err(Error::Precondition(format!("m = {m} must be positive")));
    }
    let nf = ctx.n as f64;
    let mut acc = Complex64::new(1.0, 0.0);
    for k in 1..=m {
        let star = ctx.q.powf(nf * ((lambda - 1) * k) as f64 / m as f64);
        let plain = ctx.q.powf(nf * (lambda * k) as f64 / m as f64);
        acc *= ufunc(ctx, star * x)?;
        acc /= nonzero(ufunc(ctx, plain * x)?, x)?;
    }
    Ok(acc)
}

/// `count` points `r e^{iπj/count}`, `j = 0..count`, alternating `r` between
/// `r1` (even `j`) and `r2` (odd `j`).
pub fn grid(r1: f64, r2: f64, count: usize) -> Vec<Complex64> {
    (0..count)
        .map(|j| {
            let r = if j % 2 == 0 { r1 } else { r2 };
            Complex64::from_polar(r, PI * j as f64 / count as f64)
        })
        .collect()
}

/// The 20-point grid with radii 0.8 and 1.25.
pub fn standard_grid() -> Vec<Complex64> {
    grid(0.8, 1.25, 20)
}
