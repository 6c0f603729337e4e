use num_integer::Integer;
use serde::Serialize;

use super::gcd;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SuperOutcome {
    SuperAbelian,
    /// condition 1: `m` must be odd
    EvenM,
    /// condition 2: `gcd(m, λ) != 1`, so no Bézout pair exists
    NoBezout,
    /// condition 3: `gcd(m, β₀' + 1) != 1`
    SharedFactor,
}

impl SuperOutcome {
    pub fn failing_condition(self) -> Option<u8> {
        match self {
            SuperOutcome::SuperAbelian => None,
            SuperOutcome::EvenM => Some(1),
            SuperOutcome::NoBezout => Some(2),
            SuperOutcome::SharedFactor => Some(3),
        }
    }
}

/// Verdict on the line `S_{m,-m} ∩ S_{1,1}`-type families with integer λ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SuperAbelianity {
    pub m: i64,
    pub lambda: i64,
    pub outcome: SuperOutcome,
    /// `β₀ m - β₀' λ = 1`, `1 <= β₀' <= m - 1`
    pub beta0: Option<i64>,
    pub beta0_prime: Option<i64>,
    /// `m < 0` was replaced by `|m|`.
    pub reduced_from_negative: bool,
}

impl SuperAbelianity {
    pub fn is_super_abelian(&self) -> bool {
        self.outcome == SuperOutcome::SuperAbelian
    }
}

/// For `m = 1` there is no `β₀'` in `[1, m-1]`; the degenerate pair
/// `(β₀, β₀') = (1, 0)` is reported and the line counts as super-abelian.
pub fn super_abelianity_check(m: i64, lambda: i64) -> Result<SuperAbelianity> {
    if m == 0 {
        return Err(Error::Precondition("m = 0".into()));
    }
    let reduced_from_negative = m < 0;
    let m = m.abs();
    let verdict = |outcome, beta0, beta0_prime| SuperAbelianity {
        m,
        lambda,
        outcome,
        beta0,
        beta0_prime,
        reduced_from_negative,
    };
    if m.is_even() {
        return Ok(verdict(SuperOutcome::EvenM, None, None));
    }
    if gcd(m, lambda) != 1 {
        return Ok(verdict(SuperOutcome::NoBezout, None, None));
    }
    if m == 1 {
        return Ok(verdict(SuperOutcome::SuperAbelian, Some(1), Some(0)));
    }
    // β₀' ≡ -λ⁻¹ (mod m)
    let inv = lambda.extended_gcd(&m).x;
    let beta0_prime = (-inv).mod_floor(&m);
    let beta0 = (1 + beta0_prime * lambda) / m;
    debug_assert_eq!(beta0 * m - beta0_prime * lambda, 1);
    let outcome = if gcd(m, beta0_prime + 1) == 1 {
        SuperOutcome::SuperAbelian
    } else {
        SuperOutcome::SharedFactor
    };
    Ok(verdict(outcome, Some(beta0), Some(beta0_prime)))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Is there a permutation σ of ℤ/m with `λ(k - σ(k)) ≡ k (mod m)` for all k?
    fn matching_exists(m: i64, lambda: i64) -> bool {
        fn place(k: i64, m: i64, lambda: i64, used: &mut [bool]) -> bool {
            if k == m {
                return true;
            }
            for target in 0..m {
                if used[target as usize] || (lambda * (k - target) - k).rem_euclid(m) != 0 {
                    continue;
                }
                used[target as usize] = true;
                if place(k + 1, m, lambda, used) {
                    return true;
                }
                used[target as usize] = false;
            }
            false
        }
        place(0, m, lambda, &mut vec![false; m as usize])
    }

    #[test]
    fn examples() {
        let v = super_abelianity_check(3, 2).unwrap();
        assert!(v.is_super_abelian());
        assert_eq!((v.beta0, v.beta0_prime), (Some(1), Some(1)));
        assert_eq!(
            super_abelianity_check(2, 1)
                .unwrap()
                .outcome
                .failing_condition(),
            Some(1)
        );
        let v = super_abelianity_check(9, 4).unwrap();
        assert_eq!(v.outcome, SuperOutcome::SharedFactor);
        assert_eq!(v.beta0_prime, Some(2));
        assert_eq!(
            super_abelianity_check(9, 3).unwrap().outcome,
            SuperOutcome::NoBezout
        );
    }

    #[test]
    fn half_plus_one_family() {
        for m in [3, 5, 7, 9, 11, 13] {
            let v = super_abelianity_check(m, (m + 1) / 2).unwrap();
            assert!(v.is_super_abelian());
            assert_eq!(v.beta0, Some((m - 1) / 2));
            assert_eq!(v.beta0_prime, Some(m - 2));
        }
    }

    #[test]
    fn negative_m_is_reduced() {
        let v = super_abelianity_check(-5, 3).unwrap();
        assert!(v.reduced_from_negative);
        assert_eq!(v.m, 5);
        assert_eq!(v.outcome, super_abelianity_check(5, 3).unwrap().outcome);
        assert!(super_abelianity_check(0, 1).is_err());
    }

    #[test]
    fn agrees_with_permutation_matching() {
        for m in 1..=15 {
            for lambda in -15..=15 {
                let v = super_abelianity_check(m, lambda).unwrap();
                assert_eq!(
                    v.is_super_abelian(),
                    matching_exists(m, lambda),
                    "m={m} λ={lambda}"
                );
            }
        }
    }
}
