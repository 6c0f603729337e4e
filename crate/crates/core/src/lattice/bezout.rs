use num_integer::Integer;

/// `x a + y b = g` with `g = gcd(a, b) >= 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bezout {
    pub g: i64,
    pub x: i64,
    pub y: i64,
}

pub fn gcd(a: i64, b: i64) -> i64 {
    a.gcd(&b)
}

pub fn bezout(a: i64, b: i64) -> Bezout {
    let e = a.extended_gcd(&b);
    if e.gcd < 0 {
        Bezout {
            g: -e.gcd,
            x: -e.x,
            y: -e.y,
        }
    } else {
        Bezout {
            g: e.gcd,
            x: e.x,
            y: e.y,
        }
    }
}

/// The Bézout pair with the smallest non-negative second coefficient.
///
/// The general solution is `(x + k b/g, y - k a/g)`, so `y` is pinned to
/// `[0, |a|/g)`. When `a = 0` the pair is `(0, sign b)`.
pub fn canonical_bezout(a: i64, b: i64) -> Bezout {
    let Bezout { g, x, y } = bezout(a, b);
    if a == 0 || g == 0 {
        return Bezout { g, x, y };
    }
    let period = (a / g).abs();
    let y0 = y.mod_floor(&period);
    let k = (y - y0) / (a / g);
    let x0 = x + k * (b / g);
    debug_assert_eq!(x0 * a + y0 * b, g);
    Bezout { g, x: x0, y: y0 }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn small_cases() {
        assert_eq!(gcd(-4, 6), 2);
        assert_eq!(canonical_bezout(1, 2), Bezout { g: 1, x: 1, y: 0 });
        assert_eq!(canonical_bezout(2, 2), Bezout { g: 2, x: 1, y: 0 });
        let b = canonical_bezout(3, 6);
        assert_eq!((b.g, b.x, b.y), (3, 1, 0));
        let b = canonical_bezout(-5, 3);
        assert_eq!(b.g, 1);
        assert_eq!(b.x * -5 + b.y * 3, 1);
        assert!((0..5).contains(&b.y));
    }

    proptest! {
        #[test]
        fn canonical_pair_is_valid(a in -500i64..500, b in -500i64..500) {
            prop_assume!(a != 0 || b != 0);
            let c = canonical_bezout(a, b);
            prop_assert_eq!(c.g, gcd(a, b));
            prop_assert_eq!(c.x * a + c.y * b, c.g);
            if a != 0 {
                prop_assert!(c.y >= 0 && c.y < (a / c.g).abs());
            }
        }
    }
}
