//! Quadratic residue symbols and Hilbert symbols over the completions of Q.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::primes::{is_prime, mod_u64, valuation};

/// A place of Q: the real place or a finite prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Place {
    Infinity,
    Finite(u64),
}

impl Place {
    pub fn finite(q: u64) -> Result<Self> {
        if is_prime(q) {
            Ok(Place::Finite(q))
        } else {
            Err(Error::invalid(format!("{q} is not prime")))
        }
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Infinity => f.write_str("inf"),
            Place::Finite(q) => write!(f, "{q}"),
        }
    }
}

impl FromStr for Place {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("inf") || s.eq_ignore_ascii_case("infinity") {
            return Ok(Place::Infinity);
        }
        let q: u64 = s
            .parse()
            .map_err(|_| Error::invalid(format!("bad place `{s}`")))?;
        Place::finite(q)
    }
}

/// Jacobi symbol `(a | n)` for odd positive `n`.
pub fn jacobi(a: u64, n: u64) -> i8 {
    assert!(n % 2 == 1, "jacobi symbol needs odd modulus");
    let mut a = a % n;
    let mut n = n;
    let mut t = 1i8;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if n % 8 == 3 || n % 8 == 5 {
                t = -t;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            t = -t;
        }
        a %= n;
    }
    if n == 1 {
        t
    } else {
        0
    }
}

/// Kronecker symbol `(a | m)` for arbitrary integer `a` and nonzero `m`.
pub fn kronecker(a: &BigInt, m: i64) -> Result<i8> {
    if m == 0 {
        return Err(Error::invalid("kronecker symbol with modulus 0"));
    }
    let mut result = 1i8;
    let mut m_abs = m.unsigned_abs();
    if m < 0 && a.is_negative() {
        result = -result;
    }
    let twos = m_abs.trailing_zeros();
    m_abs >>= twos;
    if twos > 0 {
        if a.is_even() {
            return Ok(0);
        }
        if twos % 2 == 1 {
            let r = mod_u64(a, 8);
            if r == 3 || r == 5 {
                result = -result;
            }
        }
    }
    if m_abs == 1 {
        return Ok(result);
    }
    Ok(result * jacobi(mod_u64(a, m_abs), m_abs))
}

/// Kronecker symbol on machine integers.
pub fn kronecker_i64(a: i64, m: i64) -> Result<i8> {
    kronecker(&BigInt::from(a), m)
}

/// Legendre symbol of `a` modulo an odd prime `q`.
pub fn legendre(a: &BigInt, q: u64) -> i8 {
    jacobi(mod_u64(a, q), q)
}

/// Smallest positive quadratic non-residue modulo an odd prime.
pub fn least_nonresidue(q: u64) -> u64 {
    (2..q).find(|&u| jacobi(u, q) == -1).expect("odd prime has a non-residue")
}

/// Splits a nonzero integer as `p^v * u` with `p` not dividing `u`.
fn split_p(n: &BigInt, p: u64) -> (u32, BigInt) {
    let v = valuation(n, p);
    let u = n / BigInt::from(p).pow(v);
    (v, u)
}

/// Clears the denominator of a rational without changing its square class.
pub fn rational_square_class(x: &BigRational) -> BigInt {
    x.numer() * x.denom()
}

fn hilbert_int(a: &BigInt, b: &BigInt, v: Place) -> i8 {
    match v {
        Place::Infinity => {
            if a.is_negative() && b.is_negative() {
                -1
            } else {
                1
            }
        }
        Place::Finite(2) => {
            let (alpha, u) = split_p(a, 2);
            let (beta, w) = split_p(b, 2);
            let u8_ = mod_u64(&u, 8);
            let w8 = mod_u64(&w, 8);
            let eps = |x: u64| ((x - 1) / 2) % 2;
            let omega = |x: u64| ((x * x - 1) / 8) % 2;
            let e = eps(u8_) * eps(w8)
                + u64::from(alpha) * omega(w8)
                + u64::from(beta) * omega(u8_);
            if e % 2 == 0 {
                1
            } else {
                -1
            }
        }
        Place::Finite(q) => {
            let (alpha, u) = split_p(a, q);
            let (beta, w) = split_p(b, q);
            let mut s = 1i8;
            if (alpha * beta) % 2 == 1 && q % 4 == 3 {
                s = -s;
            }
            if beta % 2 == 1 {
                s *= legendre(&u, q);
            }
            if alpha % 2 == 1 {
                s *= legendre(&w, q);
            }
            s
        }
    }
}

/// Hilbert symbol `(a, b)_v` of nonzero rationals.
pub fn hilbert_symbol(a: &BigRational, b: &BigRational, v: Place) -> Result<i8> {
    if a.is_zero() || b.is_zero() {
        return Err(Error::invalid("hilbert symbol of zero"));
    }
    Ok(hilbert_int(
        &rational_square_class(a),
        &rational_square_class(b),
        v,
    ))
}

/// Hilbert symbol on nonzero integers.
pub fn hilbert_symbol_int(a: &BigInt, b: &BigInt, v: Place) -> Result<i8> {
    if a.is_zero() || b.is_zero() {
        return Err(Error::invalid("hilbert symbol of zero"));
    }
    Ok(hilbert_int(a, b, v))
}

/// The places where `(a, b)_v` can be nontrivial: infinity, 2, and odd
/// primes dividing `ab`.
pub fn relevant_places(a: &BigInt, b: &BigInt) -> Result<Vec<Place>> {
    let mut places = vec![Place::Infinity, Place::Finite(2)];
    let prod: BigInt = a * b;
    for (p, _) in crate::primes::factor_big(&prod)? {
        let p = p
            .to_u64()
            .ok_or_else(|| Error::ResourceLimit(format!("prime {p} does not fit in 64 bits")))?;
        if p != 2 {
            places.push(Place::Finite(p));
        }
    }
    Ok(places)
}

/// Sign of a nonzero integer as `+1` / `-1`.
pub fn sign_of(n: &BigInt) -> i8 {
    match n.sign() {
        Sign::Minus => -1,
        _ => 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;
    use proptest::prelude::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    /// Brute-force Legendre symbol by enumerating squares.
    fn legendre_oracle(a: i64, p: u64) -> i8 {
        let r = a.rem_euclid(p as i64) as u64;
        if r == 0 {
            return 0;
        }
        if (1..p).any(|x| x * x % p == r) {
            1
        } else {
            -1
        }
    }

    #[test]
    fn kronecker_examples() {
        assert_eq!(kronecker_i64(2, 15).unwrap(), 1);
        assert_eq!(kronecker_i64(-108, 5).unwrap(), -1);
        for m in [-7i64, -2, -1, 1, 2, 9, 40] {
            assert_eq!(kronecker_i64(1, m).unwrap(), 1);
        }
        assert!(kronecker_i64(3, 0).is_err());
        assert_eq!(kronecker_i64(-1, -1).unwrap(), -1);
        assert_eq!(kronecker_i64(5, 2).unwrap(), -1);
        assert_eq!(kronecker_i64(7, 2).unwrap(), 1);
        assert_eq!(kronecker_i64(4, 2).unwrap(), 0);
    }

    #[test]
    fn legendre_matches_enumeration() {
        for p in [3u64, 5, 7, 11, 13, 101] {
            for a in -50i64..50 {
                assert_eq!(legendre(&BigInt::from(a), p), legendre_oracle(a, p), "({a}|{p})");
            }
        }
    }

    #[test]
    fn hilbert_examples() {
        assert_eq!(hilbert_symbol(&q(-1), &q(-1), Place::Infinity).unwrap(), -1);
        assert_eq!(hilbert_symbol(&q(-1), &q(-1), Place::Finite(2)).unwrap(), -1);
        assert_eq!(hilbert_symbol(&q(-1), &q(-1), Place::Finite(5)).unwrap(), 1);
        assert_eq!(hilbert_symbol(&q(2), &q(5), Place::Finite(5)).unwrap(), -1);
        assert_eq!(hilbert_symbol(&q(2), &q(5), Place::Finite(2)).unwrap(), -1);
        // rational arguments reduce to integer square classes
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        assert_eq!(
            hilbert_symbol(&half, &q(5), Place::Finite(2)).unwrap(),
            hilbert_symbol(&q(2), &q(5), Place::Finite(2)).unwrap()
        );
        assert!(hilbert_symbol(&q(0), &q(1), Place::Infinity).is_err());
    }

    #[test]
    fn hilbert_at_2_matches_norm_search() {
        // (a,b)_2 = 1 iff z^2 = a x^2 + b y^2 has a primitive solution mod 2^k
        // for large enough k; checked by enumeration mod 64.
        fn oracle(a: i64, b: i64) -> i8 {
            let m = 64i64;
            for x in 0..m {
                for y in 0..m {
                    for z in 0..m {
                        if x % 2 == 0 && y % 2 == 0 && z % 2 == 0 {
                            continue;
                        }
                        if (a * x * x + b * y * y - z * z).rem_euclid(m) == 0 {
                            return 1;
                        }
                    }
                }
            }
            -1
        }
        for &a in &[-10i64, -5, -2, -1, 1, 2, 3, 5, 6, 7] {
            for &b in &[-5i64, -1, 2, 3, 10] {
                assert_eq!(
                    hilbert_symbol_int(&BigInt::from(a), &BigInt::from(b), Place::Finite(2)).unwrap(),
                    oracle(a, b),
                    "({a},{b})_2"
                );
            }
        }
    }

    #[test]
    fn places_parse() {
        assert_eq!("inf".parse::<Place>().unwrap(), Place::Infinity);
        assert_eq!("13".parse::<Place>().unwrap(), Place::Finite(13));
        assert!("15".parse::<Place>().is_err());
        assert_eq!(least_nonresidue(7), 3);
        assert_eq!(least_nonresidue(3), 2);
    }

    proptest! {
        #[test]
        fn kronecker_square_class_invariant(a in -10_000i64..10_000, c in 1i64..60, m in -500i64..500) {
            prop_assume!(m != 0);
            prop_assume!(num_integer::Integer::gcd(&c, &m) == 1);
            let lhs = kronecker_i64(a * c * c, m).unwrap();
            let rhs = kronecker_i64(a, m).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn product_formula(a in -10_000i64..10_000, b in -10_000i64..10_000) {
            prop_assume!(a != 0 && b != 0);
            let (a, b) = (BigInt::from(a), BigInt::from(b));
            let prod: i32 = relevant_places(&a, &b)
                .unwrap()
                .into_iter()
                .map(|v| i32::from(hilbert_symbol_int(&a, &b, v).unwrap()))
                .product();
            prop_assert_eq!(prod, 1);
        }
    }

    #[test]
    fn sign_helper() {
        assert_eq!(sign_of(&BigInt::from(-3)), -1);
        assert_eq!(sign_of(&BigInt::from(3)), 1);
    }
}
