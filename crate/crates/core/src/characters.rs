//! Quadratic characters of Q as squarefree integers `d` (the character of
//! `Q(sqrt d)`), their local behaviour and local square classes, the norm
//! `||chi||`, and the finite groups of characters of bounded norm.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::galois::SigmaSet;
use crate::primes::{factor_big, factor_u64, mod_u64, primes_in_range, valuation};
use crate::symbols::{legendre, least_nonresidue, Place};

/// A quadratic character, stored by its prime support: `d = +-2^a * prod p`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuadTwist {
    negative: bool,
    two: bool,
    odd: Vec<u64>,
}

impl QuadTwist {
    pub fn trivial() -> Self {
        QuadTwist {
            negative: false,
            two: false,
            odd: Vec::new(),
        }
    }

    /// The character of `Q(sqrt n)`: `n` is reduced to its squarefree kernel.
    pub fn new(n: &BigInt) -> Result<Self> {
        if n.is_zero() {
            return Err(Error::invalid("twist parameter must be nonzero"));
        }
        let mut t = QuadTwist {
            negative: n.is_negative(),
            ..QuadTwist::trivial()
        };
        for (p, e) in factor_big(n)? {
            if e % 2 == 0 {
                continue;
            }
            let p = p
                .to_u64()
                .ok_or_else(|| Error::ResourceLimit(format!("prime factor {p} of d exceeds 64 bits")))?;
            if p == 2 {
                t.two = true;
            } else {
                t.odd.push(p);
            }
        }
        Ok(t)
    }

    pub fn from_i64(n: i64) -> Result<Self> {
        Self::new(&BigInt::from(n))
    }

    /// Builds `sign * 2^two * prod odd` from known distinct odd primes.
    fn from_support(negative: bool, two: bool, mut odd: Vec<u64>) -> Self {
        odd.sort_unstable();
        QuadTwist { negative, two, odd }
    }

    pub fn d(&self) -> BigInt {
        let mut d = if self.two { BigInt::from(2) } else { BigInt::one() };
        for &p in &self.odd {
            d *= p;
        }
        if self.negative {
            -d
        } else {
            d
        }
    }

    pub fn is_trivial(&self) -> bool {
        !self.negative && !self.two && self.odd.is_empty()
    }

    pub fn is_negative(&self) -> bool {
        self.negative
    }

    /// Odd primes dividing `d`.
    pub fn odd_primes(&self) -> &[u64] {
        &self.odd
    }

    pub fn divisible_by_two(&self) -> bool {
        self.two
    }

    /// `d mod m` in `[0, m)`.
    pub fn residue(&self, m: u64) -> u64 {
        let m128 = u128::from(m);
        let mut r: u128 = if self.two { 2 % m128 } else { 1 % m128 };
        for &p in &self.odd {
            r = r * u128::from(p % m) % m128;
        }
        if self.negative && r != 0 {
            r = m128 - r;
        }
        r as u64
    }

    /// The product character: squarefree kernel of `d * d'`.
    pub fn mul(&self, other: &Self) -> Self {
        let mut odd = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.odd.len() || j < other.odd.len() {
            match (self.odd.get(i), other.odd.get(j)) {
                (Some(a), Some(b)) if a == b => {
                    i += 1;
                    j += 1;
                }
                (Some(a), Some(b)) if a < b => {
                    odd.push(*a);
                    i += 1;
                }
                (Some(a), None) => {
                    odd.push(*a);
                    i += 1;
                }
                (_, Some(b)) => {
                    odd.push(*b);
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        QuadTwist {
            negative: self.negative ^ other.negative,
            two: self.two ^ other.two,
            odd,
        }
    }

    /// Finite primes where the character ramifies, ascending.
    pub fn ramified_primes(&self) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.odd.len() + 1);
        if self.two || self.residue(4) != 1 {
            out.push(2);
        }
        out.extend_from_slice(&self.odd);
        out
    }
}

impl fmt::Display for QuadTwist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.d())
    }
}

impl Serialize for QuadTwist {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.d().to_string())
    }
}

impl<'de> Deserialize<'de> for QuadTwist {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(de)?;
        let n: BigInt = s.parse().map_err(serde::de::Error::custom)?;
        QuadTwist::new(&n).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LocalBehavior {
    Trivial,
    UnramifiedNontrivial,
    Ramified,
    /// The sign character at the real place.
    Sign,
}

impl fmt::Display for LocalBehavior {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LocalBehavior::Trivial => "trivial",
            LocalBehavior::UnramifiedNontrivial => "unramified_nontrivial",
            LocalBehavior::Ramified => "ramified",
            LocalBehavior::Sign => "sign",
        })
    }
}

pub fn local_behavior(t: &QuadTwist, v: Place) -> LocalBehavior {
    match v {
        Place::Infinity => {
            if t.negative {
                LocalBehavior::Sign
            } else {
                LocalBehavior::Trivial
            }
        }
        Place::Finite(2) => match (t.two, t.residue(8)) {
            (false, 1) => LocalBehavior::Trivial,
            (false, 5) => LocalBehavior::UnramifiedNontrivial,
            _ => LocalBehavior::Ramified,
        },
        Place::Finite(q) => {
            if t.odd.binary_search(&q).is_ok() {
                LocalBehavior::Ramified
            } else if crate::symbols::jacobi(t.residue(q), q) == 1 {
                LocalBehavior::Trivial
            } else {
                LocalBehavior::UnramifiedNontrivial
            }
        }
    }
}

/// A square-class representative; wide enough for `u q` with any 64-bit `q`.
pub type ClassLabel = i128;

/// Canonical representatives of `Q_v^x / (Q_v^x)^2`, trivial class first.
pub fn local_labels(v: Place) -> Vec<ClassLabel> {
    match v {
        Place::Infinity => vec![1, -1],
        Place::Finite(2) => vec![1, 5, -1, -5, 2, 10, -2, -10],
        Place::Finite(q) => {
            let u = least_nonresidue(q) as ClassLabel;
            let q = q as ClassLabel;
            vec![1, u, q, u * q]
        }
    }
}

/// Representative of the square class of a nonzero integer at `v`.
pub fn square_class_label(n: &BigInt, v: Place) -> Result<ClassLabel> {
    if n.is_zero() {
        return Err(Error::invalid("square class of zero"));
    }
    Ok(match v {
        Place::Infinity => {
            if n.is_negative() {
                -1
            } else {
                1
            }
        }
        Place::Finite(2) => {
            let e = valuation(n, 2);
            let unit = n >> e;
            let rep = match mod_u64(&unit, 8) {
                1 => 1,
                5 => 5,
                7 => -1,
                _ => -5,
            };
            if e % 2 == 1 {
                2 * rep
            } else {
                rep
            }
        }
        Place::Finite(q) => {
            let e = valuation(n, q);
            let unit = n / BigInt::from(q).pow(e);
            let u = if legendre(&unit, q) == 1 {
                1
            } else {
                least_nonresidue(q) as ClassLabel
            };
            if e % 2 == 1 {
                u * q as ClassLabel
            } else {
                u
            }
        }
    })
}

/// Square-class label of the character at `v`.
pub fn local_class(t: &QuadTwist, v: Place) -> ClassLabel {
    match v {
        Place::Infinity => {
            if t.negative {
                -1
            } else {
                1
            }
        }
        Place::Finite(2) => {
            let unit = if t.two {
                // d / 2 mod 8 from the odd part and sign
                QuadTwist {
                    two: false,
                    ..t.clone()
                }
                .residue(8)
            } else {
                t.residue(8)
            };
            let rep = match unit {
                1 => 1,
                5 => 5,
                7 => -1,
                _ => -5,
            };
            if t.two {
                2 * rep
            } else {
                rep
            }
        }
        Place::Finite(q) => {
            let ramified = t.odd.binary_search(&q).is_ok();
            let unit = if ramified {
                let odd = t.odd.iter().copied().filter(|&p| p != q).collect();
                QuadTwist::from_support(t.negative, t.two, odd).residue(q)
            } else {
                t.residue(q)
            };
            let u = if crate::symbols::jacobi(unit, q) == 1 {
                1
            } else {
                least_nonresidue(q) as ClassLabel
            };
            if ramified {
                u * q as ClassLabel
            } else {
                u
            }
        }
    }
}

/// `max { l : chi ramified at l }` over finite primes; 1 if there are none.
pub fn twist_norm(t: &QuadTwist) -> u64 {
    t.ramified_primes().last().copied().unwrap_or(1)
}

/// Largest group [`enumerate_characters`] will materialize.
pub const ENUMERATION_CAP: usize = 1 << 22;

/// Generators of the group of characters of norm `< bound`: `-1`, `2`, and
/// the odd primes below `bound` (for `bound >= 3`).
pub fn character_generators(bound: u64) -> Result<Vec<QuadTwist>> {
    if bound < 2 {
        return Err(Error::invalid("norm bound must be at least 2"));
    }
    if bound == 2 {
        return Ok(Vec::new());
    }
    let mut gens = vec![
        QuadTwist::from_support(true, false, Vec::new()),
        QuadTwist::from_support(false, true, Vec::new()),
    ];
    gens.extend(primes_in_range(3, bound).into_iter().map(|p| QuadTwist::from_support(false, false, vec![p])));
    Ok(gens)
}

/// The product of the generators selected by the bits of `mask`.
pub fn character_from_mask(gens: &[QuadTwist], mask: u64) -> QuadTwist {
    let mut negative = false;
    let mut two = false;
    let mut odd = Vec::new();
    for (i, g) in gens.iter().enumerate() {
        if mask >> i & 1 == 1 {
            negative ^= g.negative;
            two ^= g.two;
            odd.extend_from_slice(&g.odd);
        }
    }
    QuadTwist::from_support(negative, two, odd)
}

/// Size of the group of characters of norm `< bound`.
pub fn character_count(bound: u64) -> Result<u128> {
    let k = character_generators(bound)?.len();
    Ok(if k >= 128 { u128::MAX } else { 1u128 << k })
}

/// All characters of norm `< bound`, in generator-mask order.
pub fn enumerate_characters(bound: u64) -> Result<Vec<QuadTwist>> {
    let gens = character_generators(bound)?;
    if gens.len() >= 63 || 1usize << gens.len() > ENUMERATION_CAP {
        return Err(Error::ResourceLimit(format!(
            "{} generators exceed the enumeration cap; sample instead",
            gens.len()
        )));
    }
    Ok((0..1u64 << gens.len()).map(|m| character_from_mask(&gens, m)).collect())
}

/// True iff the character is trivial at every place of `sigma`.
pub fn sigma_trivial(t: &QuadTwist, sigma: &SigmaSet) -> bool {
    sigma.places().into_iter().all(|v| local_behavior(t, v) == LocalBehavior::Trivial)
}

/// Uniform squarefree `d` in `[-bound, bound]`, by rejection.
pub fn sample_squarefree<R: Rng + ?Sized>(bound: u64, rng: &mut R) -> Result<QuadTwist> {
    if bound == 0 || bound > 1 << 62 {
        return Err(Error::invalid("sample bound must be in 1..=2^62"));
    }
    loop {
        let n = rng.gen_range(1..=bound);
        if factor_u64(n).iter().all(|&(_, e)| e == 1) {
            let mut t = QuadTwist::new(&BigInt::from(n))?;
            t.negative = rng.gen();
            return Ok(t);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::curve_from_i64;
    use proptest::prelude::*;

    fn tw(d: i64) -> QuadTwist {
        QuadTwist::from_i64(d).unwrap()
    }

    #[test]
    fn behavior_examples() {
        assert_eq!(local_behavior(&tw(-15), Place::Finite(2)), LocalBehavior::Trivial);
        assert_eq!(local_behavior(&tw(-1), Place::Finite(2)), LocalBehavior::Ramified);
        assert_eq!(local_behavior(&tw(73), Place::Finite(3)), LocalBehavior::Trivial);
        assert_eq!(local_behavior(&tw(5), Place::Finite(2)), LocalBehavior::UnramifiedNontrivial);
        assert_eq!(local_behavior(&tw(6), Place::Finite(3)), LocalBehavior::Ramified);
        assert_eq!(local_behavior(&tw(-2), Place::Infinity), LocalBehavior::Sign);
        assert_eq!(local_behavior(&tw(2), Place::Finite(7)), LocalBehavior::Trivial);
        assert_eq!(local_behavior(&tw(3), Place::Finite(7)), LocalBehavior::UnramifiedNontrivial);
    }

    #[test]
    fn labels_at_largest_u64_prime() {
        let q = 18_446_744_073_709_551_557u64;
        let v = Place::Finite(q);
        let labels = local_labels(v);
        assert_eq!(labels[2], q as ClassLabel);
        assert!(labels[3] > ClassLabel::from(u64::MAX));
        let n = BigInt::from(q) * 3;
        let t = QuadTwist::new(&n).unwrap();
        assert_eq!(local_class(&t, v), square_class_label(&n, v).unwrap());
    }

    #[test]
    fn norm_examples() {
        assert_eq!(twist_norm(&tw(-15)), 5);
        assert_eq!(twist_norm(&tw(-1)), 2);
        assert_eq!(twist_norm(&tw(1)), 1);
        assert_eq!(twist_norm(&tw(-3)), 3);
        assert_eq!(twist_norm(&tw(5)), 5);
    }

    #[test]
    fn enumeration_sizes() {
        let three: Vec<i64> = enumerate_characters(3).unwrap().iter().map(|t| t.d().to_i64().unwrap()).collect();
        assert_eq!(three, vec![1, -1, 2, -2]);
        assert_eq!(enumerate_characters(10).unwrap().len(), 32);
        assert_eq!(enumerate_characters(20).unwrap().len(), 1 << 9);
        assert_eq!(enumerate_characters(2).unwrap(), vec![QuadTwist::trivial()]);
        assert!(enumerate_characters(1).is_err());
        assert!(matches!(enumerate_characters(1000), Err(Error::ResourceLimit(_))));
        assert_eq!(character_count(50).unwrap(), 1 << 16);
    }

    #[test]
    fn norm_bound_matches_enumeration() {
        for bound in [2u64, 3, 4, 10, 30] {
            let set: std::collections::HashSet<QuadTwist> = enumerate_characters(bound).unwrap().into_iter().collect();
            for d in -2000i64..=2000 {
                if d == 0 || factor_u64(d.unsigned_abs()).iter().any(|&(_, e)| e > 1) {
                    continue;
                }
                let t = tw(d);
                assert_eq!(twist_norm(&t) < bound, set.contains(&t), "d = {d}, X = {bound}");
            }
        }
    }

    #[test]
    fn sigma_trivial_examples() {
        let c = curve_from_i64(&[-2, 0, 0, 1]);
        let s = c.sigma().unwrap();
        assert!(sigma_trivial(&tw(73), s));
        assert!(!sigma_trivial(&tw(41), s));
        assert!(sigma_trivial(&tw(1), s));
    }

    #[test]
    fn labels_are_canonical() {
        for v in [Place::Infinity, Place::Finite(2), Place::Finite(3), Place::Finite(7)] {
            for &l in &local_labels(v) {
                assert_eq!(square_class_label(&BigInt::from(l), v).unwrap(), l);
            }
        }
    }

    proptest! {
        #[test]
        fn canonicalization(d in -100_000i64..100_000, c in 1i64..50) {
            prop_assume!(d != 0);
            let a = tw(d);
            let b = QuadTwist::new(&(BigInt::from(d) * c * c)).unwrap();
            prop_assert_eq!(&a, &b);
            prop_assert_eq!(QuadTwist::new(&a.d()).unwrap(), a);
        }

        #[test]
        fn local_class_is_square_class(d in -100_000i64..100_000, e in -100_000i64..100_000) {
            prop_assume!(d != 0 && e != 0);
            let (a, b) = (tw(d), tw(e));
            for v in [Place::Infinity, Place::Finite(2), Place::Finite(3), Place::Finite(5), Place::Finite(13)] {
                prop_assert_eq!(local_class(&a, v), square_class_label(&BigInt::from(d), v).unwrap());
                let prod = a.mul(&b);
                prop_assert_eq!(local_class(&prod, v), square_class_label(&(BigInt::from(d) * e), v).unwrap());
                if local_behavior(&a, v) == LocalBehavior::Trivial && local_behavior(&b, v) == LocalBehavior::Trivial {
                    prop_assert_eq!(local_behavior(&prod, v), LocalBehavior::Trivial);
                }
                prop_assert_eq!(local_behavior(&a, v) == LocalBehavior::Trivial, local_class(&a, v) == 1);
            }
        }
    }
}
