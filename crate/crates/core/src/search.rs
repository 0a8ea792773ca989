//! Searches for primes `l` whose twist `d = l` can shift the 2-Selmer rank,
//! and recipes recording which local conditions were checked.

use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::characters::{sigma_trivial, QuadTwist};
use crate::curve::CurveSpec;
use crate::error::{Error, Result};
use crate::fp::factor_degrees;
use crate::galois::{prime_scan, CycleType, PrimeScan, ScanFilter};
use crate::primes::is_prime;
use crate::symbols::jacobi;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Raise2,
    Lower2,
    AbstractP,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Raise2 => "raise2",
            Direction::Lower2 => "lower2",
            Direction::AbstractP => "abstract_p",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Condition {
    pub name: String,
    /// False for conditions that need global Selmer data.
    pub checkable: bool,
    pub holds: Option<bool>,
}

impl Condition {
    fn checked(name: &str, holds: bool) -> Self {
        Condition {
            name: name.to_string(),
            checkable: true,
            holds: Some(holds),
        }
    }

    fn unverified(name: &str) -> Self {
        Condition {
            name: name.to_string(),
            checkable: false,
            holds: None,
        }
    }
}

/// A candidate twist `d = l`, with every locally checkable condition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwistRecipe {
    pub prime: u64,
    pub d: QuadTwist,
    pub direction: Direction,
    /// Only for [`Direction::AbstractP`].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<u64>,
    pub curve_hash: String,
    pub cycle_type: CycleType,
    pub checked_conditions: Vec<Condition>,
}

pub const COND_GOOD: &str = "l is a good prime";
pub const COND_THREE_ODD: &str = "Frobenius has exactly three orbits, all of odd length";
pub const COND_ONE_MOD_8: &str = "l = 1 (mod 8)";
pub const COND_SPLIT_SIGMA: &str = "(l | q) = +1 for every odd bad prime q";
pub const COND_SIGMA_TRIVIAL: &str = "d = l is trivial at every bad place";
pub const COND_LOC_RAISE: &str = "localization at l has 2-dimensional image";
pub const COND_LOC_LOWER: &str = "localization at l has trivial image";
pub const COND_TWO_ORBITS: &str = "Frobenius has two orbits, neither of length divisible by p";

/// True iff there are exactly two orbits and neither length is divisible by `p`.
pub fn odd_p_orbit_predicate(cycle_type: &CycleType, p: u64) -> bool {
    cycle_type.orbits() == 2 && cycle_type.lengths().iter().all(|&l| l as u64 % p != 0)
}

fn three_odd_orbits(c: &CycleType) -> bool {
    c.orbits() == 3 && c.lengths().iter().all(|l| l % 2 == 1)
}

/// Recomputes every checkable condition from scratch, without any cache.
fn conditions_for(
    curve: &CurveSpec,
    l: u64,
    direction: Direction,
    p: Option<u64>,
) -> Result<(CycleType, Vec<Condition>)> {
    let sigma = curve.sigma()?;
    let good = is_prime(l) && l != 2 && !sigma.contains_prime(l);
    if !good {
        return Err(Error::BadPrime(l));
    }
    let cycle_type = CycleType::new(factor_degrees(curve.f(), l)?)?;
    let mut conds = vec![Condition::checked(COND_GOOD, good)];
    match direction {
        Direction::Raise2 | Direction::Lower2 => {
            let d = QuadTwist::new(&BigInt::from(l))?;
            conds.push(Condition::checked(COND_THREE_ODD, three_odd_orbits(&cycle_type)));
            conds.push(Condition::checked(COND_ONE_MOD_8, l % 8 == 1));
            conds.push(Condition::checked(
                COND_SPLIT_SIGMA,
                sigma.odd_primes().all(|q| jacobi(l % q, q) == 1),
            ));
            conds.push(Condition::checked(COND_SIGMA_TRIVIAL, sigma_trivial(&d, sigma)));
            conds.push(Condition::unverified(if direction == Direction::Raise2 {
                COND_LOC_RAISE
            } else {
                COND_LOC_LOWER
            }));
        }
        Direction::AbstractP => {
            let p = p.ok_or_else(|| Error::invalid("abstract_p search needs p"))?;
            conds.push(Condition::checked(COND_TWO_ORBITS, odd_p_orbit_predicate(&cycle_type, p)));
        }
    }
    Ok((cycle_type, conds))
}

impl TwistRecipe {
    /// Recomputes the recipe against `curve` and checks it is identical.
    pub fn verify(&self, curve: &CurveSpec) -> Result<()> {
        if self.curve_hash != curve.hash() {
            return Err(Error::invalid(format!(
                "recipe is for curve {}, not {}",
                self.curve_hash,
                curve.hash()
            )));
        }
        if self.d != QuadTwist::new(&BigInt::from(self.prime))? {
            return Err(Error::invalid("recipe twist must be d = l"));
        }
        let (cycle_type, conds) = conditions_for(curve, self.prime, self.direction, self.p)?;
        if cycle_type != self.cycle_type || conds != self.checked_conditions {
            return Err(Error::invalid(format!("recipe for l = {} does not recompute", self.prime)));
        }
        if conds.iter().any(|c| c.holds == Some(false)) {
            return Err(Error::invalid(format!("recipe for l = {} fails a condition", self.prime)));
        }
        Ok(())
    }
}

/// Parses a JSON array of recipes (or a single recipe) without verifying it.
pub fn parse_recipes(text: &str) -> Result<Vec<TwistRecipe>> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| Error::parse(e.line(), e.to_string()))?;
    let result = if value.is_array() {
        serde_json::from_value(value)
    } else {
        serde_json::from_value(value).map(|r| vec![r])
    };
    result.map_err(|e| Error::parse(0, e.to_string()))
}

/// Parses recipes and re-verifies each one against `curve`.
pub fn load_recipes(text: &str, curve: &CurveSpec) -> Result<Vec<TwistRecipe>> {
    let recipes = parse_recipes(text)?;
    for r in &recipes {
        r.verify(curve)?;
    }
    Ok(recipes)
}

/// Stream of shift-prime recipes in increasing order of `l`.
pub struct ShiftPrimes<'a> {
    curve: &'a CurveSpec,
    direction: Direction,
    p: Option<u64>,
    scan: PrimeScan<'a>,
}

impl Iterator for ShiftPrimes<'_> {
    type Item = Result<TwistRecipe>;

    fn next(&mut self) -> Option<Self::Item> {
        let pc = self.scan.next()?;
        Some(conditions_for(self.curve, pc.prime, self.direction, self.p).map(|(cycle_type, conds)| {
            TwistRecipe {
                prime: pc.prime,
                d: QuadTwist::new(&BigInt::from(pc.prime)).expect("prime is a valid twist"),
                direction: self.direction,
                p: self.p,
                curve_hash: self.curve.hash(),
                cycle_type,
                checked_conditions: conds,
            }
        }))
    }
}

impl<'a> ShiftPrimes<'a> {
    pub fn scan_error(&self) -> Option<&Error> {
        self.scan.error()
    }
}

/// Good primes `l <= limit` in class `P_2` with three odd orbits,
/// `l = 1 (mod 8)`, and `l` a square modulo every odd bad prime.
pub fn find_shift_primes(curve: &CurveSpec, direction: Direction, limit: u64) -> Result<ShiftPrimes<'_>> {
    if direction == Direction::AbstractP {
        return Err(Error::invalid("use find_odd_p_primes for abstract_p"));
    }
    curve.require_p2()?;
    if curve.degree() < 3 {
        return Err(Error::invalid("three odd orbits need degree >= 3"));
    }
    let sigma = curve.sigma()?;
    let mut filter = ScanFilter::class(2).with_congruence(8, 1).with_cycle(three_odd_orbits);
    for q in sigma.odd_primes() {
        // l = 1 (mod 4), so (q | l) = (l | q)
        filter = filter.with_symbol(BigInt::from(q), 1);
    }
    Ok(ShiftPrimes {
        curve,
        direction,
        p: None,
        scan: prime_scan(curve, filter, 3, limit),
    })
}

/// Good primes `l <= limit` whose Frobenius has two orbits with lengths
/// prime to `p`.
pub fn find_odd_p_primes(curve: &CurveSpec, p: u64, limit: u64) -> Result<ShiftPrimes<'_>> {
    if p == 2 || !is_prime(p) {
        return Err(Error::invalid("p must be an odd prime"));
    }
    let filter = ScanFilter::class(1).with_cycle(move |c| odd_p_orbit_predicate(c, p));
    Ok(ShiftPrimes {
        curve,
        direction: Direction::AbstractP,
        p: Some(p),
        scan: prime_scan(curve, filter, 3, limit),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::curve_from_i64;

    fn primes(curve: &CurveSpec, limit: u64) -> Vec<u64> {
        find_shift_primes(curve, Direction::Raise2, limit)
            .unwrap()
            .map(|r| r.unwrap().prime)
            .collect()
    }

    #[test]
    fn cube_root_shift_primes() {
        let c = curve_from_i64(&[-2, 0, 0, 1]);
        assert_eq!(primes(&c, 1760), vec![433, 457, 601, 1657, 1753]);
        assert!(primes(&c, 0).is_empty());
    }

    #[test]
    fn quintic_shift_primes() {
        let c = curve_from_i64(&[-1, -1, 0, 0, 0, 1]);
        assert_eq!(primes(&c, 3000), vec![17, 457, 1697, 2153, 2969]);
    }

    #[test]
    fn recipes_round_trip_and_reverify() {
        let c = curve_from_i64(&[-2, 0, 0, 1]);
        let recipes: Vec<TwistRecipe> = find_shift_primes(&c, Direction::Lower2, 1000)
            .unwrap()
            .map(Result::unwrap)
            .collect();
        let json = serde_json::to_string(&recipes).unwrap();
        assert_eq!(load_recipes(&json, &c).unwrap(), recipes);
        let mut forged = recipes[0].clone();
        forged.prime = 449;
        forged.d = QuadTwist::from_i64(449).unwrap();
        assert!(forged.verify(&c).is_err());
        let other = curve_from_i64(&[-3, 0, 0, 1]);
        assert!(recipes[0].verify(&other).is_err());
        assert!(parse_recipes("{").is_err());
    }

    #[test]
    fn odd_p_predicate() {
        let ct = |v: Vec<usize>| CycleType::new(v).unwrap();
        assert!(odd_p_orbit_predicate(&ct(vec![1, 2]), 3));
        assert!(!odd_p_orbit_predicate(&ct(vec![3, 4]), 3));
        assert!(!odd_p_orbit_predicate(&ct(vec![1, 1, 1]), 3));
        let c = curve_from_i64(&[-2, 0, 0, 1]);
        let first: Vec<u64> = find_odd_p_primes(&c, 3, 60).unwrap().map(|r| r.unwrap().prime).collect();
        // x^3 - 2 has type {1,2} exactly at the primes 2 (mod 3)
        assert_eq!(first, vec![5, 11, 17, 23, 29, 41, 47, 53, 59]);
    }
}
