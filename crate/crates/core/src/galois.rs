//! The bad set, Frobenius cycle types at good primes, the prime classes
//! `P_i`, certificate-based Galois group recognition, and prime scans.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cache::PrimeCache;
use crate::curve::CurveSpec;
use crate::error::{Error, Result};
use crate::fp::{degrees_of_reduced, FpPoly};
use crate::poly::{rational_roots, RatPoly};
use crate::primes::{factor_big, is_prime, is_square, primes_in_range};
use crate::symbols::{kronecker, rational_square_class, Place};

/// The places of bad behaviour: infinity, 2, and every prime dividing the
/// leading coefficient, a coefficient denominator, or the discriminant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SigmaSet {
    finite_primes: BTreeSet<u64>,
}

impl SigmaSet {
    pub(crate) fn for_polynomial(f: &RatPoly, disc: &BigRational) -> Result<Self> {
        let mut bad = BigInt::from(2) * f.lead().numer() * f.denominator_lcm();
        bad *= disc.numer() * disc.denom();
        let mut finite_primes = BTreeSet::new();
        for (p, _) in factor_big(&bad)? {
            let p = p.to_u64().ok_or_else(|| {
                Error::ResourceLimit(format!("bad prime {p} does not fit in 64 bits"))
            })?;
            finite_primes.insert(p);
        }
        Ok(SigmaSet { finite_primes })
    }

    pub fn finite_primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.finite_primes.iter().copied()
    }

    pub fn odd_primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.finite_primes().filter(|&q| q != 2)
    }

    /// All places, infinity first, then finite primes ascending.
    pub fn places(&self) -> Vec<Place> {
        std::iter::once(Place::Infinity)
            .chain(self.finite_primes().map(Place::Finite))
            .collect()
    }

    pub fn contains_prime(&self, l: u64) -> bool {
        self.finite_primes.contains(&l)
    }

    pub fn contains(&self, v: Place) -> bool {
        match v {
            Place::Infinity => true,
            Place::Finite(q) => self.contains_prime(q),
        }
    }
}

impl fmt::Display for SigmaSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.places().iter().map(ToString::to_string).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// `sigma_set` as a free function.
pub fn sigma_set(curve: &CurveSpec) -> Result<SigmaSet> {
    curve.sigma().cloned()
}

/// Multiset of Frobenius orbit lengths, kept sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CycleType(Vec<usize>);

impl CycleType {
    pub fn new(mut lengths: Vec<usize>) -> Result<Self> {
        if lengths.is_empty() || lengths.contains(&0) {
            return Err(Error::invalid("cycle type needs positive lengths"));
        }
        lengths.sort_unstable();
        Ok(CycleType(lengths))
    }

    pub fn lengths(&self) -> &[usize] {
        &self.0
    }

    /// Number of orbits.
    pub fn orbits(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> usize {
        self.0.iter().sum()
    }

    /// `b - 1`.
    pub fn class_index(&self) -> usize {
        self.0.len() - 1
    }

    /// True for an even permutation.
    pub fn is_even(&self) -> bool {
        self.0.iter().map(|&l| l - 1).sum::<usize>() % 2 == 0
    }

    fn count(&self, len: usize) -> usize {
        self.0.iter().filter(|&&l| l == len).count()
    }

    /// A single `q`-cycle survives raising to the lcm of the other lengths.
    fn isolates_cycle(&self, q: usize) -> bool {
        self.count(q) == 1 && self.0.iter().all(|&l| l == q || l % q != 0)
    }

    fn isolates_transposition(&self) -> bool {
        self.count(2) == 1 && self.0.iter().all(|&l| l == 2 || l % 2 == 1)
    }
}

impl fmt::Display for CycleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// A good prime with its Frobenius cycle type; `l` lies in `P_i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeClass {
    pub prime: u64,
    pub cycle_type: CycleType,
    pub class_index: usize,
}

fn check_good_prime(curve: &CurveSpec, l: u64) -> Result<()> {
    if !is_prime(l) {
        return Err(Error::invalid(format!("{l} is not prime")));
    }
    if curve.sigma()?.contains_prime(l) {
        return Err(Error::BadPrime(l));
    }
    Ok(())
}

/// Cycle type of Frobenius at a good odd prime, from scratch.
pub fn classify_prime(curve: &CurveSpec, l: u64) -> Result<PrimeClass> {
    classify_prime_seeded(curve, l, 0)
}

pub fn classify_prime_seeded(curve: &CurveSpec, l: u64, seed: u64) -> Result<PrimeClass> {
    check_good_prime(curve, l)?;
    let reduced = FpPoly::reduce(curve.f(), l)?;
    let cycle_type = CycleType::new(degrees_of_reduced(&reduced, seed))?;
    Ok(PrimeClass {
        prime: l,
        class_index: cycle_type.class_index(),
        cycle_type,
    })
}

/// Like [`classify_prime`], consulting and filling a cache.
pub fn classify_prime_cached(
    curve: &CurveSpec,
    l: u64,
    cache: Option<&PrimeCache>,
    seed: u64,
) -> Result<PrimeClass> {
    let Some(cache) = cache else {
        return classify_prime_seeded(curve, l, seed);
    };
    let key = curve.hash();
    if let Some(lengths) = cache.get(&key, l) {
        check_good_prime(curve, l)?;
        let cycle_type = CycleType::new(lengths)?;
        return Ok(PrimeClass {
            prime: l,
            class_index: cycle_type.class_index(),
            cycle_type,
        });
    }
    let pc = classify_prime_seeded(curve, l, seed)?;
    cache.insert(&key, l, pc.cycle_type.lengths())?;
    Ok(pc)
}

pub type CyclePredicate = Arc<dyn Fn(&CycleType) -> bool + Send + Sync>;

/// Filter for [`prime_scan`]: every present condition must hold.
#[derive(Clone, Default)]
pub struct ScanFilter {
    pub class_index: Option<usize>,
    /// `l = residue (mod modulus)`.
    pub congruences: Vec<(u64, u64)>,
    /// `kronecker(a, l) = value`.
    pub symbols: Vec<(BigInt, i8)>,
    pub cycle: Option<CyclePredicate>,
}

impl fmt::Debug for ScanFilter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScanFilter")
            .field("class_index", &self.class_index)
            .field("congruences", &self.congruences)
            .field("symbols", &self.symbols)
            .field("cycle", &self.cycle.as_ref().map(|_| "<fn>"))
            .finish()
    }
}

impl ScanFilter {
    pub fn class(i: usize) -> Self {
        ScanFilter {
            class_index: Some(i),
            ..Default::default()
        }
    }

    pub fn with_congruence(mut self, modulus: u64, residue: u64) -> Self {
        self.congruences.push((modulus, residue % modulus));
        self
    }

    pub fn with_symbol(mut self, a: BigInt, value: i8) -> Self {
        self.symbols.push((a, value));
        self
    }

    pub fn with_cycle(mut self, pred: impl Fn(&CycleType) -> bool + Send + Sync + 'static) -> Self {
        self.cycle = Some(Arc::new(pred));
        self
    }

    /// Checks that need no factorization.
    fn prefilter(&self, l: u64) -> bool {
        self.congruences.iter().all(|&(m, r)| l % m == r)
            && self
                .symbols
                .iter()
                .all(|(a, v)| kronecker(a, l as i64).map(|k| k == *v).unwrap_or(false))
    }

    fn accepts(&self, pc: &PrimeClass) -> bool {
        self.class_index.is_none_or(|i| i == pc.class_index)
            && self.cycle.as_ref().is_none_or(|c| c(&pc.cycle_type))
    }
}

const SCAN_SEGMENT: u64 = 8192;

/// Resumable, ordered stream of good primes in `[start, end]` passing a
/// filter. Each segment is classified in parallel and merged in order.
pub struct PrimeScan<'a> {
    curve: &'a CurveSpec,
    filter: ScanFilter,
    cache: Option<&'a PrimeCache>,
    seed: u64,
    cursor: u64,
    end: u64,
    buffer: std::collections::VecDeque<PrimeClass>,
    error: Option<Error>,
}

impl<'a> PrimeScan<'a> {
    /// Position from which a fresh scan would continue.
    pub fn cursor(&self) -> u64 {
        self.buffer.front().map_or(self.cursor, |pc| pc.prime)
    }

    pub fn with_cache(mut self, cache: Option<&'a PrimeCache>) -> Self {
        self.cache = cache;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Error that stopped the scan, if any.
    pub fn error(&self) -> Option<&Error> {
        self.error.as_ref()
    }

    fn refill(&mut self) {
        while self.buffer.is_empty() && self.cursor <= self.end && self.error.is_none() {
            let hi = self.end.saturating_add(1).min(self.cursor.saturating_add(SCAN_SEGMENT));
            let candidates = primes_in_range(self.cursor.max(3), hi);
            self.cursor = hi;
            let sigma = match self.curve.sigma() {
                Ok(s) => s,
                Err(e) => {
                    self.error = Some(e);
                    return;
                }
            };
            let (curve, filter, cache, seed) = (self.curve, &self.filter, self.cache, self.seed);
            let results: Vec<Result<Option<PrimeClass>>> = candidates
                .par_iter()
                .filter(|&&l| !sigma.contains_prime(l) && filter.prefilter(l))
                .map(|&l| {
                    let pc = classify_prime_cached(curve, l, cache, seed)?;
                    Ok(filter.accepts(&pc).then_some(pc))
                })
                .collect();
            for r in results {
                match r {
                    Ok(Some(pc)) => self.buffer.push_back(pc),
                    Ok(None) => {}
                    Err(e) => {
                        self.error = Some(e);
                        return;
                    }
                }
            }
            if hi > self.end {
                self.cursor = self.end.saturating_add(1);
            }
        }
    }
}

impl Iterator for PrimeScan<'_> {
    type Item = PrimeClass;

    fn next(&mut self) -> Option<PrimeClass> {
        if self.buffer.is_empty() {
            self.refill();
        }
        self.buffer.pop_front()
    }
}

/// Streams the good primes `l` in `[start, end]` accepted by `filter`.
pub fn prime_scan(curve: &CurveSpec, filter: ScanFilter, start: u64, end: u64) -> PrimeScan<'_> {
    PrimeScan {
        curve,
        filter,
        cache: None,
        seed: 0,
        cursor: start,
        end,
        buffer: Default::default(),
        error: None,
    }
}

/// Outcome label of [`galois_classify`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GaloisLabel {
    SnCertified,
    AnCertified,
    InsideAn,
    Unknown,
}

impl fmt::Display for GaloisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GaloisLabel::SnCertified => "Sn_certified",
            GaloisLabel::AnCertified => "An_certified",
            GaloisLabel::InsideAn => "inside_An",
            GaloisLabel::Unknown => "unknown",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GaloisEvidence {
    pub disc_is_square: bool,
    pub sample_bound: u64,
    /// Cycle type (as text) -> number of primes exhibiting it.
    pub cycle_types: BTreeMap<String, usize>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GaloisVerdict {
    pub label: GaloisLabel,
    pub evidence: GaloisEvidence,
}

/// True if the rational `x` is the square of a rational.
pub fn is_rational_square(x: &BigRational) -> bool {
    !x.is_zero() && is_square(&rational_square_class(x))
}

fn is_small_prime(q: usize) -> bool {
    is_prime(q as u64)
}

/// Recognizes `S_n` / `A_n` from sampled cycle types using standard
/// sufficient criteria; never claims a group it cannot certify.
pub fn galois_classify(curve: &CurveSpec, sample_bound: u64) -> Result<GaloisVerdict> {
    let n = curve.degree();
    let disc_is_square = is_rational_square(curve.discriminant());
    let mut notes = Vec::new();
    let mut observed: BTreeSet<CycleType> = BTreeSet::new();
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for pc in prime_scan(curve, ScanFilter::default(), 3, sample_bound) {
        *counts.entry(pc.cycle_type.to_string()).or_default() += 1;
        observed.insert(pc.cycle_type);
    }
    let mut evidence = GaloisEvidence {
        disc_is_square,
        sample_bound,
        cycle_types: counts,
        notes: Vec::new(),
    };

    let declared_reducible = curve.declared_factors().is_some_and(|f| f.len() > 1);
    let has_rational_root = !rational_roots(curve.f())?.is_empty();
    if declared_reducible || has_rational_root {
        notes.push("f reducible over Q".to_string());
        evidence.notes = notes;
        return Ok(GaloisVerdict {
            label: GaloisLabel::Unknown,
            evidence,
        });
    }

    let transitive = observed.iter().any(|c| c.lengths() == [n]);
    if transitive {
        notes.push(format!("{n}-cycle observed: f irreducible, group transitive"));
    }
    let two_transitive = transitive && observed.iter().any(|c| c.lengths() == [1, n - 1]);
    let big_prime_cycle = observed
        .iter()
        .any(|c| (n / 2 + 1..=n).any(|q| is_small_prime(q) && c.isolates_cycle(q)));
    let primitive = transitive && (is_small_prime(n) || two_transitive || big_prime_cycle);
    if primitive {
        notes.push("group primitive".to_string());
    }
    let transposition = observed.iter().any(CycleType::isolates_transposition);
    let jordan_cycle = observed.iter().any(|c| {
        c.isolates_cycle(3)
            || (5..=n.saturating_sub(3)).any(|q| is_small_prime(q) && c.isolates_cycle(q))
    });
    if primitive && transposition {
        notes.push("transposition isolated".to_string());
    }
    if primitive && jordan_cycle {
        notes.push("prime cycle isolated: group contains A_n".to_string());
    }
    let contains_an = primitive && (jordan_cycle || transposition);
    let label = if disc_is_square {
        if contains_an {
            GaloisLabel::AnCertified
        } else {
            GaloisLabel::InsideAn
        }
    } else if primitive && (transposition || jordan_cycle) {
        GaloisLabel::SnCertified
    } else {
        GaloisLabel::Unknown
    };
    evidence.notes = notes;
    Ok(GaloisVerdict { label, evidence })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::curve_from_i64;
    use crate::fp::factor_degrees;

    fn cube2() -> CurveSpec {
        curve_from_i64(&[-2, 0, 0, 1])
    }

    #[test]
    fn sigma_examples() {
        assert_eq!(cube2().sigma().unwrap().to_string(), "{inf, 2, 3}");
        let split = curve_from_i64(&[1672, -273, 0, 1]);
        assert_eq!(split.sigma().unwrap().to_string(), "{inf, 2, 3, 5}");
        let h = CurveSpec::new(
            RatPoly::from_i64(&[-2457, -176904, -2128035, -9895158, -20272980, -14905800]),
            None,
        )
        .unwrap();
        let s = h.sigma().unwrap();
        for q in [2, 3, 5, 7, 13] {
            assert!(s.contains_prime(q));
        }
    }

    #[test]
    fn classify_examples() {
        let c = cube2();
        let p5 = classify_prime(&c, 5).unwrap();
        assert_eq!((p5.cycle_type.lengths(), p5.class_index), (&[1, 2][..], 1));
        assert_eq!(classify_prime(&c, 7).unwrap().class_index, 0);
        assert_eq!(classify_prime(&c, 31).unwrap().class_index, 2);
        assert_eq!(classify_prime(&c, 3), Err(Error::BadPrime(3)));
        assert_eq!(classify_prime(&c, 2), Err(Error::BadPrime(2)));
        assert!(classify_prime(&c, 9).is_err());
    }

    #[test]
    fn scan_examples() {
        let c = cube2();
        let got: Vec<u64> = prime_scan(&c, ScanFilter::class(2).with_congruence(8, 1), 1, 500)
            .map(|pc| pc.prime)
            .collect();
        assert_eq!(got, vec![433, 457]);
        let p0: Vec<u64> = prime_scan(&c, ScanFilter::class(0), 1, 50).map(|pc| pc.prime).collect();
        assert_eq!(p0, vec![7, 13, 19, 37]);
        let oracle: Vec<u64> = (5..=50)
            .filter(|&l| is_prime(l))
            .filter(|&l| factor_degrees(c.f(), l).unwrap() == vec![3])
            .collect();
        assert_eq!(p0, oracle);
        assert_eq!(prime_scan(&c, ScanFilter::default(), 100, 99).count(), 0);
    }

    #[test]
    fn scan_resumes_from_cursor() {
        let c = cube2();
        let all: Vec<u64> = prime_scan(&c, ScanFilter::class(1), 1, 3000).map(|pc| pc.prime).collect();
        let mut scan = prime_scan(&c, ScanFilter::class(1), 1, 3000);
        let head: Vec<u64> = scan.by_ref().take(10).map(|pc| pc.prime).collect();
        let resumed: Vec<u64> = prime_scan(&c, ScanFilter::class(1), scan.cursor(), 3000)
            .map(|pc| pc.prime)
            .collect();
        let mut joined = head;
        joined.extend(resumed);
        assert_eq!(joined, all);
    }

    #[test]
    fn galois_examples() {
        assert_eq!(galois_classify(&cube2(), 100).unwrap().label, GaloisLabel::SnCertified);
        let split = galois_classify(&curve_from_i64(&[1672, -273, 0, 1]), 100).unwrap();
        assert_eq!(split.label, GaloisLabel::Unknown);
        assert!(split.evidence.notes.iter().any(|n| n.contains("reducible")));
        // x^3 - 3x + 1: cyclic cubic
        assert_eq!(
            galois_classify(&curve_from_i64(&[1, -3, 0, 1]), 200).unwrap().label,
            GaloisLabel::AnCertified
        );
        assert_eq!(
            galois_classify(&curve_from_i64(&[-1, -1, 0, 0, 0, 1]), 500).unwrap().label,
            GaloisLabel::SnCertified
        );
        // too few samples to see anything useful
        assert_eq!(galois_classify(&cube2(), 4).unwrap().label, GaloisLabel::Unknown);
    }

    #[test]
    fn cycle_type_parity() {
        let c = CycleType::new(vec![2, 1, 2]).unwrap();
        assert_eq!(c.lengths(), &[1, 2, 2]);
        assert!(c.is_even());
        assert!(!CycleType::new(vec![2, 3]).unwrap().is_even());
        assert!(CycleType::new(vec![]).is_err());
    }

    #[test]
    fn cube_root_class_frequencies() {
        // S_3 classes: {3} 1/3, {1,2} 1/2, {1,1,1} 1/6
        let c = cube2();
        let mut counts = [0usize; 3];
        let mut total = 0usize;
        for pc in prime_scan(&c, ScanFilter::default(), 1, 100_000) {
            counts[pc.class_index] += 1;
            total += 1;
        }
        let freq: Vec<f64> = counts.iter().map(|&k| k as f64 / total as f64).collect();
        assert!((freq[0] - 1.0 / 3.0).abs() < 0.02, "{freq:?}");
        assert!((freq[1] - 1.0 / 2.0).abs() < 0.02, "{freq:?}");
        assert!((freq[2] - 1.0 / 6.0).abs() < 0.02, "{freq:?}");
    }
}
