//! Local invariants `h_v` and `omega_v`, the parity-flip predictor, the
//! disparity constant `delta`, and twist-parity density scans.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::cache::PrimeCache;
use crate::characters::{
    character_from_mask, ClassLabel, character_generators, local_behavior, local_class, local_labels,
    sample_squarefree, LocalBehavior, QuadTwist, ENUMERATION_CAP,
};
use crate::curve::CurveSpec;
use crate::error::{Error, Result};
use crate::galois::classify_prime_cached;
use crate::metabolic::Subspace;
use crate::poly::real_root_signature;
use crate::profile::{LocalProfile, ProfileSet};
use crate::symbols::{hilbert_symbol_int, rational_square_class, Place};

pub(crate) fn ser_rational<S: Serializer>(x: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

fn ser_opt_rational<S: Serializer>(x: &Option<BigRational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match x {
        Some(x) => s.serialize_some(&x.to_string()),
        None => s.serialize_none(),
    }
}

/// `h_l` at a good prime: 0 unless the character ramifies at `l`, where it
/// is the class index of `l`.
pub fn good_prime_h(curve: &CurveSpec, l: u64, behavior: LocalBehavior) -> Result<u32> {
    good_prime_h_cached(curve, l, behavior, None)
}

pub fn good_prime_h_cached(
    curve: &CurveSpec,
    l: u64,
    behavior: LocalBehavior,
    cache: Option<&PrimeCache>,
) -> Result<u32> {
    curve.require_p2()?;
    if l == 2 || curve.sigma()?.contains_prime(l) {
        return Err(Error::BadPrime(l));
    }
    match behavior {
        LocalBehavior::Trivial | LocalBehavior::UnramifiedNontrivial => {
            if !crate::primes::is_prime(l) {
                return Err(Error::invalid(format!("{l} is not prime")));
            }
            Ok(0)
        }
        LocalBehavior::Ramified => Ok(classify_prime_cached(curve, l, cache, 0)?.class_index as u32),
        LocalBehavior::Sign => Err(Error::invalid("sign behavior only occurs at infinity")),
    }
}

/// `h` of the sign character at the real place: `k1 - 1`.
pub fn real_place_h(curve: &CurveSpec) -> Result<u32> {
    let (_, k1, _) = real_root_signature(curve.f())?;
    Ok(k1 as u32 - 1)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ParityStatus {
    Exact,
    RelativeOnly,
    Unknown { missing: Vec<Place> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PlaceContribution {
    pub place: Place,
    pub label: ClassLabel,
    pub behavior: LocalBehavior,
    /// `None` when the profile entry is unknown.
    pub h: Option<u32>,
    pub h_source: &'static str,
    pub hilbert: i8,
    pub omega: Option<i8>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParityVerdict {
    pub d: QuadTwist,
    pub flip: i8,
    pub status: ParityStatus,
    pub contributions: Vec<PlaceContribution>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PlaceDelta {
    pub place: Place,
    #[serde(serialize_with = "ser_rational")]
    pub delta: BigRational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DisparityReport {
    pub per_place: Vec<PlaceDelta>,
    #[serde(serialize_with = "ser_rational")]
    pub delta: BigRational,
    #[serde(serialize_with = "ser_rational")]
    pub even_density: BigRational,
    pub r1_parity: u8,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DensityMode {
    /// Every character of norm below `max_norm`.
    Exhaustive { max_norm: u64 },
    /// Uniform samples from the characters of norm below `max_norm`.
    GroupSample { max_norm: u64, samples: u64 },
    /// Uniform squarefree `d` with `|d| <= bound`.
    Sample { samples: u64, bound: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DensityReport {
    pub mode: DensityMode,
    pub seed: Option<u64>,
    pub r1_parity: u8,
    pub total: u64,
    pub even: u64,
    #[serde(serialize_with = "ser_rational")]
    pub fraction: BigRational,
    /// `(1 + delta) / 2` when every profile entry is known.
    #[serde(serialize_with = "ser_opt_rational")]
    pub predicted: Option<BigRational>,
    /// Whether the characters map onto the full product of local groups,
    /// in which case an exhaustive fraction equals `predicted` exactly.
    pub surjective_on_sigma: Option<bool>,
    pub restricted_to_sigma_trivial: bool,
    pub warnings: Vec<String>,
}

struct PlaceTable {
    place: Place,
    /// label -> (h, source, hilbert symbol with the discriminant)
    entries: BTreeMap<ClassLabel, (Option<u32>, &'static str, i8)>,
}

/// Precomputed `omega_v` tables for one curve and one set of profiles.
pub struct ParityEngine<'a> {
    curve: &'a CurveSpec,
    tables: Vec<PlaceTable>,
}

impl<'a> ParityEngine<'a> {
    /// Binds profiles to the curve: every profile must sit at a place of
    /// the bad set, and any real-place entry must equal `k1 - 1`.
    pub fn new(curve: &'a CurveSpec, profiles: &ProfileSet) -> Result<Self> {
        curve.require_p2()?;
        let sigma = curve.sigma()?;
        for v in profiles.places() {
            if !sigma.contains(v) {
                return Err(Error::invalid(format!("profile given at {v}, which is not a bad place")));
            }
        }
        let h_inf = real_place_h(curve)?;
        if let Some(p) = profiles.get(Place::Infinity) {
            if let Some(given) = p.h(-1)? {
                if given != h_inf {
                    return Err(Error::invalid(format!(
                        "real-place entry h[-1] = {given} contradicts k1 - 1 = {h_inf}"
                    )));
                }
            }
        }
        let disc = rational_square_class(curve.discriminant());
        let mut tables = Vec::new();
        for v in sigma.places() {
            let mut entries = BTreeMap::new();
            for label in local_labels(v) {
                let (h, source) = match (v, label) {
                    (_, 1) => (Some(0), "trivial"),
                    (Place::Infinity, _) => (Some(h_inf), "real_roots"),
                    _ => match profiles.get(v) {
                        Some(p) => (p.h(label)?, "profile"),
                        None => (None, "profile"),
                    },
                };
                let hilbert = hilbert_symbol_int(&BigInt::from(label), &disc, v)?;
                entries.insert(label, (h, source, hilbert));
            }
            tables.push(PlaceTable { place: v, entries });
        }
        Ok(ParityEngine { curve, tables })
    }

    pub fn curve(&self) -> &CurveSpec {
        self.curve
    }

    pub fn places(&self) -> impl Iterator<Item = Place> + '_ {
        self.tables.iter().map(|t| t.place)
    }

    fn table(&self, v: Place) -> Result<&PlaceTable> {
        self.tables
            .iter()
            .find(|t| t.place == v)
            .ok_or_else(|| Error::invalid(format!("{v} is not a bad place")))
    }

    /// `(-1)^h * (label, disc)_v`, or `None` if `h` is unknown.
    pub fn omega(&self, v: Place, label: ClassLabel) -> Result<Option<i8>> {
        let t = self.table(v)?;
        let &(h, _, hilbert) = t
            .entries
            .get(&label)
            .ok_or_else(|| Error::invalid(format!("{label} is not a square-class label at {v}")))?;
        Ok(h.map(|h| if h % 2 == 0 { hilbert } else { -hilbert }))
    }

    /// True when every entry at every bad place is known.
    pub fn is_complete(&self) -> bool {
        self.tables.iter().all(|t| t.entries.values().all(|e| e.0.is_some()))
    }

    pub fn parity_flip(&self, d: &QuadTwist) -> ParityVerdict {
        let mut flip = 1i8;
        let mut missing = Vec::new();
        let mut sigma_trivial = true;
        let mut contributions = Vec::with_capacity(self.tables.len());
        for t in &self.tables {
            let label = local_class(d, t.place);
            let (h, source, hilbert) = t.entries[&label];
            let omega = h.map(|h| if h % 2 == 0 { hilbert } else { -hilbert });
            match omega {
                Some(w) => flip *= w,
                None => missing.push(t.place),
            }
            sigma_trivial &= label == 1;
            contributions.push(PlaceContribution {
                place: t.place,
                label,
                behavior: local_behavior(d, t.place),
                h,
                h_source: source,
                hilbert,
                omega,
            });
        }
        let status = if d.is_trivial() {
            ParityStatus::Exact
        } else if sigma_trivial {
            ParityStatus::RelativeOnly
        } else if missing.is_empty() {
            ParityStatus::Exact
        } else {
            ParityStatus::Unknown { missing }
        };
        ParityVerdict {
            d: d.clone(),
            flip,
            status,
            contributions,
        }
    }

    /// Flip from local classes alone, `None` if an entry is unknown.
    fn flip_only(&self, d: &QuadTwist) -> Option<i8> {
        let mut flip = 1i8;
        for t in &self.tables {
            let (h, _, hilbert) = t.entries[&local_class(d, t.place)];
            flip *= if h? % 2 == 0 { hilbert } else { -hilbert };
        }
        Some(flip)
    }

    fn is_sigma_trivial(&self, d: &QuadTwist) -> bool {
        self.tables.iter().all(|t| local_class(d, t.place) == 1)
    }

    /// Average of `omega_v` over the local characters at `v`.
    pub fn delta_v(&self, v: Place) -> Result<BigRational> {
        let t = self.table(v)?;
        let mut sum = 0i64;
        let mut unknown = Vec::new();
        for (&label, &(h, _, hilbert)) in &t.entries {
            match h {
                Some(h) => sum += i64::from(if h % 2 == 0 { hilbert } else { -hilbert }),
                None => unknown.push(format!("{v}:h[{label}]")),
            }
        }
        if !unknown.is_empty() {
            return Err(Error::UnknownProfile(unknown));
        }
        Ok(BigRational::new(sum.into(), (t.entries.len() as i64).into()))
    }

    /// `delta = (-1)^{r1} prod_v delta_v` and the even density `(1 + delta) / 2`.
    pub fn delta(&self, r1_parity: u8) -> Result<DisparityReport> {
        let mut per_place = Vec::new();
        let mut unknown = Vec::new();
        for t in &self.tables {
            match self.delta_v(t.place) {
                Ok(delta) => per_place.push(PlaceDelta { place: t.place, delta }),
                Err(Error::UnknownProfile(mut u)) => unknown.append(&mut u),
                Err(e) => return Err(e),
            }
        }
        if !unknown.is_empty() {
            return Err(Error::UnknownProfile(unknown));
        }
        let mut delta: BigRational = per_place.iter().map(|p| p.delta.clone()).product();
        if r1_parity % 2 == 1 {
            delta = -delta;
        }
        let even_density = (BigRational::one() + &delta) / BigRational::from_integer(2.into());
        Ok(DisparityReport {
            per_place,
            delta,
            even_density,
            r1_parity: r1_parity % 2,
        })
    }

    /// Bit vector of local classes over all bad places (`None` past 63 bits).
    fn local_class_bits(&self, d: &QuadTwist) -> Option<u64> {
        let mut bits = 0u64;
        let mut shift = 0;
        for t in &self.tables {
            let label = local_class(d, t.place);
            let (value, width) = match t.place {
                Place::Infinity => (u64::from(label < 0), 1),
                Place::Finite(2) => {
                    let unit = label / if label % 2 == 0 { 2 } else { 1 };
                    (
                        u64::from(unit.abs() == 5) | u64::from(unit < 0) << 1 | u64::from(label % 2 == 0) << 2,
                        3,
                    )
                }
                Place::Finite(q) => {
                    let q = q as ClassLabel;
                    let unit = if label % q == 0 { label / q } else { label };
                    (u64::from(unit != 1) | u64::from(label % q == 0) << 1, 2)
                }
            };
            bits |= value << shift;
            shift += width;
            if shift > 63 {
                return None;
            }
        }
        Some(bits)
    }

    fn local_group_dim(&self) -> usize {
        self.tables
            .iter()
            .map(|t| match t.place {
                Place::Infinity => 1,
                Place::Finite(2) => 3,
                Place::Finite(_) => 2,
            })
            .sum()
    }

    /// Whether the characters of norm `< max_norm` reach every combination
    /// of local classes at the bad places.
    pub fn surjective_on_sigma(&self, max_norm: u64) -> Result<Option<bool>> {
        let dim = self.local_group_dim();
        if dim > 63 {
            return Ok(None);
        }
        let mut image = Subspace::zero(dim);
        for g in character_generators(max_norm)? {
            match self.local_class_bits(&g) {
                Some(b) => {
                    image.insert(b);
                }
                None => return Ok(None),
            }
        }
        Ok(Some(image.dim() == dim))
    }

    /// Fraction of twists with even predicted parity relative to `r1_parity`.
    pub fn density_scan(&self, mode: DensityMode, r1_parity: u8, seed: u64) -> Result<DensityReport> {
        let mut warnings = Vec::new();
        let complete = self.is_complete();
        if !complete {
            warnings.push("profiles incomplete on the bad set: restricted to sigma-trivial twists".to_string());
        }
        let mut mode = mode;
        if let DensityMode::Exhaustive { max_norm } = mode {
            let k = character_generators(max_norm)?.len();
            if k >= 63 || 1usize << k > ENUMERATION_CAP {
                let samples = FALLBACK_SAMPLES;
                warnings.push(format!(
                    "2^{k} characters exceed the enumeration cap: sampled {samples} uniformly with seed {seed}"
                ));
                mode = DensityMode::GroupSample { max_norm, samples };
            }
        }
        let r1 = r1_parity % 2;
        let want = if r1 == 0 { 1 } else { -1 };
        // (considered, even) for one character
        let tally = |d: &QuadTwist| -> (u64, u64) {
            if !complete {
                if self.is_sigma_trivial(d) {
                    (1, u64::from(r1 == 0))
                } else {
                    (0, 0)
                }
            } else {
                (1, u64::from(self.flip_only(d) == Some(want)))
            }
        };
        let add = |a: (u64, u64), b: (u64, u64)| (a.0 + b.0, a.1 + b.1);
        let ((total, even), used_seed, max_norm) = match &mode {
            DensityMode::Exhaustive { max_norm } => {
                let gens = character_generators(*max_norm)?;
                let size = 1u64 << gens.len();
                let counts = (0..size)
                    .into_par_iter()
                    .map(|m| tally(&character_from_mask(&gens, m)))
                    .reduce(|| (0, 0), add);
                (counts, None, Some(*max_norm))
            }
            DensityMode::GroupSample { max_norm, samples } => {
                let gens = character_generators(*max_norm)?;
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let masks: Vec<Vec<bool>> = (0..*samples)
                    .map(|_| (0..gens.len()).map(|_| rng.gen()).collect())
                    .collect();
                let counts = masks
                    .par_iter()
                    .map(|bits| {
                        let chosen: Vec<QuadTwist> = gens
                            .iter()
                            .zip(bits)
                            .filter(|(_, &b)| b)
                            .map(|(g, _)| g.clone())
                            .collect();
                        tally(&chosen.iter().fold(QuadTwist::trivial(), |acc, g| acc.mul(g)))
                    })
                    .reduce(|| (0, 0), add);
                (counts, Some(seed), Some(*max_norm))
            }
            DensityMode::Sample { samples, bound } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let ds = (0..*samples)
                    .map(|_| sample_squarefree(*bound, &mut rng))
                    .collect::<Result<Vec<_>>>()?;
                let counts = ds.par_iter().map(tally).reduce(|| (0, 0), add);
                (counts, Some(seed), None)
            }
        };
        let fraction = if total == 0 {
            BigRational::zero()
        } else {
            BigRational::new(even.into(), total.into())
        };
        let predicted = if complete {
            Some(self.delta(r1)?.even_density)
        } else {
            None
        };
        let surjective_on_sigma = match max_norm {
            Some(x) => self.surjective_on_sigma(x)?,
            None => None,
        };
        Ok(DensityReport {
            mode,
            seed: used_seed,
            r1_parity: r1,
            total,
            even,
            fraction,
            predicted,
            surjective_on_sigma,
            restricted_to_sigma_trivial: !complete,
            warnings,
        })
    }
}

/// Sample size used when an exhaustive scan is over the cap.
pub const FALLBACK_SAMPLES: u64 = 200_000;

/// `omega_v` at one local class; `None` if the profile entry is unknown.
pub fn omega_v(curve: &CurveSpec, v: Place, label: ClassLabel, profiles: &ProfileSet) -> Result<Option<i8>> {
    ParityEngine::new(curve, profiles)?.omega(v, label)
}

pub fn parity_flip(curve: &CurveSpec, d: &QuadTwist, profiles: &ProfileSet) -> Result<ParityVerdict> {
    Ok(ParityEngine::new(curve, profiles)?.parity_flip(d))
}

pub fn delta_v(curve: &CurveSpec, v: Place, profiles: &ProfileSet) -> Result<BigRational> {
    ParityEngine::new(curve, profiles)?.delta_v(v)
}

pub fn delta(curve: &CurveSpec, profiles: &ProfileSet, r1_parity: u8) -> Result<DisparityReport> {
    ParityEngine::new(curve, profiles)?.delta(r1_parity)
}

/// `delta_inf` from the degree alone: 1 for `n = 1 (mod 4)`, 0 for `n = 3 (mod 4)`.
pub fn delta_infinity_closed_form(n: usize) -> Result<BigRational> {
    match n % 4 {
        1 => Ok(BigRational::one()),
        3 => Ok(BigRational::zero()),
        _ => Err(Error::invalid("degree must be odd")),
    }
}

/// Both sides of the consistency identity: the parity of `h` summed over
/// good primes dividing `d`, and the product of `(d, disc)_v` over the bad set.
pub fn global_consistency_sides(
    curve: &CurveSpec,
    d: &QuadTwist,
    cache: Option<&PrimeCache>,
) -> Result<(i8, i8)> {
    let sigma = curve.sigma()?;
    let mut h_sum = 0u32;
    for &l in d.odd_primes() {
        if !sigma.contains_prime(l) {
            h_sum += good_prime_h_cached(curve, l, LocalBehavior::Ramified, cache)?;
        }
    }
    let lhs = if h_sum % 2 == 0 { 1 } else { -1 };
    let disc = rational_square_class(curve.discriminant());
    let dd = d.d();
    let mut rhs = 1i8;
    for v in sigma.places() {
        rhs *= hilbert_symbol_int(&dd, &disc, v)?;
    }
    Ok((lhs, rhs))
}

pub fn global_consistency_check(curve: &CurveSpec, d: &QuadTwist) -> Result<bool> {
    let (lhs, rhs) = global_consistency_sides(curve, d, None)?;
    Ok(lhs == rhs)
}

/// A profile set filled everywhere on the bad set by `h(place, label)`.
pub fn synthetic_profiles(curve: &CurveSpec, mut h: impl FnMut(Place, ClassLabel) -> u32) -> Result<ProfileSet> {
    let mut set = ProfileSet::new();
    for v in curve.sigma()?.places() {
        if v != Place::Infinity {
            set.insert(LocalProfile::from_fn(v, |label| Some(h(v, label))));
        }
    }
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::enumerate_characters;
    use crate::curve::curve_from_i64;
    use crate::poly::RatPoly;

    fn cube2() -> CurveSpec {
        curve_from_i64(&[-2, 0, 0, 1])
    }

    fn h_curve() -> CurveSpec {
        CurveSpec::new(
            RatPoly::from_i64(&[-2457, -176904, -2128035, -9895158, -20272980, -14905800]),
            None,
        )
        .unwrap()
    }

    fn tw(d: i64) -> QuadTwist {
        QuadTwist::from_i64(d).unwrap()
    }

    #[test]
    fn good_prime_examples() {
        let c = cube2();
        assert_eq!(good_prime_h(&c, 5, LocalBehavior::Ramified).unwrap(), 1);
        assert_eq!(good_prime_h(&c, 7, LocalBehavior::Ramified).unwrap(), 0);
        assert_eq!(good_prime_h(&c, 31, LocalBehavior::UnramifiedNontrivial).unwrap(), 0);
        assert_eq!(good_prime_h(&c, 3, LocalBehavior::Ramified), Err(Error::BadPrime(3)));
    }

    #[test]
    fn omega_at_infinity() {
        let empty = ProfileSet::new();
        assert_eq!(omega_v(&cube2(), Place::Infinity, -1, &empty).unwrap(), Some(-1));
        assert_eq!(omega_v(&h_curve(), Place::Infinity, -1, &empty).unwrap(), Some(1));
        assert_eq!(omega_v(&cube2(), Place::Infinity, 1, &empty).unwrap(), Some(1));
        assert_eq!(omega_v(&cube2(), Place::Finite(3), 2, &empty).unwrap(), None);
    }

    #[test]
    fn flip_examples() {
        let c = cube2();
        let empty = ProfileSet::new();
        let v = parity_flip(&c, &tw(73), &empty).unwrap();
        assert_eq!((v.flip, v.status), (1, ParityStatus::RelativeOnly));
        let v = parity_flip(&c, &tw(1), &empty).unwrap();
        assert_eq!((v.flip, v.status), (1, ParityStatus::Exact));
        let v = parity_flip(&c, &tw(-1), &empty).unwrap();
        assert_eq!(v.status, ParityStatus::Unknown { missing: vec![Place::Finite(2), Place::Finite(3)] });
        let full = synthetic_profiles(&c, |_, _| 0).unwrap();
        assert_eq!(parity_flip(&c, &tw(-1), &full).unwrap().status, ParityStatus::Exact);
    }

    #[test]
    fn profile_binding() {
        let c = cube2();
        let mut bad = ProfileSet::new();
        bad.insert(LocalProfile::unknown(Place::Finite(5)));
        assert!(ParityEngine::new(&c, &bad).is_err());
        let mut inf = ProfileSet::new();
        let mut p = LocalProfile::unknown(Place::Infinity);
        p.set(-1, Some(1)).unwrap();
        inf.insert(p);
        assert!(ParityEngine::new(&c, &inf).is_err());
        let mut p = LocalProfile::unknown(Place::Infinity);
        p.set(-1, Some(0)).unwrap();
        let mut ok = ProfileSet::new();
        ok.insert(p);
        assert!(ParityEngine::new(&c, &ok).is_ok());
    }

    #[test]
    fn consistency_examples() {
        let c = cube2();
        assert_eq!(global_consistency_sides(&c, &tw(5), None).unwrap(), (-1, -1));
        assert!(global_consistency_check(&c, &tw(1)).unwrap());
        let h = h_curve();
        for d in [-1i64, 11, -17, 1001, 65537, -999_983] {
            assert!(global_consistency_check(&h, &tw(d)).unwrap(), "d = {d}");
        }
    }

    #[test]
    fn delta_values() {
        let empty = ProfileSet::new();
        assert_eq!(delta_v(&cube2(), Place::Infinity, &empty).unwrap(), BigRational::zero());
        assert_eq!(delta_v(&h_curve(), Place::Infinity, &empty).unwrap(), BigRational::one());
        assert!(matches!(delta(&cube2(), &empty, 0), Err(Error::UnknownProfile(_))));
        let full = synthetic_profiles(&cube2(), |_, _| 0).unwrap();
        let r = delta(&cube2(), &full, 0).unwrap();
        assert_eq!(r.delta, BigRational::zero());
        assert_eq!(r.even_density, BigRational::new(1.into(), 2.into()));
    }

    #[test]
    fn exhaustive_density_matches_local_average() {
        let c = cube2();
        let profiles = synthetic_profiles(&c, |v, label| match v {
            Place::Finite(2) => u32::from(label % 2 == 0),
            _ => u32::from(label < 0),
        })
        .unwrap();
        let engine = ParityEngine::new(&c, &profiles).unwrap();
        let r = engine.density_scan(DensityMode::Exhaustive { max_norm: 20 }, 0, 0).unwrap();
        assert_eq!(r.surjective_on_sigma, Some(true));
        assert_eq!(Some(r.fraction.clone()), r.predicted);
        // brute oracle
        let even = enumerate_characters(20)
            .unwrap()
            .iter()
            .filter(|d| engine.parity_flip(d).flip == 1)
            .count();
        assert_eq!(r.fraction, BigRational::new((even as i64).into(), 512.into()));
    }

    #[test]
    fn restricted_density_is_one() {
        let c = cube2();
        let engine = ParityEngine::new(&c, &ProfileSet::new()).unwrap();
        let r = engine.density_scan(DensityMode::Exhaustive { max_norm: 30 }, 0, 0).unwrap();
        assert!(r.restricted_to_sigma_trivial);
        assert_eq!(r.fraction, BigRational::one());
        let s = engine.density_scan(DensityMode::Sample { samples: 2000, bound: 10_000 }, 0, 9).unwrap();
        assert_eq!(s.seed, Some(9));
        assert!(s.total > 0);
        let fallback = engine.density_scan(DensityMode::Exhaustive { max_norm: 1000 }, 0, 1).unwrap();
        assert!(matches!(fallback.mode, DensityMode::GroupSample { .. }));
    }

    #[test]
    fn flip_multiplicative_for_linear_profiles() {
        // h_v(label) = parity of a linear functional on the local class group,
        // so (-1)^h is itself a character and the flip is a homomorphism.
        let c = curve_from_i64(&[1672, -273, 0, 1]);
        let profiles = synthetic_profiles(&c, |v, label| match v {
            Place::Finite(2) => u32::from(label < 0) + u32::from(label % 2 == 0),
            Place::Finite(q) => u32::from(label % q as ClassLabel == 0),
            Place::Infinity => 0,
        })
        .unwrap();
        let engine = ParityEngine::new(&c, &profiles).unwrap();
        let ds = [-1i64, 2, 7, -11, 13, 17, 19, -23, 5, 3, 6, -15];
        for &a in &ds {
            for &b in &ds {
                let (ta, tb) = (tw(a), tw(b));
                let prod = ta.mul(&tb);
                assert_eq!(
                    engine.parity_flip(&ta).flip * engine.parity_flip(&tb).flip,
                    engine.parity_flip(&prod).flip,
                    "{a} * {b}"
                );
            }
        }
    }
}
