//! Exact arithmetic for quadratic-twist families of hyperelliptic Jacobians
//! `y^2 = d f(x)` over Q: Frobenius cycle types and prime classes, local
//! invariants `h_v` and `omega_v`, the parity-flip predictor, disparity
//! constants, and brute-force oracles for the underlying linear algebra.

pub mod cache;
pub mod characters;
pub mod curve;
pub mod error;
pub mod fp;
pub mod galois;
pub mod metabolic;
pub mod parity;
pub mod poly;
pub mod primes;
pub mod profile;
pub mod search;
pub mod symbols;
pub mod torsion;

pub use cache::PrimeCache;
pub use characters::{local_behavior, twist_norm, LocalBehavior, QuadTwist};
pub use curve::{parse_curve, CurveSpec};
pub use error::{Error, Result};
pub use galois::{classify_prime, galois_classify, prime_scan, CycleType, PrimeClass, ScanFilter, SigmaSet};
pub use parity::{parity_flip, ParityEngine, ParityStatus, ParityVerdict};
pub use poly::RatPoly;
pub use profile::{parse_profiles, LocalProfile, ProfileSet};
pub use symbols::Place;
