//! Hyperelliptic curves `y^2 = f(x)` and the line-based curve file format.
//!
//! ```text
//! # comment
//! p = 2
//! f = [c0, c1, ..., cn]
//! factor = [..]        # optional, repeatable
//! ```
//!
//! Coefficients are integers or `num/den`, in ascending degree.

use std::fmt::Write as _;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::galois::SigmaSet;
use crate::poly::{discriminant, is_separable, RatPoly};
use crate::primes::is_prime;

/// An odd-degree separable polynomial over Q, optionally with a declared
/// factorization whose product matches `f` up to a rational constant.
#[derive(Debug, Clone)]
pub struct CurveSpec {
    f: RatPoly,
    p: u64,
    declared_factors: Option<Vec<RatPoly>>,
    disc: BigRational,
    sigma: OnceLock<Result<SigmaSet>>,
}

impl CurveSpec {
    pub fn new(f: RatPoly, declared_factors: Option<Vec<RatPoly>>) -> Result<Self> {
        Self::with_prime(f, 2, declared_factors)
    }

    pub fn with_prime(f: RatPoly, p: u64, declared_factors: Option<Vec<RatPoly>>) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::invalid(format!("p = {p} is not prime")));
        }
        let n = f.deg();
        if f.is_zero() || n < 3 || n % 2 == 0 {
            return Err(Error::invalid(format!(
                "f must have odd degree >= 3, got degree {n}"
            )));
        }
        if !is_separable(&f)? {
            return Err(Error::invalid("f is not separable"));
        }
        if let Some(factors) = &declared_factors {
            if factors.is_empty() || factors.iter().any(|g| g.deg() == 0) {
                return Err(Error::invalid("declared factors must be nonconstant"));
            }
            let prod = factors.iter().fold(RatPoly::one(), |acc, g| &acc * g);
            let ratio = f.lead() / prod.lead();
            if prod.scale(&ratio) != f {
                return Err(Error::invalid(
                    "product of declared factors does not match f",
                ));
            }
        }
        let disc = discriminant(&f)?;
        Ok(CurveSpec {
            f,
            p,
            declared_factors,
            disc,
            sigma: OnceLock::new(),
        })
    }

    pub fn f(&self) -> &RatPoly {
        &self.f
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.f.deg()
    }

    pub fn declared_factors(&self) -> Option<&[RatPoly]> {
        self.declared_factors.as_deref()
    }

    /// The normalized discriminant `lead^{2n-2} prod (a_i - a_j)^2`.
    pub fn discriminant(&self) -> &BigRational {
        &self.disc
    }

    /// The bad set, computed on first use (it needs the discriminant
    /// factored).
    pub fn sigma(&self) -> Result<&SigmaSet> {
        self.sigma
            .get_or_init(|| SigmaSet::for_polynomial(&self.f, &self.disc))
            .as_ref()
            .map_err(Clone::clone)
    }

    pub(crate) fn require_p2(&self) -> Result<()> {
        if self.p == 2 {
            Ok(())
        } else {
            Err(Error::invalid("operation is only defined for p = 2"))
        }
    }

    /// Canonical text form, suitable for writing back to a curve file.
    pub fn to_file_string(&self) -> String {
        let mut out = format!("p = {}\nf = {}\n", self.p, self.f);
        for g in self.declared_factors.iter().flatten() {
            let _ = writeln!(out, "factor = {g}");
        }
        out
    }

    /// Stable content hash of `(p, f)`, 16 hex digits.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(format!("p={};f={}", self.p, self.f).as_bytes());
        digest.iter().take(8).fold(String::new(), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
    }
}

fn parse_rational(s: &str, line: usize) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::parse(line, format!("bad coefficient `{s}`"));
    if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = num.trim().parse().map_err(|_| bad())?;
        let den: BigInt = den.trim().parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(Error::parse(line, "zero denominator"));
        }
        Ok(BigRational::new(num, den))
    } else {
        let n: BigInt = s.parse().map_err(|_| bad())?;
        Ok(BigRational::from_integer(n))
    }
}

/// Parses a bracketed coefficient list `[c0, c1, ...]`.
pub fn parse_coeff_list(s: &str, line: usize) -> Result<RatPoly> {
    let s = s.trim();
    let inner = s
        .strip_prefix('[')
        .and_then(|t| t.strip_suffix(']'))
        .ok_or_else(|| Error::parse(line, "expected `[c0, c1, ...]`"))?;
    if inner.trim().is_empty() {
        return Err(Error::parse(line, "empty coefficient list"));
    }
    let coeffs = inner
        .split(',')
        .map(|c| parse_rational(c, line))
        .collect::<Result<Vec<_>>>()?;
    Ok(RatPoly::new(coeffs))
}

/// Parses a curve file. Validation failures of the assembled curve are
/// reported against the line of the `f` entry.
pub fn parse_curve(text: &str) -> Result<CurveSpec> {
    let mut p: Option<u64> = None;
    let mut f: Option<(RatPoly, usize)> = None;
    let mut factors = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| Error::parse(line, "expected `key = value`"))?;
        match key.trim() {
            "p" => {
                if p.is_some() {
                    return Err(Error::parse(line, "duplicate `p`"));
                }
                let v: u64 = value
                    .trim()
                    .parse()
                    .map_err(|_| Error::parse(line, "p must be a prime"))?;
                if !is_prime(v) {
                    return Err(Error::parse(line, format!("p = {v} is not prime")));
                }
                p = Some(v);
            }
            "f" => {
                if f.is_some() {
                    return Err(Error::parse(line, "duplicate `f`"));
                }
                f = Some((parse_coeff_list(value, line)?, line));
            }
            "factor" => factors.push(parse_coeff_list(value, line)?),
            other => return Err(Error::parse(line, format!("unknown key `{other}`"))),
        }
    }
    let (f, f_line) = f.ok_or_else(|| Error::parse(text.lines().count() + 1, "missing `f`"))?;
    let declared = if factors.is_empty() { None } else { Some(factors) };
    CurveSpec::with_prime(f, p.unwrap_or(2), declared).map_err(|e| match e {
        Error::InvalidInput(msg) => Error::parse(f_line, msg),
        other => other,
    })
}

/// Convenience constructor used by tests and embedded cases.
pub fn curve_from_i64(coeffs: &[i64]) -> CurveSpec {
    CurveSpec::new(RatPoly::from_i64(coeffs), None).expect("valid curve")
}

#[cfg(test)]
mod tests {
    use super::*;

    const H_FILE: &str = "\
# quintic with a linear and two quadratic factors
p = 2
f = [-2457, -176904, -2128035, -9895158, -20272980, -14905800]
factor = [1, 6]
factor = [9, 54, 91]
factor = [1, 60, 100]
";

    #[test]
    fn parses_quintic_with_factors() {
        let c = parse_curve(H_FILE).unwrap();
        assert_eq!(c.degree(), 5);
        assert_eq!(c.declared_factors().unwrap().len(), 3);
        let again = parse_curve(&c.to_file_string()).unwrap();
        assert_eq!(again.hash(), c.hash());
    }

    #[test]
    fn rational_coefficients() {
        let c = parse_curve("f = [-1/2, 0, 0, 3/4]").unwrap();
        assert_eq!(c.f().lead(), BigRational::new(3.into(), 4.into()));
        assert_eq!(c.p(), 2);
    }

    #[test]
    fn rejects_bad_files() {
        let even = parse_curve("p = 2\nf = [1, 0, 1]\n").unwrap_err();
        assert!(matches!(even, Error::Parse { line: 2, .. }));
        let insep = parse_curve("f = [0, 0, 0, 1]").unwrap_err();
        assert!(matches!(insep, Error::Parse { line: 1, .. }));
        let mismatch = parse_curve("f = [-2, 0, 0, 1]\nfactor = [1, 1]\nfactor = [1, 0, 1]").unwrap_err();
        assert!(matches!(mismatch, Error::Parse { line: 1, .. }));
        assert!(matches!(parse_curve("p = 4\nf = [1,1,0,1]"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_curve("f = [1, x]"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_curve("f = [1/0, 1, 0, 1]"), Err(Error::Parse { .. })));
        assert!(matches!(parse_curve("# nothing"), Err(Error::Parse { .. })));
        assert!(matches!(parse_curve("g = [1]"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_curve("f = [1,0,0,1]\nf = [1,0,0,1]"), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn factors_up_to_constant() {
        let c = parse_curve("f = [2, 4, 4, 2]\nfactor = [1, 1]\nfactor = [1, 1, 1]");
        assert!(c.is_ok());
    }
}
