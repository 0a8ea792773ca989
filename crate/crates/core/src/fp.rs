//! Polynomials over a prime field and their factorization: squarefree
//! decomposition, distinct-degree splitting, then Cantor-Zassenhaus
//! equal-degree splitting with an explicit RNG.

use std::fmt;

use num_traits::Zero;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::poly::RatPoly;
use crate::primes::{is_prime, mod_u64, mul_mod, pow_mod};

/// A polynomial over `F_l`, ascending coefficients reduced into `[0, l)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FpPoly {
    modulus: u64,
    coeffs: Vec<u64>,
}

fn inv_mod(a: u64, p: u64) -> u64 {
    debug_assert!(a % p != 0);
    pow_mod(a, p - 2, p)
}

impl FpPoly {
    pub fn new(modulus: u64, coeffs: Vec<u64>) -> Self {
        let mut coeffs: Vec<u64> = coeffs.into_iter().map(|c| c % modulus).collect();
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        FpPoly { modulus, coeffs }
    }

    /// Reduces a rational polynomial modulo `l`; every denominator must be
    /// a unit mod `l`.
    pub fn reduce(f: &RatPoly, modulus: u64) -> Result<Self> {
        let mut coeffs = Vec::with_capacity(f.coeffs().len());
        for c in f.coeffs() {
            let den = mod_u64(c.denom(), modulus);
            if den == 0 {
                return Err(Error::BadPrime(modulus));
            }
            let num = mod_u64(c.numer(), modulus);
            coeffs.push(mul_mod(num, inv_mod(den, modulus), modulus));
        }
        Ok(Self::new(modulus, coeffs))
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn lead(&self) -> u64 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    fn zero(modulus: u64) -> Self {
        FpPoly {
            modulus,
            coeffs: Vec::new(),
        }
    }

    fn one(modulus: u64) -> Self {
        FpPoly::new(modulus, vec![1])
    }

    fn x(modulus: u64) -> Self {
        FpPoly::new(modulus, vec![0, 1])
    }

    fn is_one(&self) -> bool {
        self.coeffs == [1]
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let inv = inv_mod(self.lead(), self.modulus);
        self.scale(inv)
    }

    fn scale(&self, c: u64) -> Self {
        let p = self.modulus;
        FpPoly::new(p, self.coeffs.iter().map(|&a| mul_mod(a, c, p)).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let p = self.modulus;
        let n = self.coeffs.len().max(other.coeffs.len());
        let c = (0..n)
            .map(|i| {
                let a = self.coeffs.get(i).copied().unwrap_or(0);
                let b = other.coeffs.get(i).copied().unwrap_or(0);
                (a + b) % p
            })
            .collect();
        FpPoly::new(p, c)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let p = self.modulus;
        let n = self.coeffs.len().max(other.coeffs.len());
        let c = (0..n)
            .map(|i| {
                let a = self.coeffs.get(i).copied().unwrap_or(0);
                let b = other.coeffs.get(i).copied().unwrap_or(0);
                (a + p - b) % p
            })
            .collect();
        FpPoly::new(p, c)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let p = self.modulus;
        if self.is_zero() || other.is_zero() {
            return FpPoly::zero(p);
        }
        let mut out = vec![0u64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = (out[i + j] + mul_mod(a, b, p)) % p;
            }
        }
        FpPoly::new(p, out)
    }

    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        assert!(!divisor.is_zero(), "division by zero polynomial");
        let p = self.modulus;
        let dd = divisor.deg();
        if self.coeffs.len() <= dd {
            return (FpPoly::zero(p), self.clone());
        }
        let inv = inv_mod(divisor.lead(), p);
        let mut rem = self.coeffs.clone();
        let mut quot = vec![0u64; rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = mul_mod(rem[k + dd], inv, p);
            if c == 0 {
                continue;
            }
            for (j, &d) in divisor.coeffs.iter().enumerate() {
                rem[k + j] = (rem[k + j] + p - mul_mod(c, d, p)) % p;
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (FpPoly::new(p, quot), FpPoly::new(p, rem))
    }

    pub fn rem(&self, divisor: &Self) -> Self {
        self.div_rem(divisor).1
    }

    /// Monic gcd.
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn derivative(&self) -> Self {
        let p = self.modulus;
        FpPoly::new(
            p,
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| mul_mod(c, i as u64 % p, p))
                .collect(),
        )
    }

    /// `self^exp mod m`.
    pub fn pow_mod(&self, mut exp: u64, m: &Self) -> Self {
        let mut base = self.rem(m);
        let mut acc = FpPoly::one(self.modulus).rem(m);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul(&base).rem(m);
            }
            base = base.mul(&base).rem(m);
            exp >>= 1;
        }
        acc
    }

    /// p-th root of a polynomial whose derivative vanishes.
    fn pth_root(&self) -> Self {
        let p = self.modulus as usize;
        // a^p = a in F_p, so coefficients pass through unchanged
        let c = self.coeffs.iter().step_by(p).copied().collect();
        FpPoly::new(self.modulus, c)
    }
}

impl fmt::Debug for FpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FpPoly(mod {}, {:?})", self.modulus, self.coeffs)
    }
}

/// Squarefree decomposition: monic squarefree parts with multiplicities.
pub fn squarefree_decomposition(f: &FpPoly) -> Vec<(FpPoly, usize)> {
    let p = f.modulus() as usize;
    let mut out = Vec::new();
    let f = f.monic();
    if f.deg() == 0 {
        return out;
    }
    let d = f.derivative();
    if d.is_zero() {
        for (g, m) in squarefree_decomposition(&f.pth_root()) {
            out.push((g, m * p));
        }
        return out;
    }
    let mut c = f.gcd(&d);
    let mut w = f.div_rem(&c).0;
    let mut i = 1;
    while !w.is_one() {
        let y = w.gcd(&c);
        let z = w.div_rem(&y).0;
        if z.deg() > 0 {
            out.push((z.monic(), i));
        }
        i += 1;
        w = y;
        c = c.div_rem(&w).0;
    }
    if c.deg() > 0 {
        for (g, m) in squarefree_decomposition(&c.pth_root()) {
            out.push((g, m * p));
        }
    }
    out
}

/// Distinct-degree factorization of a monic squarefree polynomial:
/// `(d, product of all irreducible factors of degree d)`.
pub fn distinct_degree(f: &FpPoly) -> Vec<(usize, FpPoly)> {
    let p = f.modulus();
    let mut out = Vec::new();
    let mut rest = f.monic();
    let x = FpPoly::x(p);
    let mut h = x.rem(&rest);
    let mut d = 0;
    while rest.deg() >= 2 * (d + 1) {
        d += 1;
        h = h.pow_mod(p, &rest);
        let g = rest.gcd(&h.sub(&x));
        if g.deg() > 0 {
            rest = rest.div_rem(&g).0;
            h = h.rem(&rest);
            out.push((d, g));
        }
    }
    if rest.deg() > 0 {
        out.push((rest.deg(), rest));
    }
    out
}

/// Splits a monic squarefree product of degree-`d` irreducibles into its
/// factors. Requires an odd modulus.
pub fn equal_degree<R: Rng + ?Sized>(f: &FpPoly, d: usize, rng: &mut R) -> Vec<FpPoly> {
    let p = f.modulus();
    let n = f.deg();
    if n == d {
        return vec![f.monic()];
    }
    assert!(p % 2 == 1, "equal-degree splitting needs an odd field");
    loop {
        let a = FpPoly::new(p, (0..n).map(|_| rng.gen_range(0..p)).collect());
        if a.deg() == 0 {
            continue;
        }
        // a^((p^d - 1)/2) = (a * a^p * ... * a^(p^(d-1)))^((p-1)/2)
        let mut frob = a.rem(f);
        let mut norm = frob.clone();
        for _ in 1..d {
            frob = frob.pow_mod(p, f);
            norm = norm.mul(&frob).rem(f);
        }
        let b = norm.pow_mod((p - 1) / 2, f).sub(&FpPoly::one(p));
        let g = f.gcd(&b);
        if g.deg() > 0 && g.deg() < n {
            let other = f.div_rem(&g).0.monic();
            let mut out = equal_degree(&g, d, rng);
            out.extend(equal_degree(&other, d, rng));
            return out;
        }
    }
}

/// Full factorization into monic irreducibles with multiplicity, sorted by
/// `(degree, coefficients)`.
pub fn factor<R: Rng + ?Sized>(f: &FpPoly, rng: &mut R) -> Vec<(FpPoly, usize)> {
    let mut out = Vec::new();
    for (sqf, mult) in squarefree_decomposition(f) {
        for (d, block) in distinct_degree(&sqf) {
            for g in equal_degree(&block, d, rng) {
                out.push((g, mult));
            }
        }
    }
    out.sort_by(|a, b| {
        (a.0.deg(), &a.0.coeffs, a.1).cmp(&(b.0.deg(), &b.0.coeffs, b.1))
    });
    out
}

/// Seeded RNG for a factorization at `l`, so runs are reproducible.
pub fn rng_for(seed: u64, modulus: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ modulus.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Sorted degrees of the irreducible factors of `f mod l` at a prime of
/// good reduction.
pub fn factor_degrees(f: &RatPoly, modulus: u64) -> Result<Vec<usize>> {
    factor_degrees_seeded(f, modulus, 0)
}

pub fn factor_degrees_seeded(f: &RatPoly, modulus: u64, seed: u64) -> Result<Vec<usize>> {
    if modulus == 2 || !is_prime(modulus) {
        return Err(Error::invalid(format!("{modulus} is not an odd prime")));
    }
    let reduced = FpPoly::reduce(f, modulus)?;
    if reduced.degree() != f.degree() {
        return Err(Error::BadPrime(modulus));
    }
    if f.deg() >= 2 {
        let disc = crate::poly::discriminant(f)?;
        if disc.is_zero() || mod_u64(disc.numer(), modulus) == 0 {
            return Err(Error::BadPrime(modulus));
        }
    }
    Ok(degrees_of_reduced(&reduced, seed))
}

/// Factor degrees of an already-reduced squarefree polynomial.
pub(crate) fn degrees_of_reduced(reduced: &FpPoly, seed: u64) -> Vec<usize> {
    let mut rng = rng_for(seed, reduced.modulus());
    let mut degs: Vec<usize> = factor(reduced, &mut rng)
        .into_iter()
        .flat_map(|(g, m)| std::iter::repeat(g.deg()).take(m))
        .collect();
    degs.sort_unstable();
    degs
}
