//! Primality testing, prime sieving and integer factorization.
//!
//! Everything here works at "desk scale": discriminants of small-height
//! polynomials and prime scans far below `2^64`.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

const MR_BASES: [u64; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

#[inline]
pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for all `u64`.
///
/// The first 13 prime bases are a proven witness set below 3.3e24.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &MR_BASES {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &MR_BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Miller-Rabin over big integers. Deterministic below 3.3e24, a strong
/// probable-prime test (13 fixed bases) above that.
pub fn is_prime_big(n: &BigUint) -> bool {
    if let Some(small) = n.to_u64() {
        return is_prime(small);
    }
    if n.is_even() {
        return false;
    }
    let one = BigUint::one();
    let n_minus_1 = n - &one;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    'witness: for &a in &MR_BASES {
        let mut x = BigUint::from(a).modpow(&d, n);
        if x == one || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n_minus_1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Sieve of Eratosthenes: all primes `<= limit`.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        out.push(i as u64);
        let mut j = i * i;
        while j <= n {
            composite[j] = true;
            j += i;
        }
    }
    out
}

/// Primes in the half-open range `[lo, hi)` by segmented sieving.
pub fn primes_in_range(lo: u64, hi: u64) -> Vec<u64> {
    if hi <= lo || hi <= 2 {
        return Vec::new();
    }
    let lo = lo.max(2);
    let root = (hi as f64).sqrt() as u64 + 1;
    let base = primes_up_to(root);
    let len = (hi - lo) as usize;
    let mut composite = vec![false; len];
    for &p in &base {
        let start = (p * p).max(lo.div_ceil(p) * p);
        let mut m = start;
        while m < hi {
            composite[(m - lo) as usize] = true;
            m += p;
        }
    }
    composite
        .iter()
        .enumerate()
        .filter(|(_, &c)| !c)
        .map(|(i, _)| lo + i as u64)
        .collect()
}

fn gcd_u64(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

/// Pollard-Brent rho returning a nontrivial factor of composite odd `n`.
fn rho_u64(n: u64) -> u64 {
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut d) = (2u64, 2u64, 1u64);
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = gcd_u64(x.abs_diff(y), n);
        }
        if d != n {
            return d;
        }
        c += 1;
    }
}

/// Prime factorization of `n` as sorted `(prime, exponent)` pairs.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut e = 0;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
    }
    let mut stack = vec![n];
    let mut primes = Vec::new();
    while let Some(m) = stack.pop() {
        if m == 1 {
            continue;
        }
        if is_prime(m) {
            primes.push(m);
            continue;
        }
        let d = rho_u64(m);
        stack.push(d);
        stack.push(m / d);
    }
    primes.sort_unstable();
    for p in primes {
        match out.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => out.push((p, 1)),
        }
    }
    out.sort_unstable();
    out
}

/// Steps per Pollard rho attempt and number of attempts before giving up.
const RHO_STEPS: u64 = 1 << 20;
const RHO_ATTEMPTS: u32 = 4;

fn rho_big(n: &BigUint) -> Option<BigUint> {
    let one = BigUint::one();
    for c in 1..=RHO_ATTEMPTS {
        let c = BigUint::from(c);
        let step = |x: &BigUint| (x * x + &c) % n;
        let mut x = BigUint::from(2u32);
        let mut y = x.clone();
        let mut d = one.clone();
        let mut steps = 0;
        while d == one && steps < RHO_STEPS {
            x = step(&x);
            y = step(&step(&y));
            let diff = if x > y { &x - &y } else { &y - &x };
            d = diff.gcd(n);
            steps += 1;
        }
        if d != *n && d != one {
            return Some(d);
        }
    }
    None
}

/// `(r, k)` with `n = r^k` and `k >= 2` maximal, if `n` is a perfect power.
fn perfect_power(n: &BigUint) -> Option<(BigUint, u32)> {
    let bits = n.bits() as u32;
    (2..=bits).rev().find_map(|k| {
        let r = n.nth_root(k);
        (r > BigUint::one() && r.pow(k) == *n).then_some((r, k))
    })
}

/// Prime factorization of `|n|` for arbitrary-precision `n`.
///
/// Trial division by primes below 10^4, then perfect-power detection and
/// Pollard rho on the cofactor. Cofactors rho cannot split within its step
/// budget are a resource-limit error.
pub fn factor_big(n: &BigInt) -> Result<Vec<(BigUint, u32)>> {
    let mut m = n.magnitude().clone();
    let mut out: Vec<(BigUint, u32)> = Vec::new();
    if m.is_zero() {
        return Ok(out);
    }
    if let Some(small) = m.to_u64() {
        return Ok(factor_u64(small)
            .into_iter()
            .map(|(p, e)| (BigUint::from(p), e))
            .collect());
    }
    for p in primes_up_to(10_000) {
        let bp = BigUint::from(p);
        let mut e = 0;
        while (&m % &bp).is_zero() {
            m /= &bp;
            e += 1;
        }
        if e > 0 {
            out.push((bp, e));
        }
    }
    let mut stack = vec![(m, 1u32)];
    let mut primes: Vec<(BigUint, u32)> = Vec::new();
    while let Some((c, mult)) = stack.pop() {
        if c.is_one() {
            continue;
        }
        if let Some(small) = c.to_u64() {
            for (p, e) in factor_u64(small) {
                primes.push((BigUint::from(p), e * mult));
            }
            continue;
        }
        if is_prime_big(&c) {
            primes.push((c, mult));
            continue;
        }
        if let Some((r, k)) = perfect_power(&c) {
            stack.push((r, k * mult));
            continue;
        }
        let d = rho_big(&c).ok_or_else(|| {
            Error::ResourceLimit(format!("could not factor the {}-bit cofactor {c}", c.bits()))
        })?;
        let q = &c / &d;
        stack.push((d, mult));
        stack.push((q, mult));
    }
    primes.sort();
    for (p, e) in primes {
        match out.last_mut() {
            Some((q, f)) if *q == p => *f += e,
            _ => out.push((p, e)),
        }
    }
    out.sort();
    Ok(out)
}

/// Squarefree kernel of a nonzero integer, keeping the sign.
pub fn squarefree_part(n: &BigInt) -> Result<BigInt> {
    if n.is_zero() {
        return Err(Error::InvalidInput("squarefree part of zero".into()));
    }
    let mut out = BigInt::one();
    for (p, e) in factor_big(n)? {
        if e % 2 == 1 {
            out *= BigInt::from(p);
        }
    }
    Ok(if n.sign() == Sign::Minus { -out } else { out })
}

/// True if `n` is a perfect square of an integer (negative numbers are not).
pub fn is_square(n: &BigInt) -> bool {
    if n.sign() == Sign::Minus {
        return false;
    }
    let r = n.sqrt();
    &r * &r == *n
}

/// `p`-adic valuation of a nonzero integer.
pub fn valuation(n: &BigInt, p: u64) -> u32 {
    assert!(!n.is_zero(), "valuation of zero");
    let bp = BigInt::from(p);
    let mut m = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = m.div_rem(&bp);
        if !r.is_zero() {
            return v;
        }
        m = q;
        v += 1;
    }
}

/// Residue of `n` modulo `m` in `[0, m)`.
pub fn mod_u64(n: &BigInt, m: u64) -> u64 {
    n.mod_floor(&BigInt::from(m)).to_u64().expect("residue fits")
}
