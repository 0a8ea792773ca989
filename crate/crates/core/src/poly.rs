//! Dense univariate polynomials over Q.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// A polynomial with rational coefficients, stored in ascending degree.
///
/// The coefficient vector never has a trailing zero, so the zero
/// polynomial is the empty vector.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatPoly {
    coeffs: Vec<BigRational>,
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl RatPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        RatPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| rat(c)).collect())
    }

    pub fn from_ints(coeffs: &[BigInt]) -> Self {
        Self::new(coeffs.iter().cloned().map(BigRational::from_integer).collect())
    }

    pub fn zero() -> Self {
        RatPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: BigRational) -> Self {
        Self::new(vec![c])
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    /// The monomial `x`.
    pub fn x() -> Self {
        Self::from_i64(&[0, 1])
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the zero polynomial mapped to 0.
    pub fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn lead(&self) -> BigRational {
        self.coeffs.last().cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn coeff(&self, i: usize) -> BigRational {
        self.coeffs.get(i).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * rat(i as i64))
                .collect(),
        )
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = RatPoly::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let inv = self.lead().recip();
        self.scale(&inv)
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, divisor: &RatPoly) -> (RatPoly, RatPoly) {
        assert!(!divisor.is_zero(), "polynomial division by zero");
        let dd = divisor.deg();
        let lc_inv = divisor.lead().recip();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (RatPoly::zero(), self.clone());
        }
        let mut quot = vec![BigRational::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dd] * &lc_inv;
            if c.is_zero() {
                continue;
            }
            for (j, d) in divisor.coeffs.iter().enumerate() {
                rem[k + j] -= &c * d;
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (RatPoly::new(quot), RatPoly::new(rem))
    }

    pub fn rem(&self, divisor: &RatPoly) -> RatPoly {
        self.div_rem(divisor).1
    }

    /// Monic greatest common divisor (zero if both inputs are zero).
    pub fn gcd(&self, other: &RatPoly) -> RatPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r.primitive_part();
        }
        a.monic()
    }

    /// Least common denominator of the coefficients.
    pub fn denominator_lcm(&self) -> BigInt {
        self.coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
    }

    /// Integer coefficients of `self * denominator_lcm()`.
    pub fn integer_coeffs(&self) -> Vec<BigInt> {
        let l = self.denominator_lcm();
        self.coeffs
            .iter()
            .map(|c| (c * BigRational::from_integer(l.clone())).to_integer())
            .collect()
    }

    /// Scales by a positive rational so the coefficients are coprime
    /// integers. The sign of every coefficient is preserved.
    pub fn primitive_part(&self) -> RatPoly {
        if self.is_zero() {
            return self.clone();
        }
        let ints = self.integer_coeffs();
        let g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        RatPoly::from_ints(&ints.iter().map(|c| c / &g).collect::<Vec<_>>())
    }

    /// Substitutes `x -> x + shift`.
    pub fn shift(&self, shift: &BigRational) -> RatPoly {
        let lin = RatPoly::new(vec![shift.clone(), BigRational::one()]);
        self.compose(&lin)
    }

    /// `self(inner(x))`.
    pub fn compose(&self, inner: &RatPoly) -> RatPoly {
        let mut acc = RatPoly::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * inner) + &RatPoly::constant(c.clone());
        }
        acc
    }
}

impl fmt::Debug for RatPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RatPoly({self})")
    }
}

impl fmt::Display for RatPoly {
    /// Bracketed ascending coefficient list, the curve-file syntax.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        if self.is_zero() {
            f.write_str("0")?;
        }
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str("]")
    }
}

impl Add for &RatPoly {
    type Output = RatPoly;

    fn add(self, rhs: &RatPoly) -> RatPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        RatPoly::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &RatPoly {
    type Output = RatPoly;

    fn sub(self, rhs: &RatPoly) -> RatPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        RatPoly::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Neg for &RatPoly {
    type Output = RatPoly;

    fn neg(self) -> RatPoly {
        RatPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Mul for &RatPoly {
    type Output = RatPoly;

    fn mul(self, rhs: &RatPoly) -> RatPoly {
        if self.is_zero() || rhs.is_zero() {
            return RatPoly::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RatPoly::new(out)
    }
}

/// Resultant of two nonzero polynomials by the Euclidean remainder sequence.
pub fn resultant(f: &RatPoly, g: &RatPoly) -> BigRational {
    if f.is_zero() || g.is_zero() {
        return BigRational::zero();
    }
    let (m, n) = (f.deg(), g.deg());
    if n == 0 {
        return g.lead().pow(m as i32);
    }
    if m == 0 {
        return f.lead().pow(n as i32);
    }
    let r = f.rem(g);
    if r.is_zero() {
        return BigRational::zero();
    }
    let k = r.deg();
    let sign = if (m * n) % 2 == 1 { -BigRational::one() } else { BigRational::one() };
    sign * g.lead().pow((m - k) as i32) * resultant(g, &r)
}

/// Discriminant normalized as `(-1)^{n(n-1)/2} Res(f, f') / lead(f)`,
/// which equals `lead^{2n-2} * prod_{i<j} (a_i - a_j)^2`.
pub fn discriminant(f: &RatPoly) -> Result<BigRational> {
    let n = f.deg();
    if f.is_zero() || n < 2 {
        return Err(Error::invalid("discriminant needs degree >= 2"));
    }
    let res = resultant(f, &f.derivative());
    let sign = if (n * (n - 1) / 2) % 2 == 1 { -BigRational::one() } else { BigRational::one() };
    Ok(sign * res / f.lead())
}

/// True iff `gcd(f, f')` is constant.
pub fn is_separable(f: &RatPoly) -> Result<bool> {
    if f.is_zero() {
        return Err(Error::invalid("zero polynomial"));
    }
    Ok(f.gcd(&f.derivative()).deg() == 0)
}

fn sign_changes(signs: impl Iterator<Item = i8>) -> usize {
    let mut last = 0i8;
    let mut count = 0;
    for s in signs.filter(|&s| s != 0) {
        if last != 0 && s != last {
            count += 1;
        }
        last = s;
    }
    count
}

fn sign_rat(x: &BigRational) -> i8 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

/// Sturm sequence with positive primitive-part normalization at each step.
pub fn sturm_sequence(f: &RatPoly) -> Vec<RatPoly> {
    let mut seq = vec![f.primitive_part(), f.derivative().primitive_part()];
    loop {
        let n = seq.len();
        if seq[n - 1].is_zero() {
            seq.pop();
            break;
        }
        let r = seq[n - 2].rem(&seq[n - 1]);
        if r.is_zero() {
            break;
        }
        seq.push((-&r).primitive_part());
    }
    seq
}

/// Sign of `p` at `+inf` (`dir = 1`) or `-inf` (`dir = -1`).
fn sign_at_infinity(p: &RatPoly, dir: i8) -> i8 {
    let s = sign_rat(&p.lead());
    if dir < 0 && p.deg() % 2 == 1 {
        -s
    } else {
        s
    }
}

/// Number of distinct real roots of a nonzero polynomial.
pub fn count_real_roots(f: &RatPoly) -> usize {
    let seq = sturm_sequence(f);
    let at_neg = sign_changes(seq.iter().map(|p| sign_at_infinity(p, -1)));
    let at_pos = sign_changes(seq.iter().map(|p| sign_at_infinity(p, 1)));
    at_neg - at_pos
}

/// Number of distinct real roots in the half-open interval `(a, b]`.
pub fn count_roots_in(seq: &[RatPoly], a: &BigRational, b: &BigRational) -> usize {
    let va = sign_changes(seq.iter().map(|p| sign_rat(&p.eval(a))));
    let vb = sign_changes(seq.iter().map(|p| sign_rat(&p.eval(b))));
    va.saturating_sub(vb)
}

/// Cauchy bound: every root lies strictly inside `(-B, B)`.
pub fn root_bound(f: &RatPoly) -> BigRational {
    let lead = f.lead().abs();
    let max = f
        .coeffs()
        .iter()
        .take(f.deg())
        .map(|c| c.abs() / &lead)
        .fold(BigRational::zero(), |a, b| if b > a { b } else { a });
    max + BigRational::one()
}

/// Real-root signature of a separable odd-degree polynomial:
/// `(r_real, k1, k2)` with `r_real = 2 k1 - 1` and `2 k2` non-real roots.
pub fn real_root_signature(f: &RatPoly) -> Result<(usize, usize, usize)> {
    let n = f.deg();
    if f.is_zero() || n % 2 == 0 {
        return Err(Error::invalid("real-root signature needs odd degree"));
    }
    if !is_separable(f)? {
        return Err(Error::invalid("polynomial is not separable"));
    }
    let r = count_real_roots(f);
    Ok((r, (r + 1) / 2, (n - r) / 2))
}

/// `den(x)^clear_degree * f(num(x)/den(x))` as an exact polynomial.
pub fn compose_rational(
    f: &RatPoly,
    num: &RatPoly,
    den: &RatPoly,
    clear_degree: usize,
) -> Result<RatPoly> {
    if den.is_zero() {
        return Err(Error::invalid("zero denominator"));
    }
    let n = f.deg();
    if f.is_zero() {
        return Ok(RatPoly::zero());
    }
    if clear_degree >= n {
        // sum_i c_i num^i den^(clear - i)
        let mut acc = RatPoly::zero();
        for (i, c) in f.coeffs().iter().enumerate() {
            let term = (&num.pow(i as u32) * &den.pow((clear_degree - i) as u32)).scale(c);
            acc = &acc + &term;
        }
        return Ok(acc);
    }
    // Fewer powers of den than deg f: the numerator num-expansion must be
    // divisible by den^(n - clear_degree).
    let mut acc = RatPoly::zero();
    for (i, c) in f.coeffs().iter().enumerate() {
        let term = (&num.pow(i as u32) * &den.pow((n - i) as u32)).scale(c);
        acc = &acc + &term;
    }
    let excess = den.pow((n - clear_degree) as u32);
    let (q, r) = acc.div_rem(&excess);
    if !r.is_zero() {
        return Err(Error::invalid(
            "clearing denominators does not yield a polynomial",
        ));
    }
    Ok(q)
}

/// Distinct rational roots of a nonzero polynomial, ascending.
///
/// Real roots are isolated with the Sturm sequence and refined until every
/// interval is narrower than `1 / |lead|`; a rational root `p/q` has `q`
/// dividing the leading coefficient of the primitive integer form, so only
/// a handful of candidates per interval need an exact check.
pub fn rational_roots(f: &RatPoly) -> Result<Vec<BigRational>> {
    if f.deg() == 0 {
        return Ok(Vec::new());
    }
    let sqf = {
        let g = f.gcd(&f.derivative());
        f.div_rem(&g).0.primitive_part()
    };
    let ints = sqf.integer_coeffs();
    let lead = ints.last().expect("nonzero").abs();
    let denominators = crate::primes::factor_big(&lead)?;
    let mut divisors = vec![BigInt::one()];
    for (p, e) in &denominators {
        let p = BigInt::from(p.clone());
        let mut next = Vec::new();
        for d in &divisors {
            let mut pk = BigInt::one();
            for _ in 0..=*e {
                next.push(d * &pk);
                pk *= &p;
            }
        }
        divisors = next;
    }
    let seq = sturm_sequence(&sqf);
    let bound = root_bound(&sqf);
    let width_target = BigRational::new(BigInt::one(), lead.clone() * 2u32);
    let mut stack = vec![(-bound.clone(), bound)];
    let mut intervals = Vec::new();
    while let Some((a, b)) = stack.pop() {
        let k = count_roots_in(&seq, &a, &b);
        if k == 0 {
            continue;
        }
        if k == 1 && &b - &a < width_target {
            intervals.push((a, b));
            continue;
        }
        let mid = (&a + &b) / rat(2);
        stack.push((a, mid.clone()));
        stack.push((mid, b));
    }
    let mut roots = Vec::new();
    for (a, b) in intervals {
        for q in &divisors {
            let qr = BigRational::from_integer(q.clone());
            let lo = (&a * &qr).ceil().to_integer();
            let hi = (&b * &qr).floor().to_integer();
            let mut p = lo;
            while p <= hi {
                let cand = BigRational::new(p.clone(), q.clone());
                if cand > a && cand <= b && sqf.eval(&cand).is_zero() && !roots.contains(&cand) {
                    roots.push(cand);
                }
                p += 1;
            }
        }
    }
    roots.sort();
    Ok(roots)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(c: &[i64]) -> RatPoly {
        RatPoly::from_i64(c)
    }

    /// Product of linear factors `(x - r)`.
    fn from_roots(roots: &[i64]) -> RatPoly {
        roots
            .iter()
            .fold(RatPoly::one(), |acc, &r| &acc * &p(&[-r, 1]))
    }

    fn section8_h() -> RatPoly {
        &(&(&p(&[-273]) * &p(&[1, 6])) * &p(&[9, 54, 91])) * &p(&[1, 60, 100])
    }

    #[test]
    fn discriminant_examples() {
        assert_eq!(discriminant(&p(&[1672, -273, 0, 1])).unwrap(), rat(5_904_900));
        assert_eq!(discriminant(&p(&[-2, 0, 0, 1])).unwrap(), rat(-108));
        assert_eq!(discriminant(&p(&[-1, 0, 1])).unwrap(), rat(4));
        assert!(discriminant(&p(&[1, 1])).is_err());
    }

    #[test]
    fn discriminant_matches_root_products() {
        // oracle: prod_{i<j} (a_i - a_j)^2 for integer roots
        let roots = [-19i64, 8, 11];
        let mut prod = 1i64;
        for i in 0..3 {
            for j in (i + 1)..3 {
                prod *= (roots[i] - roots[j]).pow(2);
            }
        }
        assert_eq!(prod, 5_904_900);
        assert_eq!(discriminant(&from_roots(&roots)).unwrap(), rat(prod));
        // leading coefficient normalization: lead^(2n-2)
        let scaled = from_roots(&[1, 2, 4]).scale(&rat(3));
        assert_eq!(discriminant(&scaled).unwrap(), rat(3i64.pow(4) * 9 * 4));
    }

    #[test]
    fn separability() {
        assert!(is_separable(&p(&[-2, 0, 0, 1])).unwrap());
        assert!(!is_separable(&p(&[0, 0, 1])).unwrap());
        assert!(!is_separable(&from_roots(&[1, 1, -1])).unwrap());
        assert!(is_separable(&RatPoly::zero()).is_err());
    }

    #[test]
    fn signatures() {
        assert_eq!(real_root_signature(&p(&[1672, -273, 0, 1])).unwrap(), (3, 2, 0));
        assert_eq!(real_root_signature(&section8_h()).unwrap(), (3, 2, 1));
        assert_eq!(real_root_signature(&p(&[-2, 0, 0, 1])).unwrap(), (1, 1, 1));
        assert!(real_root_signature(&p(&[-1, 0, 1])).is_err());
        assert!(real_root_signature(&from_roots(&[1, 1, 2])).is_err());
    }

    #[test]
    fn compose_examples() {
        let sq = compose_rational(&p(&[0, 0, 1]), &p(&[1, 3]), &p(&[0, 1]), 2).unwrap();
        assert_eq!(sq, p(&[1, 6, 9]));
        let shifted = compose_rational(&p(&[-2, 0, 0, 1]), &p(&[1, 1]), &p(&[1]), 0).unwrap();
        assert_eq!(shifted, &p(&[1, 1]).pow(3) - &p(&[2]));
        // x^2 / x composed with den = x, clear 1: x^1 * (1/x)^... not a polynomial
        assert!(compose_rational(&p(&[0, 0, 1]), &p(&[1]), &p(&[0, 1]), 1).is_err());
        assert!(compose_rational(&p(&[1]), &p(&[1]), &RatPoly::zero(), 0).is_err());
    }

    #[test]
    fn rational_roots_found() {
        let f = &from_roots(&[-19, 8, 11]) * &p(&[2, 0, 1]);
        assert_eq!(rational_roots(&f).unwrap(), vec![rat(-19), rat(8), rat(11)]);
        let g = &p(&[1, 2]) * &p(&[2, 4, 3]);
        assert_eq!(rational_roots(&g).unwrap(), vec![BigRational::new((-1).into(), 2.into())]);
        assert!(rational_roots(&p(&[-2, 0, 0, 1])).unwrap().is_empty());
        assert_eq!(rational_roots(&section8_h()).unwrap(), vec![BigRational::new((-1).into(), 6.into())]);
    }

    fn small_poly() -> impl Strategy<Value = RatPoly> {
        (1usize..=7)
            .prop_flat_map(|d| proptest::collection::vec(-9i64..=9, d + 1))
            .prop_map(|mut c| {
                if *c.last().unwrap() == 0 {
                    *c.last_mut().unwrap() = 1;
                }
                RatPoly::from_i64(&c)
            })
    }

    /// Counts sign changes of f on a rational grid over the Cauchy interval,
    /// refined 4x at a time until the count repeats twice.
    fn grid_root_count(f: &RatPoly) -> usize {
        let b = root_bound(f).ceil().to_integer();
        let ints = f.integer_coeffs();
        let n = f.deg() as u32;
        // sign of steps^n * f(t / steps), evaluated in integers
        let sign_at = |t: &BigInt, steps: &BigInt| -> i8 {
            let mut acc = BigInt::zero();
            let mut tp = BigInt::one();
            for (i, c) in ints.iter().enumerate() {
                acc += c * &tp * steps.pow(n - i as u32);
                tp *= t;
            }
            if acc.is_positive() {
                1
            } else if acc.is_negative() {
                -1
            } else {
                0
            }
        };
        let mut steps = 256i64;
        let mut last = usize::MAX;
        let mut stable = 0;
        loop {
            let s_big = BigInt::from(steps);
            let lo = -(&b * &s_big);
            let mut count = 0;
            let mut prev = sign_at(&lo, &s_big);
            for k in 1..=(2 * steps) {
                let t = &lo + &b * BigInt::from(k);
                let s = sign_at(&t, &s_big);
                if s == 0 || (prev != 0 && s != prev) {
                    count += 1;
                }
                prev = s;
            }
            if count == last {
                stable += 1;
                if stable == 2 {
                    return count;
                }
            } else {
                stable = 0;
            }
            last = count;
            steps *= 4;
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn sturm_agrees_with_grid(f in small_poly()) {
            prop_assume!(is_separable(&f).unwrap());
            prop_assert_eq!(count_real_roots(&f), grid_root_count(&f));
        }

        #[test]
        fn disc_sign_matches_signature(f in small_poly()) {
            prop_assume!(f.deg() % 2 == 1 && f.deg() >= 3 && is_separable(&f).unwrap());
            let (_, _, k2) = real_root_signature(&f).unwrap();
            let d = discriminant(&f).unwrap();
            prop_assert_eq!(d.is_positive(), k2 % 2 == 0);
        }

        #[test]
        fn disc_translation_invariant(f in small_poly(), a in -20i64..20, b in 1i64..5) {
            prop_assume!(f.deg() >= 2);
            let s = BigRational::new(a.into(), b.into());
            prop_assert_eq!(discriminant(&f.shift(&s)).unwrap(), discriminant(&f).unwrap());
        }

        #[test]
        fn gcd_divides(f in small_poly(), g in small_poly()) {
            let h = f.gcd(&g);
            prop_assert!(f.rem(&h).is_zero());
            prop_assert!(g.rem(&h).is_zero());
        }

        #[test]
        fn product_disc_nonzero_iff_coprime_separable(f in small_poly(), g in small_poly()) {
            let prod = &f * &g;
            prop_assume!(prod.deg() >= 2);
            let ok = is_separable(&f).unwrap()
                && is_separable(&g).unwrap()
                && f.gcd(&g).deg() == 0;
            prop_assert_eq!(!discriminant(&prod).unwrap().is_zero(), ok);
        }
    }
}
