//! The permutation module `F_p^n / <(1,...,1)>` as a brute-force model of
//! the `pi`-torsion, plus rational 2-torsion dimensions from certified
//! factorizations.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::curve::CurveSpec;
use crate::error::{Error, Result};
use crate::fp::factor_degrees;
use crate::poly::{discriminant, rational_roots, RatPoly};
use crate::primes::{is_prime, primes_in_range};

/// A bijection of `{0, .., n-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || std::mem::replace(&mut seen[i], true) {
                return Err(Error::invalid("images do not form a bijection"));
            }
        }
        Ok(Permutation { images })
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            images: (0..n).collect(),
        }
    }

    /// Builds a permutation from disjoint cycles written with 1-based points.
    pub fn from_cycles(n: usize, cycles: &[&[usize]]) -> Result<Self> {
        let mut images: Vec<usize> = (0..n).collect();
        let mut moved = vec![false; n];
        for cycle in cycles {
            for (k, &a) in cycle.iter().enumerate() {
                let b = cycle[(k + 1) % cycle.len()];
                if a == 0 || a > n || b == 0 || b > n || std::mem::replace(&mut moved[a - 1], true) {
                    return Err(Error::invalid("cycles must be disjoint points in 1..=n"));
                }
                images[a - 1] = b - 1;
            }
        }
        Permutation::new(images)
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut images: Vec<usize> = (0..n).collect();
        images.shuffle(rng);
        Permutation { images }
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    /// `self` after `other`.
    pub fn compose(&self, other: &Self) -> Self {
        Permutation {
            images: other.images.iter().map(|&i| self.images[i]).collect(),
        }
    }

    pub fn inverse(&self) -> Self {
        let mut images = vec![0; self.len()];
        for (i, &j) in self.images.iter().enumerate() {
            images[j] = i;
        }
        Permutation { images }
    }

    /// Cycle lengths, sorted ascending, fixed points included.
    pub fn cycle_lengths(&self) -> Vec<usize> {
        let mut seen = vec![false; self.len()];
        let mut lengths = Vec::new();
        for start in 0..self.len() {
            let mut len = 0;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = self.images[i];
                len += 1;
            }
            if len > 0 {
                lengths.push(len);
            }
        }
        lengths.sort_unstable();
        lengths
    }
}

fn rank_mod_p(mut rows: Vec<Vec<u64>>, p: u64) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..rows.len()).find(|&r| rows[r][c] != 0) else {
            continue;
        };
        rows.swap(rank, piv);
        let inv = crate::primes::pow_mod(rows[rank][c], p - 2, p);
        for x in rows[rank].iter_mut() {
            *x = *x * inv % p;
        }
        for r in 0..rows.len() {
            if r != rank && rows[r][c] != 0 {
                let factor = rows[r][c];
                for k in 0..cols {
                    rows[r][k] = (rows[r][k] + p * p - factor * rows[rank][k] % p) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Dimension of the `sigma`-fixed subspace of `F_p^n / <(1,...,1)>`,
/// by row reduction of `sigma - 1` in the basis `e_1, .., e_{n-1}` (with
/// `e_n = -(e_1 + .. + e_{n-1})`).
pub fn fixed_space_dim(sigma: &Permutation, n: usize, p: u64) -> Result<usize> {
    if sigma.len() != n || n < 2 {
        return Err(Error::invalid("permutation size must equal n >= 2"));
    }
    if !is_prime(p) || p > 1 << 20 {
        return Err(Error::invalid(format!("{p} is not a small prime")));
    }
    if n as u64 % p == 0 {
        return Err(Error::invalid(format!("p = {p} divides n = {n}")));
    }
    let m = n - 1;
    // column j of the matrix is the image of e_j
    let mut mat = vec![vec![0u64; m]; m];
    for j in 0..m {
        let target = sigma.apply(j);
        if target < m {
            mat[target][j] = 1;
        } else {
            for row in mat.iter_mut() {
                row[j] = p - 1;
            }
        }
        mat[j][j] = (mat[j][j] + p - 1) % p;
    }
    Ok(m - rank_mod_p(mat, p))
}

/// True iff no orbit length is divisible by `p`.
pub fn orbit_lengths_prime_to(lengths: &[usize], p: u64) -> bool {
    lengths.iter().all(|&l| l as u64 % p != 0)
}

const CERTIFICATE_BOUND: u64 = 20_000;

fn subset_sums(lengths: &[usize], n: usize) -> BTreeSet<usize> {
    let mut reach = vec![false; n + 1];
    reach[0] = true;
    for &l in lengths {
        for s in (l..=n).rev() {
            reach[s] = reach[s] || reach[s - l];
        }
    }
    (1..n).filter(|&s| reach[s]).collect()
}

/// Proves `g` irreducible over Q from factor degrees modulo good primes:
/// any rational factor of degree `k` would make `k` a subset sum of every
/// reduction's degrees. Returns `Ok(false)` when no proof is found.
pub fn certify_irreducible(g: &RatPoly) -> Result<bool> {
    let n = g.deg();
    if n <= 1 {
        return Ok(n == 1);
    }
    if !rational_roots(g)?.is_empty() {
        return Ok(false);
    }
    if n <= 3 {
        return Ok(true);
    }
    let disc = discriminant(g)?;
    if disc == num_rational::BigRational::from_integer(0.into()) {
        return Ok(false);
    }
    let mut candidates: BTreeSet<usize> = (1..n).collect();
    for l in primes_in_range(3, CERTIFICATE_BOUND) {
        let Ok(degrees) = factor_degrees(g, l) else {
            continue;
        };
        let sums = subset_sums(&degrees, n);
        candidates.retain(|k| sums.contains(k));
        if candidates.is_empty() {
            return Ok(true);
        }
    }
    Ok(false)
}

/// `(number of irreducible factors of f over Q) - 1`, from the declared
/// factorization or from rational roots plus an irreducible cofactor.
pub fn rational_two_torsion_dim(curve: &CurveSpec) -> Result<usize> {
    let factors: Vec<RatPoly> = match curve.declared_factors() {
        Some(fs) => fs.to_vec(),
        None => {
            let roots = rational_roots(curve.f())?;
            let mut rest = curve.f().clone();
            let mut factors = Vec::new();
            for r in roots {
                let lin = RatPoly::new(vec![-r, num_rational::BigRational::from_integer(1.into())]);
                rest = rest.div_rem(&lin).0;
                factors.push(lin);
            }
            if rest.deg() > 0 {
                factors.push(rest);
            }
            factors
        }
    };
    for g in &factors {
        if !certify_irreducible(g)? {
            return Err(Error::UnknownFactorization(format!(
                "cannot certify {g} irreducible"
            )));
        }
    }
    Ok(factors.len() - 1)
}
