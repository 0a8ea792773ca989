//! Quadratic forms over F_2, Lagrangian subspaces, and exhaustive counts of
//! Lagrangians meeting a fixed one trivially.
//!
//! Vectors are bitmasks: bit `i` is coordinate `i`.

use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::error::{Error, Result};

/// `q(v) = sum_i a_i v_i + sum_{i<j} b_ij v_i v_j` over F_2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadraticForm {
    dim: usize,
    linear: u64,
    /// Row `i` holds the bits `j > i` with `b_ij = 1`.
    upper: Vec<u64>,
}

impl QuadraticForm {
    pub fn new(dim: usize, linear: u64, upper: Vec<u64>) -> Result<Self> {
        if dim == 0 || dim > 63 || upper.len() != dim {
            return Err(Error::invalid("form needs 1..=63 coordinates and one row each"));
        }
        let mask = (1u64 << dim) - 1;
        let upper = upper
            .into_iter()
            .enumerate()
            .map(|(i, row)| row & mask & !((2u64 << i) - 1))
            .collect();
        Ok(QuadraticForm {
            dim,
            linear: linear & mask,
            upper,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eval(&self, v: u64) -> u8 {
        let mut acc = (self.linear & v).count_ones();
        for (i, row) in self.upper.iter().enumerate() {
            if v >> i & 1 == 1 {
                acc += (row & v).count_ones();
            }
        }
        (acc % 2) as u8
    }

    /// `(v, w)_q = q(v + w) + q(v) + q(w)`.
    pub fn pairing(&self, v: u64, w: u64) -> u8 {
        self.eval(v ^ w) ^ self.eval(v) ^ self.eval(w)
    }

    /// Rows of the Gram matrix of the pairing.
    fn gram(&self) -> Vec<u64> {
        (0..self.dim)
            .map(|i| (0..self.dim).fold(0u64, |row, j| row | u64::from(self.pairing(1 << i, 1 << j)) << j))
            .collect()
    }
}

/// A quadratic form with nondegenerate pairing on `F_2^{2m}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadraticSpace {
    form: QuadraticForm,
}

impl QuadraticSpace {
    pub fn new(form: QuadraticForm) -> Result<Self> {
        if form.dim % 2 != 0 {
            return Err(Error::invalid("metabolic space needs even dimension"));
        }
        if Subspace::span(form.dim, &form.gram())?.dim() != form.dim {
            return Err(Error::invalid("pairing is degenerate"));
        }
        Ok(QuadraticSpace { form })
    }

    /// Orthogonal sum of `m` hyperbolic planes: `e_i` is bit `2i`, `f_i` is
    /// bit `2i+1`, and `q = sum x_i y_i`.
    pub fn hyperbolic(m: usize) -> Result<Self> {
        let dim = 2 * m;
        let upper = (0..dim)
            .map(|i| if i % 2 == 0 { 1u64 << (i + 1) } else { 0 })
            .collect();
        QuadraticSpace::new(QuadraticForm::new(dim, 0, upper)?)
    }

    pub fn form(&self) -> &QuadraticForm {
        &self.form
    }

    pub fn dim(&self) -> usize {
        self.form.dim
    }

    pub fn half_dim(&self) -> usize {
        self.form.dim / 2
    }

    /// The standard Lagrangian `<e_1, .., e_m>` of [`QuadraticSpace::hyperbolic`].
    pub fn standard_lagrangian(&self) -> Result<Subspace> {
        let basis: Vec<u64> = (0..self.half_dim()).map(|i| 1u64 << (2 * i)).collect();
        Subspace::span(self.dim(), &basis)
    }
}

/// A subspace in reduced echelon form: rows sorted by descending pivot
/// (highest set bit), every pivot cleared from the other rows.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subspace {
    ambient: usize,
    rows: Vec<u64>,
}

fn pivot(v: u64) -> u32 {
    63 - v.leading_zeros()
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Subspace {
            ambient,
            rows: Vec::new(),
        }
    }

    pub fn span(ambient: usize, vectors: &[u64]) -> Result<Self> {
        let mut s = Subspace::zero(ambient);
        for &v in vectors {
            if ambient < 64 && v >> ambient != 0 {
                return Err(Error::invalid("vector outside the ambient space"));
            }
            s.insert(v);
        }
        Ok(s)
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn basis(&self) -> &[u64] {
        &self.rows
    }

    /// Remainder of `v` after elimination against the rows.
    pub fn reduce(&self, mut v: u64) -> u64 {
        for &r in &self.rows {
            if v >> pivot(r) & 1 == 1 {
                v ^= r;
            }
        }
        v
    }

    pub fn contains(&self, v: u64) -> bool {
        self.reduce(v) == 0
    }

    /// Adds `v`; returns false if it was already in the span.
    pub fn insert(&mut self, v: u64) -> bool {
        let v = self.reduce(v);
        if v == 0 {
            return false;
        }
        let p = pivot(v);
        for r in self.rows.iter_mut() {
            if *r >> p & 1 == 1 {
                *r ^= v;
            }
        }
        let at = self.rows.partition_point(|&r| pivot(r) > p);
        self.rows.insert(at, v);
        true
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        let mut s = self.clone();
        for &v in &other.rows {
            s.insert(v);
        }
        s
    }

    pub fn intersection_dim(&self, other: &Subspace) -> usize {
        self.dim() + other.dim() - self.sum(other).dim()
    }
}

/// q vanishes on `x`, `x` is self-orthogonal, and `dim x = dim V / 2`.
pub fn is_lagrangian(space: &QuadraticSpace, x: &Subspace) -> Result<bool> {
    if x.ambient() != space.dim() {
        return Err(Error::invalid("subspace lives in a different dimension"));
    }
    let q = space.form();
    let b = x.basis();
    Ok(x.dim() == space.half_dim()
        && b.iter().all(|&v| q.eval(v) == 0)
        && b.iter().enumerate().all(|(i, &v)| b[i + 1..].iter().all(|&w| q.pairing(v, w) == 0)))
}

/// Largest `m` accepted by the enumerators.
pub const MAX_HALF_DIM: usize = 5;

/// Every Lagrangian of `space` meeting `avoid` only in zero, by extending
/// isotropic flags one vector at a time and deduplicating echelon forms.
pub fn lagrangians_avoiding(space: &QuadraticSpace, avoid: &Subspace) -> Result<Vec<Subspace>> {
    let m = space.half_dim();
    if m > MAX_HALF_DIM {
        return Err(Error::ResourceLimit(format!(
            "Lagrangian enumeration is limited to dimension {}",
            2 * MAX_HALF_DIM
        )));
    }
    if avoid.ambient() != space.dim() {
        return Err(Error::invalid("subspace lives in a different dimension"));
    }
    let q = space.form();
    let vectors: Vec<u64> = (1u64..1 << space.dim()).filter(|&v| q.eval(v) == 0).collect();
    let mut level: BTreeSet<Subspace> = BTreeSet::from([Subspace::zero(space.dim())]);
    for _ in 0..m {
        level = level
            .par_iter()
            .flat_map_iter(|y| {
                let blocked = y.sum(avoid);
                vectors
                    .iter()
                    .filter(|&&v| !blocked.contains(v) && y.basis().iter().all(|&w| q.pairing(v, w) == 0))
                    .map(|&v| {
                        let mut next = y.clone();
                        next.insert(v);
                        next
                    })
                    .collect::<Vec<_>>()
            })
            .collect::<BTreeSet<_>>();
    }
    Ok(level.into_iter().collect())
}

/// Number of Lagrangians meeting the Lagrangian `x` trivially.
pub fn count_disjoint_lagrangians(space: &QuadraticSpace, x: &Subspace) -> Result<usize> {
    if !is_lagrangian(space, x)? {
        return Err(Error::invalid("reference subspace is not Lagrangian"));
    }
    Ok(lagrangians_avoiding(space, x)?.len())
}

/// Number of all Lagrangians of `space`.
pub fn count_lagrangians(space: &QuadraticSpace) -> Result<usize> {
    Ok(lagrangians_avoiding(space, &Subspace::zero(space.dim()))?.len())
}

/// Dimensions of the relaxed and strict Selmer-type groups for a global
/// space mapping to `space` by `loc` (images of a basis): the relaxed group
/// is all of the global space, the strict one is the kernel of `loc`.
pub fn relaxed_minus_strict(space: &QuadraticSpace, loc: &[u64]) -> Result<(usize, usize)> {
    let image = Subspace::span(space.dim(), loc)?;
    let relaxed = loc.len();
    Ok((relaxed, relaxed - image.dim()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn lagrangian_examples() {
        let h = QuadraticSpace::hyperbolic(1).unwrap();
        assert!(is_lagrangian(&h, &Subspace::span(2, &[0b01]).unwrap()).unwrap());
        assert!(!is_lagrangian(&h, &Subspace::span(2, &[0b11]).unwrap()).unwrap());
        let h2 = QuadraticSpace::hyperbolic(2).unwrap();
        assert!(is_lagrangian(&h2, &Subspace::span(4, &[0b0001, 0b0100]).unwrap()).unwrap());
        assert!(is_lagrangian(&h, &Subspace::span(4, &[1]).unwrap()).is_err());
    }

    #[test]
    fn disjoint_counts() {
        for (m, want) in [(1, 1), (2, 2), (3, 8)] {
            let v = QuadraticSpace::hyperbolic(m).unwrap();
            let x = v.standard_lagrangian().unwrap();
            assert_eq!(count_disjoint_lagrangians(&v, &x).unwrap(), want, "m = {m}");
        }
        assert!(matches!(
            count_disjoint_lagrangians(
                &QuadraticSpace::hyperbolic(6).unwrap(),
                &QuadraticSpace::hyperbolic(6).unwrap().standard_lagrangian().unwrap()
            ),
            Err(Error::ResourceLimit(_))
        ));
    }

    #[test]
    fn count_independent_of_reference() {
        let v = QuadraticSpace::hyperbolic(3).unwrap();
        for x in count_all(&v) {
            assert_eq!(count_disjoint_lagrangians(&v, &x).unwrap(), 8);
        }
    }

    fn count_all(v: &QuadraticSpace) -> Vec<Subspace> {
        lagrangians_avoiding(v, &Subspace::zero(v.dim())).unwrap()
    }

    #[test]
    fn total_lagrangians() {
        // prod_{i<m} (2^i + 1)
        for (m, want) in [(1, 2), (2, 6), (3, 30)] {
            assert_eq!(count_lagrangians(&QuadraticSpace::hyperbolic(m).unwrap()).unwrap(), want);
        }
    }

    #[test]
    fn pairing_is_symmetric_bilinear() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let dim = rng.gen_range(1..=10);
            let mask = (1u64 << dim) - 1;
            let q = QuadraticForm::new(dim, rng.gen(), (0..dim).map(|_| rng.gen()).collect()).unwrap();
            let (u, v, w) = (rng.gen::<u64>() & mask, rng.gen::<u64>() & mask, rng.gen::<u64>() & mask);
            assert_eq!(q.pairing(u, v), q.pairing(v, u));
            assert_eq!(q.pairing(u ^ v, w), q.pairing(u, w) ^ q.pairing(v, w));
        }
    }

    #[test]
    fn degenerate_forms_rejected() {
        let q = QuadraticForm::new(2, 0b11, vec![0, 0]).unwrap();
        assert!(QuadraticSpace::new(q).is_err());
        let odd = QuadraticForm::new(3, 0, vec![0b010, 0, 0]).unwrap();
        assert!(QuadraticSpace::new(odd).is_err());
    }

    #[test]
    fn relaxed_strict_gap_is_half_dimension() {
        // A global space of dimension 5 whose image is a Lagrangian W,
        // checked against every local Lagrangian condition A.
        let v = QuadraticSpace::hyperbolic(3).unwrap();
        let all = count_all(&v);
        let w = &all[7];
        let mut loc = w.basis().to_vec();
        loc.push(w.basis()[0] ^ w.basis()[1]);
        loc.push(0);
        let (relaxed, strict) = relaxed_minus_strict(&v, &loc).unwrap();
        assert_eq!(relaxed - strict, 3);
        for a in &all {
            let meet = w.intersection_dim(a);
            let beyond = w.sum(a).dim() - a.dim();
            assert_eq!(meet + beyond, v.half_dim());
        }
    }
}
