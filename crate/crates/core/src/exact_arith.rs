// SPDX-License-Identifier: Apache-2.0

//! Exact linear algebra over the rationals.
//!
//! Parikh vectors are embedded into `Q^Σ`. Everything here is plain
//! Gauss-Jordan elimination with first-nonzero pivoting on
//! arbitrary-precision rationals; inputs are tiny, so there is no
//! attempt at fraction-free or sparse tricks.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::parikh::{check_dim, ParikhVector, Point};

pub type Rat = BigRational;

/// A vector of rationals, one entry per letter (or per frame direction).
pub type RatVector = Vec<Rat>;

/// Reduces `rows` in place to reduced row echelon form, pivoting only in
/// the first `pivot_cols` columns. Returns the pivot column of each
/// nonzero row, in row order.
fn reduce(rows: &mut [Vec<Rat>], pivot_cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..pivot_cols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][col].recip();
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[col].is_zero() {
                continue;
            }
            let factor = row[col].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                *x -= &factor * p;
            }
        }
        pivots.push(col);
        r += 1;
    }
    pivots
}

/// Matrix whose columns are `columns`, as rows over `dim` coordinates.
fn column_matrix(columns: &[RatVector], dim: usize) -> Vec<Vec<Rat>> {
    (0..dim)
        .map(|i| columns.iter().map(|c| c[i].clone()).collect())
        .collect()
}

/// Finds `c` with `Σ c_i · columns_i = target`, if one exists.
///
/// Free variables are set to zero, so for independent columns the
/// answer is the unique solution.
pub fn rat_solve(columns: &[RatVector], target: &[Rat]) -> Result<Option<RatVector>> {
    let dim = target.len();
    for c in columns {
        check_dim(dim, c.len())?;
    }
    let k = columns.len();
    let mut rows = column_matrix(columns, dim);
    for (row, t) in rows.iter_mut().zip(target) {
        row.push(t.clone());
    }
    let pivots = reduce(&mut rows, k);
    if rows[pivots.len()..].iter().any(|row| !row[k].is_zero()) {
        return Ok(None);
    }
    let mut solution = vec![Rat::zero(); k];
    for (row, &col) in rows.iter().zip(&pivots) {
        solution[col] = row[k].clone();
    }
    Ok(Some(solution))
}

pub fn rank(vectors: &[ParikhVector]) -> usize {
    let Some(first) = vectors.first() else {
        return 0;
    };
    let columns: Vec<RatVector> = vectors.iter().map(ParikhVector::to_rat).collect();
    let mut rows = column_matrix(&columns, first.dim());
    reduce(&mut rows, vectors.len()).len()
}

/// True iff no nontrivial rational combination of `vectors` vanishes.
///
/// For Parikh vectors this coincides with injectivity of `to_vector` on
/// natural points: a rational dependency scales to two distinct natural
/// points with the same image.
pub fn is_independent(vectors: &[ParikhVector]) -> bool {
    rank(vectors) == vectors.len()
}

/// Two distinct points with the same image and disjoint supports.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DependencyWitness {
    pub mu: Point,
    pub nu: Point,
}

impl DependencyWitness {
    /// Checks the witness invariants; used by tests and debug assertions.
    pub fn is_valid(&self) -> bool {
        self.mu != self.nu
            && self.mu.base() == self.nu.base()
            && self.mu.to_vector() == self.nu.to_vector()
            && self
                .mu
                .coeffs()
                .iter()
                .zip(self.nu.coeffs())
                .all(|(&m, &n)| m == 0 || n == 0)
    }
}

fn lcm_of_denominators<'a>(values: impl IntoIterator<Item = &'a Rat>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()))
}

fn to_u64(n: &BigInt) -> u64 {
    u64::try_from(n).expect("dependency coefficient fits in u64")
}

/// An integer dependency among `vectors`, or `None` if they are
/// independent.
///
/// A rational null vector is read off the reduced echelon form (first
/// free column set to 1), scaled by the lcm of its denominators, and
/// split by sign: positive entries go to `mu`, negated non-positive ones
/// to `nu`.
pub fn integer_dependency(vectors: &[ParikhVector]) -> Option<DependencyWitness> {
    let first = vectors.first()?;
    let dim = first.dim();
    let k = vectors.len();
    let columns: Vec<RatVector> = vectors.iter().map(ParikhVector::to_rat).collect();
    let mut rows = column_matrix(&columns, dim);
    let pivots = reduce(&mut rows, k);
    let free = (0..k).find(|c| !pivots.contains(c))?;

    let mut null = vec![Rat::zero(); k];
    null[free] = Rat::one();
    for (row, &col) in rows.iter().zip(&pivots) {
        null[col] = -row[free].clone();
    }
    let scale = Rat::from_integer(lcm_of_denominators(&null));
    let mut mu = vec![0u64; k];
    let mut nu = vec![0u64; k];
    for (i, c) in null.iter().enumerate() {
        let scaled = (c * &scale).to_integer();
        if scaled.is_positive() {
            mu[i] = to_u64(&scaled);
        } else {
            nu[i] = to_u64(&(-scaled));
        }
    }
    let witness = DependencyWitness {
        mu: Point::new(dim, vectors.to_vec(), mu).expect("lengths agree"),
        nu: Point::new(dim, vectors.to_vec(), nu).expect("lengths agree"),
    };
    debug_assert!(witness.is_valid());
    Some(witness)
}

/// Completes an independent `base` to a basis of `Q^dim` using letter
/// vectors, scanned in alphabet order and added greedily.
pub fn extend_basis(base: &[ParikhVector], dim: usize) -> Result<Vec<ParikhVector>> {
    for b in base {
        check_dim(dim, b.dim())?;
    }
    if !is_independent(base) {
        return Err(Error::DependentBase);
    }
    let mut current = base.to_vec();
    let mut extension = Vec::new();
    for letter in 0..dim {
        if current.len() == dim {
            break;
        }
        let e = ParikhVector::unit(dim, letter);
        current.push(e.clone());
        if is_independent(&current) {
            extension.push(e);
        } else {
            current.pop();
        }
    }
    debug_assert_eq!(current.len(), dim);
    Ok(extension)
}

/// An ordered basis `B ⊎ B̄` of `Q^Σ`, where `B` is a given independent
/// family and `B̄` its greedy extension, together with the inverse of the
/// basis matrix for computing coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    base: Vec<ParikhVector>,
    extension: Vec<ParikhVector>,
    /// `inverse[i]` dotted with a vector gives its i-th coordinate.
    inverse: Vec<Vec<Rat>>,
}

impl Frame {
    pub fn new(base: &[ParikhVector], dim: usize) -> Result<Frame> {
        let extension = extend_basis(base, dim)?;
        let columns: Vec<RatVector> = base
            .iter()
            .chain(&extension)
            .map(ParikhVector::to_rat)
            .collect();
        let mut rows = column_matrix(&columns, dim);
        for (i, row) in rows.iter_mut().enumerate() {
            row.extend((0..dim).map(|j| if i == j { Rat::one() } else { Rat::zero() }));
        }
        let pivots = reduce(&mut rows, dim);
        if pivots.len() != dim {
            return Err(Error::Invariant("frame is not a basis".to_string()));
        }
        let inverse = rows.into_iter().map(|row| row[dim..].to_vec()).collect();
        Ok(Frame {
            base: base.to_vec(),
            extension,
            inverse,
        })
    }

    /// The given independent family `B`.
    pub fn base(&self) -> &[ParikhVector] {
        &self.base
    }

    /// The completing letter vectors `B̄`.
    pub fn extension(&self) -> &[ParikhVector] {
        &self.extension
    }

    /// Number of directions, i.e. the ambient dimension.
    pub fn len(&self) -> usize {
        self.inverse.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inverse.is_empty()
    }

    /// Whether direction `i` belongs to `B` (as opposed to `B̄`).
    pub fn is_base_direction(&self, i: usize) -> bool {
        i < self.base.len()
    }

    /// All frame vectors in order: `B` then `B̄`.
    pub fn vectors(&self) -> impl Iterator<Item = &ParikhVector> {
        self.base.iter().chain(&self.extension)
    }

    pub fn coordinates(&self, v: &ParikhVector) -> RatVector {
        assert_eq!(v.dim(), self.len(), "vector does not match frame");
        self.inverse
            .iter()
            .map(|row| {
                row.iter()
                    .zip(v.counts())
                    .filter(|(_, &n)| n != 0)
                    .map(|(r, &n)| r * BigInt::from(n))
                    .fold(Rat::zero(), |acc, x| acc + x)
            })
            .collect()
    }
}

/// Unique rational coordinates of `v` in `frame`.
pub fn coordinates(frame: &Frame, v: &ParikhVector) -> RatVector {
    frame.coordinates(v)
}

/// Least common multiple of the denominators of `values`.
pub fn common_denominator(values: &[Rat]) -> BigInt {
    lcm_of_denominators(values)
}
