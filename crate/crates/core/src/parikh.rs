// SPDX-License-Identifier: Apache-2.0

//! Alphabets, Parikh vectors and points over a base.
//!
//! A Parikh vector is a commutative word: one multiplicity per letter,
//! stored densely in alphabet order. Its textual form is the monomial
//! syntax `a^2 b`, with `1` standing for the zero vector.

use std::fmt;
use std::ops::Add;

use crate::error::{Error, Result};
use crate::exact_arith::Rat;

/// An ordered set of single-character letters.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Alphabet {
    letters: Vec<char>,
}

impl Alphabet {
    pub fn new(letters: impl IntoIterator<Item = char>) -> Result<Self> {
        let letters: Vec<char> = letters.into_iter().collect();
        for (i, &c) in letters.iter().enumerate() {
            if !is_letter(c) {
                return Err(Error::InvalidAlphabet(format!("`{c}` is not a letter")));
            }
            if letters[..i].contains(&c) {
                return Err(Error::InvalidAlphabet(format!("duplicate letter `{c}`")));
            }
        }
        Ok(Alphabet { letters })
    }

    /// Parses a comma-separated list such as `a,b,c`.
    pub fn parse_list(text: &str) -> Result<Self> {
        let mut letters = Vec::new();
        for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let mut chars = item.chars();
            match (chars.next(), chars.next()) {
                (Some(c), None) => letters.push(c),
                _ => {
                    return Err(Error::InvalidAlphabet(format!(
                        "`{item}` is not a single letter"
                    )))
                }
            }
        }
        Alphabet::new(letters)
    }

    /// Collects every letter occurring in `texts`, sorted.
    pub fn infer<'a>(texts: impl IntoIterator<Item = &'a str>) -> Self {
        let mut letters: Vec<char> = texts
            .into_iter()
            .flat_map(str::chars)
            .filter(|&c| is_letter(c))
            .collect();
        letters.sort_unstable();
        letters.dedup();
        Alphabet { letters }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[char] {
        &self.letters
    }

    pub fn letter(&self, index: usize) -> char {
        self.letters[index]
    }

    pub fn index_of(&self, letter: char) -> Option<usize> {
        self.letters.iter().position(|&c| c == letter)
    }

    /// Renders `v` in monomial syntax.
    pub fn format_vector(&self, v: &ParikhVector) -> String {
        assert_eq!(v.dim(), self.len(), "vector does not match alphabet");
        let parts: Vec<String> = v
            .counts()
            .iter()
            .zip(&self.letters)
            .filter(|(&n, _)| n > 0)
            .map(|(&n, c)| if n == 1 { c.to_string() } else { format!("{c}^{n}") })
            .collect();
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join(" ")
        }
    }

    /// Parses monomial syntax: `1`, or letters each optionally followed
    /// by `^n`. Repeated letters accumulate.
    pub fn parse_vector(&self, text: &str) -> Result<ParikhVector> {
        let chars: Vec<char> = text.chars().collect();
        let mut counts = vec![0u64; self.len()];
        let mut pos = 0;
        let mut seen_one = false;
        let mut seen_letter = false;
        while pos < chars.len() {
            let c = chars[pos];
            if c.is_whitespace() {
                pos += 1;
            } else if c == '1' {
                seen_one = true;
                pos += 1;
            } else if is_letter(c) {
                let index = self
                    .index_of(c)
                    .ok_or(Error::UnknownLetter { letter: c, pos })?;
                seen_letter = true;
                pos += 1;
                let mut exponent = 1;
                if chars.get(pos) == Some(&'^') {
                    pos += 1;
                    let (n, next) = parse_nat(&chars, pos)?;
                    exponent = n;
                    pos = next;
                }
                counts[index] += exponent;
            } else {
                return Err(Error::Syntax {
                    pos,
                    msg: format!("unexpected `{c}` in monomial"),
                });
            }
        }
        if !seen_one && !seen_letter {
            return Err(Error::Syntax {
                pos: 0,
                msg: "empty monomial (use `1` for the zero vector)".to_string(),
            });
        }
        if seen_one && seen_letter {
            return Err(Error::Syntax {
                pos: 0,
                msg: "`1` cannot be combined with letters".to_string(),
            });
        }
        Ok(ParikhVector::new(counts))
    }
}

pub(crate) fn is_letter(c: char) -> bool {
    c.is_alphabetic()
}

pub(crate) fn parse_nat(chars: &[char], start: usize) -> Result<(u64, usize)> {
    let mut pos = start;
    while pos < chars.len() && chars[pos].is_ascii_digit() {
        pos += 1;
    }
    if pos == start {
        return Err(Error::Syntax {
            pos: start,
            msg: "expected a natural number".to_string(),
        });
    }
    let digits: String = chars[start..pos].iter().collect();
    let n = digits.parse().map_err(|_| Error::Syntax {
        pos: start,
        msg: format!("number `{digits}` out of range"),
    })?;
    Ok((n, pos))
}

/// A commutative word: one count per letter, in alphabet order.
///
/// Ordering is lexicographic on the counts; this is the canonical order
/// used for bases and term lists throughout the crate.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ParikhVector(Vec<u64>);

impl ParikhVector {
    pub fn new(counts: Vec<u64>) -> Self {
        ParikhVector(counts)
    }

    pub fn zero(dim: usize) -> Self {
        ParikhVector(vec![0; dim])
    }

    /// The vector of a single letter.
    pub fn unit(dim: usize, letter: usize) -> Self {
        let mut counts = vec![0; dim];
        counts[letter] = 1;
        ParikhVector(counts)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn counts(&self) -> &[u64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&n| n == 0)
    }

    /// Total degree: the sum of all counts.
    pub fn degree(&self) -> u64 {
        self.0.iter().sum()
    }

    pub fn checked_add(&self, other: &ParikhVector) -> Result<ParikhVector> {
        check_dim(self.dim(), other.dim())?;
        Ok(ParikhVector(
            self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect(),
        ))
    }

    pub fn scale(&self, n: u64) -> ParikhVector {
        ParikhVector(self.0.iter().map(|a| a * n).collect())
    }

    /// Coordinate-wise `self - other`, if no coordinate goes negative.
    pub fn checked_sub(&self, other: &ParikhVector) -> Option<ParikhVector> {
        assert_eq!(self.dim(), other.dim());
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(ParikhVector)
    }

    pub fn to_rat(&self) -> Vec<Rat> {
        self.0.iter().map(|&n| Rat::from_integer(n.into())).collect()
    }
}

impl Add for &ParikhVector {
    type Output = ParikhVector;

    /// Panics on dimension mismatch; use [`ParikhVector::checked_add`]
    /// where the inputs are not already known to agree.
    fn add(self, other: &ParikhVector) -> ParikhVector {
        self.checked_add(other).expect("vector dimensions agree")
    }
}

impl fmt::Display for ParikhVector {
    /// Tuple syntax `(1,0,2)`; use [`Alphabet::format_vector`] for monomials.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, n) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{n}")?;
        }
        write!(f, ")")
    }
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

/// A natural-number combination of an ordered base.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Point {
    dim: usize,
    base: Vec<ParikhVector>,
    coeffs: Vec<u64>,
}

impl Point {
    pub fn new(dim: usize, base: Vec<ParikhVector>, coeffs: Vec<u64>) -> Result<Self> {
        check_dim(base.len(), coeffs.len())?;
        for b in &base {
            check_dim(dim, b.dim())?;
        }
        Ok(Point { dim, base, coeffs })
    }

    pub fn base(&self) -> &[ParikhVector] {
        &self.base
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// `Σ coeffs_i · base_i`.
    pub fn to_vector(&self) -> ParikhVector {
        let mut acc = vec![0u64; self.dim];
        for (b, &c) in self.base.iter().zip(&self.coeffs) {
            for (slot, &n) in acc.iter_mut().zip(b.counts()) {
                *slot += c * n;
            }
        }
        ParikhVector(acc)
    }
}
