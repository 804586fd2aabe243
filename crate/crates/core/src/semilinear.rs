// SPDX-License-Identifier: Apache-2.0

//! Linear and semilinear sets, and normalization of expressions into
//! unions of linear sets with independent bases.
//!
//! A [`LinearSet`] `u·B*` is stored with its base sorted, deduplicated
//! and free of the zero vector (`0*` and `1` denote the same set, and
//! keeping zero out makes `dimension` mean what it says). A
//! [`SemilinearSet`] is a sorted, deduplicated list of such terms; no
//! terms means the empty set.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact_arith::{integer_dependency, is_independent, Frame, Rat, RatVector};
use crate::expr::{expr_of_vector, Expr};
use crate::parikh::{Alphabet, ParikhVector, Point};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinearSet {
    offset: ParikhVector,
    base: Vec<ParikhVector>,
}

impl LinearSet {
    pub fn new(offset: ParikhVector, base: impl IntoIterator<Item = ParikhVector>) -> Self {
        let mut base: Vec<ParikhVector> = base.into_iter().filter(|b| !b.is_zero()).collect();
        debug_assert!(base.iter().all(|b| b.dim() == offset.dim()));
        base.sort();
        base.dedup();
        LinearSet { offset, base }
    }

    pub fn singleton(offset: ParikhVector) -> Self {
        LinearSet {
            offset,
            base: Vec::new(),
        }
    }

    pub fn offset(&self) -> &ParikhVector {
        &self.offset
    }

    pub fn base(&self) -> &[ParikhVector] {
        &self.base
    }

    /// Ambient dimension (alphabet size).
    pub fn dim(&self) -> usize {
        self.offset.dim()
    }

    /// Number of generators.
    pub fn dimension(&self) -> usize {
        self.base.len()
    }

    pub fn is_unambiguous(&self) -> bool {
        is_independent(&self.base)
    }

    pub fn shifted(&self, by: &ParikhVector) -> LinearSet {
        LinearSet {
            offset: &self.offset + by,
            base: self.base.clone(),
        }
    }

    /// `(u·B*)·(v·C*) = (u+v)·(B ∪ C)*`.
    pub fn product(&self, other: &LinearSet) -> LinearSet {
        LinearSet::new(
            &self.offset + &other.offset,
            self.base.iter().chain(&other.base).cloned(),
        )
    }

    pub fn to_expr(&self) -> Expr {
        let stars = self.base.iter().map(|b| Expr::star(expr_of_vector(b)));
        if self.offset.is_zero() && !self.base.is_empty() {
            Expr::product_of(stars)
        } else {
            Expr::product_of(std::iter::once(expr_of_vector(&self.offset)).chain(stars))
        }
    }

    /// Members of total degree at most `max_degree`, by breadth-first
    /// closure from the offset.
    pub fn enumerate_bounded(&self, max_degree: u64) -> BTreeSet<ParikhVector> {
        let mut out = BTreeSet::new();
        if self.offset.degree() > max_degree {
            return out;
        }
        out.insert(self.offset.clone());
        let mut frontier = vec![self.offset.clone()];
        while let Some(v) = frontier.pop() {
            for b in &self.base {
                if v.degree() + b.degree() <= max_degree {
                    let w = &v + b;
                    if out.insert(w.clone()) {
                        frontier.push(w);
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SemilinearSet {
    terms: Vec<LinearSet>,
}

impl SemilinearSet {
    pub fn new(terms: impl IntoIterator<Item = LinearSet>) -> Self {
        let mut terms: Vec<LinearSet> = terms.into_iter().collect();
        terms.sort();
        terms.dedup();
        SemilinearSet { terms }
    }

    pub fn empty() -> Self {
        SemilinearSet::default()
    }

    pub fn terms(&self) -> &[LinearSet] {
        &self.terms
    }

    pub fn into_terms(self) -> Vec<LinearSet> {
        self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest base size over all terms; 0 for the empty set.
    pub fn dimension(&self) -> usize {
        self.terms.iter().map(LinearSet::dimension).max().unwrap_or(0)
    }

    pub fn is_unambiguous(&self) -> bool {
        self.terms.iter().all(LinearSet::is_unambiguous)
    }

    pub fn union(&self, other: &SemilinearSet) -> SemilinearSet {
        SemilinearSet::new(self.terms.iter().chain(&other.terms).cloned())
    }

    /// Pairwise product of terms.
    pub fn product(&self, other: &SemilinearSet) -> SemilinearSet {
        SemilinearSet::new(
            self.terms
                .iter()
                .flat_map(|s| other.terms.iter().map(move |t| s.product(t))),
        )
    }

    pub fn shifted(&self, by: &ParikhVector) -> SemilinearSet {
        SemilinearSet::new(self.terms.iter().map(|t| t.shifted(by)))
    }

    /// Adds `generator` to every base.
    pub fn with_generator(&self, generator: &ParikhVector) -> SemilinearSet {
        SemilinearSet::new(self.terms.iter().map(|t| {
            LinearSet::new(
                t.offset.clone(),
                t.base.iter().cloned().chain(std::iter::once(generator.clone())),
            )
        }))
    }

    pub fn to_expr(&self) -> Expr {
        to_expr(self)
    }

    pub fn enumerate_bounded(&self, max_degree: u64) -> BTreeSet<ParikhVector> {
        self.terms
            .iter()
            .flat_map(|t| t.enumerate_bounded(max_degree))
            .collect()
    }
}

impl FromIterator<LinearSet> for SemilinearSet {
    fn from_iter<I: IntoIterator<Item = LinearSet>>(iter: I) -> Self {
        SemilinearSet::new(iter)
    }
}

/// Semilinear set denoting `⟦e⟧`, by structural recursion.
///
/// The star case enumerates every subset `I` of the inner terms and
/// produces `(Σ_{i∈I} u_i)·(∪_{i∈I} {u_i} ∪ B_i)*`. This is exponential
/// in the number of inner terms.
pub fn from_expr(e: &Expr, dim: usize) -> SemilinearSet {
    match e {
        Expr::Zero => SemilinearSet::empty(),
        Expr::One => SemilinearSet::new([LinearSet::singleton(ParikhVector::zero(dim))]),
        Expr::Letter(a) => SemilinearSet::new([LinearSet::singleton(ParikhVector::unit(dim, *a))]),
        Expr::Union(l, r) => from_expr(l, dim).union(&from_expr(r, dim)),
        Expr::Prod(l, r) => from_expr(l, dim).product(&from_expr(r, dim)),
        Expr::Star(inner) => star(&from_expr(inner, dim), dim),
    }
}

fn star(inner: &SemilinearSet, dim: usize) -> SemilinearSet {
    // A single base-free term: (0 ∪ u·u*) is just u*.
    if let [t] = inner.terms() {
        if t.base.is_empty() {
            return SemilinearSet::new([LinearSet::new(ParikhVector::zero(dim), [t.offset.clone()])]);
        }
    }
    let mut acc = vec![LinearSet::singleton(ParikhVector::zero(dim))];
    for t in inner.terms() {
        // Either t is absent from the subset, or it joins: its offset is
        // paid once and also becomes a generator.
        let with_t: Vec<LinearSet> = acc
            .iter()
            .map(|s| {
                LinearSet::new(
                    &s.offset + &t.offset,
                    s.base
                        .iter()
                        .chain(&t.base)
                        .chain(std::iter::once(&t.offset))
                        .cloned(),
                )
            })
            .collect();
        acc.extend(with_t);
    }
    SemilinearSet::new(acc)
}

/// `u·a^{<n}·B*`: the terms `(u + j·a)·B*` for `0 ≤ j < n`.
pub fn expand_bounded_power(
    u: &ParikhVector,
    a: &ParikhVector,
    n: u64,
    base: &[ParikhVector],
) -> SemilinearSet {
    SemilinearSet::new(
        (0..n).map(|j| LinearSet::new(u + &a.scale(j), base.iter().cloned())),
    )
}

/// The part of [`base_vector_split`] without the `(to_vector p)*` factor:
/// `∪_{i: p_i>0} u_i^{<p_i} · Π_{j≠i} u_j*`.
fn base_vector_residual(point: &Point) -> SemilinearSet {
    let base = point.base();
    let dim = point.to_vector().dim();
    let zero = ParikhVector::zero(dim);
    let mut terms = Vec::new();
    for (i, (u, &p)) in base.iter().zip(point.coeffs()).enumerate() {
        if p == 0 {
            continue;
        }
        let others: Vec<ParikhVector> = base
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, b)| b.clone())
            .collect();
        terms.extend(expand_bounded_power(&zero, u, p, &others).into_terms());
    }
    SemilinearSet::new(terms)
}

/// Rewrites `B*` around the extra generator `w = to_vector(p)`:
/// `B* = w* · ∪_{i: p_i>0} (u_i^{<p_i} · Π_{j≠i} u_j*)`.
pub fn base_vector_split(point: &Point) -> Result<SemilinearSet> {
    if point.is_zero() {
        return Err(Error::ZeroPoint);
    }
    Ok(base_vector_residual(point).with_generator(&point.to_vector()))
}

/// Rewrites `B*` for a dependent `B` into terms of strictly smaller
/// dimension.
///
/// With a witness `(μ, ν)` and `w = to_vector(μ) = to_vector(ν)`, the base
/// splits by support into `B_μ`, `B_ν` and `B_0`; then
/// `B* = w* · R_μ · R_ν · B_0*` where `R_μ`, `R_ν` are the residuals of
/// the base-vector rewrite for `B_μ` and `B_ν`.
pub fn reduce_dependent(base: &[ParikhVector]) -> Result<SemilinearSet> {
    let witness = integer_dependency(base).ok_or(Error::IndependentBase)?;
    let dim = base[0].dim();
    let w = witness.mu.to_vector();

    let restrict = |coeffs: &[u64]| -> Point {
        let (vs, cs): (Vec<_>, Vec<_>) = base
            .iter()
            .zip(coeffs)
            .filter(|(_, &c)| c > 0)
            .map(|(b, &c)| (b.clone(), c))
            .unzip();
        Point::new(dim, vs, cs).expect("restricted point is well-formed")
    };
    let mu = restrict(witness.mu.coeffs());
    let nu = restrict(witness.nu.coeffs());
    let rest: Vec<ParikhVector> = base
        .iter()
        .zip(witness.mu.coeffs().iter().zip(witness.nu.coeffs()))
        .filter(|(_, (&m, &n))| m == 0 && n == 0)
        .map(|(b, _)| b.clone())
        .collect();

    let result = base_vector_residual(&mu)
        .product(&base_vector_residual(&nu))
        .product(&SemilinearSet::new([LinearSet::new(
            ParikhVector::zero(dim),
            rest,
        )]))
        .with_generator(&w);
    debug_assert!(result.dimension() < base.len());
    Ok(result)
}

/// Replaces every term with a dependent base by the offset-shifted
/// [`reduce_dependent`] rewrite, until all bases are independent.
pub fn disambiguate(set: &SemilinearSet) -> SemilinearSet {
    disambiguate_traced(set, |_, _| {})
}

/// [`disambiguate`], reporting each rewritten term and its replacement.
pub fn disambiguate_traced(
    set: &SemilinearSet,
    mut on_rewrite: impl FnMut(&LinearSet, &SemilinearSet),
) -> SemilinearSet {
    let mut done = Vec::new();
    let mut pending: Vec<LinearSet> = set.terms().to_vec();
    while let Some(t) = pending.pop() {
        if t.is_unambiguous() {
            done.push(t);
            continue;
        }
        let reduced = reduce_dependent(t.base())
            .expect("base is dependent")
            .shifted(t.offset());
        on_rewrite(&t, &reduced);
        pending.extend(reduced.into_terms());
    }
    SemilinearSet::new(done)
}

/// Drops terms contained in another unambiguous term of the same set.
///
/// Containment `u·A* ⊆ v·B*` for independent `B` holds iff `u` is a member
/// and every `a ∈ A` lies in `B*`, which is decided on frame coordinates.
pub fn remove_subsumed(set: &SemilinearSet) -> SemilinearSet {
    let matchers: Vec<Option<TermMatcher>> = set
        .terms()
        .iter()
        .map(|t| TermMatcher::new(t).ok())
        .collect();
    let kept = set.terms().iter().enumerate().filter(|&(i, t)| {
        !matchers.iter().enumerate().any(|(j, m)| {
            j != i && m.as_ref().is_some_and(|m| m.contains_linear(t))
        })
    });
    SemilinearSet::new(kept.map(|(_, t)| t.clone()))
}

/// Whether `v` is a sum of elements of `generators` (with repetition).
///
/// Everything is non-negative, so each multiplicity is bounded by the
/// target and a depth-first search over multiplicities is exhaustive.
pub fn in_monoid(v: &ParikhVector, generators: &[ParikhVector]) -> bool {
    fn go(rest: &ParikhVector, generators: &[ParikhVector]) -> bool {
        if rest.is_zero() {
            return true;
        }
        let Some((g, tail)) = generators.split_first() else {
            return false;
        };
        let mut current = Some(rest.clone());
        while let Some(r) = current {
            if go(&r, tail) {
                return true;
            }
            current = r.checked_sub(g);
        }
        false
    }
    let useful: Vec<ParikhVector> = generators
        .iter()
        .filter(|g| !g.is_zero() && v.checked_sub(g).is_some())
        .cloned()
        .collect();
    go(v, &useful)
}

/// Drops generators that are sums of the remaining ones, largest degree
/// first. The generated monoid is unchanged.
pub fn drop_redundant_generators(base: &[ParikhVector]) -> Vec<ParikhVector> {
    let mut order: Vec<ParikhVector> = base.to_vec();
    order.sort_by(|a, b| b.degree().cmp(&a.degree()).then_with(|| a.cmp(b)));
    let mut kept = order.clone();
    for g in &order {
        let others: Vec<ParikhVector> = kept.iter().filter(|k| *k != g).cloned().collect();
        if in_monoid(g, &others) {
            kept = others;
        }
    }
    kept
}

/// One step of [`disambiguate_pruned_traced`].
#[derive(Debug, Clone, Copy)]
pub enum Rewrite<'a> {
    /// A dependent term and its [`reduce_dependent`] replacement.
    Reduced {
        term: &'a LinearSet,
        replacement: &'a SemilinearSet,
    },
    /// A term whose redundant generators were dropped.
    Simplified {
        term: &'a LinearSet,
        simplified: &'a LinearSet,
    },
    /// A term dropped because an unambiguous term already contains it.
    Subsumed {
        term: &'a LinearSet,
        by: &'a LinearSet,
    },
}

/// [`disambiguate`] that drops redundant generators before reducing,
/// skips pending terms already contained in a finished unambiguous term,
/// then applies [`remove_subsumed`].
///
/// Same semantics, usually far fewer terms: stars of unions produce many
/// overlapping dependent terms whose reductions are mostly redundant.
pub fn disambiguate_pruned(set: &SemilinearSet) -> SemilinearSet {
    remove_subsumed(&disambiguate_pruned_traced(set, |_| {}))
}

/// The worklist part of [`disambiguate_pruned`], without the final
/// [`remove_subsumed`], reporting every step.
pub fn disambiguate_pruned_traced(
    set: &SemilinearSet,
    mut on_rewrite: impl FnMut(Rewrite<'_>),
) -> SemilinearSet {
    let mut done: Vec<(LinearSet, TermMatcher)> = Vec::new();
    let mut seen: HashSet<LinearSet> = HashSet::new();
    // Independent terms first, so they can absorb the dependent ones.
    let (mut pending, independent): (Vec<LinearSet>, Vec<LinearSet>) =
        set.terms().iter().cloned().partition(|t| !t.is_unambiguous());
    pending.reverse();
    pending.extend(independent.into_iter().rev());
    while let Some(t) = pending.pop() {
        if !seen.insert(t.clone()) {
            continue;
        }
        if let Some((by, _)) = done.iter().find(|(_, m)| m.contains_linear(&t)) {
            on_rewrite(Rewrite::Subsumed { term: &t, by });
            continue;
        }
        if t.is_unambiguous() {
            let m = TermMatcher::new(&t).expect("term is unambiguous");
            done.push((t, m));
            continue;
        }
        let simplified = LinearSet::new(t.offset.clone(), drop_redundant_generators(&t.base));
        if simplified != t {
            on_rewrite(Rewrite::Simplified {
                term: &t,
                simplified: &simplified,
            });
            pending.push(simplified);
            continue;
        }
        let reduced = reduce_dependent(t.base())
            .expect("base is dependent")
            .shifted(t.offset());
        on_rewrite(Rewrite::Reduced {
            term: &t,
            replacement: &reduced,
        });
        pending.extend(reduced.into_terms().into_iter().rev());
    }
    SemilinearSet::new(done.into_iter().map(|(t, _)| t))
}

/// Full normalization pipeline: `from_expr`, then pruned disambiguation.
pub fn normalize(e: &Expr, dim: usize) -> SemilinearSet {
    disambiguate_pruned(&from_expr(e, dim))
}

pub fn is_empty(set: &SemilinearSet) -> bool {
    set.is_empty()
}

/// `∪_i expr(u_i) · Π_{b ∈ B_i} expr(b)*`, or `0` for the empty set.
pub fn to_expr(set: &SemilinearSet) -> Expr {
    Expr::union_of(set.terms().iter().map(LinearSet::to_expr))
}

/// Membership in one unambiguous linear set via frame coordinates.
#[derive(Debug, Clone)]
pub(crate) struct TermMatcher {
    frame: Frame,
    offset_coords: RatVector,
}

impl TermMatcher {
    pub(crate) fn new(term: &LinearSet) -> Result<Self> {
        if !term.is_unambiguous() {
            return Err(Error::Ambiguous);
        }
        let frame = Frame::new(term.base(), term.dim())?;
        let offset_coords = frame.coordinates(term.offset());
        Ok(TermMatcher {
            frame,
            offset_coords,
        })
    }

    /// Whether coordinates describe a point of `B*`: naturals on `B`,
    /// zero on `B̄`.
    fn in_lattice_cone(&self, coords: &[Rat]) -> bool {
        coords.iter().enumerate().all(|(i, c)| {
            if self.frame.is_base_direction(i) {
                c.is_integer() && *c >= Rat::from_integer(0.into())
            } else {
                *c == Rat::from_integer(0.into())
            }
        })
    }

    pub(crate) fn contains(&self, v: &ParikhVector) -> bool {
        let coords: Vec<Rat> = self
            .frame
            .coordinates(v)
            .into_iter()
            .zip(&self.offset_coords)
            .map(|(c, o)| c - o)
            .collect();
        self.in_lattice_cone(&coords)
    }

    pub(crate) fn contains_linear(&self, t: &LinearSet) -> bool {
        self.contains(t.offset())
            && t
                .base()
                .iter()
                .all(|a| self.in_lattice_cone(&self.frame.coordinates(a)))
    }
}

/// Precompiled membership test for an unambiguous semilinear set.
#[derive(Debug, Clone)]
pub struct Membership {
    matchers: Vec<TermMatcher>,
}

impl Membership {
    pub fn new(set: &SemilinearSet) -> Result<Self> {
        let matchers = set
            .terms()
            .iter()
            .map(TermMatcher::new)
            .collect::<Result<_>>()?;
        Ok(Membership { matchers })
    }

    pub fn contains(&self, v: &ParikhVector) -> bool {
        self.matchers.iter().any(|m| m.contains(v))
    }
}

/// `v ∈ ⟦set⟧` for an unambiguous set. Each term `(u, B)` accepts `v`
/// iff `v − u` has natural coordinates over `B` (its unique rational
/// solution, when one exists).
pub fn member(set: &SemilinearSet, v: &ParikhVector) -> Result<bool> {
    Ok(Membership::new(set)?.contains(v))
}

#[derive(Debug, Serialize, Deserialize)]
struct SetJson {
    alphabet: Vec<String>,
    terms: Vec<TermJson>,
}

#[derive(Debug, Serialize, Deserialize)]
struct TermJson {
    offset: BTreeMap<String, u64>,
    base: Vec<BTreeMap<String, u64>>,
}

pub(crate) fn vector_to_json(v: &ParikhVector, alphabet: &Alphabet) -> BTreeMap<String, u64> {
    v.counts()
        .iter()
        .zip(alphabet.letters())
        .filter(|(&n, _)| n > 0)
        .map(|(&n, c)| (c.to_string(), n))
        .collect()
}

fn vector_from_json(map: &BTreeMap<String, u64>, alphabet: &Alphabet) -> Result<ParikhVector> {
    let mut counts = vec![0; alphabet.len()];
    for (name, &n) in map {
        let mut chars = name.chars();
        let index = match (chars.next(), chars.next()) {
            (Some(c), None) => alphabet.index_of(c),
            _ => None,
        }
        .ok_or_else(|| Error::Json(format!("letter `{name}` is not in the alphabet")))?;
        counts[index] = n;
    }
    Ok(ParikhVector::new(counts))
}

/// `{"alphabet": [...], "terms": [{"offset": {...}, "base": [{...}]}]}`;
/// letters with count zero are omitted.
pub fn to_json(set: &SemilinearSet, alphabet: &Alphabet) -> serde_json::Value {
    let doc = SetJson {
        alphabet: alphabet.letters().iter().map(char::to_string).collect(),
        terms: set
            .terms()
            .iter()
            .map(|t| TermJson {
                offset: vector_to_json(t.offset(), alphabet),
                base: t.base().iter().map(|b| vector_to_json(b, alphabet)).collect(),
            })
            .collect(),
    };
    serde_json::to_value(doc).expect("semilinear JSON serializes")
}

/// Inverse of [`to_json`]; the result is canonicalized.
pub fn from_json(value: &serde_json::Value) -> Result<(Alphabet, SemilinearSet)> {
    let doc: SetJson =
        serde_json::from_value(value.clone()).map_err(|e| Error::Json(e.to_string()))?;
    let mut letters = Vec::new();
    for name in &doc.alphabet {
        let mut chars = name.chars();
        match (chars.next(), chars.next()) {
            (Some(c), None) => letters.push(c),
            _ => return Err(Error::Json(format!("`{name}` is not a single letter"))),
        }
    }
    let alphabet = Alphabet::new(letters)?;
    let terms = doc
        .terms
        .iter()
        .map(|t| {
            let offset = vector_from_json(&t.offset, &alphabet)?;
            let base = t
                .base
                .iter()
                .map(|b| vector_from_json(b, &alphabet))
                .collect::<Result<Vec<_>>>()?;
            Ok(LinearSet::new(offset, base))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((alphabet, SemilinearSet::new(terms)))
}
