// SPDX-License-Identifier: Apache-2.0

//! Splitting a semilinear set against an unambiguous linear set, and the
//! inclusion/equivalence decision built on it.
//!
//! Fix `f = v·B*` with `B` independent and complete `B` to a rational
//! basis `B ⊎ B̄` (a [`Frame`]). A vector `x` lies in `⟦f⟧` iff the
//! coordinates of `x − v` are naturals on `B` and zero on `B̄`. Every
//! split below is driven by the signs of those coordinates:
//!
//! 1. [`homogenize`] rewrites a term until no frame direction sees base
//!    vectors of both signs.
//! 2. A homogeneous term either has all its generators inside the lattice
//!    cone of `B` (after scaling) and goes to [`compatible_decompose`], or
//!    it has a generator pushing some coordinate away from the admissible
//!    range, in which case a tail of the term is provably disjoint from
//!    `⟦f⟧` and the head has smaller dimension.
//!
//! [`decide_leq`] runs [`base_split`] against each term of the normal
//! form of `f` in turn; `⟦e⟧ ⊆ ⟦f⟧` iff nothing survives.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exact_arith::{common_denominator, Frame, Rat, RatVector};
use crate::expr::{bounded_semantics, print, Expr};
use crate::parikh::{Alphabet, ParikhVector, Point};
use crate::semilinear::{
    base_vector_split, disambiguate_pruned_traced, expand_bounded_power, from_expr, member,
    remove_subsumed, to_json, LinearSet, Rewrite, SemilinearSet, TermMatcher,
};

/// A pair `(inside, outside)` with `⟦e⟧ = ⟦inside⟧ ∪ ⟦outside⟧`,
/// `⟦inside⟧ ⊆ ⟦f⟧` and `⟦outside⟧ ∩ ⟦f⟧ = ∅`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Decomposition {
    pub inside: SemilinearSet,
    pub outside: SemilinearSet,
}

impl Decomposition {
    fn inside(t: LinearSet) -> Self {
        Decomposition {
            inside: SemilinearSet::new([t]),
            outside: SemilinearSet::empty(),
        }
    }

    fn outside(t: LinearSet) -> Self {
        Decomposition {
            inside: SemilinearSet::empty(),
            outside: SemilinearSet::new([t]),
        }
    }

    fn merge(parts: impl IntoIterator<Item = Decomposition>) -> Self {
        let mut inside = Vec::new();
        let mut outside = Vec::new();
        for p in parts {
            inside.extend(p.inside.into_terms());
            outside.extend(p.outside.into_terms());
        }
        Decomposition {
            inside: SemilinearSet::new(inside),
            outside: SemilinearSet::new(outside),
        }
    }

    pub fn union(&self) -> SemilinearSet {
        self.inside.union(&self.outside)
    }
}

/// Name of the law a trace step applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rule {
    /// Expression to union of linear sets.
    Decomp,
    /// Dependent base replaced by terms of smaller dimension.
    DepInfDim,
    /// `B* = (to_vector p)* · ∪_i u_i^{<p_i} Π_{j≠i} u_j*`.
    BaseVector,
    /// `a* = a^{<n} · (n·a)*`.
    FirstIterates,
    /// `a* = a^{<n} ∪ n·a · a*`.
    NOrMore,
    /// A linear term absorbed by a larger one.
    BaseInclusion,
    DecCompatible,
    Homogeneous,
    BaseSplit,
    DecisionLoop,
}

impl Rule {
    pub fn tag(self) -> &'static str {
        match self {
            Rule::Decomp => "decomp",
            Rule::DepInfDim => "dep-inf-dim",
            Rule::BaseVector => "base-vector",
            Rule::FirstIterates => "first-iterates",
            Rule::NOrMore => "n-or-more",
            Rule::BaseInclusion => "baseInclusion",
            Rule::DecCompatible => "dec-compatible",
            Rule::Homogeneous => "homogeneous",
            Rule::BaseSplit => "baseSplit",
            Rule::DecisionLoop => "decision-loop",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Snapshot {
    Expr(Expr),
    Set(SemilinearSet),
}

impl Snapshot {
    fn to_expr(&self) -> Expr {
        match self {
            Snapshot::Expr(e) => e.clone(),
            Snapshot::Set(s) => s.to_expr(),
        }
    }

    fn to_json(&self, alphabet: &Alphabet) -> Value {
        match self {
            Snapshot::Expr(e) => Value::String(print(e, alphabet)),
            Snapshot::Set(s) => to_json(s, alphabet),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub rule: Rule,
    pub before: Snapshot,
    pub after: Snapshot,
    pub note: String,
}

/// Audit log of rewrites. Each step claims `before` and `after` denote the
/// same set; [`Trace::verify`] checks that claim at a bounded degree.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Trace {
    enabled: bool,
    steps: Vec<Step>,
}

impl Trace {
    pub fn new(enabled: bool) -> Self {
        Trace {
            enabled,
            steps: Vec::new(),
        }
    }

    pub fn is_enabled(&self) -> bool {
        self.enabled
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    fn record(&mut self, rule: Rule, before: Snapshot, after: Snapshot, note: impl Into<String>) {
        if self.enabled {
            self.steps.push(Step {
                rule,
                before,
                after,
                note: note.into(),
            });
        }
    }

    fn record_sets(
        &mut self,
        rule: Rule,
        before: impl FnOnce() -> SemilinearSet,
        after: impl FnOnce() -> SemilinearSet,
        note: impl FnOnce() -> String,
    ) {
        if self.enabled {
            let step = Step {
                rule,
                before: Snapshot::Set(before()),
                after: Snapshot::Set(after()),
                note: note(),
            };
            self.steps.push(step);
        }
    }

    fn extend(&mut self, other: Trace) {
        self.steps.extend(other.steps);
    }

    /// Index of the first step whose sides differ up to `max_degree`.
    pub fn verify(&self, dim: usize, max_degree: u64) -> std::result::Result<(), usize> {
        for (i, step) in self.steps.iter().enumerate() {
            let before = bounded_semantics(&step.before.to_expr(), dim, max_degree);
            let after = bounded_semantics(&step.after.to_expr(), dim, max_degree);
            if before != after {
                return Err(i);
            }
        }
        Ok(())
    }

    /// `{"steps": [{"rule", "before", "after", "note"}]}`.
    pub fn to_json(&self, alphabet: &Alphabet) -> Value {
        let steps: Vec<Value> = self
            .steps
            .iter()
            .map(|s| {
                json!({
                    "rule": s.rule.tag(),
                    "before": s.before.to_json(alphabet),
                    "after": s.after.to_json(alphabet),
                    "note": s.note,
                })
            })
            .collect();
        json!({ "steps": steps })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Options {
    pub trace: bool,
    /// Ceiling on nested rewrites; every recursion here has a decreasing
    /// measure, so hitting it indicates a bug rather than a hard input.
    pub max_depth: usize,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            trace: false,
            max_depth: 512,
        }
    }
}

/// Frame coordinates of each base vector.
fn base_coordinates(frame: &Frame, base: &[ParikhVector]) -> Vec<RatVector> {
    base.iter().map(|a| frame.coordinates(a)).collect()
}

fn check_depth(depth: usize, max_depth: usize) -> Result<()> {
    if depth > max_depth {
        Err(Error::DepthExceeded(max_depth))
    } else {
        Ok(())
    }
}

/// Whether no frame direction sees base vectors of strictly opposite signs.
pub fn is_homogeneous(t: &LinearSet, frame: &Frame) -> bool {
    let coords = base_coordinates(frame, t.base());
    (0..frame.len()).all(|dir| mixed_pair(&coords, dir).is_none())
}

/// First `(x, y)` in base order with `x` positive and `y` negative in
/// direction `dir`.
fn mixed_pair(coords: &[RatVector], dir: usize) -> Option<(usize, usize)> {
    let pos = coords.iter().position(|c| c[dir].is_positive())?;
    let neg = coords.iter().position(|c| c[dir].is_negative())?;
    Some((pos, neg))
}

fn to_u64(n: &BigInt) -> Result<u64> {
    n.to_u64()
        .ok_or_else(|| Error::Invariant(format!("coefficient {n} does not fit in u64")))
}

/// Rewrites `t` into a union of terms that are homogeneous w.r.t. `frame`.
///
/// Directions are processed in frame order. While direction `b` sees some
/// `x` with positive and `y` with negative coordinate, pick the smallest
/// `n, m > 0` with `n·x_b + m·y_b = 0` and rewrite `A*` by the base-vector
/// law at the point `{x ↦ n, y ↦ m}`. Each resulting base trades `x` (or
/// `y`) for `n·x + m·y`, whose `b`-coordinate is zero, so the number of
/// base vectors with nonzero `b`-coordinate drops by one, and earlier
/// directions stay homogeneous.
pub fn homogenize(t: &LinearSet, frame: &Frame) -> Vec<LinearSet> {
    let mut out = Vec::new();
    let mut trace = Trace::new(false);
    homogenize_in(t, frame, 0, 0, Options::default().max_depth, &mut trace, &mut out)
        .expect("homogenization terminates");
    SemilinearSet::new(out).into_terms()
}

fn homogenize_in(
    t: &LinearSet,
    frame: &Frame,
    first_dir: usize,
    depth: usize,
    max_depth: usize,
    trace: &mut Trace,
    out: &mut Vec<LinearSet>,
) -> Result<()> {
    check_depth(depth, max_depth)?;
    let coords = base_coordinates(frame, t.base());
    for dir in first_dir..frame.len() {
        let Some((x, y)) = mixed_pair(&coords, dir) else {
            continue;
        };
        // -y_b / x_b = n / m in lowest terms.
        let ratio = -&coords[y][dir] / &coords[x][dir];
        let n = to_u64(ratio.numer())?;
        let m = to_u64(ratio.denom())?;
        let mut point = vec![0; t.dimension()];
        point[x] = n;
        point[y] = m;
        let point = Point::new(t.dim(), t.base().to_vec(), point)?;
        let split = base_vector_split(&point)?.shifted(t.offset());
        trace.record_sets(
            Rule::BaseVector,
            || SemilinearSet::new([t.clone()]),
            || split.clone(),
            || format!("direction {dir}: {n}·x + {m}·y has zero coordinate"),
        );
        for s in split.terms() {
            homogenize_in(s, frame, dir, depth + 1, max_depth, trace, out)?;
        }
        return Ok(());
    }
    out.push(t.clone());
    Ok(())
}

/// State shared by the recursive splitting routines for one target `f`.
struct Splitter<'a> {
    frame: Frame,
    target_coords: RatVector,
    max_depth: usize,
    trace: &'a mut Trace,
    /// `(term, direction)` for every tail sent outside by a sign argument.
    separations: Vec<(LinearSet, usize)>,
}

impl<'a> Splitter<'a> {
    fn new(target: &'a LinearSet, max_depth: usize, trace: &'a mut Trace) -> Result<Self> {
        if !target.is_unambiguous() {
            return Err(Error::Ambiguous);
        }
        let frame = Frame::new(target.base(), target.dim())?;
        let target_coords = frame.coordinates(target.offset());
        Ok(Splitter {
            frame,
            target_coords,
            max_depth,
            trace,
            separations: Vec::new(),
        })
    }

    /// Coordinates of `u − v`, `v` the target offset.
    fn relative(&self, u: &ParikhVector) -> RatVector {
        self.frame
            .coordinates(u)
            .into_iter()
            .zip(&self.target_coords)
            .map(|(c, o)| c - o)
            .collect()
    }

    fn in_base_cone(&self, coords: &[Rat]) -> bool {
        coords.iter().enumerate().all(|(i, c)| {
            if self.frame.is_base_direction(i) {
                c.is_integer() && !c.is_negative()
            } else {
                c.is_zero()
            }
        })
    }

    fn contains_linear(&self, t: &LinearSet) -> bool {
        self.in_base_cone(&self.relative(t.offset()))
            && t
                .base()
                .iter()
                .all(|a| self.in_base_cone(&self.frame.coordinates(a)))
    }

    fn split_set(&mut self, e: &SemilinearSet) -> Result<Decomposition> {
        let mut parts = Vec::new();
        for t in e.terms() {
            parts.push(self.split_term(t)?);
        }
        Ok(Decomposition::merge(parts))
    }

    fn split_term(&mut self, t: &LinearSet) -> Result<Decomposition> {
        if self.contains_linear(t) {
            return Ok(Decomposition::inside(t.clone()));
        }
        let mut homogeneous = Vec::new();
        homogenize_in(
            t,
            &self.frame,
            0,
            0,
            self.max_depth,
            self.trace,
            &mut homogeneous,
        )?;
        let homogeneous = SemilinearSet::new(homogeneous);
        if homogeneous.terms() != std::slice::from_ref(t) {
            self.trace.record_sets(
                Rule::Homogeneous,
                || SemilinearSet::new([t.clone()]),
                || homogeneous.clone(),
                || format!("{} homogeneous terms", homogeneous.len()),
            );
        }
        let mut parts = Vec::new();
        for h in homogeneous.terms() {
            parts.push(self.split_homogeneous(h, 0)?);
        }
        Ok(collapse(t, Decomposition::merge(parts)))
    }

    fn split_homogeneous(&mut self, h: &LinearSet, depth: usize) -> Result<Decomposition> {
        check_depth(depth, self.max_depth)?;
        let coords = base_coordinates(&self.frame, h.base());

        // Some generator pushes a coordinate out of the admissible range.
        let escape = coords.iter().enumerate().find_map(|(i, c)| {
            (0..self.frame.len())
                .find(|&dir| {
                    if self.frame.is_base_direction(dir) {
                        c[dir].is_negative()
                    } else {
                        !c[dir].is_zero()
                    }
                })
                .map(|dir| (i, dir))
        });

        let Some((d, dir)) = escape else {
            return self.split_cone(h, &coords, depth);
        };

        let offset_coord = &self.relative(h.offset())[dir];
        let step = coords[d][dir].abs();
        let threshold = (offset_coord.abs() / &step).ceil().to_integer() + BigInt::one();
        let threshold = to_u64(&threshold)?.max(1);

        let generator = &h.base()[d];
        let rest: Vec<ParikhVector> = h
            .base()
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != d)
            .map(|(_, b)| b.clone())
            .collect();
        let head = expand_bounded_power(h.offset(), generator, threshold, &rest);
        let tail = LinearSet::new(h.offset() + &generator.scale(threshold), h.base().to_vec());
        self.trace.record_sets(
            Rule::NOrMore,
            || SemilinearSet::new([h.clone()]),
            || head.union(&SemilinearSet::new([tail.clone()])),
            || format!("direction {dir}, threshold {threshold}; tail is disjoint"),
        );
        self.separations.push((tail.clone(), dir));

        let mut parts = vec![Decomposition::outside(tail)];
        for t in head.terms() {
            parts.push(self.split_homogeneous(t, depth + 1)?);
        }
        Ok(collapse(h, Decomposition::merge(parts)))
    }

    /// All generators have non-negative `B`-coordinates and zero
    /// `B̄`-coordinates: scale each `a` by the lcm `n_a` of its coordinate
    /// denominators so it lands in `B*`, then decompose compatibly.
    fn split_cone(
        &mut self,
        h: &LinearSet,
        coords: &[RatVector],
        depth: usize,
    ) -> Result<Decomposition> {
        let scales: Vec<u64> = coords
            .iter()
            .map(|c| to_u64(&common_denominator(c)))
            .collect::<Result<_>>()?;
        let scaled_base: Vec<ParikhVector> = h
            .base()
            .iter()
            .zip(&scales)
            .map(|(a, &n)| a.scale(n))
            .collect();

        let mut offsets = SemilinearSet::new([LinearSet::singleton(h.offset().clone())]);
        for (a, &n) in h.base().iter().zip(&scales) {
            offsets = offsets.product(&expand_bounded_power(
                &ParikhVector::zero(h.dim()),
                a,
                n,
                &[],
            ));
        }
        let compatible: SemilinearSet = offsets
            .terms()
            .iter()
            .map(|o| LinearSet::new(o.offset().clone(), scaled_base.iter().cloned()))
            .collect();
        if scales.iter().any(|&n| n > 1) {
            self.trace.record_sets(
                Rule::FirstIterates,
                || SemilinearSet::new([h.clone()]),
                || compatible.clone(),
                || format!("generator scales {scales:?}"),
            );
        }

        let mut parts = Vec::new();
        for t in compatible.terms() {
            parts.push(self.compatible(t, depth + 1)?);
        }
        Ok(collapse(h, Decomposition::merge(parts)))
    }

    fn compatible(&mut self, t: &LinearSet, depth: usize) -> Result<Decomposition> {
        let d = self.compatible_in(t, depth)?;
        self.trace.record_sets(
            Rule::DecCompatible,
            || SemilinearSet::new([t.clone()]),
            || d.union(),
            || format!("{} inside, {} outside", d.inside.len(), d.outside.len()),
        );
        Ok(d)
    }

    fn compatible_in(&mut self, t: &LinearSet, depth: usize) -> Result<Decomposition> {
        check_depth(depth, self.max_depth)?;
        let gen_coords = base_coordinates(&self.frame, t.base());
        if !gen_coords.iter().all(|c| self.in_base_cone(c)) {
            return Err(Error::Incompatible);
        }
        let rel = self.relative(t.offset());
        let off_lattice = rel.iter().enumerate().any(|(i, c)| {
            if self.frame.is_base_direction(i) {
                !c.is_integer()
            } else {
                !c.is_zero()
            }
        });
        if off_lattice {
            return Ok(Decomposition::outside(t.clone()));
        }

        // Generators only add natural amounts on B, so the intersection is
        // nonempty iff every negative direction has a generator raising it.
        // Each negative direction is charged to its first such generator,
        // which gets enough copies to lift it to zero.
        let mut alpha = vec![0u64; t.dimension()];
        for (dir, c) in rel.iter().enumerate().take(self.frame.base().len()) {
            if !c.is_negative() {
                continue;
            }
            let Some(a) = gen_coords.iter().position(|g| g[dir].is_positive()) else {
                return Ok(Decomposition::outside(t.clone()));
            };
            let need = (-c / &gen_coords[a][dir]).ceil().to_integer();
            alpha[a] = alpha[a].max(to_u64(&need)?);
        }

        let witness = alpha
            .iter()
            .zip(t.base())
            .fold(t.offset().clone(), |acc, (&k, a)| &acc + &a.scale(k));
        let mut parts = vec![Decomposition::inside(LinearSet::new(
            witness,
            t.base().to_vec(),
        ))];
        if alpha.iter().all(|&k| k == 0) {
            return Ok(Decomposition::merge(parts));
        }

        // a* = a^{<α_a} ∪ α_a·a·a* for each generator; the all-tails
        // choice is the witness term above, every other choice drops at
        // least one generator and recurses.
        let active: Vec<usize> = (0..t.dimension()).filter(|&i| alpha[i] > 0).collect();
        for mask in 0..(1u64 << active.len()) - 1 {
            let mut offsets = SemilinearSet::new([LinearSet::singleton(t.offset().clone())]);
            let mut kept = Vec::new();
            for (i, a) in t.base().iter().enumerate() {
                match active.iter().position(|&j| j == i) {
                    Some(bit) if mask & (1 << bit) == 0 => {
                        offsets = offsets.product(&expand_bounded_power(
                            &ParikhVector::zero(t.dim()),
                            a,
                            alpha[i],
                            &[],
                        ));
                    }
                    _ => {
                        offsets = offsets.shifted(&a.scale(alpha[i]));
                        kept.push(a.clone());
                    }
                }
            }
            for o in offsets.terms() {
                let sub = LinearSet::new(o.offset().clone(), kept.iter().cloned());
                parts.push(self.compatible_in(&sub, depth + 1)?);
            }
        }
        Ok(Decomposition::merge(parts))
    }
}

/// A split that put nothing inside is replaced by the unsplit term, which
/// is then disjoint from the target as a whole.
fn collapse(t: &LinearSet, d: Decomposition) -> Decomposition {
    if d.inside.is_empty() {
        Decomposition::outside(t.clone())
    } else {
        d
    }
}

/// Decomposes a term whose generators all lie in `f.base*`.
pub fn compatible_decompose(t: &LinearSet, f: &LinearSet, frame: &Frame) -> Result<Decomposition> {
    if frame.base() != f.base() {
        return Err(Error::Invariant("frame was not built from f".to_string()));
    }
    let mut trace = Trace::new(false);
    let mut splitter = Splitter::new(f, Options::default().max_depth, &mut trace)?;
    splitter.compatible_in(t, 0)
}

/// Splits `e` into the part inside `⟦f⟧` and the part outside it.
pub fn base_split(e: &SemilinearSet, f: &LinearSet) -> Result<Decomposition> {
    let mut trace = Trace::new(false);
    base_split_traced(e, f, &Options::default(), &mut trace)
}

pub fn base_split_traced(
    e: &SemilinearSet,
    f: &LinearSet,
    options: &Options,
    trace: &mut Trace,
) -> Result<Decomposition> {
    let mut splitter = Splitter::new(f, options.max_depth, trace)?;
    splitter.split_set(e)
}

/// Outside terms produced by sign separation, with the separating
/// direction, for `e` split against `f`.
pub fn separations(e: &SemilinearSet, f: &LinearSet) -> Result<(Frame, Vec<(LinearSet, usize)>)> {
    let mut trace = Trace::new(false);
    let mut splitter = Splitter::new(f, Options::default().max_depth, &mut trace)?;
    splitter.split_set(e)?;
    Ok((splitter.frame.clone(), splitter.separations))
}

/// Result of an inclusion or equivalence check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub holds: bool,
    /// A vector in the left side but not the right, when `holds` is false.
    pub counterexample: Option<ParikhVector>,
    pub trace: Trace,
}

/// Union of unambiguous linear sets denoting `⟦e⟧`, recording each stage.
pub fn normalize_traced(e: &Expr, dim: usize, trace: &mut Trace) -> SemilinearSet {
    let linear = from_expr(e, dim);
    trace.record(
        Rule::Decomp,
        Snapshot::Expr(e.clone()),
        Snapshot::Set(linear.clone()),
        format!("{} linear terms", linear.len()),
    );
    let unambiguous = disambiguate_pruned_traced(&linear, |step| match step {
        Rewrite::Reduced { term, replacement } => trace.record_sets(
            Rule::DepInfDim,
            || SemilinearSet::new([term.clone()]),
            || replacement.clone(),
            || format!("dimension {} to {}", term.dimension(), replacement.dimension()),
        ),
        Rewrite::Simplified { term, simplified } => trace.record_sets(
            Rule::BaseInclusion,
            || SemilinearSet::new([term.clone()]),
            || SemilinearSet::new([simplified.clone()]),
            || "redundant generators dropped".to_string(),
        ),
        Rewrite::Subsumed { term, by } => trace.record_sets(
            Rule::BaseInclusion,
            || SemilinearSet::new([term.clone(), by.clone()]),
            || SemilinearSet::new([by.clone()]),
            || "pending term already covered".to_string(),
        ),
    });
    let pruned = remove_subsumed(&unambiguous);
    if pruned != unambiguous {
        trace.record_sets(
            Rule::BaseInclusion,
            || unambiguous.clone(),
            || pruned.clone(),
            || format!("{} subsumed terms dropped", unambiguous.len() - pruned.len()),
        );
    }
    pruned
}

/// Decides `⟦e⟧ ⊆ ⟦f⟧` over an alphabet of size `dim`.
///
/// With `f` normalized to `f_1 ∪ … ∪ f_n` and `g_0` the normal form of
/// `e`, each `g_{i+1}` is the outside part of `g_i` split against
/// `f_{i+1}`. Inclusion holds iff `g_n` is empty; otherwise the offset of
/// its first term is a counterexample.
pub fn decide_leq(e: &Expr, f: &Expr, dim: usize, options: &Options) -> Result<Verdict> {
    check_letters(e, dim)?;
    check_letters(f, dim)?;
    let mut trace = Trace::new(options.trace);
    let norm_f = normalize_traced(f, dim, &mut trace);
    let norm_e = normalize_traced(e, dim, &mut trace);

    let matchers: Vec<TermMatcher> = norm_f
        .terms()
        .iter()
        .map(TermMatcher::new)
        .collect::<Result<_>>()?;
    let mut remaining = norm_e.clone();
    let mut covered = Vec::new();
    for target in norm_f.terms() {
        // Terms inside any single f_j are covered; splitting them would
        // only fragment them further.
        let (whole, rest): (Vec<LinearSet>, Vec<LinearSet>) = remaining
            .terms()
            .iter()
            .cloned()
            .partition(|t| matchers.iter().any(|m| m.contains_linear(t)));
        covered.extend(whole);
        remaining = SemilinearSet::new(rest);
        if remaining.is_empty() {
            break;
        }
        let split = base_split_traced(&remaining, target, options, &mut trace)?;
        trace.record_sets(
            Rule::BaseSplit,
            || remaining.clone(),
            || split.union(),
            || {
                format!(
                    "against {}: {} inside, {} outside",
                    target.offset(),
                    split.inside.len(),
                    split.outside.len()
                )
            },
        );
        covered.extend(split.inside.into_terms());
        remaining = remove_subsumed(&split.outside);
    }
    trace.record_sets(
        Rule::DecisionLoop,
        || norm_e.clone(),
        || SemilinearSet::new(covered.iter().cloned()).union(&remaining),
        || format!("{} terms left outside", remaining.len()),
    );

    let counterexample = remaining.terms().first().map(|t| t.offset().clone());
    if let Some(v) = &counterexample {
        let in_e = member(&norm_e, v)?;
        let in_f = member(&norm_f, v)?;
        if !in_e || in_f {
            return Err(Error::Invariant(format!(
                "counterexample {v} failed re-verification (in e: {in_e}, in f: {in_f})"
            )));
        }
    }
    Ok(Verdict {
        holds: counterexample.is_none(),
        counterexample,
        trace,
    })
}

/// Decides `⟦e⟧ = ⟦f⟧` as inclusion both ways.
pub fn decide_eq(e: &Expr, f: &Expr, dim: usize, options: &Options) -> Result<Verdict> {
    let mut forward = decide_leq(e, f, dim, options)?;
    if !forward.holds {
        return Ok(forward);
    }
    let backward = decide_leq(f, e, dim, options)?;
    forward.trace.extend(backward.trace);
    Ok(Verdict {
        holds: backward.holds,
        counterexample: backward.counterexample,
        trace: forward.trace,
    })
}

fn check_letters(e: &Expr, dim: usize) -> Result<()> {
    match e.max_letter() {
        Some(i) if i >= dim => Err(Error::DimensionMismatch {
            expected: dim,
            found: i + 1,
        }),
        _ => Ok(()),
    }
}

/// Members of `⟦set⟧` among all vectors of degree at most `max_degree`,
/// found by testing each with [`member`].
pub fn member_enumeration(
    set: &SemilinearSet,
    dim: usize,
    max_degree: u64,
) -> Result<BTreeSet<ParikhVector>> {
    let matcher = crate::semilinear::Membership::new(set)?;
    Ok(all_vectors(dim, max_degree)
        .into_iter()
        .filter(|v| matcher.contains(v))
        .collect())
}

/// Every vector of total degree at most `max_degree`.
pub fn all_vectors(dim: usize, max_degree: u64) -> Vec<ParikhVector> {
    fn go(dim: usize, budget: u64, prefix: &mut Vec<u64>, out: &mut Vec<ParikhVector>) {
        if prefix.len() == dim {
            out.push(ParikhVector::new(prefix.clone()));
            return;
        }
        for n in 0..=budget {
            prefix.push(n);
            go(dim, budget - n, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(dim, max_degree, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::semilinear::normalize;

    fn v(counts: &[u64]) -> ParikhVector {
        ParikhVector::new(counts.to_vec())
    }

    fn lin(offset: &[u64], base: &[&[u64]]) -> LinearSet {
        LinearSet::new(v(offset), base.iter().map(|b| v(b)))
    }

    fn ab() -> Alphabet {
        Alphabet::new(['a', 'b']).unwrap()
    }

    fn sem(set: &SemilinearSet, d: u64) -> BTreeSet<ParikhVector> {
        bounded_semantics(&set.to_expr(), 2, d)
    }

    fn check_decomposition(e: &SemilinearSet, f: &LinearSet, d: &Decomposition, degree: u64) {
        let fs = sem(&SemilinearSet::new([f.clone()]), degree);
        let inside = sem(&d.inside, degree);
        let outside = sem(&d.outside, degree);
        assert_eq!(&inside | &outside, sem(e, degree), "union");
        assert!(inside.is_subset(&fs), "inside ⊆ f");
        assert!(outside.is_disjoint(&fs), "outside ∩ f = ∅");
    }

    #[test]
    fn homogenize_examples() {
        let frame = Frame::new(&[v(&[1, 1])], 2).unwrap();
        assert_eq!(frame.extension(), &[v(&[1, 0])]);
        let t = lin(&[0, 0], &[&[1, 0], &[0, 1]]);
        let hs = homogenize(&t, &frame);
        assert_eq!(
            SemilinearSet::new(hs.clone()),
            SemilinearSet::new([
                lin(&[0, 0], &[&[1, 1], &[0, 1]]),
                lin(&[0, 0], &[&[1, 1], &[1, 0]]),
            ])
        );
        assert!(hs.iter().all(|h| is_homogeneous(h, &frame)));
        assert_eq!(sem(&SemilinearSet::new(hs), 5), sem(&SemilinearSet::new([t]), 5));

        let already = lin(&[1, 0], &[&[1, 1]]);
        assert_eq!(homogenize(&already, &frame), vec![already]);
        let point = lin(&[0, 0], &[]);
        assert_eq!(homogenize(&point, &frame), vec![point]);
    }

    #[test]
    fn compatible_examples() {
        let f = lin(&[1, 1], &[&[1, 1]]);
        let frame = Frame::new(f.base(), 2).unwrap();
        let t = lin(&[0, 0], &[&[2, 2]]);
        let d = compatible_decompose(&t, &f, &frame).unwrap();
        assert_eq!(d.inside, SemilinearSet::new([lin(&[2, 2], &[&[2, 2]])]));
        assert_eq!(d.outside, SemilinearSet::new([lin(&[0, 0], &[])]));
        check_decomposition(&SemilinearSet::new([t]), &f, &d, 8);

        let f = lin(&[0, 1], &[&[1, 1]]);
        let frame = Frame::new(f.base(), 2).unwrap();
        let t = lin(&[1, 0], &[&[1, 1]]);
        let d = compatible_decompose(&t, &f, &frame).unwrap();
        assert!(d.inside.is_empty());
        assert_eq!(d.outside, SemilinearSet::new([t.clone()]));
        check_decomposition(&SemilinearSet::new([t]), &f, &d, 8);

        let f = lin(&[0, 0], &[&[1, 1]]);
        let frame = Frame::new(f.base(), 2).unwrap();
        let t = lin(&[0, 0], &[]);
        let d = compatible_decompose(&t, &f, &frame).unwrap();
        assert_eq!(d.inside, SemilinearSet::new([t]));
        assert!(d.outside.is_empty());

        let t = lin(&[0, 0], &[&[1, 0]]);
        assert_eq!(
            compatible_decompose(&t, &f, &frame),
            Err(Error::Incompatible)
        );
    }

    #[test]
    fn base_split_examples() {
        let sigma = ab();
        let e = from_expr(&parse("(a+b)*", &sigma).unwrap(), 2);
        let f = lin(&[0, 0], &[&[1, 1]]);
        let d = base_split(&e, &f).unwrap();
        check_decomposition(&e, &f, &d, 6);
        let diagonal: BTreeSet<_> = sem(&e, 6).into_iter().filter(|x| x.counts()[0] == x.counts()[1]).collect();
        assert_eq!(sem(&d.inside, 6), diagonal);

        let empty = base_split(&SemilinearSet::empty(), &f).unwrap();
        assert_eq!(empty, Decomposition::default());

        let itself = SemilinearSet::new([f.clone()]);
        let d = base_split(&itself, &f).unwrap();
        assert!(d.outside.is_empty());
        assert_eq!(sem(&d.inside, 6), sem(&itself, 6));

        let ambiguous = lin(&[0, 0], &[&[1, 0], &[2, 0]]);
        assert_eq!(base_split(&itself, &ambiguous), Err(Error::Ambiguous));
    }

    #[test]
    fn separated_tails_are_out_of_range() {
        let sigma = ab();
        let cases = [("(a+b)*", lin(&[0, 0], &[&[1, 1]])), ("a* b", lin(&[2, 1], &[&[1, 0]])), ("(a a b)* b*", lin(&[0, 0], &[&[1, 2]]))];
        for (text, f) in cases {
            let e = normalize(&parse(text, &sigma).unwrap(), 2);
            let (frame, seps) = separations(&e, &f).unwrap();
            let v_coords = frame.coordinates(f.offset());
            for (tail, dir) in seps {
                let c = &frame.coordinates(tail.offset())[dir] - &v_coords[dir];
                let signs: Vec<Rat> = tail.base().iter().map(|a| frame.coordinates(a)[dir].clone()).collect();
                if frame.is_base_direction(dir) {
                    assert!(c.is_negative());
                    assert!(signs.iter().all(|s| !s.is_positive()));
                } else if c.is_positive() {
                    assert!(signs.iter().all(|s| !s.is_negative()));
                } else {
                    assert!(c.is_negative());
                    assert!(signs.iter().all(|s| !s.is_positive()));
                }
            }
        }
    }

    fn decide(e: &str, f: &str) -> Verdict {
        let sigma = ab();
        let e = parse(e, &sigma).unwrap();
        let f = parse(f, &sigma).unwrap();
        let options = Options { trace: true, ..Options::default() };
        decide_leq(&e, &f, 2, &options).unwrap()
    }

    #[test]
    fn decide_leq_examples() {
        let r = decide("(ab)*", "a* b*");
        assert!(r.holds);
        assert_eq!(r.trace.verify(2, 6), Ok(()));

        let r = decide("a* b*", "(ab)*");
        assert!(!r.holds);
        let cex = r.counterexample.unwrap();
        assert!(cex.counts()[0] != cex.counts()[1]);

        assert!(decide("0", "a").holds);
        assert!(decide("0", "0").holds);
        assert!(!decide("1", "0").holds);
    }

    #[test]
    fn decide_eq_examples() {
        let sigma = ab();
        let options = Options::default();
        let eq = |e: &str, f: &str| {
            decide_eq(&parse(e, &sigma).unwrap(), &parse(f, &sigma).unwrap(), 2, &options).unwrap()
        };
        assert!(eq("(a+b)*", "a* b*").holds);
        assert!(eq("a*", "(1+a)(a a)*").holds);
        let r = eq("a", "b");
        assert!(!r.holds);
        assert_eq!(r.counterexample, Some(v(&[1, 0])));
    }

    #[test]
    fn letters_outside_alphabet_are_rejected() {
        let r = decide_leq(&Expr::Letter(2), &Expr::One, 2, &Options::default());
        assert!(matches!(r, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn depth_guard_trips() {
        let sigma = ab();
        let e = parse("(a+b)*", &sigma).unwrap();
        let f = parse("(a b)* (a a)*", &sigma).unwrap();
        let tight = Options { trace: false, max_depth: 0 };
        assert_eq!(decide_leq(&e, &f, 2, &tight), Err(Error::DepthExceeded(0)));
    }

    #[test]
    fn all_vectors_counts() {
        assert_eq!(all_vectors(2, 2).len(), 6);
        assert_eq!(all_vectors(3, 6).len(), 84);
        assert_eq!(all_vectors(0, 3), vec![ParikhVector::new(vec![])]);
    }
}
