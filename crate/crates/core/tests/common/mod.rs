// SPDX-License-Identifier: Apache-2.0

//! Seeded generators shared by the integration tests.

#![allow(dead_code)]

use std::collections::BTreeSet;

use cka::exact_arith::{is_independent, rat_solve, Frame, Rat};
use cka::expr::bounded_semantics;
use cka::{Expr, LinearSet, ParikhVector, SemilinearSet};
use num_traits::Signed;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random expression of at most `max_nodes` nodes and star depth at most
/// `max_star_depth` over `dim` letters.
pub fn expr(rng: &mut impl Rng, dim: usize, max_nodes: usize, max_star_depth: usize) -> Expr {
    let size = rng.gen_range(1..=max_nodes);
    build(rng, dim, size, max_star_depth)
}

fn leaf(rng: &mut impl Rng, dim: usize) -> Expr {
    match rng.gen_range(0..20) {
        0 => Expr::Zero,
        1 | 2 => Expr::One,
        _ => Expr::Letter(rng.gen_range(0..dim)),
    }
}

fn build(rng: &mut impl Rng, dim: usize, size: usize, stars: usize) -> Expr {
    if size <= 1 || (size == 2 && stars == 0) {
        return leaf(rng, dim);
    }
    if size == 2 || (stars > 0 && rng.gen_bool(0.3)) {
        return Expr::star(build(rng, dim, size - 1, stars - 1));
    }
    let left = rng.gen_range(1..=size - 2);
    let l = build(rng, dim, left, stars);
    let r = build(rng, dim, size - 1 - left, stars);
    if rng.gen_bool(0.5) {
        Expr::union(l, r)
    } else {
        Expr::prod(l, r)
    }
}

pub fn vector(rng: &mut impl Rng, dim: usize, max_entry: u64) -> ParikhVector {
    ParikhVector::new((0..dim).map(|_| rng.gen_range(0..=max_entry)).collect())
}

/// Random linear set with an independent base.
pub fn unambiguous_linear(rng: &mut impl Rng, dim: usize) -> LinearSet {
    loop {
        let offset = vector(rng, dim, 2);
        let n = rng.gen_range(0..=dim);
        let base: Vec<ParikhVector> = (0..n).map(|_| vector(rng, dim, 2)).collect();
        let t = LinearSet::new(offset, base);
        if is_independent(t.base()) {
            return t;
        }
    }
}

pub fn truncated(set: &SemilinearSet, dim: usize, degree: u64) -> BTreeSet<ParikhVector> {
    bounded_semantics(&set.to_expr(), dim, degree)
}

/// Coordinates of `v` in the frame, solved directly against the frame
/// vectors rather than through the frame's own inverse.
pub fn solved_coordinates(frame: &Frame, v: &ParikhVector) -> Vec<Rat> {
    let columns: Vec<Vec<Rat>> = frame.vectors().map(|b| b.to_rat()).collect();
    rat_solve(&columns, &v.to_rat())
        .expect("dimensions agree")
        .expect("frame spans the space")
}

/// No frame direction sees two base vectors of strictly opposite sign.
pub fn sign_homogeneous(t: &LinearSet, frame: &Frame) -> bool {
    let coords: Vec<Vec<Rat>> = t.base().iter().map(|a| solved_coordinates(frame, a)).collect();
    (0..frame.len()).all(|dir| {
        let pos = coords.iter().any(|c| c[dir].is_positive());
        let neg = coords.iter().any(|c| c[dir].is_negative());
        !(pos && neg)
    })
}
