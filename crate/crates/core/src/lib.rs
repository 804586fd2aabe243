// SPDX-License-Identifier: Apache-2.0

//! Equivalence and inclusion of commutative regular expressions.
//!
//! Expressions are normalized into finite unions of linear sets `u·B*`
//! whose bases are linearly independent over the rationals. Inclusion
//! `e ≤ f` is then decided by splitting the normal form of `e` against
//! each linear term of `f` in turn; whatever survives every split is a
//! set of counterexamples.
//!
//! The modules mirror that pipeline:
//!
//! - [`exact_arith`]: rationals, elimination, independence, basis extension.
//! - [`parikh`]: alphabets, Parikh vectors, points over a base.
//! - [`expr`]: the expression AST, its parser and printer, and the
//!   bounded-degree enumeration used as ground truth in tests.
//! - [`semilinear`]: linear/semilinear sets and normalization.
//! - [`decision`]: frames, homogenization, splits and the decision loop.
//! - [`cli`]: the `cka` command-line front-end.

pub mod cli;
pub mod decision;
pub mod error;
pub mod exact_arith;
pub mod expr;
pub mod parikh;
pub mod semilinear;

pub use decision::{decide_eq, decide_leq, Decomposition, Trace, Verdict};
pub use error::{Error, Result};
pub use expr::Expr;
pub use parikh::{Alphabet, ParikhVector, Point};
pub use semilinear::{LinearSet, SemilinearSet};
