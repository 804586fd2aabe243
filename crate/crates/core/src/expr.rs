// SPDX-License-Identifier: Apache-2.0

//! Commutative regular expressions.
//!
//! Concrete syntax, loosest to tightest:
//!
//! ```text
//! expr   := term ('+' term)*
//! term   := factor ('.'? factor)*
//! factor := atom ('*' | '^' nat)*
//! atom   := '0' | '1' | letter | '(' expr ')'
//! ```
//!
//! `e^n` is sugar for the n-fold product (`e^0` is `1`). Products print
//! with a single space between factors, unions with a bare `+`.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::parikh::{is_letter, parse_nat, Alphabet, ParikhVector};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Expr {
    Zero,
    One,
    /// Index into the session alphabet.
    Letter(usize),
    /// Commutative product: Minkowski sum of the two languages.
    Prod(Box<Expr>, Box<Expr>),
    Union(Box<Expr>, Box<Expr>),
    Star(Box<Expr>),
}

impl Expr {
    pub fn prod(a: Expr, b: Expr) -> Expr {
        Expr::Prod(Box::new(a), Box::new(b))
    }

    pub fn union(a: Expr, b: Expr) -> Expr {
        Expr::Union(Box::new(a), Box::new(b))
    }

    pub fn star(a: Expr) -> Expr {
        Expr::Star(Box::new(a))
    }

    /// Left-nested product of `n` copies; `One` for `n = 0`.
    pub fn power(e: &Expr, n: u64) -> Expr {
        (1..n).fold(
            if n == 0 { Expr::One } else { e.clone() },
            |acc, _| Expr::prod(acc, e.clone()),
        )
    }

    /// Left-nested product of `factors`; `One` when empty.
    pub fn product_of(factors: impl IntoIterator<Item = Expr>) -> Expr {
        factors
            .into_iter()
            .reduce(Expr::prod)
            .unwrap_or(Expr::One)
    }

    /// Left-nested union of `branches`; `Zero` when empty.
    pub fn union_of(branches: impl IntoIterator<Item = Expr>) -> Expr {
        branches
            .into_iter()
            .reduce(Expr::union)
            .unwrap_or(Expr::Zero)
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        match self {
            Expr::Zero | Expr::One | Expr::Letter(_) => 1,
            Expr::Prod(a, b) | Expr::Union(a, b) => 1 + a.size() + b.size(),
            Expr::Star(a) => 1 + a.size(),
        }
    }

    pub fn star_depth(&self) -> usize {
        match self {
            Expr::Zero | Expr::One | Expr::Letter(_) => 0,
            Expr::Prod(a, b) | Expr::Union(a, b) => a.star_depth().max(b.star_depth()),
            Expr::Star(a) => 1 + a.star_depth(),
        }
    }

    pub fn is_star_free(&self) -> bool {
        self.star_depth() == 0
    }

    /// Largest letter index used, if any.
    pub fn max_letter(&self) -> Option<usize> {
        match self {
            Expr::Zero | Expr::One => None,
            Expr::Letter(i) => Some(*i),
            Expr::Prod(a, b) | Expr::Union(a, b) => a.max_letter().max(b.max_letter()),
            Expr::Star(a) => a.max_letter(),
        }
    }

    pub fn display<'a>(&'a self, alphabet: &'a Alphabet) -> Display<'a> {
        Display {
            expr: self,
            alphabet,
        }
    }
}

/// Renders an [`Expr`] with letter names from an alphabet.
pub struct Display<'a> {
    expr: &'a Expr,
    alphabet: &'a Alphabet,
}

const PREC_UNION: u8 = 0;
const PREC_PROD: u8 = 1;
const PREC_ATOM: u8 = 2;

impl Display<'_> {
    fn write(&self, f: &mut fmt::Formatter<'_>, e: &Expr, min_prec: u8) -> fmt::Result {
        let prec = match e {
            Expr::Union(..) => PREC_UNION,
            Expr::Prod(..) => PREC_PROD,
            _ => PREC_ATOM,
        };
        let parens = prec < min_prec;
        if parens {
            write!(f, "(")?;
        }
        match e {
            Expr::Zero => write!(f, "0")?,
            Expr::One => write!(f, "1")?,
            Expr::Letter(i) => write!(f, "{}", self.alphabet.letter(*i))?,
            Expr::Union(a, b) => {
                self.write(f, a, PREC_UNION)?;
                write!(f, "+")?;
                self.write(f, b, PREC_PROD)?;
            }
            Expr::Prod(a, b) => {
                self.write(f, a, PREC_PROD)?;
                write!(f, " ")?;
                self.write(f, b, PREC_ATOM)?;
            }
            Expr::Star(a) => {
                self.write(f, a, PREC_ATOM)?;
                write!(f, "*")?;
            }
        }
        if parens {
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Display<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, self.expr, PREC_UNION)
    }
}

pub fn print(e: &Expr, alphabet: &Alphabet) -> String {
    e.display(alphabet).to_string()
}

pub fn parse(text: &str, alphabet: &Alphabet) -> Result<Expr> {
    let mut parser = Parser {
        chars: text.chars().collect(),
        pos: 0,
        alphabet,
    };
    let e = parser.expr()?;
    parser.skip_ws();
    if let Some(c) = parser.peek() {
        return Err(parser.error(format!("unexpected `{c}`")));
    }
    Ok(e)
}

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    alphabet: &'a Alphabet,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.chars.get(self.pos).is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn error(&self, msg: String) -> Error {
        Error::Syntax { pos: self.pos, msg }
    }

    fn starts_factor(c: char) -> bool {
        c == '0' || c == '1' || c == '(' || is_letter(c)
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut e = self.term()?;
        while self.peek() == Some('+') {
            self.pos += 1;
            e = Expr::union(e, self.term()?);
        }
        Ok(e)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut e = self.factor()?;
        loop {
            match self.peek() {
                Some('.') => {
                    self.pos += 1;
                    e = Expr::prod(e, self.factor()?);
                }
                Some(c) if Self::starts_factor(c) => e = Expr::prod(e, self.factor()?),
                _ => return Ok(e),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        let mut e = self.atom()?;
        loop {
            match self.peek() {
                Some('*') => {
                    self.pos += 1;
                    e = Expr::star(e);
                }
                Some('^') => {
                    self.pos += 1;
                    self.skip_ws();
                    let (n, next) = parse_nat(&self.chars, self.pos)?;
                    self.pos = next;
                    e = Expr::power(&e, n);
                }
                _ => return Ok(e),
            }
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek() {
            None => Err(self.error("unexpected end of input".to_string())),
            Some('0') => {
                self.pos += 1;
                Ok(Expr::Zero)
            }
            Some('1') => {
                self.pos += 1;
                Ok(Expr::One)
            }
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(')') {
                    return Err(self.error("expected `)`".to_string()));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if is_letter(c) => {
                let index = self.alphabet.index_of(c).ok_or(Error::UnknownLetter {
                    letter: c,
                    pos: self.pos,
                })?;
                self.pos += 1;
                Ok(Expr::Letter(index))
            }
            Some(c) => Err(self.error(format!("unexpected `{c}`"))),
        }
    }
}

/// An expression denoting exactly `{v}`: each letter repeated by its
/// count, letters in alphabet order.
pub fn expr_of_vector(v: &ParikhVector) -> Expr {
    Expr::product_of(
        v.counts()
            .iter()
            .enumerate()
            .flat_map(|(letter, &n)| (0..n).map(move |_| Expr::Letter(letter))),
    )
}

/// All vectors of `⟦e⟧` with total degree at most `max_degree`, by
/// direct enumeration. This is the ground truth the rest of the crate is
/// tested against, so it deliberately shares no code with normalization.
pub fn bounded_semantics(e: &Expr, dim: usize, max_degree: u64) -> BTreeSet<ParikhVector> {
    match e {
        Expr::Zero => BTreeSet::new(),
        Expr::One => BTreeSet::from([ParikhVector::zero(dim)]),
        Expr::Letter(a) => {
            if max_degree >= 1 {
                BTreeSet::from([ParikhVector::unit(dim, *a)])
            } else {
                BTreeSet::new()
            }
        }
        Expr::Union(..) => {
            // Walk the left spine iteratively; unions of many terms are deep.
            let mut s = BTreeSet::new();
            let mut node = e;
            while let Expr::Union(l, r) = node {
                s.extend(bounded_semantics(r, dim, max_degree));
                node = l;
            }
            s.extend(bounded_semantics(node, dim, max_degree));
            s
        }
        Expr::Prod(l, r) => {
            let left = bounded_semantics(l, dim, max_degree);
            let right = bounded_semantics(r, dim, max_degree);
            minkowski_bounded(&left, &right, max_degree)
        }
        Expr::Star(inner) => {
            let generators: Vec<ParikhVector> = bounded_semantics(inner, dim, max_degree)
                .into_iter()
                .filter(|v| !v.is_zero())
                .collect();
            let mut closure = BTreeSet::from([ParikhVector::zero(dim)]);
            let mut frontier: Vec<ParikhVector> = closure.iter().cloned().collect();
            while let Some(v) = frontier.pop() {
                for g in &generators {
                    if v.degree() + g.degree() <= max_degree {
                        let w = &v + g;
                        if closure.insert(w.clone()) {
                            frontier.push(w);
                        }
                    }
                }
            }
            closure
        }
    }
}

fn minkowski_bounded(
    left: &BTreeSet<ParikhVector>,
    right: &BTreeSet<ParikhVector>,
    max_degree: u64,
) -> BTreeSet<ParikhVector> {
    let mut out = BTreeSet::new();
    for u in left {
        for v in right {
            if u.degree() + v.degree() <= max_degree {
                out.insert(u + v);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ab() -> Alphabet {
        Alphabet::new(['a', 'b']).unwrap()
    }

    fn a() -> Expr {
        Expr::Letter(0)
    }

    fn b() -> Expr {
        Expr::Letter(1)
    }

    fn v(counts: &[u64]) -> ParikhVector {
        ParikhVector::new(counts.to_vec())
    }

    fn set(vs: &[&[u64]]) -> BTreeSet<ParikhVector> {
        vs.iter().map(|c| v(c)).collect()
    }

    #[test]
    fn parse_examples() {
        let sigma = ab();
        assert_eq!(
            parse("(a+b)*", &sigma).unwrap(),
            Expr::star(Expr::union(a(), b()))
        );
        assert_eq!(
            parse("a^2 b", &sigma).unwrap(),
            Expr::prod(Expr::prod(a(), a()), b())
        );
        assert_eq!(parse("a**", &sigma).unwrap(), Expr::star(Expr::star(a())));
        assert_eq!(parse("a^0", &sigma).unwrap(), Expr::One);
        assert_eq!(parse("a.b", &sigma).unwrap(), Expr::prod(a(), b()));
        assert_eq!(parse("ab", &sigma).unwrap(), Expr::prod(a(), b()));
    }

    #[test]
    fn precedence() {
        let sigma = Alphabet::new(['a', 'b', 'c']).unwrap();
        let c = Expr::Letter(2);
        assert_eq!(
            parse("a+b c*", &sigma).unwrap(),
            Expr::union(a(), Expr::prod(b(), Expr::star(c.clone())))
        );
        assert_eq!(
            parse("a+b+c", &sigma).unwrap(),
            Expr::union(Expr::union(a(), b()), c)
        );
    }

    #[test]
    fn parse_errors() {
        let sigma = ab();
        assert_eq!(
            parse("a+c", &sigma),
            Err(Error::UnknownLetter { letter: 'c', pos: 2 })
        );
        assert!(matches!(parse("(a+b", &sigma), Err(Error::Syntax { pos: 4, .. })));
        assert!(matches!(parse("a+", &sigma), Err(Error::Syntax { .. })));
        assert!(matches!(parse("", &sigma), Err(Error::Syntax { pos: 0, .. })));
        assert!(matches!(parse("a)", &sigma), Err(Error::Syntax { pos: 1, .. })));
        assert!(matches!(parse("a^", &sigma), Err(Error::Syntax { .. })));
        assert!(matches!(parse("*a", &sigma), Err(Error::Syntax { pos: 0, .. })));
    }

    #[test]
    fn print_examples() {
        let sigma = ab();
        assert_eq!(print(&Expr::star(Expr::union(a(), b())), &sigma), "(a+b)*");
        assert_eq!(print(&Expr::One, &sigma), "1");
        assert_eq!(print(&Expr::prod(a(), Expr::star(b())), &sigma), "a b*");
        assert_eq!(
            print(&Expr::union(a(), Expr::union(b(), Expr::Zero)), &sigma),
            "a+(b+0)"
        );
        assert_eq!(
            print(&Expr::prod(a(), Expr::prod(b(), a())), &sigma),
            "a (b a)"
        );
        assert_eq!(print(&Expr::star(Expr::star(a())), &sigma), "a**");
    }

    #[test]
    fn vector_expressions() {
        let sigma = ab();
        assert_eq!(expr_of_vector(&v(&[0, 0])), Expr::One);
        assert_eq!(print(&expr_of_vector(&v(&[2, 1])), &sigma), "a a b");
        assert_eq!(print(&expr_of_vector(&v(&[0, 3])), &sigma), "b b b");
    }

    #[test]
    fn bounded_semantics_examples() {
        let sigma = ab();
        let e = parse("(ab)*", &sigma).unwrap();
        assert_eq!(
            bounded_semantics(&e, 2, 4),
            set(&[&[0, 0], &[1, 1], &[2, 2]])
        );
        assert_eq!(bounded_semantics(&Expr::One, 2, 0), set(&[&[0, 0]]));
        let e = parse("(a+b)*", &sigma).unwrap();
        assert_eq!(
            bounded_semantics(&e, 2, 2),
            set(&[&[0, 0], &[1, 0], &[0, 1], &[2, 0], &[1, 1], &[0, 2]])
        );
        assert!(bounded_semantics(&a(), 2, 0).is_empty());
        assert!(bounded_semantics(&parse("a 0", &sigma).unwrap(), 2, 5).is_empty());
    }

    pub(crate) fn arb_expr(letters: usize) -> impl Strategy<Value = Expr> {
        let leaf = prop_oneof![
            1 => Just(Expr::Zero),
            1 => Just(Expr::One),
            4 => (0..letters).prop_map(Expr::Letter),
        ];
        leaf.prop_recursive(4, 16, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::prod(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::union(a, b)),
                inner.prop_map(Expr::star),
            ]
        })
    }

    proptest! {
        #[test]
        fn parse_print_round_trip(e in arb_expr(3)) {
            let sigma = Alphabet::new(['a', 'b', 'c']).unwrap();
            let text = print(&e, &sigma);
            prop_assert_eq!(parse(&text, &sigma).unwrap(), e, "{}", text);
        }

        #[test]
        fn semantics_monotone_in_degree(e in arb_expr(2), d in 0u64..5) {
            let small = bounded_semantics(&e, 2, d);
            let large = bounded_semantics(&e, 2, d + 1);
            prop_assert!(small.is_subset(&large));
            prop_assert!(large.iter().filter(|v| v.degree() <= d).cloned().collect::<BTreeSet<_>>() == small);
        }

        #[test]
        fn vector_expression_denotes_singleton(counts in prop::collection::vec(0u64..4, 3)) {
            let target = ParikhVector::new(counts);
            let e = expr_of_vector(&target);
            prop_assert_eq!(bounded_semantics(&e, 3, 20), BTreeSet::from([target]));
        }
    }
}
