//! Boolean expressions over variables `x1..xn`, their evaluation, and the
//! brute-force truth table used as the reference oracle everywhere else.

mod parse;
mod table;

use std::fmt;

use rand::Rng;
use thiserror::Error;

pub use parse::{parse, parse_with_arity, ParseError};
pub use table::{truth_table, TruthTable, TABLE_CAP};

/// The if-then-else function: `c0` when `h` is false, `c1` when `h` is true.
#[inline]
pub fn ite(h: bool, c0: bool, c1: bool) -> bool {
    if h {
        c1
    } else {
        c0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("assignment has {found} bits but the expression needs at least {expected}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("variable x{} is out of range for arity {arity}", .var + 1)]
    VariableOutOfRange { var: usize, arity: usize },
    #[error("arity {n} exceeds the exhaustive enumeration cap of {cap}")]
    TooManyVariables { n: usize, cap: usize },
}

/// Boolean expression syntax tree. Variables are 0-based ordinals; `Var(0)`
/// prints as `x1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Const(bool),
    Var(usize),
    Not(Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
    /// `Ite(h, c0, c1)`: `c0` if `h` is false, `c1` otherwise.
    Ite(Box<Expr>, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn var(index: usize) -> Expr {
        Expr::Var(index)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(e: Expr) -> Expr {
        Expr::Not(Box::new(e))
    }

    pub fn and(a: Expr, b: Expr) -> Expr {
        Expr::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Expr, b: Expr) -> Expr {
        Expr::Or(Box::new(a), Box::new(b))
    }

    pub fn ite(h: Expr, c0: Expr, c1: Expr) -> Expr {
        Expr::Ite(Box::new(h), Box::new(c0), Box::new(c1))
    }

    /// Highest variable ordinal mentioned, if any.
    pub fn max_var(&self) -> Option<usize> {
        match self {
            Expr::Const(_) => None,
            Expr::Var(i) => Some(*i),
            Expr::Not(e) => e.max_var(),
            Expr::And(a, b) | Expr::Or(a, b) => a.max_var().max(b.max_var()),
            Expr::Ite(h, c0, c1) => h.max_var().max(c0.max_var()).max(c1.max_var()),
        }
    }

    /// Smallest arity that covers every variable in the expression.
    pub fn min_arity(&self) -> usize {
        self.max_var().map_or(0, |v| v + 1)
    }

    pub fn mentions(&self, var: usize) -> bool {
        match self {
            Expr::Const(_) => false,
            Expr::Var(i) => *i == var,
            Expr::Not(e) => e.mentions(var),
            Expr::And(a, b) | Expr::Or(a, b) => a.mentions(var) || b.mentions(var),
            Expr::Ite(h, c0, c1) => h.mentions(var) || c0.mentions(var) || c1.mentions(var),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Expr::Const(_) | Expr::Var(_) => 1,
            Expr::Not(e) => 1 + e.size(),
            Expr::And(a, b) | Expr::Or(a, b) => 1 + a.size() + b.size(),
            Expr::Ite(h, c0, c1) => 1 + h.size() + c0.size() + c1.size(),
        }
    }

    pub fn as_const(&self) -> Option<bool> {
        match self {
            Expr::Const(b) => Some(*b),
            _ => None,
        }
    }

    pub fn eval(&self, x: &Assignment) -> Result<bool, ExprError> {
        let needed = self.min_arity();
        if needed > x.len() {
            return Err(ExprError::ArityMismatch {
                expected: needed,
                found: x.len(),
            });
        }
        Ok(self.eval_bits(x.bits()))
    }

    /// Evaluation without the arity check. Panics if a variable is out of
    /// range for `bits`.
    pub fn eval_bits(&self, bits: &[bool]) -> bool {
        match self {
            Expr::Const(b) => *b,
            Expr::Var(i) => bits[*i],
            Expr::Not(e) => !e.eval_bits(bits),
            Expr::And(a, b) => a.eval_bits(bits) && b.eval_bits(bits),
            Expr::Or(a, b) => a.eval_bits(bits) || b.eval_bits(bits),
            Expr::Ite(h, c0, c1) => {
                if h.eval_bits(bits) {
                    c1.eval_bits(bits)
                } else {
                    c0.eval_bits(bits)
                }
            }
        }
    }

    /// Substitutes `value` for `var` and folds constants bottom-up. The result
    /// never mentions `var`.
    pub fn cofactor(&self, var: usize, value: bool) -> Expr {
        match self {
            Expr::Const(b) => Expr::Const(*b),
            Expr::Var(i) if *i == var => Expr::Const(value),
            Expr::Var(i) => Expr::Var(*i),
            Expr::Not(e) => match e.cofactor(var, value) {
                Expr::Const(b) => Expr::Const(!b),
                e => Expr::not(e),
            },
            Expr::And(a, b) => match (a.cofactor(var, value), b.cofactor(var, value)) {
                (Expr::Const(false), _) | (_, Expr::Const(false)) => Expr::Const(false),
                (Expr::Const(true), e) | (e, Expr::Const(true)) => e,
                (a, b) => Expr::and(a, b),
            },
            Expr::Or(a, b) => match (a.cofactor(var, value), b.cofactor(var, value)) {
                (Expr::Const(true), _) | (_, Expr::Const(true)) => Expr::Const(true),
                (Expr::Const(false), e) | (e, Expr::Const(false)) => e,
                (a, b) => Expr::or(a, b),
            },
            Expr::Ite(h, c0, c1) => match h.cofactor(var, value) {
                Expr::Const(false) => c0.cofactor(var, value),
                Expr::Const(true) => c1.cofactor(var, value),
                h => {
                    let c0 = c0.cofactor(var, value);
                    let c1 = c1.cofactor(var, value);
                    match (&c0, &c1) {
                        (Expr::Const(a), Expr::Const(b)) if a == b => c0,
                        _ => Expr::ite(h, c0, c1),
                    }
                }
            },
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Ite(..) => 0,
            Expr::Or(..) => 1,
            Expr::And(..) => 2,
            Expr::Not(_) => 3,
            Expr::Const(_) | Expr::Var(_) => 4,
        }
    }

    fn fmt_at(&self, f: &mut fmt::Formatter<'_>, min_prec: u8) -> fmt::Result {
        if self.precedence() < min_prec {
            f.write_str("(")?;
            self.fmt_at(f, 0)?;
            return f.write_str(")");
        }
        match self {
            Expr::Const(b) => f.write_str(if *b { "1" } else { "0" }),
            Expr::Var(i) => write!(f, "x{}", i + 1),
            Expr::Not(e) => {
                f.write_str("!")?;
                e.fmt_at(f, 3)
            }
            // Binary operators associate to the left.
            Expr::And(a, b) => {
                a.fmt_at(f, 2)?;
                f.write_str(" & ")?;
                b.fmt_at(f, 3)
            }
            Expr::Or(a, b) => {
                a.fmt_at(f, 1)?;
                f.write_str(" | ")?;
                b.fmt_at(f, 2)
            }
            Expr::Ite(h, c0, c1) => {
                h.fmt_at(f, 1)?;
                f.write_str(" ? ")?;
                c1.fmt_at(f, 0)?;
                f.write_str(" : ")?;
                c0.fmt_at(f, 0)
            }
        }
    }
}

/// Canonical concrete syntax; `parse` reads it back to the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(f, 0)
    }
}

/// A total assignment of bits to variables; position `i` holds `x{i+1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Assignment(Vec<bool>);

impl Assignment {
    pub fn new(bits: Vec<bool>) -> Self {
        Assignment(bits)
    }

    /// Binary expansion of `index` over `n` bits, `x1` most significant.
    pub fn from_index(index: u64, n: usize) -> Self {
        Assignment((0..n).map(|i| (index >> (n - 1 - i)) & 1 == 1).collect())
    }

    pub fn to_index(&self) -> u64 {
        self.0.iter().fold(0, |acc, &b| (acc << 1) | u64::from(b))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn get(&self, var: usize) -> Option<bool> {
        self.0.get(var).copied()
    }

    /// All `2^n` assignments in index order.
    pub fn all(n: usize) -> impl Iterator<Item = Assignment> {
        (0..1u64 << n).map(move |k| Assignment::from_index(k, n))
    }
}

impl From<Vec<bool>> for Assignment {
    fn from(bits: Vec<bool>) -> Self {
        Assignment(bits)
    }
}

impl<const N: usize> From<[u8; N]> for Assignment {
    fn from(bits: [u8; N]) -> Self {
        Assignment(bits.iter().map(|&b| b != 0).collect())
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, b) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str(if *b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Random expression over `n` variables with at most `depth` levels of
/// connectives. Used by randomized suites.
pub fn random_expr<R: Rng + ?Sized>(rng: &mut R, n: usize, depth: usize) -> Expr {
    let leaf = |rng: &mut R| {
        if n == 0 || rng.gen_ratio(1, 8) {
            Expr::Const(rng.gen())
        } else {
            Expr::Var(rng.gen_range(0..n))
        }
    };
    if depth == 0 || rng.gen_ratio(1, 5) {
        return leaf(rng);
    }
    match rng.gen_range(0..7) {
        0 => Expr::not(random_expr(rng, n, depth - 1)),
        1 | 2 => Expr::and(
            random_expr(rng, n, depth - 1),
            random_expr(rng, n, depth - 1),
        ),
        3 | 4 => Expr::or(
            random_expr(rng, n, depth - 1),
            random_expr(rng, n, depth - 1),
        ),
        _ => Expr::ite(
            random_expr(rng, n, depth - 1),
            random_expr(rng, n, depth - 1),
            random_expr(rng, n, depth - 1),
        ),
    }
}
