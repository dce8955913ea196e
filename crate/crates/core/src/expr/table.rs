use super::{Assignment, Expr, ExprError};

/// Largest arity accepted for exhaustive enumeration.
pub const TABLE_CAP: usize = 24;

/// Bit-packed truth table. Entry `k` is the function value at the
/// assignment whose binary expansion is `k`, first variable most significant.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TruthTable {
    arity: usize,
    words: Vec<u64>,
}

const LANE: [u64; 6] = [
    0xAAAA_AAAA_AAAA_AAAA,
    0xCCCC_CCCC_CCCC_CCCC,
    0xF0F0_F0F0_F0F0_F0F0,
    0xFF00_FF00_FF00_FF00,
    0xFFFF_0000_FFFF_0000,
    0xFFFF_FFFF_0000_0000,
];

fn low_mask(bits: usize) -> u64 {
    if bits >= 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

impl TruthTable {
    pub fn constant(arity: usize, value: bool) -> Self {
        let len = 1usize << arity;
        let mut words = vec![if value { u64::MAX } else { 0 }; len.div_ceil(64)];
        words[0] &= low_mask(len);
        TruthTable { arity, words }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> usize {
        1 << self.arity
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn get(&self, index: usize) -> bool {
        (self.words[index / 64] >> (index % 64)) & 1 == 1
    }

    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| u64::from(w.count_ones())).sum()
    }

    pub fn bits(&self) -> Vec<bool> {
        (0..self.len()).map(|k| self.get(k)).collect()
    }

    /// `Some(v)` when every entry equals `v`.
    pub fn as_const(&self) -> Option<bool> {
        if self.words.iter().all(|&w| w == 0) {
            Some(false)
        } else if *self == TruthTable::constant(self.arity, true) {
            Some(true)
        } else {
            None
        }
    }

    /// Splits on the most significant variable: `(value with it 0, value with it 1)`.
    pub fn cofactors(&self) -> (TruthTable, TruthTable) {
        assert!(self.arity > 0, "cannot split a zero-arity table");
        let arity = self.arity - 1;
        let half = 1usize << arity;
        if half >= 64 {
            let mid = self.words.len() / 2;
            (
                TruthTable {
                    arity,
                    words: self.words[..mid].to_vec(),
                },
                TruthTable {
                    arity,
                    words: self.words[mid..].to_vec(),
                },
            )
        } else {
            let w = self.words[0];
            (
                TruthTable {
                    arity,
                    words: vec![w & low_mask(half)],
                },
                TruthTable {
                    arity,
                    words: vec![(w >> half) & low_mask(half)],
                },
            )
        }
    }

    /// Table of `f` where table position `p` (0 = most significant) holds
    /// variable `var_at_position[p]`.
    pub fn of_expr_ordered(f: &Expr, var_at_position: &[usize]) -> Result<Self, ExprError> {
        let n = var_at_position.len();
        if n > TABLE_CAP {
            return Err(ExprError::TooManyVariables { n, cap: TABLE_CAP });
        }
        if let Some(v) = f.max_var().filter(|&v| v >= n) {
            return Err(ExprError::VariableOutOfRange { var: v, arity: n });
        }
        // bit index inside `k` carrying each variable
        let mut shift = vec![usize::MAX; n];
        for (p, &v) in var_at_position.iter().enumerate() {
            shift[v] = n - 1 - p;
        }
        let len = 1usize << n;
        let words = (0..len.div_ceil(64))
            .map(|w| eval_word(f, &shift, w as u64) & low_mask(len))
            .collect();
        Ok(TruthTable { arity: n, words })
    }
}

fn eval_word(f: &Expr, shift: &[usize], word: u64) -> u64 {
    match f {
        Expr::Const(b) => {
            if *b {
                u64::MAX
            } else {
                0
            }
        }
        Expr::Var(i) => {
            let s = shift[*i];
            if s < 6 {
                LANE[s]
            } else if (word >> (s - 6)) & 1 == 1 {
                u64::MAX
            } else {
                0
            }
        }
        Expr::Not(e) => !eval_word(e, shift, word),
        Expr::And(a, b) => eval_word(a, shift, word) & eval_word(b, shift, word),
        Expr::Or(a, b) => eval_word(a, shift, word) | eval_word(b, shift, word),
        Expr::Ite(h, c0, c1) => {
            let h = eval_word(h, shift, word);
            (!h & eval_word(c0, shift, word)) | (h & eval_word(c1, shift, word))
        }
    }
}

/// Exhaustive truth table of `f` over `n` variables, `x1` most significant.
pub fn truth_table(f: &Expr, n: usize) -> Result<TruthTable, ExprError> {
    let order: Vec<usize> = (0..n).collect();
    TruthTable::of_expr_ordered(f, &order)
}

impl TruthTable {
    /// Slow reference path: one `eval` per assignment.
    pub fn by_enumeration(f: &Expr, n: usize) -> Result<Self, ExprError> {
        if n > TABLE_CAP {
            return Err(ExprError::TooManyVariables { n, cap: TABLE_CAP });
        }
        let mut t = TruthTable::constant(n, false);
        for (k, x) in Assignment::all(n).enumerate() {
            if f.eval(&x)? {
                t.words[k / 64] |= 1 << (k % 64);
            }
        }
        Ok(t)
    }
}
