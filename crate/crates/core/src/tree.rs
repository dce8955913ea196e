//! Full ordered decision trees: Shannon expansion on `x1`, then `x2`, and so
//! on until every conclusion is a constant. Deliberately unreduced.

use std::fmt::Write as _;

use crate::expr::{Assignment, Expr, ExprError};

/// Largest arity for which a full tree is built.
pub const TREE_CAP: usize = 20;

/// Splits `f` on `var`: `(f with var = 0, f with var = 1)`, constants folded.
pub fn shannon_expand(f: &Expr, var: usize, arity: usize) -> Result<(Expr, Expr), ExprError> {
    if var >= arity {
        return Err(ExprError::VariableOutOfRange { var, arity });
    }
    Ok((f.cofactor(var, false), f.cofactor(var, true)))
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum DecisionTree {
    Leaf(bool),
    Branch {
        var: usize,
        low: Box<DecisionTree>,
        high: Box<DecisionTree>,
    },
}

/// Builds the complete tree of depth `n` for `f`.
pub fn build_tree(f: &Expr, n: usize) -> Result<DecisionTree, ExprError> {
    if n > TREE_CAP {
        return Err(ExprError::TooManyVariables { n, cap: TREE_CAP });
    }
    if let Some(v) = f.max_var().filter(|&v| v >= n) {
        return Err(ExprError::VariableOutOfRange { var: v, arity: n });
    }
    Ok(expand(f, 0, n))
}

fn expand(f: &Expr, var: usize, n: usize) -> DecisionTree {
    if var == n {
        // every variable has been substituted, so folding left a constant
        return DecisionTree::Leaf(
            f.as_const()
                .expect("fully cofactored expression is constant"),
        );
    }
    let low = f.cofactor(var, false);
    let high = f.cofactor(var, true);
    DecisionTree::Branch {
        var,
        low: Box::new(expand(&low, var + 1, n)),
        high: Box::new(expand(&high, var + 1, n)),
    }
}

impl DecisionTree {
    /// Leaf values left to right, i.e. in truth-table order.
    pub fn leaves(&self) -> Vec<bool> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves(&self, out: &mut Vec<bool>) {
        match self {
            DecisionTree::Leaf(b) => out.push(*b),
            DecisionTree::Branch { low, high, .. } => {
                low.collect_leaves(out);
                high.collect_leaves(out);
            }
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            DecisionTree::Leaf(_) => 1,
            DecisionTree::Branch { low, high, .. } => 1 + low.node_count() + high.node_count(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            DecisionTree::Leaf(_) => 0,
            DecisionTree::Branch { low, high, .. } => 1 + low.depth().max(high.depth()),
        }
    }

    /// Follows the branch selected by each tested variable.
    pub fn evaluate(&self, x: &Assignment) -> Result<bool, ExprError> {
        let mut node = self;
        loop {
            match node {
                DecisionTree::Leaf(b) => return Ok(*b),
                DecisionTree::Branch { var, low, high } => {
                    let bit = x.get(*var).ok_or(ExprError::ArityMismatch {
                        expected: var + 1,
                        found: x.len(),
                    })?;
                    node = if bit { high } else { low };
                }
            }
        }
    }

    /// Graphviz rendering: dashed edge for the 0 branch, solid for 1,
    /// leaves as squares.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph tree {\n");
        let mut next = 0usize;
        self.write_dot(&mut out, &mut next);
        out.push_str("}\n");
        out
    }

    fn write_dot(&self, out: &mut String, next: &mut usize) -> usize {
        let id = *next;
        *next += 1;
        match self {
            DecisionTree::Leaf(b) => {
                let _ = writeln!(out, "  n{id} [shape=square, label=\"{}\"];", u8::from(*b));
            }
            DecisionTree::Branch { var, low, high } => {
                let _ = writeln!(out, "  n{id} [shape=circle, label=\"x{}\"];", var + 1);
                let lo = low.write_dot(out, next);
                let hi = high.write_dot(out, next);
                let _ = writeln!(out, "  n{id} -> n{lo} [style=dashed];");
                let _ = writeln!(out, "  n{id} -> n{hi};");
            }
        }
        id
    }
}
