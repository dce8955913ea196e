//! Bayesian networks whose nodes are two-state if-then-else nodes or
//! constant "square" nodes, and the translation of a BDD into one.
//!
//! Arrows run from conclusions into assertions: a BDD node's low and high
//! children become the `(c0, c1)` parents of the corresponding net node.
//! The input variables stay parameters of the net; an if-then-else node
//! records which variable plays its hypothesis `h` and carries one table per
//! value of `h`.

mod io;
mod validate;

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::bdd::{BddError, BddManager, BddRef, FALSE_ID, TRUE_ID};
use crate::expr::ite;

pub use io::{BnNodeJson, BnetJson, CptPairJson};
pub use validate::{validate_bdd_shape, ShapeReport, ShapeRule, Violation};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BnetError {
    #[error("invalid table: {0}")]
    BadCpt(String),
    #[error("net contains a cycle through node {0}")]
    Cycle(usize),
    #[error("node {node} refers to unknown node {target}")]
    UnknownNode { node: usize, target: usize },
    #[error("invalid net file: {0}")]
    BadFormat(String),
}

/// Conditional probability table. Row `k` is the distribution of the node
/// given parent states `k`, read as a binary number with the first parent
/// most significant. Each row sums to exactly 1.
#[derive(Debug, Clone, PartialEq)]
pub struct Cpt {
    rows: Vec<Vec<f64>>,
}

impl Cpt {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self, BnetError> {
        if rows.is_empty() || !rows.len().is_power_of_two() {
            return Err(BnetError::BadCpt(format!(
                "{} rows is not a power of two",
                rows.len()
            )));
        }
        let width = rows[0].len();
        for (k, row) in rows.iter().enumerate() {
            if row.len() != width || width == 0 {
                return Err(BnetError::BadCpt(format!(
                    "row {k} has {} entries",
                    row.len()
                )));
            }
            if row.iter().any(|p| !(0.0..=1.0).contains(p)) {
                return Err(BnetError::BadCpt(format!(
                    "row {k} has an entry outside [0, 1]"
                )));
            }
            let sum: f64 = row.iter().sum();
            if sum != 1.0 {
                return Err(BnetError::BadCpt(format!("row {k} sums to {sum}")));
            }
        }
        Ok(Cpt { rows })
    }

    /// Parentless distribution putting all mass on `state`.
    pub fn point(state: usize, states: usize) -> Self {
        let mut row = vec![0.0; states];
        row[state] = 1.0;
        Cpt { rows: vec![row] }
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn parent_arity(&self) -> usize {
        self.rows.len().trailing_zeros() as usize
    }

    pub fn states(&self) -> usize {
        self.rows[0].len()
    }

    /// `P(node = state | parents = parent_states)`.
    pub fn prob(&self, parent_states: usize, state: usize) -> f64 {
        self.rows[parent_states][state]
    }

    pub fn is_deterministic(&self) -> bool {
        self.rows.iter().flatten().all(|&p| p == 0.0 || p == 1.0)
    }

    /// Swaps the two entries of one row of a two-state table, turning a
    /// deterministic row into its opposite.
    pub fn flip_row(&mut self, parent_states: usize) {
        self.rows[parent_states].reverse();
    }
}

/// Table of an if-then-else node for a fixed hypothesis `h`: rows over
/// `(c0, c1)` in the order 00, 01, 10, 11, columns `P(a = 0)`, `P(a = 1)`,
/// with `P(a | c0, c1) = 1` exactly when `a = ite(h, c0, c1)`.
pub fn ite_cpt(h: bool) -> Cpt {
    let rows = (0..4)
        .map(|k| {
            let (c0, c1) = (k & 2 != 0, k & 1 != 0);
            let a = ite(h, c0, c1);
            vec![f64::from(u8::from(!a)), f64::from(u8::from(a))]
        })
        .collect();
    Cpt { rows }
}

#[derive(Debug, Clone, PartialEq)]
pub enum NodeKind {
    /// Assertion `a(h)`: `cpt[0]` applies when parameter `param` is 0,
    /// `cpt[1]` when it is 1.
    IfThenElse { param: usize, cpt: [Cpt; 2] },
    /// Constant node fixed in `value` by `prior`.
    Square { value: bool, prior: Cpt },
}

/// A net node. Its id is its index in [`BayesNet::nodes`]. For if-then-else
/// nodes `parents` is `[c0, c1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BnNode {
    pub kind: NodeKind,
    pub parents: Vec<usize>,
    pub states: usize,
}

impl BnNode {
    pub fn if_then_else(param: usize, c0: usize, c1: usize) -> Self {
        BnNode {
            kind: NodeKind::IfThenElse {
                param,
                cpt: [ite_cpt(false), ite_cpt(true)],
            },
            parents: vec![c0, c1],
            states: 2,
        }
    }

    pub fn is_square(&self) -> bool {
        matches!(self.kind, NodeKind::Square { .. })
    }

    pub fn tables(&self) -> Vec<&Cpt> {
        match &self.kind {
            NodeKind::IfThenElse { cpt, .. } => cpt.iter().collect(),
            NodeKind::Square { prior, .. } => vec![prior],
        }
    }
}

/// Parentless node in state `value` with probability 1.
pub fn square_node(value: bool) -> BnNode {
    BnNode {
        kind: NodeKind::Square {
            value,
            prior: Cpt::point(usize::from(value), 2),
        },
        parents: Vec::new(),
        states: 2,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BayesNet {
    /// Number of Boolean parameters `x1..xn`.
    pub n: usize,
    pub root: usize,
    pub nodes: Vec<BnNode>,
}

impl BayesNet {
    pub fn arrow_count(&self) -> usize {
        self.nodes.iter().map(|node| node.parents.len()).sum()
    }

    pub fn if_then_else_count(&self) -> usize {
        self.nodes.iter().filter(|node| !node.is_square()).count()
    }

    pub fn square_count(&self) -> usize {
        self.nodes.iter().filter(|node| node.is_square()).count()
    }

    /// Number of arrows leaving each node.
    pub fn child_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.nodes.len()];
        for node in &self.nodes {
            for &p in &node.parents {
                if let Some(c) = counts.get_mut(p) {
                    *c += 1;
                }
            }
        }
        counts
    }

    pub fn check_references(&self) -> Result<(), BnetError> {
        if self.root >= self.nodes.len() {
            return Err(BnetError::UnknownNode {
                node: self.root,
                target: self.root,
            });
        }
        for (id, node) in self.nodes.iter().enumerate() {
            if let Some(&target) = node.parents.iter().find(|&&p| p >= self.nodes.len()) {
                return Err(BnetError::UnknownNode { node: id, target });
            }
        }
        Ok(())
    }

    /// Parents-first ordering of all nodes.
    pub fn topological_order(&self) -> Result<Vec<usize>, BnetError> {
        self.check_references()?;
        let mut pending: Vec<usize> = self.nodes.iter().map(|n| n.parents.len()).collect();
        let mut children = vec![Vec::new(); self.nodes.len()];
        for (id, node) in self.nodes.iter().enumerate() {
            for &p in &node.parents {
                children[p].push(id);
            }
        }
        let mut ready: Vec<usize> = (0..self.nodes.len())
            .filter(|&i| pending[i] == 0)
            .rev()
            .collect();
        let mut order = Vec::with_capacity(self.nodes.len());
        while let Some(id) = ready.pop() {
            order.push(id);
            for &c in children[id].iter().rev() {
                pending[c] -= 1;
                if pending[c] == 0 {
                    ready.push(c);
                }
            }
        }
        if order.len() < self.nodes.len() {
            let stuck = (0..self.nodes.len()).find(|&i| pending[i] > 0).unwrap_or(0);
            return Err(BnetError::Cycle(stuck));
        }
        Ok(order)
    }

    /// Graphviz rendering: if-then-else nodes as circles labelled with their
    /// hypothesis, squares for constants, arrows from parents to children
    /// (dashed from `c0`, solid from `c1`).
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph bnet {\n");
        for (id, node) in self.nodes.iter().enumerate() {
            match &node.kind {
                NodeKind::IfThenElse { param, .. } => {
                    let _ = writeln!(out, "  n{id} [shape=circle, label=\"x{} ⇒\"];", param + 1);
                }
                NodeKind::Square { value, .. } => {
                    let _ = writeln!(
                        out,
                        "  n{id} [shape=square, label=\"{}\"];",
                        u8::from(*value)
                    );
                }
            }
        }
        for (id, node) in self.nodes.iter().enumerate() {
            for (k, p) in node.parents.iter().enumerate() {
                let style = if k == 0 && !node.is_square() {
                    " [style=dashed]"
                } else {
                    ""
                };
                let _ = writeln!(out, "  n{p} -> n{id}{style};");
            }
        }
        out.push_str("}\n");
        out
    }
}

/// Translates the BDD rooted at `r` into a net with one node per reachable
/// BDD node. Ids are assigned in post-order (low branch first), so parents
/// always precede children and the root comes last.
pub fn compile(m: &BddManager, r: BddRef) -> Result<BayesNet, BddError> {
    let mut net_id: HashMap<usize, usize> = HashMap::new();
    let mut nodes = Vec::new();
    // explicit stack: (bdd id, children already pushed)
    let mut stack = vec![(r.id(), false)];
    while let Some((id, expanded)) = stack.pop() {
        if net_id.contains_key(&id) {
            continue;
        }
        let node = m.node(m.node_ref(id).ok_or(BddError::UnknownNode(id))?)?;
        match id {
            FALSE_ID | TRUE_ID => {
                net_id.insert(id, nodes.len());
                nodes.push(square_node(id == TRUE_ID));
            }
            _ if expanded => {
                let c0 = net_id[&node.low];
                let c1 = net_id[&node.high];
                net_id.insert(id, nodes.len());
                nodes.push(BnNode::if_then_else(m.var_at_level(node.level), c0, c1));
            }
            _ => {
                stack.push((id, true));
                stack.push((node.high, false));
                stack.push((node.low, false));
            }
        }
    }
    Ok(BayesNet {
        n: m.arity(),
        root: net_id[&r.id()],
        nodes,
    })
}
