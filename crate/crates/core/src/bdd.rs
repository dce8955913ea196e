//! Reduced ordered binary decision diagrams.
//!
//! A [`BddManager`] owns an append-only node arena and a unique table keyed
//! by `(level, low, high)`. Node ids are dense: `0` is the constant-false
//! terminal, `1` the constant-true terminal. Every node is created through
//! [`BddManager::make_node`], which drops redundant tests (`low == high`) and
//! returns the existing id for a duplicate triple, so for a fixed order each
//! Boolean function has exactly one id.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{Assignment, Expr, ExprError, TruthTable};
use crate::tree::DecisionTree;

/// Largest arity a manager accepts; satisfying-assignment counts are `u128`.
pub const MAX_ARITY: usize = 127;

pub const FALSE_ID: usize = 0;
pub const TRUE_ID: usize = 1;

static NEXT_MANAGER: AtomicU64 = AtomicU64::new(0);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BddError {
    #[error("reference belongs to a different manager")]
    ForeignRef,
    #[error("order {0:?} is not a permutation of 0..n")]
    BadOrder(Vec<usize>),
    #[error("assignment has {found} bits, manager arity is {expected}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("arity {0} exceeds the manager limit of {MAX_ARITY}")]
    ArityTooLarge(usize),
    #[error("node {child} at level {child_level} cannot sit below level {level}")]
    OrderViolation {
        level: usize,
        child: usize,
        child_level: usize,
    },
    #[error("unknown node id {0}")]
    UnknownNode(usize),
    #[error("decision trees can only be reduced under the ascending variable order")]
    TreeNeedsAscendingOrder,
    #[error(transparent)]
    Expr(#[from] ExprError),
}

/// Handle to a node. Only meaningful with the manager that created it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BddRef {
    manager: u64,
    id: usize,
}

impl BddRef {
    pub fn id(self) -> usize {
        self.id
    }

    pub fn is_terminal(self) -> bool {
        self.id <= TRUE_ID
    }
}

/// Arena entry. Terminals sit at level `arity`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BddNode {
    pub level: usize,
    pub low: usize,
    pub high: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NodeCount {
    pub internal: usize,
    pub total: usize,
}

#[derive(Debug, Clone)]
pub struct BddManager {
    tag: u64,
    arity: usize,
    var_at_level: Vec<usize>,
    level_of_var: Vec<usize>,
    nodes: Vec<BddNode>,
    unique: HashMap<BddNode, usize>,
    // cofactor fingerprints already built; the table's arity fixes its level
    built: HashMap<TruthTable, usize>,
}

impl BddManager {
    /// Manager over `n` variables in ascending order `x1 < x2 < ... < xn`.
    pub fn new(n: usize) -> Result<Self, BddError> {
        Self::with_order((0..n).collect())
    }

    /// `order[level]` is the variable tested at that level.
    pub fn with_order(order: Vec<usize>) -> Result<Self, BddError> {
        let n = order.len();
        if n > MAX_ARITY {
            return Err(BddError::ArityTooLarge(n));
        }
        let mut level_of_var = vec![usize::MAX; n];
        for (level, &var) in order.iter().enumerate() {
            if var >= n || level_of_var[var] != usize::MAX {
                return Err(BddError::BadOrder(order));
            }
            level_of_var[var] = level;
        }
        let terminal = BddNode {
            level: n,
            low: usize::MAX,
            high: usize::MAX,
        };
        Ok(BddManager {
            tag: NEXT_MANAGER.fetch_add(1, Ordering::Relaxed),
            arity: n,
            var_at_level: order,
            level_of_var,
            nodes: vec![terminal, terminal],
            unique: HashMap::new(),
            built: HashMap::new(),
        })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Variables from the top level down.
    pub fn order(&self) -> &[usize] {
        &self.var_at_level
    }

    pub fn var_at_level(&self, level: usize) -> usize {
        self.var_at_level[level]
    }

    pub fn level_of_var(&self, var: usize) -> usize {
        self.level_of_var[var]
    }

    pub fn terminal(&self, value: bool) -> BddRef {
        self.wrap(if value { TRUE_ID } else { FALSE_ID })
    }

    /// Number of arena entries including both terminals.
    pub fn arena_len(&self) -> usize {
        self.nodes.len()
    }

    /// Looks up an id; `None` for ids outside the arena.
    pub fn node_ref(&self, id: usize) -> Option<BddRef> {
        (id < self.nodes.len()).then(|| self.wrap(id))
    }

    pub fn node(&self, r: BddRef) -> Result<BddNode, BddError> {
        self.check(r)?;
        Ok(self.nodes[r.id])
    }

    /// Internal arena entries with their ids, ascending.
    pub fn internal_nodes(&self) -> impl Iterator<Item = (usize, BddNode)> + '_ {
        self.nodes.iter().copied().enumerate().skip(2)
    }

    /// Value of a terminal ref, `None` for internal nodes.
    pub fn terminal_value(&self, r: BddRef) -> Option<bool> {
        match r.id {
            FALSE_ID => Some(false),
            TRUE_ID => Some(true),
            _ => None,
        }
    }

    fn wrap(&self, id: usize) -> BddRef {
        BddRef {
            manager: self.tag,
            id,
        }
    }

    fn check(&self, r: BddRef) -> Result<(), BddError> {
        if r.manager != self.tag {
            return Err(BddError::ForeignRef);
        }
        Ok(())
    }

    fn mk(&mut self, level: usize, low: usize, high: usize) -> usize {
        if low == high {
            return low;
        }
        let key = BddNode { level, low, high };
        if let Some(&id) = self.unique.get(&key) {
            return id;
        }
        let id = self.nodes.len();
        self.nodes.push(key);
        self.unique.insert(key, id);
        id
    }

    /// Node testing the variable at `level` with the given children, after
    /// applying both reduction rules.
    pub fn make_node(
        &mut self,
        level: usize,
        low: BddRef,
        high: BddRef,
    ) -> Result<BddRef, BddError> {
        self.check(low)?;
        self.check(high)?;
        for child in [low.id, high.id] {
            let child_level = self.nodes[child].level;
            if level >= child_level {
                return Err(BddError::OrderViolation {
                    level,
                    child,
                    child_level,
                });
            }
        }
        let id = self.mk(level, low.id, high.id);
        Ok(self.wrap(id))
    }

    /// Canonical BDD of `f` under this manager's order.
    ///
    /// Recursive Shannon expansion along the levels. Each cofactor is
    /// identified by its truth table over the remaining variables, so two
    /// equivalent cofactors reach the same node without being expanded twice.
    pub fn from_expr(&mut self, f: &Expr) -> Result<BddRef, BddError> {
        if let Some(v) = f.max_var().filter(|&v| v >= self.arity) {
            return Err(ExprError::VariableOutOfRange {
                var: v,
                arity: self.arity,
            }
            .into());
        }
        let table = TruthTable::of_expr_ordered(f, &self.var_at_level)?;
        let id = self.build(table);
        Ok(self.wrap(id))
    }

    fn build(&mut self, table: TruthTable) -> usize {
        if let Some(c) = table.as_const() {
            return if c { TRUE_ID } else { FALSE_ID };
        }
        if let Some(&id) = self.built.get(&table) {
            return id;
        }
        let level = self.arity - table.arity();
        let (t0, t1) = table.cofactors();
        let low = self.build(t0);
        let high = self.build(t1);
        let id = self.mk(level, low, high);
        self.built.insert(table, id);
        id
    }

    /// Bottom-up reduction of a full decision tree by merging equivalent
    /// subtrees and dropping redundant tests.
    pub fn from_tree(&mut self, tree: &DecisionTree) -> Result<BddRef, BddError> {
        if self.var_at_level.iter().enumerate().any(|(l, &v)| l != v) {
            return Err(BddError::TreeNeedsAscendingOrder);
        }
        let id = self.reduce_tree(tree)?;
        Ok(self.wrap(id))
    }

    fn reduce_tree(&mut self, tree: &DecisionTree) -> Result<usize, BddError> {
        match tree {
            DecisionTree::Leaf(b) => Ok(if *b { TRUE_ID } else { FALSE_ID }),
            DecisionTree::Branch { var, low, high } => {
                if *var >= self.arity {
                    return Err(ExprError::VariableOutOfRange {
                        var: *var,
                        arity: self.arity,
                    }
                    .into());
                }
                let lo = self.reduce_tree(low)?;
                let hi = self.reduce_tree(high)?;
                for child in [lo, hi] {
                    if self.nodes[child].level <= *var {
                        return Err(BddError::OrderViolation {
                            level: *var,
                            child,
                            child_level: self.nodes[child].level,
                        });
                    }
                }
                Ok(self.mk(*var, lo, hi))
            }
        }
    }

    pub fn evaluate(&self, r: BddRef, x: &Assignment) -> Result<bool, BddError> {
        self.check(r)?;
        if x.len() != self.arity {
            return Err(BddError::ArityMismatch {
                expected: self.arity,
                found: x.len(),
            });
        }
        let bits = x.bits();
        let mut id = r.id;
        while id > TRUE_ID {
            let node = self.nodes[id];
            id = if bits[self.var_at_level[node.level]] {
                node.high
            } else {
                node.low
            };
        }
        Ok(id == TRUE_ID)
    }

    /// Ids reachable from `r`, ascending.
    pub fn reachable(&self, r: BddRef) -> Result<Vec<usize>, BddError> {
        self.check(r)?;
        let mut seen = vec![false; self.nodes.len()];
        let mut stack = vec![r.id];
        while let Some(id) = stack.pop() {
            if std::mem::replace(&mut seen[id], true) {
                continue;
            }
            if id > TRUE_ID {
                stack.push(self.nodes[id].low);
                stack.push(self.nodes[id].high);
            }
        }
        Ok(seen
            .iter()
            .enumerate()
            .filter_map(|(id, &s)| s.then_some(id))
            .collect())
    }

    pub fn node_count(&self, r: BddRef) -> Result<NodeCount, BddError> {
        let ids = self.reachable(r)?;
        let terminals = ids.iter().filter(|&&id| id <= TRUE_ID).count();
        Ok(NodeCount {
            internal: ids.len() - terminals,
            total: ids.len(),
        })
    }

    /// Number of satisfying assignments over all `arity` variables.
    pub fn sat_count(&self, r: BddRef) -> Result<u128, BddError> {
        self.check(r)?;
        let mut memo: HashMap<usize, u128> = HashMap::new();
        let below = self.count_below(r.id, &mut memo);
        Ok(below << self.nodes[r.id].level)
    }

    // Models of the sub-function over the variables at levels >= level(id).
    fn count_below(&self, id: usize, memo: &mut HashMap<usize, u128>) -> u128 {
        match id {
            FALSE_ID => return 0,
            TRUE_ID => return 1,
            _ => {}
        }
        if let Some(&c) = memo.get(&id) {
            return c;
        }
        let node = self.nodes[id];
        let mut total = 0;
        for child in [node.low, node.high] {
            let skipped = self.nodes[child].level - node.level - 1;
            total += self.count_below(child, memo) << skipped;
        }
        memo.insert(id, total);
        total
    }

    /// Same id, hence (by canonicity) the same function.
    pub fn equal(&self, a: BddRef, b: BddRef) -> Result<bool, BddError> {
        self.check(a)?;
        self.check(b)?;
        Ok(a.id == b.id)
    }

    /// Graphviz rendering of the nodes reachable from `r`: circles for tests,
    /// squares for terminals, dashed 0 edge, solid 1 edge.
    pub fn to_dot(&self, r: BddRef) -> Result<String, BddError> {
        let ids = self.reachable(r)?;
        let mut out = String::from("digraph bdd {\n");
        for &id in &ids {
            match id {
                FALSE_ID | TRUE_ID => {
                    let _ = writeln!(out, "  n{id} [shape=square, label=\"{id}\"];");
                }
                _ => {
                    let var = self.var_at_level[self.nodes[id].level];
                    let _ = writeln!(out, "  n{id} [shape=circle, label=\"x{}\"];", var + 1);
                }
            }
        }
        for &id in ids.iter().filter(|&&id| id > TRUE_ID) {
            let node = self.nodes[id];
            let _ = writeln!(out, "  n{id} -> n{} [style=dashed];", node.low);
            let _ = writeln!(out, "  n{id} -> n{};", node.high);
        }
        out.push_str("}\n");
        Ok(out)
    }

    pub fn to_json(&self, r: BddRef) -> Result<BddJson, BddError> {
        let ids = self.reachable(r)?;
        let nodes = ids
            .into_iter()
            .filter(|&id| id > TRUE_ID)
            .map(|id| {
                let node = self.nodes[id];
                BddNodeJson {
                    id,
                    var: self.var_at_level[node.level],
                    lo: node.low,
                    hi: node.high,
                }
            })
            .collect();
        Ok(BddJson {
            order: self.var_at_level.clone(),
            nodes,
            root: r.id,
        })
    }
}

/// Serialized form: internal nodes reachable from `root`, ids ascending.
/// Ids `0` and `1` denote the terminals.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BddJson {
    pub order: Vec<usize>,
    pub nodes: Vec<BddNodeJson>,
    pub root: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BddNodeJson {
    pub id: usize,
    pub var: usize,
    pub lo: usize,
    pub hi: usize,
}
