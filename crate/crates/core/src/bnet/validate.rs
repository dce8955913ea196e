use std::fmt;

use serde::Serialize;

use super::{BayesNet, NodeKind};

/// The properties every net that came from a BDD must have.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ShapeRule {
    /// Every node has two states.
    States,
    /// Two arrows into each round node, none into squares.
    EnteringArrows,
    /// Every table entry is 0 or 1.
    Deterministic,
    /// Exactly one node without children, and it is the root.
    Top,
    /// Exactly two parentless nodes, the constants 0 and 1.
    Bottom,
    /// Dangling ids, cycles, or tables inconsistent with the node.
    Structure,
}

impl fmt::Display for ShapeRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ShapeRule::States => "number of states of a node",
            ShapeRule::EnteringArrows => "number of arrows entering a node",
            ShapeRule::Deterministic => "transition probabilities for a node (deterministic)",
            ShapeRule::Top => "number of nodes at top of graph",
            ShapeRule::Bottom => "number of nodes at bottom of graph",
            ShapeRule::Structure => "structure",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub rule: ShapeRule,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub node: Option<usize>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ShapeReport {
    pub pass: bool,
    pub violations: Vec<Violation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl ShapeReport {
    pub fn has(&self, rule: ShapeRule) -> bool {
        self.violations.iter().any(|v| v.rule == rule)
    }
}

pub const DEGENERATE_NOTE: &str =
    "constant function: single square node, no if-then-else nodes and one bottom node";

/// Checks `net` against the shape of a compiled BDD. Never fails; every
/// breach is returned as a [`Violation`].
pub fn validate_bdd_shape(net: &BayesNet) -> ShapeReport {
    let mut out = Vec::new();
    let mut push =
        |rule, node: Option<usize>, detail: String| out.push(Violation { rule, node, detail });
    let count = net.nodes.len();

    if count == 0 {
        push(ShapeRule::Structure, None, "net has no nodes".into());
    }
    if net.root >= count && count > 0 {
        push(
            ShapeRule::Structure,
            None,
            format!("root {} is not a node", net.root),
        );
    }

    for (id, node) in net.nodes.iter().enumerate() {
        let at = Some(id);
        if node.states != 2 {
            push(ShapeRule::States, at, format!("{} states", node.states));
        }
        let (expected_parents, shape) = match &node.kind {
            NodeKind::IfThenElse { .. } => (2, "round"),
            NodeKind::Square { .. } => (0, "square"),
        };
        let arrows_ok = node.parents.len() == expected_parents;
        if !arrows_ok {
            push(
                ShapeRule::EnteringArrows,
                at,
                format!("{shape} node has {} entering arrows", node.parents.len()),
            );
        }
        for &p in &node.parents {
            if p >= count {
                push(
                    ShapeRule::Structure,
                    at,
                    format!("parent {p} is not a node"),
                );
            } else if p == id {
                push(ShapeRule::Structure, at, "node is its own parent".into());
            }
        }
        for cpt in node.tables() {
            if arrows_ok && cpt.parent_arity() != node.parents.len() {
                push(
                    ShapeRule::Structure,
                    at,
                    format!(
                        "table has {} rows for {} parents",
                        cpt.rows().len(),
                        node.parents.len()
                    ),
                );
            }
            if cpt.states() != node.states {
                push(
                    ShapeRule::Structure,
                    at,
                    format!(
                        "table covers {} states, node has {}",
                        cpt.states(),
                        node.states
                    ),
                );
            }
            if !cpt.is_deterministic() {
                push(
                    ShapeRule::Deterministic,
                    at,
                    "table has a fractional entry".into(),
                );
            }
        }
        if let NodeKind::Square { value, prior } = &node.kind {
            if prior.is_deterministic() && prior.prob(0, usize::from(*value)) != 1.0 {
                push(
                    ShapeRule::Structure,
                    at,
                    "square prior disagrees with its value".into(),
                );
            }
        }
    }

    let mut note = None;
    if count > 0 && net.root < count && net.check_references().is_ok() {
        if let Err(e) = net.topological_order() {
            push(ShapeRule::Structure, None, e.to_string());
        }
        let children = net.child_counts();
        let tops: Vec<usize> = (0..count).filter(|&i| children[i] == 0).collect();
        if tops != [net.root] {
            push(
                ShapeRule::Top,
                None,
                format!(
                    "childless nodes {tops:?}, expected only the root {}",
                    net.root
                ),
            );
        }
        let bottoms: Vec<usize> = (0..count)
            .filter(|&i| net.nodes[i].parents.is_empty())
            .collect();
        let degenerate = count == 1 && net.nodes[0].is_square();
        if degenerate {
            note = Some(DEGENERATE_NOTE.to_string());
        } else {
            let mut values: Vec<Option<bool>> = bottoms
                .iter()
                .map(|&i| match net.nodes[i].kind {
                    NodeKind::Square { value, .. } => Some(value),
                    NodeKind::IfThenElse { .. } => None,
                })
                .collect();
            values.sort();
            if values != [Some(false), Some(true)] {
                push(
                    ShapeRule::Bottom,
                    None,
                    format!("parentless nodes {bottoms:?}, expected the squares 0 and 1"),
                );
            }
        }
    }

    ShapeReport {
        pass: out.is_empty(),
        violations: out,
        note,
    }
}
