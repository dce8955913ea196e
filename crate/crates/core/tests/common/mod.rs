// Test-only oracles. Nothing here calls into the BDD manager, the compiler,
// or the inference code it is used to check.
#![allow(dead_code)]

use std::collections::HashMap;

use bddnet::expr::random_expr;
use bddnet::{Assignment, DecisionTree, Expr};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Distinct nodes of a decision tree after merging structurally equal
/// subtrees and removing tests whose branches coincide. Returns
/// `(internal, terminals)`.
pub fn reduced_tree_size(tree: &DecisionTree) -> (usize, usize) {
    #[derive(Clone, PartialEq, Eq, Hash)]
    enum Key {
        Leaf(bool),
        Node(usize, usize, usize),
    }
    fn go(t: &DecisionTree, table: &mut HashMap<Key, usize>) -> usize {
        let key = match t {
            DecisionTree::Leaf(b) => Key::Leaf(*b),
            DecisionTree::Branch { var, low, high } => {
                let lo = go(low, table);
                let hi = go(high, table);
                if lo == hi {
                    return lo;
                }
                Key::Node(*var, lo, hi)
            }
        };
        let next = table.len();
        *table.entry(key).or_insert(next)
    }
    let mut table = HashMap::new();
    let root = go(tree, &mut table);
    // count only what the root reaches
    let mut by_id: HashMap<usize, Key> = HashMap::new();
    for (k, v) in &table {
        by_id.insert(*v, k.clone());
    }
    let mut seen = std::collections::HashSet::new();
    let mut stack = vec![root];
    let (mut internal, mut terminals) = (0, 0);
    while let Some(id) = stack.pop() {
        if !seen.insert(id) {
            continue;
        }
        match &by_id[&id] {
            Key::Leaf(_) => terminals += 1,
            Key::Node(_, lo, hi) => {
                internal += 1;
                stack.push(*lo);
                stack.push(*hi);
            }
        }
    }
    (internal, terminals)
}

/// Sum over all assignments of `f(x) * prod p_i^x_i (1 - p_i)^(1 - x_i)`.
pub fn brute_force_marginal(f: &Expr, p: &[f64]) -> f64 {
    let n = p.len();
    Assignment::all(n)
        .filter(|x| f.eval(x).unwrap())
        .map(|x| {
            x.bits()
                .iter()
                .zip(p)
                .map(|(&b, &pi)| if b { pi } else { 1.0 - pi })
                .product::<f64>()
        })
        .sum()
}

/// Plain boolean evaluation written out independently of `Expr::eval`.
pub fn reference_eval(f: &Expr, bits: &[bool]) -> bool {
    match f {
        Expr::Const(b) => *b,
        Expr::Var(i) => bits[*i],
        Expr::Not(e) => !reference_eval(e, bits),
        Expr::And(a, b) => {
            let (a, b) = (reference_eval(a, bits), reference_eval(b, bits));
            a & b
        }
        Expr::Or(a, b) => {
            let (a, b) = (reference_eval(a, bits), reference_eval(b, bits));
            a | b
        }
        Expr::Ite(h, c0, c1) => {
            let (h, c0, c1) = (
                reference_eval(h, bits),
                reference_eval(c0, bits),
                reference_eval(c1, bits),
            );
            (!h & c0) | (h & c1)
        }
    }
}

pub fn reference_table(f: &Expr, n: usize) -> Vec<bool> {
    (0..1u64 << n)
        .map(|k| {
            let bits: Vec<bool> = (0..n).map(|i| (k >> (n - 1 - i)) & 1 == 1).collect();
            reference_eval(f, &bits)
        })
        .collect()
}

/// Expression with the same function: De Morgan on the top connective,
/// or a double negation.
pub fn equivalent_rewrite(f: &Expr) -> Expr {
    match f {
        Expr::And(a, b) => Expr::not(Expr::or(Expr::not((**a).clone()), Expr::not((**b).clone()))),
        Expr::Or(a, b) => Expr::not(Expr::and(
            Expr::not((**a).clone()),
            Expr::not((**b).clone()),
        )),
        Expr::Ite(h, c0, c1) => Expr::or(
            Expr::and(Expr::not((**h).clone()), (**c0).clone()),
            Expr::and((**h).clone(), (**c1).clone()),
        ),
        other => Expr::not(Expr::not(other.clone())),
    }
}

pub const SUITE_SEED: u64 = 0x5eed_2024;

/// The fixed randomized suite: `(f, n)` with `n <= 6`.
pub fn random_suite(count: usize, seed: u64) -> Vec<(Expr, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.gen_range(1..=6);
            let depth = rng.gen_range(2..=6);
            (random_expr(&mut rng, n, depth), n)
        })
        .collect()
}

/// Minimal check of the DOT subset we emit:
///   digraph ID { (ID [attrs];  |  ID -> ID [attrs]?;)* }
/// Returns `(nodes, edges)` or a description of the first problem.
pub fn parse_dot(text: &str) -> Result<(usize, usize), String> {
    let body = text
        .trim()
        .strip_prefix("digraph")
        .ok_or("missing digraph keyword")?
        .trim_start();
    let open = body.find('{').ok_or("missing '{'")?;
    let name = body[..open].trim();
    if !is_id(name) {
        return Err(format!("bad graph id {name:?}"));
    }
    let inner = body[open + 1..]
        .strip_suffix('}')
        .ok_or("missing closing '}'")?;
    let (mut nodes, mut edges) = (0, 0);
    for stmt in inner.split(";\n").map(str::trim).filter(|s| !s.is_empty()) {
        let stmt = stmt.trim_end_matches(';');
        let (head, attrs) = match stmt.find('[') {
            Some(i) => (stmt[..i].trim(), Some(&stmt[i..])),
            None => (stmt, None),
        };
        if let Some(attrs) = attrs {
            let a = attrs
                .strip_prefix('[')
                .and_then(|a| a.strip_suffix(']'))
                .ok_or("bad attr list")?;
            for pair in a.split(", ") {
                let (k, v) = pair
                    .split_once('=')
                    .ok_or(format!("bad attribute {pair:?}"))?;
                let quoted = v.len() >= 2 && v.starts_with('"') && v.ends_with('"');
                if !is_id(k.trim()) || !(is_id(v) || quoted) {
                    return Err(format!("bad attribute {pair:?}"));
                }
            }
        }
        match head.split_once("->") {
            Some((a, b)) if is_id(a.trim()) && is_id(b.trim()) => edges += 1,
            None if is_id(head) => nodes += 1,
            _ => return Err(format!("bad statement {stmt:?}")),
        }
    }
    Ok((nodes, edges))
}

fn is_id(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}
