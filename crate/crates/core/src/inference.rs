//! Exact inference on compiled nets.
//!
//! With every parameter fixed, each table row is a point mass, so a single
//! parents-first sweep gives exact marginals. [`check_equivalence`] runs that
//! sweep for every assignment and compares the root against the BDD (and,
//! optionally, the source expression).

use std::ops::{Add, Mul, Sub};

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::bdd::{BddError, BddManager, BddRef};
use crate::bnet::{BayesNet, BnetError, NodeKind};
use crate::expr::{Assignment, Expr};

/// Default arity above which equivalence is sampled instead of exhaustive.
pub const DEFAULT_CAP: usize = 20;
/// Assignments drawn in sampled mode unless overridden.
pub const DEFAULT_SAMPLES: usize = 1 << 16;
/// Counterexamples kept in a report; the total is in `mismatches`.
pub const MAX_COUNTEREXAMPLES: usize = 64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InferenceError {
    #[error("assignment has {found} bits, net has {expected} parameters")]
    ArityMismatch { expected: usize, found: usize },
    #[error(transparent)]
    Net(#[from] BnetError),
    #[error("node {node}: {detail}")]
    Shape { node: usize, detail: String },
    #[error("probability {value} for x{} is outside [0, 1]", .var + 1)]
    ProbabilityOutOfRange { var: usize, value: String },
    #[error(transparent)]
    Bdd(#[from] BddError),
}

/// Marginal distribution of every node, indexed by node id.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeMarginals {
    rows: Vec<Vec<f64>>,
}

impl NodeMarginals {
    pub fn get(&self, node: usize) -> &[f64] {
        &self.rows[node]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    /// `P(node = 1)`.
    pub fn p_true(&self, node: usize) -> f64 {
        self.rows[node].get(1).copied().unwrap_or(0.0)
    }
}

/// Forward propagation with every parameter `x_i` fixed.
pub fn propagate(net: &BayesNet, x: &Assignment) -> Result<NodeMarginals, InferenceError> {
    if x.len() != net.n {
        return Err(InferenceError::ArityMismatch {
            expected: net.n,
            found: x.len(),
        });
    }
    let order = net.topological_order()?;
    let mut rows: Vec<Vec<f64>> = vec![Vec::new(); net.nodes.len()];
    for id in order {
        let node = &net.nodes[id];
        let shape = |detail: String| InferenceError::Shape { node: id, detail };
        let cpt = match &node.kind {
            NodeKind::Square { prior, .. } => prior,
            NodeKind::IfThenElse { param, cpt } => {
                let h = x
                    .get(*param)
                    .ok_or_else(|| shape(format!("parameter x{} missing", param + 1)))?;
                &cpt[usize::from(h)]
            }
        };
        if cpt.parent_arity() != node.parents.len() {
            return Err(shape(format!(
                "table has {} rows for {} parents",
                cpt.rows().len(),
                node.parents.len()
            )));
        }
        if let Some(&p) = node.parents.iter().find(|&&p| rows[p].len() != 2) {
            return Err(shape(format!("parent {p} is not two-state")));
        }
        // P(a) = sum over parent states s of P(a | s) * prod_i P(parent_i = s_i)
        let k = node.parents.len();
        let mut out = vec![0.0; cpt.states()];
        for s in 0..1usize << k {
            let weight: f64 = node
                .parents
                .iter()
                .enumerate()
                .map(|(i, &p)| rows[p][(s >> (k - 1 - i)) & 1])
                .product();
            if weight == 0.0 {
                continue;
            }
            for (a, slot) in out.iter_mut().enumerate() {
                *slot += cpt.prob(s, a) * weight;
            }
        }
        rows[id] = out;
    }
    Ok(NodeMarginals { rows })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckMode {
    Exhaustive,
    Sampled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CheckOptions {
    /// Largest arity checked exhaustively.
    pub cap: usize,
    pub samples: usize,
    pub seed: u64,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            cap: DEFAULT_CAP,
            samples: DEFAULT_SAMPLES,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EquivalenceReport {
    pub checked: u64,
    pub mode: CheckMode,
    pub mismatches: u64,
    #[serde(serialize_with = "assignments_as_bits")]
    pub counterexamples: Vec<Assignment>,
}

fn assignments_as_bits<S: serde::Serializer>(xs: &[Assignment], s: S) -> Result<S::Ok, S::Error> {
    let bits: Vec<Vec<u8>> = xs
        .iter()
        .map(|x| x.bits().iter().map(|&b| u8::from(b)).collect())
        .collect();
    bits.serialize(s)
}

impl EquivalenceReport {
    pub fn passed(&self) -> bool {
        self.mismatches == 0
    }
}

/// Compares the root marginal of `net` with the BDD at `r` (and with `f`
/// when given) on every assignment, or on a seeded sample when the arity
/// exceeds `opts.cap`.
pub fn check_equivalence(
    m: &BddManager,
    r: BddRef,
    net: &BayesNet,
    f: Option<&Expr>,
    opts: &CheckOptions,
) -> Result<EquivalenceReport, InferenceError> {
    let n = m.arity();
    if net.n != n {
        return Err(InferenceError::ArityMismatch {
            expected: n,
            found: net.n,
        });
    }
    // surface structural problems once instead of per assignment
    net.topological_order()?;
    m.node(r)?;

    let disagrees = |x: &Assignment| -> Result<bool, InferenceError> {
        let marginals = propagate(net, x)?;
        let expected = m.evaluate(r, x)?;
        let target = if expected { 1.0 } else { 0.0 };
        let from_expr = f.map_or(expected, |f| f.eval_bits(x.bits()));
        Ok(marginals.p_true(net.root) != target || from_expr != expected)
    };

    let collect_bad = |xs: Vec<Assignment>| {
        xs.into_par_iter()
            .map(|x| disagrees(&x).map(|d| d.then_some(x)))
            .filter_map(Result::transpose)
            .collect::<Result<Vec<_>, InferenceError>>()
    };
    if n <= opts.cap {
        let bad = (0..1u64 << n)
            .into_par_iter()
            .map(|k| {
                let x = Assignment::from_index(k, n);
                disagrees(&x).map(|d| d.then_some(x))
            })
            .filter_map(Result::transpose)
            .collect::<Result<Vec<_>, _>>()?;
        Ok(report(1 << n, CheckMode::Exhaustive, bad))
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        let xs: Vec<Assignment> = (0..opts.samples)
            .map(|_| Assignment::new((0..n).map(|_| rng.gen()).collect()))
            .collect();
        let checked = xs.len() as u64;
        Ok(report(checked, CheckMode::Sampled, collect_bad(xs)?))
    }
}

fn report(checked: u64, mode: CheckMode, mut bad: Vec<Assignment>) -> EquivalenceReport {
    let mismatches = bad.len() as u64;
    bad.truncate(MAX_COUNTEREXAMPLES);
    EquivalenceReport {
        checked,
        mode,
        mismatches,
        counterexamples: bad,
    }
}

/// Flips the root's output at `x` by reversing the table row it uses there.
/// Test hook for the fault-injection path of the verifier.
#[doc(hidden)]
pub fn inject_fault(net: &mut BayesNet, x: &Assignment) -> Result<(), InferenceError> {
    let marginals = propagate(net, x)?;
    let root = net.root;
    let row = net.nodes[root].parents.iter().fold(0, |acc, &p| {
        (acc << 1) | usize::from(marginals.p_true(p) == 1.0)
    });
    match &mut net.nodes[root].kind {
        NodeKind::IfThenElse { param, cpt } => {
            let h = x.get(*param).unwrap_or(false);
            cpt[usize::from(h)].flip_row(row);
        }
        NodeKind::Square { prior, .. } => prior.flip_row(0),
    }
    Ok(())
}

/// Probability that `f(X) = 1` when each `X_i` is an independent Bernoulli
/// variable with `P(X_i = 1) = p[i]`.
///
/// One memoized bottom-up pass: terminals are 0 and 1, and a node testing
/// `x_v` is `(1 - p_v) * low + p_v * high`. Levels skipped along an edge need
/// no correction since each marginalizes to a factor of 1.
pub fn bernoulli_marginal<W>(m: &BddManager, r: BddRef, p: &[W]) -> Result<W, InferenceError>
where
    W: Clone
        + Zero
        + One
        + PartialOrd
        + Add<Output = W>
        + Sub<Output = W>
        + Mul<Output = W>
        + std::fmt::Debug,
{
    let n = m.arity();
    if p.len() != n {
        return Err(InferenceError::ArityMismatch {
            expected: n,
            found: p.len(),
        });
    }
    for (var, pi) in p.iter().enumerate() {
        // NaN fails both comparisons
        if !(*pi >= W::zero() && *pi <= W::one()) {
            return Err(InferenceError::ProbabilityOutOfRange {
                var,
                value: format!("{pi:?}"),
            });
        }
    }
    let mut value: Vec<Option<W>> = vec![None; m.arena_len()];
    value[0] = Some(W::zero());
    value[1] = Some(W::one());
    // a node's children always have smaller ids, so ascending order is bottom-up
    for id in m.reachable(r)?.into_iter().filter(|&id| id > 1) {
        let node = m.node(m.node_ref(id).ok_or(BddError::UnknownNode(id))?)?;
        let pv = p[m.var_at_level(node.level)].clone();
        let lo = value[node.low].clone().expect("child evaluated first");
        let hi = value[node.high].clone().expect("child evaluated first");
        value[id] = Some((W::one() - pv.clone()) * lo + pv * hi);
    }
    Ok(value[r.id()].clone().expect("root evaluated"))
}
