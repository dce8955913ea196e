//! Boolean expressions compiled to reduced ordered BDDs, and the reading of
//! any BDD as a Bayesian network of deterministic if-then-else nodes.
//!
//! The pipeline is `parse` → [`tree::build_tree`] / [`bdd::BddManager::from_expr`]
//! → [`bnet::compile`] → [`inference::check_equivalence`].

pub mod bdd;
pub mod bnet;
pub mod cli;
pub mod expr;
pub mod inference;
pub mod tree;

pub use bdd::{BddError, BddManager, BddRef};
pub use bnet::{compile, ite_cpt, square_node, validate_bdd_shape, BayesNet, BnNode, Cpt};
pub use expr::{ite, parse, parse_with_arity, truth_table, Assignment, Expr, TruthTable};
pub use inference::{bernoulli_marginal, check_equivalence, propagate, CheckOptions};
pub use tree::{build_tree, shannon_expand, DecisionTree};
