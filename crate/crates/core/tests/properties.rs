mod common;

use bddnet::bnet::{compile, ite_cpt, validate_bdd_shape, BayesNet};
use bddnet::inference::{bernoulli_marginal, propagate};
use bddnet::{build_tree, ite, parse, truth_table, Assignment, BddManager, DecisionTree, Expr};
use num_rational::BigRational;
use proptest::prelude::*;

use common::{brute_force_marginal, reference_table};

const MAX_VARS: usize = 6;

fn arb_expr(n: usize) -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        any::<bool>().prop_map(Expr::Const),
        (0..n).prop_map(Expr::Var),
        (0..n).prop_map(Expr::Var),
    ];
    leaf.prop_recursive(5, 48, 3, |inner| {
        prop_oneof![
            inner.clone().prop_map(Expr::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::or(a, b)),
            (inner.clone(), inner.clone(), inner).prop_map(|(h, c0, c1)| Expr::ite(h, c0, c1)),
        ]
    })
}

fn arb_case() -> impl Strategy<Value = (Expr, usize)> {
    (1..=MAX_VARS).prop_flat_map(|n| (arb_expr(n), Just(n)))
}

fn check_tree_ite(t: &DecisionTree, bits: &[bool]) -> Result<bool, TestCaseError> {
    match t {
        DecisionTree::Leaf(b) => Ok(*b),
        DecisionTree::Branch { var, low, high } => {
            let lo = check_tree_ite(low, bits)?;
            let hi = check_tree_ite(high, bits)?;
            let here = t.evaluate(&Assignment::new(bits.to_vec())).unwrap();
            prop_assert_eq!(here, ite(bits[*var], lo, hi));
            Ok(here)
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn print_then_parse_is_identity((f, _n) in arb_case()) {
        prop_assert_eq!(parse(&f.to_string()).unwrap(), f);
    }

    #[test]
    fn truth_table_matches_reference((f, n) in arb_case()) {
        prop_assert_eq!(truth_table(&f, n).unwrap().bits(), reference_table(&f, n));
    }

    #[test]
    fn cofactor_is_shannon_expansion((f, n) in arb_case(), var in 0..MAX_VARS) {
        let var = var % n;
        let (lo, hi) = bddnet::shannon_expand(&f, var, n).unwrap();
        prop_assert!(!lo.mentions(var) && !hi.mentions(var));
        for x in Assignment::all(n) {
            let h = x.bits()[var];
            prop_assert_eq!(f.eval(&x).unwrap(), ite(h, lo.eval(&x).unwrap(), hi.eval(&x).unwrap()));
        }
    }

    #[test]
    fn tree_leaves_are_truth_table((f, n) in arb_case()) {
        let t = build_tree(&f, n).unwrap();
        prop_assert_eq!(t.leaves(), reference_table(&f, n));
        prop_assert_eq!(t.node_count(), (1 << (n + 1)) - 1);
        for x in Assignment::all(n) {
            check_tree_ite(&t, x.bits())?;
        }
    }

    #[test]
    fn bdd_agrees_with_oracle((f, n) in arb_case()) {
        let mut m = BddManager::new(n).unwrap();
        let r = m.from_expr(&f).unwrap();
        let table = reference_table(&f, n);
        for (k, x) in Assignment::all(n).enumerate() {
            prop_assert_eq!(m.evaluate(r, &x).unwrap(), table[k]);
        }
        let ones = table.iter().filter(|&&b| b).count() as u128;
        prop_assert_eq!(m.sat_count(r).unwrap(), ones);
        let tree = build_tree(&f, n).unwrap();
        prop_assert!(m.node_count(r).unwrap().total <= tree.node_count());
        prop_assert_eq!(m.from_tree(&tree).unwrap(), r);
    }

    #[test]
    fn canonical_under_any_order((f, n) in arb_case(), g_seed in any::<u64>(), perm_seed in any::<u64>()) {
        use rand::{seq::SliceRandom, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(perm_seed);
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        let mut grng = rand_chacha::ChaCha8Rng::seed_from_u64(g_seed);
        let g = bddnet::expr::random_expr(&mut grng, n, 4);
        let mut m = BddManager::with_order(order).unwrap();
        let a = m.from_expr(&f).unwrap();
        let b = m.from_expr(&g).unwrap();
        prop_assert_eq!(m.equal(a, b).unwrap(), reference_table(&f, n) == reference_table(&g, n));
        for x in Assignment::all(n) {
            prop_assert_eq!(m.evaluate(a, &x).unwrap(), f.eval(&x).unwrap());
        }
    }

    #[test]
    fn compile_preserves_counts_and_shape((f, n) in arb_case()) {
        let mut m = BddManager::new(n).unwrap();
        let r = m.from_expr(&f).unwrap();
        let count = m.node_count(r).unwrap();
        let net = compile(&m, r).unwrap();
        prop_assert_eq!(net.if_then_else_count(), count.internal);
        prop_assert_eq!(net.square_count(), count.total - count.internal);
        prop_assert_eq!(net.arrow_count(), 2 * count.internal);
        prop_assert!(net.topological_order().is_ok());
        let report = validate_bdd_shape(&net);
        prop_assert!(report.pass);
        prop_assert_eq!(report.note.is_some(), count.internal == 0);
    }

    #[test]
    fn propagation_is_deterministic_and_correct((f, n) in arb_case()) {
        let mut m = BddManager::new(n).unwrap();
        let r = m.from_expr(&f).unwrap();
        let net = compile(&m, r).unwrap();
        for x in Assignment::all(n) {
            let marg = propagate(&net, &x).unwrap();
            for row in marg.rows() {
                prop_assert!(row.iter().all(|&p| p == 0.0 || p == 1.0));
                prop_assert_eq!(row.iter().sum::<f64>(), 1.0);
            }
            prop_assert_eq!(marg.p_true(net.root) == 1.0, f.eval(&x).unwrap());
        }
    }

    #[test]
    fn net_json_round_trip((f, n) in arb_case()) {
        let mut m = BddManager::new(n).unwrap();
        let r = m.from_expr(&f).unwrap();
        let net = compile(&m, r).unwrap();
        let back = BayesNet::from_json_str(&net.to_json_string()).unwrap();
        prop_assert_eq!(validate_bdd_shape(&back), validate_bdd_shape(&net));
        for x in Assignment::all(n) {
            prop_assert_eq!(propagate(&back, &x).unwrap(), propagate(&net, &x).unwrap());
        }
    }

    #[test]
    fn marginal_matches_brute_force((f, n) in arb_case(), raw in prop::collection::vec(0.0f64..=1.0, MAX_VARS)) {
        let p = &raw[..n];
        let mut m = BddManager::new(n).unwrap();
        let r = m.from_expr(&f).unwrap();
        let got = bernoulli_marginal(&m, r, p).unwrap();
        prop_assert!((got - brute_force_marginal(&f, p)).abs() <= 1e-12);
    }

    #[test]
    fn marginal_exact_for_dyadic_inputs((f, n) in arb_case(), nums in prop::collection::vec(0u32..=8, MAX_VARS)) {
        // p_i = k/8 is exactly representable, so the float path must be exact too
        let exact: Vec<BigRational> = nums[..n].iter().map(|&k| BigRational::new(k.into(), 8.into())).collect();
        let floats: Vec<f64> = nums[..n].iter().map(|&k| f64::from(k) / 8.0).collect();
        let mut m = BddManager::new(n).unwrap();
        let r = m.from_expr(&f).unwrap();
        let rational = bernoulli_marginal(&m, r, &exact).unwrap();
        let mut want = BigRational::new(0.into(), 1.into());
        for x in Assignment::all(n) {
            if f.eval(&x).unwrap() {
                let mut w = BigRational::new(1.into(), 1.into());
                for (b, p) in x.bits().iter().zip(&exact) {
                    w *= if *b { p.clone() } else { BigRational::new(1.into(), 1.into()) - p };
                }
                want += w;
            }
        }
        prop_assert_eq!(&rational, &want);
        let float = bernoulli_marginal(&m, r, &floats).unwrap();
        prop_assert_eq!(float, brute_force_marginal(&f, &floats));
    }

    #[test]
    fn marginal_at_corners((f, n) in arb_case()) {
        let mut m = BddManager::new(n).unwrap();
        let r = m.from_expr(&f).unwrap();
        for value in [false, true] {
            let p = vec![if value { 1.0 } else { 0.0 }; n];
            let expect = f.eval(&Assignment::new(vec![value; n])).unwrap();
            prop_assert_eq!(bernoulli_marginal(&m, r, &p).unwrap(), if expect { 1.0 } else { 0.0 });
        }
    }
}

#[test]
fn ite_cpt_is_kronecker_delta() {
    let mut checks = 0;
    for h in [false, true] {
        let cpt = ite_cpt(h);
        for c0 in [false, true] {
            for c1 in [false, true] {
                for a in [false, true] {
                    let row = usize::from(c0) * 2 + usize::from(c1);
                    let delta = if a == ite(h, c0, c1) { 1.0 } else { 0.0 };
                    assert_eq!(cpt.prob(row, usize::from(a)), delta);
                    checks += 1;
                }
            }
        }
    }
    assert_eq!(checks, 16);
}
