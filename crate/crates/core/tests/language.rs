use std::collections::BTreeSet;

use proptest::prelude::*;
use rmcalc::bipoly::{rat, Rational};
use rmcalc::dsl::{parse, Expr, NODE_NAMES};
use rmcalc::oplaws::MobiusParams;

fn scalar() -> impl Strategy<Value = Rational> {
    (-9i64..=9, 1i64..=7).prop_map(|(n, d)| rat(n, d))
}

fn positive() -> impl Strategy<Value = Rational> {
    (1i64..=9, 1i64..=7).prop_map(|(n, d)| rat(n, d))
}

fn atoms() -> impl Strategy<Value = Vec<(Rational, Rational)>> {
    prop::collection::vec((positive(), scalar()), 1..4)
}

fn expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        Just(Expr::Identity),
        Just(Expr::Wigner),
        positive().prop_map(Expr::Wishart),
        atoms().prop_map(Expr::Atomic),
    ];
    leaf.prop_recursive(3, 24, 3, |inner| {
        let b = |e: Expr| Box::new(e);
        prop_oneof![
            (inner.clone(), scalar(), scalar(), scalar(), scalar())
                .prop_map(move |(e, p, q, r, s)| Expr::Mobius(b(e), MobiusParams::new(p, q, r, s))),
            inner.clone().prop_map(move |e| Expr::Inv(b(e))),
            (inner.clone(), scalar()).prop_map(move |(e, a)| Expr::Scale(b(e), a)),
            (inner.clone(), scalar()).prop_map(move |(e, a)| Expr::Shift(b(e), a)),
            inner.clone().prop_map(move |e| Expr::Square(b(e))),
            (inner.clone(), inner.clone(), positive()).prop_map(move |(x, y, c)| Expr::BlockDiag(b(x), b(y), c)),
            (inner.clone(), positive(), positive()).prop_map(move |(e, c, a)| Expr::Corner(b(e), c, a)),
            (inner.clone(), positive(), atoms()).prop_map(move |(e, c, t)| Expr::AddAtomicWishart(b(e), c, t)),
            (inner.clone(), positive()).prop_map(move |(e, c)| Expr::MulWishart(b(e), c)),
            (inner.clone(), positive(), positive()).prop_map(move |(e, c, s)| Expr::InfoPlusNoise(b(e), c, s)),
            (inner.clone(), inner.clone()).prop_map(move |(x, y)| Expr::FreeAdd(b(x), b(y))),
            (inner.clone(), inner.clone()).prop_map(move |(x, y)| Expr::FreeMul(b(x), b(y))),
            (inner.clone(), positive()).prop_map(move |(e, c)| Expr::Compress(b(e), c)),
            (inner.clone(), inner.clone(), positive()).prop_map(move |(x, y, c)| Expr::WishartCov(b(x), b(y), c)),
            (inner, positive()).prop_map(move |(e, c)| Expr::TransposeSwap(b(e), c)),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn printing_then_parsing_is_stable(e in expr()) {
        let printed = e.to_string();
        let back = parse(&printed).unwrap();
        prop_assert_eq!(&back, &e, "{}", printed);
        prop_assert_eq!(parse(&back.to_string()).unwrap(), back);
    }
}

/// Every node kind is reachable from text and evaluates to a distribution.
#[test]
fn every_node_is_reachable() {
    let examples = [
        "identity",
        "atomic(1/3@-1, 2/3@2)",
        "wigner",
        "wishart(0.5)",
        "mobius(wigner, 2, 1, 0, 1)",
        "inv(shift(wigner, 3))",
        "scale(wigner, 2)",
        "shift(wishart(2), -1)",
        "square(wigner)",
        "block_diag(wigner, identity, 1/2)",
        "corner(wigner, 2, 1)",
        "add_atomic_wishart(wigner, 1/2, 1@1)",
        "mul_wishart(identity, 1/10)",
        "info_plus_noise(atomic(1@1), 1/2, 1)",
        "free_add(wigner, wishart(2))",
        "free_mul(wishart(2), wishart(1/2))",
        "compress(wishart(1/2), 1/2)",
        "wishart_cov(identity, atomic(1@2), 1/2)",
        "transpose_swap(wishart(1/2), 1/2)",
    ];
    let mut seen = BTreeSet::new();
    for s in examples {
        let e = parse(s).unwrap_or_else(|err| panic!("{s}: {err}"));
        e.distribution().unwrap_or_else(|err| panic!("{s}: {err}"));
        seen.insert(e.node_name());
    }
    let all: BTreeSet<&str> = NODE_NAMES.iter().copied().collect();
    assert_eq!(seen, all);
}
