use num_traits::Zero;
use proptest::prelude::*;
use rmcalc::bipoly::{int, rat, Rational};
use rmcalc::density::{default_range, density_grid};
use rmcalc::dsl::parse;
use rmcalc::encodings::{atomic, marcenko_pastur, semicircle, EncodedDistribution};
use rmcalc::oplaws::{add_atomic_wishart, compress, free_add, mobius, scale, square, MobiusParams};

fn half_half() -> EncodedDistribution {
    atomic(&[(rat(1, 2), int(0)), (rat(1, 2), int(1))]).unwrap()
}

fn mass(d: &EncodedDistribution) -> f64 {
    let (lo, hi) = default_range(d).unwrap();
    density_grid(d, lo, hi, 800).unwrap().total_mass
}

/// One expression per node kind, built on the generators.
const LAW_CORPUS: [&str; 16] = [
    "mobius(wigner, 1, 2, 0, 1)",
    "inv(shift(wishart(1/2), 1))",
    "scale(wishart(2), 3/2)",
    "shift(wigner, -1)",
    "square(wigner)",
    "blockdiag(wigner, atomic(1@3), 1/2)",
    "corner(atomic(1/2@0, 1/2@1), 2, 1)",
    "addatomicwishart(wigner, 1/2, 1@1)",
    "mulwishart(atomic(1/2@1, 1/2@2), 1/2)",
    "infoplusnoise(atomic(1@1), 1/2, 1)",
    "wigner + wishart(1/2)",
    "wishart(2) * atomic(1/2@1, 1/2@2)",
    "compress(wishart(1/2), 1/2)",
    "wishartcov(atomic(1@1), atomic(1/2@1, 1/2@2), 1/2)",
    "transposeswap(wishart(1/2), 1/2)",
    "identity + wigner",
];

#[test]
fn laws_preserve_canonical_normalized_polynomials() {
    for s in LAW_CORPUS {
        let d = parse(s).unwrap().distribution().unwrap_or_else(|e| panic!("{s}: {e}"));
        assert!(d.poly().is_canonical(), "{s}");
        assert!(!d.poly().is_zero(), "{s}");
        let m = mass(&d);
        assert!((m - 1.0).abs() <= 1e-3, "{s}: mass {m}");
    }
}

#[test]
fn compressions_compose() {
    for d in [half_half(), marcenko_pastur(&rat(1, 2)).unwrap(), semicircle()] {
        for (c1, c2) in [(rat(1, 2), rat(2, 3)), (rat(3, 4), rat(2, 5))] {
            let twice = compress(&compress(&d, &c1).unwrap(), &c2).unwrap();
            let once = compress(&d, &(&c1 * &c2)).unwrap();
            assert!(twice.equivalent(&once), "{} with {c1}, {c2}", d.poly().pretty());
        }
    }
}

#[test]
fn squaring_ignores_sign_of_symmetric_laws() {
    let sym = atomic(&[(rat(1, 2), int(-1)), (rat(1, 2), int(1))]).unwrap();
    for d in [semicircle(), sym] {
        let flipped = scale(&d, &int(-1)).unwrap();
        assert!(square(&d).unwrap().equivalent(&square(&flipped).unwrap()));
    }
}

#[test]
fn opposite_atomic_wishart_additions_do_not_cancel() {
    let w = semicircle();
    let c = rat(1, 2);
    let there = add_atomic_wishart(&w, &c, &[(int(1), int(1))]).unwrap();
    let back = add_atomic_wishart(&there, &c, &[(int(1), int(-1))]).unwrap();
    assert!(!back.equivalent(&w));
}

#[test]
fn free_addition_is_associative() {
    let (a, b, c) = (semicircle(), marcenko_pastur(&rat(1, 2)).unwrap(), atomic(&[(int(1), int(1))]).unwrap());
    let left = free_add(&free_add(&a, &b).unwrap(), &c).unwrap();
    let right = free_add(&a, &free_add(&b, &c).unwrap()).unwrap();
    assert!(left.equivalent(&right));
    let (a, b, c) = (semicircle(), semicircle(), half_half());
    let left = free_add(&free_add(&a, &b).unwrap(), &c).unwrap();
    let right = free_add(&a, &free_add(&b, &c).unwrap()).unwrap();
    assert!(left.equivalent(&right));
}

fn small_rational() -> impl Strategy<Value = Rational> {
    (-3i64..=3, 1i64..=3).prop_map(|(n, d)| rat(n, d))
}

fn invertible() -> impl Strategy<Value = MobiusParams> {
    (small_rational(), small_rational(), small_rational(), small_rational())
        .prop_map(|(p, q, r, s)| MobiusParams::new(p, q, r, s))
        .prop_filter("invertible", |t| !t.det().is_zero() && !(t.r == int(0) && t.s == int(0)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn mobius_maps_compose(m1 in invertible(), m2 in invertible()) {
        for d in [semicircle(), marcenko_pastur(&int(2)).unwrap(), half_half()] {
            let step = mobius(&d, &m1).and_then(|x| mobius(&x, &m2));
            let direct = mobius(&d, &m2.compose(&m1));
            match (step, direct) {
                (Ok(x), Ok(y)) => prop_assert!(x.equivalent(&y)),
                (x, y) => prop_assert!(x.is_err() && y.is_err(), "{:?} / {:?}", x.err(), y.err()),
            }
        }
    }
}
