use num_complex::Complex64;
use proptest::prelude::*;
use rmcalc::algops::{alg_add, alg_mul, Strategy as Route};
use rmcalc::bipoly::{int, rat, BiPoly, Rational};
use rmcalc::encodings::{atomic, marcenko_pastur, semicircle};
use rmcalc::numeric::{real_roots, roots};
use rmcalc::oplaws::compress;

fn bipoly(max_du: usize, max_dv: usize) -> impl Strategy<Value = BiPoly> {
    prop::collection::vec(prop::collection::vec(-3i64..=3, 1..=max_dv + 1), 1..=max_du + 1).prop_map(|rows| {
        BiPoly::from_matrix("u", "v", rows.into_iter().map(|r| r.into_iter().map(int).collect()).collect())
    })
}

/// Nonzero, of degree at least one in `u`, with a nonzero constant row.
fn proper(max_du: usize) -> impl Strategy<Value = BiPoly> {
    bipoly(max_du, 2).prop_filter("needs a root in u", |p| p.deg_u().unwrap_or(0) >= 1 && !p.row(0).is_zero())
}

fn close(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() <= 1e-12 * (1.0 + a.norm().max(b.norm()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn canonicalize_is_idempotent(p in bipoly(3, 3)) {
        prop_assume!(!p.is_zero());
        let c = p.canonicalize().unwrap();
        prop_assert_eq!(c.canonicalize().unwrap(), c.clone());
        prop_assert!(c.is_canonical());
        prop_assert!(p.equivalent(&c));
    }

    #[test]
    fn product_commutes(a in bipoly(2, 2), b in bipoly(2, 2)) {
        prop_assume!(!a.is_zero() && !b.is_zero());
        let (ab, ba) = (&a * &b, &b * &a);
        prop_assert_eq!(&ab, &ba);
        prop_assert!(ab.equivalent(&ba));
    }

    #[test]
    fn slices_respect_ring_operations(a in bipoly(3, 2), b in bipoly(3, 2), re in -2.0f64..2.0, im in 0.1f64..2.0) {
        let z0 = Complex64::new(re, im);
        let sum = &a + &b;
        let prod = &a * &b;
        let (Ok(sa), Ok(sb)) = (a.eval_slice(z0), b.eval_slice(z0)) else { return Ok(()) };
        prop_assume!(!sa.degree_dropped && !sb.degree_dropped);
        let ps = prod.eval_slice(z0).unwrap();
        let mut want = vec![Complex64::new(0.0, 0.0); sa.coeffs.len() + sb.coeffs.len() - 1];
        for (i, x) in sa.coeffs.iter().enumerate() {
            for (j, y) in sb.coeffs.iter().enumerate() {
                want[i + j] += x * y;
            }
        }
        prop_assert_eq!(ps.coeffs.len(), want.len());
        for (g, w) in ps.coeffs.iter().zip(&want) {
            prop_assert!(close(*g, *w), "{} vs {}", g, w);
        }
        if let Ok(ss) = sum.eval_slice(z0) {
            for (k, g) in ss.coeffs.iter().enumerate() {
                let w = sa.coeffs.get(k).copied().unwrap_or_default() + sb.coeffs.get(k).copied().unwrap_or_default();
                prop_assert!(close(*g, w));
            }
        }
    }

    #[test]
    fn identity_substitution(p in bipoly(3, 2)) {
        prop_assume!(p.deg_u().unwrap_or(0) >= 1);
        let (u, v, one) = (p.u_var(), p.v_var(), p.constant_like(int(1)));
        let out = p.substitute_rational(&u, &one, &v, &one).unwrap();
        prop_assert_eq!(out, p.canonicalize().unwrap());
    }

    #[test]
    fn algebraic_operations_commute(a in proper(2), b in proper(2)) {
        for f in [alg_add, alg_mul] {
            let (ab, ba) = (f(&a, &b, Route::Auto), f(&b, &a, Route::Auto));
            match (ab, ba) {
                (Ok(x), Ok(y)) => prop_assert!(x.equivalent(&y)),
                (Err(_), Err(_)) => {}
                (x, y) => prop_assert!(false, "one order failed: {:?} {:?}", x.err(), y.err()),
            }
        }
    }

    #[test]
    fn adding_the_zero_root_is_neutral(a in proper(3)) {
        let zero_root = a.u_var();
        let out = alg_add(&a, &zero_root, Route::Resultant).unwrap();
        prop_assert!(out.equivalent(&a));
    }

    #[test]
    fn degree_bound(a in proper(3), b in proper(2)) {
        let (da, db) = (a.deg_u().unwrap(), b.deg_u().unwrap());
        for f in [alg_add, alg_mul] {
            if let Ok(out) = f(&a, &b, Route::Resultant) {
                prop_assert!(out.deg_u().unwrap() <= da * db);
            }
        }
    }
}

/// At a real zero of the discriminant two roots of the slice meet; halfway
/// between consecutive zeros they are well separated.
#[test]
fn discriminant_zeros_are_collisions() {
    let corpus = [
        semicircle(),
        marcenko_pastur(&int(2)).unwrap(),
        marcenko_pastur(&rat(1, 2)).unwrap(),
        compress(&atomic(&[(rat(1, 2), int(0)), (rat(1, 2), int(1))]).unwrap(), &rat(2, 5)).unwrap(),
    ];
    let gap = |l: &BiPoly, x: f64| {
        let rs = roots(&l.eval_v(&Rational::from_float(x).unwrap()));
        let mut g = f64::INFINITY;
        for i in 0..rs.len() {
            for j in i + 1..rs.len() {
                g = g.min((rs[i] - rs[j]).norm());
            }
        }
        g
    };
    for d in &corpus {
        let l = d.poly();
        let disc = real_roots(&l.discriminant_u().unwrap());
        let lc = l.leading_coeff_u();
        let zs: Vec<f64> = disc.into_iter().filter(|x| lc.eval_f64(*x).abs() > 1e-9).collect();
        assert!(!zs.is_empty());
        for x in &zs {
            assert!(gap(l, *x) < 1e-4, "{} at {x}: {}", l.pretty(), gap(l, *x));
        }
        for w in zs.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            if lc.eval_f64(mid).abs() > 1e-6 {
                assert!(gap(l, mid) > 1e-3, "{} at {mid}", l.pretty());
            }
        }
    }
}
