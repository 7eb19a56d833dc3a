use g2tractor::forms::{basis_masks, hook, wedge, KForm, N};
use g2tractor::g2core::standard_exact;
use g2tractor::scalars::{ExactScalar as E, Scalar};
use proptest::prelude::*;

fn scalar() -> impl Strategy<Value = E> {
    prop_oneof![
        Just(E::zero()),
        (-6i64..=6).prop_map(E::from_integer),
        (-9i64..=9, 1i64..=6, -4i64..=4, 1i64..=5).prop_map(|(p, q, r, s)| E::from_parts(p, q, r, s)),
    ]
}

fn nonzero() -> impl Strategy<Value = E> {
    scalar().prop_filter("nonzero", |x| !x.is_zero())
}

fn vector() -> impl Strategy<Value = Vec<E>> {
    prop::collection::vec(scalar(), N)
}

fn form(deg: usize) -> impl Strategy<Value = KForm<E>> {
    prop::collection::vec(scalar(), basis_masks(N, deg).len()).prop_map(move |c| KForm::from_components(N, deg, c))
}

fn any_form() -> impl Strategy<Value = KForm<E>> {
    (0usize..=3).prop_flat_map(form)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn field_axioms(a in scalar(), b in scalar(), c in scalar()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&(&a - &b) + &b, a.clone());
        prop_assert_eq!(&a + &(-&a), E::zero());
    }

    #[test]
    fn division_inverts_multiplication(a in scalar(), b in nonzero()) {
        prop_assert_eq!(&(&a / &b) * &b, a);
        prop_assert!(b.checked_div(&E::zero()).is_err());
    }

    #[test]
    fn order_matches_floats(a in scalar(), b in scalar()) {
        if (a.to_f64() - b.to_f64()).abs() > 1e-9 {
            prop_assert_eq!(a < b, a.to_f64() < b.to_f64());
        }
        let f = a.to_f64();
        prop_assert_eq!(a.signum(), if f > 0.0 { 1 } else if f < 0.0 { -1 } else { 0 });
    }

    #[test]
    fn square_roots_of_squares(a in scalar()) {
        let sq = &a * &a;
        let r = sq.try_sqrt().expect("a square has a root");
        prop_assert_eq!(&r * &r, sq);
        prop_assert!(r.signum() >= 0);
    }

    #[test]
    fn text_roundtrip(a in scalar()) {
        prop_assert_eq!(a.to_string().parse::<E>().unwrap(), a);
    }

    #[test]
    fn wedge_is_graded_commutative(a in any_form(), b in any_form()) {
        let ab = wedge(&a, &b).unwrap();
        let ba = wedge(&b, &a).unwrap();
        let sign = if a.degree() * b.degree() % 2 == 0 { E::one() } else { -E::one() };
        prop_assert_eq!(ab, ba.scale(&sign));
    }

    #[test]
    fn wedge_is_associative(a in form(1), b in form(2), c in form(2)) {
        let left = wedge(&wedge(&a, &b).unwrap(), &c).unwrap();
        let right = wedge(&a, &wedge(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn hook_is_an_antiderivation(v in vector(), a in form(2), b in form(2)) {
        let lhs = hook(&v, &wedge(&a, &b).unwrap());
        let rhs = wedge(&hook(&v, &a), &b).unwrap().add(&wedge(&a, &hook(&v, &b)).unwrap());
        prop_assert_eq!(lhs, rhs);
        prop_assert!(hook(&v, &hook(&v, &a)).is_zero());
    }

    #[test]
    fn hodge_star_pairs_with_the_metric(a in form(3), b in form(3)) {
        let g = standard_exact();
        let lhs = wedge(&b, &g.hodge(&a)).unwrap();
        prop_assert_eq!(lhs, g.vol.scale(&g.metric.inner_form(&b, &a)));
        prop_assert_eq!(g.hodge(&g.hodge(&a)), a);
    }

    #[test]
    fn decompositions_reconstruct(a in form(2), psi in form(3)) {
        let g = standard_exact();
        let (v, m) = g.decompose2(&a);
        prop_assert_eq!(g.iota2_7(&v).add(&m), a);
        prop_assert!(g.pi2_7(&m).iter().all(|x| x.is_zero()));
        let (c, w, s) = g.decompose3(&psi);
        prop_assert_eq!(g.recompose3(&c, &w, &s), psi.clone());
        prop_assert_eq!(g.pi3_7(&psi), g.pi3_7_via_wedge(&psi));
    }

    #[test]
    fn cross_product_identities(x in vector(), y in vector()) {
        let g = standard_exact();
        let xy = g.cross(&x, &y);
        prop_assert_eq!(xy.clone(), g.cross(&y, &x).into_iter().map(|c| -c).collect::<Vec<_>>());
        prop_assert!(g.inner(&xy, &x).is_zero());
        let gram = g.inner(&x, &x) * g.inner(&y, &y) - g.inner(&x, &y) * g.inner(&x, &y);
        prop_assert_eq!(g.inner(&xy, &xy), gram);
    }

    #[test]
    fn form_json_roundtrip(a in any_form()) {
        let back = KForm::<E>::from_json(N, a.degree(), &a.to_json()).unwrap();
        prop_assert_eq!(back, a);
    }
}
