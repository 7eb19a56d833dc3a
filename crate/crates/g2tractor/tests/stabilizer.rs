use g2tractor::forms::{hook, KForm};
use g2tractor::g2core::{genericity_and_compatibility, standard_exact};
use g2tractor::scalars::{ExactScalar as E, Scalar};
use g2tractor::stabilizer::witnesses::{circle_point, hyperbola_point, reference_s, slopes};
use g2tractor::stabilizer::*;
use std::collections::BTreeSet;

fn members(eps: i8, n: usize) -> Vec<FamilyParam<E>> {
    let ms = slopes(n);
    match eps {
        -1 => ms.iter().map(circle_point).collect(),
        1 => ms
            .iter()
            .enumerate()
            .map(|(i, m)| hyperbola_point(if i % 2 == 0 { Branch::Minus } else { Branch::Plus }, m).unwrap())
            .collect(),
        _ => ms.iter().map(|m| FamilyParam::Parabolic { s: m * &E::from_integer(3) }).collect(),
    }
}

fn k_of(s: &[E], phi: &KForm<E>) -> KForm<E> {
    hook(s, phi).neg()
}

#[test]
fn family_members_are_compatible_and_fix_k() {
    let g = standard_exact();
    for eps in [-1, 0, 1] {
        let s = reference_s(eps);
        let sd = make_stabilizer(&g, &s).unwrap();
        for p in members(eps, 12) {
            let phi = family_member(&sd, &g, &p).unwrap();
            assert!(genericity_and_compatibility(&phi, g.h(), &g.vol).all(), "{p:?}");
            assert_eq!(k_of(&s, &phi), sd.k_form);
            let (abar, b) = p.to_raw();
            assert!(constraint_residual(eps, &abar, &b).is_zero());
            assert_eq!(family_member(&sd, &g, &FamilyParam::Raw { abar, b }).unwrap(), phi);
        }
    }
}

#[test]
fn derivative_at_zero_is_phi_j() {
    let g = standard_exact();
    let cases = [
        (-1, Parameterization::Circle),
        (1, Parameterization::Hyperbolic(Branch::Minus)),
        (1, Parameterization::Hyperbolic(Branch::Plus)),
        (0, Parameterization::Parabolic),
    ];
    for (eps, which) in cases {
        let sd = make_stabilizer(&g, &reference_s(eps)).unwrap();
        assert_eq!(derivative_at_zero(&sd, which).unwrap(), sd.phi_j);
    }
}

#[test]
fn float_derivative_matches_finite_difference() {
    let g = g2tractor::g2core::standard_structure();
    let mut s = vec![0.0; 7];
    s[1] = 1.0;
    s[4] = 0.5;
    let sd = make_stabilizer(&g, &s).unwrap();
    let u = 0.7;
    let h = 1e-6;
    let fd = family_member(&sd, &g, &FamilyParam::circle_angle(u + h))
        .unwrap()
        .sub(&family_member(&sd, &g, &FamilyParam::circle_angle(u - h)).unwrap())
        .scale(&(0.5 / h));
    let an = family_derivative(&sd, &FamilyParam::circle_angle(u)).unwrap();
    assert!(fd.sub(&an).max_abs() < 1e-8);
}

#[test]
fn parabolic_limit_identity() {
    let g = standard_exact();
    let sd = make_stabilizer(&g, &reference_s(0)).unwrap();
    for s in slopes(10) {
        let s = &s * &E::from_integer(7);
        let phi = family_member(&sd, &g, &FamilyParam::Parabolic { s: s.clone() }).unwrap();
        let half = &(&s * &s) * &E::from_ratio(1, 2);
        let res = phi.sub(&g.phi).add(&sd.phi_i.scale(&half)).sub(&sd.phi_j.scale(&s));
        assert!(res.is_zero());
    }
}

#[test]
fn recovery_roundtrip() {
    let g = standard_exact();
    for eps in [-1, 0, 1] {
        let s = reference_s(eps);
        let sd = make_stabilizer(&g, &s).unwrap();
        for p in members(eps, 50) {
            let phi = family_member(&sd, &g, &p).unwrap();
            let r = recover_scale(&g, &phi).unwrap();
            assert_eq!(r.eps, eps);
            let (abar, b) = p.to_raw();
            if eps == 0 {
                // S′ = B S, Φ′ = Φ₁ with respect to S′.
                let bs: Vec<E> = s.iter().map(|x| x * &b).collect();
                assert_eq!(r.s, bs);
                assert_eq!(r.param, FamilyParam::Parabolic { s: E::from_integer(1) });
            } else {
                let sign = if r.s == s { E::from_integer(1) } else { E::from_integer(-1) };
                let ss: Vec<E> = s.iter().map(|x| x * &sign).collect();
                assert_eq!(r.s, ss);
                assert_eq!(r.abar, abar);
                assert_eq!(r.b, &b * &sign);
            }
        }
    }
}

#[test]
fn recovery_antipodal_and_identity() {
    let g = standard_exact();
    assert_eq!(recover_scale(&g, &g.phi), Err(RecoveryError::Identical));
    let sdp = make_stabilizer(&g, &reference_s(1)).unwrap();
    let plus = sdp.phi_i.sub(&sdp.phi_k);
    let r = recover_scale(&g, &plus).unwrap();
    assert_eq!((r.eps, r.branch), (1, RecoveryBranch::Antipodal(-1)));
    assert!(r.s == reference_s(1) || r.s == reference_s(1).iter().map(|x| -x.clone()).collect::<Vec<_>>());
    let sdm = make_stabilizer(&g, &reference_s(-1)).unwrap();
    let pi = sdm.phi_k.sub(&sdm.phi_i);
    let r = recover_scale(&g, &pi).unwrap();
    assert_eq!((r.eps, r.branch), (-1, RecoveryBranch::Antipodal(1)));
    assert!(antipodal_test(&g.phi, &pi) && antipodal_test(&g.phi, &plus));
    let j = r.to_json();
    assert_eq!(j["branch"], "Antipodal(1)");
}

#[test]
fn no_antipodes_for_isotropic_s() {
    let g = standard_exact();
    let sd = make_stabilizer(&g, &reference_s(0)).unwrap();
    let ms = slopes(20);
    let forms: Vec<_> = ms.iter().map(|s| family_member(&sd, &g, &FamilyParam::Parabolic { s: s.clone() }).unwrap()).collect();
    for a in std::iter::once(&g.phi).chain(&forms) {
        for b in &forms {
            assert!(!antipodal_test(a, b));
        }
    }
}

#[test]
fn wedge_with_member_is_dual_of_pi37() {
    let g = standard_exact();
    for eps in [-1, 0, 1] {
        let sd = make_stabilizer(&g, &reference_s(eps)).unwrap();
        for p in members(eps, 5) {
            let phi = family_member(&sd, &g, &p).unwrap();
            assert_eq!(g.pi3_7(&phi), g.pi3_7_via_wedge(&phi));
        }
    }
}

#[test]
fn not_in_family_is_reported() {
    let g = standard_exact();
    let sd = make_stabilizer(&g, &reference_s(1)).unwrap();
    let bogus = g.phi.add(&sd.phi_j.scale(&E::from_integer(2)));
    assert!(matches!(recover_scale(&g, &bogus), Err(RecoveryError::NotInFamily(_) | RecoveryError::NotRepresentable(_))));
}

#[test]
fn sampler_hits_every_allowed_orbit() {
    let g = standard_exact();
    for eps in [-1, 0, 1] {
        let s = reference_s(eps);
        let mut sampler = RaySampler::new(&g, &s, 7).unwrap();
        let mut seen = BTreeSet::new();
        for _ in 0..2000 {
            let x = sampler.sample();
            assert!(g.inner(&x, &x).is_zero());
            seen.insert(classify_ray(&g, &s, &x, None, 0.0).unwrap());
        }
        let want: BTreeSet<_> = OrbitLabel::allowed(eps).iter().copied().collect();
        assert_eq!(seen, want, "eps {eps}");
    }
}

#[test]
fn eigen_ray_is_m2_plus() {
    let g = standard_exact();
    let s = reference_s(1);
    let sd = make_stabilizer(&g, &s).unwrap();
    // X × S = −K X = X on the (−1)-eigenspace of K.
    let m = g2tractor::linalg::Matrix::from_fn(7, 7, |i, j| sd.k.get(i, j).clone() + E::from_integer((i == j) as i64));
    for x in g2tractor::linalg::nullspace(&m, 0.0) {
        assert!(g.inner(&x, &x).is_zero());
        assert_eq!(g.cross(&x, &s), x);
        assert_eq!(classify_ray(&g, &s, &x, None, 0.0).unwrap(), OrbitLabel::M2Plus);
    }
}

#[test]
fn canonical_rays_compare_signs() {
    let v = vec![E::from_integer(0), E::from_integer(-2), E::from_integer(1)];
    assert_eq!(canonical_ray(&v)[1], E::from_integer(2));
    assert_eq!(canonical_ray(&canonical_ray(&v)), canonical_ray(&v));
}
