//! Checks of the chart-side operators against parallel tractors on the flat
//! model, where both `S` and `Φ` are known in closed form.

use g2tractor::chart::flat::{adapted_flat, parallel_standard, parallel_three_form};
use g2tractor::chart::killing::*;
use g2tractor::chart::tractor::*;
use g2tractor::chart::{form_values, values, Chart, Field, Jet, ScalarField};
use g2tractor::forms::{wedge, KForm};
use g2tractor::g2core::standard_metric;
use g2tractor::linalg::Matrix;
use g2tractor::stabilizer::{Branch, FamilyParam};

fn hss(s: &[f64; 7]) -> f64 {
    let h: Matrix<f64> = standard_metric();
    let hs = h.apply(s);
    hs.iter().zip(s).map(|(a, b)| a * b).sum()
}

/// A fixed vector at the origin with `H(S,S) = −ε` and nonzero `σ`.
fn s0(eps: i8) -> [f64; 7] {
    let mut s = [0.4, 0.3, -0.7, 0.2, 0.5, 0.1, 1.3];
    if eps == 0 {
        // Solve for ρ so that S is null.
        s[0] = 0.0;
        let rest = hss(&s);
        s[0] = -rest / (2.0 * s[6]);
        return s;
    }
    let n = hss(&s);
    let want = -(eps as f64);
    if n.signum() != want.signum() {
        s[3] = 2.0;
    }
    let n = hss(&s);
    assert_eq!(n.signum(), want.signum());
    s.map(|v| v / n.abs().sqrt())
}

const POINTS: [[f64; 5]; 3] = [[0.0; 5], [0.2, -0.1, 0.3, 0.15, -0.25], [-0.3, 0.25, 0.1, -0.2, 0.05]];

fn setup(eps: i8) -> (Chart, Field<KForm<Jet>>, ScalarField) {
    let chart = adapted_flat();
    let big = parallel_three_form(&chart);
    let s = parallel_standard(&chart, s0(eps));
    let phi = big.map(|f| ThreeFormSplit::from_fiber(&f).phi);
    let sigma = s.map(|v| v[6]);
    (chart, phi, sigma)
}

#[test]
fn parallel_standard_tractor_is_a_scale() {
    for eps in [-1, 0, 1] {
        let (chart, _, sigma) = setup(eps);
        for x in POINTS {
            let p = chart.at(&x).unwrap();
            let sg = p.eval(&sigma);
            assert!(theta0_standard(&p, &sg).max_abs() < 1e-12);
            let l = einstein_constant(&p, &sg, 1e-10).unwrap();
            assert!((l.lambda - eps as f64 / 2.0).abs() < 1e-12, "{l:?}");
        }
    }
}

#[test]
fn xi_routes_agree_and_pi7_inverts() {
    for eps in [-1, 0, 1] {
        let (chart, phi, sigma) = setup(eps);
        for x in POINTS {
            let p = chart.at(&x).unwrap();
            let (ph, sg) = (p.eval(&phi), p.eval(&sigma));
            let xi = xi_iota7(&p, &ph, &sg);
            let alt = xi_from_tractors(&p, &l0_standard(&p, &sg), &l0_3form(&p, &ph));
            let d = values(&xi).iter().zip(values(&alt)).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(d < 1e-12, "ξ routes differ by {d}");
            assert!(conformal_killing_residual(&p, &xi) < 1e-12);
            assert!((pi7(&p, &ph, &xi).value() - sg.value()).abs() < 1e-12);
            // ξ lies in [D, D]: φ_{ba} ξ^b = 0.
            let v = values(&xi);
            for a in 0..5 {
                let s: f64 = (0..5).map(|b| ph.get(&[b, a]).value() * v[b]).sum();
                assert!(s.abs() < 1e-12);
            }
        }
    }
}

#[test]
fn ijk_three_routes_agree() {
    for eps in [-1, 0, 1] {
        let (chart, phi, sigma) = setup(eps);
        for x in POINTS {
            let p = chart.at(&x).unwrap();
            let (ph, sg) = (p.eval(&phi), p.eval(&sigma));
            let (s, f) = (l0_standard(&p, &sg), l0_3form(&p, &ph));
            let a = ijk_components(&p, &s, &f).values();
            let b = ijk_fiber(&p, &s, &f).unwrap();
            let c = ijk_forms(&p, &ph, &sg).values();
            assert!(a.max_diff(&b) < 1e-12, "components vs fiber {}", a.max_diff(&b));
            assert!(a.max_diff(&c) < 1e-12, "components vs σ,φ formulas {}", a.max_diff(&c));
        }
    }
}

fn params(eps: i8) -> Vec<(f64, f64)> {
    let fp: Vec<FamilyParam<f64>> = match eps {
        -1 => vec![FamilyParam::circle_angle(0.7), FamilyParam::circle_angle(2.5)],
        1 => vec![FamilyParam::hyperbolic_time(Branch::Minus, 0.4), FamilyParam::hyperbolic_time(Branch::Plus, -0.8)],
        _ => vec![FamilyParam::Parabolic { s: 0.6 }, FamilyParam::Parabolic { s: -1.5 }],
    };
    fp.iter().map(|p| p.to_raw()).collect()
}

#[test]
fn family_members_are_normal_and_decomposable() {
    for eps in [-1, 0, 1] {
        let (chart, phi, sigma) = setup(eps);
        for x in POINTS {
            let p = chart.at(&x).unwrap();
            let (ph, sg) = (p.eval(&phi), p.eval(&sigma));
            assert_eq!(form_values(&family_2form(&p, &ph, &sg, eps, 0.0, 0.0, 1e-8).unwrap()), form_values(&ph));
            for (abar, b) in params(eps) {
                let fp = family_2form(&p, &ph, &sg, eps, abar, b, 1e-8).unwrap();
                let v = form_values(&fp);
                assert!(v.max_abs() > 1e-3);
                assert!(wedge(&v, &v).unwrap().max_abs() < 1e-10);
                assert!(theta0_3form(&p, &fp).max_abs() < 1e-10);
            }
            assert!(matches!(
                family_2form(&p, &ph, &sg, eps, 1.0, 1.0, 1e-8),
                Err(g2tractor::chart::ChartError::Constraint(_))
            ));
        }
    }
}

#[test]
fn lie_derivative_relations() {
    for eps in [-1, 0, 1] {
        let (chart, phi, sigma) = setup(eps);
        let e = eps as f64;
        for x in POINTS {
            let p = chart.at(&x).unwrap();
            let (ph, sg) = (p.eval(&phi), p.eval(&sigma));
            let xi = xi_iota7(&p, &ph, &sg);
            let ijk = ijk_forms(&p, &ph, &sg);
            let lie = |t: &KForm<Jet>| form_values(&g2tractor::forms::antisymmetrize(&lie_derivative_weighted(&p, &xi, &t.to_tensor(), 3.0, 1e-10).unwrap()));
            let j = form_values(&ijk.j);
            let i = form_values(&ijk.i);
            let ls = lie_derivative_weighted(&p, &xi, &scalar_tensor(sg), 1.0, 1e-10).unwrap();
            assert!(ls.max_abs() < 1e-12);
            // With ξ taken from the printed ι₇ formula.
            assert!(lie(&ph).add(&j.scale(&3.0)).max_abs() < 1e-10);
            assert!(lie(&ijk.i).sub(&j.scale(&(3.0 * e))).max_abs() < 1e-10);
            assert!(lie(&ijk.j).sub(&i.scale(&3.0)).max_abs() < 1e-10);
            assert!(lie(&ijk.k).max_abs() < 1e-10);
        }
    }
}

#[test]
fn open_orbit_in_scale_sigma() {
    for eps in [-1, 1] {
        let (chart, phi, sigma) = setup(eps);
        let inv = sigma.map(|s| s.recip());
        let scaled = chart.rescaled(&inv);
        for x in POINTS {
            let p = scaled.at(&x).unwrap();
            let sg = p.eval(&sigma);
            let w = sg.recip();
            let ph = p.eval(&phi).scale(&(w * w * w));
            let one = sg * w;
            let ijk = ijk_forms(&p, &ph, &one).values();
            let f = l0_3form(&p, &ph);
            let xi = xi_iota7(&p, &ph, &one);
            let pred = ijk_open_orbit(&f, &xi, eps);
            assert!(ijk.i.sub(&pred.i).max_abs() < 1e-9);
            assert!(ijk.k.sub(&pred.k).max_abs() < 1e-9);
            // J = ξ^c χ_{cab} holds for −ξ.
            assert!(ijk.j.add(&pred.j).max_abs() < 1e-9);
            assert!(composition_residual(&p, &ijk, &values(&xi), eps) < 1e-9);
            let c = classify_point(&p, &one, &ph, 1e-9);
            assert_eq!(c.label, g2tractor::stabilizer::OrbitLabel::M5Plus);
            assert!(!c.ambiguous);
        }
    }
}

#[test]
fn null_scale_has_i_equal_minus_k() {
    let (chart, phi, sigma) = setup(0);
    for x in POINTS {
        let p = chart.at(&x).unwrap();
        let ijk = ijk_forms(&p, &p.eval(&phi), &p.eval(&sigma)).values();
        assert!(ijk.i.add(&ijk.k).max_abs() < 1e-12);
    }
}
