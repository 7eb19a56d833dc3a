use g2tractor::chart::distribution::{growth_vector, isotropy_residual};
use g2tractor::chart::{Jet, DIM};
use g2tractor::gallery::charts::*;
use g2tractor::gallery::*;

fn quick() -> Overrides {
    Overrides { points: Some(4), ..Default::default() }
}

fn failing(r: &VerificationReport) -> Vec<&str> {
    r.checks.iter().filter(|c| !c.pass).map(|c| c.id.as_str()).collect()
}

#[test]
fn rolling_fails_only_the_literal_sign_claims() {
    let r = verify_example("rolling", &quick()).unwrap();
    assert_eq!(failing(&r), ["lie_phi", "lie_i", "open_orbit_j"]);
    assert!(!r.overall);
    // The observed relations hold with the opposite sign.
    assert!(r.notes.iter().any(|n| n.starts_with("observed relation ℒ_ξ φ = −3J")));
}

#[test]
fn rolling_para_passes() {
    let r = verify_example("rolling-para", &quick()).unwrap();
    assert!(r.overall, "{:?}", failing(&r));
}

#[test]
fn dirichlet_fails_only_the_aut_sign() {
    let r = verify_example("dirichlet", &quick()).unwrap();
    assert_eq!(failing(&r), ["aut_family"]);
    for id in ["xi_r", "xi_one", "classification", "smooth_across_r0", "killing_A"] {
        assert!(r.check(id).unwrap().pass, "{id}");
    }
}

#[test]
fn submaximal_passes_and_injected_fixture_fails() {
    let r = verify_example("submaximal", &quick()).unwrap();
    assert!(r.overall, "{:?}", failing(&r));
    let ov = Overrides { inject_nonsolution: true, ..quick() };
    let r = verify_example("submaximal", &ov).unwrap();
    assert_eq!(failing(&r), ["theta0_nonsolution"]);
}

#[test]
fn reports_are_reproducible() {
    let ov = Overrides { points: Some(3), seed: Some(11), ..Default::default() };
    let a = verify_example("dirichlet", &ov).unwrap();
    let b = verify_example("dirichlet", &ov).unwrap();
    assert_eq!(a.to_json(), b.to_json());
    assert_eq!(a.seed, 11);
    let c = verify_example("dirichlet", &Overrides { seed: Some(12), ..ov }).unwrap();
    assert_ne!(a.to_json(), c.to_json());
}

#[test]
fn tolerance_override_leaves_counts_exact() {
    let ov = Overrides { points: Some(2), tol: Some(1e-30), ..Default::default() };
    let r = verify_example("submaximal", &ov).unwrap();
    assert!(!r.check("isotropy").unwrap().pass);
    let g = r.check("growth_vector").unwrap();
    assert_eq!(g.tolerance, 0.0);
    assert!(g.pass);
}

#[test]
fn parameters_and_errors() {
    assert!(matches!(verify_example("gauss", &quick()), Err(GalleryError::UnknownExample(_))));
    let ov = Overrides { points: Some(0), ..Default::default() };
    assert!(matches!(verify_example("rolling", &ov), Err(GalleryError::Parameter(_))));
    let params = Params { upsilon: vec![0.3], ..Params::default() };
    let ex = load_example_with("rolling", &params).unwrap();
    assert_eq!(ex.spans.len(), 1);
    let ex = load_example("dirichlet").unwrap();
    assert_eq!(ex.vectors.len(), 6);
    assert_eq!(ex.spans.len(), 4);
    assert!(ex.expectations.iter().any(|(id, _)| id == "xi_one"));
}

#[test]
fn displayed_rolling_span_is_not_isotropic() {
    let ex = load_example("rolling").unwrap();
    let mut printed: f64 = 0.0;
    for x in ex.chart.domain.sample(5, 3) {
        let p = ex.chart.at(&x).unwrap();
        printed = printed.max(isotropy_residual(&p, &rolling_span_printed(0.0)));
        assert!(isotropy_residual(&p, &rolling_span(0.0)) < 1e-12);
    }
    assert!(printed > 1e-3);
}

#[test]
fn displayed_dirichlet_span_is_degenerate() {
    let ex = load_example("dirichlet").unwrap();
    let p = ex.chart.at(&[1.0, 0.2, 1.3, 0.1, 0.4]).unwrap();
    assert_eq!(growth_vector(&p, &dirichlet_span_printed(0.0, true), 1e-8), [2, 3, 3]);
    assert_eq!(growth_vector(&p, &dirichlet_span(0.0, true), 1e-8), [2, 3, 5]);
}

#[test]
fn symmetric_product_reading_matters() {
    // Only the half reading makes 1 an almost Einstein scale of g_N's cone.
    let x = [1.0, 0.2, 1.3, 0.1, 0.4];
    for (sym, ok) in [(SymProduct::Half, true), (SymProduct::Full, false)] {
        let p = dirichlet_chart(sym).at(&x).unwrap();
        assert_eq!(p.einstein_residual(0.0) < 1e-8, ok);
    }
}

/// Central differences of `f` at `x` in direction `i` through `h`.
fn fd<F: Fn(&[f64; DIM]) -> f64>(f: &F, x: &[f64; DIM], i: usize, j: Option<usize>, h: f64) -> f64 {
    let shift = |x: &[f64; DIM], k: usize, d: f64| {
        let mut y = *x;
        y[k] += d;
        y
    };
    match j {
        None => (f(&shift(x, i, h)) - f(&shift(x, i, -h))) / (2.0 * h),
        Some(j) => {
            let g = |y: &[f64; DIM]| (f(&shift(y, j, h)) - f(&shift(y, j, -h))) / (2.0 * h);
            (g(&shift(x, i, h)) - g(&shift(x, i, -h))) / (2.0 * h)
        }
    }
}

fn close(a: f64, b: f64, scale: f64) -> bool {
    (a - b).abs() <= 1e-5 * scale.max(1.0)
}

#[test]
fn jets_agree_with_finite_differences() {
    let h = 1e-4;
    let check = |name: &str, x: [f64; DIM], comp: &dyn Fn(&[Jet]) -> Jet| {
        let jet = comp(&Jet::point(&x));
        let f = |y: &[f64; DIM]| comp(&Jet::point(y)).value();
        let scale = jet.max_abs();
        for i in 0..DIM {
            assert!(close(jet.d1(i), fd(&f, &x, i, None, h), scale), "{name} d{i}");
            for j in 0..DIM {
                let num = fd(&f, &x, i, Some(j), h);
                assert!(close(jet.d2(i, j), num, scale), "{name} d{i}d{j}: {} vs {num}", jet.d2(i, j));
            }
        }
    };
    let xr = [1.2, 0.4, 2.1, -0.3, 0.2];
    let xd = [1.0, 0.2, 1.3, 0.1, 0.4];
    let xs = [0.3, -0.2, 0.5, 0.1, -0.4];
    for a in 0..DIM {
        for b in a..DIM {
            check("rolling", xr, &|y| *rolling_metric(y).get(a, b));
            check("dirichlet", xd, &|y| *dirichlet_metric(y, SymProduct::Half).get(a, b));
            check("submaximal", xs, &|y| *submaximal_metric(y, 2.0, SymProduct::Half).get(a, b));
        }
    }
    for k in 0..DIM {
        for (n, span) in [("rolling span", rolling_span(1.0)), ("dirichlet span", dirichlet_span(0.5, false))] {
            let x = if n.starts_with('r') { xr } else { xd };
            check(n, x, &|y| span[0].eval(y)[k]);
            check(n, x, &|y| span[1].eval(y)[k]);
        }
    }
    check("sigma_N", xd, &|y| dirichlet_sigma_n(y));
}
