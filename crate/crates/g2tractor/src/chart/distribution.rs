//! 2-plane distributions: brackets, growth, and the 2-form they determine.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::forms::{antisymmetrize, dot, hook, wedge, KForm, Metric, Tensor};
use crate::linalg::{solve, Matrix};
use crate::scalars::Scalar;

use super::tractor::{l0_3form, theta0_3form, ThreeFormSplit};
use super::{form_values, values, ChartError, Jet, PointGeometry, VectorField, DIM};

/// `[X, Y]^i = X^j ∂_j Y^i − Y^j ∂_j X^i`; one jet order is lost.
pub fn lie_bracket(x: &[Jet], y: &[Jet]) -> Vec<Jet> {
    (0..DIM)
        .map(|i| {
            (0..DIM).fold(Jet::zero().with_order(x[0].order().min(y[0].order()).saturating_sub(1)), |acc, j| {
                acc + x[j] * y[i].deriv(j) - y[j] * x[i].deriv(j)
            })
        })
        .collect()
}

fn numeric_rank(vs: &[Vec<f64>], tol: f64) -> usize {
    if vs.is_empty() {
        return 0;
    }
    let m = DMatrix::from_fn(DIM, vs.len(), |i, j| {
        let n = vs[j].iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 0.0 {
            vs[j][i] / n
        } else {
            0.0
        }
    });
    m.svd(false, false).singular_values.iter().filter(|s| **s > tol).count()
}

/// Ranks of `D`, `D + [D,D]`, `D + [D,D] + [D,[D,D]]` at the point.
pub fn growth_vector(p: &PointGeometry, span: &[VectorField], tol: f64) -> [usize; 3] {
    let gens: Vec<Vec<Jet>> = span.iter().map(|f| p.eval(f)).collect();
    let mut d2 = Vec::new();
    for i in 0..gens.len() {
        for j in i + 1..gens.len() {
            d2.push(lie_bracket(&gens[i], &gens[j]));
        }
    }
    let mut d3 = Vec::new();
    for g in &gens {
        for b in &d2 {
            d3.push(lie_bracket(g, b));
        }
    }
    let mut level: Vec<Vec<f64>> = gens.iter().map(|v| values(v)).collect();
    let r1 = numeric_rank(&level, tol);
    level.extend(d2.iter().map(|v| values(v)));
    let r2 = numeric_rank(&level, tol);
    level.extend(d3.iter().map(|v| values(v)));
    [r1, r2, numeric_rank(&level, tol)]
}

#[derive(Clone, Debug, Serialize)]
pub struct DistributionReport {
    pub decomposable: bool,
    pub nonvanishing: bool,
    pub wedge_residual: f64,
    pub span_match: Option<bool>,
    pub growth_vector: Option<[usize; 3]>,
}

/// Raised bivector `φ^{ab}` as a 5×5 array of values.
fn bivector(p: &PointGeometry, phi: &KForm<f64>) -> Vec<Vec<f64>> {
    let t = phi.to_tensor();
    let gi = |a: usize, b: usize| p.ginv.get(a, b).value();
    (0..DIM)
        .map(|a| {
            (0..DIM)
                .map(|b| (0..DIM).flat_map(|c| (0..DIM).map(move |d| (c, d))).map(|(c, d)| gi(a, c) * gi(b, d) * t.get(&[c, d])).sum())
                .collect()
        })
        .collect()
}

pub fn distribution_checks(
    p: &PointGeometry,
    phi: &KForm<Jet>,
    span: Option<&[VectorField]>,
    tol: f64,
) -> Result<DistributionReport, ChartError> {
    let v = form_values(phi);
    let size = v.max_abs();
    if size <= tol {
        return Err(ChartError::Degenerate("2-form vanishes at the point".into()));
    }
    let ww = wedge(&v, &v).expect("degrees fit").max_abs() / (size * size);
    let (span_match, growth) = match span {
        None => (None, None),
        Some(fields) => {
            let cols = bivector(p, &v);
            let mut all: Vec<Vec<f64>> = (0..DIM).map(|b| (0..DIM).map(|a| cols[a][b]).collect()).collect();
            let image = numeric_rank(&all, 1e-6);
            all.extend(fields.iter().map(|f| values(&p.eval(f))));
            let joint = numeric_rank(&all, 1e-6);
            (Some(image == 2 && joint == 2), Some(growth_vector(p, fields, 1e-8)))
        }
    };
    Ok(DistributionReport {
        decomposable: ww <= tol,
        nonvanishing: true,
        wedge_residual: ww,
        span_match,
        growth_vector: growth,
    })
}

/// `max |g(X, Y)|` over pairs of span fields, normalized by their sizes.
pub fn isotropy_residual(p: &PointGeometry, span: &[VectorField]) -> f64 {
    let vs: Vec<Vec<Jet>> = span.iter().map(|f| p.eval(f)).collect();
    let mut worst: f64 = 0.0;
    for x in &vs {
        for y in &vs {
            let n = (dot(&values(x), &values(x)).abs().sqrt() * dot(&values(y), &values(y)).abs().sqrt()).max(1e-300);
            worst = worst.max(p.inner(x, y).value().abs() / n);
        }
    }
    worst
}

/// Linear part `L(u)` of `Θ₀(e^f ω) = e^f (Θ₀ ω + L(df))`.
fn theta0_shift(p: &PointGeometry, omega: &KForm<Jet>) -> Vec<Tensor<Jet>> {
    let w = omega.to_tensor();
    (0..DIM)
        .map(|e| {
            let u = Tensor::from_fn(DIM, 3, |i| if i[2] == e { *w.get(&[i[0], i[1]]) } else { Jet::zero() });
            let alt = antisymmetrize(&u).to_tensor();
            let v = p.trace(&u, 0, 2);
            Tensor::from_fn(DIM, 3, |i| {
                let (a, b, c) = (i[0], i[1], i[2]);
                *u.get(i) - *alt.get(i) - (*p.g.get(c, a) * v.d[b] - *p.g.get(c, b) * v.d[a]).scale(0.25)
            })
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct SpanTwoForm {
    pub phi: KForm<Jet>,
    /// Largest residual of the least-squares fit for `d ln f`.
    pub fit_residual: f64,
    pub integrability: f64,
    /// Sign of `½ φ∧θ∧ψ` on the coordinate frame.
    pub orientation: i8,
}

/// The normal conformal Killing 2-form whose bivector spans `D = ⟨α, β⟩`,
/// found as `φ = c f (α♭∧β♭)` with `f` fixed by `Θ₀(φ) = 0` up to a
/// constant, `f(x) = 1`, and `c > 0` chosen so that `θ·θ = −1`. The
/// orientation of `φ` is the one of the ordered span.
pub fn phi_from_span(p: &PointGeometry, alpha: &VectorField, beta: &VectorField) -> Result<SpanTwoForm, ChartError> {
    let a = p.lower(&p.eval(alpha));
    let b = p.lower(&p.eval(beta));
    let omega = wedge(&KForm::one_form(&a), &KForm::one_form(&b)).expect("degrees fit");
    let rhs = theta0_3form(p, &omega);
    let cols = theta0_shift(p, &omega);
    let n = rhs.d.len();
    let normal = Matrix::from_fn(DIM, DIM, |i, j| (0..n).fold(Jet::zero(), |s, k| s + cols[i].d[k] * cols[j].d[k]));
    let proj: Vec<Jet> = (0..DIM).map(|i| (0..n).fold(Jet::zero(), |s, k| s - cols[i].d[k] * rhs.d[k])).collect();
    let u = solve(&normal, &proj).ok_or_else(|| ChartError::Degenerate("span fit is singular".into()))?;
    let fit = (0..n)
        .map(|k| (rhs.d[k] + (0..DIM).fold(Jet::zero(), |s, i| s + cols[i].d[k] * u[i])).value().abs())
        .fold(0.0, f64::max);
    let (log_f, integrability) = Jet::integrate(0.0, &u);
    let f = log_f.exp();
    let raw = omega.scale(&f);
    let split = l0_3form(p, &raw);
    let tt = p.inner(&p.raise(&split.theta), &p.raise(&split.theta)).value();
    if tt >= 0.0 {
        return Err(ChartError::Degenerate(format!("θ·θ = {tt:e} is not negative")));
    }
    let c = 1.0 / (-tt).sqrt();
    let phi = raw.scale(&Jet::constant(c));
    let s = volume_sign(&l0_3form(p, &phi));
    Ok(SpanTwoForm { phi, fit_residual: fit, integrability, orientation: if s < 0.0 { -1 } else { 1 } })
}

fn volume_sign(f: &ThreeFormSplit) -> f64 {
    let top = wedge(&wedge(&form_values(&f.phi), &KForm::one_form(&values(&f.theta))).expect("fits"), &form_values(&f.psi))
        .expect("fits");
    top.components()[0].signum()
}

/// Named residuals of the eight pointwise component identities.
pub fn component_identities(p: &PointGeometry, f: &ThreeFormSplit) -> Vec<(&'static str, f64)> {
    let gi = |a: usize, b: usize| p.ginv.get(a, b).value();
    let phi = form_values(&f.phi).to_tensor();
    let psi = form_values(&f.psi).to_tensor();
    let chi = form_values(&f.chi).to_tensor();
    let th = values(&f.theta);
    let thu: Vec<f64> = (0..DIM).map(|a| (0..DIM).map(|b| gi(a, b) * th[b]).sum()).collect();
    let square = |t: &Tensor<f64>| {
        let mut m: f64 = 0.0;
        for a in 0..DIM {
            for b in 0..DIM {
                let mut s = 0.0;
                for c in 0..DIM {
                    for d in 0..DIM {
                        for e in 0..DIM {
                            s += gi(a, d) * gi(c, e) * t.get(&[d, e]) * t.get(&[c, b]);
                        }
                    }
                }
                m = m.max(s.abs());
            }
        }
        m
    };
    let contract = |t: &Tensor<f64>| (0..DIM).map(|a| (0..DIM).map(|b| thu[b] * t.get(&[b, a])).sum::<f64>().abs()).fold(0.0, f64::max);
    let mut pc: f64 = 0.0;
    for a in 0..DIM {
        let mut s = 0.0;
        for b in 0..DIM {
            for c in 0..DIM {
                for d in 0..DIM {
                    for e in 0..DIM {
                        s += gi(b, d) * gi(c, e) * phi.get(&[d, e]) * chi.get(&[b, c, a]);
                    }
                }
            }
        }
        pc = pc.max(s.abs());
    }
    let psif = form_values(&f.psi);
    let top = wedge(&wedge(&form_values(&f.phi), &KForm::one_form(&th)).expect("fits"), &psif).expect("fits");
    let vol = p.volume_density();
    vec![
        ("phi_phi", square(&phi)),
        ("phi_chi", pc),
        ("theta_phi", contract(&phi)),
        ("theta_theta", (dot(&thu, &th) + 1.0).abs()),
        ("psi_wedge_psi", wedge(&psif, &psif).expect("fits").max_abs()),
        ("psi_psi", square(&psi)),
        ("theta_psi", contract(&psi)),
        ("volume", (0.5 * top.components()[0].abs() - vol).abs() / vol),
    ]
}

/// Named residuals of the Hodge relations among the components, with the
/// volume form `½ φ∧θ∧ψ`.
pub fn hodge_relations(p: &PointGeometry, f: &ThreeFormSplit) -> Result<Vec<(&'static str, f64)>, ChartError> {
    let g = Matrix::from_fn(DIM, DIM, |a, b| p.g.get(a, b).value());
    let metric = Metric::new(g).map_err(|e| ChartError::Degenerate(e.to_string()))?;
    let phi = form_values(&f.phi);
    let psi = form_values(&f.psi);
    let chi = form_values(&f.chi);
    let th = KForm::one_form(&values(&f.theta));
    let w = |a: &KForm<f64>, b: &KForm<f64>| wedge(a, b).expect("fits");
    let vol = w(&w(&phi, &th), &psi).scale(&0.5);
    let star = |a: &KForm<f64>| metric.hodge(&vol, a).map_err(|e| ChartError::Degenerate(e.to_string()));
    let thu = metric.raise(th.components());
    Ok(vec![
        ("star_phi", star(&phi)?.sub(&w(&phi, &th)).max_abs()),
        ("star_chi", star(&chi)?.sub(&hook(&thu, &chi)).max_abs()),
        ("star_theta", star(&th)?.sub(&w(&phi, &psi).scale(&-0.5)).max_abs()),
        ("star_psi", star(&psi)?.sub(&w(&psi, &th)).max_abs()),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::{Chart, Domain, Field, ScalarField};

    fn flat() -> Chart {
        Chart::new(
            ["x1", "x2", "x3", "x4", "x5"],
            Field::new(|_| Matrix::from_fn(5, 5, |i, j| Jet::constant(if i != j { 0.0 } else if i < 2 { -1.0 } else { 1.0 }))),
            Domain::boxed([-1.0; 5], [1.0; 5]),
        )
    }

    #[test]
    fn coordinate_planes_are_integrable() {
        let p = flat().at(&[0.1, 0.2, 0.3, 0.4, 0.5]).unwrap();
        let span = [VectorField::coordinate(0), VectorField::coordinate(1)];
        assert_eq!(growth_vector(&p, &span, 1e-8), [2, 2, 2]);
    }

    #[test]
    fn hilbert_cartan_growth() {
        // ⟨∂_q, ∂_x + p∂_y + q∂_p + q²∂_z⟩ in coordinates (x, y, p, q, z).
        let p = flat().at(&[0.1, 0.2, 0.3, 0.4, 0.5]).unwrap();
        let q = ScalarField::coordinate(3);
        let pp = ScalarField::coordinate(2);
        let q2 = Field::new(|x: &[Jet]| x[3] * x[3]);
        let one = ScalarField::constant(1.0);
        let e = VectorField::combination(vec![
            (one, VectorField::coordinate(0)),
            (pp, VectorField::coordinate(1)),
            (q, VectorField::coordinate(2)),
            (q2, VectorField::coordinate(4)),
        ]);
        assert_eq!(growth_vector(&p, &[VectorField::coordinate(3), e], 1e-8), [2, 3, 5]);
    }

    #[test]
    fn bracket_of_coordinate_fields_vanishes() {
        let p = flat().at(&[0.0; 5]).unwrap();
        let b = lie_bracket(&p.eval(&VectorField::coordinate(0)), &p.eval(&VectorField::coordinate(2)));
        assert!(values(&b).iter().all(|x| *x == 0.0));
    }

    #[test]
    fn zero_form_is_rejected() {
        let p = flat().at(&[0.0; 5]).unwrap();
        assert!(distribution_checks(&p, &KForm::zero(5, 2), None, 1e-10).is_err());
    }
}
