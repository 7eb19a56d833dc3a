//! Tractor bundles in the splitting of the chart metric.
//!
//! Fiber ordering: slot 0 is the `X` direction, slots `1..=5` the tangent
//! directions in coordinate order, slot 6 the `Y` direction. A standard
//! tractor `σY + μ + ρX` is the vector `(ρ, μ¹, …, μ⁵, σ)`; the tractor
//! metric has `H₀₆ = H₆₀ = 1` and `g` in the middle block.

use crate::forms::{antisymmetrize, KForm, Tensor};
use crate::g2core::derivation;
use crate::linalg::Matrix;
use crate::scalars::Scalar;

use super::{ChartError, Jet, PointGeometry, DIM};

pub const FIBER: usize = 7;
pub const X_SLOT: usize = 0;
pub const Y_SLOT: usize = 6;

/// Components `(σ, μ^a, ρ)` of a standard tractor.
#[derive(Clone, Debug)]
pub struct TractorSplit {
    pub sigma: Jet,
    pub mu: Vec<Jet>,
    pub rho: Jet,
}

impl TractorSplit {
    pub fn to_fiber(&self) -> Vec<Jet> {
        let mut v = Vec::with_capacity(FIBER);
        v.push(self.rho);
        v.extend_from_slice(&self.mu);
        v.push(self.sigma);
        v
    }

    pub fn from_fiber(v: &[Jet]) -> Self {
        TractorSplit { sigma: v[Y_SLOT], mu: v[1..=DIM].to_vec(), rho: v[X_SLOT] }
    }

    pub fn values(&self) -> Vec<f64> {
        super::values(&self.to_fiber())
    }

    pub fn max_abs(&self) -> f64 {
        self.to_fiber().iter().fold(0.0, |m, x| m.max(x.value().abs()))
    }
}

/// Components `(φ, χ, θ, ψ)` of a tractor 3-form. `θ` is a 1-form.
#[derive(Clone, Debug)]
pub struct ThreeFormSplit {
    pub phi: KForm<Jet>,
    pub chi: KForm<Jet>,
    pub theta: Vec<Jet>,
    pub psi: KForm<Jet>,
}

impl ThreeFormSplit {
    /// `Φ` with `Φ_{0bc} = φ_{bc}`, `Φ_{abc} = χ_{abc}`, `Φ_{06c} = θ_c`,
    /// `Φ_{6bc} = ψ_{bc}` (tangent slots shifted by one).
    pub fn to_fiber(&self) -> KForm<Jet> {
        let mut out = KForm::zero(FIBER, 3);
        for b in 0..DIM {
            for c in b + 1..DIM {
                out.set(&[X_SLOT, 1 + b, 1 + c], self.phi.get(&[b, c]));
                out.set(&[1 + b, 1 + c, Y_SLOT], self.psi.get(&[b, c]));
                for a in c + 1..DIM {
                    out.set(&[1 + b, 1 + c, 1 + a], self.chi.get(&[b, c, a]));
                }
            }
            out.set(&[X_SLOT, 1 + b, Y_SLOT], -self.theta[b]);
        }
        out
    }

    pub fn from_fiber(f: &KForm<Jet>) -> Self {
        let mut phi = KForm::zero(DIM, 2);
        let mut chi = KForm::zero(DIM, 3);
        let mut psi = KForm::zero(DIM, 2);
        let mut theta = vec![Jet::zero(); DIM];
        for b in 0..DIM {
            for c in b + 1..DIM {
                phi.set(&[b, c], f.get(&[X_SLOT, 1 + b, 1 + c]));
                psi.set(&[b, c], f.get(&[Y_SLOT, 1 + b, 1 + c]));
                for a in c + 1..DIM {
                    chi.set(&[b, c, a], f.get(&[1 + b, 1 + c, 1 + a]));
                }
            }
            theta[b] = f.get(&[X_SLOT, Y_SLOT, 1 + b]);
        }
        ThreeFormSplit { phi, chi, theta, psi }
    }
}

/// Tractor metric in the fixed fiber ordering.
pub fn tractor_metric(p: &PointGeometry) -> Matrix<Jet> {
    let mut h = Matrix::zeros(FIBER, FIBER);
    h.set(X_SLOT, Y_SLOT, Jet::one());
    h.set(Y_SLOT, X_SLOT, Jet::one());
    for a in 0..DIM {
        for b in 0..DIM {
            h.set(1 + a, 1 + b, *p.g.get(a, b));
        }
    }
    h
}

/// `A_b` with `∇_b S = ∂_b S + A_b S` on standard tractors.
pub fn connection_matrix(p: &PointGeometry, b: usize) -> Matrix<Jet> {
    let pl = &p.curvature.schouten;
    let pm = p.schouten_mixed();
    let gam = &p.curvature.christoffel;
    let mut m = Matrix::zeros(FIBER, FIBER);
    for c in 0..DIM {
        m.set(X_SLOT, 1 + c, -*pl.get(&[b, c]));
        m.set(Y_SLOT, 1 + c, -*p.g.get(b, c));
    }
    for a in 0..DIM {
        if a == b {
            m.set(1 + a, X_SLOT, Jet::one());
        }
        for c in 0..DIM {
            m.set(1 + a, 1 + c, *gam.get(&[a, b, c]));
        }
        m.set(1 + a, Y_SLOT, *pm.get(&[a, b]));
    }
    m
}

/// `∇_b` of a standard tractor for each coordinate direction `b`.
pub fn tractor_connection(p: &PointGeometry, s: &TractorSplit) -> Vec<TractorSplit> {
    let v = s.to_fiber();
    (0..DIM)
        .map(|b| {
            let a = connection_matrix(p, b);
            let av = a.apply(&v);
            let d: Vec<Jet> = v.iter().zip(av).map(|(x, y)| x.deriv(b) + y).collect();
            TractorSplit::from_fiber(&d)
        })
        .collect()
}

/// Largest component of `∇S` at the point.
pub fn standard_parallel_residual(p: &PointGeometry, s: &TractorSplit) -> f64 {
    tractor_connection(p, s).iter().map(|t| t.max_abs()).fold(0.0, f64::max)
}

/// Largest component of `∇Φ` at the point for a tractor 3-form.
pub fn three_form_parallel_residual(p: &PointGeometry, phi: &KForm<Jet>) -> f64 {
    (0..DIM)
        .map(|b| {
            let d = phi.map(|c| c.deriv(b)).add(&derivation(&connection_matrix(p, b), phi));
            d.components().iter().fold(0.0f64, |m, x| m.max(x.value().abs()))
        })
        .fold(0.0, f64::max)
}

/// `L₀(σ) = (σ, σ^{,a}, −⅕(σ_{,b}{}^b + P^b_b σ))`.
pub fn l0_standard(p: &PointGeometry, sigma: &Jet) -> TractorSplit {
    let grad = p.grad(sigma);
    let hess = p.nabla(&grad);
    let lap = p.trace(&hess, 0, 1).d[0];
    let rho = -(lap + p.schouten_trace() * *sigma).scale(0.2);
    TractorSplit { sigma: *sigma, mu: p.raise(&grad.d), rho }
}

/// `(σ_{,ab} + P_{ab}σ)₀`.
pub fn theta0_standard(p: &PointGeometry, sigma: &Jet) -> Tensor<Jet> {
    let hess = p.nabla(&p.grad(sigma));
    let t = Tensor::from_fn(DIM, 2, |i| *hess.get(i) + *p.curvature.schouten.get(i) * *sigma);
    let tr = p.trace(&t, 0, 1).d[0].scale(1.0 / DIM as f64);
    Tensor::from_fn(DIM, 2, |i| *t.get(i) - tr * *p.g.get(i[0], i[1]))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EinsteinConstant {
    /// From the scalar formula in `σ` and its derivatives.
    pub lambda: f64,
    /// `−½ H(L₀σ, L₀σ)`.
    pub lambda_tractor: f64,
}

/// Einstein constant of an almost Einstein scale, by two routes.
pub fn einstein_constant(p: &PointGeometry, sigma: &Jet, tol: f64) -> Result<EinsteinConstant, ChartError> {
    let grad = p.grad(sigma);
    let hess = p.nabla(&grad);
    let lap = p.trace(&hess, 0, 1).d[0];
    let gsq = p.inner(&p.raise(&grad.d), &p.raise(&grad.d));
    let lambda = (*sigma * (lap + p.schouten_trace() * *sigma)).scale(0.2) - gsq.scale(0.5);
    let s = l0_standard(p, sigma).to_fiber();
    let h = tractor_metric(p);
    let hs = h.apply(&s);
    let hss = crate::forms::dot(&hs, &s);
    let out = EinsteinConstant { lambda: lambda.value(), lambda_tractor: -0.5 * hss.value() };
    if (out.lambda - out.lambda_tractor).abs() > tol * (1.0 + out.lambda.abs()) {
        return Err(ChartError::RouteMismatch(format!("λ {} vs {}", out.lambda, out.lambda_tractor)));
    }
    Ok(out)
}

/// Splitting operator for tractor 3-forms, with its projecting part `φ`.
pub fn l0_3form(p: &PointGeometry, phi: &KForm<Jet>) -> ThreeFormSplit {
    let t0 = phi.to_tensor();
    let t1 = p.nabla(&t0);
    let t2 = p.nabla(&t1);
    let chi = antisymmetrize(&t1);
    let v = p.trace(&t1, 0, 2);
    let theta: Vec<Jet> = v.d.iter().map(|x| x.scale(-0.25)).collect();
    let lap = p.trace(&t2, 2, 3);
    let u = p.trace(&t2, 0, 3);
    let w = p.trace(&t2, 0, 2);
    let pm = p.schouten_mixed();
    let jt = p.schouten_trace();
    let psi_t = Tensor::from_fn(DIM, 2, |i| {
        let (a, b) = (i[0], i[1]);
        let term1 = lap.get(&[a, b]).scale(-1.0 / 3.0);
        let term2 = (*u.get(&[b, a]) - *u.get(&[a, b])).scale(1.0 / 3.0);
        let term3 = (*w.get(&[b, a]) - *w.get(&[a, b])).scale(0.25);
        let mut term4 = Jet::zero();
        for c in 0..DIM {
            term4 = term4 + *pm.get(&[c, a]) * *t0.get(&[c, b]) - *pm.get(&[c, b]) * *t0.get(&[c, a]);
        }
        (term1 + term2 + term3 + term4.scale(2.0) - jt * *t0.get(&[a, b])).scale(0.2)
    });
    ThreeFormSplit { phi: phi.clone(), chi, theta, psi: antisymmetrize(&psi_t) }
}

/// `|∇ L₀(φ)|` at the point; zero certifies a normal conformal Killing 2-form.
pub fn normality_residual(p: &PointGeometry, phi: &KForm<Jet>) -> Result<f64, ChartError> {
    let have = phi.components().iter().map(|c| c.order()).min().unwrap_or(0);
    if have < 3 {
        return Err(ChartError::Order { have, need: 3 });
    }
    Ok(three_form_parallel_residual(p, &l0_3form(p, phi).to_fiber()))
}

/// Conformal Killing operator on 2-forms:
/// `φ_{ab,c} − φ_{[ab,c]} − ½ g_{c[a} φ_{|d|b],}{}^d`.
pub fn theta0_3form(p: &PointGeometry, phi: &KForm<Jet>) -> Tensor<Jet> {
    let t1 = p.nabla(&phi.to_tensor());
    let alt = antisymmetrize(&t1).to_tensor();
    let v = p.trace(&t1, 0, 2);
    Tensor::from_fn(DIM, 3, |i| {
        let (a, b, c) = (i[0], i[1], i[2]);
        let tr = (*p.g.get(c, a) * v.d[b] - *p.g.get(c, b) * v.d[a]).scale(0.25);
        *t1.get(i) - *alt.get(i) - tr
    })
}

/// Fiber data at the point as floats: the 3-form and the tractor metric.
pub fn fiber_values(p: &PointGeometry, split: &ThreeFormSplit) -> (KForm<f64>, Matrix<f64>) {
    let h = tractor_metric(p);
    (super::form_values(&split.to_fiber()), Matrix::from_fn(FIBER, FIBER, |i, j| h.get(i, j).value()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::flat::{adapted_flat, flat_exp, parallel_three_form};
    use crate::chart::Field;
    use crate::g2core::standard_phi;

    #[test]
    fn flat_model_parallel_three_form_is_reproduced() {
        let chart = adapted_flat();
        let big = parallel_three_form(&chart);
        for x in [[0.0; 5], [0.3, -0.2, 0.5, 0.1, -0.4]] {
            let p = chart.at(&x).unwrap();
            let full = p.eval(&big);
            assert!(three_form_parallel_residual(&p, &full) < 1e-12);
            let proj = ThreeFormSplit::from_fiber(&full).phi;
            let split = l0_3form(&p, &proj);
            let diff = split.to_fiber().sub(&full);
            assert!(diff.max_abs() < 1e-12, "{}", diff.max_abs());
            assert!(normality_residual(&p, &proj).unwrap() < 1e-12);
            assert!(theta0_3form(&p, &proj).max_abs() < 1e-12);
        }
    }

    #[test]
    fn adapted_frame_components() {
        let chart = adapted_flat();
        let p = chart.at(&[0.0; 5]).unwrap();
        let s = ThreeFormSplit::from_fiber(&standard_phi());
        let r2 = std::f64::consts::SQRT_2;
        assert_eq!(s.phi.get(&[3, 4]).value(), r2);
        assert_eq!(s.psi.get(&[0, 1]).value(), r2);
        assert_eq!(super::super::values(&s.theta), vec![0.0, 0.0, 1.0, 0.0, 0.0]);
        assert_eq!(s.chi.get(&[0, 2, 3]).value(), 1.0);
        assert_eq!(s.chi.get(&[1, 2, 4]).value(), 1.0);
        assert_eq!(s.to_fiber(), standard_phi());
        let (f, h) = fiber_values(&p, &s);
        assert!(crate::g2core::genericity_and_compatibility(&f, &h, &crate::g2core::standard_structure::<f64>().vol).all());
    }

    #[test]
    fn flat_model_parallel_standard_tractor() {
        let chart = adapted_flat();
        let s0: Vec<Jet> = [0.3, 1.0, -0.5, 0.2, 0.7, 0.1, 2.0].iter().map(|&v| Jet::constant(v)).collect();
        for x in [[0.0; 5], [0.2, 0.4, -0.3, 0.6, -0.1]] {
            let p = chart.at(&x).unwrap();
            let s = flat_exp(&chart, &p.coords, -1.0).apply(&s0);
            let split = TractorSplit::from_fiber(&s);
            assert!(standard_parallel_residual(&p, &split) < 1e-12);
            let rebuilt = l0_standard(&p, &split.sigma);
            let d: f64 = rebuilt.values().iter().zip(split.values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(d < 1e-12);
            assert!(theta0_standard(&p, &split.sigma).max_abs() < 1e-12);
            let l = einstein_constant(&p, &split.sigma, 1e-10).unwrap();
            let h = tractor_metric(&p);
            let want = -0.5 * crate::forms::dot(&h.apply(&s), &s).value();
            assert!((l.lambda - want).abs() < 1e-12);
        }
    }

    #[test]
    fn trivial_cases() {
        let chart = adapted_flat();
        let p = chart.at(&[0.1; 5]).unwrap();
        let one = l0_standard(&p, &Jet::constant(1.0));
        assert_eq!(one.values(), vec![0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
        assert!(standard_parallel_residual(&p, &one) == 0.0);
        let zero = l0_3form(&p, &KForm::zero(DIM, 2));
        assert!(zero.to_fiber().max_abs() == 0.0);
        let e = TractorSplit { sigma: Jet::zero(), mu: vec![Jet::zero(); 5], rho: Jet::one() };
        let d = tractor_connection(&p, &e);
        for (b, t) in d.iter().enumerate() {
            for a in 0..DIM {
                assert_eq!(t.mu[a].value(), (a == b) as u8 as f64);
            }
        }
    }

    #[test]
    fn generic_quadratic_two_form_is_not_normal() {
        let chart = adapted_flat();
        let phi = Field::new(|x: &[Jet]| {
            let mut f = KForm::zero(DIM, 2);
            f.set(&[0, 1], x[2] * x[2] + x[0] * x[3]);
            f.set(&[1, 4], x[1] * x[4] + Jet::constant(1.0));
            f.set(&[2, 3], x[0] * x[0]);
            f
        });
        let p = chart.at(&[0.2, 0.1, -0.3, 0.4, 0.5]).unwrap();
        assert!(normality_residual(&p, &p.eval(&phi)).unwrap() > 1e-3);
    }
}
