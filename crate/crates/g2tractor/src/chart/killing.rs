//! Conformal Killing fields and 2-forms attached to an almost Einstein scale.

use serde::Serialize;

use crate::forms::{antisymmetrize, hook, wedge, KForm, Metric, Tensor};
use crate::g2core::induced_volume;
use crate::linalg::Matrix;
use crate::scalars::Scalar;
use crate::stabilizer::OrbitLabel;

use super::tractor::{l0_3form, l0_standard, ThreeFormSplit, TractorSplit, FIBER, X_SLOT};
use super::{form_values, values, ChartError, Jet, PointGeometry, DIM};

fn form_of(t: &Tensor<Jet>) -> KForm<Jet> {
    antisymmetrize(t)
}

/// `ξ^a = −φ^{ab}σ_{,b} + ¼ φ^{ab}{}_{,b} σ`.
pub fn xi_iota7(p: &PointGeometry, phi: &KForm<Jet>, sigma: &Jet) -> Vec<Jet> {
    let t0 = phi.to_tensor();
    let t1 = p.nabla(&t0);
    let div = p.trace(&t1, 1, 2);
    let su = p.raise(&p.grad(sigma).d);
    let lower: Vec<Jet> = (0..DIM)
        .map(|c| {
            let mut acc = div.d[c].scale(0.25) * *sigma;
            for d in 0..DIM {
                acc = acc - *t0.get(&[c, d]) * su[d];
            }
            acc
        })
        .collect();
    p.raise(&lower)
}

/// Projecting part of `K = −S ⌟ Φ`: `ξ^a = σθ^a + μ_b φ^{ba}`.
pub fn xi_from_tractors(p: &PointGeometry, s: &TractorSplit, f: &ThreeFormSplit) -> Vec<Jet> {
    let big = f.to_fiber();
    let sv = s.to_fiber();
    let k = hook(&sv, &big).neg();
    let lower: Vec<Jet> = (0..DIM).map(|b| k.get(&[X_SLOT, 1 + b])).collect();
    p.raise(&lower)
}

/// `π₇(η) = ⅙ φ^{ab}η_{a,b} − (1/12) φ_{ab,}{}^b η^a`.
pub fn pi7(p: &PointGeometry, phi: &KForm<Jet>, eta: &[Jet]) -> Jet {
    let t0 = phi.to_tensor();
    let up = t0.contract_slot(&p.ginv, 0).contract_slot(&p.ginv, 1);
    let deta = p.nabla(&Tensor { dim: DIM, rank: 1, d: p.lower(eta) });
    let div = p.trace(&p.nabla(&t0), 1, 2);
    let mut acc = Jet::zero();
    for a in 0..DIM {
        for b in 0..DIM {
            acc = acc + (*up.get(&[a, b]) * *deta.get(&[a, b])).scale(1.0 / 6.0);
        }
        acc = acc - (div.d[a] * eta[a]).scale(1.0 / 12.0);
    }
    acc
}

/// `‖(η_{(a,b)})₀‖_∞` at the point.
pub fn conformal_killing_residual(p: &PointGeometry, eta: &[Jet]) -> f64 {
    let d = p.nabla(&Tensor { dim: DIM, rank: 1, d: p.lower(eta) });
    let div = p.trace(&d, 0, 1).d[0].value() / DIM as f64;
    let mut worst: f64 = 0.0;
    for a in 0..DIM {
        for b in 0..DIM {
            let s = 0.5 * (d.get(&[a, b]).value() + d.get(&[b, a]).value());
            worst = worst.max((s - div * p.g.get(a, b).value()).abs());
        }
    }
    worst
}

/// `∇_c η^c`.
pub fn divergence(p: &PointGeometry, eta: &[Jet]) -> Jet {
    let gam = &p.curvature.christoffel;
    let mut acc = Jet::zero();
    for c in 0..DIM {
        acc = acc + eta[c].deriv(c);
        for d in 0..DIM {
            acc = acc + *gam.get(&[c, c, d]) * eta[d];
        }
    }
    acc
}

#[derive(Clone, Debug)]
pub struct IjkForms<T> {
    pub i: KForm<T>,
    pub j: KForm<T>,
    pub k: KForm<T>,
}

impl IjkForms<Jet> {
    pub fn values(&self) -> IjkForms<f64> {
        IjkForms { i: form_values(&self.i), j: form_values(&self.j), k: form_values(&self.k) }
    }
}

impl IjkForms<f64> {
    pub fn max_diff(&self, o: &Self) -> f64 {
        [self.i.sub(&o.i), self.j.sub(&o.j), self.k.sub(&o.k)].iter().map(|f| f.max_abs()).fold(0.0, f64::max)
    }
}

/// `I`, `J`, `K` from the tractor components of `S` and `Φ`.
pub fn ijk_components(p: &PointGeometry, s: &TractorSplit, f: &ThreeFormSplit) -> IjkForms<Jet> {
    let (sg, rho) = (s.sigma, s.rho);
    let mu = &s.mu;
    let mul = p.lower(mu);
    let thu = p.raise(&f.theta);
    let th = &f.theta;
    let phi = |a: usize, b: usize| f.phi.get(&[a, b]);
    let mu_chi = hook(mu, &f.chi);
    let th_chi = hook(&thu, &f.chi);
    let mu2 = crate::forms::dot(&mul, mu);
    let mphi: Vec<Jet> = (0..DIM).map(|b| (0..DIM).fold(Jet::zero(), |acc, c| acc + mu[c] * phi(c, b))).collect();
    let mut i = KForm::zero(DIM, 2);
    let mut j = KForm::zero(DIM, 2);
    let mut k = KForm::zero(DIM, 2);
    for a in 0..DIM {
        for b in a + 1..DIM {
            let mt = mul[a] * th[b] - mul[b] * th[a];
            let psi = f.psi.get(&[a, b]);
            // 3 μ^c μ_{[c} φ_{ab]}
            let mmp = mu2 * phi(a, b) - mul[a] * mphi[b] + mul[b] * mphi[a];
            // 2 μ^c μ_{[a} φ_{b]c}
            let mmq = -(mul[a] * mphi[b] - mul[b] * mphi[a]);
            let base = sg * sg * psi + sg * mu_chi.get(&[a, b]) + sg * mt;
            i.set(&[a, b], -base + sg * rho * phi(a, b) + mmp);
            k.set(&[a, b], base + sg * rho * phi(a, b) - mmq);
            let mut tpt = Jet::zero();
            for c in 0..DIM {
                tpt = tpt + mu[c] * (phi(c, a) * th[b] + phi(a, b) * th[c] + phi(b, c) * th[a]);
            }
            j.set(&[a, b], -sg * th_chi.get(&[a, b]) + tpt);
        }
    }
    IjkForms { i, j, k }
}

/// `I`, `J`, `K` as projecting parts of `Φ_I = S⌟(S♭∧Φ)`, `Φ_J = S⌟∗Φ`,
/// `Φ_K = S♭∧(S⌟Φ)`, computed pointwise in the fiber.
pub fn ijk_fiber(p: &PointGeometry, s: &TractorSplit, f: &ThreeFormSplit) -> Result<IjkForms<f64>, ChartError> {
    let (phi, h) = super::tractor::fiber_values(p, f);
    let sv = s.values();
    let err = |e: String| ChartError::Degenerate(e);
    let vol = induced_volume(&phi, &h).map_err(|e| err(e.to_string()))?;
    let metric = Metric::new(h).map_err(|e| err(e.to_string()))?;
    let sflat = metric.flat(&sv);
    let pi = hook(&sv, &wedge(&sflat, &phi).map_err(|e| err(e.to_string()))?);
    let pj = hook(&sv, &metric.hodge(&vol, &phi).map_err(|e| err(e.to_string()))?);
    let pk = wedge(&sflat, &hook(&sv, &phi)).map_err(|e| err(e.to_string()))?;
    let top = |big: &KForm<f64>| {
        let mut out = KForm::zero(DIM, 2);
        for a in 0..DIM {
            for b in a + 1..DIM {
                out.set(&[a, b], big.get(&[X_SLOT, 1 + a, 1 + b]));
            }
        }
        out
    };
    debug_assert_eq!(pi.dim(), FIBER);
    Ok(IjkForms { i: top(&pi), j: top(&pj), k: top(&pk) })
}

/// Second-order pieces shared by the `σ, φ` formulas.
struct SigmaPhi {
    sigma: Jet,
    ds: Vec<Jet>,
    dsu: Vec<Jet>,
    lap: Jet,
    phi: KForm<Jet>,
    chi: KForm<Jet>,
    /// `φ_{ac,}{}^c` as a 1-form.
    v2: KForm<Jet>,
    /// `⅓ φ_{ab,c}{}^c + ⅔ φ_{c[a,b]}{}^c + ½ φ_{c[a,}{}^c{}_{b]} + 4 P^c_{[a} φ_{b]c}`.
    second: KForm<Jet>,
    jtrace: Jet,
}

fn sigma_phi(p: &PointGeometry, phi: &KForm<Jet>, sigma: &Jet) -> SigmaPhi {
    let t0 = phi.to_tensor();
    let t1 = p.nabla(&t0);
    let t2 = p.nabla(&t1);
    let ds = p.grad(sigma).d;
    let hess = p.nabla(&Tensor { dim: DIM, rank: 1, d: ds.clone() });
    let lap = p.trace(&hess, 0, 1).d[0];
    let lapphi = p.trace(&t2, 2, 3);
    let u = p.trace(&t2, 0, 3);
    let w = p.trace(&t2, 0, 2);
    let pm = p.schouten_mixed();
    let second = Tensor::from_fn(DIM, 2, |i| {
        let (a, b) = (i[0], i[1]);
        let mut pp = Jet::zero();
        for c in 0..DIM {
            pp = pp + *pm.get(&[c, a]) * *t0.get(&[b, c]) - *pm.get(&[c, b]) * *t0.get(&[a, c]);
        }
        lapphi.get(&[a, b]).scale(1.0 / 3.0)
            + (*u.get(&[a, b]) - *u.get(&[b, a])).scale(1.0 / 3.0)
            + (*w.get(&[a, b]) - *w.get(&[b, a])).scale(0.25)
            + pp.scale(2.0)
    });
    SigmaPhi {
        sigma: *sigma,
        dsu: p.raise(&ds),
        ds,
        lap,
        phi: phi.clone(),
        chi: antisymmetrize(&t1),
        v2: KForm::one_form(&p.trace(&t1, 1, 2).d),
        second: form_of(&second),
        jtrace: p.schouten_trace(),
    }
}

/// `I`, `J`, `K` as the displayed second-order expressions in `σ` and `φ`.
pub fn ijk_forms(p: &PointGeometry, phi: &KForm<Jet>, sigma: &Jet) -> IjkForms<Jet> {
    let d = sigma_phi(p, phi, sigma);
    let s = d.sigma;
    let n = DIM;
    let mut i = KForm::zero(n, 2);
    let mut j = KForm::zero(n, 2);
    let mut k = KForm::zero(n, 2);
    let ph = |a: usize, b: usize| d.phi.get(&[a, b]);
    let alt = |a: usize, b: usize, c: usize| d.chi.get(&[a, b, c]);
    let v2 = |a: usize| d.v2.get(&[a]);
    let su_phi: Vec<Jet> = (0..n).map(|b| (0..n).fold(Jet::zero(), |acc, c| acc + d.dsu[c] * ph(b, c))).collect();
    let gs2 = crate::forms::dot(&d.ds, &d.dsu);
    let vu: Vec<Jet> = p.raise(&(0..n).map(v2).collect::<Vec<_>>());
    for a in 0..n {
        for b in a + 1..n {
            let sec = d.second.get(&[a, b]);
            let mut s_alt = Jet::zero();
            let mut u_alt = Jet::zero();
            let mut tri = Jet::zero();
            for c in 0..n {
                s_alt = s_alt + d.dsu[c] * alt(c, a, b);
                u_alt = u_alt + vu[c] * alt(a, b, c);
                tri = tri + d.dsu[c] * (ph(a, b) * v2(c) + ph(b, c) * v2(a) + ph(c, a) * v2(b));
            }
            let sv = (d.ds[a] * v2(b) - d.ds[b] * v2(a)).scale(0.5);
            let three = gs2 * ph(a, b) + d.ds[a] * su_phi[b] - d.ds[b] * su_phi[a];
            let two = (d.ds[a] * su_phi[b] - d.ds[b] * su_phi[a]).scale(0.5) * Jet::constant(2.0);
            let lapterm = (s * d.lap * ph(a, b)).scale(0.2);
            i.set(&[a, b], (s * s * sec).scale(0.2) - s * s_alt - (s * sv).scale(0.5) - lapterm + three);
            j.set(&[a, b], (s * u_alt).scale(-0.25) + tri.scale(0.25));
            let sec_k = sec + (d.jtrace * ph(a, b)).scale(2.0);
            k.set(&[a, b], (s * s * sec_k).scale(-0.2) + s * s_alt + (s * sv).scale(0.5) - lapterm - two);
        }
    }
    IjkForms { i, j, k }
}

/// The long formula for `φ′` written directly with exterior operations.
fn closed_form_member(p: &PointGeometry, phi: &KForm<Jet>, sigma: &Jet, abar: f64, b: f64) -> KForm<Jet> {
    let d = sigma_phi(p, phi, sigma);
    let s = d.sigma;
    let dsf = KForm::one_form(&d.ds);
    let w = |x: &KForm<Jet>, y: &KForm<Jet>| wedge(x, y).expect("degrees fit");
    let a_part = d
        .second
        .scale(&(s * s).scale(0.2))
        .sub(&hook(&d.dsu, &d.chi).scale(&s))
        .sub(&w(&dsf, &d.v2).scale(&s.scale(0.25)))
        .sub(&d.phi.scale(&(s * d.lap).scale(0.2)))
        .add(&hook(&d.dsu, &w(&dsf, &d.phi)));
    let vu = p.raise(d.v2.components());
    let b_part = hook(&vu, &d.chi).scale(&s.scale(-0.25)).add(&hook(&d.dsu, &w(&d.phi, &d.v2)).scale(&Jet::constant(0.25)));
    phi.add(&a_part.scale(&Jet::constant(abar))).add(&b_part.scale(&Jet::constant(b)))
}

/// `φ′ = φ + Ā I + B J`, cross-checked against the long formula.
pub fn family_2form(
    p: &PointGeometry,
    phi: &KForm<Jet>,
    sigma: &Jet,
    eps: i8,
    abar: f64,
    b: f64,
    tol: f64,
) -> Result<KForm<Jet>, ChartError> {
    let c = -(eps as f64) * abar * abar + 2.0 * abar + b * b;
    if c.abs() > tol.max(1e-12) * (1.0 + abar * abar + b * b) {
        return Err(ChartError::Constraint(format!("−εĀ² + 2Ā + B² = {c:e}")));
    }
    let ijk = ijk_forms(p, phi, sigma);
    let out = phi.add(&ijk.i.scale(&Jet::constant(abar))).add(&ijk.j.scale(&Jet::constant(b)));
    let long = closed_form_member(p, phi, sigma, abar, b);
    let diff = form_values(&out.sub(&long)).max_abs();
    if diff > tol {
        return Err(ChartError::RouteMismatch(format!("family formula differs by {diff:e}")));
    }
    Ok(out)
}

/// `ℒ_ξ T − (w/5)(div ξ) T` for an all-lower tensor of weight `w`.
pub fn lie_derivative_weighted(
    p: &PointGeometry,
    xi: &[Jet],
    t: &Tensor<Jet>,
    w: f64,
    killing_tol: f64,
) -> Result<Tensor<Jet>, ChartError> {
    let r = conformal_killing_residual(p, xi);
    if r > killing_tol {
        return Err(ChartError::NotKilling(r));
    }
    let div = divergence(p, xi);
    Ok(Tensor::from_fn(DIM, t.rank, |idx| {
        let mut acc = Jet::zero();
        for c in 0..DIM {
            acc = acc + xi[c] * t.get(idx).deriv(c);
        }
        let mut j = idx.to_vec();
        for s in 0..t.rank {
            for c in 0..DIM {
                j[s] = c;
                acc = acc + xi[c].deriv(idx[s]) * *t.get(&j);
            }
            j[s] = idx[s];
        }
        acc - (div * *t.get(idx)).scale(w / DIM as f64)
    }))
}

pub fn scalar_tensor(f: Jet) -> Tensor<Jet> {
    Tensor { dim: DIM, rank: 0, d: vec![f] }
}

/// Residuals of the three ε-Sasaki conditions for `(h, ξ)`; `hp` is the
/// geometry of `h`.
pub fn sasaki_residuals(hp: &PointGeometry, xi: &[Jet], eps: i8) -> [f64; 3] {
    let xl = hp.lower(xi);
    let r1 = (crate::forms::dot(&xl, xi).value() - 1.0).abs();
    let d1 = hp.nabla(&Tensor { dim: DIM, rank: 1, d: xl.clone() });
    let d2 = hp.nabla(&d1);
    let e = eps as f64;
    let mut r2: f64 = 0.0;
    let mut r3: f64 = 0.0;
    for a in 0..DIM {
        for b in 0..DIM {
            r2 = r2.max((d1.get(&[a, b]).value() + d1.get(&[b, a]).value()).abs() * 0.5);
            for c in 0..DIM {
                let want = e * (xl[a].value() * hp.g.get(b, c).value() - hp.g.get(a, c).value() * xl[b].value());
                r3 = r3.max((d2.get(&[a, b, c]).value() - want).abs());
            }
        }
    }
    [r1, r2, r3]
}

/// Predicted `I`, `J`, `K` on the open orbit in the scale `σ` itself.
pub fn ijk_open_orbit(f: &ThreeFormSplit, xi: &[Jet], eps: i8) -> IjkForms<f64> {
    let e = eps as f64;
    let phi = form_values(&f.phi);
    let phibar = form_values(&f.psi).scale(&-2.0);
    let i = phi.scale(&-e).add(&phibar).scale(&0.5);
    let k = phi.scale(&-e).sub(&phibar).scale(&0.5);
    let j = form_values(&hook(xi, &f.chi));
    IjkForms { i, j, k }
}

fn endo(p: &PointGeometry, f: &KForm<f64>) -> Matrix<f64> {
    let t = f.to_tensor();
    Matrix::from_fn(DIM, DIM, |a, b| (0..DIM).map(|c| p.ginv.get(a, c).value() * t.get(&[c, b])).sum())
}

/// Largest violation of the quaternion-type composition table of `I`, `J`,
/// `K` restricted to `ξ^⊥`, in the scale `σ` (which must be the chart scale).
pub fn composition_residual(p: &PointGeometry, ijk: &IjkForms<f64>, xi: &[f64], eps: i8) -> f64 {
    let g = Matrix::from_fn(DIM, DIM, |a, b| p.g.get(a, b).value());
    let xl = g.apply(xi);
    let n2: f64 = xl.iter().zip(xi).map(|(a, b)| a * b).sum();
    let proj = Matrix::from_fn(DIM, DIM, |a, b| (a == b) as u8 as f64 - xi[a] * xl[b] / n2);
    let (i, j, k) = (endo(p, &ijk.i), endo(p, &ijk.j), endo(p, &ijk.k));
    let on_c = |m: &Matrix<f64>| proj.mul(m).mul(&proj);
    let e = eps as f64;
    let sc = |m: &Matrix<f64>, s: f64| Matrix::from_fn(DIM, DIM, |a, b| m.get(a, b) * s);
    let checks = [
        (i.mul(&i), sc(&proj, -e)),
        (j.mul(&j), proj.clone()),
        (k.mul(&k), sc(&proj, e)),
        (j.mul(&k), i.clone()),
        (k.mul(&j), sc(&i, -1.0)),
        (k.mul(&i), sc(&j, -e)),
        (i.mul(&k), sc(&j, e)),
        (i.mul(&j), sc(&k, -1.0)),
        (j.mul(&i), k.clone()),
    ];
    checks
        .iter()
        .map(|(lhs, rhs)| {
            let (l, r) = (on_c(lhs), on_c(rhs));
            l.d.iter().zip(&r.d).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
        })
        .fold(0.0, f64::max)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PointClass {
    pub label: OrbitLabel,
    /// Both `σ` and `ξ` fall inside the dead-band, so the label rests on
    /// tolerance choices.
    pub ambiguous: bool,
}

/// Tangent-side orbit classification at a point.
///
/// On `ξ = 0` the `M₂±` clause is read from `α = μ^c θ_c`, the `X`-slot of
/// `X × S = (0, ξ, α)`.
pub fn classify_point(p: &PointGeometry, sigma: &Jet, phi: &KForm<Jet>, tol: f64) -> PointClass {
    let s = l0_standard(p, sigma);
    let f = l0_3form(p, phi);
    let xi = values(&xi_from_tractors(p, &s, &f));
    let sv = sigma.value();
    let xin = xi.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let ambiguous = sv.abs() <= tol && xin <= tol;
    let label = if sv > tol {
        OrbitLabel::M5Plus
    } else if sv < -tol {
        OrbitLabel::M5Minus
    } else if xin > tol {
        OrbitLabel::M4
    } else {
        let mu = values(&s.mu);
        let mun = mu.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let alpha: f64 = mu.iter().zip(values(&f.theta)).map(|(a, b)| a * b).sum();
        if mun <= tol {
            // ∓Δσ > 0 on M₀±, and Δσ = −5ρ where σ = 0.
            if s.rho.value() > 0.0 {
                OrbitLabel::M0Plus
            } else {
                OrbitLabel::M0Minus
            }
        } else if alpha > tol {
            OrbitLabel::M2Plus
        } else if alpha < -tol {
            OrbitLabel::M2Minus
        } else {
            OrbitLabel::M2
        }
    };
    PointClass { label, ambiguous }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::{Chart, Domain, Field};

    fn euclid_like() -> Chart {
        Chart::new(
            ["x1", "x2", "x3", "x4", "x5"],
            Field::new(|_| Matrix::from_fn(5, 5, |i, j| Jet::constant(if i != j { 0.0 } else if i < 2 { -1.0 } else { 1.0 }))),
            Domain::boxed([-1.0; 5], [1.0; 5]),
        )
    }

    #[test]
    fn dilation_is_conformal_killing_and_quadratic_is_not() {
        let c = euclid_like();
        let p = c.at(&[0.2, -0.1, 0.3, 0.5, 0.7]).unwrap();
        let dil: Vec<Jet> = p.coords.clone();
        assert!(conformal_killing_residual(&p, &dil) < 1e-10);
        let mut q = vec![Jet::zero(); 5];
        q[0] = p.coords[1] * p.coords[1];
        q[3] = p.coords[0] * p.coords[4];
        assert!(conformal_killing_residual(&p, &q) > 1e-2);
    }

    #[test]
    fn zero_inputs_give_zero() {
        let c = euclid_like();
        let p = c.at(&[0.1; 5]).unwrap();
        let phi = KForm::zero(5, 2);
        let xi = xi_iota7(&p, &phi, &Jet::constant(0.0));
        assert!(values(&xi).iter().all(|x| *x == 0.0));
        assert_eq!(pi7(&p, &phi, &vec![Jet::zero(); 5]).value(), 0.0);
        let ijk = ijk_forms(&p, &phi, &Jet::zero()).values();
        assert_eq!(ijk.i.max_abs() + ijk.j.max_abs() + ijk.k.max_abs(), 0.0);
    }

    #[test]
    fn lie_derivative_of_invariant_scalar_vanishes() {
        let c = euclid_like();
        let p = c.at(&[0.3, 0.2, 0.1, -0.2, 0.4]).unwrap();
        // Rotation in the (x3, x4) plane preserves x3² + x4².
        let mut rot = vec![Jet::zero(); 5];
        rot[2] = -p.coords[3];
        rot[3] = p.coords[2];
        let f = p.coords[2] * p.coords[2] + p.coords[3] * p.coords[3];
        let l = lie_derivative_weighted(&p, &rot, &scalar_tensor(f), 1.0, 1e-12).unwrap();
        assert!(l.max_abs() < 1e-14);
        let mut bad = vec![Jet::zero(); 5];
        bad[2] = p.coords[2] * p.coords[2];
        assert!(matches!(lie_derivative_weighted(&p, &bad, &scalar_tensor(f), 1.0, 1e-8), Err(ChartError::NotKilling(_))));
    }

    #[test]
    fn translation_fails_first_sasaki_condition() {
        let c = euclid_like();
        let p = c.at(&[0.0; 5]).unwrap();
        let mut t = vec![Jet::zero(); 5];
        t[2] = Jet::constant(2.0);
        let r = sasaki_residuals(&p, &t, 1);
        assert!(r[0] > 1.0);
        assert!(r[1] < 1e-14);
    }
}
