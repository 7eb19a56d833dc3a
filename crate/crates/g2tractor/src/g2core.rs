//! G₂-structures on the 7-dimensional fiber.
//!
//! A split-generic 3-form `Φ` determines a metric `H` of signature (3,4), a
//! volume form and a cross product. The metric is bootstrapped from the Hitchin
//! form `B(x, y) = (x⌟Φ)∧(y⌟Φ)∧Φ`, which needs no metric: the trace formula
//! `H_×(x, y) = −(1/6) tr(x × (y × ·))` computed with `B` as raising metric is
//! proportional to `B`, and the unique self-consistent rescaling is a cube root.

use thiserror::Error;

use crate::forms::{self, hook, wedge, wedge_all, Endo7, FormError, KForm, Metric, Tensor, N};
use crate::linalg::{self, Matrix};
use crate::scalars::{ExactScalar, Scalar};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum G2Error {
    #[error("3-form is not split-generic (Hitchin form signature {0:?})")]
    NotGeneric((usize, usize, usize)),
    #[error("metric bootstrap did not close: {0}")]
    Bootstrap(&'static str),
    #[error(transparent)]
    Form(#[from] FormError),
}

/// Relative tolerance for the floating backend.
pub const FLOAT_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct G2Structure<T> {
    pub phi: KForm<T>,
    pub metric: Metric<T>,
    pub vol: KForm<T>,
    pub star_phi: KForm<T>,
    phi_up: KForm<T>,
    star_phi_up: KForm<T>,
    /// `C[c][a][b] = (E_a × E_b)^c`.
    cross_table: Vec<T>,
}

fn e_vec<T: Scalar>(i: usize) -> Vec<T> {
    (0..N).map(|j| if i == j { T::one() } else { T::zero() }).collect()
}

/// The coefficient of `e^{1…7}` in `(E_i⌟Φ)∧(E_j⌟Φ)∧Φ`.
pub fn hitchin_form<T: Scalar>(phi: &KForm<T>) -> Matrix<T> {
    let hooks: Vec<KForm<T>> = (0..N).map(|i| hook(&e_vec(i), phi)).collect();
    let mut b = Matrix::zeros(N, N);
    for i in 0..N {
        for j in i..N {
            let w = wedge_all(&[&hooks[i], &hooks[j], phi]).expect("degree 7");
            let v = w.components()[0].clone();
            b.set(i, j, v.clone());
            b.set(j, i, v);
        }
    }
    b
}

fn cross_table<T: Scalar>(phi: &KForm<T>, raise: &Matrix<T>) -> Vec<T> {
    let mut c = vec![T::zero(); N * N * N];
    for a in 0..N {
        for b in 0..N {
            if a == b {
                continue;
            }
            for d in 0..N {
                let p = phi.get(&[a, b, d]);
                if p.is_zero() {
                    continue;
                }
                for k in 0..N {
                    let r = raise.get(k, d);
                    if r.is_zero() {
                        continue;
                    }
                    let slot = &mut c[(k * N + a) * N + b];
                    *slot = slot.clone() + r.clone() * p.clone();
                }
            }
        }
    }
    c
}

/// `−(1/6) Σ_{z,w} C^z_{iw} C^w_{jz}`.
fn trace_metric<T: Scalar>(c: &[T]) -> Matrix<T> {
    let at = |k: usize, a: usize, b: usize| &c[(k * N + a) * N + b];
    let mut h = Matrix::zeros(N, N);
    for i in 0..N {
        for j in i..N {
            let mut acc = T::zero();
            for z in 0..N {
                for w in 0..N {
                    let x = at(z, i, w);
                    if x.is_zero() {
                        continue;
                    }
                    let y = at(w, j, z);
                    if y.is_zero() {
                        continue;
                    }
                    acc = acc + x.clone() * y.clone();
                }
            }
            let v = acc * T::from_ratio(-1, 6);
            h.set(i, j, v.clone());
            h.set(j, i, v);
        }
    }
    h
}

fn mat_near<T: Scalar>(a: &Matrix<T>, b: &Matrix<T>, tol: f64) -> bool {
    let scale = a.d.iter().chain(&b.d).map(|x| x.magnitude()).fold(0.0, f64::max).max(1.0);
    a.d.iter().zip(&b.d).all(|(x, y)| (x.clone() - y.clone()).near_zero(tol * scale))
}

fn is_split_signature(s: (usize, usize, usize)) -> bool {
    matches!(s, (3, 4, 0) | (4, 3, 0))
}

/// The metric determined by `phi` through the trace formula.
pub fn induced_metric<T: Scalar>(phi: &KForm<T>) -> Result<Matrix<T>, G2Error> {
    let b = hitchin_form(phi);
    let sig = linalg::signature(&b, FLOAT_TOL);
    if sig.2 != 0 {
        return Err(G2Error::NotGeneric(sig));
    }
    let binv = linalg::inverse(&b).ok_or(G2Error::NotGeneric(sig))?;
    let hb = trace_metric(&cross_table(phi, &binv));
    // H_B = τ B; the self-consistent metric is H = κ B with κ³ = τ.
    let (mut bi, mut bj, mut best) = (0, 0, 0.0);
    for i in 0..N {
        for j in 0..N {
            let m = b.get(i, j).magnitude();
            if m > best && !b.get(i, j).near_zero(0.0) {
                (bi, bj, best) = (i, j, m);
            }
        }
    }
    let tau = hb.get(bi, bj).clone() * b.get(bi, bj).try_recip().ok_or(G2Error::Bootstrap("zero Hitchin form"))?;
    let scaled_b = Matrix { rows: N, cols: N, d: b.d.iter().map(|x| x.clone() * tau.clone()).collect() };
    if !mat_near(&hb, &scaled_b, FLOAT_TOL) {
        return Err(G2Error::Bootstrap("trace metric not proportional to the Hitchin form"));
    }
    let kappa = tau.try_cbrt().ok_or(G2Error::Bootstrap("cube root outside the coefficient field"))?;
    let h = Matrix { rows: N, cols: N, d: b.d.iter().map(|x| x.clone() * kappa.clone()).collect() };
    let hinv = linalg::inverse(&h).ok_or(G2Error::Bootstrap("singular metric"))?;
    let check = trace_metric(&cross_table(phi, &hinv));
    if !mat_near(&check, &h, FLOAT_TOL) {
        return Err(G2Error::Bootstrap("trace formula is not self-consistent"));
    }
    let sig = linalg::signature(&h, FLOAT_TOL);
    if !is_split_signature(sig) {
        return Err(G2Error::NotGeneric(sig));
    }
    Ok(h)
}

/// `(1/42) Σ H^{KM} (E_K⌟Φ)∧(E_M⌟Φ)∧Φ`.
pub fn induced_volume<T: Scalar>(phi: &KForm<T>, h: &Matrix<T>) -> Result<KForm<T>, G2Error> {
    let metric = Metric::new(h.clone())?;
    let hooks: Vec<KForm<T>> = (0..N).map(|i| hook(&e_vec(i), phi)).collect();
    let mut acc = KForm::zero(N, N);
    for k in 0..N {
        let mut raised = KForm::zero(N, 2);
        for m in 0..N {
            let c = metric.hinv.get(k, m);
            if !c.is_zero() {
                raised = raised.add(&hooks[m].scale(c));
            }
        }
        acc = acc.add(&wedge_all(&[&hooks[k], &raised, phi])?);
    }
    Ok(acc.scale(&T::from_ratio(1, 42)))
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct CompatibilityReport {
    pub generic: bool,
    pub metric_match: bool,
    pub orientation_match: bool,
}

impl CompatibilityReport {
    pub fn all(&self) -> bool {
        self.generic && self.metric_match && self.orientation_match
    }
}

pub fn genericity_and_compatibility<T: Scalar>(phi: &KForm<T>, h_ref: &Matrix<T>, vol_ref: &KForm<T>) -> CompatibilityReport {
    let b = hitchin_form(phi);
    let generic = is_split_signature(linalg::signature(&b, FLOAT_TOL));
    let mut rep = CompatibilityReport { generic, metric_match: false, orientation_match: false };
    if !generic {
        return rep;
    }
    let Ok(h) = induced_metric(phi) else { return rep };
    rep.metric_match = mat_near(&h, h_ref, FLOAT_TOL);
    if let Ok(vol) = induced_volume(phi, &h) {
        let ratio = vol.components()[0].clone() * vol_ref.components()[0].try_recip().unwrap_or_else(T::zero);
        rep.orientation_match = ratio.signum(FLOAT_TOL) > 0;
    }
    rep
}

impl<T: Scalar> G2Structure<T> {
    /// Builds the structure, deriving metric and volume from `phi`.
    pub fn from_phi(phi: KForm<T>) -> Result<Self, G2Error> {
        let h = induced_metric(&phi)?;
        let vol = induced_volume(&phi, &h)?;
        Self::from_parts(phi, h, vol)
    }

    /// Builds the structure with a known metric and volume form (not re-derived).
    pub fn from_parts(phi: KForm<T>, h: Matrix<T>, vol: KForm<T>) -> Result<Self, G2Error> {
        let metric = Metric::new(h)?;
        let star_phi = metric.hodge(&vol, &phi)?;
        let phi_up = metric.raise_form(&phi);
        let star_phi_up = metric.raise_form(&star_phi);
        let cross_table = cross_table(&phi, &metric.hinv);
        Ok(G2Structure { phi, metric, vol, star_phi, phi_up, star_phi_up, cross_table })
    }

    pub fn h(&self) -> &Matrix<T> {
        &self.metric.h
    }

    pub fn hinv(&self) -> &Matrix<T> {
        &self.metric.hinv
    }

    pub fn inner(&self, x: &[T], y: &[T]) -> T {
        self.metric.inner(x, y)
    }

    pub fn lower(&self, v: &[T]) -> Vec<T> {
        self.metric.lower(v)
    }

    pub fn raise(&self, w: &[T]) -> Vec<T> {
        self.metric.raise(w)
    }

    pub fn hodge(&self, a: &KForm<T>) -> KForm<T> {
        self.metric.hodge(&self.vol, a).expect("nondegenerate structure")
    }

    pub fn phi_up(&self) -> &KForm<T> {
        &self.phi_up
    }

    pub fn star_phi_up(&self) -> &KForm<T> {
        &self.star_phi_up
    }

    pub fn cross(&self, x: &[T], y: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); N];
        for a in 0..N {
            if x[a].is_zero() {
                continue;
            }
            for b in 0..N {
                if y[b].is_zero() {
                    continue;
                }
                let xy = x[a].clone() * y[b].clone();
                for (k, o) in out.iter_mut().enumerate() {
                    let c = &self.cross_table[(k * N + a) * N + b];
                    if !c.is_zero() {
                        *o = o.clone() + c.clone() * xy.clone();
                    }
                }
            }
        }
        out
    }

    /// `ι²₇(v)_{AB} = v^C Φ_{CAB}`.
    pub fn iota2_7(&self, v: &[T]) -> KForm<T> {
        hook(v, &self.phi)
    }

    /// `π²₇(A)^C = (1/6) A_{AB} Φ^{ABC}`.
    pub fn pi2_7(&self, a: &KForm<T>) -> Vec<T> {
        (0..N)
            .map(|c| {
                let mut acc = T::zero();
                for (m, v) in a.iter() {
                    if v.is_zero() {
                        continue;
                    }
                    let ij = forms::mask_indices(m);
                    acc = acc + v.clone() * self.phi_up.get(&[ij[0], ij[1], c]);
                }
                // Two orderings of (A, B) per increasing pair.
                acc * T::from_ratio(1, 3)
            })
            .collect()
    }

    /// `π²₁₄` as an endomorphism: `(2/3) A^A_B − (1/6) (∗Φ)_D{}^{EA}{}_B A^D{}_E`.
    pub fn pi2_14_endo(&self, a: &KForm<T>) -> Endo7<T> {
        let a_up = self.metric.raise_form(a);
        let mut mq = Matrix::zeros(N, N);
        for q in 0..N {
            for b in 0..N {
                let mut acc = T::zero();
                for (m, v) in a_up.iter() {
                    if v.is_zero() {
                        continue;
                    }
                    let dp = forms::mask_indices(m);
                    acc = acc + v.clone() * self.star_phi.get(&[dp[0], dp[1], q, b]);
                }
                mq.set(q, b, acc * T::from_i64(2));
            }
        }
        let second = self.hinv().mul(&mq);
        let a_mixed = self.hinv().mul(&two_form_matrix(a));
        Matrix::from_fn(N, N, |i, j| {
            a_mixed.get(i, j).clone() * T::from_ratio(2, 3) - second.get(i, j).clone() * T::from_ratio(1, 6)
        })
    }

    pub fn decompose2(&self, a: &KForm<T>) -> (Vec<T>, KForm<T>) {
        let v = self.pi2_7(a);
        let m = a.sub(&self.iota2_7(&v));
        (v, m)
    }

    /// `π³₁(Ψ) = (1/42) Φ^{ABC} Ψ_{ABC}`.
    pub fn pi3_1(&self, psi: &KForm<T>) -> T {
        let mut acc = T::zero();
        for (x, y) in self.phi_up.components().iter().zip(psi.components()) {
            if x.is_zero() || y.is_zero() {
                continue;
            }
            acc = acc + x.clone() * y.clone();
        }
        acc * T::from_ratio(1, 7)
    }

    /// `ι³₇(S) = −S⌟∗Φ`.
    pub fn iota3_7(&self, s: &[T]) -> KForm<T> {
        hook(s, &self.star_phi).neg()
    }

    /// `π³₇(Ψ)^A = (1/24) (∗Φ)^{BCDA} Ψ_{BCD}`.
    pub fn pi3_7(&self, psi: &KForm<T>) -> Vec<T> {
        (0..N)
            .map(|a| {
                let mut acc = T::zero();
                for (m, v) in psi.iter() {
                    if v.is_zero() {
                        continue;
                    }
                    let bcd = forms::mask_indices(m);
                    let s = self.star_phi_up.get(&[bcd[0], bcd[1], bcd[2], a]);
                    if !s.is_zero() {
                        acc = acc + v.clone() * s;
                    }
                }
                acc * T::from_ratio(1, 4)
            })
            .collect()
    }

    /// `¼ (∗(Φ∧Ψ))^♯`, an independent route to `π³₇`.
    pub fn pi3_7_via_wedge(&self, psi: &KForm<T>) -> Vec<T> {
        let w = wedge(&self.phi, psi).expect("degree 6");
        let one = self.hodge(&w);
        self.raise(one.components()).into_iter().map(|x| x * T::from_ratio(1, 4)).collect()
    }

    /// `i(A)_{ABC} = 6 Φ^D{}_{[AB} A_{C]D}` for symmetric `A`.
    pub fn i_map(&self, a: &Matrix<T>) -> KForm<T> {
        // Φ^D_{AB} A_{CD} = Φ_{EAB} (H⁻¹ A)^E_C
        let ma = self.hinv().mul(a);
        let t = |x: usize, y: usize, z: usize| {
            let mut acc = T::zero();
            for e in 0..N {
                let m = ma.get(e, z);
                if m.is_zero() {
                    continue;
                }
                let p = self.phi.get(&[e, x, y]);
                if !p.is_zero() {
                    acc = acc + p * m.clone();
                }
            }
            acc
        };
        let mut out = KForm::zero(N, 3);
        for &m in forms::basis_masks(N, 3) {
            let i = forms::mask_indices(m);
            let (x, y, z) = (i[0], i[1], i[2]);
            let v = (t(x, y, z) + t(y, z, x) + t(z, x, y)) * T::from_i64(2);
            out.set(&i, v);
        }
        out
    }

    /// `π³₂₇(Ψ)_{AB} = (1/8) ∗[(E_A⌟Φ)∧(E_B⌟Φ)∧Ψ] − (3/4) π³₁(Ψ) H_{AB}`.
    pub fn pi3_27(&self, psi: &KForm<T>) -> Matrix<T> {
        let hooks: Vec<KForm<T>> = (0..N).map(|i| hook(&e_vec(i), &self.phi)).collect();
        let a = self.pi3_1(psi);
        let mut out = Matrix::zeros(N, N);
        for i in 0..N {
            for j in i..N {
                let w = wedge_all(&[&hooks[i], &hooks[j], psi]).expect("degree 7");
                let star = self.hodge(&w).components()[0].clone();
                let v = star * T::from_ratio(1, 8) - a.clone() * self.h().get(i, j).clone() * T::from_ratio(3, 4);
                out.set(i, j, v.clone());
                out.set(j, i, v);
            }
        }
        out
    }

    pub fn decompose3(&self, psi: &KForm<T>) -> (T, Vec<T>, Matrix<T>) {
        (self.pi3_1(psi), self.pi3_7(psi), self.pi3_27(psi))
    }

    pub fn recompose3(&self, a: &T, v: &[T], s: &Matrix<T>) -> KForm<T> {
        self.phi.scale(a).add(&self.iota3_7(v)).add(&self.i_map(s))
    }

    /// H-skew and annihilates `Φ`.
    pub fn g2_algebra_test(&self, a: &Endo7<T>) -> bool {
        let l = self.h().mul(a);
        let skew = (0..N).all(|i| (0..N).all(|j| (l.get(i, j).clone() + l.get(j, i).clone()).near_zero(FLOAT_TOL)));
        skew && derivation(a, &self.phi).near_zero(FLOAT_TOL)
    }

    /// Dimension of `{A ∈ so(H) : A·Φ = 0, A v = 0 for v in extra}`.
    pub fn annihilator_dim(&self, fixed_vectors: &[Vec<T>]) -> usize {
        let basis = forms::basis_masks(N, 2);
        let rows = 35 + N * fixed_vectors.len();
        let mut m = Matrix::zeros(rows, basis.len());
        for (col, &mask) in basis.iter().enumerate() {
            let pq = forms::mask_indices(mask);
            let mut w = KForm::zero(N, 2);
            w.set(&pq, T::one());
            let a = self.hinv().mul(&two_form_matrix(&w));
            let act = derivation(&a, &self.phi);
            for (r, v) in act.components().iter().enumerate() {
                m.set(r, col, v.clone());
            }
            for (k, s) in fixed_vectors.iter().enumerate() {
                for (r, v) in a.apply(s).into_iter().enumerate() {
                    m.set(35 + k * N + r, col, v);
                }
            }
        }
        basis.len() - linalg::rank(&m, FLOAT_TOL)
    }

    /// `Φ^E{}_{AB} Φ_{ECD} − (∗Φ)_{ABCD} − H_{AC}H_{BD} + H_{AD}H_{BC}`.
    pub fn contraction_phi_phi_residual(&self) -> Tensor<T> {
        let phi_mixed = Tensor::from_fn(N, 3, |i| {
            let mut acc = T::zero();
            for f in 0..N {
                let h = self.hinv().get(i[0], f);
                if !h.is_zero() {
                    acc = acc + h.clone() * self.phi.get(&[f, i[1], i[2]]);
                }
            }
            acc
        });
        let h = self.h();
        Tensor::from_fn(N, 4, |i| {
            let (a, b, c, d) = (i[0], i[1], i[2], i[3]);
            let mut acc = T::zero();
            for e in 0..N {
                let x = phi_mixed.get(&[e, a, b]);
                if x.is_zero() {
                    continue;
                }
                acc = acc + x.clone() * self.phi.get(&[e, c, d]);
            }
            acc - self.star_phi.get(&[a, b, c, d]) - h.get(a, c).clone() * h.get(b, d).clone()
                + h.get(a, d).clone() * h.get(b, c).clone()
        })
    }

    /// `Φ^F{}_{AB}(∗Φ)_{FCDE} − 3(H_{A[C}Φ_{DE]B} − H_{B[C}Φ_{DE]A})`.
    pub fn contraction_phi_starphi_residual(&self) -> Tensor<T> {
        let h = self.h();
        let phi_mixed = Tensor::from_fn(N, 3, |i| {
            let mut acc = T::zero();
            for f in 0..N {
                let hh = self.hinv().get(i[0], f);
                if !hh.is_zero() {
                    acc = acc + hh.clone() * self.phi.get(&[f, i[1], i[2]]);
                }
            }
            acc
        });
        // (1/6) Σ_σ sgn over (C, D, E) of H_{XC} Φ_{DEY}; cyclic terms pair up.
        let bracket = |x: usize, y: usize, c: usize, d: usize, e: usize| {
            let t = |p: usize, q: usize, r: usize| h.get(x, p).clone() * self.phi.get(&[q, r, y]);
            (t(c, d, e) + t(d, e, c) + t(e, c, d)) * T::from_ratio(1, 3)
        };
        Tensor::from_fn(N, 5, |i| {
            let (a, b, c, d, e) = (i[0], i[1], i[2], i[3], i[4]);
            let mut acc = T::zero();
            for f in 0..N {
                let x = phi_mixed.get(&[f, a, b]);
                if x.is_zero() {
                    continue;
                }
                acc = acc + x.clone() * self.star_phi.get(&[f, c, d, e]);
            }
            acc - (bracket(a, b, c, d, e) - bracket(b, a, c, d, e)) * T::from_i64(3)
        })
    }
}

/// The matrix `ω_{ij}` of a 2-form.
pub fn two_form_matrix<T: Scalar>(w: &KForm<T>) -> Matrix<T> {
    Matrix::from_fn(w.dim(), w.dim(), |i, j| w.get(&[i, j]))
}

/// The 2-form with components `½(m_{ij} − m_{ji})`.
pub fn matrix_two_form<T: Scalar>(m: &Matrix<T>) -> KForm<T> {
    let n = m.rows;
    let mut w = KForm::zero(n, 2);
    for &mask in forms::basis_masks(n, 2) {
        let ij = forms::mask_indices(mask);
        let v = (m.get(ij[0], ij[1]).clone() - m.get(ij[1], ij[0]).clone()) * T::from_ratio(1, 2);
        w.set(&ij, v);
    }
    w
}

/// Induced derivation on forms: `(A·a)_{I} = −Σ_s A^E{}_{i_s} a_{…E…}`.
pub fn derivation<T: Scalar>(a: &Matrix<T>, f: &KForm<T>) -> KForm<T> {
    let n = f.dim();
    let mut out = KForm::zero(n, f.degree());
    for &mask in forms::basis_masks(n, f.degree()) {
        let idx = forms::mask_indices(mask);
        let mut acc = T::zero();
        for s in 0..idx.len() {
            let mut j = idx.clone();
            for e in 0..n {
                let c = a.get(e, idx[s]);
                if c.is_zero() {
                    continue;
                }
                j[s] = e;
                let v = f.get(&j);
                if !v.is_zero() {
                    acc = acc - c.clone() * v;
                }
            }
        }
        out.set(&idx, acc);
    }
    out
}

/// `Φ = −e¹⁴⁷ + √2 e¹⁵⁶ + √2 e²³⁷ + e²⁴⁵ + e³⁴⁶` (1-based labels).
pub fn standard_phi<T: Scalar>() -> KForm<T> {
    let r2 = T::sqrt2();
    KForm::from_terms(
        N,
        3,
        &[
            (&[0, 3, 6], -T::one()),
            (&[0, 4, 5], r2.clone()),
            (&[1, 2, 6], r2),
            (&[1, 3, 4], T::one()),
            (&[2, 3, 5], T::one()),
        ],
    )
}

/// The matrix with 1 at (1,7), (2,5), (3,6) and their transposes, −1 at (4,4).
pub fn standard_metric<T: Scalar>() -> Matrix<T> {
    Matrix::from_fn(N, N, |i, j| match (i, j) {
        (0, 6) | (6, 0) | (1, 4) | (4, 1) | (2, 5) | (5, 2) => T::one(),
        (3, 3) => -T::one(),
        _ => T::zero(),
    })
}

pub fn standard_structure<T: Scalar>() -> G2Structure<T> {
    G2Structure::from_phi(standard_phi()).expect("standard 3-form is split-generic")
}

pub fn standard_exact() -> G2Structure<ExactScalar> {
    standard_structure()
}

/// An element of 𝔤₂ in the standard basis, from 14 parameters
/// `(A₁₁, A₁₂, A₂₁, A₂₂, W₁, W₂, X₁, X₂, Y₁, Y₂, Z₁, Z₂, r, s)`.
///
/// Block rows have sizes 1, 2, 1, 2, 1; `J = [[0, −1], [1, 0]]`.
pub fn g2_pattern<T: Scalar>(p: &[T; 14]) -> Endo7<T> {
    let [a11, a12, a21, a22, w1, w2, x1, x2, y1, y2, z1, z2, r, s] = p.clone();
    let r2 = T::sqrt2();
    let half_r2 = T::from_ratio(1, 2) * r2.clone();
    let tr = a11.clone() + a22.clone();
    let mut m = Matrix::zeros(N, N);
    let mut put = |i: usize, j: usize, v: T| m.set(i, j, v);
    // Row 1.
    put(0, 0, tr.clone());
    put(0, 1, z1.clone());
    put(0, 2, z2.clone());
    put(0, 3, s.clone());
    put(0, 4, w1.clone());
    put(0, 5, w2.clone());
    // Rows 2-3: X, A, √2 J Zᵀ, (s/√2) J, −W.
    put(1, 0, x1.clone());
    put(2, 0, x2.clone());
    put(1, 1, a11.clone());
    put(1, 2, a12.clone());
    put(2, 1, a21.clone());
    put(2, 2, a22.clone());
    put(1, 3, -(r2.clone() * z2.clone()));
    put(2, 3, r2.clone() * z1.clone());
    put(1, 5, -(s.clone() * half_r2.clone()));
    put(2, 4, s.clone() * half_r2.clone());
    put(1, 6, -w1.clone());
    put(2, 6, -w2.clone());
    // Row 4: r, −√2 Xᵀ J, 0, −√2 Z J, s.
    put(3, 0, r.clone());
    put(3, 1, -(r2.clone() * x2.clone()));
    put(3, 2, r2.clone() * x1.clone());
    put(3, 4, -(r2.clone() * z2.clone()));
    put(3, 5, r2.clone() * z1.clone());
    put(3, 6, s.clone());
    // Rows 5-6: Yᵀ, −(r/√2) J, √2 J X, −Aᵀ, −Zᵀ.
    put(4, 0, y1.clone());
    put(5, 0, y2.clone());
    put(4, 2, r.clone() * half_r2.clone());
    put(5, 1, -(r.clone() * half_r2.clone()));
    put(4, 3, -(r2.clone() * x2.clone()));
    put(5, 3, r2.clone() * x1.clone());
    put(4, 4, -a11.clone());
    put(4, 5, -a21.clone());
    put(5, 4, -a12.clone());
    put(5, 5, -a22.clone());
    put(4, 6, -z1.clone());
    put(5, 6, -z2.clone());
    // Row 7: 0, −Y, r, −Xᵀ, −tr A.
    put(6, 1, -y1);
    put(6, 2, -y2);
    put(6, 3, r);
    put(6, 4, -x1);
    put(6, 5, -x2);
    put(6, 6, -tr);
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::ExactScalar as E;

    fn ev(i: usize) -> Vec<E> {
        e_vec(i)
    }

    #[test]
    fn standard_metric_and_volume() {
        let g = standard_exact();
        assert_eq!(*g.h(), standard_metric());
        assert_eq!(g.vol, forms::top_form(N, E::from_integer(-1)));
        assert_eq!(g.phi.get(&[1, 3, 4]), E::from_integer(1));
    }

    #[test]
    fn hitchin_form_of_standard_phi() {
        let b = hitchin_form(&standard_phi::<E>());
        let h: Matrix<E> = standard_metric();
        assert_eq!(b.d, h.d.iter().map(|x| x * &E::from_integer(-6)).collect::<Vec<_>>());
    }

    #[test]
    fn hook_of_e4() {
        let phi = standard_phi::<E>();
        let one = E::from_integer(1);
        let expect = KForm::from_terms(N, 2, &[(&[0, 6], one.clone()), (&[1, 4], -one.clone()), (&[2, 5], -one)]);
        assert_eq!(hook(&ev(3), &phi), expect);
    }

    #[test]
    fn cross_examples() {
        let g = standard_exact();
        let c = g.cross(&ev(1), &ev(2));
        let mut expect = vec![E::from_integer(0); N];
        expect[0] = E::sqrt2();
        assert_eq!(c, expect);
        assert!(g.cross(&ev(4), &ev(4)).iter().all(|x| x.is_zero()));
    }

    #[test]
    fn contraction_identities() {
        let g = standard_exact();
        assert!(g.contraction_phi_phi_residual().d.iter().all(|x| x.is_zero()));
        assert!(g.contraction_phi_starphi_residual().d.iter().all(|x| x.is_zero()));
    }

    #[test]
    fn decomposition_left_inverses() {
        let g = standard_exact();
        assert_eq!(g.pi2_7(&g.iota2_7(&ev(4))), ev(4));
        assert_eq!(g.pi3_1(&g.phi), E::from_integer(1));
        assert!(g.pi3_7(&g.phi).iter().all(|x| x.is_zero()));
        assert!(g.pi3_27(&g.phi).d.iter().all(|x| x.is_zero()));
        assert_eq!(g.i_map(g.h()), g.phi.scale(&E::from_integer(6)));
        assert_eq!(g.pi3_7(&g.iota3_7(&ev(2))), ev(2));
    }

    #[test]
    fn algebra_dimension() {
        let g = standard_exact();
        assert_eq!(g.annihilator_dim(&[]), 14);
        assert!(g.g2_algebra_test(&Matrix::zeros(N, N)));
        let outside = g.hinv().mul(&two_form_matrix(&g.iota2_7(&ev(0))));
        assert!(!g.g2_algebra_test(&outside));
    }

    #[test]
    fn pattern_lies_in_g2() {
        let p: [E; 14] = std::array::from_fn(|i| E::from_ratio(i as i64 + 1, 3));
        let g = standard_exact();
        assert!(g.g2_algebra_test(&g2_pattern(&p)));
    }

    #[test]
    fn decomposable_form_is_not_generic() {
        let f = KForm::from_terms(N, 3, &[(&[0, 1, 2], E::from_integer(1))]);
        let rep = genericity_and_compatibility(&f, &standard_metric(), &forms::top_form(N, E::from_integer(-1)));
        assert!(!rep.generic);
        assert!(G2Structure::from_phi(f).is_err());
    }

    #[test]
    fn float_backend_agrees() {
        let g = standard_structure::<f64>();
        let h: Matrix<f64> = standard_metric();
        assert!(g.h().d.iter().zip(&h.d).all(|(a, b)| (a - b).abs() < 1e-12));
        assert!((g.vol.components()[0] + 1.0).abs() < 1e-12);
    }
}
