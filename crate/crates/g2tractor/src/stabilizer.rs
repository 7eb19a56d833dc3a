//! Data attached to a fixed nonzero tractor `S`.
//!
//! With `ε = −H(S, S)`, the stabilized 3-forms are
//! `Φ_I = S⌟(S♭∧Φ)`, `Φ_J = S⌟∗Φ`, `Φ_K = S♭∧(S⌟Φ)`, and the compatible
//! G₂-structures through `Φ` that also fix `S` are `Φ + Ā Φ_I + B Φ_J` with
//! `−ε Ā² + 2Ā + B² = 0`.
//!
//! Sign convention: with `ι³₇(S) = −S⌟∗Φ` one has `π³₇(Φ_J) = −S`
//! ([`SIGMA_J`]); recovery uses this throughout.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use thiserror::Error;

use crate::forms::{self, hook, wedge, FormError, KForm, N};
use crate::g2core::{G2Structure, FLOAT_TOL};
use crate::linalg::{self, Matrix};
use crate::scalars::{ExactScalar, Scalar, ScalarText};

/// `π³₇(Φ_J) = SIGMA_J · S`.
pub const SIGMA_J: i64 = -1;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StabilizerError {
    #[error("S must be nonzero")]
    ZeroVector,
    #[error("H(S,S) = {0} is not in {{-1, 0, 1}}; rescale S by 1/sqrt|H(S,S)|")]
    Unnormalized(String),
    #[error("parameters violate -eps*Abar^2 + 2*Abar + B^2 = 0 (residual {0})")]
    Constraint(String),
    #[error("parameterization {0} needs eps = {1}")]
    WrongVariant(&'static str, i8),
    #[error("eps = 0 has no eps-complex volume form")]
    Parabolic,
    #[error(transparent)]
    Form(#[from] FormError),
}

#[derive(Clone, Debug)]
pub struct StabilizerData<T> {
    pub s: Vec<T>,
    pub s_flat: Vec<T>,
    pub eps: i8,
    /// `K^A_B = −S^C Φ_C{}^A{}_B`.
    pub k: Matrix<T>,
    /// `K̃_{AB} = H_{AC} K^C_B = −(S⌟Φ)_{AB}`.
    pub k_form: KForm<T>,
    pub phi_i: KForm<T>,
    pub phi_j: KForm<T>,
    pub phi_k: KForm<T>,
    pub w_basis: Vec<Vec<T>>,
}

pub fn make_stabilizer<T: Scalar>(g: &G2Structure<T>, s: &[T]) -> Result<StabilizerData<T>, StabilizerError> {
    if s.iter().all(|x| x.near_zero(FLOAT_TOL)) {
        return Err(StabilizerError::ZeroVector);
    }
    let hss = g.inner(s, s);
    let eps = [-1i8, 0, 1]
        .into_iter()
        .find(|&e| (hss.clone() + T::from_i64(e as i64)).near_zero(FLOAT_TOL))
        .ok_or_else(|| StabilizerError::Unnormalized(format!("{:.6}", hss.value())))?;
    let s_lower = g.lower(s);
    let s_flat = KForm::one_form(&s_lower);
    let s_hook_phi = hook(s, &g.phi);
    let k_form = s_hook_phi.neg();
    let k = g.hinv().mul(&crate::g2core::two_form_matrix(&k_form));
    let phi_i = hook(s, &wedge(&s_flat, &g.phi)?);
    let phi_j = hook(s, &g.star_phi);
    let phi_k = wedge(&s_flat, &s_hook_phi)?;
    let row = Matrix { rows: 1, cols: N, d: s_lower.clone() };
    let w_basis = linalg::nullspace(&row, FLOAT_TOL);
    Ok(StabilizerData { s: s.to_vec(), s_flat: s_lower, eps, k, k_form, phi_i, phi_j, phi_k, w_basis })
}

impl<T: Scalar> StabilizerData<T> {
    pub fn eps_scalar(&self) -> T {
        T::from_i64(self.eps as i64)
    }

    /// `K² − ε id − S⊗S♭`.
    pub fn k_squared_residual(&self, g: &G2Structure<T>) -> Matrix<T> {
        let k2 = self.k.mul(&self.k);
        let sf = g.lower(&self.s);
        Matrix::from_fn(N, N, |i, j| {
            let id = if i == j { self.eps_scalar() } else { T::zero() };
            k2.get(i, j).clone() - id - self.s[i].clone() * sf[j].clone()
        })
    }

    /// Named exact checks of the defining identities.
    pub fn invariants(&self, g: &G2Structure<T>) -> Vec<(&'static str, bool)> {
        let hss = g.inner(&self.s, &self.s);
        let tol = FLOAT_TOL;
        let image_in_w = (0..N).all(|j| {
            let col: Vec<T> = (0..N).map(|i| self.k.get(i, j).clone()).collect();
            g.inner(&self.s, &col).near_zero(tol)
        });
        let sum = self.phi_i.add(&self.phi_k).sub(&g.phi.scale(&hss));
        let s_phi_k = hook(&self.s, &self.phi_k).sub(&hook(&self.s, &g.phi).scale(&hss));
        vec![
            ("K^2 = eps id + S (x) S_flat", self.k_squared_residual(g).d.iter().all(|x| x.near_zero(tol))),
            ("image K in S^perp", image_in_w),
            ("Phi_I + Phi_K = H(S,S) Phi", sum.near_zero(tol)),
            ("S hook Phi_I = 0", hook(&self.s, &self.phi_i).near_zero(tol)),
            ("S hook Phi_J = 0", hook(&self.s, &self.phi_j).near_zero(tol)),
            ("S hook Phi_K = H(S,S) S hook Phi", s_phi_k.near_zero(tol)),
            ("Phi_J = -iota37(S)", self.phi_j.add(&g.iota3_7(&self.s)).near_zero(tol)),
            ("dim stabilizer = 8", g.annihilator_dim(std::slice::from_ref(&self.s)) == 8),
        ]
    }

    /// Dimensions of `V ⊃ W ⊃ im K ⊃ ker K ⊃ ⟨S⟩ ⊃ 0` for isotropic `S`,
    /// or `None` if `S` is not isotropic or the chain is not nested.
    pub fn isotropic_filtration(&self) -> Option<[usize; 6]> {
        if self.eps != 0 {
            return None;
        }
        let cols = |vs: &[Vec<T>]| Matrix::from_fn(N, vs.len(), |i, j| vs[j][i].clone());
        let ker = linalg::nullspace(&self.k, FLOAT_TOL);
        let im: Vec<Vec<T>> = (0..N).map(|j| (0..N).map(|i| self.k.get(i, j).clone()).collect()).collect();
        let rank_im = linalg::rank(&cols(&im), FLOAT_TOL);
        let span_rank = |a: &[Vec<T>], b: &[Vec<T>]| {
            let mut all = a.to_vec();
            all.extend_from_slice(b);
            linalg::rank(&cols(&all), FLOAT_TOL)
        };
        let s = vec![self.s.clone()];
        let nested = span_rank(&self.w_basis, &im) == self.w_basis.len()
            && span_rank(&im, &ker) == rank_im
            && span_rank(&ker, &s) == ker.len();
        nested.then_some([N, self.w_basis.len(), rank_im, ker.len(), 1, 0])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum Branch {
    /// `Φ_t^−`: coefficient `−cosh t` on `Φ_I`.
    Minus,
    /// `Φ_t^+`: coefficient `+cosh t` on `Φ_I`.
    Plus,
}

/// A point of the family, in one of its parameterizations.
///
/// Trigonometric and hyperbolic parameters are stored through their
/// `(cos, sin)` / `(cosh, sinh)` values so that rational points stay exact.
#[derive(Clone, Debug, PartialEq)]
pub enum FamilyParam<T> {
    Raw { abar: T, b: T },
    /// `ε = −1`: `cos υ Φ_I + sin υ Φ_J + Φ_K`.
    Circle { cos: T, sin: T },
    /// `ε = +1`: `∓cosh t Φ_I + sinh t Φ_J − Φ_K`.
    Hyperbolic { branch: Branch, cosh: T, sinh: T },
    /// `ε = 0`: `Φ − (s²/2) Φ_I + s Φ_J`.
    Parabolic { s: T },
}

impl FamilyParam<f64> {
    pub fn circle_angle(u: f64) -> Self {
        FamilyParam::Circle { cos: u.cos(), sin: u.sin() }
    }

    pub fn hyperbolic_time(branch: Branch, t: f64) -> Self {
        FamilyParam::Hyperbolic { branch, cosh: t.cosh(), sinh: t.sinh() }
    }
}

impl<T: Scalar> FamilyParam<T> {
    /// `(Ā, B)` with `Φ′ = Φ + Ā Φ_I + B Φ_J`.
    pub fn to_raw(&self) -> (T, T) {
        match self {
            FamilyParam::Raw { abar, b } => (abar.clone(), b.clone()),
            FamilyParam::Circle { cos, sin } => (cos.clone() - T::one(), sin.clone()),
            FamilyParam::Hyperbolic { branch, cosh, sinh } => match branch {
                Branch::Minus => (T::one() - cosh.clone(), sinh.clone()),
                Branch::Plus => (T::one() + cosh.clone(), sinh.clone()),
            },
            FamilyParam::Parabolic { s } => (-(s.clone() * s.clone()) * T::from_ratio(1, 2), s.clone()),
        }
    }

    fn name(&self) -> &'static str {
        match self {
            FamilyParam::Raw { .. } => "raw",
            FamilyParam::Circle { .. } => "circle",
            FamilyParam::Hyperbolic { .. } => "hyperbolic",
            FamilyParam::Parabolic { .. } => "parabolic",
        }
    }

    pub fn to_json(&self) -> Value
    where
        T: ScalarText,
    {
        match self {
            FamilyParam::Raw { abar, b } => json!({"variant": "raw", "abar": abar.to_text(), "b": b.to_text()}),
            FamilyParam::Circle { cos, sin } => json!({"variant": "circle", "cos": cos.to_text(), "sin": sin.to_text()}),
            FamilyParam::Hyperbolic { branch, cosh, sinh } => json!({
                "variant": "hyperbolic",
                "branch": match branch { Branch::Minus => "-", Branch::Plus => "+" },
                "cosh": cosh.to_text(),
                "sinh": sinh.to_text(),
            }),
            FamilyParam::Parabolic { s } => json!({"variant": "parabolic", "s": s.to_text()}),
        }
    }
}

/// `−ε Ā² + 2Ā + B²`.
pub fn constraint_residual<T: Scalar>(eps: i8, abar: &T, b: &T) -> T {
    -(T::from_i64(eps as i64) * abar.clone() * abar.clone()) + abar.clone() * T::from_i64(2) + b.clone() * b.clone()
}

fn check_variant<T: Scalar>(sd: &StabilizerData<T>, p: &FamilyParam<T>) -> Result<(), StabilizerError> {
    let need = match p {
        FamilyParam::Raw { .. } => return Ok(()),
        FamilyParam::Circle { .. } => -1,
        FamilyParam::Hyperbolic { .. } => 1,
        FamilyParam::Parabolic { .. } => 0,
    };
    if sd.eps != need {
        return Err(StabilizerError::WrongVariant(p.name(), need));
    }
    let ok = match p {
        FamilyParam::Circle { cos, sin } => (cos.clone() * cos.clone() + sin.clone() * sin.clone() - T::one()).near_zero(FLOAT_TOL),
        FamilyParam::Hyperbolic { cosh, sinh, .. } => {
            (cosh.clone() * cosh.clone() - sinh.clone() * sinh.clone() - T::one()).near_zero(FLOAT_TOL) && cosh.signum(0.0) > 0
        }
        _ => true,
    };
    if !ok {
        return Err(StabilizerError::Constraint(p.name().to_string()));
    }
    Ok(())
}

pub fn family_member<T: Scalar>(sd: &StabilizerData<T>, g: &G2Structure<T>, p: &FamilyParam<T>) -> Result<KForm<T>, StabilizerError> {
    check_variant(sd, p)?;
    Ok(match p {
        FamilyParam::Raw { abar, b } => {
            let r = constraint_residual(sd.eps, abar, b);
            if !r.near_zero(FLOAT_TOL) {
                return Err(StabilizerError::Constraint(format!("{:.3e}", r.value())));
            }
            g.phi.add(&sd.phi_i.scale(abar)).add(&sd.phi_j.scale(b))
        }
        FamilyParam::Circle { cos, sin } => sd.phi_i.scale(cos).add(&sd.phi_j.scale(sin)).add(&sd.phi_k),
        FamilyParam::Hyperbolic { branch, cosh, sinh } => {
            let c = match branch {
                Branch::Minus => -cosh.clone(),
                Branch::Plus => cosh.clone(),
            };
            sd.phi_i.scale(&c).add(&sd.phi_j.scale(sinh)).sub(&sd.phi_k)
        }
        FamilyParam::Parabolic { s } => {
            let half_s2 = s.clone() * s.clone() * T::from_ratio(1, 2);
            g.phi.sub(&sd.phi_i.scale(&half_s2)).add(&sd.phi_j.scale(s))
        }
    })
}

/// Derivative of a closed-form parameterization with respect to its natural
/// parameter (`υ`, `t`, `s`) at the given point.
pub fn family_derivative<T: Scalar>(sd: &StabilizerData<T>, p: &FamilyParam<T>) -> Result<KForm<T>, StabilizerError> {
    check_variant(sd, p)?;
    Ok(match p {
        FamilyParam::Raw { .. } => return Err(StabilizerError::WrongVariant("raw", sd.eps)),
        FamilyParam::Circle { cos, sin } => sd.phi_i.scale(&-sin.clone()).add(&sd.phi_j.scale(cos)),
        FamilyParam::Hyperbolic { branch, cosh, sinh } => {
            let c = match branch {
                Branch::Minus => -sinh.clone(),
                Branch::Plus => sinh.clone(),
            };
            sd.phi_i.scale(&c).add(&sd.phi_j.scale(cosh))
        }
        FamilyParam::Parabolic { s } => sd.phi_i.scale(&-s.clone()).add(&sd.phi_j),
    })
}

/// Which closed form to differentiate at parameter 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parameterization {
    Circle,
    Hyperbolic(Branch),
    Parabolic,
}

pub fn derivative_at_zero<T: Scalar>(sd: &StabilizerData<T>, which: Parameterization) -> Result<KForm<T>, StabilizerError> {
    let p = match which {
        Parameterization::Circle => FamilyParam::Circle { cos: T::one(), sin: T::zero() },
        Parameterization::Hyperbolic(branch) => FamilyParam::Hyperbolic { branch, cosh: T::one(), sinh: T::zero() },
        Parameterization::Parabolic => FamilyParam::Parabolic { s: T::zero() },
    };
    family_derivative(sd, &p)
}

/// `Ψ = re + i_ε im` restricted to `S^⊥` (both parts annihilate `S`).
#[derive(Clone, Debug, PartialEq)]
pub struct EpsVolumeForm<T> {
    pub re: KForm<T>,
    pub im: KForm<T>,
    pub eps: i8,
}

impl<T: Scalar> EpsVolumeForm<T> {
    /// `Ψ∧Ψ̄ + (4/3) i_ε K̃∧K̃∧K̃`, whose only component is the `i_ε` part
    /// `−2 re∧im + (4/3) K̃³`.
    pub fn normalization_residual(&self, sd: &StabilizerData<T>) -> KForm<T> {
        let k3 = forms::wedge_all(&[&sd.k_form, &sd.k_form, &sd.k_form]).expect("degree 6");
        let ri = wedge(&self.re, &self.im).expect("degree 6");
        ri.scale(&T::from_i64(-2)).add(&k3.scale(&T::from_ratio(4, 3)))
    }
}

pub fn epsilon_volume_and_reconstruct<T: Scalar>(
    sd: &StabilizerData<T>,
    a: &T,
    b: &T,
) -> Result<(EpsVolumeForm<T>, KForm<T>), StabilizerError> {
    if sd.eps == 0 {
        return Err(StabilizerError::Parabolic);
    }
    let e = sd.eps_scalar();
    let r = a.clone() * a.clone() - e.clone() * b.clone() * b.clone() - T::one();
    if !r.near_zero(FLOAT_TOL) {
        return Err(StabilizerError::Constraint(format!("A^2 - eps B^2 - 1 = {:.3e}", r.value())));
    }
    let re = sd.phi_i.scale(a).add(&sd.phi_j.scale(&(e.clone() * b.clone())));
    let im = sd.phi_i.scale(b).add(&sd.phi_j.scale(a));
    let s_flat = KForm::one_form(&sd.s_flat);
    let phi_rec = re.add(&wedge(&s_flat, &sd.k_form)?.scale(&e));
    Ok((EpsVolumeForm { re, im, eps: sd.eps }, phi_rec))
}

/// `a ≠ b` and `a ∧ b = 0`.
pub fn antipodal_test<T: Scalar>(a: &KForm<T>, b: &KForm<T>) -> bool {
    let scale = a.max_abs().max(b.max_abs()).max(1.0);
    let distinct = !a.sub(b).near_zero(FLOAT_TOL * scale);
    distinct && wedge(a, b).expect("degree 6").near_zero(FLOAT_TOL * scale * scale)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum RecoveryBranch {
    /// `H(T,T) < 0`: `ε = +1`.
    TimelikeT,
    /// `H(T,T) > 0`: `ε = −1`.
    SpacelikeT,
    /// `H(T,T) = 0`, `T ≠ 0`: `ε = 0`.
    IsotropicT,
    /// `T = 0`: antipodal member, sign of `π³₂₇(Φ′) + H/7 = ±S♭⊗S♭`.
    Antipodal(i8),
}

impl RecoveryBranch {
    pub fn description(&self) -> &'static str {
        match self {
            RecoveryBranch::TimelikeT => "H(T,T) < 0: eps = +1, S = -T/s, s = sqrt(-H(T,T))",
            RecoveryBranch::SpacelikeT => "H(T,T) > 0: eps = -1, S = -T/s, s = -sqrt(H(T,T)), c = (7 pi31 - 3)/4",
            RecoveryBranch::IsotropicT => "H(T,T) = 0, T != 0: eps = 0, S = -T, Phi' = Phi_1",
            RecoveryBranch::Antipodal(1) => "T = 0, pi327 + H/7 = +S(x)S: eps = -1, Phi' = -Phi_I + Phi_K",
            RecoveryBranch::Antipodal(_) => "T = 0, pi327 + H/7 = -S(x)S: eps = +1, Phi' = Phi_I - Phi_K",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RecoveryResult<T> {
    pub eps: i8,
    pub s: Vec<T>,
    pub param: FamilyParam<T>,
    pub abar: T,
    pub b: T,
    pub branch: RecoveryBranch,
    pub t: Vec<T>,
    pub h_tt: T,
}

impl<T: Scalar + ScalarText> RecoveryResult<T> {
    pub fn to_json(&self) -> Value {
        json!({
            "eps": self.eps,
            "S": self.s.iter().map(|x| x.to_text()).collect::<Vec<_>>(),
            "params": self.param.to_json(),
            "abar": self.abar.to_text(),
            "b": self.b.to_text(),
            "branch": format!("{:?}", self.branch),
            "branch_detail": self.branch.description(),
            "T": self.t.iter().map(|x| x.to_text()).collect::<Vec<_>>(),
            "H_TT": self.h_tt.to_text(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RecoveryError {
    #[error("identical structure: phi_prime equals phi")]
    Identical,
    #[error("{0} is not representable in the coefficient field")]
    NotRepresentable(&'static str),
    #[error("phi_prime is not in a family through phi ({0})")]
    NotInFamily(String),
}

fn scale_vec<T: Scalar>(v: &[T], c: &T) -> Vec<T> {
    v.iter().map(|x| x.clone() * c.clone()).collect()
}

pub fn recover_scale<T: Scalar>(g: &G2Structure<T>, phi_prime: &KForm<T>) -> Result<RecoveryResult<T>, RecoveryError> {
    let t = g.pi3_7(phi_prime);
    let h_tt = g.inner(&t, &t);
    let t_norm2: f64 = t.iter().map(|x| x.value() * x.value()).sum();
    let isotropic = h_tt.near_zero(1e-9 * t_norm2);
    let t_zero = if T::EXACT { t.iter().all(|x| x.is_zero()) } else { t_norm2.sqrt() <= 1e-6 };
    let sigma = T::from_i64(SIGMA_J);
    let (eps, s, param, branch) = if t_zero {
        if phi_prime.sub(&g.phi).near_zero(FLOAT_TOL) {
            return Err(RecoveryError::Identical);
        }
        let x = g.pi3_27(phi_prime);
        let x = Matrix::from_fn(N, N, |i, j| x.get(i, j).clone() + g.h().get(i, j).clone() * T::from_ratio(1, 7));
        let (i, _) = (0..N)
            .map(|i| (i, x.get(i, i).magnitude()))
            .fold((0, -1.0), |acc, c| if c.1 > acc.1 { c } else { acc });
        let d = x.get(i, i).clone();
        let sign = d.signum(FLOAT_TOL);
        if sign == 0 {
            return Err(RecoveryError::NotInFamily("pi327 + H/7 has zero diagonal".into()));
        }
        let abs_d = if sign > 0 { d.clone() } else { -d.clone() };
        let root = abs_d.try_sqrt().ok_or(RecoveryError::NotRepresentable("sqrt of the rank-one factor"))?;
        let inv = root.try_recip().ok_or(RecoveryError::NotRepresentable("rank-one factor"))?;
        let s_flat: Vec<T> = (0..N).map(|j| x.get(i, j).clone() * inv.clone() * T::from_i64(sign as i64)).collect();
        let rank_one = (0..N).all(|a| {
            (0..N).all(|b| {
                (x.get(a, b).clone() - T::from_i64(sign as i64) * s_flat[a].clone() * s_flat[b].clone()).near_zero(FLOAT_TOL)
            })
        });
        if !rank_one {
            return Err(RecoveryError::NotInFamily("pi327 + H/7 is not ±S(x)S".into()));
        }
        let s = g.raise(&s_flat);
        if sign > 0 {
            (-1, s, FamilyParam::Circle { cos: -T::one(), sin: T::zero() }, RecoveryBranch::Antipodal(1))
        } else {
            (1, s, FamilyParam::Hyperbolic { branch: Branch::Plus, cosh: T::one(), sinh: T::zero() }, RecoveryBranch::Antipodal(-1))
        }
    } else if isotropic {
        (0, scale_vec(&t, &sigma), FamilyParam::Parabolic { s: T::one() }, RecoveryBranch::IsotropicT)
    } else if h_tt.signum(0.0) < 0 {
        let sv = (-h_tt.clone()).try_sqrt().ok_or(RecoveryError::NotRepresentable("sqrt(-H(T,T))"))?;
        let s = scale_vec(&t, &(sigma.clone() * sv.try_recip().expect("nonzero")));
        let pi31 = g.pi3_1(phi_prime);
        let root = (sv.clone() * sv.clone() + T::one()).try_sqrt();
        let branch = if pi31.signum(FLOAT_TOL) > 0 { Branch::Minus } else { Branch::Plus };
        let cosh = match root {
            Some(r) => r,
            // (3 − 7 π³₁)/4 = ∓cosh t
            None => {
                let a = (T::from_i64(3) - pi31 * T::from_i64(7)) * T::from_ratio(1, 4);
                if branch == Branch::Minus { -a } else { a }
            }
        };
        (1, s, FamilyParam::Hyperbolic { branch, cosh, sinh: sv }, RecoveryBranch::TimelikeT)
    } else {
        let sv = -h_tt.try_sqrt().ok_or(RecoveryError::NotRepresentable("sqrt(H(T,T))"))?;
        let s = scale_vec(&t, &(sigma.clone() * sv.try_recip().expect("nonzero")));
        let c = (g.pi3_1(phi_prime) * T::from_i64(7) - T::from_i64(3)) * T::from_ratio(1, 4);
        (-1, s, FamilyParam::Circle { cos: c, sin: sv }, RecoveryBranch::SpacelikeT)
    };
    let sd = make_stabilizer(g, &s).map_err(|e| RecoveryError::NotInFamily(e.to_string()))?;
    if sd.eps != eps {
        return Err(RecoveryError::NotInFamily(format!("recovered S has eps {} not {}", sd.eps, eps)));
    }
    let rebuilt = family_member(&sd, g, &param).map_err(|e| RecoveryError::NotInFamily(e.to_string()))?;
    let scale = phi_prime.max_abs().max(1.0);
    if !rebuilt.sub(phi_prime).near_zero(FLOAT_TOL * scale) {
        return Err(RecoveryError::NotInFamily(format!("reconstruction residual {:.3e}", rebuilt.sub(phi_prime).max_abs())));
    }
    let (abar, b) = param.to_raw();
    Ok(RecoveryResult { eps, s, param, abar, b, branch, t, h_tt })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub enum OrbitLabel {
    #[serde(rename = "M5+")]
    M5Plus,
    #[serde(rename = "M5-")]
    M5Minus,
    #[serde(rename = "M4")]
    M4,
    #[serde(rename = "M2+")]
    M2Plus,
    #[serde(rename = "M2-")]
    M2Minus,
    #[serde(rename = "M2")]
    M2,
    #[serde(rename = "M0+")]
    M0Plus,
    #[serde(rename = "M0-")]
    M0Minus,
}

impl OrbitLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            OrbitLabel::M5Plus => "M5+",
            OrbitLabel::M5Minus => "M5-",
            OrbitLabel::M4 => "M4",
            OrbitLabel::M2Plus => "M2+",
            OrbitLabel::M2Minus => "M2-",
            OrbitLabel::M2 => "M2",
            OrbitLabel::M0Plus => "M0+",
            OrbitLabel::M0Minus => "M0-",
        }
    }

    /// Labels that can occur for the given `ε`.
    pub fn allowed(eps: i8) -> &'static [OrbitLabel] {
        use OrbitLabel::*;
        match eps {
            -1 => &[M5Plus, M5Minus, M4],
            0 => &[M5Plus, M5Minus, M4, M2, M0Plus, M0Minus],
            _ => &[M5Plus, M5Minus, M4, M2Plus, M2Minus],
        }
    }
}

impl std::fmt::Display for OrbitLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClassifyError {
    #[error("X must be nonzero")]
    ZeroX,
    #[error("X is not isotropic (H(X,X) = {0})")]
    NotIsotropic(String),
    #[error(transparent)]
    Stabilizer(#[from] StabilizerError),
    #[error("no branch of the classifier applies (internal error)")]
    FellThrough,
    #[error("extra data inconsistent with the tractor conditions: {0}")]
    Inconsistent(&'static str),
}

/// Optional tangent-side data accompanying a ray.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RayExtra {
    pub nabla_sigma_zero: Option<bool>,
    pub laplacian_sign: Option<i8>,
}

fn parallel<T: Scalar>(a: &[T], b: &[T], tol: f64) -> bool {
    (0..N).all(|i| (i + 1..N).all(|j| (a[i].clone() * b[j].clone() - a[j].clone() * b[i].clone()).near_zero(tol)))
}

fn vec_near<T: Scalar>(a: &[T], b: &[T], tol: f64) -> bool {
    a.iter().zip(b).all(|(x, y)| (x.clone() - y.clone()).near_zero(tol))
}

/// Orbit of the isotropic ray `[X]` under the stabilizer of `S`.
pub fn classify_ray<T: Scalar>(
    g: &G2Structure<T>,
    s: &[T],
    x: &[T],
    extra: Option<RayExtra>,
    tol: f64,
) -> Result<OrbitLabel, ClassifyError> {
    let scale = x.iter().chain(s).map(|v| v.magnitude()).fold(0.0, f64::max).max(1.0);
    let tol = tol * scale * scale;
    if x.iter().all(|v| v.near_zero(tol)) {
        return Err(ClassifyError::ZeroX);
    }
    let hxx = g.inner(x, x);
    if !hxx.near_zero(tol) {
        return Err(ClassifyError::NotIsotropic(format!("{:.3e}", hxx.value())));
    }
    let hss = g.inner(s, s);
    if s.iter().all(|v| v.near_zero(tol)) || ![-1i64, 0, 1].iter().any(|&e| (hss.clone() + T::from_i64(e)).near_zero(tol)) {
        return Err(ClassifyError::Stabilizer(StabilizerError::Unnormalized(format!("{:.6}", hss.value()))));
    }
    let hxs = g.inner(x, s);
    match hxs.signum(tol) {
        1 => return Ok(OrbitLabel::M5Plus),
        -1 => return Ok(OrbitLabel::M5Minus),
        _ => {}
    }
    let c = g.cross(x, s);
    if !parallel(&c, x, tol) {
        return Ok(OrbitLabel::M4);
    }
    if vec_near(&c, x, tol) {
        return Ok(OrbitLabel::M2Plus);
    }
    let minus_x: Vec<T> = x.iter().map(|v| -v.clone()).collect();
    if vec_near(&c, &minus_x, tol) {
        return Ok(OrbitLabel::M2Minus);
    }
    if c.iter().all(|v| v.near_zero(tol)) {
        if !parallel(x, s, tol) {
            return Ok(OrbitLabel::M2);
        }
        // S = λX: compare signs on the largest coordinate of X.
        let (i, _) = (0..N).map(|i| (i, x[i].magnitude())).fold((0, -1.0), |a, b| if b.1 > a.1 { b } else { a });
        let lam = s[i].clone() * x[i].try_recip().ok_or(ClassifyError::FellThrough)?;
        let label = match lam.signum(tol) {
            1 => OrbitLabel::M0Plus,
            -1 => OrbitLabel::M0Minus,
            _ => return Err(ClassifyError::FellThrough),
        };
        if let Some(RayExtra { nabla_sigma_zero: Some(false), .. }) = extra {
            return Err(ClassifyError::Inconsistent("M0 requires a vanishing gradient of sigma"));
        }
        return Ok(label);
    }
    Err(ClassifyError::FellThrough)
}

/// Scales `v` so that its first nonzero coordinate is positive.
pub fn canonical_ray<T: Scalar>(v: &[T]) -> Vec<T> {
    match v.iter().find(|x| !x.near_zero(0.0)) {
        Some(x) if x.signum(0.0) < 0 => v.iter().map(|y| -y.clone()).collect(),
        _ => v.to_vec(),
    }
}

/// Stratified exact sampler of isotropic vectors, covering every orbit that
/// meets the cone for the given `S`.
pub struct RaySampler {
    rng: ChaCha8Rng,
    sd: StabilizerData<ExactScalar>,
    g: G2Structure<ExactScalar>,
    perp_seed: Option<Vec<ExactScalar>>,
    special: Vec<Vec<Vec<ExactScalar>>>,
}

impl RaySampler {
    pub fn new(g: &G2Structure<ExactScalar>, s: &[ExactScalar], seed: u64) -> Result<Self, StabilizerError> {
        let sd = make_stabilizer(g, s)?;
        let perp_seed = isotropic_in_perp(g, &sd);
        let mut special = Vec::new();
        match sd.eps {
            1 => {
                for sign in [1i64, -1] {
                    let m = Matrix::from_fn(N, N, |i, j| {
                        sd.k.get(i, j).clone() + if i == j { ExactScalar::from_integer(sign) } else { ExactScalar::from_integer(0) }
                    });
                    special.push(linalg::nullspace(&m, 0.0));
                }
            }
            0 => {
                let ker = linalg::nullspace(&sd.k, 0.0);
                special.push(ker);
                special.push(vec![sd.s.clone()]);
            }
            _ => {}
        }
        Ok(RaySampler { rng: ChaCha8Rng::seed_from_u64(seed), sd, g: g.clone(), perp_seed, special })
    }

    fn rational(&mut self) -> ExactScalar {
        let p = self.rng.gen_range(-6i64..=6);
        let q = self.rng.gen_range(1i64..=4);
        ExactScalar::from_ratio(p, q)
    }

    fn generic(&mut self) -> Vec<ExactScalar> {
        loop {
            let mut x: Vec<ExactScalar> = (0..N).map(|_| self.rational()).collect();
            if x[6].is_zero() {
                continue;
            }
            // 2 x1 x7 + 2 x2 x5 + 2 x3 x6 − x4² = 0
            let two = ExactScalar::from_integer(2);
            let num = &x[3] * &x[3] - &two * &x[1] * &x[4] - &two * &x[2] * &x[5];
            x[0] = num / (&two * &x[6]);
            return x;
        }
    }

    fn perp(&mut self) -> Option<Vec<ExactScalar>> {
        let u = self.perp_seed.clone()?;
        for _ in 0..32 {
            let coeffs: Vec<ExactScalar> = (0..self.sd.w_basis.len()).map(|_| self.rational()).collect();
            let mut w = vec![ExactScalar::from_integer(0); N];
            for (c, b) in coeffs.iter().zip(&self.sd.w_basis) {
                for i in 0..N {
                    w[i] = &w[i] + &(c * &b[i]);
                }
            }
            let hww = self.g.inner(&w, &w);
            let huw = self.g.inner(&u, &w);
            let x: Vec<ExactScalar> = (0..N).map(|i| &hww * &u[i] - &(&ExactScalar::from_integer(2) * &huw) * &w[i]).collect();
            if !x.iter().all(|v| v.is_zero()) {
                return Some(x);
            }
        }
        None
    }

    fn special(&mut self) -> Option<Vec<ExactScalar>> {
        if self.special.is_empty() {
            return None;
        }
        let k = self.rng.gen_range(0..self.special.len());
        let basis = self.special[k].clone();
        for _ in 0..32 {
            let mut x = vec![ExactScalar::from_integer(0); N];
            for b in &basis {
                let c = self.rational();
                for i in 0..N {
                    x[i] = &x[i] + &(&c * &b[i]);
                }
            }
            if !x.iter().all(|v| v.is_zero()) {
                return Some(x);
            }
        }
        None
    }

    pub fn sample(&mut self) -> Vec<ExactScalar> {
        let roll = self.rng.gen_range(0..100);
        let pick = if roll < 60 {
            None
        } else if roll < 80 {
            self.perp()
        } else {
            self.special().or_else(|| self.perp())
        };
        pick.unwrap_or_else(|| self.generic())
    }
}

/// An isotropic vector orthogonal to `S` and not proportional to it.
fn isotropic_in_perp(g: &G2Structure<ExactScalar>, sd: &StabilizerData<ExactScalar>) -> Option<Vec<ExactScalar>> {
    let basis = &sd.w_basis;
    let mut cands: Vec<Vec<ExactScalar>> = Vec::new();
    for i in 0..basis.len() {
        cands.push(basis[i].clone());
        for j in i + 1..basis.len() {
            for sign in [1i64, -1] {
                let c = ExactScalar::from_integer(sign);
                cands.push((0..N).map(|k| &basis[i][k] + &(&c * &basis[j][k])).collect());
            }
        }
    }
    cands.into_iter().find(|u| g.inner(u, u).is_zero() && !parallel(u, &sd.s, 0.0))
}

/// Exact reference data: one normalized `S` per causality type and rational
/// points on the constraint conics.
pub mod witnesses {
    use super::{Branch, FamilyParam};
    use crate::forms::N;
    use crate::scalars::ExactScalar as E;

    fn unit(i: usize) -> Vec<E> {
        (0..N).map(|j| E::from_integer((i == j) as i64)).collect()
    }

    /// `E₄` for `ε = +1`, `E₂ + ½E₅` for `ε = −1`, `E₁` for `ε = 0`.
    pub fn reference_s(eps: i8) -> Vec<E> {
        match eps {
            1 => unit(3),
            -1 => {
                let mut s = unit(1);
                s[4] = E::from_ratio(1, 2);
                s
            }
            _ => unit(0),
        }
    }

    /// `((1 − m²)/(1 + m²), 2m/(1 + m²))`.
    pub fn circle_point(m: &E) -> FamilyParam<E> {
        let one = E::from_integer(1);
        let m2 = m * m;
        let d = &one + &m2;
        FamilyParam::Circle { cos: (&one - &m2) / &d, sin: (&E::from_integer(2) * m) / &d }
    }

    /// `((1 + m²)/(1 − m²), 2m/(1 − m²))` for `|m| < 1`.
    pub fn hyperbola_point(branch: Branch, m: &E) -> Option<FamilyParam<E>> {
        let one = E::from_integer(1);
        let m2 = m * m;
        if m2 >= one {
            return None;
        }
        let d = &one - &m2;
        Some(FamilyParam::Hyperbolic { branch, cosh: (&one + &m2) / &d, sinh: (&E::from_integer(2) * m) / &d })
    }

    /// Deterministic list of `n` distinct rationals in `(−1, 1)`, skipping 0.
    pub fn slopes(n: usize) -> Vec<E> {
        let mut out = Vec::with_capacity(n);
        let mut q = 2i64;
        while out.len() < n {
            for p in 1..q {
                if num_integer::gcd(p, q) != 1 {
                    continue;
                }
                for sign in [1, -1] {
                    if out.len() < n {
                        out.push(E::from_ratio(sign * p, q));
                    }
                }
            }
            q += 1;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::g2core::standard_exact;
    use crate::scalars::ExactScalar as E;

    fn ev(i: usize) -> Vec<E> {
        (0..N).map(|j| E::from_integer((i == j) as i64)).collect()
    }

    fn s_minus() -> Vec<E> {
        let mut s = ev(1);
        s[4] = E::from_ratio(1, 2);
        s
    }

    #[test]
    fn invariants_hold_for_representatives() {
        let g = standard_exact();
        for (s, eps) in [(ev(3), 1), (s_minus(), -1), (ev(0), 0)] {
            let sd = make_stabilizer(&g, &s).unwrap();
            assert_eq!(sd.eps, eps);
            for (name, ok) in sd.invariants(&g) {
                assert!(ok, "{name} for eps {eps}");
            }
        }
    }

    #[test]
    fn isotropic_filtration() {
        let g = standard_exact();
        let sd = make_stabilizer(&g, &ev(0)).unwrap();
        assert_eq!(sd.isotropic_filtration(), Some([7, 6, 4, 3, 1, 0]));
    }

    #[test]
    fn unnormalized_rejected() {
        let g = standard_exact();
        let s: Vec<E> = ev(1).into_iter().map(|x| x * E::from_integer(2)).zip(ev(4)).map(|(a, b)| a + b).collect();
        assert!(matches!(make_stabilizer(&g, &s), Err(StabilizerError::Unnormalized(_))));
        assert!(matches!(make_stabilizer(&g, &vec![E::from_integer(0); N]), Err(StabilizerError::ZeroVector)));
    }

    #[test]
    fn pi37_of_phi_j() {
        let g = standard_exact();
        let sd = make_stabilizer(&g, &ev(3)).unwrap();
        let (a, v, s) = g.decompose3(&sd.phi_j);
        assert!(a.is_zero());
        assert!(s.d.iter().all(|x| x.is_zero()));
        assert_eq!(v, ev(3).into_iter().map(|x| x * E::from_integer(SIGMA_J)).collect::<Vec<_>>());
        assert!(g.pi3_7(&sd.phi_k).iter().all(|x| x.is_zero()));
    }

    #[test]
    fn special_members() {
        let g = standard_exact();
        let sd = make_stabilizer(&g, &ev(0)).unwrap();
        let p0 = family_member(&sd, &g, &FamilyParam::Parabolic { s: E::from_integer(0) }).unwrap();
        assert_eq!(p0, g.phi);
        let sdm = make_stabilizer(&g, &s_minus()).unwrap();
        let pi = family_member(&sdm, &g, &FamilyParam::Circle { cos: E::from_integer(-1), sin: E::from_integer(0) }).unwrap();
        assert_eq!(pi, sdm.phi_k.sub(&sdm.phi_i));
        assert!(antipodal_test(&g.phi, &pi));
        assert!(!antipodal_test(&g.phi, &g.phi));
    }

    #[test]
    fn volume_form_normalization() {
        let g = standard_exact();
        for (s, a, b) in [(ev(3), E::from_ratio(5, 4), E::from_ratio(3, 4)), (s_minus(), E::from_ratio(3, 5), E::from_ratio(4, 5))] {
            let sd = make_stabilizer(&g, &s).unwrap();
            let (psi, rec) = epsilon_volume_and_reconstruct(&sd, &a, &b).unwrap();
            assert!(psi.normalization_residual(&sd).is_zero());
            assert!(crate::g2core::genericity_and_compatibility(&rec, g.h(), &g.vol).all());
        }
    }

    #[test]
    fn classify_examples() {
        let g = standard_exact();
        assert_eq!(classify_ray(&g, &ev(0), &ev(0), None, 0.0).unwrap(), OrbitLabel::M0Plus);
        let l = classify_ray(&g, &s_minus(), &ev(0), None, 0.0).unwrap();
        assert!(OrbitLabel::allowed(-1).contains(&l));
        assert!(matches!(classify_ray(&g, &ev(3), &ev(3), None, 0.0), Err(ClassifyError::NotIsotropic(_))));
    }
}
