//! Metrics, scales, distributions and symmetry fields of the examples.

use std::f64::consts::PI;

use crate::chart::{metric_from_terms, Chart, Domain, Field, Jet, ScalarField, VectorField, DIM};
use crate::linalg::{inverse, Matrix};

fn c(v: f64) -> Jet {
    Jet::constant(v)
}

fn vector(f: impl Fn(&[Jet]) -> [Jet; DIM] + Send + Sync + 'static) -> VectorField {
    Field::new(move |x| f(x).to_vec())
}

/// Reading of a symmetric product `αβ` of 1-forms in a displayed metric.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymProduct {
    /// `αβ = ½(α⊗β + β⊗α)`.
    Half,
    /// `αβ = α⊗β + β⊗α`.
    Full,
}

impl SymProduct {
    fn weight(self) -> f64 {
        match self {
            SymProduct::Half => 0.5,
            SymProduct::Full => 1.0,
        }
    }
}

// ---------------------------------------------------------------- rolling

/// Coordinates `(r, φ, s, ψ, λ)`.
pub const ROLLING_NAMES: [&str; DIM] = ["r", "phi", "s", "psi", "lambda"];

/// The Sasaki–Einstein metric `g = π*ĝ + β²`, `ĝ = h₊ ⊕ −h₋`, `β = dλ − 2α`.
pub fn rolling_metric(x: &[Jet]) -> Matrix<Jet> {
    let (r, ph, s, ps) = (x[0], x[1], x[2], x[3]);
    let r1 = r * r + 1.0;
    let s1 = s * s + (-1.0);
    let fp = (r1 * r1).recip().scale(2.0 / 3.0);
    let fm = (s1 * s1).recip().scale(2.0 / 3.0);
    // β = dλ + (4/3)φ r/(r²+1)² dr − (4/3)ψ s/(s²−1)² ds.
    let br = (ph * r * fp).scale(2.0);
    let bs = -(ps * s * fm).scale(2.0);
    let beta = [br, c(0.0), bs, c(0.0), c(1.0)];
    let mut g = Matrix::from_fn(DIM, DIM, |i, j| beta[i] * beta[j]);
    let add = |g: &mut Matrix<Jet>, i: usize, v: Jet| g.set(i, i, *g.get(i, i) + v);
    add(&mut g, 0, fp);
    add(&mut g, 1, fp * r * r);
    add(&mut g, 2, -fm);
    add(&mut g, 3, -fm * s * s);
    g
}

/// Para-Sasaki analogue on `𝕃² × 𝕃²`: `ĝ = h ⊕ h`, `dα` the para-Kähler
/// form, `g = π*ĝ + b β²` with `b = ±1`.
pub fn rolling_para_metric(x: &[Jet], b: f64) -> Matrix<Jet> {
    let (r, ph, s, ps) = (x[0], x[1], x[2], x[3]);
    let r1 = r * r + 1.0;
    let s1 = s * s + 1.0;
    let fr = (r1 * r1).recip().scale(2.0 / 3.0);
    let fs = (s1 * s1).recip().scale(2.0 / 3.0);
    // α = (2/3)(φ r dr/(r²+1)² + ψ s ds/(s²+1)²), β = dλ − 2α.
    let beta = [-(ph * r * fr).scale(2.0), c(0.0), -(ps * s * fs).scale(2.0), c(0.0), c(1.0)];
    let mut g = Matrix::from_fn(DIM, DIM, |i, j| (beta[i] * beta[j]).scale(b));
    let add = |g: &mut Matrix<Jet>, i: usize, v: Jet| g.set(i, i, *g.get(i, i) + v);
    add(&mut g, 0, -fr);
    add(&mut g, 1, fr * r * r);
    add(&mut g, 2, -fs);
    add(&mut g, 3, fs * s * s);
    g
}

pub fn rolling_domain() -> Domain {
    Domain::boxed([0.1, -PI, 1.5, -PI, -PI], [3.0, PI, 3.0, PI, PI])
}

/// Chart carrying the conformal class `[−g]` through its representative `−g`.
/// The para-Sasaki chart `−(ĝ + β²)`.
pub fn rolling_para_chart() -> Chart {
    Chart::new(
        ROLLING_NAMES,
        Field::new(|x| {
            let g = rolling_para_metric(x, 1.0);
            Matrix::from_fn(DIM, DIM, |i, j| -*g.get(i, j))
        }),
        Domain::boxed([0.1, -PI, 0.1, -PI, -PI], [3.0, PI, 3.0, PI, PI]),
    )
}

pub fn rolling_chart() -> Chart {
    Chart::new(ROLLING_NAMES, Field::new(|x| {
        let g = rolling_metric(x);
        Matrix::from_fn(DIM, DIM, |i, j| -*g.get(i, j))
    }), rolling_domain())
}

/// `γ = (r²−1)/(r²+1) φ + (s²+1)/(s²−1) ψ + l λ + υ`.
fn rolling_gamma(x: &[Jet], l: f64, upsilon: f64) -> Jet {
    let (r, ph, s, ps, la) = (x[0], x[1], x[2], x[3], x[4]);
    (r * r + (-1.0)) / (r * r + 1.0) * ph + (s * s + 1.0) / (s * s + (-1.0)) * ps + la.scale(l) + upsilon
}

/// The displayed generators of `D_υ`, transcribed literally. They are not
/// isotropic for `g`; see [`rolling_span`].
pub fn rolling_span_printed(upsilon: f64) -> [VectorField; 2] {
    let first = vector(move |x| {
        let (r, ph, s, ps) = (x[0], x[1], x[2], x[3]);
        let g = rolling_gamma(x, -3.0, upsilon);
        let (cg, sg) = (g.cos(), g.sin());
        let r1 = r * r + 1.0;
        let s1 = s * s + (-1.0);
        [
            (r1 * s).scale(3.0),
            c(0.0),
            (s1 * s * cg).scale(3.0),
            (s1 * sg).scale(3.0),
            (s * (s * ps * cg / s1 - r * ph / r1)).scale(4.0),
        ]
    });
    let second = vector(move |x| {
        let (r, s, ps) = (x[0], x[2], x[3]);
        let g = rolling_gamma(x, -3.0, upsilon);
        let (cg, sg) = (g.cos(), g.sin());
        let r1 = r * r + 1.0;
        let s1 = s * s + (-1.0);
        [c(0.0), (r1 * s).scale(3.0), (s1 * s * sg).scale(3.0), -(r * s1 * cg).scale(3.0), (s / s1 * r * ps * sg).scale(4.0)]
    });
    [first, second]
}

/// Generators of `D_υ` as `β`-horizontal lifts of `3s(e₁ + cos γ f₁ + sin γ f₂)`
/// and `3rs(e₂ + sin γ f₁ − cos γ f₂)`, where `e₁, e₂` and `f₁, f₂` are the
/// polar orthonormal frames of `h₊` and `h₋`, and `γ` carries `+3λ`.
///
/// The first generator agrees with the displayed one up to the sign of `λ` in
/// `γ`; the second differs in its `∂_s` and `∂_λ` parts.
pub fn rolling_span(upsilon: f64) -> [VectorField; 2] {
    // β = dλ + b_r dr + b_s ds; the ∂_λ part makes the lift horizontal.
    let lift = |x: &[Jet], v: [Jet; 4]| {
        let (r, ph, s, ps) = (x[0], x[1], x[2], x[3]);
        let r1 = r * r + 1.0;
        let s1 = s * s + (-1.0);
        let br = (ph * r / (r1 * r1)).scale(4.0 / 3.0);
        let bs = -(ps * s / (s1 * s1)).scale(4.0 / 3.0);
        [v[0], v[1], v[2], v[3], -(br * v[0] + bs * v[2])]
    };
    let first = vector(move |x| {
        let (r, s) = (x[0], x[2]);
        let g = rolling_gamma(x, 3.0, upsilon);
        let sm = s * s + (-1.0);
        lift(x, [((r * r + 1.0) * s).scale(3.0), c(0.0), (sm * s * g.cos()).scale(3.0), (sm * g.sin()).scale(3.0)])
    });
    let second = vector(move |x| {
        let (r, s) = (x[0], x[2]);
        let g = rolling_gamma(x, 3.0, upsilon);
        let sm = s * s + (-1.0);
        lift(x, [c(0.0), ((r * r + 1.0) * s).scale(3.0), (r * sm * s * g.sin()).scale(3.0), -(r * sm * g.cos()).scale(3.0)])
    });
    [first, second]
}

/// `∂_λ`.
pub fn rolling_reeb() -> VectorField {
    VectorField::coordinate(4)
}

// ---------------------------------------------------------------- dirichlet

/// Coordinates `(x, y, p, a, r)`.
pub const DIRICHLET_NAMES: [&str; DIM] = ["x", "y", "p", "a", "r"];

/// Frame `Ê_X, Ê_H, Ê_Y, ∂_a` on `N` in coordinates `(x, y, p, a)`.
pub fn dirichlet_frame(x: &[Jet]) -> [[Jet; 4]; 4] {
    let (xx, y, p) = (x[0], x[1], x[2]);
    let d = xx * p - y;
    let z = c(0.0);
    [
        [z, z, -(d * d), xx * d],
        [xx, y, z, c(-1.0)],
        [d.recip(), p / d, z, z],
        [z, z, z, c(1.0)],
    ]
}

/// `g_N = −χυ − η² + ηα − υ²` in the coframe dual to the frame.
pub fn dirichlet_gn(x: &[Jet], sym: SymProduct) -> Matrix<Jet> {
    let f = dirichlet_frame(x);
    let fm = Matrix::from_fn(4, 4, |i, j| f[j][i]);
    let co = inverse(&fm).expect("frame is invertible on xp − y > 0");
    let row = |k: usize| [*co.get(k, 0), *co.get(k, 1), *co.get(k, 2), *co.get(k, 3)];
    let (chi, eta, ups, alp) = (row(0), row(1), row(2), row(3));
    let w = sym.weight();
    Matrix::from_fn(4, 4, |i, j| {
        -(chi[i] * ups[j] + ups[i] * chi[j]).scale(w) - eta[i] * eta[j] + (eta[i] * alp[j] + alp[i] * eta[j]).scale(w)
            - ups[i] * ups[j]
    })
}

/// `σ_N = e^{a/2} √(xp − y)`.
pub fn dirichlet_sigma_n(x: &[Jet]) -> Jet {
    (x[3].scale(0.5)).exp() * (x[0] * x[2] - x[1]).sqrt()
}

/// `g′ = σ_N⁻² g_N − dr²` on `N × ℝ_r`.
pub fn dirichlet_metric(x: &[Jet], sym: SymProduct) -> Matrix<Jet> {
    let gn = dirichlet_gn(x, sym);
    let s = dirichlet_sigma_n(x);
    let w = (s * s).recip();
    Matrix::from_fn(DIM, DIM, |i, j| {
        if i < 4 && j < 4 {
            *gn.get(i, j) * w
        } else if i == 4 && j == 4 {
            c(-1.0)
        } else {
            c(0.0)
        }
    })
}

pub fn dirichlet_domain() -> Domain {
    Domain::boxed([0.5, -1.0, 0.5, -1.0, -1.0], [2.0, 1.0, 2.0, 1.0, 1.0]).with_constraint(|x| x[0] * x[2] - x[1] >= 0.1)
}

pub fn dirichlet_chart(sym: SymProduct) -> Chart {
    Chart::new(DIRICHLET_NAMES, Field::new(move |x| dirichlet_metric(x, sym)), dirichlet_domain())
}

/// `Σ cᵢ Êᵢ` with the frame extended by zero in `r`, plus an `∂_r` part.
fn frame_combination(x: &[Jet], coef: [Jet; 4], dr: Jet) -> [Jet; DIM] {
    let f = dirichlet_frame(x);
    let mut out = [c(0.0); DIM];
    for (k, ck) in coef.iter().enumerate() {
        for i in 0..4 {
            out[i] = out[i] + *ck * f[k][i];
        }
    }
    out[4] = dr;
    out
}

/// The displayed generators of `D_t^∓` (`upper = true` takes the upper
/// signs), with the second one multiplied by `r`.
///
/// As displayed the span is not bracket generating (growth `(2, 3, 3)`);
/// see [`dirichlet_span`].
pub fn dirichlet_span_printed(t: f64, upper: bool) -> [VectorField; 2] {
    let sg = if upper { 1.0 } else { -1.0 };
    let second = vector(move |x| {
        let r = x[4];
        let [cx, ch, cy] = dirichlet_coefficients(x, t, sg);
        frame_combination(x, [cx * r, ch * r, cy * r, c(1.0)], r)
    });
    [dirichlet_first(t, sg), second]
}

/// Generators of `D_t^∓` with `r` replaced by `−r` in the coefficients, which
/// makes the span a normal (2,3,5) distribution. The second generator is
/// `V₂ + V₁/(2r)`, which drops the `(1/r)∂_a` term and is smooth across
/// `r = 0`.
pub fn dirichlet_span(t: f64, upper: bool) -> [VectorField; 2] {
    let sg = if upper { 1.0 } else { -1.0 };
    let first = vector(move |x| {
        let (xx, y, p, a, r) = (x[0], x[1], x[2], x[3], x[4]);
        let cx = (r * (-a + (-sg * t)).exp() / (xx * p - y)).scale(-sg);
        frame_combination(x, [cx, c(0.0), c(0.0), c(2.0)], c(0.0))
    });
    let second = vector(move |x| {
        let (xx, y, p, a) = (x[0], x[1], x[2], x[3]);
        let [cx, ch, cy] = dirichlet_coefficients(x, t, sg);
        let shift = ((-a + (-sg * t)).exp() / (xx * p - y)).scale(0.5 * sg);
        frame_combination(x, [cx - shift, -ch, cy, c(0.0)], c(1.0))
    });
    [first, second]
}

/// `±r e^{−a∓t}/(xp − y) Ê_X + 2∂_a`.
fn dirichlet_first(t: f64, sg: f64) -> VectorField {
    vector(move |x| {
        let (xx, y, p, a, r) = (x[0], x[1], x[2], x[3], x[4]);
        let cx = (r * (-a + (-sg * t)).exp() / (xx * p - y)).scale(sg);
        frame_combination(x, [cx, c(0.0), c(0.0), c(2.0)], c(0.0))
    })
}

/// `Ê_X, Ê_H, Ê_Y` coefficients of the second displayed generator.
fn dirichlet_coefficients(x: &[Jet], t: f64, sg: f64) -> [Jet; 3] {
    let (xx, y, p, a, r) = (x[0], x[1], x[2], x[3], x[4]);
    let d = xx * p - y;
    let e2 = (a.scale(2.0) + sg * t).exp();
    let cx = -(e2 * d * d).scale(2.0 * sg) - (r * r).scale(0.5 * sg * (-sg * t).exp());
    let ch = a.exp() * r * d;
    let cy = (d * d * e2).scale(2.0 * sg);
    [cx, ch, cy]
}

/// The six symmetry fields `𝒳, ℋ, 𝒴, 𝒵, 𝒜, ∂_r`.
pub fn dirichlet_symmetries() -> Vec<(&'static str, VectorField)> {
    let z = || c(0.0);
    vec![
        ("X", vector(move |x| [x[1], z(), -(x[2] * x[2]), x[2], z()])),
        ("H", vector(move |x| [-x[0], x[1], x[2].scale(2.0), c(-1.0), z()])),
        ("Y", vector(move |x| [z(), x[0], c(1.0), z(), z()])),
        ("Z", dirichlet_z()),
        ("A", dirichlet_a()),
        ("d_r", VectorField::coordinate(4)),
    ]
}

/// `𝒵 = e^{−a}[(xp − y)∂_p − x∂_a]`.
pub fn dirichlet_z() -> VectorField {
    vector(|x| {
        let e = (-x[3]).exp();
        [c(0.0), c(0.0), e * (x[0] * x[2] - x[1]), -(e * x[0]), c(0.0)]
    })
}

/// `𝒜 = −2∂_a + r∂_r`.
pub fn dirichlet_a() -> VectorField {
    vector(|x| [c(0.0), c(0.0), c(0.0), c(-2.0), x[4]])
}

// ---------------------------------------------------------------- submaximal

/// Coordinates `(x, y, p, q, z)`.
pub const SUBMAXIMAL_NAMES: [&str; DIM] = ["x", "y", "p", "q", "z"];

pub fn submaximal_metric(x: &[Jet], i: f64, sym: SymProduct) -> Matrix<Jet> {
    let (y, p, q) = (x[1], x[2], x[3]);
    let w = 2.0 * sym.weight();
    let off = |v: Jet| v.scale(w);
    metric_from_terms(&[
        (0, 0, (y * y).scale(-1.5 * (i * i + 1.0)) + (p * p).scale(2.0 * i) - (q * q).scale(0.5)),
        (0, 1, off(p.scale(-4.0 * i))),
        (0, 2, off(q)),
        (0, 3, off(p.scale(-3.0))),
        (0, 4, off(c(-3.0))),
        (1, 1, c(-3.0 * i)),
        (1, 3, off(c(3.0))),
        (2, 2, c(-2.0)),
    ])
}

pub fn submaximal_domain() -> Domain {
    Domain::boxed([-1.0; DIM], [1.0; DIM])
}

pub fn submaximal_chart(i: f64, sym: SymProduct) -> Chart {
    Chart::new(SUBMAXIMAL_NAMES, Field::new(move |x| submaximal_metric(x, i, sym)), submaximal_domain())
}

/// `⟨∂_q, ∂_x + p∂_y + q∂_p − ½[q² + (10/3)Ip² + (1+I²)y²]∂_z⟩`.
pub fn submaximal_span(i: f64) -> [VectorField; 2] {
    let second = vector(move |x| {
        let (y, p, q) = (x[1], x[2], x[3]);
        let zc = (q * q + (p * p).scale(10.0 * i / 3.0) + (y * y).scale(1.0 + i * i)).scale(-0.5);
        [c(1.0), p, q, c(0.0), zc]
    });
    [VectorField::coordinate(3), second]
}

/// A basis of solutions of `σ″ − (I/3)σ = 0`, pulled back from `x`.
pub fn submaximal_scales(i: f64) -> [(&'static str, ScalarField); 2] {
    let k = (i / 3.0).abs().sqrt();
    if i > 0.0 {
        [("cosh", Field::new(move |x| x[0].scale(k).cosh())), ("sinh", Field::new(move |x| x[0].scale(k).sinh()))]
    } else if i < 0.0 {
        [("cos", Field::new(move |x| x[0].scale(k).cos())), ("sin", Field::new(move |x| x[0].scale(k).sin()))]
    } else {
        [("one", ScalarField::constant(1.0)), ("x", ScalarField::coordinate(0))]
    }
}

/// `σ = x²`, which solves the ODE for no `I`.
pub fn submaximal_nonsolution() -> ScalarField {
    Field::new(|x| x[0] * x[0])
}
