//! The explicit examples as charts with verification suites.
//!
//! [`verify_example`] samples points from the example's domain, evaluates
//! every per-point check in parallel, and folds the residuals into a
//! [`VerificationReport`] in point order, so a given seed always produces
//! the same report.

pub mod charts;

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::chart::distribution::{component_identities, growth_vector, hodge_relations, isotropy_residual, lie_bracket, phi_from_span};
use crate::chart::killing::{
    classify_point, composition_residual, conformal_killing_residual, ijk_forms, ijk_open_orbit, lie_derivative_weighted, pi7,
    sasaki_residuals, scalar_tensor, xi_iota7,
};
use crate::chart::tractor::{einstein_constant, fiber_values, l0_3form, normality_residual, theta0_standard};
use crate::chart::{form_values, values, Chart, ChartError, Field, Jet, PointGeometry, ScalarField, VectorField, DIM};
use crate::forms::{antisymmetrize, KForm};
use crate::g2core::{genericity_and_compatibility, standard_structure};
use crate::linalg::{det, Matrix};
use crate::stabilizer::OrbitLabel;
use charts::*;

/// Names accepted by [`load_example`].
pub const EXAMPLES: [&str; 4] = ["rolling", "rolling-para", "dirichlet", "submaximal"];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GalleryError {
    #[error("unknown example {0:?}; expected one of rolling, rolling-para, dirichlet, submaximal")]
    UnknownExample(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
}

/// Parameter values of the distribution families.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Params {
    /// `υ` values for the rolling family `D_υ`.
    pub upsilon: Vec<f64>,
    /// `t` values for the Dirichlet families `D_t^∓`.
    pub t: Vec<f64>,
    /// Invariants `I` of the submaximal family.
    pub i_values: Vec<f64>,
}

impl Default for Params {
    fn default() -> Self {
        Params { upsilon: vec![0.0, 1.0, PI / 2.0], t: vec![0.0, 0.5], i_values: vec![-0.75, 0.0, 1.0, 2.0] }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub points: Option<usize>,
    pub seed: Option<u64>,
    /// Replaces the tolerance of every continuous check.
    pub tol: Option<f64>,
    pub params: Option<Params>,
    /// Adds `σ = x²` to the submaximal scales; its `Θ₀` check must fail.
    pub inject_nonsolution: bool,
}

#[derive(Clone)]
pub struct NamedScale {
    pub name: String,
    pub field: ScalarField,
    /// Causality type the scale is expected to have.
    pub eps: i8,
}

#[derive(Clone)]
pub struct NamedSpan {
    pub name: String,
    pub span: [VectorField; 2],
}

/// An example chart with its named fields and expected checks.
#[derive(Clone)]
pub struct GalleryExample {
    pub name: String,
    pub chart: Chart,
    pub scales: Vec<NamedScale>,
    pub spans: Vec<NamedSpan>,
    pub vectors: Vec<(String, VectorField)>,
    /// `(check id, default tolerance)` pairs of the verification suite.
    pub expectations: Vec<(String, f64)>,
    pub points: usize,
    pub seed: u64,
}

pub const DEFAULT_POINTS: usize = 20;
pub const DEFAULT_SEED: u64 = 20170523;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub id: String,
    pub claim: String,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub example: String,
    pub seed: u64,
    pub points: usize,
    pub params: Params,
    pub checks: Vec<CheckResult>,
    /// Observations that are reported without a pass/fail verdict.
    pub notes: Vec<String>,
    pub overall: bool,
}

impl VerificationReport {
    pub fn check(&self, id: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.id == id)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

// ---------------------------------------------------------------- suites

#[derive(Clone, Copy, PartialEq)]
enum Kind {
    /// A residual compared to a tolerance.
    Continuous,
    /// A count of failing cases; the tolerance is always zero.
    Count,
}

struct CheckDef {
    id: &'static str,
    claim: String,
    tol: f64,
    kind: Kind,
}

fn cont(id: &'static str, claim: impl Into<String>, tol: f64) -> CheckDef {
    CheckDef { id, claim: claim.into(), tol, kind: Kind::Continuous }
}

fn count(id: &'static str, claim: impl Into<String>) -> CheckDef {
    CheckDef { id, claim: claim.into(), tol: 0.0, kind: Kind::Count }
}

/// Residuals found at one point, keyed by check id. Ids starting with
/// `note:` feed the report notes instead of checks.
#[derive(Default)]
struct Row(Vec<(&'static str, f64)>);

impl Row {
    fn put(&mut self, id: &'static str, v: f64) {
        self.0.push((id, if v.is_nan() { f64::INFINITY } else { v }));
    }

    fn flag(&mut self, id: &'static str, bad: bool) {
        self.put(id, bad as u8 as f64);
    }

    fn put_result(&mut self, id: &'static str, v: Result<f64, ChartError>) {
        self.put(id, v.unwrap_or(f64::INFINITY));
    }
}

struct Suite {
    defs: Vec<CheckDef>,
    notes: Vec<(&'static str, String)>,
}

fn fold_rows(suite: &Suite, rows: &[Row], tol: Option<f64>) -> (Vec<CheckResult>, Vec<String>) {
    let worst = |id: &str| {
        let mut seen = false;
        let mut m: f64 = 0.0;
        for row in rows {
            for &(k, v) in &row.0 {
                if k == id {
                    seen = true;
                    m = m.max(v);
                }
            }
        }
        seen.then_some(m)
    };
    let checks = suite
        .defs
        .iter()
        .map(|s| {
            let tolerance = match (s.kind, tol) {
                (Kind::Continuous, Some(t)) => t,
                _ => s.tol,
            };
            // A check that never produced a value cannot pass.
            let max_residual = worst(s.id).unwrap_or(f64::INFINITY);
            CheckResult { id: s.id.into(), claim: s.claim.clone(), max_residual, tolerance, pass: max_residual <= tolerance }
        })
        .collect();
    let notes = suite
        .notes
        .iter()
        .map(|(id, text)| match worst(id) {
            Some(v) => format!("{text}: max {v:.3e}"),
            None => text.to_string(),
        })
        .collect();
    (checks, notes)
}

fn sweep<F>(points: &[[f64; DIM]], f: F) -> Vec<Row>
where
    F: Fn(&[f64; DIM]) -> Row + Sync,
{
    points.par_iter().map(&f).collect()
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

fn vec_diff(a: &[Jet], b: &[Jet]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x.value() - y.value()).abs()).fold(0.0, f64::max)
}

/// `max |φ_{ba} ξ^b|`.
fn derived_residual(phi: &KForm<Jet>, xi: &[Jet]) -> f64 {
    let v = values(xi);
    (0..DIM).map(|a| (0..DIM).map(|b| phi.get(&[b, a]).value() * v[b]).sum::<f64>().abs()).fold(0.0, f64::max)
}

/// Fiber 3-form at the point is generic and induces the tractor metric.
fn fiber_ok(p: &PointGeometry, phi: &KForm<Jet>) -> bool {
    let (f, h) = fiber_values(p, &l0_3form(p, phi));
    let rep = genericity_and_compatibility(&f, &h, &standard_structure::<f64>().vol);
    rep.generic && rep.metric_match
}

fn weighted_lie(p: &PointGeometry, xi: &[Jet], f: &KForm<Jet>) -> Result<KForm<f64>, ChartError> {
    Ok(form_values(&antisymmetrize(&lie_derivative_weighted(p, xi, &f.to_tensor(), 3.0, 1e-6)?)))
}

/// The span checks shared by every example with a displayed distribution.
fn distribution_row(row: &mut Row, p: &PointGeometry, span: &[VectorField; 2]) -> Option<KForm<Jet>> {
    row.flag("growth_vector", growth_vector(p, span, 1e-8) != [2, 3, 5]);
    row.put("isotropy", isotropy_residual(p, span));
    let sp = match phi_from_span(p, &span[0], &span[1]) {
        Ok(sp) => sp,
        Err(_) => {
            for id in ["span_fit", "normality", "component_identities", "hodge_relations"] {
                row.put(id, f64::INFINITY);
            }
            row.flag("fiber_compatibility", true);
            return None;
        }
    };
    row.put("span_fit", sp.fit_residual);
    row.put_result("normality", normality_residual(p, &sp.phi));
    let f = l0_3form(p, &sp.phi);
    row.put("component_identities", component_identities(p, &f).iter().map(|(_, v)| *v).fold(0.0, f64::max));
    row.put_result("hodge_relations", hodge_relations(p, &f).map(|v| v.iter().map(|(_, r)| *r).fold(0.0, f64::max)));
    row.flag("fiber_compatibility", !fiber_ok(p, &sp.phi));
    Some(sp.phi)
}

fn distribution_defs(which: &str) -> Vec<CheckDef> {
    vec![
        count("growth_vector", format!("{which} has growth vector (2,3,5)")),
        cont("isotropy", format!("{which} is totally isotropic for the chart metric"), 1e-8),
        cont("span_fit", format!("a multiple of the bivector of {which} solves Θ₀(φ) = 0"), 1e-8),
        cont("normality", "the resulting φ is normal: its tractor lift is parallel", 1e-5),
        cont("component_identities", "pointwise identities among φ, χ, θ, ψ, including the volume form", 1e-5),
        cont("hodge_relations", "Hodge stars of φ, χ, θ, ψ in terms of the components", 1e-5),
        count("fiber_compatibility", "the assembled fiber 3-form is generic and induces the tractor metric"),
    ]
}

// ---------------------------------------------------------------- loading

fn named(name: &str, field: ScalarField, eps: i8) -> NamedScale {
    NamedScale { name: name.into(), field, eps }
}

fn expectations(suite: &Suite) -> Vec<(String, f64)> {
    suite.defs.iter().map(|s| (s.id.to_string(), s.tol)).collect()
}

/// The example with default parameters.
pub fn load_example(name: &str) -> Result<GalleryExample, GalleryError> {
    load_example_with(name, &Params::default())
}

/// The example with the given family parameters; the submaximal chart uses
/// the first `I` value.
pub fn load_example_with(name: &str, params: &Params) -> Result<GalleryExample, GalleryError> {
    let base = |name: &str, chart: Chart, suite: Suite| GalleryExample {
        name: name.into(),
        chart,
        scales: Vec::new(),
        spans: Vec::new(),
        vectors: Vec::new(),
        expectations: expectations(&suite),
        points: DEFAULT_POINTS,
        seed: DEFAULT_SEED,
    };
    match name {
        "rolling" => {
            let mut ex = base(name, rolling_chart(), rolling_suite(params));
            ex.scales.push(named("one", ScalarField::constant(1.0), -1));
            for &u in &params.upsilon {
                ex.spans.push(NamedSpan { name: format!("D_upsilon={u}"), span: rolling_span(u) });
            }
            ex.vectors.push(("d_lambda".into(), rolling_reeb()));
            Ok(ex)
        }
        "rolling-para" => {
            let mut ex = base(name, rolling_para_chart(), para_suite());
            ex.scales.push(named("one", ScalarField::constant(1.0), 1));
            ex.vectors.push(("d_lambda".into(), rolling_reeb()));
            Ok(ex)
        }
        "dirichlet" => {
            let mut ex = base(name, dirichlet_chart(SymProduct::Half), dirichlet_suite(params));
            ex.scales.push(named("one", ScalarField::constant(1.0), 0));
            ex.scales.push(named("r", ScalarField::coordinate(4), 1));
            for &t in &params.t {
                for upper in [true, false] {
                    ex.spans.push(NamedSpan { name: family_name(t, upper), span: dirichlet_span(t, upper) });
                }
            }
            ex.vectors = dirichlet_symmetries().into_iter().map(|(n, v)| (n.to_string(), v)).collect();
            Ok(ex)
        }
        "submaximal" => {
            let i = *params.i_values.first().ok_or_else(|| GalleryError::Parameter("no I value".into()))?;
            let mut ex = base(name, submaximal_chart(i, SymProduct::Half), submaximal_suite(params, false));
            for (n, f) in submaximal_scales(i) {
                ex.scales.push(named(n, f, 0));
            }
            ex.spans.push(NamedSpan { name: format!("D_I={i}"), span: submaximal_span(i) });
            Ok(ex)
        }
        other => Err(GalleryError::UnknownExample(other.into())),
    }
}

fn family_name(t: f64, upper: bool) -> String {
    format!("D_t={t}^{}", if upper { "-" } else { "+" })
}

// ---------------------------------------------------------------- verify

/// Runs the example's suite and reports every check.
pub fn verify_example(name: &str, ov: &Overrides) -> Result<VerificationReport, GalleryError> {
    let params = ov.params.clone().unwrap_or_default();
    let ex = load_example_with(name, &params)?;
    let n = ov.points.unwrap_or(ex.points);
    let seed = ov.seed.unwrap_or(ex.seed);
    if n == 0 {
        return Err(GalleryError::Parameter("points must be positive".into()));
    }
    let pts = ex.chart.domain.sample(n, seed);
    if pts.len() < n {
        return Err(GalleryError::Parameter("could not sample the domain".into()));
    }
    let (checks, notes) = match name {
        "rolling" => verify_rolling(&ex, &pts, &params, ov.tol),
        "rolling-para" => verify_para(&ex, &pts, ov.tol),
        "dirichlet" => verify_dirichlet(&ex, &pts, &params, ov.tol),
        _ => verify_submaximal(&pts, &params, ov),
    };
    let overall = checks.iter().all(|c| c.pass);
    Ok(VerificationReport { example: name.into(), seed, points: n, params, checks, notes, overall })
}

// ---------------------------------------------------------------- rolling

fn rolling_suite(params: &Params) -> Suite {
    let us = format!("{:?}", params.upsilon);
    let mut defs = vec![
        cont("einstein", "Ric(g) = 4g for g = π*ĝ + β² (relative)", 1e-8),
        cont("scale_theta0", "σ = 1 is an almost Einstein scale of [−g], the conformal class of D_υ", 1e-8),
        cont("einstein_constant", "λ = −1/2 for σ = 1 (Ricci-negative, ε = −1)", 1e-8),
    ];
    defs.extend(distribution_defs(&format!("D_υ (υ ∈ {us})")));
    defs.extend([
        cont("xi_killing", "ξ = ι₇(1) is a Killing field", 1e-6),
        cont("xi_in_derived", "ξ is a section of [D, D]", 1e-8),
        cont("pi7", "π₇(ι₇(σ)) = σ", 1e-8),
        cont("xi_reeb", "ι₇(1) is the Reeb field: ξ = −∂_λ for the ordered span", 1e-8),
        cont("sasaki", "(g, ξ) is Sasaki: the pair (−g′, ξ) for the Einstein representative g′ = −g of [−g]", 1e-5),
        cont("sasaki_d_lambda", "(g, ∂_λ) satisfies the three ε-Sasaki conditions with ε = −1", 1e-5),
        cont("lie_sigma", "ℒ_ξ σ = 0", 1e-5),
        cont("lie_phi", "ℒ_ξ φ = 3J", 1e-5),
        cont("lie_i", "ℒ_ξ I = −3εJ", 1e-5),
        cont("lie_j", "ℒ_ξ J = 3I", 1e-5),
        cont("lie_k", "ℒ_ξ K = 0", 1e-5),
        cont("open_orbit_ik", "in the scale σ: I = ½(−εφ + φ̄) and K = ½(−εφ − φ̄)", 1e-6),
        cont("open_orbit_j", "in the scale σ: J = ξ^c χ_cab", 1e-6),
        cont("compositions", "I, J, K restricted to ξ^⊥ satisfy the composition table", 1e-5),
        cont("family_derivative", "d/dυ φ_υ = J", 1e-5),
    ]);
    Suite {
        defs,
        notes: vec![
            ("note:sasaki_minus_g", "(−g, ξ) residuals, ε = −1: condition (1) fails since −g(ξ, ξ) = −1".into()),
            ("note:lie_phi_observed", "observed relation ℒ_ξ φ = −3J".into()),
            ("note:lie_i_observed", "observed relation ℒ_ξ I = 3εJ".into()),
            ("note:open_orbit_j_observed", "observed relation J = −ξ^c χ_cab".into()),
            ("note:printed_isotropy", "isotropy residual of the two generators as displayed".into()),
        ],
    }
}

fn verify_rolling(ex: &GalleryExample, pts: &[[f64; DIM]], params: &Params, tol: Option<f64>) -> (Vec<CheckResult>, Vec<String>) {
    let suite = rolling_suite(params);
    let g_chart = Chart::new(ROLLING_NAMES, Field::new(rolling_metric), rolling_domain());
    let eps = -1i8;
    let e = eps as f64;
    let rows = sweep(pts, |x| {
        let mut row = Row::default();
        let (p, gp) = match (ex.chart.at(x), g_chart.at(x)) {
            (Ok(p), Ok(gp)) => (p, gp),
            _ => {
                row.put("einstein", f64::INFINITY);
                return row;
            }
        };
        let one = Jet::constant(1.0);
        row.put("einstein", p.einstein_residual(-4.0));
        row.put("scale_theta0", theta0_standard(&p, &one).max_abs());
        row.put_result("einstein_constant", einstein_constant(&p, &one, 1e-8).map(|l| (l.lambda + 0.5).abs()));
        row.put("note:printed_isotropy", isotropy_residual(&p, &rolling_span_printed(0.0)));
        let reeb: Vec<Jet> = p.eval(&rolling_reeb()).into_iter().map(|v| -v).collect();
        for &u in &params.upsilon {
            let span = rolling_span(u);
            let Some(phi) = distribution_row(&mut row, &p, &span) else { continue };
            let xi = xi_iota7(&p, &phi, &one);
            row.put("xi_killing", conformal_killing_residual(&p, &xi));
            row.put("xi_in_derived", derived_residual(&phi, &xi));
            row.put("pi7", (pi7(&p, &phi, &xi).value() - 1.0).abs());
            row.put("xi_reeb", vec_diff(&xi, &reeb));
            row.put("sasaki", max_abs(&sasaki_residuals(&gp, &xi, eps)));
            row.put("sasaki_d_lambda", max_abs(&sasaki_residuals(&gp, &gp.eval(&rolling_reeb()), eps)));
            row.put("note:sasaki_minus_g", max_abs(&sasaki_residuals(&p, &xi, eps)));
            let ijk = ijk_forms(&p, &phi, &one);
            let v = ijk.values();
            match (
                lie_derivative_weighted(&p, &xi, &scalar_tensor(one), 1.0, 1e-6),
                weighted_lie(&p, &xi, &phi),
                weighted_lie(&p, &xi, &ijk.i),
                weighted_lie(&p, &xi, &ijk.j),
                weighted_lie(&p, &xi, &ijk.k),
            ) {
                (Ok(ls), Ok(lp), Ok(li), Ok(lj), Ok(lk)) => {
                    row.put("lie_sigma", ls.max_abs());
                    row.put("lie_phi", lp.sub(&v.j.scale(&3.0)).max_abs());
                    row.put("lie_i", li.add(&v.j.scale(&(3.0 * e))).max_abs());
                    row.put("lie_j", lj.sub(&v.i.scale(&3.0)).max_abs());
                    row.put("lie_k", lk.max_abs());
                    row.put("note:lie_phi_observed", lp.add(&v.j.scale(&3.0)).max_abs());
                    row.put("note:lie_i_observed", li.sub(&v.j.scale(&(3.0 * e))).max_abs());
                }
                _ => {
                    for id in ["lie_sigma", "lie_phi", "lie_i", "lie_j", "lie_k"] {
                        row.put(id, f64::INFINITY);
                    }
                }
            }
            let f = l0_3form(&p, &phi);
            let pred = ijk_open_orbit(&f, &xi, eps);
            row.put("open_orbit_ik", v.i.sub(&pred.i).max_abs().max(v.k.sub(&pred.k).max_abs()));
            row.put("open_orbit_j", v.j.sub(&pred.j).max_abs());
            row.put("note:open_orbit_j_observed", v.j.add(&pred.j).max_abs());
            row.put("compositions", composition_residual(&p, &v, &values(&xi), eps));
            row.put_result("family_derivative", family_derivative_residual(&p, u, &v.j));
        }
        row
    });
    fold_rows(&suite, &rows, tol)
}

/// `|(φ_{υ+h} − φ_{υ−h})/(2h) − J|` with `h = 10⁻⁴`.
fn family_derivative_residual(p: &PointGeometry, u: f64, j: &KForm<f64>) -> Result<f64, ChartError> {
    let h = 1e-4;
    let at = |v: f64| -> Result<KForm<f64>, ChartError> {
        let s = rolling_span(v);
        Ok(form_values(&phi_from_span(p, &s[0], &s[1])?.phi))
    };
    let d = at(u + h)?.sub(&at(u - h)?).scale(&(0.5 / h));
    Ok(d.sub(j).max_abs())
}

// ---------------------------------------------------------------- rolling-para

fn para_suite() -> Suite {
    Suite {
        defs: vec![
            cont("einstein", "Ric(g) = −4g for g = ĝ + β² (relative)", 1e-8),
            cont("scale_theta0", "σ = 1 is an almost Einstein scale", 1e-8),
            cont("einstein_constant", "λ = 1/2 for σ = 1 (Ricci-positive, ε = +1)", 1e-8),
            cont("reeb_killing", "∂_λ is a Killing field", 1e-8),
            cont("para_sasaki", "(ĝ + β², ∂_λ) is para-Sasaki: the three ε-Sasaki conditions with ε = +1", 1e-8),
        ],
        notes: vec![("note:none", "no distribution is displayed for this variant, so no span checks run".into())],
    }
}

fn verify_para(ex: &GalleryExample, pts: &[[f64; DIM]], tol: Option<f64>) -> (Vec<CheckResult>, Vec<String>) {
    let suite = para_suite();
    let h_chart = Chart::new(ROLLING_NAMES, Field::new(|x| rolling_para_metric(x, 1.0)), ex.chart.domain.clone());
    let rows = sweep(pts, |x| {
        let mut row = Row::default();
        let (Ok(p), Ok(hp)) = (ex.chart.at(x), h_chart.at(x)) else {
            row.put("einstein", f64::INFINITY);
            return row;
        };
        let one = Jet::constant(1.0);
        row.put("einstein", p.einstein_residual(4.0));
        row.put("scale_theta0", theta0_standard(&p, &one).max_abs());
        row.put_result("einstein_constant", einstein_constant(&p, &one, 1e-8).map(|l| (l.lambda - 0.5).abs()));
        let reeb = p.eval(&rolling_reeb());
        row.put("reeb_killing", conformal_killing_residual(&p, &reeb));
        row.put("para_sasaki", max_abs(&sasaki_residuals(&hp, &reeb, 1)));
        row
    });
    fold_rows(&suite, &rows, tol)
}

// ---------------------------------------------------------------- dirichlet

const R_SWEEP: [f64; 3] = [-0.5, 0.0, 0.5];
const R_NEAR_ZERO: [f64; 5] = [-0.1, -0.01, 0.0, 0.01, 0.1];

fn dirichlet_suite(params: &Params) -> Suite {
    let ts = format!("{:?}", params.t);
    let mut defs = vec![
        cont("ricci_flat", "g′ is Ricci-flat", 1e-8),
        cont("theta0_one", "σ = 1 is an almost Einstein scale", 1e-6),
        cont("theta0_r", "σ = r is an almost Einstein scale", 1e-6),
        cont("einstein_constant_one", "λ = 0 for σ = 1", 1e-8),
        cont("einstein_constant_r", "λ = 1/2 for σ = r (Ricci-positive, ε = +1)", 1e-8),
        cont("killing_X", "𝒳 is conformal Killing", 1e-6),
        cont("killing_H", "ℋ is conformal Killing", 1e-6),
        cont("killing_Y", "𝒴 is conformal Killing", 1e-6),
        cont("killing_Z", "𝒵 is conformal Killing", 1e-6),
        cont("killing_A", "𝒜 is conformal Killing", 1e-6),
        cont("killing_d_r", "∂_r is conformal Killing", 1e-6),
        cont("aut_wedge", "𝒳∧ℋ∧𝒴∧𝒜∧∂_r = −2(xp − y)² ∂_x∧∂_y∧∂_p∧∂_a∧∂_r (relative)", 1e-10),
    ];
    defs.extend(distribution_defs(&format!("D_t^∓ (t ∈ {ts})")));
    defs.extend([
        cont("xi_r", "ι₇(r) = 𝒜 for every member of the family", 1e-6),
        cont("xi_one", "ι₇(1) = 𝒵 + ∂_r for D_0^−", 1e-6),
        cont("pi7_r", "π₇(ι₇(r)) = r", 1e-8),
        cont("xi_in_derived", "ι₇(r) is a section of [D, D]", 1e-8),
        cont("aut_family", "𝒳, ℋ, 𝒴 and ±e^{±t}𝒵 − 2∂_r preserve D_t^±", 1e-8),
        count("classification", format!("classify_point gives M5−, M4, M5+ for r = {R_SWEEP:?} (σ = r, D_0^−)")),
        count("smooth_across_r0", format!("D_t^∓ has nonvanishing wedge and growth (2,3,5) for r ∈ {R_NEAR_ZERO:?}")),
    ]);
    Suite {
        defs,
        notes: vec![
            ("note:aut_observed", "observed: ±e^{±t}𝒵 + 2∂_r preserves D_t^±, residual".into()),
            ("note:printed_growth", "displayed D_0^− generators (second one times r) reach growth (2,3,5) somewhere in the sample (1 = yes)".into()),
            (
                "note:rescaling",
                "second generator used: V₂ + V₁/(2r), which removes the (1/r)∂_a term; r·V₂ vanishes against V₁ at r = 0".into(),
            ),
        ],
    }
}

fn wedge5(vs: &[Vec<Jet>]) -> f64 {
    det(&Matrix::from_fn(DIM, DIM, |i, j| vs[j][i].value()))
}

/// Largest component of `[S, Vᵢ]` outside `span(V₁, V₂)`.
fn preserves(s: &[Jet], v1: &[Jet], v2: &[Jet]) -> f64 {
    let (a, b) = (values(v1), values(v2));
    let d = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(p, q)| p * q).sum::<f64>();
    let (aa, ab, bb) = (d(&a, &a), d(&a, &b), d(&b, &b));
    let det = aa * bb - ab * ab;
    [v1, v2]
        .iter()
        .map(|v| {
            let w = values(&lie_bracket(s, v));
            let (pa, pb) = (d(&a, &w), d(&b, &w));
            let (ca, cb) = ((bb * pa - ab * pb) / det, (aa * pb - ab * pa) / det);
            (0..DIM).map(|i| (w[i] - ca * a[i] - cb * b[i]).abs()).fold(0.0, f64::max)
        })
        .fold(0.0, f64::max)
}

fn verify_dirichlet(ex: &GalleryExample, pts: &[[f64; DIM]], params: &Params, tol: Option<f64>) -> (Vec<CheckResult>, Vec<String>) {
    let suite = dirichlet_suite(params);
    let chart = &ex.chart;
    let rows = sweep(pts, |x| {
        let mut row = Row::default();
        let Ok(p) = chart.at(x) else {
            row.put("ricci_flat", f64::INFINITY);
            return row;
        };
        let one = Jet::constant(1.0);
        let r = p.coords[4];
        row.put("ricci_flat", p.einstein_residual(0.0));
        row.put("theta0_one", theta0_standard(&p, &one).max_abs());
        row.put("theta0_r", theta0_standard(&p, &r).max_abs());
        row.put_result("einstein_constant_one", einstein_constant(&p, &one, 1e-8).map(|l| l.lambda.abs()));
        row.put_result("einstein_constant_r", einstein_constant(&p, &r, 1e-8).map(|l| (l.lambda - 0.5).abs()));
        let syms: Vec<(String, Vec<Jet>)> = ex.vectors.iter().map(|(n, v)| (n.clone(), p.eval(v))).collect();
        for (n, v) in &syms {
            let id = match n.as_str() {
                "X" => "killing_X",
                "H" => "killing_H",
                "Y" => "killing_Y",
                "Z" => "killing_Z",
                "A" => "killing_A",
                _ => "killing_d_r",
            };
            row.put(id, conformal_killing_residual(&p, v));
        }
        let pick = |n: &str| syms.iter().find(|(k, _)| k == n).map(|(_, v)| v.clone()).expect("listed field");
        let w = wedge5(&[pick("X"), pick("H"), pick("Y"), pick("A"), pick("d_r")]);
        let d = x[0] * x[2] - x[1];
        row.put("aut_wedge", (w + 2.0 * d * d).abs() / (2.0 * d * d));
        let (a_field, z_field) = (pick("A"), pick("Z"));
        let dr = pick("d_r");
        let z_plus_dr: Vec<Jet> = z_field.iter().zip(&dr).map(|(a, b)| *a + *b).collect();
        row.flag("note:printed_growth", growth_vector(&p, &dirichlet_span_printed(0.0, true), 1e-8) == [2, 3, 5]);
        for &t in &params.t {
            for upper in [true, false] {
                let span = dirichlet_span(t, upper);
                let Some(phi) = distribution_row(&mut row, &p, &span) else { continue };
                let xi_r = xi_iota7(&p, &phi, &r);
                row.put("xi_r", vec_diff(&xi_r, &a_field));
                row.put("pi7_r", (pi7(&p, &phi, &xi_r).value() - r.value()).abs());
                row.put("xi_in_derived", derived_residual(&phi, &xi_r));
                if t == 0.0 && upper {
                    row.put("xi_one", vec_diff(&xi_iota7(&p, &phi, &one), &z_plus_dr));
                }
                let (v1, v2) = (p.eval(&span[0]), p.eval(&span[1]));
                // D_t^− takes the lower signs of ±.
                let sg = if upper { -1.0 } else { 1.0 };
                let zc = sg * (sg * t).exp();
                let with_dr = |c: f64| -> Vec<Jet> { z_field.iter().zip(&dr).map(|(z, d)| z.scale(zc) + d.scale(c)).collect() };
                let mut worst = 0.0f64;
                for n in ["X", "H", "Y"] {
                    worst = worst.max(preserves(&pick(n), &v1, &v2));
                }
                row.put("aut_family", worst.max(preserves(&with_dr(-2.0), &v1, &v2)));
                row.put("note:aut_observed", worst.max(preserves(&with_dr(2.0), &v1, &v2)));
            }
        }
        // Sweeps in r at this point's (x, y, p, a).
        let mut bad = 0usize;
        let want = [OrbitLabel::M5Minus, OrbitLabel::M4, OrbitLabel::M5Plus];
        for (k, &rv) in R_SWEEP.iter().enumerate() {
            let y = [x[0], x[1], x[2], x[3], rv];
            let ok = chart.at(&y).ok().and_then(|q| {
                let span = dirichlet_span(0.0, true);
                let phi = phi_from_span(&q, &span[0], &span[1]).ok()?.phi;
                let c = classify_point(&q, &q.coords[4], &phi, 1e-9);
                Some(c.label == want[k] && !c.ambiguous)
            });
            bad += (ok != Some(true)) as usize;
        }
        row.put("classification", bad as f64);
        let mut bad = 0usize;
        for &rv in &R_NEAR_ZERO {
            let y = [x[0], x[1], x[2], x[3], rv];
            let Ok(q) = chart.at(&y) else {
                bad += 1;
                continue;
            };
            for &t in &params.t {
                for upper in [true, false] {
                    let span = dirichlet_span(t, upper);
                    let (v1, v2) = (values(&q.eval(&span[0])), values(&q.eval(&span[1])));
                    let mut w: f64 = 0.0;
                    for i in 0..DIM {
                        for j in i + 1..DIM {
                            w = w.max((v1[i] * v2[j] - v1[j] * v2[i]).abs());
                        }
                    }
                    bad += (w < 1e-6 || growth_vector(&q, &span, 1e-8) != [2, 3, 5]) as usize;
                }
            }
        }
        row.put("smooth_across_r0", bad as f64);
        row
    });
    fold_rows(&suite, &rows, tol)
}

// ---------------------------------------------------------------- submaximal

fn submaximal_suite(params: &Params, inject: bool) -> Suite {
    let is = format!("{:?}", params.i_values);
    let mut defs = vec![
        cont("theta0", format!("the ODE solution basis consists of almost Einstein scales (I ∈ {is})"), 1e-6),
        cont("einstein_constant", "λ = 0 for every scale in the basis (Ricci-flat)", 1e-8),
    ];
    defs.extend(distribution_defs(&format!("D_I (I ∈ {is})")));
    defs.extend([
        cont("xi_killing", "ι₇(σ) is conformal Killing for each basis scale", 1e-6),
        cont("conformal_invariance", "Ωσ is almost Einstein for Ω²g, Ω = 1 + 0.1 sin x", 1e-6),
        cont("conformal_covariance", "Θ₀ for (Ω²g, Ωσ) equals Ω Θ₀ for (g, σ) at σ = x² (relative)", 1e-6),
    ]);
    if inject {
        defs.push(cont("theta0_nonsolution", "σ = x² is an almost Einstein scale (expected to fail)", 1e-6));
    }
    Suite { defs, notes: vec![("note:nonsolution", "Θ₀ residual of σ = x² (not a solution)".into())] }
}

fn omega_field() -> ScalarField {
    Field::new(|x| x[0].sin().scale(0.1) + 1.0)
}

fn verify_submaximal(pts: &[[f64; DIM]], params: &Params, ov: &Overrides) -> (Vec<CheckResult>, Vec<String>) {
    let suite = submaximal_suite(params, ov.inject_nonsolution);
    let omega = omega_field();
    let mut rows = Vec::new();
    for &i in &params.i_values {
        let chart = submaximal_chart(i, SymProduct::Half);
        let scaled = chart.rescaled(&omega);
        let basis = submaximal_scales(i);
        let span = submaximal_span(i);
        let nonsolution = submaximal_nonsolution();
        rows.extend(sweep(pts, |x| {
            let mut row = Row::default();
            let (Ok(p), Ok(q)) = (chart.at(x), scaled.at(x)) else {
                row.put("theta0", f64::INFINITY);
                return row;
            };
            let phi = distribution_row(&mut row, &p, &span);
            let om = q.eval(&omega);
            for (_, f) in &basis {
                let s = p.eval(f);
                row.put("theta0", theta0_standard(&p, &s).max_abs());
                row.put_result("einstein_constant", einstein_constant(&p, &s, 1e-8).map(|l| l.lambda.abs()));
                if let Some(phi) = &phi {
                    row.put("xi_killing", conformal_killing_residual(&p, &xi_iota7(&p, phi, &s)));
                }
                row.put("conformal_invariance", theta0_standard(&q, &(om * q.eval(f))).max_abs());
            }
            let ns = p.eval(&nonsolution);
            let base = theta0_standard(&p, &ns);
            let moved = theta0_standard(&q, &(om * q.eval(&nonsolution)));
            let o = om.value();
            let diff = moved.d.iter().zip(&base.d).map(|(a, b)| (a.value() - o * b.value()).abs()).fold(0.0, f64::max);
            row.put("conformal_covariance", diff / base.max_abs().max(1e-300));
            row.put("note:nonsolution", base.max_abs());
            if ov.inject_nonsolution {
                row.put("theta0_nonsolution", base.max_abs());
            }
            row
        }));
    }
    fold_rows(&suite, &rows, ov.tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_name_is_rejected() {
        assert!(matches!(load_example("nope"), Err(GalleryError::UnknownExample(_))));
    }

    #[test]
    fn rolling_metric_signature_at_reference_point() {
        let g = rolling_metric(&Jet::point(&[1.0, 0.0, 2.0, 0.0, 0.0]));
        let gv = Matrix::from_fn(DIM, DIM, |i, j| g.get(i, j).value());
        for i in 0..DIM {
            for j in 0..DIM {
                assert_eq!(gv.get(i, j), gv.get(j, i));
            }
        }
        assert_eq!(crate::linalg::signature(&gv, 1e-12), (3, 2, 0));
        assert_eq!(rolling_chart().signature(&[1.0, 0.0, 2.0, 0.0, 0.0]), (2, 3, 0));
    }

    #[test]
    fn dirichlet_sigma_n_at_unit_point() {
        let s = dirichlet_sigma_n(&Jet::point(&[1.0, 0.0, 1.0, 0.0, 0.0]));
        assert_eq!(s.value(), 1.0);
    }

    #[test]
    fn linear_submaximal_scale_has_vanishing_hessian() {
        let [_, (name, f)] = submaximal_scales(0.0);
        assert_eq!(name, "x");
        let s = f.eval(&Jet::point(&[0.3, 0.0, 0.0, 0.0, 0.0]));
        for i in 0..DIM {
            for j in 0..DIM {
                assert_eq!(s.d2(i, j), 0.0);
            }
        }
    }

    #[test]
    fn fold_takes_worst_point_and_flags_missing_checks() {
        let suite = Suite { defs: vec![cont("a", "a", 1.0), cont("b", "b", 1.0)], notes: vec![] };
        let mut r1 = Row::default();
        r1.put("a", 0.5);
        let mut r2 = Row::default();
        r2.put("a", f64::NAN);
        let (c, _) = fold_rows(&suite, &[r1], None);
        assert!(c[0].pass && !c[1].pass);
        let (c, _) = fold_rows(&suite, &[Row::default(), r2], Some(10.0));
        assert!(c[0].max_residual.is_infinite() && !c[0].pass);
    }
}
