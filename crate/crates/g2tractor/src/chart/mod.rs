//! Conformal tractor calculus on a 5-dimensional coordinate patch.
//!
//! Fields are closures from coordinate jets to jets, so evaluating a field at
//! the coordinate jets of a point `x₀` yields its Taylor expansion there.
//! Everything weighted is trivialized in the scale of the chart metric.
//!
//! Tangent tensors are stored with all indices down ([`Tensor`] of dimension
//! 5, derivative indices appended last); vectors carry an upper index.

pub mod distribution;
pub mod expr;
pub mod flat;
pub mod jet;
pub mod killing;
pub mod tractor;

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::forms::{KForm, Tensor};
use crate::linalg::{self, Matrix};
use crate::scalars::Scalar;
pub use jet::Jet;

/// Chart dimension.
pub const DIM: usize = 5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChartError {
    #[error("metric is singular at {0:?}")]
    SingularMetric(Vec<f64>),
    #[error("point {0:?} lies outside the chart domain")]
    OutsideDomain(Vec<f64>),
    #[error("jet order {have} is too low (need {need})")]
    Order { have: usize, need: usize },
    #[error("{0}")]
    Degenerate(String),
    #[error("routes disagree: {0}")]
    RouteMismatch(String),
    #[error("vector field is not conformal Killing (residual {0:e})")]
    NotKilling(f64),
    #[error("constraint violated: {0}")]
    Constraint(String),
    #[error("expression error: {0}")]
    Expr(String),
}

/// A field on the chart: a function of the coordinate jets.
type FieldFn<T> = dyn Fn(&[Jet]) -> T + Send + Sync;

pub struct Field<T>(Arc<FieldFn<T>>);

impl<T> Clone for Field<T> {
    fn clone(&self) -> Self {
        Field(self.0.clone())
    }
}

impl<T> fmt::Debug for Field<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Field(..)")
    }
}

impl<T> Field<T> {
    pub fn new(f: impl Fn(&[Jet]) -> T + Send + Sync + 'static) -> Self {
        Field(Arc::new(f))
    }

    pub fn eval(&self, coords: &[Jet]) -> T {
        (self.0)(coords)
    }
}

impl<T: 'static> Field<T> {
    pub fn map<U>(&self, f: impl Fn(T) -> U + Send + Sync + 'static) -> Field<U> {
        let inner = self.clone();
        Field::new(move |c| f(inner.eval(c)))
    }
}

pub type ScalarField = Field<Jet>;
pub type VectorField = Field<Vec<Jet>>;
pub type TwoFormField = Field<KForm<Jet>>;
pub type MetricField = Field<Matrix<Jet>>;

impl ScalarField {
    pub fn constant(v: f64) -> Self {
        Field::new(move |_| Jet::constant(v))
    }

    pub fn coordinate(i: usize) -> Self {
        Field::new(move |c| c[i])
    }
}

impl VectorField {
    /// The coordinate field `∂_i`.
    pub fn coordinate(i: usize) -> Self {
        Field::new(move |_| (0..DIM).map(|k| Jet::constant((k == i) as u8 as f64)).collect())
    }

    pub fn zero() -> Self {
        Field::new(|_| vec![Jet::zero(); DIM])
    }

    /// `Σ f_k V_k` for scalar and vector fields.
    pub fn combination(terms: Vec<(ScalarField, VectorField)>) -> Self {
        Field::new(move |c| {
            let mut out = vec![Jet::zero(); DIM];
            for (f, v) in &terms {
                let fv = f.eval(c);
                for (o, vi) in out.iter_mut().zip(v.eval(c)) {
                    *o = *o + fv * vi;
                }
            }
            out
        })
    }
}

pub type Constraint = dyn Fn(&[f64]) -> bool + Send + Sync;

/// Coordinate box plus an optional extra constraint.
#[derive(Clone)]
pub struct Domain {
    pub lo: [f64; DIM],
    pub hi: [f64; DIM],
    pub constraint: Option<Arc<Constraint>>,
}

impl fmt::Debug for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Domain").field("lo", &self.lo).field("hi", &self.hi).finish()
    }
}

impl Domain {
    pub fn boxed(lo: [f64; DIM], hi: [f64; DIM]) -> Self {
        Domain { lo, hi, constraint: None }
    }

    pub fn with_constraint(mut self, f: impl Fn(&[f64]) -> bool + Send + Sync + 'static) -> Self {
        self.constraint = Some(Arc::new(f));
        self
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        let in_box = x.iter().enumerate().all(|(i, &v)| v >= self.lo[i] && v <= self.hi[i]);
        in_box && self.constraint.as_ref().map_or(true, |c| c(x))
    }

    /// `n` points drawn uniformly from the domain by rejection.
    pub fn sample(&self, n: usize, seed: u64) -> Vec<[f64; DIM]> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::with_capacity(n);
        let mut tries = 0usize;
        while out.len() < n && tries < 1000 * n.max(1) {
            tries += 1;
            let mut x = [0.0; DIM];
            for i in 0..DIM {
                x[i] = if self.lo[i] == self.hi[i] { self.lo[i] } else { rng.gen_range(self.lo[i]..self.hi[i]) };
            }
            if self.contains(&x) {
                out.push(x);
            }
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct Chart {
    pub names: [String; DIM],
    pub metric: MetricField,
    pub domain: Domain,
}

impl Chart {
    pub fn new(names: [&str; DIM], metric: MetricField, domain: Domain) -> Self {
        Chart { names: names.map(String::from), metric, domain }
    }

    /// The same coordinates with metric `Ω² g`.
    pub fn rescaled(&self, omega: &ScalarField) -> Chart {
        let g = self.metric.clone();
        let omega = omega.clone();
        Chart {
            names: self.names.clone(),
            metric: Field::new(move |c| {
                let o = omega.eval(c);
                let o2 = o * o;
                let m = g.eval(c);
                Matrix::from_fn(DIM, DIM, |i, j| *m.get(i, j) * o2)
            }),
            domain: self.domain.clone(),
        }
    }

    /// Geometry at `x` (the domain is not enforced, so boundary probes work).
    pub fn at(&self, x: &[f64]) -> Result<PointGeometry, ChartError> {
        PointGeometry::new(self, x)
    }

    /// Metric signature `(p, q)` at `x`.
    pub fn signature(&self, x: &[f64]) -> (usize, usize, usize) {
        let g = self.metric.eval(&Jet::point(x));
        let gv = Matrix::from_fn(DIM, DIM, |i, j| g.get(i, j).value());
        linalg::signature(&gv, 1e-12)
    }
}

/// Levi-Civita data at a point, as jets around it.
#[derive(Clone, Debug)]
pub struct CurvatureAtPoint {
    /// `Γ^a_{bc}` stored at `[a, b, c]`.
    pub christoffel: Tensor<Jet>,
    /// `R^a_{bcd}` stored at `[a, b, c, d]`.
    pub riemann: Tensor<Jet>,
    pub ricci: Tensor<Jet>,
    pub scalar: Jet,
    pub schouten: Tensor<Jet>,
}

/// Everything needed to evaluate chart operators at one point.
#[derive(Clone, Debug)]
pub struct PointGeometry {
    pub x: Vec<f64>,
    pub coords: Vec<Jet>,
    pub g: Matrix<Jet>,
    pub ginv: Matrix<Jet>,
    pub curvature: CurvatureAtPoint,
}

/// Matrix of jets as a rank-2 tensor.
pub fn matrix_tensor(m: &Matrix<Jet>) -> Tensor<Jet> {
    Tensor::from_fn(m.rows, 2, |i| *m.get(i[0], i[1]))
}

/// Constant-term values of a tensor.
pub fn tensor_values(t: &Tensor<Jet>) -> Tensor<f64> {
    Tensor { dim: t.dim, rank: t.rank, d: t.d.iter().map(|x| x.value()).collect() }
}

pub fn values(v: &[Jet]) -> Vec<f64> {
    v.iter().map(|x| x.value()).collect()
}

pub fn form_values(f: &KForm<Jet>) -> KForm<f64> {
    KForm::from_components(f.dim(), f.degree(), f.components().iter().map(|x| x.value()).collect())
}

impl PointGeometry {
    pub fn new(chart: &Chart, x: &[f64]) -> Result<Self, ChartError> {
        let coords = Jet::point(x);
        let g = chart.metric.eval(&coords);
        let ginv = linalg::inverse(&g).ok_or_else(|| ChartError::SingularMetric(x.to_vec()))?;
        if linalg::det(&g).value().abs() < 1e-14 {
            return Err(ChartError::SingularMetric(x.to_vec()));
        }
        let n = DIM;
        // ∂_c g_{ab} at [a, b, c].
        let dg = Tensor::from_fn(n, 3, |i| g.get(i[0], i[1]).deriv(i[2]));
        // Γ_{a b c} = ½(∂_b g_{ac} + ∂_c g_{ab} − ∂_a g_{bc}), then raise a.
        let lower = Tensor::from_fn(n, 3, |i| {
            let (a, b, c) = (i[0], i[1], i[2]);
            (*dg.get(&[a, c, b]) + *dg.get(&[a, b, c]) - *dg.get(&[b, c, a])).scale(0.5)
        });
        let christoffel = lower.contract_slot(&ginv, 0);
        let dgam = Tensor::from_fn(n, 4, |i| christoffel.get(&i[..3]).deriv(i[3]));
        let riemann = Tensor::from_fn(n, 4, |i| {
            let (a, b, c, d) = (i[0], i[1], i[2], i[3]);
            let mut acc = *dgam.get(&[a, d, b, c]) - *dgam.get(&[a, c, b, d]);
            for e in 0..n {
                acc = acc + *christoffel.get(&[a, c, e]) * *christoffel.get(&[e, d, b])
                    - *christoffel.get(&[a, d, e]) * *christoffel.get(&[e, c, b]);
            }
            acc
        });
        let ricci = Tensor::from_fn(n, 2, |i| {
            (0..n).fold(Jet::zero(), |acc, a| acc + *riemann.get(&[a, i[0], a, i[1]]))
        });
        let mut scalar = Jet::zero();
        for a in 0..n {
            for b in 0..n {
                scalar = scalar + *ginv.get(a, b) * *ricci.get(&[a, b]);
            }
        }
        let nf = n as f64;
        let schouten = Tensor::from_fn(n, 2, |i| {
            (*ricci.get(i) - (*g.get(i[0], i[1]) * scalar).scale(1.0 / (2.0 * (nf - 1.0)))).scale(1.0 / (nf - 2.0))
        });
        Ok(PointGeometry {
            x: x.to_vec(),
            coords,
            g,
            ginv,
            curvature: CurvatureAtPoint { christoffel, riemann, ricci, scalar, schouten },
        })
    }

    pub fn eval<T>(&self, f: &Field<T>) -> T {
        f.eval(&self.coords)
    }

    /// `∇_c t` for an all-lower tensor, derivative index appended.
    pub fn nabla(&self, t: &Tensor<Jet>) -> Tensor<Jet> {
        let n = DIM;
        let gam = &self.curvature.christoffel;
        Tensor::from_fn(n, t.rank + 1, |i| {
            let (idx, c) = (&i[..t.rank], i[t.rank]);
            let mut acc = t.get(idx).deriv(c);
            let mut j = idx.to_vec();
            for s in 0..t.rank {
                for e in 0..n {
                    j[s] = e;
                    let ga = gam.get(&[e, c, idx[s]]);
                    acc = acc - *ga * *t.get(&j);
                }
                j[s] = idx[s];
            }
            acc
        })
    }

    /// Gradient `σ_{,a}` of a scalar jet.
    pub fn grad(&self, f: &Jet) -> Tensor<Jet> {
        Tensor::from_fn(DIM, 1, |i| f.deriv(i[0]))
    }

    /// `g^{ab}` contraction of slots `s < t` of `t`.
    pub fn trace(&self, t: &Tensor<Jet>, s: usize, u: usize) -> Tensor<Jet> {
        assert!(s < u && u < t.rank);
        let n = DIM;
        Tensor::from_fn(n, t.rank - 2, |i| {
            let mut full = Vec::with_capacity(t.rank);
            let mut acc = Jet::zero();
            for a in 0..n {
                for b in 0..n {
                    let gab = self.ginv.get(a, b);
                    full.clear();
                    let mut it = i.iter();
                    for slot in 0..t.rank {
                        if slot == s {
                            full.push(a);
                        } else if slot == u {
                            full.push(b);
                        } else {
                            full.push(*it.next().unwrap());
                        }
                    }
                    acc = acc + *gab * *t.get(&full);
                }
            }
            acc
        })
    }

    pub fn lower(&self, v: &[Jet]) -> Vec<Jet> {
        self.g.apply(v)
    }

    pub fn raise(&self, w: &[Jet]) -> Vec<Jet> {
        self.ginv.apply(w)
    }

    pub fn inner(&self, v: &[Jet], w: &[Jet]) -> Jet {
        crate::forms::dot(&self.lower(v), w)
    }

    /// `P^a_a`.
    pub fn schouten_trace(&self) -> Jet {
        self.trace(&self.curvature.schouten, 0, 1).d[0]
    }

    /// Schouten tensor with the first index raised, `P^a_b` at `[a, b]`.
    pub fn schouten_mixed(&self) -> Tensor<Jet> {
        self.curvature.schouten.contract_slot(&self.ginv, 0)
    }

    /// `√|det g|`.
    pub fn volume_density(&self) -> f64 {
        let gv = Matrix::from_fn(DIM, DIM, |i, j| self.g.get(i, j).value());
        linalg::det(&gv).abs().sqrt()
    }

    /// Largest absolute component of `Ric − k g`, relative to `max |g|`.
    pub fn einstein_residual(&self, k: f64) -> f64 {
        let ric = &self.curvature.ricci;
        let mut worst: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for a in 0..DIM {
            for b in 0..DIM {
                worst = worst.max((ric.get(&[a, b]).value() - k * self.g.get(a, b).value()).abs());
                scale = scale.max(self.g.get(a, b).value().abs());
            }
        }
        worst / scale.max(1e-300)
    }

    pub fn tensor_of_form(&self, f: &KForm<Jet>) -> Tensor<Jet> {
        f.to_tensor()
    }
}

/// Symmetric metric from a list of `(i, j, coefficient)` terms where each term
/// contributes `c (dxⁱ dxʲ)` and `dxⁱ dxʲ = ½(dxⁱ⊗dxʲ + dxʲ⊗dxⁱ)`.
pub fn metric_from_terms(terms: &[(usize, usize, Jet)]) -> Matrix<Jet> {
    let mut m = Matrix::zeros(DIM, DIM);
    for &(i, j, c) in terms {
        if i == j {
            m.set(i, i, *m.get(i, i) + c);
        } else {
            let h = c.scale(0.5);
            m.set(i, j, *m.get(i, j) + h);
            m.set(j, i, *m.get(j, i) + h);
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flat() -> Chart {
        Chart::new(
            ["x1", "x2", "x3", "x4", "x5"],
            Field::new(|_| {
                Matrix::from_fn(5, 5, |i, j| Jet::constant(if i != j { 0.0 } else if i == 2 { -1.0 } else { 1.0 }))
            }),
            Domain::boxed([-1.0; 5], [1.0; 5]),
        )
    }

    #[test]
    fn flat_metric_has_vanishing_schouten() {
        let p = flat().at(&[0.1, 0.2, 0.3, 0.4, 0.5]).unwrap();
        assert!(p.curvature.schouten.max_abs() < 1e-15);
        assert_eq!(flat().signature(&[0.0; 5]), (4, 1, 0));
    }

    #[test]
    fn round_sphere_factor_in_product_has_expected_ricci() {
        // S²(radius 1) × R³ in stereographic coordinates: Ric = g on the sphere block.
        let chart = Chart::new(
            ["u", "v", "a", "b", "c"],
            Field::new(|c| {
                let w = (c[0] * c[0] + c[1] * c[1] + 1.0).recip();
                let f = w * w * 4.0;
                let mut m = Matrix::zeros(5, 5);
                m.set(0, 0, f);
                m.set(1, 1, f);
                for i in 2..5 {
                    m.set(i, i, Jet::constant(1.0));
                }
                m
            }),
            Domain::boxed([-1.0; 5], [1.0; 5]),
        );
        let p = chart.at(&[0.3, -0.4, 0.0, 0.0, 0.0]).unwrap();
        for a in 0..2 {
            for b in 0..2 {
                let want = p.g.get(a, b).value();
                assert!((p.curvature.ricci.get(&[a, b]).value() - want).abs() < 1e-12);
            }
        }
        assert!((p.curvature.scalar.value() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn sampling_respects_constraint() {
        let d = Domain::boxed([0.0; 5], [1.0; 5]).with_constraint(|x| x[0] > x[1]);
        let pts = d.sample(50, 3);
        assert_eq!(pts.len(), 50);
        assert!(pts.iter().all(|x| x[0] > x[1]));
        assert_eq!(pts, d.sample(50, 3));
    }
}
