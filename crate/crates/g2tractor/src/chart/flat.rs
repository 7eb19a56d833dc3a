//! The flat model: constant adapted metric, where parallel tractors are
//! known in closed form and serve as an oracle for the splitting operators.

use crate::forms::{pullback, KForm};
use crate::g2core::{standard_metric, standard_phi};

use crate::linalg::Matrix;

use super::tractor::{connection_matrix, FIBER};
use super::{Chart, Domain, Field, Jet, DIM};

/// Constant metric equal to the middle block of the standard tractor metric.
pub fn adapted_flat() -> Chart {
    let h: Matrix<f64> = standard_metric();
    Chart::new(
        ["x1", "x2", "x3", "x4", "x5"],
        Field::new(move |_| Matrix::from_fn(DIM, DIM, |i, j| Jet::constant(*h.get(1 + i, 1 + j)))),
        Domain::boxed([-1.0; 5], [1.0; 5]),
    )
}

/// `exp(±Σ xᵇ A_b)`; on a flat chart the `A_b` are constant, commute, and
/// cube to zero. They are read off as numbers since curvature jets at a
/// point carry low order.
pub fn flat_exp(chart: &Chart, coords: &[Jet], sign: f64) -> Matrix<Jet> {
    let p = chart.at(&[0.0; 5]).expect("origin lies in the chart");
    let mut n = Matrix::<Jet>::zeros(FIBER, FIBER);
    for b in 0..DIM {
        let a = connection_matrix(&p, b);
        n = Matrix::from_fn(FIBER, FIBER, |i, j| *n.get(i, j) + coords[b] * (a.get(i, j).value() * sign));
    }
    let n2 = n.mul(&n);
    Matrix::from_fn(FIBER, FIBER, |i, j| Jet::constant((i == j) as u8 as f64) + *n.get(i, j) + n2.get(i, j).scale(0.5))
}

/// The parallel tractor 3-form equal to the standard one at the origin.
pub fn parallel_three_form(chart: &Chart) -> Field<KForm<Jet>> {
    parallel_three_form_from(chart, standard_phi())
}

pub fn parallel_three_form_from(chart: &Chart, phi0: KForm<f64>) -> Field<KForm<Jet>> {
    let c = chart.clone();
    let phi0 = KForm::from_components(phi0.dim(), 3, phi0.components().iter().map(|&v| Jet::constant(v)).collect());
    Field::new(move |x| pullback(&phi0, &flat_exp(&c, x, 1.0)))
}

/// The parallel standard tractor with value `s0` at the origin.
pub fn parallel_standard(chart: &Chart, s0: [f64; FIBER]) -> Field<Vec<Jet>> {
    let c = chart.clone();
    Field::new(move |x| flat_exp(&c, x, -1.0).apply(&s0.map(Jet::constant)))
}
