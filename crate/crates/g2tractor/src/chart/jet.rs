//! Truncated multivariate Taylor series in the five chart coordinates.
//!
//! A [`Jet`] stores Taylor coefficients `c_α = ∂^α f(x₀) / α!` for all
//! multi-indices with `|α| ≤ order` (at most [`MAX_ORDER`]). Products and
//! elementary functions truncate; differentiation lowers the order by one.

use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::OnceLock;

use crate::scalars::Scalar;

pub const NVARS: usize = 5;
pub const MAX_ORDER: usize = 3;
/// Number of monomials of degree `≤ 3` in five variables.
pub const NCOEF: usize = 56;

struct Tables {
    exps: Vec<[u8; NVARS]>,
    degree: Vec<usize>,
    /// `(i, j, k)` with `x^{α_i} x^{α_j} = x^{α_k}`, total degree ≤ 3.
    products: Vec<(u8, u8, u8)>,
    /// `shift[v][i]`: index of `α_i + e_v` if its degree is ≤ 3.
    shift: Vec<Vec<Option<usize>>>,
}

fn tables() -> &'static Tables {
    static T: OnceLock<Tables> = OnceLock::new();
    T.get_or_init(|| {
        let mut exps = Vec::new();
        for d in 0..=MAX_ORDER {
            let mut cur = [0u8; NVARS];
            gen(d, 0, &mut cur, &mut exps);
        }
        let index = |e: &[u8; NVARS]| exps.iter().position(|x| x == e);
        let degree: Vec<usize> = exps.iter().map(|e| e.iter().map(|&x| x as usize).sum()).collect();
        let mut products = Vec::new();
        for i in 0..exps.len() {
            for j in 0..exps.len() {
                if degree[i] + degree[j] > MAX_ORDER {
                    continue;
                }
                let mut e = exps[i];
                for v in 0..NVARS {
                    e[v] += exps[j][v];
                }
                products.push((i as u8, j as u8, index(&e).unwrap() as u8));
            }
        }
        let shift = (0..NVARS)
            .map(|v| {
                exps.iter()
                    .map(|e| {
                        let mut e2 = *e;
                        e2[v] += 1;
                        index(&e2)
                    })
                    .collect()
            })
            .collect();
        Tables { exps, degree, products, shift }
    })
}

fn gen(d: usize, v: usize, cur: &mut [u8; NVARS], out: &mut Vec<[u8; NVARS]>) {
    if v == NVARS - 1 {
        cur[v] = d as u8;
        out.push(*cur);
        return;
    }
    for k in (0..=d).rev() {
        cur[v] = k as u8;
        gen(d - k, v + 1, cur, out);
    }
    cur[v] = 0;
}

/// Index of the monomial with the given exponents.
pub fn monomial_index(exps: &[u8; NVARS]) -> usize {
    tables().exps.iter().position(|e| e == exps).expect("degree <= 3")
}

#[derive(Clone, Copy, PartialEq)]
pub struct Jet {
    order: u8,
    c: [f64; NCOEF],
}

impl std::fmt::Debug for Jet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Jet(order {}, value {:e})", self.order, self.c[0])
    }
}

impl Jet {
    pub fn constant(v: f64) -> Self {
        let mut c = [0.0; NCOEF];
        c[0] = v;
        Jet { order: MAX_ORDER as u8, c }
    }

    /// The coordinate function `x_i` expanded at `x_i = at`.
    pub fn variable(i: usize, at: f64) -> Self {
        let mut j = Self::constant(at);
        j.c[1 + i] = 1.0;
        j
    }

    /// Coordinate jets at a point.
    pub fn point(x: &[f64]) -> Vec<Jet> {
        x.iter().enumerate().map(|(i, &v)| Jet::variable(i, v)).collect()
    }

    pub fn order(&self) -> usize {
        self.order as usize
    }

    pub fn with_order(mut self, order: usize) -> Self {
        let order = order.min(self.order as usize);
        let t = tables();
        for k in 0..NCOEF {
            if t.degree[k] > order {
                self.c[k] = 0.0;
            }
        }
        self.order = order as u8;
        self
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    pub fn coeffs(&self) -> &[f64; NCOEF] {
        &self.c
    }

    /// Builds a jet from Taylor coefficients.
    pub fn from_coeffs(order: usize, c: [f64; NCOEF]) -> Self {
        Jet { order: MAX_ORDER as u8, c }.with_order(order)
    }

    /// `∂^α f(x₀)` for the multi-index `α`.
    pub fn partial(&self, exps: &[u8; NVARS]) -> f64 {
        let k = monomial_index(exps);
        let fact: f64 = exps.iter().map(|&e| (1..=e as u64).product::<u64>() as f64).product();
        self.c[k] * fact
    }

    pub fn d1(&self, i: usize) -> f64 {
        self.c[1 + i]
    }

    pub fn d2(&self, i: usize, j: usize) -> f64 {
        let mut e = [0u8; NVARS];
        e[i] += 1;
        e[j] += 1;
        self.partial(&e)
    }

    /// `∂_v f` as a jet of one lower order.
    pub fn deriv(&self, v: usize) -> Self {
        let t = tables();
        let mut c = [0.0; NCOEF];
        let new_order = self.order.saturating_sub(1);
        for k in 0..NCOEF {
            if t.degree[k] > new_order as usize {
                continue;
            }
            if let Some(s) = t.shift[v][k] {
                c[k] = self.c[s] * (t.exps[k][v] as f64 + 1.0);
            }
        }
        Jet { order: new_order, c }
    }

    /// A jet `L` with `L(x₀) = value` and `∂_i L = grad[i]`. Mixed partials
    /// are averaged over the directions they can come from; the returned
    /// number is the largest disagreement (zero for an exact gradient).
    pub fn integrate(value: f64, grad: &[Jet]) -> (Jet, f64) {
        let t = tables();
        let order = (grad.iter().map(|g| g.order()).min().unwrap_or(0) + 1).min(MAX_ORDER);
        let mut c = [0.0; NCOEF];
        c[0] = value;
        let mut worst: f64 = 0.0;
        for k in 1..NCOEF {
            if t.degree[k] > order {
                continue;
            }
            let mut vals = Vec::new();
            for v in 0..NVARS {
                if t.exps[k][v] == 0 {
                    continue;
                }
                let mut e = t.exps[k];
                e[v] -= 1;
                let src = monomial_index(&e);
                vals.push(grad[v].c[src] / t.exps[k][v] as f64);
            }
            let mean = vals.iter().sum::<f64>() / vals.len() as f64;
            for x in &vals {
                worst = worst.max((x - mean).abs());
            }
            c[k] = mean;
        }
        (Jet { order: order as u8, c }, worst)
    }

    fn compose(&self, derivs: [f64; MAX_ORDER + 1]) -> Self {
        // F(f₀ + h) = Σ F⁽ᵏ⁾(f₀) hᵏ / k!, h nilpotent of order > 3.
        let mut h = *self;
        h.c[0] = 0.0;
        let mut out = Jet::constant(derivs[0]);
        out.order = self.order;
        let mut pow = Jet::constant(1.0);
        pow.order = self.order;
        let mut fact = 1.0;
        for (k, dk) in derivs.iter().enumerate().skip(1) {
            if k > self.order as usize {
                break;
            }
            pow = pow * h;
            fact *= k as f64;
            out = out + pow.scale(dk / fact);
        }
        out
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = *self;
        for x in out.c.iter_mut() {
            *x *= s;
        }
        out
    }

    pub fn recip(&self) -> Self {
        let a = self.c[0];
        self.compose([1.0 / a, -1.0 / (a * a), 2.0 / (a * a * a), -6.0 / (a * a * a * a)])
    }

    pub fn exp(&self) -> Self {
        let e = self.c[0].exp();
        self.compose([e; 4])
    }

    pub fn ln(&self) -> Self {
        let a = self.c[0];
        self.compose([a.ln(), 1.0 / a, -1.0 / (a * a), 2.0 / (a * a * a)])
    }

    pub fn sin(&self) -> Self {
        let (s, c) = self.c[0].sin_cos();
        self.compose([s, c, -s, -c])
    }

    pub fn cos(&self) -> Self {
        let (s, c) = self.c[0].sin_cos();
        self.compose([c, -s, -c, s])
    }

    pub fn sinh(&self) -> Self {
        let (s, c) = (self.c[0].sinh(), self.c[0].cosh());
        self.compose([s, c, s, c])
    }

    pub fn cosh(&self) -> Self {
        let (s, c) = (self.c[0].sinh(), self.c[0].cosh());
        self.compose([c, s, c, s])
    }

    /// `f^p` for real `p`; requires `f(x₀) > 0` unless `p` is an integer.
    pub fn powf(&self, p: f64) -> Self {
        let a = self.c[0];
        if p.fract() == 0.0 && p >= 0.0 {
            let mut out = Jet::constant(1.0);
            out.order = self.order;
            for _ in 0..p as u32 {
                out = out * *self;
            }
            return out;
        }
        let d = |k: i32| -> f64 {
            let mut coef = 1.0;
            for i in 0..k {
                coef *= p - i as f64;
            }
            coef * a.powf(p - k as f64)
        };
        self.compose([d(0), d(1), d(2), d(3)])
    }

    pub fn sqrt(&self) -> Self {
        self.powf(0.5)
    }

    pub fn max_abs(&self) -> f64 {
        self.c.iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

impl Default for Jet {
    fn default() -> Self {
        Jet::constant(0.0)
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(mut self, o: Jet) -> Jet {
        let order = self.order.min(o.order);
        for k in 0..NCOEF {
            self.c[k] += o.c[k];
        }
        self.with_order(order as usize)
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(mut self, o: Jet) -> Jet {
        let order = self.order.min(o.order);
        for k in 0..NCOEF {
            self.c[k] -= o.c[k];
        }
        self.with_order(order as usize)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        let order = self.order.min(o.order) as usize;
        let t = tables();
        let mut c = [0.0; NCOEF];
        for &(i, j, k) in &t.products {
            let (i, j, k) = (i as usize, j as usize, k as usize);
            if t.degree[k] > order {
                continue;
            }
            let a = self.c[i];
            if a == 0.0 {
                continue;
            }
            c[k] += a * o.c[j];
        }
        Jet { order: order as u8, c }
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, s: f64) -> Jet {
        self.scale(s)
    }
}

#[allow(clippy::suspicious_arithmetic_impl)]
impl Div for Jet {
    type Output = Jet;
    fn div(self, o: Jet) -> Jet {
        self * o.recip()
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(mut self, s: f64) -> Jet {
        self.c[0] += s;
        self
    }
}

impl Scalar for Jet {
    const EXACT: bool = false;

    fn zero() -> Self {
        Jet::constant(0.0)
    }

    fn one() -> Self {
        Jet::constant(1.0)
    }

    fn from_ratio(p: i64, q: i64) -> Self {
        Jet::constant(p as f64 / q as f64)
    }

    fn sqrt2() -> Self {
        Jet::constant(std::f64::consts::SQRT_2)
    }

    fn is_zero(&self) -> bool {
        self.c.iter().all(|&x| x == 0.0)
    }

    fn near_zero(&self, tol: f64) -> bool {
        self.c.iter().all(|x| x.abs() <= tol)
    }

    fn try_recip(&self) -> Option<Self> {
        (self.c[0] != 0.0).then(|| self.recip())
    }

    fn value(&self) -> f64 {
        self.c[0]
    }

    fn signum(&self, tol: f64) -> i8 {
        if self.c[0].abs() <= tol {
            0
        } else if self.c[0] > 0.0 {
            1
        } else {
            -1
        }
    }

    fn try_sqrt(&self) -> Option<Self> {
        (self.c[0] >= 0.0).then(|| self.sqrt())
    }

    fn try_cbrt(&self) -> Option<Self> {
        let a = self.c[0];
        if a == 0.0 {
            return (self.max_abs() == 0.0).then(Jet::zero);
        }
        let s = a.signum();
        Some(self.scale(s).powf(1.0 / 3.0).scale(s))
    }
}

/// Central finite differences of `f` at `x` with step `h`: gradient and
/// Hessian, for cross-checking jets.
pub fn finite_differences(f: impl Fn(&[f64]) -> f64, x: &[f64], h: f64) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = x.len();
    let at = |d: &[(usize, f64)]| {
        let mut y = x.to_vec();
        for &(i, s) in d {
            y[i] += s;
        }
        f(&y)
    };
    let f0 = f(x);
    let grad = (0..n).map(|i| (at(&[(i, h)]) - at(&[(i, -h)])) / (2.0 * h)).collect();
    let hess = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        (at(&[(i, h)]) - 2.0 * f0 + at(&[(i, -h)])) / (h * h)
                    } else {
                        (at(&[(i, h), (j, h)]) - at(&[(i, h), (j, -h)]) - at(&[(i, -h), (j, h)]) + at(&[(i, -h), (j, -h)]))
                            / (4.0 * h * h)
                    }
                })
                .collect()
        })
        .collect();
    (grad, hess)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_size() {
        assert_eq!(tables().exps.len(), NCOEF);
    }

    #[test]
    fn product_rule_and_derivatives() {
        let x = Jet::point(&[0.3, -1.2, 0.5, 2.0, 0.1]);
        let f = (x[0] * x[1]).sin() * x[2].exp() + x[3].powf(1.5) / x[4].cosh().recip().recip();
        let g = |y: &[f64]| (y[0] * y[1]).sin() * y[2].exp() + y[3].powf(1.5) / y[4].cosh();
        let (gr, he) = finite_differences(g, &[0.3, -1.2, 0.5, 2.0, 0.1], 1e-4);
        let _ = f;
        let f = (x[0] * x[1]).sin() * x[2].exp() + x[3].powf(1.5) * x[4].cosh().recip();
        for i in 0..5 {
            assert!((f.d1(i) - gr[i]).abs() < 1e-6);
            for j in 0..5 {
                assert!((f.d2(i, j) - he[i][j]).abs() < 1e-5, "{i}{j}");
            }
        }
        let third = f.deriv(0).deriv(1).deriv(2);
        assert_eq!(third.order(), 0);
        let e = [1, 1, 1, 0, 0];
        assert!((third.value() - f.partial(&e)).abs() < 1e-12);
    }

    #[test]
    fn integrate_recovers_potential() {
        let x = Jet::point(&[0.4, 0.2, -0.3, 1.0, 0.7]);
        let f = x[0] * x[1] * x[2] + (x[3] * x[4]).sin();
        let grad: Vec<Jet> = (0..5).map(|v| f.deriv(v)).collect();
        let (g, bad) = Jet::integrate(f.value(), &grad);
        assert!(bad < 1e-14);
        assert!((g - f).max_abs() < 1e-13);
    }

    #[test]
    fn roots_and_reciprocal() {
        let x = Jet::point(&[2.0, 0.0, 0.0, 0.0, 0.0]);
        let y = x[0] + x[1] * x[2];
        assert!((y.sqrt() * y.sqrt() - y).max_abs() < 1e-14);
        assert!((y.try_cbrt().unwrap().powf(3.0) - y).max_abs() < 1e-13);
        assert!((y * y.recip() - Jet::constant(1.0)).max_abs() < 1e-14);
        assert!((y.ln().exp() - y).max_abs() < 1e-13);
    }
}
