//! Small dense linear algebra over any [`Scalar`].
//!
//! Pivoting picks the entry of largest magnitude that is not (near) zero, so
//! the same code serves exact and floating backends.

use crate::scalars::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    pub rows: usize,
    pub cols: usize,
    pub d: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, d: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.d[i * n + i] = T::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut d = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                d.push(f(i, j));
            }
        }
        Matrix { rows, cols, d }
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.d[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.d[i * self.cols + j] = v;
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        Matrix::from_fn(self.rows, other.cols, |i, j| {
            let mut acc = T::zero();
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                acc = acc + a.clone() * other.get(k, j).clone();
            }
            acc
        })
    }

    pub fn apply(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = T::zero();
                for k in 0..self.cols {
                    acc = acc + self.get(i, k).clone() * v[k].clone();
                }
                acc
            })
            .collect()
    }
}

fn pivot_row<T: Scalar>(m: &Matrix<T>, col: usize, from: usize, tol: f64) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for r in from..m.rows {
        let e = m.get(r, col);
        if e.near_zero(tol) {
            continue;
        }
        let mag = e.magnitude();
        if best.map_or(true, |(_, b)| mag > b) {
            best = Some((r, mag));
        }
    }
    best.map(|(r, _)| r)
}

fn swap_rows<T>(m: &mut Matrix<T>, a: usize, b: usize) {
    if a == b {
        return;
    }
    for j in 0..m.cols {
        m.d.swap(a * m.cols + j, b * m.cols + j);
    }
}

/// Determinant; explicit formulas up to 3×3, elimination beyond.
pub fn det<T: Scalar>(m: &Matrix<T>) -> T {
    assert_eq!(m.rows, m.cols);
    let g = |i, j| m.get(i, j).clone();
    match m.rows {
        0 => T::one(),
        1 => g(0, 0),
        2 => g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0),
        3 => {
            g(0, 0) * (g(1, 1) * g(2, 2) - g(1, 2) * g(2, 1)) - g(0, 1) * (g(1, 0) * g(2, 2) - g(1, 2) * g(2, 0))
                + g(0, 2) * (g(1, 0) * g(2, 1) - g(1, 1) * g(2, 0))
        }
        n => {
            let mut a = m.clone();
            let mut acc = T::one();
            for c in 0..n {
                let Some(p) = pivot_row(&a, c, c, 0.0) else { return T::zero() };
                if p != c {
                    swap_rows(&mut a, p, c);
                    acc = -acc;
                }
                let piv = a.get(c, c).clone();
                let inv = piv.try_recip().expect("nonzero pivot");
                acc = acc * piv;
                for r in c + 1..n {
                    let f = a.get(r, c).clone() * inv.clone();
                    if f.is_zero() {
                        continue;
                    }
                    for j in c..n {
                        let v = a.get(r, j).clone() - f.clone() * a.get(c, j).clone();
                        a.set(r, j, v);
                    }
                }
            }
            acc
        }
    }
}

/// Reduced row echelon form; returns the pivot columns.
pub fn rref<T: Scalar>(m: &mut Matrix<T>, tol: f64) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for c in 0..m.cols {
        if row == m.rows {
            break;
        }
        let Some(p) = pivot_row(m, c, row, tol) else { continue };
        swap_rows(m, p, row);
        let inv = m.get(row, c).try_recip().expect("nonzero pivot");
        for j in 0..m.cols {
            let v = m.get(row, j).clone() * inv.clone();
            m.set(row, j, v);
        }
        for r in 0..m.rows {
            if r == row {
                continue;
            }
            let f = m.get(r, c).clone();
            if f.is_zero() {
                continue;
            }
            for j in 0..m.cols {
                let v = m.get(r, j).clone() - f.clone() * m.get(row, j).clone();
                m.set(r, j, v);
            }
        }
        pivots.push(c);
        row += 1;
    }
    pivots
}

pub fn rank<T: Scalar>(m: &Matrix<T>, tol: f64) -> usize {
    rref(&mut m.clone(), tol).len()
}

/// A basis of the right null space.
pub fn nullspace<T: Scalar>(m: &Matrix<T>, tol: f64) -> Vec<Vec<T>> {
    let mut a = m.clone();
    let pivots = rref(&mut a, tol);
    let free: Vec<usize> = (0..m.cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![T::zero(); m.cols];
            v[f] = T::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -a.get(r, f).clone();
            }
            v
        })
        .collect()
}

pub fn inverse<T: Scalar>(m: &Matrix<T>) -> Option<Matrix<T>> {
    let n = m.rows;
    assert_eq!(n, m.cols);
    let mut aug = Matrix::from_fn(n, 2 * n, |i, j| {
        if j < n {
            m.get(i, j).clone()
        } else if j - n == i {
            T::one()
        } else {
            T::zero()
        }
    });
    let pivots = rref(&mut aug, 0.0);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(Matrix::from_fn(n, n, |i, j| aug.get(i, n + j).clone()))
}

/// Solves `m x = b` for square nonsingular `m`.
pub fn solve<T: Scalar>(m: &Matrix<T>, b: &[T]) -> Option<Vec<T>> {
    let n = m.rows;
    let mut aug = Matrix::from_fn(n, n + 1, |i, j| if j < n { m.get(i, j).clone() } else { b[i].clone() });
    let pivots = rref(&mut aug, 0.0);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some((0..n).map(|i| aug.get(i, n).clone()).collect())
}

/// Inertia `(positive, negative, zero)` of a symmetric matrix, by congruence.
pub fn signature<T: Scalar>(m: &Matrix<T>, tol: f64) -> (usize, usize, usize) {
    let n = m.rows;
    let mut a = m.clone();
    let (mut p, mut q) = (0, 0);
    for k in 0..n {
        let scale = (k..n).flat_map(|i| (k..n).map(move |j| (i, j))).map(|(i, j)| a.get(i, j).magnitude()).fold(0.0, f64::max);
        let thr = tol * scale.max(1.0);
        let mut piv = (k..n).find(|&i| !a.get(i, i).near_zero(thr));
        if piv.is_none() {
            // Zero diagonal: fold a nonzero off-diagonal entry onto it.
            let pair = (k..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).find(|&(i, j)| !a.get(i, j).near_zero(thr));
            let Some((i, j)) = pair else { break };
            for c in 0..n {
                let v = a.get(i, c).clone() + a.get(j, c).clone();
                a.set(i, c, v);
            }
            for r in 0..n {
                let v = a.get(r, i).clone() + a.get(r, j).clone();
                a.set(r, i, v);
            }
            piv = Some(i);
        }
        let i = piv.unwrap();
        swap_rows(&mut a, i, k);
        let t = a.transpose();
        a = t;
        swap_rows(&mut a, i, k);
        let d = a.get(k, k).clone();
        match d.signum(thr) {
            1 => p += 1,
            -1 => q += 1,
            _ => break,
        }
        let inv = d.try_recip().expect("nonzero pivot");
        for r in k + 1..n {
            let f = a.get(r, k).clone() * inv.clone();
            if f.is_zero() {
                continue;
            }
            for c in k..n {
                let v = a.get(r, c).clone() - f.clone() * a.get(k, c).clone();
                a.set(r, c, v);
            }
            for c in k..n {
                let v = a.get(c, r).clone() - f.clone() * a.get(c, k).clone();
                a.set(c, r, v);
            }
        }
    }
    (p, q, n - p - q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::ExactScalar;

    fn ex(rows: &[&[i64]]) -> Matrix<ExactScalar> {
        Matrix::from_fn(rows.len(), rows[0].len(), |i, j| ExactScalar::from_integer(rows[i][j]))
    }

    #[test]
    fn det_and_inverse() {
        let m = ex(&[&[2, 1, 0, 0], &[1, 3, 1, 0], &[0, 1, 4, 1], &[0, 0, 1, 5]]);
        assert_eq!(det(&m), ExactScalar::from_integer(85));
        let inv = inverse(&m).unwrap();
        assert_eq!(m.mul(&inv), Matrix::identity(4));
        assert!(inverse(&ex(&[&[1, 2], &[2, 4]])).is_none());
    }

    #[test]
    fn null_space_and_rank() {
        let m = ex(&[&[1, 2, 3], &[2, 4, 6]]);
        assert_eq!(rank(&m, 0.0), 1);
        let ns = nullspace(&m, 0.0);
        assert_eq!(ns.len(), 2);
        for v in ns {
            assert!(m.apply(&v).iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn inertia_with_zero_diagonal() {
        let h = ex(&[&[0, 0, 1], &[0, -1, 0], &[1, 0, 0]]);
        assert_eq!(signature(&h, 0.0), (1, 2, 0));
        let f: Matrix<f64> = Matrix::from_fn(2, 2, |i, j| if i == j { 0.0 } else { 1.0 });
        assert_eq!(signature(&f, 1e-12), (1, 1, 0));
    }
}
