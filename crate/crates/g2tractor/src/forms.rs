//! Exterior algebra on a small real vector space.
//!
//! Forms are stored on strictly increasing multi-indices, encoded as bit
//! masks. Indices are 0-based in the Rust API (`e^0 … e^6` for the fiber); the
//! JSON format uses 1-based indices to match the usual `e^{147}` notation.
//!
//! Conventions:
//! * `e^I ∧ e^J` is the shuffle product, so `(e^1 ∧ e^2)(E_1, E_2) = 1`;
//! * the component `a_I` of a form equals the fully antisymmetric tensor
//!   component at `I`, and [`antisymmetrize`] carries the weight `1/k!`;
//! * the Hodge star satisfies `b ∧ ∗a = H(b, a) vol`, where
//!   `H(e^I, e^J) = det(H^{I J})`.

use std::sync::OnceLock;

use serde_json::{json, Value};
use thiserror::Error;

use crate::linalg::{self, Matrix};
use crate::scalars::{Scalar, ScalarError, ScalarText};

/// Fiber dimension.
pub const N: usize = 7;

/// A vector with [`N`] components (contravariant).
pub type Vec7<T> = Vec<T>;
/// A symmetric bilinear form on the fiber.
pub type Bilinear7<T> = Matrix<T>;
/// An endomorphism `A^i_j` stored with row `i`, column `j`.
pub type Endo7<T> = Matrix<T>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FormError {
    #[error("degree {0} exceeds dimension {1}")]
    DegreeOverflow(usize, usize),
    #[error("dimension mismatch ({0} vs {1})")]
    DimensionMismatch(usize, usize),
    #[error("bilinear form is singular")]
    SingularMetric,
    #[error("volume form vanishes")]
    ZeroVolume,
    #[error("bad form json: {0}")]
    Json(String),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

struct Tables {
    by_deg: Vec<Vec<u8>>,
    pos: Vec<usize>,
}

fn tables(dim: usize) -> &'static Tables {
    static T: OnceLock<Vec<Tables>> = OnceLock::new();
    let all = T.get_or_init(|| {
        (0..=N)
            .map(|n| {
                let mut by_deg = vec![Vec::new(); n + 1];
                combos(n, &mut by_deg);
                let mut pos = vec![usize::MAX; 1 << n];
                for list in &by_deg {
                    for (i, &m) in list.iter().enumerate() {
                        pos[m as usize] = i;
                    }
                }
                Tables { by_deg, pos }
            })
            .collect()
    });
    &all[dim]
}

fn combos(n: usize, out: &mut [Vec<u8>]) {
    fn rec(n: usize, start: usize, mask: u8, k: usize, out: &mut [Vec<u8>]) {
        out[k].push(mask);
        for i in start..n {
            rec(n, i + 1, mask | (1 << i), k + 1, out);
        }
    }
    rec(n, 0, 0, 0, out);
    // `rec` emits in lexicographic order of the increasing tuples.
}

/// Masks of the given degree in lexicographic order.
pub fn basis_masks(dim: usize, deg: usize) -> &'static [u8] {
    &tables(dim).by_deg[deg]
}

pub fn mask_indices(mask: u8) -> Vec<usize> {
    (0..8).filter(|i| mask & (1 << i) != 0).collect()
}

pub fn indices_mask(idx: &[usize]) -> Option<u8> {
    let mut m = 0u8;
    for &i in idx {
        if m & (1 << i) != 0 {
            return None;
        }
        m |= 1 << i;
    }
    Some(m)
}

/// Sign of the permutation sorting `idx` (distinct entries assumed).
pub fn sort_sign(idx: &[usize]) -> i8 {
    let mut s = 1;
    for i in 0..idx.len() {
        for j in i + 1..idx.len() {
            if idx[i] > idx[j] {
                s = -s;
            }
        }
    }
    s
}

/// Sign of the shuffle bringing `I ++ J` into increasing order.
fn merge_sign(a: u8, b: u8) -> i8 {
    let mut inv = 0u32;
    let mut bb = b;
    while bb != 0 {
        let j = bb.trailing_zeros();
        inv += (a >> (j + 1)).count_ones();
        bb &= bb - 1;
    }
    if inv % 2 == 0 {
        1
    } else {
        -1
    }
}

fn signed<T: Scalar>(s: i8, v: T) -> T {
    if s < 0 {
        -v
    } else {
        v
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct KForm<T> {
    dim: usize,
    deg: usize,
    c: Vec<T>,
}

impl<T: Scalar> KForm<T> {
    pub fn zero(dim: usize, deg: usize) -> Self {
        assert!(deg <= dim && dim <= N);
        KForm { dim, deg, c: vec![T::zero(); basis_masks(dim, deg).len()] }
    }

    pub fn scalar(dim: usize, v: T) -> Self {
        KForm { dim, deg: 0, c: vec![v] }
    }

    /// Sum of `coeff · e^{i_1} ∧ … ∧ e^{i_k}` over the given terms (0-based).
    pub fn from_terms(dim: usize, deg: usize, terms: &[(&[usize], T)]) -> Self {
        let mut f = Self::zero(dim, deg);
        for (idx, v) in terms {
            assert_eq!(idx.len(), deg);
            f.add_at(idx, v.clone());
        }
        f
    }

    pub fn from_components(dim: usize, deg: usize, c: Vec<T>) -> Self {
        assert_eq!(c.len(), basis_masks(dim, deg).len());
        KForm { dim, deg, c }
    }

    /// The 1-form with the given components.
    pub fn one_form(a: &[T]) -> Self {
        KForm { dim: a.len(), deg: 1, c: a.to_vec() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.deg
    }

    pub fn components(&self) -> &[T] {
        &self.c
    }

    pub fn masks(&self) -> &'static [u8] {
        basis_masks(self.dim, self.deg)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u8, &T)> {
        self.masks().iter().copied().zip(self.c.iter())
    }

    pub fn at_mask(&self, mask: u8) -> &T {
        &self.c[tables(self.dim).pos[mask as usize]]
    }

    fn at_mask_mut(&mut self, mask: u8) -> &mut T {
        let p = tables(self.dim).pos[mask as usize];
        &mut self.c[p]
    }

    /// Component at an arbitrary index tuple, with permutation sign.
    pub fn get(&self, idx: &[usize]) -> T {
        debug_assert_eq!(idx.len(), self.deg);
        match indices_mask(idx) {
            None => T::zero(),
            Some(m) => signed(sort_sign(idx), self.at_mask(m).clone()),
        }
    }

    /// Adds `v` to the component at `idx` (sign-aware); repeated indices are ignored.
    pub fn add_at(&mut self, idx: &[usize], v: T) {
        if let Some(m) = indices_mask(idx) {
            let s = sort_sign(idx);
            let slot = self.at_mask_mut(m);
            *slot = slot.clone() + signed(s, v);
        }
    }

    /// Overwrites the component at `idx` so that `get(idx) == v`.
    pub fn set(&mut self, idx: &[usize], v: T) {
        if let Some(m) = indices_mask(idx) {
            let s = sort_sign(idx);
            *self.at_mask_mut(m) = signed(s, v);
        }
    }

    pub fn map(&self, f: impl FnMut(&T) -> T) -> Self {
        KForm { dim: self.dim, deg: self.deg, c: self.c.iter().map(f).collect() }
    }

    pub fn scale(&self, s: &T) -> Self {
        self.map(|x| x.clone() * s.clone())
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!((self.dim, self.deg), (o.dim, o.deg));
        KForm { dim: self.dim, deg: self.deg, c: self.c.iter().zip(&o.c).map(|(a, b)| a.clone() + b.clone()).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        assert_eq!((self.dim, self.deg), (o.dim, o.deg));
        KForm { dim: self.dim, deg: self.deg, c: self.c.iter().zip(&o.c).map(|(a, b)| a.clone() - b.clone()).collect() }
    }

    pub fn neg(&self) -> Self {
        self.map(|x| -x.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }

    pub fn near_zero(&self, tol: f64) -> bool {
        self.c.iter().all(|x| x.near_zero(tol))
    }

    pub fn max_abs(&self) -> f64 {
        self.c.iter().map(|x| x.magnitude()).fold(0.0, f64::max)
    }

    /// Expands into the dense antisymmetric tensor of rank `deg`.
    pub fn to_tensor(&self) -> Tensor<T> {
        let mut t = Tensor::zero(self.dim, self.deg);
        for (m, v) in self.iter() {
            if v.is_zero() {
                continue;
            }
            let idx = mask_indices(m);
            for_each_perm(&idx, &mut |p, s| t.set(p, signed(s, v.clone())));
        }
        t
    }

    pub fn to_json(&self) -> Value
    where
        T: ScalarText,
    {
        Value::Array(
            self.iter()
                .filter(|(_, v)| !v.is_zero())
                .map(|(m, v)| {
                    let idx: Vec<usize> = mask_indices(m).into_iter().map(|i| i + 1).collect();
                    json!({"indices": idx, "coeff": v.to_text()})
                })
                .collect(),
        )
    }

    pub fn from_json(dim: usize, deg: usize, v: &Value) -> Result<Self, FormError>
    where
        T: ScalarText,
    {
        let arr = v.as_array().ok_or_else(|| FormError::Json("expected an array of terms".into()))?;
        let mut f = Self::zero(dim, deg);
        for (n, term) in arr.iter().enumerate() {
            let idx = term
                .get("indices")
                .and_then(|x| x.as_array())
                .ok_or_else(|| FormError::Json(format!("term {n}: missing field `indices`")))?;
            let idx: Vec<usize> = idx
                .iter()
                .map(|x| x.as_u64().map(|i| i as usize))
                .collect::<Option<_>>()
                .ok_or_else(|| FormError::Json(format!("term {n}: `indices` must hold integers")))?;
            if idx.len() != deg || idx.iter().any(|&i| i == 0 || i > dim) || idx.windows(2).any(|w| w[0] >= w[1]) {
                return Err(FormError::Json(format!("term {n}: `indices` must be {deg} increasing values in 1..={dim}")));
            }
            let coeff = match term.get("coeff") {
                Some(Value::String(s)) => T::from_text(s)?,
                Some(Value::Number(x)) => T::from_text(&x.to_string())?,
                _ => return Err(FormError::Json(format!("term {n}: missing field `coeff`"))),
            };
            let zero_based: Vec<usize> = idx.iter().map(|i| i - 1).collect();
            f.add_at(&zero_based, coeff);
        }
        Ok(f)
    }
}

fn for_each_perm(idx: &[usize], f: &mut impl FnMut(&[usize], i8)) {
    fn rec(cur: &mut Vec<usize>, rest: &mut Vec<usize>, sign: i8, f: &mut impl FnMut(&[usize], i8)) {
        if rest.is_empty() {
            f(cur, sign);
            return;
        }
        for i in 0..rest.len() {
            let x = rest.remove(i);
            cur.push(x);
            // Picking the i-th remaining element costs i transpositions.
            rec(cur, rest, if i % 2 == 0 { sign } else { -sign }, f);
            cur.pop();
            rest.insert(i, x);
        }
    }
    rec(&mut Vec::new(), &mut idx.to_vec(), 1, f);
}

pub fn wedge<T: Scalar>(a: &KForm<T>, b: &KForm<T>) -> Result<KForm<T>, FormError> {
    if a.dim != b.dim {
        return Err(FormError::DimensionMismatch(a.dim, b.dim));
    }
    let deg = a.deg + b.deg;
    if deg > a.dim {
        return Err(FormError::DegreeOverflow(deg, a.dim));
    }
    let mut out: KForm<T> = KForm::zero(a.dim, deg);
    for (ma, va) in a.iter() {
        if va.is_zero() {
            continue;
        }
        for (mb, vb) in b.iter() {
            if ma & mb != 0 || vb.is_zero() {
                continue;
            }
            let slot = out.at_mask_mut(ma | mb);
            *slot = slot.clone() + signed(merge_sign(ma, mb), va.clone() * vb.clone());
        }
    }
    Ok(out)
}

/// Wedge of several forms, left to right.
pub fn wedge_all<T: Scalar>(fs: &[&KForm<T>]) -> Result<KForm<T>, FormError> {
    let mut acc = fs[0].clone();
    for f in &fs[1..] {
        acc = wedge(&acc, f)?;
    }
    Ok(acc)
}

/// Interior product into the first slot: `(v⌟a)_J = v^i a_{iJ}`.
pub fn hook<T: Scalar>(v: &[T], a: &KForm<T>) -> KForm<T> {
    assert!(a.deg >= 1);
    assert_eq!(v.len(), a.dim);
    let mut out: KForm<T> = KForm::zero(a.dim, a.deg - 1);
    for (m, x) in a.iter() {
        if x.is_zero() {
            continue;
        }
        for i in mask_indices(m) {
            if v[i].is_zero() {
                continue;
            }
            let rest = m & !(1 << i);
            let s = (m & ((1u8 << i) - 1)).count_ones();
            let term = v[i].clone() * x.clone();
            let slot = out.at_mask_mut(rest);
            *slot = slot.clone() + if s % 2 == 0 { term } else { -term };
        }
    }
    out
}

/// `(M^* a)_I = Σ_J det(M[J, I]) a_J`, i.e. `a(M·, …, M·)`.
pub fn pullback<T: Scalar>(a: &KForm<T>, m: &Matrix<T>) -> KForm<T> {
    let masks = a.masks();
    let idx: Vec<Vec<usize>> = masks.iter().map(|&mm| mask_indices(mm)).collect();
    let k = a.deg;
    let mut out = KForm::zero(a.dim, k);
    for (oi, i_idx) in idx.iter().enumerate() {
        let mut acc = T::zero();
        for (ji, j_idx) in idx.iter().enumerate() {
            let aj = &a.c[ji];
            if aj.is_zero() {
                continue;
            }
            let sub = Matrix::from_fn(k, k, |r, c| m.get(j_idx[r], i_idx[c]).clone());
            let d = linalg::det(&sub);
            if d.is_zero() {
                continue;
            }
            acc = acc + d * aj.clone();
        }
        out.c[oi] = acc;
    }
    out
}

/// A metric together with its inverse.
#[derive(Clone, Debug, PartialEq)]
pub struct Metric<T> {
    pub h: Matrix<T>,
    pub hinv: Matrix<T>,
}

impl<T: Scalar> Metric<T> {
    pub fn new(h: Matrix<T>) -> Result<Self, FormError> {
        let hinv = linalg::inverse(&h).ok_or(FormError::SingularMetric)?;
        Ok(Metric { h, hinv })
    }

    pub fn dim(&self) -> usize {
        self.h.rows
    }

    pub fn lower(&self, v: &[T]) -> Vec<T> {
        self.h.apply(v)
    }

    pub fn raise(&self, w: &[T]) -> Vec<T> {
        self.hinv.apply(w)
    }

    pub fn inner(&self, x: &[T], y: &[T]) -> T {
        let hy = self.h.apply(y);
        dot(x, &hy)
    }

    pub fn flat(&self, v: &[T]) -> KForm<T> {
        KForm::one_form(&self.lower(v))
    }

    /// All indices raised, stored in form layout.
    pub fn raise_form(&self, a: &KForm<T>) -> KForm<T> {
        pullback(a, &self.hinv)
    }

    pub fn inner_form(&self, a: &KForm<T>, b: &KForm<T>) -> T {
        let up = self.raise_form(a);
        let mut acc = T::zero();
        for (x, y) in up.c.iter().zip(&b.c) {
            acc = acc + x.clone() * y.clone();
        }
        acc
    }

    pub fn hodge(&self, vol: &KForm<T>, a: &KForm<T>) -> Result<KForm<T>, FormError> {
        hodge_star(self, vol, a)
    }
}

pub fn dot<T: Scalar>(x: &[T], y: &[T]) -> T {
    let mut acc = T::zero();
    for (a, b) in x.iter().zip(y) {
        if a.is_zero() || b.is_zero() {
            continue;
        }
        acc = acc + a.clone() * b.clone();
    }
    acc
}

/// `(∗a)_J = a^I vol_{IJ}`.
pub fn hodge_star<T: Scalar>(h: &Metric<T>, vol: &KForm<T>, a: &KForm<T>) -> Result<KForm<T>, FormError> {
    let n = a.dim;
    if vol.deg != n || h.dim() != n {
        return Err(FormError::DimensionMismatch(vol.deg, n));
    }
    let top = vol.c[0].clone();
    if top.is_zero() {
        return Err(FormError::ZeroVolume);
    }
    let up = h.raise_form(a);
    let full: u8 = ((1u16 << n) - 1) as u8;
    let mut out = KForm::zero(n, n - a.deg);
    for (mi, v) in up.iter() {
        if v.is_zero() {
            continue;
        }
        let mj = full & !mi;
        *out.at_mask_mut(mj) = signed(merge_sign(mi, mj), v.clone() * top.clone());
    }
    Ok(out)
}

/// Raises or lowers the named slots of a tensor: each slot `s` becomes `Σ_b M_{ab} t_{..b..}`.
pub fn raise_lower<T: Scalar>(m: &Matrix<T>, t: &Tensor<T>, slots: &[usize]) -> Tensor<T> {
    let mut cur = t.clone();
    for &s in slots {
        cur = cur.contract_slot(m, s);
    }
    cur
}

/// Dense tensor with all indices ranging over `0..dim`, last index fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor<T> {
    pub dim: usize,
    pub rank: usize,
    pub d: Vec<T>,
}

impl<T: Scalar> Tensor<T> {
    pub fn zero(dim: usize, rank: usize) -> Self {
        Tensor { dim, rank, d: vec![T::zero(); dim.pow(rank as u32)] }
    }

    pub fn from_fn(dim: usize, rank: usize, mut f: impl FnMut(&[usize]) -> T) -> Self {
        let mut t = Self::zero(dim, rank);
        let mut idx = vec![0; rank];
        for flat in 0..t.d.len() {
            let mut r = flat;
            for s in (0..rank).rev() {
                idx[s] = r % dim;
                r /= dim;
            }
            t.d[flat] = f(&idx);
        }
        t
    }

    pub fn offset(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &i| acc * self.dim + i)
    }

    pub fn get(&self, idx: &[usize]) -> &T {
        &self.d[self.offset(idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: T) {
        let o = self.offset(idx);
        self.d[o] = v;
    }

    pub fn outer(&self, o: &Self) -> Self {
        Tensor::from_fn(self.dim, self.rank + o.rank, |idx| {
            self.get(&idx[..self.rank]).clone() * o.get(&idx[self.rank..]).clone()
        })
    }

    pub fn contract_slot(&self, m: &Matrix<T>, slot: usize) -> Self {
        Tensor::from_fn(self.dim, self.rank, |idx| {
            let mut j = idx.to_vec();
            let mut acc = T::zero();
            for b in 0..self.dim {
                let mab = m.get(idx[slot], b);
                if mab.is_zero() {
                    continue;
                }
                j[slot] = b;
                acc = acc + mab.clone() * self.get(&j).clone();
            }
            acc
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.d.iter().map(|x| x.magnitude()).fold(0.0, f64::max)
    }
}

/// `T_{[a_1..a_k]}` with weight `1/k!`, returned as a form.
pub fn antisymmetrize<T: Scalar>(t: &Tensor<T>) -> KForm<T> {
    let k = t.rank;
    let mut fact = 1i64;
    for i in 2..=k as i64 {
        fact *= i;
    }
    let w = T::from_ratio(1, fact);
    let mut out = KForm::zero(t.dim, k);
    for (slot, &m) in basis_masks(t.dim, k).iter().enumerate() {
        let idx = mask_indices(m);
        let mut acc = T::zero();
        for_each_perm(&idx, &mut |p, s| acc = acc.clone() + signed(s, t.get(p).clone()));
        out.c[slot] = acc * w.clone();
    }
    out
}

/// `e^{0 … n-1}`.
pub fn top_form<T: Scalar>(dim: usize, coeff: T) -> KForm<T> {
    KForm::from_components(dim, dim, vec![coeff])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::ExactScalar as E;

    fn e(idx: &[usize]) -> KForm<E> {
        KForm::from_terms(7, idx.len(), &[(idx, E::from_integer(1))])
    }

    #[test]
    fn wedge_examples() {
        let w = wedge(&e(&[0]), &e(&[1])).unwrap();
        assert_eq!(w, e(&[0, 1]));
        assert!(wedge(&e(&[0]), &e(&[0])).unwrap().is_zero());
        assert_eq!(wedge(&e(&[3]), &e(&[1, 5])).unwrap().get(&[1, 3, 5]), -E::from_integer(1));
        assert!(matches!(wedge(&e(&[0, 1, 2, 3]), &e(&[4, 5, 6, 1])), Err(FormError::DegreeOverflow(8, 7))));
    }

    #[test]
    fn hook_examples() {
        let v: Vec<E> = (0..7).map(|i| E::from_integer((i == 0) as i64)).collect();
        assert_eq!(hook(&v, &e(&[0, 1])), e(&[1]));
        let v2: Vec<E> = (0..7).map(|i| E::from_integer((i == 1) as i64)).collect();
        assert_eq!(hook(&v2, &e(&[0, 1])), e(&[0]).neg());
    }

    #[test]
    fn signed_access() {
        let f = e(&[1, 4, 6]);
        assert_eq!(f.get(&[4, 1, 6]), -E::from_integer(1));
        assert_eq!(f.get(&[6, 1, 4]), E::from_integer(1));
        assert!(f.get(&[1, 1, 6]).is_zero());
    }

    #[test]
    fn antisym_convention() {
        let mut t = Tensor::<E>::zero(7, 2);
        t.set(&[0, 1], E::from_integer(1));
        let a = antisymmetrize(&t);
        assert_eq!(a.get(&[0, 1]), E::from_ratio(1, 2));
        let sym = Tensor::from_fn(7, 2, |i| E::from_integer((i[0] * i[1]) as i64));
        assert!(antisymmetrize(&sym).is_zero());
        let f = e(&[0, 2, 5]);
        assert_eq!(antisymmetrize(&f.to_tensor()), f);
    }

    #[test]
    fn hodge_of_one_is_vol() {
        let h = Metric::new(Matrix::from_fn(7, 7, |i, j| E::from_integer((i == j) as i64 * if i == 3 { -1 } else { 1 })))
            .unwrap();
        let vol = top_form(7, E::from_integer(-1));
        assert_eq!(hodge_star(&h, &vol, &KForm::scalar(7, E::from_integer(1))).unwrap(), vol);
    }

    #[test]
    fn json_round_trip() {
        let f = e(&[1, 4, 6]).add(&e(&[0, 2, 3]).scale(&E::sqrt2()));
        let j = f.to_json();
        assert_eq!(KForm::<E>::from_json(7, 3, &j).unwrap(), f);
        let bad = serde_json::json!([{"indices": [3, 1, 2], "coeff": "1"}]);
        assert!(KForm::<E>::from_json(7, 3, &bad).is_err());
    }
}
