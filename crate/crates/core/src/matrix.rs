//! Dense matrices over a [`Scalar`] field.

use std::fmt;
use std::ops::{Index, IndexMut};

use log::trace;

use crate::scalar::{Exact, Float, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
#[error("operator is not nilpotent")]
pub struct NotNilpotent;

#[derive(Clone, PartialEq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = S::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Panics on ragged input.
    pub fn from_rows(rows: Vec<Vec<S>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| S::from_i64(x)).collect())
                .collect(),
        )
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<S>], n: usize) -> Self {
        Self::from_fn(n, cols.len(), |i, j| cols[j][i].clone())
    }

    pub fn diagonal(d: &[S]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, x) in d.iter().enumerate() {
            m[(i, i)] = x.clone();
        }
        m
    }

    /// Elementary matrix E_{ij}: sends basis vector j to basis vector i.
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(n, n);
        m[(i, j)] = S::one();
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> Vec<S> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn column(&self, j: usize) -> Vec<S> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn row_vectors(&self) -> Vec<Vec<S>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn entries(&self) -> &[S] {
        &self.data
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Matrix<T> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn conj(&self) -> Self {
        self.map(|x| x.conj())
    }

    pub fn scale(&self, c: &S) -> Self {
        self.map(|x| x.clone() * c.clone())
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols), "shape mismatch");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&o.data)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols), "shape mismatch");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&o.data)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        }
    }

    pub fn neg(&self) -> Self {
        self.map(|x| -x.clone())
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.rows, "shape mismatch in product");
        let mut out = Self::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() && S::EXACT {
                    continue;
                }
                for j in 0..o.cols {
                    let b = &o[(k, j)];
                    if S::EXACT && b.is_zero() {
                        continue;
                    }
                    let v = out[(i, j)].clone() + a.clone() * b.clone();
                    out[(i, j)] = v;
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[S]) -> Vec<S> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = S::zero();
                for (j, x) in v.iter().enumerate() {
                    acc = acc + self[(i, j)].clone() * x.clone();
                }
                acc
            })
            .collect()
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::identity(self.rows);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// [A, B] = AB - BA
    pub fn commutator(&self, o: &Self) -> Self {
        self.mul(o).sub(&o.mul(self))
    }

    pub fn trace(&self) -> S {
        (0..self.rows.min(self.cols)).fold(S::zero(), |acc, i| acc + self[(i, i)].clone())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn approx_eq(&self, o: &Self) -> bool {
        self.rows == o.rows
            && self.cols == o.cols
            && self.data.iter().zip(&o.data).all(|(a, b)| a.approx_eq(b))
    }

    pub fn is_real(&self) -> bool {
        self.data.iter().all(|x| x.is_real())
    }

    pub fn real_part(&self) -> Self {
        self.map(|x| x.real_part())
    }

    pub fn imag_part(&self) -> Self {
        self.map(|x| x.imag_part())
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.magnitude()).fold(0.0, f64::max)
    }

    pub fn to_float(&self) -> Matrix<Float> {
        self.map(|x| x.to_complex())
    }

    /// Row-major flattening, used to treat End(V) as a vector space.
    pub fn flatten(&self) -> Vec<S> {
        self.data.clone()
    }

    pub fn unflatten(v: &[S], rows: usize, cols: usize) -> Self {
        assert_eq!(v.len(), rows * cols);
        Matrix {
            rows,
            cols,
            data: v.to_vec(),
        }
    }

    pub fn vstack(&self, o: &Self) -> Self {
        if self.rows == 0 {
            return o.clone();
        }
        if o.rows == 0 {
            return self.clone();
        }
        assert_eq!(self.cols, o.cols);
        let mut data = self.data.clone();
        data.extend(o.data.iter().cloned());
        Matrix {
            rows: self.rows + o.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn hstack(&self, o: &Self) -> Self {
        assert_eq!(self.rows, o.rows);
        Self::from_fn(self.rows, self.cols + o.cols, |i, j| {
            if j < self.cols {
                self[(i, j)].clone()
            } else {
                o[(i, j - self.cols)].clone()
            }
        })
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Reduced row echelon form; returns the nonzero rows and the pivot columns.
    ///
    /// Exact mode picks the first nonzero pivot. Float mode normalizes each row
    /// to unit max-modulus, uses partial pivoting, and treats pivots below the
    /// global tolerance as zero.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        if !S::EXACT {
            // rows that are pure noise relative to the whole matrix are dropped, not rescaled
            let scale = m.max_abs().max(1.0);
            let floor = crate::scalar::float_tolerance() * scale;
            for i in 0..m.rows {
                let mx = (0..m.cols).map(|j| m[(i, j)].magnitude()).fold(0.0, f64::max);
                if mx > 0.0 && mx <= floor {
                    for j in 0..m.cols {
                        m[(i, j)] = S::zero();
                    }
                } else if mx > 0.0 {
                    let inv = S::from_f64(1.0 / mx);
                    for j in 0..m.cols {
                        m[(i, j)] = m[(i, j)].clone() * inv.clone();
                    }
                }
            }
        }
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let pick = if S::EXACT {
                (r..m.rows).find(|&i| !m[(i, c)].is_zero())
            } else {
                let (best, mag) = (r..m.rows)
                    .map(|i| (i, m[(i, c)].magnitude()))
                    .fold((r, -1.0), |a, b| if b.1 > a.1 { b } else { a });
                if mag > crate::scalar::float_tolerance() {
                    Some(best)
                } else {
                    if mag > 0.0 {
                        trace!("rank decision: column {c} pivot {mag:e} treated as zero");
                    }
                    None
                }
            };
            let Some(p) = pick else { continue };
            m.swap_rows(r, p);
            let inv = S::one() / m[(r, c)].clone();
            for j in 0..m.cols {
                m[(r, j)] = m[(r, j)].clone() * inv.clone();
            }
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let f = m[(i, c)].clone();
                if S::EXACT && f.is_zero() {
                    continue;
                }
                for j in 0..m.cols {
                    let v = m[(i, j)].clone() - f.clone() * m[(r, j)].clone();
                    m[(i, j)] = v;
                }
                if !S::EXACT {
                    m[(i, c)] = S::zero();
                }
            }
            pivots.push(c);
            r += 1;
        }
        m.data.truncate(r * m.cols);
        m.rows = r;
        if !S::EXACT {
            // flush entries that are numerically zero so equal spaces compare equal
            for x in m.data.iter_mut() {
                if x.magnitude() <= crate::scalar::float_tolerance() * 1e-3 {
                    *x = S::zero();
                }
            }
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of {x : A x = 0}.
    pub fn kernel(&self) -> Vec<Vec<S>> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![S::zero(); self.cols];
                v[f] = S::one();
                for (row, &p) in pivots.iter().enumerate() {
                    v[p] = -r[(row, f)].clone();
                }
                v
            })
            .collect()
    }

    /// Some solution of A x = b, or None when inconsistent.
    pub fn solve(&self, b: &[S]) -> Option<Vec<S>> {
        assert_eq!(b.len(), self.rows);
        let bm = Matrix::from_columns(&[b.to_vec()], self.rows);
        let aug = self.hstack(&bm);
        let (r, pivots) = aug.rref();
        if pivots.contains(&self.cols) {
            return None;
        }
        let mut x = vec![S::zero(); self.cols];
        for (row, &p) in pivots.iter().enumerate() {
            x[p] = r[(row, self.cols)].clone();
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<Self> {
        assert!(self.is_square());
        let n = self.rows;
        let aug = self.hstack(&Self::identity(n));
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        Some(Self::from_fn(n, n, |i, j| r[(i, n + j)].clone()))
    }

    /// Whether self^k = 0 for k = dimension.
    pub fn is_nilpotent(&self) -> bool {
        self.pow(self.rows as u32).is_zero()
    }

    /// exp of a nilpotent matrix as a finite sum. The series is truncated at
    /// degree n, which is exact for nilpotent input.
    pub fn exp_nilpotent(&self) -> Self {
        let n = self.rows;
        let mut out = Self::identity(n);
        let mut term = Self::identity(n);
        for k in 1..=n {
            term = term.mul(self).scale(&(S::one() / S::from_i64(k as i64)));
            out = out.add(&term);
        }
        out
    }

    /// Checked variant of `exp_nilpotent`.
    pub fn nilpotent_exp(&self) -> Result<Self, NotNilpotent> {
        if !self.is_square() || !self.is_nilpotent() {
            return Err(NotNilpotent);
        }
        Ok(self.exp_nilpotent())
    }

    /// log of a unipotent matrix, again a finite sum.
    pub fn log_unipotent(&self) -> Self {
        let n = self.rows;
        let u = self.sub(&Self::identity(n));
        let mut out = Self::zeros(n, n);
        let mut term = Self::identity(n);
        for k in 1..=n {
            term = term.mul(&u);
            let c = S::from_ratio(if k % 2 == 1 { 1 } else { -1 }, k as i64);
            out = out.add(&term.scale(&c));
        }
        out
    }

    /// g X g^{-1}
    pub fn conjugate_by(&self, g: &Self, g_inv: &Self) -> Self {
        g.mul(self).mul(g_inv)
    }
}

impl Matrix<Exact> {
    pub fn from_float_exactly(m: &Matrix<Float>) -> Option<Self> {
        let data: Option<Vec<Exact>> = m
            .data
            .iter()
            .map(|z| crate::scalar::exact_from_complex(*z))
            .collect();
        Some(Matrix {
            rows: m.rows,
            cols: m.cols,
            data: data?,
        })
    }
}

impl<S> Index<(usize, usize)> for Matrix<S> {
    type Output = S;
    fn index(&self, (i, j): (usize, usize)) -> &S {
        &self.data[i * self.cols + j]
    }
}

impl<S> IndexMut<(usize, usize)> for Matrix<S> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        &mut self.data[i * self.cols + j]
    }
}

impl<S: Scalar> fmt::Debug for Matrix<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[")?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.text()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Entry-wise max |a - b| over two float matrices.
pub fn max_abs_diff(a: &Matrix<Float>, b: &Matrix<Float>) -> f64 {
    a.entries()
        .iter()
        .zip(b.entries())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    type M = Matrix<Exact>;

    #[test]
    fn inverse_and_kernel() {
        let a = M::from_i64(&[&[2, 1], &[1, 1]]);
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv), M::identity(2));
        let s = M::from_i64(&[&[1, 2, 3], &[2, 4, 6]]);
        let k = s.kernel();
        assert_eq!(k.len(), 2);
        for v in k {
            assert!(s.apply(&v).iter().all(|x| x.is_zero()));
        }
        assert!(M::from_i64(&[&[1, 2], &[2, 4]]).inverse().is_none());
    }

    #[test]
    fn exp_log_roundtrip() {
        let n = M::from_i64(&[&[0, 1, 3], &[0, 0, 2], &[0, 0, 0]]);
        let e = n.exp_nilpotent();
        assert_eq!(e.log_unipotent(), n);
        assert_eq!(e[(0, 2)], Exact::from_i64(4));
    }

    #[test]
    fn float_rank_threshold() {
        let a = Matrix::<Float>::from_i64(&[&[1, 1], &[1, 1]]);
        let mut b = a.clone();
        b[(1, 1)] += Float::new(1e-13, 0.0);
        assert_eq!(b.rank(), 1);
        b[(1, 1)] += Float::new(1e-4, 0.0);
        assert_eq!(b.rank(), 2);
    }
}
