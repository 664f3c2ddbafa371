//! Linear subspaces of S^n, stored as a reduced row echelon basis so that
//! equality is a comparison of canonical forms.

use std::fmt;

use crate::matrix::Matrix;
use crate::scalar::Scalar;

#[derive(Clone)]
pub struct Subspace<S: Scalar> {
    n: usize,
    basis: Matrix<S>,
    pivots: Vec<usize>,
}

impl<S: Scalar> Subspace<S> {
    pub fn from_matrix_rows(n: usize, m: &Matrix<S>) -> Self {
        if m.rows() == 0 {
            return Self::zero(n);
        }
        assert_eq!(m.cols(), n, "vector length mismatch");
        let (basis, pivots) = m.rref();
        Subspace { n, basis, pivots }
    }

    pub fn span(n: usize, vectors: &[Vec<S>]) -> Self {
        if vectors.is_empty() {
            return Self::zero(n);
        }
        Self::from_matrix_rows(n, &Matrix::from_rows(vectors.to_vec()))
    }

    pub fn zero(n: usize) -> Self {
        Subspace {
            n,
            basis: Matrix::zeros(0, n),
            pivots: vec![],
        }
    }

    pub fn full(n: usize) -> Self {
        Subspace {
            n,
            basis: Matrix::identity(n),
            pivots: (0..n).collect(),
        }
    }

    /// Span of the standard basis vectors with the given indices.
    pub fn coordinate(n: usize, idx: &[usize]) -> Self {
        let vs: Vec<Vec<S>> = idx
            .iter()
            .map(|&i| {
                let mut v = vec![S::zero(); n];
                v[i] = S::one();
                v
            })
            .collect();
        Self::span(n, &vs)
    }

    pub fn ambient(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.n
    }

    /// Canonical basis rows.
    pub fn basis(&self) -> &Matrix<S> {
        &self.basis
    }

    pub fn vectors(&self) -> Vec<Vec<S>> {
        self.basis.row_vectors()
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Reduce v against the echelon basis; zero iff v lies in the space.
    pub fn residual(&self, v: &[S]) -> Vec<S> {
        let mut r = v.to_vec();
        for (row, &p) in self.pivots.iter().enumerate() {
            let c = r[p].clone();
            if c.is_zero() && S::EXACT {
                continue;
            }
            for j in 0..self.n {
                r[j] = r[j].clone() - c.clone() * self.basis[(row, j)].clone();
            }
        }
        r
    }

    pub fn contains(&self, v: &[S]) -> bool {
        if S::EXACT {
            self.residual(v).iter().all(|x| x.is_zero())
        } else {
            let scale = v.iter().map(|x| x.magnitude()).fold(0.0, f64::max).max(1.0);
            let tol = crate::scalar::float_tolerance() * scale;
            self.residual(v).iter().all(|x| x.magnitude() <= tol * 10.0)
        }
    }

    pub fn contains_space(&self, o: &Self) -> bool {
        o.vectors().iter().all(|v| self.contains(v))
    }

    pub fn sum(&self, o: &Self) -> Self {
        assert_eq!(self.n, o.n);
        Self::from_matrix_rows(self.n, &self.basis.vstack(&o.basis))
    }

    pub fn intersect(&self, o: &Self) -> Self {
        assert_eq!(self.n, o.n);
        if self.is_zero() || o.is_zero() {
            return Self::zero(self.n);
        }
        if self.is_full() {
            return o.clone();
        }
        if o.is_full() {
            return self.clone();
        }
        // x A = y B  <=>  [A^T | -B^T] (x, y) = 0
        let k = self.dim();
        let m = self.basis.transpose().hstack(&o.basis.transpose().neg());
        let vs: Vec<Vec<S>> = m
            .kernel()
            .into_iter()
            .map(|xy| {
                let mut v = vec![S::zero(); self.n];
                for (i, c) in xy.iter().take(k).enumerate() {
                    for (j, vj) in v.iter_mut().enumerate() {
                        *vj = vj.clone() + c.clone() * self.basis[(i, j)].clone();
                    }
                }
                v
            })
            .collect();
        Self::span(self.n, &vs)
    }

    /// g(self) for an operator g acting on column vectors.
    pub fn image(&self, g: &Matrix<S>) -> Self {
        if self.is_zero() {
            return Self::zero(g.rows());
        }
        Self::from_matrix_rows(g.rows(), &self.basis.mul(&g.transpose()))
    }

    /// {v : g v in self}
    pub fn preimage(&self, g: &Matrix<S>) -> Self {
        let q = self.quotient_map();
        let comp = q.mul(g);
        if comp.rows() == 0 {
            return Self::full(g.cols());
        }
        Self::span(g.cols(), &comp.kernel())
    }

    pub fn conj(&self) -> Self {
        Self::from_matrix_rows(self.n, &self.basis.conj())
    }

    pub fn is_real(&self) -> bool {
        *self == self.conj()
    }

    /// Standard basis vectors complementing this space (the non-pivot coordinates).
    pub fn complement(&self) -> Self {
        let idx: Vec<usize> = (0..self.n).filter(|c| !self.pivots.contains(c)).collect();
        Self::coordinate(self.n, &idx)
    }

    /// A matrix Q with kernel exactly this space: v -> non-pivot coordinates of
    /// the residual of v.
    pub fn quotient_map(&self) -> Matrix<S> {
        let free: Vec<usize> = (0..self.n).filter(|c| !self.pivots.contains(c)).collect();
        // residual(e_j)[f] for f free; residual is linear so build it column by column
        let mut q = Matrix::zeros(free.len(), self.n);
        for j in 0..self.n {
            let mut e = vec![S::zero(); self.n];
            e[j] = S::one();
            let r = self.residual(&e);
            for (row, &f) in free.iter().enumerate() {
                q[(row, j)] = r[f].clone();
            }
        }
        q
    }

    /// Coordinates of v (assumed in the space) in the canonical basis.
    pub fn coordinates(&self, v: &[S]) -> Vec<S> {
        self.pivots.iter().map(|&p| v[p].clone()).collect()
    }

    pub fn same(&self, o: &Self) -> bool {
        self.n == o.n && self.dim() == o.dim() && self.pivots == o.pivots && self.basis.approx_eq(&o.basis)
    }

    pub fn to_float(&self) -> Subspace<crate::scalar::Float> {
        Subspace::from_matrix_rows(self.n, &self.basis.to_float())
    }
}

impl<S: Scalar> PartialEq for Subspace<S> {
    fn eq(&self, o: &Self) -> bool {
        if S::EXACT {
            self.same(o)
        } else {
            self.n == o.n
                && self.dim() == o.dim()
                && self.contains_space(o)
                && o.contains_space(self)
        }
    }
}

impl<S: Scalar> fmt::Debug for Subspace<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subspace(dim {} in {}: ", self.dim(), self.n)?;
        for v in self.vectors() {
            let c: Vec<String> = v.iter().map(|x| format!("{}", x.to_complex())).collect();
            write!(f, "[{}] ", c.join(" "))?;
        }
        write!(f, ")")
    }
}
