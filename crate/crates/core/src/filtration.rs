//! Increasing and decreasing filtrations, gradings and ad-eigencomponents.

use std::collections::BTreeMap;

use crate::matrix::Matrix;
use crate::scalar::Scalar;
use crate::subspace::Subspace;

/// Increasing filtration W_k. W_k = 0 for k < lo, W_k = steps[k - lo] inside the
/// stored window, W_k = V above it.
#[derive(Clone, Debug)]
pub struct Increasing<S: Scalar> {
    n: usize,
    lo: i32,
    steps: Vec<Subspace<S>>,
}

/// Decreasing filtration F^p. F^p = V for p < lo, steps[p - lo] inside the
/// window, F^p = 0 above it.
#[derive(Clone, Debug)]
pub struct Decreasing<S: Scalar> {
    n: usize,
    lo: i32,
    steps: Vec<Subspace<S>>,
}

impl<S: Scalar> PartialEq for Increasing<S> {
    fn eq(&self, o: &Self) -> bool {
        self.n == o.n && self.lo == o.lo && self.steps == o.steps
    }
}

impl<S: Scalar> PartialEq for Decreasing<S> {
    fn eq(&self, o: &Self) -> bool {
        self.n == o.n && self.lo == o.lo && self.steps == o.steps
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FiltrationError {
    #[error("filtration is not nested at index {0}")]
    NotNested(i32),
    #[error("generators do not span the ambient space")]
    NotExhaustive,
}

impl<S: Scalar> Increasing<S> {
    /// W_k = span of all generators with weight <= k.
    pub fn from_generators(n: usize, gens: &[(i32, Vec<Vec<S>>)]) -> Result<Self, FiltrationError> {
        let mut ks: Vec<i32> = gens.iter().map(|g| g.0).collect();
        ks.sort();
        ks.dedup();
        let Some(&lo) = ks.first() else {
            return if n == 0 {
                Ok(Increasing { n, lo: 0, steps: vec![] })
            } else {
                Err(FiltrationError::NotExhaustive)
            };
        };
        let hi = *ks.last().unwrap();
        let steps: Vec<Subspace<S>> = (lo..=hi)
            .map(|k| {
                let vs: Vec<Vec<S>> = gens
                    .iter()
                    .filter(|g| g.0 <= k)
                    .flat_map(|g| g.1.iter().cloned())
                    .collect();
                Subspace::span(n, &vs)
            })
            .collect();
        if !steps.last().unwrap().is_full() {
            return Err(FiltrationError::NotExhaustive);
        }
        Ok(Self::from_steps(n, lo, steps))
    }

    /// Build from explicit W_lo, W_{lo+1}, ...; the last step must be V.
    pub fn from_steps(n: usize, lo: i32, steps: Vec<Subspace<S>>) -> Self {
        let mut f = Increasing { n, lo, steps };
        f.trim();
        f
    }

    pub fn check_nested(&self) -> Result<(), FiltrationError> {
        for (i, w) in self.steps.windows(2).enumerate() {
            if !w[1].contains_space(&w[0]) {
                return Err(FiltrationError::NotNested(self.lo + i as i32 + 1));
            }
        }
        Ok(())
    }

    fn trim(&mut self) {
        while self.steps.first().is_some_and(|s| s.is_zero()) {
            self.steps.remove(0);
            self.lo += 1;
        }
        while self.steps.len() >= 2 && self.steps[self.steps.len() - 2].is_full() {
            self.steps.pop();
        }
    }

    pub fn trivial(n: usize, k: i32) -> Self {
        Increasing {
            n,
            lo: k,
            steps: vec![Subspace::full(n)],
        }
    }

    pub fn ambient(&self) -> usize {
        self.n
    }

    pub fn get(&self, k: i32) -> Subspace<S> {
        if k < self.lo {
            Subspace::zero(self.n)
        } else if ((k - self.lo) as usize) < self.steps.len() {
            self.steps[(k - self.lo) as usize].clone()
        } else {
            Subspace::full(self.n)
        }
    }

    /// Lowest index with W_k nonzero.
    pub fn lowest(&self) -> i32 {
        self.lo
    }

    /// Highest index with Gr_k nonzero.
    pub fn highest(&self) -> i32 {
        self.lo + self.steps.len() as i32 - 1
    }

    pub fn gr_dim(&self, k: i32) -> usize {
        self.get(k).dim() - self.get(k - 1).dim()
    }

    /// Indices k with Gr_k != 0.
    pub fn weights(&self) -> Vec<i32> {
        (self.lowest()..=self.highest()).filter(|&k| self.gr_dim(k) > 0).collect()
    }

    pub fn act(&self, g: &Matrix<S>) -> Self {
        Increasing {
            n: self.n,
            lo: self.lo,
            steps: self.steps.iter().map(|s| s.image(g)).collect(),
        }
    }

    pub fn conj(&self) -> Self {
        Increasing {
            n: self.n,
            lo: self.lo,
            steps: self.steps.iter().map(|s| s.conj()).collect(),
        }
    }

    pub fn is_real(&self) -> bool {
        self.steps.iter().all(|s| s.is_real())
    }

    /// W[m]_k = W_{k+m}
    pub fn shift(&self, m: i32) -> Self {
        Increasing {
            n: self.n,
            lo: self.lo - m,
            steps: self.steps.clone(),
        }
    }

    /// Induced filtration on a subspace U (still in ambient coordinates):
    /// W_k ∩ U. The top step is U itself, so this is a filtration of U.
    pub fn restrict(&self, u: &Subspace<S>) -> Vec<(i32, Subspace<S>)> {
        (self.lowest()..=self.highest())
            .map(|k| (k, self.get(k).intersect(u)))
            .collect()
    }

    /// Whether the operator X maps W_k into W_{k+d} for all k.
    pub fn maps_into(&self, x: &Matrix<S>, d: i32) -> bool {
        (self.lowest() - 1..=self.highest()).all(|k| self.get(k + d).contains_space(&self.get(k).image(x)))
    }

    /// Whether Y is a grading of this filtration: semisimple with integer
    /// eigenvalues and W_k = E_k(Y) + W_{k-1}.
    pub fn is_graded_by(&self, y: &Matrix<S>) -> bool {
        let Some(eig) = eigenspaces(y) else { return false };
        for k in self.lowest()..=self.highest() {
            let e = eig.get(&(k as i64)).cloned().unwrap_or_else(|| Subspace::zero(self.n));
            let w = self.get(k);
            let wm = self.get(k - 1);
            if !w.contains_space(&e) || e.dim() != w.dim() - wm.dim() || e.intersect(&wm).dim() != 0 {
                return false;
            }
        }
        eig.keys().all(|&k| k >= self.lowest() as i64 && k <= self.highest() as i64)
    }

    /// Whether g preserves every W_k.
    pub fn preserved_by(&self, g: &Matrix<S>) -> bool {
        self.maps_into(g, 0)
    }

    pub fn steps(&self) -> impl Iterator<Item = (i32, &Subspace<S>)> {
        self.steps.iter().enumerate().map(move |(i, s)| (self.lo + i as i32, s))
    }

    pub fn to_float(&self) -> Increasing<crate::scalar::Float> {
        Increasing {
            n: self.n,
            lo: self.lo,
            steps: self.steps.iter().map(|s| s.to_float()).collect(),
        }
    }
}

impl<S: Scalar> Decreasing<S> {
    /// F^p = span of all generators with index >= p.
    pub fn from_generators(n: usize, gens: &[(i32, Vec<Vec<S>>)]) -> Result<Self, FiltrationError> {
        let mut ps: Vec<i32> = gens.iter().map(|g| g.0).collect();
        ps.sort();
        ps.dedup();
        let Some(&lo) = ps.first() else {
            return if n == 0 {
                Ok(Decreasing { n, lo: 0, steps: vec![] })
            } else {
                Err(FiltrationError::NotExhaustive)
            };
        };
        let hi = *ps.last().unwrap();
        let steps: Vec<Subspace<S>> = (lo..=hi)
            .map(|p| {
                let vs: Vec<Vec<S>> = gens
                    .iter()
                    .filter(|g| g.0 >= p)
                    .flat_map(|g| g.1.iter().cloned())
                    .collect();
                Subspace::span(n, &vs)
            })
            .collect();
        if !steps[0].is_full() {
            return Err(FiltrationError::NotExhaustive);
        }
        Ok(Self::from_steps(n, lo, steps))
    }

    pub fn from_steps(n: usize, lo: i32, steps: Vec<Subspace<S>>) -> Self {
        let mut f = Decreasing { n, lo, steps };
        f.trim();
        f
    }

    fn trim(&mut self) {
        while self.steps.len() >= 2 && self.steps[1].is_full() {
            self.steps.remove(0);
            self.lo += 1;
        }
        while self.steps.last().is_some_and(|s| s.is_zero()) {
            self.steps.pop();
        }
    }

    pub fn check_nested(&self) -> Result<(), FiltrationError> {
        for (i, w) in self.steps.windows(2).enumerate() {
            if !w[0].contains_space(&w[1]) {
                return Err(FiltrationError::NotNested(self.lo + i as i32 + 1));
            }
        }
        Ok(())
    }

    pub fn ambient(&self) -> usize {
        self.n
    }

    pub fn get(&self, p: i32) -> Subspace<S> {
        if p < self.lo {
            Subspace::full(self.n)
        } else if ((p - self.lo) as usize) < self.steps.len() {
            self.steps[(p - self.lo) as usize].clone()
        } else {
            Subspace::zero(self.n)
        }
    }

    /// Largest p with F^p = V.
    pub fn lowest(&self) -> i32 {
        self.lo
    }

    /// Largest p with F^p != 0.
    pub fn highest(&self) -> i32 {
        self.lo + self.steps.len() as i32 - 1
    }

    pub fn act(&self, g: &Matrix<S>) -> Self {
        Decreasing {
            n: self.n,
            lo: self.lo,
            steps: self.steps.iter().map(|s| s.image(g)).collect(),
        }
    }

    pub fn conj(&self) -> Self {
        Decreasing {
            n: self.n,
            lo: self.lo,
            steps: self.steps.iter().map(|s| s.conj()).collect(),
        }
    }

    /// Whether X F^p ⊆ F^{p+d} for all p.
    pub fn maps_into(&self, x: &Matrix<S>, d: i32) -> bool {
        (self.lowest()..=self.highest() + 1).all(|p| self.get(p + d).contains_space(&self.get(p).image(x)))
    }

    pub fn steps(&self) -> impl Iterator<Item = (i32, &Subspace<S>)> {
        self.steps.iter().enumerate().map(move |(i, s)| (self.lo + i as i32, s))
    }

    pub fn to_float(&self) -> Decreasing<crate::scalar::Float> {
        Decreasing {
            n: self.n,
            lo: self.lo,
            steps: self.steps.iter().map(|s| s.to_float()).collect(),
        }
    }
}

/// Eigenspaces of a matrix assumed semisimple with integer eigenvalues.
/// None if the eigenspaces do not fill the space.
pub fn eigenspaces<S: Scalar>(y: &Matrix<S>) -> Option<BTreeMap<i64, Subspace<S>>> {
    let n = y.rows();
    let mut candidates = candidate_eigenvalues(y);
    let bound = (y.max_abs() * n as f64).ceil() as i64 + 1;
    if candidates.is_empty() {
        candidates = (-bound..=bound).collect();
    }
    let mut out = BTreeMap::new();
    let mut total = 0;
    for k in candidates {
        let m = y.sub(&Matrix::identity(n).scale(&S::from_i64(k)));
        let ker = m.kernel();
        if !ker.is_empty() {
            total += ker.len();
            out.insert(k, Subspace::span(n, &ker));
        }
        if total == n {
            break;
        }
    }
    (total == n).then_some(out)
}

/// Integer eigenvalue candidates from a float Schur form; each one is still
/// confirmed by a kernel computation in the caller's scalar type.
fn candidate_eigenvalues<S: Scalar>(y: &Matrix<S>) -> Vec<i64> {
    let n = y.rows();
    if n == 0 {
        return Vec::new();
    }
    let m = nalgebra::DMatrix::from_fn(n, n, |i, j| y[(i, j)].to_complex());
    if m.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Vec::new();
    }
    let Some(ev) = m.try_schur(1e-14, 10_000).and_then(|s| s.eigenvalues()) else {
        return Vec::new();
    };
    let mut ks: Vec<i64> = ev.iter().map(|v| v.re.round() as i64).collect();
    ks.sort_unstable();
    ks.dedup();
    ks
}

/// Operator acting as `value` on each given subspace. The subspaces must form
/// a direct sum decomposition of the ambient space.
pub fn grading_from_pieces<S: Scalar>(n: usize, pieces: &[(S, &Subspace<S>)]) -> Option<Matrix<S>> {
    let mut cols = Vec::new();
    let mut diag = Vec::new();
    for (val, sp) in pieces {
        for v in sp.vectors() {
            cols.push(v);
            diag.push(val.clone());
        }
    }
    if cols.len() != n {
        return None;
    }
    let b = Matrix::from_columns(&cols, n);
    let inv = b.inverse()?;
    Some(b.mul(&Matrix::diagonal(&diag)).mul(&inv))
}

/// Decomposition of V into joint eigenspaces of commuting gradings.
#[derive(Clone, Debug)]
pub struct JointEigen<S: Scalar> {
    /// joint eigenvalue vector -> column range in `basis`
    pub blocks: Vec<(Vec<i64>, std::ops::Range<usize>)>,
    pub basis: Matrix<S>,
    pub basis_inv: Matrix<S>,
}

impl<S: Scalar> JointEigen<S> {
    pub fn new(ys: &[Matrix<S>], n: usize) -> Option<Self> {
        let mut parts: Vec<(Vec<i64>, Subspace<S>)> = vec![(vec![], Subspace::full(n))];
        for y in ys {
            let eig = eigenspaces(y)?;
            let mut next = Vec::new();
            for (lab, sp) in &parts {
                for (k, e) in &eig {
                    let i = sp.intersect(e);
                    if !i.is_zero() {
                        let mut l = lab.clone();
                        l.push(*k);
                        next.push((l, i));
                    }
                }
            }
            parts = next;
        }
        Self::from_pieces(parts, n)
    }

    /// Build from labelled subspaces forming a direct sum decomposition.
    pub fn from_pieces(parts: Vec<(Vec<i64>, Subspace<S>)>, n: usize) -> Option<Self> {
        let mut cols = Vec::new();
        let mut blocks = Vec::new();
        for (lab, sp) in parts {
            let start = cols.len();
            cols.extend(sp.vectors());
            blocks.push((lab, start..cols.len()));
        }
        if cols.len() != n {
            return None;
        }
        let basis = Matrix::from_columns(&cols, n);
        let basis_inv = basis.inverse()?;
        Some(JointEigen { blocks, basis, basis_inv })
    }

    /// Split X into pieces indexed by (target label - source label).
    pub fn ad_components(&self, x: &Matrix<S>) -> BTreeMap<Vec<i64>, Matrix<S>> {
        let xp = self.basis_inv.mul(x).mul(&self.basis);
        let n = x.rows();
        let mut out: BTreeMap<Vec<i64>, Matrix<S>> = BTreeMap::new();
        for (lt, rt) in &self.blocks {
            for (ls, rs) in &self.blocks {
                let d: Vec<i64> = lt.iter().zip(ls).map(|(a, b)| a - b).collect();
                let mut any = false;
                for i in rt.clone() {
                    for j in rs.clone() {
                        if !xp[(i, j)].is_zero() {
                            any = true;
                        }
                    }
                }
                if !any {
                    continue;
                }
                let m = out.entry(d).or_insert_with(|| Matrix::zeros(n, n));
                for i in rt.clone() {
                    for j in rs.clone() {
                        m[(i, j)] = xp[(i, j)].clone();
                    }
                }
            }
        }
        out.into_iter()
            .map(|(k, m)| (k, self.basis.mul(&m).mul(&self.basis_inv)))
            .collect()
    }

    /// Basis of the operators mapping block l to block l + delta.
    pub fn hom_basis(&self, delta: &[i64]) -> Vec<Matrix<S>> {
        let n = self.basis.rows();
        let mut out = Vec::new();
        for (lt, rt) in &self.blocks {
            for (ls, rs) in &self.blocks {
                if lt.iter().zip(ls).zip(delta).any(|((a, b), d)| a - b != *d) {
                    continue;
                }
                for i in rt.clone() {
                    for j in rs.clone() {
                        let e = Matrix::unit(n, i, j);
                        out.push(self.basis.mul(&e).mul(&self.basis_inv));
                    }
                }
            }
        }
        out
    }

    /// Operator acting on the block with label l by f(l).
    pub fn diagonal_operator(&self, f: impl Fn(&[i64]) -> S) -> Matrix<S> {
        let n = self.basis.rows();
        let mut d = vec![S::zero(); n];
        for (lab, r) in &self.blocks {
            let v = f(lab);
            for i in r.clone() {
                d[i] = v.clone();
            }
        }
        self.basis.mul(&Matrix::diagonal(&d)).mul(&self.basis_inv)
    }
}

/// Eigencomponents of ad(Y) acting on X, keyed by eigenvalue.
pub fn ad_components<S: Scalar>(x: &Matrix<S>, y: &Matrix<S>) -> Option<BTreeMap<i64, Matrix<S>>> {
    let je = JointEigen::new(std::slice::from_ref(y), x.rows())?;
    Some(je.ad_components(x).into_iter().map(|(k, m)| (k[0], m)).collect())
}

/// The ad(Y)-eigencomponent of X with eigenvalue k.
pub fn ad_component<S: Scalar>(x: &Matrix<S>, y: &Matrix<S>, k: i64) -> Option<Matrix<S>> {
    let n = x.rows();
    Some(ad_components(x, y)?.remove(&k).unwrap_or_else(|| Matrix::zeros(n, n)))
}
