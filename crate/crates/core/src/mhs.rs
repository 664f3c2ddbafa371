//! Mixed Hodge structures: the MHS test, the Deligne bigrading, the grading
//! Y_(F,W), the induced bigrading on End(V), Λ^{-1,-1} and the δ-splitting.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::filtration::{ad_components, Decreasing, Increasing, JointEigen};
use crate::matrix::Matrix;
use crate::scalar::Scalar;
use crate::subspace::Subspace;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MhsError {
    #[error("weight filtration is not defined over R")]
    WeightNotReal,
    #[error("Gr^W_{weight} is not a pure Hodge structure of weight {weight} (fails at p = {p})")]
    NotPure { weight: i32, p: i32 },
    #[error("dimension mismatch: filtrations live on different spaces")]
    Dimension,
    #[error("Deligne bigrading does not decompose V ({found} of {expected} dimensions)")]
    Bigrading { found: usize, expected: usize },
    #[error("δ computation failed: {0}")]
    Delta(String),
    #[error("sl2-splitting unavailable: {0}")]
    XiUnavailable(String),
}

/// A pair (F, W) of a decreasing and an increasing filtration.
#[derive(Clone, Debug, PartialEq)]
pub struct Mhs<S: Scalar> {
    pub f: Decreasing<S>,
    pub w: Increasing<S>,
}

impl<S: Scalar> Mhs<S> {
    pub fn new(f: Decreasing<S>, w: Increasing<S>) -> Self {
        Mhs { f, w }
    }

    pub fn dim(&self) -> usize {
        self.w.ambient()
    }

    /// (gF, W) for g preserving W.
    pub fn act_f(&self, g: &Matrix<S>) -> Self {
        Mhs {
            f: self.f.act(g),
            w: self.w.clone(),
        }
    }

    pub fn check(&self) -> Result<(), MhsError> {
        is_mhs(&self.f, &self.w)
    }

    pub fn bigrading(&self) -> Result<Bigrading<S>, MhsError> {
        bigrading(&self.f, &self.w)
    }

    pub fn to_float(&self) -> Mhs<crate::scalar::Float> {
        Mhs {
            f: self.f.to_float(),
            w: self.w.to_float(),
        }
    }
}

/// dim of the image of U ∩ W_k in Gr^W_k.
fn gr_image_dim<S: Scalar>(u: &Subspace<S>, w: &Increasing<S>, k: i32) -> usize {
    let wk = w.get(k);
    let wm = w.get(k - 1);
    u.intersect(&wk).sum(&wm).dim() - wm.dim()
}

/// Checks that F induces a pure Hodge structure of weight k on every Gr^W_k:
/// F^p ⊕ conj(F^{k-p+1}) = Gr^W_k for all p.
pub fn is_mhs<S: Scalar>(f: &Decreasing<S>, w: &Increasing<S>) -> Result<(), MhsError> {
    if f.ambient() != w.ambient() {
        return Err(MhsError::Dimension);
    }
    if !w.is_real() {
        return Err(MhsError::WeightNotReal);
    }
    let fbar = f.conj();
    for k in w.weights() {
        let wk = w.get(k);
        let wm = w.get(k - 1);
        let gr = wk.dim() - wm.dim();
        for p in f.lowest()..=f.highest() + 1 {
            let a = f.get(p).intersect(&wk);
            let b = fbar.get(k - p + 1).intersect(&wk);
            let da = a.sum(&wm).dim() - wm.dim();
            let db = b.sum(&wm).dim() - wm.dim();
            let sum = a.sum(&b).sum(&wm).dim() - wm.dim();
            if da + db != gr || sum != gr {
                return Err(MhsError::NotPure { weight: k, p });
            }
        }
    }
    Ok(())
}

/// Hodge numbers h^{p,q} of the graded pieces.
pub fn hodge_numbers<S: Scalar>(f: &Decreasing<S>, w: &Increasing<S>) -> BTreeMap<(i32, i32), usize> {
    let mut out = BTreeMap::new();
    for k in w.weights() {
        for p in f.lowest()..=f.highest() {
            let h = gr_image_dim(&f.get(p), w, k) - gr_image_dim(&f.get(p + 1), w, k);
            if h > 0 {
                out.insert((p, k - p), h);
            }
        }
    }
    out
}

/// The Deligne splitting V = ⊕ I^{p,q}.
#[derive(Clone, Debug)]
pub struct Bigrading<S: Scalar> {
    pub pieces: BTreeMap<(i32, i32), Subspace<S>>,
    eig: JointEigen<S>,
    y: Matrix<S>,
}

/// I^{p,q} = F^p ∩ W_{p+q} ∩ (conj F^q ∩ W_{p+q} + Σ_{j≥1} conj F^{q-j} ∩ W_{p+q-j-1})
pub fn bigrading<S: Scalar>(f: &Decreasing<S>, w: &Increasing<S>) -> Result<Bigrading<S>, MhsError> {
    let n = w.ambient();
    let fbar = f.conj();
    let mut pieces = BTreeMap::new();
    let mut found = 0;
    for p in f.lowest()..=f.highest() {
        for k in w.weights() {
            let q = k - p;
            let wk = w.get(k);
            let mut inner = fbar.get(q).intersect(&wk);
            let mut j = 1;
            while k - j - 1 >= w.lowest() {
                inner = inner.sum(&fbar.get(q - j).intersect(&w.get(k - j - 1)));
                j += 1;
            }
            let i = f.get(p).intersect(&wk).intersect(&inner);
            if !i.is_zero() {
                found += i.dim();
                pieces.insert((p, q), i);
            }
        }
    }
    if found != n {
        return Err(MhsError::Bigrading { found, expected: n });
    }
    let parts: Vec<(Vec<i64>, Subspace<S>)> = pieces
        .iter()
        .map(|(&(p, q), s)| (vec![p as i64, q as i64], s.clone()))
        .collect();
    let eig = JointEigen::from_pieces(parts, n).ok_or(MhsError::Bigrading { found, expected: n })?;
    let y = eig.diagonal_operator(|l| S::from_i64(l[0] + l[1]));
    Ok(Bigrading { pieces, eig, y })
}

impl<S: Scalar> Bigrading<S> {
    pub fn dim(&self) -> usize {
        self.y.rows()
    }

    /// Y_(F,W): multiplication by p+q on I^{p,q}.
    pub fn y(&self) -> &Matrix<S> {
        &self.y
    }

    pub fn piece(&self, p: i32, q: i32) -> Subspace<S> {
        self.pieces.get(&(p, q)).cloned().unwrap_or_else(|| Subspace::zero(self.dim()))
    }

    /// Operator acting on I^{p,q} by f(p, q).
    pub fn operator(&self, f: impl Fn(i32, i32) -> S) -> Matrix<S> {
        self.eig.diagonal_operator(|l| f(l[0] as i32, l[1] as i32))
    }

    /// Decomposition of X ∈ End(V) into gl(V)^{a,b} components.
    pub fn components(&self, x: &Matrix<S>) -> BTreeMap<(i32, i32), Matrix<S>> {
        self.eig
            .ad_components(x)
            .into_iter()
            .map(|(k, m)| ((k[0] as i32, k[1] as i32), m))
            .collect()
    }

    pub fn component(&self, x: &Matrix<S>, a: i32, b: i32) -> Matrix<S> {
        let n = self.dim();
        self.components(x).remove(&(a, b)).unwrap_or_else(|| Matrix::zeros(n, n))
    }

    /// Basis of gl(V)^{a,b} as matrices.
    pub fn hom_basis(&self, a: i32, b: i32) -> Vec<Matrix<S>> {
        let n = self.dim();
        let mut out = Vec::new();
        for (lt, rt) in &self.eig.blocks {
            for (ls, rs) in &self.eig.blocks {
                if lt[0] - ls[0] != a as i64 || lt[1] - ls[1] != b as i64 {
                    continue;
                }
                for i in rt.clone() {
                    for j in rs.clone() {
                        let e = Matrix::unit(n, i, j);
                        out.push(self.eig.basis.mul(&e).mul(&self.eig.basis_inv));
                    }
                }
            }
        }
        out
    }

    /// All bidegrees (a, b) with gl(V)^{a,b} nonzero.
    pub fn hom_bidegrees(&self) -> Vec<(i32, i32)> {
        let mut out: Vec<(i32, i32)> = Vec::new();
        for (lt, _) in &self.eig.blocks {
            for (ls, _) in &self.eig.blocks {
                let d = ((lt[0] - ls[0]) as i32, (lt[1] - ls[1]) as i32);
                if !out.contains(&d) {
                    out.push(d);
                }
            }
        }
        out.sort();
        out
    }

    /// Λ^{-1,-1} = ⊕_{a,b<0} gl(V)^{a,b}, as a subspace of End(V) flattened row-major.
    pub fn lambda_minus(&self) -> Subspace<S> {
        let n = self.dim();
        let mut vs = Vec::new();
        for (a, b) in self.hom_bidegrees() {
            if a < 0 && b < 0 {
                vs.extend(self.hom_basis(a, b).iter().map(|m| m.flatten()));
            }
        }
        Subspace::span(n * n, &vs)
    }

    /// conj(I^{p,q}) = I^{q,p} for all p, q.
    pub fn is_split_real(&self) -> bool {
        self.pieces
            .iter()
            .all(|(&(p, q), s)| s.conj() == self.piece(q, p))
    }

    /// Checks the three defining properties of the bigrading against (F, W):
    /// F^p = ⊕_{r≥p} I^{r,s}, W_k = ⊕_{r+s≤k} I^{r,s},
    /// conj I^{p,q} ⊆ I^{q,p} + ⊕_{r<q,s<p} I^{r,s}.
    pub fn verify(&self, f: &Decreasing<S>, w: &Increasing<S>) -> Result<(), String> {
        let n = self.dim();
        let total: usize = self.pieces.values().map(|s| s.dim()).sum();
        if total != n {
            return Err(format!("pieces have total dimension {total}, expected {n}"));
        }
        let span_of = |pred: &dyn Fn(i32, i32) -> bool| {
            self.pieces
                .iter()
                .filter(|(&(p, q), _)| pred(p, q))
                .fold(Subspace::zero(n), |acc, (_, s)| acc.sum(s))
        };
        for p in f.lowest()..=f.highest() + 1 {
            if span_of(&|r, _| r >= p) != f.get(p) {
                return Err(format!("F^{p} is not the sum of I^(r,s), r >= {p}"));
            }
        }
        for k in w.lowest() - 1..=w.highest() {
            if span_of(&|r, s| r + s <= k) != w.get(k) {
                return Err(format!("W_{k} is not the sum of I^(r,s), r+s <= {k}"));
            }
        }
        for (&(p, q), s) in &self.pieces {
            let target = self.piece(q, p).sum(&span_of(&|r, t| r < q && t < p));
            if !target.contains_space(&s.conj()) {
                return Err(format!("conj I^({p},{q}) not congruent to I^({q},{p})"));
            }
        }
        Ok(())
    }
}

/// Y_(F,W), the grading with I^{p,q} as (p+q)-eigenspace.
pub fn y_grading<S: Scalar>(f: &Decreasing<S>, w: &Increasing<S>) -> Result<Matrix<S>, MhsError> {
    Ok(bigrading(f, w)?.y().clone())
}

/// Whether (F, W) is split over R.
pub fn is_split_real<S: Scalar>(f: &Decreasing<S>, w: &Increasing<S>) -> Result<bool, MhsError> {
    Ok(bigrading(f, w)?.is_split_real())
}

/// Result of the δ-splitting: the unique real δ ∈ Λ^{-1,-1} with (e^{-iδ}F, W) split over R.
#[derive(Clone, Debug)]
pub struct DeltaSplit<S: Scalar> {
    pub delta: Matrix<S>,
    pub split: Mhs<S>,
}

/// Computes δ from conj(Y) = e^{-2iδ} Y e^{2iδ}, solving for λ = -2iδ one
/// ad(Y)-level at a time: the level -k part of conj(Y) - Ad(e^λ)Y equals k λ_{-k}.
pub fn delta_split<S: Scalar>(mhs: &Mhs<S>) -> Result<DeltaSplit<S>, MhsError> {
    mhs.check()?;
    let bg = mhs.bigrading()?;
    let n = mhs.dim();
    let y = bg.y().clone();
    let ybar = y.conj();
    let depth = (mhs.w.highest() - mhs.w.lowest()).max(0) as i64;
    let mut lambda = Matrix::<S>::zeros(n, n);
    let bad = |m: &str| MhsError::Delta(m.to_string());
    for k in 1..=depth {
        let g = lambda.exp_nilpotent();
        let cur = y.conjugate_by(&g, &lambda.neg().exp_nilpotent());
        let r = ybar.sub(&cur);
        let comps = ad_components(&r, &y).ok_or_else(|| bad("Y is not a grading"))?;
        for (&lev, m) in &comps {
            if lev > -k && !m.is_zero() {
                return Err(bad(&format!("conj(Y) - Y has a component at ad Y level {lev}")));
            }
        }
        if let Some(m) = comps.get(&-k) {
            lambda = lambda.add(&m.scale(&(S::one() / S::from_i64(k))));
        }
    }
    let g = lambda.exp_nilpotent();
    if !y.conjugate_by(&g, &lambda.neg().exp_nilpotent()).approx_eq(&ybar) {
        return Err(bad("level recursion did not reach conj(Y)"));
    }
    // λ = -2iδ
    let delta = lambda.scale(&(S::i() * S::from_ratio(1, 2)));
    if !delta.is_real() {
        return Err(bad("δ is not real"));
    }
    if !bg.lambda_minus().contains(&delta.flatten()) {
        return Err(bad("δ is not in Λ^{-1,-1}"));
    }
    let split = mhs.act_f(&delta.scale(&(-S::i())).exp_nilpotent());
    if !is_split_real(&split.f, &split.w)? {
        return Err(bad("e^{-iδ}F is not split"));
    }
    Ok(DeltaSplit { delta, split })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Exact;

    fn e(re: i64, im: i64) -> Exact {
        Exact::from_i64(re) + Exact::from_i64(im) * Exact::i()
    }

    /// Hodge–Tate: W_{-2} = <e1>, W_0 = V, F^0 = <e2 + i e1>.
    fn hodge_tate() -> Mhs<Exact> {
        let w = Increasing::from_generators(2, &[(-2, vec![vec![e(1, 0), e(0, 0)]]), (0, vec![vec![e(0, 0), e(1, 0)]])])
            .unwrap();
        let f = Decreasing::from_generators(2, &[(0, vec![vec![e(0, 1), e(1, 0)]]), (-1, vec![vec![e(1, 0), e(0, 0)]])])
            .unwrap();
        Mhs::new(f, w)
    }

    #[test]
    fn hodge_tate_delta() {
        let m = hodge_tate();
        m.check().unwrap();
        let bg = m.bigrading().unwrap();
        bg.verify(&m.f, &m.w).unwrap();
        assert_eq!(bg.piece(0, 0).dim(), 1);
        assert_eq!(bg.piece(-1, -1).dim(), 1);
        assert!(!bg.is_split_real());
        let d = delta_split(&m).unwrap();
        assert_eq!(d.delta, Matrix::unit(2, 0, 1));
        assert_eq!(d.split.f.get(0), Subspace::span(2, &[vec![e(0, 0), e(1, 0)]]));
    }

    #[test]
    fn not_pure_is_rejected() {
        // weight 1 with F^1 real: F^1 ∩ conj F^1 != 0
        let w = Increasing::<Exact>::trivial(2, 1);
        let f = Decreasing::from_generators(2, &[(1, vec![vec![e(1, 0), e(0, 0)]]), (0, vec![vec![e(0, 0), e(1, 0)]])])
            .unwrap();
        assert!(matches!(is_mhs(&f, &w), Err(MhsError::NotPure { .. })));
    }
}
