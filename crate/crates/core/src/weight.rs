//! Monodromy weight filtrations W(N), relative weight filtrations M(N, W) and
//! Kashiwara's compatibility checks for nilpotent cones.

use thiserror::Error;

use crate::filtration::Increasing;
use crate::matrix::Matrix;
use crate::scalar::Scalar;
use crate::subspace::Subspace;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WeightError {
    #[error("operator is not nilpotent")]
    NotNilpotent,
    #[error("operator does not preserve the weight filtration")]
    NotInW0,
    #[error("subspace is not stable under the operator")]
    NotStable,
}

/// Filtration steps (k, M_k) of a subspace U; M_k = 0 below the first entry
/// and M_k = U above the last.
pub type Steps<S> = Vec<(i32, Subspace<S>)>;

/// Step k of an explicit step list, with everything above the window equal to `top`.
pub fn step_at<S: Scalar>(steps: &Steps<S>, k: i32, top: &Subspace<S>) -> Subspace<S> {
    match steps.iter().rev().find(|(j, _)| *j <= k) {
        None => Subspace::zero(top.ambient()),
        Some((j, s)) if *j == k => s.clone(),
        Some(_) if k > steps.last().unwrap().0 => top.clone(),
        Some((_, s)) => s.clone(),
    }
}

/// Monodromy weight filtration of N on the subquotient U/U', centered at c,
/// returned as subspaces of U containing U'. Uses
/// M_{c+k} = U' + Σ_{j≥max(0,-k)} (N^j U + U') ∩ {u ∈ U : N^{k+j+1} u ∈ U'}.
pub fn monodromy_on_subquotient<S: Scalar>(
    n_op: &Matrix<S>,
    u: &Subspace<S>,
    u0: &Subspace<S>,
    c: i32,
) -> Steps<S> {
    let dim = n_op.rows();
    let len = (u.dim() - u0.dim()) as i32;
    let mut powers = vec![Matrix::identity(dim)];
    for j in 1..=(2 * len + 2) as usize {
        powers.push(powers[j - 1].mul(n_op));
    }
    let img = |j: usize| u.image(&powers[j]).sum(u0);
    let ker = |m: usize| u0.preimage(&powers[m]).intersect(u);
    let mut out = Vec::new();
    for k in -len..=len {
        let mut acc = u0.clone();
        for j in 0.max(-k)..=len {
            let m = (k + j + 1) as usize;
            acc = acc.sum(&img(j as usize).intersect(&ker(m)));
        }
        out.push((c + k, acc));
    }
    out
}

/// W(N) centered at `center` on V.
pub fn monodromy_weight<S: Scalar>(n_op: &Matrix<S>, center: i32) -> Result<Increasing<S>, WeightError> {
    if !n_op.is_nilpotent() {
        return Err(WeightError::NotNilpotent);
    }
    let n = n_op.rows();
    let steps = monodromy_on_subquotient(n_op, &Subspace::full(n), &Subspace::zero(n), center);
    let lo = steps[0].0;
    Ok(Increasing::from_steps(n, lo, steps.into_iter().map(|s| s.1).collect()))
}

/// Vectors of `u` completing a basis of `a` (assumed a ⊆ u) to one of u.
fn complement_within<S: Scalar>(a: &Subspace<S>, u: &Subspace<S>) -> Vec<Vec<S>> {
    let mut cur = a.clone();
    let mut out = Vec::new();
    for v in u.vectors() {
        if !cur.contains(&v) {
            cur = cur.sum(&Subspace::span(u.ambient(), &[v.clone()]));
            out.push(v);
        }
    }
    out
}

/// Linear expression const + Σ u_t * vec_t in V.
struct Lin<S: Scalar> {
    constant: Vec<S>,
    terms: Vec<(usize, Vec<S>)>,
}

/// Relative weight filtration of N with respect to a filtration of U given by
/// steps (k, W_k ∩ U). Returns None when it does not exist.
///
/// Built one weight at a time from the bottom: the filtration on W_{b-1} is
/// extended over Gr_b by lifting the monodromy filtration of Gr_b, the lifts
/// being the solution of the linear conditions N M_k ⊆ M_{k-2} and nesting.
pub fn relative_weight_steps<S: Scalar>(
    n_op: &Matrix<S>,
    w: &Steps<S>,
    top: &Subspace<S>,
) -> Result<Option<Steps<S>>, WeightError> {
    let dim = n_op.rows();
    if !top.contains_space(&top.image(n_op)) {
        return Err(WeightError::NotStable);
    }
    for (_, s) in w {
        if !s.contains_space(&s.image(n_op)) {
            return Err(WeightError::NotInW0);
        }
    }
    if !n_op.is_nilpotent() {
        return Err(WeightError::NotNilpotent);
    }
    let mut weights: Vec<i32> = Vec::new();
    let mut prev = Subspace::zero(dim);
    let lo_w = w.first().map_or(0, |x| x.0);
    let hi_w = w.last().map_or(0, |x| x.0);
    for k in lo_w..=hi_w {
        let s = step_at(w, k, top);
        if s.dim() > prev.dim() {
            weights.push(k);
        }
        prev = s;
    }
    // current M on A = W_{b-1}, stored as explicit steps over a window
    let mut m_steps: Steps<S> = Vec::new();
    let mut a = Subspace::zero(dim);
    for &b in &weights {
        let wb = step_at(w, b, top);
        let q = monodromy_on_subquotient(n_op, &wb, &a, b);
        let qat = |k: i32| -> Subspace<S> {
            if k < q[0].0 {
                a.clone()
            } else if k > q.last().unwrap().0 {
                wb.clone()
            } else {
                q[(k - q[0].0) as usize].1.clone()
            }
        };
        let ma = |k: i32| step_at(&m_steps, k, &a);
        let a_basis = a.vectors();
        let klo = q[0].0;
        let khi = q.last().unwrap().0.max(m_steps.last().map_or(klo, |x| x.0)) + 2;
        // B-part bases: Q_k ∩ C for k in klo..=khi
        let c_vecs = complement_within(&a, &wb);
        let c_space = Subspace::span(dim, &c_vecs);
        let mut bases: Vec<Vec<Vec<S>>> = Vec::new();
        let mut offsets: Vec<usize> = Vec::new();
        let mut nunk = 0;
        for k in klo..=khi {
            let bk = qat(k).intersect(&c_space).vectors();
            offsets.push(nunk);
            nunk += bk.len() * a_basis.len();
            bases.push(bk);
        }
        let idx = |k: i32| (k - klo) as usize;
        // φ_{k,i} as a linear expression
        let phi = |k: i32, i: usize| -> Lin<S> {
            let base = offsets[idx(k)] + i * a_basis.len();
            Lin {
                constant: vec![S::zero(); dim],
                terms: a_basis.iter().enumerate().map(|(t, v)| (base + t, v.clone())).collect(),
            }
        };
        // coordinates of a vector of Q_k ∩ C in the basis bases[k]
        let coords = |k: i32, v: &[S]| -> Vec<S> {
            let bk = &bases[idx(k)];
            if bk.is_empty() {
                return vec![];
            }
            Matrix::from_columns(bk, dim).solve(v).expect("vector lies in Q_k ∩ C")
        };
        let mut conditions: Vec<(Lin<S>, Subspace<S>)> = Vec::new();
        for k in klo..=khi {
            for (i, bv) in bases[idx(k)].iter().enumerate() {
                // nesting: b_{k,i} ∈ M_{k+1}
                if k < khi {
                    let cs = coords(k + 1, bv);
                    let mut e = phi(k, i);
                    for (l, c) in cs.iter().enumerate() {
                        for (u, v) in phi(k + 1, l).terms {
                            e.terms.push((u, v.iter().map(|x| -(x.clone() * c.clone())).collect()));
                        }
                    }
                    conditions.push((e, ma(k + 1)));
                }
                // N(b + φ) ∈ M_{k-2}
                let nb = n_op.apply(bv);
                let c_part_space = qat(k - 2).intersect(&c_space);
                // split N b = a_part + c_part with c_part ∈ C
                let split = Matrix::from_columns(&[a_basis.clone(), c_vecs.clone()].concat(), dim)
                    .solve(&nb)
                    .expect("basis of W_b");
                let na = a_basis.len();
                let a_part: Vec<S> = (0..dim)
                    .map(|r| (0..na).fold(S::zero(), |acc, t| acc + split[t].clone() * a_basis[t][r].clone()))
                    .collect();
                let c_part: Vec<S> = (0..dim)
                    .map(|r| {
                        (0..c_vecs.len()).fold(S::zero(), |acc, t| acc + split[na + t].clone() * c_vecs[t][r].clone())
                    })
                    .collect();
                let mut e = Lin {
                    constant: a_part,
                    terms: phi(k, i)
                        .terms
                        .into_iter()
                        .map(|(u, v)| (u, n_op.apply(&v)))
                        .collect(),
                };
                if c_part.iter().any(|x| !x.is_zero()) {
                    if !c_part_space.contains(&c_part) {
                        return Ok(None);
                    }
                    if k - 2 >= klo {
                        let ds = coords(k - 2, &c_part);
                        for (l, d) in ds.iter().enumerate() {
                            for (u, v) in phi(k - 2, l).terms {
                                e.terms.push((u, v.iter().map(|x| -(x.clone() * d.clone())).collect()));
                            }
                        }
                    }
                }
                conditions.push((e, ma(k - 2)));
            }
        }
        // assemble the linear system
        let mut rows: Vec<Vec<S>> = Vec::new();
        let mut rhs: Vec<S> = Vec::new();
        for (e, target) in &conditions {
            let qm = target.quotient_map();
            for r in 0..qm.rows() {
                let qrow = qm.row(r);
                let dot = |v: &[S]| v.iter().zip(&qrow).fold(S::zero(), |acc, (x, y)| acc + x.clone() * y.clone());
                let mut row = vec![S::zero(); nunk];
                for (u, v) in &e.terms {
                    row[*u] = row[*u].clone() + dot(v);
                }
                rows.push(row);
                rhs.push(-dot(&e.constant));
            }
        }
        let sol = if nunk == 0 {
            if rhs.iter().all(|x| x.is_zero()) {
                vec![]
            } else {
                return Ok(None);
            }
        } else if rows.is_empty() {
            vec![S::zero(); nunk]
        } else {
            match Matrix::from_rows(rows).solve(&rhs) {
                Some(s) => s,
                None => return Ok(None),
            }
        };
        let mut next: Steps<S> = Vec::new();
        let lo_new = klo.min(m_steps.first().map_or(klo, |x| x.0));
        for k in lo_new..=khi {
            let mut sp = ma(k);
            if k >= klo {
                let vs: Vec<Vec<S>> = bases[idx(k)]
                    .iter()
                    .enumerate()
                    .map(|(i, bv)| {
                        let base = offsets[idx(k)] + i * a_basis.len();
                        let mut v = bv.clone();
                        for (t, av) in a_basis.iter().enumerate() {
                            for r in 0..dim {
                                v[r] = v[r].clone() + sol[base + t].clone() * av[r].clone();
                            }
                        }
                        v
                    })
                    .collect();
                sp = sp.sum(&Subspace::span(dim, &vs));
            }
            next.push((k, sp));
        }
        m_steps = next;
        a = wb;
    }
    Ok(Some(m_steps))
}

/// M(N, W) on V, or None when it does not exist.
pub fn relative_weight<S: Scalar>(n_op: &Matrix<S>, w: &Increasing<S>) -> Result<Option<Increasing<S>>, WeightError> {
    let n = n_op.rows();
    let steps: Steps<S> = (w.lowest()..=w.highest()).map(|k| (k, w.get(k))).collect();
    let full = Subspace::full(n);
    Ok(relative_weight_steps(n_op, &steps, &full)?.map(|m| steps_to_filtration(n, m)))
}

pub fn steps_to_filtration<S: Scalar>(n: usize, steps: Steps<S>) -> Increasing<S> {
    if steps.is_empty() {
        return Increasing::trivial(n, 0);
    }
    let lo = steps[0].0;
    let mut v: Vec<Subspace<S>> = steps.into_iter().map(|s| s.1).collect();
    if !v.last().unwrap().is_full() {
        v.push(Subspace::full(n));
    }
    Increasing::from_steps(n, lo, v)
}

/// Checks the two defining properties of M = M(N, W):
/// N M_k ⊆ M_{k-2}, and N^l : Gr^M_{k+l} Gr^W_k -> Gr^M_{k-l} Gr^W_k is an isomorphism.
pub fn verify_relative<S: Scalar>(n_op: &Matrix<S>, w: &Increasing<S>, m: &Increasing<S>) -> Result<(), String> {
    if !m.maps_into(n_op, -2) {
        return Err("N M_k is not contained in M_{k-2}".into());
    }
    for k in w.weights() {
        let wk = w.get(k);
        let wm = w.get(k - 1);
        // Gr^M_j Gr^W_k ≅ (M_j ∩ W_k + W_{k-1}) / (M_{j-1} ∩ W_k + W_{k-1})
        let piece = |j: i32| m.get(j).intersect(&wk).sum(&wm);
        let lo = m.lowest() - 1;
        let hi = m.highest() + 1;
        for l in 0..=(hi - lo) {
            let top = piece(k + l);
            let below = piece(k + l - 1);
            let gr_dim = top.dim() - below.dim();
            let low_dim = piece(k - l).dim() - piece(k - l - 1).dim();
            if gr_dim != low_dim {
                return Err(format!("Gr^M_{} and Gr^M_{} of Gr^W_{k} differ in dimension", k + l, k - l));
            }
            if l == 0 || gr_dim == 0 {
                continue;
            }
            let nl = n_op.pow(l as u32);
            let floor = piece(k - l - 1);
            let image_dim = top.image(&nl).sum(&floor).dim() - floor.dim();
            let kernel_free = image_dim == gr_dim;
            if !piece(k - l).contains_space(&top.image(&nl)) || !kernel_free {
                return Err(format!("N^{l} is not an isomorphism Gr^M_{} -> Gr^M_{} on Gr^W_{k}", k + l, k - l));
            }
        }
    }
    Ok(())
}

/// Positive combination Σ c_i N_i.
pub fn cone_element<S: Scalar>(ns: &[Matrix<S>], coeffs: &[S]) -> Matrix<S> {
    let n = ns[0].rows();
    ns.iter()
        .zip(coeffs)
        .fold(Matrix::zeros(n, n), |acc, (m, c)| acc.add(&m.scale(c)))
}

/// Sum of the N_i with i in the index set (the standard representative of C(I)).
pub fn cone_sum<S: Scalar>(ns: &[Matrix<S>], idx: &[usize]) -> Matrix<S> {
    let n = ns[0].rows();
    idx.iter().fold(Matrix::zeros(n, n), |acc, &i| acc.add(&ns[i]))
}

/// The barycenter (1, ..., 1) and `random` seeded combinations with entries in
/// [1/8, 64], all strictly positive: faces of the cone are not sampled.
pub fn default_cone_samples<S: Scalar>(r: usize, random: usize, seed: u64) -> Vec<Vec<S>> {
    use rand::{Rng, SeedableRng};
    let mut out: Vec<Vec<S>> = vec![vec![S::one(); r]];
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..random {
        out.push((0..r).map(|_| S::from_ratio(rng.gen_range(1..=64), rng.gen_range(1..=8))).collect());
    }
    out
}

#[derive(Debug, Clone)]
pub struct KashiwaraReport {
    /// M(N, W) agrees across all sampled cone elements.
    pub cone_constant: bool,
    pub samples: usize,
    /// (I, J, holds) for M(C(I), M(C(J), W)) = M(C(I ∪ J), W).
    pub compositions: Vec<(Vec<usize>, Vec<usize>, bool)>,
}

impl KashiwaraReport {
    pub fn all_pass(&self) -> bool {
        self.cone_constant && self.compositions.iter().all(|c| c.2)
    }
}

/// Cone constancy over the supplied positive coefficient vectors, and the
/// composition rule for all pairs of subsets I, J of {0..r-1}.
pub fn kashiwara_checks<S: Scalar>(
    ns: &[Matrix<S>],
    w: &Increasing<S>,
    samples: &[Vec<S>],
) -> Result<KashiwaraReport, WeightError> {
    let r = ns.len();
    let mut reference: Option<Option<Increasing<S>>> = None;
    let mut constant = true;
    for c in samples {
        let m = relative_weight(&cone_element(ns, c), w)?;
        match &reference {
            None => reference = Some(m),
            Some(rm) => {
                if *rm != m {
                    constant = false;
                }
            }
        }
    }
    let subsets: Vec<Vec<usize>> = (0..(1u32 << r))
        .map(|mask| (0..r).filter(|i| mask & (1 << i) != 0).collect())
        .collect();
    let mut comps = Vec::new();
    for i_set in &subsets {
        for j_set in &subsets {
            let union: Vec<usize> = (0..r).filter(|x| i_set.contains(x) || j_set.contains(x)).collect();
            let inner = relative_weight(&cone_sum(ns, j_set), w)?;
            let lhs = match inner {
                Some(mj) => relative_weight(&cone_sum(ns, i_set), &mj)?,
                None => None,
            };
            let rhs = relative_weight(&cone_sum(ns, &union), w)?;
            let ok = lhs.is_some() && lhs == rhs;
            comps.push((i_set.clone(), j_set.clone(), ok));
        }
    }
    Ok(KashiwaraReport {
        cone_constant: constant,
        samples: samples.len(),
        compositions: comps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Exact;

    fn jordan(sizes: &[usize]) -> Matrix<Exact> {
        let n: usize = sizes.iter().sum();
        let mut m = Matrix::zeros(n, n);
        let mut off = 0;
        for &s in sizes {
            for i in 0..s.saturating_sub(1) {
                m[(off + i, off + i + 1)] = Exact::from_i64(1);
            }
            off += s;
        }
        m
    }

    #[test]
    fn jordan_block_weights() {
        let n = jordan(&[3]);
        let w = monodromy_weight(&n, 0).unwrap();
        assert_eq!(w.gr_dim(-2), 1);
        assert_eq!(w.gr_dim(0), 1);
        assert_eq!(w.gr_dim(2), 1);
        assert_eq!(w.get(-2), Subspace::coordinate(3, &[0]));
        let w1 = monodromy_weight(&jordan(&[2]), 1).unwrap();
        assert_eq!(w1.weights(), vec![0, 2]);
    }

    #[test]
    fn nonexistence_example() {
        // W_{-1} = <e1> ⊂ W_0 = C^2, N e2 = e1
        let w = Increasing::from_steps(2, -1, vec![Subspace::coordinate(2, &[0]), Subspace::full(2)]);
        let n = Matrix::<Exact>::unit(2, 0, 1);
        assert!(relative_weight(&n, &w).unwrap().is_none());
    }

    #[test]
    fn extension_relative_weight() {
        // e0 weight 0, H = <e1, e2> weight -1, N e2 = e1, N e0 = e1
        let w = Increasing::from_steps(3, -1, vec![Subspace::coordinate(3, &[1, 2]), Subspace::full(3)]);
        let mut n = Matrix::<Exact>::unit(3, 1, 2);
        n[(1, 0)] = Exact::from_i64(1);
        let m = relative_weight(&n, &w).unwrap().unwrap();
        verify_relative(&n, &w, &m).unwrap();
        assert_eq!(m.get(-2), Subspace::coordinate(3, &[1]));
        assert_eq!(m.get(-1), Subspace::coordinate(3, &[1]));
        assert!(m.get(0).is_full());
    }
}
