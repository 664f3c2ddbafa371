//! Deligne systems, the Deligne grading Y(N, Y_M) and grading chains.

use thiserror::Error;

use crate::filtration::{ad_component, eigenspaces, grading_from_pieces, Decreasing, Increasing, JointEigen};
use crate::matrix::Matrix;
use crate::mhs::{is_split_real, y_grading, Mhs, MhsError};
use crate::scalar::{Float, Scalar};
use crate::splitting::XiProvider;
use crate::subspace::Subspace;
use crate::weight::{relative_weight, relative_weight_steps, step_at, WeightError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DeligneError {
    #[error("relative weight filtration W^{index} does not exist")]
    NotAdmissible { index: usize },
    #[error("limit (F, M) is not split over R")]
    NotSplitLimit,
    #[error("grading does not satisfy the Deligne conditions: {0}")]
    Conditions(String),
    #[error("fixed point not reached and fallback failed: {0}")]
    NoFixedPoint(String),
    #[error("twist parameter y must be strictly positive")]
    NonPositiveY,
    #[error("polynomial fit failed at entry ({row},{col}): residual {residual:e}")]
    FitFailure { row: usize, col: usize, residual: f64 },
    #[error(transparent)]
    Mhs(#[from] MhsError),
    #[error(transparent)]
    Weight(#[from] WeightError),
}

/// W^0 = W, W^j = M(N_j, W^{j-1}).
pub fn weight_chain<S: Scalar>(ns: &[Matrix<S>], w: &Increasing<S>) -> Result<Vec<Increasing<S>>, DeligneError> {
    let mut chain = vec![w.clone()];
    for (j, nj) in ns.iter().enumerate() {
        let next = relative_weight(nj, chain.last().unwrap())?.ok_or(DeligneError::NotAdmissible { index: j + 1 })?;
        chain.push(next);
    }
    Ok(chain)
}

/// Outcome of checking the four Deligne system axioms.
#[derive(Clone, Debug, Default)]
pub struct DeligneSystemReport {
    pub existence: bool,
    pub restriction: bool,
    pub n_levels: bool,
    pub grading: bool,
    pub failures: Vec<String>,
}

impl DeligneSystemReport {
    pub fn ok(&self) -> bool {
        self.existence && self.restriction && self.n_levels && self.grading
    }
}

/// Axioms: (1) the chain of relative weight filtrations exists; (2) W^{j+1}
/// restricted to W^i_l is M(N_{j+1}, W^j restricted), i ≤ j; (3) N_i lowers
/// W^j by 2 for i ≤ j and preserves it for i > j; (4) Y grades W^r, preserves
/// each W^i and [Y, N_i] = -2 N_i.
pub fn check_deligne_system<S: Scalar>(
    ns: &[Matrix<S>],
    w: &Increasing<S>,
    y: Option<&Matrix<S>>,
) -> DeligneSystemReport {
    let mut rep = DeligneSystemReport::default();
    let chain = match weight_chain(ns, w) {
        Ok(c) => c,
        Err(e) => {
            rep.failures.push(format!("(1) {e}"));
            return rep;
        }
    };
    rep.existence = true;
    let r = ns.len();
    rep.restriction = true;
    for j in 0..r {
        for i in 0..j {
            let wi = &chain[i];
            for l in wi.lowest()..=wi.highest() {
                let u = wi.get(l);
                if !u.contains_space(&u.image(&ns[j])) {
                    rep.restriction = false;
                    rep.failures.push(format!("(2) N_{} does not preserve W^{i}_{l}", j + 1));
                    continue;
                }
                let restricted: Vec<(i32, Subspace<S>)> = chain[j].restrict(&u);
                let expect = relative_weight_steps(&ns[j], &restricted, &u);
                let ok = match expect {
                    Ok(Some(m)) => {
                        let lo = chain[j + 1].lowest().min(m.first().map_or(0, |x| x.0));
                        let hi = chain[j + 1].highest().max(m.last().map_or(0, |x| x.0));
                        (lo - 1..=hi).all(|k| step_at(&m, k, &u) == chain[j + 1].get(k).intersect(&u))
                    }
                    _ => false,
                };
                if !ok {
                    rep.restriction = false;
                    rep.failures.push(format!("(2) W^{} on W^{i}_{l} is not the relative filtration", j + 1));
                }
            }
        }
    }
    rep.n_levels = true;
    for j in 0..=r {
        for (i, ni) in ns.iter().enumerate() {
            let idx = i + 1;
            let ok = if idx <= j { chain[j].maps_into(ni, -2) } else { chain[j].maps_into(ni, 0) };
            if !ok {
                rep.n_levels = false;
                rep.failures.push(format!("(3) N_{idx} has the wrong level on W^{j}"));
            }
        }
    }
    match y {
        None => rep.grading = true,
        Some(y) => {
            let mut ok = chain[r].is_graded_by(y);
            ok &= chain.iter().all(|wi| wi.preserved_by(y));
            ok &= ns.iter().all(|ni| y.commutator(ni).approx_eq(&ni.scale(&S::from_i64(-2))));
            rep.grading = ok;
            if !ok {
                rep.failures.push("(4) Y^r is not a compatible grading".into());
            }
        }
    }
    rep
}

/// A grading of W commuting with the semisimple Y.
fn grading_commuting_with<S: Scalar>(w: &Increasing<S>, y: &Matrix<S>) -> Option<Matrix<S>> {
    let n = w.ambient();
    let eig = eigenspaces(y)?;
    let mut cols: Vec<(S, Subspace<S>)> = Vec::new();
    for e in eig.values() {
        let mut prev = Subspace::zero(n);
        for k in w.lowest()..=w.highest() {
            let cur = w.get(k).intersect(e);
            let mut acc = prev.clone();
            let mut vs = Vec::new();
            for v in cur.vectors() {
                if !acc.contains(&v) {
                    acc = acc.sum(&Subspace::span(n, &[v.clone()]));
                    vs.push(v);
                }
            }
            if !vs.is_empty() {
                cols.push((S::from_i64(k as i64), Subspace::span(n, &vs)));
            }
            prev = cur;
        }
    }
    let pieces: Vec<(S, &Subspace<S>)> = cols.iter().map(|(k, s)| (k.clone(), s)).collect();
    grading_from_pieces(n, &pieces)
}

/// Y(N, Y_M): the unique grading Y' of W with [Y', Y_M] = 0 such that, writing
/// N = N_0 + N_{-1} + ... by ad Y'-degree and H = Y_M - Y', (N_0, H) is an
/// sl2-pair and each N_{-k} is a highest weight vector of weight k - 2.
///
/// Start from any grading Y_0 of W commuting with Y_M and conjugate it by e^λ,
/// λ = Σ λ_{-k} commuting with Y_M; λ_{-k} is the unique solution of
/// ad(N_0)^{k-1}(N^λ_{-k} + [N_0, λ_{-k}]) = 0 in ad H-weight k.
pub fn deligne_y<S: Scalar>(n_op: &Matrix<S>, y_m: &Matrix<S>, w: &Increasing<S>) -> Result<Matrix<S>, DeligneError> {
    let n = n_op.rows();
    let cond = |m: &str| DeligneError::Conditions(m.to_string());
    if !y_m.commutator(n_op).approx_eq(&n_op.scale(&S::from_i64(-2))) {
        return Err(cond("[Y_M, N] != -2N"));
    }
    if !w.preserved_by(y_m) {
        return Err(cond("Y_M does not preserve W"));
    }
    let y0 = grading_commuting_with(w, y_m).ok_or_else(|| cond("no grading of W commutes with Y_M"))?;
    let n0 = ad_component(n_op, &y0, 0).ok_or_else(|| cond("Y_0 not semisimple"))?;
    let je = JointEigen::new(&[y_m.clone(), y0.clone()], n).ok_or_else(|| cond("joint eigenspaces"))?;
    let depth = (w.highest() - w.lowest()).max(0);
    let mut lambda = Matrix::<S>::zeros(n, n);
    for k in 1..=depth {
        let nl = n_op.conjugate_by(&lambda.neg().exp_nilpotent(), &lambda.exp_nilpotent());
        let x = ad_component(&nl, &y0, -(k as i64)).unwrap();
        let basis = je.hom_basis(&[0, -(k as i64)]);
        if basis.is_empty() {
            if !x.is_zero() && k == 1 {
                return Err(cond("N has a degree -1 part that cannot be removed"));
            }
            continue;
        }
        let adk = |m: &Matrix<S>| {
            let mut cur = m.clone();
            for _ in 0..(k - 1) {
                cur = n0.commutator(&cur);
            }
            cur
        };
        let cols: Vec<Vec<S>> = basis.iter().map(|b| adk(&n0.commutator(b)).flatten()).collect();
        let a = Matrix::from_columns(&cols, n * n);
        let rhs: Vec<S> = adk(&x).flatten().into_iter().map(|v| -v).collect();
        let c = a.solve(&rhs).ok_or_else(|| cond(&format!("no correction at level -{k}")))?;
        for (b, ci) in basis.iter().zip(c) {
            lambda = lambda.add(&b.scale(&ci));
        }
    }
    let y = y0.conjugate_by(&lambda.exp_nilpotent(), &lambda.neg().exp_nilpotent());
    verify_deligne_y(n_op, y_m, w, &y)?;
    Ok(y)
}

/// Checks the characterizing properties of Y(N, Y_M).
pub fn verify_deligne_y<S: Scalar>(
    n_op: &Matrix<S>,
    y_m: &Matrix<S>,
    w: &Increasing<S>,
    y: &Matrix<S>,
) -> Result<(), DeligneError> {
    let cond = |m: String| DeligneError::Conditions(m);
    if !w.is_graded_by(y) {
        return Err(cond("Y does not grade W".into()));
    }
    if !y.commutator(y_m).is_zero() {
        return Err(cond("[Y, Y_M] != 0".into()));
    }
    let comps = crate::filtration::ad_components(n_op, y).ok_or_else(|| cond("Y not semisimple".into()))?;
    let n = n_op.rows();
    let n0 = comps.get(&0).cloned().unwrap_or_else(|| Matrix::zeros(n, n));
    let h = y_m.sub(y);
    if !h.commutator(&n0).approx_eq(&n0.scale(&S::from_i64(-2))) {
        return Err(cond("[H, N_0] != -2 N_0".into()));
    }
    // sl2-pair: N_0^l is an isomorphism from the H-weight l space to weight -l
    if let Some(eig) = eigenspaces(&h) {
        for (&l, e) in &eig {
            if l > 0 {
                let img = e.image(&n0.pow(l as u32));
                let target = eig.get(&-l).cloned().unwrap_or_else(|| Subspace::zero(n));
                if img.dim() != e.dim() || img != target {
                    return Err(cond(format!("N_0^{l} is not an isomorphism of H-weight spaces")));
                }
            }
        }
    } else {
        return Err(cond("H not semisimple".into()));
    }
    for (&lev, m) in &comps {
        if lev >= 0 || m.is_zero() {
            continue;
        }
        let k = -lev;
        let mut cur = m.clone();
        for _ in 0..(k - 1) {
            cur = n0.commutator(&cur);
        }
        if k == 1 || !cur.is_zero() {
            return Err(cond(format!("N_{{-{k}}} is not a highest weight vector of weight {}", k - 2)));
        }
    }
    Ok(())
}

/// How a Deligne grading was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GradingRoute {
    FixedPoint { iterations: usize },
    Direct,
}

#[derive(Clone, Debug)]
pub struct DeligneGrading<S: Scalar> {
    pub y: Matrix<S>,
    pub route: GradingRoute,
    /// M(N, W)
    pub m: Increasing<S>,
    /// Y_(F,M)
    pub y_m: Matrix<S>,
}

/// Y(N, Y_(F,M)) for an admissible orbit with (F, M) split over R, via the
/// fixed point Y* = Y_(e^{i N_0(Y*)} F, W) seeded at Y_(e^{iN}F, W). After
/// dim V iterations without convergence the direct construction is used and
/// checked against the fixed point equation.
pub fn deligne_grading<S: Scalar>(
    n_op: &Matrix<S>,
    f: &Decreasing<S>,
    w: &Increasing<S>,
) -> Result<DeligneGrading<S>, DeligneError> {
    let n = n_op.rows();
    let m = relative_weight(n_op, w)?.ok_or(DeligneError::NotAdmissible { index: 1 })?;
    if !is_split_real(f, &m)? {
        return Err(DeligneError::NotSplitLimit);
    }
    let y_m = y_grading(f, &m)?;
    let step = |nn: &Matrix<S>| -> Result<Matrix<S>, MhsError> {
        let g = nn.scale(&S::i()).exp_nilpotent();
        let fx = f.act(&g);
        crate::mhs::is_mhs(&fx, w)?;
        y_grading(&fx, w)
    };
    let mut y = step(n_op)?;
    for it in 1..=n.max(1) {
        let n0 = ad_component(n_op, &y, 0).ok_or(DeligneError::Conditions("iterate not semisimple".into()))?;
        let next = step(&n0)?;
        if next.approx_eq(&y) {
            return Ok(DeligneGrading {
                y,
                route: GradingRoute::FixedPoint { iterations: it },
                m,
                y_m,
            });
        }
        y = next;
    }
    let direct = deligne_y(n_op, &y_m, w).map_err(|e| DeligneError::NoFixedPoint(e.to_string()))?;
    let n0 = ad_component(n_op, &direct, 0).unwrap();
    if !step(&n0)?.approx_eq(&direct) {
        return Err(DeligneError::NoFixedPoint("direct grading fails the fixed point equation".into()));
    }
    Ok(DeligneGrading {
        y: direct,
        route: GradingRoute::Direct,
        m,
        y_m,
    })
}

/// The descending chain attached to a nilpotent orbit (N_1..N_r; F, W).
/// Index j of `yhat`, `fhat`, `w` runs over 0..=r; index j of `nhat`, `hhat`
/// stores N̂_{j+1}, Ĥ_{j+1}.
#[derive(Clone, Debug)]
pub struct GradingChain<S: Scalar> {
    pub w: Vec<Increasing<S>>,
    pub fhat: Vec<Decreasing<S>>,
    pub yhat: Vec<Matrix<S>>,
    pub nhat: Vec<Matrix<S>>,
    pub hhat: Vec<Matrix<S>>,
    /// ξ of the limit (F, W^r).
    pub xi: Matrix<S>,
}

impl<S: Scalar> GradingChain<S> {
    pub fn r(&self) -> usize {
        self.nhat.len()
    }

    /// Ŷ^j for j = 1..=r as used by the twist t(y) = Π t_j^{Ŷ^j/2}.
    pub fn twist_gradings(&self) -> Vec<Matrix<S>> {
        self.yhat[1..].to_vec()
    }
}

/// F̂_r is the sl2-splitting of (F, W^r); then for j = r..1:
/// Ŷ^{j-1} = Y(N_j, Ŷ^j) relative to W^{j-1}, N̂_j = degree-0 part of N_j
/// under ad Ŷ^{j-1}, F̂_{j-1} = e^{i N̂_j} F̂_j, Ĥ_j = Ŷ^j - Ŷ^{j-1}.
pub fn grading_chain<S: Scalar>(
    ns: &[Matrix<S>],
    f: &Decreasing<S>,
    w: &Increasing<S>,
    provider: &dyn XiProvider<S>,
) -> Result<GradingChain<S>, DeligneError> {
    let r = ns.len();
    let n = w.ambient();
    for i in 0..r {
        for j in i + 1..r {
            if !ns[i].commutator(&ns[j]).is_zero() {
                return Err(DeligneError::Conditions(format!("N_{} and N_{} do not commute", i + 1, j + 1)));
            }
        }
    }
    let chain = weight_chain(ns, w)?;
    let split = provider.split(&Mhs::new(f.clone(), chain[r].clone()))?;
    let mut fhat = vec![split.fhat.clone(); r + 1];
    let mut yhat = vec![Matrix::zeros(n, n); r + 1];
    let mut nhat = vec![Matrix::zeros(n, n); r];
    let mut hhat = vec![Matrix::zeros(n, n); r];
    yhat[r] = y_grading(&fhat[r], &chain[r])?;
    for j in (1..=r).rev() {
        let nj = &ns[j - 1];
        let g = deligne_grading(nj, &fhat[j], &chain[j - 1])?;
        yhat[j - 1] = g.y;
        nhat[j - 1] = ad_component(nj, &yhat[j - 1], 0).unwrap();
        fhat[j - 1] = fhat[j].act(&nhat[j - 1].scale(&S::i()).exp_nilpotent());
        hhat[j - 1] = yhat[j].sub(&yhat[j - 1]);
    }
    Ok(GradingChain {
        w: chain,
        fhat,
        yhat,
        nhat,
        hhat,
        xi: split.xi,
    })
}

/// Commutation relations of a chain:
/// [N_k, Ĥ_j] = 0 for j > k, [Ŷ^j, N̂_k] = 0 for j < k, (N̂_j, Ĥ_j) sl2-pairs,
/// and the Ŷ^j pairwise commute.
pub fn verify_chain<S: Scalar>(ns: &[Matrix<S>], c: &GradingChain<S>) -> Result<(), String> {
    let r = ns.len();
    for j in 1..=r {
        for k in 1..j {
            if !ns[k - 1].commutator(&c.hhat[j - 1]).is_zero() {
                return Err(format!("[N_{k}, Ĥ_{j}] != 0"));
            }
        }
    }
    for k in 1..=r {
        for j in 0..k {
            if !c.yhat[j].commutator(&c.nhat[k - 1]).is_zero() {
                return Err(format!("[Ŷ^{j}, N̂_{k}] != 0"));
            }
        }
    }
    for j in 1..=r {
        let h = &c.hhat[j - 1];
        let nn = &c.nhat[j - 1];
        if !h.commutator(nn).approx_eq(&nn.scale(&S::from_i64(-2))) {
            return Err(format!("[Ĥ_{j}, N̂_{j}] != -2 N̂_{j}"));
        }
    }
    for a in 0..=r {
        for b in 0..a {
            if !c.yhat[a].commutator(&c.yhat[b]).is_zero() {
                return Err(format!("[Ŷ^{a}, Ŷ^{b}] != 0"));
            }
        }
    }
    Ok(())
}

/// Y(N_1, Y(N_2, ..., Y(N_r, Y_(F,W^r)))) by the direct construction; works
/// without any splitting hypothesis on F.
pub fn nested_grading<S: Scalar>(
    ns: &[Matrix<S>],
    f: &Decreasing<S>,
    w: &Increasing<S>,
) -> Result<Matrix<S>, DeligneError> {
    let r = ns.len();
    let chain = weight_chain(ns, w)?;
    let mut y = y_grading(f, &chain[r])?;
    for j in (1..=r).rev() {
        y = deligne_y(&ns[j - 1], &y, &chain[j - 1])?;
    }
    Ok(y)
}

/// Checks Y(N_1, ..., Y_(F̂,W^r)) = e^{-ξ} Y(N_1, ..., Y_(F,W^r)) e^{ξ}.
pub fn conjugate_chain<S: Scalar>(
    ns: &[Matrix<S>],
    f: &Decreasing<S>,
    w: &Increasing<S>,
    provider: &dyn XiProvider<S>,
) -> Result<bool, DeligneError> {
    let r = ns.len();
    let chain = weight_chain(ns, w)?;
    let split = provider.split(&Mhs::new(f.clone(), chain[r].clone()))?;
    let lhs = nested_grading(ns, &split.fhat, w)?;
    let rhs = nested_grading(ns, f, w)?;
    let rhs = rhs.conjugate_by(&split.xi.neg().exp_nilpotent(), &split.xi.exp_nilpotent());
    Ok(lhs.approx_eq(&rhs))
}

/// t_j = y_{j+1}/y_j with y_{r+1} = 1.
pub fn twist_ratios(y: &[f64]) -> Result<Vec<f64>, DeligneError> {
    if y.iter().any(|&v| !(v > 0.0)) {
        return Err(DeligneError::NonPositiveY);
    }
    Ok((0..y.len())
        .map(|j| if j + 1 < y.len() { y[j + 1] / y[j] } else { 1.0 / y[j] })
        .collect())
}

/// Inverse of `twist_ratios`.
pub fn y_from_ratios(t: &[f64]) -> Vec<f64> {
    let mut y = vec![1.0; t.len()];
    let mut acc = 1.0;
    for j in (0..t.len()).rev() {
        acc /= t[j];
        y[j] = acc;
    }
    y
}

/// Float operator Π_{j > iota} t_j^{Ŷ^j / 2}; iota = 0 gives t(y).
#[derive(Clone, Debug)]
pub struct TwistOperator {
    pub t: Vec<f64>,
    pub iota: usize,
    pub value: Matrix<Float>,
    pub inverse: Matrix<Float>,
}

impl TwistOperator {
    /// Ad(t^{-1}) X = t^{-1} X t.
    pub fn untwist(&self, x: &Matrix<Float>) -> Matrix<Float> {
        self.inverse.mul(x).mul(&self.value)
    }
}

pub fn twist<S: Scalar>(chain: &GradingChain<S>, y: &[f64], iota: usize) -> Result<TwistOperator, DeligneError> {
    let r = chain.r();
    if y.len() != r {
        return Err(DeligneError::Conditions(format!("expected {r} twist parameters, got {}", y.len())));
    }
    let t = twist_ratios(y)?;
    let n = chain.yhat[0].rows();
    let je = JointEigen::new(&chain.yhat[1..], n).ok_or_else(|| DeligneError::Conditions("Ŷ^j do not commute".into()))?;
    let b = je.basis.to_float();
    let bi = je.basis_inv.to_float();
    let diag = |sign: f64| {
        let mut d = vec![Float::new(0.0, 0.0); n];
        for (lab, range) in &je.blocks {
            let v: f64 = lab.iter().enumerate().filter(|(j, _)| *j >= iota).map(|(j, &l)| t[j].powf(sign * l as f64 / 2.0)).product();
            for i in range.clone() {
                d[i] = Float::new(v, 0.0);
            }
        }
        b.mul(&Matrix::diagonal(&d)).mul(&bi)
    };
    let value = diag(1.0);
    let inverse = diag(-1.0);
    Ok(TwistOperator { t, iota, value, inverse })
}

/// Result of fitting Ad(t^{-1}(y)) Σ i y_j N_j by monomials in t_j^{1/2}.
#[derive(Clone, Debug)]
pub struct TwistFit {
    /// exponents in units of 1/2
    pub monomials: Vec<Vec<i64>>,
    pub coefficients: Vec<Matrix<Float>>,
    pub max_residual: f64,
    pub negative_powers: bool,
    pub constant_term_error: f64,
}

impl TwistFit {
    pub fn passes(&self, tol: f64) -> bool {
        self.max_residual < tol && !self.negative_powers && self.constant_term_error < tol
    }
}

/// Candidate half-exponents of Ad(t^{-1}) y_j N_j from the joint Ŷ-degrees of N_j.
fn twist_monomials<S: Scalar>(chain: &GradingChain<S>, ns: &[Matrix<S>]) -> Result<Vec<Vec<i64>>, DeligneError> {
    let n = chain.yhat[0].rows();
    let r = chain.r();
    let je = JointEigen::new(&chain.yhat[1..], n).ok_or_else(|| DeligneError::Conditions("Ŷ^j do not commute".into()))?;
    let mut out: Vec<Vec<i64>> = vec![vec![0; r]];
    for (j, nj) in ns.iter().enumerate() {
        for (d, m) in je.ad_components(nj) {
            if m.is_zero() {
                continue;
            }
            let e: Vec<i64> = (0..r).map(|k| -d[k] - if k >= j { 2 } else { 0 }).collect();
            if !out.contains(&e) {
                out.push(e);
            }
        }
    }
    Ok(out)
}

/// Evaluates P(t) = log(Ad(t^{-1}(y)) e^{Σ i y_j N_j}) on `grid` and fits each
/// entry by least squares against the candidate monomials.
pub fn twist_polynomiality_check<S: Scalar>(
    chain: &GradingChain<S>,
    ns: &[Matrix<S>],
    grid: &[Vec<f64>],
) -> Result<TwistFit, DeligneError> {
    let r = chain.r();
    let n = chain.yhat[0].rows();
    let monomials = twist_monomials(chain, ns)?;
    let nsf: Vec<Matrix<Float>> = ns.iter().map(|m| m.to_float()).collect();
    let mut samples = Vec::with_capacity(grid.len());
    for t in grid {
        let y = y_from_ratios(t);
        let tw = twist(chain, &y, 0)?;
        let mut x = Matrix::<Float>::zeros(n, n);
        for (j, nj) in nsf.iter().enumerate() {
            x = x.add(&nj.scale(&Float::new(0.0, y[j])));
        }
        let p = tw.untwist(&x.exp_nilpotent()).log_unipotent();
        samples.push(p);
    }
    let design = Matrix::<Float>::from_fn(grid.len(), monomials.len(), |g, k| {
        let v: f64 = (0..r).map(|j| grid[g][j].powf(monomials[k][j] as f64 / 2.0)).product();
        Float::new(v, 0.0)
    });
    let dt = design.transpose();
    let normal = dt.mul(&design);
    let mut coefficients = vec![Matrix::<Float>::zeros(n, n); monomials.len()];
    let mut max_residual: f64 = 0.0;
    for a in 0..n {
        for b in 0..n {
            let rhs: Vec<Float> = samples.iter().map(|p| p[(a, b)]).collect();
            let c = normal.solve(&dt.apply(&rhs)).ok_or(DeligneError::FitFailure {
                row: a,
                col: b,
                residual: f64::INFINITY,
            })?;
            let fitted = design.apply(&c);
            let res = fitted.iter().zip(&rhs).map(|(u, v)| (u - v).norm()).fold(0.0, f64::max);
            max_residual = max_residual.max(res);
            for (k, ck) in c.into_iter().enumerate() {
                coefficients[k][(a, b)] = ck;
            }
        }
    }
    let scale = samples.iter().map(|p| p.max_abs()).fold(1.0, f64::max);
    let negative_powers = monomials
        .iter()
        .zip(&coefficients)
        .any(|(e, c)| e.iter().any(|&x| x < 0) && c.max_abs() > 1e-8 * scale);
    let mut expect = nsf[0].clone();
    for nh in &chain.nhat[1..] {
        expect = expect.add(&nh.to_float());
    }
    let expect = expect.scale(&Float::new(0.0, 1.0));
    let constant_term_error = crate::matrix::max_abs_diff(&coefficients[0], &expect);
    Ok(TwistFit {
        monomials,
        coefficients,
        max_residual,
        negative_powers,
        constant_term_error,
    })
}
