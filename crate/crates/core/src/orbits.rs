//! Nilpotent orbits and period maps in local normal form
//! F(z) = e^{N(z)} e^{Γ(s)} F∞ with s_j = e^{2πi z_j}, plus sl2-sequences.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use thiserror::Error;

use crate::deligne::weight_chain;
use crate::filtration::{Decreasing, Increasing};
use crate::matrix::Matrix;
use crate::mhs::{bigrading, is_mhs};
use crate::scalar::{rational, Exact, Float, Scalar};
use crate::subspace::Subspace;
use crate::weight::{default_cone_samples, kashiwara_checks, monodromy_weight};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OrbitError {
    #[error("exact evaluation requires Γ ≡ 0")]
    ExactnessViolation,
    #[error("Γ_{j} does not commute with N_{k}")]
    GammaKernelViolation { j: usize, k: usize },
    #[error("index {0} out of range")]
    BadIndex(usize),
    #[error("invalid sequence spec: {0}")]
    InvalidSpec(String),
    #[error("point {m} of the sequence is not in the strip I'")]
    ScheduleNotInStrip { m: usize },
    #[error("not quasi-unipotent within d <= {0}")]
    NotQuasiUnipotentWithin(u32),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

/// One monomial c · s^e of Γ.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaTerm {
    pub exponents: Vec<u32>,
    pub coeff: Matrix<Exact>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrbitScenario {
    pub name: String,
    pub w: Increasing<Exact>,
    pub f_inf: Decreasing<Exact>,
    pub ns: Vec<Matrix<Exact>>,
    pub gamma: Vec<GammaTerm>,
    /// weight k -> bilinear form on V, used on Gr^W_k
    pub polarizations: BTreeMap<i32, Matrix<Exact>>,
    /// integral basis as columns; the standard basis when absent
    pub lattice: Option<Matrix<Exact>>,
    pub k_bound: f64,
}

impl OrbitScenario {
    pub fn new(w: Increasing<Exact>, f_inf: Decreasing<Exact>, ns: Vec<Matrix<Exact>>) -> Self {
        OrbitScenario {
            name: String::new(),
            w,
            f_inf,
            ns,
            gamma: Vec::new(),
            polarizations: BTreeMap::new(),
            lattice: None,
            k_bound: 1.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.w.ambient()
    }

    pub fn r(&self) -> usize {
        self.ns.len()
    }

    pub fn gamma_is_zero(&self) -> bool {
        self.gamma.iter().all(|t| t.coeff.is_zero())
    }

    pub fn lattice_basis(&self) -> Matrix<Exact> {
        self.lattice.clone().unwrap_or_else(|| Matrix::identity(self.dim()))
    }

    /// Expresses an operator in the lattice basis: B^{-1} X B.
    pub fn in_lattice_basis<S: Scalar>(&self, x: &Matrix<S>) -> Matrix<S> {
        match &self.lattice {
            None => x.clone(),
            Some(b) => {
                let bs: Matrix<S> = b.map(|v| S::from_exact(v));
                let bi = bs.inverse().expect("lattice basis is invertible");
                bi.mul(x).mul(&bs)
            }
        }
    }

    /// N(z) = Σ z_j N_j.
    pub fn n_of<S: Scalar>(&self, z: &[S]) -> Matrix<S> {
        let n = self.dim();
        let mut out = Matrix::zeros(n, n);
        for (nj, zj) in self.ns.iter().zip(z) {
            out = out.add(&nj.map(|v| S::from_exact(v)).scale(zj));
        }
        out
    }

    /// Γ(s) in float arithmetic.
    pub fn gamma_at(&self, s: &[Float]) -> Matrix<Float> {
        let n = self.dim();
        let mut out = Matrix::zeros(n, n);
        for t in &self.gamma {
            let c = monomial(&t.exponents, s);
            out = out.add(&t.coeff.to_float().scale(&c));
        }
        out
    }

    /// ∂Γ/∂s_j at s.
    pub fn gamma_derivative(&self, s: &[Float], j: usize) -> Matrix<Float> {
        let n = self.dim();
        let mut out = Matrix::zeros(n, n);
        for t in &self.gamma {
            let e = t.exponents.get(j).copied().unwrap_or(0);
            if e == 0 {
                continue;
            }
            let mut ex = t.exponents.clone();
            ex[j] -= 1;
            let c = monomial(&ex, s) * Float::new(e as f64, 0.0);
            out = out.add(&t.coeff.to_float().scale(&c));
        }
        out
    }

    /// F(z) = e^{N(z)} e^{Γ(s)} F∞ in float mode.
    pub fn eval_float(&self, z: &[Float]) -> Decreasing<Float> {
        let s = s_of_z(z);
        let g = self.n_of(z).exp_nilpotent().mul(&self.gamma_at(&s).exp_nilpotent());
        self.f_inf.to_float().act(&g)
    }

    /// F(z) in exact mode; only available when Γ ≡ 0.
    pub fn eval_exact(&self, z: &[Exact]) -> Result<Decreasing<Exact>, OrbitError> {
        if !self.gamma_is_zero() {
            return Err(OrbitError::ExactnessViolation);
        }
        Ok(self.f_inf.act(&self.n_of(z).exp_nilpotent()))
    }

    /// The nilpotent orbit e^{iN(y)} F∞ at y (exact).
    pub fn orbit_point(&self, y: &[Exact]) -> Decreasing<Exact> {
        let iy: Vec<Exact> = y.iter().map(|v| v.clone() * Exact::i()).collect();
        self.f_inf.act(&self.n_of(&iy).exp_nilpotent())
    }

    /// The scenario with Γ replaced by Γ_j(s) = Γ(0, ..., 0, s_{j+1}, ..., s_r),
    /// checking that Γ_j commutes with N_1, ..., N_j.
    pub fn partial(&self, j: usize) -> Result<OrbitScenario, OrbitError> {
        if j > self.r() {
            return Err(OrbitError::BadIndex(j));
        }
        let gamma: Vec<GammaTerm> = self
            .gamma
            .iter()
            .filter(|t| t.exponents.iter().take(j).all(|&e| e == 0))
            .cloned()
            .collect();
        for t in &gamma {
            for (k, nk) in self.ns.iter().enumerate().take(j) {
                if !nk.commutator(&t.coeff).is_zero() {
                    return Err(OrbitError::GammaKernelViolation { j, k: k + 1 });
                }
            }
        }
        let mut out = self.clone();
        out.gamma = gamma;
        Ok(out)
    }
}

pub fn monomial(exponents: &[u32], s: &[Float]) -> Float {
    let mut c = Float::new(1.0, 0.0);
    for (e, sj) in exponents.iter().zip(s) {
        c *= sj.powu(*e);
    }
    c
}

/// s_j = e^{2πi z_j}.
pub fn s_of_z(z: &[Float]) -> Vec<Float> {
    z.iter().map(|zj| (Float::new(0.0, 2.0 * PI) * zj).exp()).collect()
}

/// One named admissibility check.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.to_string(),
            passed,
            detail: detail.into(),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct AdmissibilityReport {
    pub checks: Vec<Check>,
    pub probes: usize,
}

impl AdmissibilityReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }
}

/// Default probe values for Im z, scaled by the scenario's K.
pub fn default_probe_grid(s: &OrbitScenario) -> Vec<Vec<Exact>> {
    let base = [2i64, 5, 10, 50];
    let k = s.k_bound.max(1.0).ceil() as i64;
    let mut grid: Vec<Vec<Exact>> = vec![vec![]];
    for _ in 0..s.r() {
        let mut next = Vec::new();
        for g in &grid {
            for b in base {
                let mut v = g.clone();
                v.push(Exact::from_i64(b * k));
                next.push(v);
            }
        }
        grid = next;
    }
    grid
}

/// Structural checks plus probing of e^{iN(y)}F∞ on the grid.
pub fn check_admissible_orbit(s: &OrbitScenario, probe: &[Vec<Exact>]) -> AdmissibilityReport {
    let mut rep = AdmissibilityReport::default();
    let n = s.dim();
    let dims_ok = s.f_inf.ambient() == n
        && s.ns.iter().all(|m| m.rows() == n && m.cols() == n)
        && s.gamma.iter().all(|t| t.coeff.rows() == n && t.exponents.len() == s.r());
    rep.checks.push(Check::new("dimensions", dims_ok, ""));
    if !dims_ok {
        return rep;
    }
    rep.checks.push(Check::new("W defined over R", s.w.is_real(), ""));
    let nil: Vec<usize> = (0..s.r()).filter(|&j| !s.ns[j].is_nilpotent()).collect();
    rep.checks.push(Check::new("N_j nilpotent", nil.is_empty(), fmt_idx("not nilpotent", &nil)));
    let real: Vec<usize> = (0..s.r()).filter(|&j| !s.ns[j].is_real()).collect();
    rep.checks.push(Check::new("N_j real", real.is_empty(), fmt_idx("not real", &real)));
    let mut comm = Vec::new();
    for a in 0..s.r() {
        for b in a + 1..s.r() {
            if !s.ns[a].commutator(&s.ns[b]).is_zero() {
                comm.push(format!("[N_{}, N_{}] != 0", a + 1, b + 1));
            }
        }
    }
    rep.checks.push(Check::new("N_j commute", comm.is_empty(), comm.join("; ")));
    let pres: Vec<usize> = (0..s.r()).filter(|&j| !s.w.preserved_by(&s.ns[j])).collect();
    rep.checks.push(Check::new("N_j preserve W", pres.is_empty(), fmt_idx("does not preserve W", &pres)));
    let hor: Vec<usize> = (0..s.r()).filter(|&j| !s.f_inf.maps_into(&s.ns[j], -1)).collect();
    rep.checks.push(Check::new("horizontality N_j F^p ⊆ F^{p-1}", hor.is_empty(), fmt_idx("not horizontal", &hor)));

    let g0 = s.gamma.iter().any(|t| t.exponents.iter().all(|&e| e == 0) && !t.coeff.is_zero());
    rep.checks.push(Check::new("Γ(0) = 0", !g0, if g0 { "Γ has a constant term; the local normal form requires Γ to vanish at the origin" } else { "" }));
    let gw: Vec<usize> = (0..s.gamma.len()).filter(|&i| !s.w.preserved_by(&s.gamma[i].coeff)).collect();
    rep.checks.push(Check::new("Γ preserves W", gw.is_empty(), fmt_idx("term does not preserve W", &gw)));
    let mut kernel = Vec::new();
    for j in 1..=s.r() {
        if let Err(e) = s.partial(j) {
            kernel.push(e.to_string());
            break;
        }
    }
    rep.checks.push(Check::new("Γ_j ∈ ker ad N_1 ∩ ... ∩ ker ad N_j", kernel.is_empty(), kernel.join("; ")));

    if !(nil.is_empty() && pres.is_empty() && real.is_empty()) {
        return rep;
    }
    let chain = match weight_chain(&s.ns, &s.w) {
        Ok(c) => {
            rep.checks.push(Check::new("relative weight chain W^j exists", true, ""));
            Some(c)
        }
        Err(e) => {
            rep.checks.push(Check::new("relative weight chain W^j exists", false, e.to_string()));
            None
        }
    };
    if s.r() > 0 && comm.is_empty() {
        let k = kashiwara_checks(&s.ns, &s.w, &default_cone_samples(s.r(), 8, 0));
        let msg = match &k {
            Ok(r) if r.all_pass() => String::new(),
            Ok(r) => format!("cone constant: {}, compositions failing: {}", r.cone_constant, r.compositions.iter().filter(|c| !c.2).count()),
            Err(e) => e.to_string(),
        };
        rep.checks.push(Check::new("relative weight of the cone (constancy, composition)", msg.is_empty(), msg));
    }
    if let Some(chain) = &chain {
        let wr = chain.last().unwrap();
        match bigrading(&s.f_inf, wr) {
            Ok(bg) => {
                let mut bad = Vec::new();
                for (i, t) in s.gamma.iter().enumerate() {
                    let off: Vec<(i32, i32)> = bg
                        .components(&t.coeff)
                        .into_iter()
                        .filter(|((a, _), m)| *a >= 0 && !m.is_zero())
                        .map(|(k, _)| k)
                        .collect();
                    if !off.is_empty() {
                        bad.push(format!("term {i} has components {off:?}"));
                    }
                }
                rep.checks.push(Check::new("Γ coefficients in q", bad.is_empty(), bad.join("; ")));
            }
            Err(e) => rep.checks.push(Check::new("limit (F∞, W^r) is an MHS", false, e.to_string())),
        }
    }
    let mut probe_fail = Vec::new();
    let mut pol_fail = Vec::new();
    for y in probe {
        rep.probes += 1;
        let fy = s.orbit_point(y);
        if let Err(e) = is_mhs(&fy, &s.w) {
            probe_fail.push(format!("y = {}: {e}", fmt_y(y)));
            continue;
        }
        for (&k, q) in &s.polarizations {
            if let Err(e) = polarized_piece(&fy, &s.w, k, q, None) {
                pol_fail.push(format!("y = {}: {e}", fmt_y(y)));
            }
        }
    }
    rep.checks.push(Check::new(
        "e^{iN(y)}F∞ is an MHS on the probe grid",
        probe_fail.is_empty(),
        probe_fail.join("; "),
    ));
    if !s.polarizations.is_empty() {
        if s.r() > 0 {
            let cone = s.n_of(&vec![Exact::one(); s.r()]);
            for (&k, q) in &s.polarizations {
                if let Err(e) = polarized_piece(&s.f_inf, &s.w, k, q, Some(&cone)) {
                    pol_fail.push(format!("limit: {e}"));
                }
            }
        }
        rep.checks.push(Check::new("graded polarizations", pol_fail.is_empty(), pol_fail.join("; ")));
    }
    rep
}

fn fmt_idx(what: &str, idx: &[usize]) -> String {
    idx.iter().map(|j| format!("N_{} {what}", j + 1)).collect::<Vec<_>>().join("; ")
}

fn fmt_y(y: &[Exact]) -> String {
    let v: Vec<String> = y.iter().map(|x| x.text()).collect();
    format!("({})", v.join(", "))
}

/// Gr^W_k as coordinates on a complement C of W_{k-1} in W_k.
pub struct GradedPiece<S: Scalar> {
    pub k: i32,
    pub complement: Vec<Vec<S>>,
    lower: Subspace<S>,
    full_basis_inv: Matrix<S>,
    lower_dim: usize,
}

impl<S: Scalar> GradedPiece<S> {
    pub fn new(w: &Increasing<S>, k: i32) -> Self {
        let wk = w.get(k);
        let lower = w.get(k - 1);
        let mut acc = lower.clone();
        let mut complement = Vec::new();
        for v in wk.vectors() {
            if !acc.contains(&v) {
                acc = acc.sum(&Subspace::span(wk.ambient(), &[v.clone()]));
                complement.push(v);
            }
        }
        let mut cols = lower.vectors();
        let lower_dim = cols.len();
        cols.extend(complement.iter().cloned());
        let basis = Matrix::from_columns(&cols, wk.ambient());
        // left inverse on W_k via least-squares-free elimination: solve basis x = v
        let full_basis_inv = if cols.is_empty() { Matrix::zeros(0, wk.ambient()) } else { pseudo_inverse(&basis) };
        GradedPiece {
            k,
            complement,
            lower,
            full_basis_inv,
            lower_dim,
        }
    }

    pub fn dim(&self) -> usize {
        self.complement.len()
    }

    /// Coordinates of the class of v ∈ W_k in Gr_k.
    pub fn project(&self, v: &[S]) -> Vec<S> {
        let c = self.full_basis_inv.apply(v);
        c[self.lower_dim..].to_vec()
    }

    pub fn lower(&self) -> &Subspace<S> {
        &self.lower
    }

    /// Induced operator of X (preserving W) on Gr_k.
    pub fn operator(&self, x: &Matrix<S>) -> Matrix<S> {
        let cols: Vec<Vec<S>> = self.complement.iter().map(|c| self.project(&x.apply(c))).collect();
        Matrix::from_columns(&cols, self.dim())
    }

    /// Induced decreasing filtration on Gr_k.
    pub fn filtration(&self, f: &Decreasing<S>, wk: &Subspace<S>) -> Decreasing<S> {
        let d = self.dim();
        let steps: Vec<Subspace<S>> = (f.lowest()..=f.highest() + 1)
            .map(|p| {
                let vs: Vec<Vec<S>> = f.get(p).intersect(wk).vectors().iter().map(|v| self.project(v)).collect();
                Subspace::span(d, &vs)
            })
            .collect();
        Decreasing::from_steps(d, f.lowest(), steps)
    }

    /// Restriction of a bilinear form on V to the complement.
    pub fn form(&self, q: &Matrix<S>) -> Matrix<S> {
        let d = self.dim();
        Matrix::from_fn(d, d, |a, b| {
            let qb = q.apply(&self.complement[b]);
            self.complement[a].iter().zip(&qb).fold(S::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
        })
    }
}

/// (A^T A)^{-1} A^T for A with independent columns.
fn pseudo_inverse<S: Scalar>(a: &Matrix<S>) -> Matrix<S> {
    let at = a.transpose();
    at.mul(a).inverse().expect("independent columns").mul(&at)
}

/// Hodge–Riemann checks for the graded piece Gr^W_k under Q_k.
///
/// Without `n_op`: F induces a pure Hodge structure of weight k on Gr_k,
/// Q(H^{p,q}, H^{p',q'}) = 0 unless (p',q') = (q,p), and i^{p-q} Q(v, v̄) > 0.
/// With `n_op`: F is the limit filtration; on the primitive parts
/// P^{p,q} = ker N^{l+1} ∩ I^{p,q}, p + q = k + l, of (F, W(N)[k]) on Gr_k the
/// form i^{p-q} Q(v, N^l v̄) must be positive definite.
pub fn polarized_piece<S: Scalar>(
    f: &Decreasing<S>,
    w: &Increasing<S>,
    k: i32,
    q: &Matrix<S>,
    n_op: Option<&Matrix<S>>,
) -> Result<(), String> {
    let gp = GradedPiece::new(w, k);
    if gp.dim() == 0 {
        return Ok(());
    }
    let wk = w.get(k);
    // Q must kill W_{k-1} against W_k
    for a in gp.lower().vectors() {
        for b in wk.vectors() {
            let qb = q.apply(&b);
            let val = a.iter().zip(&qb).fold(S::zero(), |acc, (x, y)| acc + x.clone() * y.clone());
            if !val.is_zero() {
                return Err(format!("Q_{k} does not vanish on W_{} x W_{k}", k - 1));
            }
        }
    }
    let d = gp.dim();
    let fg = gp.filtration(f, &wk);
    let qg = gp.form(q);
    let (ng, m) = match n_op {
        None => (Matrix::zeros(d, d), Increasing::trivial(d, k)),
        Some(n) => {
            let ng = gp.operator(n);
            let m = monodromy_weight(&ng, k).map_err(|e| e.to_string())?;
            (ng, m)
        }
    };
    let bg = bigrading(&fg, &m).map_err(|e| format!("Gr_{k}: {e}"))?;
    let pairing = |u: &[S], v: &[S]| -> S {
        let qv = qg.apply(v);
        u.iter().zip(&qv).fold(S::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
    };
    for (&(p, qq), piece) in &bg.pieces {
        let l = p + qq - k;
        if l < 0 {
            continue;
        }
        let prim = if n_op.is_some() {
            let ker = Subspace::span(d, &ng.pow(l as u32 + 1).kernel());
            piece.intersect(&ker)
        } else {
            piece.clone()
        };
        if prim.is_zero() {
            continue;
        }
        let nl = ng.pow(l as u32);
        let vs = prim.vectors();
        let ipq: S = i_power(p - qq);
        let h = Matrix::from_fn(vs.len(), vs.len(), |a, b| {
            let vb: Vec<S> = nl.apply(&vs[b].iter().map(|x| x.conj()).collect::<Vec<_>>());
            ipq.clone() * pairing(&vs[a], &vb)
        });
        if !is_positive_definite(&h) {
            return Err(format!("Q_{k} is not positive on the ({p},{qq}) part"));
        }
        if n_op.is_none() {
            for (&(p2, q2), other) in &bg.pieces {
                if (p2, q2) == (qq, p) {
                    continue;
                }
                for u in vs.iter() {
                    for v in other.vectors() {
                        if !pairing(u, &v).is_zero() {
                            return Err(format!("Q_{k}(H^{{{p},{qq}}}, H^{{{p2},{q2}}}) != 0"));
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

fn i_power<S: Scalar>(e: i32) -> S {
    match e.rem_euclid(4) {
        0 => S::one(),
        1 => S::i(),
        2 => -S::one(),
        _ => -S::i(),
    }
}

/// Hermitian positive definiteness via LDL* without pivoting.
pub fn is_positive_definite<S: Scalar>(h: &Matrix<S>) -> bool {
    let n = h.rows();
    if !h.approx_eq(&h.conj().transpose()) {
        return false;
    }
    let mut a = h.clone();
    let scale = h.max_abs().max(1e-300);
    for k in 0..n {
        let d = a[(k, k)].clone();
        let z = d.to_complex();
        let tol = if S::EXACT { 0.0 } else { 1e-9 * scale };
        if (S::EXACT && !d.is_real()) || z.im.abs() > tol || !(z.re > tol) {
            return false;
        }
        for i in k + 1..n {
            let f = a[(i, k)].clone() / d.clone();
            for j in k..n {
                let v = a[(i, j)].clone() - f.clone() * a[(k, j)].clone();
                a[(i, j)] = v;
            }
        }
    }
    true
}

/// Smallest d ≤ d_max with every T_j^d unipotent, and N_j = log T_j^d.
pub fn unipotentize(ts: &[Matrix<Exact>], d_max: u32) -> Result<(u32, Vec<Matrix<Exact>>), OrbitError> {
    for d in 1..=d_max {
        let powers: Vec<Matrix<Exact>> = ts.iter().map(|t| t.pow(d)).collect();
        if powers.iter().all(|p| p.sub(&Matrix::identity(p.rows())).is_nilpotent()) {
            return Ok((d, powers.iter().map(|p| p.log_unipotent()).collect()));
        }
    }
    Err(OrbitError::NotQuasiUnipotentWithin(d_max))
}

/// v(m) = coef · m^power · e^{rate · m}.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Growth {
    pub coef: f64,
    #[serde(default)]
    pub power: f64,
    #[serde(default)]
    pub rate: f64,
}

impl Growth {
    pub fn at(&self, m: f64) -> f64 {
        self.coef * m.powf(self.power) * (self.rate * m).exp()
    }

    fn class(&self) -> (f64, f64) {
        (self.rate, self.power)
    }

    fn unbounded(&self) -> bool {
        self.rate > 0.0 || (self.rate == 0.0 && self.power > 0.0)
    }
}

/// limit + amp · m^{-decay}.
#[derive(Clone, Copy, Debug, PartialEq, Default, serde::Serialize, serde::Deserialize)]
pub struct Convergent {
    #[serde(default)]
    pub limit: f64,
    #[serde(default)]
    pub amp: f64,
    #[serde(default = "one")]
    pub decay: f64,
}

fn one() -> f64 {
    1.0
}

impl Convergent {
    pub fn constant(limit: f64) -> Self {
        Convergent { limit, amp: 0.0, decay: 1.0 }
    }

    pub fn at(&self, m: f64) -> f64 {
        self.limit + self.amp * m.powf(-self.decay)
    }
}

/// y(m) = T v(m) + b(m), x(m) = x-schedule.
#[derive(Clone, Debug, PartialEq)]
pub struct Sl2SequenceSpec {
    /// r × d
    pub t: Matrix<Exact>,
    pub v: Vec<Growth>,
    pub b: Vec<Convergent>,
    pub x: Vec<Convergent>,
}

#[derive(Clone, Debug)]
pub struct SequencePoint {
    pub m: usize,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub z: Vec<Float>,
    /// t_j = y_{j+1}/y_j, y_{r+1} = 1
    pub t: Vec<f64>,
}

impl Sl2SequenceSpec {
    /// Strict sequence with T = identity, b = 0 and constant x.
    pub fn strict(v: Vec<Growth>, x: Vec<f64>) -> Self {
        let r = v.len();
        Sl2SequenceSpec {
            t: Matrix::identity(r),
            v,
            b: vec![Convergent::default(); r],
            x: x.into_iter().map(Convergent::constant).collect(),
        }
    }

    pub fn r(&self) -> usize {
        self.t.rows()
    }

    pub fn d(&self) -> usize {
        self.t.cols()
    }

    pub fn validate(&self) -> Result<(), OrbitError> {
        let bad = |m: &str| Err(OrbitError::InvalidSpec(m.to_string()));
        if self.v.len() != self.d() {
            return bad("v must have one entry per column of T");
        }
        if self.b.len() != self.r() || self.x.len() != self.r() {
            return bad("b and x must have one entry per row of T");
        }
        if !self.t.is_real() {
            return bad("T must be real");
        }
        for g in &self.v {
            if !(g.coef > 0.0) || !g.unbounded() {
                return bad("each v_j must be positive and unbounded");
            }
        }
        for w in self.v.windows(2) {
            if w[1].class() >= w[0].class() {
                return bad("v_{j+1}/v_j must tend to 0 (order v by decreasing growth)");
            }
        }
        for c in self.b.iter().chain(&self.x) {
            if c.amp != 0.0 && !(c.decay > 0.0) {
                return bad("b and x schedules must converge");
            }
        }
        Ok(())
    }

    pub fn is_strict(&self) -> bool {
        self.d() == self.r()
            && self.t == Matrix::identity(self.r())
            && self.b.iter().all(|c| c.limit == 0.0 && c.amp == 0.0)
    }

    /// θ^i = T(e_i).
    pub fn theta(&self) -> Vec<Vec<Exact>> {
        (0..self.d()).map(|i| self.t.column(i)).collect()
    }

    /// Θ^j = span(θ^1, ..., θ^j) for j = 1..d.
    pub fn flag(&self) -> Vec<Subspace<Exact>> {
        let th = self.theta();
        (1..=self.d()).map(|j| Subspace::span(self.r(), &th[..j])).collect()
    }

    /// Growth class (rate, power) of y_i, None when bounded.
    fn y_class(&self, i: usize) -> Option<(f64, f64)> {
        (0..self.d()).find(|&j| !self.t[(i, j)].is_zero()).map(|j| self.v[j].class())
    }

    /// Smallest index with non-polynomial growth (1-based), 0 when bounded.
    pub fn iota(&self) -> usize {
        let r = self.r();
        for i in 0..r {
            let ci = match self.y_class(i) {
                Some(c) => c,
                None => continue,
            };
            let next = if i + 1 < r { self.y_class(i + 1) } else { None };
            match next {
                None => return i + 1,
                Some((rate, _)) if ci.0 > 0.0 && rate == 0.0 => return i + 1,
                _ => {}
            }
        }
        0
    }

    pub fn point(&self, m: usize) -> SequencePoint {
        let mf = m as f64;
        let v: Vec<f64> = self.v.iter().map(|g| g.at(mf)).collect();
        let tf = self.t.to_float();
        let y: Vec<f64> = (0..self.r())
            .map(|i| (0..self.d()).map(|j| tf[(i, j)].re * v[j]).sum::<f64>() + self.b[i].at(mf))
            .collect();
        let x: Vec<f64> = self.x.iter().map(|c| c.at(mf)).collect();
        let z = x.iter().zip(&y).map(|(&a, &b)| Float::new(a, b)).collect();
        let t = ratios(&y);
        SequencePoint { m, x, y, z, t }
    }

    /// First m (≥ 1) from which the points stay in I' up to `horizon`.
    pub fn burn_in(&self, horizon: usize) -> Option<usize> {
        let mut start = None;
        for m in 1..=horizon {
            if in_strip_prime(&self.point(m)) {
                start.get_or_insert(m);
            } else {
                start = None;
            }
        }
        start
    }

    pub fn gen_sequence(&self, m: usize) -> Result<SequencePoint, OrbitError> {
        self.validate()?;
        let p = self.point(m);
        if !in_strip_prime(&p) {
            return Err(OrbitError::ScheduleNotInStrip { m });
        }
        Ok(p)
    }
}

pub fn ratios(y: &[f64]) -> Vec<f64> {
    (0..y.len())
        .map(|j| if j + 1 < y.len() { y[j + 1] / y[j] } else { 1.0 / y[j] })
        .collect()
}

/// x ∈ [0,1]^r, y ≥ 1, t_j ∈ (0, 1].
pub fn in_strip_prime(p: &SequencePoint) -> bool {
    p.x.iter().all(|&x| (0.0..=1.0).contains(&x))
        && p.y.iter().all(|&y| y >= 1.0)
        && p.t.iter().all(|&t| t > 0.0 && t <= 1.0)
}

/// Permutation σ with y_{σ(0)} ≥ y_{σ(1)} ≥ ...; applying it moves a point of I into I'.
pub fn sorting_permutation(y: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..y.len()).collect();
    idx.sort_by(|&a, &b| y[b].partial_cmp(&y[a]).unwrap_or(std::cmp::Ordering::Equal).then(a.cmp(&b)));
    idx
}

pub fn permute<T: Clone>(v: &[T], sigma: &[usize]) -> Vec<T> {
    sigma.iter().map(|&i| v[i].clone()).collect()
}

/// N(θ) = Σ θ_k N_k for each θ^i.
pub fn theta_monodromies(s: &OrbitScenario, spec: &Sl2SequenceSpec) -> Vec<Matrix<Exact>> {
    spec.theta().iter().map(|th| s.n_of(th)).collect()
}

pub fn rational_y(values: &[i64]) -> Vec<Exact> {
    values.iter().map(|&v| Exact::new(rational(v, 1), rational(0, 1))).collect()
}
