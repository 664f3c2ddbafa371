//! Admissible normal functions as extensions 0 → H → V → ℤ(0) → 0: the
//! pointwise zero test, the zero-locus scanner and the density analyzer.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::DMatrix;
use rayon::prelude::*;
use thiserror::Error;

use crate::asymptotics::rationalize_integral;
use crate::deligne::{nested_grading, weight_chain, DeligneError};
use crate::filtration::Decreasing;
use crate::matrix::Matrix;
use crate::mhs::{bigrading, is_mhs, y_grading, Mhs, MhsError};
use crate::orbits::{s_of_z, OrbitScenario};
use crate::scalar::{exact_from_complex, Exact, Float, Scalar};
use crate::splitting::XiProvider;
use crate::subspace::Subspace;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NormalFunctionError {
    #[error("not an extension of Z(0) by a pure structure of negative weight: {0}")]
    Shape(String),
    #[error("(F(z), W) is not a mixed Hodge structure at z = {z:?}: {detail}")]
    NotMhsAtPoint { z: Vec<Float>, detail: String },
    #[error("no integral grading candidate: {0}")]
    NoIntegralCandidate(String),
    #[error("Γ(s) is not nilpotent as a polynomial")]
    GammaNotNilpotent,
    #[error(transparent)]
    Deligne(#[from] DeligneError),
    #[error(transparent)]
    Mhs(#[from] MhsError),
}

impl NormalFunctionError {
    pub fn is_xi_unavailable(&self) -> bool {
        matches!(
            self,
            NormalFunctionError::Mhs(MhsError::XiUnavailable(_))
                | NormalFunctionError::Deligne(DeligneError::Mhs(MhsError::XiUnavailable(_)))
        )
    }
}

/// An orbit scenario whose W has exactly two graded pieces: Gr_0 of rank 1
/// and Gr_w = H with w < 0.
#[derive(Clone, Debug)]
pub struct NormalFunctionData {
    pub scenario: OrbitScenario,
    pub w: i32,
    pub h_rank: usize,
}

impl NormalFunctionData {
    pub fn new(scenario: OrbitScenario) -> Result<Self, NormalFunctionError> {
        let wf = &scenario.w;
        let pieces: Vec<(i32, usize)> = wf.weights().into_iter().map(|k| (k, wf.gr_dim(k))).filter(|p| p.1 > 0).collect();
        let shape = |m: String| Err(NormalFunctionError::Shape(m));
        if pieces.len() != 2 {
            return shape(format!("W has {} nonzero graded pieces, expected 2", pieces.len()));
        }
        let (w, h_rank) = pieces[0];
        let (top, top_rank) = pieces[1];
        if top != 0 || top_rank != 1 {
            return shape(format!("top graded piece is Gr_{top} of rank {top_rank}, expected Gr_0 of rank 1"));
        }
        if w >= 0 {
            return shape(format!("H has weight {w}, expected a negative weight"));
        }
        Ok(NormalFunctionData { scenario, w, h_rank })
    }

    /// H = W_w.
    pub fn h(&self) -> Subspace<Exact> {
        self.scenario.w.get(self.w)
    }
}

/// When Y/w is integral it is an MHS morphism V → H that is the identity on H.
#[derive(Clone, Debug)]
pub struct Retraction {
    /// (1/w) Y in the lattice basis
    pub matrix: Matrix<Exact>,
    pub identity_on_h: bool,
    pub idempotent: bool,
    pub preserves_f: bool,
}

impl Retraction {
    pub fn is_valid(&self) -> bool {
        self.identity_on_h && self.idempotent && self.preserves_f
    }
}

#[derive(Clone, Debug)]
pub struct ZeroTest {
    pub z: Vec<Float>,
    pub grading: Matrix<Float>,
    /// Y in the lattice basis, when Y/w is integral within tolerance
    pub integral: Option<Matrix<Exact>>,
    pub residual: f64,
    /// set when Γ ≡ 0 and the grading was recomputed exactly at z
    pub exact_confirmed: Option<bool>,
    pub retraction: Option<Retraction>,
}

impl ZeroTest {
    pub fn is_zero(&self) -> bool {
        self.integral.is_some() && self.exact_confirmed != Some(false)
    }
}

/// z_j = log(s_j) / 2πi on the principal branch.
pub fn z_of_s(s: &[Float]) -> Vec<Float> {
    s.iter().map(|sj| Float::new(sj.arg() / (2.0 * PI), -sj.norm().ln() / (2.0 * PI))).collect()
}

/// The zero test at z: Y_(F(z),W) ∈ w End(V_Z).
pub fn zero_test_point(nf: &NormalFunctionData, z: &[Float], tol: f64) -> Result<ZeroTest, NormalFunctionError> {
    let s = &nf.scenario;
    let f = s.eval_float(z);
    let wf = s.w.to_float();
    is_mhs(&f, &wf).map_err(|e| NormalFunctionError::NotMhsAtPoint { z: z.to_vec(), detail: e.to_string() })?;
    let y = y_grading(&f, &wf).map_err(|e| NormalFunctionError::NotMhsAtPoint { z: z.to_vec(), detail: e.to_string() })?;
    let wv = Float::new(nf.w as f64, 0.0);
    let scaled = s.in_lattice_basis(&y).scale(&(Float::new(1.0, 0.0) / wv));
    let mut out = ZeroTest { z: z.to_vec(), grading: y, integral: None, residual: f64::NAN, exact_confirmed: None, retraction: None };
    let Some((r, residual)) = rationalize_integral(&scaled, tol) else {
        out.residual = integrality_residual(&scaled);
        return Ok(out);
    };
    out.residual = residual;
    let yl = r.scale(&Exact::from_i64(nf.w as i64));
    let b = s.lattice_basis();
    let ystd = b.mul(&yl).mul(&b.inverse().expect("lattice basis is invertible"));
    if !s.w.is_graded_by(&ystd) {
        return Ok(out);
    }
    if s.gamma_is_zero() {
        out.exact_confirmed = Some(exact_grading_at(s, z).is_some_and(|ye| ye == ystd));
    }
    out.retraction = Some(retraction_witness(nf, &r, &ystd, &f));
    out.integral = Some(yl);
    Ok(out)
}

fn integrality_residual(x: &Matrix<Float>) -> f64 {
    x.entries().iter().map(|v| (v.re - v.re.round()).abs().max(v.im.abs())).fold(0.0, f64::max)
}

/// Y_(F(z),W) in exact arithmetic at the binary-rational point z (Γ ≡ 0).
fn exact_grading_at(s: &OrbitScenario, z: &[Float]) -> Option<Matrix<Exact>> {
    let ze: Vec<Exact> = z.iter().map(|c| exact_from_complex(*c)).collect::<Option<_>>()?;
    let f = s.eval_exact(&ze).ok()?;
    y_grading(&f, &s.w).ok()
}

fn retraction_witness(nf: &NormalFunctionData, r_lat: &Matrix<Exact>, ystd: &Matrix<Exact>, f: &Decreasing<Float>) -> Retraction {
    let rstd = ystd.scale(&(Exact::one() / Exact::from_i64(nf.w as i64)));
    let h = nf.h();
    let identity_on_h = h.vectors().iter().all(|v| rstd.apply(v) == *v);
    let idempotent = rstd.mul(&rstd) == rstd;
    let rf = rstd.to_float();
    let preserves_f = f.steps().all(|(_, sp)| sp.vectors().iter().all(|v| sp.contains(&rf.apply(v))));
    Retraction { matrix: r_lat.clone(), identity_on_h, idempotent, preserves_f }
}

/// Product grid in (Δ*)^r: each s_j runs over radius × angle samples.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PolarGrid {
    pub radii: Vec<f64>,
    pub angles: usize,
    /// angle offset in units of a full turn
    #[serde(default)]
    pub phase: f64,
}

impl PolarGrid {
    pub fn uniform(n_radii: usize, r_min: f64, r_max: f64, angles: usize) -> Self {
        let radii = (0..n_radii)
            .map(|k| if n_radii == 1 { r_min } else { r_min + (r_max - r_min) * k as f64 / (n_radii - 1) as f64 })
            .collect();
        PolarGrid { radii, angles, phase: 0.0 }
    }

    fn cell(&self) -> usize {
        self.radii.len() * self.angles
    }

    pub fn value(&self, k: usize) -> Float {
        let (ri, ai) = (k / self.angles, k % self.angles);
        let th = 2.0 * PI * (ai as f64 / self.angles as f64 + self.phase);
        Float::from_polar(self.radii[ri], th)
    }

    /// All points as (per-coordinate index, s).
    pub fn points(&self, r: usize) -> Vec<(Vec<usize>, Vec<Float>)> {
        let c = self.cell();
        let total = c.pow(r as u32);
        (0..total)
            .map(|mut t| {
                let mut idx = Vec::with_capacity(r);
                for _ in 0..r {
                    idx.push(t % c);
                    t /= c;
                }
                let s = idx.iter().map(|&k| self.value(k)).collect();
                (idx, s)
            })
            .collect()
    }

    fn adjacent(&self, a: &[usize], b: &[usize]) -> bool {
        a.iter().zip(b).all(|(&x, &y)| {
            let (rx, ax) = ((x / self.angles) as i64, (x % self.angles) as i64);
            let (ry, ay) = ((y / self.angles) as i64, (y % self.angles) as i64);
            let da = (ax - ay).rem_euclid(self.angles as i64);
            (rx - ry).abs() <= 1 && (da <= 1 || da == self.angles as i64 - 1)
        })
    }

    /// Largest distance between neighbouring samples of one coordinate.
    pub fn cell_size(&self) -> f64 {
        let dr = self.radii.windows(2).map(|w| (w[1] - w[0]).abs()).fold(0.0, f64::max);
        let rmax = self.radii.iter().cloned().fold(0.0, f64::max);
        dr + 2.0 * PI * rmax / self.angles as f64
    }
}

#[derive(Clone, Debug)]
pub struct GridHit {
    pub index: Vec<usize>,
    pub s: Vec<Float>,
    /// Y in the lattice basis
    pub grading: Matrix<Exact>,
    pub residual: f64,
}

#[derive(Clone, Debug)]
pub struct CertifiedRoot {
    pub cluster: usize,
    pub s: Vec<Float>,
    pub residual: f64,
    pub iterations: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum DensityVerdict {
    Discrete,
    CurveSuspect,
    DenseSuspect,
}

impl DensityVerdict {
    pub fn label(&self) -> &'static str {
        match self {
            DensityVerdict::Discrete => "discrete",
            DensityVerdict::CurveSuspect => "curve-suspect",
            DensityVerdict::DenseSuspect => "dense-suspect",
        }
    }
}

#[derive(Clone, Debug)]
pub struct ZeroLocusReport {
    pub grid_points: usize,
    pub hits: Vec<GridHit>,
    /// indices into `hits`, one vector per cluster
    pub clusters: Vec<Vec<usize>>,
    pub roots: Vec<CertifiedRoot>,
    /// clusters whose Newton refinement did not reach the residual target
    pub uncertified: Vec<usize>,
    pub skipped: usize,
    pub verdict: DensityVerdict,
}

impl ZeroLocusReport {
    /// Distinct integral gradings among the hits.
    pub fn gradings(&self) -> Vec<Matrix<Exact>> {
        let mut out: Vec<Matrix<Exact>> = Vec::new();
        for h in &self.hits {
            if !out.contains(&h.grading) {
                out.push(h.grading.clone());
            }
        }
        out
    }

    pub fn hits_csv(&self) -> String {
        let r = self.hits.first().map_or(0, |h| h.s.len());
        let mut wtr = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["kind".to_string(), "cluster".into()];
        for j in 1..=r {
            header.push(format!("re_s{j}"));
            header.push(format!("im_s{j}"));
        }
        header.push("residual".into());
        wtr.write_record(&header).unwrap();
        let mut cluster_of = vec![0; self.hits.len()];
        for (c, members) in self.clusters.iter().enumerate() {
            for &h in members {
                cluster_of[h] = c;
            }
        }
        for (k, h) in self.hits.iter().enumerate() {
            let mut rec = vec!["hit".to_string(), cluster_of[k].to_string()];
            for sj in &h.s {
                rec.push(format!("{:.15e}", sj.re));
                rec.push(format!("{:.15e}", sj.im));
            }
            rec.push(format!("{:.3e}", h.residual));
            wtr.write_record(&rec).unwrap();
        }
        for root in &self.roots {
            let mut rec = vec!["root".to_string(), root.cluster.to_string()];
            for sj in &root.s {
                rec.push(format!("{:.15e}", sj.re));
                rec.push(format!("{:.15e}", sj.im));
            }
            rec.push(format!("{:.3e}", root.residual));
            wtr.write_record(&rec).unwrap();
        }
        String::from_utf8(wtr.into_inner().unwrap()).unwrap()
    }
}

pub const NEWTON_MAX_STEPS: usize = 50;
pub const NEWTON_TARGET: f64 = 1e-12;

/// The system e^{Γ(s)}.Y∞ - e^{-N(z)}.Y_Z with z = log(s)/2πi.
pub struct SimpleSystem<'a> {
    pub scenario: &'a OrbitScenario,
    pub y_inf: Matrix<Float>,
    pub y_z: Matrix<Float>,
}

impl SimpleSystem<'_> {
    pub fn lhs(&self, s: &[Float]) -> Matrix<Float> {
        let g = self.scenario.gamma_at(s);
        self.y_inf.conjugate_by(&g.exp_nilpotent(), &g.neg().exp_nilpotent())
    }

    pub fn rhs(&self, s: &[Float]) -> Matrix<Float> {
        let nz = self.scenario.n_of(&z_of_s(s));
        self.y_z.conjugate_by(&nz.neg().exp_nilpotent(), &nz.exp_nilpotent())
    }

    pub fn residual(&self, s: &[Float]) -> Matrix<Float> {
        self.lhs(s).sub(&self.rhs(s))
    }

    /// Columns ∂/∂s_j of the residual, flattened.
    pub fn jacobian(&self, s: &[Float]) -> Vec<Matrix<Float>> {
        let g = self.scenario.gamma_at(s);
        let e = g.exp_nilpotent();
        let ei = g.neg().exp_nilpotent();
        let rhs = self.rhs(s);
        (0..s.len())
            .map(|j| {
                let dg = self.scenario.gamma_derivative(s, j);
                let de = dexp(&g, &dg);
                let dei = dexp(&g.neg(), &dg.neg());
                let dl = de.mul(&self.y_inf).mul(&ei).add(&e.mul(&self.y_inf).mul(&dei));
                // d/dz_j e^{-N(z)} Y e^{N(z)} = -[N_j, ·]; dz_j/ds_j = 1/(2πi s_j)
                let nj = self.scenario.ns[j].to_float();
                let dz = Float::new(1.0, 0.0) / (Float::new(0.0, 2.0 * PI) * s[j]);
                let dr = nj.commutator(&rhs).neg().scale(&dz);
                dl.sub(&dr)
            })
            .collect()
    }
}

/// Derivative of exp at a nilpotent X in direction D: Σ_k 1/(k+1)! Σ_a X^a D X^{k-a}.
pub fn dexp(x: &Matrix<Float>, d: &Matrix<Float>) -> Matrix<Float> {
    let n = x.rows();
    let mut powers = vec![Matrix::identity(n)];
    for k in 1..=n {
        powers.push(powers[k - 1].mul(x));
    }
    let mut out = Matrix::zeros(n, n);
    let mut fact = 1.0;
    for k in 0..=n {
        fact *= (k + 1) as f64;
        let mut term = Matrix::zeros(n, n);
        for a in 0..=k {
            term = term.add(&powers[a].mul(d).mul(&powers[k - a]));
        }
        out = out.add(&term.scale(&Float::new(1.0 / fact, 0.0)));
    }
    out
}

/// Damped Gauss-Newton with minimum-norm steps.
pub fn newton_refine(sys: &SimpleSystem, s0: &[Float]) -> (Vec<Float>, f64, usize) {
    let mut s = s0.to_vec();
    let mut res = sys.residual(&s).max_abs();
    let mut it = 0;
    while res >= NEWTON_TARGET && it < NEWTON_MAX_STEPS {
        it += 1;
        let f = sys.residual(&s).flatten();
        let cols = sys.jacobian(&s);
        let m = f.len();
        let j = DMatrix::from_fn(m, s.len(), |a, b| cols[b].entries()[a]);
        let Ok(pinv) = j.pseudo_inverse(1e-12) else { break };
        let rhs = DMatrix::from_fn(m, 1, |a, _| f[a]);
        let step = pinv * rhs;
        let mut lambda = 1.0;
        let mut improved = false;
        for _ in 0..30 {
            let cand: Vec<Float> = s.iter().enumerate().map(|(k, v)| v - step[k] * lambda).collect();
            if cand.iter().all(|c| c.norm() < 1.0 && c.norm() > 0.0) {
                let r = sys.residual(&cand).max_abs();
                if r < res {
                    s = cand;
                    res = r;
                    improved = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !improved {
            break;
        }
    }
    (s, res, it)
}

/// Grid sweep of the zero test, clustering of hits and Newton certification
/// of one representative per cluster.
pub fn scan_zero_locus(
    nf: &NormalFunctionData,
    grid: &PolarGrid,
    tol: f64,
    certify: bool,
) -> Result<ZeroLocusReport, NormalFunctionError> {
    let s = &nf.scenario;
    let r = s.r();
    let points = grid.points(r);
    let tests: Vec<Option<Result<ZeroTest, NormalFunctionError>>> = points
        .par_iter()
        .map(|(_, sv)| match zero_test_point(nf, &z_of_s(sv), tol) {
            Ok(t) => Some(Ok(t)),
            Err(NormalFunctionError::NotMhsAtPoint { .. }) => None,
            Err(e) => Some(Err(e)),
        })
        .collect();
    let mut hits = Vec::new();
    let mut skipped = 0;
    for ((idx, sv), t) in points.iter().zip(tests) {
        match t {
            None => skipped += 1,
            Some(Err(e)) => return Err(e),
            Some(Ok(t)) => {
                if t.is_zero() {
                    hits.push(GridHit { index: idx.clone(), s: sv.clone(), grading: t.integral.unwrap(), residual: t.residual });
                }
            }
        }
    }
    let clusters = cluster_hits(grid, &hits);
    let mut roots = Vec::new();
    let mut uncertified = Vec::new();
    if certify && !clusters.is_empty() {
        let y_inf = nested_grading(&s.ns, &s.f_inf, &s.w)?.to_float();
        let b = s.lattice_basis();
        let bi = b.inverse().expect("lattice basis is invertible");
        let refined: Vec<(usize, Vec<Float>, f64, usize)> = clusters
            .par_iter()
            .enumerate()
            .map(|(c, members)| {
                let h = &hits[members[0]];
                let y_z = b.mul(&h.grading).mul(&bi).to_float();
                let sys = SimpleSystem { scenario: s, y_inf: y_inf.clone(), y_z };
                let (sv, res, it) = newton_refine(&sys, &h.s);
                (c, sv, res, it)
            })
            .collect();
        for (c, sv, res, it) in refined {
            if res < NEWTON_TARGET {
                roots.push(CertifiedRoot { cluster: c, s: sv, residual: res, iterations: it });
            } else {
                uncertified.push(c);
            }
        }
    }
    let evaluated = points.len() - skipped;
    let verdict = if evaluated > 0 && hits.len() == evaluated {
        DensityVerdict::DenseSuspect
    } else if clusters.iter().any(|c| c.len() >= 3) {
        DensityVerdict::CurveSuspect
    } else {
        DensityVerdict::Discrete
    };
    Ok(ZeroLocusReport { grid_points: points.len(), hits, clusters, roots, uncertified, skipped, verdict })
}

/// Connected components of hits with the same grading under grid adjacency.
fn cluster_hits(grid: &PolarGrid, hits: &[GridHit]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; hits.len()];
    let mut out = Vec::new();
    for start in 0..hits.len() {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut comp = vec![start];
        let mut k = 0;
        while k < comp.len() {
            let a = comp[k];
            for b in 0..hits.len() {
                if !seen[b] && hits[b].grading == hits[a].grading && grid.adjacent(&hits[a].index, &hits[b].index) {
                    seen[b] = true;
                    comp.push(b);
                }
            }
            k += 1;
        }
        out.push(comp);
    }
    out
}

/// Matrix-valued polynomial in s.
pub type MatPoly = BTreeMap<Vec<u32>, Matrix<Exact>>;

fn poly_mul(a: &MatPoly, b: &MatPoly) -> MatPoly {
    let mut out = MatPoly::new();
    for (ea, ma) in a {
        for (eb, mb) in b {
            let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            let p = ma.mul(mb);
            let n = p.rows();
            let slot = out.entry(e).or_insert_with(|| Matrix::zeros(n, n));
            *slot = slot.add(&p);
        }
    }
    out.retain(|_, m| !m.is_zero());
    out
}

fn poly_add(a: &MatPoly, b: &MatPoly, sign: i64) -> MatPoly {
    let mut out = a.clone();
    for (e, m) in b {
        let n = m.rows();
        let slot = out.entry(e.clone()).or_insert_with(|| Matrix::zeros(n, n));
        *slot = slot.add(&m.scale(&Exact::from_i64(sign)));
    }
    out.retain(|_, m| !m.is_zero());
    out
}

fn poly_const(m: Matrix<Exact>, r: usize) -> MatPoly {
    let mut p = MatPoly::new();
    if !m.is_zero() {
        p.insert(vec![0; r], m);
    }
    p
}

/// e^{±Γ(s)} as a polynomial; requires Γ(s)^n ≡ 0.
fn poly_exp(s: &OrbitScenario, sign: i64) -> Result<MatPoly, NormalFunctionError> {
    let n = s.dim();
    let r = s.r();
    let mut g = MatPoly::new();
    for t in &s.gamma {
        let slot = g.entry(t.exponents.clone()).or_insert_with(|| Matrix::zeros(n, n));
        *slot = slot.add(&t.coeff.scale(&Exact::from_i64(sign)));
    }
    g.retain(|_, m| !m.is_zero());
    let mut out = poly_const(Matrix::identity(n), r);
    let mut power = poly_const(Matrix::identity(n), r);
    for k in 1..=n {
        power = poly_mul(&power, &g);
        let inv = Exact::one() / Exact::from_i64((1..=k as i64).product());
        let term: MatPoly = power.iter().map(|(e, m)| (e.clone(), m.scale(&inv))).collect();
        out = poly_add(&out, &term, 1);
    }
    if !poly_mul(&power, &g).is_empty() {
        return Err(NormalFunctionError::GammaNotNilpotent);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub enum AnalyzerVerdict {
    /// [N_i, Y_Z] = 0 and e^{Γ(s)}.Y∞ ≡ Y_Z: the zero locus is all of S.
    ZeroLocusIsS,
    /// Ω ≠ ∅, so exp(2πi b γ_j(s)) = Π s_i^{b β_ij} cannot hold identically.
    DensityRefutedByObstruction { omega: Vec<usize> },
    /// γ(s) leaves L∞(C^r), which density would forbid.
    DensityRefutedGammaOutsideImage,
    /// Ω = ∅ but e^{Γ(s)}.Y∞ = Y_Z cuts out a proper algebraic subset.
    DensityRefutedProperLocus,
}

impl AnalyzerVerdict {
    pub fn label(&self) -> &'static str {
        match self {
            AnalyzerVerdict::ZeroLocusIsS => "zero locus = S",
            AnalyzerVerdict::DensityRefutedByObstruction { .. } => "density refuted (exponential obstruction)",
            AnalyzerVerdict::DensityRefutedGammaOutsideImage => "density refuted (γ outside L∞)",
            AnalyzerVerdict::DensityRefutedProperLocus => "density refuted (proper locus)",
        }
    }
}

#[derive(Clone, Debug)]
pub struct DensityAnalysis {
    pub y_inf: Matrix<Exact>,
    pub y_z: Matrix<Exact>,
    pub xi_tilde: Matrix<Exact>,
    /// Y_Z = e^{-ξ̃}.Y∞
    pub conjugation_consistent: bool,
    pub kernels_agree: bool,
    /// 1-based indices
    pub omega: Vec<usize>,
    /// β[i][k] is β_{i, omega[k]}
    pub beta: Vec<Vec<Exact>>,
    /// γ(s) coefficients: monomial -> coordinates in the basis L_j (j ∈ Ω), when in the span
    pub gamma_coefficients: BTreeMap<Vec<u32>, Option<Vec<Exact>>>,
    pub locus_identical: bool,
    pub verdict: AnalyzerVerdict,
}

impl DensityAnalysis {
    pub fn report(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("verdict: {}\n", self.verdict.label()));
        out.push_str(&format!("Ω = {:?}\n", self.omega));
        for (i, row) in self.beta.iter().enumerate() {
            let cells: Vec<String> = row.iter().map(crate::scalar::format_exact).collect();
            out.push_str(&format!("β_{},Ω = [{}]\n", i + 1, cells.join(", ")));
        }
        out.push_str(&format!("kernels of L∞ and L_Z agree: {}\n", self.kernels_agree));
        out.push_str(&format!("Y_Z = e^(-ξ̃).Y∞: {}\n", self.conjugation_consistent));
        out.push_str(&format!("e^Γ(s).Y∞ ≡ Y_Z: {}\n", self.locus_identical));
        out
    }
}

fn flat_span(ms: &[Matrix<Exact>]) -> Matrix<Exact> {
    let n2 = ms.first().map_or(0, |m| m.rows() * m.cols());
    Matrix::from_columns(&ms.iter().map(|m| m.flatten()).collect::<Vec<_>>(), n2)
}

/// Kernel of z ↦ [N(z), Y] as a subspace of C^r.
fn commutator_kernel(ns: &[Matrix<Exact>], y: &Matrix<Exact>) -> Subspace<Exact> {
    let cols: Vec<Matrix<Exact>> = ns.iter().map(|nj| nj.commutator(y)).collect();
    Subspace::span(ns.len(), &flat_span(&cols).kernel())
}

/// Density analysis of a candidate integral grading Y_Z: kernels of L∞
/// and L_Z, Ω and β, the (-1,-1) part γ(s) and the exponential obstruction.
/// `mu` is the limit of the real parts along the sequence (ξ̃ = ξ - N(μ)).
pub fn analyze_density(
    nf: &NormalFunctionData,
    y_z: &Matrix<Exact>,
    mu: &[Exact],
    provider: &dyn XiProvider<Exact>,
) -> Result<DensityAnalysis, NormalFunctionError> {
    let s = &nf.scenario;
    let r = s.r();
    let lat = s.in_lattice_basis(y_z);
    if !lat.entries().iter().all(crate::scalar::is_gaussian_integer_real) {
        return Err(NormalFunctionError::NoIntegralCandidate("Y_Z is not integral in the lattice basis".into()));
    }
    if !s.w.is_graded_by(y_z) {
        return Err(NormalFunctionError::NoIntegralCandidate("Y_Z does not grade W".into()));
    }
    let chain = weight_chain(&s.ns, &s.w)?;
    let m = chain[r].clone();
    let y_inf = nested_grading(&s.ns, &s.f_inf, &s.w)?;
    let split = provider.split(&Mhs::new(s.f_inf.clone(), m.clone()))?;
    let mut mu_full = mu.to_vec();
    mu_full.resize(r, Exact::zero());
    let xi_tilde = split.xi.sub(&s.n_of(&mu_full));
    let conjugation_consistent =
        y_inf.conjugate_by(&xi_tilde.neg().exp_nilpotent(), &xi_tilde.exp_nilpotent()) == *y_z;
    let kernels_agree = commutator_kernel(&s.ns, &y_inf) == commutator_kernel(&s.ns, y_z);

    // Ω: greedy basis of L_Z(Q^r); β by exact solve
    let lz: Vec<Matrix<Exact>> = s.ns.iter().map(|nj| nj.commutator(y_z)).collect();
    let mut omega: Vec<usize> = Vec::new();
    for j in 0..r {
        let mut cand: Vec<Matrix<Exact>> = omega.iter().map(|&k| lz[k].clone()).collect();
        cand.push(lz[j].clone());
        if flat_span(&cand).rank() == cand.len() {
            omega.push(j);
        }
    }
    let basis = flat_span(&omega.iter().map(|&k| lz[k].clone()).collect::<Vec<_>>());
    let beta: Vec<Vec<Exact>> = if omega.is_empty() {
        vec![vec![]; r]
    } else {
        lz.iter()
            .map(|l| basis.solve(&l.flatten()).expect("[N_i, Y_Z] lies in the span of the Ω columns"))
            .collect()
    };

    // γ(s) = (e^{ξ̃} e^{Γ(s)}.Y∞)^{-1,-1} with respect to (F∞, M)
    let bg = bigrading(&s.f_inf, &m)?;
    let eg = poly_exp(s, 1)?;
    let egi = poly_exp(s, -1)?;
    let conj = poly_mul(&poly_mul(&eg, &poly_const(y_inf.clone(), r)), &egi);
    let ex = xi_tilde.exp_nilpotent();
    let exi = xi_tilde.neg().exp_nilpotent();
    let linf: Vec<Matrix<Exact>> = omega.iter().map(|&k| s.ns[k].commutator(&y_inf)).collect();
    let lbasis = flat_span(&linf);
    let mut gamma_coefficients = BTreeMap::new();
    let mut outside = false;
    for (e, c) in &conj {
        let g = bg.component(&ex.mul(c).mul(&exi), -1, -1);
        let coords = if g.is_zero() {
            Some(vec![Exact::zero(); omega.len()])
        } else if omega.is_empty() {
            None
        } else {
            lbasis.solve(&g.flatten())
        };
        outside |= coords.is_none();
        gamma_coefficients.insert(e.clone(), coords);
    }
    let locus_identical = poly_add(&conj, &poly_const(y_z.clone(), r), -1).is_empty();
    let verdict = if !omega.is_empty() {
        AnalyzerVerdict::DensityRefutedByObstruction { omega: omega.iter().map(|k| k + 1).collect() }
    } else if outside {
        AnalyzerVerdict::DensityRefutedGammaOutsideImage
    } else if locus_identical {
        AnalyzerVerdict::ZeroLocusIsS
    } else {
        AnalyzerVerdict::DensityRefutedProperLocus
    };
    Ok(DensityAnalysis {
        y_inf,
        y_z: y_z.clone(),
        xi_tilde,
        conjugation_consistent,
        kernels_agree,
        omega: omega.iter().map(|k| k + 1).collect(),
        beta,
        gamma_coefficients,
        locus_identical,
        verdict,
    })
}

/// Sample points z for the census: a 40 × 40 grid in the strip for r = 1;
/// for r ≥ 2, pairs of 40 spiral points assigned to z_1, z_2 (and the
/// remaining coordinates following z_2).
pub fn census_points(r: usize, size: usize) -> Vec<Vec<Float>> {
    let base: Vec<Float> = (0..size)
        .map(|k| {
            let u = k as f64 / size as f64;
            Float::new(u - 0.5, 0.05 + 3.0 * u)
        })
        .collect();
    let xs: Vec<f64> = (0..size).map(|k| k as f64 / size as f64 - 0.5).collect();
    let ys: Vec<f64> = (0..size).map(|k| 0.05 + 3.0 * k as f64 / size as f64).collect();
    let mut out = Vec::with_capacity(size * size);
    for a in 0..size {
        for b in 0..size {
            if r == 1 {
                out.push(vec![Float::new(xs[a], ys[b])]);
            } else {
                let mut z = vec![base[a], base[b]];
                z.resize(r, base[b]);
                out.push(z);
            }
        }
    }
    out
}

/// s at the census points, for cross-checks with the scanner.
pub fn census_s(points: &[Vec<Float>]) -> Vec<Vec<Float>> {
    points.iter().map(|z| s_of_z(z)).collect()
}
