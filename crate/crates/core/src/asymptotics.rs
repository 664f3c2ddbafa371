//! Numerical asymptotics of period maps: the limiting grading along
//! sl2-sequences, boundedness and finiteness of gradings, Γ eigencomponents
//! and the twisted period map.

use std::collections::BTreeMap;

use rayon::prelude::*;
use thiserror::Error;

use crate::deligne::{grading_chain, twist, DeligneError, GradingChain};
use crate::filtration::{Decreasing, JointEigen};
use crate::matrix::{max_abs_diff, Matrix};
use crate::mhs::{delta_split, y_grading, Mhs, MhsError};
use crate::orbits::{
    check_admissible_orbit, default_probe_grid, monomial, s_of_z, theta_monodromies, GammaTerm, OrbitError,
    OrbitScenario, Sl2SequenceSpec,
};
use crate::scalar::{exact_from_complex, Exact, Float, Scalar};
use crate::splitting::XiProvider;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AsymptoticsError {
    #[error("scenario is not admissible: {0}")]
    NotAdmissible(String),
    #[error("numerical breakdown at m = {m}: {detail}")]
    NumericalBreakdown { m: usize, detail: String },
    #[error("Γ component of weight {b:?} violates the vanishing condition at index {w}")]
    GammaViolation { b: Vec<i64>, w: usize },
    #[error(transparent)]
    Orbit(#[from] OrbitError),
    #[error(transparent)]
    Deligne(#[from] DeligneError),
    #[error(transparent)]
    Mhs(#[from] MhsError),
}

impl AsymptoticsError {
    pub fn is_xi_unavailable(&self) -> bool {
        matches!(
            self,
            AsymptoticsError::Mhs(MhsError::XiUnavailable(_))
                | AsymptoticsError::Deligne(DeligneError::Mhs(MhsError::XiUnavailable(_)))
        )
    }
}

/// Providers usable in both the exact and the float pipeline.
pub trait Provider: XiProvider<Exact> + XiProvider<Float> {}
impl<P: XiProvider<Exact> + XiProvider<Float>> Provider for P {}

/// Runs the exact admissibility checks on the default probe grid.
pub fn require_admissible(s: &OrbitScenario) -> Result<(), AsymptoticsError> {
    let rep = check_admissible_orbit(s, &default_probe_grid(s));
    if rep.passed() {
        return Ok(());
    }
    let names: Vec<String> = rep.failures().iter().map(|c| format!("{}: {}", c.name, c.detail)).collect();
    Err(AsymptoticsError::NotAdmissible(names.join("; ")))
}

/// Maximum absolute entry in the lattice basis.
pub fn operator_norm(s: &OrbitScenario, x: &Matrix<Float>) -> f64 {
    s.in_lattice_basis(x).max_abs()
}

/// With Γ ≡ 0 the period map is algebraic in z, so gradings are computed
/// exactly; large Im z would otherwise swamp the float rank decisions.
fn exact_filtration(s: &OrbitScenario, z: &[Float]) -> Option<Decreasing<Exact>> {
    if !s.gamma_is_zero() {
        return None;
    }
    let ze: Vec<Exact> = z.iter().map(|c| exact_from_complex(*c)).collect::<Option<_>>()?;
    s.eval_exact(&ze).ok()
}

/// Ŷ_(F(z),W), exactly when Γ ≡ 0.
pub fn yhat_at<P: Provider>(s: &OrbitScenario, z: &[Float], provider: &P) -> Result<Matrix<Float>, MhsError> {
    if let Some(f) = exact_filtration(s, z) {
        let split = XiProvider::<Exact>::split(provider, &Mhs::new(f, s.w.clone()))?;
        return Ok(split.yhat(&s.w)?.to_float());
    }
    let f = s.eval_float(z);
    let split = XiProvider::<Float>::split(provider, &Mhs::new(f, s.w.to_float()))?;
    split.yhat(&s.w.to_float())
}

#[derive(Clone, Debug)]
pub struct LimitRow {
    pub m: usize,
    pub y: Vec<f64>,
    pub t: Vec<f64>,
    pub lhs: Matrix<Float>,
    pub error: f64,
    pub norm: f64,
}

#[derive(Clone, Debug)]
pub struct LimitReport {
    pub rows: Vec<LimitRow>,
    /// the limiting grading, exact when no coordinate stays bounded
    pub rhs: Matrix<Float>,
    pub rhs_exact: Option<Matrix<Exact>>,
    pub converged: bool,
    pub tolerance: f64,
    /// set when bounded coordinates were absorbed into F∞
    pub substitution: Option<String>,
}

/// Errors below this are treated as zero when judging monotonicity.
pub const NOISE_FLOOR: f64 = 1e-12;

impl LimitReport {
    pub fn errors(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.error).collect()
    }

    pub fn final_error(&self) -> f64 {
        self.rows.last().map_or(f64::INFINITY, |r| r.error)
    }

    /// Whether the last `k` errors are non-increasing (up to the noise floor).
    pub fn tail_non_increasing(&self, k: usize) -> bool {
        let e = self.errors();
        if e.len() < k {
            return false;
        }
        e[e.len() - k..].windows(2).all(|w| w[1] <= w[0] || w[1] < NOISE_FLOOR)
    }

    pub fn tail_strictly_decreasing(&self, k: usize) -> bool {
        let e = self.errors();
        e.len() >= k && e[e.len() - k..].windows(2).all(|w| w[1] < w[0])
    }

    /// CSV with columns m, y1..yr, t1..tr, error, norm.
    pub fn to_csv(&self) -> String {
        let r = self.rows.first().map_or(0, |row| row.y.len());
        let mut wtr = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["m".to_string()];
        header.extend((1..=r).map(|j| format!("y{j}")));
        header.extend((1..=r).map(|j| format!("t{j}")));
        header.push("error".into());
        header.push("norm".into());
        wtr.write_record(&header).unwrap();
        for row in &self.rows {
            let mut rec = vec![row.m.to_string()];
            rec.extend(row.y.iter().map(|v| format!("{v:.12e}")));
            rec.extend(row.t.iter().map(|v| format!("{v:.12e}")));
            rec.push(format!("{:.12e}", row.error));
            rec.push(format!("{:.12e}", row.norm));
            wtr.write_record(&rec).unwrap();
        }
        String::from_utf8(wtr.into_inner().unwrap()).unwrap()
    }
}

/// Indices i with y_i bounded along the sequence (zero rows of T).
pub fn bounded_coordinates(spec: &Sl2SequenceSpec) -> Vec<usize> {
    (0..spec.r()).filter(|&i| (0..spec.d()).all(|j| spec.t[(i, j)].is_zero())).collect()
}

/// F∞ with the bounded coordinates absorbed:
/// lim e^{-Σ_unbounded z_j N_j} F(z(m)) = e^{Σ_bounded z_j N_j} e^{Γ(s')} F∞
/// where s' keeps only the limits of the bounded s_j.
pub fn absorbed_limit_filtration(s: &OrbitScenario, spec: &Sl2SequenceSpec) -> Decreasing<Float> {
    let bounded = bounded_coordinates(spec);
    let r = s.r();
    let mut z = vec![Float::new(0.0, 0.0); r];
    for &i in &bounded {
        z[i] = Float::new(spec.x[i].limit, spec.b[i].limit);
    }
    let mut sv = s_of_z(&z);
    for (j, sj) in sv.iter_mut().enumerate() {
        if !bounded.contains(&j) {
            *sj = Float::new(0.0, 0.0);
        }
    }
    let g = s.n_of(&z).exp_nilpotent().mul(&s.gamma_at(&sv).exp_nilpotent());
    s.f_inf.to_float().act(&g)
}

/// The right-hand side Y(N(θ^1), Y(N(θ^2), ..., Y_(F̂∞, W^d))).
pub fn limit_grading<P: Provider>(
    s: &OrbitScenario,
    spec: &Sl2SequenceSpec,
    provider: &P,
) -> Result<(Matrix<Float>, Option<Matrix<Exact>>, Option<String>), AsymptoticsError> {
    let thetas = theta_monodromies(s, spec);
    let bounded = bounded_coordinates(spec);
    if bounded.is_empty() {
        let chain = grading_chain(&thetas, &s.f_inf, &s.w, provider as &dyn XiProvider<Exact>)?;
        let y = chain.yhat[0].clone();
        return Ok((y.to_float(), Some(y), None));
    }
    let f = absorbed_limit_filtration(s, spec);
    let ths: Vec<Matrix<Float>> = thetas.iter().map(|m| m.to_float()).collect();
    let chain = grading_chain(&ths, &f, &s.w.to_float(), provider as &dyn XiProvider<Float>)?;
    let note = format!(
        "bounded coordinates {:?} absorbed into F∞; weight chain taken over the {} unbounded directions",
        bounded.iter().map(|i| i + 1).collect::<Vec<_>>(),
        spec.d()
    );
    Ok((chain.yhat[0].clone(), None, Some(note)))
}

/// Compares e^{-N(x(m))} Ŷ_(F(z(m)),W) with the limiting grading for each m in
/// `ms`. Bounded coordinates are absorbed into F∞, and only the unbounded x_j
/// enter the conjugation.
pub fn verify_main_limit<P: Provider>(
    s: &OrbitScenario,
    spec: &Sl2SequenceSpec,
    provider: &P,
    ms: &[usize],
    tol: f64,
) -> Result<LimitReport, AsymptoticsError> {
    spec.validate()?;
    if spec.r() != s.r() {
        return Err(OrbitError::Dimension(format!("sequence has {} coordinates, scenario {}", spec.r(), s.r())).into());
    }
    let (rhs, rhs_exact, substitution) = limit_grading(s, spec, provider)?;
    let bounded = bounded_coordinates(spec);
    let rows: Vec<Result<LimitRow, AsymptoticsError>> = ms
        .par_iter()
        .map(|&m| {
            let p = spec.point(m);
            let yh = yhat_at(s, &p.z, provider).map_err(|e| match e {
                MhsError::XiUnavailable(_) => AsymptoticsError::Mhs(e),
                other => AsymptoticsError::NumericalBreakdown { m, detail: other.to_string() },
            })?;
            let x: Vec<Float> = p
                .x
                .iter()
                .enumerate()
                .map(|(j, &v)| Float::new(if bounded.contains(&j) { 0.0 } else { v }, 0.0))
                .collect();
            let nx = s.n_of(&x);
            let lhs = yh.conjugate_by(&nx.neg().exp_nilpotent(), &nx.exp_nilpotent());
            if lhs.entries().iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
                return Err(AsymptoticsError::NumericalBreakdown { m, detail: "non-finite grading".into() });
            }
            let error = operator_norm(s, &lhs.sub(&rhs));
            let norm = operator_norm(s, &lhs);
            Ok(LimitRow { m, y: p.y, t: p.t, lhs, error, norm })
        })
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>, _>>()?;
    let mut rep = LimitReport { rows, rhs, rhs_exact, converged: false, tolerance: tol, substitution };
    rep.converged = rep.final_error() < tol && rep.tail_non_increasing(5.min(rep.rows.len()));
    Ok(rep)
}

/// Points z = x + iy of the strip from coordinate-wise value lists.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct StripGrid {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    /// keep only y_1 ≥ ... ≥ y_r
    #[serde(default)]
    pub ordered: bool,
}

impl StripGrid {
    pub fn points(&self, r: usize) -> Vec<Vec<Float>> {
        let mut out = Vec::new();
        let nx = self.xs.len().pow(r as u32);
        let ny = self.ys.len().pow(r as u32);
        for a in 0..nx {
            for b in 0..ny {
                let (mut ia, mut ib) = (a, b);
                let mut z = Vec::with_capacity(r);
                for _ in 0..r {
                    z.push(Float::new(self.xs[ia % self.xs.len()], self.ys[ib % self.ys.len()]));
                    ia /= self.xs.len();
                    ib /= self.ys.len();
                }
                if self.ordered && z.windows(2).any(|w| w[1].im > w[0].im) {
                    continue;
                }
                out.push(z);
            }
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct BoundednessReport {
    pub sup: f64,
    pub argmax: Vec<Float>,
    /// (min_j y_j, ‖Ŷ‖) per sample
    pub samples: Vec<(f64, f64)>,
    /// least-squares slope of log ‖Ŷ‖ against log min_j y_j
    pub growth_slope: f64,
    pub unbounded_suspect: bool,
}

/// Samples ‖Ŷ_(F(z),W)‖ over strip points.
pub fn boundedness_scan<P: Provider>(
    s: &OrbitScenario,
    points: &[Vec<Float>],
    provider: &P,
) -> Result<BoundednessReport, AsymptoticsError> {
    require_admissible(s)?;
    let norms: Vec<Result<f64, AsymptoticsError>> = points
        .par_iter()
        .enumerate()
        .map(|(k, z)| Ok(operator_norm(s, &yhat_at(s, z, provider).map_err(|e| breakdown(k, e))?)))
        .collect();
    let norms = norms.into_iter().collect::<Result<Vec<_>, _>>()?;
    let mut sup = f64::NEG_INFINITY;
    let mut arg = 0;
    for (k, &v) in norms.iter().enumerate() {
        if v > sup {
            sup = v;
            arg = k;
        }
    }
    let samples: Vec<(f64, f64)> = points
        .iter()
        .zip(&norms)
        .map(|(z, &v)| (z.iter().map(|c| c.im).fold(f64::INFINITY, f64::min), v))
        .collect();
    let growth_slope = log_slope(&samples);
    Ok(BoundednessReport {
        sup,
        argmax: points.get(arg).cloned().unwrap_or_default(),
        samples,
        growth_slope,
        unbounded_suspect: growth_slope > 0.1,
    })
}

fn breakdown(m: usize, e: MhsError) -> AsymptoticsError {
    match e {
        MhsError::XiUnavailable(_) => AsymptoticsError::Mhs(e),
        other => AsymptoticsError::NumericalBreakdown { m, detail: other.to_string() },
    }
}

fn log_slope(samples: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = samples
        .iter()
        .filter(|(y, v)| *y > 0.0 && *v > 0.0)
        .map(|(y, v)| (y.ln(), v.ln()))
        .collect();
    if pts.len() < 2 {
        return 0.0;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return 0.0;
    }
    pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / sxx
}

#[derive(Clone, Debug)]
pub struct CensusHit {
    pub point: usize,
    pub grading: usize,
    pub residual: f64,
}

#[derive(Clone, Debug, Default)]
pub struct Census {
    /// distinct integral gradings, in the lattice basis
    pub gradings: Vec<Matrix<Exact>>,
    pub hits: Vec<CensusHit>,
    /// sample indices where Ŷ and Y disagreed at an integral point
    pub hat_mismatches: Vec<usize>,
    /// sample indices where (F(z), W) could not be evaluated
    pub skipped: Vec<usize>,
}

/// Rounds a float operator (lattice basis) to an integral matrix when every
/// entry is within `tol` of an integer.
pub fn rationalize_integral(x: &Matrix<Float>, tol: f64) -> Option<(Matrix<Exact>, f64)> {
    let mut residual: f64 = 0.0;
    for v in x.entries() {
        let d = (v.re - v.re.round()).abs().max(v.im.abs());
        residual = residual.max(d);
    }
    if residual > tol {
        return None;
    }
    let m = x.map(|v| Exact::from_i64(v.re.round() as i64));
    Some((m, residual))
}

/// Collects the integral gradings Y_(F(z),W) over the sample points.
pub fn integral_grading_census(s: &OrbitScenario, points: &[Vec<Float>], tol: f64) -> Census {
    let b = s.lattice_basis();
    let bi = b.inverse().expect("lattice basis is invertible");
    let results: Vec<Option<Result<(Matrix<Exact>, f64, bool), ()>>> = points
        .par_iter()
        .map(|z| {
            let y = match y_grading(&s.eval_float(z), &s.w.to_float()) {
                Ok(y) => y,
                Err(_) => return Some(Err(())),
            };
            let (yl, res) = rationalize_integral(&s.in_lattice_basis(&y), tol)?;
            let ystd = b.mul(&yl).mul(&bi);
            if !s.w.is_graded_by(&ystd) {
                return None;
            }
            let mhs = Mhs::new(s.eval_float(z), s.w.to_float());
            let hat_ok = delta_split(&mhs).map(|d| d.delta.max_abs() < tol.max(1e-9)).unwrap_or(false);
            Some(Ok((yl, res, hat_ok)))
        })
        .collect();
    let mut census = Census::default();
    for (k, r) in results.into_iter().enumerate() {
        match r {
            None => {}
            Some(Err(())) => census.skipped.push(k),
            Some(Ok((yl, residual, hat_ok))) => {
                let idx = match census.gradings.iter().position(|g| *g == yl) {
                    Some(i) => i,
                    None => {
                        census.gradings.push(yl);
                        census.gradings.len() - 1
                    }
                };
                census.hits.push(CensusHit { point: k, grading: idx, residual });
                if !hat_ok {
                    census.hat_mismatches.push(k);
                }
            }
        }
    }
    census
}

/// One weight b of the Ad(t^{-1}(y))-decomposition of Γ, where
/// Ad(t^{-1}(y)) Γ^b = Π t_j^{b_j/2} Γ^b.
#[derive(Clone, Debug)]
pub struct GammaComponent {
    pub b: Vec<i64>,
    pub terms: Vec<GammaTerm>,
}

impl GammaComponent {
    pub fn is_negative(&self) -> bool {
        self.b.iter().any(|&x| x < 0)
    }

    /// w(b) = min{j : b_j < 0}, 1-based.
    pub fn w(&self) -> Option<usize> {
        self.b.iter().position(|&x| x < 0).map(|j| j + 1)
    }

    pub fn eval(&self, s: &[Float]) -> Matrix<Float> {
        let n = self.terms.first().map_or(0, |t| t.coeff.rows());
        let mut out = Matrix::zeros(n, n);
        for t in &self.terms {
            out = out.add(&t.coeff.to_float().scale(&monomial(&t.exponents, s)));
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct GammaConvergence {
    pub b: Vec<i64>,
    /// (m, ‖Ad(t^{-1}(y(m))) Γ^b(s(m))‖)
    pub norms: Vec<(usize, f64)>,
    pub last_increment: f64,
}

#[derive(Clone, Debug, Default)]
pub struct GammaReport {
    pub support: Vec<GammaComponent>,
    pub convergence: Vec<GammaConvergence>,
}

impl GammaReport {
    pub fn weights(&self) -> Vec<Vec<i64>> {
        self.support.iter().map(|c| c.b.clone()).collect()
    }
}

/// Splits every Γ coefficient into Ad(t^{-1}(y))-eigencomponents, checks that
/// Γ^b_{w(b)} = 0 for b < 0, and optionally tracks Ad(t^{-1}(y)) Γ^b(s) along
/// a sequence.
pub fn gamma_component_analysis(
    s: &OrbitScenario,
    chain: &GradingChain<Exact>,
    sequence: Option<(&Sl2SequenceSpec, &[usize])>,
) -> Result<GammaReport, AsymptoticsError> {
    let n = s.dim();
    let je = JointEigen::new(&chain.yhat[1..], n)
        .ok_or_else(|| DeligneError::Conditions("Ŷ^j do not commute".into()))?;
    let mut by_b: BTreeMap<Vec<i64>, Vec<GammaTerm>> = BTreeMap::new();
    for t in &s.gamma {
        for (d, m) in je.ad_components(&t.coeff) {
            if m.is_zero() {
                continue;
            }
            let b: Vec<i64> = d.iter().map(|x| -x).collect();
            by_b.entry(b).or_default().push(GammaTerm { exponents: t.exponents.clone(), coeff: m });
        }
    }
    let support: Vec<GammaComponent> = by_b.into_iter().map(|(b, terms)| GammaComponent { b, terms }).collect();
    for c in &support {
        if let Some(w) = c.w() {
            // Γ^b_w: terms free of s_1..s_w, merged by monomial
            let mut merged: BTreeMap<Vec<u32>, Matrix<Exact>> = BTreeMap::new();
            for t in c.terms.iter().filter(|t| t.exponents.iter().take(w).all(|&e| e == 0)) {
                let e = merged.entry(t.exponents.clone()).or_insert_with(|| Matrix::zeros(n, n));
                *e = e.add(&t.coeff);
            }
            if merged.values().any(|m| !m.is_zero()) {
                return Err(AsymptoticsError::GammaViolation { b: c.b.clone(), w });
            }
        }
    }
    let mut convergence = Vec::new();
    if let Some((spec, ms)) = sequence {
        for c in &support {
            let mut norms = Vec::with_capacity(ms.len());
            let mut last = None;
            let mut inc = 0.0;
            for &m in ms {
                let p = spec.point(m);
                let tw = twist(chain, &p.y, 0)?;
                let v = tw.untwist(&c.eval(&s_of_z(&p.z)));
                if let Some(prev) = &last {
                    inc = max_abs_diff(&v, prev);
                }
                norms.push((m, v.max_abs()));
                last = Some(v);
            }
            convergence.push(GammaConvergence { b: c.b.clone(), norms, last_increment: inc });
        }
    }
    Ok(GammaReport { support, convergence })
}

#[derive(Clone, Debug)]
pub struct TwistedSample {
    pub z: Vec<Float>,
    pub is_mhs: bool,
    /// largest canonical-basis coordinate of each F̃^p
    pub coordinates: Vec<(i32, f64)>,
    pub filtration: Decreasing<Float>,
}

#[derive(Clone, Debug)]
pub struct TwistedScanReport {
    pub j: usize,
    pub samples: Vec<TwistedSample>,
    /// p -> largest coordinate over all samples
    pub bounding_box: BTreeMap<i32, f64>,
    pub escaped: bool,
}

/// Coordinates above this are reported as escaping to the boundary.
pub const ESCAPE_BOUND: f64 = 1e8;

/// F̃_j(z) = t^{-1}(y) e^{-Σ x_k N_k} F_j(z) over strip points in I'.
pub fn twisted_map_scan(
    s: &OrbitScenario,
    j: usize,
    points: &[Vec<Float>],
    chain: &GradingChain<Exact>,
) -> Result<TwistedScanReport, AsymptoticsError> {
    let sj = s.partial(j)?;
    let wf = s.w.to_float();
    let samples: Vec<Result<TwistedSample, AsymptoticsError>> = points
        .par_iter()
        .enumerate()
        .map(|(k, z)| {
            let y: Vec<f64> = z.iter().map(|c| c.im).collect();
            if y.windows(2).any(|w| w[1] > w[0]) || y.iter().any(|&v| v < 1.0) {
                return Err(AsymptoticsError::Orbit(OrbitError::ScheduleNotInStrip { m: k }));
            }
            let x: Vec<Float> = z.iter().map(|c| Float::new(c.re, 0.0)).collect();
            let tw = twist(chain, &y, 0)?;
            let f = sj.eval_float(z).act(&s.n_of(&x).neg().exp_nilpotent()).act(&tw.inverse);
            let is_mhs = crate::mhs::is_mhs(&f, &wf).is_ok();
            let coordinates: Vec<(i32, f64)> = f.steps().map(|(p, sp)| (p, sp.basis().max_abs())).collect();
            if coordinates.iter().any(|(_, c)| !c.is_finite()) {
                return Err(AsymptoticsError::NumericalBreakdown { m: k, detail: "non-finite coordinates".into() });
            }
            Ok(TwistedSample { z: z.clone(), is_mhs, coordinates, filtration: f })
        })
        .collect();
    let samples = samples.into_iter().collect::<Result<Vec<_>, _>>()?;
    let mut bounding_box: BTreeMap<i32, f64> = BTreeMap::new();
    for smp in &samples {
        for &(p, c) in &smp.coordinates {
            let e = bounding_box.entry(p).or_insert(0.0);
            *e = e.max(c);
        }
    }
    let escaped = samples.iter().any(|smp| !smp.is_mhs) || bounding_box.values().any(|&c| c > ESCAPE_BOUND);
    Ok(TwistedScanReport { j, samples, bounding_box, escaped })
}
