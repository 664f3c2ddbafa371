use std::path::{Path, PathBuf};

use hodgelim::asymptotics::{
    boundedness_scan, gamma_component_analysis, integral_grading_census, verify_main_limit, AsymptoticsError,
    LimitReport, StripGrid,
};
use hodgelim::deligne::{
    deligne_grading, grading_chain, nested_grading, twist_polynomiality_check, verify_chain, weight_chain, DeligneError,
};
use hodgelim::filtration::{Decreasing, Increasing};
use hodgelim::io::{load, parse_sequence, to_canonical_json, IoError, ScenarioDocument};
use hodgelim::matrix::Matrix;
use hodgelim::mhs::{bigrading, delta_split, hodge_numbers, is_mhs, Mhs, MhsError};
use hodgelim::normal_functions::{
    analyze_density, census_points, scan_zero_locus, z_of_s, zero_test_point, NormalFunctionData, NormalFunctionError,
    PolarGrid,
};
use hodgelim::orbits::{check_admissible_orbit, default_probe_grid, OrbitError, Sl2SequenceSpec};
use hodgelim::scalar::{parse_exact, Exact, Scalar};
use hodgelim::splitting::{CksRecursion, XiProvider, ZeroWhenDeltaZero};
use hodgelim::weight::{default_cone_samples, kashiwara_checks, WeightError};

use crate::report::{floats, matrix, vector, Report};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Code {
    Pass = 0,
    Fail = 1,
    Input = 2,
    XiUnavailable = 3,
}

#[derive(Debug)]
pub struct CliError {
    pub code: Code,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        CliError { code: Code::Input, message: message.into() }
    }

    pub fn fail(message: impl Into<String>) -> Self {
        CliError { code: Code::Fail, message: message.into() }
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        CliError::input(e.to_string())
    }
}

fn from_mhs(e: &MhsError) -> CliError {
    match e {
        MhsError::XiUnavailable(_) => CliError { code: Code::XiUnavailable, message: e.to_string() },
        _ => CliError::fail(e.to_string()),
    }
}

impl From<MhsError> for CliError {
    fn from(e: MhsError) -> Self {
        from_mhs(&e)
    }
}

impl From<DeligneError> for CliError {
    fn from(e: DeligneError) -> Self {
        match &e {
            DeligneError::Mhs(m) => from_mhs(m),
            _ => CliError::fail(e.to_string()),
        }
    }
}

impl From<AsymptoticsError> for CliError {
    fn from(e: AsymptoticsError) -> Self {
        if e.is_xi_unavailable() {
            CliError { code: Code::XiUnavailable, message: e.to_string() }
        } else {
            CliError::fail(e.to_string())
        }
    }
}

impl From<NormalFunctionError> for CliError {
    fn from(e: NormalFunctionError) -> Self {
        if e.is_xi_unavailable() {
            CliError { code: Code::XiUnavailable, message: e.to_string() }
        } else {
            CliError::fail(e.to_string())
        }
    }
}

impl From<OrbitError> for CliError {
    fn from(e: OrbitError) -> Self {
        CliError::fail(e.to_string())
    }
}

impl From<WeightError> for CliError {
    fn from(e: WeightError) -> Self {
        CliError::fail(e.to_string())
    }
}

pub type Outcome = Result<(Report, Code), CliError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum ProviderArg {
    /// ξ from the CKS recursion (closed forms up to weight span 2)
    Cks,
    /// ξ = 0, only for inputs that are already split over R
    Zero,
}

impl ProviderArg {
    fn exact(self) -> &'static dyn XiProvider<Exact> {
        match self {
            ProviderArg::Cks => &CksRecursion,
            ProviderArg::Zero => &ZeroWhenDeltaZero,
        }
    }
}

/// Runs `f` with the concrete provider type so that generic pipelines monomorphize.
macro_rules! with_provider {
    ($arg:expr, $p:ident => $body:expr) => {
        match $arg {
            ProviderArg::Cks => {
                let $p = &CksRecursion;
                $body
            }
            ProviderArg::Zero => {
                let $p = &ZeroWhenDeltaZero;
                $body
            }
        }
    };
}

pub fn read(path: &Path) -> Result<ScenarioDocument, CliError> {
    load(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

fn header(rep: &mut Report, doc: &ScenarioDocument, path: &Path) {
    let s = &doc.scenario;
    let name = if s.name.is_empty() { path.display().to_string() } else { s.name.clone() };
    rep.line(format!("scenario {name}: dim {}, r = {}", s.dim(), s.r()));
}

fn increasing_summary<S: Scalar>(label: &str, w: &Increasing<S>) -> String {
    let parts: Vec<String> = w.weights().iter().map(|&k| format!("{k}:{}", w.gr_dim(k))).collect();
    format!("{label} graded dims {{{}}}", parts.join(", "))
}

fn decreasing_summary<S: Scalar>(label: &str, f: &Decreasing<S>) -> String {
    let parts: Vec<String> = (f.lowest()..=f.highest()).map(|p| format!("{p}:{}", f.get(p).dim())).collect();
    format!("{label} dims {{{}}}", parts.join(", "))
}

fn hodge_line<S: Scalar>(f: &Decreasing<S>, w: &Increasing<S>) -> String {
    let parts: Vec<String> = hodge_numbers(f, w).iter().map(|((p, q), d)| format!("({p},{q}):{d}")).collect();
    format!("Hodge numbers {}", parts.join(" "))
}

pub fn validate(path: &Path, seed: u64, provider: ProviderArg) -> Outcome {
    let doc = read(path)?;
    let s = &doc.scenario;
    let mut rep = Report::default();
    header(&mut rep, &doc, path);
    let adm = check_admissible_orbit(s, &default_probe_grid(s));
    for c in &adm.checks {
        rep.check(c.passed, &c.name, &c.detail);
    }
    rep.line(format!("probed {} points", adm.probes));
    let mut ok = adm.passed();
    if s.r() > 0 {
        let samples = default_cone_samples::<Exact>(s.r(), 12, seed);
        match kashiwara_checks(&s.ns, &s.w, &samples) {
            Ok(k) => {
                let failing = k.compositions.iter().filter(|c| !c.2).count();
                rep.check(k.cone_constant, "relative weight constant on the cone", &format!("{} samples, seed {seed}", k.samples));
                rep.check(failing == 0, "composition rule M(C_I, M(C_J, W)) = M(C_{I∪J}, W)", &format!("{failing} failing pairs"));
                ok &= k.all_pass();
            }
            Err(e) => {
                rep.check(false, "relative weight checks", &e.to_string());
                ok = false;
            }
        }
    }
    let mut code = if ok { Code::Pass } else { Code::Fail };
    if ok {
        match grading_chain(&s.ns, &s.f_inf, &s.w, provider.exact()) {
            Ok(chain) => match gamma_component_analysis(s, &chain, None) {
                Ok(g) => {
                    let weights: Vec<String> = g.weights().iter().map(|b| format!("{b:?}")).collect();
                    let support = if weights.is_empty() { "none".to_string() } else { weights.join(" ") };
                    rep.check(true, "Γ components vanish where required", &format!("support {support}"));
                }
                Err(e) => {
                    rep.check(false, "Γ components vanish where required", &e.to_string());
                    code = Code::Fail;
                }
            },
            Err(e) => {
                let err = CliError::from(e);
                rep.check(false, "grading chain", &err.message);
                code = err.code;
            }
        }
    }
    match NormalFunctionData::new(s.clone()) {
        Ok(nf) => rep.line(format!("normal function shape: Gr_0 rank 1, H of weight {} and rank {}", nf.w, nf.h_rank)),
        Err(_) => rep.line("normal function shape: no"),
    }
    rep.line(format!("verdict: {}", if code == Code::Pass { "valid" } else { "invalid" }));
    Ok((rep, code))
}

fn mhs_block(rep: &mut Report, label: &str, f: &Decreasing<Exact>, w: &Increasing<Exact>) -> Result<(), CliError> {
    rep.line(format!("-- {label}"));
    rep.line(increasing_summary("weight", w));
    is_mhs(f, w)?;
    rep.line(hodge_line(f, w));
    let bg = bigrading(f, w)?;
    for ((p, q), _) in hodge_numbers(f, w) {
        let piece = bg.piece(p, q);
        let vs: Vec<String> = piece.vectors().iter().map(|v| vector(v)).collect();
        rep.line(format!("I^{{{p},{q}}} = span{{{}}}", vs.join(", ")));
    }
    rep.matrix("Y", bg.y());
    rep.line(format!("split over R: {}", bg.is_split_real()));
    Ok(())
}

pub fn bigrading_cmd(path: &Path, at: Option<Vec<Exact>>) -> Outcome {
    let doc = read(path)?;
    let s = &doc.scenario;
    let mut rep = Report::default();
    header(&mut rep, &doc, path);
    let f = match &at {
        Some(y) => {
            if y.len() != s.r() {
                return Err(CliError::input(format!("--at expects {} values", s.r())));
            }
            rep.line(format!("F = e^{{iN(y)}} F_inf at y = {}", vector(y)));
            s.orbit_point(y)
        }
        None => s.f_inf.clone(),
    };
    if at.is_none() && s.r() > 0 {
        // the limit filtration is usually not an MHS for W itself
        if let Err(e) = mhs_block(&mut rep, "(F, W)", &f, &s.w) {
            rep.line(format!("not a mixed Hodge structure: {}", e.message));
        }
    } else {
        mhs_block(&mut rep, "(F, W)", &f, &s.w)?;
    }
    if at.is_none() && s.r() > 0 {
        let chain = weight_chain(&s.ns, &s.w)?;
        mhs_block(&mut rep, "(F, M) with M the last relative weight filtration", &f, &chain[s.r()])?;
    }
    Ok((rep, Code::Pass))
}

pub fn splittings(path: &Path, provider: ProviderArg) -> Outcome {
    let doc = read(path)?;
    let s = &doc.scenario;
    let mut rep = Report::default();
    header(&mut rep, &doc, path);
    let mut targets = vec![("(F, W)".to_string(), s.w.clone())];
    if s.r() > 0 {
        targets.push(("(F, M)".to_string(), weight_chain(&s.ns, &s.w)?[s.r()].clone()));
    }
    let mut code = Code::Pass;
    for (label, w) in targets {
        let mhs = Mhs::new(s.f_inf.clone(), w);
        rep.line(format!("-- {label}"));
        if let Err(e) = is_mhs(&mhs.f, &mhs.w) {
            rep.line(format!("not a mixed Hodge structure: {e}"));
            continue;
        }
        let d = delta_split(&mhs)?;
        rep.matrix("delta", &d.delta);
        match provider.exact().split(&mhs) {
            Ok(sp) => {
                rep.matrix("xi", &sp.xi);
                rep.line(decreasing_summary("F_hat", &sp.fhat));
                rep.matrix("Y_hat", &sp.yhat(&mhs.w)?);
            }
            Err(e) => {
                let err = from_mhs(&e);
                rep.line(format!("xi: unavailable ({e})"));
                code = err.code;
            }
        }
    }
    Ok((rep, code))
}

pub fn gradings(path: &Path) -> Outcome {
    let doc = read(path)?;
    let s = &doc.scenario;
    let mut rep = Report::default();
    header(&mut rep, &doc, path);
    match is_mhs(&s.f_inf, &s.w).and_then(|_| hodgelim::mhs::y_grading(&s.f_inf, &s.w)) {
        Ok(y) => rep.matrix("Y(F_inf, W)", &y),
        Err(e) => rep.line(format!("Y(F_inf, W): not a mixed Hodge structure ({e})")),
    }
    for (j, nj) in s.ns.iter().enumerate() {
        match deligne_grading(nj, &s.f_inf, &s.w) {
            Ok(g) => {
                let route = match g.route {
                    hodgelim::deligne::GradingRoute::FixedPoint { iterations } => format!("fixed point, {iterations} iterations"),
                    hodgelim::deligne::GradingRoute::Direct => "direct".to_string(),
                };
                rep.matrix(&format!("Y(N_{}, Y_(F,M))", j + 1), &g.y);
                rep.line(format!("  route: {route}"));
            }
            Err(e) => rep.line(format!("Y(N_{}, Y_(F,M)): {e}", j + 1)),
        }
    }
    if s.r() > 0 {
        rep.matrix("Y_inf (nested)", &nested_grading(&s.ns, &s.f_inf, &s.w)?);
    }
    Ok((rep, Code::Pass))
}

pub fn chain(path: &Path, provider: ProviderArg) -> Outcome {
    let doc = read(path)?;
    let s = &doc.scenario;
    let mut rep = Report::default();
    header(&mut rep, &doc, path);
    let c = grading_chain(&s.ns, &s.f_inf, &s.w, provider.exact())?;
    for j in 0..=c.r() {
        rep.matrix(&format!("Y_hat^{j}"), &c.yhat[j]);
    }
    for j in 0..c.r() {
        rep.matrix(&format!("N_hat_{}", j + 1), &c.nhat[j]);
        rep.matrix(&format!("H_hat_{}", j + 1), &c.hhat[j]);
    }
    rep.matrix("xi", &c.xi);
    let mut code = Code::Pass;
    match verify_chain(&s.ns, &c) {
        Ok(()) => rep.check(true, "commutation relations", ""),
        Err(e) => {
            rep.check(false, "commutation relations", &e);
            code = Code::Fail;
        }
    }
    if c.r() > 0 {
        let grid = twist_grid(c.r());
        let fit = twist_polynomiality_check(&c, &s.ns, &grid)?;
        rep.check(fit.passes(1e-8), "twisted orbit is polynomial in t^(1/2)", &format!(
            "{} monomials, residual {:.3e}, constant term error {:.3e}, negative powers {}",
            fit.monomials.len(),
            fit.max_residual,
            fit.constant_term_error,
            fit.negative_powers
        ));
        if !fit.passes(1e-8) {
            code = Code::Fail;
        }
    }
    Ok((rep, code))
}

/// t-grid for the polynomial fit: each t_j over {1/2, 1/5, 1/10, 1/40}.
pub fn twist_grid(r: usize) -> Vec<Vec<f64>> {
    let base = [0.5, 0.2, 0.1, 0.025];
    let mut grid: Vec<Vec<f64>> = vec![vec![]];
    for _ in 0..r {
        grid = grid
            .into_iter()
            .flat_map(|g| {
                base.iter().map(move |&t| {
                    let mut v = g.clone();
                    v.push(t);
                    v
                })
            })
            .collect();
    }
    grid
}

pub struct LimitArgs {
    pub sequence: String,
    pub m_min: usize,
    pub m_max: usize,
    pub m_step: usize,
    pub tol: f64,
    pub out: Option<PathBuf>,
    pub provider: ProviderArg,
}

pub fn resolve_sequence(doc: &ScenarioDocument, text: &str) -> Result<Sl2SequenceSpec, CliError> {
    if let Some(spec) = doc.sequence(text) {
        return Ok(spec?);
    }
    parse_sequence(text).map_err(|e| CliError::input(format!("--sequence: {e}")))
}

pub fn limit(path: &Path, a: &LimitArgs) -> Outcome {
    let doc = read(path)?;
    let s = &doc.scenario;
    let spec = resolve_sequence(&doc, &a.sequence)?;
    if spec.r() != s.r() {
        return Err(CliError::input(format!("sequence has {} coordinates, scenario has r = {}", spec.r(), s.r())));
    }
    if a.m_step == 0 || a.m_min > a.m_max || a.m_min == 0 {
        return Err(CliError::input("need 1 <= m-min <= m-max and m-step >= 1"));
    }
    let ms: Vec<usize> = (a.m_min..=a.m_max).step_by(a.m_step).collect();
    let lr: LimitReport = with_provider!(a.provider, p => verify_main_limit(s, &spec, p, &ms, a.tol))?;
    let mut rep = Report::default();
    header(&mut rep, &doc, path);
    if let Some(note) = &lr.substitution {
        rep.line(format!("bounded coordinates: {note}"));
    }
    match &lr.rhs_exact {
        Some(m) => rep.matrix("limit Y(N_theta, Y_hat_(F,M))", m),
        None => rep.matrix("limit (float)", &lr.rhs),
    }
    for row in &lr.rows {
        rep.line(format!("m = {:>7}  y = {}  error = {:.6e}", row.m, floats(&row.y), row.error));
    }
    rep.line(format!("final error {:.6e}, tolerance {:.1e}", lr.final_error(), lr.tolerance));
    rep.line(format!("strictly decreasing over the last 5: {}", lr.tail_strictly_decreasing(5)));
    rep.line(format!("verdict: {}", if lr.converged { "converged" } else { "not converged" }));
    if let Some(out) = &a.out {
        write_file(out, &lr.to_csv())?;
    }
    Ok((rep, if lr.converged { Code::Pass } else { Code::Fail }))
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

pub fn bounded(path: &Path, grid: &StripGrid, provider: ProviderArg, out: Option<&Path>) -> Outcome {
    let doc = read(path)?;
    let s = &doc.scenario;
    let pts = grid.points(s.r());
    let b = with_provider!(provider, p => boundedness_scan(s, &pts, p))?;
    let mut rep = Report::default();
    header(&mut rep, &doc, path);
    rep.line(format!("{} sample points", pts.len()));
    rep.line(format!("sup |Y_hat| = {:.6e} at z = {}", b.sup, complex_point(&b.argmax)));
    rep.line(format!("log-log growth slope {:.4}", b.growth_slope));
    rep.line(format!("verdict: {}", if b.unbounded_suspect { "unbounded (suspected)" } else { "bounded" }));
    if let Some(out) = out {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["min_y", "norm"]).unwrap();
        for (y, n) in &b.samples {
            w.write_record([format!("{y:.15e}"), format!("{n:.15e}")]).unwrap();
        }
        write_file(out, &String::from_utf8(w.into_inner().unwrap()).unwrap())?;
    }
    Ok((rep, if b.unbounded_suspect { Code::Fail } else { Code::Pass }))
}

fn complex_point(z: &[hodgelim::scalar::Float]) -> String {
    let parts: Vec<String> = z.iter().map(|c| format!("{:.4}{:+.4}i", c.re, c.im)).collect();
    format!("({})", parts.join(", "))
}

pub fn census(path: &Path, size: usize, tol: f64, out: Option<&Path>) -> Outcome {
    let doc = read(path)?;
    let s = &doc.scenario;
    let pts = census_points(s.r().max(1), size);
    let c = integral_grading_census(s, &pts, tol);
    let mut rep = Report::default();
    header(&mut rep, &doc, path);
    rep.line(format!("{} sample points, {} skipped", pts.len(), c.skipped.len()));
    rep.line(format!("{} distinct integral gradings, {} hits", c.gradings.len(), c.hits.len()));
    for (k, g) in c.gradings.iter().enumerate() {
        let count = c.hits.iter().filter(|h| h.grading == k).count();
        rep.line(format!("grading {k} ({count} hits) = {}", matrix(g)));
    }
    if !c.hat_mismatches.is_empty() {
        rep.line(format!("Y_hat differs from Y at {} integral points", c.hat_mismatches.len()));
    }
    if let Some(out) = out {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut head = vec!["point".to_string(), "grading".into()];
        for j in 1..=s.r().max(1) {
            head.push(format!("x{j}"));
            head.push(format!("y{j}"));
        }
        head.push("residual".into());
        w.write_record(&head).unwrap();
        for h in &c.hits {
            let mut rec = vec![h.point.to_string(), h.grading.to_string()];
            for z in &pts[h.point] {
                rec.push(format!("{:.15e}", z.re));
                rec.push(format!("{:.15e}", z.im));
            }
            rec.push(format!("{:.3e}", h.residual));
            w.write_record(&rec).unwrap();
        }
        write_file(out, &String::from_utf8(w.into_inner().unwrap()).unwrap())?;
    }
    Ok((rep, Code::Pass))
}

pub fn zero_locus(path: &Path, grid: &PolarGrid, tol: f64, certify: bool, out: Option<&Path>) -> Outcome {
    let doc = read(path)?;
    let nf = NormalFunctionData::new(doc.scenario.clone())?;
    let z = scan_zero_locus(&nf, grid, tol, certify)?;
    let mut rep = Report::default();
    header(&mut rep, &doc, path);
    rep.line(format!("{} grid points, {} skipped (not an MHS)", z.grid_points, z.skipped));
    rep.line(format!("{} hits in {} clusters", z.hits.len(), z.clusters.len()));
    for (k, g) in z.gradings().iter().enumerate() {
        rep.line(format!("integral grading {k} = {}", matrix(g)));
    }
    if certify {
        for root in &z.roots {
            rep.line(format!(
                "cluster {}: certified root s = {} residual {:.3e} after {} steps",
                root.cluster,
                complex_point(&root.s),
                root.residual,
                root.iterations
            ));
        }
        for c in &z.uncertified {
            rep.line(format!("cluster {c}: not certified"));
        }
    }
    rep.line(format!("verdict: {}", z.verdict.label()));
    if let Some(out) = out {
        write_file(out, &z.hits_csv())?;
    }
    Ok((rep, Code::Pass))
}

pub fn parse_matrix(text: &str, n: usize) -> Result<Matrix<Exact>, CliError> {
    let rows: Vec<Vec<serde_json::Value>> =
        serde_json::from_str(text).map_err(|e| CliError::input(format!("--grading: {e}")))?;
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(CliError::input(format!("--grading: expected a {n}x{n} matrix")));
    }
    let mut out = Vec::with_capacity(n);
    for row in rows {
        let mut r = Vec::with_capacity(n);
        for v in row {
            let t = match v {
                serde_json::Value::String(s) => s,
                serde_json::Value::Number(x) => x.to_string(),
                other => return Err(CliError::input(format!("--grading: unexpected entry {other}"))),
            };
            r.push(parse_exact(&t).map_err(|e| CliError::input(format!("--grading: {t}: {e}")))?);
        }
        out.push(r);
    }
    Ok(Matrix::from_rows(out))
}

pub fn parse_scalars(text: &str) -> Result<Vec<Exact>, CliError> {
    text.split(',')
        .map(|t| t.trim())
        .filter(|t| !t.is_empty())
        .map(|t| parse_exact(t).map_err(|e| CliError::input(format!("{t}: {e}"))))
        .collect()
}

pub fn analyze(path: &Path, grading: Option<&str>, mu: &[Exact], provider: ProviderArg) -> Outcome {
    let doc = read(path)?;
    let s = &doc.scenario;
    let nf = NormalFunctionData::new(s.clone())?;
    let mut rep = Report::default();
    header(&mut rep, &doc, path);
    let y_z = match grading {
        Some(t) => parse_matrix(t, s.dim())?,
        None => match first_integral_grading(&nf)? {
            Some(y) => {
                rep.line("candidate Y_Z taken from a zero-locus scan");
                y
            }
            None => return Err(CliError::fail("no integral grading found on the default grid; pass --grading")),
        },
    };
    let a = analyze_density(&nf, &y_z, mu, provider.exact())?;
    rep.line(a.report().trim_end());
    Ok((rep, Code::Pass))
}

/// First hit of the zero test on the default polar grid, in the standard basis.
fn first_integral_grading(nf: &NormalFunctionData) -> Result<Option<Matrix<Exact>>, CliError> {
    let grid = PolarGrid::uniform(4, 0.1, 0.7, 8);
    let b = nf.scenario.lattice_basis();
    let bi = b.inverse().expect("lattice basis is invertible");
    for (_, sv) in grid.points(nf.scenario.r()) {
        let t = match zero_test_point(nf, &z_of_s(&sv), 1e-9) {
            Ok(t) => t,
            Err(NormalFunctionError::NotMhsAtPoint { .. }) => continue,
            Err(e) => return Err(e.into()),
        };
        if t.is_zero() {
            if let Some(y) = t.integral {
                return Ok(Some(b.mul(&y).mul(&bi)));
            }
        }
    }
    Ok(None)
}

pub fn fmt(paths: &[PathBuf], check: bool, write: bool) -> Outcome {
    let mut rep = Report::default();
    let mut code = Code::Pass;
    for path in paths {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
        let canon = to_canonical_json(&read(path)?);
        if check {
            let same = canon == text;
            rep.line(format!("{}: {}", path.display(), if same { "canonical" } else { "not canonical" }));
            if !same {
                code = Code::Fail;
            }
        } else if write {
            if canon != text {
                write_file(path, &canon)?;
            }
            rep.line(format!("{}: written", path.display()));
        } else {
            rep.line(canon.trim_end());
        }
    }
    Ok((rep, code))
}
