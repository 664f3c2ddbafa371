mod common;

use std::f64::consts::PI;
use std::path::PathBuf;

use common::*;
use hodgelim::io::load;
use hodgelim::matrix::{max_abs_diff, Matrix};
use hodgelim::normal_functions::*;
use hodgelim::orbits::OrbitScenario;
use hodgelim::scalar::{exact, rational, Exact, Float, Scalar};
use hodgelim::splitting::CksRecursion;
use proptest::prelude::*;

fn fixture(name: &str) -> OrbitScenario {
    load(&PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)).unwrap().scenario
}

fn nf(name: &str) -> NormalFunctionData {
    NormalFunctionData::new(fixture(name)).unwrap()
}

fn c(re: f64, im: f64) -> Float {
    Float::new(re, im)
}

fn s_of(z: Float) -> Float {
    (c(0.0, 2.0 * PI) * z).exp()
}

/// Y_(F,W) for F^0 = <e0 + α e1, e2 + ζ e1>, H = <e1, e2> of weight -1:
/// the (0,0) line is e0 + α e1 + t (e2 + ζ e1) with t = -Im α / Im ζ.
fn extension_grading(alpha: Float, zeta: Float) -> Matrix<Float> {
    let t = -alpha.im / zeta.im;
    let mut y = Matrix::<Float>::zeros(3, 3);
    y[(1, 1)] = c(-1.0, 0.0);
    y[(2, 2)] = c(-1.0, 0.0);
    y[(1, 0)] = alpha + zeta * t;
    y[(2, 0)] = c(t, 0.0);
    y
}

/// Same Hodge data as the split fixture but with the extension class 1/2.
fn half_extension() -> OrbitScenario {
    let mut s = fixture("split_extension.json");
    let half = vec![Exact::one(), Exact::from_ratio(1, 2), Exact::zero()];
    s.f_inf = dec(3, &[(0, vec![half, e(3, 2)]), (-1, vec![e(3, 1)])]);
    s
}

#[test]
fn shape_is_checked() {
    assert!(NormalFunctionData::new(fixture("pure_hs.json")).is_err());
    assert!(NormalFunctionData::new(fixture("sl2_pure.json")).is_err());
    let d = nf("nf_acceptance.json");
    assert_eq!((d.w, d.h_rank), (-1, 2));
}

#[test]
fn split_extension_is_zero_everywhere() {
    let d = nf("split_extension.json");
    for z in [c(0.0, 1.0), c(0.37, 0.2), c(-0.4, 3.0)] {
        let t = zero_test_point(&d, &[z], 1e-9).unwrap();
        assert!(t.is_zero());
        assert_eq!(t.integral, Some(diag(&[0, -1, -1])));
        assert_eq!(t.exact_confirmed, Some(true));
        let r = t.retraction.unwrap();
        assert!(r.identity_on_h && r.idempotent && r.preserves_f);
        assert_eq!(r.matrix, diag(&[0, 1, 1]));
    }
}

#[test]
fn torsion_class_is_not_zero() {
    let d = NormalFunctionData::new(half_extension()).unwrap();
    let t = zero_test_point(&d, &[c(0.1, 0.8)], 1e-9).unwrap();
    assert!(!t.is_zero());
    assert!((t.residual - 0.5).abs() < 1e-12);
    let expect = extension_grading(c(0.5, 0.0), c(0.1, 0.8));
    assert!(max_abs_diff(&t.grading, &expect) < 1e-12);
}

#[test]
fn a_finer_lattice_absorbs_the_torsion_class() {
    let mut s = half_extension();
    let half = vec![Exact::one(), Exact::from_ratio(1, 2), Exact::zero()];
    s.lattice = Some(Matrix::from_columns(&[half, e(3, 1), e(3, 2)], 3));
    let d = NormalFunctionData::new(s).unwrap();
    let t = zero_test_point(&d, &[c(0.1, 0.8)], 1e-9).unwrap();
    assert!(t.is_zero());
    assert_eq!(t.integral, Some(diag(&[0, -1, -1])));
    assert!(t.retraction.unwrap().is_valid());
}

#[test]
fn zero_test_is_monodromy_invariant() {
    let d = nf("nf_acceptance.json");
    let z = [c(0.13, 0.4), c(-0.2, 0.3)];
    let base = zero_test_point(&d, &z, 1e-9).unwrap();
    for j in 0..2 {
        let mut zs = z.to_vec();
        zs[j] += c(1.0, 0.0);
        let moved = zero_test_point(&d, &zs, 1e-9).unwrap();
        let tj = d.scenario.ns[j].exp_nilpotent();
        let tji = d.scenario.ns[j].neg().exp_nilpotent();
        let expect = base.grading.conjugate_by(&tj.to_float(), &tji.to_float());
        assert!(max_abs_diff(&moved.grading, &expect) < 1e-9);
        assert_eq!(moved.is_zero(), base.is_zero());
    }
}

#[test]
fn split_grid_is_dense_suspect() {
    let d = nf("split_extension.json");
    let grid = PolarGrid::uniform(4, 0.1, 0.8, 8);
    let rep = scan_zero_locus(&d, &grid, 1e-9, false).unwrap();
    assert_eq!(rep.hits.len(), rep.grid_points - rep.skipped);
    assert_eq!(rep.verdict, DensityVerdict::DenseSuspect);
    assert_eq!(rep.gradings(), vec![diag(&[0, -1, -1])]);
}

#[test]
fn diagonal_locus_is_found_and_certified() {
    let d = nf("diagonal_locus.json");
    let grid = PolarGrid::uniform(3, 0.1, 0.5, 6);
    let rep = scan_zero_locus(&d, &grid, 1e-9, true).unwrap();
    assert!(!rep.hits.is_empty());
    for h in &rep.hits {
        assert_eq!(h.index[0], h.index[1], "off-diagonal hit at {:?}", h.s);
    }
    assert_eq!(rep.verdict, DensityVerdict::CurveSuspect);
    assert!(rep.uncertified.is_empty());
    assert_eq!(rep.roots.len(), rep.clusters.len());
    for root in &rep.roots {
        assert!(root.residual < 1e-12);
        assert!((root.s[0] - root.s[1]).norm() < grid.cell_size());
    }
    let csv = rep.hits_csv();
    assert_eq!(csv.lines().count(), 1 + rep.hits.len() + rep.roots.len());
    assert_eq!(csv.lines().filter(|l| l.starts_with("root,")).count(), rep.roots.len());
}

#[test]
fn newton_recovers_a_perturbed_root() {
    let d = nf("diagonal_locus.json");
    let s = &d.scenario;
    let y_inf = hodgelim::deligne::nested_grading(&s.ns, &s.f_inf, &s.w).unwrap().to_float();
    let sys = SimpleSystem { scenario: s, y_inf, y_z: diag(&[0, -1, -1]).to_float() };
    let start = [c(0.3, 0.1), c(0.31, 0.09)];
    assert!(sys.residual(&start).max_abs() > 1e-3);
    let (root, res, _) = newton_refine(&sys, &start);
    assert!(res < 1e-12, "{res}");
    // Γ vanishes only on s1 = s2 inside the bidisc
    assert!((root[0] - root[1]).norm() < 1e-10, "{root:?}");
}

#[test]
fn dexp_matches_finite_differences() {
    let x = op(3, &[(0, 1, 2), (1, 2, -1), (0, 2, 3)]).to_float();
    let dx = op(3, &[(1, 0, 1), (0, 2, 1), (2, 2, 1)]).to_float();
    let h = 1e-6;
    // x + h dx is not nilpotent; a long Taylor sum stands in for exp
    let exp = |m: &Matrix<Float>| {
        let mut out = Matrix::identity(3);
        let mut term = Matrix::identity(3);
        for k in 1..30 {
            term = term.mul(m).scale(&c(1.0 / k as f64, 0.0));
            out = out.add(&term);
        }
        out
    };
    let fwd = exp(&x.add(&dx.scale(&c(h, 0.0))));
    let bwd = exp(&x.sub(&dx.scale(&c(h, 0.0))));
    let fd = fwd.sub(&bwd).scale(&c(0.5 / h, 0.0));
    assert!(max_abs_diff(&fd, &dexp(&x, &dx)) < 1e-6);
}

#[test]
fn analyzer_split_extension() {
    let d = nf("split_extension.json");
    let a = analyze_density(&d, &diag(&[0, -1, -1]), &[], &CksRecursion).unwrap();
    assert_eq!(a.verdict, AnalyzerVerdict::ZeroLocusIsS);
    assert_eq!(a.y_inf, diag(&[0, -1, -1]));
    assert!(a.kernels_agree && a.conjugation_consistent && a.locus_identical);
    assert!(a.omega.is_empty());
    assert!(a.report().contains("zero locus = S"));
}

#[test]
fn analyzer_exponential_obstruction() {
    let d = nf("analyzer_counter.json");
    let a = analyze_density(&d, &diag(&[0, -1, -1]), &[], &CksRecursion).unwrap();
    assert_eq!(a.omega, vec![1]);
    assert_eq!(a.beta, vec![vec![Exact::one()]]);
    assert_eq!(a.verdict, AnalyzerVerdict::DensityRefutedByObstruction { omega: vec![1] });
    assert!(a.report().contains("exponential obstruction"));
}

#[test]
fn analyzer_diagonal_gamma_is_outside_the_image() {
    let d = nf("diagonal_locus.json");
    let a = analyze_density(&d, &diag(&[0, -1, -1]), &[], &CksRecursion).unwrap();
    assert!(a.omega.is_empty());
    assert!(!a.locus_identical);
    assert_eq!(a.verdict, AnalyzerVerdict::DensityRefutedGammaOutsideImage);
    assert!(a.gamma_coefficients.values().any(|v| v.is_none()));
}

#[test]
fn analyzer_rejects_non_integral_candidates() {
    let d = nf("split_extension.json");
    let mut y = diag(&[0, -1, -1]);
    y[(1, 0)] = exact(rational(1, 2), rational(0, 1));
    assert!(matches!(analyze_density(&d, &y, &[], &CksRecursion), Err(NormalFunctionError::NoIntegralCandidate(_))));
}

#[test]
fn census_grid_sizes() {
    assert_eq!(census_points(1, 40).len(), 1600);
    let pts = census_points(2, 40);
    assert!(pts.iter().all(|z| z.len() == 2 && z.iter().all(|v| v.im > 0.0)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn acceptance_grading_matches_closed_form(x1 in -0.5f64..0.5, y1 in 0.05f64..2.0, x2 in -0.5f64..0.5, y2 in 0.05f64..2.0) {
        let d = nf("nf_acceptance.json");
        let (z1, z2) = (c(x1, y1), c(x2, y2));
        let t = zero_test_point(&d, &[z1, z2], 1e-9).unwrap();
        let expect = extension_grading(c(0.5, 0.0) + s_of(z1) + z1, z1 + z2 + s_of(z2));
        prop_assert!(max_abs_diff(&t.grading, &expect) < 1e-8);
    }

    #[test]
    fn diagonal_grading_matches_closed_form(x1 in -0.5f64..0.5, y1 in 0.05f64..2.0, x2 in -0.5f64..0.5, y2 in 0.05f64..2.0) {
        let d = nf("diagonal_locus.json");
        let (z1, z2) = (c(x1, y1), c(x2, y2));
        let (s1, s2) = (s_of(z1), s_of(z2));
        let gamma = (s1 - s2) * (c(1.0, 0.0) + s1 * s2) * 0.25;
        let t = zero_test_point(&d, &[z1, z2], 1e-9).unwrap();
        prop_assert!(max_abs_diff(&t.grading, &extension_grading(gamma, z1 + z2)) < 1e-8);
    }

    #[test]
    fn zero_test_depends_only_on_s(x in -0.5f64..0.5, y in 0.05f64..2.0, k in -3i32..3) {
        // z and z + k give the same point of S; the grading moves by T^k, the verdict does not
        let d = nf("split_extension.json");
        let a = zero_test_point(&d, &[c(x, y)], 1e-9).unwrap();
        let b = zero_test_point(&d, &[c(x + k as f64, y)], 1e-9).unwrap();
        prop_assert_eq!(a.is_zero(), b.is_zero());
    }
}
