mod common;

use common::*;
use hodgelim::deligne::*;
use hodgelim::mhs::{delta_split, is_split_real, y_grading, Mhs, MhsError};
use hodgelim::scalar::Exact;
use hodgelim::splitting::{CksRecursion, XiProvider, ZeroWhenDeltaZero};
use hodgelim::weight::relative_weight;

/// Weights {0,-3}: limit types e0 (0,0), e2 (-1,-1), e1 (-2,-2), N e0 = b e2, N e2 = e1.
fn gap_three(b: i64) -> (hodgelim::matrix::Matrix<Exact>, hodgelim::filtration::Decreasing<Exact>, hodgelim::filtration::Increasing<Exact>) {
    let n = op(3, &[(0, 2, b), (2, 1, 1)]);
    let f = dec(3, &[(0, vec![e(3, 0)]), (-1, vec![e(3, 2)]), (-2, vec![e(3, 1)])]);
    let w = inc(3, &[(0, vec![e(3, 0)]), (-3, vec![e(3, 1), e(3, 2)])]);
    (n, f, w)
}

#[test]
fn gap_three_limit_is_split() {
    let (n, f, w) = gap_three(2);
    let m = relative_weight(&n, &w).unwrap().unwrap();
    assert_eq!(m.weights(), vec![-4, -2, 0]);
    assert!(is_split_real(&f, &m).unwrap());
    assert_eq!(y_grading(&f, &m).unwrap(), diag(&[0, -4, -2]));
}

#[test]
fn direct_deligne_grading() {
    let (n, f, w) = gap_three(2);
    let m = relative_weight(&n, &w).unwrap().unwrap();
    let ym = y_grading(&f, &m).unwrap();
    assert_eq!(deligne_y(&n, &ym, &w).unwrap(), diag(&[0, -3, -3]));
}

#[test]
fn fixed_point_matches_direct() {
    for b in [1, 2, -3] {
        let (n, f, w) = gap_three(b);
        let g = deligne_grading(&n, &f, &w).unwrap();
        assert_eq!(g.y, diag(&[0, -3, -3]));
        assert_eq!(deligne_y(&n, &g.y_m, &w).unwrap(), g.y);
    }
}

#[test]
fn orbit_point_has_mixed_type_delta() {
    let (n, f, w) = gap_three(1);
    let fo = f.act(&n.scale(&Exact::i()).exp_nilpotent());
    let d = delta_split(&Mhs::new(fo, w)).unwrap();
    assert_eq!(d.delta, op(3, &[(0, 2, 1)]));
    let bg = d.split.bigrading().unwrap();
    assert!(!bg.component(&d.delta, -1, -2).is_zero());
    assert!(!bg.component(&d.delta, -2, -1).is_zero());
}

#[test]
fn sl2_splitting_of_orbit_point_gives_deligne_grading() {
    for b in [1, 2] {
        let (n, f, w) = gap_three(b);
        let fo = f.act(&n.scale(&Exact::i()).exp_nilpotent());
        let mhs = Mhs::new(fo, w.clone());
        let s = CksRecursion.split(&mhs).unwrap();
        assert_eq!(s.yhat(&w).unwrap(), diag(&[0, -3, -3]));
        assert!(is_split_real(&s.fhat, &w).unwrap());
        assert!(matches!(ZeroWhenDeltaZero.split(&mhs), Err(MhsError::XiUnavailable(_))));
    }
}

#[test]
fn chain_relations_one_variable() {
    let (n, f, w) = gap_three(2);
    let c = grading_chain(&[n.clone()], &f, &w, &ZeroWhenDeltaZero).unwrap();
    assert_eq!(c.yhat[1], diag(&[0, -4, -2]));
    assert_eq!(c.yhat[0], diag(&[0, -3, -3]));
    assert_eq!(c.nhat[0], op(3, &[(2, 1, 1)]));
    verify_chain(&[n.clone()], &c).unwrap();
    let rep = check_deligne_system(&[n], &w, Some(&c.yhat[1]));
    assert!(rep.ok(), "{:?}", rep.failures);
}

#[test]
fn conjugation_identity_with_nonsplit_limit() {
    let (n, f, w) = gap_three(1);
    let fo = f.act(&n.scale(&Exact::i()).exp_nilpotent());
    assert!(conjugate_chain(&[n], &fo, &w, &CksRecursion).unwrap());
}

#[test]
fn two_variable_chain() {
    // N1 = N2 = N, W^1 = W^2
    let (n, f, w) = gap_three(1);
    let ns = [n.clone(), n];
    let c = grading_chain(&ns, &f, &w, &ZeroWhenDeltaZero).unwrap();
    assert_eq!(c.w[1], c.w[2]);
    verify_chain(&ns, &c).unwrap();
    let y = nested_grading(&ns, &f, &w).unwrap();
    assert_eq!(y, c.yhat[0]);
}

#[test]
fn missing_relative_weight_is_reported() {
    // W_{-1} = <e0> ⊂ W_0, N e1 = e0
    let n = op(2, &[(1, 0, 1)]);
    let w = inc(2, &[(0, vec![e(2, 1)]), (-1, vec![e(2, 0)])]);
    assert!(matches!(weight_chain(&[n.clone()], &w), Err(DeligneError::NotAdmissible { index: 1 })));
    let rep = check_deligne_system(&[n], &w, None);
    assert!(!rep.existence);
}

#[test]
fn nonsplit_limit_is_rejected_by_fixed_point() {
    let (n, f, w) = gap_three(1);
    let fo = f.act(&n.scale(&Exact::i()).exp_nilpotent());
    assert!(matches!(deligne_grading(&n, &fo, &w), Err(DeligneError::NotSplitLimit)));
}

fn elliptic() -> (hodgelim::matrix::Matrix<Exact>, hodgelim::filtration::Decreasing<Exact>, hodgelim::filtration::Increasing<Exact>) {
    let n = op(2, &[(0, 1, 1)]);
    let f = dec(2, &[(1, vec![e(2, 0)]), (0, vec![e(2, 1)])]);
    let w = inc(2, &[(1, vec![e(2, 0), e(2, 1)])]);
    (n, f, w)
}

#[test]
fn twist_acts_by_half_powers() {
    let (n, f, w) = elliptic();
    let mut c = grading_chain(&[n], &f, &w, &ZeroWhenDeltaZero).unwrap();
    assert_eq!(c.yhat[1], diag(&[2, 0]));
    c.yhat[1] = diag(&[1, -1]);
    let t = twist(&c, &[4.0], 0).unwrap();
    assert!((t.value[(0, 0)].re - 0.5).abs() < 1e-12);
    assert!((t.value[(1, 1)].re - 2.0).abs() < 1e-12);
    let id = twist(&c, &[1.0], 0).unwrap();
    assert!(id.value.approx_eq(&hodgelim::matrix::Matrix::identity(2)));
    assert!(matches!(twist(&c, &[0.0], 0), Err(DeligneError::NonPositiveY)));
}

#[test]
fn partial_twist_rescales_early_monodromies() {
    let (n, f, w) = gap_three(1);
    let n2 = n.mul(&n);
    let ns = [n, n2];
    let c = grading_chain(&ns, &f, &w, &ZeroWhenDeltaZero).unwrap();
    verify_chain(&ns, &c).unwrap();
    let y = [50.0, 7.0];
    let t1 = twist(&c, &y, 1).unwrap();
    let lhs = t1.untwist(&ns[0].to_float().scale(&hodgelim::scalar::Float::new(y[0], 0.0)));
    let rhs = ns[0].to_float().scale(&hodgelim::scalar::Float::new(y[0] / y[1], 0.0));
    assert!(hodgelim::matrix::max_abs_diff(&lhs, &rhs) < 1e-12);
}

#[test]
fn sl2_orbit_twist_is_constant() {
    let (n, f, w) = elliptic();
    let c = grading_chain(&[n.clone()], &f, &w, &ZeroWhenDeltaZero).unwrap();
    let grid: Vec<Vec<f64>> = [0.5, 0.25, 0.1, 0.05].iter().map(|&t| vec![t]).collect();
    let fit = twist_polynomiality_check(&c, &[n], &grid).unwrap();
    assert!(fit.passes(1e-9), "{fit:?}");
}

#[test]
fn two_variable_twist_is_polynomial() {
    let (n, f, w) = gap_three(1);
    let ns = [n.clone(), n.mul(&n)];
    let c = grading_chain(&ns, &f, &w, &ZeroWhenDeltaZero).unwrap();
    let ts = [0.5, 0.25, 0.1];
    let grid: Vec<Vec<f64>> = ts.iter().flat_map(|&a| ts.iter().map(move |&b| vec![a, b])).collect();
    let fit = twist_polynomiality_check(&c, &ns, &grid).unwrap();
    assert!(fit.passes(1e-9), "{fit:?}");
}

#[test]
fn non_commuting_monodromies_are_rejected() {
    let (n, f, w) = gap_three(1);
    let ns = [n, op(3, &[(2, 1, 1)])];
    assert!(matches!(grading_chain(&ns, &f, &w, &ZeroWhenDeltaZero), Err(DeligneError::Conditions(_))));
}

#[test]
fn deligne_grading_rescale_invariance() {
    let (n, f, w) = gap_three(2);
    let y = deligne_grading(&n, &f, &w).unwrap().y;
    for s in [hodgelim::scalar::rational(2, 1), hodgelim::scalar::rational(1, 3)] {
        let ln = n.scale(&hodgelim::scalar::exact(s, hodgelim::scalar::rational(0, 1)));
        assert_eq!(deligne_grading(&ln, &f, &w).unwrap().y, y);
    }
}

#[test]
fn zero_monodromy_gives_deligne_grading_of_f() {
    // Tate extension with F^0 = <e0 + e1>
    let f = dec(2, &[(0, vec![v(&[1, 1])]), (-1, vec![e(2, 1)])]);
    let w = inc(2, &[(0, vec![e(2, 0)]), (-2, vec![e(2, 1)])]);
    let z = op(2, &[]);
    let g = deligne_grading(&z, &f, &w).unwrap();
    assert_eq!(g.y, y_grading(&f, &w).unwrap());
    let c = grading_chain(&[z], &f, &w, &ZeroWhenDeltaZero).unwrap();
    assert_eq!(c.yhat[0], c.yhat[1]);
}

#[test]
fn pure_weight_grading_is_scalar() {
    let (n, f, w) = elliptic();
    assert_eq!(deligne_grading(&n, &f, &w).unwrap().y, diag(&[1, 1]));
}

#[test]
fn axiom_four_failure_is_reported() {
    let (n, _, w) = elliptic();
    let rep = check_deligne_system(&[n], &w, Some(&op(2, &[])));
    assert!(rep.existence && rep.restriction && rep.n_levels);
    assert!(!rep.grading);
}
