#![allow(dead_code)]

use hodgelim::filtration::{Decreasing, Increasing};
use hodgelim::matrix::Matrix;
use hodgelim::scalar::{Exact, Scalar};

pub fn v(x: &[i64]) -> Vec<Exact> {
    x.iter().map(|&a| Exact::from_i64(a)).collect()
}

/// Vector with Gaussian integer entries given as (re, im).
pub fn vc(x: &[(i64, i64)]) -> Vec<Exact> {
    x.iter().map(|&(a, b)| hodgelim::scalar::exact(hodgelim::scalar::rational(a, 1), hodgelim::scalar::rational(b, 1))).collect()
}

pub fn inc(n: usize, gens: &[(i32, Vec<Vec<Exact>>)]) -> Increasing<Exact> {
    Increasing::from_generators(n, gens).unwrap()
}

pub fn dec(n: usize, gens: &[(i32, Vec<Vec<Exact>>)]) -> Decreasing<Exact> {
    Decreasing::from_generators(n, gens).unwrap()
}

pub fn e(n: usize, i: usize) -> Vec<Exact> {
    let mut out = vec![Exact::from_i64(0); n];
    out[i] = Exact::from_i64(1);
    out
}

/// Sum of c * E(src -> dst).
pub fn op(n: usize, entries: &[(usize, usize, i64)]) -> Matrix<Exact> {
    let mut m = Matrix::<Exact>::zeros(n, n);
    for &(src, dst, c) in entries {
        m[(dst, src)] = m[(dst, src)].clone() + Exact::from_i64(c);
    }
    m
}

pub fn diag(d: &[i64]) -> Matrix<Exact> {
    Matrix::diagonal(&d.iter().map(|&x| Exact::from_i64(x)).collect::<Vec<_>>())
}
