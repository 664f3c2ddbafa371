use std::fmt::Write;

use hodgelim::matrix::Matrix;
use hodgelim::scalar::Scalar;

/// Text report built line by line; written to stdout at the end so that
/// identical inputs give byte-identical output.
#[derive(Default)]
pub struct Report {
    buf: String,
}

impl Report {
    pub fn line(&mut self, s: impl AsRef<str>) {
        self.buf.push_str(s.as_ref());
        self.buf.push('\n');
    }

    pub fn check(&mut self, passed: bool, name: &str, detail: &str) {
        let tag = if passed { "pass" } else { "FAIL" };
        if detail.is_empty() {
            self.line(format!("[{tag}] {name}"));
        } else {
            self.line(format!("[{tag}] {name}: {detail}"));
        }
    }

    pub fn matrix<S: Scalar>(&mut self, label: &str, m: &Matrix<S>) {
        self.line(format!("{label} = {}", matrix(m)));
    }

    pub fn finish(self) -> String {
        self.buf
    }
}

pub fn matrix<S: Scalar>(m: &Matrix<S>) -> String {
    let mut out = String::from("[");
    for i in 0..m.rows() {
        if i > 0 {
            out.push_str(", ");
        }
        out.push('[');
        for j in 0..m.cols() {
            if j > 0 {
                out.push_str(", ");
            }
            write!(out, "{}", m[(i, j)].text()).unwrap();
        }
        out.push(']');
    }
    out.push(']');
    out
}

pub fn vector<S: Scalar>(v: &[S]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.text()).collect();
    format!("({})", parts.join(", "))
}

pub fn floats(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.6e}")).collect();
    format!("({})", parts.join(", "))
}
