//! Scalar fields used by the linear algebra layer.
//!
//! Two fields implement [`Scalar`]: exact Gaussian rationals ([`Exact`]) and
//! double precision complex numbers ([`Float`]). Every algorithm in the crate
//! is written once, generically, and runs in either mode.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering};

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Exact scalar: a + b i with a, b arbitrary precision rationals.
pub type Exact = Complex<BigRational>;

/// Floating scalar.
pub type Float = Complex64;

static FLOAT_TOL_BITS: AtomicU64 = AtomicU64::new(0x3E11_2E0B_E826_D695); // 1e-9

/// Threshold below which a (normalized) float is treated as zero in rank decisions.
pub fn float_tolerance() -> f64 {
    f64::from_bits(FLOAT_TOL_BITS.load(Ordering::Relaxed))
}

/// Set the float rank threshold. Returns the previous value.
pub fn set_float_tolerance(tol: f64) -> f64 {
    assert!(tol > 0.0 && tol.is_finite(), "tolerance must be positive");
    f64::from_bits(FLOAT_TOL_BITS.swap(tol.to_bits(), Ordering::Relaxed))
}

pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn i() -> Self;
    fn from_i64(n: i64) -> Self;
    fn from_ratio(num: i64, den: i64) -> Self;
    fn from_exact(x: &Exact) -> Self;
    /// Exact for [`Exact`] (binary value of the double), identity for floats.
    fn from_f64(x: f64) -> Self;
    fn conj(&self) -> Self;
    /// Exact zero test, or |x| <= tolerance for floats.
    fn is_zero(&self) -> bool;
    /// Magnitude used for pivot selection.
    fn magnitude(&self) -> f64;
    fn to_complex(&self) -> Complex64;
    /// Text form: canonical rational syntax for exact values, decimal for floats.
    fn text(&self) -> String;

    fn is_real(&self) -> bool {
        (self.clone() - self.conj()).is_zero()
    }

    fn approx_eq(&self, other: &Self) -> bool {
        (self.clone() - other.clone()).is_zero()
    }

    fn real_part(&self) -> Self {
        (self.clone() + self.conj()) * Self::from_ratio(1, 2)
    }

    fn imag_part(&self) -> Self {
        (self.clone() - self.conj()) * Self::from_ratio(1, 2) * (-Self::i())
    }
}

impl Scalar for Exact {
    const EXACT: bool = true;

    fn zero() -> Self {
        Complex::new(BigRational::zero(), BigRational::zero())
    }
    fn one() -> Self {
        Complex::new(BigRational::one(), BigRational::zero())
    }
    fn i() -> Self {
        Complex::new(BigRational::zero(), BigRational::one())
    }
    fn from_i64(n: i64) -> Self {
        Complex::new(BigRational::from_integer(n.into()), BigRational::zero())
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        Complex::new(BigRational::new(num.into(), den.into()), BigRational::zero())
    }
    fn from_exact(x: &Exact) -> Self {
        x.clone()
    }
    fn from_f64(x: f64) -> Self {
        Complex::new(BigRational::from_float(x).expect("finite"), BigRational::zero())
    }
    fn conj(&self) -> Self {
        Complex::new(self.re.clone(), -self.im.clone())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn magnitude(&self) -> f64 {
        let c = self.to_complex();
        c.norm()
    }
    fn to_complex(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }
    fn text(&self) -> String {
        format_exact(self)
    }
}

impl Scalar for Float {
    const EXACT: bool = false;

    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn i() -> Self {
        Complex64::new(0.0, 1.0)
    }
    fn from_i64(n: i64) -> Self {
        Complex64::new(n as f64, 0.0)
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        Complex64::new(num as f64 / den as f64, 0.0)
    }
    fn from_exact(x: &Exact) -> Self {
        x.to_complex()
    }
    fn from_f64(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn conj(&self) -> Self {
        Complex64::conj(self)
    }
    fn is_zero(&self) -> bool {
        self.norm() <= float_tolerance()
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    fn to_complex(&self) -> Complex64 {
        *self
    }
    fn text(&self) -> String {
        format_float(self)
    }
}

/// Exact rational from a finite f64, with no rounding.
pub fn exact_from_f64(x: f64) -> Option<BigRational> {
    BigRational::from_float(x)
}

/// Exact Gaussian rational equal to the given complex float.
pub fn exact_from_complex(z: Complex64) -> Option<Exact> {
    Some(Complex::new(exact_from_f64(z.re)?, exact_from_f64(z.im)?))
}

pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(num.into(), den.into())
}

pub fn exact(re: BigRational, im: BigRational) -> Exact {
    Complex::new(re, im)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed scalar {text:?}: {reason}")]
pub struct ScalarParseError {
    pub text: String,
    pub reason: String,
}

fn parse_rational(s: &str) -> Result<BigRational, String> {
    let s = s.trim();
    if s.is_empty() {
        return Err("empty number".into());
    }
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| format!("bad numerator {n:?}"))?;
        let d = BigInt::from_str(d.trim()).map_err(|_| format!("bad denominator {d:?}"))?;
        if d.is_zero() {
            return Err("zero denominator".into());
        }
        Ok(BigRational::new(n, d))
    } else {
        let n = BigInt::from_str(s).map_err(|_| format!("bad integer {s:?}"))?;
        Ok(BigRational::from_integer(n))
    }
}

/// Parse "a/b+c/d*i" style scalars. Accepted: "3", "-1/2", "2/3*i", "i", "-i",
/// "1/2-3*i", "1+i".
pub fn parse_exact(text: &str) -> Result<Exact, ScalarParseError> {
    let err = |reason: String| ScalarParseError {
        text: text.to_string(),
        reason,
    };
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(err("empty".into()));
    }
    if !s.ends_with('i') {
        return parse_rational(&s).map(|r| exact(r, BigRational::zero())).map_err(err);
    }
    // split at the last sign that is not the leading one
    let body = &s[..s.len() - 1];
    let split = body
        .char_indices()
        .filter(|&(k, c)| k > 0 && (c == '+' || c == '-'))
        .map(|(k, _)| k)
        .last();
    let (re_txt, im_txt) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("", body),
    };
    let starred = im_txt.ends_with('*');
    let im_txt = im_txt.strip_suffix('*').unwrap_or(im_txt);
    if starred && matches!(im_txt, "" | "+" | "-") {
        return Err(err("missing imaginary coefficient".into()));
    }
    let im = match im_txt {
        "" | "+" => BigRational::one(),
        "-" => -BigRational::one(),
        t => parse_rational(t.strip_prefix('+').unwrap_or(t)).map_err(err)?,
    };
    let re = if re_txt.is_empty() {
        BigRational::zero()
    } else {
        parse_rational(re_txt).map_err(err)?
    };
    Ok(exact(re, im))
}

fn fmt_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Canonical text form; zero parts are omitted.
pub fn format_exact(x: &Exact) -> String {
    match (x.re.is_zero(), x.im.is_zero()) {
        (true, true) => "0".into(),
        (false, true) => fmt_rational(&x.re),
        (true, false) => format!("{}*i", fmt_rational(&x.im)),
        (false, false) => {
            let sign = if x.im.is_negative() { '-' } else { '+' };
            format!("{}{}{}*i", fmt_rational(&x.re), sign, fmt_rational(&x.im.abs()))
        }
    }
}

pub fn format_float(x: &Float) -> String {
    if x.im == 0.0 {
        format!("{}", x.re)
    } else if x.re == 0.0 {
        format!("{}*i", x.im)
    } else {
        format!("{}{:+}*i", x.re, x.im)
    }
}

/// Whether a Gaussian rational is a (real) integer.
pub fn is_gaussian_integer_real(x: &Exact) -> bool {
    x.im.is_zero() && x.re.is_integer()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_roundtrip() {
        for t in ["0", "3", "-1/2", "2/3*i", "1/2-3*i", "-7+1/5*i", "1*i", "-1*i"] {
            let x = parse_exact(t).unwrap();
            assert_eq!(format_exact(&x), t);
        }
        assert_eq!(parse_exact("i").unwrap(), Exact::i());
        assert_eq!(parse_exact("-i").unwrap(), -Exact::i());
        assert_eq!(format_exact(&parse_exact("1 + i").unwrap()), "1+1*i");
        assert_eq!(format_exact(&parse_exact("4/2").unwrap()), "2");
    }

    #[test]
    fn parse_rejects_garbage() {
        for t in ["", "1/0", "abc", "1/2/3", "1+2", "*i"] {
            assert!(parse_exact(t).is_err(), "{t}");
        }
    }

    #[test]
    fn float_zero_uses_tolerance() {
        assert!(Scalar::is_zero(&Complex64::new(1e-12, 0.0)));
        assert!(!Scalar::is_zero(&Complex64::new(1e-6, 0.0)));
    }

    #[test]
    fn exact_from_float_is_exact() {
        let z = Complex64::new(0.1, -2.5);
        let e = exact_from_complex(z).unwrap();
        assert_eq!(e.to_complex(), z);
    }
}
