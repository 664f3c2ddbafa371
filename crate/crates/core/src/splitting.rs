//! The sl2-splitting of a mixed Hodge structure, behind a provider trait.
//!
//! `ZeroWhenDeltaZero` handles the split case only. `CksRecursion` implements
//! the low-degree closed forms of the ζ-correction, which cover weight spans
//! up to four; beyond that it reports `XiUnavailable`.

use crate::filtration::{Decreasing, Increasing};
use crate::matrix::Matrix;
use crate::mhs::{delta_split, Mhs, MhsError};
use crate::scalar::Scalar;

/// Output of an sl2-splitting computation.
#[derive(Clone, Debug)]
pub struct Splitting<S: Scalar> {
    pub delta: Matrix<S>,
    /// ξ with F̂ = e^{-ξ} F.
    pub xi: Matrix<S>,
    pub fhat: Decreasing<S>,
}

impl<S: Scalar> Splitting<S> {
    pub fn mhs(&self, w: &Increasing<S>) -> Mhs<S> {
        Mhs::new(self.fhat.clone(), w.clone())
    }

    /// Ŷ_(F,W) = Y_(F̂,W).
    pub fn yhat(&self, w: &Increasing<S>) -> Result<Matrix<S>, MhsError> {
        crate::mhs::y_grading(&self.fhat, w)
    }
}

pub trait XiProvider<S: Scalar>: Sync {
    fn name(&self) -> &'static str;
    fn split(&self, mhs: &Mhs<S>) -> Result<Splitting<S>, MhsError>;
}

/// ξ = 0 when δ = 0, otherwise unavailable.
#[derive(Clone, Copy, Debug, Default)]
pub struct ZeroWhenDeltaZero;

impl<S: Scalar> XiProvider<S> for ZeroWhenDeltaZero {
    fn name(&self) -> &'static str {
        "zero-when-delta-zero"
    }

    fn split(&self, mhs: &Mhs<S>) -> Result<Splitting<S>, MhsError> {
        let d = delta_split(mhs)?;
        let n = mhs.dim();
        if !d.delta.is_zero() {
            return Err(MhsError::XiUnavailable(
                "δ ≠ 0 and this provider only handles split structures".into(),
            ));
        }
        Ok(Splitting {
            delta: d.delta,
            xi: Matrix::zeros(n, n),
            fhat: mhs.f.clone(),
        })
    }
}

/// Low-degree ζ formulas: ζ^{-1,-1} = ζ^{-2,-2} = 0, ζ^{-1,-2} = -(i/2) δ^{-1,-2},
/// ζ^{-1,-3} = -(3i/4) δ^{-1,-3}, ζ^{q,p} = conj ζ^{p,q}; F̂ = e^{ζ} e^{-iδ} F.
/// Hodge components are taken with respect to the split structure (e^{-iδ}F, W).
#[derive(Clone, Copy, Debug, Default)]
pub struct CksRecursion;

pub const CKS_MAX_SPAN: i32 = 4;

impl CksRecursion {
    pub fn zeta<S: Scalar>(&self, delta: &Matrix<S>, split: &Mhs<S>) -> Result<Matrix<S>, MhsError> {
        let n = delta.rows();
        let bg = split.bigrading()?;
        let comps = bg.components(delta);
        let mut zeta = Matrix::zeros(n, n);
        let i = S::i();
        for (&(a, b), m) in &comps {
            if m.is_zero() {
                continue;
            }
            let coeff = match (a, b) {
                (-1, -1) | (-2, -2) => S::zero(),
                (-1, -2) => -(i.clone() * S::from_ratio(1, 2)),
                (-2, -1) => i.clone() * S::from_ratio(1, 2),
                (-1, -3) => -(i.clone() * S::from_ratio(3, 4)),
                (-3, -1) => i.clone() * S::from_ratio(3, 4),
                _ => {
                    return Err(MhsError::XiUnavailable(format!(
                        "δ has a ({a},{b}) component, outside the implemented range"
                    )))
                }
            };
            zeta = zeta.add(&m.scale(&coeff));
        }
        Ok(zeta)
    }
}

impl<S: Scalar> XiProvider<S> for CksRecursion {
    fn name(&self) -> &'static str {
        "cks-recursion"
    }

    fn split(&self, mhs: &Mhs<S>) -> Result<Splitting<S>, MhsError> {
        let n = mhs.dim();
        let span = mhs.w.highest() - mhs.w.lowest();
        let d = delta_split(mhs)?;
        if d.delta.is_zero() {
            return Ok(Splitting {
                delta: d.delta,
                xi: Matrix::zeros(n, n),
                fhat: mhs.f.clone(),
            });
        }
        if span > CKS_MAX_SPAN {
            return Err(MhsError::XiUnavailable(format!(
                "weight span {span} exceeds the implemented range ({CKS_MAX_SPAN})"
            )));
        }
        let zeta = self.zeta(&d.delta, &d.split)?;
        // e^{-ξ} = e^{ζ} e^{-iδ}
        let g = zeta.exp_nilpotent().mul(&d.delta.scale(&(-S::i())).exp_nilpotent());
        let xi = g.log_unipotent().neg();
        let fhat = mhs.f.act(&g);
        if !crate::mhs::is_split_real(&fhat, &mhs.w)? {
            return Err(MhsError::XiUnavailable("ζ-correction did not produce a split structure".into()));
        }
        Ok(Splitting {
            delta: d.delta,
            xi,
            fhat,
        })
    }
}
