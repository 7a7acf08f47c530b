use std::f64::consts::PI;

use super::field::SpectralField;
use crate::error::{Error, Result};

/// Which norm [`norm`] evaluates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NormKind {
    /// Grid `L^r` norm, `(mean |f|^r)^{1/r}`.
    Lr(f64),
    /// Pointwise maximum of the Euclidean magnitude.
    Linf,
    /// `L^2` via Parseval.
    L2,
    /// Spectral `H^s`, `(sum (1 + |2 pi k|^2)^s |c(k)|^2)^{1/2}`.
    Hs(f64),
}

pub fn norm(f: &SpectralField, kind: NormKind) -> Result<f64> {
    match kind {
        NormKind::Lr(r) => {
            if !(r >= 1.0) {
                return Err(Error::InvalidExponent(r));
            }
            f.to_physical()?.lr_norm(r)
        }
        NormKind::Linf => Ok(f.to_physical()?.linf_norm()),
        NormKind::L2 => Ok(l2_norm(f)),
        NormKind::Hs(s) => {
            let ksq = f.grid().ksq();
            let len = f.grid().len();
            let c = f.coeffs();
            let sum = super::det_sum(c.len(), |i| {
                let w = 1.0 + 4.0 * PI * PI * ksq[i % len] as f64;
                w.powf(s) * c[i].norm_sqr()
            });
            Ok(sum.sqrt())
        }
    }
}

/// Parseval `L^2` norm over the unit torus.
pub fn l2_norm(f: &SpectralField) -> f64 {
    let c = f.coeffs();
    super::det_sum(c.len(), |i| c[i].norm_sqr()).sqrt()
}
