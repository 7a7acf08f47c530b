use super::partition::{lambda, DyadicPartition};
use crate::error::{Error, Result};
use crate::spectral::{PhysicalField, SpectralField};

fn grid_norm(p: &PhysicalField, r: f64) -> Result<f64> {
    if r.is_infinite() {
        Ok(p.linf_norm())
    } else {
        p.lr_norm(r)
    }
}

/// `||f_q||_r / (lambda_q^{3(1/r - 1/s)} ||f_q||_s)` for `s >= r >= 1`;
/// pass `f64::INFINITY` for an `L^inf` exponent.
pub fn bernstein_ratio(partition: &DyadicPartition, f: &SpectralField, q: i32, r: f64, s: f64) -> Result<f64> {
    if !(r >= 1.0) || r.is_nan() {
        return Err(Error::InvalidExponent(r));
    }
    if !(s >= r) {
        return Err(Error::InvalidParameter {
            name: "s",
            value: s,
            constraint: "s >= r",
        });
    }
    let shell = partition.project(f, q)?;
    if shell.max_abs() == 0.0 {
        return Err(Error::ZeroShell(q));
    }
    let phys = shell.to_physical_unchecked();
    let num = grid_norm(&phys, r)?;
    let den = grid_norm(&phys, s)?;
    if den == 0.0 {
        return Err(Error::ZeroShell(q));
    }
    let inv_s = if s.is_infinite() { 0.0 } else { 1.0 / s };
    Ok(num / (lambda(q).powf(3.0 * (1.0 / r - inv_s)) * den))
}
