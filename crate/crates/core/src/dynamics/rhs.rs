use super::params::SolverParams;
use crate::error::Result;
use crate::spectral::{curl, dealiased_product, laplacian, leray_project, Complex64, ProductKind, SpectralField};

/// `eta curl((curl b) x b)`.
pub fn hall_term(b: &SpectralField, eta: f64) -> Result<SpectralField> {
    let j = curl(b);
    let mut out = curl(&dealiased_product(&j, b, ProductKind::Cross)?).scaled(eta);
    out.set_divergence_free_unchecked(true);
    Ok(out)
}

pub(crate) fn zero_mean(f: &mut SpectralField) {
    let flag = f.is_divergence_free();
    let len = f.grid().len();
    let c = f.coeffs_mut();
    for comp in 0..3 {
        c[comp * len] = Complex64::default();
    }
    f.set_divergence_free_unchecked(flag);
}

/// `P(-(u.grad)u + (b.grad)b + f) + nu Lap u`, evaluated in rotational form
/// `P(u x curl u + curl b x b) + f + nu Lap u`; gradients drop out under `P`.
pub fn rhs_momentum(u: &SpectralField, b: &SpectralField, forcing: &SpectralField, p: &SolverParams) -> Result<SpectralField> {
    let pu = u.to_physical_unchecked();
    let pw = curl(u).to_physical_unchecked();
    let pb = b.to_physical_unchecked();
    let pj = curl(b).to_physical_unchecked();
    let mut nl = pu.cross(&pw)?;
    nl.add_assign(&pj.cross(&pb)?);
    let mut out = leray_project(&nl.to_spectral_dealiased());
    zero_mean(&mut out);
    let out = out.axpy(1.0, forcing).axpy(p.nu, &laplacian(u));
    Ok(out)
}

/// `curl(u x b) - eta curl((curl b) x b) + mu Lap b`, the curl form of
/// `-(u.grad)b + (b.grad)u - eta curl((curl b) x b) + mu Lap b`.
pub fn rhs_induction(u: &SpectralField, b: &SpectralField, p: &SolverParams) -> Result<SpectralField> {
    let pu = u.to_physical_unchecked();
    let pb = b.to_physical_unchecked();
    let pj = curl(b).to_physical_unchecked();
    let mut e = pu.cross(&pb)?;
    e.axpy_assign(-p.eta, &pj.cross(&pb)?);
    let mut out = curl(&e.to_spectral_dealiased()).axpy(p.mu, &laplacian(b));
    out.set_divergence_free_unchecked(true);
    Ok(out)
}

/// `-eta curl((curl b) x b) + mu Lap b`.
pub fn rhs_emhd(b: &SpectralField, p: &SolverParams) -> Result<SpectralField> {
    let mut out = hall_term(b, p.eta)?.scaled(-1.0).axpy(p.mu, &laplacian(b));
    out.set_divergence_free_unchecked(true);
    Ok(out)
}
