use super::partition::{lambda, DyadicPartition};
use crate::error::Result;
use crate::spectral::{curl, dealiased_product, norm, NormKind, ProductKind, SpectralField};

/// `[Delta_q, u_{<=p-2} . grad] v_p
///   = Delta_q (u_{<=p-2} . grad v_p) - u_{<=p-2} . grad Delta_q v_p`.
pub fn commutator_convection(
    partition: &DyadicPartition,
    q: i32,
    u: &SpectralField,
    vp: &SpectralField,
    p: i32,
) -> Result<SpectralField> {
    partition.check(q)?;
    partition.check(p)?;
    u.grid().ensure_same(vp.grid())?;
    let low = partition.lowpass(u, p - 2)?;
    let outer = partition.project(&dealiased_product(&low, vp, ProductKind::DotGrad)?, q)?;
    let inner = dealiased_product(&low, &partition.project(vp, q)?, ProductKind::DotGrad)?;
    Ok(&outer - &inner)
}

/// `[Delta_q, b_{<=p-2} x curl] h_p
///   = Delta_q (b_{<=p-2} x curl h_p) - b_{<=p-2} x curl Delta_q h_p`.
pub fn commutator_hall(
    partition: &DyadicPartition,
    q: i32,
    b: &SpectralField,
    hp: &SpectralField,
    p: i32,
) -> Result<SpectralField> {
    partition.check(q)?;
    partition.check(p)?;
    b.grid().ensure_same(hp.grid())?;
    let low = partition.lowpass(b, p - 2)?;
    let outer = partition.project(&dealiased_product(&low, &curl(hp), ProductKind::Cross)?, q)?;
    let inner = dealiased_product(&low, &curl(&partition.project(hp, q)?), ProductKind::Cross)?;
    Ok(&outer - &inner)
}

/// `sum_{p' <= p-2} lambda_{p'} ||f_{p'}||_inf`.
pub fn low_shell_gradient_weight(partition: &DyadicPartition, f: &SpectralField, p: i32) -> Result<f64> {
    let mut total = 0.0;
    for pp in -1..=(p - 2) {
        total += lambda(pp) * norm(&partition.project(f, pp)?, NormKind::Linf)?;
    }
    Ok(total)
}

/// Largest ratio over output shells `q` of
/// `||[Delta_q, u_{<=p-2}.grad] v_p||_2 / (||v_p||_2 sum lambda_{p'} ||u_{p'}||_inf)`.
/// Returns `None` when the right-hand side vanishes.
pub fn convection_ratio(partition: &DyadicPartition, u: &SpectralField, v: &SpectralField, p: i32) -> Result<Option<f64>> {
    let vp = partition.project(v, p)?;
    let bound = norm(&vp, NormKind::L2)? * low_shell_gradient_weight(partition, u, p)?;
    if bound == 0.0 {
        return Ok(None);
    }
    let mut worst: f64 = 0.0;
    for q in -1..=partition.q_max() {
        let c = commutator_convection(partition, q, u, &vp, p)?;
        worst = worst.max(norm(&c, NormKind::L2)? / bound);
    }
    Ok(Some(worst))
}

/// Same as [`convection_ratio`] for the Hall commutator with `r = 2`.
pub fn hall_ratio(partition: &DyadicPartition, b: &SpectralField, h: &SpectralField, p: i32) -> Result<Option<f64>> {
    let hp = partition.project(h, p)?;
    let bound = norm(&hp, NormKind::L2)? * low_shell_gradient_weight(partition, b, p)?;
    if bound == 0.0 {
        return Ok(None);
    }
    let mut worst: f64 = 0.0;
    for q in -1..=partition.q_max() {
        let c = commutator_hall(partition, q, b, &hp, p)?;
        worst = worst.max(norm(&c, NormKind::L2)? / bound);
    }
    Ok(Some(worst))
}
