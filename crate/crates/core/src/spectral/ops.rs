//! Spectral differential operators and dealiased quadratic products.

use std::f64::consts::PI;

use rayon::prelude::*;
use rustfft::num_complex::Complex64;

use super::fft;
use super::field::{PhysicalField, SpectralField, SpectralScalar};
use super::grid::Grid;
use crate::error::Result;

const TWO_PI: f64 = 2.0 * PI;

/// Bilinear pointwise product evaluated by [`dealiased_product`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProductKind {
    /// `(a . grad) b`, i.e. `sum_j a_j d_j b_i`.
    DotGrad,
    /// `a x b`.
    Cross,
}

fn map_modes(
    f: &SpectralField,
    divergence_free: bool,
    op: impl Fn([i32; 3], [Complex64; 3]) -> [Complex64; 3] + Sync,
) -> SpectralField {
    let grid = f.grid();
    let [c0, c1, c2] = f.components();
    let out: Vec<[Complex64; 3]> = (0..grid.len())
        .into_par_iter()
        .map(|idx| op(grid.wavevector(idx), [c0[idx], c1[idx], c2[idx]]))
        .collect();
    let mut comps = [
        Vec::with_capacity(grid.len()),
        Vec::with_capacity(grid.len()),
        Vec::with_capacity(grid.len()),
    ];
    for v in out {
        for c in 0..3 {
            comps[c].push(v[c]);
        }
    }
    SpectralField::from_components(grid, comps, divergence_free)
}

#[inline]
fn i2pi(k: i32, c: Complex64) -> Complex64 {
    // i * 2 pi k * c
    let s = TWO_PI * k as f64;
    Complex64::new(-s * c.im, s * c.re)
}

/// `curl f`, multiplier `i 2 pi k x c(k)`. The output is divergence-free.
pub fn curl(f: &SpectralField) -> SpectralField {
    map_modes(f, true, |k, c| {
        [
            i2pi(k[1], c[2]) - i2pi(k[2], c[1]),
            i2pi(k[2], c[0]) - i2pi(k[0], c[2]),
            i2pi(k[0], c[1]) - i2pi(k[1], c[0]),
        ]
    })
}

/// `Laplacian f`, multiplier `-4 pi^2 |k|^2`.
pub fn laplacian(f: &SpectralField) -> SpectralField {
    f.apply_radial(|ksq| -4.0 * PI * PI * ksq as f64)
}

/// Leray projection onto divergence-free fields; the mean is kept.
pub fn leray_project(f: &SpectralField) -> SpectralField {
    map_modes(f, true, |k, c| {
        let ksq = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64;
        if ksq == 0.0 {
            return c;
        }
        let dot = (c[0] * k[0] as f64 + c[1] * k[1] as f64 + c[2] * k[2] as f64) / ksq;
        [
            c[0] - dot * k[0] as f64,
            c[1] - dot * k[1] as f64,
            c[2] - dot * k[2] as f64,
        ]
    })
}

/// Gradient of a scalar, multiplier `i 2 pi k`.
pub fn gradient(s: &SpectralScalar) -> SpectralField {
    let grid = s.grid();
    let c = s.coeffs();
    let mut comps: [Vec<Complex64>; 3] = Default::default();
    for (axis, comp) in comps.iter_mut().enumerate() {
        *comp = (0..grid.len())
            .into_par_iter()
            .map(|idx| i2pi(grid.wavevector(idx)[axis], c[idx]))
            .collect();
    }
    SpectralField::from_components(grid, comps, false)
}

/// Divergence, multiplier `i 2 pi k .`.
pub fn divergence(f: &SpectralField) -> SpectralScalar {
    let grid = f.grid();
    let [c0, c1, c2] = f.components();
    let coeffs = (0..grid.len())
        .into_par_iter()
        .map(|idx| {
            let k = grid.wavevector(idx);
            i2pi(k[0], c0[idx]) + i2pi(k[1], c1[idx]) + i2pi(k[2], c2[idx])
        })
        .collect();
    SpectralScalar::from_coeffs(grid, coeffs)
}

/// Spectral derivative `d_axis` of one component slice.
pub(crate) fn derivative(grid: &Grid, c: &[Complex64], axis: usize) -> Vec<Complex64> {
    (0..grid.len())
        .into_par_iter()
        .map(|idx| i2pi(grid.wavevector(idx)[axis], c[idx]))
        .collect()
}

/// Zeroes every coefficient with some `|k_i|` above `floor(n/3)`.
pub fn dealias_in_place(f: &mut SpectralField) {
    let flag = f.is_divergence_free();
    let grid = f.grid().clone();
    let mask = grid.dealias_mask();
    let len = grid.len();
    f.coeffs_mut()
        .par_iter_mut()
        .enumerate()
        .for_each(|(i, c)| {
            if !mask[i % len] {
                *c = Complex64::default();
            }
        });
    f.set_divergence_free_unchecked(flag);
}

pub(crate) fn dealias_scalar_in_place(s: &mut SpectralScalar) {
    let grid = s.grid().clone();
    let mask = grid.dealias_mask();
    s.coeffs_mut().par_iter_mut().enumerate().for_each(|(i, c)| {
        if !mask[i] {
            *c = Complex64::default();
        }
    });
}

/// Zeroes every coefficient with `|k| > radius`.
pub fn band_limit(f: &SpectralField, radius: f64) -> SpectralField {
    let r2 = radius * radius;
    f.apply_radial(|ksq| if ksq as f64 <= r2 { 1.0 } else { 0.0 })
}

/// Quadratic product evaluated on the grid and truncated by the 2/3 rule.
pub fn dealiased_product(a: &SpectralField, b: &SpectralField, kind: ProductKind) -> Result<SpectralField> {
    a.grid().ensure_same(b.grid())?;
    let pa = a.to_physical_unchecked();
    let prod = match kind {
        ProductKind::Cross => pa.cross(&b.to_physical_unchecked())?,
        ProductKind::DotGrad => dot_grad_physical(&pa, b),
    };
    Ok(prod.to_spectral_dealiased())
}

/// `(a . grad) b` on the grid, given `a` in physical space.
pub(crate) fn dot_grad_physical(a: &PhysicalField, b: &SpectralField) -> PhysicalField {
    let grid = b.grid();
    let len = grid.len();
    let mut derivs: Vec<Vec<Complex64>> = Vec::with_capacity(9);
    for i in 0..3 {
        for j in 0..3 {
            derivs.push(derivative(grid, b.component(i), j));
        }
    }
    let refs: Vec<&[Complex64]> = derivs.iter().map(|d| d.as_slice()).collect();
    let phys = fft::synthesize_many(grid, &refs);
    let av = a.values();
    let comps = (0..3)
        .map(|i| {
            (0..len)
                .into_par_iter()
                .map(|p| {
                    av[p] * phys[3 * i][p] + av[len + p] * phys[3 * i + 1][p] + av[2 * len + p] * phys[3 * i + 2][p]
                })
                .collect()
        })
        .collect();
    PhysicalField::from_components(grid, comps)
}

/// `||grad f||_2^2 = sum_k 4 pi^2 |k|^2 |c(k)|^2`.
pub fn gradient_l2_sq(f: &SpectralField) -> f64 {
    let ksq = f.grid().ksq();
    let len = f.grid().len();
    let c = f.coeffs();
    4.0 * PI * PI * super::det_sum(c.len(), |i| ksq[i % len] as f64 * c[i].norm_sqr())
}

/// Pointwise maximum of the Frobenius norm of the Jacobian `d_j f_i`.
pub fn grad_linf(f: &SpectralField) -> f64 {
    let grid = f.grid();
    let len = grid.len();
    let mut derivs: Vec<Vec<Complex64>> = Vec::with_capacity(9);
    for i in 0..3 {
        for j in 0..3 {
            derivs.push(derivative(grid, f.component(i), j));
        }
    }
    let refs: Vec<&[Complex64]> = derivs.iter().map(|d| d.as_slice()).collect();
    let phys = fft::synthesize_many(grid, &refs);
    (0..len)
        .into_par_iter()
        .map(|p| phys.iter().map(|d| d[p] * d[p]).sum::<f64>().sqrt())
        .reduce(|| 0.0, f64::max)
}
