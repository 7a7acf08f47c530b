//! Periodic grid, spectral transforms, differential operators and norms.

mod fft;
mod field;
mod grid;
mod norm;
mod ops;

use rayon::prelude::*;

pub use field::{PhysicalField, SpectralField, SpectralScalar, HERMITIAN_TOL};
pub use grid::Grid;
pub use norm::{l2_norm, norm, NormKind};
pub use ops::{
    band_limit, curl, dealias_in_place, dealiased_product, divergence, grad_linf, gradient,
    gradient_l2_sq, laplacian, leray_project, ProductKind,
};
pub use rustfft::num_complex::Complex64;

pub(crate) use fft::{analyze_many, synthesize_many};
pub(crate) use ops::dealias_scalar_in_place;

const SUM_CHUNK: usize = 4096;

/// Sum of `term(i)` for `i in 0..len` in a fixed association order, so the
/// result is independent of the worker-thread count.
pub(crate) fn det_sum(len: usize, term: impl Fn(usize) -> f64 + Sync) -> f64 {
    let chunks = len.div_ceil(SUM_CHUNK);
    let partials: Vec<f64> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let end = ((c + 1) * SUM_CHUNK).min(len);
            (c * SUM_CHUNK..end).map(&term).sum()
        })
        .collect();
    partials.iter().sum()
}
