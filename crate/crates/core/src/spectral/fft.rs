//! Three-dimensional FFT kernels on top of `rustfft`.
//!
//! Real fields are transformed two at a time by packing them into the real
//! and imaginary parts of a single complex array. Every line transform is
//! independent, so results do not depend on the number of worker threads.

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::Fft;

use super::grid::Grid;

fn transform_in_place(grid: &Grid, data: &mut [Complex64], plan: &dyn Fft<f64>) {
    let n = grid.n();
    let plane = n * n;
    debug_assert_eq!(data.len(), plane * n);

    // Last axis (contiguous) and middle axis: independent per plane.
    data.par_chunks_mut(plane).for_each(|slab| {
        let mut scratch = vec![Complex64::default(); plan.get_inplace_scratch_len()];
        plan.process_with_scratch(slab, &mut scratch);
        let mut buf = vec![Complex64::default(); plane];
        for j in 0..n {
            for l in 0..n {
                buf[l * n + j] = slab[j * n + l];
            }
        }
        plan.process_with_scratch(&mut buf, &mut scratch);
        for j in 0..n {
            for l in 0..n {
                slab[j * n + l] = buf[l * n + j];
            }
        }
    });

    // First axis: gather per middle index, transform, scatter.
    let src: &[Complex64] = data;
    let columns: Vec<Vec<Complex64>> = (0..n)
        .into_par_iter()
        .map(|j| {
            let mut buf = vec![Complex64::default(); plane];
            for i in 0..n {
                let row = &src[(i * n + j) * n..(i * n + j + 1) * n];
                for (l, v) in row.iter().enumerate() {
                    buf[l * n + i] = *v;
                }
            }
            let mut scratch = vec![Complex64::default(); plan.get_inplace_scratch_len()];
            plan.process_with_scratch(&mut buf, &mut scratch);
            buf
        })
        .collect();
    for (j, buf) in columns.iter().enumerate() {
        for i in 0..n {
            let row = &mut data[(i * n + j) * n..(i * n + j + 1) * n];
            for (l, v) in row.iter_mut().enumerate() {
                *v = buf[l * n + i];
            }
        }
    }
}

/// Unnormalized inverse transform: `sum_k c(k) e^{+i 2 pi k.x}`.
pub fn inverse_in_place(grid: &Grid, data: &mut [Complex64]) {
    let plan = grid.inverse_plan().clone();
    transform_in_place(grid, data, plan.as_ref());
}

/// Forward transform normalized by `1/n^3`, so that it inverts
/// [`inverse_in_place`].
pub fn forward_in_place(grid: &Grid, data: &mut [Complex64]) {
    let plan = grid.forward_plan().clone();
    transform_in_place(grid, data, plan.as_ref());
    let scale = 1.0 / data.len() as f64;
    data.par_iter_mut().for_each(|c| *c *= scale);
}

/// Synthesizes one or two real fields from Hermitian coefficient arrays.
fn synthesize_pair(grid: &Grid, a: &[Complex64], b: Option<&[Complex64]>) -> (Vec<f64>, Option<Vec<f64>>) {
    let mut buf: Vec<Complex64> = match b {
        Some(b) => a
            .par_iter()
            .zip(b.par_iter())
            .map(|(x, y)| Complex64::new(x.re - y.im, x.im + y.re))
            .collect(),
        None => a.to_vec(),
    };
    inverse_in_place(grid, &mut buf);
    let re = buf.par_iter().map(|c| c.re).collect();
    let im = b.map(|_| buf.par_iter().map(|c| c.im).collect());
    (re, im)
}

/// Analyzes one or two real fields, returning exactly Hermitian spectra with
/// the Nyquist planes zeroed.
fn analyze_pair(grid: &Grid, a: &[f64], b: Option<&[f64]>) -> (Vec<Complex64>, Option<Vec<Complex64>>) {
    let mut buf: Vec<Complex64> = match b {
        Some(b) => a
            .par_iter()
            .zip(b.par_iter())
            .map(|(x, y)| Complex64::new(*x, *y))
            .collect(),
        None => a.par_iter().map(|x| Complex64::new(*x, 0.0)).collect(),
    };
    forward_in_place(grid, &mut buf);
    let buf = &buf;
    let first: Vec<Complex64> = (0..buf.len())
        .into_par_iter()
        .map(|idx| {
            if grid.is_nyquist(idx) {
                return Complex64::default();
            }
            let c = buf[idx];
            let d = buf[grid.neg_index(idx)].conj();
            (c + d) * 0.5
        })
        .collect();
    let second = b.map(|_| {
        (0..buf.len())
            .into_par_iter()
            .map(|idx| {
                if grid.is_nyquist(idx) {
                    return Complex64::default();
                }
                let c = buf[idx];
                let d = buf[grid.neg_index(idx)].conj();
                // (c - d) / (2i)
                let diff = c - d;
                Complex64::new(diff.im * 0.5, -diff.re * 0.5)
            })
            .collect()
    });
    (first, second)
}

/// Synthesizes any number of real scalar fields from their spectra.
pub fn synthesize_many(grid: &Grid, spectra: &[&[Complex64]]) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(spectra.len());
    for pair in spectra.chunks(2) {
        let (a, b) = synthesize_pair(grid, pair[0], pair.get(1).copied());
        out.push(a);
        if let Some(b) = b {
            out.push(b);
        }
    }
    out
}

/// Analyzes any number of real scalar fields into normalized spectra.
pub fn analyze_many(grid: &Grid, values: &[&[f64]]) -> Vec<Vec<Complex64>> {
    let mut out = Vec::with_capacity(values.len());
    for pair in values.chunks(2) {
        let (a, b) = analyze_pair(grid, pair[0], pair.get(1).copied());
        out.push(a);
        if let Some(b) = b {
            out.push(b);
        }
    }
    out
}
