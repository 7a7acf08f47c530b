use std::ops::{Add, Mul, Sub};

use rayon::prelude::*;
use rustfft::num_complex::Complex64;

use super::fft;
use super::grid::Grid;
use crate::error::{Error, Result};

/// Relative tolerance used when validating Hermitian symmetry.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Fourier coefficients of a real 3-vector field on the unit torus.
///
/// `f(x) = sum_k c(k) exp(i 2 pi k.x)`; component `c` occupies
/// `coeffs[c * n^3 .. (c + 1) * n^3]` in FFT order.
#[derive(Clone, Debug)]
pub struct SpectralField {
    grid: Grid,
    coeffs: Vec<Complex64>,
    divergence_free: bool,
}

/// Fourier coefficients of a real scalar field.
#[derive(Clone, Debug)]
pub struct SpectralScalar {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

/// Point values of a real 3-vector field, component-major.
#[derive(Clone, Debug)]
pub struct PhysicalField {
    grid: Grid,
    values: Vec<f64>,
}

impl SpectralField {
    pub fn zeros(grid: &Grid) -> Self {
        SpectralField {
            grid: grid.clone(),
            coeffs: vec![Complex64::default(); 3 * grid.len()],
            divergence_free: true,
        }
    }

    /// Wraps raw coefficients. The divergence-free tag starts cleared.
    pub fn from_coeffs(grid: &Grid, coeffs: Vec<Complex64>) -> Self {
        assert_eq!(coeffs.len(), 3 * grid.len(), "coefficient length mismatch");
        SpectralField {
            grid: grid.clone(),
            coeffs,
            divergence_free: false,
        }
    }

    pub(crate) fn from_components(grid: &Grid, comps: [Vec<Complex64>; 3], divergence_free: bool) -> Self {
        let mut coeffs = Vec::with_capacity(3 * grid.len());
        for c in comps {
            coeffs.extend(c);
        }
        SpectralField {
            grid: grid.clone(),
            coeffs,
            divergence_free,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Mutable access clears the divergence-free tag.
    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        self.divergence_free = false;
        &mut self.coeffs
    }

    pub fn component(&self, c: usize) -> &[Complex64] {
        let len = self.grid.len();
        &self.coeffs[c * len..(c + 1) * len]
    }

    pub(crate) fn components(&self) -> [&[Complex64]; 3] {
        [self.component(0), self.component(1), self.component(2)]
    }

    pub fn is_divergence_free(&self) -> bool {
        self.divergence_free
    }

    /// Sets the tag after verifying the divergence defect is within tolerance.
    pub fn mark_divergence_free(&mut self) -> bool {
        self.divergence_free = self.divergence_defect() <= 1e-12;
        self.divergence_free
    }

    pub(crate) fn set_divergence_free_unchecked(&mut self, flag: bool) {
        self.divergence_free = flag;
    }

    /// Coefficient vector at wavevector `k`, zero if `k` is unresolved.
    pub fn coeff(&self, k: [i32; 3]) -> [Complex64; 3] {
        match self.grid.index_of(k) {
            Some(idx) => {
                let len = self.grid.len();
                [self.coeffs[idx], self.coeffs[len + idx], self.coeffs[2 * len + idx]]
            }
            None => [Complex64::default(); 3],
        }
    }

    /// Sets the coefficient at `k` and its conjugate partner at `-k`.
    pub fn set_mode(&mut self, k: [i32; 3], value: [Complex64; 3]) -> Result<()> {
        let idx = self.grid.index_of(k).ok_or(Error::InvalidParameter {
            name: "wavevector",
            value: k.iter().map(|c| c.abs()).max().unwrap_or(0) as f64,
            constraint: "|k_i| <= n/2 - 1",
        })?;
        let neg = self.grid.neg_index(idx);
        let len = self.grid.len();
        for (c, v) in value.iter().enumerate() {
            if idx == neg {
                self.coeffs[c * len + idx] = Complex64::new(v.re, 0.0);
            } else {
                self.coeffs[c * len + idx] = *v;
                self.coeffs[c * len + neg] = v.conj();
            }
        }
        self.divergence_free = false;
        Ok(())
    }

    /// Largest `|c(k) - conj c(-k)|` over the lattice together with its wavevector.
    pub fn hermitian_defect(&self) -> (f64, [i32; 3]) {
        let len = self.grid.len();
        let mut worst = (0.0, [0, 0, 0]);
        for c in 0..3 {
            let comp = &self.coeffs[c * len..(c + 1) * len];
            for idx in 0..len {
                let d = if self.grid.is_nyquist(idx) {
                    comp[idx].norm()
                } else {
                    (comp[idx] - comp[self.grid.neg_index(idx)].conj()).norm()
                };
                if d > worst.0 {
                    worst = (d, self.grid.wavevector(idx));
                }
            }
        }
        worst
    }

    pub fn check_hermitian(&self) -> Result<()> {
        let (defect, k) = self.hermitian_defect();
        if defect > HERMITIAN_TOL * self.max_abs().max(f64::MIN_POSITIVE) {
            Err(Error::SymmetryViolation { k, defect })
        } else {
            Ok(())
        }
    }

    /// Inverse transform to grid values; rejects non-Hermitian input.
    pub fn to_physical(&self) -> Result<PhysicalField> {
        self.check_hermitian()?;
        Ok(self.to_physical_unchecked())
    }

    pub(crate) fn to_physical_unchecked(&self) -> PhysicalField {
        let comps = self.components();
        let vals = fft::synthesize_many(&self.grid, &comps);
        PhysicalField::from_components(&self.grid, vals)
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Spatial mean, the `k = 0` coefficient.
    pub fn mean(&self) -> [f64; 3] {
        let len = self.grid.len();
        [self.coeffs[0].re, self.coeffs[len].re, self.coeffs[2 * len].re]
    }

    /// `max_k |k . c(k)| / max_k |c(k)|`.
    pub fn divergence_defect(&self) -> f64 {
        let len = self.grid.len();
        let scale = self.max_abs();
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst: f64 = 0.0;
        for idx in 0..len {
            let k = self.grid.wavevector(idx);
            let mut dot = Complex64::default();
            for (c, kc) in k.iter().enumerate() {
                dot += self.coeffs[c * len + idx] * *kc as f64;
            }
            worst = worst.max(dot.norm());
        }
        worst / scale
    }

    /// `L^2` inner product `int f.g dx` over the unit torus.
    pub fn inner(&self, other: &SpectralField) -> f64 {
        debug_assert!(self.grid == other.grid);
        crate::spectral::det_sum(self.coeffs.len(), |i| {
            let (a, b) = (self.coeffs[i], other.coeffs[i]);
            a.re * b.re + a.im * b.im
        })
    }

    /// Multiplies every coefficient by a real weight depending on `|k|^2`.
    pub fn apply_radial(&self, weight: impl Fn(u32) -> f64 + Sync) -> SpectralField {
        let ksq = self.grid.ksq();
        let len = self.grid.len();
        let coeffs = self
            .coeffs
            .par_iter()
            .enumerate()
            .map(|(i, c)| c * weight(ksq[i % len]))
            .collect();
        SpectralField {
            grid: self.grid.clone(),
            coeffs,
            divergence_free: self.divergence_free,
        }
    }

    pub fn scaled(&self, s: f64) -> SpectralField {
        SpectralField {
            grid: self.grid.clone(),
            coeffs: self.coeffs.par_iter().map(|c| c * s).collect(),
            divergence_free: self.divergence_free,
        }
    }

    /// `self + s * other` without allocating an intermediate.
    pub fn axpy(&self, s: f64, other: &SpectralField) -> SpectralField {
        debug_assert!(self.grid == other.grid);
        SpectralField {
            grid: self.grid.clone(),
            coeffs: self
                .coeffs
                .par_iter()
                .zip(other.coeffs.par_iter())
                .map(|(a, b)| a + b * s)
                .collect(),
            divergence_free: self.divergence_free && other.divergence_free,
        }
    }
}

impl Add for &SpectralField {
    type Output = SpectralField;
    fn add(self, rhs: &SpectralField) -> SpectralField {
        self.axpy(1.0, rhs)
    }
}

impl Sub for &SpectralField {
    type Output = SpectralField;
    fn sub(self, rhs: &SpectralField) -> SpectralField {
        self.axpy(-1.0, rhs)
    }
}

impl Mul<f64> for &SpectralField {
    type Output = SpectralField;
    fn mul(self, rhs: f64) -> SpectralField {
        self.scaled(rhs)
    }
}

impl SpectralScalar {
    pub fn zeros(grid: &Grid) -> Self {
        SpectralScalar {
            grid: grid.clone(),
            coeffs: vec![Complex64::default(); grid.len()],
        }
    }

    pub fn from_coeffs(grid: &Grid, coeffs: Vec<Complex64>) -> Self {
        assert_eq!(coeffs.len(), grid.len(), "coefficient length mismatch");
        SpectralScalar {
            grid: grid.clone(),
            coeffs,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn to_physical(&self) -> Vec<f64> {
        fft::synthesize_many(&self.grid, &[&self.coeffs]).pop().unwrap_or_default()
    }

    pub fn l2_norm(&self) -> f64 {
        crate::spectral::det_sum(self.coeffs.len(), |i| self.coeffs[i].norm_sqr()).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn axpy(&self, s: f64, other: &SpectralScalar) -> SpectralScalar {
        SpectralScalar {
            grid: self.grid.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b * s)
                .collect(),
        }
    }
}

impl PhysicalField {
    pub fn zeros(grid: &Grid) -> Self {
        PhysicalField {
            grid: grid.clone(),
            values: vec![0.0; 3 * grid.len()],
        }
    }

    /// Samples `f` at the grid points `x = (i, j, l) / n`.
    pub fn from_fn(grid: &Grid, f: impl Fn([f64; 3]) -> [f64; 3] + Sync) -> Self {
        let n = grid.n();
        let len = grid.len();
        let h = grid.spacing();
        let samples: Vec<[f64; 3]> = (0..len)
            .into_par_iter()
            .map(|idx| {
                let l = idx % n;
                let j = (idx / n) % n;
                let i = idx / (n * n);
                f([i as f64 * h, j as f64 * h, l as f64 * h])
            })
            .collect();
        let mut values = vec![0.0; 3 * len];
        for (idx, v) in samples.iter().enumerate() {
            for c in 0..3 {
                values[c * len + idx] = v[c];
            }
        }
        PhysicalField {
            grid: grid.clone(),
            values,
        }
    }

    pub(crate) fn from_components(grid: &Grid, comps: Vec<Vec<f64>>) -> Self {
        debug_assert_eq!(comps.len(), 3);
        let mut values = Vec::with_capacity(3 * grid.len());
        for c in comps {
            values.extend(c);
        }
        PhysicalField {
            grid: grid.clone(),
            values,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn component(&self, c: usize) -> &[f64] {
        let len = self.grid.len();
        &self.values[c * len..(c + 1) * len]
    }

    pub fn value(&self, idx: usize) -> [f64; 3] {
        let len = self.grid.len();
        [self.values[idx], self.values[len + idx], self.values[2 * len + idx]]
    }

    /// Forward transform without truncation beyond the Nyquist planes.
    pub fn to_spectral(&self) -> SpectralField {
        let comps = [self.component(0), self.component(1), self.component(2)];
        let mut spec = fft::analyze_many(&self.grid, &comps).into_iter();
        let c0 = spec.next().unwrap_or_default();
        let c1 = spec.next().unwrap_or_default();
        let c2 = spec.next().unwrap_or_default();
        SpectralField::from_components(&self.grid, [c0, c1, c2], false)
    }

    /// Forward transform followed by the 2/3-rule truncation.
    pub fn to_spectral_dealiased(&self) -> SpectralField {
        let mut out = self.to_spectral();
        super::ops::dealias_in_place(&mut out);
        out
    }

    /// Pointwise cross product.
    pub fn cross(&self, other: &PhysicalField) -> Result<PhysicalField> {
        self.grid.ensure_same(&other.grid)?;
        let len = self.grid.len();
        let (a, b) = (&self.values, &other.values);
        let mut values = vec![0.0; 3 * len];
        let (x, rest) = values.split_at_mut(len);
        let (y, z) = rest.split_at_mut(len);
        x.par_iter_mut()
            .zip(y.par_iter_mut())
            .zip(z.par_iter_mut())
            .enumerate()
            .for_each(|(i, ((x, y), z))| {
                let (a0, a1, a2) = (a[i], a[len + i], a[2 * len + i]);
                let (b0, b1, b2) = (b[i], b[len + i], b[2 * len + i]);
                *x = a1 * b2 - a2 * b1;
                *y = a2 * b0 - a0 * b2;
                *z = a0 * b1 - a1 * b0;
            });
        Ok(PhysicalField {
            grid: self.grid.clone(),
            values,
        })
    }

    pub fn add_assign(&mut self, other: &PhysicalField) {
        self.values
            .par_iter_mut()
            .zip(other.values.par_iter())
            .for_each(|(a, b)| *a += b);
    }

    pub fn scale_in_place(&mut self, s: f64) {
        self.values.par_iter_mut().for_each(|a| *a *= s);
    }

    /// `self += s * other`.
    pub fn axpy_assign(&mut self, s: f64, other: &PhysicalField) {
        self.values
            .par_iter_mut()
            .zip(other.values.par_iter())
            .for_each(|(a, b)| *a += s * b);
    }

    pub fn sub_assign(&mut self, other: &PhysicalField) {
        self.values
            .par_iter_mut()
            .zip(other.values.par_iter())
            .for_each(|(a, b)| *a -= b);
    }

    /// Pointwise Euclidean magnitude.
    pub fn magnitudes(&self) -> Vec<f64> {
        let len = self.grid.len();
        let v = &self.values;
        (0..len)
            .into_par_iter()
            .map(|i| (v[i] * v[i] + v[len + i] * v[len + i] + v[2 * len + i] * v[2 * len + i]).sqrt())
            .collect()
    }

    /// `(mean |v|^r)^{1/r}`.
    pub fn lr_norm(&self, r: f64) -> Result<f64> {
        if !(r >= 1.0) || !r.is_finite() {
            return Err(Error::InvalidExponent(r));
        }
        let mags = self.magnitudes();
        let total = crate::spectral::det_sum(mags.len(), |i| mags[i].powf(r));
        Ok((total / mags.len() as f64).powf(1.0 / r))
    }

    pub fn linf_norm(&self) -> f64 {
        self.magnitudes().into_iter().fold(0.0, f64::max)
    }
}
