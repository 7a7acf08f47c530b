use std::fmt;
use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Uniform periodic grid on the unit torus `[0,1)^3`.
///
/// Spectral data is stored in FFT order: axis index `i` maps to the integer
/// wavenumber `i` for `i < n/2` and `i - n` for `i > n/2`. The Nyquist plane
/// `i = n/2` is kept at zero. Flat index is `(i * n + j) * n + l` with `i`
/// along the first coordinate.
#[derive(Clone)]
pub struct Grid {
    inner: Arc<GridTables>,
}

struct GridTables {
    n: usize,
    wavenumbers: Vec<i32>,
    ksq: Vec<u32>,
    dealias: Vec<bool>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Grid {
    /// Builds the grid tables and FFT plans for `n` points per axis.
    ///
    /// `n` must be even and at least 16.
    pub fn new(n: usize) -> Result<Self> {
        if n < 16 {
            return Err(Error::InvalidGrid {
                n,
                reason: "need at least 16 points per axis",
            });
        }
        if n % 2 != 0 {
            return Err(Error::InvalidGrid {
                n,
                reason: "points per axis must be even",
            });
        }
        let half = n / 2;
        let wavenumbers: Vec<i32> = (0..n)
            .map(|i| {
                if i < half {
                    i as i32
                } else if i == half {
                    // Nyquist plane, always zero; the sign is irrelevant.
                    half as i32
                } else {
                    i as i32 - n as i32
                }
            })
            .collect();
        let cutoff = (n / 3) as i32;
        let total = n * n * n;
        let mut ksq = Vec::with_capacity(total);
        let mut dealias = Vec::with_capacity(total);
        for i in 0..n {
            for j in 0..n {
                for l in 0..n {
                    let (a, b, c) = (wavenumbers[i], wavenumbers[j], wavenumbers[l]);
                    ksq.push((a * a + b * b + c * c) as u32);
                    let nyq = i == half || j == half || l == half;
                    dealias
                        .push(!nyq && a.abs() <= cutoff && b.abs() <= cutoff && c.abs() <= cutoff);
                }
            }
        }
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        Ok(Grid {
            inner: Arc::new(GridTables {
                n,
                wavenumbers,
                ksq,
                dealias,
                forward,
                inverse,
            }),
        })
    }

    pub fn n(&self) -> usize {
        self.inner.n
    }

    /// Number of lattice points `n^3`.
    pub fn len(&self) -> usize {
        self.inner.ksq.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Largest resolved wavenumber per axis, `n/2 - 1`.
    pub fn k_max(&self) -> i32 {
        (self.inner.n / 2) as i32 - 1
    }

    /// Per-axis 2/3-rule cutoff `floor(n/3)`.
    pub fn dealias_cutoff(&self) -> i32 {
        (self.inner.n / 3) as i32
    }

    pub fn spacing(&self) -> f64 {
        1.0 / self.inner.n as f64
    }

    /// Integer wavenumber for axis index `i`.
    #[inline]
    pub fn wavenumber(&self, i: usize) -> i32 {
        self.inner.wavenumbers[i]
    }

    /// Wavevector of the flat index.
    #[inline]
    pub fn wavevector(&self, idx: usize) -> [i32; 3] {
        let n = self.inner.n;
        let l = idx % n;
        let j = (idx / n) % n;
        let i = idx / (n * n);
        [
            self.inner.wavenumbers[i],
            self.inner.wavenumbers[j],
            self.inner.wavenumbers[l],
        ]
    }

    /// `|k|^2` for every flat index.
    #[inline]
    pub fn ksq(&self) -> &[u32] {
        &self.inner.ksq
    }

    /// 2/3-rule mask (false on the Nyquist planes as well).
    #[inline]
    pub fn dealias_mask(&self) -> &[bool] {
        &self.inner.dealias
    }

    #[inline]
    pub fn is_nyquist(&self, idx: usize) -> bool {
        let n = self.inner.n;
        let h = n / 2;
        idx % n == h || (idx / n) % n == h || idx / (n * n) == h
    }

    /// Flat index of `-k` for the flat index of `k`.
    #[inline]
    pub fn neg_index(&self, idx: usize) -> usize {
        let n = self.inner.n;
        let l = idx % n;
        let j = (idx / n) % n;
        let i = idx / (n * n);
        let neg = |a: usize| (n - a) % n;
        (neg(i) * n + neg(j)) * n + neg(l)
    }

    /// Flat index of an arbitrary resolved wavevector.
    pub fn index_of(&self, k: [i32; 3]) -> Option<usize> {
        let km = self.k_max();
        if k.iter().any(|c| c.abs() > km) {
            return None;
        }
        let n = self.inner.n as i32;
        let wrap = |c: i32| c.rem_euclid(n) as usize;
        Some((wrap(k[0]) * self.inner.n + wrap(k[1])) * self.inner.n + wrap(k[2]))
    }

    pub(crate) fn forward_plan(&self) -> &Arc<dyn Fft<f64>> {
        &self.inner.forward
    }

    pub(crate) fn inverse_plan(&self) -> &Arc<dyn Fft<f64>> {
        &self.inner.inverse
    }

    pub(crate) fn ensure_same(&self, other: &Grid) -> Result<()> {
        if self.n() == other.n() {
            Ok(())
        } else {
            Err(Error::GridMismatch {
                left: self.n(),
                right: other.n(),
            })
        }
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.n() == other.n()
    }
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid").field("n", &self.n()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_sizes() {
        assert!(Grid::new(8).is_err());
        assert!(Grid::new(33).is_err());
        assert!(Grid::new(48).is_ok());
    }

    #[test]
    fn derived_sizes() {
        let g = Grid::new(64).unwrap();
        assert_eq!(g.k_max(), 31);
        assert_eq!(g.dealias_cutoff(), 21);
        assert!(g.dealias_cutoff() < g.k_max());
    }

    #[test]
    fn negation_roundtrip() {
        let g = Grid::new(16).unwrap();
        for idx in [0usize, 1, 17, 300, 4095] {
            let k = g.wavevector(idx);
            if g.is_nyquist(idx) {
                continue;
            }
            let neg = g.neg_index(idx);
            assert_eq!(g.wavevector(neg), [-k[0], -k[1], -k[2]]);
            assert_eq!(g.index_of(k), Some(idx));
        }
    }
}
