//! Seeded random initial data.
//!
//! The stream is fully specified so other implementations can reproduce it:
//!
//! * Generator: SplitMix64. `state += 0x9E3779B97F4A7C15`, then
//!   `z = (z ^ z>>30) * 0xBF58476D1CE4E5B9`, `z = (z ^ z>>27) * 0x94D049BB133111EB`,
//!   output `z ^ z>>31`.
//! * Uniform: `(next >> 11) * 2^-53` in `[0, 1)`.
//! * Normal: Box-Muller cosine branch, `sqrt(-2 ln(1 - u1)) cos(2 pi u2)`;
//!   the sine branch is discarded.
//! * Lattice walk: `k1, k2, k3` ascending over `[-K, K]`, visiting only the
//!   half-lattice whose first nonzero component is positive, and only wavevectors
//!   with `k_min <= |k| <= k_max`. Each visited `k` draws six normals
//!   `(re_x, im_x, re_y, im_y, re_z, im_z)`, scaled by `|k|^-2`; `c(-k)` is the
//!   conjugate.
//! * Optional Leray projection, then rescale so the `L^2` norm equals the
//!   requested amplitude. The mean is always zero.

use std::f64::consts::PI;

use crate::dynamics::{Model, State};
use crate::spectral::{l2_norm, leray_project, Complex64, Grid, SpectralField};

#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn normal(&mut self) -> f64 {
        let u1 = 1.0 - self.next_f64();
        let u2 = self.next_f64();
        (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
    }
}

/// Shape of a seeded random field.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RandomFieldSpec {
    /// Target `L^2` norm.
    pub amplitude: f64,
    /// Smallest retained `|k|` (inclusive).
    pub k_min: f64,
    /// Largest retained `|k|` (inclusive).
    pub k_max: f64,
    pub divergence_free: bool,
}

impl RandomFieldSpec {
    pub fn band(amplitude: f64, k_min: f64, k_max: f64) -> Self {
        RandomFieldSpec {
            amplitude,
            k_min,
            k_max,
            divergence_free: true,
        }
    }

    pub fn with_divergence(mut self) -> Self {
        self.divergence_free = false;
        self
    }
}

fn upper_half(k: [i32; 3]) -> bool {
    k[0] > 0 || (k[0] == 0 && (k[1] > 0 || (k[1] == 0 && k[2] > 0)))
}

/// Draws a random real field with the documented stream.
pub fn random_field(grid: &Grid, seed: u64, spec: RandomFieldSpec) -> SpectralField {
    let mut rng = SplitMix64::new(seed);
    let mut f = SpectralField::zeros(grid);
    let kk = (spec.k_max.floor() as i32).min(grid.k_max());
    let (lo2, hi2) = (spec.k_min * spec.k_min, spec.k_max * spec.k_max);
    for a in -kk..=kk {
        for b in -kk..=kk {
            for c in -kk..=kk {
                let k = [a, b, c];
                if !upper_half(k) {
                    continue;
                }
                let ksq = (a * a + b * b + c * c) as f64;
                if ksq < lo2 || ksq > hi2 {
                    continue;
                }
                let env = 1.0 / ksq;
                let mut v = [Complex64::default(); 3];
                for comp in v.iter_mut() {
                    let re = rng.normal();
                    let im = rng.normal();
                    *comp = Complex64::new(re * env, im * env);
                }
                f.set_mode(k, v).expect("wavevector within grid");
            }
        }
    }
    let mut f = if spec.divergence_free {
        leray_project(&f)
    } else {
        f
    };
    let norm = l2_norm(&f);
    if norm > 0.0 {
        f = f.scaled(spec.amplitude / norm);
    }
    if spec.divergence_free {
        f.mark_divergence_free();
    }
    f
}

/// Seeded initial state on `1 <= |k| <= radius`: velocity from `seed`,
/// magnetic field from `seed + 1`, both with `L^2` norm `amplitude`. EMHD
/// states have zero velocity.
pub fn seeded_state(grid: &Grid, model: Model, seed: u64, amplitude: f64, radius: f64) -> State {
    let spec = RandomFieldSpec::band(amplitude, 1.0, radius);
    let b = random_field(grid, seed.wrapping_add(1), spec);
    let u = match model {
        Model::HallMhd => random_field(grid, seed, spec),
        Model::Emhd => SpectralField::zeros(grid),
    };
    State { t: 0.0, u, b }
}
