//! Identity and inequality checks behind the `lp-check` subcommand.

use super::bernstein::bernstein_ratio;
use super::calibration::{PILOT_CONVECTION_MAX, PILOT_HALL_MAX, PILOT_SEEDS};
use super::commutator::{convection_ratio, hall_ratio};
use super::paraproduct::{bony_decompose, dealiased_scalar_product};
use super::partition::{chi, lambda, DyadicPartition};
use crate::error::Result;
use crate::init::{random_field, RandomFieldSpec};
use crate::spectral::{l2_norm, Grid, SpectralField, SpectralScalar};

/// One named check with its measured residual.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckRow {
    pub name: String,
    pub measured: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl CheckRow {
    fn at_most(name: &str, measured: f64, threshold: f64) -> Self {
        CheckRow {
            name: name.to_string(),
            measured,
            threshold,
            pass: measured <= threshold,
        }
    }
}

/// Random band-limited test field (no divergence constraint).
pub fn band_limited_field(partition: &DyadicPartition, seed: u64) -> SpectralField {
    random_field(
        partition.grid(),
        seed,
        RandomFieldSpec::band(1.0, 1.0, partition.band_radius()).with_divergence(),
    )
}

/// Random band-limited divergence-free test field.
pub fn band_limited_solenoidal(partition: &DyadicPartition, seed: u64) -> SpectralField {
    random_field(
        partition.grid(),
        seed,
        RandomFieldSpec::band(1.0, 1.0, partition.band_radius()),
    )
}

/// `max |sum_q phi_q(k) - 1|` over lattice points inside the reconstruction ball.
pub fn partition_unity_residual(p: &DyadicPartition) -> f64 {
    let r2 = p.band_radius() * p.band_radius();
    let mut worst: f64 = 0.0;
    let mut s = 0u32;
    while s as f64 <= r2 {
        let sum: f64 = (-1..=p.q_max()).map(|q| p.phi(q, s)).sum();
        worst = worst.max((sum - 1.0).abs());
        s += 1;
    }
    worst
}

/// Number of `(q, |k|^2)` pairs where `phi_q` is nonzero outside its annulus.
pub fn support_violations(p: &DyadicPartition) -> usize {
    let half = p.grid().n() / 2;
    let mut bad = 0;
    for s in 0..=(3 * half * half) as u32 {
        let k = (s as f64).sqrt();
        for q in -1..=p.q_max() {
            let v = p.phi(q, s);
            let outside = if q == -1 {
                k >= 1.0
            } else {
                k < 0.75 * lambda(q) || k > lambda(q + 1)
            };
            if outside && v != 0.0 {
                bad += 1;
            }
        }
    }
    bad
}

/// `max_{Q, k} |sum_{q <= Q} phi_q(k) - chi(|k| / 2^{Q+1})|`.
pub fn telescoping_residual(p: &DyadicPartition) -> f64 {
    let half = p.grid().n() / 2;
    let mut worst: f64 = 0.0;
    for s in 0..=(3 * half * half) as u32 {
        let mut acc = 0.0;
        for big_q in -1..=p.q_max() {
            acc += p.phi(big_q, s);
            let target = chi((s as f64).sqrt() / lambda(big_q + 1));
            worst = worst.max((acc - target).abs()).max((p.lowpass_multiplier(big_q, s) - target).abs());
        }
    }
    worst
}

/// `||sum_q Delta_q f - f||_2 / ||f||_2` for a band-limited random field.
pub fn reconstruction_residual(p: &DyadicPartition, seed: u64) -> f64 {
    let f = band_limited_field(p, seed);
    let mut acc = SpectralField::zeros(p.grid());
    for shell in p.decompose(&f) {
        acc = &acc + &shell;
    }
    l2_norm(&(&acc - &f)) / l2_norm(&f)
}

/// `max ||Delta_q Delta_q' f||_2 / ||f||_2` over `|q - q'| >= 2`.
pub fn disjointness_residual(p: &DyadicPartition, seed: u64) -> Result<f64> {
    let f = band_limited_field(p, seed);
    let base = l2_norm(&f);
    let mut worst: f64 = 0.0;
    for q in -1..=p.q_max() {
        let fq = p.project(&f, q)?;
        for qq in -1..=p.q_max() {
            if (q - qq).abs() >= 2 {
                worst = worst.max(l2_norm(&p.project(&fq, qq)?) / base);
            }
        }
    }
    Ok(worst)
}

/// Relative defect of the three-part paraproduct sum against the dealiased
/// product, for one seeded pair.
pub fn bony_residual(p: &DyadicPartition, seed: u64) -> Result<f64> {
    let a = band_limited_field(p, seed.wrapping_mul(2).wrapping_add(1));
    let b = band_limited_field(p, seed.wrapping_mul(2).wrapping_add(2));
    let parts = bony_decompose(p, &a, 0, &b, 1)?;
    let sa = SpectralScalar::from_coeffs(a.grid(), a.component(0).to_vec());
    let sb = SpectralScalar::from_coeffs(b.grid(), b.component(1).to_vec());
    let direct = dealiased_scalar_product(&sa, &sb)?;
    Ok(parts.sum().axpy(-1.0, &direct).l2_norm() / direct.l2_norm())
}

/// Largest `r = 2, s = inf` Bernstein ratio over `count` random single-shell
/// fields, cycling `q` over `1..=q_max`.
pub fn bernstein_sweep(p: &DyadicPartition, count: usize, seed: u64) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for i in 0..count {
        let q = 1 + (i as i32 % p.q_max());
        let f = p.project(&band_limited_field(p, seed + i as u64), q)?;
        worst = worst.max(bernstein_ratio(p, &f, q, 2.0, f64::INFINITY)?);
    }
    Ok(worst)
}

/// Measured commutator constants `(convection, hall)`, each maximized over
/// seeds, input shells `p in 1..=q_max` and output shells `q`.
pub fn commutator_sweep(p: &DyadicPartition, seeds: impl IntoIterator<Item = u64>) -> Result<(f64, f64)> {
    let (mut conv, mut hall): (f64, f64) = (0.0, 0.0);
    for seed in seeds {
        let u = band_limited_solenoidal(p, 2 * seed + 11);
        let v = band_limited_solenoidal(p, 2 * seed + 12);
        for shell in 1..=p.q_max() {
            if let Some(r) = convection_ratio(p, &u, &v, shell)? {
                conv = conv.max(r);
            }
            if let Some(r) = hall_ratio(p, &u, &v, shell)? {
                hall = hall.max(r);
            }
        }
    }
    Ok((conv, hall))
}

/// Seeds used by regression runs; disjoint from the pilot seeds.
pub fn regression_seeds() -> std::ops::Range<u64> {
    1000..1000 + (PILOT_SEEDS.end - PILOT_SEEDS.start)
}

/// Full identity and inequality suite at grid size `n`.
pub fn run_lp_checks(n: usize, seed: u64) -> Result<Vec<CheckRow>> {
    let grid = Grid::new(n)?;
    let p = DyadicPartition::new(&grid)?;
    let mut rows = vec![
        CheckRow::at_most("partition_of_unity", partition_unity_residual(&p), 1e-12),
        CheckRow::at_most("support", support_violations(&p) as f64, 0.0),
        CheckRow::at_most("telescoping", telescoping_residual(&p), 1e-14),
        CheckRow::at_most("reconstruction", reconstruction_residual(&p, seed), 1e-12),
        CheckRow::at_most("disjoint_shells", disjointness_residual(&p, seed)?, 1e-14),
    ];
    let mut bony: f64 = 0.0;
    for i in 0..50 {
        bony = bony.max(bony_residual(&p, seed + i)?);
    }
    rows.push(CheckRow::at_most("bony_identity", bony, 1e-10));

    let bern = bernstein_sweep(&p, 200, seed)?;
    rows.push(CheckRow {
        name: "bernstein_max_ratio".into(),
        measured: bern,
        threshold: f64::INFINITY,
        pass: bern.is_finite() && bern > 0.0,
    });

    let (conv, hall) = commutator_sweep(&p, regression_seeds())?;
    rows.push(CheckRow::at_most("commutator_convection", conv, 2.0 * PILOT_CONVECTION_MAX));
    rows.push(CheckRow::at_most("commutator_hall", hall, 2.0 * PILOT_HALL_MAX));
    Ok(rows)
}
