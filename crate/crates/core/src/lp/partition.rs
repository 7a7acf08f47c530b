use crate::error::{Error, Result};
use crate::spectral::{Grid, PhysicalField, SpectralField, SpectralScalar};

/// Smooth radial cutoff: 1 on `[0, 3/4]`, 0 on `[1, inf)`, and
/// `g(1-t) / (g(t) + g(1-t))` with `t = 4 (rho - 3/4)`, `g(t) = exp(-1/t)`
/// in between.
pub fn chi(rho: f64) -> f64 {
    if rho <= 0.75 {
        return 1.0;
    }
    if rho >= 1.0 {
        return 0.0;
    }
    let g = |t: f64| if t > 0.0 { (-1.0 / t).exp() } else { 0.0 };
    let t = 4.0 * (rho - 0.75);
    let (a, b) = (g(1.0 - t), g(t));
    a / (a + b)
}

/// Dyadic shell index `q >= -1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Shell(i32);

impl Shell {
    pub const LOWEST: Shell = Shell(-1);

    pub fn new(q: i32) -> Result<Self> {
        if q < -1 {
            return Err(Error::ShellOutOfRange { q, q_max: i32::MAX });
        }
        Ok(Shell(q))
    }

    pub fn index(self) -> i32 {
        self.0
    }

    /// `lambda_q = 2^q`, with `lambda_{-1} = 1/2`.
    pub fn lambda(self) -> f64 {
        lambda(self.0)
    }
}

/// `2^q` for any integer `q`.
pub fn lambda(q: i32) -> f64 {
    2f64.powi(q)
}

/// Tabulated Littlewood-Paley multipliers for one grid.
///
/// The multipliers are radial, so they are stored per value of `|k|^2`.
/// `phi[q + 1][|k|^2]` is `phi_q(k)`; `low[Q + 1][|k|^2]` is
/// `chi(|k| / 2^{Q+1})`, the multiplier of `f_{<=Q}`.
#[derive(Clone, Debug)]
pub struct DyadicPartition {
    grid: Grid,
    q_max: i32,
    phi: Vec<Vec<f64>>,
    low: Vec<Vec<f64>>,
}

impl DyadicPartition {
    /// `q_max = floor(log2(floor(n/3))) - 1`, so the top shell sits inside the
    /// dealiased band.
    pub fn new(grid: &Grid) -> Result<Self> {
        let cutoff = grid.dealias_cutoff();
        let q_max = (31 - (cutoff as u32).leading_zeros()) as i32 - 1;
        if q_max < 2 {
            return Err(Error::PartitionTooSmall { n: grid.n(), q_max });
        }
        let half = grid.n() / 2;
        let ksq_len = 3 * half * half + 1;
        let low: Vec<Vec<f64>> = (-1..=q_max)
            .map(|big_q| {
                let scale = lambda(big_q + 1);
                (0..ksq_len).map(|s| chi((s as f64).sqrt() / scale)).collect()
            })
            .collect();
        let phi = (-1..=q_max)
            .map(|q| {
                (0..ksq_len)
                    .map(|s| {
                        let rho = (s as f64).sqrt();
                        if q == -1 {
                            chi(rho)
                        } else {
                            chi(rho / lambda(q + 1)) - chi(rho / lambda(q))
                        }
                    })
                    .collect()
            })
            .collect();
        Ok(DyadicPartition {
            grid: grid.clone(),
            q_max,
            phi,
            low,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn q_max(&self) -> i32 {
        self.q_max
    }

    pub fn shells(&self) -> impl Iterator<Item = Shell> {
        (-1..=self.q_max).map(Shell)
    }

    /// Radius of the ball on which the partition sums to one,
    /// `(3/4) 2^{q_max + 1}`.
    pub fn band_radius(&self) -> f64 {
        0.75 * lambda(self.q_max + 1)
    }

    pub fn check(&self, q: i32) -> Result<()> {
        if q < -1 || q > self.q_max {
            Err(Error::ShellOutOfRange { q, q_max: self.q_max })
        } else {
            Ok(())
        }
    }

    /// `phi_q` at `|k|^2 = ksq`.
    pub fn phi(&self, q: i32, ksq: u32) -> f64 {
        self.phi[(q + 1) as usize][ksq as usize]
    }

    /// `chi(|k| / 2^{Q+1})` at `|k|^2 = ksq`.
    pub fn lowpass_multiplier(&self, big_q: i32, ksq: u32) -> f64 {
        self.low[(big_q + 1) as usize][ksq as usize]
    }

    /// `Delta_q f`.
    pub fn project(&self, f: &SpectralField, q: i32) -> Result<SpectralField> {
        self.check(q)?;
        let table = &self.phi[(q + 1) as usize];
        Ok(f.apply_radial(|s| table[s as usize]))
    }

    /// `f_{<=Q}`. `Q = -2` (an empty sum) gives zero.
    pub fn lowpass(&self, f: &SpectralField, big_q: i32) -> Result<SpectralField> {
        if big_q == -2 {
            return Ok(f.scaled(0.0));
        }
        self.check(big_q)?;
        let table = &self.low[(big_q + 1) as usize];
        Ok(f.apply_radial(|s| table[s as usize]))
    }

    pub fn project_scalar(&self, f: &SpectralScalar, q: i32) -> Result<SpectralScalar> {
        self.check(q)?;
        let table = &self.phi[(q + 1) as usize];
        Ok(radial_scalar(f, |s| table[s as usize]))
    }

    pub fn lowpass_scalar(&self, f: &SpectralScalar, big_q: i32) -> Result<SpectralScalar> {
        if big_q == -2 {
            return Ok(SpectralScalar::zeros(f.grid()));
        }
        self.check(big_q)?;
        let table = &self.low[(big_q + 1) as usize];
        Ok(radial_scalar(f, |s| table[s as usize]))
    }

    /// All projections `Delta_{-1} f, ..., Delta_{q_max} f`.
    pub fn decompose(&self, f: &SpectralField) -> Vec<SpectralField> {
        (-1..=self.q_max)
            .map(|q| self.project(f, q).expect("shell in range"))
            .collect()
    }

    /// Grid values of every shell, indexed by `q + 1`.
    pub fn physical_shells(&self, f: &SpectralField) -> Vec<PhysicalField> {
        self.decompose(f).iter().map(|s| s.to_physical_unchecked()).collect()
    }

    /// `(sum_q lambda_q^{2s} ||f_q||_2^2)^{1/2}` computed from the tabulated
    /// multipliers.
    pub fn lp_sobolev_norm(&self, f: &SpectralField, s: f64) -> f64 {
        let ksq = self.grid.ksq();
        let len = self.grid.len();
        let c = f.coeffs();
        let total: f64 = (-1..=self.q_max)
            .map(|q| {
                let table = &self.phi[(q + 1) as usize];
                let shell = crate::spectral::det_sum(c.len(), |i| {
                    let w = table[ksq[i % len] as usize];
                    w * w * c[i].norm_sqr()
                });
                lambda(q).powf(2.0 * s) * shell
            })
            .sum();
        total.sqrt()
    }

    /// True if `f` has no content outside the reconstruction ball.
    pub fn is_band_limited(&self, f: &SpectralField) -> bool {
        let r2 = self.band_radius() * self.band_radius();
        let ksq = self.grid.ksq();
        let len = self.grid.len();
        f.coeffs()
            .iter()
            .enumerate()
            .all(|(i, c)| ksq[i % len] as f64 <= r2 || c.norm() == 0.0)
    }
}

fn radial_scalar(f: &SpectralScalar, w: impl Fn(u32) -> f64) -> SpectralScalar {
    let ksq = f.grid().ksq();
    let coeffs = f.coeffs().iter().zip(ksq).map(|(c, s)| c * w(*s)).collect();
    SpectralScalar::from_coeffs(f.grid(), coeffs)
}
