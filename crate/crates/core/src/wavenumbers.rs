//! Determining wavenumbers of a single solution and the bound monitor.
//!
//! For a velocity field the determining shell is the smallest `q >= 0` with
//!
//! * `lambda_p^{-1+3/r} ||u_p||_r < c_r kappa` for every resolved `p > q`, and
//! * `lambda_q^{-1+3/r} ||u_{<=q}||_r < c_r kappa`;
//!
//! for a magnetic field it is the smallest `q >= 0` with
//!
//! * `lambda_{p-q}^delta ||b_p||_inf < c_r kappa` for every resolved `p > q`, and
//! * `||b_{<=q}||_inf < c_r kappa`.
//!
//! Shells above `q_max` are zero for band-limited fields, so the scan over
//! `p` stops there. When no `q` qualifies the result is
//! [`DeterminingShell::Unresolved`].

use std::fmt;

use crate::error::{Error, Result};
use crate::lp::{lambda, DyadicPartition};
use crate::spectral::{PhysicalField, SpectralField};

/// `(r, delta, c_r)` and the derived `kappa = min{mu, nu, mu / eta}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WavenumberParams {
    pub r: f64,
    pub delta: f64,
    pub c_r: f64,
    pub kappa: f64,
}

impl WavenumberParams {
    pub fn new(r: f64, delta: f64, c_r: f64, nu: f64, mu: f64, eta: f64) -> Result<Self> {
        if !(r > 2.0 && r < 3.0) {
            return Err(Error::InvalidParameter {
                name: "r",
                value: r,
                constraint: "r must lie in (2,3)",
            });
        }
        if !(delta > 1.0) || !delta.is_finite() {
            return Err(Error::InvalidParameter {
                name: "delta",
                value: delta,
                constraint: "delta must be > 1",
            });
        }
        if !(c_r > 0.0) || !c_r.is_finite() {
            return Err(Error::InvalidParameter {
                name: "cr",
                value: c_r,
                constraint: "c_r must be > 0",
            });
        }
        let kappa = kappa(nu, mu, eta);
        if !(kappa > 0.0) || !kappa.is_finite() {
            return Err(Error::InvalidParameter {
                name: "kappa",
                value: kappa,
                constraint: "kappa = min{mu, nu, mu/eta} must be > 0",
            });
        }
        Ok(WavenumberParams { r, delta, c_r, kappa })
    }

    /// `c_r kappa`.
    pub fn threshold(&self) -> f64 {
        self.c_r * self.kappa
    }

    pub fn with_c_r(mut self, c_r: f64) -> Self {
        self.c_r = c_r;
        self
    }
}

/// `min{mu, nu, mu / eta}`; the last entry is dropped when `eta = 0`.
pub fn kappa(nu: f64, mu: f64, eta: f64) -> f64 {
    let base = mu.min(nu);
    if eta > 0.0 {
        base.min(mu / eta)
    } else {
        base
    }
}

/// Determining shell index, or the unresolved sentinel. Ordered so that
/// `max` absorbs the sentinel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DeterminingShell {
    Resolved(i32),
    Unresolved,
}

impl DeterminingShell {
    /// `lambda_Q`, infinite for the sentinel.
    pub fn lambda(self) -> f64 {
        match self {
            DeterminingShell::Resolved(q) => lambda(q),
            DeterminingShell::Unresolved => f64::INFINITY,
        }
    }

    pub fn shell(self) -> Option<i32> {
        match self {
            DeterminingShell::Resolved(q) => Some(q),
            DeterminingShell::Unresolved => None,
        }
    }

    pub fn is_resolved(self) -> bool {
        matches!(self, DeterminingShell::Resolved(_))
    }
}

impl fmt::Display for DeterminingShell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DeterminingShell::Resolved(q) => write!(f, "{q}"),
            DeterminingShell::Unresolved => f.write_str("unresolved"),
        }
    }
}

/// `max{Lambda_a, Lambda_b}` with sentinel absorption.
pub fn pairwise_max(a: DeterminingShell, b: DeterminingShell) -> DeterminingShell {
    a.max(b)
}

/// Which of the two defining conditions rejected a candidate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Condition {
    /// The high-shell condition failed at shell `p`.
    HighShell { p: i32 },
    /// The lowpass condition failed.
    Lowpass,
}

/// First failing condition for a rejected candidate `q`; `ratio` is the
/// offending quantity divided by `c_r kappa` (so `>= 1`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Blocker {
    pub candidate: i32,
    pub condition: Condition,
    pub ratio: f64,
}

/// Result of a determining-wavenumber scan for one field.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FieldReading {
    pub shell: DeterminingShell,
    /// Largest condition ratio at the accepted shell (`< 1`); NaN if unresolved.
    pub margin: f64,
    /// Why the candidate just below the accepted shell (or `q_max` for the
    /// sentinel) was rejected.
    pub blocker: Option<Blocker>,
}

impl FieldReading {
    pub fn lambda(&self) -> f64 {
        self.shell.lambda()
    }
}

/// Shell norms `||f_p||` and lowpass norms `||f_{<=q}||`, both indexed by `q + 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct ShellNorms {
    pub shell: Vec<f64>,
    pub lowpass: Vec<f64>,
}

fn grid_norm(p: &PhysicalField, r: Option<f64>) -> f64 {
    match r {
        Some(r) => p.lr_norm(r).expect("validated exponent"),
        None => p.linf_norm(),
    }
}

impl ShellNorms {
    /// `r = None` means `L^inf`.
    pub fn compute(partition: &DyadicPartition, f: &SpectralField, r: Option<f64>) -> Self {
        let shells = partition.physical_shells(f);
        let mut shell = Vec::with_capacity(shells.len());
        let mut lowpass = Vec::with_capacity(shells.len());
        let mut acc = PhysicalField::zeros(f.grid());
        for s in &shells {
            shell.push(grid_norm(s, r));
            acc.add_assign(s);
            lowpass.push(grid_norm(&acc, r));
        }
        ShellNorms { shell, lowpass }
    }

    fn shell(&self, q: i32) -> f64 {
        self.shell[(q + 1) as usize]
    }

    fn lowpass(&self, q: i32) -> f64 {
        self.lowpass[(q + 1) as usize]
    }
}

fn scan(
    q_max: i32,
    threshold: f64,
    high: impl Fn(i32, i32) -> f64,
    low: impl Fn(i32) -> f64,
) -> FieldReading {
    let mut blocker = None;
    for q in 0..=q_max {
        let mut worst = low(q) / threshold;
        let mut failed = if worst >= 1.0 {
            Some(Blocker {
                candidate: q,
                condition: Condition::Lowpass,
                ratio: worst,
            })
        } else {
            None
        };
        for p in (q + 1)..=q_max {
            let ratio = high(q, p) / threshold;
            if ratio >= 1.0 {
                failed = Some(Blocker {
                    candidate: q,
                    condition: Condition::HighShell { p },
                    ratio,
                });
                break;
            }
            worst = worst.max(ratio);
        }
        match failed {
            None => {
                return FieldReading {
                    shell: DeterminingShell::Resolved(q),
                    margin: worst,
                    blocker,
                }
            }
            Some(b) => blocker = Some(b),
        }
    }
    FieldReading {
        shell: DeterminingShell::Unresolved,
        margin: f64::NAN,
        blocker,
    }
}

/// Determining wavenumber of a velocity field from precomputed `L^r` norms.
pub fn lambda_u_from_norms(norms: &ShellNorms, params: &WavenumberParams, q_max: i32) -> FieldReading {
    let e = -1.0 + 3.0 / params.r;
    scan(
        q_max,
        params.threshold(),
        |_, p| lambda(p).powf(e) * norms.shell(p),
        |q| lambda(q).powf(e) * norms.lowpass(q),
    )
}

/// Determining wavenumber of a magnetic field from precomputed `L^inf` norms.
pub fn lambda_b_from_norms(norms: &ShellNorms, params: &WavenumberParams, q_max: i32) -> FieldReading {
    scan(
        q_max,
        params.threshold(),
        |q, p| lambda(p - q).powf(params.delta) * norms.shell(p),
        |q| norms.lowpass(q),
    )
}

pub fn lambda_u(u: &SpectralField, params: &WavenumberParams, partition: &DyadicPartition) -> FieldReading {
    let norms = ShellNorms::compute(partition, u, Some(params.r));
    lambda_u_from_norms(&norms, params, partition.q_max())
}

pub fn lambda_b(b: &SpectralField, params: &WavenumberParams, partition: &DyadicPartition) -> FieldReading {
    let norms = ShellNorms::compute(partition, b, None);
    lambda_b_from_norms(&norms, params, partition.q_max())
}

/// Outcome of one bound-monitor sample.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BoundSample {
    /// `pointwise_ok` is `Lambda_b <= lambda_0` or
    /// `||grad b||_inf >= c_r kappa Lambda_b`; `margin` is
    /// `||grad b||_inf / (c_r kappa Lambda_b)`.
    Checked { pointwise_ok: bool, margin: f64 },
    /// Sentinel reading; nothing recorded.
    Skipped,
}

/// Pointwise and time-averaged check of `||grad b||_inf` against `c_r kappa Lambda_b`.
#[derive(Clone, Debug)]
pub struct BoundMonitor {
    threshold: f64,
    samples: usize,
    skipped: usize,
    violations: usize,
    sum_lambda_sq: f64,
    sum_grad_sq: f64,
    min_margin_above_lambda0: f64,
}

impl BoundMonitor {
    pub fn new(params: &WavenumberParams) -> Self {
        BoundMonitor {
            threshold: params.threshold(),
            samples: 0,
            skipped: 0,
            violations: 0,
            sum_lambda_sq: 0.0,
            sum_grad_sq: 0.0,
            min_margin_above_lambda0: f64::INFINITY,
        }
    }

    pub fn record(&mut self, shell: DeterminingShell, linf_grad_b: f64) -> BoundSample {
        let big_lambda = match shell {
            DeterminingShell::Resolved(q) => lambda(q),
            DeterminingShell::Unresolved => {
                self.skipped += 1;
                return BoundSample::Skipped;
            }
        };
        self.samples += 1;
        self.sum_lambda_sq += big_lambda * big_lambda;
        self.sum_grad_sq += linf_grad_b * linf_grad_b;
        let margin = linf_grad_b / (self.threshold * big_lambda);
        let pointwise_ok = big_lambda <= 1.0 || margin >= 1.0;
        if big_lambda > 1.0 {
            self.min_margin_above_lambda0 = self.min_margin_above_lambda0.min(margin);
        }
        if !pointwise_ok {
            self.violations += 1;
        }
        BoundSample::Checked { pointwise_ok, margin }
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    pub fn skipped(&self) -> usize {
        self.skipped
    }

    pub fn violations(&self) -> usize {
        self.violations
    }

    /// Smallest `||grad b||_inf / (c_r kappa Lambda_b)` among samples with
    /// `Lambda_b > lambda_0`; infinite if there were none.
    pub fn min_margin_above_lambda0(&self) -> f64 {
        self.min_margin_above_lambda0
    }

    /// `<Lambda_b^2>` over checked samples.
    pub fn mean_lambda_sq(&self) -> f64 {
        self.sum_lambda_sq / self.samples.max(1) as f64
    }

    /// `<||grad b||_inf^2>` over checked samples.
    pub fn mean_grad_sq(&self) -> f64 {
        self.sum_grad_sq / self.samples.max(1) as f64
    }

    /// `(c_r kappa)^-2 <||grad b||_inf^2>`.
    pub fn average_bound(&self) -> f64 {
        self.mean_grad_sq() / (self.threshold * self.threshold)
    }
}
