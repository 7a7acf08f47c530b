//! Twin experiments: a primary and a shadow solution whose low modes are
//! overwritten with the primary's below the running determining wavenumbers.
//!
//! Seeds are derived from the configured seed `s`: primary velocity `s`,
//! primary magnetic field `s + 1`, shadow perturbations `s + 2` (velocity) and
//! `s + 3` (magnetic field). The seeded forcing, if any, uses its own seed.

use std::f64::consts::PI;

use log::{debug, warn};

use crate::dynamics::{step_pair, Model, SolverParams, State, Stepper};
use crate::error::{Error, Result};
use crate::init::{random_field, seeded_state, RandomFieldSpec};
use crate::lp::{lambda, DyadicPartition};
use crate::spectral::{grad_linf, gradient_l2_sq, l2_norm, Grid, SpectralField};
use crate::wavenumbers::{lambda_b, lambda_u, pairwise_max, BoundMonitor, BoundSample, DeterminingShell, WavenumberParams};

/// Fraction of analysed steps allowed to carry a sentinel before the run is
/// flagged unresolved.
pub const SENTINEL_TOLERANCE: f64 = 0.1;

/// Fraction of the run discarded before fitting the decay rate.
pub const TRANSIENT_FRACTION: f64 = 0.2;

/// Minimum number of samples in the fit window.
pub const MIN_FIT_SAMPLES: usize = 10;

#[derive(Clone, Debug)]
pub struct TwinConfig {
    pub n: usize,
    pub model: Model,
    pub params: SolverParams,
    pub wavenumbers: WavenumberParams,
    pub seed: u64,
    /// `L^2` norm of the initial velocity and magnetic field.
    pub amplitude: f64,
    /// `L^2` norm of each shadow perturbation.
    pub perturbation: f64,
    /// Set to false for the uncoupled control run.
    pub sync: bool,
}

/// Primary `(u, b)`, shadow `(v, h)` and the most recent pairwise maxima.
#[derive(Clone, Debug)]
pub struct TwinState {
    pub primary: State,
    pub shadow: State,
    pub q_uv: DeterminingShell,
    pub q_bh: DeterminingShell,
}

/// Which replacements were skipped because of a sentinel.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SyncEvent {
    pub u_skipped: bool,
    pub b_skipped: bool,
}

/// Copies `from` into `to` on every wavevector with `|k| < lambda_{q+1}`,
/// the support of the lowpass multiplier of `f_{<=q}`.
pub fn sync_low_modes(from: &SpectralField, to: &mut SpectralField, q: i32) {
    let limit = 1u64 << (2 * (q + 1));
    let grid = from.grid().clone();
    let ksq = grid.ksq();
    let len = grid.len();
    let flag = to.is_divergence_free() && from.is_divergence_free();
    let src = from.coeffs();
    for (i, c) in to.coeffs_mut().iter_mut().enumerate() {
        if (ksq[i % len] as u64) < limit {
            *c = src[i];
        }
    }
    to.set_divergence_free_unchecked(flag);
}

impl TwinState {
    /// Replaces the shadow's low modes by the primary's.
    pub fn synchronize(&mut self, q_uv: DeterminingShell, q_bh: DeterminingShell) -> SyncEvent {
        self.q_uv = q_uv;
        self.q_bh = q_bh;
        let mut event = SyncEvent::default();
        match q_uv {
            DeterminingShell::Resolved(q) => sync_low_modes(&self.primary.u, &mut self.shadow.u, q),
            DeterminingShell::Unresolved => event.u_skipped = true,
        }
        match q_bh {
            DeterminingShell::Resolved(q) => sync_low_modes(&self.primary.b, &mut self.shadow.b, q),
            DeterminingShell::Unresolved => event.b_skipped = true,
        }
        event
    }

    /// `(u - v, b - h)`.
    pub fn difference(&self) -> (SpectralField, SpectralField) {
        (&self.primary.u - &self.shadow.u, &self.primary.b - &self.shadow.b)
    }
}

/// One output row.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwinRecord {
    pub t: f64,
    pub w_l2: f64,
    pub m_l2: f64,
    pub grad_w_l2: f64,
    pub grad_m_l2: f64,
    /// Log-slope of `||w||_2 + ||m||_2` since the previous record; NaN for the
    /// first record.
    pub rate: f64,
    pub q_u: DeterminingShell,
    pub q_v: DeterminingShell,
    pub q_b: DeterminingShell,
    pub q_h: DeterminingShell,
    pub lambda_uv: f64,
    pub lambda_bh: f64,
    /// `max(||grad b||_inf, ||grad h||_inf)`.
    pub linf_grad_b: f64,
    /// None when `Lambda_bh` is the sentinel.
    pub pointwise_ok: Option<bool>,
    pub margin: f64,
}

impl TwinRecord {
    /// `||w||_2 + ||m||_2`.
    pub fn difference(&self) -> f64 {
        self.w_l2 + self.m_l2
    }
}

/// Result of [`TwinRunner::run`].
#[derive(Clone, Debug)]
pub struct TwinRun {
    pub records: Vec<TwinRecord>,
    pub state: TwinState,
    pub monitor: BoundMonitor,
    /// Analysed steps (including the initial one for fresh runs).
    pub analysed: usize,
    /// Analysed steps with at least one sentinel pairwise maximum.
    pub sentinel_steps: usize,
}

impl TwinRun {
    pub fn unresolved(&self) -> bool {
        self.sentinel_steps as f64 > SENTINEL_TOLERANCE * self.analysed as f64
    }

    /// Last recorded difference over the first one.
    pub fn decay_ratio(&self) -> f64 {
        match (self.records.first(), self.records.last()) {
            (Some(a), Some(b)) => b.difference() / a.difference(),
            _ => f64::NAN,
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Readings {
    q_u: DeterminingShell,
    q_v: DeterminingShell,
    q_b: DeterminingShell,
    q_h: DeterminingShell,
}

impl Readings {
    fn q_uv(&self) -> DeterminingShell {
        pairwise_max(self.q_u, self.q_v)
    }

    fn q_bh(&self) -> DeterminingShell {
        pairwise_max(self.q_b, self.q_h)
    }
}

/// Owns the grid, partition and stepper of one twin experiment.
#[derive(Clone, Debug)]
pub struct TwinRunner {
    cfg: TwinConfig,
    grid: Grid,
    partition: DyadicPartition,
    stepper: Stepper,
}

impl TwinRunner {
    pub fn new(cfg: TwinConfig) -> Result<Self> {
        let grid = Grid::new(cfg.n)?;
        let partition = DyadicPartition::new(&grid)?;
        for (name, value) in [("amplitude", cfg.amplitude), ("perturbation", cfg.perturbation)] {
            if !(value >= 0.0) || !value.is_finite() {
                return Err(Error::InvalidParameter {
                    name,
                    value,
                    constraint: "must be >= 0",
                });
            }
        }
        let stepper = Stepper::new(&grid, &cfg.params, cfg.model)?.with_band_radius(partition.band_radius());
        Ok(TwinRunner {
            cfg,
            grid,
            partition,
            stepper,
        })
    }

    pub fn config(&self) -> &TwinConfig {
        &self.cfg
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn partition(&self) -> &DyadicPartition {
        &self.partition
    }

    pub fn stepper(&self) -> &Stepper {
        &self.stepper
    }

    /// Seeded primary state band-limited to the partition.
    pub fn primary_state(&self) -> State {
        seeded_state(
            &self.grid,
            self.cfg.model,
            self.cfg.seed,
            self.cfg.amplitude,
            self.partition.band_radius(),
        )
    }

    /// Shadow equal to the primary plus perturbations on `|k| >= lambda_{Q+1}`,
    /// with `Q` the primary's initial determining shell.
    pub fn initial_state(&self) -> TwinState {
        let primary = self.primary_state();
        let readings = self.analyze(&primary, &primary);
        let q_max = self.partition.q_max();
        let start = |q: DeterminingShell| match q {
            DeterminingShell::Resolved(q) => lambda(q + 1),
            DeterminingShell::Unresolved => {
                warn!("initial determining shell unresolved; perturbing |k| >= {}", lambda(q_max));
                lambda(q_max)
            }
        };
        let radius = self.partition.band_radius();
        let mut shadow = primary.clone();
        if self.cfg.model == Model::HallMhd {
            let spec = RandomFieldSpec::band(self.cfg.perturbation, start(readings.q_u), radius);
            let du = random_field(&self.grid, self.cfg.seed.wrapping_add(2), spec);
            shadow.u = shadow.u.axpy(1.0, &du);
            shadow.u.set_divergence_free_unchecked(true);
        }
        let spec = RandomFieldSpec::band(self.cfg.perturbation, start(readings.q_b), radius);
        let db = random_field(&self.grid, self.cfg.seed.wrapping_add(3), spec);
        shadow.b = shadow.b.axpy(1.0, &db);
        shadow.b.set_divergence_free_unchecked(true);
        TwinState {
            primary,
            shadow,
            q_uv: readings.q_uv(),
            q_bh: readings.q_bh(),
        }
    }

    fn analyze(&self, primary: &State, shadow: &State) -> Readings {
        let p = &self.cfg.wavenumbers;
        let lp = &self.partition;
        let ((q_b, q_h), (q_u, q_v)) = rayon::join(
            || {
                rayon::join(
                    || lambda_b(&primary.b, p, lp).shell,
                    || lambda_b(&shadow.b, p, lp).shell,
                )
            },
            || match self.cfg.model {
                Model::HallMhd => rayon::join(
                    || lambda_u(&primary.u, p, lp).shell,
                    || lambda_u(&shadow.u, p, lp).shell,
                ),
                // u = v = 0 has determining shell 0.
                Model::Emhd => (DeterminingShell::Resolved(0), DeterminingShell::Resolved(0)),
            },
        );
        Readings { q_u, q_v, q_b, q_h }
    }

    fn record(
        &self,
        state: &TwinState,
        readings: &Readings,
        monitor: &mut BoundMonitor,
        previous: Option<(f64, f64)>,
    ) -> TwinRecord {
        let (w, m) = state.difference();
        let linf_grad_b = grad_linf(&state.primary.b).max(grad_linf(&state.shadow.b));
        let q_bh = readings.q_bh();
        let (pointwise_ok, margin) = match monitor.record(q_bh, linf_grad_b) {
            BoundSample::Checked { pointwise_ok, margin } => (Some(pointwise_ok), margin),
            BoundSample::Skipped => (None, f64::NAN),
        };
        let t = state.primary.t;
        let w_l2 = l2_norm(&w);
        let m_l2 = l2_norm(&m);
        let rate = match previous {
            Some((t0, d0)) => ((w_l2 + m_l2).ln() - d0.ln()) / (t - t0),
            None => f64::NAN,
        };
        TwinRecord {
            t,
            w_l2,
            m_l2,
            grad_w_l2: gradient_l2_sq(&w).sqrt(),
            grad_m_l2: gradient_l2_sq(&m).sqrt(),
            rate,
            q_u: readings.q_u,
            q_v: readings.q_v,
            q_b: readings.q_b,
            q_h: readings.q_h,
            lambda_uv: readings.q_uv().lambda(),
            lambda_bh: q_bh.lambda(),
            linf_grad_b,
            pointwise_ok,
            margin,
        }
    }

    /// Total number of steps to reach `t_end`.
    pub fn total_steps(&self) -> usize {
        (self.cfg.params.t_end / self.cfg.params.dt).round() as usize
    }

    /// Runs from `state` to `t_end`.
    ///
    /// A fresh run (`state.primary.t == 0`) analyses, synchronizes and records
    /// the initial state first. A resumed run starts by stepping; `previous`
    /// is the `(t, ||w|| + ||m||)` of the last row already written, used for
    /// the rate column. `on_step` sees the state after every synchronization.
    pub fn run(
        &self,
        mut state: TwinState,
        mut previous: Option<(f64, f64)>,
        mut on_step: impl FnMut(usize, &TwinState) -> Result<()>,
    ) -> Result<TwinRun> {
        let dt = self.cfg.params.dt;
        let every = self.cfg.params.output_every;
        let total = self.total_steps();
        let mut step = (state.primary.t / dt).round() as usize;
        let mut monitor = BoundMonitor::new(&self.cfg.wavenumbers);
        let mut records = Vec::new();
        let mut analysed = 0;
        let mut sentinel_steps = 0;

        let mut advance = |state: &mut TwinState, step: usize, records: &mut Vec<TwinRecord>| {
            let readings = self.analyze(&state.primary, &state.shadow);
            analysed += 1;
            let (q_uv, q_bh) = (readings.q_uv(), readings.q_bh());
            if !q_uv.is_resolved() || !q_bh.is_resolved() {
                sentinel_steps += 1;
            }
            if self.cfg.sync {
                let event = state.synchronize(q_uv, q_bh);
                if event.u_skipped || event.b_skipped {
                    debug!("synchronization skipped at t = {}: {event:?}", state.primary.t);
                }
            } else {
                state.q_uv = q_uv;
                state.q_bh = q_bh;
            }
            if step % every == 0 || step == total {
                let rec = self.record(state, &readings, &mut monitor, previous);
                previous = Some((rec.t, rec.difference()));
                records.push(rec);
            }
        };

        if step == 0 {
            advance(&mut state, 0, &mut records);
            on_step(0, &state)?;
        }
        while step < total {
            let (p, s) = step_pair(&self.stepper, &state.primary, &state.shadow)?;
            state.primary = p;
            state.shadow = s;
            step += 1;
            advance(&mut state, step, &mut records);
            on_step(step, &state)?;
        }
        if sentinel_steps as f64 > SENTINEL_TOLERANCE * analysed as f64 {
            warn!("{sentinel_steps} of {analysed} analysed steps had an unresolved wavenumber");
        }
        Ok(TwinRun {
            records,
            state,
            monitor,
            analysed,
            sentinel_steps,
        })
    }
}

/// Fresh Hall-MHD twin run.
pub fn run_twin(cfg: &TwinConfig) -> Result<TwinRun> {
    let mut cfg = cfg.clone();
    cfg.model = Model::HallMhd;
    let runner = TwinRunner::new(cfg)?;
    runner.run(runner.initial_state(), None, |_, _| Ok(()))
}

/// Fresh EMHD twin run (`u = v = 0`).
pub fn run_emhd_twin(cfg: &TwinConfig) -> Result<TwinRun> {
    let mut cfg = cfg.clone();
    cfg.model = Model::Emhd;
    let runner = TwinRunner::new(cfg)?;
    runner.run(runner.initial_state(), None, |_, _| Ok(()))
}

/// Least-squares fit of `log(||w|| + ||m||)` against `t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecayFit {
    /// Slope; `-inf` when the difference reached zero.
    pub rate: f64,
    pub r2: f64,
    pub samples: usize,
}

impl DecayFit {
    pub fn pass(&self) -> bool {
        self.rate < 0.0
    }
}

pub fn fit_decay_rate(records: &[TwinRecord]) -> Result<DecayFit> {
    let t: Vec<f64> = records.iter().map(|r| r.t).collect();
    let d: Vec<f64> = records.iter().map(|r| r.difference()).collect();
    fit_log_slope(&t, &d)
}

/// Fit on a raw series; the first [`TRANSIENT_FRACTION`] of the time span is
/// discarded.
pub fn fit_log_slope(t: &[f64], d: &[f64]) -> Result<DecayFit> {
    let (Some(&t0), Some(&t1)) = (t.first(), t.last()) else {
        return Err(Error::TooFewSamples {
            needed: MIN_FIT_SAMPLES,
            got: 0,
        });
    };
    let cutoff = t0 + TRANSIENT_FRACTION * (t1 - t0);
    let window: Vec<(f64, f64)> = t
        .iter()
        .zip(d)
        .filter(|(ti, _)| **ti >= cutoff)
        .map(|(a, b)| (*a, *b))
        .collect();
    if window.len() < MIN_FIT_SAMPLES {
        return Err(Error::TooFewSamples {
            needed: MIN_FIT_SAMPLES,
            got: window.len(),
        });
    }
    let samples = window.len();
    if window.iter().any(|(_, v)| !(*v > 0.0)) {
        return Ok(DecayFit {
            rate: f64::NEG_INFINITY,
            r2: f64::NAN,
            samples,
        });
    }
    let nf = samples as f64;
    let mt = window.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = window.iter().map(|p| p.1.ln()).sum::<f64>() / nf;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (ti, v) in &window {
        let (x, y) = (ti - mt, v.ln() - my);
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
    }
    let rate = sxy / sxx;
    let ss_res: f64 = window
        .iter()
        .map(|(ti, v)| {
            let e = v.ln() - (my + rate * (ti - mt));
            e * e
        })
        .sum();
    let r2 = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    Ok(DecayFit { rate, r2, samples })
}

/// Heat-equation decay rate `-4 pi^2 mu lambda_{q+1}^2` of the slowest mode
/// left untouched by synchronization at shell `q`.
pub fn slowest_untouched_rate(mu: f64, q: i32) -> f64 {
    let k = lambda(q + 1);
    -4.0 * PI * PI * mu * k * k
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_series() {
        let t: Vec<f64> = (0..50).map(|i| i as f64 * 0.02).collect();
        let d: Vec<f64> = t.iter().map(|t| (-2.0 * t).exp()).collect();
        let fit = fit_log_slope(&t, &d).unwrap();
        assert!((fit.rate + 2.0).abs() < 1e-6);
        assert!(fit.r2 > 0.999999);
        assert!(fit.pass());
    }

    #[test]
    fn constant_series_fails() {
        let t: Vec<f64> = (0..20).map(|i| i as f64).collect();
        let fit = fit_log_slope(&t, &[3.0; 20]).unwrap();
        assert_eq!(fit.rate, 0.0);
        assert!(!fit.pass());
    }

    #[test]
    fn converged_series_passes() {
        let t: Vec<f64> = (0..20).map(|i| i as f64).collect();
        let mut d = vec![1.0; 20];
        d[19] = 0.0;
        let fit = fit_log_slope(&t, &d).unwrap();
        assert_eq!(fit.rate, f64::NEG_INFINITY);
        assert!(fit.pass());
    }

    #[test]
    fn short_series_is_error() {
        let t = [0.0, 1.0, 2.0];
        assert!(matches!(
            fit_log_slope(&t, &[1.0, 0.5, 0.25]),
            Err(Error::TooFewSamples { .. })
        ));
    }

    #[test]
    fn sync_copies_only_low_ball() {
        let g = Grid::new(16).unwrap();
        let a = random_field(&g, 1, RandomFieldSpec::band(1.0, 1.0, 6.0));
        let mut b = random_field(&g, 2, RandomFieldSpec::band(1.0, 1.0, 6.0));
        let before = b.clone();
        sync_low_modes(&a, &mut b, 0);
        let ksq = g.ksq();
        for (i, (x, y)) in b.coeffs().iter().zip(before.coeffs()).enumerate() {
            let s = ksq[i % g.len()];
            if s < 4 {
                assert_eq!(*x, a.coeffs()[i]);
            } else {
                assert_eq!(x, y);
            }
        }
    }
}
