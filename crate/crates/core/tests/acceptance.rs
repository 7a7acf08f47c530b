//! End-to-end acceptance checks, one test per criterion. Each test writes a
//! single `criterion N: PASS|FAIL ...` line to stderr (outside the test
//! harness's capture) before asserting.

use std::io::Write;
use std::sync::{Mutex, MutexGuard, OnceLock};
use std::time::Instant;

use hallsync_core::cli::{configure_threads, run_simulate, run_twin_command};
use hallsync_core::dynamics::{energy_and_dissipation, energy_balance_residual, hall_term, Model, SolverParams, State, Stepper};
use hallsync_core::init::{random_field, seeded_state, RandomFieldSpec};
use hallsync_core::io::config::{RunConfig, TimeStep};
use hallsync_core::lp::calibration::{PILOT_CONVECTION_MAX, PILOT_HALL_MAX};
use hallsync_core::lp::checks::{
    bernstein_sweep, bony_residual, commutator_sweep, disjointness_residual, partition_unity_residual,
    reconstruction_residual, regression_seeds, support_violations, telescoping_residual,
};
use hallsync_core::lp::{lambda, DyadicPartition};
use hallsync_core::spectral::{norm, Grid, NormKind, SpectralField};
use hallsync_core::twin::{fit_decay_rate, slowest_untouched_rate, TwinConfig, TwinRun, TwinRunner};
use hallsync_core::wavenumbers::{lambda_b, lambda_u, BoundMonitor, DeterminingShell, WavenumberParams};

/// Serializes the criteria so wall-clock limits measure one check at a time.
fn exclusive() -> MutexGuard<'static, ()> {
    static LOCK: Mutex<()> = Mutex::new(());
    static SERIAL: OnceLock<()> = OnceLock::new();
    SERIAL.get_or_init(|| configure_threads(true, None).expect("first pool initialization"));
    LOCK.lock().unwrap_or_else(|e| e.into_inner())
}

fn report(id: &str, pass: bool, detail: String) {
    let line = format!("criterion {id}: {} {detail}\n", if pass { "PASS" } else { "FAIL" });
    let _ = std::io::stderr().lock().write_all(line.as_bytes());
}

fn twin_config(model: Model, eta: f64, perturbation: f64, sync: bool) -> TwinConfig {
    TwinConfig {
        n: 48,
        model,
        params: SolverParams {
            nu: 1.0,
            mu: 1.0,
            eta,
            dt: 1e-3,
            t_end: 0.05,
            output_every: 2,
            ..SolverParams::default()
        },
        wavenumbers: WavenumberParams::new(2.5, 2.0, 0.05, 1.0, 1.0, eta).unwrap(),
        seed: 0,
        amplitude: 0.01,
        perturbation,
        sync,
    }
}

/// The twin run together with the primary's initial determining shells.
struct Trajectory {
    run: TwinRun,
    initial_q_bh: DeterminingShell,
}

fn trajectory(cfg: TwinConfig) -> Trajectory {
    let runner = TwinRunner::new(cfg).unwrap();
    let state = runner.initial_state();
    let initial_q_bh = state.q_bh;
    let run = runner.run(state, None, |_, _| Ok(())).unwrap();
    Trajectory { run, initial_q_bh }
}

fn hall_twin() -> &'static Trajectory {
    static RUN: OnceLock<Trajectory> = OnceLock::new();
    RUN.get_or_init(|| trajectory(twin_config(Model::HallMhd, 0.5, 1e-3, true)))
}

fn emhd_twin() -> &'static Trajectory {
    static RUN: OnceLock<Trajectory> = OnceLock::new();
    RUN.get_or_init(|| trajectory(twin_config(Model::Emhd, 0.5, 1e-3, true)))
}

fn resistive_emhd_twin() -> &'static Trajectory {
    static RUN: OnceLock<Trajectory> = OnceLock::new();
    RUN.get_or_init(|| trajectory(twin_config(Model::Emhd, 0.0, 1e-3, true)))
}

#[test]
fn criterion_01_lp_identities() {
    let _g = exclusive();
    let start = Instant::now();
    let p = DyadicPartition::new(&Grid::new(32).unwrap()).unwrap();
    let unity = partition_unity_residual(&p);
    let support = support_violations(&p);
    let telescoping = telescoping_residual(&p);
    let recon = reconstruction_residual(&p, 0);
    let disjoint = disjointness_residual(&p, 0).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let pass = unity <= 1e-12 && support == 0 && telescoping <= 1e-14 && recon <= 1e-12 && disjoint <= 1e-14 && secs < 10.0;
    report(
        "1",
        pass,
        format!(
            "unity {unity:.1e}, support violations {support}, telescoping {telescoping:.1e}, \
             reconstruction {recon:.1e}, disjoint {disjoint:.1e}, {secs:.2} s"
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_02_bony_identity() {
    let _g = exclusive();
    let start = Instant::now();
    let p = DyadicPartition::new(&Grid::new(32).unwrap()).unwrap();
    let worst = (0..50).map(|s| bony_residual(&p, s).unwrap()).fold(0.0, f64::max);
    let secs = start.elapsed().as_secs_f64();
    let pass = worst <= 1e-10 && secs < 30.0;
    report("2", pass, format!("max relative defect {worst:.1e} over 50 pairs, {secs:.2} s"));
    assert!(pass);
}

#[test]
fn criterion_03_bernstein_stability() {
    let _g = exclusive();
    let coarse = bernstein_sweep(&DyadicPartition::new(&Grid::new(32).unwrap()).unwrap(), 200, 0).unwrap();
    let fine = bernstein_sweep(&DyadicPartition::new(&Grid::new(64).unwrap()).unwrap(), 200, 0).unwrap();
    let spread = coarse.max(fine) / coarse.min(fine);
    let pass = coarse.is_finite() && fine.is_finite() && coarse > 0.0 && spread <= 2.0;
    report(
        "3",
        pass,
        format!("max ratio {coarse:.4} at n=32, {fine:.4} at n=64, spread {spread:.3}"),
    );
    assert!(pass);
}

#[test]
fn criterion_04_commutator_regression() {
    let _g = exclusive();
    let p = DyadicPartition::new(&Grid::new(32).unwrap()).unwrap();
    let (conv, hall) = commutator_sweep(&p, regression_seeds()).unwrap();
    let pass = conv <= 2.0 * PILOT_CONVECTION_MAX && hall <= 2.0 * PILOT_HALL_MAX;
    report(
        "4",
        pass,
        format!(
            "convection {conv:.4} (pilot {PILOT_CONVECTION_MAX:.4}), hall {hall:.4} (pilot {PILOT_HALL_MAX:.4})"
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_05_hall_neutrality() {
    let _g = exclusive();
    let g = Grid::new(32).unwrap();
    let eta = 0.5;
    let mut worst: f64 = 0.0;
    for seed in 0..50 {
        let amp = 10f64.powf(-2.0 + 0.06 * seed as f64);
        let b = random_field(&g, 500 + seed, RandomFieldSpec::band(amp, 1.0, 10.0));
        let h1 = norm(&b, NormKind::Hs(1.0)).unwrap();
        let defect = hall_term(&b, eta).unwrap().inner(&b).abs() / (eta * h1 * h1);
        worst = worst.max(defect);
    }
    let pass = worst <= 1e-10;
    report("5", pass, format!("max |<H(b), b>| / (eta ||b||_H1^2) = {worst:.1e} over 50 fields"));
    assert!(pass);
}

/// Largest per-step energy-balance residual over `[0, steps * dt]`.
fn max_residual(s0: &State, grid: &Grid, dt: f64, steps: usize, radius: f64) -> f64 {
    let p = SolverParams {
        dt,
        ..SolverParams::default()
    };
    let stepper = Stepper::new(grid, &p, Model::HallMhd).unwrap().with_band_radius(radius);
    let zero = SpectralField::zeros(grid);
    let mut s = s0.clone();
    let mut worst: f64 = 0.0;
    for _ in 0..steps {
        let next = stepper.step(&s).unwrap();
        worst = worst.max(energy_balance_residual(&s, &next, &p, &zero).abs());
        s = next;
    }
    worst
}

#[test]
fn criterion_06_discrete_energy_law() {
    let _g = exclusive();
    let g = Grid::new(32).unwrap();
    let part = DyadicPartition::new(&g).unwrap();
    let radius = part.band_radius();
    let s0 = seeded_state(&g, Model::HallMhd, 0, 0.1, radius);
    let p = SolverParams {
        dt: 2e-4,
        output_every: 10,
        ..SolverParams::default()
    };
    let stepper = Stepper::new(&g, &p, Model::HallMhd).unwrap().with_band_radius(radius);
    let mut s = s0.clone();
    let mut e_prev = energy_and_dissipation(&s, &p).0;
    let mut increases = 0;
    for step in 1..=500 {
        s = stepper.step(&s).unwrap();
        if step % p.output_every == 0 {
            let e = energy_and_dissipation(&s, &p).0;
            if e > e_prev {
                increases += 1;
            }
            e_prev = e;
        }
    }
    let coarse = max_residual(&s0, &g, 4e-4, 10, radius);
    let fine = max_residual(&s0, &g, 2e-4, 20, radius);
    let shrink = coarse / fine;
    let pass = increases == 0 && shrink >= 4.0;
    report(
        "6",
        pass,
        format!(
            "{increases} energy increases in 50 outputs (E {:.4e} -> {e_prev:.4e}); residual {coarse:.2e} -> {fine:.2e} \
             when dt halves (x{shrink:.1})",
            energy_and_dissipation(&s0, &p).0
        ),
    );
    assert!(pass);
}

fn oracle(f: &SpectralField, wp: &WavenumberParams, part: &DyadicPartition, velocity: bool) -> DeterminingShell {
    let thr = wp.threshold();
    let e = -1.0 + 3.0 / wp.r;
    let size = |g: SpectralField| {
        let ph = g.to_physical().unwrap();
        if velocity {
            ph.lr_norm(wp.r).unwrap()
        } else {
            ph.linf_norm()
        }
    };
    for q in 0..=part.q_max() {
        let low = size(part.lowpass(f, q).unwrap()) * if velocity { lambda(q).powf(e) } else { 1.0 };
        let high = ((q + 1)..=part.q_max()).all(|p| {
            let w = if velocity { lambda(p).powf(e) } else { lambda(p - q).powf(wp.delta) };
            w * size(part.project(f, p).unwrap()) < thr
        });
        if low < thr && high {
            return DeterminingShell::Resolved(q);
        }
    }
    DeterminingShell::Unresolved
}

#[test]
fn criterion_07_wavenumber_oracle() {
    let _g = exclusive();
    let g = Grid::new(32).unwrap();
    let part = DyadicPartition::new(&g).unwrap();
    let wp = WavenumberParams::new(2.5, 2.0, 0.05, 1.0, 1.0, 0.5).unwrap();
    let mut mismatches = 0;
    let mut sentinels = 0;
    for i in 0..100u64 {
        let amp = 10f64.powf(-3.5 + 0.035 * i as f64);
        let f = random_field(&g, 7000 + i, RandomFieldSpec::band(amp, 1.0 + (i % 4) as f64, 6.0));
        let (qu, qb) = (lambda_u(&f, &wp, &part).shell, lambda_b(&f, &wp, &part).shell);
        if qu != oracle(&f, &wp, &part, true) || qb != oracle(&f, &wp, &part, false) {
            mismatches += 1;
        }
        sentinels += usize::from(!qu.is_resolved()) + usize::from(!qb.is_resolved());
    }
    let mut monotonicity_failures = 0;
    for i in 0..50u64 {
        let f = random_field(&g, 9000 + i, RandomFieldSpec::band(1e-4, 1.0, 6.0));
        let mut prev = (DeterminingShell::Resolved(0), DeterminingShell::Resolved(0));
        for k in 0..8 {
            let scaled = f.scaled(4f64.powi(k));
            let now = (lambda_u(&scaled, &wp, &part).shell, lambda_b(&scaled, &wp, &part).shell);
            if now.0 < prev.0 || now.1 < prev.1 {
                monotonicity_failures += 1;
            }
            prev = now;
        }
        let mid = f.scaled(100.0);
        let mut prev = (DeterminingShell::Unresolved, DeterminingShell::Unresolved);
        for c in [0.005, 0.01, 0.02, 0.05, 0.1, 0.2, 0.5] {
            let w = wp.with_c_r(c);
            let now = (lambda_u(&mid, &w, &part).shell, lambda_b(&mid, &w, &part).shell);
            if now.0 > prev.0 || now.1 > prev.1 {
                monotonicity_failures += 1;
            }
            prev = now;
        }
    }
    let pass = mismatches == 0 && sentinels > 0 && monotonicity_failures == 0;
    report(
        "7",
        pass,
        format!(
            "{mismatches} oracle mismatches on 100 fields ({sentinels} sentinel readings), \
             {monotonicity_failures} monotonicity failures on 50 families"
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_08_pointwise_gradient_bound() {
    let _g = exclusive();
    let mut worst_margin = f64::INFINITY;
    let mut worst_average = 0.0f64;
    let mut samples = 0;
    let mut above = 0;
    let mut pass = true;
    for t in [hall_twin(), emhd_twin(), resistive_emhd_twin()] {
        for r in &t.run.records {
            if r.lambda_bh > 1.0 && r.lambda_bh.is_finite() {
                above += 1;
                worst_margin = worst_margin.min(r.margin);
                pass &= r.margin >= 0.5;
            }
        }
        let m: &BoundMonitor = &t.run.monitor;
        samples += m.samples();
        // <Lambda^2> <= 4 (c_r kappa)^-2 <||grad b||^2>; the reported factor must stay <= 4.
        let factor = m.mean_lambda_sq() / m.average_bound();
        worst_average = worst_average.max(factor);
        pass &= factor <= 4.0 && m.samples() > 0;
    }
    report(
        "8",
        pass,
        format!(
            "{samples} samples, {above} with Lambda_bh > 1; min ||grad b||_inf / (c_r kappa Lambda) = {worst_margin:.3} \
             (needs >= 0.5); max <Lambda^2> / ((c_r kappa)^-2 <||grad b||^2>) = {worst_average:.3} (needs <= 4)"
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_09_hall_twin_synchronizes() {
    let _g = exclusive();
    let start = Instant::now();
    let t = hall_twin();
    let ratio = t.run.decay_ratio();
    let fit = fit_decay_rate(&t.run.records).unwrap();
    let control = trajectory(twin_config(Model::HallMhd, 0.5, 0.0, true));
    let control_max = control.run.records.iter().map(|r| r.difference()).fold(0.0, f64::max);
    let secs = start.elapsed().as_secs_f64();
    let pass = ratio <= 1e-3 && fit.pass() && fit.r2 > 0.9 && !t.run.unresolved() && control_max <= 1e-12;
    report(
        "9",
        pass,
        format!(
            "final/initial {ratio:.2e}, rate {:.1} (r2 {:.4}, {} samples), sentinel steps {}/{}, \
             zero-perturbation control max {control_max:.1e}; {secs:.0} s",
            fit.rate, fit.r2, fit.samples, t.run.sentinel_steps, t.run.analysed
        ),
    );
    assert!(pass);
}

/// The unsynchronized control of criterion 9, kept separate so its outcome is
/// visible on its own.
#[test]
fn criterion_09_control_without_sync_does_not_decay() {
    let _g = exclusive();
    let control = trajectory(twin_config(Model::HallMhd, 0.5, 1e-3, false));
    let ratio = control.run.decay_ratio();
    let pass = ratio >= 0.5;
    report("9-control", pass, format!("no-sync final/initial {ratio:.2e} (needs >= 0.5)"));
    assert!(pass, "no-sync difference decayed to {ratio:.2e} of its initial value");
}

#[test]
fn criterion_10_emhd_twin_synchronizes() {
    let _g = exclusive();
    let t = emhd_twin();
    let ratio = t.run.decay_ratio();
    let fit = fit_decay_rate(&t.run.records).unwrap();
    let control = trajectory(twin_config(Model::Emhd, 0.5, 0.0, true));
    let control_max = control.run.records.iter().map(|r| r.difference()).fold(0.0, f64::max);

    let heat = resistive_emhd_twin();
    let heat_fit = fit_decay_rate(&heat.run.records).unwrap();
    let q0 = heat.initial_q_bh.shell().expect("resolved initial shell");
    let reference = slowest_untouched_rate(1.0, q0);
    let heat_ratio = heat_fit.rate / reference;

    let pass = ratio <= 1e-3
        && fit.pass()
        && fit.r2 > 0.9
        && !t.run.unresolved()
        && control_max <= 1e-12
        && !heat.run.unresolved()
        && (0.5..=2.0).contains(&heat_ratio);
    report(
        "10",
        pass,
        format!(
            "final/initial {ratio:.2e}, rate {:.1} (r2 {:.4}), sentinel steps {}/{}, control max {control_max:.1e}; \
             eta = 0: rate {:.1} vs heat rate {reference:.1} of |k| = {} (ratio {heat_ratio:.3})",
            fit.rate,
            fit.r2,
            t.run.sentinel_steps,
            t.run.analysed,
            heat_fit.rate,
            lambda(q0 + 1)
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_11_determinism_and_resume() {
    let _g = exclusive();
    let read = |p: std::path::PathBuf| std::fs::read(p).unwrap();
    let twin = |t_end: f64, resume: Option<std::path::PathBuf>| {
        let mut cfg = RunConfig::with_required(32, t_end);
        cfg.dt = TimeStep::Fixed(1e-3);
        cfg.amplitude = 0.01;
        cfg.perturbation = 1e-3;
        cfg.output_every = 1;
        cfg.snapshot_every = 5;
        cfg.resume = resume;
        cfg
    };
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    run_twin_command(&twin(0.012, None), a.path(), Model::HallMhd).unwrap();
    run_twin_command(&twin(0.012, None), b.path(), Model::HallMhd).unwrap();
    let repeat = read(a.path().join("twin.csv")) == read(b.path().join("twin.csv"));

    let c = tempfile::tempdir().unwrap();
    run_twin_command(&twin(0.007, None), c.path(), Model::HallMhd).unwrap();
    run_twin_command(&twin(0.012, Some(c.path().join("twin_00000005"))), c.path(), Model::HallMhd).unwrap();
    let twin_resume = read(a.path().join("twin.csv")) == read(c.path().join("twin.csv"))
        && read(a.path().join("twin_final.primary.bin")) == read(c.path().join("twin_final.primary.bin"))
        && read(a.path().join("twin_final.shadow.bin")) == read(c.path().join("twin_final.shadow.bin"));

    let sim = |t_end: f64, resume: Option<std::path::PathBuf>| {
        let mut cfg = RunConfig::with_required(32, t_end);
        cfg.dt = TimeStep::Fixed(2e-4);
        cfg.output_every = 5;
        cfg.snapshot_every = 10;
        cfg.forcing_amplitude = 0.1;
        cfg.resume = resume;
        cfg
    };
    let d = tempfile::tempdir().unwrap();
    let e = tempfile::tempdir().unwrap();
    run_simulate(&sim(0.006, None), d.path()).unwrap();
    run_simulate(&sim(0.002, None), e.path()).unwrap();
    run_simulate(&sim(0.006, Some(e.path().join("final.bin"))), e.path()).unwrap();
    let sim_resume = read(d.path().join("simulate.csv")) == read(e.path().join("simulate.csv"))
        && read(d.path().join("final.bin")) == read(e.path().join("final.bin"));

    let pass = repeat && twin_resume && sim_resume;
    report(
        "11",
        pass,
        format!("repeat CSV identical: {repeat}; twin resume identical: {twin_resume}; simulate resume identical: {sim_resume}"),
    );
    assert!(pass);
}

/// The twin run with amplitude 0.1 and perturbation 1e-2. At n = 48 its
/// magnetic wavenumber is often unresolved, so the run is reported but only
/// the decay of the difference is asserted.
#[test]
fn default_amplitude_twin_decays() {
    let _g = exclusive();
    let mut cfg = twin_config(Model::HallMhd, 0.5, 1e-2, true);
    cfg.amplitude = 0.1;
    cfg.params.dt = 2e-4;
    cfg.params.output_every = 10;
    let t = trajectory(cfg);
    let ratio = t.run.decay_ratio();
    let fit = fit_decay_rate(&t.run.records).unwrap();
    let pass = ratio <= 1e-3;
    report(
        "9-default-amplitude",
        pass,
        format!(
            "final/initial {ratio:.2e}, rate {:.1} (r2 {:.4}); sentinel steps {}/{}{}",
            fit.rate,
            fit.r2,
            t.run.sentinel_steps,
            t.run.analysed,
            if t.run.unresolved() { " (UNRESOLVED)" } else { "" }
        ),
    );
    assert!(pass);
}
