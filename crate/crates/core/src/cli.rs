//! Subcommand orchestration shared by the binary and the Python bindings.

use std::fs;
use std::path::{Path, PathBuf};

use csv::StringRecord;
use log::info;

use crate::dynamics::{stable_dt, Forcing, Model, SolverParams, State};
use crate::error::{Error, Result};
use crate::init::seeded_state;
use crate::io::config::{ConfigError, ConfigIssue, Mode, RunConfig, TimeStep};
use crate::io::csv::{read_csv_rows, write_csv};
use crate::io::snapshot::{read_snapshot, write_snapshot};
use crate::lp::checks::run_lp_checks;
use crate::lp::DyadicPartition;
use crate::simulate::{Simulation, SimulationRecord};
use crate::spectral::{Grid, SpectralField};
use crate::twin::{fit_log_slope, TwinConfig, TwinRecord, TwinRunner, TwinState};
use crate::wavenumbers::{DeterminingShell, WavenumberParams};

/// Seed offset of the seeded forcing relative to the run seed.
pub const FORCING_SEED_OFFSET: u64 = 4;

#[derive(Clone, Debug)]
pub struct CliOptions {
    pub mode: Mode,
    pub config: PathBuf,
    pub out: Option<PathBuf>,
    pub serial: bool,
    pub threads: Option<usize>,
}

/// Sizes the global worker pool; `--serial` wins over `--threads`.
pub fn configure_threads(serial: bool, threads: Option<usize>) -> Result<()> {
    let n = if serial { Some(1) } else { threads };
    if let Some(n) = n {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
            .map_err(|_| Error::InvalidParameter {
                name: "threads",
                value: n as f64,
                constraint: "worker pool was already initialized",
            })?;
    }
    Ok(())
}

pub fn wavenumber_params(cfg: &RunConfig, eta: f64) -> Result<WavenumberParams> {
    WavenumberParams::new(cfg.r, cfg.delta, cfg.cr, cfg.nu, cfg.mu, eta)
}

/// Solver parameters with the time step resolved.
pub fn solver_params(cfg: &RunConfig, model: Model) -> Result<SolverParams> {
    let forcing = if cfg.forcing_amplitude > 0.0 && model == Model::HallMhd {
        Forcing::Seeded {
            amplitude: cfg.forcing_amplitude,
            seed: cfg.seed.wrapping_add(FORCING_SEED_OFFSET),
        }
    } else {
        Forcing::None
    };
    let mut params = SolverParams {
        nu: cfg.nu,
        mu: cfg.mu,
        eta: cfg.eta,
        dt: 1.0,
        t_end: cfg.t_end,
        forcing,
        output_every: cfg.output_every,
        cfl: cfg.cfl,
    };
    params.dt = match cfg.dt {
        TimeStep::Fixed(dt) => dt,
        TimeStep::Auto => auto_dt(cfg, model, &params)?,
    };
    params.validate()?;
    Ok(params)
}

/// Stability-limited step for the seeded initial state, shrunk so that
/// `t_end` is a whole number of steps.
fn auto_dt(cfg: &RunConfig, model: Model, params: &SolverParams) -> Result<f64> {
    let grid = Grid::new(cfg.n)?;
    let radius = DyadicPartition::new(&grid)?.band_radius();
    let state = seeded_state(&grid, model, cfg.seed, cfg.amplitude, radius);
    let limit = stable_dt(&state, params);
    let steps = if limit.is_finite() {
        (cfg.t_end / limit).ceil().max(1.0)
    } else {
        100.0
    };
    Ok(cfg.t_end / steps)
}

pub fn twin_config(cfg: &RunConfig, model: Model) -> Result<TwinConfig> {
    Ok(TwinConfig {
        n: cfg.n,
        model,
        params: solver_params(cfg, model)?,
        wavenumbers: wavenumber_params(cfg, cfg.eta)?,
        seed: cfg.seed,
        amplitude: cfg.amplitude,
        perturbation: cfg.perturbation,
        sync: cfg.sync,
    })
}

fn check_snapshot_matches(path: &Path, n: usize, s: &crate::io::snapshot::Snapshot, p: &SolverParams) -> Result<()> {
    let got_n = s.fields[0].grid().n();
    if got_n != n {
        return Err(Error::Snapshot(format!("{}: grid n = {got_n}, config has n = {n}", path.display())));
    }
    if s.nu.to_bits() != p.nu.to_bits() || s.mu.to_bits() != p.mu.to_bits() || s.eta.to_bits() != p.eta.to_bits() {
        return Err(Error::Snapshot(format!(
            "{}: coefficients (nu, mu, eta) = ({}, {}, {}) differ from the config",
            path.display(),
            s.nu,
            s.mu,
            s.eta
        )));
    }
    Ok(())
}

fn state_from_snapshot(path: &Path, n: usize, p: &SolverParams, model: Model) -> Result<State> {
    let snap = read_snapshot(path)?;
    check_snapshot_matches(path, n, &snap, p)?;
    let expected = match model {
        Model::HallMhd => 2,
        Model::Emhd => 1,
    };
    if snap.fields.len() != expected {
        return Err(Error::Snapshot(format!(
            "{}: {} field(s), expected {expected}",
            path.display(),
            snap.fields.len()
        )));
    }
    let mut fields = snap.fields.into_iter();
    let u = if model == Model::HallMhd {
        fields.next().expect("counted")
    } else {
        SpectralField::zeros(&Grid::new(n)?)
    };
    let b = fields.next().expect("counted");
    Ok(State { t: snap.t, u, b })
}

fn save_state(path: &Path, s: &State, p: &SolverParams, model: Model) -> Result<()> {
    match model {
        Model::HallMhd => write_snapshot(path, s.t, p.nu, p.mu, p.eta, &[&s.u, &s.b]),
        Model::Emhd => write_snapshot(path, s.t, p.nu, p.mu, p.eta, &[&s.b]),
    }
}

/// Rows of an earlier table with `t <= t_resume`.
fn kept_rows<R: crate::io::csv::CsvRow>(path: &Path, t_resume: f64) -> Result<Vec<StringRecord>> {
    let rows = read_csv_rows::<R>(path)?;
    let mut kept = Vec::new();
    for r in rows {
        let t: f64 = parse_cell(&r, 0)?;
        if t <= t_resume {
            kept.push(r);
        }
    }
    Ok(kept)
}

fn parse_cell(r: &StringRecord, i: usize) -> Result<f64> {
    r.get(i)
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::Snapshot(format!("unreadable CSV cell {i} in {r:?}")))
}

/// Snapshot paths of a twin checkpoint with the given prefix.
pub fn twin_snapshot_paths(prefix: &Path) -> (PathBuf, PathBuf) {
    let s = prefix.as_os_str().to_string_lossy();
    (PathBuf::from(format!("{s}.primary.bin")), PathBuf::from(format!("{s}.shadow.bin")))
}

fn mode_conflict(cfg: &RunConfig, mode: Mode) -> Result<()> {
    match cfg.mode {
        Some(m) if m != mode => Err(ConfigError {
            issues: vec![ConfigIssue {
                line: None,
                message: format!("config is for `{m}` but the subcommand is `{mode}`"),
            }],
        }
        .into()),
        _ => Ok(()),
    }
}

/// Runs one subcommand and returns the process exit code.
pub fn run(opts: &CliOptions) -> Result<i32> {
    let text = fs::read_to_string(&opts.config).map_err(|e| Error::io(&opts.config, e))?;
    let cfg = RunConfig::parse(&text)?;
    mode_conflict(&cfg, opts.mode)?;
    let out = opts
        .out
        .clone()
        .or_else(|| cfg.out_dir.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    fs::create_dir_all(&out).map_err(|e| Error::io(&out, e))?;
    let echo = out.join("config.txt");
    fs::write(&echo, cfg.to_text()).map_err(|e| Error::io(&echo, e))?;
    match opts.mode {
        Mode::Simulate => run_simulate(&cfg, &out),
        Mode::Twin => run_twin_command(&cfg, &out, Model::HallMhd),
        Mode::EmhdTwin => run_twin_command(&cfg, &out, Model::Emhd),
        Mode::LpCheck => run_lp_check(&cfg, &out),
    }
}

pub fn run_simulate(cfg: &RunConfig, out: &Path) -> Result<i32> {
    let params = solver_params(cfg, Model::HallMhd)?;
    let sim = Simulation::new(cfg.n, &params, Model::HallMhd, wavenumber_params(cfg, cfg.eta)?)?;
    let csv_path = out.join("simulate.csv");
    let (state, prefix) = match &cfg.resume {
        Some(path) => {
            let s = state_from_snapshot(path, cfg.n, &params, Model::HallMhd)?;
            let kept = kept_rows::<SimulationRecord>(&csv_path, s.t)?;
            (s, kept)
        }
        None => (sim.initial_state(cfg.seed, cfg.amplitude), Vec::new()),
    };
    info!("simulate: n = {}, dt = {}, {} steps", cfg.n, params.dt, sim.total_steps());
    let run = sim.run(state, |step, s| {
        if cfg.snapshot_every > 0 && step % cfg.snapshot_every == 0 {
            save_state(&out.join(format!("snapshot_{step:08}.bin")), s, &params, Model::HallMhd)?;
        }
        Ok(())
    })?;
    save_state(&out.join("final.bin"), &run.state, &params, Model::HallMhd)?;
    write_csv(&csv_path, &prefix, &run.records)?;
    if let Some(last) = run.records.last() {
        println!(
            "t = {}  E = {:.6e}  D = {:.6e}  Q_u = {}  Q_b = {}",
            last.energy.t,
            last.energy.total_energy(),
            last.energy.total_dissipation(),
            last.q_u,
            last.q_b
        );
    }
    println!(
        "bound monitor: {} samples, {} skipped, {} pointwise violations",
        run.monitor.samples(),
        run.monitor.skipped(),
        run.monitor.violations()
    );
    Ok(0)
}

pub fn run_twin_command(cfg: &RunConfig, out: &Path, model: Model) -> Result<i32> {
    let tc = twin_config(cfg, model)?;
    let params = tc.params.clone();
    let runner = TwinRunner::new(tc)?;
    let name = match model {
        Model::HallMhd => "twin",
        Model::Emhd => "emhd_twin",
    };
    let csv_path = out.join(format!("{name}.csv"));
    let (state, prefix) = match &cfg.resume {
        Some(prefix) => {
            let (pp, sp) = twin_snapshot_paths(prefix);
            let primary = state_from_snapshot(&pp, cfg.n, &params, model)?;
            let shadow = state_from_snapshot(&sp, cfg.n, &params, model)?;
            if primary.t.to_bits() != shadow.t.to_bits() {
                return Err(Error::Snapshot("primary and shadow snapshots have different times".into()));
            }
            let kept = kept_rows::<TwinRecord>(&csv_path, primary.t)?;
            let state = TwinState {
                primary,
                shadow,
                q_uv: DeterminingShell::Unresolved,
                q_bh: DeterminingShell::Unresolved,
            };
            (state, kept)
        }
        None => (runner.initial_state(), Vec::new()),
    };
    let previous = match prefix.last() {
        Some(r) => Some((parse_cell(r, 0)?, parse_cell(r, 1)? + parse_cell(r, 2)?)),
        None => None,
    };
    info!("{name}: n = {}, dt = {}, {} steps", cfg.n, params.dt, runner.total_steps());
    let save = |prefix: PathBuf, s: &TwinState| -> Result<()> {
        let (pp, sp) = twin_snapshot_paths(&prefix);
        save_state(&pp, &s.primary, &params, model)?;
        save_state(&sp, &s.shadow, &params, model)
    };
    let run = runner.run(state, previous, |step, s| {
        if cfg.snapshot_every > 0 && step % cfg.snapshot_every == 0 {
            save(out.join(format!("{name}_{step:08}")), s)?;
        }
        Ok(())
    })?;
    save(out.join(format!("{name}_final")), &run.state)?;
    write_csv(&csv_path, &prefix, &run.records)?;

    let mut t = Vec::new();
    let mut d = Vec::new();
    for r in &prefix {
        t.push(parse_cell(r, 0)?);
        d.push(parse_cell(r, 1)? + parse_cell(r, 2)?);
    }
    for r in &run.records {
        t.push(r.t);
        d.push(r.difference());
    }
    let ratio = match (d.first(), d.last()) {
        (Some(a), Some(b)) => b / a,
        _ => f64::NAN,
    };
    println!("difference final/initial = {ratio:.3e}");
    println!(
        "sentinel steps: {} of {} analysed{}",
        run.sentinel_steps,
        run.analysed,
        if run.unresolved() { " (UNRESOLVED)" } else { "" }
    );
    let decay_ok = match fit_log_slope(&t, &d) {
        Ok(fit) => {
            println!(
                "decay fit: rate = {:.6e}, r2 = {:.6}, samples = {} -> {}",
                fit.rate,
                fit.r2,
                fit.samples,
                if fit.pass() { "PASS" } else { "FAIL" }
            );
            fit.pass()
        }
        Err(e) => {
            println!("decay fit: {e} -> FAIL");
            false
        }
    };
    Ok(if decay_ok && !run.unresolved() { 0 } else { 1 })
}

pub fn run_lp_check(cfg: &RunConfig, out: &Path) -> Result<i32> {
    let rows = run_lp_checks(cfg.n, cfg.seed)?;
    write_csv(out.join("lp_check.csv"), &[], &rows)?;
    for r in &rows {
        println!(
            "{:<24} {:>12.4e} <= {:<10.3e} {}",
            r.name,
            r.measured,
            r.threshold,
            if r.pass { "PASS" } else { "FAIL" }
        );
    }
    Ok(if rows.iter().all(|r| r.pass) { 0 } else { 1 })
}
