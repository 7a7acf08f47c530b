//! Single-solution runs with energy and wavenumber diagnostics.

use crate::dynamics::{energy_report, EnergyReport, Model, SolverParams, State, Stepper};
use crate::error::Result;
use crate::init::seeded_state;
use crate::lp::DyadicPartition;
use crate::spectral::Grid;
use crate::wavenumbers::{lambda_b, lambda_u, BoundMonitor, BoundSample, DeterminingShell, WavenumberParams};

/// One output row of a simulation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimulationRecord {
    pub energy: EnergyReport,
    pub q_u: DeterminingShell,
    pub q_b: DeterminingShell,
    /// None when `Q_b` is the sentinel.
    pub pointwise_ok: Option<bool>,
    pub margin: f64,
}

#[derive(Clone, Debug)]
pub struct SimulationRun {
    pub records: Vec<SimulationRecord>,
    pub state: State,
    pub monitor: BoundMonitor,
}

/// Grid, partition and stepper of one run.
#[derive(Clone, Debug)]
pub struct Simulation {
    grid: Grid,
    partition: DyadicPartition,
    stepper: Stepper,
    wavenumbers: WavenumberParams,
}

impl Simulation {
    /// The state is Galerkin-truncated to the partition's reconstruction ball.
    pub fn new(n: usize, params: &SolverParams, model: Model, wavenumbers: WavenumberParams) -> Result<Self> {
        let grid = Grid::new(n)?;
        let partition = DyadicPartition::new(&grid)?;
        let stepper = Stepper::new(&grid, params, model)?.with_band_radius(partition.band_radius());
        Ok(Simulation {
            grid,
            partition,
            stepper,
            wavenumbers,
        })
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

    pub fn initial_state(&self, seed: u64, amplitude: f64) -> State {
        seeded_state(
            &self.grid,
            self.stepper.model(),
            seed,
            amplitude,
            self.partition.band_radius(),
        )
    }

    pub fn record(&self, s: &State, monitor: &mut BoundMonitor) -> SimulationRecord {
        let energy = energy_report(s, self.stepper.params());
        let q_u = lambda_u(&s.u, &self.wavenumbers, &self.partition).shell;
        let q_b = lambda_b(&s.b, &self.wavenumbers, &self.partition).shell;
        let (pointwise_ok, margin) = match monitor.record(q_b, energy.linf_grad_b) {
            BoundSample::Checked { pointwise_ok, margin } => (Some(pointwise_ok), margin),
            BoundSample::Skipped => (None, f64::NAN),
        };
        SimulationRecord {
            energy,
            q_u,
            q_b,
            pointwise_ok,
            margin,
        }
    }

    pub fn total_steps(&self) -> usize {
        let p = self.stepper.params();
        (p.t_end / p.dt).round() as usize
    }

    /// Runs to `t_end`. A fresh run records its initial state; a resumed one
    /// starts by stepping. `on_step` sees every new state.
    pub fn run(&self, mut state: State, mut on_step: impl FnMut(usize, &State) -> Result<()>) -> Result<SimulationRun> {
        let p = self.stepper.params();
        let total = self.total_steps();
        let mut step = (state.t / p.dt).round() as usize;
        let mut monitor = BoundMonitor::new(&self.wavenumbers);
        let mut records = Vec::new();
        if step == 0 {
            records.push(self.record(&state, &mut monitor));
            on_step(0, &state)?;
        }
        while step < total {
            state = self.stepper.step(&state)?;
            step += 1;
            if step % p.output_every == 0 || step == total {
                records.push(self.record(&state, &mut monitor));
            }
            on_step(step, &state)?;
        }
        Ok(SimulationRun {
            records,
            state,
            monitor,
        })
    }
}
