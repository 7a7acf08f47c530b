//! Hall-MHD and EMHD right-hand sides, time integration and energy diagnostics.

mod energy;
mod integrator;
mod params;
mod rhs;

pub use energy::{energy_and_dissipation, energy_balance_residual, energy_report, EnergyReport};
pub use integrator::{stability_limit, stable_dt, step, step_pair, Stepper};
pub use params::{Forcing, Model, SolverParams, State, FORCING_RADIUS};
pub use rhs::{hall_term, rhs_emhd, rhs_induction, rhs_momentum};
