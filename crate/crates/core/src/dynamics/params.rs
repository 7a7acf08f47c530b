use crate::error::{Error, Result};
use crate::init::{random_field, RandomFieldSpec};
use crate::spectral::{Grid, SpectralField};

/// Which system is integrated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Model {
    /// Velocity and magnetic field with the Hall term.
    HallMhd,
    /// Electron MHD: the magnetic field alone under Hall and resistive terms.
    Emhd,
}

/// Time-independent body force on the momentum equation.
#[derive(Clone, Debug)]
pub enum Forcing {
    None,
    /// Seeded random divergence-free field on `1 <= |k| <= 2` with the given
    /// `L^2` amplitude.
    Seeded { amplitude: f64, seed: u64 },
    /// Caller-supplied field.
    Field(SpectralField),
}

/// Forcing must live on shells `q <= 1`, i.e. `|k| < 4`.
pub const FORCING_RADIUS: f64 = 4.0;

impl Forcing {
    /// Builds and validates the forcing field on `grid`.
    pub fn build(&self, grid: &Grid) -> Result<SpectralField> {
        let f = match self {
            Forcing::None => SpectralField::zeros(grid),
            Forcing::Seeded { amplitude, seed } => {
                random_field(grid, *seed, RandomFieldSpec::band(*amplitude, 1.0, 2.0))
            }
            Forcing::Field(f) => {
                grid.ensure_same(f.grid())?;
                f.clone()
            }
        };
        if f.mean().iter().any(|m| *m != 0.0) {
            return Err(Error::InvalidForcing("forcing must have zero mean".into()));
        }
        if f.divergence_defect() > 1e-12 {
            return Err(Error::InvalidForcing("forcing must be divergence-free".into()));
        }
        let ksq = grid.ksq();
        let len = grid.len();
        let outside = f
            .coeffs()
            .iter()
            .enumerate()
            .any(|(i, c)| c.norm() != 0.0 && ksq[i % len] as f64 >= FORCING_RADIUS * FORCING_RADIUS);
        if outside {
            return Err(Error::InvalidForcing("forcing must be supported on |k| < 4".into()));
        }
        let mut f = f;
        f.mark_divergence_free();
        Ok(f)
    }
}

/// Physical coefficients and time-stepping controls.
#[derive(Clone, Debug)]
pub struct SolverParams {
    /// Fluid viscosity.
    pub nu: f64,
    /// Magnetic resistivity.
    pub mu: f64,
    /// Hall coefficient.
    pub eta: f64,
    pub dt: f64,
    pub t_end: f64,
    pub forcing: Forcing,
    /// Steps between diagnostics.
    pub output_every: usize,
    /// Courant factor of the stability policy.
    pub cfl: f64,
}

impl Default for SolverParams {
    fn default() -> Self {
        SolverParams {
            nu: 1.0,
            mu: 1.0,
            eta: 0.5,
            dt: 1e-4,
            t_end: 0.1,
            forcing: Forcing::None,
            output_every: 10,
            cfl: 0.4,
        }
    }
}

impl SolverParams {
    pub fn validate(&self) -> Result<()> {
        let positive = |name, value: f64| {
            if value > 0.0 && value.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter {
                    name,
                    value,
                    constraint: "must be positive and finite",
                })
            }
        };
        positive("nu", self.nu)?;
        positive("mu", self.mu)?;
        positive("dt", self.dt)?;
        positive("cfl", self.cfl)?;
        if !(self.eta >= 0.0) || !self.eta.is_finite() {
            return Err(Error::InvalidParameter {
                name: "eta",
                value: self.eta,
                constraint: "must be >= 0",
            });
        }
        if !(self.t_end >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "t_end",
                value: self.t_end,
                constraint: "must be >= 0",
            });
        }
        if self.output_every == 0 {
            return Err(Error::InvalidParameter {
                name: "output_every",
                value: 0.0,
                constraint: "must be >= 1",
            });
        }
        Ok(())
    }
}

/// Solution at one instant.
#[derive(Clone, Debug)]
pub struct State {
    pub t: f64,
    /// Velocity; identically zero for EMHD.
    pub u: SpectralField,
    pub b: SpectralField,
}

impl State {
    pub fn new(t: f64, u: SpectralField, b: SpectralField) -> Result<Self> {
        u.grid().ensure_same(b.grid())?;
        Ok(State { t, u, b })
    }

    pub fn zeros(grid: &Grid) -> Self {
        State {
            t: 0.0,
            u: SpectralField::zeros(grid),
            b: SpectralField::zeros(grid),
        }
    }

    pub fn grid(&self) -> &Grid {
        self.u.grid()
    }
}
