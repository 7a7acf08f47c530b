//! Integrating-factor RK4 (Lawson) time stepping.
//!
//! Diffusion is integrated exactly with `exp(-4 pi^2 nu |k|^2 t)` (resp. `mu`);
//! advection, Lorentz, Hall and forcing terms are explicit. Nonlinear terms are
//! dealiased by the 2/3 rule and then truncated to a spherical band, so the
//! state never leaves the band it started in.

use std::f64::consts::PI;

use super::params::{Model, SolverParams, State};
use super::rhs::zero_mean;
use crate::error::{Error, Result};
use crate::spectral::{curl, leray_project, Grid, SpectralField};

/// Stability limit `cfl * min(dx/|u|_inf, dx/|b|_inf, dx^2/(2 pi eta |b|_inf))`.
pub fn stability_limit(cfl: f64, eta: f64, dx: f64, u_inf: f64, b_inf: f64) -> f64 {
    let mut limit = f64::INFINITY;
    if u_inf > 0.0 {
        limit = limit.min(dx / u_inf);
    }
    if b_inf > 0.0 {
        limit = limit.min(dx / b_inf);
        if eta > 0.0 {
            limit = limit.min(dx * dx / (2.0 * PI * eta * b_inf));
        }
    }
    cfl * limit
}

/// Largest step allowed by the stability policy for `state`.
pub fn stable_dt(state: &State, params: &SolverParams) -> f64 {
    let u_inf = state.u.to_physical_unchecked().linf_norm();
    let b_inf = state.b.to_physical_unchecked().linf_norm();
    stability_limit(params.cfl, params.eta, state.grid().spacing(), u_inf, b_inf)
}

/// Reusable stepper holding the forcing field and the integrating factors.
#[derive(Clone, Debug)]
pub struct Stepper {
    grid: Grid,
    params: SolverParams,
    model: Model,
    forcing: SpectralField,
    band_radius: Option<f64>,
    // Indexed by |k|^2.
    u_full: Vec<f64>,
    u_half: Vec<f64>,
    b_full: Vec<f64>,
    b_half: Vec<f64>,
    enforce_stability: bool,
}

impl Stepper {
    pub fn new(grid: &Grid, params: &SolverParams, model: Model) -> Result<Self> {
        params.validate()?;
        let forcing = match model {
            Model::HallMhd => params.forcing.build(grid)?,
            Model::Emhd => SpectralField::zeros(grid),
        };
        let half = grid.n() / 2;
        let ksq_len = 3 * half * half + 1;
        let factors = |coef: f64, dt: f64| -> Vec<f64> {
            (0..ksq_len)
                .map(|s| (-4.0 * PI * PI * coef * s as f64 * dt).exp())
                .collect()
        };
        Ok(Stepper {
            grid: grid.clone(),
            params: params.clone(),
            model,
            forcing,
            band_radius: None,
            u_full: factors(params.nu, params.dt),
            u_half: factors(params.nu, 0.5 * params.dt),
            b_full: factors(params.mu, params.dt),
            b_half: factors(params.mu, 0.5 * params.dt),
            enforce_stability: true,
        })
    }

    /// Truncates every nonlinear update to `|k| <= radius`.
    pub fn with_band_radius(mut self, radius: f64) -> Self {
        self.band_radius = Some(radius);
        self
    }

    /// Disables the per-step stability check (for convergence studies).
    pub fn without_stability_check(mut self) -> Self {
        self.enforce_stability = false;
        self
    }

    pub fn params(&self) -> &SolverParams {
        &self.params
    }

    pub fn model(&self) -> Model {
        self.model
    }

    pub fn forcing(&self) -> &SpectralField {
        &self.forcing
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    fn band(&self, f: SpectralField) -> SpectralField {
        match self.band_radius {
            Some(r) => {
                let flag = f.is_divergence_free();
                let r2 = r * r;
                let mut out = f.apply_radial(|s| if s as f64 <= r2 { 1.0 } else { 0.0 });
                out.set_divergence_free_unchecked(flag);
                out
            }
            None => f,
        }
    }

    /// Explicit part `(N_u, N_b)`; the optional grid values are returned for
    /// the stability check.
    fn nonlinear(&self, u: &SpectralField, b: &SpectralField) -> Result<(SpectralField, SpectralField, [f64; 2])> {
        let pb = b.to_physical_unchecked();
        let pj = curl(b).to_physical_unchecked();
        let hall = pj.cross(&pb)?;
        match self.model {
            Model::HallMhd => {
                let pu = u.to_physical_unchecked();
                let pw = curl(u).to_physical_unchecked();
                let mut momentum = pu.cross(&pw)?;
                momentum.add_assign(&hall);
                let mut emf = pu.cross(&pb)?;
                emf.axpy_assign(-self.params.eta, &hall);
                let mut nu = leray_project(&momentum.to_spectral_dealiased());
                zero_mean(&mut nu);
                let nu = self.band(nu.axpy(1.0, &self.forcing));
                let mut nb = curl(&emf.to_spectral_dealiased());
                nb.set_divergence_free_unchecked(true);
                let nb = self.band(nb);
                Ok((nu, nb, [pu.linf_norm(), pb.linf_norm()]))
            }
            Model::Emhd => {
                let mut emf = hall;
                emf.scale_in_place(-self.params.eta);
                let mut nb = curl(&emf.to_spectral_dealiased());
                nb.set_divergence_free_unchecked(true);
                Ok((SpectralField::zeros(&self.grid), self.band(nb), [0.0, pb.linf_norm()]))
            }
        }
    }

    fn apply(&self, f: &SpectralField, table: &[f64]) -> SpectralField {
        let flag = f.is_divergence_free();
        let mut out = f.apply_radial(|s| table[s as usize]);
        out.set_divergence_free_unchecked(flag);
        out
    }

    /// One IF-RK4 step.
    ///
    /// Stages, with `E = exp(L dt)` and `H = exp(L dt/2)`:
    /// `a = H(x + dt/2 k1)`, `b = H x + dt/2 k2`, `c = E x + dt H k3`,
    /// `x' = E x + dt/6 (E k1 + 2 H (k2 + k3) + k4)`.
    pub fn step(&self, s: &State) -> Result<State> {
        let dt = self.params.dt;
        let (ku1, kb1, maxima) = self.nonlinear(&s.u, &s.b)?;
        if self.enforce_stability {
            let limit = stability_limit(self.params.cfl, self.params.eta, self.grid.spacing(), maxima[0], maxima[1]);
            if dt > limit {
                return Err(Error::Unstable { dt, limit, t: s.t });
            }
        }
        let hu = self.apply(&s.u, &self.u_half);
        let hb = self.apply(&s.b, &self.b_half);

        let ua = self.apply(&s.u.axpy(0.5 * dt, &ku1), &self.u_half);
        let ba = self.apply(&s.b.axpy(0.5 * dt, &kb1), &self.b_half);
        let (ku2, kb2, _) = self.nonlinear(&ua, &ba)?;

        let ub = hu.axpy(0.5 * dt, &ku2);
        let bb = hb.axpy(0.5 * dt, &kb2);
        let (ku3, kb3, _) = self.nonlinear(&ub, &bb)?;

        let eu = self.apply(&s.u, &self.u_full);
        let eb = self.apply(&s.b, &self.b_full);
        let uc = eu.axpy(dt, &self.apply(&ku3, &self.u_half));
        let bc = eb.axpy(dt, &self.apply(&kb3, &self.b_half));
        let (ku4, kb4, _) = self.nonlinear(&uc, &bc)?;

        let combine = |x_full: &SpectralField, k1: &SpectralField, k2: &SpectralField, k3: &SpectralField, k4: &SpectralField, full: &[f64], half: &[f64]| {
            let mid = self.apply(&(k2 + k3), half);
            let incr = self.apply(k1, full).axpy(2.0, &mid).axpy(1.0, k4);
            x_full.axpy(dt / 6.0, &incr)
        };
        let mut u = match self.model {
            Model::HallMhd => combine(&eu, &ku1, &ku2, &ku3, &ku4, &self.u_full, &self.u_half),
            Model::Emhd => s.u.clone(),
        };
        let mut b = combine(&eb, &kb1, &kb2, &kb3, &kb4, &self.b_full, &self.b_half);
        u.set_divergence_free_unchecked(s.u.is_divergence_free());
        b.set_divergence_free_unchecked(s.b.is_divergence_free());
        let t = s.t + dt;
        if !u.is_finite() || !b.is_finite() {
            return Err(Error::BlowUp { t });
        }
        Ok(State { t, u, b })
    }
}

/// Advances `s` by one step with a freshly built stepper.
pub fn step(s: &State, params: &SolverParams) -> Result<State> {
    Stepper::new(s.grid(), params, Model::HallMhd)?.step(s)
}

/// Parallel-safe helper: steps two states with the same stepper.
pub fn step_pair(stepper: &Stepper, a: &State, b: &State) -> Result<(State, State)> {
    let (ra, rb) = rayon::join(|| stepper.step(a), || stepper.step(b));
    Ok((ra?, rb?))
}
