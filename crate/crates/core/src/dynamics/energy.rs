use super::params::{SolverParams, State};
use crate::spectral::{grad_linf, gradient_l2_sq, l2_norm, SpectralField};

/// Energy and dissipation at one instant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyReport {
    pub t: f64,
    /// `||u||_2^2 / 2`
    pub e_u: f64,
    /// `||b||_2^2 / 2`
    pub e_b: f64,
    /// `nu ||grad u||_2^2`
    pub d_u: f64,
    /// `mu ||grad b||_2^2`
    pub d_b: f64,
    /// Pointwise maximum of the Frobenius norm of `grad b`.
    pub linf_grad_b: f64,
}

impl EnergyReport {
    pub fn total_energy(&self) -> f64 {
        self.e_u + self.e_b
    }

    pub fn total_dissipation(&self) -> f64 {
        self.d_u + self.d_b
    }
}

pub fn energy_report(s: &State, p: &SolverParams) -> EnergyReport {
    let eu = l2_norm(&s.u);
    let eb = l2_norm(&s.b);
    EnergyReport {
        t: s.t,
        e_u: 0.5 * eu * eu,
        e_b: 0.5 * eb * eb,
        d_u: p.nu * gradient_l2_sq(&s.u),
        d_b: p.mu * gradient_l2_sq(&s.b),
        linf_grad_b: grad_linf(&s.b),
    }
}

/// Discrete energy balance over one step with trapezoidal quadrature:
/// `E1 - E0 + dt (D0 + D1)/2 - dt (<f,u0> + <f,u1>)/2`.
pub fn energy_balance_residual(
    before: &State,
    after: &State,
    params: &SolverParams,
    forcing: &SpectralField,
) -> f64 {
    let (e0, d0) = energy_and_dissipation(before, params);
    let (e1, d1) = energy_and_dissipation(after, params);
    let dt = after.t - before.t;
    let work = 0.5 * dt * (forcing.inner(&before.u) + forcing.inner(&after.u));
    e1 - e0 + 0.5 * dt * (d0 + d1) - work
}

/// `(E_u + E_b, D_u + D_b)` without the grid pass for `||grad b||_inf`.
pub fn energy_and_dissipation(s: &State, p: &SolverParams) -> (f64, f64) {
    let eu = l2_norm(&s.u);
    let eb = l2_norm(&s.b);
    (
        0.5 * (eu * eu + eb * eb),
        p.nu * gradient_l2_sq(&s.u) + p.mu * gradient_l2_sq(&s.b),
    )
}
