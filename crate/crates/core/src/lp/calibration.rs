//! Pilot maxima of the commutator constants at `n = 32`, produced by
//! `cargo run --example calibrate` over [`PILOT_SEEDS`].
//! Regression runs must stay within twice these values.

pub const PILOT_SEEDS: std::ops::Range<u64> = 0..100;

/// `max ||[Delta_q, u_{<=p-2}.grad] v_p||_2 / (||v_p||_2 sum lambda_{p'} ||u_{p'}||_inf)`.
pub const PILOT_CONVECTION_MAX: f64 = 1.9741773313898745;

/// `max ||[Delta_q, b_{<=p-2} x curl] h_p||_2 / (||h_p||_2 sum lambda_{p'} ||b_{p'}||_inf)`.
pub const PILOT_HALL_MAX: f64 = 3.551257687755916;
