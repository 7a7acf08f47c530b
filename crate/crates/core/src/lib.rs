//! Pseudo-spectral Hall-MHD and EMHD solver on the periodic unit cube with
//! Littlewood-Paley analysis, determining-wavenumber diagnostics and twin
//! synchronization experiments.

pub mod cli;
pub mod dynamics;
pub mod error;
pub mod init;
pub mod io;
pub mod lp;
pub mod simulate;
pub mod spectral;
pub mod twin;
pub mod wavenumbers;

pub use error::{Error, Result};
