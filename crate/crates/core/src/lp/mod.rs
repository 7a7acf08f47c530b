//! Littlewood-Paley shells, paraproducts and commutators.

mod bernstein;
pub mod calibration;
pub mod checks;
mod commutator;
mod paraproduct;
mod partition;

pub use bernstein::bernstein_ratio;
pub use commutator::{commutator_convection, commutator_hall, convection_ratio, hall_ratio, low_shell_gradient_weight};
pub use paraproduct::{bony_decompose, bony_decompose_scalar, dealiased_scalar_product, Paraproduct};
pub use partition::{chi, lambda, DyadicPartition, Shell};
