//! Prints the pilot commutator maxima stored in `lp::calibration`.

use std::time::Instant;

use hallsync_core::lp::calibration::PILOT_SEEDS;
use hallsync_core::lp::checks::commutator_sweep;
use hallsync_core::lp::DyadicPartition;
use hallsync_core::spectral::Grid;

fn main() -> hallsync_core::Result<()> {
    let grid = Grid::new(32)?;
    let partition = DyadicPartition::new(&grid)?;
    let start = Instant::now();
    let (conv, hall) = commutator_sweep(&partition, PILOT_SEEDS)?;
    println!("PILOT_CONVECTION_MAX = {conv:e}");
    println!("PILOT_HALL_MAX = {hall:e}");
    println!("({:.1} s)", start.elapsed().as_secs_f64());
    Ok(())
}
