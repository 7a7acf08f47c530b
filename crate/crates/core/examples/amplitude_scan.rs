//! Determining shells of seeded initial states at n = 48 over a range of
//! amplitudes, to pick a regime where both wavenumbers are resolved.

use hallsync_core::dynamics::Model;
use hallsync_core::init::seeded_state;
use hallsync_core::lp::DyadicPartition;
use hallsync_core::spectral::Grid;
use hallsync_core::wavenumbers::{lambda_b, lambda_u, WavenumberParams};

fn main() -> hallsync_core::Result<()> {
    let grid = Grid::new(48)?;
    let partition = DyadicPartition::new(&grid)?;
    let params = WavenumberParams::new(2.5, 2.0, 0.05, 1.0, 1.0, 0.5)?;
    println!("seed amplitude  ||b||_inf  Q_u  Q_b");
    for seed in 0..3 {
        for amplitude in [0.005, 0.01, 0.015, 0.02, 0.03, 0.05, 0.1] {
            let s = seeded_state(&grid, Model::HallMhd, seed, amplitude, partition.band_radius());
            let q_u = lambda_u(&s.u, &params, &partition).shell;
            let q_b = lambda_b(&s.b, &params, &partition);
            println!(
                "{seed:>4} {amplitude:>9} {:>10.4} {:>4} {:>4}  {:?}",
                s.b.to_physical()?.linf_norm(),
                q_u,
                q_b.shell,
                q_b.blocker
            );
        }
    }
    Ok(())
}
