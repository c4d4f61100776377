//! Sweeps random permutation databases of increasing size and reports how
//! the minimum gap and the time needed to reach 90% success scale.

use adiabatic_search::spectrum::{self, PermutationInstances, SweepOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let generator = PermutationInstances {
        seed: 7,
        target: 2.0,
        anchor_example: true,
    };
    let options = SweepOptions {
        grid_points: 401,
        ..SweepOptions::default()
    };
    let rows = spectrum::gap_scaling_sweep(&[2, 3, 4, 5], &generator, &options)?;
    print!("{}", spectrum::scaling_csv(&rows));
    Ok(())
}
