//! Traces the instantaneous energy levels along the interpolation and
//! reports the minimum spectral gap. The full trace is written as CSV.

use adiabatic_search::database::phone_book;
use adiabatic_search::operators::{database_operator, initial_hamiltonian, problem_hamiltonian, CouplingStrength};
use adiabatic_search::spectrum::{self, DEFAULT_GRID_POINTS};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let db = phone_book();
    let hi = initial_hamiltonian(2, CouplingStrength::default());
    let hp = problem_hamiltonian(&database_operator(&db), 2.0)?;

    let trace = spectrum::trace_spectrum(&hi, &hp, DEFAULT_GRID_POINTS)?;
    for k in (0..trace.s_grid.len()).step_by(100) {
        let levels: Vec<String> = trace.levels[k].iter().map(|e| format!("{e:+.4}")).collect();
        println!("s = {:.1}  {}", trace.s_grid[k], levels.join("  "));
    }

    let gap = spectrum::min_gap(&trace);
    println!("\nminimum gap {:.6} at s = {:.3}", gap.min_gap, gap.s_at_min);
    println!("ground degeneracy at s = 1: {}", gap.ground_degeneracy_at_end);

    let path = std::env::temp_dir().join("phone_book_spectrum.csv");
    std::fs::write(&path, trace.to_csv())?;
    println!("trace written to {}", path.display());
    Ok(())
}
