//! Compares each split-operator step with the exact step propagator and
//! shows how the fidelity improves as the number of steps grows.

use adiabatic_search::database::phone_book;
use adiabatic_search::evolve::{self, EvolutionPlan};
use adiabatic_search::operators::{database_operator, initial_hamiltonian, problem_hamiltonian, CouplingStrength};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let hi = initial_hamiltonian(2, CouplingStrength::default());
    let hp = problem_hamiltonian(&database_operator(&phone_book()), 2.0)?;

    let audit = evolve::trotter_audit(&hi, &hp, &EvolutionPlan::reference())?;
    println!("per-step fidelity (10 steps, T = 10.45):");
    for (s, f) in audit.per_step.iter().enumerate() {
        println!("  step {s:>2}: {f:.6}");
    }
    println!("overall: {:.6}\n", audit.overall);

    println!("{:>6} {:>14} {:>14}", "steps", "1 - fidelity", "op-norm error");
    for steps in [5, 10, 20, 40, 80] {
        let plan = EvolutionPlan::new(10.45, steps, CouplingStrength::default())?;
        let overall = evolve::trotter_audit(&hi, &hp, &plan)?.overall;
        let (exact, split) = evolve::step_product_pair(&hi, &hp, &plan)?;
        let distance = evolve::phase_aligned_distance(&exact, &split);
        println!("{steps:>6} {:>14.4e} {distance:>14.4e}", 1.0 - overall);
    }
    Ok(())
}
