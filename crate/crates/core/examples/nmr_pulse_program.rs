//! Compiles the split-operator search into rf pulses and free-precession
//! delays for a two-spin liquid-state sample, then replays the pulse program
//! to confirm it reproduces each step.

use adiabatic_search::database::phone_book;
use adiabatic_search::evolve::{self, EvolutionPlan};
use adiabatic_search::nmr::{self, SpinSystem};
use adiabatic_search::operators::{
    database_operator, initial_hamiltonian, pauli_decompose, problem_hamiltonian, CouplingStrength,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let db = phone_book();
    let hi = initial_hamiltonian(2, CouplingStrength::default());
    let hp = problem_hamiltonian(&database_operator(&db), 2.0)?;
    let plan = EvolutionPlan::reference();

    let terms = pauli_decompose(&hp);
    for term in &terms {
        println!("{term}");
    }

    let sequences = nmr::compile_full(&plan, &terms, &SpinSystem::chloroform())?;
    println!();
    for seq in &sequences {
        let reference = evolve::trotter_step(&hi, &hp, &plan, seq.step)?;
        let check = nmr::verify_step(seq, &reference)?;
        println!(
            "step {:>2}: x {:.4} rad, delay {:.4e} s, fidelity {:.12}",
            seq.step,
            seq.x_angle(),
            seq.free_evolution_time(),
            check.fidelity
        );
    }

    print!("\n{}", nmr::pulse_program_jsonl(&sequences[..2]));
    Ok(())
}
