//! Reverse lookup in a four-entry phone book: given a number, find its owner.
//!
//! Runs all three evolution methods on the bundled directory and prints the
//! ranked outcomes for each.
//!
//! ```text
//! cargo run --example phone_book_search -- 3601002
//! ```

use adiabatic_search::database::phone_book;
use adiabatic_search::evolve::{self, EvolutionPlan, EvolutionReport};
use adiabatic_search::operators::{database_operator, initial_hamiltonian, problem_hamiltonian, CouplingStrength};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let number = std::env::args().nth(1).unwrap_or_else(|| "3601002".to_string());
    let db = phone_book();
    let target = db.encode_target(&number)?;
    println!("looking up {number} (code {})", target.code);

    let hi = initial_hamiltonian(db.n_qubits(), CouplingStrength::default());
    let hp = problem_hamiltonian(&database_operator(&db), target.code)?;
    let plan = EvolutionPlan::reference();

    let runs: [(&str, EvolutionReport); 3] = [
        ("continuous", evolve::evolve_continuous(&hi, &hp, &plan, plan.default_dt(&hi, &hp))?),
        ("discrete exact", evolve::evolve_discrete_exact(&hi, &hp, &plan)?),
        ("trotter", evolve::evolve_trotter(&hi, &hp, &plan)?),
    ];
    for (name, report) in &runs {
        println!("\n{name}:");
        for outcome in db.decode_outcome(&report.probabilities)? {
            println!("  {:<8} {:.4}", outcome.key, outcome.probability);
        }
    }
    Ok(())
}
