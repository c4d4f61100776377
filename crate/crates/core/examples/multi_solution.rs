//! Two entries share the target value, so the final ground space is
//! degenerate and a slow evolution splits evenly between them.

use adiabatic_search::database::{encode_database, RawEntry};
use adiabatic_search::evolve::{self, EvolutionPlan};
use adiabatic_search::operators::{database_operator, initial_hamiltonian, problem_hamiltonian, CouplingStrength};
use adiabatic_search::spectrum;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let rows: Vec<RawEntry> = [("A", "1"), ("B", "2"), ("C", "2"), ("D", "3")]
        .into_iter()
        .map(|(k, v)| RawEntry::new(k, v))
        .collect();
    let db = encode_database(&rows)?;
    let target = db.encode_target("2")?;

    let hi = initial_hamiltonian(2, CouplingStrength::default());
    let hp = problem_hamiltonian(&database_operator(&db), target.code)?;
    let gap = spectrum::min_gap(&spectrum::trace_spectrum(&hi, &hp, 1001)?);
    println!("ground degeneracy at the end: {}", gap.ground_degeneracy_at_end);

    let plan = EvolutionPlan::new(100.0, 10, CouplingStrength::default())?;
    let report = evolve::evolve_continuous(&hi, &hp, &plan, plan.default_dt(&hi, &hp))?;
    for outcome in db.decode_outcome(&report.probabilities)? {
        println!("{} {:.4}", outcome.key, outcome.probability);
    }
    Ok(())
}
