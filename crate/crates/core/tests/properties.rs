use adiabatic_search::database::{encode_database, RawEntry};
use adiabatic_search::evolve::{self, EvolutionPlan};
use adiabatic_search::linalg::{max_abs_diff, CMatrix};
use adiabatic_search::operators::{
    initial_hamiltonian, interpolate, pauli_compose, pauli_decompose, problem_hamiltonian, CouplingStrength,
    HermitianOperator,
};
use adiabatic_search::spectrum;
use num_complex::Complex64;
use proptest::prelude::*;

fn hermitian(n: usize) -> impl Strategy<Value = HermitianOperator> {
    let dim = 1usize << n;
    prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0), dim * dim).prop_map(move |raw| {
        let mut m = CMatrix::zeros(dim, dim);
        for r in 0..dim {
            for c in r..dim {
                let (re, im) = raw[r * dim + c];
                if r == c {
                    m[(r, c)] = Complex64::new(re, 0.0);
                } else {
                    m[(r, c)] = Complex64::new(re, im);
                    m[(c, r)] = Complex64::new(re, -im);
                }
            }
        }
        HermitianOperator::new(n, m).unwrap()
    })
}

fn permutation(n: usize) -> impl Strategy<Value = Vec<f64>> {
    Just((1..=(1usize << n)).map(|v| v as f64).collect::<Vec<_>>()).prop_shuffle()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn pauli_roundtrip(h in (1usize..=4).prop_flat_map(hermitian)) {
        let back = pauli_compose(&pauli_decompose(&h), h.n_qubits()).unwrap();
        prop_assert!(max_abs_diff(back.matrix(), h.matrix()) < 1e-10);
    }

    #[test]
    fn problem_ground_state_is_brute_force_argmin(
        (values, target) in (1usize..=3).prop_flat_map(|n| (permutation(n), 0.0f64..10.0))
    ) {
        let d = HermitianOperator::from_diagonal(&values).unwrap();
        let hp = problem_hamiltonian(&d, target).unwrap();
        let diag = hp.diagonal().unwrap();
        prop_assert!(diag.iter().all(|&x| x >= 0.0));
        let argmin = (0..values.len()).min_by(|&a, &b| diag[a].total_cmp(&diag[b])).unwrap();
        let oracle = (0..values.len())
            .min_by(|&a, &b| (values[a] - target).abs().total_cmp(&(values[b] - target).abs()))
            .unwrap();
        prop_assert_eq!(diag[argmin], diag[oracle]);
    }

    #[test]
    fn interpolation_is_affine(h in hermitian(2), s1 in 0.0f64..0.5, s2 in 0.0f64..0.5) {
        let hi = initial_hamiltonian(2, CouplingStrength::default());
        let lhs = interpolate(&hi, &h, s1).unwrap().matrix() + interpolate(&hi, &h, s2).unwrap().matrix();
        let rhs = interpolate(&hi, &h, s1 + s2).unwrap().matrix() + interpolate(&hi, &h, 0.0).unwrap().matrix();
        prop_assert!(max_abs_diff(&lhs, &rhs) < 1e-12);
    }

    #[test]
    fn encoding_roundtrips_and_preserves_order(
        numbers in prop::collection::hash_set(0u32..1_000_000, 8)
    ) {
        let numbers: Vec<u32> = numbers.into_iter().collect();
        let rows: Vec<RawEntry> = numbers.iter().enumerate()
            .map(|(i, v)| RawEntry::new(format!("name{i}"), v.to_string()))
            .collect();
        let db = encode_database(&rows).unwrap();
        for (i, code) in db.entries() {
            prop_assert_eq!(db.key(i).unwrap(), format!("name{i}"));
            prop_assert_eq!(db.encode_target(&numbers[i].to_string()).unwrap().code, code);
            prop_assert_eq!(db.values().iter().filter(|&&v| v == code).count(), 1);
        }
        for a in 0..8 {
            for b in 0..8 {
                if numbers[a] < numbers[b] {
                    prop_assert!(db.values()[a] < db.values()[b]);
                }
            }
        }
    }

    #[test]
    fn spectrum_trace_and_continuity(h in hermitian(2)) {
        let hi = initial_hamiltonian(2, CouplingStrength::default());
        let trace = spectrum::trace_spectrum(&hi, &h, 51).unwrap();
        let lipschitz = adiabatic_search::linalg::operator_norm(&(h.matrix() - hi.matrix()));
        let ds = trace.s_grid[1] - trace.s_grid[0];
        for (k, (s, row)) in trace.s_grid.iter().zip(&trace.levels).enumerate() {
            let expected = (1.0 - s) * hi.trace() + s * h.trace();
            prop_assert!((row.iter().sum::<f64>() - expected).abs() < 1e-8);
            prop_assert!(row.windows(2).all(|w| w[0] <= w[1]));
            if k > 0 {
                for (a, b) in row.iter().zip(&trace.levels[k - 1]) {
                    prop_assert!((a - b).abs() <= lipschitz * ds + 1e-9);
                }
            }
        }
        let end = h.eigenvalues();
        for (a, b) in trace.levels.last().unwrap().iter().zip(&end) {
            prop_assert!((a - b).abs() < 1e-10);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn evolutions_preserve_norm_and_agree(
        (values, target) in (1usize..=2).prop_flat_map(|n| {
            let size = 1usize << n;
            (permutation(n), (1..=size).prop_map(|t| t as f64))
        }),
        total_time in 10.0f64..30.0,
    ) {
        let n = values.len().trailing_zeros() as usize;
        let hp = problem_hamiltonian(&HermitianOperator::from_diagonal(&values).unwrap(), target).unwrap();
        let hi = initial_hamiltonian(n, CouplingStrength::default());
        let plan = EvolutionPlan::new(total_time, 40, CouplingStrength::default()).unwrap();
        let exact = evolve::evolve_discrete_exact(&hi, &hp, &plan).unwrap();
        let split = evolve::evolve_trotter(&hi, &hp, &plan).unwrap();
        let cont = evolve::evolve_continuous(&hi, &hp, &plan, plan.default_dt(&hi, &hp)).unwrap();
        for r in [&exact, &split, &cont] {
            prop_assert!((r.final_state.amplitudes().norm() - 1.0).abs() < 1e-9);
            prop_assert!((r.probabilities.iter().sum::<f64>() - 1.0).abs() < 1e-6);
        }
        prop_assert_eq!(exact.argmax(), cont.argmax());
        prop_assert_eq!(split.argmax(), cont.argmax());
    }
}
