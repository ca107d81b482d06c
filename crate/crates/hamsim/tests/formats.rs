use hamsim::formats::{
    parse_dense, parse_pauli_sum, parse_sparse, parse_vector, write_dense, write_pauli_sum, write_sparse, write_vector,
};
use hamsim::random;
use hamsim_core::hamiltonians::{max_norm, pauli_to_dense, pauli_to_sparse};
use proptest::prelude::*;

#[test]
fn twenty_random_files_round_trip() {
    let mut rng = random::rng(77);
    for case in 0..20 {
        let h = random::sparse_hamiltonian(&mut rng, 1 + case % 5, 1 + case % 4).unwrap();
        let text = write_sparse(&h);
        let back = parse_sparse(&text, "h").unwrap();
        assert_eq!(back, h);
        assert_eq!(write_sparse(&back), text);
        assert_eq!(max_norm(&back), back.to_dense().max_abs());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sparse_round_trip(seed in any::<u64>(), n in 1usize..5, d in 1usize..5) {
        let h = random::sparse_hamiltonian(&mut random::rng(seed), n, d).unwrap();
        prop_assert_eq!(parse_sparse(&write_sparse(&h), "h").unwrap(), h);
    }

    #[test]
    fn pauli_sum_round_trip(seed in any::<u64>(), n in 1usize..5, terms in 1usize..6) {
        let sum = random::pauli_sum(&mut random::rng(seed), n, terms).unwrap();
        let back = parse_pauli_sum(&write_pauli_sum(&sum), "p").unwrap();
        prop_assert_eq!(pauli_to_dense(&back).unwrap(), pauli_to_dense(&sum).unwrap());
        let sparse = pauli_to_sparse(&sum).unwrap();
        prop_assert_eq!(parse_sparse(&write_sparse(&sparse), "s").unwrap(), sparse);
    }

    #[test]
    fn dense_and_vector_round_trip(seed in any::<u64>(), dim in 1usize..6) {
        let mut rng = random::rng(seed);
        let m = random::hermitian(&mut rng, dim);
        prop_assert_eq!(parse_dense(&write_dense(&m), "m").unwrap(), m);
        let v = random::state(&mut rng, 2).into_amplitudes();
        prop_assert_eq!(parse_vector(&write_vector(&v), "v").unwrap(), v);
    }
}
