//! Seeded generators for experiments and tests. All randomness flows from a
//! `ChaCha8Rng` built with [`rng`], so a seed fixes every output.

use std::collections::BTreeSet;

use hamsim_core::circuits::DiagonalTable;
use hamsim_core::decomposition::OneSparseTerm;
use hamsim_core::hamiltonians::{Pauli, PauliString, PauliSum, SparseHamiltonian};
use hamsim_core::linalg::{ComplexMatrix, StateVector, C64};
use hamsim_core::Result;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn complex(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// Hermitian matrix on `n` qubits with at most `d` non-zeros per row.
///
/// Candidate pairs are drawn uniformly and kept while both rows have room, so
/// rows are usually close to full.
pub fn sparse_hamiltonian(rng: &mut ChaCha8Rng, n: usize, d: usize) -> Result<SparseHamiltonian> {
    let dim = 1usize << n;
    let mut counts = vec![0usize; dim];
    let mut seen = BTreeSet::new();
    let mut entries = Vec::new();
    for _ in 0..4 * dim * d {
        let x = rng.gen_range(0..dim);
        let y = rng.gen_range(0..dim);
        let (x, y) = (x.min(y), x.max(y));
        let extra = usize::from(x != y);
        if seen.contains(&(x, y)) || counts[x] + 1 > d || counts[y] + extra > d {
            continue;
        }
        seen.insert((x, y));
        counts[x] += 1;
        counts[y] += extra;
        let w = complex(rng);
        if x == y {
            entries.push((x, x, C64::new(w.re, 0.0)));
        } else {
            entries.push((x, y, w));
            entries.push((y, x, w.conj()));
        }
    }
    SparseHamiltonian::from_entries(n, d, entries)
}

pub fn hermitian(rng: &mut ChaCha8Rng, dim: usize) -> ComplexMatrix {
    let raw = ComplexMatrix::from_fn(dim, |_, _| complex(rng));
    ComplexMatrix::from_fn(dim, |r, c| (raw[(r, c)] + raw[(c, r)].conj()) * 0.5)
}

/// Unitary from Gram-Schmidt on random complex columns.
pub fn unitary(rng: &mut ChaCha8Rng, dim: usize) -> ComplexMatrix {
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(dim);
    while cols.len() < dim {
        let mut v: Vec<C64> = (0..dim).map(|_| complex(rng)).collect();
        for u in &cols {
            let dot: C64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (x, y) in v.iter_mut().zip(u) {
                *x -= dot * y;
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            cols.push(v.into_iter().map(|z| z / norm).collect());
        }
    }
    ComplexMatrix::from_fn(dim, |r, c| cols[c][r])
}

pub fn state(rng: &mut ChaCha8Rng, n: usize) -> StateVector {
    loop {
        let amps: Vec<C64> = (0..1usize << n).map(|_| complex(rng)).collect();
        if let Ok(s) = StateVector::from_unnormalized(amps) {
            return s;
        }
    }
}

pub fn pauli_word(rng: &mut ChaCha8Rng, n: usize) -> Vec<Pauli> {
    const LETTERS: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
    (0..n).map(|_| LETTERS[rng.gen_range(0..4)]).collect()
}

pub fn pauli_sum(rng: &mut ChaCha8Rng, n: usize, terms: usize) -> Result<PauliSum> {
    let strings = (0..terms)
        .map(|_| PauliString::new(rng.gen_range(-1.0..1.0), pauli_word(rng, n)))
        .collect();
    PauliSum::new(n, strings)
}

/// Random perfect-or-partial matching of the basis states plus random fixed points.
pub fn one_sparse_term(rng: &mut ChaCha8Rng, n: usize) -> Result<OneSparseTerm> {
    let mut states: Vec<usize> = (0..1usize << n).collect();
    states.shuffle(rng);
    let mut pairs = Vec::new();
    let mut fixed = Vec::new();
    let mut i = 0;
    while i < states.len() {
        if i + 1 < states.len() && rng.gen_bool(0.6) {
            pairs.push((states[i], states[i + 1], complex(rng)));
            i += 2;
        } else {
            if rng.gen_bool(0.7) {
                fixed.push((states[i], rng.gen_range(-2.0..2.0)));
            }
            i += 1;
        }
    }
    OneSparseTerm::new(n, pairs, fixed)
}

pub fn diagonal_table(rng: &mut ChaCha8Rng, n: usize, bits: u32) -> Result<DiagonalTable> {
    let values = (0..1usize << n).map(|_| rng.gen_range(0..1u64 << bits)).collect();
    DiagonalTable::new(bits, values, rng.gen_range(0.05..1.0))
}

/// Linear-system instance `(A, b, M)`.
#[derive(Debug, Clone)]
pub struct HhlInstance {
    pub a: ComplexMatrix,
    pub b: Vec<C64>,
    pub observable: ComplexMatrix,
    pub eigenvalues: Vec<f64>,
}

/// `A = U diag(lambda) U^dagger` with `|lambda| in [1, 10]` and random signs,
/// so the condition number is at most 10; `M` is Hermitian with `|M| = 1`.
pub fn hhl_instance(rng: &mut ChaCha8Rng, dim: usize) -> HhlInstance {
    let u = unitary(rng, dim);
    let eigenvalues: Vec<f64> = (0..dim)
        .map(|_| {
            let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            sign * rng.gen_range(1.0..=10.0)
        })
        .collect();
    let a = &(&u * &ComplexMatrix::from_real_diagonal(&eigenvalues)) * &u.adjoint();
    let a = ComplexMatrix::from_fn(dim, |r, c| (a[(r, c)] + a[(c, r)].conj()) * 0.5);
    let b = (0..dim).map(|_| complex(rng)).collect();
    let v = unitary(rng, dim);
    let mu: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let top = mu.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(f64::MIN_POSITIVE);
    let mu: Vec<f64> = mu.iter().map(|x| x / top).collect();
    let m = &(&v * &ComplexMatrix::from_real_diagonal(&mu)) * &v.adjoint();
    let observable = ComplexMatrix::from_fn(dim, |r, c| (m[(r, c)] + m[(c, r)].conj()) * 0.5);
    HhlInstance {
        a,
        b,
        observable,
        eigenvalues,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use hamsim_core::linalg::{eigendecompose_hermitian, spectral_norm};

    #[test]
    fn same_seed_same_output() {
        let a = sparse_hamiltonian(&mut rng(3), 4, 3).unwrap();
        let b = sparse_hamiltonian(&mut rng(3), 4, 3).unwrap();
        assert_eq!(a, b);
        assert!(a.observed_sparsity() <= 3);
    }

    #[test]
    fn unitary_is_unitary() {
        let u = unitary(&mut rng(1), 8);
        assert!(u.unitarity_deviation() < 1e-12);
    }

    #[test]
    fn hhl_instances_are_well_conditioned() {
        let mut r = rng(7);
        for _ in 0..10 {
            let inst = hhl_instance(&mut r, 4);
            let eig = eigendecompose_hermitian(&inst.a).unwrap();
            let mags: Vec<f64> = eig.eigenvalues.iter().map(|l| l.abs()).collect();
            let cond = mags.iter().cloned().fold(0.0, f64::max) / mags.iter().cloned().fold(f64::INFINITY, f64::min);
            assert!(cond <= 10.0 + 1e-9);
            assert!((spectral_norm(&inst.observable).unwrap() - 1.0).abs() < 1e-9);
        }
    }
}
