//! One-sparse decomposition of a d-sparse Hamiltonian.
//!
//! Each basis state becomes a vertex, each Hermitian off-diagonal pair an
//! undirected weighted edge. A greedy edge colouring splits the edges into
//! matchings; every matching is a one-sparse Hamiltonian, and the diagonal is
//! collected into one further term.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::hamiltonians::SparseHamiltonian;
use crate::linalg::{cis, ComplexMatrix, C64, I, ONE, ZERO};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedEdge {
    pub x: usize,
    pub y: usize,
    /// `<x|H|y>` with `x < y`.
    pub weight: C64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianGraph {
    pub n_qubits: usize,
    pub edges: Vec<WeightedEdge>,
    pub loops: Vec<(usize, f64)>,
}

impl HamiltonianGraph {
    pub fn n_vertices(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n_vertices()];
        for e in &self.edges {
            deg[e.x] += 1;
            deg[e.y] += 1;
        }
        deg
    }

    pub fn max_degree(&self) -> usize {
        self.degrees().into_iter().max().unwrap_or(0)
    }
}

/// Graph of a sparse Hamiltonian. Edges come out in lexicographic `(x, y)` order.
pub fn build_graph(h: &SparseHamiltonian) -> HamiltonianGraph {
    let mut edges = Vec::new();
    let mut loops = Vec::new();
    for (x, y, v) in h.entries() {
        if y == x {
            loops.push((x, v.re));
        } else if y > x {
            edges.push(WeightedEdge { x, y, weight: v });
        }
    }
    HamiltonianGraph {
        n_qubits: h.n_qubits(),
        edges,
        loops,
    }
}

/// Greedy edge colouring: edges in lexicographic order each take the smallest
/// colour free at both endpoints. Returns edge indices grouped by colour.
pub fn color_edges(g: &HamiltonianGraph) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..g.edges.len()).collect();
    order.sort_by_key(|&k| (g.edges[k].x, g.edges[k].y));

    let mut used: Vec<Vec<usize>> = vec![Vec::new(); g.n_vertices()];
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for k in order {
        let WeightedEdge { x, y, .. } = g.edges[k];
        let color = (0..)
            .find(|c| !used[x].contains(c) && !used[y].contains(c))
            .expect("unbounded search");
        used[x].push(color);
        used[y].push(color);
        if color == classes.len() {
            classes.push(Vec::new());
        }
        classes[color].push(k);
    }
    classes
}

/// Hermitian operator with at most one nonzero per row: a weighted partial
/// pairing of basis states plus real fixed-point weights.
#[derive(Debug, Clone, PartialEq)]
pub struct OneSparseTerm {
    n_qubits: usize,
    pairs: Vec<(usize, usize, C64)>,
    fixed_points: Vec<(usize, f64)>,
}

impl OneSparseTerm {
    /// Pairs are normalized to `x < y` (conjugating the weight when swapped).
    pub fn new(
        n_qubits: usize,
        pairs: Vec<(usize, usize, C64)>,
        fixed_points: Vec<(usize, f64)>,
    ) -> Result<Self> {
        let dim = 1usize << n_qubits;
        let mut seen = vec![false; dim];
        let mut claim = |idx: usize| -> Result<()> {
            if idx >= dim {
                return Err(Error::IndexOutOfRange { index: idx, dim });
            }
            if core::mem::replace(&mut seen[idx], true) {
                return Err(Error::NotOneSparse(idx));
            }
            Ok(())
        };
        let mut normalized = Vec::with_capacity(pairs.len());
        for (x, y, w) in pairs {
            if x == y {
                return Err(Error::NotOneSparse(x));
            }
            claim(x)?;
            claim(y)?;
            normalized.push(if x < y { (x, y, w) } else { (y, x, w.conj()) });
        }
        for &(x, _) in &fixed_points {
            claim(x)?;
        }
        Ok(Self {
            n_qubits,
            pairs: normalized,
            fixed_points,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn pairs(&self) -> &[(usize, usize, C64)] {
        &self.pairs
    }

    pub fn fixed_points(&self) -> &[(usize, f64)] {
        &self.fixed_points
    }

    pub fn is_diagonal(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn to_dense(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(self.dim());
        for &(x, y, w) in &self.pairs {
            m[(x, y)] = w;
            m[(y, x)] = w.conj();
        }
        for &(x, v) in &self.fixed_points {
            m[(x, x)] = C64::new(v, 0.0);
        }
        m
    }

    /// Sparse row form with declared sparsity 1.
    pub fn to_sparse(&self) -> SparseHamiltonian {
        let entries = self
            .pairs
            .iter()
            .flat_map(|&(x, y, w)| [(x, y, w), (y, x, w.conj())])
            .chain(self.fixed_points.iter().map(|&(x, v)| (x, x, C64::new(v, 0.0))));
        SparseHamiltonian::from_entries(self.n_qubits, 1, entries)
            .expect("one-sparse terms are valid sparse Hamiltonians")
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        let p = self.pairs.iter().map(|p| p.2.norm());
        let f = self.fixed_points.iter().map(|f| f.1.abs());
        p.chain(f).fold(0.0, f64::max)
    }

    /// Applies `exp(-i t T)` in place. Each pair evolves under its own 2x2 block
    /// and each fixed point picks up a phase; other amplitudes are untouched.
    pub fn apply_exp(&self, t: f64, amps: &mut [C64]) {
        for &(x, v) in &self.fixed_points {
            amps[x] *= cis(-v * t);
        }
        for &(x, y, w) in &self.pairs {
            let (c, s_dir_xy, s_dir_yx) = pair_rotation(w, t);
            let (ax, ay) = (amps[x], amps[y]);
            amps[x] = c * ax + s_dir_xy * ay;
            amps[y] = s_dir_yx * ax + c * ay;
        }
    }
}

/// Entries of `exp(-i t [[0, w], [conj(w), 0]])` as `(diag, upper, lower)`.
pub(crate) fn pair_rotation(w: C64, t: f64) -> (C64, C64, C64) {
    let mag = w.norm();
    if mag == 0.0 {
        return (ONE, ZERO, ZERO);
    }
    let (s, c) = libm::sincos(mag * t);
    let u = w / mag;
    (C64::new(c, 0.0), -I * s * u, -I * s * u.conj())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ColoredDecomposition {
    pub n_qubits: usize,
    /// One term per colour, followed by the diagonal term when `H` has one.
    pub terms: Vec<OneSparseTerm>,
    pub color_count: usize,
}

impl ColoredDecomposition {
    pub fn sum_dense(&self) -> ComplexMatrix {
        let mut acc = ComplexMatrix::zeros(1 << self.n_qubits);
        for t in &self.terms {
            acc = &acc + &t.to_dense();
        }
        acc
    }
}

/// Splits `H` into one-sparse terms via its graph and a greedy edge colouring.
pub fn decompose(h: &SparseHamiltonian) -> Result<ColoredDecomposition> {
    let g = build_graph(h);
    let classes = color_edges(&g);
    let n = h.n_qubits();
    let mut terms = Vec::with_capacity(classes.len() + 1);
    for class in &classes {
        let pairs = class
            .iter()
            .map(|&k| (g.edges[k].x, g.edges[k].y, g.edges[k].weight))
            .collect();
        terms.push(OneSparseTerm::new(n, pairs, Vec::new())?);
    }
    if !g.loops.is_empty() {
        terms.push(OneSparseTerm::new(n, Vec::new(), g.loops.clone())?);
    }
    Ok(ColoredDecomposition {
        n_qubits: n,
        terms,
        color_count: classes.len(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    /// `max |(sum of terms - H)_rc|`.
    pub max_residual: f64,
    /// Indices of terms with more than one nonzero in some row.
    pub non_one_sparse_terms: Vec<usize>,
    /// Indices of terms that are not Hermitian within 1e-14.
    pub non_hermitian_terms: Vec<usize>,
    pub color_count: usize,
    pub term_count: usize,
}

impl ValidationReport {
    pub fn passed(&self, tol: f64) -> bool {
        self.max_residual <= tol
            && self.non_one_sparse_terms.is_empty()
            && self.non_hermitian_terms.is_empty()
    }
}

/// Checks a decomposition against `H`: reconstruction, per-term sparsity and Hermiticity.
pub fn validate(dec: &ColoredDecomposition, h: &SparseHamiltonian) -> Result<ValidationReport> {
    if dec.n_qubits != h.n_qubits() {
        return Err(Error::DimensionMismatch {
            expected: h.n_qubits(),
            found: dec.n_qubits,
        });
    }
    let mut non_one_sparse = Vec::new();
    let mut non_hermitian = Vec::new();
    for (k, t) in dec.terms.iter().enumerate() {
        let m = t.to_dense();
        let crowded = (0..m.dim()).any(|r| m.row(r).iter().filter(|z| **z != ZERO).count() > 1);
        if crowded {
            non_one_sparse.push(k);
        }
        if m.hermitian_residual().0 > 1e-14 {
            non_hermitian.push(k);
        }
    }
    let residual = (&dec.sum_dense() - &h.to_dense()).max_abs();
    Ok(ValidationReport {
        max_residual: residual,
        non_one_sparse_terms: non_one_sparse,
        non_hermitian_terms: non_hermitian,
        color_count: dec.color_count,
        term_count: dec.terms.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonians::{pauli_to_sparse, PauliString, PauliSum};
    use crate::linalg::{exact_evolution, spectral_distance};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sparse_from_words(n: usize, words: &[(f64, &str)]) -> SparseHamiltonian {
        let terms = words
            .iter()
            .map(|&(c, w)| PauliString::from_word(c, w).unwrap())
            .collect();
        pauli_to_sparse(&PauliSum::new(n, terms).unwrap()).unwrap()
    }

    // Random Hermitian with at most `d` entries per row (diagonal included).
    fn random_sparse(rng: &mut ChaCha8Rng, n: usize, d: usize) -> SparseHamiltonian {
        let dim = 1usize << n;
        let mut occupancy = vec![0usize; dim];
        let mut entries = Vec::new();
        for x in 0..dim {
            if rng.gen_bool(0.5) && occupancy[x] < d {
                occupancy[x] += 1;
                entries.push((x, x, C64::new(rng.gen_range(-1.0..1.0), 0.0)));
            }
        }
        for _ in 0..dim * d {
            let x = rng.gen_range(0..dim);
            let y = rng.gen_range(0..dim);
            if x == y || occupancy[x] >= d || occupancy[y] >= d {
                continue;
            }
            if entries.iter().any(|&(a, b, _)| a == x && b == y) {
                continue;
            }
            let w = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            occupancy[x] += 1;
            occupancy[y] += 1;
            entries.push((x, y, w));
            entries.push((y, x, w.conj()));
        }
        SparseHamiltonian::from_entries(n, d, entries).unwrap()
    }

    #[test]
    fn graph_of_pauli_x() {
        let g = build_graph(&sparse_from_words(1, &[(1.0, "X")]));
        assert_eq!(g.n_vertices(), 2);
        assert_eq!(g.edges, vec![WeightedEdge { x: 0, y: 1, weight: ONE }]);
        assert!(g.loops.is_empty());
    }

    #[test]
    fn graph_of_diagonal() {
        let g = build_graph(&sparse_from_words(2, &[(1.0, "ZI"), (0.5, "IZ")]));
        assert!(g.edges.is_empty());
        assert_eq!(g.loops, vec![(0, 1.5), (1, 0.5), (2, -0.5), (3, -1.5)]);
    }

    #[test]
    fn graph_edge_count_is_half_offdiagonal_nonzeros() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let h = random_sparse(&mut rng, 4, 3);
        let dense = h.to_dense();
        let mut offdiag = 0;
        for r in 0..16 {
            for c in 0..16 {
                if r != c && dense[(r, c)] != ZERO {
                    offdiag += 1;
                }
            }
        }
        let g = build_graph(&h);
        assert_eq!(2 * g.edges.len(), offdiag);
        assert!(g.max_degree() <= 3);
    }

    fn graph_from_pairs(n_qubits: usize, pairs: &[(usize, usize)]) -> HamiltonianGraph {
        HamiltonianGraph {
            n_qubits,
            edges: pairs
                .iter()
                .map(|&(x, y)| WeightedEdge { x, y, weight: ONE })
                .collect(),
            loops: Vec::new(),
        }
    }

    #[test]
    fn coloring_small_graphs() {
        assert_eq!(color_edges(&graph_from_pairs(1, &[(0, 1)])).len(), 1);
        let path = color_edges(&graph_from_pairs(2, &[(0, 1), (1, 2)]));
        assert_eq!(path, vec![vec![0], vec![1]]);
        assert!(color_edges(&graph_from_pairs(2, &[])).is_empty());
    }

    #[test]
    fn coloring_random_graphs_are_matchings_within_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..50 {
            let n = rng.gen_range(2..=6);
            let h = random_sparse(&mut rng, n, 4);
            let g = build_graph(&h);
            let delta = g.max_degree();
            let classes = color_edges(&g);
            assert!(classes.len() <= (2 * delta).saturating_sub(1));
            let mut count = vec![0usize; g.edges.len()];
            for class in &classes {
                let mut hits = vec![0usize; g.n_vertices()];
                for &k in class {
                    count[k] += 1;
                    hits[g.edges[k].x] += 1;
                    hits[g.edges[k].y] += 1;
                }
                assert!(hits.iter().all(|&h| h <= 1));
            }
            assert!(count.iter().all(|&c| c == 1));
        }
    }

    #[test]
    fn decompose_diagonal_is_single_term() {
        let h = sparse_from_words(2, &[(1.0, "ZI"), (-0.25, "ZZ")]);
        let dec = decompose(&h).unwrap();
        assert_eq!(dec.terms.len(), 1);
        assert_eq!(dec.color_count, 0);
        assert_eq!(dec.terms[0].to_dense(), h.to_dense());
    }

    #[test]
    fn decompose_x_plus_z() {
        let h = sparse_from_words(1, &[(1.0, "X"), (1.0, "Z")]);
        let dec = decompose(&h).unwrap();
        assert_eq!(dec.terms.len(), 2);
        assert_eq!(dec.terms[0].pairs(), &[(0, 1, ONE)]);
        assert!(dec.terms[0].fixed_points().is_empty());
        assert_eq!(dec.terms[1].fixed_points(), &[(0, 1.0), (1, -1.0)]);
    }

    #[test]
    fn decompose_random_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(1234);
        for _ in 0..50 {
            let n = rng.gen_range(1..=6);
            let d = rng.gen_range(1..=4);
            let h = random_sparse(&mut rng, n, d);
            let dec = decompose(&h).unwrap();
            let report = validate(&dec, &h).unwrap();
            assert!(report.passed(1e-12), "{report:?}");
            assert!(dec.terms.len() <= 2 * d);
        }
    }

    #[test]
    fn validate_detects_perturbation_and_dropped_term() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let h = random_sparse(&mut rng, 4, 3);
        let dec = decompose(&h).unwrap();
        assert!(validate(&dec, &h).unwrap().passed(1e-12));

        let mut perturbed = dec.clone();
        let first = &perturbed.terms[0];
        let mut pairs = first.pairs().to_vec();
        pairs[0].2 += C64::new(1e-3, 0.0);
        perturbed.terms[0] = OneSparseTerm::new(4, pairs, first.fixed_points().to_vec()).unwrap();
        let r = validate(&perturbed, &h).unwrap();
        assert!((r.max_residual - 1e-3).abs() < 1e-12);
        assert!(!r.passed(1e-12));

        for k in 0..dec.terms.len() {
            let mut dropped = dec.clone();
            let removed = dropped.terms.remove(k);
            let r = validate(&dropped, &h).unwrap();
            assert!((r.max_residual - removed.max_abs()).abs() < 1e-15);
        }
    }

    #[test]
    fn one_sparse_rejects_shared_states() {
        assert!(matches!(
            OneSparseTerm::new(2, vec![(0, 1, ONE), (1, 2, ONE)], vec![]),
            Err(Error::NotOneSparse(1))
        ));
        assert!(matches!(
            OneSparseTerm::new(1, vec![(0, 1, ONE)], vec![(0, 1.0)]),
            Err(Error::NotOneSparse(0))
        ));
        let t = OneSparseTerm::new(1, vec![(1, 0, I)], vec![]).unwrap();
        assert_eq!(t.pairs(), &[(0, 1, -I)]);
    }

    #[test]
    fn apply_exp_matches_dense_exponential() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..20 {
            let h = random_sparse(&mut rng, 3, 3);
            for term in decompose(&h).unwrap().terms {
                let t = rng.gen_range(-2.0..2.0);
                let u = exact_evolution(&term.to_dense(), t).unwrap();
                let mut cols = ComplexMatrix::zeros(8);
                for c in 0..8 {
                    let mut v = vec![ZERO; 8];
                    v[c] = ONE;
                    term.apply_exp(t, &mut v);
                    for r in 0..8 {
                        cols[(r, c)] = v[r];
                    }
                }
                assert!(spectral_distance(&cols, &u).unwrap() < 1e-12);
            }
        }
    }
}
