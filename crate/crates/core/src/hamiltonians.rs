//! Hamiltonian representations: Pauli sums, the d-sparse row form, and the
//! many-body model builders.
//!
//! Qubit `q` of an `n`-qubit register is bit `n - 1 - q` of a basis index, so
//! the word `"XZ"` is the Kronecker product `X ⊗ Z`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64, I, MAX_QUBITS, ONE, ZERO};

/// Largest declared sparsity accepted by [`SparseHamiltonian`].
pub const MAX_SPARSITY: usize = 1 << MAX_QUBITS;

/// Relative tolerance used when matching an entry with its conjugate partner.
pub const SPARSE_HERMITIAN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'I' | 'i' => Some(Pauli::I),
            'X' | 'x' => Some(Pauli::X),
            'Y' | 'y' => Some(Pauli::Y),
            'Z' | 'z' => Some(Pauli::Z),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn matrix(self) -> ComplexMatrix {
        let entries = match self {
            Pauli::I => [ONE, ZERO, ZERO, ONE],
            Pauli::X => [ZERO, ONE, ONE, ZERO],
            Pauli::Y => [ZERO, -I, I, ZERO],
            Pauli::Z => [ONE, ZERO, ZERO, -ONE],
        };
        ComplexMatrix::from_fn(2, |r, c| entries[2 * r + c])
    }
}

/// Real-weighted tensor product of Pauli operators.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliString {
    pub coefficient: f64,
    word: Vec<Pauli>,
    flip: usize,
    sign: usize,
    y_count: u32,
}

impl PauliString {
    pub fn new(coefficient: f64, word: Vec<Pauli>) -> Self {
        let n = word.len();
        let (mut flip, mut sign, mut y_count) = (0, 0, 0);
        for (q, p) in word.iter().enumerate() {
            let bit = 1usize << (n - 1 - q);
            match p {
                Pauli::I => {}
                Pauli::X => flip |= bit,
                Pauli::Y => {
                    flip |= bit;
                    sign |= bit;
                    y_count += 1;
                }
                Pauli::Z => sign |= bit,
            }
        }
        Self {
            coefficient,
            word,
            flip,
            sign,
            y_count,
        }
    }

    /// Parses a word such as `"XIZ"`.
    pub fn from_word(coefficient: f64, word: &str) -> Result<Self> {
        let letters = word
            .chars()
            .map(|c| {
                Pauli::from_char(c)
                    .ok_or_else(|| Error::InvalidParameter(format!("invalid Pauli letter '{c}'")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(coefficient, letters))
    }

    /// Word with `letter` on each listed qubit and identity elsewhere.
    pub fn on_sites(coefficient: f64, n_qubits: usize, sites: &[(usize, Pauli)]) -> Result<Self> {
        let mut word = vec![Pauli::I; n_qubits];
        for &(q, p) in sites {
            if q >= n_qubits {
                return Err(Error::IndexOutOfRange {
                    index: q,
                    dim: n_qubits,
                });
            }
            word[q] = p;
        }
        Ok(Self::new(coefficient, word))
    }

    pub fn word(&self) -> &[Pauli] {
        &self.word
    }

    pub fn n_qubits(&self) -> usize {
        self.word.len()
    }

    pub fn word_string(&self) -> String {
        self.word.iter().map(|p| p.as_char()).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.word.iter().all(|&p| p == Pauli::I)
    }

    /// Qubits carrying a non-identity letter.
    pub fn support(&self) -> impl Iterator<Item = (usize, Pauli)> + '_ {
        self.word
            .iter()
            .enumerate()
            .filter(|(_, &p)| p != Pauli::I)
            .map(|(q, &p)| (q, p))
    }

    /// Bits flipped by the word (X or Y letters).
    pub fn flip_mask(&self) -> usize {
        self.flip
    }

    /// Bits that contribute a sign (Y or Z letters).
    pub fn sign_mask(&self) -> usize {
        self.sign
    }

    /// The unweighted word acting on a basis state: `P|y> = phase * |y ^ flip_mask>`.
    #[inline]
    pub fn action(&self, y: usize) -> (usize, C64) {
        (y ^ self.flip, word_phase(self.y_count, self.sign, y))
    }
}

/// Phase picked up by `|y>` under a word with `y_count` Y letters and the given
/// sign mask: `i^{#Y} (-1)^{popcount(y & sign_mask)}`.
#[inline]
pub(crate) fn word_phase(y_count: u32, sign_mask: usize, y: usize) -> C64 {
    let base = match y_count % 4 {
        0 => ONE,
        1 => I,
        2 => -ONE,
        _ => -I,
    };
    if (y & sign_mask).count_ones() % 2 == 1 {
        -base
    } else {
        base
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.coefficient, self.word_string())
    }
}

/// Sum of Pauli strings over a fixed register.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliSum {
    n_qubits: usize,
    terms: Vec<PauliString>,
}

impl PauliSum {
    /// Merges duplicate words (keeping first-occurrence order) and drops terms
    /// whose merged coefficient is exactly zero.
    pub fn new(n_qubits: usize, terms: Vec<PauliString>) -> Result<Self> {
        let mut merged: Vec<PauliString> = Vec::with_capacity(terms.len());
        let mut index: BTreeMap<Vec<Pauli>, usize> = BTreeMap::new();
        for term in terms {
            if term.n_qubits() != n_qubits {
                return Err(Error::DimensionMismatch {
                    expected: n_qubits,
                    found: term.n_qubits(),
                });
            }
            if !term.coefficient.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "non-finite coefficient on {}",
                    term.word_string()
                )));
            }
            match index.get(&term.word) {
                Some(&k) => merged[k].coefficient += term.coefficient,
                None => {
                    index.insert(term.word.clone(), merged.len());
                    merged.push(term);
                }
            }
        }
        merged.retain(|t| t.coefficient != 0.0);
        Ok(Self {
            n_qubits,
            terms: merged,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[PauliString] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn check_register(&self) -> Result<()> {
        if self.n_qubits > MAX_QUBITS {
            return Err(Error::RegisterTooLarge {
                qubits: self.n_qubits,
                cap: MAX_QUBITS,
            });
        }
        Ok(())
    }
}

/// Dense matrix of a Pauli sum.
pub fn pauli_to_dense(sum: &PauliSum) -> Result<ComplexMatrix> {
    sum.check_register()?;
    let dim = 1usize << sum.n_qubits;
    let mut m = ComplexMatrix::zeros(dim);
    for term in &sum.terms {
        let w = C64::new(term.coefficient, 0.0);
        for y in 0..dim {
            let (x, phase) = term.action(y);
            m[(x, y)] += w * phase;
        }
    }
    Ok(m)
}

/// Dense matrix of a single (weighted) Pauli string.
pub fn pauli_string_to_dense(p: &PauliString) -> Result<ComplexMatrix> {
    pauli_to_dense(&PauliSum::new(p.n_qubits(), alloc::vec![p.clone()])?)
}

/// Sparse row form of a Pauli sum; exact cancellations are dropped.
pub fn pauli_to_sparse(sum: &PauliSum) -> Result<SparseHamiltonian> {
    sum.check_register()?;
    let dim = 1usize << sum.n_qubits;
    let mut rows: Vec<BTreeMap<usize, C64>> = vec![BTreeMap::new(); dim];
    for term in &sum.terms {
        let w = C64::new(term.coefficient, 0.0);
        for y in 0..dim {
            let (x, phase) = term.action(y);
            *rows[x].entry(y).or_insert(ZERO) += w * phase;
        }
    }
    let rows: Vec<Vec<(usize, C64)>> = rows
        .into_iter()
        .map(|r| r.into_iter().filter(|(_, v)| *v != ZERO).collect())
        .collect();
    let d = rows.iter().map(Vec::len).max().unwrap_or(0);
    SparseHamiltonian::from_rows(sum.n_qubits, d, rows)
}

/// Hermitian matrix in row-list form with a declared sparsity bound.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseHamiltonian {
    n_qubits: usize,
    d: usize,
    rows: Vec<Vec<(usize, C64)>>,
}

impl SparseHamiltonian {
    /// Builds from `(row, col, value)` triples, validating ranges, duplicates,
    /// the sparsity bound and Hermiticity.
    pub fn from_entries(
        n_qubits: usize,
        d: usize,
        entries: impl IntoIterator<Item = (usize, usize, C64)>,
    ) -> Result<Self> {
        if n_qubits > MAX_QUBITS {
            return Err(Error::RegisterTooLarge {
                qubits: n_qubits,
                cap: MAX_QUBITS,
            });
        }
        let dim = 1usize << n_qubits;
        let mut rows: Vec<Vec<(usize, C64)>> = vec![Vec::new(); dim];
        for (r, c, v) in entries {
            for idx in [r, c] {
                if idx >= dim {
                    return Err(Error::IndexOutOfRange { index: idx, dim });
                }
            }
            rows[r].push((c, v));
        }
        for row in &mut rows {
            row.sort_by_key(|&(c, _)| c);
        }
        Self::from_rows(n_qubits, d, rows)
    }

    /// Builds from per-row lists; each list may be in any order.
    pub fn from_rows(n_qubits: usize, d: usize, mut rows: Vec<Vec<(usize, C64)>>) -> Result<Self> {
        if n_qubits > MAX_QUBITS {
            return Err(Error::RegisterTooLarge {
                qubits: n_qubits,
                cap: MAX_QUBITS,
            });
        }
        if d > MAX_SPARSITY {
            return Err(Error::InvalidParameter(format!(
                "declared sparsity {d} exceeds cap {MAX_SPARSITY}"
            )));
        }
        let dim = 1usize << n_qubits;
        if rows.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: rows.len(),
            });
        }
        for (r, row) in rows.iter_mut().enumerate() {
            row.sort_by_key(|&(c, _)| c);
            for w in row.windows(2) {
                if w[0].0 == w[1].0 {
                    return Err(Error::DuplicateEntry { row: r, col: w[0].0 });
                }
            }
            for &(c, v) in row.iter() {
                if c >= dim {
                    return Err(Error::IndexOutOfRange { index: c, dim });
                }
                if !v.re.is_finite() || !v.im.is_finite() {
                    return Err(Error::NonFinite { row: r, col: c });
                }
            }
            if row.len() > d {
                return Err(Error::SparsityExceeded {
                    row: r,
                    found: row.len(),
                    declared: d,
                });
            }
        }
        let h = Self { n_qubits, d, rows };
        h.check_hermitian()?;
        Ok(h)
    }

    fn check_hermitian(&self) -> Result<()> {
        for (r, row) in self.rows.iter().enumerate() {
            for &(c, v) in row {
                let partner = self.get(c, r);
                let residual = match partner {
                    Some(p) => (v - p.conj()).norm(),
                    None => f64::INFINITY,
                };
                if residual > SPARSE_HERMITIAN_TOL * v.norm().max(1.0) {
                    let (row, col) = if r <= c { (r, c) } else { (c, r) };
                    return Err(Error::NotHermitian { row, col, residual });
                }
            }
        }
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Declared sparsity bound.
    pub fn sparsity(&self) -> usize {
        self.d
    }

    /// Largest number of stored entries in any row.
    pub fn observed_sparsity(&self) -> usize {
        self.rows.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn row(&self, x: usize) -> &[(usize, C64)] {
        &self.rows[x]
    }

    pub fn rows(&self) -> &[Vec<(usize, C64)>] {
        &self.rows
    }

    pub fn get(&self, row: usize, col: usize) -> Option<C64> {
        let r = self.rows.get(row)?;
        r.binary_search_by_key(&col, |&(c, _)| c).ok().map(|k| r[k].1)
    }

    /// Iterates `(row, col, value)` in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(r, row)| row.iter().map(move |&(c, v)| (r, c, v)))
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn to_dense(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(self.dim());
        for (r, c, v) in self.entries() {
            m[(r, c)] = v;
        }
        m
    }

    /// Sparse form of a dense Hermitian matrix, keeping entries with `|v| > threshold`.
    pub fn from_dense(m: &ComplexMatrix, threshold: f64) -> Result<Self> {
        let n_qubits = crate::linalg::log2_exact(m.dim())?;
        let rows: Vec<Vec<(usize, C64)>> = (0..m.dim())
            .map(|r| {
                m.row(r)
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| v.norm() > threshold)
                    .map(|(c, &v)| (c, v))
                    .collect()
            })
            .collect();
        let d = rows.iter().map(Vec::len).max().unwrap_or(0);
        Self::from_rows(n_qubits, d, rows)
    }
}

/// Largest entry magnitude.
pub fn max_norm(h: &SparseHamiltonian) -> f64 {
    h.entries().fold(0.0, |m, (_, _, v)| m.max(v.norm()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Ising,
    Xy,
    Heisenberg,
    Honeycomb,
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ising" => Ok(ModelKind::Ising),
            "xy" => Ok(ModelKind::Xy),
            "heisenberg" => Ok(ModelKind::Heisenberg),
            "honeycomb" | "kitaev" => Ok(ModelKind::Honeycomb),
            other => Err(Error::InvalidParameter(format!("unknown model kind '{other}'"))),
        }
    }
}

/// Link label of a honeycomb bond.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Link {
    X,
    Y,
    Z,
}

impl FromStr for Link {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "x" | "X" => Ok(Link::X),
            "y" | "Y" => Ok(Link::Y),
            "z" | "Z" => Ok(Link::Z),
            other => Err(Error::InvalidParameter(format!("unknown link label '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub link: Option<Link>,
}

impl Edge {
    pub fn new(i: usize, j: usize) -> Self {
        Self { i, j, link: None }
    }

    pub fn labeled(i: usize, j: usize, link: Link) -> Self {
        Self {
            i,
            j,
            link: Some(link),
        }
    }
}

/// Couplings and graph for one of the many-body models.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub kind: ModelKind,
    pub n_qubits: usize,
    pub edges: Vec<Edge>,
    pub j: f64,
    pub b: f64,
    pub jx: f64,
    pub jy: f64,
    pub jz: f64,
}

impl ModelParams {
    pub fn new(kind: ModelKind, n_qubits: usize, edges: Vec<Edge>) -> Self {
        Self {
            kind,
            n_qubits,
            edges,
            j: 0.0,
            b: 0.0,
            jx: 0.0,
            jy: 0.0,
            jz: 0.0,
        }
    }

    pub fn ising(n_qubits: usize, edges: Vec<Edge>, j: f64, b: f64) -> Self {
        Self {
            j,
            b,
            ..Self::new(ModelKind::Ising, n_qubits, edges)
        }
    }

    pub fn heisenberg(n_qubits: usize, edges: Vec<Edge>, jx: f64, jy: f64, jz: f64) -> Self {
        Self {
            jx,
            jy,
            jz,
            ..Self::new(ModelKind::Heisenberg, n_qubits, edges)
        }
    }
}

/// Open chain `0-1-...-(n-1)`.
pub fn chain_edges(n_qubits: usize) -> Vec<Edge> {
    (1..n_qubits).map(|q| Edge::new(q - 1, q)).collect()
}

/// Closed ring; equal to the chain for `n < 3`.
pub fn ring_edges(n_qubits: usize) -> Vec<Edge> {
    let mut edges = chain_edges(n_qubits);
    if n_qubits >= 3 {
        edges.push(Edge::new(n_qubits - 1, 0));
    }
    edges
}

fn validate_graph(p: &ModelParams) -> Result<()> {
    if p.n_qubits == 0 {
        return Err(Error::MalformedGraph(String::from("register has no qubits")));
    }
    if p.n_qubits > MAX_QUBITS {
        return Err(Error::RegisterTooLarge {
            qubits: p.n_qubits,
            cap: MAX_QUBITS,
        });
    }
    let mut seen = BTreeMap::new();
    for (k, e) in p.edges.iter().enumerate() {
        if e.i >= p.n_qubits || e.j >= p.n_qubits {
            return Err(Error::MalformedGraph(format!(
                "edge {k} ({}, {}) references a qubit outside 0..{}",
                e.i, e.j, p.n_qubits
            )));
        }
        if e.i == e.j {
            return Err(Error::MalformedGraph(format!("edge {k} is a self-loop on {}", e.i)));
        }
        let key = (e.i.min(e.j), e.i.max(e.j));
        if seen.insert(key, k).is_some() {
            return Err(Error::MalformedGraph(format!(
                "edge {k} ({}, {}) is duplicated",
                e.i, e.j
            )));
        }
        if p.kind == ModelKind::Honeycomb && e.link.is_none() {
            return Err(Error::MalformedGraph(format!("honeycomb edge {k} has no link label")));
        }
    }
    Ok(())
}

/// Pauli-sum form of a many-body model. Zero couplings contribute no terms.
pub fn build_model(p: &ModelParams) -> Result<PauliSum> {
    validate_graph(p)?;
    let n = p.n_qubits;
    let mut terms = Vec::new();
    let mut push_pair = |coeff: f64, e: &Edge, letter: Pauli| -> Result<()> {
        if coeff != 0.0 {
            terms.push(PauliString::on_sites(coeff, n, &[(e.i, letter), (e.j, letter)])?);
        }
        Ok(())
    };
    match p.kind {
        ModelKind::Ising => {
            for e in &p.edges {
                push_pair(p.j, e, Pauli::Z)?;
            }
        }
        ModelKind::Xy => {
            for e in &p.edges {
                push_pair(p.jx, e, Pauli::X)?;
                push_pair(p.jy, e, Pauli::Y)?;
            }
        }
        ModelKind::Heisenberg => {
            for e in &p.edges {
                push_pair(p.jx, e, Pauli::X)?;
                push_pair(p.jy, e, Pauli::Y)?;
                push_pair(p.jz, e, Pauli::Z)?;
            }
        }
        ModelKind::Honeycomb => {
            for e in &p.edges {
                match e.link {
                    Some(Link::X) => push_pair(p.jx, e, Pauli::X)?,
                    Some(Link::Y) => push_pair(-p.jy, e, Pauli::Y)?,
                    Some(Link::Z) => push_pair(-p.jz, e, Pauli::Z)?,
                    None => unreachable!("validated above"),
                }
            }
        }
    }
    if p.kind == ModelKind::Ising && p.b != 0.0 {
        for q in 0..n {
            terms.push(PauliString::on_sites(p.b, n, &[(q, Pauli::X)])?);
        }
    }
    PauliSum::new(n, terms)
}

/// Groups the terms of a sum by the set of letters they use (e.g. all-`Z`
/// words vs all-`X` words), preserving first-appearance order.
pub fn group_by_letters(sum: &PauliSum) -> Vec<PauliSum> {
    let mut keys: Vec<[bool; 3]> = Vec::new();
    let mut groups: Vec<Vec<PauliString>> = Vec::new();
    for t in sum.terms() {
        let key = [
            t.word().contains(&Pauli::X),
            t.word().contains(&Pauli::Y),
            t.word().contains(&Pauli::Z),
        ];
        match keys.iter().position(|k| *k == key) {
            Some(g) => groups[g].push(t.clone()),
            None => {
                keys.push(key);
                groups.push(vec![t.clone()]);
            }
        }
    }
    groups
        .into_iter()
        .map(|terms| PauliSum {
            n_qubits: sum.n_qubits,
            terms,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{eigendecompose_hermitian, spectral_distance};

    fn word(c: f64, w: &str) -> PauliString {
        PauliString::from_word(c, w).unwrap()
    }

    // Independent Kronecker-product expansion.
    fn kron_dense(sum: &PauliSum) -> ComplexMatrix {
        let dim = 1 << sum.n_qubits();
        let mut acc = ComplexMatrix::zeros(dim);
        for t in sum.terms() {
            let mut m = ComplexMatrix::identity(1);
            for p in t.word() {
                m = m.kron(&p.matrix());
            }
            acc = &acc + &m.scale(C64::new(t.coefficient, 0.0));
        }
        acc
    }

    #[test]
    fn single_z_is_diagonal() {
        let sum = PauliSum::new(1, vec![word(1.0, "Z")]).unwrap();
        let m = pauli_to_dense(&sum).unwrap();
        assert_eq!(m, ComplexMatrix::from_real_diagonal(&[1.0, -1.0]));
    }

    #[test]
    fn swap_symmetric_sum() {
        let sum = PauliSum::new(2, vec![word(0.5, "XI"), word(0.5, "IX")]).unwrap();
        let m = pauli_to_dense(&sum).unwrap();
        let swap = |i: usize| ((i & 1) << 1) | (i >> 1);
        for r in 0..4 {
            for c in 0..4 {
                assert_eq!(m[(r, c)], m[(swap(r), swap(c))]);
            }
        }
    }

    #[test]
    fn dense_matches_kron_oracle_on_all_letters() {
        let sum = PauliSum::new(
            3,
            vec![word(0.3, "XYZ"), word(-1.2, "YYI"), word(0.7, "IZX"), word(2.0, "III")],
        )
        .unwrap();
        let m = pauli_to_dense(&sum).unwrap();
        assert!(spectral_distance(&m, &kron_dense(&sum)).unwrap() < 1e-15);
        assert!(m.hermitian_residual().0 <= 1e-14);
    }

    #[test]
    fn duplicates_merge_and_cancel() {
        let sum = PauliSum::new(2, vec![word(1.0, "ZZ"), word(0.5, "XX"), word(-1.0, "ZZ")]).unwrap();
        assert_eq!(sum.terms().len(), 1);
        assert_eq!(sum.terms()[0].word_string(), "XX");
        assert!(PauliSum::new(2, vec![word(1.0, "Z")]).is_err());
    }

    #[test]
    fn ising_two_sites() {
        let p = ModelParams::ising(2, chain_edges(2), 1.0, 0.0);
        let sum = build_model(&p).unwrap();
        assert_eq!(sum.terms().len(), 1);
        assert_eq!(sum.terms()[0].word_string(), "ZZ");
        let m = pauli_to_dense(&sum).unwrap();
        assert_eq!(m, ComplexMatrix::from_real_diagonal(&[1.0, -1.0, -1.0, 1.0]));
    }

    #[test]
    fn ising_single_site_field() {
        let p = ModelParams::ising(1, Vec::new(), 1.0, 1.0);
        let m = pauli_to_dense(&build_model(&p).unwrap()).unwrap();
        assert_eq!(m, Pauli::X.matrix());
    }

    #[test]
    fn heisenberg_chain_spectrum() {
        let p = ModelParams::heisenberg(3, chain_edges(3), 1.0, 1.0, 1.0);
        let m = pauli_to_dense(&build_model(&p).unwrap()).unwrap();
        // Direct sum of the individual Pauli matrices, independently diagonalized.
        let x = Pauli::X.matrix();
        let y = Pauli::Y.matrix();
        let z = Pauli::Z.matrix();
        let id = ComplexMatrix::identity(2);
        let mut direct = ComplexMatrix::zeros(8);
        for s in [&x, &y, &z] {
            direct = &direct + &s.kron(s).kron(&id);
            direct = &direct + &id.kron(s).kron(s);
        }
        let ours = eigendecompose_hermitian(&m).unwrap().eigenvalues;
        let theirs = eigendecompose_hermitian(&direct).unwrap().eigenvalues;
        for (a, b) in ours.iter().zip(&theirs) {
            assert!((a - b).abs() < 1e-12);
        }
        // Open 3-site Heisenberg chain: eigenvalues {-4 (x2), 0 (x2), 2 (x4)}.
        let expect = [-4.0, -4.0, 0.0, 0.0, 2.0, 2.0, 2.0, 2.0];
        for (a, b) in ours.iter().zip(expect) {
            assert!((a - b).abs() < 1e-12, "{ours:?}");
        }
    }

    #[test]
    fn honeycomb_signs_and_labels() {
        let edges = vec![
            Edge::labeled(0, 1, Link::X),
            Edge::labeled(1, 2, Link::Y),
            Edge::labeled(2, 3, Link::Z),
        ];
        let mut p = ModelParams::new(ModelKind::Honeycomb, 4, edges);
        p.jx = 1.0;
        p.jy = 2.0;
        p.jz = 3.0;
        let sum = build_model(&p).unwrap();
        let got: Vec<(f64, String)> = sum
            .terms()
            .iter()
            .map(|t| (t.coefficient, t.word_string()))
            .collect();
        assert_eq!(
            got,
            vec![
                (1.0, String::from("XXII")),
                (-2.0, String::from("IYYI")),
                (-3.0, String::from("IIZZ"))
            ]
        );
        p.edges.push(Edge::new(0, 3));
        assert!(matches!(build_model(&p), Err(Error::MalformedGraph(_))));
    }

    #[test]
    fn malformed_graphs_rejected() {
        let bad = ModelParams::ising(2, vec![Edge::new(0, 2)], 1.0, 0.0);
        assert!(matches!(build_model(&bad), Err(Error::MalformedGraph(_))));
        let looped = ModelParams::ising(2, vec![Edge::new(1, 1)], 1.0, 0.0);
        assert!(matches!(build_model(&looped), Err(Error::MalformedGraph(_))));
        let dup = ModelParams::ising(3, vec![Edge::new(0, 1), Edge::new(1, 0)], 1.0, 0.0);
        assert!(matches!(build_model(&dup), Err(Error::MalformedGraph(_))));
        assert!("potts".parse::<ModelKind>().is_err());
    }

    #[test]
    fn sparse_x_and_zz() {
        let x = pauli_to_sparse(&PauliSum::new(1, vec![word(1.0, "X")]).unwrap()).unwrap();
        assert_eq!(x.sparsity(), 1);
        assert_eq!(x.row(0), &[(1, ONE)]);
        assert_eq!(x.row(1), &[(0, ONE)]);

        let zz = pauli_to_sparse(&PauliSum::new(2, vec![word(1.0, "ZZ")]).unwrap()).unwrap();
        assert_eq!(zz.sparsity(), 1);
        for r in 0..4 {
            assert_eq!(zz.row(r).len(), 1);
            assert_eq!(zz.row(r)[0].0, r);
        }
    }

    #[test]
    fn sparse_ising_matches_dense() {
        let p = ModelParams::ising(3, chain_edges(3), 1.0, 0.5);
        let sum = build_model(&p).unwrap();
        let sparse = pauli_to_sparse(&sum).unwrap();
        let dense = pauli_to_dense(&sum).unwrap();
        assert_eq!(sparse.to_dense(), dense);
        // Diagonal plus three single flips.
        assert_eq!(sparse.sparsity(), 4);
    }

    #[test]
    fn xy_cancellations_are_dropped() {
        // XX + YY only couples |01> and |10>.
        let sum = PauliSum::new(2, vec![word(1.0, "XX"), word(1.0, "YY")]).unwrap();
        let s = pauli_to_sparse(&sum).unwrap();
        assert_eq!(s.nnz(), 2);
        assert_eq!(s.get(1, 2), Some(C64::new(2.0, 0.0)));
    }

    #[test]
    fn sparse_validation_errors() {
        // Missing conjugate partner names rows 0,1.
        match SparseHamiltonian::from_entries(1, 1, [(0, 1, ONE)]) {
            Err(Error::NotHermitian { row, col, .. }) => assert_eq!((row, col), (0, 1)),
            other => panic!("unexpected {other:?}"),
        }
        let over = SparseHamiltonian::from_entries(1, 1, [(0, 0, ONE), (0, 1, ONE), (1, 0, ONE)]);
        assert!(matches!(over, Err(Error::SparsityExceeded { row: 0, found: 2, declared: 1 })));
        let dup = SparseHamiltonian::from_entries(1, 2, [(0, 0, ONE), (0, 0, ONE)]);
        assert!(matches!(dup, Err(Error::DuplicateEntry { .. })));
        let complex_diag = SparseHamiltonian::from_entries(1, 1, [(0, 0, I)]);
        assert!(matches!(complex_diag, Err(Error::NotHermitian { .. })));
        let range = SparseHamiltonian::from_entries(1, 1, [(0, 2, ONE)]);
        assert!(matches!(range, Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn max_norm_examples() {
        let zero = SparseHamiltonian::from_entries(2, 0, []).unwrap();
        assert_eq!(max_norm(&zero), 0.0);
        let x = pauli_to_sparse(&PauliSum::new(1, vec![word(1.0, "X")]).unwrap()).unwrap();
        assert_eq!(max_norm(&x), 1.0);
        let sum = PauliSum::new(2, vec![word(0.3, "XY"), word(-1.5, "ZI"), word(0.4, "IZ")]).unwrap();
        let h = pauli_to_sparse(&sum).unwrap();
        assert_eq!(max_norm(&h), pauli_to_dense(&sum).unwrap().max_abs());
    }

    #[test]
    fn grouping_splits_ising_into_two_parts() {
        let p = ModelParams::ising(3, chain_edges(3), 1.0, 0.5);
        let groups = group_by_letters(&build_model(&p).unwrap());
        assert_eq!(groups.len(), 2);
        assert!(groups[0].terms().iter().all(|t| t.word_string().contains('Z')));
        assert!(groups[1].terms().iter().all(|t| t.word_string().contains('X')));
    }
}
