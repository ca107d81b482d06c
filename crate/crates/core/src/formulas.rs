//! Trotter and Suzuki product formulas over a set of exactly exponentiable terms.
//!
//! A [`TermSequence`] is a flat list of `(term, duration)` steps; evaluating it
//! multiplies the exact single-term exponentials `exp(-i * duration * H_j)` in
//! order (the first step acts first).

use alloc::vec;
use alloc::vec::Vec;

use crate::decomposition::OneSparseTerm;
use crate::error::{Error, Result};
use crate::hamiltonians::{pauli_string_to_dense, pauli_to_dense, PauliString, PauliSum};
use crate::linalg::{
    eigendecompose_hermitian, spectral_norm, ComplexMatrix, Eigensystem, StateVector, C64, I,
    DENSE_DIM_CAP, HERMITIAN_TOL, ONE, ZERO,
};

/// A Hermitian summand that can be exponentiated exactly.
#[derive(Debug, Clone)]
pub enum Term {
    OneSparse(OneSparseTerm),
    Pauli(PauliString),
    /// Dense operator with its cached eigendecomposition.
    Dense(DenseTerm),
}

#[derive(Debug, Clone)]
pub struct DenseTerm {
    matrix: ComplexMatrix,
    eig: Eigensystem,
}

impl DenseTerm {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }
}

impl Term {
    pub fn dense(matrix: ComplexMatrix) -> Result<Self> {
        let eig = eigendecompose_hermitian(&matrix)?;
        Ok(Term::Dense(DenseTerm { matrix, eig }))
    }

    /// A group of Pauli strings treated as one term.
    pub fn pauli_group(sum: &PauliSum) -> Result<Self> {
        Self::dense(pauli_to_dense(sum)?)
    }

    pub fn dim(&self) -> usize {
        match self {
            Term::OneSparse(t) => t.dim(),
            Term::Pauli(p) => 1 << p.n_qubits(),
            Term::Dense(d) => d.matrix.dim(),
        }
    }

    pub fn to_dense(&self) -> Result<ComplexMatrix> {
        match self {
            Term::OneSparse(t) => Ok(t.to_dense()),
            Term::Pauli(p) => pauli_string_to_dense(p),
            Term::Dense(d) => Ok(d.matrix.clone()),
        }
    }

    /// Applies `exp(-i tau H_j)` to a vector in place.
    pub fn apply_exp(&self, tau: f64, amps: &mut [C64]) {
        match self {
            Term::OneSparse(t) => t.apply_exp(tau, amps),
            Term::Pauli(p) => {
                // exp(-i a P) = cos(a) I - i sin(a) P for a word with P^2 = I.
                let (s, c) = libm::sincos(p.coefficient * tau);
                let src = amps.to_vec();
                for (y, &a) in src.iter().enumerate() {
                    let (x, phase) = p.action(y);
                    amps[x] = c * src[x] - I * s * phase * a;
                }
            }
            Term::Dense(d) => d.eig.evolve_vector(tau, amps),
        }
    }

    /// Dense `exp(-i tau H_j)`.
    pub fn exp_matrix(&self, tau: f64) -> ComplexMatrix {
        match self {
            Term::Dense(d) => d.eig.evolution(tau),
            _ => {
                let n = self.dim();
                let mut out = ComplexMatrix::zeros(n);
                let mut col = vec![ZERO; n];
                for c in 0..n {
                    col.iter_mut().for_each(|z| *z = ZERO);
                    col[c] = ONE;
                    self.apply_exp(tau, &mut col);
                    for (r, z) in col.iter().enumerate() {
                        out[(r, c)] = *z;
                    }
                }
                out
            }
        }
    }
}

/// Ordered Hermitian terms `H_1, ..., H_m` sharing one register.
#[derive(Debug, Clone)]
pub struct TermSet {
    terms: Vec<Term>,
    dim: usize,
}

impl TermSet {
    pub fn new(terms: Vec<Term>) -> Result<Self> {
        let dim = terms.first().map(Term::dim).ok_or_else(|| {
            Error::InvalidParameter(alloc::string::String::from("term set is empty"))
        })?;
        for t in &terms {
            if t.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: t.dim(),
                });
            }
        }
        if dim > DENSE_DIM_CAP {
            return Err(Error::DimensionTooLarge {
                dim,
                cap: DENSE_DIM_CAP,
            });
        }
        Ok(Self { terms, dim })
    }

    pub fn from_one_sparse(terms: Vec<OneSparseTerm>) -> Result<Self> {
        Self::new(terms.into_iter().map(Term::OneSparse).collect())
    }

    /// One term per Pauli string.
    pub fn from_pauli_sum(sum: &PauliSum) -> Result<Self> {
        Self::new(sum.terms().iter().cloned().map(Term::Pauli).collect())
    }

    pub fn from_dense(terms: Vec<ComplexMatrix>) -> Result<Self> {
        Self::new(terms.into_iter().map(Term::dense).collect::<Result<_>>()?)
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `sum_j H_j` as a dense matrix.
    pub fn total_dense(&self) -> Result<ComplexMatrix> {
        let mut acc = ComplexMatrix::zeros(self.dim);
        for t in &self.terms {
            acc = &acc + &t.to_dense()?;
        }
        acc.check_hermitian(HERMITIAN_TOL)?;
        Ok(acc)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Order {
    /// First-order (Lie-Trotter) product.
    First,
    /// Suzuki order `2k`; `k = 1` is the symmetric splitting.
    Suzuki(u32),
}

impl Order {
    /// `1` for first order, `2k` for Suzuki.
    pub fn label(self) -> u32 {
        match self {
            Order::First => 1,
            Order::Suzuki(k) => 2 * k,
        }
    }

    pub fn k(self) -> u32 {
        match self {
            Order::First => 0,
            Order::Suzuki(k) => k,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Step {
    pub term: usize,
    pub duration: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TermSequence {
    pub steps: Vec<Step>,
    pub total_time: f64,
    pub slices: usize,
    pub order: Order,
}

impl TermSequence {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Signed duration assigned to each of `m` terms.
    pub fn durations_per_term(&self, m: usize) -> Vec<f64> {
        let mut acc = vec![0.0; m];
        for s in &self.steps {
            acc[s.term] += s.duration;
        }
        acc
    }

    pub fn empty(order: Order) -> Self {
        Self {
            steps: Vec::new(),
            total_time: 0.0,
            slices: 0,
            order,
        }
    }
}

fn check_slices(r: usize) -> Result<()> {
    if r == 0 {
        return Err(Error::InvalidParameter(alloc::string::String::from(
            "slice count r must be at least 1",
        )));
    }
    Ok(())
}

/// `r` repetitions of `(1, t/r), ..., (m, t/r)`.
pub fn trotter_sequence(ts: &TermSet, t: f64, r: usize) -> Result<TermSequence> {
    check_slices(r)?;
    let tau = t / r as f64;
    let m = ts.len();
    let steps = (0..r)
        .flat_map(|_| (0..m).map(move |term| Step { term, duration: tau }))
        .collect();
    Ok(TermSequence {
        steps,
        total_time: t,
        slices: r,
        order: Order::First,
    })
}

/// Suzuki's fractal coefficient `p_k = 1 / (4 - 4^{1/(2k-1)})`.
pub fn suzuki_coefficient(k: u32) -> f64 {
    1.0 / (4.0 - libm::pow(4.0, 1.0 / (2.0 * f64::from(k) - 1.0)))
}

/// Appends the symmetric second-order block for step `lambda`; the two
/// half-steps on the last term are merged.
fn push_symmetric(m: usize, lambda: f64, out: &mut Vec<Step>) {
    let half = lambda / 2.0;
    for term in 0..m.saturating_sub(1) {
        out.push(Step { term, duration: half });
    }
    out.push(Step {
        term: m - 1,
        duration: lambda,
    });
    for term in (0..m.saturating_sub(1)).rev() {
        out.push(Step { term, duration: half });
    }
}

fn push_suzuki(m: usize, k: u32, lambda: f64, out: &mut Vec<Step>) {
    if k == 1 {
        push_symmetric(m, lambda, out);
        return;
    }
    let p = suzuki_coefficient(k);
    push_suzuki(m, k - 1, p * lambda, out);
    push_suzuki(m, k - 1, p * lambda, out);
    push_suzuki(m, k - 1, (1.0 - 4.0 * p) * lambda, out);
    push_suzuki(m, k - 1, p * lambda, out);
    push_suzuki(m, k - 1, p * lambda, out);
}

/// Order-`2k` Suzuki product with `r` slices of `t/r`.
pub fn suzuki_sequence(ts: &TermSet, t: f64, r: usize, k: u32) -> Result<TermSequence> {
    check_slices(r)?;
    if k == 0 {
        return Err(Error::InvalidParameter(alloc::string::String::from(
            "Suzuki order parameter k must be at least 1",
        )));
    }
    let m = ts.len();
    let per_slice = 5usize.pow(k - 1) * (2 * m - 1);
    let mut steps = Vec::with_capacity(per_slice * r);
    let tau = t / r as f64;
    for _ in 0..r {
        push_suzuki(m, k, tau, &mut steps);
    }
    Ok(TermSequence {
        steps,
        total_time: t,
        slices: r,
        order: Order::Suzuki(k),
    })
}

/// Sequence for `order`, dispatching to Trotter or Suzuki.
pub fn sequence(ts: &TermSet, order: Order, t: f64, r: usize) -> Result<TermSequence> {
    match order {
        Order::First => trotter_sequence(ts, t, r),
        Order::Suzuki(k) => suzuki_sequence(ts, t, r, k),
    }
}

fn check_sequence(ts: &TermSet, seq: &TermSequence) -> Result<()> {
    if let Some(s) = seq.steps.iter().find(|s| s.term >= ts.len()) {
        return Err(Error::IndexOutOfRange {
            index: s.term,
            dim: ts.len(),
        });
    }
    Ok(())
}

/// Ordered product of the exact step exponentials.
pub fn evaluate_unitary(ts: &TermSet, seq: &TermSequence) -> Result<ComplexMatrix> {
    check_sequence(ts, seq)?;
    let n = ts.dim();
    // Columns evolve independently; keep them contiguous.
    let mut cols: Vec<Vec<C64>> = (0..n)
        .map(|c| {
            let mut v = vec![ZERO; n];
            v[c] = ONE;
            v
        })
        .collect();
    for step in &seq.steps {
        let term = &ts.terms[step.term];
        for col in cols.iter_mut() {
            term.apply_exp(step.duration, col);
        }
    }
    Ok(ComplexMatrix::from_fn(n, |r, c| cols[c][r]))
}

/// Evolves a state through the sequence without forming the product.
pub fn evaluate_state(ts: &TermSet, seq: &TermSequence, psi0: &StateVector) -> Result<StateVector> {
    check_sequence(ts, seq)?;
    if psi0.dim() != ts.dim() {
        return Err(Error::DimensionMismatch {
            expected: ts.dim(),
            found: psi0.dim(),
        });
    }
    let mut amps = psi0.amplitudes().to_vec();
    for step in &seq.steps {
        ts.terms[step.term].apply_exp(step.duration, &mut amps);
    }
    Ok(StateVector::from_raw(amps))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorEstimate {
    /// `|| sum_{j > j'} [H_j, H_j'] ||`.
    pub commutator_norm: f64,
    /// `commutator_norm * t^2 / (2 r)`.
    pub leading_bound: f64,
}

/// Leading first-order error term from the pairwise commutators.
pub fn commutator_error(ts: &TermSet, t: f64, r: usize) -> Result<ErrorEstimate> {
    check_slices(r)?;
    let dense: Vec<ComplexMatrix> = ts.terms.iter().map(Term::to_dense).collect::<Result<_>>()?;
    let mut acc = ComplexMatrix::zeros(ts.dim());
    for j in 0..dense.len() {
        for jp in 0..j {
            acc = &acc + &dense[j].commutator(&dense[jp]);
        }
    }
    let commutator_norm = spectral_norm(&acc)?;
    Ok(ErrorEstimate {
        commutator_norm,
        leading_bound: commutator_norm * t * t / (2.0 * r as f64),
    })
}
