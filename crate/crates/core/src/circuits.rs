//! Gate-level circuits and a state-vector executor.
//!
//! A circuit acts on `n_system` system qubits followed by `n_ancilla`
//! ancillas. Qubit `q` of the joint register is bit `total - 1 - q` of the
//! basis index, so ancillas occupy the low bits and the joint index is
//! `system_index * 2^n_ancilla + ancilla_index`. Ancillas start in `|0>` and
//! every synthesized circuit must return them there.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_1_SQRT_2;

use crate::decomposition::{pair_rotation, OneSparseTerm};
use crate::error::{Error, Result};
use crate::formulas::{Term, TermSequence, TermSet};
use crate::hamiltonians::{Pauli, PauliString};
use crate::linalg::{cis, log2_exact, ComplexMatrix, StateVector, C64, I, MAX_QUBITS, ZERO};

/// Largest ancilla width of a diagonal table.
pub const MAX_TABLE_BITS: u32 = 16;

/// Leaked ancilla population tolerated by the executor.
pub const LEAKAGE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    Hadamard(usize),
    S(usize),
    Sdg(usize),
    /// `diag(e^{-i angle/2}, e^{i angle/2})`.
    Rz { qubit: usize, angle: f64 },
    /// `diag(1, e^{i angle})`.
    Phase { qubit: usize, angle: f64 },
    /// `e^{i angle}` on the whole register.
    GlobalPhase(f64),
    Cnot { control: usize, target: usize },
    /// Multiplies by `e^{i angle}` when every listed qubit holds its listed value.
    McPhase { controls: Vec<(usize, bool)>, angle: f64 },
    /// `|a, z> -> |a, z xor table[a]>`. Both registers are listed most significant qubit first.
    Oracle {
        inputs: Vec<usize>,
        outputs: Vec<usize>,
        table: Vec<u64>,
    },
    /// `exp(-i time W)` on the two basis states `x`, `y` of `qubits`, where
    /// `W = weight |x><y| + conj(weight) |y><x|`.
    PairRotation {
        qubits: Vec<usize>,
        x: usize,
        y: usize,
        weight: C64,
        time: f64,
    },
}

impl Gate {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Gate::Hadamard(_) => "H",
            Gate::S(_) => "S",
            Gate::Sdg(_) => "SDG",
            Gate::Rz { .. } => "RZ",
            Gate::Phase { .. } => "P",
            Gate::GlobalPhase(_) => "GPHASE",
            Gate::Cnot { .. } => "CX",
            Gate::McPhase { .. } => "MCP",
            Gate::Oracle { .. } => "ORACLE",
            Gate::PairRotation { .. } => "PAIR",
        }
    }

    /// Qubits the gate touches, in the order they are listed.
    pub fn targets(&self) -> Vec<usize> {
        match self {
            Gate::Hadamard(q) | Gate::S(q) | Gate::Sdg(q) => vec![*q],
            Gate::Rz { qubit, .. } | Gate::Phase { qubit, .. } => vec![*qubit],
            Gate::GlobalPhase(_) => Vec::new(),
            Gate::Cnot { control, target } => vec![*control, *target],
            Gate::McPhase { controls, .. } => controls.iter().map(|c| c.0).collect(),
            Gate::Oracle { inputs, outputs, .. } => inputs.iter().chain(outputs).copied().collect(),
            Gate::PairRotation { qubits, .. } => qubits.clone(),
        }
    }

    /// Real parameters of the gate (tables are not included).
    pub fn params(&self) -> Vec<f64> {
        match self {
            Gate::Hadamard(_) | Gate::S(_) | Gate::Sdg(_) | Gate::Cnot { .. } => Vec::new(),
            Gate::Rz { angle, .. } | Gate::Phase { angle, .. } => vec![*angle],
            Gate::GlobalPhase(angle) => vec![*angle],
            Gate::McPhase { controls, angle } => core::iter::once(*angle)
                .chain(controls.iter().map(|c| if c.1 { 1.0 } else { 0.0 }))
                .collect(),
            Gate::Oracle { inputs, outputs, .. } => vec![inputs.len() as f64, outputs.len() as f64],
            Gate::PairRotation {
                x,
                y,
                weight,
                time,
                ..
            } => vec![*x as f64, *y as f64, weight.re, weight.im, *time],
        }
    }

    fn validate(&self, total: usize) -> Result<()> {
        let targets = self.targets();
        for (k, &q) in targets.iter().enumerate() {
            if q >= total {
                return Err(Error::IndexOutOfRange { index: q, dim: total });
            }
            if targets[..k].contains(&q) {
                return Err(Error::InvalidParameter(format!(
                    "{} gate lists qubit {q} twice",
                    self.kind_name()
                )));
            }
        }
        match self {
            Gate::Oracle {
                inputs,
                outputs,
                table,
            } => {
                if table.len() != 1 << inputs.len() {
                    return Err(Error::DimensionMismatch {
                        expected: 1 << inputs.len(),
                        found: table.len(),
                    });
                }
                let bits = outputs.len() as u32;
                for (index, &value) in table.iter().enumerate() {
                    if bits < 64 && value >> bits != 0 {
                        return Err(Error::TableOverflow { index, value, bits });
                    }
                }
            }
            Gate::PairRotation { qubits, x, y, .. } => {
                let dim = 1usize << qubits.len();
                for idx in [*x, *y] {
                    if idx >= dim {
                        return Err(Error::IndexOutOfRange { index: idx, dim });
                    }
                }
                if x == y {
                    return Err(Error::NotOneSparse(*x));
                }
            }
            _ => {}
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    n_system: usize,
    n_ancilla: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_system: usize, n_ancilla: usize) -> Self {
        Self {
            n_system,
            n_ancilla,
            gates: Vec::new(),
        }
    }

    pub fn n_system(&self) -> usize {
        self.n_system
    }

    pub fn n_ancilla(&self) -> usize {
        self.n_ancilla
    }

    pub fn total_qubits(&self) -> usize {
        self.n_system + self.n_ancilla
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.validate(self.total_qubits())?;
        self.gates.push(gate);
        Ok(())
    }

    fn system_qubits(&self) -> Vec<usize> {
        (0..self.n_system).collect()
    }

    /// Appends `exp(-i theta P)` for a word over the system register.
    pub fn append_pauli_exponential(&mut self, p: &PauliString, theta: f64) -> Result<()> {
        if p.n_qubits() != self.n_system {
            return Err(Error::DimensionMismatch {
                expected: self.n_system,
                found: p.n_qubits(),
            });
        }
        let support: Vec<(usize, Pauli)> = p.support().collect();
        let Some(&(target, _)) = support.last() else {
            return self.push(Gate::GlobalPhase(-theta));
        };
        for &(q, letter) in &support {
            match letter {
                Pauli::X => self.push(Gate::Hadamard(q))?,
                Pauli::Y => {
                    self.push(Gate::Sdg(q))?;
                    self.push(Gate::Hadamard(q))?;
                }
                _ => {}
            }
        }
        let ladder: Vec<usize> = support.iter().map(|s| s.0).filter(|&q| q != target).collect();
        for &q in &ladder {
            self.push(Gate::Cnot { control: q, target })?;
        }
        self.push(Gate::Rz {
            qubit: target,
            angle: 2.0 * theta,
        })?;
        for &q in ladder.iter().rev() {
            self.push(Gate::Cnot { control: q, target })?;
        }
        for &(q, letter) in &support {
            match letter {
                Pauli::X => self.push(Gate::Hadamard(q))?,
                Pauli::Y => {
                    self.push(Gate::Hadamard(q))?;
                    self.push(Gate::S(q))?;
                }
                _ => {}
            }
        }
        Ok(())
    }

    /// Appends `exp(-i t T)` for a one-sparse term on the system register.
    pub fn append_one_sparse(&mut self, term: &OneSparseTerm, t: f64) -> Result<()> {
        if term.n_qubits() != self.n_system {
            return Err(Error::DimensionMismatch {
                expected: self.n_system,
                found: term.n_qubits(),
            });
        }
        let n = self.n_system;
        for &(x, v) in term.fixed_points() {
            let controls = (0..n).map(|q| (q, (x >> (n - 1 - q)) & 1 == 1)).collect();
            self.push(Gate::McPhase {
                controls,
                angle: -t * v,
            })?;
        }
        for &(x, y, weight) in term.pairs() {
            self.push(Gate::PairRotation {
                qubits: self.system_qubits(),
                x,
                y,
                weight,
                time: t,
            })?;
        }
        Ok(())
    }
}

/// Integer diagonal `d(a)` with `energy(a) = offset + scale * d(a)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalTable {
    n_qubits: usize,
    bits: u32,
    values: Vec<u64>,
    pub scale: f64,
    pub offset: f64,
}

impl DiagonalTable {
    pub fn new(bits: u32, values: Vec<u64>, scale: f64) -> Result<Self> {
        if bits == 0 || bits > MAX_TABLE_BITS {
            return Err(Error::InvalidParameter(format!(
                "table width {bits} outside 1..={MAX_TABLE_BITS}"
            )));
        }
        let n_qubits = log2_exact(values.len())?;
        if n_qubits > MAX_QUBITS {
            return Err(Error::RegisterTooLarge {
                qubits: n_qubits,
                cap: MAX_QUBITS,
            });
        }
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, &v)| v >> bits != 0) {
            return Err(Error::TableOverflow { index, value, bits });
        }
        Ok(Self {
            n_qubits,
            bits,
            values,
            scale,
            offset: 0.0,
        })
    }

    /// Quantizes real energies onto `bits`-bit integers spanning `[min, max]`.
    /// Returns the table and the largest rounding error in energy units.
    pub fn from_energies(energies: &[f64], bits: u32) -> Result<(Self, f64)> {
        let lo = energies.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = energies.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidParameter(String::from("energies must be finite")));
        }
        let levels = ((1u64 << bits) - 1) as f64;
        let scale = if hi > lo { (hi - lo) / levels } else { 1.0 };
        let values: Vec<u64> = energies
            .iter()
            .map(|e| libm::round((e - lo) / scale) as u64)
            .collect();
        let mut table = Self::new(bits, values, scale)?;
        table.offset = lo;
        let err = energies
            .iter()
            .enumerate()
            .map(|(a, e)| (table.energy(a) - e).abs())
            .fold(0.0, f64::max);
        Ok((table, err))
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn energy(&self, a: usize) -> f64 {
        self.offset + self.scale * self.values[a] as f64
    }
}

/// Load `d(a)` into ancillas, phase each ancilla bit, then unload.
pub fn diagonal_circuit(table: &DiagonalTable, t: f64) -> Result<Circuit> {
    let n = table.n_qubits;
    let k = table.bits as usize;
    let mut c = Circuit::new(n, k);
    let inputs: Vec<usize> = (0..n).collect();
    let outputs: Vec<usize> = (n..n + k).collect();
    let oracle = Gate::Oracle {
        inputs,
        outputs: outputs.clone(),
        table: table.values.clone(),
    };
    c.push(oracle.clone())?;
    for (i, &q) in outputs.iter().enumerate() {
        let weight = libm::ldexp(1.0, (k - 1 - i) as i32);
        c.push(Gate::Phase {
            qubit: q,
            angle: -t * table.scale * weight,
        })?;
    }
    c.push(oracle)?;
    if table.offset != 0.0 {
        c.push(Gate::GlobalPhase(-t * table.offset))?;
    }
    Ok(c)
}

/// `exp(-i t T)` as fixed-point phases and two-level pair rotations.
pub fn one_sparse_circuit(term: &OneSparseTerm, t: f64) -> Result<Circuit> {
    let mut c = Circuit::new(term.n_qubits(), 0);
    c.append_one_sparse(term, t)?;
    Ok(c)
}

/// `exp(-i theta P)` for the word of `p`; the coefficient of `p` is ignored.
pub fn pauli_exponential_circuit(p: &PauliString, theta: f64) -> Result<Circuit> {
    if p.n_qubits() == 0 {
        return Err(Error::InvalidParameter(String::from("empty Pauli word")));
    }
    let mut c = Circuit::new(p.n_qubits(), 0);
    c.append_pauli_exponential(p, theta)?;
    Ok(c)
}

/// Gate-level circuit for a whole product-formula sequence.
pub fn compile_sequence(ts: &TermSet, seq: &TermSequence) -> Result<Circuit> {
    let n = log2_exact(ts.dim())?;
    let mut c = Circuit::new(n, 0);
    for step in &seq.steps {
        match ts.terms().get(step.term) {
            Some(Term::OneSparse(t)) => c.append_one_sparse(t, step.duration)?,
            Some(Term::Pauli(p)) => c.append_pauli_exponential(p, p.coefficient * step.duration)?,
            Some(Term::Dense(_)) => {
                return Err(Error::Unsupported(String::from(
                    "dense terms have no gate-level synthesis",
                )))
            }
            None => {
                return Err(Error::IndexOutOfRange {
                    index: step.term,
                    dim: ts.len(),
                })
            }
        }
    }
    Ok(c)
}

#[inline]
fn bit_of(total: usize, q: usize) -> usize {
    1 << (total - 1 - q)
}

/// Reads the listed qubits of `idx` as an integer, first qubit most significant.
#[inline]
fn gather(idx: usize, masks: &[usize]) -> usize {
    masks
        .iter()
        .fold(0, |acc, &m| (acc << 1) | usize::from(idx & m != 0))
}

/// Overwrites the listed qubits of `idx` with `value`.
#[inline]
fn scatter(idx: usize, masks: &[usize], value: usize) -> usize {
    let len = masks.len();
    masks.iter().enumerate().fold(idx, |acc, (k, &m)| {
        if (value >> (len - 1 - k)) & 1 == 1 {
            acc | m
        } else {
            acc & !m
        }
    })
}

fn apply_single(amps: &mut [C64], mask: usize, u: [C64; 4]) {
    for i0 in 0..amps.len() {
        if i0 & mask != 0 {
            continue;
        }
        let i1 = i0 | mask;
        let (a, b) = (amps[i0], amps[i1]);
        amps[i0] = u[0] * a + u[1] * b;
        amps[i1] = u[2] * a + u[3] * b;
    }
}

fn apply_gate(amps: &mut [C64], total: usize, gate: &Gate) {
    let h = C64::new(FRAC_1_SQRT_2, 0.0);
    match gate {
        Gate::Hadamard(q) => apply_single(amps, bit_of(total, *q), [h, h, h, -h]),
        Gate::S(q) => {
            let m = bit_of(total, *q);
            amps.iter_mut().enumerate().filter(|(i, _)| i & m != 0).for_each(|(_, a)| *a *= I);
        }
        Gate::Sdg(q) => {
            let m = bit_of(total, *q);
            amps.iter_mut().enumerate().filter(|(i, _)| i & m != 0).for_each(|(_, a)| *a *= -I);
        }
        Gate::Rz { qubit, angle } => {
            let m = bit_of(total, *qubit);
            let (p0, p1) = (cis(-angle / 2.0), cis(angle / 2.0));
            for (i, a) in amps.iter_mut().enumerate() {
                *a *= if i & m == 0 { p0 } else { p1 };
            }
        }
        Gate::Phase { qubit, angle } => {
            let m = bit_of(total, *qubit);
            let p = cis(*angle);
            amps.iter_mut().enumerate().filter(|(i, _)| i & m != 0).for_each(|(_, a)| *a *= p);
        }
        Gate::GlobalPhase(angle) => {
            let p = cis(*angle);
            amps.iter_mut().for_each(|a| *a *= p);
        }
        Gate::Cnot { control, target } => {
            let (cm, tm) = (bit_of(total, *control), bit_of(total, *target));
            for i in 0..amps.len() {
                if i & cm != 0 && i & tm == 0 {
                    amps.swap(i, i | tm);
                }
            }
        }
        Gate::McPhase { controls, angle } => {
            let p = cis(*angle);
            let (mut care, mut want) = (0usize, 0usize);
            for &(q, v) in controls {
                care |= bit_of(total, q);
                if v {
                    want |= bit_of(total, q);
                }
            }
            for (i, a) in amps.iter_mut().enumerate() {
                if i & care == want {
                    *a *= p;
                }
            }
        }
        Gate::Oracle {
            inputs,
            outputs,
            table,
        } => {
            let in_masks: Vec<usize> = inputs.iter().map(|&q| bit_of(total, q)).collect();
            let out_masks: Vec<usize> = outputs.iter().map(|&q| bit_of(total, q)).collect();
            let src = amps.to_vec();
            for (i, &a) in src.iter().enumerate() {
                let f = table[gather(i, &in_masks)] as usize;
                let z = gather(i, &out_masks);
                amps[scatter(i, &out_masks, z ^ f)] = a;
            }
        }
        Gate::PairRotation {
            qubits,
            x,
            y,
            weight,
            time,
        } => {
            let masks: Vec<usize> = qubits.iter().map(|&q| bit_of(total, q)).collect();
            let (c, upper, lower) = pair_rotation(*weight, *time);
            for i in 0..amps.len() {
                if gather(i, &masks) != *x {
                    continue;
                }
                let j = scatter(i, &masks, *y);
                let (ax, ay) = (amps[i], amps[j]);
                amps[i] = c * ax + upper * ay;
                amps[j] = lower * ax + c * ay;
            }
        }
    }
}

/// Runs the circuit on a joint-register amplitude vector in place.
pub fn run_joint(c: &Circuit, amps: &mut [C64]) -> Result<()> {
    let total = c.total_qubits();
    if amps.len() != 1 << total {
        return Err(Error::DimensionMismatch {
            expected: 1 << total,
            found: amps.len(),
        });
    }
    for g in &c.gates {
        apply_gate(amps, total, g);
    }
    Ok(())
}

fn check_total(c: &Circuit) -> Result<()> {
    if c.total_qubits() > MAX_QUBITS {
        return Err(Error::RegisterTooLarge {
            qubits: c.total_qubits(),
            cap: MAX_QUBITS,
        });
    }
    Ok(())
}

/// Population left outside the ancilla-`|0>` subspace.
fn leaked_population(amps: &[C64], n_ancilla: usize) -> f64 {
    let mask = (1usize << n_ancilla) - 1;
    amps.iter()
        .enumerate()
        .filter(|(i, _)| i & mask != 0)
        .map(|(_, a)| a.norm_sqr())
        .fold(0.0, |acc, p| acc + p)
}

/// Runs on `psi0 ⊗ |0...0>`, checks the ancillas come back to `|0>`, and returns
/// the system state.
pub fn run_circuit(c: &Circuit, psi0: &StateVector) -> Result<StateVector> {
    check_total(c)?;
    if psi0.n_qubits() != c.n_system {
        return Err(Error::DimensionMismatch {
            expected: c.n_system,
            found: psi0.n_qubits(),
        });
    }
    let na = c.n_ancilla;
    let mut joint = vec![ZERO; 1 << c.total_qubits()];
    for (s, &a) in psi0.amplitudes().iter().enumerate() {
        joint[s << na] = a;
    }
    run_joint(c, &mut joint)?;
    let leaked = leaked_population(&joint, na);
    if leaked > LEAKAGE_TOL {
        return Err(Error::AncillaLeakage { leaked });
    }
    let out: Vec<C64> = (0..psi0.dim()).map(|s| joint[s << na]).collect();
    Ok(StateVector::from_raw(out))
}

/// Unitary on the system register, read off the ancilla-`|0>` block after
/// checking that no amplitude leaks out of it.
pub fn circuit_unitary(c: &Circuit) -> Result<ComplexMatrix> {
    check_total(c)?;
    let ns = 1usize << c.n_system;
    let na = c.n_ancilla;
    let mut u = ComplexMatrix::zeros(ns);
    let mut joint = vec![ZERO; 1 << c.total_qubits()];
    for s in 0..ns {
        joint.iter_mut().for_each(|z| *z = ZERO);
        joint[s << na] = C64::new(1.0, 0.0);
        run_joint(c, &mut joint)?;
        let leaked = leaked_population(&joint, na);
        if leaked > LEAKAGE_TOL {
            return Err(Error::AncillaLeakage { leaked });
        }
        for r in 0..ns {
            u[(r, s)] = joint[r << na];
        }
    }
    Ok(u)
}

/// For every computational-basis system input, the exact ancilla population
/// outside `|0>` at the end of the circuit; the largest is returned.
pub fn uncompute_residual(c: &Circuit) -> Result<f64> {
    check_total(c)?;
    let na = c.n_ancilla;
    let mut worst: f64 = 0.0;
    let mut joint = vec![ZERO; 1 << c.total_qubits()];
    for s in 0..(1usize << c.n_system) {
        joint.iter_mut().for_each(|z| *z = ZERO);
        joint[s << na] = C64::new(1.0, 0.0);
        run_joint(c, &mut joint)?;
        worst = worst.max(leaked_population(&joint, na));
    }
    Ok(worst)
}
