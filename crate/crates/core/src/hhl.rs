//! Simulated quantum linear-system solver.
//!
//! Pipeline: prepare `|b>`, phase-estimate `exp(-i A' t0)` into an `m`-bit
//! register, rotate a flag qubit by `C / lambda`, undo the phase estimation and
//! postselect on flag `|1>` with the register back at `|0>`. `A' = A + shift I`
//! keeps the encoded spectrum inside `[0, 2 pi / t0)`; the shift is removed
//! again when a register value is decoded.
//!
//! Register layouts (system most significant):
//! * after phase estimation: `index = s * 2^m + l`,
//! * after inversion: `index = (s * 2^m + l) * 2 + flag`.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::linalg::{
    cis, eigendecompose_hermitian, expectation, log2_exact, norm_sqr, ComplexMatrix, Eigensystem,
    StateVector, C64, HERMITIAN_TOL, ONE, UNITARY_TOL, ZERO,
};

/// Widest phase register accepted.
pub const MAX_PHASE_BITS: usize = 16;

/// Cap on the qubits of the largest joint state (system + register + flag).
pub const MAX_JOINT_QUBITS: usize = 24;

/// Postselection probabilities below this are rejected.
pub const MIN_SUCCESS_PROBABILITY: f64 = 1e-12;

/// Register population below which a zero decode is ignored.
const SINGULAR_POPULATION_TOL: f64 = 1e-12;

/// Fraction of the phase circle the shifted spectrum may occupy.
const SPECTRUM_FILL: f64 = 0.875;

/// Default inversion constant relative to the smallest decodable |eigenvalue|.
const C_FRACTION: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HhlParams {
    pub m_bits: usize,
    pub t0: f64,
    pub c: f64,
    /// Added to `A` before phase estimation and removed when decoding.
    pub shift: f64,
}

impl HhlParams {
    pub fn register_size(&self) -> usize {
        1 << self.m_bits
    }

    /// Eigenvalue of `A` that register value `l` stands for.
    pub fn decode(&self, l: usize) -> f64 {
        l as f64 * TAU / (self.t0 * self.register_size() as f64) - self.shift
    }

    /// Smallest non-zero `|decode(l)|` over all register values.
    pub fn smallest_decodable(&self) -> f64 {
        (0..self.register_size())
            .map(|l| self.decode(l).abs())
            .filter(|&v| v > 0.0)
            .fold(f64::INFINITY, f64::min)
    }

    fn validate(&self) -> Result<()> {
        if self.m_bits == 0 || self.m_bits > MAX_PHASE_BITS {
            return Err(Error::InvalidParameter(alloc::format!(
                "m_bits = {} outside 1..={MAX_PHASE_BITS}",
                self.m_bits
            )));
        }
        if !(self.t0.is_finite() && self.t0 > 0.0) {
            return Err(Error::InvalidParameter(alloc::format!("t0 = {} must be positive", self.t0)));
        }
        if !(self.c.is_finite() && self.c > 0.0) {
            return Err(Error::InvalidParameter(alloc::format!("C = {} must be positive", self.c)));
        }
        if !self.shift.is_finite() {
            return Err(Error::InvalidParameter(String::from("shift must be finite")));
        }
        Ok(())
    }

    /// Parameters chosen from the spectrum of `A`.
    ///
    /// Positive-definite `A` is shifted down by `lambda_min / 2` so that
    /// register 0 stands for `lambda_min / 2`. Otherwise the shift places the
    /// zero eigenvalue half-way between two grid points, so no register value
    /// decodes to zero. `t0` fills 7/8 of the phase circle and `C` is 0.9 of the
    /// smallest decodable magnitude.
    pub fn auto(eigenvalues: &[f64], m_bits: usize) -> Result<Self> {
        if !(2..=MAX_PHASE_BITS).contains(&m_bits) {
            return Err(Error::InvalidParameter(alloc::format!(
                "automatic parameters need m_bits in 2..={MAX_PHASE_BITS}, got {m_bits}"
            )));
        }
        let lo = eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidParameter(String::from("empty or non-finite spectrum")));
        }
        let size = (1usize << m_bits) as f64;
        let (t0, shift) = if lo > 0.0 {
            let shift = -lo / 2.0;
            (SPECTRUM_FILL * TAU / (hi + shift), shift)
        } else {
            let span = (hi - lo).max(f64::MIN_POSITIVE);
            // Leaves room for up to two extra grid steps of shift.
            let t0 = (SPECTRUM_FILL * TAU - 2.0 * TAU / size) / span;
            let step = TAU / (t0 * size);
            let shift = (libm::ceil(-lo / step - 0.5) + 0.5) * step;
            (t0, shift)
        };
        let mut params = Self {
            m_bits,
            t0,
            c: 1.0,
            shift,
        };
        params.c = C_FRACTION * params.smallest_decodable();
        Ok(params)
    }
}

#[derive(Debug, Clone)]
pub struct LinearSystemProblem {
    a: ComplexMatrix,
    b: Vec<C64>,
    observable: ComplexMatrix,
    pub params: HhlParams,
}

impl LinearSystemProblem {
    /// Checks shapes and Hermiticity. A dimension that is not a power of two is
    /// padded: `A` with an identity block, `b` with zeros and `M` with zeros.
    pub fn new(
        a: ComplexMatrix,
        b: Vec<C64>,
        observable: ComplexMatrix,
        params: HhlParams,
    ) -> Result<Self> {
        params.validate()?;
        a.check_hermitian(HERMITIAN_TOL)?;
        observable.check_hermitian(HERMITIAN_TOL)?;
        let n = a.dim();
        for found in [b.len(), observable.dim()] {
            if found != n {
                return Err(Error::DimensionMismatch { expected: n, found });
            }
        }
        if norm_sqr(&b) == 0.0 {
            return Err(Error::ZeroVector);
        }
        let padded = n.next_power_of_two().max(2);
        let (a, observable, b) = if padded != n {
            let pad = |m: &ComplexMatrix, fill: C64| {
                ComplexMatrix::from_fn(padded, |r, c| {
                    if r < n && c < n {
                        m[(r, c)]
                    } else if r == c {
                        fill
                    } else {
                        ZERO
                    }
                })
            };
            let mut b = b;
            b.resize(padded, ZERO);
            (pad(&a, ONE), pad(&observable, ZERO), b)
        } else {
            (a, observable, b)
        };
        let qubits = log2_exact(padded)? + params.m_bits + 1;
        if qubits > MAX_JOINT_QUBITS {
            return Err(Error::RegisterTooLarge {
                qubits,
                cap: MAX_JOINT_QUBITS,
            });
        }
        Ok(Self {
            a,
            b,
            observable,
            params,
        })
    }

    /// Same as [`new`](Self::new) with [`HhlParams::auto`] parameters.
    pub fn with_auto_params(
        a: ComplexMatrix,
        b: Vec<C64>,
        observable: ComplexMatrix,
        m_bits: usize,
    ) -> Result<Self> {
        let placeholder = HhlParams {
            m_bits,
            t0: 1.0,
            c: 1.0,
            shift: 0.0,
        };
        // Padding adds eigenvalue 1, so the spectrum is read after padding.
        let mut p = Self::new(a, b, observable, placeholder)?;
        let eig = eigendecompose_hermitian(&p.a)?;
        p.params = HhlParams::auto(&eig.eigenvalues, m_bits)?;
        Ok(p)
    }

    pub fn a(&self) -> &ComplexMatrix {
        &self.a
    }

    pub fn b(&self) -> &[C64] {
        &self.b
    }

    pub fn observable(&self) -> &ComplexMatrix {
        &self.observable
    }
}

/// `|b> = b / |b|`, zero-padded to a power of two. Returns the state and the
/// number of padding entries.
pub fn prepare_b(b: &[C64]) -> Result<(StateVector, usize)> {
    let padded = b.len().next_power_of_two().max(1);
    let mut amps = b.to_vec();
    amps.resize(padded, ZERO);
    let state = StateVector::from_unnormalized(amps)?;
    Ok((state, padded - b.len()))
}

/// Where `exp(-i A t0)` comes from inside phase estimation.
#[derive(Debug, Clone, Copy)]
pub enum Evolution<'a> {
    /// Exact exponential from the eigendecomposition of `A`.
    Exact,
    /// A caller-supplied approximation of `exp(-i A t0)` (unshifted), for
    /// example an evaluated product formula.
    Approximate(&'a ComplexMatrix),
}

/// `U^(2^j)` for every register bit `j`, where `U = exp(-i (A + shift) t0)`.
struct ControlledPowers {
    powers: Vec<ComplexMatrix>,
    inverses: Vec<ComplexMatrix>,
}

impl ControlledPowers {
    fn new(eig: &Eigensystem, evolution: Evolution<'_>, params: &HhlParams) -> Result<Self> {
        let mut powers = Vec::with_capacity(params.m_bits);
        match evolution {
            Evolution::Exact => {
                for j in 0..params.m_bits {
                    let t = params.t0 * (1u64 << j) as f64;
                    powers.push(eig.apply_function(|l| cis(-(l + params.shift) * t)));
                }
            }
            Evolution::Approximate(u) => {
                if u.dim() != eig.dim() {
                    return Err(Error::DimensionMismatch {
                        expected: eig.dim(),
                        found: u.dim(),
                    });
                }
                let deviation = u.unitarity_deviation();
                if deviation > UNITARY_TOL || deviation.is_nan() {
                    return Err(Error::NotUnitary { deviation });
                }
                let mut p = u.scale(cis(-params.shift * params.t0));
                for _ in 0..params.m_bits {
                    let next = &p * &p;
                    powers.push(p);
                    p = next;
                }
            }
        }
        let inverses = powers.iter().map(ComplexMatrix::adjoint).collect();
        Ok(Self { powers, inverses })
    }

    /// Applies the controlled powers to a state laid out as
    /// `[(s * M + k) * stride + inner]`.
    fn apply(&self, amps: &mut [C64], dim: usize, m_bits: usize, stride: usize, inverse: bool) {
        let size = 1usize << m_bits;
        let mut v = vec![ZERO; dim];
        let bits: Vec<usize> = if inverse {
            (0..m_bits).rev().collect()
        } else {
            (0..m_bits).collect()
        };
        for j in bits {
            let u = if inverse {
                &self.inverses[j]
            } else {
                &self.powers[j]
            };
            for k in (0..size).filter(|k| k & (1 << j) != 0) {
                for inner in 0..stride {
                    for (s, x) in v.iter_mut().enumerate() {
                        *x = amps[(s * size + k) * stride + inner];
                    }
                    let w = u.matvec(&v);
                    for (s, x) in w.into_iter().enumerate() {
                        amps[(s * size + k) * stride + inner] = x;
                    }
                }
            }
        }
    }
}

/// `out[l] = M^(-1/2) sum_k exp(+-2 pi i l k / M) in[k]` on the register of every
/// `(system, inner)` slice.
fn register_dft(amps: &mut [C64], m_bits: usize, stride: usize, inverse: bool) {
    let size = 1usize << m_bits;
    let sign = if inverse { -1.0 } else { 1.0 };
    let twiddle: Vec<C64> = (0..size)
        .map(|r| cis(sign * TAU * r as f64 / size as f64))
        .collect();
    let norm = 1.0 / libm::sqrt(size as f64);
    let block = size * stride;
    let mut input = vec![ZERO; size];
    for chunk in amps.chunks_mut(block) {
        for inner in 0..stride {
            for (k, x) in input.iter_mut().enumerate() {
                *x = chunk[k * stride + inner];
            }
            for l in 0..size {
                let mut acc = ZERO;
                for (k, x) in input.iter().enumerate() {
                    acc += twiddle[(l * k) % size] * x;
                }
                chunk[l * stride + inner] = acc * norm;
            }
        }
    }
}

fn check_phases(eigenvalues: &[f64], params: &HhlParams) -> Result<()> {
    for &l in eigenvalues {
        let phase = (l + params.shift) * params.t0 / TAU;
        // Round-off below zero wraps harmlessly onto the grid point 0.
        if !(-1e-12..1.0).contains(&phase) {
            return Err(Error::EigenphaseOutOfRange {
                eigenvalue: l,
                phase,
            });
        }
    }
    Ok(())
}

/// Phase estimation of `exp(-i (A + shift) t0)` on `psi` with an `m_bits` register.
pub fn phase_estimation(
    a: &ComplexMatrix,
    psi: &StateVector,
    params: &HhlParams,
    evolution: Evolution<'_>,
) -> Result<StateVector> {
    params.validate()?;
    if a.dim() != psi.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: psi.dim(),
        });
    }
    let eig = eigendecompose_hermitian(a)?;
    check_phases(&eig.eigenvalues, params)?;
    let powers = ControlledPowers::new(&eig, evolution, params)?;
    let size = params.register_size();
    let dim = psi.dim();
    // Hadamards on the register turn |0> into the uniform superposition.
    let amp0 = 1.0 / libm::sqrt(size as f64);
    let mut joint = vec![ZERO; dim * size];
    for (s, &x) in psi.amplitudes().iter().enumerate() {
        for k in 0..size {
            joint[s * size + k] = x * amp0;
        }
    }
    powers.apply(&mut joint, dim, params.m_bits, 1, false);
    register_dft(&mut joint, params.m_bits, 1, false);
    Ok(StateVector::from_raw(joint))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Inversion {
    pub joint: StateVector,
    /// Population on register values with `|C / lambda| > 1`, rotated fully.
    pub clamped_population: f64,
}

/// Adds a flag qubit holding `C / lambda` on `|1>` and `sqrt(1 - (C/lambda)^2)` on `|0>`.
pub fn invert_eigenvalues(joint: &StateVector, params: &HhlParams) -> Result<Inversion> {
    params.validate()?;
    let size = params.register_size();
    if !joint.dim().is_multiple_of(size) || joint.dim() < size {
        return Err(Error::DimensionMismatch {
            expected: size,
            found: joint.dim(),
        });
    }
    let amps = joint.amplitudes();
    let mut population = vec![0.0; size];
    for (i, a) in amps.iter().enumerate() {
        population[i % size] += a.norm_sqr();
    }
    let mut ratios = Vec::with_capacity(size);
    let mut clamped_population = 0.0;
    for (l, &pop) in population.iter().enumerate() {
        let lambda = params.decode(l);
        let ratio = if lambda == 0.0 {
            if pop > SINGULAR_POPULATION_TOL {
                return Err(Error::SingularRegister {
                    register: l,
                    population: pop,
                });
            }
            0.0
        } else {
            params.c / lambda
        };
        if ratio.abs() > 1.0 {
            clamped_population += pop;
        }
        ratios.push(ratio.clamp(-1.0, 1.0));
    }
    let mut out = vec![ZERO; 2 * amps.len()];
    for (i, &a) in amps.iter().enumerate() {
        let r = ratios[i % size];
        out[2 * i] = a * libm::sqrt(1.0 - r * r);
        out[2 * i + 1] = a * r;
    }
    Ok(Inversion {
        joint: StateVector::from_raw(out),
        clamped_population,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Postselection {
    /// Normalized system state of the accepted branch.
    pub state: StateVector,
    /// Probability of flag `|1>` with the register at `|0>`.
    pub success_probability: f64,
    /// Register population outside `|0>` after uncomputing, over both flag values.
    pub register_leakage: f64,
}

/// Undoes phase estimation and keeps the flag-`|1>`, register-`|0>` branch.
pub fn uncompute_and_postselect(
    joint: &StateVector,
    a: &ComplexMatrix,
    params: &HhlParams,
    evolution: Evolution<'_>,
) -> Result<Postselection> {
    params.validate()?;
    let size = params.register_size();
    let dim = a.dim();
    if joint.dim() != dim * size * 2 {
        return Err(Error::DimensionMismatch {
            expected: dim * size * 2,
            found: joint.dim(),
        });
    }
    let eig = eigendecompose_hermitian(a)?;
    let powers = ControlledPowers::new(&eig, evolution, params)?;
    let mut amps = joint.amplitudes().to_vec();
    register_dft(&mut amps, params.m_bits, 2, true);
    powers.apply(&mut amps, dim, params.m_bits, 2, true);
    // Final Hadamards: the register-|0> amplitude is the normalized register sum.
    let amp0 = 1.0 / libm::sqrt(size as f64);
    let mut kept = vec![ZERO; dim];
    let mut at_zero = 0.0;
    for s in 0..dim {
        for flag in 0..2 {
            let sum: C64 = (0..size).map(|k| amps[(s * size + k) * 2 + flag]).sum();
            let proj = sum * amp0;
            at_zero += proj.norm_sqr();
            if flag == 1 {
                kept[s] = proj;
            }
        }
    }
    let register_leakage = (norm_sqr(&amps) - at_zero).max(0.0);
    let success_probability = norm_sqr(&kept);
    if !(success_probability >= MIN_SUCCESS_PROBABILITY) {
        return Err(Error::DegeneratePostselection {
            probability: success_probability,
        });
    }
    let state = StateVector::from_unnormalized(kept)?;
    Ok(Postselection {
        state,
        success_probability,
        register_leakage,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct HhlResult {
    pub m_bits: usize,
    /// `x^dagger M x / |x|^2` from the postselected state.
    pub estimate: f64,
    pub success_probability: f64,
    /// `estimate * success_probability * |b|^2 / C^2`, an estimate of `x^dagger M x`.
    pub rescaled_estimate: f64,
    pub register_leakage: f64,
    pub clamped_population: f64,
}

pub fn solve(p: &LinearSystemProblem) -> Result<HhlResult> {
    solve_with(p, Evolution::Exact)
}

pub fn solve_with(p: &LinearSystemProblem, evolution: Evolution<'_>) -> Result<HhlResult> {
    let (psi, _) = prepare_b(&p.b)?;
    let joint = phase_estimation(&p.a, &psi, &p.params, evolution)?;
    let inversion = invert_eigenvalues(&joint, &p.params)?;
    let post = uncompute_and_postselect(&inversion.joint, &p.a, &p.params, evolution)?;
    let estimate = expectation(&p.observable, &post.state)?;
    let b_norm_sqr = norm_sqr(&p.b);
    Ok(HhlResult {
        m_bits: p.params.m_bits,
        estimate,
        success_probability: post.success_probability,
        rescaled_estimate: estimate * post.success_probability * b_norm_sqr / (p.params.c * p.params.c),
        register_leakage: post.register_leakage,
        clamped_population: inversion.clamped_population,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalSolution {
    pub x: Vec<C64>,
    /// `x^dagger M x / |x|^2`.
    pub normalized: f64,
    /// `x^dagger M x`.
    pub raw: f64,
}

/// Solves `A x = b` by Gaussian elimination with partial pivoting.
pub fn solve_linear(a: &ComplexMatrix, b: &[C64]) -> Result<Vec<C64>> {
    let n = a.dim();
    if b.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: b.len(),
        });
    }
    let tiny = a.max_abs() * f64::EPSILON * n as f64;
    let mut m: Vec<Vec<C64>> = (0..n).map(|r| a.row(r).to_vec()).collect();
    let mut x = b.to_vec();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| m[i][col].norm().total_cmp(&m[j][col].norm()))
            .unwrap_or(col);
        if !(m[pivot][col].norm() > tiny) {
            return Err(Error::Singular(col));
        }
        m.swap(col, pivot);
        x.swap(col, pivot);
        for r in col + 1..n {
            let f = m[r][col] / m[col][col];
            if f == ZERO {
                continue;
            }
            for c in col..n {
                let delta = f * m[col][c];
                m[r][c] -= delta;
            }
            let delta = f * x[col];
            x[r] -= delta;
        }
    }
    for col in (0..n).rev() {
        let mut acc = x[col];
        for c in col + 1..n {
            acc -= m[col][c] * x[c];
        }
        x[col] = acc / m[col][col];
    }
    Ok(x)
}

/// Classical reference for [`solve`].
pub fn classical_solve(
    a: &ComplexMatrix,
    b: &[C64],
    observable: &ComplexMatrix,
) -> Result<ClassicalSolution> {
    if observable.dim() != a.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: observable.dim(),
        });
    }
    observable.check_hermitian(HERMITIAN_TOL)?;
    let x = solve_linear(a, b)?;
    let mx = observable.matvec(&x);
    let raw = x.iter().zip(&mx).map(|(u, v)| u.conj() * v).sum::<C64>().re;
    let nx = norm_sqr(&x);
    if nx == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok(ClassicalSolution {
        x,
        normalized: raw / nx,
        raw,
    })
}

/// Probability that phase estimation of phase `phi` returns register value `l`.
/// Closed form of the Fejer kernel, used as an independent check.
pub fn phase_estimation_probability(phi: f64, l: usize, m_bits: usize) -> f64 {
    let size = (1usize << m_bits) as f64;
    let delta = phi - l as f64 / size;
    let den = libm::sin(PI * delta);
    if den.abs() < 1e-15 {
        return 1.0;
    }
    let num = libm::sin(PI * size * delta);
    (num * num) / (size * size * den * den)
}
