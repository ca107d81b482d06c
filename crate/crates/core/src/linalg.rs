//! Dense complex linear algebra and the exact-evolution oracle.
//!
//! Everything here is sized for desk-scale verification: operators are
//! stored densely (row-major) and capped at [`DENSE_DIM_CAP`] rows. The
//! Hermitian eigensolver reduces to a real symmetric tridiagonal problem
//! with Householder reflections, removes the complex phases of the
//! off-diagonal with a diagonal unitary, and finishes with implicit QL.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Largest dimension accepted by dense operations (2^12).
pub const DENSE_DIM_CAP: usize = 1 << 12;

/// Largest register accepted by dense operations.
pub const MAX_QUBITS: usize = 12;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);
pub(crate) const I: C64 = C64::new(0.0, 1.0);

/// Tolerance on Hermiticity used by operations that require Hermitian input.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Tolerance on unitarity used by [`apply_unitary`].
pub const UNITARY_TOL: f64 = 1e-8;
/// Tolerance on the norm of a [`StateVector`].
pub const NORM_TOL: f64 = 1e-10;

/// `e^{i theta}`.
#[inline]
pub fn cis(theta: f64) -> C64 {
    C64::new(libm::cos(theta), libm::sin(theta))
}

/// Square complex matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = ONE;
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                data.push(f(r, c));
            }
        }
        Self { dim, data }
    }

    /// Builds a matrix from row-major data, rejecting non-square or non-finite input.
    pub fn from_row_major(dim: usize, data: Vec<C64>) -> Result<Self> {
        if dim == 0 || data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: data.len(),
            });
        }
        if let Some(pos) = data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite {
                row: pos / dim,
                col: pos % dim,
            });
        }
        Ok(Self { dim, data })
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(d, 0.0);
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[C64] {
        &self.data[r * self.dim..(r + 1) * self.dim]
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        Self::from_fn(n, |r, c| self.data[c * n + r].conj())
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn kron(&self, other: &Self) -> Self {
        let (a, b) = (self.dim, other.dim);
        Self::from_fn(a * b, |r, c| {
            self.data[(r / b) * a + c / b] * other.data[(r % b) * b + c % b]
        })
    }

    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        debug_assert_eq!(v.len(), self.dim);
        self.data
            .chunks_exact(self.dim)
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.data[i * self.dim + i]).sum()
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    /// Largest `|A_rc - conj(A_cr)|` together with its location.
    pub fn hermitian_residual(&self) -> (f64, usize, usize) {
        let n = self.dim;
        let mut worst = (0.0, 0, 0);
        for r in 0..n {
            for c in r..n {
                let d = (self.data[r * n + c] - self.data[c * n + r].conj()).norm();
                if d > worst.0 {
                    worst = (d, r, c);
                }
            }
        }
        worst
    }

    /// Rejects the matrix unless it is Hermitian within `tol * max(1, max|A|)`.
    pub fn check_hermitian(&self, tol: f64) -> Result<()> {
        let (residual, row, col) = self.hermitian_residual();
        if residual > tol * self.max_abs().max(1.0) || residual.is_nan() {
            return Err(Error::NotHermitian { row, col, residual });
        }
        Ok(())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.check_hermitian(tol).is_ok()
    }

    /// `max |(U^dagger U - I)_rc|`.
    pub fn unitarity_deviation(&self) -> f64 {
        let g = &self.adjoint() * self;
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for r in 0..n {
            for c in 0..n {
                let target = if r == c { ONE } else { ZERO };
                worst = worst.max((g.data[r * n + c] - target).norm());
            }
        }
        worst
    }

    /// Commutator `[self, other]`.
    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    pub(crate) fn check_cap(&self) -> Result<()> {
        if self.dim > DENSE_DIM_CAP {
            return Err(Error::DimensionTooLarge {
                dim: self.dim,
                cap: DENSE_DIM_CAP,
            });
        }
        Ok(())
    }

    fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.dim + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.dim + c]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix product dimension mismatch");
        let n = self.dim;
        let mut out = ComplexMatrix::zeros(n);
        for r in 0..n {
            let out_row = &mut out.data[r * n..(r + 1) * n];
            for k in 0..n {
                let a = self.data[r * n + k];
                if a == ZERO {
                    continue;
                }
                let rhs_row = &rhs.data[k * n..(k + 1) * n];
                for (o, b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        out
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix sum dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix difference dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

/// Normalized pure state on `n_qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<C64>,
}

pub(crate) fn log2_exact(len: usize) -> Result<usize> {
    if len == 0 || !len.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(len));
    }
    Ok(len.trailing_zeros() as usize)
}

pub(crate) fn norm_sqr(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

impl StateVector {
    /// Wraps amplitudes that must already be normalized within [`NORM_TOL`].
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        let n_qubits = log2_exact(amplitudes.len())?;
        let norm = libm::sqrt(norm_sqr(&amplitudes));
        if (norm - 1.0).abs() > NORM_TOL || norm.is_nan() {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self {
            n_qubits,
            amplitudes,
        })
    }

    /// Normalizes arbitrary nonzero amplitudes.
    pub fn from_unnormalized(mut amplitudes: Vec<C64>) -> Result<Self> {
        let n_qubits = log2_exact(amplitudes.len())?;
        let norm = libm::sqrt(norm_sqr(&amplitudes));
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::ZeroVector);
        }
        for a in &mut amplitudes {
            *a /= norm;
        }
        Ok(Self {
            n_qubits,
            amplitudes,
        })
    }

    /// Wraps amplitudes produced by a norm-preserving operation.
    pub(crate) fn from_raw(amplitudes: Vec<C64>) -> Self {
        let n_qubits = amplitudes.len().trailing_zeros() as usize;
        debug_assert!(amplitudes.len().is_power_of_two());
        Self {
            n_qubits,
            amplitudes,
        }
    }

    /// Computational basis state `|index>`.
    pub fn basis(n_qubits: usize, index: usize) -> Self {
        let mut amplitudes = vec![ZERO; 1 << n_qubits];
        amplitudes[index] = ONE;
        Self {
            n_qubits,
            amplitudes,
        }
    }

    /// Uniform superposition `|+>^n`.
    pub fn uniform(n_qubits: usize) -> Self {
        let dim = 1usize << n_qubits;
        let a = C64::new(1.0 / libm::sqrt(dim as f64), 0.0);
        Self {
            n_qubits,
            amplitudes: vec![a; dim],
        }
    }

    #[inline]
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(norm_sqr(&self.amplitudes))
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> C64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Euclidean distance between amplitude vectors.
    pub fn distance(&self, other: &Self) -> f64 {
        let s: f64 = self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        libm::sqrt(s)
    }

    /// Multiplies every amplitude by `e^{i phi}`.
    pub fn with_global_phase(&self, phi: f64) -> Self {
        let p = cis(phi);
        Self {
            n_qubits: self.n_qubits,
            amplitudes: self.amplitudes.iter().map(|a| a * p).collect(),
        }
    }
}

/// Eigenvalues (ascending) and orthonormal eigenvectors stored as columns.
#[derive(Debug, Clone)]
pub struct Eigensystem {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl Eigensystem {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `V f(diag(lambda)) V^dagger` for a scalar function of the eigenvalues.
    pub fn apply_function(&self, f: impl Fn(f64) -> C64) -> ComplexMatrix {
        let n = self.dim();
        let v = &self.eigenvectors;
        let fvals: Vec<C64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let mut out = ComplexMatrix::zeros(n);
        // (V D) then times V^dagger
        let mut vd = v.clone();
        for r in 0..n {
            for c in 0..n {
                vd[(r, c)] *= fvals[c];
            }
        }
        for r in 0..n {
            for c in 0..n {
                let mut acc = ZERO;
                for k in 0..n {
                    acc += vd[(r, k)] * v[(c, k)].conj();
                }
                out[(r, c)] = acc;
            }
        }
        out
    }

    /// `exp(-i H t)` from the stored decomposition.
    pub fn evolution(&self, t: f64) -> ComplexMatrix {
        self.apply_function(|l| cis(-l * t))
    }

    /// `V diag(lambda) V^dagger`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        self.apply_function(|l| C64::new(l, 0.0))
    }

    /// Applies `exp(-i H t)` to a vector without forming the dense operator.
    pub fn evolve_vector(&self, t: f64, v: &mut [C64]) {
        let n = self.dim();
        let vecs = &self.eigenvectors;
        let mut coeffs = vec![ZERO; n];
        for (k, coeff) in coeffs.iter_mut().enumerate() {
            let mut acc = ZERO;
            for (r, x) in v.iter().enumerate() {
                acc += vecs[(r, k)].conj() * x;
            }
            *coeff = acc * cis(-self.eigenvalues[k] * t);
        }
        for (r, x) in v.iter_mut().enumerate() {
            let mut acc = ZERO;
            for (k, coeff) in coeffs.iter().enumerate() {
                acc += vecs[(r, k)] * coeff;
            }
            *x = acc;
        }
    }
}

/// Full eigendecomposition of a Hermitian matrix.
pub fn eigendecompose_hermitian(h: &ComplexMatrix) -> Result<Eigensystem> {
    h.check_cap()?;
    h.check_hermitian(HERMITIAN_TOL)?;
    let n = h.dim();

    // Work on the exactly Hermitian part.
    let mut a = ComplexMatrix::from_fn(n, |r, c| (h[(r, c)] + h[(c, r)].conj()) * 0.5);
    let mut q = ComplexMatrix::identity(n);
    let mut v = vec![ZERO; n];
    let mut p = vec![ZERO; n];
    let mut w = vec![ZERO; n];

    for k in 0..n.saturating_sub(2) {
        let sigma: f64 = ((k + 1)..n).map(|i| a[(i, k)].norm_sqr()).sum();
        let norm = libm::sqrt(sigma);
        let tail: f64 = ((k + 2)..n).map(|i| a[(i, k)].norm_sqr()).sum();
        if tail == 0.0 {
            continue;
        }
        let x0 = a[(k + 1, k)];
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { ONE };
        // v = x - alpha e_1 with alpha = -phase * |x|
        v.iter_mut().for_each(|z| *z = ZERO);
        v[k + 1] = x0 + phase * norm;
        for i in (k + 2)..n {
            v[i] = a[(i, k)];
        }
        let vnorm = libm::sqrt(norm_sqr(&v));
        for z in v.iter_mut() {
            *z /= vnorm;
        }

        // p = A v ; w = p - (v^dagger p) v ; A <- A - 2 v w^dagger - 2 w v^dagger
        for r in 0..n {
            let mut acc = ZERO;
            for i in (k + 1)..n {
                acc += a[(r, i)] * v[i];
            }
            p[r] = acc;
        }
        let kappa: C64 = ((k + 1)..n).map(|i| v[i].conj() * p[i]).sum();
        for r in 0..n {
            w[r] = p[r] - kappa * v[r];
        }
        for r in 0..n {
            for c in 0..n {
                let delta = v[r] * w[c].conj() + w[r] * v[c].conj();
                if delta != ZERO {
                    a[(r, c)] -= delta * 2.0;
                }
            }
        }
        // Q <- Q (I - 2 v v^dagger)
        for r in 0..n {
            let mut acc = ZERO;
            for i in (k + 1)..n {
                acc += q[(r, i)] * v[i];
            }
            for i in (k + 1)..n {
                q[(r, i)] -= acc * v[i].conj() * 2.0;
            }
        }
    }

    // Tridiagonal T = D S D^dagger with S real symmetric.
    let mut diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    let mut off = vec![0.0; n];
    let mut phases = vec![ONE; n];
    for i in 0..n.saturating_sub(1) {
        let e = a[(i + 1, i)];
        let mag = e.norm();
        off[i] = mag;
        phases[i + 1] = if mag > 0.0 { phases[i] * (e / mag) } else { phases[i] };
    }

    let mut z = vec![0.0; n * n];
    for i in 0..n {
        z[i * n + i] = 1.0;
    }
    tridiagonal_ql(&mut diag, &mut off, &mut z, n)?;

    // V = Q D Z
    let mut vecs = ComplexMatrix::zeros(n);
    for r in 0..n {
        for i in 0..n {
            let qd = q[(r, i)] * phases[i];
            if qd == ZERO {
                continue;
            }
            for c in 0..n {
                vecs[(r, c)] += qd * z[i * n + c];
            }
        }
    }

    Ok(Eigensystem {
        eigenvalues: diag,
        eigenvectors: vecs,
    })
}

/// Implicit QL on a real symmetric tridiagonal matrix; eigenvectors accumulate in
/// the row-major `z`. Eigenvalues are returned ascending with columns permuted to match.
fn tridiagonal_ql(d: &mut [f64], e: &mut [f64], z: &mut [f64], n: usize) -> Result<()> {
    if n == 0 {
        return Ok(());
    }
    e[n - 1] = 0.0;
    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iterations = 0;
            loop {
                iterations += 1;
                if iterations > 60 {
                    return Err(Error::NoConvergence);
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = libm::hypot(p, 1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().take(n).skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    h = c * p;
                    r = libm::hypot(p, e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for k in 0..n {
                        let zk = &mut z[k * n..(k + 1) * n];
                        h = zk[i + 1];
                        zk[i + 1] = s * zk[i] + c * h;
                        zk[i] = c * zk[i] - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
                if !e[l].is_finite() {
                    return Err(Error::NoConvergence);
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }

    // Selection sort keeps the column swaps cheap to express.
    for i in 0..n.saturating_sub(1) {
        let mut k = i;
        for j in (i + 1)..n {
            if d[j] < d[k] {
                k = j;
            }
        }
        if k != i {
            d.swap(i, k);
            for row in 0..n {
                z.swap(row * n + i, row * n + k);
            }
        }
    }
    Ok(())
}

/// `exp(-i H t)` for Hermitian `H`, via the eigendecomposition.
pub fn exact_evolution(h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    Ok(eigendecompose_hermitian(h)?.evolution(t))
}

/// Largest singular value of `a - b`.
pub fn spectral_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    a.check_same_dim(b)?;
    spectral_norm(&(a - b))
}

/// Largest singular value of `a`.
pub fn spectral_norm(a: &ComplexMatrix) -> Result<f64> {
    a.check_cap()?;
    let scale = a.max_abs();
    if scale == 0.0 {
        return Ok(0.0);
    }
    // Rescale so the Gram matrix stays well inside floating-point range.
    let d = a.scale(C64::new(1.0 / scale, 0.0));
    let gram = &d.adjoint() * &d;
    let eig = eigendecompose_hermitian(&gram)?;
    let top = eig.eigenvalues.last().copied().unwrap_or(0.0).max(0.0);
    Ok(libm::sqrt(top) * scale)
}

/// `<psi|O|psi>` for Hermitian `O`.
pub fn expectation(o: &ComplexMatrix, psi: &StateVector) -> Result<f64> {
    if o.dim() != psi.dim() {
        return Err(Error::DimensionMismatch {
            expected: o.dim(),
            found: psi.dim(),
        });
    }
    o.check_hermitian(HERMITIAN_TOL)?;
    let amps = psi.amplitudes();
    let o_psi = o.matvec(amps);
    let value: C64 = amps.iter().zip(&o_psi).map(|(a, b)| a.conj() * b).sum();
    Ok(value.re)
}

/// `U |psi>` for unitary `U`.
pub fn apply_unitary(u: &ComplexMatrix, psi: &StateVector) -> Result<StateVector> {
    if u.dim() != psi.dim() {
        return Err(Error::DimensionMismatch {
            expected: u.dim(),
            found: psi.dim(),
        });
    }
    let deviation = u.unitarity_deviation();
    if deviation > UNITARY_TOL || deviation.is_nan() {
        return Err(Error::NotUnitary { deviation });
    }
    Ok(StateVector {
        n_qubits: psi.n_qubits(),
        amplitudes: u.matvec(psi.amplitudes()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::FRAC_PI_2;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(n);
        for r in 0..n {
            m[(r, r)] = C64::new(rng.gen_range(-1.0..1.0), 0.0);
            for c in (r + 1)..n {
                let z = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                m[(r, c)] = z;
                m[(c, r)] = z.conj();
            }
        }
        m
    }

    fn pauli_x() -> ComplexMatrix {
        ComplexMatrix::from_fn(2, |r, c| if r != c { ONE } else { ZERO })
    }

    fn pauli_z() -> ComplexMatrix {
        ComplexMatrix::from_real_diagonal(&[1.0, -1.0])
    }

    // Truncated Taylor series with scaling and squaring; independent of the eigensolver.
    fn taylor_exp(h: &ComplexMatrix, t: f64) -> ComplexMatrix {
        let n = h.dim();
        let mut squarings = 0;
        let mut s = h.max_abs() * n as f64 * t.abs();
        while s > 0.5 {
            s /= 2.0;
            squarings += 1;
        }
        let step = t / f64::from(1u32 << squarings);
        let a = h.scale(C64::new(0.0, -step));
        let mut term = ComplexMatrix::identity(n);
        let mut sum = ComplexMatrix::identity(n);
        for k in 1..30 {
            term = (&term * &a).scale(C64::new(1.0 / k as f64, 0.0));
            sum = &sum + &term;
        }
        for _ in 0..squarings {
            sum = &sum * &sum;
        }
        sum
    }

    fn power_iteration_norm(a: &ComplexMatrix) -> f64 {
        let g = &a.adjoint() * a;
        let n = g.dim();
        let mut v: Vec<C64> = (0..n).map(|i| C64::new(1.0 + i as f64 * 0.37, 0.1)).collect();
        let mut lambda = 0.0;
        for _ in 0..5000 {
            let w = g.matvec(&v);
            let nw = libm::sqrt(norm_sqr(&w));
            if nw == 0.0 {
                return 0.0;
            }
            lambda = nw / libm::sqrt(norm_sqr(&v));
            v = w.iter().map(|z| z / nw).collect();
        }
        libm::sqrt(lambda)
    }

    #[test]
    fn identity_eigenvalues() {
        let eig = eigendecompose_hermitian(&ComplexMatrix::identity(2)).unwrap();
        assert_eq!(eig.eigenvalues, vec![1.0, 1.0]);
        assert!(eig.eigenvectors.unitarity_deviation() < 1e-12);
    }

    #[test]
    fn pauli_z_eigenpairs() {
        let eig = eigendecompose_hermitian(&pauli_z()).unwrap();
        assert_eq!(eig.eigenvalues, vec![-1.0, 1.0]);
        // Eigenvector for -1 is |1>, for +1 is |0> (up to phase).
        assert!((eig.eigenvectors[(1, 0)].norm() - 1.0).abs() < 1e-12);
        assert!((eig.eigenvectors[(0, 1)].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn random_reconstruction_and_eigen_equation() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [1usize, 2, 3, 5, 8, 16, 33] {
            let h = random_hermitian(&mut rng, n);
            let eig = eigendecompose_hermitian(&h).unwrap();
            let scale = spectral_norm(&h).unwrap().max(1.0);
            assert!(spectral_distance(&eig.reconstruct(), &h).unwrap() <= 1e-9 * scale);
            assert!(eig.eigenvectors.unitarity_deviation() <= 1e-10);
            assert!(eig.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
            for j in 0..n {
                let col: Vec<C64> = (0..n).map(|r| eig.eigenvectors[(r, j)]).collect();
                let hv = h.matvec(&col);
                let resid: f64 = hv
                    .iter()
                    .zip(&col)
                    .map(|(a, b)| (a - b * eig.eigenvalues[j]).norm())
                    .fold(0.0, f64::max);
                assert!(resid <= 1e-9 * scale, "n={n} j={j} resid={resid}");
            }
        }
    }

    #[test]
    fn degenerate_and_block_structured_spectra() {
        // Already tridiagonal, diagonal, and highly degenerate inputs.
        let d = ComplexMatrix::from_real_diagonal(&[3.0, -1.0, 3.0, 0.0, 3.0]);
        let eig = eigendecompose_hermitian(&d).unwrap();
        assert_eq!(eig.eigenvalues, vec![-1.0, 0.0, 3.0, 3.0, 3.0]);
        let ones = ComplexMatrix::from_fn(6, |_, _| ONE);
        let eig = eigendecompose_hermitian(&ones).unwrap();
        assert!(spectral_distance(&eig.reconstruct(), &ones).unwrap() < 1e-12);
        assert!((eig.eigenvalues[5] - 6.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_hermitian_and_oversized() {
        let mut m = ComplexMatrix::zeros(2);
        m[(0, 1)] = ONE;
        match eigendecompose_hermitian(&m) {
            Err(Error::NotHermitian { row, col, .. }) => assert_eq!((row, col), (0, 1)),
            other => panic!("unexpected {other:?}"),
        }
        let big = ComplexMatrix::zeros(DENSE_DIM_CAP + 1);
        assert!(matches!(
            eigendecompose_hermitian(&big),
            Err(Error::DimensionTooLarge { .. })
        ));
    }

    #[test]
    fn evolution_of_zero_and_x() {
        let u = exact_evolution(&ComplexMatrix::zeros(4), 3.7).unwrap();
        assert!(spectral_distance(&u, &ComplexMatrix::identity(4)).unwrap() < 1e-15);
        let u = exact_evolution(&pauli_x(), FRAC_PI_2).unwrap();
        let expected = pauli_x().scale(-I);
        assert!(spectral_distance(&u, &expected).unwrap() < 1e-12);
    }

    #[test]
    fn evolution_matches_taylor_series() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let h = random_hermitian(&mut rng, 4);
        let u = exact_evolution(&h, 0.7).unwrap();
        let oracle = taylor_exp(&h, 0.7);
        assert!(spectral_distance(&u, &oracle).unwrap() < 1e-11);
        assert!(u.unitarity_deviation() < 1e-10);
    }

    #[test]
    fn evolution_rejects_non_hermitian() {
        let mut m = ComplexMatrix::zeros(2);
        m[(1, 0)] = C64::new(0.0, 1.0);
        m[(0, 1)] = C64::new(0.0, 1.0);
        assert!(exact_evolution(&m, 1.0).is_err());
    }

    #[test]
    fn spectral_distance_examples() {
        let id = ComplexMatrix::identity(2);
        assert_eq!(spectral_distance(&id, &id).unwrap(), 0.0);
        let minus = id.scale(-ONE);
        assert!((spectral_distance(&id, &minus).unwrap() - 2.0).abs() < 1e-14);
        assert!(matches!(
            spectral_distance(&id, &ComplexMatrix::identity(3)),
            Err(Error::DimensionMismatch { .. })
        ));
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..5 {
            let a = random_hermitian(&mut rng, 6);
            let b = exact_evolution(&random_hermitian(&mut rng, 6), 1.3).unwrap();
            let d = spectral_distance(&a, &b).unwrap();
            let oracle = power_iteration_norm(&(&a - &b));
            assert!((d - oracle).abs() < 1e-8 * oracle.max(1.0), "{d} vs {oracle}");
        }
    }

    #[test]
    fn expectation_examples() {
        let zero = StateVector::basis(1, 0);
        assert!((expectation(&pauli_z(), &zero).unwrap() - 1.0).abs() < 1e-15);
        let plus = StateVector::uniform(1);
        assert!((expectation(&pauli_x(), &plus).unwrap() - 1.0).abs() < 1e-15);

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let o = random_hermitian(&mut rng, 8);
        let amps: Vec<C64> = (0..8)
            .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let psi = StateVector::from_unnormalized(amps).unwrap();
        let a = psi.amplitudes();
        let mut oracle = ZERO;
        for i in 0..8 {
            for j in 0..8 {
                oracle += a[i].conj() * o[(i, j)] * a[j];
            }
        }
        assert!(oracle.im.abs() < 1e-12);
        assert!((expectation(&o, &psi).unwrap() - oracle.re).abs() < 1e-12);

        let mut bad = ComplexMatrix::zeros(2);
        bad[(0, 1)] = ONE;
        assert!(expectation(&bad, &zero).is_err());
    }

    #[test]
    fn apply_unitary_examples() {
        let zero = StateVector::basis(1, 0);
        let same = apply_unitary(&ComplexMatrix::identity(2), &zero).unwrap();
        assert_eq!(same, zero);
        let flipped = apply_unitary(&pauli_x(), &zero).unwrap();
        assert_eq!(flipped, StateVector::basis(1, 1));

        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let u = exact_evolution(&random_hermitian(&mut rng, 8), 2.1).unwrap();
        let psi = StateVector::uniform(3);
        let out = apply_unitary(&u, &psi).unwrap();
        assert!((out.norm() - 1.0).abs() < 1e-12);

        match apply_unitary(&pauli_x().scale(C64::new(1.1, 0.0)), &zero) {
            Err(Error::NotUnitary { deviation }) => assert!((deviation - 0.21).abs() < 1e-12),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn state_vector_validation() {
        assert!(matches!(
            StateVector::new(vec![ONE, ONE]),
            Err(Error::NotNormalized { .. })
        ));
        assert!(matches!(
            StateVector::new(vec![ONE, ZERO, ZERO]),
            Err(Error::NotPowerOfTwo(3))
        ));
        assert!(matches!(
            StateVector::from_unnormalized(vec![ZERO, ZERO]),
            Err(Error::ZeroVector)
        ));
    }
}
