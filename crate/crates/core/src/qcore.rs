//! Dense complex linear algebra for small Hilbert spaces (dim 2..16):
//! vectors, unitaries, a cyclic Jacobi Hermitian eigensolver, and the
//! Hermitian matrix exponential.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hard cap on matrix dimension; the protocol targets 2..2^4.
pub const MAX_DIM: usize = 16;

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                actual: dim,
            });
        }
        if dim > MAX_DIM {
            return Err(Error::DimensionTooLarge(dim));
        }
        Ok(Self {
            dim,
            data: vec![Complex64::ZERO; dim * dim],
        })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        let mut m = Self::zeros(dim)?;
        for i in 0..dim {
            m[(i, i)] = Complex64::ONE;
        }
        Ok(m)
    }

    /// Build from row-major entries; length must be dim².
    pub fn from_entries(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        let mut m = Self::zeros(dim)?;
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                actual: entries.len(),
            });
        }
        m.data = entries;
        Ok(m)
    }

    /// Build from row-major real entries.
    pub fn from_real(dim: usize, entries: &[f64]) -> Result<Self> {
        Self::from_entries(
            dim,
            entries.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&x| x * factor).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other.dim)?;
        Ok(Self {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| a + b)
                .collect(),
        })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other.dim)?;
        let n = self.dim;
        let mut out = Self::zeros(n)?;
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == Complex64::ZERO {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n).expect("dim already validated");
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = self[(j, i)].conj();
            }
        }
        out
    }

    /// Max elementwise modulus of (self − other).
    pub fn max_diff(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// ‖self† self − I‖_max.
    pub fn unitarity_defect(&self) -> f64 {
        let gram = self.adjoint().mul(self).expect("same dim");
        let eye = Self::identity(self.dim).expect("same dim");
        gram.max_diff(&eye)
    }

    fn check_dim(&self, other: usize) -> Result<()> {
        if self.dim != other {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: other,
            });
        }
        Ok(())
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

/// Normalized complex state vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn new(amplitudes: Vec<Complex64>) -> Self {
        Self { amplitudes }
    }

    /// Computational basis state |index⟩.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::IndexOutOfRange { index, dim });
        }
        let mut amplitudes = vec![Complex64::ZERO; dim];
        amplitudes[index] = Complex64::ONE;
        Ok(Self { amplitudes })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

/// Sorted eigendecomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct Spectrum {
    /// Eigenvalues, ascending.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors, aligned with `eigenvalues`.
    pub eigenvectors: Vec<StateVector>,
}

impl Spectrum {
    /// Group indices of eigenvalues equal within `tol` into degenerate blocks.
    pub fn degenerate_blocks(&self, tol: f64) -> Vec<Vec<usize>> {
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for (i, &ev) in self.eigenvalues.iter().enumerate() {
            match blocks.last_mut() {
                Some(block) if (ev - self.eigenvalues[block[0]]).abs() <= tol => block.push(i),
                _ => blocks.push(vec![i]),
            }
        }
        blocks
    }
}

/// True iff max|m[i][j] − conj(m[j][i])| ≤ tol.
pub fn check_hermitian(m: &ComplexMatrix, tol: f64) -> bool {
    hermitian_defect(m).2 <= tol
}

/// Worst (row, col, |deviation|) triple over all entry pairs.
fn hermitian_defect(m: &ComplexMatrix) -> (usize, usize, f64) {
    let n = m.dim();
    let mut worst = (0, 0, 0.0f64);
    for i in 0..n {
        for j in i..n {
            let dev = (m[(i, j)] - m[(j, i)].conj()).norm();
            if dev > worst.2 {
                worst = (i, j, dev);
            }
        }
    }
    worst
}

fn require_hermitian(m: &ComplexMatrix, tol: f64) -> Result<()> {
    let (row, col, deviation) = hermitian_defect(m);
    if deviation > tol {
        return Err(Error::NonHermitianInput {
            row,
            col,
            deviation,
        });
    }
    Ok(())
}

const JACOBI_SWEEP_LIMIT: usize = 100;

/// Hermitian eigendecomposition by cyclic Jacobi rotations with a fixed
/// sweep order, so degenerate-subspace bases are reproducible run-to-run.
pub fn eigendecompose(m: &ComplexMatrix) -> Result<Spectrum> {
    require_hermitian(m, 1e-9)?;
    let n = m.dim();
    let mut a = m.clone();
    // Symmetrize so accumulated rounding cannot re-introduce skew parts.
    for i in 0..n {
        for j in i..n {
            let h = 0.5 * (a[(i, j)] + a[(j, i)].conj());
            a[(i, j)] = h;
            a[(j, i)] = h.conj();
        }
        a[(i, i)] = Complex64::new(a[(i, i)].re, 0.0);
    }
    let scale = a
        .entries()
        .iter()
        .map(|x| x.norm())
        .fold(0.0, f64::max)
        .max(1.0);
    let mut v = ComplexMatrix::identity(n)?;

    for _sweep in 0..JACOBI_SWEEP_LIMIT {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off < 1e-13 * scale {
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag < 1e-300 {
                    continue;
                }
                let phase = apq / mag;
                let tau = (a[(q, q)].re - a[(p, p)].re) / (2.0 * mag);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // Rotation R: identity except R[p][p]=c, R[p][q]=s·phase,
                // R[q][p]=−s·conj(phase), R[q][q]=c.  Apply A ← R† A R.
                let rpq = s * phase;
                let rqp = -s * phase.conj();
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * c + akq * rqp;
                    a[(k, q)] = akp * rpq + akq * c;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = apk * c + aqk * rqp.conj();
                    a[(q, k)] = apk * rpq.conj() + aqk * c;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * c + vkq * rqp;
                    v[(k, q)] = vkp * rpq + vkq * c;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.partial_cmp(&a[(j, j)].re).unwrap());

    let mut eigenvalues = Vec::with_capacity(n);
    let mut eigenvectors = Vec::with_capacity(n);
    for &col in &order {
        eigenvalues.push(a[(col, col)].re);
        let mut vec: Vec<Complex64> = (0..n).map(|row| v[(row, col)]).collect();
        // Phase convention: make the largest-modulus component real positive.
        let mut best = 0;
        for (i, amp) in vec.iter().enumerate() {
            if amp.norm() > vec[best].norm() + 1e-12 {
                best = i;
            }
        }
        let mag = vec[best].norm();
        if mag > 0.0 {
            let align = vec[best].conj() / mag;
            for amp in &mut vec {
                *amp *= align;
            }
        }
        eigenvectors.push(StateVector::new(vec));
    }
    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
    })
}

/// e^{−iM} for Hermitian M, via the spectral decomposition.
pub fn expm_hermitian(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let spectrum = eigendecompose(m)?;
    let n = m.dim();
    let mut out = ComplexMatrix::zeros(n)?;
    for (alpha, vec) in spectrum.eigenvalues.iter().zip(&spectrum.eigenvectors) {
        let phase = Complex64::new(0.0, -alpha).exp();
        let amps = vec.amplitudes();
        for i in 0..n {
            let left = phase * amps[i];
            for j in 0..n {
                out[(i, j)] += left * amps[j].conj();
            }
        }
    }
    Ok(out)
}

/// u·s for a unitary u.
pub fn apply(u: &ComplexMatrix, s: &StateVector) -> Result<StateVector> {
    let n = u.dim();
    if s.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: s.dim(),
        });
    }
    let amps = s.amplitudes();
    let mut out = vec![Complex64::ZERO; n];
    for i in 0..n {
        for j in 0..n {
            out[i] += u[(i, j)] * amps[j];
        }
    }
    Ok(StateVector::new(out))
}
