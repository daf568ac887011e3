//! The agent unitary: two-level rotations, the composition update rule,
//! and the single-qubit Euler form.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::ComplexMatrix;

/// Rotation angles drawn from w·[−π, π].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotationAngles {
    pub theta: f64,
    pub phi: f64,
    pub lambda: f64,
}

/// Accumulated Euler angles for the single-qubit form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EulerParams {
    pub theta: f64,
    pub phi: f64,
    pub lambda: f64,
}

/// Unitary mapping the computational basis to the candidate eigenbasis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentUnitary {
    matrix: ComplexMatrix,
    iteration_index: u64,
    compositions_since_check: u32,
}

const UNITARITY_CHECK_PERIOD: u32 = 1000;
const UNITARITY_DRIFT_TOL: f64 = 1e-9;

impl AgentUnitary {
    pub fn identity(dim: usize) -> Result<Self> {
        Ok(Self {
            matrix: ComplexMatrix::identity(dim)?,
            iteration_index: 0,
            compositions_since_check: 0,
        })
    }

    pub fn from_matrix(matrix: ComplexMatrix) -> Self {
        Self {
            matrix,
            iteration_index: 0,
            compositions_since_check: 0,
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn iteration_index(&self) -> u64 {
        self.iteration_index
    }
}

/// General rotation in the {|j⟩, |m⟩} subspace; identity elsewhere.
pub fn two_level_rotation(
    dim: usize,
    j: usize,
    m: usize,
    angles: RotationAngles,
) -> Result<ComplexMatrix> {
    if j == m {
        return Err(Error::EqualIndices(j));
    }
    for index in [j, m] {
        if index >= dim {
            return Err(Error::IndexOutOfRange { index, dim });
        }
    }
    let half = angles.theta / 2.0;
    let (c, s) = (half.cos(), half.sin());
    let mut u = ComplexMatrix::identity(dim)?;
    u[(j, j)] = Complex64::new(c, 0.0);
    u[(m, m)] = c * Complex64::new(0.0, angles.lambda + angles.phi).exp();
    u[(j, m)] = -s * Complex64::new(0.0, angles.phi).exp();
    u[(m, j)] = s * Complex64::new(0.0, angles.lambda).exp();
    Ok(u)
}

/// Compose d with a rotation toward |target_j⟩ when the shot landed on a
/// different basis state; leave d untouched when it landed on the target.
pub fn update_agent(
    d: &AgentUnitary,
    outcome_m: usize,
    target_j: usize,
    angles: RotationAngles,
) -> Result<AgentUnitary> {
    let dim = d.dim();
    for index in [outcome_m, target_j] {
        if index >= dim {
            return Err(Error::IndexOutOfRange { index, dim });
        }
    }
    if outcome_m == target_j {
        let mut next = d.clone();
        next.iteration_index += 1;
        return Ok(next);
    }
    let rotation = two_level_rotation(dim, target_j, outcome_m, angles)?;
    let mut matrix = d.matrix.mul(&rotation)?;
    let mut since = d.compositions_since_check + 1;
    if since >= UNITARITY_CHECK_PERIOD {
        since = 0;
        if matrix.unitarity_defect() > UNITARITY_DRIFT_TOL {
            matrix = reunitarize(&matrix)?;
        }
    }
    Ok(AgentUnitary {
        matrix,
        iteration_index: d.iteration_index + 1,
        compositions_since_check: since,
    })
}

/// Polar projection U(U†U)^{−1/2}.
fn reunitarize(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let gram = m.adjoint().mul(m)?;
    let spectrum = crate::qcore::eigendecompose(&gram)?;
    let n = m.dim();
    let mut inv_sqrt = ComplexMatrix::zeros(n)?;
    for (lambda, vec) in spectrum.eigenvalues.iter().zip(&spectrum.eigenvectors) {
        let w = 1.0 / lambda.sqrt();
        let amps = vec.amplitudes();
        for i in 0..n {
            for j in 0..n {
                inv_sqrt[(i, j)] += w * amps[i] * amps[j].conj();
            }
        }
    }
    m.mul(&inv_sqrt)
}

/// e^{−i(λ/2)σz} · e^{−i(θ/2)σy} · e^{−i(φ/2)σz} as a 2×2 matrix.
pub fn euler_unitary(p: EulerParams) -> ComplexMatrix {
    let (c, s) = ((p.theta / 2.0).cos(), (p.theta / 2.0).sin());
    let zl = |a: f64| Complex64::new(0.0, -a / 2.0).exp();
    let entries = vec![
        zl(p.lambda) * c * zl(p.phi),
        zl(p.lambda) * -s * zl(-p.phi),
        zl(-p.lambda) * s * zl(p.phi),
        zl(-p.lambda) * c * zl(-p.phi),
    ];
    ComplexMatrix::from_entries(2, entries).expect("2x2")
}

/// Add the deltas when the shot landed on |1⟩; no-op on |0⟩. Angles are
/// not wrapped modulo 2π, keeping the full trajectory for diagnostics.
pub fn accumulate_euler(p: EulerParams, deltas: RotationAngles, outcome_m: usize) -> EulerParams {
    if outcome_m == 1 {
        EulerParams {
            theta: p.theta + deltas.theta,
            phi: p.phi + deltas.phi,
            lambda: p.lambda + deltas.lambda,
        }
    } else {
        p
    }
}
