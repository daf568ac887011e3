//! Fidelity computation and estimation, batch statistics, and histogram
//! data for converged runs.

use serde::{Deserialize, Serialize};

use crate::agent::AgentUnitary;
use crate::environment::{outcome_distribution, single_shot, Observable, ShotSource};
use crate::error::{Error, Result};
use crate::qcore::{apply, eigendecompose, StateVector};

/// Eigenvalue gap |α⁽¹⁾ − α⁽⁰⁾| of a single-qubit τÔ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapInfo {
    pub delta: f64,
}

impl GapInfo {
    pub fn of_observable(o: &Observable) -> Result<Self> {
        let spectrum = eigendecompose(o.matrix())?;
        Ok(Self {
            delta: (spectrum.eigenvalues[1] - spectrum.eigenvalues[0]).abs(),
        })
    }
}

/// P₀ = 2ℱ(ℱ−1)(1−cos Δ) + 1.
pub fn p0_from_fidelity(f: f64, gap: GapInfo) -> f64 {
    2.0 * f * (f - 1.0) * (1.0 - gap.delta.cos()) + 1.0
}

/// Invert the P₀ relation onto the ℱ ≥ 1/2 branch. Radicands pushed
/// slightly negative by shot noise are snapped to zero.
pub fn fidelity_from_p0(p0: f64, gap: GapInfo) -> Result<f64> {
    let denom = 1.0 - gap.delta.cos();
    if denom.abs() < 1e-12 {
        return Err(Error::GapDegenerate);
    }
    let mut radicand = 2.0 * (p0 - 1.0) / denom + 1.0;
    if radicand < 0.0 {
        if radicand < -1e-9 {
            return Err(Error::RadicandNegative(radicand));
        }
        radicand = 0.0;
    }
    Ok(0.5 * (1.0 + radicand.sqrt()))
}

/// Frequency of outcome j over `shots` single-shot draws.
pub fn estimate_p(
    o: &Observable,
    d: &AgentUnitary,
    j: usize,
    shots: usize,
    src: &mut ShotSource,
) -> Result<f64> {
    let dist = outcome_distribution(o, d, j)?;
    let hits = (0..shots)
        .filter(|_| single_shot(&dist, src) == j)
        .count();
    Ok(hits as f64 / shots as f64)
}

/// |⟨j| D† Ê D |j⟩|², exact from the statevector.
pub fn exact_probability_fidelity(o: &Observable, d: &AgentUnitary, j: usize) -> Result<f64> {
    let dist = outcome_distribution(o, d, j)?;
    Ok(dist.probabilities()[j])
}

/// Max squared overlap of D|j⟩ with the eigenvectors of τÔ, and the
/// matched eigen-index. Degenerate eigenvalues are treated as one
/// eigenspace: the projection weight onto the block is used, since any
/// basis of a degenerate block is an equally valid answer.
pub fn exact_overlap_fidelity(o: &Observable, d: &AgentUnitary, j: usize) -> Result<(f64, usize)> {
    let dim = o.dim();
    if d.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            actual: d.dim(),
        });
    }
    let spectrum = eigendecompose(o.matrix())?;
    let column = apply(d.matrix(), &StateVector::basis(dim, j)?)?;
    let overlaps: Vec<f64> = spectrum
        .eigenvectors
        .iter()
        .map(|v| v.inner(&column).norm_sqr())
        .collect();
    let mut best_weight = -1.0;
    let mut best_index = 0;
    for block in spectrum.degenerate_blocks(1e-9) {
        let weight: f64 = block.iter().map(|&i| overlaps[i]).sum();
        if weight > best_weight {
            best_weight = weight;
            // Report the single best-matching eigenvector inside the block.
            best_index = *block
                .iter()
                .max_by(|&&a, &&b| overlaps[a].partial_cmp(&overlaps[b]).unwrap())
                .unwrap();
        }
    }
    Ok((best_weight, best_index))
}

/// Per-basis-label fidelity summary for one converged run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FidelityReport {
    pub entries: Vec<FidelityEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FidelityEntry {
    pub basis_index: usize,
    pub p_estimate: f64,
    pub p_shots: usize,
    /// Gap-formula inversion of the estimated P₀; single-qubit only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fidelity_from_p0: Option<f64>,
    pub probability_fidelity: f64,
    pub overlap_fidelity: f64,
    pub matched_eigen_index: usize,
}

/// Build the full report for a final agent unitary.
pub fn fidelity_report(
    o: &Observable,
    d: &AgentUnitary,
    shots: usize,
    src: &mut ShotSource,
) -> Result<FidelityReport> {
    let dim = o.dim();
    let gap = if dim == 2 {
        Some(GapInfo::of_observable(o)?)
    } else {
        None
    };
    let mut entries = Vec::with_capacity(dim);
    for j in 0..dim {
        let p_estimate = estimate_p(o, d, j, shots, src)?;
        let fidelity_from_p0 = match gap {
            Some(g) if (1.0 - g.delta.cos()).abs() >= 1e-12 => {
                Some(fidelity_from_p0(p_estimate, g)?)
            }
            _ => None,
        };
        let probability_fidelity = exact_probability_fidelity(o, d, j)?;
        let (overlap_fidelity, matched_eigen_index) = exact_overlap_fidelity(o, d, j)?;
        entries.push(FidelityEntry {
            basis_index: j,
            p_estimate,
            p_shots: shots,
            fidelity_from_p0,
            probability_fidelity,
            overlap_fidelity,
            matched_eigen_index,
        });
    }
    Ok(FidelityReport { entries })
}

/// Summary statistics over a batch of scalar (iterations, fidelity) pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchStats {
    pub mean_fidelity: f64,
    /// Population standard deviation (divide by n).
    pub std_fidelity: f64,
    pub mean_iterations: f64,
    pub min_iterations: u64,
    pub max_iterations: u64,
    /// 20 bins of width 0.05 on [0, 1], inclusive-left edges.
    pub histogram: Vec<HistogramBin>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub bin_left: f64,
    pub bin_right: f64,
    pub count: u64,
}

pub const HISTOGRAM_BINS: usize = 20;

/// Statistics over paired (N, ℱ) samples.
pub fn batch_stats(samples: &[(u64, f64)]) -> Result<BatchStats> {
    if samples.is_empty() {
        return Err(Error::EmptyBatch);
    }
    let n = samples.len() as f64;
    let mean_fidelity = samples.iter().map(|&(_, f)| f).sum::<f64>() / n;
    let variance = samples
        .iter()
        .map(|&(_, f)| (f - mean_fidelity).powi(2))
        .sum::<f64>()
        / n;
    let mean_iterations = samples.iter().map(|&(it, _)| it as f64).sum::<f64>() / n;
    let min_iterations = samples.iter().map(|&(it, _)| it).min().unwrap();
    let max_iterations = samples.iter().map(|&(it, _)| it).max().unwrap();
    let width = 1.0 / HISTOGRAM_BINS as f64;
    let mut histogram: Vec<HistogramBin> = (0..HISTOGRAM_BINS)
        .map(|i| HistogramBin {
            bin_left: i as f64 * width,
            bin_right: (i + 1) as f64 * width,
            count: 0,
        })
        .collect();
    for &(_, f) in samples {
        let bin = ((f / width) as usize).min(HISTOGRAM_BINS - 1);
        histogram[bin].count += 1;
    }
    Ok(BatchStats {
        mean_fidelity,
        std_fidelity: variance.sqrt(),
        mean_iterations,
        min_iterations,
        max_iterations,
        histogram,
    })
}
