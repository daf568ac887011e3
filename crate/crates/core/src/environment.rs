//! The unknown-observable side of the loop: the evolution operator,
//! the measured distribution seen through the agent unitary, and seeded
//! single-shot sampling.

use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::agent::AgentUnitary;
use crate::error::{Error, Result};
use crate::qcore::{self, ComplexMatrix, StateVector};

/// Hermitian matrix holding τÔ (τ pre-multiplied), plus a display label.
#[derive(Debug, Clone)]
pub struct Observable {
    matrix: ComplexMatrix,
    label: String,
    evolution: OnceLock<ComplexMatrix>,
}

impl Observable {
    pub fn new(matrix: ComplexMatrix, label: impl Into<String>) -> Result<Self> {
        if !qcore::check_hermitian(&matrix, 1e-9) {
            // Re-derive the worst pair for the error message.
            let n = matrix.dim();
            let mut worst = (0, 0, 0.0f64);
            for i in 0..n {
                for j in i..n {
                    let dev = (matrix[(i, j)] - matrix[(j, i)].conj()).norm();
                    if dev > worst.2 {
                        worst = (i, j, dev);
                    }
                }
            }
            return Err(Error::NonHermitianInput {
                row: worst.0,
                col: worst.1,
                deviation: worst.2,
            });
        }
        Ok(Self {
            matrix,
            label: label.into(),
            evolution: OnceLock::new(),
        })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// e^{−iτÔ}, computed once per observable.
    pub fn evolution_operator(&self) -> &ComplexMatrix {
        self.evolution
            .get_or_init(|| qcore::expm_hermitian(&self.matrix).expect("validated Hermitian"))
    }
}

/// Probabilities of each computational-basis outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementDistribution {
    probabilities: Vec<f64>,
}

impl MeasurementDistribution {
    pub fn new(probabilities: Vec<f64>) -> Self {
        Self { probabilities }
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn dim(&self) -> usize {
        self.probabilities.len()
    }
}

/// Counter-based seeded randomness: (seed, position) fully determines
/// every draw, so trajectories replay bit-identically.
#[derive(Debug, Clone)]
pub struct ShotSource {
    seed: u64,
    position: u64,
    rng: ChaCha12Rng,
}

impl ShotSource {
    pub fn from_seed(seed: u64) -> Self {
        Self {
            seed,
            position: 0,
            rng: ChaCha12Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn position(&self) -> u64 {
        self.position
    }

    /// One uniform draw in [0, 1); advances the position by exactly one.
    pub fn next_uniform(&mut self) -> f64 {
        self.position += 1;
        self.rng.random::<f64>()
    }
}

/// probabilities[m] = |⟨m| D† Ê D |j⟩|².
pub fn outcome_distribution(
    o: &Observable,
    d: &AgentUnitary,
    j: usize,
) -> Result<MeasurementDistribution> {
    let dim = o.dim();
    if d.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            actual: d.dim(),
        });
    }
    let agent = qcore::apply(d.matrix(), &StateVector::basis(dim, j)?)?;
    let evolved = qcore::apply(o.evolution_operator(), &agent)?;
    let measured = qcore::apply(&d.matrix().adjoint(), &evolved)?;
    Ok(MeasurementDistribution::new(
        measured.amplitudes().iter().map(|a| a.norm_sqr()).collect(),
    ))
}

/// Inverse-CDF sample from one uniform draw.
pub fn single_shot(dist: &MeasurementDistribution, src: &mut ShotSource) -> usize {
    let u = src.next_uniform();
    let mut acc = 0.0;
    for (m, &p) in dist.probabilities().iter().enumerate() {
        acc += p;
        if u < acc {
            return m;
        }
    }
    dist.dim() - 1
}

/// Convolve the distribution with independent per-bit readout flips.
pub fn measurement_flip_noise(
    dist: &MeasurementDistribution,
    eps: f64,
) -> Result<MeasurementDistribution> {
    if !(0.0..=0.5).contains(&eps) {
        return Err(Error::InvalidEpsilon(eps));
    }
    if eps == 0.0 {
        return Ok(dist.clone());
    }
    let dim = dist.dim();
    let n_bits = dim.trailing_zeros() as u32;
    let mut out = vec![0.0; dim];
    for (x, &p) in dist.probabilities().iter().enumerate() {
        for (y, slot) in out.iter_mut().enumerate() {
            let flips = ((x ^ y) as u32).count_ones();
            let weight = eps.powi(flips as i32) * (1.0 - eps).powi((n_bits - flips) as i32);
            *slot += p * weight;
        }
    }
    Ok(MeasurementDistribution::new(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, SQRT_2};

    fn sigma_x_obs(scale: f64) -> Observable {
        let m = ComplexMatrix::from_real(2, &[0.0, scale, scale, 0.0]).unwrap();
        Observable::new(m, "test").unwrap()
    }

    #[test]
    fn evolution_half_pi() {
        let o = sigma_x_obs(FRAC_PI_2);
        let want = ComplexMatrix::from_entries(
            2,
            vec![Complex64::ZERO, -Complex64::I, -Complex64::I, Complex64::ZERO],
        )
        .unwrap();
        assert!(o.evolution_operator().max_diff(&want) < 1e-10);
    }

    #[test]
    fn evolution_quarter_pi() {
        let o = sigma_x_obs(FRAC_PI_4);
        let r = 1.0 / SQRT_2;
        let want = ComplexMatrix::from_entries(
            2,
            vec![
                Complex64::new(r, 0.0),
                Complex64::new(0.0, -r),
                Complex64::new(0.0, -r),
                Complex64::new(r, 0.0),
            ],
        )
        .unwrap();
        assert!(o.evolution_operator().max_diff(&want) < 1e-10);
    }

    #[test]
    fn evolution_xx() {
        let o = crate::presets::preset("xx").unwrap();
        // cos(1)·I − i·sin(1)·σxσx, from the ±1 spectrum.
        let eye = ComplexMatrix::identity(4).unwrap();
        let want = eye
            .scale(Complex64::new(1f64.cos(), 0.0))
            .add(&o.matrix().scale(Complex64::new(0.0, -(1f64.sin()))))
            .unwrap();
        assert!(o.evolution_operator().max_diff(&want) < 1e-10);
    }

    #[test]
    fn distribution_identity_evolution() {
        let o = Observable::new(ComplexMatrix::zeros(2).unwrap(), "zero").unwrap();
        let d = AgentUnitary::identity(2).unwrap();
        let dist = outcome_distribution(&o, &d, 1).unwrap();
        assert!((dist.probabilities()[0]).abs() < 1e-12);
        assert!((dist.probabilities()[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn distribution_flip() {
        let o = sigma_x_obs(FRAC_PI_2);
        let d = AgentUnitary::identity(2).unwrap();
        let dist = outcome_distribution(&o, &d, 0).unwrap();
        assert!(dist.probabilities()[0].abs() < 1e-12);
        assert!((dist.probabilities()[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn distribution_eigenvector_column() {
        let o = sigma_x_obs(FRAC_PI_2);
        let r = 1.0 / SQRT_2;
        let d = AgentUnitary::from_matrix(
            ComplexMatrix::from_real(2, &[r, r, r, -r]).unwrap(),
        );
        let dist = outcome_distribution(&o, &d, 0).unwrap();
        assert!((dist.probabilities()[0] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn single_shot_degenerate_dist() {
        let dist = MeasurementDistribution::new(vec![1.0, 0.0]);
        let mut src = ShotSource::from_seed(3);
        for _ in 0..20 {
            assert_eq!(single_shot(&dist, &mut src), 0);
        }
        assert_eq!(src.position(), 20);
    }

    #[test]
    fn single_shot_frequencies() {
        let dist = MeasurementDistribution::new(vec![0.5, 0.5]);
        let mut src = ShotSource::from_seed(11);
        let n = 100_000;
        let zeros = (0..n)
            .filter(|_| single_shot(&dist, &mut src) == 0)
            .count();
        let freq = zeros as f64 / n as f64;
        assert!((0.494..=0.506).contains(&freq), "freq {freq}");
    }

    #[test]
    fn single_shot_replay_identical() {
        let dist = MeasurementDistribution::new(vec![0.3, 0.7]);
        let draw = |seed| {
            let mut src = ShotSource::from_seed(seed);
            (0..5).map(|_| single_shot(&dist, &mut src)).collect::<Vec<_>>()
        };
        assert_eq!(draw(42), draw(42));
    }

    #[test]
    fn flip_noise_limits() {
        let dist = MeasurementDistribution::new(vec![1.0, 0.0]);
        assert_eq!(
            measurement_flip_noise(&dist, 0.0).unwrap().probabilities(),
            dist.probabilities()
        );
        let half = measurement_flip_noise(&dist, 0.5).unwrap();
        assert!((half.probabilities()[0] - 0.5).abs() < 1e-12);
        let tenth = measurement_flip_noise(&dist, 0.1).unwrap();
        assert!((tenth.probabilities()[0] - 0.9).abs() < 1e-12);
        assert!((tenth.probabilities()[1] - 0.1).abs() < 1e-12);
        assert!(matches!(
            measurement_flip_noise(&dist, 0.6),
            Err(Error::InvalidEpsilon(_))
        ));
    }

    #[test]
    fn distribution_normalized_for_random_inputs() {
        for trial in 0..1000u64 {
            let dim = if trial % 2 == 0 { 2 } else { 4 };
            let d = AgentUnitary::from_matrix(crate::qcore::test_support::random_unitary(dim, trial));
            let o = crate::presets::preset(if dim == 2 { "x-half-pi" } else { "xx" }).unwrap();
            let dist = outcome_distribution(&o, &d, (trial % dim as u64) as usize).unwrap();
            let total: f64 = dist.probabilities().iter().sum();
            assert!((total - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn chi_square_against_input_distribution() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(400);
        for trial in 0..20u64 {
            let dim = 4;
            let raw: Vec<f64> = (0..dim).map(|_| rng.random_range(0.05..1.0)).collect();
            let total: f64 = raw.iter().sum();
            let dist = MeasurementDistribution::new(raw.iter().map(|p| p / total).collect());
            let mut src = ShotSource::from_seed(trial);
            let draws = 100_000;
            let mut counts = vec![0usize; dim];
            for _ in 0..draws {
                counts[single_shot(&dist, &mut src)] += 1;
            }
            let chi2: f64 = counts
                .iter()
                .zip(dist.probabilities())
                .map(|(&c, &p)| {
                    let expected = p * draws as f64;
                    (c as f64 - expected).powi(2) / expected
                })
                .sum();
            // df = 3; chi2 above 16.27 has p < 0.001.
            assert!(chi2 < 16.27, "trial {trial}: chi2 {chi2}");
        }
    }
}
