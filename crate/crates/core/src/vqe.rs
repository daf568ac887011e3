//! Expectation-value baseline: Pauli decomposition, finite-shot energy
//! estimation over a hardware-style ansatz, and Nelder–Mead minimization.
//! Reports total single-shot cost for comparison with the RL loop.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::environment::{Observable, ShotSource};
use crate::error::{Error, Result};
use crate::qcore::{apply, eigendecompose, ComplexMatrix, StateVector};

/// One term of the Pauli expansion: coefficient times a word over
/// {I, X, Y, Z}. Qubit 0 is the leftmost character (most significant bit).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PauliTerm {
    pub coefficient: f64,
    pub word: String,
}

impl PauliTerm {
    pub fn is_identity(&self) -> bool {
        self.word.chars().all(|c| c == 'I')
    }
}

fn pauli_1q(c: char) -> ComplexMatrix {
    let i = Complex64::I;
    let entries = match c {
        'I' => vec![Complex64::ONE, Complex64::ZERO, Complex64::ZERO, Complex64::ONE],
        'X' => vec![Complex64::ZERO, Complex64::ONE, Complex64::ONE, Complex64::ZERO],
        'Y' => vec![Complex64::ZERO, -i, i, Complex64::ZERO],
        'Z' => vec![Complex64::ONE, Complex64::ZERO, Complex64::ZERO, -Complex64::ONE],
        _ => unreachable!("pauli letter"),
    };
    ComplexMatrix::from_entries(2, entries).expect("2x2")
}

fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (na, nb) = (a.dim(), b.dim());
    let mut out = ComplexMatrix::zeros(na * nb).expect("dims validated upstream");
    for i in 0..na {
        for j in 0..na {
            for k in 0..nb {
                for l in 0..nb {
                    out[(i * nb + k, j * nb + l)] = a[(i, j)] * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Dense matrix of a Pauli word.
pub fn pauli_word_matrix(word: &str) -> ComplexMatrix {
    let mut chars = word.chars();
    let mut m = pauli_1q(chars.next().expect("non-empty word"));
    for c in chars {
        m = kron(&m, &pauli_1q(c));
    }
    m
}

/// Expand τÔ over the 4ⁿ Pauli words; zero terms dropped.
pub fn pauli_decompose(o: &Observable) -> Result<Vec<PauliTerm>> {
    let dim = o.dim();
    let n_qubits = dim.trailing_zeros() as usize;
    if dim != 1 << n_qubits {
        return Err(Error::DimensionMismatch {
            expected: 1 << n_qubits,
            actual: dim,
        });
    }
    let letters = ['I', 'X', 'Y', 'Z'];
    let mut terms = Vec::new();
    for code in 0..4usize.pow(n_qubits as u32) {
        let word: String = (0..n_qubits)
            .rev()
            .map(|q| letters[(code >> (2 * q)) & 3])
            .collect();
        let p = pauli_word_matrix(&word);
        let mut trace = Complex64::ZERO;
        for i in 0..dim {
            for k in 0..dim {
                trace += p[(i, k)] * o.matrix()[(k, i)];
            }
        }
        let c = trace / dim as f64;
        if c.im.abs() > 1e-9 {
            return Err(Error::NonHermitianInput {
                row: 0,
                col: 0,
                deviation: c.im.abs(),
            });
        }
        if c.re.abs() > 1e-12 {
            terms.push(PauliTerm {
                coefficient: c.re,
                word,
            });
        }
    }
    Ok(terms)
}

/// Rotate `state` so the word's Pauli axes become computational Z axes.
fn rotate_to_measurement_basis(state: &StateVector, word: &str) -> StateVector {
    let h = ComplexMatrix::from_real(2, &[1.0, 1.0, 1.0, -1.0])
        .unwrap()
        .scale(Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0));
    // H·S† maps the Y eigenbasis onto the computational basis.
    let hsdg = {
        let sdg = ComplexMatrix::from_entries(
            2,
            vec![Complex64::ONE, Complex64::ZERO, Complex64::ZERO, -Complex64::I],
        )
        .unwrap();
        h.mul(&sdg).unwrap()
    };
    let eye = ComplexMatrix::identity(2).unwrap();
    let mut rot: Option<ComplexMatrix> = None;
    for c in word.chars() {
        let gate = match c {
            'X' => &h,
            'Y' => &hsdg,
            _ => &eye,
        };
        rot = Some(match rot {
            None => gate.clone(),
            Some(acc) => kron(&acc, gate),
        });
    }
    apply(&rot.unwrap(), state).expect("dims match")
}

/// ±1 eigenvalue of a Z-basis word for one measured bitstring.
fn word_sign(word: &str, outcome: usize) -> f64 {
    let n = word.len();
    let mut sign = 1.0;
    for (pos, c) in word.chars().enumerate() {
        if c != 'I' {
            let bit = (outcome >> (n - 1 - pos)) & 1;
            if bit == 1 {
                sign = -sign;
            }
        }
    }
    sign
}

/// Finite-shot energy estimate: shots split evenly over the measured
/// terms, remainder to the largest-|coefficient| term.
pub fn estimate_energy(
    terms: &[PauliTerm],
    state: &StateVector,
    shots_per_step: usize,
    src: &mut ShotSource,
) -> Result<f64> {
    let measured: Vec<&PauliTerm> = terms.iter().filter(|t| !t.is_identity()).collect();
    if measured.is_empty() {
        return Ok(identity_offset(terms));
    }
    if shots_per_step < measured.len() {
        return Err(Error::InsufficientShots {
            shots: shots_per_step,
            terms: measured.len(),
        });
    }
    let per = shots_per_step / measured.len();
    let remainder = shots_per_step - per * measured.len();
    let largest = measured
        .iter()
        .enumerate()
        .max_by(|(_, a), (_, b)| {
            a.coefficient
                .abs()
                .partial_cmp(&b.coefficient.abs())
                .unwrap()
        })
        .map(|(i, _)| i)
        .unwrap();
    let mut energy = identity_offset(terms);
    for (i, term) in measured.iter().enumerate() {
        let shots = per + if i == largest { remainder } else { 0 };
        let rotated = rotate_to_measurement_basis(state, &term.word);
        let probs: Vec<f64> = rotated.amplitudes().iter().map(|a| a.norm_sqr()).collect();
        let dist = crate::environment::MeasurementDistribution::new(probs);
        let mut sum = 0.0;
        for _ in 0..shots {
            let outcome = crate::environment::single_shot(&dist, src);
            sum += word_sign(&term.word, outcome);
        }
        energy += term.coefficient * sum / shots as f64;
    }
    Ok(energy)
}

/// Infinite-shot limit: exact term expectations, no sampling.
pub fn exact_energy(terms: &[PauliTerm], state: &StateVector) -> f64 {
    let mut energy = identity_offset(terms);
    for term in terms.iter().filter(|t| !t.is_identity()) {
        let p = pauli_word_matrix(&term.word);
        let ps = apply(&p, state).expect("dims match");
        energy += term.coefficient * state.inner(&ps).re;
    }
    energy
}

fn identity_offset(terms: &[PauliTerm]) -> f64 {
    terms
        .iter()
        .filter(|t| t.is_identity())
        .map(|t| t.coefficient)
        .sum()
}

/// Parametrized trial state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnsatzParams {
    pub angles: Vec<f64>,
    pub layers: usize,
}

/// Hardware-style ansatz: per layer, a y- and z-rotation on each qubit,
/// then (for two qubits) a controlled flip from qubit 0 onto qubit 1.
pub fn ansatz_state(params: &AnsatzParams, n_qubits: usize) -> Result<StateVector> {
    let expected = params.layers * 2 * n_qubits;
    if params.angles.len() != expected {
        return Err(Error::ParamLengthMismatch {
            expected,
            actual: params.angles.len(),
        });
    }
    let dim = 1usize << n_qubits;
    let mut state = StateVector::basis(dim, 0)?;
    for layer in 0..params.layers {
        let base = layer * 2 * n_qubits;
        let mut rot: Option<ComplexMatrix> = None;
        for q in 0..n_qubits {
            let theta = params.angles[base + 2 * q];
            let lambda = params.angles[base + 2 * q + 1];
            let single = rz(lambda).mul(&ry(theta)).unwrap();
            rot = Some(match rot {
                None => single,
                Some(acc) => kron(&acc, &single),
            });
        }
        state = apply(&rot.unwrap(), &state)?;
        if n_qubits == 2 {
            state = apply(&cnot(), &state)?;
        }
    }
    Ok(state)
}

fn ry(theta: f64) -> ComplexMatrix {
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    ComplexMatrix::from_real(2, &[c, -s, s, c]).unwrap()
}

fn rz(lambda: f64) -> ComplexMatrix {
    ComplexMatrix::from_entries(
        2,
        vec![
            Complex64::new(0.0, -lambda / 2.0).exp(),
            Complex64::ZERO,
            Complex64::ZERO,
            Complex64::new(0.0, lambda / 2.0).exp(),
        ],
    )
    .unwrap()
}

fn cnot() -> ComplexMatrix {
    ComplexMatrix::from_real(
        4,
        &[
            1.0, 0.0, 0.0, 0.0, //
            0.0, 1.0, 0.0, 0.0, //
            0.0, 0.0, 0.0, 1.0, //
            0.0, 0.0, 1.0, 0.0,
        ],
    )
    .unwrap()
}

/// Result of a Nelder–Mead minimization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimizeResult {
    pub params: Vec<f64>,
    pub value: f64,
    pub eval_count: usize,
    /// False when max_evals was hit; params are then best-so-far.
    pub converged: bool,
}

const NM_REFLECT: f64 = 1.0;
const NM_EXPAND: f64 = 2.0;
const NM_CONTRACT: f64 = 0.5;
const NM_SHRINK: f64 = 0.5;
const NM_INITIAL_STEP: f64 = 0.5;

/// Derivative-free simplex minimization with standard coefficients.
/// Terminates when the simplex diameter drops below `tolerance`.
pub fn minimize(
    mut objective: impl FnMut(&[f64]) -> f64,
    initial_params: &[f64],
    tolerance: f64,
    max_evals: usize,
) -> MinimizeResult {
    let dim = initial_params.len();
    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        objective(x)
    };

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(dim + 1);
    simplex.push(initial_params.to_vec());
    for i in 0..dim {
        let mut v = initial_params.to_vec();
        v[i] += NM_INITIAL_STEP;
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| eval(v, &mut evals)).collect();

    let mut converged = false;
    loop {
        // Order vertices best-to-worst; stable sort keeps replays identical.
        let mut order: Vec<usize> = (0..=dim).collect();
        order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let diameter = simplex[1..]
            .iter()
            .map(|v| {
                v.iter()
                    .zip(&simplex[0])
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if diameter < tolerance {
            converged = true;
            break;
        }
        if evals >= max_evals {
            break;
        }

        let centroid: Vec<f64> = (0..dim)
            .map(|i| simplex[..dim].iter().map(|v| v[i]).sum::<f64>() / dim as f64)
            .collect();
        let worst = simplex[dim].clone();
        let lerp = |coef: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&worst)
                .map(|(c, w)| c + coef * (c - w))
                .collect()
        };

        let reflected = lerp(NM_REFLECT);
        let f_reflected = eval(&reflected, &mut evals);
        if f_reflected < values[0] {
            let expanded = lerp(NM_EXPAND);
            let f_expanded = eval(&expanded, &mut evals);
            if f_expanded < f_reflected {
                simplex[dim] = expanded;
                values[dim] = f_expanded;
            } else {
                simplex[dim] = reflected;
                values[dim] = f_reflected;
            }
        } else if f_reflected < values[dim - 1] {
            simplex[dim] = reflected;
            values[dim] = f_reflected;
        } else {
            let contracted = if f_reflected < values[dim] {
                lerp(NM_CONTRACT)
            } else {
                lerp(-NM_CONTRACT)
            };
            let f_contracted = eval(&contracted, &mut evals);
            if f_contracted < values[dim].min(f_reflected) {
                simplex[dim] = contracted;
                values[dim] = f_contracted;
            } else {
                for i in 1..=dim {
                    let shrunk: Vec<f64> = simplex[i]
                        .iter()
                        .zip(&simplex[0])
                        .map(|(v, b)| b + NM_SHRINK * (v - b))
                        .collect();
                    values[i] = eval(&shrunk, &mut evals);
                    simplex[i] = shrunk;
                }
            }
        }
    }

    let best = values
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| a.partial_cmp(b).unwrap())
        .map(|(i, _)| i)
        .unwrap();
    MinimizeResult {
        params: simplex[best].clone(),
        value: values[best],
        eval_count: evals,
        converged,
    }
}

/// Shot budget mode for a VQE run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ShotMode {
    Finite(usize),
    /// Analytic expectations; sanity oracle for the optimizer.
    Exact,
}

/// Trace of one VQE run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VqeRunRecord {
    pub optimizer_evals: usize,
    pub shots_per_step: usize,
    pub total_shots: u64,
    pub final_energy: f64,
    /// Exact projection of the final state onto the ground eigenspace.
    pub ground_fidelity: f64,
    pub converged: bool,
}

/// Minimize the estimated energy over the ansatz parameters.
pub fn run_vqe(
    o: &Observable,
    mode: ShotMode,
    tolerance: f64,
    max_evals: usize,
    seed: u64,
) -> Result<VqeRunRecord> {
    let terms = pauli_decompose(o)?;
    let n_qubits = o.dim().trailing_zeros() as usize;
    let n_params = 2 * n_qubits; // one layer
    let mut src = ShotSource::from_seed(seed);

    // The two-qubit landscape has stationary excited states, so restart
    // the simplex from a few seeded points and keep the lowest energy.
    let starts = if n_qubits == 1 { 1 } else { 4 };
    let mut eval_err = None;
    let mut total_evals = 0usize;
    let mut result: Option<MinimizeResult> = None;
    for start in 0..starts {
        let spread = if start == 0 { 0.1 } else { std::f64::consts::PI };
        let initial: Vec<f64> = (0..n_params)
            .map(|_| (2.0 * src.next_uniform() - 1.0) * spread)
            .collect();
        let attempt = minimize(
            |p| {
                let params = AnsatzParams {
                    angles: p.to_vec(),
                    layers: 1,
                };
                let out = ansatz_state(&params, n_qubits).and_then(|state| match mode {
                    ShotMode::Finite(shots) => estimate_energy(&terms, &state, shots, &mut src),
                    ShotMode::Exact => Ok(exact_energy(&terms, &state)),
                });
                match out {
                    Ok(e) => e,
                    Err(e) => {
                        eval_err.get_or_insert(e);
                        f64::INFINITY
                    }
                }
            },
            &initial,
            tolerance,
            max_evals,
        );
        if let Some(e) = eval_err {
            return Err(e);
        }
        total_evals += attempt.eval_count;
        if result.as_ref().is_none_or(|best| attempt.value < best.value) {
            result = Some(attempt);
        }
    }
    let mut result = result.expect("at least one start");
    result.eval_count = total_evals;

    let final_state = ansatz_state(
        &AnsatzParams {
            angles: result.params.clone(),
            layers: 1,
        },
        n_qubits,
    )?;
    let spectrum = eigendecompose(o.matrix())?;
    let ground_block = &spectrum.degenerate_blocks(1e-9)[0];
    let ground_fidelity: f64 = ground_block
        .iter()
        .map(|&i| spectrum.eigenvectors[i].inner(&final_state).norm_sqr())
        .sum();
    let shots_per_step = match mode {
        ShotMode::Finite(s) => s,
        ShotMode::Exact => 0,
    };
    Ok(VqeRunRecord {
        optimizer_evals: result.eval_count,
        shots_per_step,
        total_shots: result.eval_count as u64 * shots_per_step as u64,
        final_energy: result.value,
        ground_fidelity,
        converged: result.converged,
    })
}
