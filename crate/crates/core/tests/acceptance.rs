//! Acceptance gate: one test per criterion, each printing a pass line on
//! success. Run with `cargo test --test acceptance -- --nocapture` to see
//! every line.

use std::f64::consts::{FRAC_PI_2, PI};
use std::time::Instant;

use eigsolve::agent::{update_agent, AgentUnitary, RotationAngles};
use eigsolve::analysis::{
    batch_stats, exact_overlap_fidelity, exact_probability_fidelity, fidelity_from_p0,
    p0_from_fidelity, GapInfo,
};
use eigsolve::environment::{outcome_distribution, single_shot, Observable, ShotSource};
use eigsolve::experiment::{self, run_experiment, ExperimentConfig};
use eigsolve::presets::preset;
use eigsolve::qcore::{apply, eigendecompose, expm_hermitian, ComplexMatrix, StateVector};
use eigsolve::rlsolver::{
    run_batch, run_stage, ProtocolOptions, RestartSchedule, RewardState, RunRecord, StageConfig,
};
use eigsolve::vqe::{pauli_decompose, pauli_word_matrix};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

fn random_hermitian(dim: usize, rng: &mut ChaCha12Rng) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(dim).unwrap();
    for i in 0..dim {
        m[(i, i)] = Complex64::new(rng.random_range(-1.0..1.0), 0.0);
        for j in i + 1..dim {
            let e = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            m[(i, j)] = e;
            m[(j, i)] = e.conj();
        }
    }
    m
}

fn random_unitary(dim: usize, rng: &mut ChaCha12Rng) -> ComplexMatrix {
    expm_hermitian(&random_hermitian(dim, rng)).unwrap()
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn mean_iterations(records: &[RunRecord]) -> f64 {
    mean(
        &records
            .iter()
            .map(|r| r.total_iterations as f64)
            .collect::<Vec<_>>(),
    )
}

#[test]
fn criterion_01_spectrum_oracle() {
    let start = Instant::now();
    let cases: &[(&str, &[f64], f64)] = &[
        ("x-half-pi", &[-FRAC_PI_2, FRAC_PI_2], 1e-9),
        ("x-quarter-pi", &[-PI / 4.0, PI / 4.0], 1e-9),
        ("xy-gap2", &[-1.0, 1.0], 1e-9),
        ("xx", &[-1.0, -1.0, 1.0, 1.0], 1e-9),
        ("h2-0.2A", &[0.14421033, 2.6458, 4.19378967, 4.4118], 1e-6),
        ("nondeg-4", &[0.0, FRAC_PI_2, PI, 3.0 * FRAC_PI_2], 1e-9),
    ];
    for (name, expected, tol) in cases {
        let o = preset(name).unwrap();
        let spectrum = eigendecompose(o.matrix()).unwrap();
        assert_eq!(spectrum.eigenvalues.len(), expected.len(), "{name}");
        for (got, want) in spectrum.eigenvalues.iter().zip(*expected) {
            assert!((got - want).abs() < *tol, "{name}: {got} vs {want}");
        }
    }
    assert!(start.elapsed().as_secs_f64() < 1.0, "spectrum oracle too slow");
    println!("criterion 01 spectrum oracle: pass");
}

#[test]
fn criterion_02_p0_identity_suite() {
    let start = Instant::now();
    let mut rng = ChaCha12Rng::seed_from_u64(2);
    for _ in 0..1000 {
        let h = random_hermitian(2, &mut rng);
        let d = random_unitary(2, &mut rng);
        let spectrum = eigendecompose(&h).unwrap();
        let delta = (spectrum.eigenvalues[1] - spectrum.eigenvalues[0]).abs();
        let e = expm_hermitian(&h).unwrap();
        let d0 = apply(&d, &StateVector::basis(2, 0).unwrap()).unwrap();
        let p0 = d0.inner(&apply(&e, &d0).unwrap()).norm_sqr();
        let f = spectrum
            .eigenvectors
            .iter()
            .map(|v| v.inner(&d0).norm_sqr())
            .fold(0.0f64, f64::max);
        let predicted = p0_from_fidelity(f, GapInfo { delta });
        assert!((p0 - predicted).abs() < 1e-10, "p0 {p0} vs {predicted}");
    }
    assert!(start.elapsed().as_secs_f64() < 1.0, "identity suite too slow");
    println!("criterion 02 P0 identity suite: pass");
}

#[test]
fn criterion_03_p0_inversion() {
    for delta in [PI, FRAC_PI_2, 2.0] {
        let g = GapInfo { delta };
        for step in 0..=100 {
            let f = step as f64 / 100.0;
            let back = fidelity_from_p0(p0_from_fidelity(f, g), g).unwrap();
            assert!((back - f.max(1.0 - f)).abs() < 1e-12);
        }
    }
    let anchors = [
        (0.981, PI, 0.995),
        (0.930, FRAC_PI_2, 0.964),
        (0.956, 2.0, 0.984),
    ];
    for (p0, delta, expected) in anchors {
        let f = fidelity_from_p0(p0, GapInfo { delta }).unwrap();
        assert!((f - expected).abs() < 5e-4, "{p0}: {f} vs {expected}");
    }
    println!("criterion 03 P0 inversion: pass");
}

#[test]
fn criterion_04_reference_batch_statistics() {
    let n: [u64; 40] = [
        51, 59, 52, 167, 112, 205, 54, 116, 57, 43, 185, 162, 107, 113, 64, 64, 96, 190, 42, 111,
        32, 79, 61, 25, 161, 86, 107, 32, 28, 528, 44, 85, 94, 39, 149, 25, 33, 63, 197, 198,
    ];
    let f: [f64; 40] = [
        0.995, 0.991, 0.970, 0.995, 0.987, 0.997, 0.992, 0.920, 0.973, 0.985, 0.972, 0.982,
        0.942, 0.993, 0.957, 0.978, 0.913, 0.991, 0.996, 0.995, 0.991, 0.973, 0.994, 0.993,
        0.987, 0.978, 0.996, 0.994, 0.995, 0.986, 0.963, 0.962, 0.979, 0.992, 0.971, 0.982,
        0.994, 0.971, 0.984, 0.987,
    ];
    let samples: Vec<(u64, f64)> = n.iter().copied().zip(f).collect();
    let stats = batch_stats(&samples).unwrap();
    assert!((stats.mean_fidelity - 0.98).abs() <= 0.005, "{}", stats.mean_fidelity);
    assert!((stats.std_fidelity - 0.019).abs() <= 0.002, "{}", stats.std_fidelity);
    assert!((stats.mean_iterations - 103.0).abs() <= 1.0, "{}", stats.mean_iterations);
    assert_eq!(stats.min_iterations, 25);
    assert_eq!(stats.max_iterations, 528);
    println!("criterion 04 reference batch statistics: pass");
}

#[test]
fn criterion_05_single_qubit_convergence() {
    let start = Instant::now();
    let o = preset("x-half-pi").unwrap();
    let schedule = RestartSchedule::single(0.9, 1.0 / 0.9);
    let records = run_batch(&o, &schedule, 40, 1, &ProtocolOptions::default()).unwrap();
    let fidelities: Vec<f64> = records
        .iter()
        .map(|rec| exact_overlap_fidelity(&o, &rec.final_agent, 0).unwrap().0)
        .collect();
    let mean_f = mean(&fidelities);
    let high = fidelities.iter().filter(|&&f| f > 0.94).count();
    let mean_n = mean_iterations(&records);
    assert!(mean_f >= 0.95, "mean fidelity {mean_f}");
    assert!(high >= 34, "only {high}/40 runs above 0.94");
    assert!((20.0..=600.0).contains(&mean_n), "mean N {mean_n}");
    assert!(start.elapsed().as_secs_f64() < 30.0);
    println!("criterion 05 single-qubit convergence: pass");
}

#[test]
fn criterion_06_single_qubit_harder_cases() {
    let start = Instant::now();
    for name in ["x-quarter-pi", "xy-gap2"] {
        let o = preset(name).unwrap();
        let schedule = RestartSchedule::single(0.9, 1.5 / 0.9);
        let records = run_batch(&o, &schedule, 40, 1, &ProtocolOptions::default()).unwrap();
        let fidelities: Vec<f64> = records
            .iter()
            .map(|rec| exact_overlap_fidelity(&o, &rec.final_agent, 0).unwrap().0)
            .collect();
        let mean_f = mean(&fidelities);
        let mean_n = mean_iterations(&records);
        assert!(mean_f >= 0.94, "{name}: mean fidelity {mean_f}");
        assert!(mean_n <= 1000.0, "{name}: mean N {mean_n}");
    }
    assert!(start.elapsed().as_secs_f64() < 60.0);
    println!("criterion 06 single-qubit harder cases: pass");
}

/// Re-run the staged loop for one seed, checking after every stage that
/// earlier agent columns were left bit-identical.
fn assert_stage_preservation(o: &Observable, schedule: &RestartSchedule, seed: u64) {
    let dim = o.dim();
    let options = ProtocolOptions::default();
    let mut d = AgentUnitary::identity(dim).unwrap();
    let mut src = ShotSource::from_seed(seed);
    for round in &schedule.rounds {
        for s in 0..dim - 1 {
            let before = d.clone();
            let cfg = StageConfig {
                target_j: s,
                allowed_outcomes: (s..dim).collect(),
                w_threshold: options.w_threshold,
                max_iterations: options.max_iterations_per_stage,
            };
            let rs = RewardState {
                w: round.w_reset,
                r: round.r,
                p: round.p,
            };
            let (next, _) = run_stage(o, d, &cfg, rs, &mut src, &options).unwrap();
            for col in 0..s {
                for row in 0..dim {
                    assert_eq!(
                        next.matrix()[(row, col)],
                        before.matrix()[(row, col)],
                        "seed {seed}: stage {s} touched column {col}"
                    );
                }
            }
            d = next;
        }
    }
}

#[test]
fn criterion_07_two_qubit_degenerate() {
    let o = preset("xx").unwrap();
    let schedule = RestartSchedule::single(0.9, 1.0 / 0.9);
    let records = run_batch(&o, &schedule, 10, 1, &ProtocolOptions::default()).unwrap();
    for j in 0..4 {
        let mean_f = mean(
            &records
                .iter()
                .map(|rec| exact_probability_fidelity(&o, &rec.final_agent, j).unwrap())
                .collect::<Vec<_>>(),
        );
        assert!(mean_f >= 0.90, "j={j}: mean probability fidelity {mean_f}");
    }
    let mean_n = mean_iterations(&records);
    assert!(mean_n <= 2000.0, "mean N {mean_n}");
    for rec in &records {
        assert_stage_preservation(&o, &schedule, rec.seed);
    }
    println!("criterion 07 two-qubit degenerate: pass");
}

#[test]
fn criterion_08_molecular_hamiltonian() {
    let o = preset("h2-0.2A").unwrap();
    let schedule = RestartSchedule::single(0.9, 1.0 / 0.9);
    let records = run_batch(&o, &schedule, 10, 1, &ProtocolOptions::default()).unwrap();
    for j in 0..4 {
        let mean_f = mean(
            &records
                .iter()
                .map(|rec| exact_overlap_fidelity(&o, &rec.final_agent, j).unwrap().0)
                .collect::<Vec<_>>(),
        );
        assert!(mean_f >= 0.95, "j={j}: mean fidelity {mean_f}");
    }
    let mean_n = mean_iterations(&records);
    assert!(mean_n <= 1000.0, "mean N {mean_n}");
    println!("criterion 08 molecular hamiltonian: pass");
}

#[test]
fn criterion_09_nondegenerate_four_level() {
    let o = preset("nondeg-4").unwrap();
    let schedule = RestartSchedule::inverse_rounds(&[0.6, 0.7, 0.8, 0.9]);
    let records = run_batch(&o, &schedule, 10, 3, &ProtocolOptions::default()).unwrap();
    for j in 0..4 {
        let mean_f = mean(
            &records
                .iter()
                .map(|rec| exact_overlap_fidelity(&o, &rec.final_agent, j).unwrap().0)
                .collect::<Vec<_>>(),
        );
        assert!(mean_f >= 0.90, "j={j}: mean fidelity {mean_f}");
    }
    let mean_n = mean_iterations(&records);
    assert!(mean_n <= 5000.0, "mean N {mean_n}");
    println!("criterion 09 non-degenerate four-level: pass");
}

#[test]
fn criterion_10_resource_comparison() {
    let report = experiment::compare("x-half-pi", 1, None).unwrap();
    assert!(report.rl_meets_threshold, "RL fidelity {}", report.rl_min_overlap_fidelity);
    assert!(report.vqe_meets_threshold, "VQE fidelity {}", report.vqe_ground_fidelity);
    assert!(
        report.vqe_total_shots >= 10 * report.rl_total_shots,
        "VQE {} shots vs RL {} shots",
        report.vqe_total_shots,
        report.rl_total_shots
    );
    let structural = experiment::compare("xx", 1, None).unwrap();
    assert_eq!(structural.rl_eigenvector_count, 4);
    assert_eq!(structural.vqe_eigenvector_count, 1);
    println!("criterion 10 resource comparison: pass");
}

#[test]
fn criterion_11_determinism() {
    for (name, runs) in [("x-half-pi", 5), ("xx", 3), ("nondeg-4", 2)] {
        let mut blobs = Vec::new();
        for attempt in 0..2 {
            let dir = std::env::temp_dir().join(format!("eigsolve-acc-det-{name}-{attempt}"));
            let _ = std::fs::remove_dir_all(&dir);
            let config = ExperimentConfig {
                observable: name.to_string(),
                schedule: None,
                runs,
                base_seed: 7,
                estimate_shots: 200,
                options: ProtocolOptions::default(),
                out_dir: Some(dir.clone()),
            };
            run_experiment(&config).unwrap();
            blobs.push(std::fs::read(dir.join("runs.jsonl")).unwrap());
        }
        assert_eq!(blobs[0], blobs[1], "{name}: JSONL differs between reruns");
    }
    println!("criterion 11 determinism: pass");
}

#[test]
fn criterion_12_invariant_suite() {
    let start = Instant::now();

    // Unitarity under long composition chains.
    let mut rng = ChaCha12Rng::seed_from_u64(12);
    let mut d = AgentUnitary::identity(4).unwrap();
    for _ in 0..5000 {
        let j = rng.random_range(0..3usize);
        let m = rng.random_range(j + 1..4usize);
        let angles = RotationAngles {
            theta: rng.random_range(-PI..PI),
            phi: rng.random_range(-PI..PI),
            lambda: rng.random_range(-PI..PI),
        };
        d = update_agent(&d, m, j, angles).unwrap();
    }
    assert!(d.matrix().unitarity_defect() < 1e-9, "unitarity drift");

    // Stage preservation on a fresh seed.
    let o = preset("nondeg-4").unwrap();
    assert_stage_preservation(&o, &RestartSchedule::single(0.8, 1.25), 99);

    // Masked outcomes never modify the agent.
    let xx = preset("xx").unwrap();
    let cfg = StageConfig {
        target_j: 1,
        allowed_outcomes: vec![1, 2, 3],
        w_threshold: 0.1,
        max_iterations: 5,
    };
    let rs = RewardState { w: 1.0, r: 0.9, p: 1.0 / 0.9 };
    let mut src = ShotSource::from_seed(3);
    let d0 = AgentUnitary::identity(4).unwrap();
    let (d1, record) = eigsolve::rlsolver::run_stage_with_sampler(
        &xx,
        d0.clone(),
        &cfg,
        rs,
        &mut src,
        &ProtocolOptions::default(),
        0,
        None,
        |_, _| 0,
    )
    .unwrap();
    assert_eq!(record.masked_errors, 5);
    assert_eq!(record.iterations, 0);
    assert_eq!(d1.matrix().entries(), d0.matrix().entries());

    // Pauli reconstruction for presets and random Hermitians.
    let check_reconstruction = |m: &ComplexMatrix, label: &str| {
        let o = Observable::new(m.clone(), label.to_string()).unwrap();
        let terms = pauli_decompose(&o).unwrap();
        let mut rebuilt = ComplexMatrix::zeros(m.dim()).unwrap();
        for term in &terms {
            rebuilt = rebuilt
                .add(&pauli_word_matrix(&term.word).scale(Complex64::new(term.coefficient, 0.0)))
                .unwrap();
        }
        assert!(rebuilt.max_diff(m) < 1e-10, "{label}");
    };
    for name in eigsolve::presets::PRESET_NAMES {
        check_reconstruction(preset(name).unwrap().matrix(), name);
    }
    for i in 0..20 {
        let dim = if i % 2 == 0 { 2 } else { 4 };
        check_reconstruction(&random_hermitian(dim, &mut rng), "random");
    }

    // Shot frequencies match the distribution (chi-square, df = 3).
    let dist = outcome_distribution(&xx, &AgentUnitary::from_matrix(random_unitary(4, &mut rng)), 0)
        .unwrap();
    let shots = 100_000usize;
    let mut counts = [0u64; 4];
    for _ in 0..shots {
        counts[single_shot(&dist, &mut src)] += 1;
    }
    let chi2: f64 = dist
        .probabilities()
        .iter()
        .zip(&counts)
        .filter(|(p, _)| **p > 1e-12)
        .map(|(p, &c)| {
            let expected = p * shots as f64;
            (c as f64 - expected).powi(2) / expected
        })
        .sum();
    assert!(chi2 < 16.27, "chi-square {chi2}");

    assert!(start.elapsed().as_secs_f64() < 180.0);
    println!("criterion 12 invariant suite: pass");
}
