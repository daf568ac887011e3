//! Observable file format and machine-readable result emission.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analysis::{BatchStats, FidelityReport};
use crate::environment::Observable;
use crate::error::{Error, Result};
use crate::presets;
use crate::qcore::ComplexMatrix;
use crate::rlsolver::RunRecord;

/// On-disk observable document: dim, label, and dim×dim [re, im] pairs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ObservableFile {
    pub dim: usize,
    pub label: String,
    pub matrix: Vec<Vec<[f64; 2]>>,
}

impl ObservableFile {
    pub fn from_observable(o: &Observable) -> Self {
        let dim = o.dim();
        let matrix = (0..dim)
            .map(|i| {
                (0..dim)
                    .map(|j| {
                        let e = o.matrix()[(i, j)];
                        [e.re, e.im]
                    })
                    .collect()
            })
            .collect();
        Self {
            dim,
            label: o.label().to_string(),
            matrix,
        }
    }

    pub fn into_observable(self) -> Result<Observable> {
        let mut entries = Vec::with_capacity(self.dim * self.dim);
        for row in &self.matrix {
            if row.len() != self.dim {
                return Err(Error::Parse(format!(
                    "matrix row has {} entries, expected {}",
                    row.len(),
                    self.dim
                )));
            }
            for &[re, im] in row {
                entries.push(Complex64::new(re, im));
            }
        }
        if self.matrix.len() != self.dim {
            return Err(Error::Parse(format!(
                "matrix has {} rows, expected {}",
                self.matrix.len(),
                self.dim
            )));
        }
        Observable::new(ComplexMatrix::from_entries(self.dim, entries)?, self.label)
    }
}

/// Resolve a preset name or parse an observable file.
pub fn load_observable(path_or_name: &str) -> Result<Observable> {
    if presets::PRESET_NAMES.contains(&path_or_name) {
        return presets::preset(path_or_name);
    }
    let path = Path::new(path_or_name);
    if !path.exists() {
        return Err(Error::UnknownPreset(path_or_name.to_string()));
    }
    let text = std::fs::read_to_string(path)?;
    let doc: ObservableFile = serde_json::from_str(&text).map_err(|e| {
        Error::Parse(format!(
            "{}: line {}, column {}: {}",
            path.display(),
            e.line(),
            e.column(),
            e
        ))
    })?;
    doc.into_observable()
}

/// Write an observable in the round-trippable file format.
pub fn write_observable(o: &Observable, path: &Path) -> Result<()> {
    let doc = ObservableFile::from_observable(o);
    let mut text = serde_json::to_string_pretty(&doc)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

/// One JSONL line: run record plus its fidelity report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunOutput {
    pub schema_version: String,
    pub run_index: usize,
    pub record: RunRecord,
    pub fidelities: FidelityReport,
}

pub const SCHEMA_VERSION: &str = "1";

pub fn write_jsonl(outputs: &[RunOutput], path: &Path) -> Result<()> {
    let mut text = String::new();
    for output in outputs {
        text.push_str(&serde_json::to_string(output)?);
        text.push('\n');
    }
    std::fs::write(path, text)?;
    Ok(())
}

/// Summary CSV: one row per (metric, basis index).
pub fn write_summary_csv(rows: &[(String, usize, BatchStats)], path: &Path) -> Result<()> {
    let mut text =
        String::from("metric,basis_index,mean_fidelity,std_fidelity,mean_iterations,min_iterations,max_iterations\n");
    for (metric, basis, stats) in rows {
        text.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            metric,
            basis,
            stats.mean_fidelity,
            stats.std_fidelity,
            stats.mean_iterations,
            stats.min_iterations,
            stats.max_iterations
        ));
    }
    std::fs::write(path, text)?;
    Ok(())
}

pub fn write_histogram_csv(stats: &BatchStats, path: &Path) -> Result<()> {
    let mut text = String::from("bin_left,bin_right,count\n");
    for bin in &stats.histogram {
        text.push_str(&format!("{},{},{}\n", bin.bin_left, bin.bin_right, bin.count));
    }
    std::fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn observable_round_trip_is_bit_identical() {
        let dir = std::env::temp_dir().join("eigsolve-io-test");
        std::fs::create_dir_all(&dir).unwrap();
        for name in presets::PRESET_NAMES {
            let o = presets::preset(name).unwrap();
            let path = dir.join(format!("{name}.json"));
            write_observable(&o, &path).unwrap();
            let back = load_observable(path.to_str().unwrap()).unwrap();
            assert_eq!(back.matrix().entries(), o.matrix().entries(), "{name}");
        }
    }

    #[test]
    fn load_by_preset_name() {
        let o = load_observable("h2-0.2A").unwrap();
        assert!((o.matrix()[(0, 0)].re - 2.6458).abs() < 1e-12);
    }

    #[test]
    fn load_unknown_name_fails() {
        assert!(matches!(
            load_observable("no-such-preset"),
            Err(Error::UnknownPreset(_))
        ));
    }

    #[test]
    fn load_non_hermitian_file_fails_with_entry_pair() {
        let dir = std::env::temp_dir().join("eigsolve-io-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("nonherm.json");
        std::fs::write(
            &path,
            r#"{"dim":2,"label":"bad","matrix":[[[0.0,0.0],[1.0,0.0]],[[2.0,0.0],[0.0,0.0]]]}"#,
        )
        .unwrap();
        match load_observable(path.to_str().unwrap()) {
            Err(Error::NonHermitianInput { row, col, .. }) => {
                assert_eq!((row, col), (0, 1));
            }
            other => panic!("expected NonHermitianInput, got {other:?}"),
        }
    }

    #[test]
    fn parse_error_reports_position() {
        let dir = std::env::temp_dir().join("eigsolve-io-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("broken.json");
        std::fs::write(&path, "{\"dim\": 2,\n  broken\n}").unwrap();
        match load_observable(path.to_str().unwrap()) {
            Err(Error::Parse(msg)) => assert!(msg.contains("line 2"), "{msg}"),
            other => panic!("expected Parse, got {other:?}"),
        }
    }
}
