//! Named observables covering the six benchmark cases.

use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use crate::environment::Observable;
use crate::error::{Error, Result};
use crate::qcore::ComplexMatrix;

/// Preset names in registry order.
pub const PRESET_NAMES: [&str; 6] = [
    "x-half-pi",
    "x-quarter-pi",
    "xy-gap2",
    "xx",
    "h2-0.2A",
    "nondeg-4",
];

/// Look up a named observable. Matrices hold τÔ with τ folded in.
pub fn preset(name: &str) -> Result<Observable> {
    let matrix = match name {
        "x-half-pi" => scaled_sigma_x(FRAC_PI_2)?,
        "x-quarter-pi" => scaled_sigma_x(FRAC_PI_4)?,
        "xy-gap2" => {
            // cos(1/10)·σx + sin(1/10)·σy, eigenvalue gap 2.
            let (c, s) = (0.1f64.cos(), 0.1f64.sin());
            ComplexMatrix::from_entries(
                2,
                vec![
                    Complex64::ZERO,
                    Complex64::new(c, -s),
                    Complex64::new(c, s),
                    Complex64::ZERO,
                ],
            )?
        }
        "xx" => ComplexMatrix::from_real(
            4,
            &[
                0.0, 0.0, 0.0, 1.0, //
                0.0, 0.0, 1.0, 0.0, //
                0.0, 1.0, 0.0, 0.0, //
                1.0, 0.0, 0.0, 0.0,
            ],
        )?,
        "h2-0.2A" => h2_matrix()?,
        "nondeg-4" => ComplexMatrix::from_real(
            4,
            &[
                PI, -PI / 2.0, -PI / 4.0, -PI / 4.0, //
                -PI / 2.0, PI, -PI / 4.0, -PI / 4.0, //
                -PI / 4.0, -PI / 4.0, PI / 2.0, 0.0, //
                -PI / 4.0, -PI / 4.0, 0.0, PI / 2.0,
            ],
        )?,
        other => return Err(Error::UnknownPreset(other.to_string())),
    };
    Observable::new(matrix, name)
}

fn scaled_sigma_x(scale: f64) -> Result<ComplexMatrix> {
    ComplexMatrix::from_real(2, &[0.0, scale, scale, 0.0])
}

/// Molecular hydrogen at 0.2 Å bond length, printed-precision couplings.
pub const H2_COUPLINGS: [f64; 6] = [2.8489, 0.5678, -1.4508, 0.6799, 0.0791, 0.0791];

fn h2_matrix() -> Result<ComplexMatrix> {
    let [g0, g1, g2, g3, g4, g5] = H2_COUPLINGS;
    ComplexMatrix::from_real(
        4,
        &[
            g0 + g1 + g2 + g3, 0.0, 0.0, g5 - g4, //
            0.0, g0 + g1 - g2 - g3, g4 + g5, 0.0, //
            0.0, g4 + g5, g0 - g1 + g2 - g3, 0.0, //
            g5 - g4, 0.0, 0.0, g0 - g1 - g2 + g3,
        ],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::check_hermitian;

    #[test]
    fn all_presets_hermitian() {
        for name in PRESET_NAMES {
            let o = preset(name).unwrap();
            assert!(check_hermitian(o.matrix(), 1e-12), "{name}");
        }
    }

    #[test]
    fn h2_corner_entry() {
        let o = preset("h2-0.2A").unwrap();
        assert!((o.matrix()[(0, 0)].re - 2.6458).abs() < 1e-10);
    }

    #[test]
    fn xx_is_antidiagonal() {
        let o = preset("xx").unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let want = if i + j == 3 { 1.0 } else { 0.0 };
                assert_eq!(o.matrix()[(i, j)].re, want);
            }
        }
    }

    #[test]
    fn unknown_preset_rejected() {
        assert!(matches!(preset("nope"), Err(Error::UnknownPreset(_))));
    }
}
