//! Positive-definite repair by eigenvalue clipping.
//!
//! Pairwise polychoric matrices need not be positive definite, and the
//! selection algorithm requires PD input. Repair clips eigenvalues below the
//! floor, reconstructs, and rescales back to unit diagonal. Rescaling can
//! drag the smallest eigenvalue slightly back under the floor, so the
//! clip/rescale step repeats (with an escalating clip target) until the
//! spectrum clears `floor·(1 − 1e-6)`.

use nalgebra::DMatrix;

use crate::corr::{max_asymmetry, CorrelationMatrix};
use crate::error::{Error, Result};

/// Default eigenvalue floor for repaired correlation matrices.
pub const DEFAULT_PD_FLOOR: f64 = 1e-8;

/// Clip eigenvalues of a symmetric unit-diagonal matrix to at least `floor`
/// and rescale to a correlation matrix.
///
/// Already-compliant input is returned unchanged with `repaired() == false`.
/// The output satisfies `smallest_eigenvalue ≥ floor·(1 − 1e-6)`.
pub fn repair_pd(matrix: &DMatrix<f64>, floor: f64) -> Result<CorrelationMatrix> {
    let p = matrix.nrows();
    if p == 0 {
        return Err(Error::EmptyInput);
    }
    assert!(matrix.is_square(), "repair_pd requires a square matrix");
    assert!(floor > 0.0 && floor.is_finite(), "floor must be positive");
    let max_dev = max_asymmetry(matrix);
    if max_dev > 1e-9 {
        return Err(Error::NotSymmetric { max_dev });
    }
    for i in 0..p {
        let d = matrix[(i, i)];
        if (d - 1.0).abs() > 1e-8 {
            return Err(Error::NotUnitDiagonal { index: i, value: d });
        }
    }

    // Work on an exactly symmetric, exactly unit-diagonal copy.
    let mut work = matrix.clone();
    for i in 0..p {
        work[(i, i)] = 1.0;
        for j in (i + 1)..p {
            let v = 0.5 * (work[(i, j)] + work[(j, i)]);
            work[(i, j)] = v;
            work[(j, i)] = v;
        }
    }

    let target_min = floor * (1.0 - 1e-6);
    let eigen = work.clone().symmetric_eigen();
    let min_eig = eigen.eigenvalues.min();
    if min_eig >= target_min {
        return Ok(CorrelationMatrix::from_validated(work, None, false, Vec::new()));
    }

    let mut clip = floor;
    for round in 0..100 {
        let eigen = work.clone().symmetric_eigen();
        if eigen.eigenvalues.min() >= target_min {
            return Ok(CorrelationMatrix::from_validated(work, None, true, Vec::new()));
        }
        let clipped = eigen.eigenvalues.map(|l| l.max(clip));
        let q = &eigen.eigenvectors;
        let rebuilt = q * DMatrix::from_diagonal(&clipped) * q.transpose();
        let scale: Vec<f64> = (0..p).map(|i| rebuilt[(i, i)].sqrt()).collect();
        for i in 0..p {
            work[(i, i)] = 1.0;
            for j in (i + 1)..p {
                let v = (rebuilt[(i, j)] / (scale[i] * scale[j])).clamp(-1.0, 1.0);
                work[(i, j)] = v;
                work[(j, i)] = v;
            }
        }
        if round >= 10 {
            clip *= 2.0;
        }
    }
    Err(Error::RepairFailed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use nalgebra::dmatrix;

    fn min_eig(m: &DMatrix<f64>) -> f64 {
        m.clone().symmetric_eigen().eigenvalues.min()
    }

    #[test]
    fn pd_input_returned_unchanged() {
        let m = dmatrix![1.0, 0.3, 0.1; 0.3, 1.0, -0.2; 0.1, -0.2, 1.0];
        let r = repair_pd(&m, DEFAULT_PD_FLOOR).unwrap();
        assert!(!r.repaired());
        for i in 0..3 {
            for j in 0..3 {
                assert_abs_diff_eq!(r.values()[(i, j)], m[(i, j)], epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn indefinite_equicorrelation_is_repaired() {
        // All off-diagonals −0.6: smallest eigenvalue 1 − 2·0.6 = −0.2.
        let m = dmatrix![1.0, -0.6, -0.6; -0.6, 1.0, -0.6; -0.6, -0.6, 1.0];
        assert!(min_eig(&m) < 0.0);
        let r = repair_pd(&m, DEFAULT_PD_FLOOR).unwrap();
        assert!(r.repaired());
        assert!(min_eig(r.values()) >= DEFAULT_PD_FLOOR * (1.0 - 1e-6));
        for i in 0..3 {
            assert_eq!(r.values()[(i, i)], 1.0);
        }
    }

    #[test]
    fn asymmetric_input_is_rejected() {
        let m = dmatrix![1.0, 0.5; 0.4, 1.0];
        assert!(matches!(
            repair_pd(&m, DEFAULT_PD_FLOOR),
            Err(Error::NotSymmetric { .. })
        ));
    }

    #[test]
    fn non_unit_diagonal_is_rejected() {
        let m = dmatrix![2.0, 0.5; 0.5, 2.0];
        assert!(matches!(
            repair_pd(&m, DEFAULT_PD_FLOOR),
            Err(Error::NotUnitDiagonal { .. })
        ));
    }

    #[test]
    fn custom_floor_is_honored() {
        let m = dmatrix![1.0, -0.6, -0.6; -0.6, 1.0, -0.6; -0.6, -0.6, 1.0];
        let floor = 1e-3;
        let r = repair_pd(&m, floor).unwrap();
        assert!(min_eig(r.values()) >= floor * (1.0 - 1e-6));
    }

    #[test]
    fn severely_indefinite_matrix_converges() {
        // Equicorrelation −0.3 at p = 6: eigenvalue 1 + 5·(−0.3) = −0.5.
        let p = 6;
        let m = DMatrix::from_fn(p, p, |i, j| if i == j { 1.0 } else { -0.3 });
        let r = repair_pd(&m, DEFAULT_PD_FLOOR).unwrap();
        assert!(r.repaired());
        assert!(min_eig(r.values()) >= DEFAULT_PD_FLOOR * (1.0 - 1e-6));
        for i in 0..p {
            assert_eq!(r.values()[(i, i)], 1.0);
            for j in 0..p {
                assert!(r.values()[(i, j)].abs() <= 1.0);
            }
        }
    }
}
