use num_complex::Complex64;

use super::eigen::hermitian_eigen;
use super::{vector, ComplexMatrix, UnitaryOperator};
use crate::error::{Error, Result};

/// Tolerance for the trace, Hermiticity and positivity checks.
pub const DENSITY_TOL: f64 = 1e-10;

/// Positive semidefinite, trace-one matrix; `pure_vector` is kept when the
/// state was built from a unit vector.
#[derive(Clone, Debug)]
pub struct DensityState {
    matrix: ComplexMatrix,
    pure_vector: Option<Vec<Complex64>>,
}

impl DensityState {
    pub fn from_matrix(m: ComplexMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::NotSquare {
                rows: m.rows(),
                cols: m.cols(),
            });
        }
        let defect = m.hermiticity_defect();
        if defect > DENSITY_TOL {
            return Err(Error::NotDensity(format!("Hermiticity defect {defect:e}")));
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > DENSITY_TOL || tr.im.abs() > DENSITY_TOL {
            return Err(Error::NotDensity(format!("trace {tr}")));
        }
        let eig = hermitian_eigen(&m)?;
        if let Some(&lo) = eig.values.first() {
            if lo < -DENSITY_TOL {
                return Err(Error::NotDensity(format!("negative eigenvalue {lo:e}")));
            }
        }
        Ok(Self {
            matrix: m,
            pure_vector: None,
        })
    }

    /// `|psi><psi|` for a unit vector `psi`.
    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        vector::check_unit(psi)?;
        Ok(Self {
            matrix: ComplexMatrix::outer(psi),
            pure_vector: Some(psi.to_vec()),
        })
    }

    /// `I / n`.
    pub fn maximally_mixed(n: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(n).scale(Complex64::new(1.0 / n as f64, 0.0)),
            pure_vector: None,
        }
    }

    /// Convex combination `sum w_k rho_k`; weights must be non-negative and
    /// sum to one.
    pub fn mixture(parts: &[(f64, &DensityState)]) -> Result<Self> {
        let Some((_, first)) = parts.first() else {
            return Err(Error::EmptyInput);
        };
        let n = first.dim();
        let total: f64 = parts.iter().map(|(w, _)| w).sum();
        if parts.iter().any(|(w, _)| *w < 0.0) || (total - 1.0).abs() > DENSITY_TOL {
            return Err(Error::NotDensity(format!("mixture weights sum to {total}")));
        }
        let mut acc = ComplexMatrix::zeros(n, n);
        for (w, rho) in parts {
            if rho.dim() != n {
                return Err(Error::dims(n, rho.dim()));
            }
            acc = acc.add(&rho.matrix.scale(Complex64::new(*w, 0.0)))?;
        }
        Self::from_matrix(acc)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn pure_vector(&self) -> Option<&[Complex64]> {
        self.pure_vector.as_deref()
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    /// `U rho U^dagger`.
    pub fn conjugated_by(&self, u: &UnitaryOperator) -> Result<Self> {
        if u.dim() != self.dim() {
            return Err(Error::dims(self.dim(), u.dim()));
        }
        let m = u
            .matrix()
            .matmul(&self.matrix)?
            .matmul(&u.matrix().adjoint())?;
        let pure_vector = match &self.pure_vector {
            Some(v) => Some(u.matrix().mul_vec(v)?),
            None => None,
        };
        Ok(Self {
            matrix: m.hermitian_part(),
            pure_vector,
        })
    }
}

/// `||rho - sigma||_1 / 2`, from the eigenvalues of the Hermitian difference.
pub fn trace_distance(r1: &DensityState, r2: &DensityState) -> Result<f64> {
    if r1.dim() != r2.dim() {
        return Err(Error::dims(r1.dim(), r2.dim()));
    }
    // Fixed argument order keeps the function exactly symmetric.
    let (a, b) = if r1.matrix.total_cmp(&r2.matrix).is_le() {
        (r1, r2)
    } else {
        (r2, r1)
    };
    let diff = a.matrix.sub(&b.matrix)?;
    let eig = hermitian_eigen(&diff)?;
    let d = 0.5 * eig.values.iter().map(|l| l.abs()).sum::<f64>();
    Ok(d.clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use std::f64::consts::FRAC_1_SQRT_2;

    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn self_distance_zero() {
        let rho = DensityState::pure(&[c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
        assert_eq!(trace_distance(&rho, &rho).unwrap(), 0.0);
    }

    #[test]
    fn orthogonal_pure_states() {
        let a = DensityState::pure(&[c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        let b = DensityState::pure(&[c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert!((trace_distance(&a, &b).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_versus_plus() {
        // |0><0| - |+><+| = [[1/2, -1/2], [-1/2, -1/2]], eigenvalues +-1/sqrt(2).
        let a = DensityState::pure(&[c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        let b = DensityState::pure(&[c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)]).unwrap();
        assert!((trace_distance(&a, &b).unwrap() - FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn dimension_mismatch() {
        let a = DensityState::maximally_mixed(2);
        let b = DensityState::maximally_mixed(3);
        assert!(matches!(
            trace_distance(&a, &b),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn validation_rejects_bad_states() {
        let not_psd = ComplexMatrix::from_diagonal(&[c(1.5, 0.0), c(-0.5, 0.0)]);
        assert!(DensityState::from_matrix(not_psd).is_err());
        let bad_trace = ComplexMatrix::from_diagonal(&[c(0.5, 0.0), c(0.4, 0.0)]);
        assert!(DensityState::from_matrix(bad_trace).is_err());
        let non_herm = ComplexMatrix::from_rows(&[
            vec![c(0.5, 0.0), c(0.1, 0.0)],
            vec![c(0.0, 0.0), c(0.5, 0.0)],
        ])
        .unwrap();
        assert!(DensityState::from_matrix(non_herm).is_err());
        assert!(matches!(
            DensityState::pure(&[c(1.0, 0.0), c(1.0, 0.0)]),
            Err(Error::NotNormalized(_))
        ));
    }

    #[test]
    fn pure_vector_matches_matrix() {
        let psi = [c(0.6, 0.0), c(0.0, 0.8)];
        let rho = DensityState::pure(&psi).unwrap();
        let again = ComplexMatrix::outer(rho.pure_vector().unwrap());
        assert!(again.sub(rho.matrix()).unwrap().max_abs() < 1e-15);
    }
}
