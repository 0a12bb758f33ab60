use std::f64::consts::TAU;

use num_complex::Complex64;

use super::eigen::normal_eigen;
use super::ComplexMatrix;
use crate::error::{Error, Result};

/// Default tolerance on `||U^dagger U - I||_max`.
pub const UNITARITY_TOL: f64 = 1e-10;
/// Tolerance on eigenpair residuals `||U v - e^{i t} v||`.
pub const EIGEN_TOL: f64 = 1e-8;

/// Maps an angle into `[0, 2pi)`.
pub fn wrap_angle(t: f64) -> f64 {
    let r = t.rem_euclid(TAU);
    // rem_euclid can round up to exactly 2pi for tiny negative inputs
    if r >= TAU {
        0.0
    } else {
        r + 0.0
    }
}

/// A validated unitary with its spectral decomposition.
///
/// `eigen_angles` are sorted ascending in `[0, 2pi)`; column `k` of
/// `eigen_vectors` is the eigenvector for `e^{i eigen_angles[k]}`.
#[derive(Clone, Debug)]
pub struct UnitaryOperator {
    matrix: ComplexMatrix,
    eigen_angles: Vec<f64>,
    eigen_vectors: ComplexMatrix,
}

/// Checks unitarity within `tol` and computes the spectral decomposition.
pub fn validate_unitary(m: ComplexMatrix, tol: f64) -> Result<UnitaryOperator> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let deviation = unitarity_defect(&m);
    if deviation > tol {
        return Err(Error::NotUnitary(deviation));
    }
    let eig = normal_eigen(&m)?;
    let n = m.rows();
    let raw: Vec<f64> = eig.values.iter().map(|z| wrap_angle(z.arg())).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| raw[i].total_cmp(&raw[j]));
    Ok(UnitaryOperator {
        eigen_angles: order.iter().map(|&i| raw[i]).collect(),
        eigen_vectors: eig.vectors.select_columns(&order),
        matrix: m,
    })
}

/// `||M^dagger M - I||_max`.
pub fn unitarity_defect(m: &ComplexMatrix) -> f64 {
    match m.adjoint_mul(m) {
        Ok(p) => p
            .sub(&ComplexMatrix::identity(m.cols()))
            .map_or(f64::INFINITY, |d| d.max_abs()),
        Err(_) => f64::INFINITY,
    }
}

impl UnitaryOperator {
    /// Validates with the default tolerance [`UNITARITY_TOL`].
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        validate_unitary(m, UNITARITY_TOL)
    }

    pub fn identity(n: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(n),
            eigen_angles: vec![0.0; n],
            eigen_vectors: ComplexMatrix::identity(n),
        }
    }

    /// `diag(e^{i t_k})`.
    pub fn diagonal(angles: &[f64]) -> Self {
        let mut order: Vec<usize> = (0..angles.len()).collect();
        let wrapped: Vec<f64> = angles.iter().map(|&t| wrap_angle(t)).collect();
        order.sort_by(|&i, &j| wrapped[i].total_cmp(&wrapped[j]));
        Self {
            matrix: ComplexMatrix::from_phases(angles),
            eigen_angles: order.iter().map(|&i| wrapped[i]).collect(),
            eigen_vectors: ComplexMatrix::identity(angles.len()).select_columns(&order),
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn eigen_angles(&self) -> &[f64] {
        &self.eigen_angles
    }

    pub fn eigen_vectors(&self) -> &ComplexMatrix {
        &self.eigen_vectors
    }

    pub fn eigen_vector(&self, k: usize) -> Vec<Complex64> {
        self.eigen_vectors.column(k)
    }

    pub fn eigenvalues(&self) -> Vec<Complex64> {
        self.eigen_angles
            .iter()
            .map(|&t| Complex64::from_polar(1.0, t))
            .collect()
    }

    pub fn adjoint(&self) -> Result<Self> {
        Self::new(self.matrix.adjoint())
    }

    /// `self * other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::dims(self.dim(), other.dim()));
        }
        Self::new(self.matrix.matmul(&other.matrix)?)
    }

    /// `self^dagger * other`.
    pub fn adjoint_compose(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::dims(self.dim(), other.dim()));
        }
        Self::new(self.matrix.adjoint_mul(&other.matrix)?)
    }

    pub fn kron(&self, other: &Self) -> Result<Self> {
        Self::new(self.matrix.kron(&other.matrix))
    }

    /// `c * U` for `|c| = 1`.
    pub fn with_phase(&self, c: Complex64) -> Result<Self> {
        Self::new(self.matrix.scale(c))
    }

    pub fn pow(&self, k: u64) -> Result<Self> {
        Self::new(self.matrix.pow(k)?)
    }

    /// `||V diag(e^{i t}) V^dagger - U||_max`.
    pub fn reconstruction_error(&self) -> f64 {
        let d = ComplexMatrix::from_phases(&self.eigen_angles);
        self.eigen_vectors
            .matmul(&d)
            .and_then(|vd| vd.matmul(&self.eigen_vectors.adjoint()))
            .and_then(|r| r.sub(&self.matrix))
            .map_or(f64::INFINITY, |e| e.max_abs())
    }

    /// Largest eigenpair residual `||U v_k - e^{i t_k} v_k||`.
    pub fn max_eigen_residual(&self) -> f64 {
        (0..self.dim())
            .map(|k| {
                let v = self.eigen_vector(k);
                let uv = self.matrix.mul_vec(&v).expect("square");
                let lambda = Complex64::from_polar(1.0, self.eigen_angles[k]);
                uv.iter()
                    .zip(&v)
                    .map(|(a, b)| (a - lambda * b).norm_sqr())
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max)
    }
}
