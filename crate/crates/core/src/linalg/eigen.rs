//! Eigensolvers.
//!
//! Hermitian problems go to a closed form for 2x2 blocks and to nalgebra's
//! Householder/QL solver otherwise. Normal (in particular unitary) matrices are
//! split as `W = H1 + i H2` with commuting Hermitian parts; `H1` is
//! diagonalized first and the compression of `H2` resolves each degenerate
//! eigenspace of `H1`.

use nalgebra::linalg::SymmetricEigen;
use num_complex::Complex64;

use super::ComplexMatrix;
use crate::error::{Error, Result};

/// Relative threshold for grouping eigenvalues of `H1` into one eigenspace.
pub const CLUSTER_TOL: f64 = 1e-8;

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Columns are the orthonormal eigenvectors, in the order of `values`.
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn vector(&self, k: usize) -> Vec<Complex64> {
        self.vectors.column(k)
    }
}

/// Diagonalizes a Hermitian matrix. Only the Hermitian part of `m` is used.
pub fn hermitian_eigen(m: &ComplexMatrix) -> Result<HermitianEigen> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    match m.rows() {
        0 => Ok(HermitianEigen {
            values: Vec::new(),
            vectors: ComplexMatrix::zeros(0, 0),
        }),
        1 => Ok(HermitianEigen {
            values: vec![m[(0, 0)].re],
            vectors: ComplexMatrix::identity(1),
        }),
        2 => Ok(hermitian_eigen_2x2(m)),
        _ => Ok(hermitian_eigen_dense(m)),
    }
}

fn hermitian_eigen_2x2(m: &ComplexMatrix) -> HermitianEigen {
    let a = m[(0, 0)].re;
    let d = m[(1, 1)].re;
    let b = (m[(0, 1)] + m[(1, 0)].conj()) * 0.5;
    let mean = 0.5 * (a + d);
    let half = 0.5 * (a - d);
    let r = half.hypot(b.norm());
    let lo = mean - r;
    let hi = mean + r;
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);

    let (v_lo, v_hi) = if b.norm() <= f64::EPSILON * (a.abs() + d.abs()).max(f64::MIN_POSITIVE) {
        if a <= d {
            ([one, zero], [zero, one])
        } else {
            ([zero, one], [one, zero])
        }
    } else {
        // (H - lo) v = 0; pick the better conditioned of the two row equations.
        let cand1 = [b, Complex64::new(lo - a, 0.0)];
        let cand2 = [Complex64::new(lo - d, 0.0), b.conj()];
        let n1 = cand1[0].norm_sqr() + cand1[1].norm_sqr();
        let n2 = cand2[0].norm_sqr() + cand2[1].norm_sqr();
        let (v, n) = if n1 >= n2 { (cand1, n1) } else { (cand2, n2) };
        let n = n.sqrt();
        let v_lo = [v[0] / n, v[1] / n];
        // Orthogonal complement in C^2.
        let v_hi = [-v_lo[1].conj(), v_lo[0].conj()];
        (v_lo, v_hi)
    };
    let mut vectors = ComplexMatrix::zeros(2, 2);
    vectors[(0, 0)] = v_lo[0];
    vectors[(1, 0)] = v_lo[1];
    vectors[(0, 1)] = v_hi[0];
    vectors[(1, 1)] = v_hi[1];
    HermitianEigen {
        values: vec![lo, hi],
        vectors,
    }
}

fn hermitian_eigen_dense(m: &ComplexMatrix) -> HermitianEigen {
    let h = m.hermitian_part().to_nalgebra();
    let eig = SymmetricEigen::new(h);
    let n = m.rows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (jj, &j) in order.iter().enumerate() {
        for i in 0..n {
            vectors[(i, jj)] = eig.eigenvectors[(i, j)];
        }
    }
    HermitianEigen { values, vectors }
}

/// Eigen-decomposition of a normal matrix; eigenvalues are Rayleigh quotients
/// of the returned orthonormal eigenvectors.
#[derive(Clone, Debug)]
pub struct NormalEigen {
    pub values: Vec<Complex64>,
    pub vectors: ComplexMatrix,
}

/// Diagonalizes a normal matrix through its two commuting Hermitian parts.
pub fn normal_eigen(w: &ComplexMatrix) -> Result<NormalEigen> {
    if !w.is_square() {
        return Err(Error::NotSquare {
            rows: w.rows(),
            cols: w.cols(),
        });
    }
    let n = w.rows();
    let h1 = w.hermitian_part();
    let h2 = w.skew_hermitian_part();
    let e1 = hermitian_eigen(&h1)?;
    let scale = e1.values.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));

    let mut columns: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && e1.values[end] - e1.values[end - 1] <= CLUSTER_TOL * scale {
            end += 1;
        }
        if end - start == 1 {
            columns.push(e1.vector(start));
        } else {
            let idx: Vec<usize> = (start..end).collect();
            let basis = e1.vectors.select_columns(&idx);
            let inner = hermitian_eigen(&h2.compress(&basis)?)?;
            let rotated = basis.matmul(&inner.vectors)?;
            columns.extend(rotated.columns());
        }
        start = end;
    }

    let values = columns
        .iter()
        .map(|v| w.expectation(v))
        .collect::<Result<Vec<_>>>()?;
    Ok(NormalEigen {
        values,
        vectors: ComplexMatrix::from_columns(&columns)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::vector;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn residual(m: &ComplexMatrix, v: &[Complex64], lambda: Complex64) -> f64 {
        let mv = m.mul_vec(v).unwrap();
        mv.iter()
            .zip(v)
            .map(|(a, b)| (a - lambda * b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    #[test]
    fn two_by_two_closed_form() {
        let h = ComplexMatrix::from_rows(&[
            vec![c(2.0, 0.0), c(1.0, -1.0)],
            vec![c(1.0, 1.0), c(-1.0, 0.0)],
        ])
        .unwrap();
        let e = hermitian_eigen(&h).unwrap();
        // trace 1, det -4: lambda = (1 +- sqrt(17)) / 2
        assert!((e.values[0] - (1.0 - 17f64.sqrt()) / 2.0).abs() < 1e-14);
        assert!((e.values[1] - (1.0 + 17f64.sqrt()) / 2.0).abs() < 1e-14);
        for k in 0..2 {
            assert!(residual(&h, &e.vector(k), c(e.values[k], 0.0)) < 1e-13);
        }
        assert!(vector::inner(&e.vector(0), &e.vector(1)).norm() < 1e-14);
    }

    #[test]
    fn two_by_two_diagonal_ordering() {
        let h = ComplexMatrix::from_diagonal(&[c(3.0, 0.0), c(-1.0, 0.0)]);
        let e = hermitian_eigen(&h).unwrap();
        assert_eq!(e.values, vec![-1.0, 3.0]);
        assert_eq!(e.vector(0), vec![c(0.0, 0.0), c(1.0, 0.0)]);
    }

    #[test]
    fn dense_path_sorted_and_accurate() {
        let h = ComplexMatrix::from_rows(&[
            vec![c(1.0, 0.0), c(0.0, 1.0), c(0.5, 0.0)],
            vec![c(0.0, -1.0), c(2.0, 0.0), c(0.0, 0.0)],
            vec![c(0.5, 0.0), c(0.0, 0.0), c(-1.0, 0.0)],
        ])
        .unwrap();
        let e = hermitian_eigen(&h).unwrap();
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        for k in 0..3 {
            assert!(residual(&h, &e.vector(k), c(e.values[k], 0.0)) < 1e-12);
        }
    }

    #[test]
    fn normal_eigen_resolves_conjugate_pairs() {
        // diag(e^{i t}, e^{-i t}) has a doubly degenerate Hermitian part.
        let t = 0.7;
        let w = ComplexMatrix::from_phases(&[t, -t, 0.0]);
        let e = normal_eigen(&w).unwrap();
        for k in 0..3 {
            assert!(residual(&w, &e.vectors.column(k), e.values[k]) < 1e-14);
        }
        let mut args: Vec<f64> = e.values.iter().map(|z| z.arg()).collect();
        args.sort_by(f64::total_cmp);
        assert!(
            (args[0] + t).abs() < 1e-14 && args[1].abs() < 1e-14 && (args[2] - t).abs() < 1e-14
        );
    }
}
