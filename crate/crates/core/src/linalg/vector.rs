//! Small helpers on state vectors stored as `[Complex64]`.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance on `| ||psi|| - 1 |` for inputs that must be unit vectors.
pub const NORM_TOL: f64 = 1e-10;

/// `<a|b> = sum conj(a_i) b_i`.
pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Returns `v / ||v||`, or `None` for a (numerically) zero vector.
pub fn normalized(v: &[Complex64]) -> Option<Vec<Complex64>> {
    let n = norm(v);
    if n < 1e-300 || !n.is_finite() {
        return None;
    }
    Some(v.iter().map(|z| z / n).collect())
}

pub fn check_unit(v: &[Complex64]) -> Result<()> {
    let n = norm(v);
    if (n - 1.0).abs() > NORM_TOL {
        return Err(Error::NotNormalized(n));
    }
    Ok(())
}

/// Tensor product of two vectors, first factor most significant.
pub fn kron(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for &x in a {
        out.extend(b.iter().map(|&y| x * y));
    }
    out
}

/// Computational basis vector `|k>` in dimension `n`.
pub fn basis(n: usize, k: usize) -> Vec<Complex64> {
    let mut v = vec![Complex64::new(0.0, 0.0); n];
    v[k] = Complex64::new(1.0, 0.0);
    v
}
