//! Schatten-p norms from singular values.

use super::ComplexMatrix;
use crate::error::{Error, Result};

/// Schatten exponent: a finite `p >= 1` or the operator norm.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SchattenP {
    Finite(f64),
    Infinity,
}

impl SchattenP {
    pub fn new(p: f64) -> Result<Self> {
        if p.is_infinite() && p > 0.0 {
            Ok(SchattenP::Infinity)
        } else if p >= 1.0 {
            Ok(SchattenP::Finite(p))
        } else {
            Err(Error::InvalidP(p))
        }
    }

    /// `2^{1/p}`, the pure-state scaling factor (1 for `p = infinity`).
    pub fn two_root(self) -> f64 {
        match self {
            SchattenP::Finite(p) => 2f64.powf(1.0 / p),
            SchattenP::Infinity => 1.0,
        }
    }
}

impl From<SchattenP> for f64 {
    fn from(p: SchattenP) -> f64 {
        match p {
            SchattenP::Finite(p) => p,
            SchattenP::Infinity => f64::INFINITY,
        }
    }
}

pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    if m.rows() == 0 || m.cols() == 0 {
        return Vec::new();
    }
    m.to_nalgebra().singular_values().iter().copied().collect()
}

/// `(sum s_i^p)^{1/p}`; `p = infinity` gives the largest singular value.
pub fn schatten_norm(m: &ComplexMatrix, p: SchattenP) -> f64 {
    let s = singular_values(m);
    match p {
        SchattenP::Infinity => s.iter().copied().fold(0.0, f64::max),
        SchattenP::Finite(p) => {
            let top = s.iter().copied().fold(0.0, f64::max);
            if top == 0.0 {
                return 0.0;
            }
            // scale by the largest value so large p does not overflow
            top * s
                .iter()
                .map(|x| (x / top).powf(p))
                .sum::<f64>()
                .powf(1.0 / p)
        }
    }
}
