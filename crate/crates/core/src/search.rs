//! Search as approximation of a target rotation `U` by powers of a step `V`,
//! in the two-dimensional plane spanned by the marked state and its
//! complement.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, UnitaryOperator};
use crate::metrics::sup_distance;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SearchProblem {
    pub alpha: f64,
    pub theta: f64,
    pub gamma: f64,
    pub n: Option<u64>,
}

fn check_angle(name: &str, x: f64) -> Result<()> {
    if !(x > 0.0 && x < FRAC_PI_2) {
        return Err(Error::InvalidAngles(format!(
            "{name} = {x} is outside (0, pi/2)"
        )));
    }
    Ok(())
}

impl SearchProblem {
    pub fn new(alpha: f64, theta: f64, gamma: f64) -> Result<Self> {
        check_angle("alpha", alpha)?;
        check_angle("gamma", gamma)?;
        if !theta.is_finite() {
            return Err(Error::InvalidAngles(format!("theta = {theta}")));
        }
        Ok(Self {
            alpha,
            theta,
            gamma,
            n: None,
        })
    }

    /// `alpha = arcsin(1 / sqrt(N))`.
    pub fn from_n(n: u64, theta: f64, gamma: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidAngles(format!("N = {n} must be at least 2")));
        }
        let alpha = (1.0 / (n as f64).sqrt()).asin();
        Ok(Self {
            n: Some(n),
            ..Self::new(alpha, theta, gamma)?
        })
    }

    /// `ceil((pi / 2) sqrt(N))`, when `N` is known.
    pub fn sqrt_n_bound(&self) -> Option<u64> {
        self.n
            .map(|n| (FRAC_PI_2 * (n as f64).sqrt()).ceil() as u64)
    }
}

/// `[[cos x, e^{-i theta} sin x], [-e^{i theta} sin x, cos x]]`.
pub fn rotation(x: f64, theta: f64) -> ComplexMatrix {
    let (s, c) = x.sin_cos();
    let e = Complex64::from_polar(1.0, theta);
    ComplexMatrix::from_rows(&[
        vec![Complex64::new(c, 0.0), e.conj() * s],
        vec![-e * s, Complex64::new(c, 0.0)],
    ])
    .expect("2x2")
}

/// Target `U = R(pi/2 - alpha)` and step `V = R(gamma)`.
pub fn build_operators(p: &SearchProblem) -> Result<(UnitaryOperator, UnitaryOperator)> {
    let u = UnitaryOperator::new(rotation(FRAC_PI_2 - p.alpha, p.theta))?;
    let v = UnitaryOperator::new(rotation(p.gamma, p.theta))?;
    Ok((u, v))
}

/// The Hermitian reflection `[[sin a, e^{-i theta} cos a], [e^{i theta} cos a, -sin a]]`.
pub fn reflection_target(p: &SearchProblem) -> Result<UnitaryOperator> {
    let (s, c) = p.alpha.sin_cos();
    let e = Complex64::from_polar(1.0, p.theta);
    UnitaryOperator::new(ComplexMatrix::from_rows(&[
        vec![Complex64::new(s, 0.0), e.conj() * c],
        vec![e * c, Complex64::new(-s, 0.0)],
    ])?)
}

/// Initial state `sin(alpha) |psi1> + e^{i theta} cos(alpha) |psi2>`.
pub fn initial_state(p: &SearchProblem) -> Vec<Complex64> {
    vec![
        Complex64::new(p.alpha.sin(), 0.0),
        Complex64::from_polar(p.alpha.cos(), p.theta),
    ]
}

/// `d(U, V^k)` through the spectral sup-metric.
pub fn distance_after_k(p: &SearchProblem, k: u64) -> Result<f64> {
    let (u, v) = build_operators(p)?;
    Ok(sup_distance(&u, &v.pow(k)?)?.value)
}

/// `|cos(alpha + k gamma)|`.
pub fn closed_form_distance(p: &SearchProblem, k: u64) -> f64 {
    (p.alpha + k as f64 * p.gamma).cos().abs().min(1.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MinimalK {
    pub k: u64,
    pub achieved: f64,
}

/// Smallest `k` in one period `[0, ceil(pi / gamma)]` with `d(U, V^k) <= epsilon`.
pub fn minimal_k(p: &SearchProblem, epsilon: f64) -> Result<MinimalK> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "epsilon = {epsilon} is outside (0, 1)"
        )));
    }
    let period = (PI / p.gamma).ceil() as u64;
    // |cos(alpha + k gamma)| <= eps  <=>  alpha + k gamma in [acos eps, pi - acos eps]
    let lo = epsilon.acos();
    let first = ((lo - p.alpha) / p.gamma).ceil().max(0.0) as u64;

    let mut k = first.saturating_sub(1);
    while k <= period && k <= first + 1 {
        let d = distance_after_k(p, k)?;
        if d <= epsilon {
            return Ok(MinimalK { k, achieved: d });
        }
        k += 1;
    }
    // no hit near the closed-form guess: scan the period
    let mut best = MinimalK {
        k: 0,
        achieved: f64::INFINITY,
    };
    for k in 0..=period {
        let c = closed_form_distance(p, k);
        if c <= epsilon {
            let d = distance_after_k(p, k)?;
            if d <= epsilon {
                return Ok(MinimalK { k, achieved: d });
            }
        }
        if c < best.achieved {
            best = MinimalK { k, achieved: c };
        }
    }
    Err(Error::Unreachable {
        best_k: best.k,
        achieved: distance_after_k(p, best.k)?,
    })
}

/// `|<psi1|V^k|phi>|^2`.
pub fn transition_probability(p: &SearchProblem, k: u64) -> Result<f64> {
    let (_, v) = build_operators(p)?;
    let out = v.pow(k)?.matrix().mul_vec(&initial_state(p))?;
    Ok(out[0].norm_sqr())
}

#[cfg(test)]
mod tests {
    use std::f64::consts::FRAC_PI_6;

    use super::*;
    use crate::linalg::unitary::unitarity_defect;

    #[test]
    fn rejects_bad_angles() {
        assert!(SearchProblem::new(FRAC_PI_2, 0.0, 0.1).is_err());
        assert!(SearchProblem::new(0.1, 0.0, 0.0).is_err());
        assert!(SearchProblem::from_n(1, 0.0, 0.1).is_err());
    }

    #[test]
    fn operators_are_unitary() {
        let p = SearchProblem::new(FRAC_PI_6, 0.0, 0.3).unwrap();
        let (u, v) = build_operators(&p).unwrap();
        assert!(unitarity_defect(u.matrix()) < 1e-12);
        assert!(unitarity_defect(v.matrix()) < 1e-12);
        let r = reflection_target(&p).unwrap();
        assert!((r.matrix()[(0, 0)].re - 0.5).abs() < 1e-15);
        assert!((r.matrix()[(0, 1)].re - 3f64.sqrt() / 2.0).abs() < 1e-15);
        assert!(r.matrix().hermiticity_defect() < 1e-15);
    }

    #[test]
    fn distance_examples() {
        let p = SearchProblem::new(FRAC_PI_6, 0.4, FRAC_PI_6).unwrap();
        assert!((distance_after_k(&p, 0).unwrap() - FRAC_PI_6.cos()).abs() < 1e-12);
        assert!((distance_after_k(&p, 1).unwrap() - 0.5).abs() < 1e-12);
        assert!(distance_after_k(&p, 2).unwrap() < 1e-12);
    }

    #[test]
    fn reflection_is_always_at_distance_one() {
        let p = SearchProblem::new(0.3, 0.2, 0.25).unwrap();
        let (_, v) = build_operators(&p).unwrap();
        let r = reflection_target(&p).unwrap();
        for k in 0..5 {
            assert_eq!(sup_distance(&r, &v.pow(k).unwrap()).unwrap().value, 1.0);
        }
    }

    #[test]
    fn minimal_k_examples() {
        let p = SearchProblem::new(FRAC_PI_6, 0.0, FRAC_PI_6).unwrap();
        let r = minimal_k(&p, 0.01).unwrap();
        assert_eq!(r.k, 2);
        assert!(r.achieved < 1e-12);
        assert_eq!(minimal_k(&p, 0.9).unwrap().k, 0);

        let p = SearchProblem::from_n(1024, 0.0, (1.0 / 32f64).asin()).unwrap();
        let r = minimal_k(&p, 0.1).unwrap();
        assert_eq!(r.k, 47);
        assert!(r.achieved <= 0.1);
        assert!((distance_after_k(&p, 46).unwrap()) > 0.1);
        assert!(r.k <= p.sqrt_n_bound().unwrap());
    }

    #[test]
    fn unreachable_reports_best() {
        // steps of 1.2 rad starting at 0.3 never land within 0.01 of pi/2
        let p = SearchProblem::new(0.3, 0.0, 1.2).unwrap();
        match minimal_k(&p, 0.01) {
            Err(Error::Unreachable { best_k, achieved }) => {
                assert_eq!(best_k, 1);
                assert!((achieved - 1.5f64.cos().abs()).abs() < 1e-10);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn transition_probability_matches() {
        let p = SearchProblem::new(0.2, 0.7, 0.15).unwrap();
        for k in 0..8 {
            let t = transition_probability(&p, k).unwrap();
            assert!((t - (0.2 + k as f64 * 0.15).sin().powi(2)).abs() < 1e-12);
        }
    }
}
