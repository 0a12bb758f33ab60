//! Distances between unitaries: per-state `d_psi`, per-density `d_rho`, the
//! spectral sup-metric and its Schatten and tensor variants.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::Serialize;

use crate::circlegeom::{
    distance_from_arc, polygon_distance_to_origin, SpectralArc, WitnessWeights,
};
use crate::error::{Error, Result};
use crate::linalg::json::vector_to_json;
use crate::linalg::unitary::validate_unitary;
use crate::linalg::{
    trace_distance, vector, ComplexMatrix, DensityState, SchattenP, UnitaryOperator,
};

/// Tolerance reported with closed-form results.
pub const METRIC_TOL: f64 = 1e-9;
/// Slack used by [`check_sandwich`].
pub const SANDWICH_SLACK: f64 = 1e-10;
/// `distinguish` calls a pair distinguishable once `d >= 1 - DISTINGUISH_TOL`.
pub const DISTINGUISH_TOL: f64 = 1e-9;

/// Products of validated unitaries drift from unitarity by a few ulps per
/// factor; this is the acceptance threshold for `U^dagger V`.
const PRODUCT_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Optimization,
    Oracle,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MetricResult {
    pub value: f64,
    pub method: Method,
    pub maximizer: Option<Vec<Complex64>>,
    pub tolerance: f64,
}

impl Serialize for MetricResult {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("MetricResult", 4)?;
        st.serialize_field("value", &self.value)?;
        st.serialize_field("method", &self.method)?;
        st.serialize_field("maximizer", &self.maximizer.as_deref().map(vector_to_json))?;
        st.serialize_field("tolerance", &self.tolerance)?;
        st.end()
    }
}

fn check_dims(u: &UnitaryOperator, v: &UnitaryOperator) -> Result<()> {
    if u.dim() != v.dim() {
        return Err(Error::dims(u.dim(), v.dim()));
    }
    Ok(())
}

/// `(U psi, V psi)` for a unit `psi`.
fn images(
    u: &UnitaryOperator,
    v: &UnitaryOperator,
    psi: &[Complex64],
) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    check_dims(u, v)?;
    if psi.len() != u.dim() {
        return Err(Error::dims(u.dim(), psi.len()));
    }
    vector::check_unit(psi)?;
    Ok((u.matrix().mul_vec(psi)?, v.matrix().mul_vec(psi)?))
}

fn overlap(u: &UnitaryOperator, v: &UnitaryOperator, psi: &[Complex64]) -> Result<Complex64> {
    let (a, b) = images(u, v, psi)?;
    Ok(vector::inner(&a, &b))
}

/// Sine of the angle between the rays of `a` and `b`, from the Lagrange
/// identity `|a|^2 |b|^2 - |<a, b>|^2 = sum_{i<j} |a_i b_j - a_j b_i|^2`.
fn ray_sine(a: &[Complex64], b: &[Complex64]) -> f64 {
    let mut wedge = 0.0;
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            wedge += (a[i] * b[j] - a[j] * b[i]).norm_sqr();
        }
    }
    let scale = vector::norm(a).powi(2) * vector::norm(b).powi(2);
    (wedge / scale).sqrt().min(1.0)
}

fn from_overlap(z: Complex64) -> f64 {
    (1.0 - z.norm_sqr()).max(0.0).sqrt().min(1.0)
}

/// `sqrt(1 - |<psi|U^dagger V|psi>|^2)`.
pub fn d_psi(u: &UnitaryOperator, v: &UnitaryOperator, psi: &[Complex64]) -> Result<f64> {
    let (a, b) = images(u, v, psi)?;
    Ok(ray_sine(&a, &b))
}

/// Trace distance between `U rho U^dagger` and `V rho V^dagger`.
pub fn d_rho(u: &UnitaryOperator, v: &UnitaryOperator, rho: &DensityState) -> Result<f64> {
    check_dims(u, v)?;
    if rho.dim() != u.dim() {
        return Err(Error::dims(u.dim(), rho.dim()));
    }
    trace_distance(&rho.conjugated_by(u)?, &rho.conjugated_by(v)?)
}

/// `(1 - |<a|U^dagger V|a>|^2 / ||a||^4)^{1/2}` for an unnormalized `a`.
pub fn d_alpha(u: &UnitaryOperator, v: &UnitaryOperator, a: &[Complex64]) -> Result<f64> {
    let n2 = vector::norm(a).powi(2);
    if n2 == 0.0 {
        return Err(Error::NotNormalized(0.0));
    }
    let unit: Vec<Complex64> = a.iter().map(|z| z / n2.sqrt()).collect();
    d_psi(u, v, &unit)
}

/// Sup-metric together with the spectral data it was read from.
#[derive(Clone, Debug)]
pub struct SupDetails {
    pub result: MetricResult,
    /// Eigenangles of `U^dagger V`, ascending, with multiplicity.
    pub eigen_angles: Vec<f64>,
    pub arc: SpectralArc,
    /// Closest hull point weights (indices into `arc.angles`).
    pub witness: WitnessWeights,
    /// `min |<psi|U^dagger V|psi>|` over unit `psi`.
    pub min_overlap: f64,
}

/// `d(U, V) = d(I, U^dagger V)` from the smallest arc covering the spectrum.
pub fn sup_distance(u: &UnitaryOperator, v: &UnitaryOperator) -> Result<MetricResult> {
    Ok(sup_distance_detailed(u, v)?.result)
}

pub fn sup_distance_detailed(u: &UnitaryOperator, v: &UnitaryOperator) -> Result<SupDetails> {
    check_dims(u, v)?;
    let (a, b) = if u.matrix().total_cmp(v.matrix()).is_le() {
        (u, v)
    } else {
        (v, u)
    };
    let w = validate_unitary(a.matrix().adjoint_mul(b.matrix())?, PRODUCT_TOL)?;
    spectral_distance(&w)
}

/// `d(I, W)` for a single unitary.
pub fn spectral_distance(w: &UnitaryOperator) -> Result<SupDetails> {
    let angles = w.eigen_angles();
    let (min_overlap, witness, arc) = polygon_distance_to_origin(angles)?;
    let value = distance_from_arc(&arc);

    // first eigenvector carrying each distinct angle
    let column_of = |idx: usize| -> usize {
        (0..angles.len())
            .find(|&k| arc.index_of(angles[k]) == idx)
            .expect("every distinct angle comes from an eigenvalue")
    };
    let maximizer = if arc.covers_semicircle {
        let mut psi = vec![Complex64::new(0.0, 0.0); w.dim()];
        for (&i, &p) in witness.support.iter().zip(&witness.weights) {
            let col = w.eigen_vector(column_of(i));
            for (x, y) in psi.iter_mut().zip(&col) {
                *x += p.sqrt() * y;
            }
        }
        vector::normalized(&psi).expect("eigenvectors are orthonormal")
    } else if arc.start == arc.end {
        w.eigen_vector(0)
    } else {
        let vs = w.eigen_vector(column_of(arc.start));
        let ve = w.eigen_vector(column_of(arc.end));
        vs.iter()
            .zip(&ve)
            .map(|(x, y)| (x + y) * FRAC_1_SQRT_2)
            .collect()
    };

    Ok(SupDetails {
        result: MetricResult {
            value,
            method: Method::ClosedForm,
            maximizer: Some(maximizer),
            tolerance: METRIC_TOL,
        },
        eigen_angles: angles.to_vec(),
        arc,
        witness,
        min_overlap,
    })
}

/// `2^{1/p} d(U, V)`.
pub fn schatten_sup_distance(u: &UnitaryOperator, v: &UnitaryOperator, p: f64) -> Result<f64> {
    let p = SchattenP::new(p)?;
    Ok(p.two_root() * sup_distance(u, v)?.value)
}

/// `|| |psi><psi| - |phi><phi| ||_p` for unit vectors.
pub fn pure_state_schatten_distance(psi: &[Complex64], phi: &[Complex64], p: f64) -> Result<f64> {
    let p = SchattenP::new(p)?;
    if psi.len() != phi.len() {
        return Err(Error::dims(psi.len(), phi.len()));
    }
    vector::check_unit(psi)?;
    vector::check_unit(phi)?;
    let diff = ComplexMatrix::outer(psi).sub(&ComplexMatrix::outer(phi))?;
    Ok(crate::linalg::schatten_norm(&diff, p))
}

/// Distance of a tensor product from the distances of its factors.
pub fn tensor_distance(d1: f64, d2: f64) -> Result<f64> {
    for d in [d1, d2] {
        if !(0.0..=1.0).contains(&d) {
            return Err(Error::OutOfRange {
                value: d,
                min: 0.0,
                max: 1.0,
            });
        }
    }
    if d1 * d1 + d2 * d2 < 1.0 {
        let v = d1 * (1.0 - d2 * d2).sqrt() + d2 * (1.0 - d1 * d1).sqrt();
        Ok(v.clamp(0.0, 1.0))
    } else {
        Ok(1.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Sandwich {
    pub lower: f64,
    pub mid: f64,
    pub upper: f64,
    pub holds: bool,
}

/// `1/2 ||(U - e^{ix} V) psi||^2 <= d_psi^2 <= ||(U - V) psi||^2` with
/// `x = -arg <psi|U^dagger V|psi>`.
pub fn check_sandwich(
    u: &UnitaryOperator,
    v: &UnitaryOperator,
    psi: &[Complex64],
) -> Result<Sandwich> {
    let z = overlap(u, v, psi)?;
    let phase = if z.norm() > 0.0 {
        z.conj() / z.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    let up = u.matrix().mul_vec(psi)?;
    let vp = v.matrix().mul_vec(psi)?;
    let lower = 0.5
        * up.iter()
            .zip(&vp)
            .map(|(a, b)| (a - phase * b).norm_sqr())
            .sum::<f64>();
    let upper = up
        .iter()
        .zip(&vp)
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>();
    let mid = from_overlap(z).powi(2);
    Ok(Sandwich {
        lower,
        mid,
        upper,
        holds: lower <= mid + SANDWICH_SLACK && mid <= upper + SANDWICH_SLACK,
    })
}

/// One-shot distinguishability verdict.
#[derive(Clone, Debug, PartialEq)]
pub struct Distinguishability {
    pub distinguishable: bool,
    pub value: f64,
    pub alpha: f64,
    /// State with orthogonal images, when distinguishable.
    pub witness: Option<Vec<Complex64>>,
    /// `|<U a, V a>|` for the witness.
    pub residual: Option<f64>,
    /// `min |<psi|U^dagger V|psi>| = cos(alpha / 2)`, when not distinguishable.
    pub overlap_bound: Option<f64>,
}

impl Serialize for Distinguishability {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Distinguishability", 6)?;
        st.serialize_field("distinguishable", &self.distinguishable)?;
        st.serialize_field("value", &self.value)?;
        st.serialize_field("alpha", &self.alpha)?;
        st.serialize_field("witness", &self.witness.as_deref().map(vector_to_json))?;
        st.serialize_field("residual", &self.residual)?;
        st.serialize_field("overlap_bound", &self.overlap_bound)?;
        st.end()
    }
}

pub fn distinguish(u: &UnitaryOperator, v: &UnitaryOperator) -> Result<Distinguishability> {
    let det = sup_distance_detailed(u, v)?;
    let value = det.result.value;
    let alpha = det.arc.alpha;
    if value >= 1.0 - DISTINGUISH_TOL {
        let psi = det
            .result
            .maximizer
            .expect("closed form always has a maximizer");
        let residual = overlap(u, v, &psi)?.norm();
        Ok(Distinguishability {
            distinguishable: true,
            value,
            alpha,
            witness: Some(psi),
            residual: Some(residual),
            overlap_bound: None,
        })
    } else {
        Ok(Distinguishability {
            distinguishable: false,
            value,
            alpha,
            witness: None,
            residual: None,
            overlap_bound: Some((alpha / 2.0).cos()),
        })
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn z() -> UnitaryOperator {
        UnitaryOperator::diagonal(&[0.0, PI])
    }

    fn plus() -> Vec<Complex64> {
        vec![c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)]
    }

    fn cnot() -> UnitaryOperator {
        let mut m = ComplexMatrix::zeros(4, 4);
        m[(0, 0)] = c(1.0, 0.0);
        m[(1, 1)] = c(1.0, 0.0);
        m[(2, 3)] = c(1.0, 0.0);
        m[(3, 2)] = c(1.0, 0.0);
        UnitaryOperator::new(m).unwrap()
    }

    #[test]
    fn d_psi_examples() {
        let i = UnitaryOperator::identity(2);
        assert_eq!(d_psi(&z(), &z(), &plus()).unwrap(), 0.0);
        assert_eq!(d_psi(&i, &z(), &[c(1.0, 0.0), c(0.0, 0.0)]).unwrap(), 0.0);
        assert!((d_psi(&i, &z(), &plus()).unwrap() - 1.0).abs() < 1e-15);
        assert!(matches!(
            d_psi(&i, &z(), &[c(1.0, 0.0), c(1.0, 0.0)]),
            Err(Error::NotNormalized(_))
        ));
        assert!(matches!(
            d_psi(&i, &UnitaryOperator::identity(3), &plus()),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn d_rho_examples() {
        let i = UnitaryOperator::identity(2);
        assert!(d_rho(&i, &z(), &DensityState::maximally_mixed(2)).unwrap() < 1e-15);
        let p = DensityState::pure(&plus()).unwrap();
        assert!((d_rho(&i, &z(), &p).unwrap() - 1.0).abs() < 1e-12);

        let zero = DensityState::pure(&[c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        let mix = DensityState::mixture(&[(0.5, &zero), (0.5, &p)]).unwrap();
        // rho - Z rho Z only keeps the off-diagonal 1/4 entries: eigenvalues +-1/2
        let d = d_rho(&i, &z(), &mix).unwrap();
        assert!((d - 0.5).abs() < 1e-12);
    }

    #[test]
    fn sup_distance_examples() {
        let i = UnitaryOperator::identity(2);
        let s = UnitaryOperator::diagonal(&[0.0, FRAC_PI_2]);
        let r = sup_distance(&i, &s).unwrap();
        assert!((r.value - FRAC_PI_4.sin()).abs() < 1e-15);
        let psi = r.maximizer.unwrap();
        assert!((d_psi(&i, &s, &psi).unwrap() - r.value).abs() < 1e-12);

        let cs = s.with_phase(Complex64::from_polar(1.0, 0.7)).unwrap();
        assert!(sup_distance(&s, &cs).unwrap().value < 1e-7);

        let i4 = UnitaryOperator::identity(4);
        let r = sup_distance(&i4, &cnot()).unwrap();
        assert_eq!(r.value, 1.0);
        let psi = r.maximizer.unwrap();
        assert!(overlap(&i4, &cnot(), &psi).unwrap().norm() < 1e-12);
    }

    #[test]
    fn sup_distance_is_symmetric_bitwise() {
        let a = UnitaryOperator::diagonal(&[0.1, 1.3, 2.0]);
        let b = UnitaryOperator::diagonal(&[0.4, 0.2, 2.9]);
        assert_eq!(
            sup_distance(&a, &b).unwrap().value,
            sup_distance(&b, &a).unwrap().value
        );
    }

    #[test]
    fn schatten_examples() {
        let i = UnitaryOperator::identity(2);
        assert!((schatten_sup_distance(&i, &z(), 2.0).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(schatten_sup_distance(&i, &z(), f64::INFINITY).unwrap(), 1.0);
        assert!((schatten_sup_distance(&i, &z(), 1.0).unwrap() - 2.0).abs() < 1e-15);
        assert!(matches!(
            schatten_sup_distance(&i, &z(), 0.5),
            Err(Error::InvalidP(_))
        ));

        // |<psi|phi>|^2 = 1/2 gives exactly 1 at p = 2
        let zero = [c(1.0, 0.0), c(0.0, 0.0)];
        assert!((pure_state_schatten_distance(&zero, &plus(), 2.0).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn tensor_examples() {
        assert_eq!(tensor_distance(0.0, 0.3).unwrap(), 0.3);
        assert!((tensor_distance(0.5, 0.5).unwrap() - 3f64.sqrt() / 2.0).abs() < 1e-15);
        assert_eq!(tensor_distance(0.8, 0.8).unwrap(), 1.0);
        assert!(matches!(
            tensor_distance(1.2, 0.0),
            Err(Error::OutOfRange { .. })
        ));
    }

    #[test]
    fn sandwich_examples() {
        let s = check_sandwich(&z(), &z(), &plus()).unwrap();
        assert_eq!((s.lower, s.mid, s.upper), (0.0, 0.0, 0.0));
        assert!(s.holds);
        let i = UnitaryOperator::identity(2);
        let s = check_sandwich(&i, &z(), &plus()).unwrap();
        assert!((s.lower - 1.0).abs() < 1e-15);
        assert!((s.mid - 1.0).abs() < 1e-15);
        assert!((s.upper - 2.0).abs() < 1e-15);
        assert!(s.holds);
    }

    #[test]
    fn distinguish_examples() {
        let i4 = UnitaryOperator::identity(4);
        let d = distinguish(&i4, &cnot()).unwrap();
        assert!(d.distinguishable);
        assert!(d.residual.unwrap() <= 1e-8);

        let i = UnitaryOperator::identity(2);
        let t = UnitaryOperator::diagonal(&[0.0, FRAC_PI_4]);
        let d = distinguish(&i, &t).unwrap();
        assert!(!d.distinguishable);
        assert!((d.overlap_bound.unwrap() - (PI / 8.0).cos()).abs() < 1e-12);

        let ct = t.with_phase(c(0.0, 1.0)).unwrap();
        let d = distinguish(&t, &ct).unwrap();
        assert!(!d.distinguishable);
        assert!((d.overlap_bound.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn d_alpha_ignores_scale() {
        let i = UnitaryOperator::identity(2);
        let a = [c(3.0, 0.0), c(3.0, 0.0)];
        assert!((d_alpha(&i, &z(), &a).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn json_shape() {
        let i = UnitaryOperator::identity(2);
        let r = sup_distance(&i, &z()).unwrap();
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        assert_eq!(v["method"], "closed_form");
        assert_eq!(v["tolerance"], 1e-9);
        assert_eq!(v["maximizer"]["cols"], 1);
    }
}
