//! Distance from the origin to the numerical range `{<psi|M|psi>}` of an
//! arbitrary square matrix, with a unit vector attaining it.
//!
//! The range is convex, so its distance from 0 is the largest positive value
//! of `phi -> lambda_min((e^{i phi} M + h.c.) / 2)`.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::circlegeom::{origin_barycentric, segment_param_closest_to_origin};
use crate::error::{Error, Result};
use crate::linalg::eigen::hermitian_eigen;
use crate::linalg::{vector, ComplexMatrix};

pub const DEFAULT_PHI_SAMPLES: usize = 720;
pub const DEFAULT_REFINE_ITERS: usize = 40;
const MIN_PHI_SAMPLES: usize = 8;
/// Offset used to pick up the two support points on either side of a flat
/// edge of the range.
const EDGE_PROBE: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct NumericalRangeQuery {
    matrix: ComplexMatrix,
    phi_samples: usize,
    refine_iters: usize,
}

impl NumericalRangeQuery {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() || matrix.rows() == 0 {
            return Err(Error::NotSquare {
                rows: matrix.rows(),
                cols: matrix.cols(),
            });
        }
        Ok(Self {
            matrix,
            phi_samples: DEFAULT_PHI_SAMPLES,
            refine_iters: DEFAULT_REFINE_ITERS,
        })
    }

    pub fn with_phi_samples(mut self, n: usize) -> Result<Self> {
        if n < MIN_PHI_SAMPLES {
            return Err(Error::InvalidParameter(format!(
                "phi_samples must be at least {MIN_PHI_SAMPLES}, got {n}"
            )));
        }
        self.phi_samples = n;
        Ok(self)
    }

    pub fn with_refine_iters(mut self, n: usize) -> Self {
        self.refine_iters = n;
        self
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }
}

#[derive(Clone, Debug)]
pub struct NumericalRangeResult {
    pub distance: f64,
    pub witness: Vec<Complex64>,
    /// `<witness|M|witness>`.
    pub value: Complex64,
    /// Direction at which the support function peaked.
    pub phi: f64,
}

/// `H(phi) = cos(phi) H1 - sin(phi) H2`, the Hermitian part of `e^{i phi} M`.
struct Pencil {
    h1: ComplexMatrix,
    h2: ComplexMatrix,
    /// For 2x2 inputs, `H_k = a_k I + b_k . sigma` with real coefficients.
    pauli: Option<[[f64; 4]; 2]>,
}

fn pauli_coeffs(h: &ComplexMatrix) -> [f64; 4] {
    let a = h[(0, 0)].re;
    let d = h[(1, 1)].re;
    let off = h[(0, 1)];
    [(a + d) / 2.0, off.re, -off.im, (a - d) / 2.0]
}

impl Pencil {
    fn new(m: &ComplexMatrix) -> Self {
        let h1 = m.hermitian_part();
        let h2 = m.skew_hermitian_part();
        let pauli = (m.rows() == 2).then(|| [pauli_coeffs(&h1), pauli_coeffs(&h2)]);
        Self { h1, h2, pauli }
    }

    fn at(&self, phi: f64) -> ComplexMatrix {
        let (s, c) = phi.sin_cos();
        self.h1
            .scale(Complex64::new(c, 0.0))
            .sub(&self.h2.scale(Complex64::new(s, 0.0)))
            .expect("same shape")
    }

    fn lambda_min(&self, phi: f64) -> f64 {
        let (s, c) = phi.sin_cos();
        if let Some([p, q]) = self.pauli {
            let a = c * p[0] - s * q[0];
            let x = c * p[1] - s * q[1];
            let y = c * p[2] - s * q[2];
            let z = c * p[3] - s * q[3];
            return a - (x * x + y * y + z * z).sqrt();
        }
        let n = self.h1.rows();
        if n == 1 {
            return c * self.h1[(0, 0)].re - s * self.h2[(0, 0)].re;
        }
        hermitian_eigen(&self.at(phi)).expect("square").values[0]
    }

    fn min_vector(&self, phi: f64) -> Vec<Complex64> {
        hermitian_eigen(&self.at(phi)).expect("square").vector(0)
    }
}

/// Unit vector `psi` in `span{a, b}` with `<psi|M|psi> = (1 - t) z_a + t z_b`,
/// where `a, b` are unit vectors with values `z_a, z_b`.
pub(crate) fn mix_to_value(
    m: &ComplexMatrix,
    a: &[Complex64],
    b: &[Complex64],
    t: f64,
) -> Vec<Complex64> {
    let t = t.clamp(0.0, 1.0);
    let za = m.expectation(a).expect("shape");
    let zb = m.expectation(b).expect("shape");
    let delta = zb - za;
    let len = delta.norm();
    if t == 0.0 || len == 0.0 {
        return a.to_vec();
    }
    if t == 1.0 {
        return b.to_vec();
    }
    let w = (1.0 - t) * za + t * zb;
    // rotate so that the a and b terms of <psi|(M - w)|psi> become real
    let u_bar = delta.conj() / len;
    let ma = m.mul_vec(a).expect("shape");
    let mb = m.mul_vec(b).expect("shape");
    let ab = vector::inner(a, b);
    let c = u_bar * (vector::inner(a, &mb) - w * ab);
    let d = u_bar * (vector::inner(b, &ma) - w * ab.conj());
    let s = c - d.conj();
    let chi = if s.norm() > 0.0 { -s.arg() } else { 0.0 };
    let e = Complex64::from_polar(1.0, chi);
    let gamma = (e * c + e.conj() * d).re;
    let ra = t * len;
    let rb = (1.0 - t) * len;
    // rb rho^2 + gamma rho - ra = 0, positive root
    let disc = (gamma * gamma + 4.0 * ra * rb).sqrt();
    let rho = if gamma >= 0.0 {
        2.0 * ra / (gamma + disc)
    } else {
        (disc - gamma) / (2.0 * rb)
    };
    let psi: Vec<Complex64> = a.iter().zip(b).map(|(x, y)| x + rho * e * y).collect();
    vector::normalized(&psi).unwrap_or_else(|| a.to_vec())
}

fn golden_max(f: impl Fn(f64) -> f64, lo: f64, hi: f64, iters: usize) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..iters {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = f(x2);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

pub fn numrange_origin_distance(q: &NumericalRangeQuery) -> Result<NumericalRangeResult> {
    let m = &q.matrix;
    let pencil = Pencil::new(m);
    let n = q.phi_samples;
    let step = TAU / n as f64;

    let mut best_phi = 0.0;
    let mut best = f64::NEG_INFINITY;
    let mut samples: Vec<f64> = Vec::with_capacity(n);
    for k in 0..n {
        let phi = k as f64 * step;
        let f = pencil.lambda_min(phi);
        samples.push(phi);
        if f > best {
            best = f;
            best_phi = phi;
        }
    }
    let (rphi, rval) = golden_max(
        |p| pencil.lambda_min(p),
        best_phi - step,
        best_phi + step,
        q.refine_iters,
    );
    if rval > best {
        best = rval;
        best_phi = rphi;
    }

    if m.rows() == 1 {
        let psi = vec![Complex64::new(1.0, 0.0)];
        let z = m[(0, 0)];
        return Ok(NumericalRangeResult {
            distance: z.norm(),
            witness: psi,
            value: z,
            phi: best_phi,
        });
    }

    if best > 0.0 {
        Ok(positive_witness(m, &pencil, best, best_phi))
    } else {
        samples.push(best_phi);
        Ok(zero_witness(m, &pencil, samples, best_phi))
    }
}

/// Convenience wrapper with the default sampling.
pub fn numrange_distance(m: &ComplexMatrix) -> Result<NumericalRangeResult> {
    numrange_origin_distance(&NumericalRangeQuery::new(m.clone())?)
}

fn positive_witness(
    m: &ComplexMatrix,
    pencil: &Pencil,
    dist: f64,
    phi: f64,
) -> NumericalRangeResult {
    let v0 = pencil.min_vector(phi);
    let z0 = m.expectation(&v0).expect("shape");
    let mut best = (v0, z0);

    let a = pencil.min_vector(phi - EDGE_PROBE);
    let b = pencil.min_vector(phi + EDGE_PROBE);
    let za = m.expectation(&a).expect("shape");
    let zb = m.expectation(&b).expect("shape");
    let t = segment_param_closest_to_origin(za, zb);
    let psi = mix_to_value(m, &a, &b, t);
    let z = m.expectation(&psi).expect("shape");
    if (z.norm() - dist).abs() < (best.1.norm() - dist).abs() {
        best = (psi, z);
    }
    NumericalRangeResult {
        distance: dist,
        witness: best.0,
        value: best.1,
        phi,
    }
}

struct Support {
    z: Complex64,
    v: Vec<Complex64>,
}

fn zero_witness(
    m: &ComplexMatrix,
    pencil: &Pencil,
    mut phis: Vec<f64>,
    best_phi: f64,
) -> NumericalRangeResult {
    phis.sort_by(f64::total_cmp);
    let mut pts: Vec<Support> = Vec::with_capacity(phis.len());
    for phi in phis {
        let v = pencil.min_vector(phi);
        let z = m.expectation(&v).expect("shape");
        if pts.last().map_or(true, |p| (p.z - z).norm() > 1e-12) {
            pts.push(Support { z, v });
        }
    }
    while pts.len() > 1 && (pts[0].z - pts[pts.len() - 1].z).norm() <= 1e-12 {
        pts.pop();
    }

    let finish = |psi: Vec<Complex64>| {
        let z = m.expectation(&psi).expect("shape");
        NumericalRangeResult {
            distance: 0.0,
            witness: psi,
            value: z,
            phi: best_phi,
        }
    };
    if pts.len() == 1 {
        return finish(pts.swap_remove(0).v);
    }
    if pts.len() == 2 {
        let t = segment_param_closest_to_origin(pts[0].z, pts[1].z);
        return finish(mix_to_value(m, &pts[0].v, &pts[1].v, t));
    }

    // closest point to 0 over the fan triangles (z0, zi, zi+1), in
    // barycentric form l0 z0 + l1 zi + l2 zi+1
    let z0 = pts[0].z;
    let mut best: (f64, usize, [f64; 3]) = (f64::INFINITY, 1, [1.0, 0.0, 0.0]);
    for i in 1..pts.len() - 1 {
        let (zi, zj) = (pts[i].z, pts[i + 1].z);
        let mut cand: Vec<[f64; 3]> = Vec::with_capacity(4);
        if let Some(w) = origin_barycentric(z0, zi, zj) {
            if w.iter().all(|&x| x >= 0.0) {
                cand.push(w);
            }
        }
        let t = segment_param_closest_to_origin(z0, zi);
        cand.push([1.0 - t, t, 0.0]);
        let t = segment_param_closest_to_origin(zi, zj);
        cand.push([0.0, 1.0 - t, t]);
        let t = segment_param_closest_to_origin(z0, zj);
        cand.push([1.0 - t, 0.0, t]);
        for w in cand {
            let p = w[0] * z0 + w[1] * zi + w[2] * zj;
            if p.norm() < best.0 {
                best = (p.norm(), i, w);
            }
        }
    }
    let (_, i, [l0, l1, l2]) = best;
    let edge = l1 + l2;
    if edge <= 0.0 {
        return finish(pts[0].v.clone());
    }
    let q = mix_to_value(m, &pts[i].v, &pts[i + 1].v, l2 / edge);
    finish(mix_to_value(m, &q, &pts[0].v, l0))
}
