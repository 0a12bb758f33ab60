//! Point sets on the unit circle: smallest covering arc, distance from the
//! origin to their convex hull, and convex witness weights.

use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::unitary::wrap_angle;

/// Angles closer than this (circularly) are treated as one point.
pub const ANGLE_DEDUP_TOL: f64 = 1e-9;
/// Slack on the semicircle test `alpha >= pi`.
pub const ARC_TOL: f64 = 1e-9;

/// Distinct sorted angles with multiplicities and the smallest arc covering
/// them. The arc runs counterclockwise from `angles[start]` to `angles[end]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralArc {
    pub angles: Vec<f64>,
    pub multiplicities: Vec<usize>,
    pub alpha: f64,
    pub covers_semicircle: bool,
    pub start: usize,
    pub end: usize,
}

/// Convex coefficients on a subset of the distinct angles of an arc.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WitnessWeights {
    pub support: Vec<usize>,
    pub weights: Vec<f64>,
}

impl WitnessWeights {
    /// `sum p_i e^{i theta_i}` over the support.
    pub fn point(&self, angles: &[f64]) -> Complex64 {
        self.support
            .iter()
            .zip(&self.weights)
            .map(|(&i, &p)| Complex64::from_polar(p, angles[i]))
            .sum()
    }
}

fn circular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

pub fn smallest_covering_arc(angles: &[f64]) -> Result<SpectralArc> {
    if angles.is_empty() {
        return Err(Error::EmptyInput);
    }
    if let Some(bad) = angles.iter().find(|t| !t.is_finite()) {
        return Err(Error::InvalidAngles(format!("non-finite angle {bad}")));
    }
    let mut sorted: Vec<f64> = angles.iter().map(|&t| wrap_angle(t)).collect();
    sorted.sort_by(f64::total_cmp);

    let mut distinct: Vec<f64> = Vec::new();
    let mut mult: Vec<usize> = Vec::new();
    let mut last = f64::NEG_INFINITY;
    for &t in &sorted {
        if t - last <= ANGLE_DEDUP_TOL {
            *mult.last_mut().expect("non-empty") += 1;
        } else {
            distinct.push(t);
            mult.push(1);
        }
        last = t;
    }
    // merge a cluster straddling 0 / 2pi into the first one
    if distinct.len() > 1 && distinct[0] + TAU - sorted[sorted.len() - 1] <= ANGLE_DEDUP_TOL {
        let m = mult.pop().expect("non-empty");
        distinct.pop();
        mult[0] += m;
    }

    let k = distinct.len();
    if k == 1 {
        return Ok(SpectralArc {
            angles: distinct,
            multiplicities: mult,
            alpha: 0.0,
            covers_semicircle: false,
            start: 0,
            end: 0,
        });
    }
    // gap i runs from distinct[i] to distinct[i + 1]; the last one wraps
    let mut max_gap = f64::NEG_INFINITY;
    let mut at = 0;
    for i in 0..k {
        let gap = if i + 1 < k {
            distinct[i + 1] - distinct[i]
        } else {
            distinct[0] + TAU - distinct[k - 1]
        };
        if gap > max_gap {
            max_gap = gap;
            at = i;
        }
    }
    let alpha = (TAU - max_gap).clamp(0.0, TAU);
    Ok(SpectralArc {
        angles: distinct,
        multiplicities: mult,
        alpha,
        covers_semicircle: alpha >= PI - ARC_TOL,
        start: (at + 1) % k,
        end: at,
    })
}

impl SpectralArc {
    /// Index of the distinct angle nearest (circularly) to `theta`.
    pub fn index_of(&self, theta: f64) -> usize {
        let mut best = 0;
        let mut dist = f64::INFINITY;
        for (i, &a) in self.angles.iter().enumerate() {
            let d = circular_distance(a, theta);
            if d < dist {
                dist = d;
                best = i;
            }
        }
        best
    }

    /// CSV dump `theta,re,im,multiplicity`, one row per distinct angle.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("theta,re,im,multiplicity\n");
        for (t, m) in self.angles.iter().zip(&self.multiplicities) {
            writeln!(out, "{},{},{},{}", t, t.cos(), t.sin(), m).expect("write to string");
        }
        out
    }
}

/// `sin(alpha / 2)` below a semicircle, 1 once the arc reaches it.
pub fn distance_from_arc(arc: &SpectralArc) -> f64 {
    if arc.covers_semicircle {
        1.0
    } else {
        (arc.alpha / 2.0).sin().clamp(0.0, 1.0)
    }
}

/// Closest point to the origin on segment `[a, b]`, as the parameter `t` of
/// `(1 - t) a + t b`.
pub(crate) fn segment_param_closest_to_origin(a: Complex64, b: Complex64) -> f64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return 0.0;
    }
    (-(a.re * d.re + a.im * d.im) / len2).clamp(0.0, 1.0)
}

fn cross(a: Complex64, b: Complex64) -> f64 {
    a.re * b.im - a.im * b.re
}

/// Barycentric coordinates of the origin in triangle `(a, b, c)`, or `None`
/// for a degenerate triangle.
pub(crate) fn origin_barycentric(a: Complex64, b: Complex64, c: Complex64) -> Option<[f64; 3]> {
    let area = cross(b - a, c - a);
    if area.abs() < 1e-300 {
        return None;
    }
    let wa = cross(b, c) / area;
    let wb = cross(c, a) / area;
    let wc = cross(a, b) / area;
    Some([wa, wb, wc])
}

/// Distance from 0 to the convex hull of `{e^{i theta}}`, with convex weights
/// realizing the closest point. Weight indices refer to the distinct angles
/// of the returned arc.
pub fn polygon_distance_to_origin(angles: &[f64]) -> Result<(f64, WitnessWeights, SpectralArc)> {
    let arc = smallest_covering_arc(angles)?;
    if arc.covers_semicircle {
        let w = zero_witness(&arc);
        return Ok((0.0, w, arc));
    }
    let pts: Vec<Complex64> = arc
        .angles
        .iter()
        .map(|&t| Complex64::from_polar(1.0, t))
        .collect();
    let k = pts.len();
    let mut best = (
        1.0,
        WitnessWeights {
            support: vec![0],
            weights: vec![1.0],
        },
    );
    for i in 0..k {
        for j in (i + 1)..k {
            let t = segment_param_closest_to_origin(pts[i], pts[j]);
            let d = ((1.0 - t) * pts[i] + t * pts[j]).norm();
            if d < best.0 {
                best = (
                    d,
                    WitnessWeights {
                        support: vec![i, j],
                        weights: vec![1.0 - t, t],
                    },
                );
            }
        }
    }
    Ok((best.0, best.1, arc))
}

fn zero_witness(arc: &SpectralArc) -> WitnessWeights {
    let a = &arc.angles;
    let k = a.len();
    for i in 0..k {
        for j in (i + 1)..k {
            if (circular_distance(a[i], a[j]) - PI).abs() <= ARC_TOL {
                return WitnessWeights {
                    support: vec![i, j],
                    weights: vec![0.5, 0.5],
                };
            }
        }
    }
    // triangle through both arc endpoints and the interior point that puts
    // the origin deepest inside
    let s = arc.start;
    let e = arc.end;
    let zs = Complex64::from_polar(1.0, a[s]);
    let ze = Complex64::from_polar(1.0, a[e]);
    let mut best: Option<(f64, usize, [f64; 3])> = None;
    for j in (0..k).filter(|&j| j != s && j != e) {
        let zj = Complex64::from_polar(1.0, a[j]);
        if let Some(w) = origin_barycentric(zs, zj, ze) {
            let worst = w.iter().copied().fold(f64::INFINITY, f64::min);
            if best.map_or(true, |(b, _, _)| worst > b) {
                best = Some((worst, j, w));
            }
        }
    }
    let (_, j, w) =
        best.expect("an arc of length >= pi over distinct points has an interior point");
    let clipped = w.map(|x| x.max(0.0));
    let total: f64 = clipped.iter().sum();
    WitnessWeights {
        support: vec![s, j, e],
        weights: clipped.iter().map(|x| x / total).collect(),
    }
}
