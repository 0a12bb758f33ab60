//! Independent reference computations used to cross-check the closed forms.
//! Nothing here touches eigen-decompositions of the operators under test.

use num_complex::Complex64;
use rand::Rng;

use crate::linalg::random::random_unit_vector;
use crate::linalg::{vector, ComplexMatrix, UnitaryOperator};

/// `<psi|U^dagger V|psi>` and `U^dagger V psi` from matrix-vector products.
fn form(
    u: &ComplexMatrix,
    v: &ComplexMatrix,
    psi: &[Complex64],
) -> (Complex64, Vec<Complex64>, Vec<Complex64>) {
    let up = u.mul_vec(psi).expect("shape");
    let vp = v.mul_vec(psi).expect("shape");
    let z = vector::inner(&up, &vp);
    // W psi = U^dagger V psi and W^dagger psi = V^dagger U psi
    let w_psi = u.adjoint().mul_vec(&vp).expect("shape");
    let wd_psi = v.adjoint().mul_vec(&up).expect("shape");
    (z, w_psi, wd_psi)
}

/// Minimizes `|<psi|U^dagger V|psi>|^2` on the unit sphere from one start by
/// projected gradient descent with backtracking. Returns the final overlap
/// modulus and state.
fn descend(
    u: &ComplexMatrix,
    v: &ComplexMatrix,
    mut psi: Vec<Complex64>,
    max_iters: usize,
) -> (f64, Vec<Complex64>) {
    let (mut z, mut w_psi, mut wd_psi) = form(u, v, &psi);
    let mut g = z.norm_sqr();
    let mut step = 1.0;
    for _ in 0..max_iters {
        // Wirtinger gradient of |z|^2, projected on the tangent space
        let grad: Vec<Complex64> = w_psi
            .iter()
            .zip(&wd_psi)
            .map(|(a, b)| z.conj() * a + z * b)
            .collect();
        let radial = vector::inner(&psi, &grad).re;
        let tangent: Vec<Complex64> = grad
            .iter()
            .zip(&psi)
            .map(|(gi, p)| gi - radial * p)
            .collect();
        let gnorm2: f64 = tangent.iter().map(|t| t.norm_sqr()).sum();
        if gnorm2 < 1e-30 || g < 1e-30 {
            break;
        }
        let mut accepted = false;
        while step > 1e-16 {
            let trial: Vec<Complex64> = psi
                .iter()
                .zip(&tangent)
                .map(|(p, t)| p - step * t)
                .collect();
            let trial = vector::normalized(&trial).expect("non-zero");
            let (tz, tw, twd) = form(u, v, &trial);
            let tg = tz.norm_sqr();
            if tg <= g - 1e-4 * step * gnorm2 {
                psi = trial;
                z = tz;
                w_psi = tw;
                wd_psi = twd;
                g = tg;
                step *= 2.0;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    (g.sqrt(), psi)
}

/// `sup_psi d_psi(U, V)` by multistart local optimization over pure states.
pub fn sup_by_optimization<R: Rng + ?Sized>(
    u: &UnitaryOperator,
    v: &UnitaryOperator,
    starts: usize,
    rng: &mut R,
) -> (f64, Vec<Complex64>) {
    let n = u.dim();
    let mut best = (f64::INFINITY, Vec::new());
    for _ in 0..starts {
        let psi = random_unit_vector(n, rng);
        let (m, p) = descend(u.matrix(), v.matrix(), psi, 5000);
        if m < best.0 {
            best = (m, p);
        }
    }
    ((1.0 - best.0 * best.0).max(0.0).sqrt(), best.1)
}

/// `k` nearly uniform qubit states from a Fibonacci lattice on the Bloch sphere.
pub fn fibonacci_qubit_states(k: usize) -> Vec<[Complex64; 2]> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..k)
        .map(|i| {
            let zc = 1.0 - 2.0 * (i as f64 + 0.5) / k as f64;
            let polar = zc.clamp(-1.0, 1.0).acos();
            let azimuth = golden * i as f64;
            [
                Complex64::new((polar / 2.0).cos(), 0.0),
                Complex64::from_polar((polar / 2.0).sin(), azimuth),
            ]
        })
        .collect()
}

/// `min |<a (x) b|W|a (x) b>|` over a grid of two-qubit product states.
pub fn product_grid_min(w: &ComplexMatrix, points: usize) -> f64 {
    assert_eq!(w.rows(), 4, "grid oracle is for two qubits");
    let grid = fibonacci_qubit_states(points);
    let mut best = f64::INFINITY;
    for a in &grid {
        // M_a[j][l] = sum_{i,k} conj(a_i) W[(2i + j, 2k + l)] a_k
        let mut m = [[Complex64::new(0.0, 0.0); 2]; 2];
        for (j, row) in m.iter_mut().enumerate() {
            for (l, cell) in row.iter_mut().enumerate() {
                for i in 0..2 {
                    for k in 0..2 {
                        *cell += a[i].conj() * w[(2 * i + j, 2 * k + l)] * a[k];
                    }
                }
            }
        }
        for b in &grid {
            let mb0 = m[0][0] * b[0] + m[0][1] * b[1];
            let mb1 = m[1][0] * b[0] + m[1][1] * b[1];
            let val = (b[0].conj() * mb0 + b[1].conj() * mb1).norm();
            if val < best {
                best = val;
            }
        }
    }
    best
}
