//! Distances restricted to subsets of states: subspace faces, product
//! states, and joint eigenspaces of commuting unitaries.

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::eigen::normal_eigen;
use crate::linalg::random::{random_unit_vector, seeded_rng};
use crate::linalg::{vector, ComplexMatrix, UnitaryOperator};
use crate::metrics::{Method, MetricResult};
use crate::numrange::numrange_distance;

/// Orthonormality tolerance for face bases.
pub const FACE_TOL: f64 = 1e-10;
/// `||[g, h]||_max` above this rejects a generator set.
pub const COMMUTE_TOL: f64 = 1e-8;
/// Eigenvalues of a generator closer than this share a block.
const CHARACTER_TOL: f64 = 1e-7;
/// Tolerance reported with numerical-range based results.
pub const NUMRANGE_TOL: f64 = 1e-6;

/// States supported on the span of `basis`' orthonormal columns.
#[derive(Clone, Debug)]
pub struct SubspaceFace {
    basis: ComplexMatrix,
}

impl SubspaceFace {
    pub fn new(basis: ComplexMatrix) -> Result<Self> {
        if basis.cols() == 0 || basis.cols() > basis.rows() {
            return Err(Error::NotAFace(f64::INFINITY));
        }
        let gram = basis.adjoint_mul(&basis)?;
        let dev = gram.sub(&ComplexMatrix::identity(basis.cols()))?.max_abs();
        if dev > FACE_TOL {
            return Err(Error::NotAFace(dev));
        }
        Ok(Self { basis })
    }

    pub fn full(n: usize) -> Self {
        Self {
            basis: ComplexMatrix::identity(n),
        }
    }

    pub fn from_vectors(vs: &[Vec<Complex64>]) -> Result<Self> {
        Self::new(ComplexMatrix::from_columns(vs)?)
    }

    pub fn basis(&self) -> &ComplexMatrix {
        &self.basis
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    /// Orthogonal projector onto the face.
    pub fn projector(&self) -> ComplexMatrix {
        self.basis
            .matmul(&self.basis.adjoint())
            .expect("shapes agree")
    }
}

/// `sup` of `d_psi(U, V)` over unit `psi` in the face.
pub fn face_distance(
    u: &UnitaryOperator,
    v: &UnitaryOperator,
    face: &SubspaceFace,
) -> Result<MetricResult> {
    if u.dim() != v.dim() {
        return Err(Error::dims(u.dim(), v.dim()));
    }
    if face.ambient_dim() != u.dim() {
        return Err(Error::dims(u.dim(), face.ambient_dim()));
    }
    let w = u.matrix().adjoint_mul(v.matrix())?;
    let m = w.compress(&face.basis)?;
    let nr = numrange_distance(&m)?;
    let psi = face.basis.mul_vec(&nr.witness)?;
    Ok(MetricResult {
        value: (1.0 - nr.distance * nr.distance).max(0.0).sqrt().min(1.0),
        method: Method::Optimization,
        maximizer: Some(psi),
        tolerance: NUMRANGE_TOL,
    })
}

/// Bipartite split `C^m (x) C^n` for the product-state distance.
#[derive(Clone, Debug, PartialEq)]
pub struct SeparableProblem {
    pub dim_a: usize,
    pub dim_b: usize,
    pub restarts: usize,
    pub max_alternations: usize,
    pub seed: u64,
}

impl SeparableProblem {
    pub fn new(dim_a: usize, dim_b: usize, seed: u64) -> Self {
        Self {
            dim_a,
            dim_b,
            restarts: 32,
            max_alternations: 200,
            seed,
        }
    }
}

/// Objective history of one restart, one entry per full alternation
/// (the first entry is the starting point).
#[derive(Clone, Debug)]
pub struct RestartTrace {
    pub objective: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct SeparableOutcome {
    pub result: MetricResult,
    /// Smallest `|<a (x) b|W|a (x) b>|` found.
    pub min_overlap: f64,
    pub factors: (Vec<Complex64>, Vec<Complex64>),
    pub best_restart: usize,
    pub traces: Vec<RestartTrace>,
}

/// `(I (x) <b|) W (I (x) |b>)`.
fn compress_b(w: &ComplexMatrix, m: usize, n: usize, b: &[Complex64]) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(m, m);
    for i in 0..m {
        for k in 0..m {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..n {
                let bj = b[j].conj();
                for l in 0..n {
                    acc += bj * w[(i * n + j, k * n + l)] * b[l];
                }
            }
            out[(i, k)] = acc;
        }
    }
    out
}

/// `(<a| (x) I) W (|a> (x) I)`.
fn compress_a(w: &ComplexMatrix, m: usize, n: usize, a: &[Complex64]) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        for l in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..m {
                let ai = a[i].conj();
                for k in 0..m {
                    acc += ai * w[(i * n + j, k * n + l)] * a[k];
                }
            }
            out[(j, l)] = acc;
        }
    }
    out
}

fn product_objective(w: &ComplexMatrix, a: &[Complex64], b: &[Complex64]) -> f64 {
    w.expectation(&vector::kron(a, b)).expect("shape").norm()
}

/// Sup over product states, by alternating minimization of
/// `|<a (x) b|W|a (x) b>|`. The value is a lower bound on the true
/// restricted sup (an upper bound on the overlap).
pub fn separable_distance(
    u: &UnitaryOperator,
    v: &UnitaryOperator,
    prob: &SeparableProblem,
) -> Result<MetricResult> {
    Ok(separable_distance_traced(u, v, prob)?.result)
}

pub fn separable_distance_traced(
    u: &UnitaryOperator,
    v: &UnitaryOperator,
    prob: &SeparableProblem,
) -> Result<SeparableOutcome> {
    if u.dim() != v.dim() {
        return Err(Error::dims(u.dim(), v.dim()));
    }
    let (m, n) = (prob.dim_a, prob.dim_b);
    if m == 0 || n == 0 || m * n != u.dim() {
        return Err(Error::dims(format!("{m}x{n}"), u.dim()));
    }
    if prob.restarts == 0 {
        return Err(Error::InvalidParameter("restarts must be positive".into()));
    }
    let w = u.matrix().adjoint_mul(v.matrix())?;
    let mut rng = seeded_rng(prob.seed);
    let starts: Vec<(Vec<Complex64>, Vec<Complex64>)> = (0..prob.restarts)
        .map(|_| {
            (
                random_unit_vector(m, &mut rng),
                random_unit_vector(n, &mut rng),
            )
        })
        .collect();

    let runs: Vec<(f64, Vec<Complex64>, Vec<Complex64>, RestartTrace)> = starts
        .into_iter()
        .map(|(a, b)| alternate(&w, m, n, a, b, prob.max_alternations))
        .collect::<Result<_>>()?;

    let mut best = 0;
    for (i, r) in runs.iter().enumerate() {
        if r.0 < runs[best].0 {
            best = i;
        }
    }
    let mut traces = Vec::with_capacity(runs.len());
    let mut best_run = None;
    for (i, (f, a, b, t)) in runs.into_iter().enumerate() {
        if i == best {
            best_run = Some((f, a, b));
        }
        traces.push(t);
    }
    let (f, a, b) = best_run.expect("at least one restart");
    Ok(SeparableOutcome {
        result: MetricResult {
            value: (1.0 - f * f).max(0.0).sqrt().min(1.0),
            method: Method::Optimization,
            maximizer: Some(vector::kron(&a, &b)),
            tolerance: NUMRANGE_TOL,
        },
        min_overlap: f,
        factors: (a, b),
        best_restart: best,
        traces,
    })
}

const STALL_TOL: f64 = 1e-10;
const ZERO_OBJECTIVE: f64 = 1e-12;

fn alternate(
    w: &ComplexMatrix,
    m: usize,
    n: usize,
    mut a: Vec<Complex64>,
    mut b: Vec<Complex64>,
    max_alternations: usize,
) -> Result<(f64, Vec<Complex64>, Vec<Complex64>, RestartTrace)> {
    let mut f = product_objective(w, &a, &b);
    let mut objective = vec![f];
    for _ in 0..max_alternations {
        let prev = f;
        let cand = numrange_distance(&compress_b(w, m, n, &b))?.witness;
        let fc = product_objective(w, &cand, &b);
        if fc <= f {
            a = cand;
            f = fc;
        }
        let cand = numrange_distance(&compress_a(w, m, n, &a))?.witness;
        let fc = product_objective(w, &a, &cand);
        if fc <= f {
            b = cand;
            f = fc;
        }
        objective.push(f);
        if prev - f < STALL_TOL || f < ZERO_OBJECTIVE {
            break;
        }
    }
    Ok((f, a, b, RestartTrace { objective }))
}

/// One joint eigenspace of a commuting family.
#[derive(Clone, Debug, PartialEq)]
pub struct Block {
    /// Eigenvalue of each generator on the block, in generator order.
    pub character: Vec<Complex64>,
    /// Columns of `common_eigenbasis` spanning the block.
    pub basis_columns: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct NullSpaceResult {
    pub common_eigenbasis: ComplexMatrix,
    pub blocks: Vec<Block>,
}

impl NullSpaceResult {
    pub fn block_face(&self, k: usize) -> SubspaceFace {
        SubspaceFace {
            basis: self
                .common_eigenbasis
                .select_columns(&self.blocks[k].basis_columns),
        }
    }
}

impl Serialize for NullSpaceResult {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        #[derive(Serialize)]
        struct BlockJson<'a> {
            character: Vec<[f64; 2]>,
            basis_columns: &'a [usize],
        }
        let blocks: Vec<BlockJson> = self
            .blocks
            .iter()
            .map(|b| BlockJson {
                character: b.character.iter().map(|z| [z.re, z.im]).collect(),
                basis_columns: &b.basis_columns,
            })
            .collect();
        let mut st = s.serialize_struct("NullSpaceResult", 2)?;
        st.serialize_field("blocks", &blocks)?;
        st.serialize_field("basis", &self.common_eigenbasis)?;
        st.end()
    }
}

/// Groups indices whose values lie within `tol` of each other (single
/// linkage), preserving first-seen order.
fn cluster(values: &[Complex64], tol: f64) -> Vec<Vec<usize>> {
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut label: Vec<Option<usize>> = vec![None; values.len()];
    for i in 0..values.len() {
        if label[i].is_some() {
            continue;
        }
        let g = groups.len();
        label[i] = Some(g);
        let mut members = vec![i];
        let mut head = 0;
        while head < members.len() {
            let p = members[head];
            head += 1;
            for j in 0..values.len() {
                if label[j].is_none() && (values[j] - values[p]).norm() <= tol {
                    label[j] = Some(g);
                    members.push(j);
                }
            }
        }
        members.sort_unstable();
        groups.push(members);
    }
    groups
}

/// Simultaneous eigenspaces of pairwise commuting unitaries.
pub fn null_space(generators: &[UnitaryOperator]) -> Result<NullSpaceResult> {
    let Some(first) = generators.first() else {
        return Err(Error::EmptyGenerators);
    };
    let n = first.dim();
    for g in generators {
        if g.dim() != n {
            return Err(Error::dims(n, g.dim()));
        }
    }
    for i in 0..generators.len() {
        for j in (i + 1)..generators.len() {
            let (a, b) = (generators[i].matrix(), generators[j].matrix());
            let comm = a.matmul(b)?.sub(&b.matmul(a)?)?.max_abs();
            if comm > COMMUTE_TOL {
                return Err(Error::NotCommuting(i, j, comm));
            }
        }
    }

    let mut blocks: Vec<ComplexMatrix> = vec![ComplexMatrix::identity(n)];
    for g in generators {
        let mut next = Vec::with_capacity(blocks.len());
        for b in &blocks {
            let c = g.matrix().compress(b)?;
            let eig = normal_eigen(&c)?;
            let rotated = b.matmul(&eig.vectors)?;
            for group in cluster(&eig.values, CHARACTER_TOL) {
                next.push(rotated.select_columns(&group));
            }
        }
        blocks = next;
    }

    let mut columns = Vec::with_capacity(n);
    let mut out_blocks = Vec::with_capacity(blocks.len());
    for b in &blocks {
        let start = columns.len();
        columns.extend(b.columns());
        let character = generators
            .iter()
            .map(|g| {
                let mean: Complex64 = b
                    .columns()
                    .iter()
                    .map(|v| g.matrix().expectation(v).expect("shape"))
                    .sum::<Complex64>()
                    / b.cols() as f64;
                mean / mean.norm()
            })
            .collect();
        out_blocks.push(Block {
            character,
            basis_columns: (start..columns.len()).collect(),
        });
    }
    Ok(NullSpaceResult {
        common_eigenbasis: ComplexMatrix::from_columns(&columns)?,
        blocks: out_blocks,
    })
}

/// Random product state `a (x) b`, mostly for tests and benchmarks.
pub fn random_product_state<R: Rng + ?Sized>(m: usize, n: usize, rng: &mut R) -> Vec<Complex64> {
    let a = random_unit_vector(m, rng);
    let b = random_unit_vector(n, rng);
    vector::kron(&a, &b)
}
