//! Pauli strings with exact phases, the groups they generate, and their
//! stabilizer faces.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, UnitaryOperator};
use crate::subsets::{null_space, SubspaceFace};

/// Largest closure that is enumerated explicitly.
pub const MAX_CLOSURE: usize = 1 << 16;
/// Largest qubit count for which dense matrices are built.
pub const MAX_DENSE_QUBITS: usize = 8;
const SNAP_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    I,
    X,
    Y,
    Z,
}

impl Letter {
    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Letter::I,
            (true, false) => Letter::X,
            (true, true) => Letter::Y,
            (false, true) => Letter::Z,
        }
    }

    pub fn bits(self) -> (bool, bool) {
        match self {
            Letter::I => (false, false),
            Letter::X => (true, false),
            Letter::Y => (true, true),
            Letter::Z => (false, true),
        }
    }

    /// Power of `i` in `self * other`.
    fn phase_of_product(self, other: Letter) -> u8 {
        use Letter::*;
        match (self, other) {
            (X, Y) | (Y, Z) | (Z, X) => 1,
            (Y, X) | (Z, Y) | (X, Z) => 3,
            _ => 0,
        }
    }

    fn matrix(self) -> [[Complex64; 2]; 2] {
        let o = Complex64::new(0.0, 0.0);
        let l = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        match self {
            Letter::I => [[l, o], [o, l]],
            Letter::X => [[o, l], [l, o]],
            Letter::Y => [[o, -i], [i, o]],
            Letter::Z => [[l, o], [o, -l]],
        }
    }

    fn as_char(self) -> char {
        match self {
            Letter::I => 'I',
            Letter::X => 'X',
            Letter::Y => 'Y',
            Letter::Z => 'Z',
        }
    }
}

/// Global phase `i^k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Phase(u8);

impl Phase {
    pub const PLUS_ONE: Phase = Phase(0);
    pub const PLUS_I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn power(self) -> u8 {
        self.0
    }

    pub fn value(self) -> Complex64 {
        [
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.0, -1.0),
        ][self.0 as usize]
    }

    fn times(self, k: u8) -> Phase {
        Phase((self.0 + k) % 4)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliElement {
    phase: Phase,
    letters: Vec<Letter>,
}

impl PauliElement {
    pub fn new(phase: Phase, letters: Vec<Letter>) -> Self {
        Self { phase, letters }
    }

    pub fn identity(n: usize) -> Self {
        Self::new(Phase::PLUS_ONE, vec![Letter::I; n])
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn num_qubits(&self) -> usize {
        self.letters.len()
    }

    /// Symplectic form `(x, z)`.
    pub fn bits(&self) -> (Vec<bool>, Vec<bool>) {
        self.letters.iter().map(|l| l.bits()).unzip()
    }

    pub fn with_phase(&self, phase: Phase) -> Self {
        Self::new(phase, self.letters.clone())
    }

    /// True when every letter is `I`.
    pub fn is_central(&self) -> bool {
        self.letters.iter().all(|&l| l == Letter::I)
    }

    /// Symplectic inner product; `true` iff the two elements commute.
    pub fn commutes_with(&self, other: &Self) -> Result<bool> {
        same_len(self, other)?;
        let odd = self
            .letters
            .iter()
            .zip(&other.letters)
            .filter(|(a, b)| {
                let (xa, za) = a.bits();
                let (xb, zb) = b.bits();
                (xa && zb) ^ (za && xb)
            })
            .count()
            % 2;
        Ok(odd == 0)
    }

    pub fn inverse(&self) -> Self {
        // letters are involutions, so only the phase is conjugated
        self.with_phase(Phase((4 - self.phase.0) % 4))
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        let n = self.num_qubits();
        if n > MAX_DENSE_QUBITS {
            return Err(Error::TooLarge(n));
        }
        let mut m = ComplexMatrix::identity(1);
        for l in &self.letters {
            let [[a, b], [c, d]] = l.matrix();
            let f = ComplexMatrix::from_rows(&[vec![a, b], vec![c, d]]).expect("2x2");
            m = m.kron(&f);
        }
        Ok(m.scale(self.phase.value()))
    }

    pub fn to_unitary(&self) -> Result<UnitaryOperator> {
        UnitaryOperator::new(self.to_matrix()?)
    }
}

fn same_len(a: &PauliElement, b: &PauliElement) -> Result<()> {
    if a.num_qubits() != b.num_qubits() {
        return Err(Error::LengthMismatch(a.num_qubits(), b.num_qubits()));
    }
    Ok(())
}

impl fmt::Display for PauliElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = ["+", "+i", "-", "-i"][self.phase.0 as usize];
        f.write_str(sign)?;
        for l in &self.letters {
            write!(f, "{}", l.as_char())?;
        }
        Ok(())
    }
}

/// Parses `[+|-|+i|-i]` followed by letters from `IXYZ`.
pub fn parse_pauli(s: &str) -> Result<PauliElement> {
    let chars: Vec<char> = s.trim().chars().collect();
    let mut pos = 0;
    let mut phase = Phase::PLUS_ONE;
    match chars.first() {
        Some('+') => pos = 1,
        Some('-') | Some('\u{2212}') => {
            phase = Phase::MINUS_ONE;
            pos = 1;
        }
        _ => {}
    }
    if pos == 1 && chars.get(1) == Some(&'i') {
        phase = phase.times(1);
        pos = 2;
    }
    let mut letters = Vec::with_capacity(chars.len());
    for (k, &ch) in chars.iter().enumerate().skip(pos) {
        let l = match ch {
            'I' => Letter::I,
            'X' => Letter::X,
            'Y' => Letter::Y,
            'Z' => Letter::Z,
            _ => {
                return Err(Error::Parse {
                    position: k,
                    message: format!("unexpected character {ch:?}"),
                })
            }
        };
        letters.push(l);
    }
    if letters.is_empty() {
        return Err(Error::Parse {
            position: chars.len(),
            message: "expected at least one Pauli letter".into(),
        });
    }
    Ok(PauliElement::new(phase, letters))
}

impl FromStr for PauliElement {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_pauli(s)
    }
}

/// Comma-separated generator list such as `+ZZ,+XX`.
pub fn parse_generators(s: &str) -> Result<Vec<PauliElement>> {
    let mut out = Vec::new();
    let mut offset = 0;
    for part in s.split(',') {
        let lead = part.len() - part.trim_start().len();
        let g = parse_pauli(part).map_err(|e| match e {
            Error::Parse { position, message } => Error::Parse {
                position: position + offset + lead,
                message,
            },
            other => other,
        })?;
        out.push(g);
        offset += part.len() + 1;
    }
    Ok(out)
}

pub fn pauli_product(a: &PauliElement, b: &PauliElement) -> Result<PauliElement> {
    same_len(a, b)?;
    let mut k = a.phase.0 + b.phase.0;
    let letters = a
        .letters
        .iter()
        .zip(&b.letters)
        .map(|(&x, &y)| {
            let ((xa, za), (xb, zb)) = (x.bits(), y.bits());
            k += x.phase_of_product(y);
            Letter::from_bits(xa ^ xb, za ^ zb)
        })
        .collect();
    Ok(PauliElement::new(Phase(k % 4), letters))
}

/// `d(a, b)`: 0 when `a^dagger b` is a multiple of the identity, else 1.
pub fn pauli_distance(a: &PauliElement, b: &PauliElement) -> Result<f64> {
    same_len(a, b)?;
    Ok(if a.letters == b.letters { 0.0 } else { 1.0 })
}

#[derive(Clone, Debug)]
pub struct PauliSubgroup {
    generators: Vec<PauliElement>,
    elements: Option<Vec<PauliElement>>,
    is_abelian: bool,
}

impl PauliSubgroup {
    pub fn generate(generators: Vec<PauliElement>) -> Result<Self> {
        let Some(first) = generators.first() else {
            return Err(Error::EmptyGenerators);
        };
        for g in &generators {
            same_len(first, g)?;
        }
        let mut is_abelian = true;
        for i in 0..generators.len() {
            for j in (i + 1)..generators.len() {
                if !generators[i].commutes_with(&generators[j])? {
                    is_abelian = false;
                }
            }
        }
        let elements = closure(&generators)?;
        Ok(Self {
            generators,
            elements,
            is_abelian,
        })
    }

    pub fn generators(&self) -> &[PauliElement] {
        &self.generators
    }

    /// The enumerated group, sorted, or `None` when it exceeds [`MAX_CLOSURE`].
    pub fn elements(&self) -> Option<&[PauliElement]> {
        self.elements.as_deref()
    }

    pub fn is_abelian(&self) -> bool {
        self.is_abelian
    }

    pub fn num_qubits(&self) -> usize {
        self.generators[0].num_qubits()
    }
}

fn closure(generators: &[PauliElement]) -> Result<Option<Vec<PauliElement>>> {
    let n = generators[0].num_qubits();
    let id = PauliElement::identity(n);
    let mut seen: HashSet<PauliElement> = HashSet::from([id.clone()]);
    let mut frontier = vec![id];
    while let Some(x) = frontier.pop() {
        for g in generators {
            let y = pauli_product(&x, g)?;
            if seen.insert(y.clone()) {
                if seen.len() > MAX_CLOSURE {
                    return Ok(None);
                }
                frontier.push(y);
            }
        }
    }
    let mut all: Vec<PauliElement> = seen.into_iter().collect();
    all.sort();
    Ok(Some(all))
}

/// Maximal face on which every generator acts as a constant.
#[derive(Clone, Debug)]
pub struct StabilizerFace {
    pub face: SubspaceFace,
    /// `c(g)` for each generator, snapped to a fourth root of unity.
    pub characters: Vec<Complex64>,
}

#[derive(Clone, Debug)]
pub struct StabilizerResult {
    pub faces: Vec<StabilizerFace>,
    pub non_abelian: bool,
}

fn snap(z: Complex64) -> Complex64 {
    for k in 0..4u8 {
        let r = Phase(k).value();
        if (z - r).norm() <= SNAP_TOL {
            return r;
        }
    }
    z
}

/// Joint eigenspaces of the generators; empty with `non_abelian` set when
/// two generators anticommute.
pub fn stabilizer_subspace(k: &PauliSubgroup) -> Result<StabilizerResult> {
    if !k.is_abelian() {
        return Ok(StabilizerResult {
            faces: Vec::new(),
            non_abelian: true,
        });
    }
    let ops = k
        .generators()
        .iter()
        .map(|g| g.to_unitary())
        .collect::<Result<Vec<_>>>()?;
    let ns = null_space(&ops)?;
    let faces = (0..ns.blocks.len())
        .map(|b| StabilizerFace {
            face: ns.block_face(b),
            characters: ns.blocks[b].character.iter().map(|&z| snap(z)).collect(),
        })
        .collect();
    Ok(StabilizerResult {
        faces,
        non_abelian: false,
    })
}

/// Rayleigh quotient of `g` on the first basis vector of `face`.
pub fn face_character(face: &SubspaceFace, g: &PauliElement) -> Result<Complex64> {
    let m = g.to_matrix()?;
    if m.rows() != face.ambient_dim() {
        return Err(Error::dims(face.ambient_dim(), m.rows()));
    }
    Ok(snap(m.expectation(&face.basis().column(0))?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::vector;
    use crate::metrics::sup_distance;

    fn p(s: &str) -> PauliElement {
        parse_pauli(s).unwrap()
    }

    #[test]
    fn parsing() {
        let e = p("+ZZ");
        assert_eq!(e.phase(), Phase::PLUS_ONE);
        assert_eq!(e.letters(), &[Letter::Z, Letter::Z]);
        let e = p("-iXY");
        assert_eq!(e.phase(), Phase::MINUS_I);
        assert_eq!(e.letters(), &[Letter::X, Letter::Y]);
        assert_eq!(p("+iX").phase(), Phase::PLUS_I);
        assert_eq!(p("-Z").phase(), Phase::MINUS_ONE);
        match parse_pauli("XQ") {
            Err(Error::Parse { position, .. }) => assert_eq!(position, 1),
            other => panic!("{other:?}"),
        }
        assert!(parse_pauli("+").is_err());
        assert!(parse_pauli("iX").is_err());
    }

    #[test]
    fn display_round_trip() {
        for s in ["+XYZ", "-iI", "+iZ", "-XX"] {
            assert_eq!(p(s).to_string(), s);
        }
    }

    #[test]
    fn generator_lists() {
        let gs = parse_generators("+ZZ,+XX").unwrap();
        assert_eq!(gs.len(), 2);
        match parse_generators("+ZZ,+XQ") {
            Err(Error::Parse { position, .. }) => assert_eq!(position, 6),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn products() {
        let xy = pauli_product(&p("X"), &p("Y")).unwrap();
        assert_eq!(xy, p("+iZ"));
        assert_eq!(pauli_product(&p("Z"), &p("Z")).unwrap(), p("+I"));
        assert_eq!(pauli_product(&p("XZ"), &p("ZX")).unwrap(), p("+YY"));
        assert!(matches!(
            pauli_product(&p("X"), &p("XX")),
            Err(Error::LengthMismatch(1, 2))
        ));
    }

    #[test]
    fn products_match_matrices() {
        let letters = ["I", "X", "Y", "Z"];
        for a in letters {
            for b in letters {
                let (pa, pb) = (p(a), p(b));
                let prod = pauli_product(&pa, &pb).unwrap().to_matrix().unwrap();
                let dense = pa
                    .to_matrix()
                    .unwrap()
                    .matmul(&pb.to_matrix().unwrap())
                    .unwrap();
                assert!(prod.sub(&dense).unwrap().max_abs() < 1e-15, "{a}{b}");
            }
        }
    }

    #[test]
    fn distances() {
        assert_eq!(pauli_distance(&p("X"), &p("X")).unwrap(), 0.0);
        assert_eq!(pauli_distance(&p("X"), &p("+iX")).unwrap(), 0.0);
        assert_eq!(pauli_distance(&p("II"), &p("ZZ")).unwrap(), 1.0);
        let dense = sup_distance(
            &p("II").to_unitary().unwrap(),
            &p("ZZ").to_unitary().unwrap(),
        )
        .unwrap();
        assert_eq!(dense.value, 1.0);
    }

    #[test]
    fn squares_are_real() {
        for s in ["X", "+iY", "-iXZ", "-YY"] {
            let e = p(s);
            let sq = pauli_product(&e, &e).unwrap();
            assert!(sq.is_central());
            assert!(sq.phase() == Phase::PLUS_ONE || sq.phase() == Phase::MINUS_ONE);
        }
    }

    #[test]
    fn closure_sizes() {
        let k = PauliSubgroup::generate(vec![p("ZZ"), p("XX")]).unwrap();
        assert!(k.is_abelian());
        assert_eq!(k.elements().unwrap().len(), 4);
        let k = PauliSubgroup::generate(vec![p("X"), p("Z")]).unwrap();
        assert!(!k.is_abelian());
        // the single-qubit group modulo nothing: {+-1, +-i} x {I, X, Y, Z}
        assert_eq!(k.elements().unwrap().len(), 8);
        let k = PauliSubgroup::generate(vec![p("X"), p("Z"), p("+iI")]).unwrap();
        assert_eq!(k.elements().unwrap().len(), 16);
    }

    #[test]
    fn zz_stabilizer() {
        let k = PauliSubgroup::generate(vec![p("+ZZ")]).unwrap();
        let r = stabilizer_subspace(&k).unwrap();
        assert!(!r.non_abelian);
        assert_eq!(r.faces.len(), 2);
        for f in &r.faces {
            assert_eq!(f.face.dim(), 2);
            let c = f.characters[0];
            assert!(c == Complex64::new(1.0, 0.0) || c == Complex64::new(-1.0, 0.0));
            let proj = f.face.projector();
            // +1 face is span{|00>, |11>}, -1 face is span{|01>, |10>}
            let (inside, outside) = if c.re > 0.0 {
                ([0, 3], [1, 2])
            } else {
                ([1, 2], [0, 3])
            };
            for i in inside {
                assert!((proj[(i, i)].re - 1.0).abs() < 1e-12);
            }
            for i in outside {
                assert!(proj[(i, i)].norm() < 1e-12);
            }
        }
    }

    #[test]
    fn anticommuting_is_empty() {
        let k = PauliSubgroup::generate(vec![p("X"), p("Z")]).unwrap();
        let r = stabilizer_subspace(&k).unwrap();
        assert!(r.faces.is_empty());
        assert!(r.non_abelian);
    }

    #[test]
    fn characters_multiply() {
        let k = PauliSubgroup::generate(vec![p("ZZ"), p("XX")]).unwrap();
        let r = stabilizer_subspace(&k).unwrap();
        assert_eq!(r.faces.len(), 4);
        let gh = pauli_product(&p("ZZ"), &p("XX")).unwrap();
        for f in &r.faces {
            let c = face_character(&f.face, &gh).unwrap();
            assert!((c - f.characters[0] * f.characters[1]).norm() < 1e-10);
            assert!(vector::norm(&f.face.basis().column(0)) > 0.0);
        }
    }

    #[test]
    fn too_large_for_dense() {
        let big = parse_pauli(&"Z".repeat(9)).unwrap();
        assert!(matches!(big.to_matrix(), Err(Error::TooLarge(9))));
    }
}
