//! Fixtures shared by the benches.

use unimetric::linalg::random::haar_random_unitary;
use unimetric::pauli::{parse_pauli, PauliElement};
use unimetric::UnitaryOperator;

/// Two Haar-random unitaries of dimension `n`.
pub fn unitary_pair(n: usize, seed: u64) -> (UnitaryOperator, UnitaryOperator) {
    (
        haar_random_unitary(n, seed),
        haar_random_unitary(n, seed.wrapping_add(1)),
    )
}

/// `Z_i Z_{i+1}` and `X_i X_{i+1}` on a line of `n` qubits.
pub fn chain_generators(n: usize) -> Vec<PauliElement> {
    let mut out = Vec::new();
    for i in 0..n.saturating_sub(1) {
        for letter in ['Z', 'X'] {
            let s: String = (0..n)
                .map(|j| if j == i || j == i + 1 { letter } else { 'I' })
                .collect();
            out.push(parse_pauli(&s).expect("valid Pauli string"));
        }
    }
    out
}
