//! Named two-qubit states shipped as fixture files.

use std::f64::consts::FRAC_1_SQRT_2;

use super::DensityMatrix;
use crate::linalg::{kron, Complex64, ComplexMatrix};

fn ket(v: [f64; 4]) -> Vec<Complex64> {
    v.iter().map(|&x| Complex64::new(x, 0.0)).collect()
}

/// `|Φ⁺⟩⟨Φ⁺|`, `|Φ⁺⟩ = (|00⟩ + |11⟩)/√2`
pub fn bell() -> DensityMatrix {
    DensityMatrix::pure(&ket([FRAC_1_SQRT_2, 0.0, 0.0, FRAC_1_SQRT_2]), (2, 2)).expect("pure state")
}

/// `t·|Φ⁺⟩⟨Φ⁺| + (1 − t)·τ`, separable iff `t ≤ 1/3`.
pub fn werner(t: f64) -> DensityMatrix {
    bell()
        .mix(&DensityMatrix::maximally_mixed((2, 2)), t)
        .expect("t in [0, 1]")
}

/// `|0⟩⟨0| ⊗ 1/2`
pub fn zero_tensor_tau() -> DensityMatrix {
    let zero = ComplexMatrix::from_real_diagonal(&[1.0, 0.0]);
    let half = ComplexMatrix::from_real_diagonal(&[0.5, 0.5]);
    DensityMatrix::new(kron(&zero, &half), (2, 2)).expect("product state")
}

/// `(|Φ⁺⟩⟨Φ⁺| + |01⟩⟨01|)/2`, with `ℓ = 1/√2`.
pub fn lhat2_minimizer() -> DensityMatrix {
    let m = &ComplexMatrix::outer(&ket([FRAC_1_SQRT_2, 0.0, 0.0, FRAC_1_SQRT_2])).scale(0.5)
        + &ComplexMatrix::outer(&ket([0.0, 1.0, 0.0, 0.0])).scale(0.5);
    DensityMatrix::new(m, (2, 2)).expect("rank-2 state")
}

/// Fixture file stem and state, in the order they ship.
pub fn all() -> Vec<(&'static str, DensityMatrix)> {
    vec![
        ("bell", bell()),
        ("werner_0.3", werner(0.3)),
        ("werner_0.5", werner(0.5)),
        ("zero_tensor_tau", zero_tensor_tau()),
        ("lhat2_minimizer", lhat2_minimizer()),
    ]
}
