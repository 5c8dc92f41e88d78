//! Concurrence and entanglement entropy, each computed two ways.

use std::f64::consts::LN_2;

use crate::linalg::{inner4, kron, mat4_vec, IDENTITY2, PAULI_Y};
use crate::schmidt::DensityMatrix2;
use crate::state::{NonorthogonalBipartiteState, ProductBasisVector};

/// Which factors the spin flip acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpinFlip {
    /// `sigma_y (x) sigma_y`, the flip that defines the two-qubit concurrence.
    TwoFold,
    /// `sigma_y (x) 1`. Not a concurrence; kept for mutation checks.
    SideAOnly,
}

/// `2 |mu nu| sqrt((1 - |x|^2)(1 - |y|^2))`, i.e. `2 sqrt(det rho^A)`.
pub fn concurrence_det(state: &NonorthogonalBipartiteState) -> f64 {
    2.0 * (state.mu() * state.nu()).norm() * state.n_a() * state.n_b()
}

/// `|<psi| sigma_y (x) sigma_y |psi*>|`
pub fn concurrence_spin_flip(vector: &ProductBasisVector) -> f64 {
    concurrence_with_flip(vector, SpinFlip::TwoFold)
}

pub fn concurrence_with_flip(vector: &ProductBasisVector, flip: SpinFlip) -> f64 {
    let op = match flip {
        SpinFlip::TwoFold => kron(&PAULI_Y, &PAULI_Y),
        SpinFlip::SideAOnly => kron(&PAULI_Y, &IDENTITY2),
    };
    let conj = vector.0.map(|z| z.conj());
    let flipped = mat4_vec(&op, &conj);
    inner4(&vector.0, &flipped).norm()
}

/// Binary entropy in bits, with `h(0) = h(1) = 0`.
pub fn binary_entropy(z: f64) -> f64 {
    let term = |p: f64| if p <= 0.0 { 0.0 } else { -p * p.log2() };
    term(z) + term(1.0 - z)
}

/// Entropy in bits from the concurrence, `h((1 + sqrt(1 - C^2)) / 2)`.
pub fn entanglement_entropy(concurrence: f64) -> f64 {
    let c = concurrence.clamp(0.0, 1.0);
    let root = ((1.0 - c) * (1.0 + c)).sqrt();
    // The smaller eigenvalue, written without cancellation.
    let small = 0.5 * c * c / (1.0 + root);
    binary_entropy(small)
}

/// Von Neumann entropy of a one-qubit density matrix, in bits.
pub fn entropy_direct(rho: &DensityMatrix2) -> f64 {
    rho.eigenvalues()
        .iter()
        .map(|&l| if l <= 0.0 { 0.0 } else { -l * l.log2() })
        .sum()
}

/// Converts bits to nats.
pub fn bits_to_nats(bits: f64) -> f64 {
    bits * LN_2
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{C64, ONE, ZERO};
    use crate::schmidt::{reduced_density, Side};
    use crate::state::make_state;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn concurrence_examples() {
        let h = FRAC_1_SQRT_2;
        let singlet = make_state(c(h, 0.0), c(-h, 0.0), ZERO, ZERO, false).unwrap();
        assert!((concurrence_det(&singlet) - 1.0).abs() < 1e-15);
        assert!((concurrence_spin_flip(&singlet.embed()) - 1.0).abs() < 1e-15);

        let e00 = ProductBasisVector([ONE, ZERO, ZERO, ZERO]);
        assert_eq!(concurrence_spin_flip(&e00), 0.0);

        let product = make_state(ONE, ZERO, c(0.5, 0.0), c(0.3, 0.0), false).unwrap();
        assert_eq!(concurrence_det(&product), 0.0);

        let on = make_state(c(h, 0.0), c(h, 0.0), ZERO, c(0.1f64.sqrt(), 0.0), false).unwrap();
        assert!((concurrence_det(&on) - 0.9f64.sqrt()).abs() < 1e-15);
        assert!((concurrence_spin_flip(&on.embed()) - 0.9f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn single_factor_flip_is_not_a_concurrence() {
        let h = FRAC_1_SQRT_2;
        let singlet = make_state(c(h, 0.0), c(-h, 0.0), ZERO, ZERO, false).unwrap();
        assert!(concurrence_with_flip(&singlet.embed(), SpinFlip::SideAOnly) < 1e-15);
    }

    #[test]
    fn entropy_examples() {
        assert!((entanglement_entropy(1.0) - 1.0).abs() < 1e-15);
        assert_eq!(entanglement_entropy(0.0), 0.0);
        // h((1 + sqrt(0.1)) / 2)
        let z = 0.5 * (1.0 + 0.1f64.sqrt());
        let expected = -z * z.log2() - (1.0 - z) * (1.0 - z).log2();
        let e = entanglement_entropy(0.9f64.sqrt());
        assert!((e - expected).abs() < 1e-14);
        assert!((e - 0.9266121639254165).abs() < 1e-12);
    }

    #[test]
    fn entropy_direct_examples() {
        let half = C64::new(0.5, 0.0);
        assert!(
            (entropy_direct(&DensityMatrix2([[half, ZERO], [ZERO, half]])) - 1.0).abs() < 1e-15
        );
        assert_eq!(
            entropy_direct(&DensityMatrix2([[ONE, ZERO], [ZERO, ZERO]])),
            0.0
        );

        let s = make_state(c(0.3, 0.4), c(0.5, -0.1), c(0.2, 0.3), c(0.1, -0.5), true).unwrap();
        let direct = entropy_direct(&reduced_density(&s, Side::A));
        let from_concurrence = entanglement_entropy(concurrence_det(&s));
        assert!((direct - from_concurrence).abs() < 1e-12);
        let direct_b = entropy_direct(&reduced_density(&s, Side::B));
        assert!((direct - direct_b).abs() < 1e-12);
    }

    #[test]
    fn binary_entropy_endpoints() {
        assert_eq!(binary_entropy(0.0), 0.0);
        assert_eq!(binary_entropy(1.0), 0.0);
        assert_eq!(binary_entropy(0.5), 1.0);
    }
}
