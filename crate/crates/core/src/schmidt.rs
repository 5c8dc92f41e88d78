//! Reduced density matrices and the Schmidt form of the embedded state.

use crate::linalg::{
    det2, fix_phase_first_nonzero, hermitian_eigen2, hermiticity_defect2, inner2, kron_vec,
    orthogonal_complement, HermitianEigen2, Mat2, Vec2, Vec4, C64, COMPUTATIONAL_BASIS, ZERO,
};
use crate::state::{NonorthogonalBipartiteState, ProductBasisVector};

/// Eigenvalue gap below which the Schmidt basis is not unique.
pub const DEGENERACY_TOL: f64 = 1e-10;

/// Components smaller than this are skipped when fixing the phase gauge.
const GAUGE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    A,
    B,
}

/// Density matrix of one qubit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix2(pub Mat2);

impl DensityMatrix2 {
    pub fn entries(&self) -> &Mat2 {
        &self.0
    }

    pub fn trace(&self) -> f64 {
        self.0[0][0].re + self.0[1][1].re
    }

    pub fn det(&self) -> f64 {
        det2(&self.0).re
    }

    pub fn hermiticity_defect(&self) -> f64 {
        hermiticity_defect2(&self.0)
    }

    pub fn eigen(&self) -> HermitianEigen2 {
        hermitian_eigen2(&self.0)
    }

    /// Eigenvalues, largest first.
    pub fn eigenvalues(&self) -> [f64; 2] {
        self.eigen().values
    }

    /// Checks hermiticity, unit trace and positivity.
    pub fn is_valid(&self) -> bool {
        let [_, lo] = self.eigenvalues();
        self.hermiticity_defect() <= 1e-14 && (self.trace() - 1.0).abs() <= 1e-12 && lo >= -1e-14
    }
}

/// Partial trace of `|psi><psi|` over the other side.
pub fn reduced_density_of(vector: &ProductBasisVector, side: Side) -> DensityMatrix2 {
    let psi = vector.0;
    let amp = |a: usize, b: usize| psi[2 * a + b];
    let mut rho = [[ZERO; 2]; 2];
    for (i, row) in rho.iter_mut().enumerate() {
        for (j, entry) in row.iter_mut().enumerate() {
            *entry = (0..2)
                .map(|k| match side {
                    Side::A => amp(i, k) * amp(j, k).conj(),
                    Side::B => amp(k, i) * amp(k, j).conj(),
                })
                .sum();
        }
    }
    DensityMatrix2(rho)
}

pub fn reduced_density(state: &NonorthogonalBipartiteState, side: Side) -> DensityMatrix2 {
    reduced_density_of(&state.embed(), side)
}

/// `|mu nu N^A N^B|^2`, the common determinant of both reduced matrices.
pub fn schmidt_product(state: &NonorthogonalBipartiteState) -> f64 {
    (state.mu() * state.nu()).norm_sqr() * state.n_a().powi(2) * state.n_b().powi(2)
}

/// `(lambda_plus, lambda_minus)` of the reduced density matrices, from the
/// closed form `1/2 +- 1/2 sqrt(1 - 4 |mu nu N^A N^B|^2)`.
pub fn schmidt_eigenvalues(state: &NonorthogonalBipartiteState) -> (f64, f64) {
    let radicand = (1.0 - 4.0 * schmidt_product(state)).clamp(0.0, 1.0);
    let root = radicand.sqrt();
    (0.5 + 0.5 * root, 0.5 - 0.5 * root)
}

/// Orthonormal pair `|->`, `|+>` of one qubit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalBasis {
    pub minus: Vec2,
    pub plus: Vec2,
}

impl LocalBasis {
    /// `|+> = (1, 0)`, `|-> = (0, 1)`.
    pub fn computational() -> Self {
        LocalBasis {
            plus: COMPUTATIONAL_BASIS[0],
            minus: COMPUTATIONAL_BASIS[1],
        }
    }

    pub fn orthonormality_defect(&self) -> f64 {
        let n_minus = (inner2(&self.minus, &self.minus).re - 1.0).abs();
        let n_plus = (inner2(&self.plus, &self.plus).re - 1.0).abs();
        n_minus
            .max(n_plus)
            .max(inner2(&self.minus, &self.plus).norm())
    }
}

/// `c_minus |->|-> + c_plus |+>|+>` with `|c_minus| <= |c_plus|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchmidtForm {
    pub c_minus: C64,
    pub c_plus: C64,
    pub basis_a: LocalBasis,
    pub basis_b: LocalBasis,
    pub phi_minus: f64,
    pub phi_plus: f64,
    /// Set when the two Schmidt weights coincide within [`DEGENERACY_TOL`];
    /// the bases are then one valid choice among many.
    pub degenerate: bool,
}

impl SchmidtForm {
    pub fn new(c_minus: C64, c_plus: C64, basis_a: LocalBasis, basis_b: LocalBasis) -> Self {
        let lm = c_minus.norm_sqr();
        let lp = c_plus.norm_sqr();
        SchmidtForm {
            c_minus,
            c_plus,
            basis_a,
            basis_b,
            phi_minus: phase_or_zero(c_minus),
            phi_plus: phase_or_zero(c_plus),
            degenerate: (lp - lm).abs() < DEGENERACY_TOL,
        }
    }

    /// `|2 c_plus c_minus|`
    pub fn coupling(&self) -> f64 {
        2.0 * (self.c_plus * self.c_minus).norm()
    }

    pub fn weight_sum(&self) -> f64 {
        self.c_minus.norm_sqr() + self.c_plus.norm_sqr()
    }
}

fn phase_or_zero(z: C64) -> f64 {
    if z == ZERO {
        0.0
    } else {
        z.arg()
    }
}

/// Schmidt decomposition with a fixed phase gauge: the first non-negligible
/// component of each side-A vector and each side-B vector is real positive,
/// and the coefficients carry the remaining phases.
pub fn schmidt_decompose_vector(vector: &ProductBasisVector) -> SchmidtForm {
    let psi = vector.0;
    let rho_a = reduced_density_of(vector, Side::A);
    let eig = rho_a.eigen();
    let mut u_plus = eig.vectors[0];
    fix_phase_first_nonzero(&mut u_plus, GAUGE_TOL);
    let mut u_minus = orthogonal_complement(&u_plus);
    fix_phase_first_nonzero(&mut u_minus, GAUGE_TOL);

    // Side-B partner of a side-A vector u: sum_a conj(u_a) psi_{a,b}.
    let partner = |u: &Vec2| -> Vec2 {
        [
            u[0].conj() * psi[0] + u[1].conj() * psi[2],
            u[0].conj() * psi[1] + u[1].conj() * psi[3],
        ]
    };
    let w_plus = partner(&u_plus);
    let w_minus = partner(&u_minus);

    let w_norm = w_plus[0].norm_sqr() + w_plus[1].norm_sqr();
    let (v_plus, c_plus) = if w_norm > 0.0 {
        let n = w_norm.sqrt();
        let mut v = [w_plus[0] / n, w_plus[1] / n];
        let p = fix_phase_first_nonzero(&mut v, GAUGE_TOL);
        (v, p.conj() * n)
    } else {
        ([C64::new(1.0, 0.0), ZERO], ZERO)
    };
    let mut v_minus = orthogonal_complement(&v_plus);
    fix_phase_first_nonzero(&mut v_minus, GAUGE_TOL);
    let c_minus = inner2(&v_minus, &w_minus);

    let mut basis_a = LocalBasis {
        minus: u_minus,
        plus: u_plus,
    };
    let mut basis_b = LocalBasis {
        minus: v_minus,
        plus: v_plus,
    };
    let (mut c_minus, mut c_plus) = (c_minus, c_plus);
    if c_minus.norm() > c_plus.norm() {
        std::mem::swap(&mut c_minus, &mut c_plus);
        std::mem::swap(&mut basis_a.minus, &mut basis_a.plus);
        std::mem::swap(&mut basis_b.minus, &mut basis_b.plus);
    }
    SchmidtForm::new(c_minus, c_plus, basis_a, basis_b)
}

pub fn schmidt_decompose(state: &NonorthogonalBipartiteState) -> SchmidtForm {
    schmidt_decompose_vector(&state.embed())
}

/// `c_minus |->^A|->^B + c_plus |+>^A|+>^B`
pub fn reconstruct(form: &SchmidtForm) -> ProductBasisVector {
    let minus = kron_vec(&form.basis_a.minus, &form.basis_b.minus);
    let plus = kron_vec(&form.basis_a.plus, &form.basis_b.plus);
    let mut out: Vec4 = [ZERO; 4];
    for (o, (m, p)) in out.iter_mut().zip(minus.iter().zip(&plus)) {
        *o = form.c_minus * m + form.c_plus * p;
    }
    ProductBasisVector(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_diff_up_to_phase;
    use crate::state::make_state;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn singlet() -> NonorthogonalBipartiteState {
        make_state(
            c(FRAC_1_SQRT_2, 0.0),
            c(-FRAC_1_SQRT_2, 0.0),
            ZERO,
            ZERO,
            false,
        )
        .unwrap()
    }

    fn product() -> NonorthogonalBipartiteState {
        make_state(c(1.0, 0.0), ZERO, c(0.5, 0.0), c(0.3, 0.0), false).unwrap()
    }

    #[test]
    fn singlet_reduced_is_maximally_mixed() {
        for side in [Side::A, Side::B] {
            let rho = reduced_density(&singlet(), side);
            assert!((rho.0[0][0].re - 0.5).abs() < 1e-15);
            assert!((rho.0[1][1].re - 0.5).abs() < 1e-15);
            assert!(rho.0[0][1].norm() < 1e-15);
            assert!(rho.is_valid());
        }
    }

    #[test]
    fn product_reduced_is_rank_one() {
        let rho = reduced_density(&product(), Side::A);
        assert!(rho.det().abs() < 1e-16);
        let (lp, lm) = schmidt_eigenvalues(&product());
        assert_eq!((lp, lm), (1.0, 0.0));
    }

    #[test]
    fn side_a_matches_explicit_matrix() {
        let s = make_state(c(0.4, 0.3), c(-0.5, 0.6), c(0.2, -0.1), c(0.3, 0.35), true).unwrap();
        let rho = reduced_density(&s, Side::A);
        let (na, nb, m) = (s.n_a(), s.n_b(), s.m());
        assert!((rho.0[0][0].re - (s.nu() * na).norm_sqr()).abs() < 1e-15);
        assert!((rho.0[0][1] - s.nu() * na * m.conj()).norm() < 1e-15);
        assert!((rho.0[1][0] - s.nu().conj() * na * m).norm() < 1e-15);
        assert!((rho.0[1][1].re - ((s.mu() * nb).norm_sqr() + m.norm_sqr())).abs() < 1e-15);

        // Side B carries mu N^B on the diagonal, with the same determinant.
        let rho_b = reduced_density(&s, Side::B);
        assert!((rho_b.0[0][0].re - (s.mu() * nb).norm_sqr()).abs() < 1e-15);
        assert!((rho_b.0[0][1] - s.mu() * nb * m.conj()).norm() < 1e-15);
        assert!((rho.det() - rho_b.det()).abs() < 1e-15);
        assert!((rho.det() - schmidt_product(&s)).abs() < 1e-15);
    }

    #[test]
    fn on_eigenvalues() {
        let h = FRAC_1_SQRT_2;
        let s = make_state(c(h, 0.0), c(h, 0.0), c(0.1f64.sqrt(), 0.0), ZERO, false).unwrap();
        let (lp, lm) = schmidt_eigenvalues(&s);
        assert!((lp - 0.658113883008419).abs() < 1e-12);
        assert!((lm - 0.341886116991581).abs() < 1e-12);
        let [ep, em] = reduced_density(&s, Side::A).eigenvalues();
        assert!((ep - lp).abs() < 1e-12 && (em - lm).abs() < 1e-12);
    }

    #[test]
    fn decompose_singlet_and_product() {
        let f = schmidt_decompose(&singlet());
        assert!((f.c_plus.norm() - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((f.c_minus.norm() - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!(f.degenerate);

        let f = schmidt_decompose(&product());
        assert!(f.c_minus.norm() < 1e-15);
        assert!((f.c_plus - c(1.0, 0.0)).norm() < 1e-15);
        assert!(!f.degenerate);
        assert!(max_diff_up_to_phase(&reconstruct(&f).0, &product().embed().0) < 1e-15);
    }

    #[test]
    fn decomposition_gauge_and_round_trip() {
        let s = make_state(c(0.1, 0.7), c(0.5, -0.2), c(0.6, 0.1), c(-0.3, 0.4), true).unwrap();
        let f = schmidt_decompose(&s);
        for v in [
            f.basis_a.minus,
            f.basis_a.plus,
            f.basis_b.minus,
            f.basis_b.plus,
        ] {
            let pivot = if v[0].norm() > 1e-12 { v[0] } else { v[1] };
            assert!(pivot.im.abs() < 1e-15 && pivot.re > 0.0);
        }
        assert!(f.basis_a.orthonormality_defect() < 1e-14);
        assert!(f.basis_b.orthonormality_defect() < 1e-14);
        let (lp, lm) = schmidt_eigenvalues(&s);
        assert!((f.c_plus.norm_sqr() - lp).abs() < 1e-12);
        assert!((f.c_minus.norm_sqr() - lm).abs() < 1e-12);
        let back = reconstruct(&f);
        assert!(max_diff_up_to_phase(&back.0, &s.embed().0) < 1e-14);
    }

    #[test]
    fn reconstruct_examples() {
        let h = c(FRAC_1_SQRT_2, 0.0);
        let comp = LocalBasis::computational();
        let f = SchmidtForm::new(h, h, comp, comp);
        let v = reconstruct(&f).0;
        // |->|-> = e1 e1 -> index 3, |+>|+> = e0 e0 -> index 0
        assert_eq!(v, [h, ZERO, ZERO, h]);

        let f = SchmidtForm::new(ZERO, c(1.0, 0.0), comp, comp);
        assert_eq!(reconstruct(&f).0, [c(1.0, 0.0), ZERO, ZERO, ZERO]);
    }
}
