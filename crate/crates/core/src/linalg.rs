//! Fixed-size complex linear algebra for qubit pairs.
//!
//! Everything here is 2- or 4-dimensional, so plain arrays are used instead
//! of a general matrix crate. Two-qubit vectors are indexed `2 * a + b` with
//! `a` the side-A index and `b` the side-B index.

use num_complex::Complex64;

pub type C64 = Complex64;
pub type Vec2 = [C64; 2];
pub type Mat2 = [[C64; 2]; 2];
pub type Vec4 = [C64; 4];
pub type Mat4 = [[C64; 4]; 4];

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

pub const IDENTITY2: Mat2 = [[ONE, ZERO], [ZERO, ONE]];
pub const PAULI_X: Mat2 = [[ZERO, ONE], [ONE, ZERO]];
pub const PAULI_Y: Mat2 = [[ZERO, C64::new(0.0, -1.0)], [I, ZERO]];
pub const PAULI_Z: Mat2 = [[ONE, ZERO], [ZERO, C64::new(-1.0, 0.0)]];

/// Computational basis `(e0, e1)` of one qubit.
pub const COMPUTATIONAL_BASIS: [Vec2; 2] = [[ONE, ZERO], [ZERO, ONE]];

pub fn inner2(a: &Vec2, b: &Vec2) -> C64 {
    a[0].conj() * b[0] + a[1].conj() * b[1]
}

pub fn norm2(a: &Vec2) -> f64 {
    (a[0].norm_sqr() + a[1].norm_sqr()).sqrt()
}

pub fn inner4(a: &Vec4, b: &Vec4) -> C64 {
    a.iter().zip(b).map(|(u, v)| u.conj() * v).sum()
}

pub fn norm4(a: &Vec4) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn kron_vec(a: &Vec2, b: &Vec2) -> Vec4 {
    [a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]]
}

pub fn kron(a: &Mat2, b: &Mat2) -> Mat4 {
    let mut out = [[ZERO; 4]; 4];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, entry) in row.iter_mut().enumerate() {
            *entry = a[i / 2][j / 2] * b[i % 2][j % 2];
        }
    }
    out
}

pub fn mat4_vec(m: &Mat4, v: &Vec4) -> Vec4 {
    let mut out = [ZERO; 4];
    for (o, row) in out.iter_mut().zip(m) {
        *o = row.iter().zip(v).map(|(a, b)| a * b).sum();
    }
    out
}

pub fn mat2_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

/// `|u><v|`
pub fn outer2(u: &Vec2, v: &Vec2) -> Mat2 {
    [
        [u[0] * v[0].conj(), u[0] * v[1].conj()],
        [u[1] * v[0].conj(), u[1] * v[1].conj()],
    ]
}

pub fn max_abs_diff2(a: &Mat2, b: &Mat2) -> f64 {
    let mut m: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            m = m.max((a[i][j] - b[i][j]).norm());
        }
    }
    m
}

pub fn hermiticity_defect2(m: &Mat2) -> f64 {
    (m[0][0].im.abs())
        .max(m[1][1].im.abs())
        .max((m[0][1] - m[1][0].conj()).norm())
}

pub fn det2(m: &Mat2) -> C64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

/// Largest deviation between `a` and `b` after removing the best global
/// phase from `b`.
pub fn max_diff_up_to_phase(a: &Vec4, b: &Vec4) -> f64 {
    let overlap = inner4(b, a);
    let phase = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        ONE
    };
    a.iter()
        .zip(b)
        .map(|(u, v)| (u - phase * v).norm())
        .fold(0.0, f64::max)
}

/// Multiplies `v` by the phase that makes its first component with
/// magnitude above `tol` real and positive. Returns the phase applied.
pub fn fix_phase_first_nonzero(v: &mut Vec2, tol: f64) -> C64 {
    let pivot = if v[0].norm() > tol { v[0] } else { v[1] };
    if pivot.norm() == 0.0 {
        return ONE;
    }
    let phase = pivot.conj() / pivot.norm();
    v[0] *= phase;
    v[1] *= phase;
    phase
}

/// Orthonormal complement of a unit vector in C^2.
pub fn orthogonal_complement(u: &Vec2) -> Vec2 {
    [-u[1].conj(), u[0].conj()]
}

/// Eigen-decomposition of a 2x2 Hermitian matrix.
#[derive(Debug, Clone, Copy)]
pub struct HermitianEigen2 {
    /// Eigenvalues in descending order.
    pub values: [f64; 2],
    /// Unit eigenvectors matching `values`.
    pub vectors: [Vec2; 2],
}

/// Closed-form eigen-decomposition of a 2x2 Hermitian matrix.
///
/// Only the upper triangle and the real parts of the diagonal are read.
pub fn hermitian_eigen2(m: &Mat2) -> HermitianEigen2 {
    let p = m[0][0].re;
    let s = m[1][1].re;
    let r = m[0][1];
    let mean = 0.5 * (p + s);
    let half_gap = (0.5 * (p - s)).hypot(r.norm());
    let hi = mean + half_gap;
    let lo = mean - half_gap;

    let top = if r.norm() == 0.0 {
        if p >= s {
            [ONE, ZERO]
        } else {
            [ZERO, ONE]
        }
    } else {
        // Two candidate null vectors of (m - hi I); the longer one is better
        // conditioned.
        let c1 = [r, C64::new(hi - p, 0.0)];
        let c2 = [C64::new(hi - s, 0.0), r.conj()];
        let pick = if norm2(&c1) >= norm2(&c2) { c1 } else { c2 };
        let n = norm2(&pick);
        [pick[0] / n, pick[1] / n]
    };
    let bottom = orthogonal_complement(&top);
    HermitianEigen2 {
        values: [hi, lo],
        vectors: [top, bottom],
    }
}
