//! Spin observables, the CHSH Bell operator and its maximization.
//!
//! Two independent routes to the maximal Bell value are provided: the closed
//! form attained by the canonical settings built from the Schmidt form, and
//! a brute-force grid search over all four measurement directions in the
//! fixed product basis.

use std::f64::consts::{FRAC_PI_2, PI};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    inner4, kron, mat2_mul, mat4_vec, max_abs_diff2, outer2, Mat2, Mat4, C64, IDENTITY2, PAULI_X,
    PAULI_Y, PAULI_Z, ZERO,
};
use crate::schmidt::{LocalBasis, SchmidtForm};
use crate::state::{wrap_angle, ProductBasisVector};

/// Largest imaginary part tolerated in a Bell expectation value.
pub const IMAGINARY_RESIDUE_TOL: f64 = 1e-10;

pub const DEFAULT_GRID_N: usize = 24;
pub const DEFAULT_REFINE_ITERS: usize = 40;

/// Spin direction `(chi, phi)` relative to a local basis `|+>, |->`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasurementSetting {
    pub chi: f64,
    pub phi: f64,
}

impl MeasurementSetting {
    pub fn new(chi: f64, phi: f64) -> Self {
        MeasurementSetting { chi, phi }
    }

    /// Equivalent setting with `chi` in `[0, pi]` and `phi` in `(-pi, pi]`.
    ///
    /// A negative polar angle is the same axis as `(-chi, phi + pi)`.
    pub fn canonical(self) -> Self {
        let mut chi = wrap_angle(self.chi);
        let mut phi = self.phi;
        if chi < 0.0 {
            chi = -chi;
            phi += PI;
        }
        MeasurementSetting {
            chi,
            phi: wrap_angle(phi),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BellSettings {
    pub a: MeasurementSetting,
    pub a_prime: MeasurementSetting,
    pub b: MeasurementSetting,
    pub b_prime: MeasurementSetting,
}

impl BellSettings {
    pub fn canonical(self) -> Self {
        BellSettings {
            a: self.a.canonical(),
            a_prime: self.a_prime.canonical(),
            b: self.b.canonical(),
            b_prime: self.b_prime.canonical(),
        }
    }
}

/// Hermitian single-qubit observable with eigenvalues +1 and -1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observable2(pub Mat2);

impl Observable2 {
    pub fn entries(&self) -> &Mat2 {
        &self.0
    }

    pub fn hermiticity_defect(&self) -> f64 {
        crate::linalg::hermiticity_defect2(&self.0)
    }

    /// Deviation of the square from the identity.
    pub fn involution_defect(&self) -> f64 {
        max_abs_diff2(&mat2_mul(&self.0, &self.0), &IDENTITY2)
    }

    pub fn eigenvalues(&self) -> [f64; 2] {
        crate::linalg::hermitian_eigen2(&self.0).values
    }
}

/// `cos chi (|+><+| - |-><-|) + sin chi (e^{i phi} |+><-| + e^{-i phi} |-><+|)`
pub fn spin_observable(setting: MeasurementSetting, basis: &LocalBasis) -> Observable2 {
    let (sin_chi, cos_chi) = setting.chi.sin_cos();
    let phase = C64::from_polar(1.0, setting.phi);
    let pp = outer2(&basis.plus, &basis.plus);
    let mm = outer2(&basis.minus, &basis.minus);
    let pm = outer2(&basis.plus, &basis.minus);
    let mp = outer2(&basis.minus, &basis.plus);
    let mut out = [[ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = (pp[i][j] - mm[i][j]) * cos_chi
                + (phase * pm[i][j] + phase.conj() * mp[i][j]) * sin_chi;
        }
    }
    Observable2(out)
}

/// Settings that realise the closed-form Bell value for a Schmidt form.
///
/// The phase sums are split as `phi^A = phi'^A = phi_+ - phi_-` and
/// `phi^B = phi'^B = 0`. The returned settings are canonicalized, so the
/// negative polar angle of `B'` appears as `(chi^B, pi)`.
pub fn canonical_settings(form: &SchmidtForm) -> BellSettings {
    let s = form.coupling();
    let chi_b = (1.0 + s * s).sqrt().recip().acos();
    let phase_sum = form.phi_plus - form.phi_minus;
    BellSettings {
        a: MeasurementSetting::new(0.0, phase_sum),
        a_prime: MeasurementSetting::new(FRAC_PI_2, phase_sum),
        b: MeasurementSetting::new(chi_b, 0.0),
        b_prime: MeasurementSetting::new(-chi_b, 0.0),
    }
    .canonical()
}

/// `A B + A B' + A' B - A' B'` as a 4x4 matrix.
pub fn bell_operator(settings: &BellSettings, basis_a: &LocalBasis, basis_b: &LocalBasis) -> Mat4 {
    let a = spin_observable(settings.a, basis_a).0;
    let ap = spin_observable(settings.a_prime, basis_a).0;
    let b = spin_observable(settings.b, basis_b).0;
    let bp = spin_observable(settings.b_prime, basis_b).0;
    let terms = [
        (kron(&a, &b), 1.0),
        (kron(&a, &bp), 1.0),
        (kron(&ap, &b), 1.0),
        (kron(&ap, &bp), -1.0),
    ];
    let mut out = [[ZERO; 4]; 4];
    for (m, sign) in &terms {
        for i in 0..4 {
            for j in 0..4 {
                out[i][j] += m[i][j] * *sign;
            }
        }
    }
    out
}

/// `<psi| B |psi>` for observables built in the given local bases.
pub fn bell_expectation(
    vector: &ProductBasisVector,
    settings: &BellSettings,
    basis_a: &LocalBasis,
    basis_b: &LocalBasis,
) -> Result<f64> {
    let op = bell_operator(settings, basis_a, basis_b);
    let value = inner4(&vector.0, &mat4_vec(&op, &vector.0));
    if value.im.abs() > IMAGINARY_RESIDUE_TOL {
        return Err(Error::NonHermitianDrift(value.im));
    }
    Ok(value.re)
}

/// `2 sqrt(1 + |2 c_+ c_-|^2)`
pub fn analytic_bell(form: &SchmidtForm) -> f64 {
    let s = form.coupling();
    2.0 * (1.0 + s * s).sqrt()
}

/// Outcome of the brute-force CHSH search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleOutcome {
    /// Bell expectation at `settings`, evaluated with [`bell_expectation`].
    pub value: f64,
    /// Best value on the initial grid, before refinement.
    pub grid_value: f64,
    /// Maximizing settings relative to the computational bases.
    pub settings: BellSettings,
}

type Vec3 = [f64; 3];

fn dot3(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Unit axis of the observable `spin_observable(setting, computational)`
/// expressed in Pauli components `(x, y, z)`.
fn axis(chi: f64, phi: f64) -> Vec3 {
    let (s, c) = chi.sin_cos();
    [s * phi.cos(), -s * phi.sin(), c]
}

/// Correlation tensor `T_ij = <psi| sigma_i (x) sigma_j |psi>`.
fn correlation_tensor(vector: &ProductBasisVector) -> [Vec3; 3] {
    let paulis = [PAULI_X, PAULI_Y, PAULI_Z];
    let mut t = [[0.0; 3]; 3];
    for (i, si) in paulis.iter().enumerate() {
        for (j, sj) in paulis.iter().enumerate() {
            t[i][j] = inner4(&vector.0, &mat4_vec(&kron(si, sj), &vector.0)).re;
        }
    }
    t
}

/// CHSH combination for four axes, given the correlation tensor.
fn chsh(t: &[Vec3; 3], a: &Vec3, ap: &Vec3, b: &Vec3, bp: &Vec3) -> f64 {
    let corr = |u: &Vec3, v: &Vec3| -> f64 {
        let tv = [dot3(&t[0], v), dot3(&t[1], v), dot3(&t[2], v)];
        dot3(u, &tv)
    };
    corr(a, b) + corr(a, bp) + corr(ap, b) - corr(ap, bp)
}

struct AngleGrid {
    chis: Vec<(f64, f64, f64)>,
    phis: Vec<(f64, f64, f64)>,
}

impl AngleGrid {
    fn new(n: usize) -> Self {
        let chis = (0..n)
            .map(|i| {
                let chi = PI * i as f64 / (n - 1) as f64;
                let (s, c) = chi.sin_cos();
                (chi, s.max(0.0), c)
            })
            .collect();
        let phis = (0..n)
            .map(|j| {
                let phi = -PI + 2.0 * PI * (j + 1) as f64 / n as f64;
                let (s, c) = phi.sin_cos();
                (phi, s, c)
            })
            .collect();
        AngleGrid { chis, phis }
    }

    fn len(&self) -> usize {
        self.chis.len() * self.phis.len()
    }

    fn direction(&self, k: usize) -> (f64, f64) {
        let n = self.phis.len();
        (self.chis[k / n].0, self.phis[k % n].0)
    }

    /// Maximum of `axis(chi, phi) . u` over the grid and its flat index.
    ///
    /// Because `sin chi >= 0` on the grid, the best `phi` does not depend on
    /// `chi`, so the two angles are scanned one after the other.
    fn best(&self, u: &Vec3) -> (f64, usize) {
        let mut best_r = f64::NEG_INFINITY;
        let mut best_j = 0;
        for (j, &(_, s, c)) in self.phis.iter().enumerate() {
            let r = c * u[0] - s * u[1];
            if r > best_r {
                best_r = r;
                best_j = j;
            }
        }
        let mut best = f64::NEG_INFINITY;
        let mut best_i = 0;
        for (i, &(_, s, c)) in self.chis.iter().enumerate() {
            let v = c * u[2] + s * best_r;
            if v > best {
                best = v;
                best_i = i;
            }
        }
        (best, best_i * self.phis.len() + best_j)
    }
}

fn mat_vec(t: &[Vec3; 3], b: &Vec3) -> Vec3 {
    [dot3(&t[0], b), dot3(&t[1], b), dot3(&t[2], b)]
}

fn add3(a: &Vec3, b: &Vec3, sign: f64) -> Vec3 {
    [a[0] + sign * b[0], a[1] + sign * b[1], a[2] + sign * b[2]]
}

fn unit3(a: &Vec3) -> Option<Vec3> {
    let n = dot3(a, a).sqrt();
    (n > 1e-300).then(|| [a[0] / n, a[1] / n, a[2] / n])
}

/// Inverse of [`axis`].
fn axis_angles(a: &Vec3) -> (f64, f64) {
    (a[2].clamp(-1.0, 1.0).acos(), (-a[1]).atan2(a[0]))
}

fn mat_t_vec(t: &[Vec3; 3], a: &Vec3) -> Vec3 {
    [
        t[0][0] * a[0] + t[1][0] * a[1] + t[2][0] * a[2],
        t[0][1] * a[0] + t[1][1] * a[1] + t[2][1] * a[2],
        t[0][2] * a[0] + t[1][2] * a[1] + t[2][2] * a[2],
    ]
}

/// Largest stretch of a block step tried during refinement.
const OVER_RELAXATION: f64 = 1024.0;

fn angles_to_axes(ang: &[f64; 8]) -> [Vec3; 4] {
    [
        axis(ang[0], ang[1]),
        axis(ang[2], ang[3]),
        axis(ang[4], ang[5]),
        axis(ang[6], ang[7]),
    ]
}

/// Replaces side B by its exact optimum given side A, then side A given the
/// new side B. Returns the resulting axes and CHSH value.
fn block_step(t: &[Vec3; 3], axes: &[Vec3; 4]) -> ([Vec3; 4], f64) {
    let mut axes = *axes;
    for side in [1, 0] {
        let (u, v) = if side == 1 {
            let ta = mat_t_vec(t, &axes[0]);
            let tap = mat_t_vec(t, &axes[1]);
            (add3(&ta, &tap, 1.0), add3(&ta, &tap, -1.0))
        } else {
            let tb = mat_vec(t, &axes[2]);
            let tbp = mat_vec(t, &axes[3]);
            (add3(&tb, &tbp, 1.0), add3(&tb, &tbp, -1.0))
        };
        if let (Some(u), Some(v)) = (unit3(&u), unit3(&v)) {
            axes[2 * side] = u;
            axes[2 * side + 1] = v;
        }
    }
    let value = chsh(t, &axes[0], &axes[1], &axes[2], &axes[3]);
    (axes, value)
}

/// `from + stretch * (to - from)` per axis, projected back onto the sphere.
fn extrapolate(from: &[Vec3; 4], to: &[Vec3; 4], stretch: f64) -> Option<[Vec3; 4]> {
    let mut out = [[0.0; 3]; 4];
    for k in 0..4 {
        let step = add3(&to[k], &from[k], -1.0);
        out[k] = unit3(&add3(&from[k], &step, stretch))?;
    }
    Some(out)
}

/// Exhaustive grid search followed by coordinate-wise refinement.
///
/// All four directions range over `grid_n` polar angles in `[0, pi]` times
/// `grid_n` azimuths in `(-pi, pi]`. For a fixed pair of side-A directions
/// the side-B terms decouple, so the grid maximum is found exactly without
/// enumerating all `grid_n^8` combinations. Refinement then alternates
/// between the two sides, replacing both directions of one side by their
/// exact optimum given the other side. Each such step is also tried
/// stretched by factors halving from 1024 down to 2, and the best of these
/// candidates is kept.
pub fn oracle_bell_search(
    vector: &ProductBasisVector,
    grid_n: usize,
    refine_iters: usize,
) -> OracleOutcome {
    let grid_n = grid_n.max(2);
    let t = correlation_tensor(vector);
    let grid = AngleGrid::new(grid_n);
    let dirs: Vec<Vec3> = (0..grid.len())
        .map(|k| {
            let (chi, phi) = grid.direction(k);
            axis(chi, phi)
        })
        .collect();
    let projected: Vec<Vec3> = dirs.iter().map(|a| mat_t_vec(&t, a)).collect();

    // (value, a, a', b, b'); ties go to the lowest (a, a') index.
    let per_a: Vec<(f64, usize, usize, usize, usize)> = (0..dirs.len())
        .into_par_iter()
        .map(|ia| {
            let mut best = (f64::NEG_INFINITY, ia, 0, 0, 0);
            let ta = &projected[ia];
            for (iap, tap) in projected.iter().enumerate() {
                let sum = [ta[0] + tap[0], ta[1] + tap[1], ta[2] + tap[2]];
                let diff = [ta[0] - tap[0], ta[1] - tap[1], ta[2] - tap[2]];
                let (vb, ib) = grid.best(&sum);
                let (vbp, ibp) = grid.best(&diff);
                let v = vb + vbp;
                if v > best.0 {
                    best = (v, ia, iap, ib, ibp);
                }
            }
            best
        })
        .collect();
    let start = per_a
        .iter()
        .copied()
        .fold(per_a[0], |acc, x| if x.0 > acc.0 { x } else { acc });

    let mut angles = [0.0; 8];
    for (slot, &k) in [start.1, start.2, start.3, start.4].iter().enumerate() {
        let (chi, phi) = grid.direction(k);
        angles[2 * slot] = chi;
        angles[2 * slot + 1] = phi;
    }
    let objective = |ang: &[f64; 8]| -> f64 {
        let [a, ap, b, bp] = angles_to_axes(ang);
        chsh(&t, &a, &ap, &b, &bp)
    };

    let grid_value = objective(&angles);
    let mut axes = angles_to_axes(&angles);
    let mut current = grid_value;
    for _ in 0..refine_iters {
        let (target, target_value) = block_step(&t, &axes);
        if target_value <= current {
            break;
        }
        let mut next = (target, target_value);
        let mut stretch = OVER_RELAXATION;
        while stretch > 1.0 {
            if let Some(candidate) = extrapolate(&axes, &target, stretch) {
                let value = chsh(
                    &t,
                    &candidate[0],
                    &candidate[1],
                    &candidate[2],
                    &candidate[3],
                );
                if value > next.1 {
                    next = (candidate, value);
                }
            }
            stretch *= 0.5;
        }
        axes = next.0;
        current = next.1;
    }
    for (slot, a) in axes.iter().enumerate() {
        let (chi, phi) = axis_angles(a);
        angles[2 * slot] = chi;
        angles[2 * slot + 1] = phi;
    }

    let settings = BellSettings {
        a: MeasurementSetting::new(angles[0], angles[1]),
        a_prime: MeasurementSetting::new(angles[2], angles[3]),
        b: MeasurementSetting::new(angles[4], angles[5]),
        b_prime: MeasurementSetting::new(angles[6], angles[7]),
    }
    .canonical();
    let comp = LocalBasis::computational();
    let value =
        bell_expectation(vector, &settings, &comp, &comp).expect("Bell operator is Hermitian");
    OracleOutcome {
        value,
        grid_value,
        settings,
    }
}

/// Maximal Bell expectation found by [`oracle_bell_search`].
pub fn oracle_bell_max(vector: &ProductBasisVector, grid_n: usize, refine_iters: usize) -> f64 {
    oracle_bell_search(vector, grid_n, refine_iters).value
}
