//! The bipartite state `mu |alpha>|beta> + nu |gamma>|delta>` over
//! non-orthogonal component states, and its embedding into an orthonormal
//! two-qubit product basis.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{norm4, Vec4, C64, ZERO};

/// Tolerance on the normalization residual of a valid state.
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// Overlap magnitudes below this are treated as orthogonal.
pub const ORTHOGONAL_TOL: f64 = 1e-12;

/// Which of the two overlaps vanish.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OverlapCase {
    /// Both pairs non-orthogonal.
    #[serde(rename = "NN")]
    NonorthogonalNonorthogonal,
    /// Exactly one pair orthogonal.
    #[serde(rename = "ON")]
    OrthogonalNonorthogonal,
    /// Both pairs orthogonal.
    #[serde(rename = "OO")]
    OrthogonalOrthogonal,
}

impl OverlapCase {
    pub fn classify(abs_x: f64, abs_y: f64) -> Self {
        match (abs_x < ORTHOGONAL_TOL, abs_y < ORTHOGONAL_TOL) {
            (true, true) => OverlapCase::OrthogonalOrthogonal,
            (false, false) => OverlapCase::NonorthogonalNonorthogonal,
            _ => OverlapCase::OrthogonalNonorthogonal,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            OverlapCase::NonorthogonalNonorthogonal => "NN",
            OverlapCase::OrthogonalNonorthogonal => "ON",
            OverlapCase::OrthogonalOrthogonal => "OO",
        }
    }
}

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap_angle(theta: f64) -> f64 {
    let mut t = theta % (2.0 * PI);
    if t <= -PI {
        t += 2.0 * PI;
    } else if t > PI {
        t -= 2.0 * PI;
    }
    t
}

/// A validated state `mu |alpha>^A |beta>^B + nu |gamma>^A |delta>^B`.
///
/// `x = <delta|beta>` is the side-B overlap and `y = <alpha|gamma>` the
/// side-A overlap. Both have modulus strictly below one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonorthogonalBipartiteState {
    mu: C64,
    nu: C64,
    x: C64,
    y: C64,
}

/// Scalars derived from a state that the rest of the crate reuses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedScalars {
    /// `sqrt(1 - |y|^2)`
    pub n_a: f64,
    /// `sqrt(1 - |x|^2)`
    pub n_b: f64,
    /// `mu x + nu y`
    pub m: C64,
    /// Phase combination `arg mu - arg nu + arg x - arg y`; `None` when any
    /// of the four scalars vanishes.
    pub eta: Option<f64>,
}

/// The embedded state `(0, nu N^A, mu N^B, M)` in the orthonormal product
/// basis where `|alpha> = |delta> = (0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductBasisVector(pub Vec4);

impl ProductBasisVector {
    pub fn components(&self) -> &Vec4 {
        &self.0
    }

    pub fn norm(&self) -> f64 {
        norm4(&self.0)
    }
}

fn check_overlap(which: &'static str, z: C64) -> Result<()> {
    let magnitude = z.norm();
    if magnitude.is_nan() || magnitude >= 1.0 {
        return Err(Error::LinearDependence { which, magnitude });
    }
    Ok(())
}

fn check_finite(values: &[C64]) -> Result<()> {
    if values.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::DomainError("non-finite input".into()))
    }
}

/// Builds a state, optionally rescaling `mu` and `nu` by one common positive
/// factor so that it is normalized.
pub fn make_state(
    mu: C64,
    nu: C64,
    x: C64,
    y: C64,
    auto_normalize: bool,
) -> Result<NonorthogonalBipartiteState> {
    check_finite(&[mu, nu, x, y])?;
    check_overlap("x", x)?;
    check_overlap("y", y)?;
    if mu == ZERO && nu == ZERO {
        return Err(Error::ZeroState);
    }
    let mut state = NonorthogonalBipartiteState { mu, nu, x, y };
    if auto_normalize {
        let scale = state.embed_unchecked().norm();
        if scale == 0.0 || !scale.is_finite() {
            return Err(Error::ZeroState);
        }
        state.mu /= scale;
        state.nu /= scale;
    }
    let residual = state.normalization_residual();
    if residual > NORMALIZATION_TOL {
        return Err(Error::NotNormalized {
            residual,
            tolerance: NORMALIZATION_TOL,
        });
    }
    Ok(state)
}

/// Builds a state from moduli and the phase combination `eta`, placing the
/// whole phase on `nu`.
pub fn from_moduli(
    abs_mu: f64,
    abs_nu: f64,
    abs_x: f64,
    abs_y: f64,
    eta: f64,
    auto_normalize: bool,
) -> Result<NonorthogonalBipartiteState> {
    make_state(
        C64::new(abs_mu, 0.0),
        C64::from_polar(abs_nu, -eta),
        C64::new(abs_x, 0.0),
        C64::new(abs_y, 0.0),
        auto_normalize,
    )
}

impl NonorthogonalBipartiteState {
    pub fn mu(&self) -> C64 {
        self.mu
    }

    pub fn nu(&self) -> C64 {
        self.nu
    }

    pub fn x(&self) -> C64 {
        self.x
    }

    pub fn y(&self) -> C64 {
        self.y
    }

    pub fn case(&self) -> OverlapCase {
        OverlapCase::classify(self.x.norm(), self.y.norm())
    }

    pub fn derived(&self) -> DerivedScalars {
        DerivedScalars {
            n_a: self.n_a(),
            n_b: self.n_b(),
            m: self.m(),
            eta: self.eta_phase().ok(),
        }
    }

    pub fn n_a(&self) -> f64 {
        (1.0 - self.y.norm_sqr()).sqrt()
    }

    pub fn n_b(&self) -> f64 {
        (1.0 - self.x.norm_sqr()).sqrt()
    }

    pub fn m(&self) -> C64 {
        self.mu * self.x + self.nu * self.y
    }

    fn embed_unchecked(&self) -> ProductBasisVector {
        ProductBasisVector([ZERO, self.nu * self.n_a(), self.mu * self.n_b(), self.m()])
    }

    /// Embeds the state into the orthonormal product basis.
    pub fn embed(&self) -> ProductBasisVector {
        self.embed_unchecked()
    }

    /// `| |mu N^B|^2 + |nu N^A|^2 + |M|^2 - 1 |`
    pub fn normalization_residual(&self) -> f64 {
        let v = self.embed_unchecked().0;
        (v.iter().map(|z| z.norm_sqr()).sum::<f64>() - 1.0).abs()
    }

    /// Normalization written through moduli and the phase combination:
    /// `|mu|^2 + |nu|^2 + 2 |mu||nu||x||y| cos eta`.
    ///
    /// When any of the four scalars vanishes the cross term is zero and the
    /// undefined phase drops out.
    pub fn phase_form_norm(&self) -> f64 {
        let cross = self.mu.norm() * self.nu.norm() * self.x.norm() * self.y.norm();
        let cos_eta = self.eta_phase().map(f64::cos).unwrap_or(0.0);
        self.mu.norm_sqr() + self.nu.norm_sqr() + 2.0 * cross * cos_eta
    }

    /// `eta = arg mu - arg nu + arg x - arg y` wrapped to `(-pi, pi]`.
    pub fn eta_phase(&self) -> Result<f64> {
        for (name, z) in [
            ("mu", self.mu),
            ("nu", self.nu),
            ("x", self.x),
            ("y", self.y),
        ] {
            if z == ZERO {
                return Err(Error::PhaseUndefined(name));
            }
        }
        Ok(wrap_angle(
            self.mu.arg() - self.nu.arg() + self.x.arg() - self.y.arg(),
        ))
    }

    /// Same overlaps, amplitudes multiplied by a common phase.
    pub fn with_global_phase(&self, phase: f64) -> Self {
        let p = C64::from_polar(1.0, phase);
        Self {
            mu: self.mu * p,
            nu: self.nu * p,
            ..*self
        }
    }

    pub fn to_input(&self) -> StateInput {
        StateInput {
            mu_re: self.mu.re,
            mu_im: self.mu.im,
            nu_re: self.nu.re,
            nu_im: self.nu.im,
            x_re: self.x.re,
            x_im: self.x.im,
            y_re: self.y.re,
            y_im: self.y.im,
        }
    }
}

/// Flat record of the eight real numbers that describe a state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StateInput {
    pub mu_re: f64,
    pub mu_im: f64,
    pub nu_re: f64,
    pub nu_im: f64,
    pub x_re: f64,
    pub x_im: f64,
    pub y_re: f64,
    pub y_im: f64,
}

impl StateInput {
    pub fn into_state(self, auto_normalize: bool) -> Result<NonorthogonalBipartiteState> {
        make_state(
            C64::new(self.mu_re, self.mu_im),
            C64::new(self.nu_re, self.nu_im),
            C64::new(self.x_re, self.x_im),
            C64::new(self.y_re, self.y_im),
            auto_normalize,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn singlet_is_valid_and_embeds() {
        let s = make_state(
            c(FRAC_1_SQRT_2, 0.0),
            c(-FRAC_1_SQRT_2, 0.0),
            ZERO,
            ZERO,
            false,
        )
        .unwrap();
        assert!(s.normalization_residual() < 1e-15);
        let v = s.embed().0;
        assert_eq!(v[0], ZERO);
        assert!((v[1] - c(-FRAC_1_SQRT_2, 0.0)).norm() < 1e-16);
        assert!((v[2] - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-16);
        assert_eq!(v[3], ZERO);
        assert_eq!(s.case(), OverlapCase::OrthogonalOrthogonal);
    }

    #[test]
    fn product_state_is_exactly_normalized() {
        let s = make_state(c(1.0, 0.0), ZERO, c(0.5, 0.0), c(0.3, 0.0), false).unwrap();
        assert!(s.normalization_residual() < 1e-15);
        let v = s.embed().0;
        assert_eq!(v, [ZERO, ZERO, c(0.75f64.sqrt(), 0.0), c(0.5, 0.0)]);
    }

    #[test]
    fn auto_normalize_rescales_common_factor() {
        let s = make_state(c(1.0, 0.0), c(1.0, 0.0), c(0.9, 0.0), ZERO, true).unwrap();
        assert!((s.mu().re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((s.nu().re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!(s.normalization_residual() < 1e-15);
        // ratio preserved
        let s2 = make_state(c(2.0, 1.0), c(-0.5, 3.0), c(0.2, 0.4), c(-0.6, 0.1), true).unwrap();
        let ratio = s2.mu() / s2.nu();
        assert!((ratio - c(2.0, 1.0) / c(-0.5, 3.0)).norm() < 1e-14);
    }

    #[test]
    fn validation_errors() {
        assert!(matches!(
            make_state(c(1.0, 0.0), ZERO, c(1.0, 0.0), ZERO, true),
            Err(Error::LinearDependence { which: "x", .. })
        ));
        assert!(matches!(
            make_state(c(1.0, 0.0), ZERO, ZERO, c(0.0, 1.2), true),
            Err(Error::LinearDependence { which: "y", .. })
        ));
        assert!(matches!(
            make_state(ZERO, ZERO, c(0.1, 0.0), ZERO, true),
            Err(Error::ZeroState)
        ));
        assert!(matches!(
            make_state(c(1.0, 0.0), c(1.0, 0.0), c(0.9, 0.0), ZERO, false),
            Err(Error::NotNormalized { .. })
        ));
    }

    #[test]
    fn eta_examples() {
        let s = make_state(c(1.0, 0.0), c(-1.0, 0.0), c(0.3, 0.0), c(0.3, 0.0), true).unwrap();
        assert!((s.eta_phase().unwrap() - PI).abs() < 1e-15);

        let s = make_state(c(0.0, 1.0), c(1.0, 0.0), c(0.5, 0.0), c(0.0, 0.5), true).unwrap();
        assert!(s.eta_phase().unwrap().abs() < 1e-15);

        let s = make_state(
            C64::from_polar(1.0, FRAC_PI_4),
            c(1.0, 0.0),
            c(0.2, 0.0),
            c(0.2, 0.0),
            true,
        )
        .unwrap();
        assert!((s.eta_phase().unwrap() - FRAC_PI_4).abs() < 1e-15);

        let s = make_state(c(1.0, 0.0), ZERO, c(0.2, 0.0), c(0.2, 0.0), true).unwrap();
        assert_eq!(s.eta_phase(), Err(Error::PhaseUndefined("nu")));
    }

    #[test]
    fn wrap_angle_range() {
        assert_eq!(wrap_angle(PI), PI);
        assert!((wrap_angle(-PI) - PI).abs() < 1e-15);
        assert!((wrap_angle(3.0 * PI) - PI).abs() < 1e-12);
        assert!((wrap_angle(0.5 + 4.0 * PI) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn phase_form_matches_component_norm() {
        let s = make_state(c(0.3, -0.8), c(0.5, 0.2), c(0.4, 0.3), c(-0.2, 0.5), true).unwrap();
        assert!((s.phase_form_norm() - 1.0).abs() < 1e-14);
        let d = s.derived();
        assert!((d.n_a * d.n_a + s.y().norm_sqr() - 1.0).abs() < 1e-14);
        assert!((d.n_b * d.n_b + s.x().norm_sqr() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn state_input_json_keys() {
        let json =
            r#"{"mu_re":1,"mu_im":0,"nu_re":0,"nu_im":0,"x_re":0.5,"x_im":0,"y_re":0.3,"y_im":0}"#;
        let input: StateInput = serde_json::from_str(json).unwrap();
        let s = input.into_state(false).unwrap();
        assert_eq!(s.to_input(), input);
    }
}
