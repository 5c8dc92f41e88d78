//! Feasibility of maximal Bell violation and the deviation parameter `d`.
//!
//! Maximal violation needs `4 (1 - |x|^2)(1 - |y|^2) |mu nu|^2 = 1`, which
//! combined with the normalization
//! `|mu|^2 + |nu|^2 + 2 |mu||nu||x||y| cos eta = 1` gives a quadratic in
//! `q = |mu|^2`. Every verdict reached from that algebra is re-checked by
//! building states and running them through the Schmidt pipeline.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::schmidt::{schmidt_decompose, SchmidtForm};
use crate::state::{from_moduli, NonorthogonalBipartiteState, OverlapCase, ORTHOGONAL_TOL};

/// `|x| = |y|` is declared when the magnitudes differ by less than this.
pub const EQUAL_OVERLAP_TOL: f64 = 1e-12;

/// Tolerance for a witness state to count as maximally entangled.
pub const WITNESS_TOL: f64 = 1e-10;

/// `d = 1 - |2 c_+ c_-|^2`, so that the Bell value is `2 sqrt(2 - d)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeviationParameter(pub f64);

impl DeviationParameter {
    pub fn value(self) -> f64 {
        self.0
    }
}

pub fn deviation(form: &SchmidtForm) -> DeviationParameter {
    let s = form.coupling();
    let d = 1.0 - s * s;
    DeviationParameter(if (-1e-12..0.0).contains(&d) {
        0.0
    } else if d > 1.0 && d <= 1.0 + 1e-12 {
        1.0
    } else {
        d
    })
}

/// `d` obtained by running a state through the Schmidt decomposition.
pub fn pipeline_deviation(state: &NonorthogonalBipartiteState) -> f64 {
    deviation(&schmidt_decompose(state)).0
}

/// `a q^2 + b q + c = 0` in `q = |mu|^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadraticCoefficients {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

fn check_overlap_magnitude(name: &str, v: f64) -> Result<()> {
    if !(0.0..1.0).contains(&v) {
        return Err(Error::DomainError(format!("{name} = {v} outside [0, 1)")));
    }
    Ok(())
}

fn check_d(d: f64) -> Result<()> {
    if !(0.0..1.0).contains(&d) {
        return Err(Error::DomainError(format!("d = {d} outside [0, 1)")));
    }
    Ok(())
}

/// Coefficients of the quadratic in `q`.
///
/// For `d = 0` the un-normalized form `a = 4 G`, `b = a (K cos eta - 1)`,
/// `c = 1` is returned, with `G = (1 - |x|^2)(1 - |y|^2)` and
/// `K = |x||y| / sqrt(G)`. For `d > 0` the monic form
/// `b = X cos eta - 1`, `c = (1 - d) / (4 G)` is returned, with
/// `X = |x||y| sqrt(1 - d) / sqrt(G)`.
pub fn quadratic_coefficients(
    abs_x: f64,
    abs_y: f64,
    eta: f64,
    d: f64,
) -> Result<QuadraticCoefficients> {
    check_overlap_magnitude("|x|", abs_x)?;
    check_overlap_magnitude("|y|", abs_y)?;
    check_d(d)?;
    let g = (1.0 - abs_x * abs_x) * (1.0 - abs_y * abs_y);
    if d == 0.0 {
        let a = 4.0 * g;
        let k = abs_x * abs_y / g.sqrt();
        Ok(QuadraticCoefficients {
            a,
            b: a * (k * eta.cos() - 1.0),
            c: 1.0,
        })
    } else {
        let big_x = abs_x * abs_y * ((1.0 - d) / g).sqrt();
        Ok(QuadraticCoefficients {
            a: 1.0,
            b: big_x * eta.cos() - 1.0,
            c: (1.0 - d) / (4.0 * g),
        })
    }
}

/// Roots of `q^2 - 2 h q + k = 0` given `h` and the discriminant `h^2 - k`.
/// A discriminant within rounding of zero counts as a double root.
fn half_roots(centre: f64, disc: f64, scale: f64) -> Vec<f64> {
    if disc < -1e-12 * scale.max(1e-300) {
        return Vec::new();
    }
    if disc <= 1e-15 * scale {
        return vec![centre];
    }
    let r = disc.sqrt();
    vec![centre - r, centre + r]
}

/// All values `q = |mu|^2 > 0` for which a normalized state with the given
/// overlaps (and `eta`, when both overlaps are nonzero) has deviation `d`.
///
/// An empty list means no real solution exists. Roots are returned in
/// ascending order.
pub fn mu_squared_solutions(abs_x: f64, abs_y: f64, eta: Option<f64>, d: f64) -> Result<Vec<f64>> {
    check_overlap_magnitude("|x|", abs_x)?;
    check_overlap_magnitude("|y|", abs_y)?;
    check_d(d)?;
    let roots = match OverlapCase::classify(abs_x, abs_y) {
        OverlapCase::OrthogonalOrthogonal => half_roots(0.5, 0.25 * d, 0.25),
        OverlapCase::OrthogonalNonorthogonal => {
            let s2 = (abs_x.max(abs_y)).powi(2);
            half_roots(0.5, 0.25 * (d - s2) / (1.0 - s2), 0.25)
        }
        OverlapCase::NonorthogonalNonorthogonal => {
            let eta = eta.ok_or_else(|| {
                Error::DomainError("eta is required when both overlaps are nonzero".into())
            })?;
            let g = (1.0 - abs_x * abs_x) * (1.0 - abs_y * abs_y);
            let big_x = abs_x * abs_y * ((1.0 - d) / g).sqrt();
            let centre = 1.0 - big_x * eta.cos();
            let disc = centre * centre - big_x * big_x / (abs_x * abs_x * abs_y * abs_y);
            half_roots(0.5 * centre, 0.25 * disc, 0.25 * centre * centre)
        }
    };
    Ok(roots.into_iter().filter(|&q| q > 0.0).collect())
}

/// State with `|mu|^2 = q` and `|nu|` fixed by `4 G |mu nu|^2 = 1 - d`.
pub fn state_for_deviation(
    q: f64,
    abs_x: f64,
    abs_y: f64,
    eta: f64,
    d: f64,
) -> Result<NonorthogonalBipartiteState> {
    let g = (1.0 - abs_x * abs_x) * (1.0 - abs_y * abs_y);
    let abs_nu = ((1.0 - d) / (4.0 * g * q)).sqrt();
    from_moduli(q.sqrt(), abs_nu, abs_x, abs_y, eta, false)
}

/// Non-negative `|nu|` compatible with normalization, ascending.
pub fn compatible_nu(abs_mu: f64, abs_x: f64, abs_y: f64, eta: f64) -> Vec<f64> {
    let p = abs_mu * abs_x * abs_y * eta.cos();
    let disc = p * p - (abs_mu * abs_mu - 1.0);
    if disc < 0.0 {
        return Vec::new();
    }
    let r = disc.sqrt();
    let mut out: Vec<f64> = [-p - r, -p + r].into_iter().filter(|&n| n >= 0.0).collect();
    out.dedup();
    out
}

/// Sign choice in the closed-form relations that keep both roots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }
}

/// A closed-form `d` next to the pipeline `d` of the corresponding state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormD {
    pub case: OverlapCase,
    pub branch: Branch,
    /// Value of the closed-form relation.
    pub closed_form: f64,
    /// `d` of the state built from the inputs and `abs_nu`.
    pub pipeline: f64,
    pub abs_difference: f64,
    /// `|nu|` used to build the state.
    pub abs_nu: f64,
    /// Whether the branch corresponds to the `|nu|` root used for the state.
    pub branch_matches_state: bool,
}

/// Evaluates `d` in closed form from `|mu|`, the overlaps and `eta`.
///
/// Both overlaps nonzero:
/// `d = 1 - 4 G [q + q^2 (2 |x|^2|y|^2 cos^2 eta - 1) +- sqrt(2) Z q^(3/2) |x||y| cos eta]`
/// with `Z = sqrt(2 (1 - q) + q |x|^2 |y|^2 (1 + cos 2 eta))`.
/// One overlap `s` nonzero: `d = 1 - 4 q (1 - q)(1 - s^2)`.
/// Both zero: `d = 1 - 4 q (1 - q)`.
///
/// The `+` branch corresponds to `|nu| = -p - sqrt(p^2 + 1 - q)` and the
/// `-` branch to `|nu| = -p + sqrt(p^2 + 1 - q)`, where
/// `p = |mu||x||y| cos eta`. When the branch's root is negative the state
/// is built from the non-negative root instead and `branch_matches_state`
/// is false.
pub fn closed_form_d(
    abs_mu: f64,
    abs_x: f64,
    abs_y: f64,
    eta: f64,
    branch: Branch,
) -> Result<ClosedFormD> {
    check_overlap_magnitude("|x|", abs_x)?;
    check_overlap_magnitude("|y|", abs_y)?;
    if abs_mu.is_nan() || abs_mu <= 0.0 || !abs_mu.is_finite() {
        return Err(Error::DomainError(format!(
            "|mu| = {abs_mu} must be positive"
        )));
    }
    let q = abs_mu * abs_mu;
    let case = OverlapCase::classify(abs_x, abs_y);
    let p = abs_mu * abs_x * abs_y * eta.cos();
    let disc = p * p - (q - 1.0);
    if disc < 0.0 {
        return Err(Error::NoCompatibleNu);
    }
    let root = disc.sqrt();

    let closed_form = match case {
        OverlapCase::OrthogonalOrthogonal => 1.0 - 4.0 * q * (1.0 - q),
        OverlapCase::OrthogonalNonorthogonal => {
            let s2 = abs_x.max(abs_y).powi(2);
            1.0 - 4.0 * q * (1.0 - q) * (1.0 - s2)
        }
        OverlapCase::NonorthogonalNonorthogonal => {
            let g = (1.0 - abs_x * abs_x) * (1.0 - abs_y * abs_y);
            let xy2 = (abs_x * abs_y).powi(2);
            let cos_eta = eta.cos();
            let z = (2.0 * (1.0 - q) + q * xy2 * (1.0 + (2.0 * eta).cos()))
                .max(0.0)
                .sqrt();
            let bracket = q
                + q * q * (2.0 * xy2 * cos_eta * cos_eta - 1.0)
                + branch.sign() * 2f64.sqrt() * z * q.powf(1.5) * abs_x * abs_y * cos_eta;
            1.0 - 4.0 * g * bracket
        }
    };

    let preferred = match branch {
        Branch::Plus => -p - root,
        Branch::Minus => -p + root,
    };
    let (abs_nu, branch_matches_state) = if case != OverlapCase::NonorthogonalNonorthogonal {
        (root, true)
    } else if preferred >= 0.0 {
        (preferred, true)
    } else {
        let fallback = -p + root;
        if fallback < 0.0 {
            return Err(Error::NoCompatibleNu);
        }
        (fallback, false)
    };
    let state = from_moduli(abs_mu, abs_nu, abs_x, abs_y, eta, true)?;
    let pipeline = pipeline_deviation(&state);
    Ok(ClosedFormD {
        case,
        branch,
        closed_form,
        pipeline,
        abs_difference: (closed_form - pipeline).abs(),
        abs_nu,
        branch_matches_state,
    })
}

/// Lower bound on `d` over all states with the given overlap magnitudes:
/// `1 - (1 - |x|^2)(1 - |y|^2) / (1 - |x||y|)^2`. Reduces to `s^2` when one
/// overlap `s` is nonzero and to zero for `|x| = |y|`.
pub fn deviation_floor(abs_x: f64, abs_y: f64) -> f64 {
    let g = (1.0 - abs_x * abs_x) * (1.0 - abs_y * abs_y);
    let t = 1.0 - abs_x * abs_y;
    1.0 - g / (t * t)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanGrid {
    pub eta_points: usize,
    pub q_points: usize,
}

impl Default for ScanGrid {
    fn default() -> Self {
        ScanGrid {
            eta_points: 720,
            q_points: 2000,
        }
    }
}

/// Smallest pipeline `d` found by a scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanSummary {
    pub min_d: f64,
    pub argmin_eta: f64,
    pub argmin_q: f64,
    pub states_evaluated: usize,
}

/// Scans `eta` over `(-pi, pi]` and `q = |mu|^2` over the full admissible
/// interval `(0, 1 / (1 - |x|^2 |y|^2 cos^2 eta))`, building every
/// normalized state (one or two `|nu|` per point) and recording the
/// smallest pipeline `d`.
///
/// When the cross term vanishes, `eta` has no effect and a single value is
/// scanned.
pub fn scan_min_deviation(abs_x: f64, abs_y: f64, grid: ScanGrid) -> Result<ScanSummary> {
    check_overlap_magnitude("|x|", abs_x)?;
    check_overlap_magnitude("|y|", abs_y)?;
    if grid.eta_points == 0 || grid.q_points == 0 {
        return Err(Error::DomainError("scan grid must be non-empty".into()));
    }
    let etas: Vec<f64> = if abs_x * abs_y == 0.0 {
        vec![PI]
    } else {
        (0..grid.eta_points)
            .map(|k| -PI + 2.0 * PI * (k + 1) as f64 / grid.eta_points as f64)
            .collect()
    };
    let xy2 = (abs_x * abs_y).powi(2);
    let per_eta: Vec<ScanSummary> = etas
        .par_iter()
        .map(|&eta| {
            let q_max = 1.0 / (1.0 - xy2 * eta.cos().powi(2));
            let mut best = ScanSummary {
                min_d: f64::INFINITY,
                argmin_eta: eta,
                argmin_q: f64::NAN,
                states_evaluated: 0,
            };
            for k in 1..=grid.q_points {
                let q = q_max * k as f64 / (grid.q_points + 1) as f64;
                let abs_mu = q.sqrt();
                for abs_nu in compatible_nu(abs_mu, abs_x, abs_y, eta) {
                    let Ok(state) = from_moduli(abs_mu, abs_nu, abs_x, abs_y, eta, true) else {
                        continue;
                    };
                    best.states_evaluated += 1;
                    let d = pipeline_deviation(&state);
                    if d < best.min_d {
                        best.min_d = d;
                        best.argmin_q = q;
                    }
                }
            }
            best
        })
        .collect();
    let total = per_eta.iter().map(|s| s.states_evaluated).sum();
    let mut best = per_eta
        .into_iter()
        .fold(None::<ScanSummary>, |acc, s| match acc {
            Some(a) if a.min_d <= s.min_d => Some(a),
            _ => Some(s),
        })
        .expect("at least one eta");
    best.states_evaluated = total;
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    /// Both overlaps vanish; `|mu|^2 = 1/2` is maximal.
    FeasibleOrthogonal,
    /// `|x| = |y| > 0` with `cos eta = -1`: the antisymmetric combination
    /// is maximally entangled.
    FeasibleDegenerate,
    Infeasible,
}

/// Outcome of [`maximal_feasibility`] together with its numerical check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityVerdict {
    pub verdict: Verdict,
    pub witness_q: Option<f64>,
    pub required_eta: Option<f64>,
    /// Pipeline `d` of the witness state.
    pub witness_d: Option<f64>,
    /// Scan backing an infeasible verdict.
    pub scan: Option<ScanSummary>,
    /// `deviation_floor(|x|, |y|)`
    pub analytic_floor: f64,
    /// The witness reached `d < 1e-10`, or the scan stayed above zero.
    pub validated: bool,
}

/// Decides whether maximal violation is reachable for the overlap
/// magnitudes, using the default scan grid for infeasible cases.
pub fn maximal_feasibility(abs_x: f64, abs_y: f64) -> Result<FeasibilityVerdict> {
    maximal_feasibility_with(abs_x, abs_y, Some(ScanGrid::default()))
}

/// As [`maximal_feasibility`]; `scan = None` skips the scan (the verdict is
/// then reported unvalidated).
pub fn maximal_feasibility_with(
    abs_x: f64,
    abs_y: f64,
    scan: Option<ScanGrid>,
) -> Result<FeasibilityVerdict> {
    check_overlap_magnitude("|x|", abs_x)?;
    check_overlap_magnitude("|y|", abs_y)?;
    let analytic_floor = deviation_floor(abs_x, abs_y);
    let witness = |q: f64, eta: f64, verdict: Verdict| -> Result<FeasibilityVerdict> {
        let state = state_for_deviation(q, abs_x, abs_y, eta, 0.0)?;
        let d = pipeline_deviation(&state);
        Ok(FeasibilityVerdict {
            verdict,
            witness_q: Some(q),
            required_eta: (verdict == Verdict::FeasibleDegenerate).then_some(eta),
            witness_d: Some(d),
            scan: None,
            analytic_floor,
            validated: d < WITNESS_TOL,
        })
    };
    match OverlapCase::classify(abs_x, abs_y) {
        OverlapCase::OrthogonalOrthogonal => witness(0.5, PI, Verdict::FeasibleOrthogonal),
        OverlapCase::NonorthogonalNonorthogonal if (abs_x - abs_y).abs() < EQUAL_OVERLAP_TOL => {
            let q = 1.0 / (2.0 * (1.0 - abs_x * abs_y));
            witness(q, PI, Verdict::FeasibleDegenerate)
        }
        _ => {
            let scan = scan
                .map(|g| scan_min_deviation(abs_x, abs_y, g))
                .transpose()?;
            Ok(FeasibilityVerdict {
                verdict: Verdict::Infeasible,
                witness_q: None,
                required_eta: None,
                witness_d: None,
                validated: scan.map(|s| s.min_d > 0.0).unwrap_or(false),
                scan,
                analytic_floor,
            })
        }
    }
}

/// Orthogonality threshold re-exported for callers that dispatch on case.
pub const fn orthogonal_tol() -> f64 {
    ORTHOGONAL_TOL
}
