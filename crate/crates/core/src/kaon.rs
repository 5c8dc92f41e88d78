//! Neutral kaons with CP violation.
//!
//! Mass eigenstates are written in the CP basis `(K_1, K_2)`:
//! `K_S = (1, eps) / sqrt(1 + |eps|^2)` and `K_L = (eps, 1) / sqrt(1 + |eps|^2)`.
//! Their overlap is nonzero whenever `Re eps != 0`, so the antisymmetric
//! kaon pair from phi decay is a state over non-orthogonal components.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::feasibility::{pipeline_deviation, Branch};
use crate::linalg::{inner2, kron_vec, norm4, Vec2, Vec4, C64, ONE};
use crate::state::{make_state, NonorthogonalBipartiteState};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CpViolation(C64);

impl CpViolation {
    pub fn new(epsilon: C64) -> Result<Self> {
        let m = epsilon.norm();
        if !m.is_finite() || m >= 1.0 {
            return Err(Error::DomainError(format!("|eps| = {m} must be below 1")));
        }
        Ok(CpViolation(epsilon))
    }

    pub fn real(re: f64) -> Result<Self> {
        Self::new(C64::new(re, 0.0))
    }

    pub fn epsilon(&self) -> C64 {
        self.0
    }
}

/// Decay widths and elapsed proper time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KaonEvolution {
    pub gamma_s: f64,
    pub gamma_l: f64,
    pub t: f64,
}

impl KaonEvolution {
    pub fn new(gamma_s: f64, gamma_l: f64, t: f64) -> Result<Self> {
        let ok = |v: f64| v.is_finite() && v >= 0.0;
        if !(ok(gamma_s) && ok(gamma_l) && ok(t)) {
            return Err(Error::DomainError(
                "decay widths and time must be finite and non-negative".into(),
            ));
        }
        Ok(KaonEvolution {
            gamma_s,
            gamma_l,
            t,
        })
    }
}

/// `(K_S, K_L)` in the CP basis.
pub fn mass_eigenstates(eps: CpViolation) -> [Vec2; 2] {
    let e = eps.0;
    let n = (1.0 + e.norm_sqr()).sqrt().recip();
    [[ONE * n, e * n], [e * n, ONE * n]]
}

/// `<K_S|K_L>`, computed as an inner product of the mass eigenstates.
pub fn kaon_overlap(eps: CpViolation) -> C64 {
    let [ks, kl] = mass_eigenstates(eps);
    inner2(&ks, &kl)
}

/// Squared half overlap `(Re eps / (1 + |eps|^2))^2`, as it enters the closed
/// form for `d(eps)`; a quarter of `|<K_S|K_L>|^2`.
pub fn half_overlap_sq(eps: CpViolation) -> f64 {
    let e = eps.0;
    (e.re / (1.0 + e.norm_sqr())).powi(2)
}

/// Normalized `K_S (x) K_L - K_L (x) K_S` in the CP (x) CP basis.
pub fn kaon_pair_vector(eps: CpViolation) -> Vec4 {
    let [ks, kl] = mass_eigenstates(eps);
    let sl = kron_vec(&ks, &kl);
    let ls = kron_vec(&kl, &ks);
    let mut v: Vec4 = [C64::new(0.0, 0.0); 4];
    for i in 0..4 {
        v[i] = sl[i] - ls[i];
    }
    let n = norm4(&v);
    v.map(|z| z / n)
}

/// The antisymmetric pair as a non-orthogonal bipartite state:
/// `alpha = K_S`, `beta = K_L`, `gamma = K_L`, `delta = K_S`, `mu = -nu`
/// and `x = y = <K_S|K_L>`.
pub fn kaon_entangled_state(eps: CpViolation) -> NonorthogonalBipartiteState {
    let overlap = kaon_overlap(eps);
    make_state(ONE, -ONE, overlap, overlap, true).expect("|<K_S|K_L>| < 1 for |eps| < 1")
}

/// `|N(t)| = (1 + |eps|^2) / |1 - eps^2| * exp(-(Gamma_S + Gamma_L) t / 2)`.
pub fn weak_decay_norm(eps: CpViolation, evo: KaonEvolution) -> Result<f64> {
    let e = eps.0;
    let denom = (ONE - e * e).norm();
    if denom < 1e-300 {
        return Err(Error::SingularNorm(denom));
    }
    Ok((1.0 + e.norm_sqr()) / denom * (-0.5 * (evo.gamma_s + evo.gamma_l) * evo.t).exp())
}

/// Closed form for `d(eps)` next to the pipeline value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KaonDeviation {
    pub branch: Branch,
    pub eta: f64,
    pub closed_form: f64,
    pub pipeline: f64,
    pub discrepancy: f64,
}

/// Evaluates
/// `d = 1 - (1 - r^2)^2 [1 + sqrt(2) Y cos eta (Re eps)^2 (1 + |eps|^2)^-4]`
/// with `r = Re eps / (1 + |eps|^2)` and
/// `Y = sqrt(2) cos eta (Re eps)^2 +- sqrt((Re eps)^4 (1 + cos 2 eta) + 2 (1 + |eps|^2)^4)`.
pub fn kaon_deviation_paper(eps: CpViolation, eta: f64, branch: Branch) -> KaonDeviation {
    let e = eps.0;
    let re2 = e.re * e.re;
    let norm4 = (1.0 + e.norm_sqr()).powi(4);
    let r2 = half_overlap_sq(eps);
    let y = 2f64.sqrt() * eta.cos() * re2
        + branch.sign() * (re2 * re2 + re2 * re2 * (2.0 * eta).cos() + 2.0 * norm4).sqrt();
    let closed_form = 1.0 - (1.0 - r2).powi(2) * (1.0 + 2f64.sqrt() * y * eta.cos() * re2 / norm4);
    let pipeline = pipeline_deviation(&kaon_entangled_state(eps));
    KaonDeviation {
        branch,
        eta,
        closed_form,
        pipeline,
        discrepancy: (closed_form - pipeline).abs(),
    }
}
