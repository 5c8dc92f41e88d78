//! JSON reports aggregating every scalar computed for one state.

use serde::{Deserialize, Serialize};

use crate::bell::{
    analytic_bell, bell_expectation, canonical_settings, oracle_bell_search, BellSettings,
};
use crate::error::Result;
use crate::feasibility::{
    deviation, maximal_feasibility_with, Branch, FeasibilityVerdict, ScanGrid, Verdict,
};
use crate::kaon::{
    kaon_deviation_paper, kaon_entangled_state, kaon_overlap, half_overlap_sq, weak_decay_norm,
    CpViolation, KaonEvolution,
};
use crate::measures::{
    bits_to_nats, concurrence_det, concurrence_spin_flip, entanglement_entropy, entropy_direct,
};
use crate::schmidt::{reduced_density, schmidt_decompose, schmidt_eigenvalues, Side};
use crate::state::{NonorthogonalBipartiteState, OverlapCase, StateInput};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    pub grid_n: usize,
    pub refine_iters: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AnalyzeOptions {
    /// Run the brute-force CHSH search.
    pub oracle: Option<OracleConfig>,
    /// Scan backing an infeasible verdict; `None` skips it.
    pub feasibility_scan: Option<ScanGrid>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchmidtSummary {
    pub c_minus_abs: f64,
    pub c_plus_abs: f64,
    pub phi_minus: f64,
    pub phi_plus: f64,
    pub degenerate: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleSummary {
    pub grid_n: usize,
    pub refine_iters: usize,
    pub grid_value: f64,
    pub settings: BellSettings,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntanglementReport {
    pub schema_version: u32,
    /// Amplitudes and overlaps as supplied.
    pub input: StateInput,
    /// Amplitudes and overlaps after normalization.
    pub state: StateInput,
    pub case: OverlapCase,
    pub eta: Option<f64>,
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    pub schmidt: SchmidtSummary,
    pub bell_analytic: f64,
    pub bell_canonical: f64,
    pub bell_oracle: Option<f64>,
    pub oracle: Option<OracleSummary>,
    pub d: f64,
    pub concurrence: f64,
    pub concurrence_spin_flip: f64,
    pub entropy_bits: f64,
    pub entropy_nats: f64,
    pub feasibility: FeasibilityVerdict,
    pub warnings: Vec<String>,
}

pub fn analyze(
    input: StateInput,
    state: &NonorthogonalBipartiteState,
    options: &AnalyzeOptions,
) -> Result<EntanglementReport> {
    let mut warnings = Vec::new();
    let vector = state.embed();
    let form = schmidt_decompose(state);
    let (lambda_plus, lambda_minus) = schmidt_eigenvalues(state);
    let d = deviation(&form).value();
    let concurrence = concurrence_det(state);
    let entropy_bits = entanglement_entropy(concurrence);

    let settings = canonical_settings(&form);
    let bell_canonical = bell_expectation(&vector, &settings, &form.basis_a, &form.basis_b)?;
    if form.degenerate {
        warnings.push("Schmidt coefficients are degenerate; local bases are not unique".into());
    }
    let eta = state.eta_phase().ok();
    if eta.is_none() && state.case() == OverlapCase::NonorthogonalNonorthogonal {
        warnings.push("eta undefined: an amplitude vanishes".into());
    }
    let direct = entropy_direct(&reduced_density(state, Side::A));
    if (direct - entropy_bits).abs() > 1e-10 {
        warnings.push(format!(
            "entropy routes disagree: direct {direct} vs concurrence form {entropy_bits}"
        ));
    }

    let oracle = options.oracle.map(|cfg| {
        (
            cfg,
            oracle_bell_search(&vector, cfg.grid_n, cfg.refine_iters),
        )
    });
    let feasibility =
        maximal_feasibility_with(state.x().norm(), state.y().norm(), options.feasibility_scan)?;
    if feasibility.verdict == Verdict::FeasibleDegenerate {
        warnings
            .push("equal overlap magnitudes: maximal violation is reachable at eta = pi".into());
    }

    Ok(EntanglementReport {
        schema_version: SCHEMA_VERSION,
        input,
        state: state.to_input(),
        case: state.case(),
        eta,
        lambda_plus,
        lambda_minus,
        schmidt: SchmidtSummary {
            c_minus_abs: form.c_minus.norm(),
            c_plus_abs: form.c_plus.norm(),
            phi_minus: form.phi_minus,
            phi_plus: form.phi_plus,
            degenerate: form.degenerate,
        },
        bell_analytic: analytic_bell(&form),
        bell_canonical,
        bell_oracle: oracle.map(|(_, out)| out.value),
        oracle: oracle.map(|(cfg, out)| OracleSummary {
            grid_n: cfg.grid_n,
            refine_iters: cfg.refine_iters,
            grid_value: out.grid_value,
            settings: out.settings,
        }),
        d,
        concurrence,
        concurrence_spin_flip: concurrence_spin_flip(&vector),
        entropy_bits,
        entropy_nats: bits_to_nats(entropy_bits),
        feasibility,
        warnings,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexValue {
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvolutionSummary {
    pub gamma_s: f64,
    pub gamma_l: f64,
    pub t: f64,
    pub weak_decay_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KaonReport {
    pub schema_version: u32,
    pub epsilon: ComplexValue,
    /// `<K_S|K_L>` from the mass eigenstates.
    pub overlap: ComplexValue,
    pub overlap_abs_sq: f64,
    /// `(Re eps / (1 + |eps|^2))^2`, the squared half overlap.
    pub half_overlap_abs_sq: f64,
    pub evolution: Option<EvolutionSummary>,
    pub eta: f64,
    pub closed_form_d_plus: f64,
    pub closed_form_d_minus: f64,
    pub pipeline_d: f64,
    pub discrepancy_plus: f64,
    pub discrepancy_minus: f64,
    pub report: EntanglementReport,
}

pub fn analyze_kaon(
    eps: CpViolation,
    evolution: Option<KaonEvolution>,
    eta: f64,
    options: &AnalyzeOptions,
) -> Result<KaonReport> {
    let state = kaon_entangled_state(eps);
    let report = analyze(state.to_input(), &state, options)?;
    let overlap = kaon_overlap(eps);
    let plus = kaon_deviation_paper(eps, eta, Branch::Plus);
    let minus = kaon_deviation_paper(eps, eta, Branch::Minus);
    let evolution = evolution
        .map(|evo| {
            weak_decay_norm(eps, evo).map(|n| EvolutionSummary {
                gamma_s: evo.gamma_s,
                gamma_l: evo.gamma_l,
                t: evo.t,
                weak_decay_norm: n,
            })
        })
        .transpose()?;
    Ok(KaonReport {
        schema_version: SCHEMA_VERSION,
        epsilon: ComplexValue {
            re: eps.epsilon().re,
            im: eps.epsilon().im,
        },
        overlap: ComplexValue {
            re: overlap.re,
            im: overlap.im,
        },
        overlap_abs_sq: overlap.norm_sqr(),
        half_overlap_abs_sq: half_overlap_sq(eps),
        evolution,
        eta,
        closed_form_d_plus: plus.closed_form,
        closed_form_d_minus: minus.closed_form,
        pipeline_d: plus.pipeline,
        discrepancy_plus: plus.discrepancy,
        discrepancy_minus: minus.discrepancy,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{C64, ONE, ZERO};
    use crate::state::make_state;
    use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

    fn run(state: NonorthogonalBipartiteState) -> EntanglementReport {
        analyze(state.to_input(), &state, &AnalyzeOptions::default()).unwrap()
    }

    #[test]
    fn singlet_report() {
        let h = C64::new(FRAC_1_SQRT_2, 0.0);
        let r = run(make_state(h, -h, ZERO, ZERO, false).unwrap());
        assert!(r.d.abs() < 1e-15);
        assert!((r.concurrence - 1.0).abs() < 1e-15);
        assert!((r.entropy_bits - 1.0).abs() < 1e-15);
        assert!((r.bell_analytic - 2.0 * SQRT_2).abs() < 1e-15);
        assert!((r.bell_canonical - 2.0 * SQRT_2).abs() < 1e-12);
        assert_eq!(r.feasibility.verdict, Verdict::FeasibleOrthogonal);
        assert!(!r.warnings.is_empty());
    }

    #[test]
    fn product_report() {
        let r = run(make_state(ONE, ZERO, C64::new(0.5, 0.0), C64::new(0.3, 0.0), false).unwrap());
        assert_eq!(r.d, 1.0);
        assert_eq!(r.concurrence, 0.0);
        assert_eq!(r.entropy_bits, 0.0);
        assert_eq!(r.bell_analytic, 2.0);
        assert!(r.eta.is_none());
    }

    #[test]
    fn on_report_and_invariants() {
        let h = C64::new(FRAC_1_SQRT_2, 0.0);
        let r = run(make_state(h, h, C64::new(0.1f64.sqrt(), 0.0), ZERO, false).unwrap());
        assert!((r.d - 0.1).abs() < 1e-14);
        assert!((r.concurrence - 0.9f64.sqrt()).abs() < 1e-15);
        assert!((r.bell_analytic - 2.0 * (2.0 - r.d).sqrt()).abs() < 1e-12);
        assert!((r.concurrence.powi(2) + r.d - 1.0).abs() < 1e-12);
    }

    #[test]
    fn kaon_report_fields() {
        let eps = CpViolation::real(1e-3).unwrap();
        let evo = KaonEvolution::new(1.0, 0.002, 0.0).unwrap();
        let r = analyze_kaon(eps, Some(evo), PI, &AnalyzeOptions::default()).unwrap();
        assert!(r.pipeline_d < 1e-12);
        assert!(r.report.d < 1e-12);
        assert!((r.overlap.re - 2e-3 / (1.0 + 1e-6)).abs() < 1e-15);
        assert!((r.overlap_abs_sq / r.half_overlap_abs_sq - 4.0).abs() < 1e-9);
        assert!((r.evolution.unwrap().weak_decay_norm - (1.0 + 1e-6) / (1.0 - 1e-6)).abs() < 1e-15);
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.starts_with("{\"schema_version\":1"));
    }
}
