//! Self-verification suite behind `nonortho verify`.

use std::f64::consts::{PI, SQRT_2};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::bell::{analytic_bell, bell_expectation, canonical_settings, oracle_bell_max};
use crate::feasibility::Branch;
use crate::feasibility::{
    deviation, deviation_floor, maximal_feasibility_with, pipeline_deviation, scan_min_deviation,
    state_for_deviation, ScanGrid, Verdict,
};
use crate::kaon::{
    kaon_deviation_paper, kaon_entangled_state, kaon_overlap, weak_decay_norm, CpViolation,
    KaonEvolution,
};
use crate::linalg::{max_diff_up_to_phase, C64, ONE, ZERO};
use crate::measures::{
    concurrence_det, concurrence_with_flip, entanglement_entropy, entropy_direct, SpinFlip,
};
use crate::sampling::random_states;
use crate::schmidt::{
    reconstruct, reduced_density, schmidt_decompose, schmidt_eigenvalues, schmidt_product, Side,
};
use crate::state::{make_state, NonorthogonalBipartiteState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Quick,
    Full,
}

/// Deliberate defects used to confirm that the suite can fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Mutation {
    None,
    /// Normalization identity checked against a right-hand side of 0.
    NormalizationRhsZero,
    /// Spin flip applied to side A only.
    SingleSpinFlip,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    pub level: Level,
    pub seed: u64,
    pub grid_n: usize,
    pub refine_iters: usize,
    pub mutation: Mutation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifySummary {
    pub schema_version: u32,
    pub level: Level,
    pub seed: u64,
    pub mutation: Mutation,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

fn timed(name: &str, f: impl FnOnce() -> (bool, String)) -> CheckResult {
    let start = Instant::now();
    let (passed, detail) = f();
    CheckResult {
        name: name.to_string(),
        passed,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    }
}

/// Tracks the largest value of an error measure and whether it stayed
/// within a bound.
struct MaxError {
    label: &'static str,
    bound: f64,
    worst: f64,
}

impl MaxError {
    fn new(label: &'static str, bound: f64) -> Self {
        MaxError {
            label,
            bound,
            worst: 0.0,
        }
    }

    fn record(&mut self, e: f64) {
        // NaN counts as a failure.
        if e.is_nan() {
            self.worst = f64::INFINITY;
        } else if e > self.worst {
            self.worst = e;
        }
    }

    fn ok(&self) -> bool {
        self.worst <= self.bound
    }

    fn describe(&self) -> String {
        format!(
            "{} max {:.3e} (bound {:.0e})",
            self.label, self.worst, self.bound
        )
    }
}

fn summarize(errors: &[MaxError]) -> (bool, String) {
    let ok = errors.iter().all(MaxError::ok);
    let detail = errors
        .iter()
        .map(MaxError::describe)
        .collect::<Vec<_>>()
        .join("; ");
    (ok, detail)
}

fn fixed_examples() -> (bool, String) {
    let h = C64::new(0.5f64.sqrt(), 0.0);
    let mut e = MaxError::new("deviation from expected", 1e-12);
    let mut check = |state: &NonorthogonalBipartiteState, d: f64, c: f64, ent: f64, b: f64| {
        let form = schmidt_decompose(state);
        let cc = concurrence_det(state);
        e.record((deviation(&form).value() - d).abs());
        e.record((cc - c).abs());
        e.record((entanglement_entropy(cc) - ent).abs());
        e.record((analytic_bell(&form) - b).abs());
    };
    let oo = make_state(h, h, ZERO, ZERO, false).expect("valid");
    check(&oo, 0.0, 1.0, 1.0, 2.0 * SQRT_2);
    let product =
        make_state(ONE, ZERO, C64::new(0.5, 0.0), C64::new(0.3, 0.0), false).expect("valid");
    check(&product, 1.0, 0.0, 0.0, 2.0);
    let on = make_state(h, h, C64::new(0.1f64.sqrt(), 0.0), ZERO, false).expect("valid");
    let c_on = 0.9f64.sqrt();
    check(
        &on,
        0.1,
        c_on,
        entanglement_entropy(c_on),
        2.0 * 1.9f64.sqrt(),
    );
    summarize(&[e])
}

fn normalization(states: &[NonorthogonalBipartiteState], rhs: f64) -> (bool, String) {
    let mut phase = MaxError::new("|mu|^2+|nu|^2+2|mu nu x y|cos eta - rhs", 1e-12);
    let mut norm = MaxError::new("embedded norm - 1", 1e-12);
    for s in states {
        phase.record((s.phase_form_norm() - rhs).abs());
        norm.record((s.embed().norm() - 1.0).abs());
    }
    summarize(&[phase, norm])
}

fn identities(states: &[NonorthogonalBipartiteState], flip: SpinFlip) -> (bool, String) {
    let mut bell = MaxError::new("bell - 2 sqrt(2 - d)", 1e-12);
    let mut cd = MaxError::new("C^2 + d - 1", 1e-12);
    let mut cc = MaxError::new("C_det - C_flip", 1e-12);
    let mut ent = MaxError::new("E_direct - E(C)", 1e-12);
    for s in states {
        let form = schmidt_decompose(s);
        let d = deviation(&form).value();
        let c = concurrence_det(s);
        bell.record((analytic_bell(&form) - 2.0 * (2.0 - d).sqrt()).abs());
        cd.record((c * c + d - 1.0).abs());
        cc.record((c - concurrence_with_flip(&s.embed(), flip)).abs());
        ent.record((entropy_direct(&reduced_density(s, Side::A)) - entanglement_entropy(c)).abs());
    }
    summarize(&[bell, cd, cc, ent])
}

fn canonical_bell(states: &[NonorthogonalBipartiteState]) -> (bool, String) {
    let mut e = MaxError::new("canonical expectation - closed form", 1e-9);
    for s in states {
        let form = schmidt_decompose(s);
        let settings = canonical_settings(&form);
        match bell_expectation(&s.embed(), &settings, &form.basis_a, &form.basis_b) {
            Ok(v) => e.record((v - analytic_bell(&form)).abs()),
            Err(_) => e.record(f64::INFINITY),
        }
    }
    summarize(&[e])
}

fn schmidt_round_trip(states: &[NonorthogonalBipartiteState]) -> (bool, String) {
    let mut rt = MaxError::new("reconstruction up to phase", 1e-12);
    let mut det = MaxError::new("det rho - |mu nu N^A N^B|^2", 1e-12);
    let mut eig = MaxError::new("|c|^2 - lambda", 1e-12);
    for s in states {
        let form = schmidt_decompose(s);
        rt.record(max_diff_up_to_phase(&reconstruct(&form).0, &s.embed().0));
        let p = schmidt_product(s);
        det.record((reduced_density(s, Side::A).det() - p).abs());
        det.record((reduced_density(s, Side::B).det() - p).abs());
        let (lp, lm) = schmidt_eigenvalues(s);
        eig.record((form.c_plus.norm_sqr() - lp).abs());
        eig.record((form.c_minus.norm_sqr() - lm).abs());
    }
    summarize(&[rt, det, eig])
}

fn kaon_checks() -> (bool, String) {
    let mut d = MaxError::new("kaon pipeline d", 1e-12);
    let mut c = MaxError::new("kaon C - 1", 1e-12);
    let mut o = MaxError::new("overlap - 2 Re eps/(1+|eps|^2)", 1e-15);
    let mut notes = Vec::new();
    for re in [0.0, 1e-3, 1e-2, 1e-1] {
        let eps = CpViolation::real(re).expect("|eps| < 1");
        let s = kaon_entangled_state(eps);
        d.record(pipeline_deviation(&s));
        c.record((concurrence_det(&s) - 1.0).abs());
        o.record((kaon_overlap(eps).re - 2.0 * re / (1.0 + re * re)).abs());
        for branch in [Branch::Plus, Branch::Minus] {
            let k = kaon_deviation_paper(eps, PI, branch);
            notes.push(format!(
                "eps={re:e} {branch:?}: |closed-pipeline|={:.3e}",
                k.discrepancy
            ));
        }
    }
    let zero = CpViolation::real(0.0).expect("valid");
    let evo = KaonEvolution::new(1.0, 0.5, 2.0 / 1.5).expect("valid");
    let mut n = MaxError::new("|N(t)| - 1/e", 1e-12);
    n.record((weak_decay_norm(zero, evo).unwrap_or(f64::NAN) - (-1f64).exp()).abs());
    let (ok, detail) = summarize(&[d, c, o, n]);
    (ok, format!("{detail}; {}", notes.join(", ")))
}

fn feasibility_witnesses() -> (bool, String) {
    let mut ok = true;
    let mut parts = Vec::new();
    for (x, y, expected) in [
        (0.0, 0.0, Verdict::FeasibleOrthogonal),
        (0.3, 0.0, Verdict::Infeasible),
        (0.3, 0.3, Verdict::FeasibleDegenerate),
        (0.5, 0.2, Verdict::Infeasible),
    ] {
        match maximal_feasibility_with(x, y, None) {
            Ok(v) => {
                let good =
                    v.verdict == expected && (expected == Verdict::Infeasible || v.validated);
                ok &= good;
                parts.push(format!("({x},{y}) -> {:?}", v.verdict));
            }
            Err(e) => {
                ok = false;
                parts.push(format!("({x},{y}) -> error {e}"));
            }
        }
    }
    (ok, parts.join(", "))
}

fn oracle_vs_closed_form(
    states: &[NonorthogonalBipartiteState],
    grid_n: usize,
    refine_iters: usize,
) -> (bool, String) {
    let mut gap = MaxError::new("|oracle - closed form|", 1e-4);
    let mut loss = MaxError::new("canonical - oracle", 1e-9);
    let mut ceiling = MaxError::new("oracle - 2 sqrt 2", 1e-9);
    for s in states {
        let form = schmidt_decompose(s);
        let analytic = analytic_bell(&form);
        let canonical = bell_expectation(
            &s.embed(),
            &canonical_settings(&form),
            &form.basis_a,
            &form.basis_b,
        )
        .unwrap_or(f64::NAN);
        let oracle = oracle_bell_max(&s.embed(), grid_n, refine_iters);
        gap.record((oracle - analytic).abs());
        loss.record((canonical - oracle).max(0.0));
        ceiling.record((oracle - 2.0 * SQRT_2).max(0.0));
    }
    summarize(&[gap, loss, ceiling])
}

fn on_scans() -> (bool, String) {
    let mut worst = f64::INFINITY;
    let mut ok = true;
    for k in 1..=18 {
        let x = 0.05 * k as f64;
        let grid = ScanGrid {
            eta_points: 1,
            q_points: 2000,
        };
        match scan_min_deviation(x, 0.0, grid) {
            Ok(s) => {
                ok &= s.min_d >= x * x - 1e-10;
                worst = worst.min(s.min_d - x * x);
            }
            Err(_) => ok = false,
        }
        ok &= matches!(
            maximal_feasibility_with(x, 0.0, None).map(|v| v.verdict),
            Ok(Verdict::Infeasible)
        );
    }
    (ok, format!("min (scan d - |x|^2) = {worst:.3e}"))
}

fn nn_scans() -> (bool, String) {
    let mut ok = true;
    let mut worst = f64::INFINITY;
    let pairs = [
        (0.1, 0.3),
        (0.3, 0.5),
        (0.5, 0.2),
        (0.7, 0.4),
        (0.9, 0.6),
        (0.2, 0.8),
    ];
    for (x, y) in pairs {
        let floor = deviation_floor(x, y);
        match scan_min_deviation(x, y, ScanGrid::default()) {
            Ok(s) => {
                ok &= floor > 0.0 && s.min_d >= floor - 1e-9;
                worst = worst.min(s.min_d - floor);
            }
            Err(_) => ok = false,
        }
    }
    let mut boundary = MaxError::new("boundary family d", 1e-12);
    for s in [0.1, 0.3, 0.5] {
        let q = 1.0 / (2.0 * (1.0 - s * s));
        match state_for_deviation(q, s, s, PI, 0.0) {
            Ok(state) => boundary.record(pipeline_deviation(&state)),
            Err(_) => boundary.record(f64::INFINITY),
        }
    }
    ok &= boundary.ok();
    (
        ok,
        format!(
            "min (scan d - floor) = {worst:.3e}; {}",
            boundary.describe()
        ),
    )
}

pub fn run_verify(options: &VerifyOptions) -> VerifySummary {
    let (n_ident, n_canon, n_rt) = match options.level {
        Level::Quick => (2_000, 200, 200),
        Level::Full => (10_000, 1_000, 1_000),
    };
    let states = random_states(options.seed, n_ident);
    let rhs = match options.mutation {
        Mutation::NormalizationRhsZero => 0.0,
        _ => 1.0,
    };
    let flip = match options.mutation {
        Mutation::SingleSpinFlip => SpinFlip::SideAOnly,
        _ => SpinFlip::TwoFold,
    };

    let mut checks = vec![
        timed("fixed examples", fixed_examples),
        timed("normalization", || normalization(&states, rhs)),
        timed("closed-form identities", || identities(&states, flip)),
        timed("canonical settings reach closed form", || {
            canonical_bell(&states[..n_canon])
        }),
        timed("Schmidt round trip", || schmidt_round_trip(&states[..n_rt])),
        timed("kaon application", kaon_checks),
        timed("feasibility witnesses", feasibility_witnesses),
    ];
    if options.level == Level::Full {
        let oracle_states = random_states(options.seed.wrapping_add(1), 100);
        checks.push(timed("CHSH oracle vs closed form", || {
            oracle_vs_closed_form(&oracle_states, options.grid_n, options.refine_iters)
        }));
        checks.push(timed("ON impossibility scan", on_scans));
        checks.push(timed("NN floor scan and boundary family", nn_scans));
    }
    VerifySummary {
        schema_version: crate::report::SCHEMA_VERSION,
        level: options.level,
        seed: options.seed,
        mutation: options.mutation,
        passed: checks.iter().all(|c| c.passed),
        checks,
    }
}
