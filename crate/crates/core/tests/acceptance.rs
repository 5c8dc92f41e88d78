//! Acceptance suite: one line per criterion, nonzero exit on any failure.

use std::f64::consts::{PI, SQRT_2};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use nonortho::bell::{
    analytic_bell, bell_expectation, canonical_settings, oracle_bell_max, DEFAULT_GRID_N,
    DEFAULT_REFINE_ITERS,
};
use nonortho::feasibility::{
    deviation, deviation_floor, maximal_feasibility, pipeline_deviation, scan_min_deviation,
    state_for_deviation, Branch, ScanGrid, Verdict,
};
use nonortho::kaon::{
    kaon_deviation_paper, kaon_entangled_state, kaon_overlap, weak_decay_norm, CpViolation,
    KaonEvolution,
};
use nonortho::linalg::{max_diff_up_to_phase, C64, ZERO};
use nonortho::measures::{
    concurrence_det, concurrence_spin_flip, concurrence_with_flip, entanglement_entropy,
    entropy_direct, SpinFlip,
};
use nonortho::sampling::{random_states, DEFAULT_SEED};
use nonortho::schmidt::{reconstruct, reduced_density, schmidt_decompose, schmidt_product, Side};
use nonortho::verify::{run_verify, Level, Mutation, VerifyOptions};
use nonortho::{make_state, NonorthogonalBipartiteState};

type Criterion = (u32, fn() -> Outcome, Duration);

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

/// Running maximum of an error, with NaN treated as infinite.
#[derive(Default)]
struct Worst(f64);

impl Worst {
    fn add(&mut self, e: f64) {
        if e.is_nan() {
            self.0 = f64::INFINITY;
        } else if e > self.0 {
            self.0 = e;
        }
    }
}

fn bell_pipeline_errors(states: &[NonorthogonalBipartiteState], flip: SpinFlip) -> [f64; 4] {
    let mut w = [
        Worst::default(),
        Worst::default(),
        Worst::default(),
        Worst::default(),
    ];
    for s in states {
        let form = schmidt_decompose(s);
        let d = deviation(&form).value();
        let c = concurrence_det(s);
        w[0].add((analytic_bell(&form) - 2.0 * (2.0 - d).sqrt()).abs());
        w[1].add((c * c + d - 1.0).abs());
        w[2].add((c - concurrence_with_flip(&s.embed(), flip)).abs());
        w[3].add((entropy_direct(&reduced_density(s, Side::A)) - entanglement_entropy(c)).abs());
    }
    w.map(|x| x.0)
}

fn criterion_1() -> Outcome {
    let h = C64::new(0.5f64.sqrt(), 0.0);
    let s = make_state(h, h, ZERO, ZERO, false).expect("valid state");
    let form = schmidt_decompose(&s);
    let c = concurrence_det(&s);
    let errs = [
        (analytic_bell(&form) - 2.0 * SQRT_2).abs(),
        deviation(&form).value().abs(),
        (c - 1.0).abs(),
        (entanglement_entropy(c) - 1.0).abs(),
    ];
    let worst = errs.iter().cloned().fold(0.0, f64::max);
    outcome(worst <= 1e-12, format!("max error {worst:.2e}"))
}

fn criterion_2() -> Outcome {
    let states = random_states(DEFAULT_SEED, 10_000);
    let e = bell_pipeline_errors(&states, SpinFlip::TwoFold);
    let ok = e.iter().all(|&x| x <= 1e-12);
    outcome(
        ok,
        format!(
            "bell {:.2e}, C^2+d {:.2e}, C det/flip {:.2e}, entropy {:.2e}",
            e[0], e[1], e[2], e[3]
        ),
    )
}

fn criterion_3() -> Outcome {
    let mut w = Worst::default();
    for s in random_states(DEFAULT_SEED + 3, 1_000) {
        let form = schmidt_decompose(&s);
        let v = bell_expectation(
            &s.embed(),
            &canonical_settings(&form),
            &form.basis_a,
            &form.basis_b,
        );
        w.add(v.map_or(f64::NAN, |v| (v - analytic_bell(&form)).abs()));
    }
    outcome(
        w.0 <= 1e-9,
        format!("max |canonical - closed form| {:.2e}", w.0),
    )
}

fn criterion_4() -> Outcome {
    let mut gap = Worst::default();
    let mut loss = Worst::default();
    for s in random_states(DEFAULT_SEED + 4, 100) {
        let form = schmidt_decompose(&s);
        let canonical = bell_expectation(
            &s.embed(),
            &canonical_settings(&form),
            &form.basis_a,
            &form.basis_b,
        )
        .unwrap_or(f64::NAN);
        let oracle = oracle_bell_max(&s.embed(), DEFAULT_GRID_N, DEFAULT_REFINE_ITERS);
        gap.add((oracle - analytic_bell(&form)).abs());
        loss.add(canonical - oracle);
    }
    outcome(
        gap.0 <= 1e-4 && loss.0 <= 1e-9,
        format!(
            "max |oracle - closed form| {:.2e}, max shortfall below canonical {:.2e}",
            gap.0, loss.0
        ),
    )
}

fn criterion_5() -> Outcome {
    let mut ok = true;
    let mut margin = f64::INFINITY;
    for k in 1..=18 {
        let x = 0.05 * k as f64;
        let scan = scan_min_deviation(
            x,
            0.0,
            ScanGrid {
                eta_points: 720,
                q_points: 2000,
            },
        );
        match scan {
            Ok(s) => {
                ok &= s.min_d >= x * x - 1e-10;
                margin = margin.min(s.min_d - x * x);
            }
            Err(_) => ok = false,
        }
        ok &= (deviation_floor(x, 0.0) - x * x).abs() <= 1e-12;
        ok &= matches!(maximal_feasibility(x, 0.0), Ok(v) if v.verdict == Verdict::Infeasible);
    }
    outcome(ok, format!("18 pairs, min (scan d - |x|^2) {margin:.2e}"))
}

fn criterion_6() -> Outcome {
    let values = [0.1, 0.3, 0.5, 0.7, 0.9];
    let mut ok = true;
    let mut margin = f64::INFINITY;
    let mut pairs = 0;
    for &x in &values {
        for &y in &values {
            if x == y {
                continue;
            }
            pairs += 1;
            let floor = 1.0 - (1.0 - x * x) * (1.0 - y * y) / (1.0 - x * y) / (1.0 - x * y);
            match scan_min_deviation(x, y, ScanGrid::default()) {
                Ok(s) => {
                    ok &= floor > 0.0 && s.min_d >= floor - 1e-9;
                    margin = margin.min(s.min_d - floor);
                }
                Err(_) => ok = false,
            }
        }
    }
    let mut boundary = Worst::default();
    for s in [0.1, 0.3, 0.5] {
        let q = 1.0 / (2.0 * (1.0 - s * s));
        match state_for_deviation(q, s, s, PI, 0.0) {
            Ok(state) => boundary.add(pipeline_deviation(&state)),
            Err(_) => boundary.add(f64::INFINITY),
        }
    }
    ok &= boundary.0 <= 1e-12;
    outcome(
        ok,
        format!(
            "{pairs} pairs, min (scan d - floor) {margin:.2e}; boundary family max d {:.2e}",
            boundary.0
        ),
    )
}

fn criterion_7() -> Outcome {
    let mut rt = Worst::default();
    let mut det = Worst::default();
    for s in random_states(DEFAULT_SEED + 7, 1_000) {
        let form = schmidt_decompose(&s);
        rt.add(max_diff_up_to_phase(&reconstruct(&form).0, &s.embed().0));
        let p = schmidt_product(&s);
        det.add((reduced_density(&s, Side::A).det() - p).abs());
        det.add((reduced_density(&s, Side::B).det() - p).abs());
    }
    outcome(
        rt.0 <= 1e-12 && det.0 <= 1e-12,
        format!("round trip {:.2e}, det {:.2e}", rt.0, det.0),
    )
}

fn criterion_8() -> Outcome {
    let mut ok = true;
    let mut d = Worst::default();
    let mut c = Worst::default();
    let mut overlap = Worst::default();
    let mut discrepancies = Vec::new();
    for re in [0.0, 1e-3, 1e-2, 1e-1] {
        let eps = CpViolation::real(re).expect("|eps| < 1");
        let s = kaon_entangled_state(eps);
        d.add(pipeline_deviation(&s));
        c.add((concurrence_det(&s) - 1.0).abs());
        c.add((concurrence_spin_flip(&s.embed()) - 1.0).abs());
        overlap.add((kaon_overlap(eps) - C64::new(2.0 * re / (1.0 + re * re), 0.0)).norm());
        for branch in [Branch::Plus, Branch::Minus] {
            let k = kaon_deviation_paper(eps, PI, branch);
            ok &= k.closed_form.is_finite() && k.discrepancy.is_finite();
            discrepancies.push(format!("{re:e}/{branch:?} {:.2e}", k.discrepancy));
        }
    }
    let zero = CpViolation::real(0.0).expect("valid");
    let (gs, gl) = (1.0, 0.4);
    let evo = KaonEvolution::new(gs, gl, 2.0 / (gs + gl)).expect("valid evolution");
    let decay = (weak_decay_norm(zero, evo).unwrap_or(f64::NAN) - (-1f64).exp()).abs();
    ok &= d.0 <= 1e-12 && c.0 <= 1e-12 && overlap.0 <= 1e-15 && decay <= 1e-12;
    outcome(
        ok,
        format!(
            "d {:.2e}, C {:.2e}, overlap {:.2e}, decay {:.2e}; |closed form - pipeline|: {}",
            d.0,
            c.0,
            overlap.0,
            decay,
            discrepancies.join(", ")
        ),
    )
}

fn criterion_9() -> Outcome {
    let run = |mutation| {
        run_verify(&VerifyOptions {
            level: Level::Quick,
            seed: DEFAULT_SEED,
            grid_n: DEFAULT_GRID_N,
            refine_iters: DEFAULT_REFINE_ITERS,
            mutation,
        })
    };
    let failed = |summary: &nonortho::verify::VerifySummary, name: &str| {
        summary.checks.iter().any(|c| c.name == name && !c.passed)
    };
    let clean = run(Mutation::None);
    let rhs = run(Mutation::NormalizationRhsZero);
    let flip = run(Mutation::SingleSpinFlip);
    let e = bell_pipeline_errors(&random_states(DEFAULT_SEED, 10_000), SpinFlip::SideAOnly);
    let criterion_2_breaks = e[2] > 1e-12;
    let ok = clean.passed
        && !rhs.passed
        && failed(&rhs, "normalization")
        && !flip.passed
        && failed(&flip, "closed-form identities")
        && criterion_2_breaks;
    outcome(
        ok,
        format!(
            "clean verify {}, rhs=0 verify {}, single flip verify {}, single flip C det/flip error {:.2e}",
            clean.passed, rhs.passed, flip.passed, e[2]
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        (1, criterion_1, Duration::from_secs(1)),
        (2, criterion_2, Duration::from_secs(10)),
        (3, criterion_3, Duration::from_secs(10)),
        (4, criterion_4, Duration::from_secs(300)),
        (5, criterion_5, Duration::from_secs(30)),
        (6, criterion_6, Duration::from_secs(120)),
        (7, criterion_7, Duration::from_secs(5)),
        (8, criterion_8, Duration::from_secs(5)),
        (9, criterion_9, Duration::from_secs(60)),
    ];
    let mut all = true;
    for (n, f, limit) in criteria {
        let start = Instant::now();
        let result = f();
        let elapsed = start.elapsed();
        let in_time = elapsed < limit;
        let passed = result.passed && in_time;
        all &= passed;
        println!(
            "criterion {n}: {} ({:.2}s, limit {}s) {}{}",
            if passed { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            limit.as_secs(),
            result.detail,
            if in_time {
                ""
            } else {
                " [runtime limit exceeded]"
            },
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
