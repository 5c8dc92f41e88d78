use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use nonortho::bell::{DEFAULT_GRID_N, DEFAULT_REFINE_ITERS};
use nonortho::feasibility::ScanGrid;
use nonortho::kaon::{CpViolation, KaonEvolution};
use nonortho::linalg::C64;
use nonortho::report::{analyze, analyze_kaon, AnalyzeOptions, OracleConfig};
use nonortho::sampling::DEFAULT_SEED;
use nonortho::sweep::{run_sweep, to_csv, FixedValues, SweepRange, SweepSpec};
use nonortho::verify::{run_verify, Level, Mutation, VerifyOptions};
use nonortho::{Error, StateInput};

#[derive(Parser)]
#[command(
    name = "nonortho",
    version,
    about = "Entanglement of bipartite states built from non-orthogonal local states"
)]
struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Emit CSV (sweep only; sweep output is CSV by default).
    #[arg(long, global = true)]
    csv: bool,
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Points per angle in the CHSH grid search.
    #[arg(long, global = true, default_value_t = DEFAULT_GRID_N)]
    grid_n: usize,
    #[arg(long, global = true, default_value_t = DEFAULT_REFINE_ITERS)]
    refine_iters: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze a single state.
    Analyze(AnalyzeArgs),
    /// Tabulate quantities over a grid of overlaps, phases and weights.
    Sweep(SweepArgs),
    /// Analyze the antisymmetric neutral kaon pair.
    Kaon(KaonArgs),
    /// Run the self-verification suite.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    mu_re: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    mu_im: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    nu_re: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    nu_im: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    x_re: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    x_im: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    y_re: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    y_im: f64,
    /// Rescale mu and nu to unit norm instead of rejecting.
    #[arg(long)]
    normalize: bool,
    /// Read the state from a JSON file with fields mu_re .. y_im.
    #[arg(long, conflicts_with_all = ["mu_re", "mu_im", "nu_re", "nu_im", "x_re", "x_im", "y_re", "y_im"])]
    input: Option<PathBuf>,
    /// Also run the brute-force CHSH search.
    #[arg(long)]
    oracle: bool,
    /// Skip the numerical scan behind infeasible verdicts.
    #[arg(long)]
    skip_scan: bool,
}

#[derive(Args)]
struct SweepArgs {
    /// Range as name=start:stop:steps; name is one of abs_x, abs_y,
    /// abs_x_sq, abs_y_sq, eta, mu_sq. Repeatable.
    #[arg(long = "sweep", required = true)]
    ranges: Vec<String>,
    #[arg(long)]
    abs_x: Option<f64>,
    #[arg(long)]
    abs_y: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    eta: Option<f64>,
    #[arg(long)]
    mu_sq: Option<f64>,
}

#[derive(Args)]
struct KaonArgs {
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    eps_re: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    eps_im: f64,
    /// Decay widths and time; all three enable the weak-decay norm.
    #[arg(long, requires_all = ["gamma_l", "t"])]
    gamma_s: Option<f64>,
    #[arg(long, requires_all = ["gamma_s", "t"])]
    gamma_l: Option<f64>,
    #[arg(long, requires_all = ["gamma_s", "gamma_l"])]
    t: Option<f64>,
    /// Phase fed to the closed-form deviation.
    #[arg(long, default_value_t = std::f64::consts::PI, allow_negative_numbers = true)]
    eta: f64,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = Level::Quick)]
    level: Level,
    #[arg(long, value_enum, default_value_t = Mutation::None, hide = true)]
    mutation: Mutation,
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    kind: &'a str,
    message: String,
}

#[derive(Serialize)]
struct ErrorEnvelope<'a> {
    error: ErrorBody<'a>,
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report types serialize")
}

fn report_error(kind: &str, message: String) -> ExitCode {
    let envelope = ErrorEnvelope {
        error: ErrorBody { kind, message },
    };
    println!("{}", to_json(&envelope));
    ExitCode::from(2)
}

fn fail(err: Error) -> ExitCode {
    report_error(err.kind(), err.to_string())
}

fn analyze_options(cli: &Cli, oracle: bool, skip_scan: bool) -> AnalyzeOptions {
    AnalyzeOptions {
        oracle: oracle.then_some(OracleConfig {
            grid_n: cli.grid_n,
            refine_iters: cli.refine_iters,
        }),
        feasibility_scan: (!skip_scan).then(ScanGrid::default),
    }
}

fn run_analyze(cli: &Cli, args: &AnalyzeArgs) -> ExitCode {
    let input = match &args.input {
        Some(path) => {
            let text = match fs::read_to_string(path) {
                Ok(t) => t,
                Err(e) => return report_error("IoError", format!("{}: {e}", path.display())),
            };
            match serde_json::from_str::<StateInput>(&text) {
                Ok(i) => i,
                Err(e) => return report_error("ParseError", e.to_string()),
            }
        }
        None => StateInput {
            mu_re: args.mu_re,
            mu_im: args.mu_im,
            nu_re: args.nu_re,
            nu_im: args.nu_im,
            x_re: args.x_re,
            x_im: args.x_im,
            y_re: args.y_re,
            y_im: args.y_im,
        },
    };
    let state = match input.into_state(args.normalize) {
        Ok(s) => s,
        Err(e) => return fail(e),
    };
    let report = match analyze(
        input,
        &state,
        &analyze_options(cli, args.oracle, args.skip_scan),
    ) {
        Ok(r) => r,
        Err(e) => return fail(e),
    };
    if cli.json {
        println!("{}", to_json(&report));
    } else {
        println!("case             {}", report.case.label());
        match report.eta {
            Some(eta) => println!("eta              {eta}"),
            None => println!("eta              undefined"),
        }
        println!("lambda+          {}", report.lambda_plus);
        println!("lambda-          {}", report.lambda_minus);
        println!("bell (analytic)  {}", report.bell_analytic);
        println!("bell (canonical) {}", report.bell_canonical);
        if let Some(v) = report.bell_oracle {
            println!("bell (oracle)    {v}");
        }
        println!("d                {}", report.d);
        println!("concurrence      {}", report.concurrence);
        println!("entropy (bits)   {}", report.entropy_bits);
        println!("feasibility      {:?}", report.feasibility.verdict);
        for w in &report.warnings {
            println!("warning: {w}");
        }
    }
    ExitCode::SUCCESS
}

fn run_sweep_cmd(cli: &Cli, args: &SweepArgs) -> ExitCode {
    let mut ranges = Vec::new();
    for text in &args.ranges {
        match text.parse::<SweepRange>() {
            Ok(r) => ranges.push(r),
            Err(e) => return fail(e),
        }
    }
    let defaults = FixedValues::default();
    let spec = SweepSpec {
        ranges,
        fixed: FixedValues {
            abs_x: args.abs_x.unwrap_or(defaults.abs_x),
            abs_y: args.abs_y.unwrap_or(defaults.abs_y),
            eta: args.eta.unwrap_or(defaults.eta),
            mu_sq: args.mu_sq.unwrap_or(defaults.mu_sq),
        },
    };
    let rows = match run_sweep(&spec) {
        Ok(r) => r,
        Err(e) => return fail(e),
    };
    if cli.json && !cli.csv {
        println!("{}", to_json(&rows));
    } else {
        print!("{}", to_csv(&rows));
    }
    ExitCode::SUCCESS
}

fn run_kaon(cli: &Cli, args: &KaonArgs) -> ExitCode {
    let eps = match CpViolation::new(C64::new(args.eps_re, args.eps_im)) {
        Ok(e) => e,
        Err(e) => return fail(e),
    };
    let evolution = match (args.gamma_s, args.gamma_l, args.t) {
        (Some(gs), Some(gl), Some(t)) => match KaonEvolution::new(gs, gl, t) {
            Ok(evo) => Some(evo),
            Err(e) => return fail(e),
        },
        _ => None,
    };
    let report = match analyze_kaon(
        eps,
        evolution,
        args.eta,
        &analyze_options(cli, false, false),
    ) {
        Ok(r) => r,
        Err(e) => return fail(e),
    };
    if cli.json {
        println!("{}", to_json(&report));
    } else {
        println!(
            "overlap          {} {:+}i",
            report.overlap.re, report.overlap.im
        );
        println!("|overlap|^2      {}", report.overlap_abs_sq);
        println!("d (pipeline)     {}", report.pipeline_d);
        println!("d closed (+)     {}", report.closed_form_d_plus);
        println!("d closed (-)     {}", report.closed_form_d_minus);
        println!("concurrence      {}", report.report.concurrence);
        if let Some(evo) = &report.evolution {
            println!("decay norm       {}", evo.weak_decay_norm);
        }
    }
    ExitCode::SUCCESS
}

fn run_verify_cmd(cli: &Cli, args: &VerifyArgs) -> ExitCode {
    let summary = run_verify(&VerifyOptions {
        level: args.level,
        seed: cli.seed,
        grid_n: cli.grid_n,
        refine_iters: cli.refine_iters,
        mutation: args.mutation,
    });
    if cli.json {
        println!("{}", to_json(&summary));
    } else {
        for c in &summary.checks {
            let tag = if c.passed { "PASS" } else { "FAIL" };
            println!("{tag} {} ({:.2}s): {}", c.name, c.seconds, c.detail);
        }
    }
    if summary.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match &cli.command {
        Command::Analyze(args) => run_analyze(&cli, args),
        Command::Sweep(args) => run_sweep_cmd(&cli, args),
        Command::Kaon(args) => run_kaon(&cli, args),
        Command::Verify(args) => run_verify_cmd(&cli, args),
    }
}
