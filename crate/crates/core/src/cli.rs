//! Batch command-line front end.
//!
//! Results go to stdout as JSON (default) or CSV, diagnostics to stderr.
//! Exit status is 0 on success and 2 on usage or validation errors.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::feynman::{
    poisson_reference, single_input_distribution, total_variation, FockPair, Formula,
    OutputDistribution,
};
use crate::numerics::log_factorial;
use crate::oracle::expand_output_state;
use crate::scenarios::{
    annihilation_amplitude, cascade_two_photon_annihilator, creation_amplitude,
    nfold_annihilation_ratio, Quantity, ScenarioResult,
};
use crate::splitter::{
    complete_family, lossless_residual, michelson_amplitudes, phase_sum_residual,
    time_reversal_residuals, validate_asymmetric, validate_symmetric, Branch, ConstraintReport,
    SymmetricSplitter, IDENTITY_TOL,
};
use crate::sweep::distribution;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    /// Sum over indistinguishable detection paths.
    Paths,
    /// Same sum with root-of-binomials weights.
    Streamlined,
    /// Exact-integer creation-operator expansion (n1 + n2 <= 64).
    Operators,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BranchArg {
    #[value(alias = "+")]
    Plus,
    #[value(alias = "-")]
    Minus,
}

impl From<BranchArg> for Branch {
    fn from(b: BranchArg) -> Self {
        match b {
            BranchArg::Plus => Branch::Plus,
            BranchArg::Minus => Branch::Minus,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "beamsplit", version, about = "Photon-number statistics of a lossless beam-splitter")]
struct Cli {
    /// Output encoding.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,

    /// Tolerance for splitter validation.
    #[arg(long, default_value_t = 1e-10, global = true)]
    tol: f64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
struct SplitterArgs {
    /// |rho|.
    #[arg(long, default_value_t = std::f64::consts::FRAC_1_SQRT_2)]
    rho_mag: f64,
    /// Phase of rho in degrees.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    rho_deg: f64,
    /// |tau|; defaults to sqrt(1 - |rho|^2).
    #[arg(long)]
    tau_mag: Option<f64>,
    /// Phase of tau in degrees; defaults to rho-deg + 90.
    #[arg(long, allow_negative_numbers = true)]
    tau_deg: Option<f64>,
}

impl SplitterArgs {
    fn raw(&self) -> (Complex64, Complex64) {
        let tau_mag = self.tau_mag.unwrap_or_else(|| (1.0 - self.rho_mag.powi(2)).max(0.0).sqrt());
        let tau_deg = self.tau_deg.unwrap_or(self.rho_deg + 90.0);
        (
            Complex64::from_polar(self.rho_mag, self.rho_deg.to_radians()),
            Complex64::from_polar(tau_mag, tau_deg.to_radians()),
        )
    }

    fn symmetric(&self, tol: f64) -> Result<SymmetricSplitter> {
        SymmetricSplitter::from_degrees(self.rho_mag, self.rho_deg, self.tau_mag, self.tau_deg, tol)
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a symmetric splitter's unit-norm and quadrature-phase constraints.
    Validate(SplitterArgs),
    /// Output photon-number distribution for Fock inputs |n1>|n2>.
    Distribution {
        #[arg(long)]
        n1: u32,
        #[arg(long, default_value_t = 0)]
        n2: u32,
        #[arg(long, value_enum, default_value_t = Method::Paths)]
        method: Method,
        #[command(flatten)]
        splitter: SplitterArgs,
    },
    /// Coincidence probability for |1>|1> as the reflectance sweeps 0..1.
    HomScan {
        #[arg(long, default_value_t = 101)]
        steps: u32,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        rho_deg: f64,
    },
    /// Michelson exit amplitudes for the completed coefficient family.
    Michelson {
        #[command(flatten)]
        splitter: SplitterArgs,
        /// Phase of tau' in degrees; defaults to the phase of tau.
        #[arg(long, allow_negative_numbers = true)]
        tau_prime_deg: Option<f64>,
        #[arg(long, value_enum)]
        branch: BranchArg,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        phi1_deg: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        phi2_deg: f64,
    },
    /// Exact reflected-photon distribution of |n> against its Poisson limit.
    PoissonCompare {
        #[arg(long, default_value_t = 1000)]
        n: u32,
        #[arg(long)]
        cutoff: Option<u32>,
        #[command(flatten)]
        splitter: SplitterArgs,
    },
    /// Weak-splitter photon removal, addition and two-stage removal.
    Cascade {
        #[arg(long, default_value_t = 10)]
        n: u32,
        #[command(flatten)]
        splitter: SplitterArgs,
    },
    /// All eight Fresnel coefficients implied by losslessness and time reversal.
    CompleteFamily {
        #[command(flatten)]
        splitter: SplitterArgs,
        #[arg(long, allow_negative_numbers = true)]
        tau_prime_deg: Option<f64>,
        #[arg(long, value_enum)]
        branch: BranchArg,
    },
}

fn num(x: f64) -> String {
    format!("{x:?}")
}

fn complex_q(z: Complex64) -> Quantity {
    Quantity::from(z)
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("documents serialize");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct DistributionInputs {
    n1: u32,
    n2: u32,
    method: &'static str,
    rho: Quantity,
    tau: Quantity,
}

#[derive(Serialize)]
struct DistributionChecks {
    norm_residual: f64,
}

#[derive(Serialize)]
struct DistributionDoc {
    inputs: DistributionInputs,
    probabilities: Vec<f64>,
    amplitudes: Vec<Quantity>,
    checks: DistributionChecks,
    paper_refs: Vec<&'static str>,
}

#[derive(Serialize)]
struct ValidationDoc {
    inputs: ValidationInputs,
    pass: bool,
    report: ConstraintReport,
}

#[derive(Serialize)]
struct ValidationInputs {
    rho: Quantity,
    tau: Quantity,
}

#[derive(Serialize)]
struct HomRow {
    rho_sq: f64,
    p11: f64,
}

#[derive(Serialize)]
struct HomInputs {
    steps: u32,
    rho_deg: f64,
}

#[derive(Serialize)]
struct HomDoc {
    inputs: HomInputs,
    rows: Vec<HomRow>,
}

fn report_csv(report: &ConstraintReport) -> String {
    let mut s = String::from("constraint,residual,pass\n");
    for c in &report.checks {
        let _ = writeln!(s, "{},{},{}", c.name, num(c.residual), c.pass);
    }
    s
}

fn scenario_csv(result: &ScenarioResult) -> String {
    let mut s = String::from("section,key,value\n");
    let sections = [("input", &result.inputs), ("output", &result.outputs)];
    for (section, map) in sections {
        for (key, q) in map {
            match q {
                Quantity::Real(x) => {
                    let _ = writeln!(s, "{section},{key},{}", num(*x));
                }
                Quantity::Complex { re, im } => {
                    let _ = writeln!(s, "{section},{key}.re,{}", num(*re));
                    let _ = writeln!(s, "{section},{key}.im,{}", num(*im));
                }
                Quantity::Series(v) => {
                    for (i, x) in v.iter().enumerate() {
                        let _ = writeln!(s, "{section},{key}[{i}],{}", num(*x));
                    }
                }
                Quantity::Text(t) => {
                    let _ = writeln!(s, "{section},{key},{t}");
                }
            }
        }
    }
    s
}

/// Outcome of one subcommand: rendered document plus exit status.
struct Rendered {
    body: String,
    code: i32,
}

impl Rendered {
    fn ok(body: String) -> Self {
        Self { body, code: EXIT_OK }
    }
}

fn run_validate(args: &SplitterArgs, tol: f64, format: Format) -> Rendered {
    let (rho, tau) = args.raw();
    let report = validate_symmetric(&SymmetricSplitter::new_unchecked(rho, tau), tol);
    let pass = report.passed();
    let body = match format {
        Format::Json => to_json(&ValidationDoc {
            inputs: ValidationInputs { rho: complex_q(rho), tau: complex_q(tau) },
            pass,
            report,
        }),
        Format::Csv => report_csv(&report),
    };
    Rendered { body, code: if pass { EXIT_OK } else { EXIT_INVALID } }
}

fn operator_distribution(input: FockPair, s: &SymmetricSplitter) -> Result<OutputDistribution> {
    let state = expand_output_state(input, s)?;
    let total = input.total();
    Ok(OutputDistribution {
        total,
        amplitudes: (0..=total).map(|m| state.amplitude(m, total - m)).collect(),
    })
}

fn run_distribution(
    n1: u32,
    n2: u32,
    method: Method,
    args: &SplitterArgs,
    tol: f64,
    format: Format,
) -> Result<Rendered> {
    let s = args.symmetric(tol)?;
    let input = FockPair::new(n1, n2)?;
    let (dist, method_name, refs) = match method {
        Method::Paths => (
            distribution(Formula::PathCount, input, &s)?,
            "paths",
            vec!["sum over indistinguishable detection paths, normalized by sqrt(n1! n2!)"],
        ),
        Method::Streamlined => (
            distribution(Formula::Streamlined, input, &s)?,
            "streamlined",
            vec!["path sum with weights sqrt(C(n1,m1) C(n2,m2) C(m,m1) C(n-m,n1-m1))"],
        ),
        Method::Operators => (
            operator_distribution(input, &s)?,
            "operators",
            vec!["expansion of (rho a3+ + tau a4+)^n1 (tau a3+ + rho a4+)^n2 / sqrt(n1! n2!)"],
        ),
    };
    let probabilities = dist.probabilities();
    let body = match format {
        Format::Json => to_json(&DistributionDoc {
            inputs: DistributionInputs {
                n1,
                n2,
                method: method_name,
                rho: complex_q(s.rho()),
                tau: complex_q(s.tau()),
            },
            probabilities,
            amplitudes: dist.amplitudes.iter().map(|a| complex_q(*a)).collect(),
            checks: DistributionChecks { norm_residual: dist.norm_residual() },
            paper_refs: refs,
        }),
        Format::Csv => {
            let mut out = String::from("m,probability,re,im\n");
            for (m, (p, a)) in probabilities.iter().zip(&dist.amplitudes).enumerate() {
                let _ = writeln!(out, "{m},{},{},{}", num(*p), num(a.re), num(a.im));
            }
            out
        }
    };
    Ok(Rendered::ok(body))
}

fn run_hom_scan(steps: u32, rho_deg: f64, tol: f64, format: Format) -> Result<Rendered> {
    if steps < 2 {
        return Err(Error::InvalidArgument("hom-scan needs at least 2 steps".into()));
    }
    let input = FockPair::new(1, 1)?;
    let mut rows = Vec::with_capacity(steps as usize);
    for i in 0..steps {
        let rho_sq = i as f64 / (steps - 1) as f64;
        let s = SymmetricSplitter::from_degrees(rho_sq.sqrt(), rho_deg, None, None, tol)?;
        let p11 = distribution(Formula::PathCount, input, &s)?.probabilities()[1];
        rows.push(HomRow { rho_sq, p11 });
    }
    let body = match format {
        Format::Json => to_json(&HomDoc { inputs: HomInputs { steps, rho_deg }, rows }),
        Format::Csv => {
            let mut out = String::from("rho_sq,p11\n");
            for r in &rows {
                let _ = writeln!(out, "{},{}", num(r.rho_sq), num(r.p11));
            }
            out
        }
    };
    Ok(Rendered::ok(body))
}

fn render_scenario(result: &ScenarioResult, format: Format) -> String {
    match format {
        Format::Json => to_json(result),
        Format::Csv => scenario_csv(result),
    }
}

fn family_from_args(
    args: &SplitterArgs,
    tau_prime_deg: Option<f64>,
    branch: BranchArg,
) -> Result<(crate::splitter::AsymmetricSplitter, f64)> {
    let (rho, tau) = args.raw();
    let tau_prime = match tau_prime_deg {
        Some(d) => d.to_radians(),
        None => crate::numerics::phase_of(tau),
    };
    Ok((complete_family(rho, tau, tau_prime, branch.into())?, tau_prime))
}

fn run_michelson(
    args: &SplitterArgs,
    tau_prime_deg: Option<f64>,
    branch: BranchArg,
    phi1_deg: f64,
    phi2_deg: f64,
    format: Format,
) -> Result<Rendered> {
    let (family, tau_prime) = family_from_args(args, tau_prime_deg, branch)?;
    let (phi1, phi2) = (phi1_deg.to_radians(), phi2_deg.to_radians());
    let (psi1, psi2) = michelson_amplitudes(&family, phi1, phi2);
    let result = ScenarioResult::new("michelson")
        .input("rho", family.rho)
        .input("tau", family.tau)
        .input("tau_prime_deg", tau_prime.to_degrees())
        .input("branch", if Branch::from(branch) == Branch::Plus { "plus" } else { "minus" })
        .input("phi1_deg", phi1_deg)
        .input("phi2_deg", phi2_deg)
        .output("psi1", psi1)
        .output("psi2", psi2)
        .output("p1", psi1.norm_sqr())
        .output("p2", psi2.norm_sqr())
        .output("lossless_residual", lossless_residual(&family, phi1 - phi2))
        .output("phase_sum_residual", phase_sum_residual(&family))
        .reference("psi1 = rho rho' e^{i phi1} + tau tau'' e^{i phi2}")
        .reference("psi2 = rho tau' e^{i phi1} + tau rho'' e^{i phi2}");
    Ok(Rendered::ok(render_scenario(&result, format)))
}

fn run_poisson(
    n: u32,
    cutoff: Option<u32>,
    args: &SplitterArgs,
    tol: f64,
    format: Format,
) -> Result<Rendered> {
    let s = args.symmetric(tol)?;
    let exact = single_input_distribution(n, &s)?.probabilities();
    let mean_guess = n as f64 * s.rho().norm_sqr() / s.tau().norm_sqr().max(f64::MIN_POSITIVE);
    let cutoff = cutoff.unwrap_or_else(|| {
        let c = (mean_guess + 10.0 * mean_guess.sqrt() + 10.0).ceil();
        (c.min(n as f64)) as u32
    });
    let reference = poisson_reference(n, &s, cutoff)?;
    let tv = total_variation(&exact, &reference);
    let head: Vec<f64> = exact.iter().take(cutoff as usize + 1).copied().collect();
    let result = ScenarioResult::new("poisson-compare")
        .input("n", n as f64)
        .input("cutoff", cutoff as f64)
        .input("rho", s.rho())
        .input("tau", s.tau())
        .output("mean", reference.mean)
        .output("tv_distance", tv)
        .output("reference_tail_mass", reference.tail_mass())
        .output("exact", head.clone())
        .output("poisson", reference.probabilities.clone())
        .reference("exact: C(n,m) |rho|^(2m) |tau|^(2(n-m))")
        .reference("limit: Poisson with mean n |rho/tau|^2");
    let body = match format {
        Format::Json => to_json(&result),
        Format::Csv => {
            let mut out = String::from("m,exact,poisson\n");
            for (m, (p, q)) in head.iter().zip(&reference.probabilities).enumerate() {
                let _ = writeln!(out, "{m},{},{}", num(*p), num(*q));
            }
            out
        }
    };
    Ok(Rendered::ok(body))
}

fn run_cascade(n: u32, args: &SplitterArgs, tol: f64, format: Format) -> Result<Rendered> {
    let s = args.symmetric(tol)?;
    let cascade = cascade_two_photon_annihilator(n, &s)?;
    let target = ((n as f64) * (n as f64 - 1.0)).sqrt() * s.rho().norm_sqr();
    let nfold = nfold_annihilation_ratio(n, &s)?;
    let sqrt_fact = (0.5 * log_factorial(n as u64)).exp();
    let result = ScenarioResult::new("cascade")
        .input("n", n as f64)
        .input("rho", s.rho())
        .input("tau", s.tau())
        .output("annihilation_amplitude", annihilation_amplitude(n, &s)?)
        .output("creation_amplitude", creation_amplitude(n, &s))
        .output("cascade_amplitude", cascade)
        .output("cascade_magnitude", cascade.norm())
        .output("cascade_target", target)
        .output("cascade_relative_deviation", (cascade.norm() / target - 1.0).abs())
        .output("nfold_ratio_magnitude", nfold.norm())
        .output("sqrt_n_factorial", sqrt_fact)
        .reference("annihilation: sqrt(n) rho tau^(n-1)")
        .reference("creation: sqrt(n+1) rho tau^n")
        .reference("cascade: sqrt(n(n-1)) rho^2 tau^(2n-3)");
    Ok(Rendered::ok(render_scenario(&result, format)))
}

fn run_complete_family(
    args: &SplitterArgs,
    tau_prime_deg: Option<f64>,
    branch: BranchArg,
    format: Format,
) -> Result<Rendered> {
    let (family, tau_prime) = family_from_args(args, tau_prime_deg, branch)?;
    let (c1, c2) = time_reversal_residuals(&family);
    let report = validate_asymmetric(&family, IDENTITY_TOL);
    let mut result = ScenarioResult::new("complete-family")
        .input("rho", family.rho)
        .input("tau", family.tau)
        .input("tau_prime_deg", tau_prime.to_degrees())
        .input("branch", if Branch::from(branch) == Branch::Plus { "plus" } else { "minus" });
    for (name, z) in family.coefficients() {
        result = result.output(name, z);
    }
    for check in &report.checks {
        result = result.output(&format!("residual_{}", check.name), check.residual);
    }
    result = result
        .output("time_reversal_c1", c1)
        .output("time_reversal_c2", c2)
        .reference("time reversal: rho* rho' + tau* tau'' = 1, rho* tau' + tau* rho'' = 0")
        .reference("phase sum: (phi'_rho + phi''_rho) - (phi'_tau + phi''_tau) = +-pi");
    let code = if report.passed() { EXIT_OK } else { EXIT_INVALID };
    Ok(Rendered { body: render_scenario(&result, format), code })
}

fn dispatch(cli: &Cli) -> Result<Rendered> {
    let (tol, format) = (cli.tol, cli.format);
    match &cli.command {
        Command::Validate(args) => Ok(run_validate(args, tol, format)),
        Command::Distribution { n1, n2, method, splitter } => {
            run_distribution(*n1, *n2, *method, splitter, tol, format)
        }
        Command::HomScan { steps, rho_deg } => run_hom_scan(*steps, *rho_deg, tol, format),
        Command::Michelson { splitter, tau_prime_deg, branch, phi1_deg, phi2_deg } => {
            run_michelson(splitter, *tau_prime_deg, *branch, *phi1_deg, *phi2_deg, format)
        }
        Command::PoissonCompare { n, cutoff, splitter } => {
            run_poisson(*n, *cutoff, splitter, tol, format)
        }
        Command::Cascade { n, splitter } => run_cascade(*n, splitter, tol, format),
        Command::CompleteFamily { splitter, tau_prime_deg, branch } => {
            run_complete_family(splitter, *tau_prime_deg, *branch, format)
        }
    }
}

/// Parses `argv` (including the program name), runs the subcommand and
/// returns the process exit code.
pub fn run_cli<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                if !text.contains("Usage:") {
                    let _ = writeln!(err, "\n{}", Cli::command().render_usage());
                }
                EXIT_INVALID
            } else {
                let _ = write!(out, "{text}");
                EXIT_OK
            };
        }
    };
    if cli.tol.is_nan() || cli.tol <= 0.0 {
        let _ = writeln!(err, "error: --tol must be positive");
        return EXIT_INVALID;
    }
    match dispatch(&cli) {
        Ok(rendered) => {
            let _ = out.write_all(rendered.body.as_bytes());
            rendered.code
        }
        Err(Error::InvalidSplitter(report)) => {
            let _ = writeln!(err, "error: splitter violates its constraints");
            let _ = writeln!(err, "{report}");
            EXIT_INVALID
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INVALID
        }
    }
}
