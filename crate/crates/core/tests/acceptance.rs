//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::process::Command;
use std::time::Instant;

use beamsplit::feynman::{
    cell_count_approx_error, poisson_reference, single_input_distribution, total_variation,
    two_input_distribution, FockPair, Formula,
};
use beamsplit::oracle::{coherent_passthrough_fidelity, repeated_annihilation};
use beamsplit::scenarios::{
    annihilation_amplitude, cascade_two_photon_annihilator, creation_amplitude,
    nfold_annihilation_ratio,
};
use beamsplit::splitter::{
    complete_family, lossless_residual, michelson_amplitudes, time_reversal_residuals, Branch,
    SymmetricSplitter,
};
use beamsplit::sweep::{normalization_sweep, oracle_sweep, Execution};
use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn branch(rng: &mut ChaCha8Rng) -> Branch {
    if rng.gen_bool(0.5) {
        Branch::Plus
    } else {
        Branch::Minus
    }
}

fn random_splitters(seed: u64, count: usize) -> Vec<SymmetricSplitter> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let mag = rng.gen_range(0.0..=1.0);
            let phase = rng.gen_range(-PI..PI);
            let b = branch(&mut rng);
            SymmetricSplitter::from_polar(mag, phase, b).expect("valid by construction")
        })
        .collect()
}

fn max_dev(got: &[f64], want: &[f64]) -> f64 {
    assert_eq!(got.len(), want.len());
    got.iter().zip(want).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

fn example_one() -> Outcome {
    let s = SymmetricSplitter::balanced();
    let d2 = max_dev(&single_input_distribution(2, &s).unwrap().probabilities(), &[0.25, 0.5, 0.25]);
    let d3 = max_dev(
        &single_input_distribution(3, &s).unwrap().probabilities(),
        &[0.125, 0.375, 0.375, 0.125],
    );
    let worst = d2.max(d3);
    check(worst <= 1e-12, format!("max deviation {worst:.2e}"))
}

fn hong_ou_mandel() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst_p1: f64 = 0.0;
    let mut worst_edge: f64 = 0.0;
    for i in 0..100 {
        let phase = if i == 0 { 0.0 } else { rng.gen_range(-PI..PI) };
        let s = SymmetricSplitter::from_polar(FRAC_1_SQRT_2, phase, branch(&mut rng)).unwrap();
        let p = two_input_distribution(FockPair::new(1, 1).unwrap(), &s).unwrap().probabilities();
        worst_p1 = worst_p1.max(p[1]);
        worst_edge = worst_edge.max((p[0] - 0.5).abs()).max((p[2] - 0.5).abs());
    }
    check(
        worst_p1 <= 1e-24 && worst_edge <= 1e-12,
        format!("max P(1) {worst_p1:.2e}, max |P(0|2) - 1/2| {worst_edge:.2e}"),
    )
}

fn oracle_equivalence() -> Outcome {
    let splitters = random_splitters(3, 50);
    let stats = oracle_sweep(12, &splitters, Execution::default()).map_err(|e| e.to_string())?;
    check(
        stats.max_deviation <= 1e-10,
        format!("{} cases, max componentwise deviation {:.2e}", stats.cases, stats.max_deviation),
    )
}

fn normalization() -> Outcome {
    let splitters = random_splitters(4, 200);
    let mut details = Vec::new();
    let mut ok = true;
    for (name, formula) in [("paths", Formula::PathCount), ("streamlined", Formula::Streamlined)] {
        match normalization_sweep(30, 30, &splitters, formula, Execution::default()) {
            Ok(stats) => {
                ok &= stats.max_deviation <= 1e-10;
                details.push(format!("{name}: {} cases, max {:.2e}", stats.cases, stats.max_deviation));
            }
            Err(e) => {
                ok = false;
                details.push(format!("{name}: {e}"));
            }
        }
    }
    check(ok, details.join("; "))
}

fn lossless_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    let mut weakest_violation = f64::INFINITY;
    for _ in 0..100 {
        let mag: f64 = rng.gen_range(0.0..=1.0);
        let rho = Complex64::from_polar(mag, rng.gen_range(-PI..PI));
        let tau = Complex64::from_polar((1.0 - mag * mag).sqrt(), rng.gen_range(-PI..PI));
        let fam = complete_family(rho, tau, rng.gen_range(-PI..PI), branch(&mut rng)).unwrap();
        for _ in 0..20 {
            let (psi1, psi2) =
                michelson_amplitudes(&fam, rng.gen_range(-PI..PI), rng.gen_range(-PI..PI));
            worst = worst.max((psi1.norm_sqr() + psi2.norm_sqr() - 1.0).abs());
        }
    }
    // A 0.1 rad phase error in rho'' on splitters far enough from the
    // mirror limits for the cross term to be visible.
    for _ in 0..20 {
        let r2: f64 = rng.gen_range(0.2..0.8);
        let rho = Complex64::from_polar(r2.sqrt(), rng.gen_range(-PI..PI));
        let tau = Complex64::from_polar((1.0 - r2).sqrt(), rng.gen_range(-PI..PI));
        let mut fam = complete_family(rho, tau, rng.gen_range(-PI..PI), branch(&mut rng)).unwrap();
        fam.rho_pp *= Complex64::from_polar(1.0, 0.1);
        let r: Vec<f64> = [0.0, PI / 2.0, PI].iter().map(|&d| lossless_residual(&fam, d)).collect();
        let spread = (r[0] - r[1]).abs().max((r[0] - r[2]).abs()).max((r[1] - r[2]).abs());
        weakest_violation = weakest_violation.min(spread);
    }
    check(
        worst <= 1e-12 && weakest_violation > 1e-3,
        format!("max residual {worst:.2e}, smallest injected spread {weakest_violation:.2e}"),
    )
}

fn time_reversal() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let mag: f64 = rng.gen_range(0.0..=1.0);
        let rho = Complex64::from_polar(mag, rng.gen_range(-PI..PI));
        let tau = Complex64::from_polar((1.0 - mag * mag).sqrt(), rng.gen_range(-PI..PI));
        let fam = complete_family(rho, tau, rng.gen_range(-PI..PI), branch(&mut rng)).unwrap();
        let (c1, c2) = time_reversal_residuals(&fam);
        worst = worst.max(c1.norm()).max(c2.norm());
    }
    check(worst <= 1e-12, format!("max residual {worst:.2e}"))
}

fn poisson_limit() -> Outcome {
    let s = SymmetricSplitter::from_polar(0.001f64.sqrt(), 0.3, Branch::Plus).unwrap();
    let exact = single_input_distribution(1000, &s).unwrap().probabilities();
    let reference = poisson_reference(1000, &s, 60).unwrap();
    let tv = total_variation(&exact, &reference);

    let s = SymmetricSplitter::from_polar(0.1, 0.0, Branch::Minus).unwrap();
    let mean = poisson_reference(400, &s, 40).unwrap().mean;
    let mean_err = (mean - 400.0 * (0.01 / 0.99)).abs();
    check(tv <= 0.01 && mean_err <= 1e-9, format!("TV {tv:.4e}, mean error {mean_err:.2e}"))
}

fn annihilation_creation() -> Outcome {
    let s = SymmetricSplitter::from_polar(0.23, 1.1, Branch::Plus).unwrap();
    let (r, t) = (s.rho().norm(), s.tau().norm());
    let mut worst: f64 = 0.0;
    for n in 1..=50u32 {
        let a = annihilation_amplitude(n, &s).unwrap().norm() / (r * t.powi(n as i32 - 1));
        let c = creation_amplitude(n, &s).norm() / (r * t.powi(n as i32));
        worst = worst.max((a - (n as f64).sqrt()).abs()).max((c - (n as f64 + 1.0).sqrt()).abs());
    }
    let w = SymmetricSplitter::from_polar(1e-3, 0.0, Branch::Plus).unwrap();
    let cascade = cascade_two_photon_annihilator(10, &w).unwrap().norm();
    let rel = (cascade / (90f64.sqrt() * 1e-6) - 1.0).abs();
    check(
        worst <= 1e-12 && rel <= 0.005,
        format!("max scaling deviation {worst:.2e}, cascade relative deviation {rel:.2e}"),
    )
}

fn nfold_annihilation() -> Outcome {
    let w = SymmetricSplitter::from_polar(1e-3, 0.0, Branch::Plus).unwrap();
    let mut worst: f64 = 0.0;
    let mut fact = 1.0;
    for n in 1..=8u32 {
        fact *= n as f64;
        let ratio = nfold_annihilation_ratio(n, &w).unwrap().norm();
        // Same product from repeated operator expansion, one pass per photon.
        let chained = repeated_annihilation(n, n, &w).unwrap().norm() / 1e-3f64.powi(n as i32);
        worst = worst
            .max((ratio / fact.sqrt() - 1.0).abs())
            .max((chained / fact.sqrt() - 1.0).abs());
    }
    check(worst <= 0.01, format!("max relative deviation {worst:.2e}"))
}

fn coherent_passthrough() -> Outcome {
    let s = SymmetricSplitter::from_polar(0.6, 0.4, Branch::Minus).unwrap();
    let mut worst: f64 = 1.0;
    for (g1, g2) in [
        (Complex64::new(1.2, 0.0), Complex64::new(0.0, 0.5)),
        (Complex64::new(0.8, 0.0), Complex64::new(0.0, 0.0)),
    ] {
        for sp in [s, SymmetricSplitter::balanced()] {
            worst = worst.min(coherent_passthrough_fidelity(g1, g2, &sp, 25).unwrap());
        }
    }
    check(worst >= 1.0 - 1e-8, format!("min fidelity 1 - {:.2e}", 1.0 - worst))
}

fn cell_count() -> Outcome {
    let (n, m) = (1_000_000u64, 3u64);
    let err = cell_count_approx_error(n, m).unwrap();
    // Exact rational N^m / (N (N-1) ... (N-m+1)) - 1.
    let num = BigUint::from(n).pow(m as u32);
    let den: BigUint = (0..m).map(|j| BigUint::from(n - j)).product();
    let scale = BigUint::from(10u64).pow(30);
    let exact = ((&num - &den) * &scale / &den).to_f64().unwrap() / 1e30;
    let bound = (m * (m - 1)) as f64 / (2.0 * n as f64);
    let rel_vs_exact = (err / exact - 1.0).abs();
    let ratio = err / bound;
    check(
        rel_vs_exact <= 1e-9 && (0.5..=2.0).contains(&ratio),
        format!("error {err:.6e}, exact {exact:.6e}, ratio to m(m-1)/2N {ratio:.4}"),
    )
}

fn cli_contract() -> Outcome {
    let exe = env!("CARGO_BIN_EXE_beamsplit");
    let out = Command::new(exe)
        .args([
            "distribution", "--n1", "2", "--n2", "1", "--rho-mag", "0.70710678", "--rho-deg", "0",
            "--tau-deg", "90", "--format", "json",
        ])
        .output()
        .map_err(|e| e.to_string())?;
    let doc: serde_json::Value =
        serde_json::from_slice(&out.stdout).map_err(|e| format!("bad JSON: {e}"))?;
    let probs: Vec<f64> = doc["probabilities"]
        .as_array()
        .ok_or("no probabilities")?
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect();
    let dev = max_dev(&probs, &[0.375, 0.125, 0.125, 0.375]);
    let dist_code = out.status.code();

    let bad = Command::new(exe)
        .args(["validate", "--rho-mag", "0.8", "--rho-deg", "0", "--tau-mag", "0.6", "--tau-deg", "0"])
        .output()
        .map_err(|e| e.to_string())?;
    let validate_code = bad.status.code();
    check(
        dev <= 1e-10 && dist_code == Some(0) && validate_code == Some(2),
        format!(
            "distribution exit {dist_code:?}, max deviation {dev:.2e} (|rho| given to 8 digits); \
             validate exit {validate_code:?}"
        ),
    )
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("single-input balanced distributions", example_one),
        ("two-photon coalescence", hong_ou_mandel),
        ("path sum equals operator expansion", oracle_equivalence),
        ("normalization up to 30+30 photons", normalization),
        ("Michelson losslessness", lossless_identity),
        ("time reversal", time_reversal),
        ("Poisson limit", poisson_limit),
        ("annihilation and creation scaling", annihilation_creation),
        ("n-fold annihilation", nfold_annihilation),
        ("coherent-state passthrough", coherent_passthrough),
        ("cell-count approximation", cell_count),
        ("CLI contract", cli_contract),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{secs:.2}s]", i + 1),
            Err(detail) => {
                failures += 1;
                println!("FAIL {:>2} {name}: {detail} [{secs:.2}s]", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
