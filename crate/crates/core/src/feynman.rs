//! Photon-number amplitudes from counting indistinguishable detection paths.
//!
//! For inputs |n1>|n2> the amplitude of m photons at port 3 (and
//! n1 + n2 - m at port 4) is a sum over how many photons each input port
//! sends to port 3:
//!
//! ```text
//! A(m) = sum_{m1 + m2 = m}  sqrt(n1! n2! m! (n1+n2-m)!) / (m1! m2! (n1-m1)! (n2-m2)!)
//!                           * rho^(n2+m1-m2) * tau^(n1-m1+m2)
//! ```
//!
//! The terms alternate in phase and can exceed the result by many orders of
//! magnitude (Hong-Ou-Mandel cancellation), so the sum is anchored at its
//! largest term, evaluated in log space, and the remaining terms are reached
//! through exact consecutive-term ratios carried in twofold precision.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::extended::{TwoFold, TwoFoldComplex};
use crate::numerics::{complex_pow, ln_binomial, log_factorial, ComplexAmplitude};
use crate::splitter::SymmetricSplitter;

/// Default cap on n1 + n2 for two-input distributions.
pub const MAX_TWO_INPUT_PHOTONS: u32 = 512;
/// Cap on n for single-input distributions.
pub const MAX_SINGLE_INPUT_PHOTONS: u32 = 10_000;
/// Largest acceptable estimated absolute rounding error of any amplitude.
pub const PRECISION_BUDGET: f64 = 1e-12;

// 2^-104, unit roundoff of the twofold type with one bit of slack.
const TWOFOLD_EPS: f64 = 4.930_380_657_631_324e-32;

#[cfg(feature = "parallel")]
const PARALLEL_MIN_TOTAL: u32 = 96;

/// Photon numbers at input ports 1 and 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FockPair {
    pub n1: u32,
    pub n2: u32,
}

impl FockPair {
    pub fn new(n1: u32, n2: u32) -> Result<Self> {
        Self::with_max(n1, n2, MAX_TWO_INPUT_PHOTONS)
    }

    pub fn with_max(n1: u32, n2: u32, max_total: u32) -> Result<Self> {
        let total = n1 as u64 + n2 as u64;
        if total > max_total as u64 {
            return Err(Error::PhotonLimit { total, max: max_total as u64 });
        }
        Ok(Self { n1, n2 })
    }

    pub fn total(&self) -> u32 {
        self.n1 + self.n2
    }

    pub fn swapped(&self) -> Self {
        Self { n1: self.n2, n2: self.n1 }
    }
}

/// Amplitudes A(m), m = 0..=total, for m photons leaving through port 3.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputDistribution {
    pub total: u32,
    pub amplitudes: Vec<ComplexAmplitude>,
}

impl OutputDistribution {
    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// |sum_m |A(m)|^2 - 1|.
    pub fn norm_residual(&self) -> f64 {
        (self.norm_sqr() - 1.0).abs()
    }

    pub fn amplitude(&self, m: u32) -> Option<ComplexAmplitude> {
        self.amplitudes.get(m as usize).copied()
    }
}

/// Which closed form assembles the per-path weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Formula {
    /// sqrt(n1! n2! m! (n-m)!) / (m1! m2! (n1-m1)! (n2-m2)!)
    PathCount,
    /// sqrt(C(n1,m1) C(n2,m2) C(m,m1) C(n-m,n1-m1))
    Streamlined,
}

/// One (m1, m2) contribution to A(m1 + m2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathTerm {
    pub m1: u32,
    pub m2: u32,
    pub amplitude: ComplexAmplitude,
}

fn log_weight(formula: Formula, n1: u32, n2: u32, m1: u32, m2: u32) -> f64 {
    let (n1, n2, m1, m2) = (n1 as u64, n2 as u64, m1 as u64, m2 as u64);
    let (m, n) = (m1 + m2, n1 + n2);
    match formula {
        Formula::PathCount => {
            0.5 * (log_factorial(n1) + log_factorial(n2) + log_factorial(m) + log_factorial(n - m))
                - log_factorial(m1)
                - log_factorial(m2)
                - log_factorial(n1 - m1)
                - log_factorial(n2 - m2)
        }
        Formula::Streamlined => {
            // Arguments are in range by construction of the (m1, m2) lattice.
            let lb = |a, b| ln_binomial(a, b).expect("binomial arguments in range");
            0.5 * (lb(n1, m1) + lb(n2, m2) + lb(m, m1) + lb(n - m, n1 - m1))
        }
    }
}

/// Ratio T(m1 + 1, m2 - 1) / T(m1, m2) of path weights, without the rho/tau powers.
fn weight_ratio_up(formula: Formula, n1: u32, n2: u32, m1: u32, m2: u32) -> TwoFold {
    let (n1, n2, m1, m2) = (n1 as u64, n2 as u64, m1 as u64, m2 as u64);
    match formula {
        Formula::PathCount => TwoFold::ratio((n1 - m1) * m2, (m1 + 1) * (n2 - m2 + 1)),
        Formula::Streamlined => {
            let product = TwoFold::ratio(n1 - m1, m1 + 1)
                * TwoFold::ratio(m2, n2 - m2 + 1)
                * TwoFold::ratio(m2, m1 + 1)
                * TwoFold::ratio(n1 - m1, n2 - m2 + 1);
            product.sqrt()
        }
    }
}

fn path_term(formula: Formula, n1: u32, n2: u32, m1: u32, m2: u32, s: &SymmetricSplitter) -> Complex64 {
    let rho_exp = (n2 + m1 - m2) as u64;
    let tau_exp = (n1 - m1 + m2) as u64;
    (complex_pow(s.rho(), rho_exp) * complex_pow(s.tau(), tau_exp))
        .scale_log(log_weight(formula, n1, n2, m1, m2))
        .to_complex()
}

/// Every (m1, m2) term, each evaluated independently in log space.
pub fn path_terms(input: FockPair, s: &SymmetricSplitter, formula: Formula) -> Vec<PathTerm> {
    let FockPair { n1, n2 } = input;
    let mut terms = Vec::with_capacity((n1 as usize + 1) * (n2 as usize + 1));
    for m1 in 0..=n1 {
        for m2 in 0..=n2 {
            terms.push(PathTerm { m1, m2, amplitude: path_term(formula, n1, n2, m1, m2, s) });
        }
    }
    terms
}

struct SumContext<'a> {
    formula: Formula,
    n1: u32,
    n2: u32,
    splitter: &'a SymmetricSplitter,
    ln_rho: f64,
    ln_tau: f64,
    // (rho / tau)^2 and its inverse.
    step_up: TwoFoldComplex,
    step_down: TwoFoldComplex,
}

impl<'a> SumContext<'a> {
    fn new(formula: Formula, input: FockPair, s: &'a SymmetricSplitter) -> Self {
        let rho = TwoFoldComplex::from_complex(s.rho());
        let tau = TwoFoldComplex::from_complex(s.tau());
        let degenerate = s.rho().norm() == 0.0 || s.tau().norm() == 0.0;
        let (step_up, step_down) = if degenerate {
            (TwoFoldComplex::ZERO, TwoFoldComplex::ZERO)
        } else {
            let q = rho / tau;
            let q_inv = tau / rho;
            (q * q, q_inv * q_inv)
        };
        Self {
            formula,
            n1: input.n1,
            n2: input.n2,
            splitter: s,
            ln_rho: s.rho().norm().ln(),
            ln_tau: s.tau().norm().ln(),
            step_up,
            step_down,
        }
    }

    /// A(m) and an estimate of its absolute rounding error.
    fn amplitude(&self, m: u32) -> (Complex64, f64) {
        let (n1, n2) = (self.n1, self.n2);
        let lo = m.saturating_sub(n2);
        let hi = m.min(n1);
        let term = |m1: u32| path_term(self.formula, n1, n2, m1, m - m1, self.splitter);

        if self.ln_rho == f64::NEG_INFINITY || self.ln_tau == f64::NEG_INFINITY {
            // At most one term survives a perfect mirror or window.
            let sum = (lo..=hi).map(term).sum();
            return (sum, 0.0);
        }

        let log_mag = |m1: u32| {
            let m2 = m - m1;
            log_weight(self.formula, n1, n2, m1, m2)
                + (n2 + m1 - m2) as f64 * self.ln_rho
                + (n1 - m1 + m2) as f64 * self.ln_tau
        };
        let peak = (lo..=hi)
            .map(|m1| (m1, log_mag(m1)))
            .fold((lo, f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best })
            .0;
        let anchor = term(peak);

        let mut sum = TwoFoldComplex::ONE;
        let mut abs_sum = 1.0;
        let mut running = TwoFoldComplex::ONE;
        for m1 in peak..hi {
            let ratio = weight_ratio_up(self.formula, n1, n2, m1, m - m1);
            running = running.scale(ratio) * self.step_up;
            sum = sum + running;
            abs_sum += running.norm_f64();
        }
        running = TwoFoldComplex::ONE;
        for m1 in (lo..peak).rev() {
            let ratio = TwoFold::ONE / weight_ratio_up(self.formula, n1, n2, m1, m - m1);
            running = running.scale(ratio) * self.step_down;
            sum = sum + running;
            abs_sum += running.norm_f64();
        }

        let steps = (hi - lo) as f64 + 4.0;
        let bound = anchor.norm() * abs_sum * steps * 8.0 * TWOFOLD_EPS;
        (anchor * sum.to_complex(), bound)
    }
}

fn assemble(formula: Formula, input: FockPair, s: &SymmetricSplitter) -> Result<OutputDistribution> {
    if input.total() > MAX_TWO_INPUT_PHOTONS {
        return Err(Error::PhotonLimit {
            total: input.total() as u64,
            max: MAX_TWO_INPUT_PHOTONS as u64,
        });
    }
    let ctx = SumContext::new(formula, input, s);
    let total = input.total();

    #[cfg(feature = "parallel")]
    let entries: Vec<(Complex64, f64)> = if total >= PARALLEL_MIN_TOTAL {
        use rayon::prelude::*;
        (0..=total).into_par_iter().map(|m| ctx.amplitude(m)).collect()
    } else {
        (0..=total).map(|m| ctx.amplitude(m)).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let entries: Vec<(Complex64, f64)> = (0..=total).map(|m| ctx.amplitude(m)).collect();

    let bound = entries.iter().map(|e| e.1).fold(0.0, f64::max);
    if bound > PRECISION_BUDGET {
        return Err(Error::PrecisionExhausted { n1: input.n1, n2: input.n2, bound });
    }
    Ok(OutputDistribution { total, amplitudes: entries.into_iter().map(|e| e.0).collect() })
}

/// A(m) = sqrt(C(n, m)) rho^m tau^(n-m) for |n>|0>.
pub fn single_input_distribution(n: u32, s: &SymmetricSplitter) -> Result<OutputDistribution> {
    if n > MAX_SINGLE_INPUT_PHOTONS {
        return Err(Error::PhotonLimit { total: n as u64, max: MAX_SINGLE_INPUT_PHOTONS as u64 });
    }
    let n64 = n as u64;
    let amplitudes = (0..=n64)
        .map(|m| {
            let weight = 0.5 * ln_binomial(n64, m).expect("m <= n");
            (complex_pow(s.rho(), m) * complex_pow(s.tau(), n64 - m))
                .scale_log(weight)
                .to_complex()
        })
        .collect();
    Ok(OutputDistribution { total: n, amplitudes })
}

/// Path-counting amplitudes for |n1>|n2>.
pub fn two_input_distribution(input: FockPair, s: &SymmetricSplitter) -> Result<OutputDistribution> {
    assemble(Formula::PathCount, input, s)
}

/// Same distribution, with each path weight written as a root of four binomials.
pub fn two_input_distribution_streamlined(
    input: FockPair,
    s: &SymmetricSplitter,
) -> Result<OutputDistribution> {
    assemble(Formula::Streamlined, input, s)
}

/// Relative error of N^m / m! as a stand-in for C(N, m).
pub fn cell_count_approx_error(cells: u64, m: u64) -> Result<f64> {
    if m > cells {
        return Err(Error::InvalidArgument(format!("m = {m} exceeds N = {cells}")));
    }
    if cells > 100_000_000 {
        return Err(Error::InvalidArgument(format!("N = {cells} exceeds 1e8")));
    }
    // ln[C(N, m) m! / N^m] = sum_{j < m} ln(1 - j/N)
    let n = cells as f64;
    let log_ratio: f64 = (1..m).map(|j| (-(j as f64) / n).ln_1p()).sum();
    Ok((-log_ratio).exp_m1().abs())
}

/// Poisson law with mean n |rho/tau|^2, truncated at `cutoff`.
#[derive(Debug, Clone, PartialEq)]
pub struct PoissonReference {
    pub mean: f64,
    pub probabilities: Vec<f64>,
}

impl PoissonReference {
    /// Probability mass above the cutoff.
    pub fn tail_mass(&self) -> f64 {
        (1.0 - self.probabilities.iter().sum::<f64>()).max(0.0)
    }
}

pub fn poisson_reference(n: u32, s: &SymmetricSplitter, cutoff: u32) -> Result<PoissonReference> {
    let tau_sq = s.tau().norm_sqr();
    if tau_sq == 0.0 {
        return Err(Error::InvalidArgument("Poisson limit needs tau != 0".into()));
    }
    if cutoff > n {
        return Err(Error::InvalidArgument(format!("cutoff {cutoff} exceeds n = {n}")));
    }
    let mean = n as f64 * s.rho().norm_sqr() / tau_sq;
    let probabilities = (0..=cutoff as u64)
        .map(|m| {
            if mean == 0.0 {
                if m == 0 { 1.0 } else { 0.0 }
            } else {
                (-mean + m as f64 * mean.ln() - log_factorial(m)).exp()
            }
        })
        .collect();
    Ok(PoissonReference { mean, probabilities })
}

/// Total variation distance between exact probabilities and a truncated
/// reference. The reference's missing tail is added in full, so the value
/// bounds the untruncated distance from above.
pub fn total_variation(exact: &[f64], reference: &PoissonReference) -> f64 {
    let cutoff = reference.probabilities.len();
    let head: f64 = (0..cutoff)
        .map(|m| (exact.get(m).copied().unwrap_or(0.0) - reference.probabilities[m]).abs())
        .sum();
    let exact_tail: f64 = exact.iter().skip(cutoff).sum();
    0.5 * (head + exact_tail) + reference.tail_mass()
}
