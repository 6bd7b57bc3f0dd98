//! Output states from the creation-operator expansion.
//!
//! With a1+ = rho a3+ + tau a4+ and a2+ = tau a3+ + rho a4+, the input
//! |n1>|n2> becomes
//!
//! ```text
//! (rho x + tau y)^n1 (tau x + rho y)^n2 / sqrt(n1! n2!)   with x^a y^b -> sqrt(a! b!) |a>|b>
//! ```
//!
//! The polynomial product is formed with exact integer binomials, and the
//! factorial normalization with exact big integers, so this path shares no
//! arithmetic with the log-space path sum in [`crate::feynman`].

use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::{One, ToPrimitive};

use crate::error::{Error, Result};
use crate::feynman::FockPair;
use crate::numerics::{log_factorial, ComplexAmplitude};
use crate::splitter::SymmetricSplitter;
use crate::state::TwoModeState;

/// Cap on n1 + n2 for the exact-integer expansion.
pub const MAX_EXACT_PHOTONS: u32 = 64;

fn binomials() -> &'static Vec<Vec<u128>> {
    static TABLE: OnceLock<Vec<Vec<u128>>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let n_max = MAX_EXACT_PHOTONS as usize;
        let mut rows: Vec<Vec<u128>> = vec![vec![1]];
        for n in 1..=n_max {
            let prev = &rows[n - 1];
            let row = (0..=n)
                .map(|k| {
                    let left = if k > 0 { prev[k - 1] } else { 0 };
                    let right = if k < n { prev[k] } else { 0 };
                    left + right
                })
                .collect();
            rows.push(row);
        }
        rows
    })
}

fn factorials() -> &'static Vec<BigUint> {
    static TABLE: OnceLock<Vec<BigUint>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut out = vec![BigUint::one()];
        for k in 1..=MAX_EXACT_PHOTONS {
            let next = out.last().unwrap() * BigUint::from(k);
            out.push(next);
        }
        out
    })
}

fn powers(z: Complex64, k_max: u32) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(k_max as usize + 1);
    let mut acc = Complex64::new(1.0, 0.0);
    out.push(acc);
    for _ in 0..k_max {
        acc *= z;
        out.push(acc);
    }
    out
}

/// sqrt(m3! m4! / (n1! n2!)) from exact integers, rounded once.
fn number_state_factor(m3: u32, m4: u32, n1: u32, n2: u32) -> f64 {
    let f = factorials();
    let num = &f[m3 as usize] * &f[m4 as usize];
    let den = &f[n1 as usize] * &f[n2 as usize];
    let num = num.to_f64().expect("factorials up to 64! fit in f64");
    let den = den.to_f64().expect("factorials up to 64! fit in f64");
    (num / den).sqrt()
}

/// Output state of the splitter for input |n1>|n2>, supported on
/// m3 + m4 = n1 + n2.
pub fn expand_output_state(input: FockPair, s: &SymmetricSplitter) -> Result<TwoModeState> {
    let FockPair { n1, n2 } = input;
    let total = input.total();
    if total > MAX_EXACT_PHOTONS {
        return Err(Error::PhotonLimit { total: total as u64, max: MAX_EXACT_PHOTONS as u64 });
    }
    let binom = binomials();

    // (rho x + tau y)^n1 (tau x + rho y)^n2, keyed by (x degree, rho degree).
    let mut poly: BTreeMap<(u32, u32), u128> = BTreeMap::new();
    for m1 in 0..=n1 {
        let c1 = binom[n1 as usize][m1 as usize];
        for m2 in 0..=n2 {
            let c2 = binom[n2 as usize][m2 as usize];
            *poly.entry((m1 + m2, m1 + n2 - m2)).or_insert(0) += c1 * c2;
        }
    }

    let rho_pow = powers(s.rho(), total);
    let tau_pow = powers(s.tau(), total);
    let mut by_x_degree = vec![Complex64::new(0.0, 0.0); total as usize + 1];
    for ((x_deg, rho_deg), coeff) in poly {
        let tau_deg = total - rho_deg;
        by_x_degree[x_deg as usize] +=
            coeff as f64 * rho_pow[rho_deg as usize] * tau_pow[tau_deg as usize];
    }

    let entries = by_x_degree.into_iter().enumerate().map(|(m3, amp)| {
        let m3 = m3 as u32;
        let m4 = total - m3;
        ((m3, m4), amp * number_state_factor(m3, m4, n1, n2))
    });
    TwoModeState::from_amplitudes(total, entries, 0.0)
}

/// Applies the splitter's two-mode transform to an arbitrary superposition.
pub fn apply_splitter(state: &TwoModeState, s: &SymmetricSplitter) -> Result<TwoModeState> {
    if !state.is_normalized(1e-10) {
        return Err(Error::NotNormalized { norm_sqr: state.norm_sqr() });
    }
    let mut acc: BTreeMap<(u32, u32), ComplexAmplitude> = BTreeMap::new();
    let mut n_max = 0;
    for ((a, b), amp) in state.iter() {
        let out = expand_output_state(FockPair::with_max(a, b, MAX_EXACT_PHOTONS)?, s)?;
        n_max = n_max.max(a + b);
        for (key, c) in out.iter() {
            *acc.entry(key).or_default() += amp * c;
        }
    }
    TwoModeState::from_amplitudes(n_max, acc, state.deficit())
}

/// Poisson mass above `n_max` for mean `mean`.
fn poisson_tail(mean: f64, n_max: u32) -> f64 {
    if mean == 0.0 {
        return 0.0;
    }
    let k0 = n_max as u64 + 1;
    let mut term = (-mean + k0 as f64 * mean.ln() - log_factorial(k0)).exp();
    let mut tail = 0.0;
    let mut k = k0;
    while term > 0.0 && (term > tail * 1e-18 || (k as f64) < mean) {
        tail += term;
        k += 1;
        term *= mean / k as f64;
    }
    tail
}

fn coherent_mode(gamma: Complex64, n_max: u32) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(n_max as usize + 1);
    let mut c = Complex64::new((-0.5 * gamma.norm_sqr()).exp(), 0.0);
    out.push(c);
    for k in 1..=n_max {
        c = c * gamma / (k as f64).sqrt();
        out.push(c);
    }
    out
}

/// Product of Glauber coherent states |gamma1>|gamma2>, truncated at `n_max`
/// photons per mode. The truncated tail is recorded as the state's deficit.
pub fn coherent_two_mode(gamma1: Complex64, gamma2: Complex64, n_max: u32) -> Result<TwoModeState> {
    for gamma in [gamma1, gamma2] {
        let mean = gamma.norm_sqr();
        if !mean.is_finite() || mean > n_max as f64 / 4.0 {
            return Err(Error::InadequateTruncation { mean, n_max });
        }
    }
    let t1 = poisson_tail(gamma1.norm_sqr(), n_max);
    let t2 = poisson_tail(gamma2.norm_sqr(), n_max);
    let deficit = t1 + t2 - t1 * t2;

    let c1 = coherent_mode(gamma1, n_max);
    let c2 = coherent_mode(gamma2, n_max);
    let entries = c1.iter().enumerate().flat_map(|(a, x)| {
        c2.iter().enumerate().map(move |(b, y)| ((a as u32, b as u32), x * y))
    });
    TwoModeState::from_amplitudes(n_max, entries, deficit)
}

/// |<expected|actual>|^2 where actual is the splitter applied to
/// |gamma1>|gamma2> and expected is |rho g1 + tau g2>|tau g1 + rho g2>.
pub fn coherent_passthrough_fidelity(
    gamma1: Complex64,
    gamma2: Complex64,
    s: &SymmetricSplitter,
    n_max: u32,
) -> Result<f64> {
    let input = coherent_two_mode(gamma1, gamma2, n_max)?;
    let actual = apply_splitter(&input, s)?;
    let (rho, tau) = (s.rho(), s.tau());
    let expected = coherent_two_mode(rho * gamma1 + tau * gamma2, tau * gamma1 + rho * gamma2, n_max)?;
    Ok(expected.inner(&actual).norm_sqr())
}

/// Amplitude of detecting exactly one photon at port 3 on each of `k`
/// successive passes of |n> through the splitter, the port-4 output of each
/// pass feeding the next.
pub fn repeated_annihilation(n: u32, k: u32, s: &SymmetricSplitter) -> Result<ComplexAmplitude> {
    if k > n {
        return Err(Error::InvalidArgument(format!("cannot remove {k} photons from {n}")));
    }
    let mut amp = Complex64::new(1.0, 0.0);
    for j in 0..k {
        let remaining = n - j;
        let out = expand_output_state(FockPair::with_max(remaining, 0, MAX_EXACT_PHOTONS)?, s)?;
        amp *= out.amplitude(1, remaining - 1);
    }
    Ok(amp)
}
