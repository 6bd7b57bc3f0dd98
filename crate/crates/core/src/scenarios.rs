//! Closed-form limiting cases: two-photon coalescence, weak-splitter photon
//! removal and addition, and cascaded removal.
//!
//! Each function is a direct formula; the tests check it against the
//! general distribution routines, so this layer carries no physics of its own.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{complex_pow, ComplexAmplitude, LogMagnitudePhase};
use crate::splitter::SymmetricSplitter;

/// P(|1>|1>) for input |1>|1>, i.e. |rho^2 + tau^2|^2.
pub fn hom_coincidence_probability(s: &SymmetricSplitter) -> f64 {
    (s.rho() * s.rho() + s.tau() * s.tau()).norm_sqr()
}

fn sqrt_k_rho_tau_pow(k: u64, tau_power: u64, s: &SymmetricSplitter) -> ComplexAmplitude {
    (LogMagnitudePhase::from_complex(s.rho()) * complex_pow(s.tau(), tau_power))
        .scale_log(0.5 * (k as f64).ln())
        .to_complex()
}

/// sqrt(n) rho tau^(n-1): one photon at port 3, n-1 at port 4, for input |n>|0>.
pub fn annihilation_amplitude(n: u32, s: &SymmetricSplitter) -> Result<ComplexAmplitude> {
    if n == 0 {
        return Err(Error::InvalidArgument("annihilation needs n >= 1".into()));
    }
    Ok(sqrt_k_rho_tau_pow(n as u64, n as u64 - 1, s))
}

/// sqrt(n+1) rho tau^n: all n+1 photons at port 4, for input |n>|1>.
pub fn creation_amplitude(n: u32, s: &SymmetricSplitter) -> ComplexAmplitude {
    sqrt_k_rho_tau_pow(n as u64 + 1, n as u64, s)
}

/// Two weak splitters in series, each post-selected on one photon at its
/// port 3: amplitude of leaving |n-2>.
pub fn cascade_two_photon_annihilator(n: u32, s: &SymmetricSplitter) -> Result<ComplexAmplitude> {
    if n < 2 {
        return Err(Error::InvalidArgument("cascade needs n >= 2".into()));
    }
    Ok(annihilation_amplitude(n, s)? * annihilation_amplitude(n - 1, s)?)
}

/// Product over k = 1..=n of annihilation_amplitude(n-k+1) / rho. Its
/// magnitude tends to sqrt(n!) as |rho| -> 0.
pub fn nfold_annihilation_ratio(n: u32, s: &SymmetricSplitter) -> Result<ComplexAmplitude> {
    if s.rho().norm() == 0.0 {
        return Err(Error::InvalidArgument("ratio to rho needs rho != 0".into()));
    }
    let mut acc = Complex64::new(1.0, 0.0);
    for k in 1..=n {
        acc *= annihilation_amplitude(n - k + 1, s)? / s.rho();
    }
    Ok(acc)
}

/// A reported value: a real, a complex number or a series of reals.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Quantity {
    Real(f64),
    Complex { re: f64, im: f64 },
    Series(Vec<f64>),
    Text(String),
}

impl From<f64> for Quantity {
    fn from(x: f64) -> Self {
        Quantity::Real(x)
    }
}

impl From<Complex64> for Quantity {
    fn from(z: Complex64) -> Self {
        Quantity::Complex { re: z.re, im: z.im }
    }
}

impl From<Vec<f64>> for Quantity {
    fn from(v: Vec<f64>) -> Self {
        Quantity::Series(v)
    }
}

impl From<&str> for Quantity {
    fn from(s: &str) -> Self {
        Quantity::Text(s.to_owned())
    }
}

/// Output document for a named scenario.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioResult {
    pub scenario: String,
    pub inputs: BTreeMap<String, Quantity>,
    pub outputs: BTreeMap<String, Quantity>,
    pub references: Vec<String>,
}

impl ScenarioResult {
    pub fn new(scenario: &str) -> Self {
        Self {
            scenario: scenario.to_owned(),
            inputs: BTreeMap::new(),
            outputs: BTreeMap::new(),
            references: Vec::new(),
        }
    }

    pub fn input(mut self, key: &str, value: impl Into<Quantity>) -> Self {
        self.inputs.insert(key.to_owned(), value.into());
        self
    }

    pub fn output(mut self, key: &str, value: impl Into<Quantity>) -> Self {
        self.outputs.insert(key.to_owned(), value.into());
        self
    }

    pub fn reference(mut self, text: &str) -> Self {
        self.references.push(text.to_owned());
        self
    }
}
