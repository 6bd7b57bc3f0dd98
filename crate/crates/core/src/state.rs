use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::ComplexAmplitude;

/// Amplitudes below this magnitude are not stored.
pub const PRUNE_THRESHOLD: f64 = 1e-15;

/// Slack allowed above unit norm.
pub const NORM_SLACK: f64 = 1e-12;

/// Sparse truncated state of two bosonic modes in the Fock basis.
///
/// `deficit` is the probability mass known to be missing because of
/// truncation; it is carried along and never silently renormalized away.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeState {
    n_max: u32,
    amplitudes: BTreeMap<(u32, u32), ComplexAmplitude>,
    deficit: f64,
}

impl TwoModeState {
    pub fn vacuum() -> Self {
        Self::fock(0, 0)
    }

    pub fn fock(m3: u32, m4: u32) -> Self {
        let mut amplitudes = BTreeMap::new();
        amplitudes.insert((m3, m4), Complex64::new(1.0, 0.0));
        Self { n_max: m3.max(m4), amplitudes, deficit: 0.0 }
    }

    /// Builds a state from (m3, m4, amplitude) entries. Repeated keys add,
    /// tiny amplitudes are pruned.
    pub fn from_amplitudes<I>(n_max: u32, entries: I, deficit: f64) -> Result<Self>
    where
        I: IntoIterator<Item = ((u32, u32), ComplexAmplitude)>,
    {
        let mut amplitudes: BTreeMap<(u32, u32), ComplexAmplitude> = BTreeMap::new();
        for ((m3, m4), amp) in entries {
            if m3 > n_max || m4 > n_max {
                return Err(Error::InvalidArgument(format!(
                    "component ({m3}, {m4}) exceeds truncation {n_max}"
                )));
            }
            *amplitudes.entry((m3, m4)).or_default() += amp;
        }
        amplitudes.retain(|_, a| a.norm() >= PRUNE_THRESHOLD);
        let state = Self { n_max, amplitudes, deficit };
        let norm_sqr = state.norm_sqr();
        if norm_sqr > 1.0 + NORM_SLACK {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(state)
    }

    pub fn n_max(&self) -> u32 {
        self.n_max
    }

    pub fn deficit(&self) -> f64 {
        self.deficit
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn amplitude(&self, m3: u32, m4: u32) -> ComplexAmplitude {
        self.amplitudes.get(&(m3, m4)).copied().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = ((u32, u32), ComplexAmplitude)> + '_ {
        self.amplitudes.iter().map(|(k, v)| (*k, *v))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.values().map(|a| a.norm_sqr()).sum()
    }

    /// Norm plus declared truncation deficit equals one within `tol`.
    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm_sqr() + self.deficit - 1.0).abs() <= tol
    }

    /// <self|other>.
    pub fn inner(&self, other: &TwoModeState) -> ComplexAmplitude {
        let (small, large, conj_small) = if self.len() <= other.len() {
            (self, other, true)
        } else {
            (other, self, false)
        };
        let mut acc = Complex64::new(0.0, 0.0);
        for (key, a) in &small.amplitudes {
            if let Some(b) = large.amplitudes.get(key) {
                acc += if conj_small { a.conj() * b } else { b.conj() * a };
            }
        }
        acc
    }

    /// Probability per total photon number m3 + m4.
    pub fn sector_weights(&self) -> BTreeMap<u32, f64> {
        let mut out = BTreeMap::new();
        for ((m3, m4), a) in &self.amplitudes {
            *out.entry(m3 + m4).or_insert(0.0) += a.norm_sqr();
        }
        out
    }

    /// Marginal probability of m3 photons in the first mode.
    pub fn first_mode_marginal(&self) -> BTreeMap<u32, f64> {
        let mut out = BTreeMap::new();
        for ((m3, _), a) in &self.amplitudes {
            *out.entry(*m3).or_insert(0.0) += a.norm_sqr();
        }
        out
    }
}
